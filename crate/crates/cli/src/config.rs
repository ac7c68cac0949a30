use crate::error::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use solidsum_core::oracle::OracleOptions;
use solidsum_core::rational::{parse_rational, parse_rational64, RationalVector};
use solidsum_core::{DampingSchedule, Extrapolation, Rational64};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "solidsum", version, about = "Fourier transforms of polytopes and Macdonald solid-angle sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Subcommand, Debug)]
pub enum CommandArgs {
    /// Fourier transform of the indicator function at one frequency
    Ft {
        #[command(flatten)]
        common: CommonArgs,
        /// Frequency as comma-separated rationals, e.g. 1/2,0
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
    },
    /// Solid-angle sum A_P(t) by the damped Poisson sum
    Asum {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        dilations: DilationArgs,
        #[command(flatten)]
        schedule: ScheduleArgs,
    },
    /// Quasi-coefficients a_0(t), ..., a_d(t)
    Coeffs {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        dilations: DilationArgs,
        #[command(flatten)]
        schedule: ScheduleArgs,
    },
    /// Solid angles at one point, or at every integer point of tP
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Dilation whose integer points are listed (default 1)
        #[arg(long, allow_hyphen_values = true, conflicts_with = "x")]
        t: Option<String>,
        /// A single point as comma-separated rationals
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Run the identity checks on one polytope
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Least-squares polynomial through A_P(1), ..., A_P(t_max)
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest integer dilation sampled (default d + 3)
        #[arg(long)]
        t_max: Option<i64>,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Polytope JSON file
    pub polytope: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DilationArgs {
    /// Dilation: integer, p/q or exact decimal
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Comma-separated dilations
    #[arg(long, allow_hyphen_values = true)]
    pub t_list: Option<String>,
}

#[derive(Args, Debug)]
pub struct ScheduleArgs {
    /// Strictly decreasing damping parameters, comma-separated
    #[arg(long)]
    pub eps_list: Option<String>,
    /// Constant c in the radius rule R(ε) = c sqrt(ln(1/δ)/(πε))
    #[arg(long)]
    pub radius_scale: Option<f64>,
    /// none, richardson, or a polynomial order k
    #[arg(long)]
    pub extrap_order: Option<String>,
}

#[derive(Args, Debug)]
pub struct SamplingArgs {
    /// Monte Carlo seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo directions per cone
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Ft,
    Asum,
    Coeffs,
    Oracle,
    Verify,
    Fit,
}

/// Validated settings of one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub polytope_path: PathBuf,
    /// Dilations, in the order given.
    pub t: Vec<Rational64>,
    pub xi: Option<RationalVector>,
    pub x: Option<RationalVector>,
    pub schedule: DampingSchedule,
    pub oracle: OracleOptions,
    pub t_max: Option<i64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub fn parse_dilation(s: &str) -> Result<Rational64, CliError> {
    parse_rational64(s).map_err(|_| CliError::Input(format!("invalid dilation `{s}`")))
}

pub fn parse_vector(flag: &str, s: &str) -> Result<RationalVector, CliError> {
    let coords = s
        .split(',')
        .map(|c| parse_rational(c).map_err(|_| CliError::Input(format!("--{flag}: invalid rational `{}`", c.trim()))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RationalVector::new(coords))
}

fn dilations(args: &DilationArgs) -> Result<Vec<Rational64>, CliError> {
    let mut t = Vec::new();
    if let Some(s) = &args.t {
        t.push(parse_dilation(s)?);
    }
    if let Some(list) = &args.t_list {
        for s in list.split(',') {
            t.push(parse_dilation(s.trim())?);
        }
    }
    if t.is_empty() {
        return Err(CliError::Input("one of --t or --t-list is required".into()));
    }
    if t.iter().any(|t| *t.numer() == 0) {
        return Err(CliError::Input("dilations must be nonzero".into()));
    }
    Ok(t)
}

fn schedule(args: &ScheduleArgs) -> Result<DampingSchedule, CliError> {
    let mut s = DampingSchedule::default();
    if let Some(list) = &args.eps_list {
        s.epsilons = list
            .split(',')
            .map(|e| e.trim().parse::<f64>().map_err(|_| CliError::Input(format!("--eps-list: invalid number `{}`", e.trim()))))
            .collect::<Result<_, _>>()?;
    }
    if let Some(c) = args.radius_scale {
        s.radius_scale = c;
    }
    if let Some(order) = &args.extrap_order {
        s.extrapolation = match order.as_str() {
            "none" | "0" => Extrapolation::None,
            "richardson" => Extrapolation::RichardsonLinear,
            k => Extrapolation::PolyFit(k.parse().map_err(|_| {
                CliError::Input(format!("--extrap-order: expected none, richardson or an integer, found `{k}`"))
            })?),
        };
    }
    s.validate().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(s)
}

fn oracle_options(args: &SamplingArgs) -> Result<OracleOptions, CliError> {
    let mut o = OracleOptions { seed: args.seed, ..OracleOptions::default() };
    if let Some(n) = args.samples {
        if n == 0 {
            return Err(CliError::Input("--samples must be positive".into()));
        }
        o.samples = n;
    }
    Ok(o)
}

impl RunConfig {
    fn base(command: Command, common: &CommonArgs) -> Self {
        RunConfig {
            command,
            polytope_path: common.polytope.clone(),
            t: Vec::new(),
            xi: None,
            x: None,
            schedule: DampingSchedule::default(),
            oracle: OracleOptions::default(),
            t_max: None,
            format: common.format,
            out: common.out.clone(),
        }
    }

    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        Ok(match &cli.command {
            CommandArgs::Ft { common, xi } => {
                RunConfig { xi: Some(parse_vector("xi", xi)?), ..Self::base(Command::Ft, common) }
            }
            CommandArgs::Asum { common, dilations: d, schedule: s } => RunConfig {
                t: dilations(d)?,
                schedule: schedule(s)?,
                ..Self::base(Command::Asum, common)
            },
            CommandArgs::Coeffs { common, dilations: d, schedule: s } => RunConfig {
                t: dilations(d)?,
                schedule: schedule(s)?,
                ..Self::base(Command::Coeffs, common)
            },
            CommandArgs::Oracle { common, t, x, sampling } => {
                let t = match t {
                    Some(s) => parse_dilation(s)?,
                    None => Rational64::from_integer(1),
                };
                if *t.numer() <= 0 {
                    return Err(CliError::Input("oracle dilations must be positive".into()));
                }
                RunConfig {
                    t: vec![t],
                    x: x.as_deref().map(|s| parse_vector("x", s)).transpose()?,
                    oracle: oracle_options(sampling)?,
                    ..Self::base(Command::Oracle, common)
                }
            }
            CommandArgs::Verify { common, schedule: s, sampling } => RunConfig {
                schedule: schedule(s)?,
                oracle: oracle_options(sampling)?,
                ..Self::base(Command::Verify, common)
            },
            CommandArgs::Fit { common, t_max, sampling } => RunConfig {
                t_max: *t_max,
                oracle: oracle_options(sampling)?,
                ..Self::base(Command::Fit, common)
            },
        })
    }
}
