use crate::config::{Command, Format, RunConfig};
use crate::error::CliError;
use crate::input::load_polytope;
use crate::verify;
use serde_json::{json, Value};
use solidsum_core::chain::enumerate_chains;
use solidsum_core::oracle::{lattice_points_with_active, solid_angle_at_with, SolidAngleValue};
use solidsum_core::sums::{macdonald_fit, quasi_coefficients, solid_angle_sum_poisson};
use solidsum_core::transform::{transform_face_traced, transform_quadrature, transform_via_chains, QuadratureOptions};
use solidsum_core::{Branch, Complex64, FaceLattice, Rational64, RationalVector};
use std::collections::BTreeMap;

/// Relative tolerance for the recursion and chain-sum paths to count as agreeing.
pub const PATH_AGREEMENT: f64 = 1e-12;

/// Output of one command: CSV rows and the full JSON diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub header: &'static str,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
    /// Human-readable notes for stderr.
    pub log: Vec<String>,
    /// Names of failed checks; nonempty only for `verify`.
    pub failures: Vec<String>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::from(self.header);
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let mut out = serde_json::to_string_pretty(&self.json).expect("report JSON is serialisable");
                out.push('\n');
                out
            }
        }
    }
}

/// Fixed-point with 15 decimals in the usual range, scientific otherwise.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        format!("{x:.15}")
    } else {
        format!("{x:.15e}")
    }
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn rat(t: Rational64) -> String {
    t.to_string()
}

/// Space-separated coordinates, safe inside a CSV field.
pub fn point(x: &RationalVector) -> String {
    x.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::ConstantPhase => "constant_phase",
        Branch::Recursive => "recursive",
    }
}

pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let polytope = load_polytope(&config.polytope_path)?;
    let lattice = FaceLattice::new(&polytope)?;
    match config.command {
        Command::Ft => ft(&lattice, config),
        Command::Asum => asum(&lattice, config),
        Command::Coeffs => coeffs(&lattice, config),
        Command::Oracle => oracle(&lattice, config),
        Command::Fit => fit(&lattice, config),
        Command::Verify => Ok(verify::run(&lattice, &config.schedule, &config.oracle).report()),
    }
}

fn check_dim(flag: &str, v: &RationalVector, d: usize) -> Result<(), CliError> {
    if v.dim() != d {
        return Err(CliError::Input(format!("--{flag}: expected {d} coordinates, found {}", v.dim())));
    }
    Ok(())
}

fn ft(lattice: &FaceLattice, config: &RunConfig) -> Result<Report, CliError> {
    let xi = config.xi.as_ref().ok_or_else(|| CliError::Input("--xi is required".into()))?;
    check_dim("xi", xi, lattice.dim())?;
    let chains = enumerate_chains(lattice)?;
    let (direct, trace) = transform_face_traced(lattice, 0, xi)?;
    let via_chains = transform_via_chains(lattice, &chains, xi)?;
    let quad = transform_quadrature(lattice.polytope(), &xi.to_f64(), QuadratureOptions::default())?;
    let path_gap = (direct.value - via_chains).norm();
    let quad_gap = (direct.value - quad.value).norm();
    let agree = path_gap <= PATH_AGREEMENT * direct.value.norm().max(via_chains.norm()) + 1e-14 && quad_gap <= quad.error;
    let trace_json: Vec<Value> =
        trace.iter().map(|&f| json!({"face": f, "dim": lattice.face(f).dim})).collect();
    let log = vec![format!(
        "branch {}; constant phase on faces {:?} (dims {:?})",
        branch_name(direct.branch),
        trace,
        trace.iter().map(|&f| lattice.face(f).dim).collect::<Vec<_>>()
    )];
    Ok(Report {
        header: "xi,re,im,branch,chains_re,chains_im,quadrature_re,quadrature_im,quadrature_error,agree",
        rows: vec![vec![
            point(xi),
            num(direct.value.re),
            num(direct.value.im),
            branch_name(direct.branch).into(),
            num(via_chains.re),
            num(via_chains.im),
            num(quad.value.re),
            num(quad.value.im),
            sci(quad.error),
            agree.to_string(),
        ]],
        json: json!({
            "xi": xi.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "value": complex(direct.value),
            "branch": branch_name(direct.branch),
            "constant_phase_faces": trace_json,
            "chains": complex(via_chains),
            "chain_count": chains.len(),
            "path_difference": path_gap,
            "quadrature": {"value": complex(quad.value), "error": quad.error, "simplices": quad.simplices, "difference": quad_gap},
            "agree": agree,
        }),
        log,
        failures: Vec::new(),
    })
}

fn per_epsilon(points: &[(f64, f64)]) -> Value {
    Value::Array(points.iter().map(|(e, v)| json!({"eps": e, "value": v})).collect())
}

fn asum(lattice: &FaceLattice, config: &RunConfig) -> Result<Report, CliError> {
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for &t in &config.t {
        let r = solid_angle_sum_poisson(lattice, t, &config.schedule)?;
        rows.push(vec![rat(t), num(r.value), r.eps_last().to_string(), sci(r.residual)]);
        entries.push(json!({
            "t": rat(t),
            "value": r.value,
            "eps_last": r.eps_last(),
            "residual": r.residual,
            "imaginary_residue": r.imaginary_residue,
            "points": r.points,
            "per_epsilon": per_epsilon(&r.per_epsilon),
        }));
    }
    Ok(Report { header: "t,value,eps_last,residual", rows, json: Value::Array(entries), log: Vec::new(), failures: Vec::new() })
}

fn coeffs(lattice: &FaceLattice, config: &RunConfig) -> Result<Report, CliError> {
    let chains = enumerate_chains(lattice)?;
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for &t in &config.t {
        for c in quasi_coefficients(lattice, &chains, t, &config.schedule)? {
            rows.push(vec![rat(t), c.index.to_string(), num(c.value), c.eps_last().to_string(), sci(c.extrapolation_residual)]);
            entries.push(json!({
                "t": rat(t),
                "i": c.index,
                "value": c.value,
                "eps_last": c.eps_last(),
                "residual": c.extrapolation_residual,
                "imaginary_residue": c.imaginary_residue,
                "per_epsilon": per_epsilon(&c.per_epsilon),
            }));
        }
    }
    Ok(Report { header: "t,i,value,eps_last,residual", rows, json: Value::Array(entries), log: Vec::new(), failures: Vec::new() })
}

fn angle_row(x: &RationalVector, w: &SolidAngleValue) -> (Vec<String>, Value) {
    (
        vec![point(x), num(w.value), w.method.to_string(), sci(w.stderr)],
        json!({"x": point(x), "omega": w.value, "method": w.method.to_string(), "stderr": w.stderr}),
    )
}

fn oracle(lattice: &FaceLattice, config: &RunConfig) -> Result<Report, CliError> {
    let p = lattice.polytope();
    let header = "x,omega,method,stderr";
    if let Some(x) = &config.x {
        check_dim("x", x, lattice.dim())?;
        let (row, entry) = angle_row(x, &solid_angle_at_with(p, x, &config.oracle)?);
        return Ok(Report { header, rows: vec![row], json: json!({"points": [entry]}), log: Vec::new(), failures: Vec::new() });
    }
    let t = config.t[0];
    let mut by_cone: BTreeMap<Vec<usize>, SolidAngleValue> = BTreeMap::new();
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut total = 0.0;
    for (z, active) in lattice_points_with_active(p, t)? {
        // angles depend only on the active facets; evaluate at the scaled-down point
        let x = RationalVector::from_integers(&z);
        let w = match by_cone.get(&active) {
            Some(w) => *w,
            None => {
                let inv = solidsum_core::rational::from_rational64(t.recip());
                let w = solid_angle_at_with(p, &x.scale(&inv), &config.oracle)?;
                by_cone.insert(active, w);
                w
            }
        };
        total += w.value;
        let (row, entry) = angle_row(&x, &w);
        rows.push(row);
        entries.push(entry);
    }
    Ok(Report {
        header,
        rows,
        json: json!({"t": rat(t), "sum": total, "points": entries}),
        failures: Vec::new(),
        log: vec![format!("{} integer points of {}P, solid-angle sum {}", entries.len(), rat(t), num(total))],
    })
}

fn fit(lattice: &FaceLattice, config: &RunConfig) -> Result<Report, CliError> {
    let t_max = config.t_max.unwrap_or(lattice.dim() as i64 + 3);
    if t_max < lattice.dim() as i64 + 1 {
        return Err(CliError::Input(format!("--t-max must be at least {}", lattice.dim() + 1)));
    }
    let f = macdonald_fit(lattice, t_max, &config.oracle)?;
    let rows = f.coefficients.iter().enumerate().map(|(i, c)| vec![i.to_string(), num(*c), sci(f.residual)]).collect();
    Ok(Report {
        header: "i,value,residual",
        rows,
        json: json!({
            "coefficients": f.coefficients,
            "residual": f.residual,
            "parity_ok": f.parity_ok,
            "samples": f.samples.iter().map(|(t, v)| json!({"t": t, "value": v})).collect::<Vec<_>>(),
        }),
        failures: Vec::new(),
        log: vec![format!("parity {}", if f.parity_ok { "ok" } else { "violated" })],
    })
}
