//! Solid-angle sums `A_P(t)` as Gaussian-damped Poisson sums, quasi-coefficients
//! `a_i(t)` grouped by chain length, and the codimension-one closed form.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

use crate::chain::{rational_weight_dir, ChainSet};
use crate::error::{Error, Result};
use crate::fmath;
use crate::geometry::FaceLattice;
use crate::lattice::{AdmissiblePoints, SublatticeDescription};
use crate::rational::{self, Rational};
use crate::transform::Recursion;

/// How the `ε -> 0` limit is taken from the damped partial sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extrapolation {
    /// The value at the smallest `ε`.
    None,
    /// Line through the two smallest `ε`, evaluated at `0`.
    RichardsonLinear,
    /// Least-squares polynomial of the given order in `ε` through the last
    /// `order + 2` points, evaluated at `0`.
    PolyFit(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DampingSchedule {
    /// Strictly decreasing damping parameters.
    pub epsilons: Vec<f64>,
    /// The constant `c` in `R(ε) = c * sqrt(ln(1/δ) / (π ε))`.
    pub radius_scale: f64,
    /// Target tail `δ`.
    pub tail: f64,
    pub extrapolation: Extrapolation,
    /// Largest accepted extrapolation residual.
    pub tolerance: f64,
}

impl Default for DampingSchedule {
    fn default() -> Self {
        DampingSchedule {
            epsilons: (0..7).map(|k| 0.2 / (1u32 << k) as f64).collect(),
            radius_scale: 1.0,
            tail: 1e-10,
            extrapolation: Extrapolation::None,
            tolerance: 1e-2,
        }
    }
}

impl DampingSchedule {
    pub fn radius(&self, eps: f64) -> f64 {
        self.radius_scale * fmath::sqrt(fmath::ln(1.0 / self.tail) / (core::f64::consts::PI * eps))
    }

    pub fn max_radius(&self) -> f64 {
        self.epsilons.iter().map(|&e| self.radius(e)).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::InvalidArgument("empty ε schedule".into()));
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidArgument("ε must be positive and finite".into()));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidArgument("ε schedule must be strictly decreasing".into()));
        }
        if !(self.radius_scale > 0.0 && self.tail > 0.0 && self.tail < 1.0) {
            return Err(Error::InvalidArgument("radius scale and tail must be positive (tail < 1)".into()));
        }
        let needed = match self.extrapolation {
            Extrapolation::None => 1,
            Extrapolation::RichardsonLinear => 2,
            Extrapolation::PolyFit(k) => k + 2,
        };
        if self.epsilons.len() < needed {
            return Err(Error::InvalidArgument(alloc::format!(
                "extrapolation needs {needed} ε values, schedule has {}",
                self.epsilons.len()
            )));
        }
        Ok(())
    }
}

/// `ε -> 0` extrapolation of a damped sum with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct SumResult {
    pub t: Rational64,
    pub value: f64,
    /// `(ε, partial sum)` for every schedule entry.
    pub per_epsilon: Vec<(f64, f64)>,
    /// Largest of the fit residual and the gap between the extrapolated value
    /// and the partial sum at the smallest `ε`.
    pub residual: f64,
    /// Largest `|Im|` of any paired partial sum.
    pub imaginary_residue: f64,
    /// Number of nonzero lattice points summed at the largest radius.
    pub points: usize,
}

impl SumResult {
    pub fn eps_last(&self) -> f64 {
        self.per_epsilon.last().map_or(f64::NAN, |p| p.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiCoefficientResult {
    pub index: usize,
    pub t: Rational64,
    pub value: f64,
    pub per_epsilon: Vec<(f64, f64)>,
    pub extrapolation_residual: f64,
    pub imaginary_residue: f64,
}

impl QuasiCoefficientResult {
    pub fn eps_last(&self) -> f64 {
        self.per_epsilon.last().map_or(f64::NAN, |p| p.0)
    }
}

// Damped partial sums for every ε at once.
struct Accumulator<'a> {
    schedule: &'a DampingSchedule,
    radii2: Vec<f64>,
    sums: Vec<Complex64>,
}

impl<'a> Accumulator<'a> {
    fn new(schedule: &'a DampingSchedule) -> Self {
        let radii2 = schedule.epsilons.iter().map(|&e| fmath::powi(schedule.radius(e), 2)).collect();
        Accumulator { schedule, radii2, sums: vec![Complex64::zero(); schedule.epsilons.len()] }
    }

    fn add(&mut self, norm2: i128, term: Complex64) {
        let n2 = norm2 as f64;
        for ((s, &eps), &r2) in self.sums.iter_mut().zip(&self.schedule.epsilons).zip(&self.radii2) {
            if n2 <= r2 {
                *s += term * fmath::exp(-core::f64::consts::PI * eps * n2);
            }
        }
    }

    fn add_constant(&mut self, c: Complex64) {
        self.sums.iter_mut().for_each(|s| *s += c);
    }

    fn finish(self, scale: f64) -> Result<(f64, Vec<(f64, f64)>, f64, f64)> {
        let imaginary = self.sums.iter().map(|s| fmath::abs(s.im * scale)).fold(0.0, f64::max);
        let per: Vec<(f64, f64)> = self.schedule.epsilons.iter().zip(&self.sums).map(|(&e, s)| (e, s.re * scale)).collect();
        let (value, residual) = extrapolate(&per, self.schedule.extrapolation);
        if !(residual <= self.schedule.tolerance) {
            return Err(Error::NonConvergent { residual, tolerance: self.schedule.tolerance });
        }
        Ok((value, per, residual, imaginary))
    }
}

/// Extrapolated value and residual from `(ε, value)` pairs with decreasing `ε`.
pub fn extrapolate(points: &[(f64, f64)], method: Extrapolation) -> (f64, f64) {
    let n = points.len();
    let last = points[n - 1].1;
    let (value, fit_residual) = match method {
        Extrapolation::None => {
            let prev = if n > 1 { points[n - 2].1 } else { last };
            return (last, fmath::abs(last - prev));
        }
        Extrapolation::RichardsonLinear => {
            let (e0, v0) = points[n - 2];
            let (e1, v1) = points[n - 1];
            (v1 - (v0 - v1) * e1 / (e0 - e1), 0.0)
        }
        Extrapolation::PolyFit(order) => {
            let window = &points[n - (order + 2).min(n)..];
            let xs: Vec<f64> = window.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = window.iter().map(|p| p.1).collect();
            let (coeffs, residual) = least_squares_poly(&xs, &ys, order);
            (coeffs[0], residual)
        }
    };
    (value, fit_residual.max(fmath::abs(value - last)))
}

/// Least-squares polynomial fit by Householder QR; returns ascending coefficients
/// and the largest absolute residual.
pub fn least_squares_poly(xs: &[f64], ys: &[f64], degree: usize) -> (Vec<f64>, f64) {
    let m = xs.len();
    let n = degree + 1;
    assert!(m >= n, "underdetermined fit");
    // column scaling keeps the Vandermonde columns comparable
    let span = xs.iter().fold(0.0f64, |a, &x| a.max(fmath::abs(x))).max(f64::MIN_POSITIVE);
    let mut a: Vec<Vec<f64>> = xs.iter().map(|&x| (0..n).map(|j| fmath::powi(x / span, j as i32)).collect()).collect();
    let mut b = ys.to_vec();
    for k in 0..n {
        let norm = fmath::sqrt((k..m).map(|i| a[i][k] * a[i][k]).sum());
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        for j in k..n {
            let s: f64 = (k..m).map(|i| v[i - k] * a[i][j]).sum::<f64>() * 2.0 / vv;
            for i in k..m {
                a[i][j] -= s * v[i - k];
            }
        }
        let s: f64 = (k..m).map(|i| v[i - k] * b[i]).sum::<f64>() * 2.0 / vv;
        for i in k..m {
            b[i] -= s * v[i - k];
        }
    }
    let mut c = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * c[j]).sum();
        c[k] = if a[k][k] == 0.0 { 0.0 } else { (b[k] - s) / a[k][k] };
    }
    for (j, cj) in c.iter_mut().enumerate() {
        *cj /= fmath::powi(span, j as i32);
    }
    let residual = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| fmath::abs(y - c.iter().rev().fold(0.0, |acc, &cj| acc * x + cj)))
        .fold(0.0, f64::max);
    (c, residual)
}

fn check_t(t: Rational64) -> Result<()> {
    if t.is_zero() {
        return Err(Error::InvalidArgument("t must be nonzero".into()));
    }
    Ok(())
}

fn split_point(rep: &[i64]) -> (Vec<i64>, i64) {
    let g = rep.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    (rep.iter().map(|x| x / g).collect(), g)
}

/// `A_P(t) = t^d Σ_{ξ ∈ Z^d} hat P(tξ) e^{-πε||ξ||^2}`, extrapolated to `ε = 0`.
pub fn solid_angle_sum_poisson(lattice: &FaceLattice, t: Rational64, schedule: &DampingSchedule) -> Result<SumResult> {
    check_t(t)?;
    schedule.validate()?;
    let d = lattice.dim();
    let radius = schedule.max_radius();
    let points = SublatticeDescription::orthogonal_to(&[], d)?.enumerate_admissible(radius);
    let mut acc = Accumulator::new(schedule);
    acc.add_constant(Complex64::new(lattice.body().volume, 0.0));
    let mut rec = Recursion::new(lattice);
    for (rep, norm2) in points.pairs() {
        let (dir, g) = split_point(rep);
        let scale = t * g;
        let plus = rec.evaluate(0, &dir, scale);
        let minus = rec.evaluate(0, &dir, -scale);
        acc.add(norm2, plus + minus);
    }
    let td = fmath::powi(rational::rational64_to_f64(t), d as i32);
    let (value, per_epsilon, residual, imaginary_residue) = acc.finish(td)?;
    Ok(SumResult { t, value, per_epsilon, residual, imaginary_residue, points: points.len() })
}

/// `a_i(t)` for one `i`; see [`quasi_coefficients`].
pub fn quasi_coefficient(
    lattice: &FaceLattice,
    chains: &ChainSet,
    i: usize,
    t: Rational64,
    schedule: &DampingSchedule,
) -> Result<QuasiCoefficientResult> {
    let d = lattice.dim();
    if i > d {
        return Err(Error::InvalidArgument(alloc::format!("coefficient index {i} exceeds dimension {d}")));
    }
    schedule.validate()?;
    if i == d {
        return Ok(QuasiCoefficientResult {
            index: d,
            t,
            value: lattice.body().volume,
            per_epsilon: schedule.epsilons.iter().map(|&e| (e, lattice.body().volume)).collect(),
            extrapolation_residual: 0.0,
            imaginary_residue: 0.0,
        });
    }
    let mut cache = Vec::new();
    chain_length_sum(lattice, chains, d - i, t, schedule, &mut cache)
}

/// `a_0(t), ..., a_d(t)` sharing lattice enumerations between chains.
pub fn quasi_coefficients(
    lattice: &FaceLattice,
    chains: &ChainSet,
    t: Rational64,
    schedule: &DampingSchedule,
) -> Result<Vec<QuasiCoefficientResult>> {
    let d = lattice.dim();
    let mut cache = Vec::new();
    let mut out = Vec::with_capacity(d + 1);
    for i in 0..d {
        out.push(chain_length_sum(lattice, chains, d - i, t, schedule, &mut cache)?);
    }
    out.push(quasi_coefficient(lattice, chains, d, t, schedule)?);
    Ok(out)
}

type EnumerationCache = Vec<(SublatticeDescription, AdmissiblePoints)>;

fn chain_length_sum(
    lattice: &FaceLattice,
    chains: &ChainSet,
    length: usize,
    t: Rational64,
    schedule: &DampingSchedule,
    cache: &mut EnumerationCache,
) -> Result<QuasiCoefficientResult> {
    check_t(t)?;
    let d = lattice.dim();
    let radius = schedule.max_radius();
    let mut acc = Accumulator::new(schedule);
    for chain in chains.of_length(length) {
        let idx = match cache.iter().position(|(s, _)| *s == chain.admissible) {
            Some(k) => k,
            None => {
                cache.push((chain.admissible.clone(), chain.admissible.enumerate_admissible(radius)));
                cache.len() - 1
            }
        };
        let terminal = lattice.face(chain.terminal());
        for (rep, norm2) in cache[idx].1.pairs() {
            let (dir, g) = split_point(rep);
            let scale = t * g;
            let weight = rational_weight_dir(lattice, chain, &dir) / fmath::powi(g as f64, length as i32);
            let sign = if length % 2 == 0 { 1.0 } else { -1.0 };
            let plus = weight * fmath::turn(terminal.phase_turn(&dir, scale));
            let minus = weight * sign * fmath::turn(terminal.phase_turn(&dir, -scale));
            acc.add(norm2, plus + minus);
        }
    }
    let (value, per_epsilon, residual, imaginary_residue) = acc.finish(1.0)?;
    Ok(QuasiCoefficientResult {
        index: d - length,
        t,
        value,
        per_epsilon,
        extrapolation_residual: residual,
        imaginary_residue,
    })
}

/// `{x} - 1/2` off the integers, `0` on them.
pub fn periodized_bernoulli1(x: f64) -> f64 {
    let f = x - fmath::floor(x);
    if f == 0.0 {
        0.0
    } else {
        f - 0.5
    }
}

/// Exact `B̄_1` of a rational argument.
pub fn periodized_bernoulli1_exact(x: &Rational) -> Rational {
    let f = x - x.floor();
    if f.is_zero() {
        f
    } else {
        f - Rational::new(1.into(), 2.into())
    }
}

/// `a_{d-1}(t) = -Σ_F vol(F) / ||v_F|| * B̄_1(<v_F, x_F> t)` over the facets of `P`.
pub fn codim_one_closed_form(lattice: &FaceLattice, t: Rational64) -> f64 {
    let t = rational::from_rational64(t);
    let mut total = 0.0;
    for cover in lattice.facets_of(0) {
        let facet = lattice.face(cover.child);
        let phase = cover.normal.dot(&facet.basepoint) * &t;
        let b = periodized_bernoulli1_exact(&phase);
        total -= facet.volume / cover.normal_norm * rational::to_f64(&b);
    }
    total
}

/// Least-squares polynomial through oracle values `A_P(1), ..., A_P(t_max)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MacdonaldFit {
    /// Ascending coefficients `c_0, ..., c_d`.
    pub coefficients: Vec<f64>,
    pub residual: f64,
    pub samples: Vec<(i64, f64)>,
    /// `c_{d-1}, c_{d-3}, ...` are all below the fit tolerance.
    pub parity_ok: bool,
}

pub const MACDONALD_FIT_TOLERANCE: f64 = 1e-6;

/// Fits a degree-`d` polynomial to the direct solid-angle sums at `t = 1..=t_max`.
pub fn macdonald_fit(lattice: &FaceLattice, t_max: i64, options: &crate::oracle::OracleOptions) -> Result<MacdonaldFit> {
    let d = lattice.dim();
    if t_max < d as i64 + 1 {
        return Err(Error::InvalidArgument(alloc::format!("t_max must be at least {}", d + 1)));
    }
    let mut samples = Vec::new();
    for t in 1..=t_max {
        let v = crate::oracle::solid_angle_sum_direct_with(lattice.polytope(), Rational64::from_integer(t), options)?;
        samples.push((t, v.value));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0 as f64).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (coefficients, residual) = least_squares_poly(&xs, &ys, d);
    if residual > MACDONALD_FIT_TOLERANCE {
        return Err(Error::FitResidualTooLarge { residual, tolerance: MACDONALD_FIT_TOLERANCE });
    }
    let parity_ok = coefficients
        .iter()
        .enumerate()
        .filter(|(k, _)| (d - k) % 2 == 1)
        .all(|(_, c)| fmath::abs(*c) < MACDONALD_FIT_TOLERANCE);
    Ok(MacdonaldFit { coefficients, residual, samples, parity_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polytope;
    use crate::rational::RationalVector;

    fn lattice(pts: &[&[i64]]) -> FaceLattice {
        let p = Polytope::new(pts.iter().map(|p| RationalVector::from_integers(p)).collect()).unwrap();
        FaceLattice::new(&p).unwrap()
    }

    fn r(s: &str) -> Rational64 {
        rational::parse_rational64(s).unwrap()
    }

    #[test]
    fn bernoulli() {
        assert_eq!(periodized_bernoulli1(0.25), -0.25);
        assert_eq!(periodized_bernoulli1(2.0), 0.0);
        assert_eq!(periodized_bernoulli1(-0.25), 0.25);
    }

    #[test]
    fn default_schedule() {
        let s = DampingSchedule::default();
        assert_eq!(s.epsilons.len(), 7);
        assert_eq!(s.epsilons[6], 0.2 / 64.0);
        s.validate().unwrap();
        assert!(s.radius(s.epsilons[6]) > s.radius(s.epsilons[0]));
    }

    #[test]
    fn polyfit_recovers_polynomial() {
        let xs = [0.1, 0.05, 0.025, 0.0125];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 5.0 * x * x).collect();
        let (c, res) = least_squares_poly(&xs, &ys, 2);
        assert!((c[0] - 3.0).abs() < 1e-12 && (c[1] + 2.0).abs() < 1e-10 && res < 1e-12, "{c:?}");
    }

    #[test]
    fn closed_form_square() {
        let sq = lattice(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(codim_one_closed_form(&sq, r("3")), 0.0);
        assert!((codim_one_closed_form(&sq, r("1/4")) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn square_poisson() {
        let sq = lattice(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let s = DampingSchedule::default();
        let v = solid_angle_sum_poisson(&sq, r("3"), &s).unwrap();
        assert!((v.value - 9.0).abs() < 1e-3, "{v:?}");
        let v = solid_angle_sum_poisson(&sq, r("0.25"), &s).unwrap();
        assert!((v.value - 0.25).abs() < 1e-3, "{v:?}");
        assert!(v.imaginary_residue < 1e-9);
    }

    #[test]
    fn square_coefficients() {
        let sq = lattice(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let chains = crate::chain::enumerate_chains(&sq).unwrap();
        let s = DampingSchedule::default();
        let a = quasi_coefficients(&sq, &chains, r("1/4"), &s).unwrap();
        assert_eq!(a[2].value, 1.0);
        assert!((a[1].value - 0.5).abs() < 1e-3, "{:?}", a[1]);
        assert!((a[0].value - 0.0625).abs() < 1e-3, "{:?}", a[0]);
    }
}
