//! Identity checks run by `solidsum verify`.
//!
//! Every library operation the checks call is recorded, so the test harness can
//! assert that one run touches all of them.

use crate::commands::{num, Report};
use serde_json::{json, Value};
use solidsum_core::chain::{chain_exponential_weight, chain_rational_weight, enumerate_chains, link_weight};
use solidsum_core::geometry::{face_volume, project_onto_tangent};
use solidsum_core::lattice::{integer_points_in_subspace, primitive_normal};
use solidsum_core::oracle::{
    brianchon_gram, ehrhart_relation_check, gaussian_smoothed_weight, solid_angle_at_with, solid_angle_sum_direct_with,
    OracleOptions,
};
use solidsum_core::rational::{self, Rational, RationalVector};
use solidsum_core::sums::{
    codim_one_closed_form, macdonald_fit, periodized_bernoulli1, quasi_coefficient, quasi_coefficients,
    solid_angle_sum_poisson,
};
use solidsum_core::transform::{transform_face, transform_quadrature, transform_via_chains, QuadratureOptions};
use solidsum_core::{ChainSet, Complex64, DampingSchedule, FaceLattice, Polytope, Rational64};
use std::collections::BTreeSet;

/// Library operations a verify run is expected to call.
pub const OPERATIONS: &[&str] = &[
    "Polytope::new",
    "FaceLattice::new",
    "project_onto_tangent",
    "face_volume",
    "integer_points_in_subspace",
    "primitive_normal",
    "enumerate_admissible",
    "enumerate_chains",
    "link_weight",
    "chain_rational_weight",
    "chain_exponential_weight",
    "transform_face",
    "transform_via_chains",
    "transform_quadrature",
    "solid_angle_sum_poisson",
    "quasi_coefficient",
    "quasi_coefficients",
    "codim_one_closed_form",
    "periodized_bernoulli1",
    "macdonald_fit",
    "solid_angle_at",
    "solid_angle_sum_direct",
    "gaussian_smoothed_weight",
    "brianchon_gram",
    "ehrhart_relation_check",
];

/// Damped-sum identities (reciprocity, periodicity, constant term).
pub const SUM_TOL: f64 = 2e-3;
/// Closed form against the lattice sum for `a_{d-1}`.
pub const CODIM_ONE_TOL: f64 = 1e-3;
pub const TRANSFORM_REL: f64 = 1e-12;
pub const EXACT_ANGLE_TOL: f64 = 1e-8;
pub const SIGMAS: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The identity does not apply to this polytope.
    Skip,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    /// Largest observed discrepancy.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub coverage: BTreeSet<&'static str>,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.to_string()).collect()
    }

    pub fn report(&self) -> Report {
        let rows = self
            .checks
            .iter()
            .map(|c| vec![c.name.into(), c.status.name().into(), num(c.value), format!("{:.1e}", c.tolerance), c.detail.replace(',', ";")])
            .collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({"check": c.name, "status": c.status.name(), "value": c.value, "tolerance": c.tolerance, "detail": c.detail}))
            .collect();
        let missing: Vec<&str> = OPERATIONS.iter().copied().filter(|op| !self.coverage.contains(op)).collect();
        Report {
            header: "check,status,value,tolerance,detail",
            rows,
            json: json!({"checks": checks, "coverage": self.coverage, "missing_coverage": missing}),
            log: self.checks.iter().map(|c| format!("{:<20} {} {}", c.name, c.status.name(), c.detail)).collect(),
            failures: self.failures(),
        }
    }
}

struct Run<'a> {
    lattice: &'a FaceLattice,
    chains: ChainSet,
    schedule: &'a DampingSchedule,
    oracle: &'a OracleOptions,
    /// Least common denominator of the vertex coordinates: the quasi-period.
    period: i64,
    coverage: BTreeSet<&'static str>,
}

/// Observed discrepancy, the tolerance it was held to, and a note.
type Outcome = Result<(f64, f64, String), String>;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn rel_gap(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale < 1e-14 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

impl Run<'_> {
    fn hit(&mut self, op: &'static str) {
        self.coverage.insert(op);
    }

    fn dim(&self) -> usize {
        self.lattice.dim()
    }

    fn sign(&self) -> f64 {
        if self.dim() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn construction(&mut self) -> Outcome {
        self.hit("Polytope::new");
        self.hit("FaceLattice::new");
        let p = self.lattice.polytope();
        let rebuilt = Polytope::new(p.vertices().to_vec()).map_err(|e| e.to_string())?;
        let again = FaceLattice::new(&rebuilt).map_err(|e| e.to_string())?;
        if rebuilt.vertices().len() != p.vertices().len() || again.faces().len() != self.lattice.faces().len() {
            return Err("rebuilding from the vertex list changed the face lattice".into());
        }
        let chi = self.lattice.euler_characteristic();
        if chi != 1 {
            return Err(format!("Euler characteristic {chi}"));
        }
        Ok((0.0, 0.0, format!("{} faces; Euler characteristic 1", self.lattice.faces().len())))
    }

    fn faces(&mut self) -> Outcome {
        self.hit("project_onto_tangent");
        self.hit("face_volume");
        let d = self.dim();
        let xi = RationalVector::new((0..d).map(|k| Rational::new((2 * k as i64 + 1).into(), (k as i64 + 3).into())).collect());
        for f in self.lattice.faces() {
            let p1 = project_onto_tangent(f, &xi);
            if project_onto_tangent(f, &p1) != p1 {
                return Err(format!("projection onto face {} is not idempotent", f.id));
            }
            let resid = xi.sub(&p1);
            if f.tangent_basis.iter().any(|u| u.dot(&resid) != Rational::from_integer(0.into())) {
                return Err(format!("projection residual is not orthogonal to face {}", f.id));
            }
            let v = face_volume(f);
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("face {} has volume {v}", f.id));
            }
        }
        Ok((0.0, 0.0, format!("projections and volumes of {} faces", self.lattice.faces().len())))
    }

    fn lattice_algebra(&mut self) -> Outcome {
        self.hit("primitive_normal");
        self.hit("integer_points_in_subspace");
        self.hit("enumerate_admissible");
        let d = self.dim();
        let p = self.lattice.polytope();
        for cover in self.lattice.facets_of(0) {
            let facet = self.lattice.face(cover.child);
            let pn = primitive_normal(p, facet.facets[0]);
            let v = RationalVector::from_integers(&pn.vector);
            let k = cover.normal.dot(&v);
            if pn.is_zero() || k <= Rational::from_integer(0.into()) || cover.normal.scale(&(v.norm_squared() / k)) != v {
                return Err(format!("primitive normal {:?} is not the facet normal of face {}", pn.vector, facet.id));
            }
            let s = integer_points_in_subspace(&facet.tangent_basis, d).map_err(|e| e.to_string())?;
            if s.rank() != d - 1 || !s.basis.iter().all(|b| pn.vector.iter().zip(b).map(|(x, y)| x * y).sum::<i64>() == 0) {
                return Err(format!("integer basis of facet {} has the wrong span", facet.id));
            }
        }
        let mut points = 0;
        for c in self.chains.iter() {
            let pts: Vec<Vec<i64>> = c.admissible.enumerate_admissible(3.0).iter().collect();
            for x in &pts {
                let neg: Vec<i64> = x.iter().map(|v| -v).collect();
                if !c.admissible.contains(x) || !pts.contains(&neg) || x.iter().all(|&v| v == 0) {
                    return Err(format!("chain {:?}: enumeration returned {x:?}", c.faces));
                }
            }
            points += pts.len();
        }
        Ok((0.0, 0.0, format!("{} admissible points over {} chains", points, self.chains.len())))
    }

    fn chain_weights(&mut self) -> Outcome {
        self.hit("enumerate_chains");
        self.hit("link_weight");
        self.hit("chain_rational_weight");
        self.hit("chain_exponential_weight");
        let third = Rational64::new(1, 3);
        let mut worst: f64 = 0.0;
        let mut checked = 0;
        for c in self.chains.iter().filter(|c| c.length() > 0) {
            let Some(x) = c.admissible.enumerate_admissible(4.0).iter().next() else { continue };
            let xi = RationalVector::from_integers(&x);
            let mut product = Complex64::new(self.lattice.face(c.terminal()).volume, 0.0);
            for pair in c.faces.windows(2) {
                product *= link_weight(self.lattice, pair[0], pair[1], &xi).map_err(|e| e.to_string())?;
            }
            let r = chain_rational_weight(self.lattice, c, &xi).map_err(|e| e.to_string())?;
            let e = chain_exponential_weight(self.lattice, c, third, &xi).map_err(|e| e.to_string())?;
            worst = worst.max(rel_gap(product, r)).max((e.norm() - 1.0).abs());
            checked += 1;
        }
        if worst > TRANSFORM_REL {
            return Err(format!("link-weight product differs from the chain weight by {worst:.3e}"));
        }
        Ok((worst, TRANSFORM_REL, format!("{checked} chains")))
    }

    fn frequencies(&self) -> Vec<RationalVector> {
        let d = self.dim();
        let half = Rational::new(1.into(), 2.into());
        let mut out = vec![RationalVector::zeros(d)];
        for cover in self.lattice.facets_of(0) {
            out.push(cover.normal.clone());
            out.push(cover.normal.scale(&half));
        }
        for k in 0..d {
            let mut e = vec![0; d];
            e[k] = 1;
            out.push(RationalVector::from_integers(&e).scale(&Rational::new(3.into(), 2.into())));
        }
        out.push(RationalVector::new((0..d).map(|k| Rational::new((k as i64 + 1).into(), (2 * k as i64 + 3).into())).collect()));
        out
    }

    fn dual_path(&mut self) -> Outcome {
        self.hit("transform_face");
        self.hit("transform_via_chains");
        self.hit("transform_quadrature");
        let mut worst: f64 = 0.0;
        let freqs = self.frequencies();
        for xi in &freqs {
            let a = transform_face(self.lattice, 0, xi).map_err(|e| e.to_string())?.value;
            let b = transform_via_chains(self.lattice, &self.chains, xi).map_err(|e| e.to_string())?;
            let q = transform_quadrature(self.lattice.polytope(), &xi.to_f64(), QuadratureOptions::default())
                .map_err(|e| e.to_string())?;
            if (q.value - a).norm() > q.error {
                return Err(format!("quadrature differs by {:.3e} > {:.3e} at {xi}", (q.value - a).norm(), q.error));
            }
            worst = worst.max(rel_gap(a, b));
            if xi.is_zero() && a != Complex64::new(self.lattice.body().volume, 0.0) {
                return Err(format!("transform at 0 is {a}"));
            }
        }
        if worst > TRANSFORM_REL {
            return Err(format!("recursion and chain sum differ by {worst:.3e}"));
        }
        Ok((worst, TRANSFORM_REL, format!("{} frequencies", freqs.len())))
    }

    fn poisson(&mut self, t: Rational64) -> Result<f64, String> {
        self.hit("solid_angle_sum_poisson");
        Ok(solid_angle_sum_poisson(self.lattice, t, self.schedule).map_err(|e| e.to_string())?.value)
    }

    fn reciprocity(&mut self) -> Outcome {
        let t = Rational64::new(13, 10);
        let gap = (self.poisson(-t)? - self.sign() * self.poisson(t)?).abs();
        if gap > SUM_TOL {
            return Err(format!("A(-t) - (-1)^d A(t) = {gap:.3e} at t = {t}"));
        }
        Ok((gap, SUM_TOL, format!("t = ±{t}")))
    }

    fn periodicity(&mut self) -> Outcome {
        self.hit("quasi_coefficients");
        let mut worst: f64 = 0.0;
        for t in [Rational64::new(1, 5), Rational64::new(7, 10)] {
            let a = quasi_coefficients(self.lattice, &self.chains, t, self.schedule).map_err(|e| e.to_string())?;
            let b = quasi_coefficients(self.lattice, &self.chains, t + self.period, self.schedule).map_err(|e| e.to_string())?;
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x.value - y.value).abs());
            }
        }
        if worst > SUM_TOL {
            return Err(format!("a_i(t + {}) - a_i(t) reaches {worst:.3e}", self.period));
        }
        Ok((worst, SUM_TOL, format!("period {}", self.period)))
    }

    fn constant_term(&mut self) -> Outcome {
        self.hit("quasi_coefficient");
        let mut worst: f64 = 0.0;
        for k in 1..=2 {
            let t = Rational64::from_integer(k * self.period);
            let a0 = quasi_coefficient(self.lattice, &self.chains, 0, t, self.schedule).map_err(|e| e.to_string())?;
            worst = worst.max(a0.value.abs());
        }
        if worst > SUM_TOL {
            return Err(format!("|a_0| reaches {worst:.3e}"));
        }
        Ok((worst, SUM_TOL, format!("t = {}, {}", self.period, 2 * self.period)))
    }

    fn codim_one(&mut self) -> Outcome {
        self.hit("codim_one_closed_form");
        self.hit("periodized_bernoulli1");
        self.hit("quasi_coefficient");
        let d = self.dim();
        let p = self.lattice.polytope();
        let mut worst: f64 = 0.0;
        for t in [Rational64::new(1, 4), Rational64::new(1, 2), Rational64::new(13, 10)] {
            let closed = codim_one_closed_form(self.lattice, t);
            // the same formula from primitive normals and the float Bernoulli function
            let mut again = 0.0;
            for cover in self.lattice.facets_of(0) {
                let facet = self.lattice.face(cover.child);
                let pn = primitive_normal(p, facet.facets[0]);
                let phase = RationalVector::from_integers(&pn.vector).dot(&facet.basepoint) * rational::from_rational64(t);
                again -= facet.volume / pn.norm() * periodized_bernoulli1(rational::to_f64(&phase));
            }
            if (closed - again).abs() > 1e-12 {
                return Err(format!("closed form {closed} vs {again} from primitive normals at t = {t}"));
            }
            let sum = quasi_coefficient(self.lattice, &self.chains, d - 1, t, self.schedule).map_err(|e| e.to_string())?;
            worst = worst.max((sum.value - closed).abs());
        }
        if worst > CODIM_ONE_TOL {
            return Err(format!("closed form and lattice sum differ by {worst:.3e}"));
        }
        Ok((worst, CODIM_ONE_TOL, "t = 1/4, 1/2, 13/10".into()))
    }

    fn direct_sum(&mut self) -> Outcome {
        self.hit("solid_angle_sum_direct");
        let mut worst: f64 = 0.0;
        let mut tol: f64 = 0.0;
        for t in [Rational64::new(1, 2), Rational64::from_integer(1)] {
            let direct = solid_angle_sum_direct_with(self.lattice.polytope(), t, self.oracle).map_err(|e| e.to_string())?;
            let gap = (self.poisson(t)? - direct.value).abs();
            if gap > SUM_TOL + SIGMAS * direct.stderr {
                return Err(format!("Poisson and direct sums differ by {gap:.3e} at t = {t}"));
            }
            worst = worst.max(gap);
            tol = tol.max(SUM_TOL + SIGMAS * direct.stderr);
        }
        Ok((worst, tol, "t = 1/2, 1".into()))
    }

    fn smoothing(&mut self) -> Outcome {
        self.hit("solid_angle_at");
        self.hit("gaussian_smoothed_weight");
        let p = self.lattice.polytope();
        let v = &p.vertices()[0];
        let exact = solid_angle_at_with(p, v, self.oracle).map_err(|e| e.to_string())?;
        let g = gaussian_smoothed_weight(p, &v.to_f64(), 1e-4, 100_000, self.oracle.seed).map_err(|e| e.to_string())?;
        let gap = (g.value - exact.value).abs();
        let tol = SIGMAS * (g.stderr + exact.stderr) + 1e-3;
        if gap > tol {
            return Err(format!("smoothed weight {} vs solid angle {} at {v}", g.value, exact.value));
        }
        Ok((gap, tol, format!("vertex {v}, {}", exact.method)))
    }

    fn ehrhart(&mut self) -> Outcome {
        self.hit("ehrhart_relation_check");
        let mut worst: f64 = 0.0;
        for k in 1..=3 {
            let r = ehrhart_relation_check(self.lattice, k * self.period, self.oracle).map_err(|e| e.to_string())?;
            let gap = (r.lhs - r.rhs).abs();
            if gap > 1e-12 * r.lhs.abs().max(1.0) {
                return Err(format!("lhs {} vs rhs {} at t = {}", r.lhs, r.rhs, k * self.period));
            }
            worst = worst.max(gap);
        }
        Ok((worst, 1e-12, "three dilations".into()))
    }

    fn brianchon_gram(&mut self) -> Outcome {
        self.hit("brianchon_gram");
        let bg = brianchon_gram(self.lattice, self.oracle).map_err(|e| e.to_string())?;
        let tol = if bg.stderr == 0.0 { EXACT_ANGLE_TOL } else { SIGMAS * bg.stderr };
        if bg.value.abs() > tol {
            return Err(format!("alternating angle sum {} exceeds {tol:.3e}", bg.value));
        }
        Ok((bg.value.abs(), tol, format!("stderr {:.3e}", bg.stderr)))
    }

    /// `None` when the parity statement does not apply.
    fn parity(&mut self) -> Option<Outcome> {
        self.hit("macdonald_fit");
        let d = self.dim() as i64;
        let fit = macdonald_fit(self.lattice, d + 3, self.oracle);
        if self.period != 1 {
            return None;
        }
        let fit = match fit {
            Ok(f) => f,
            Err(e) => return Some(Err(e.to_string())),
        };
        // sampled angles (d >= 4) perturb the odd coefficients by their standard error
        if d >= 4 {
            return None;
        }
        let worst = fit
            .coefficients
            .iter()
            .enumerate()
            .filter(|(k, _)| (d as usize - k) % 2 == 1)
            .fold(0.0f64, |m, (_, c)| m.max(c.abs()));
        Some(if fit.parity_ok { Ok((worst, solidsum_core::sums::MACDONALD_FIT_TOLERANCE, format!("coefficients {:?}", fit.coefficients))) } else { Err(format!("odd-parity coefficients reach {worst:.3e}")) })
    }
}

fn record(checks: &mut Vec<Check>, name: &'static str, outcome: Option<Outcome>) {
    let check = match outcome {
        Some(Ok((value, tolerance, detail))) => Check { name, status: Status::Pass, value, tolerance, detail },
        Some(Err(detail)) => Check { name, status: Status::Fail, value: f64::NAN, tolerance: f64::NAN, detail },
        None => Check { name, status: Status::Skip, value: f64::NAN, tolerance: f64::NAN, detail: "not applicable".into() },
    };
    checks.push(check);
}

/// Runs every check; failures are reported, never propagated.
pub fn run(lattice: &FaceLattice, schedule: &DampingSchedule, oracle: &OracleOptions) -> VerifyReport {
    let period = lattice
        .polytope()
        .vertices()
        .iter()
        .map(|v| v.integer_form_i64().map(|(_, den)| den).unwrap_or(1))
        .fold(1i64, |acc, den| acc / gcd(acc, den) * den);
    let chains = enumerate_chains(lattice).expect("chains of a built face lattice");
    let mut run = Run { lattice, chains, schedule, oracle, period, coverage: BTreeSet::new() };
    let mut checks = Vec::new();
    record(&mut checks, "construction", Some(run.construction()));
    record(&mut checks, "faces", Some(run.faces()));
    record(&mut checks, "lattice", Some(run.lattice_algebra()));
    record(&mut checks, "chain_weights", Some(run.chain_weights()));
    record(&mut checks, "dual_path_transform", Some(run.dual_path()));
    record(&mut checks, "reciprocity", Some(run.reciprocity()));
    record(&mut checks, "periodicity", Some(run.periodicity()));
    record(&mut checks, "constant_term", Some(run.constant_term()));
    record(&mut checks, "codim_one", Some(run.codim_one()));
    record(&mut checks, "direct_vs_poisson", Some(run.direct_sum()));
    record(&mut checks, "smoothing", Some(run.smoothing()));
    record(&mut checks, "ehrhart_relation", Some(run.ehrhart()));
    record(&mut checks, "brianchon_gram", Some(run.brianchon_gram()));
    let parity = run.parity();
    record(&mut checks, "macdonald_parity", parity);
    VerifyReport { checks, coverage: run.coverage }
}
