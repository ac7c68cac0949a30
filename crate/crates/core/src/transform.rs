//! Fourier transforms `hat 1_F(ξ) = ∫_F e^{-2πi<ξ,x>} dF` of faces.
//!
//! Three routes are provided: the facet recursion ([`transform_face`]), the sum
//! of total chain weights ([`transform_via_chains`]) and a closed-form simplex
//! quadrature ([`transform_quadrature`]) that shares no code with the other two.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;

use crate::chain::{rational_weight_dir, split_frequency, stokes_factor, ChainSet};
use crate::error::{Error, Result};
use crate::fmath;
use crate::geometry::{lexicographic_min, simplex_volume_exact, triangulate, FaceId, FaceLattice, Polytope};
use crate::rational::{self, RationalVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `proj_F(ξ) = 0`: the phase is constant on the face.
    ConstantPhase,
    /// Expanded over the facets of the face.
    Recursive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformValue {
    pub value: Complex64,
    pub branch: Branch,
    pub face: FaceId,
}

/// Memoised facet recursion at frequency `scale * dir`.
pub(crate) struct Recursion<'a> {
    lattice: &'a FaceLattice,
    memo: Vec<Option<Complex64>>,
    inv_scale: f64,
}

impl<'a> Recursion<'a> {
    pub(crate) fn new(lattice: &'a FaceLattice) -> Self {
        Recursion { lattice, memo: vec![None; lattice.faces().len()], inv_scale: 1.0 }
    }

    /// `hat F(scale * dir)`; the memo is reset on every call.
    pub(crate) fn evaluate(&mut self, face: FaceId, dir: &[i64], scale: Rational64) -> Complex64 {
        self.memo.iter_mut().for_each(|m| *m = None);
        self.inv_scale = *scale.denom() as f64 / *scale.numer() as f64;
        self.visit(face, dir, scale)
    }

    fn visit(&mut self, id: FaceId, dir: &[i64], scale: Rational64) -> Complex64 {
        if let Some(v) = self.memo[id] {
            return v;
        }
        let face = self.lattice.face(id);
        let value = if face.is_orthogonal(dir) {
            fmath::turn(face.phase_turn(dir, scale)) * face.volume
        } else {
            let mut acc = Complex64::zero();
            let lattice = self.lattice;
            for cover in lattice.facets_of(id) {
                let c = crate::chain::link_coefficient(face, cover, dir);
                if c != 0.0 {
                    acc += self.visit(cover.child, dir, scale) * c;
                }
            }
            acc * stokes_factor(1) * self.inv_scale
        };
        self.memo[id] = Some(value);
        value
    }
}

/// `hat F(ξ)` by the facet recursion, with exact branch decisions.
pub fn transform_face(lattice: &FaceLattice, face: FaceId, xi: &RationalVector) -> Result<TransformValue> {
    Ok(transform_face_traced(lattice, face, xi)?.0)
}

/// Like [`transform_face`], also returning every face where the recursion stopped
/// on the constant-phase branch (vertices included).
pub fn transform_face_traced(
    lattice: &FaceLattice,
    face: FaceId,
    xi: &RationalVector,
) -> Result<(TransformValue, Vec<FaceId>)> {
    let (dir, scale) = split_frequency(xi)?;
    let mut rec = Recursion::new(lattice);
    let value = rec.evaluate(face, &dir, scale);
    let branch = if lattice.face(face).is_orthogonal(&dir) { Branch::ConstantPhase } else { Branch::Recursive };
    let mut trace: Vec<FaceId> = rec
        .memo
        .iter()
        .enumerate()
        .filter(|(id, m)| m.is_some() && lattice.face(*id).is_orthogonal(&dir))
        .map(|(id, _)| id)
        .collect();
    trace.sort_unstable();
    Ok((TransformValue { value, branch, face }, trace))
}

/// Result of the floating-point recursion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealTransformValue {
    pub value: Complex64,
    pub branch: Branch,
    /// Some constant-phase decision was taken by the `1e-10` projection cutoff
    /// rather than by an exact zero.
    pub flagged: bool,
}

pub const REAL_PROJECTION_CUTOFF: f64 = 1e-10;

/// `hat F(ξ)` for a floating-point frequency (no exact branch decisions).
pub fn transform_face_real(lattice: &FaceLattice, face: FaceId, xi: &[f64]) -> RealTransformValue {
    let n = lattice.faces().len();
    let mut memo: Vec<Option<Complex64>> = vec![None; n];
    let mut flagged = false;
    let value = real_visit(lattice, face, xi, &mut memo, &mut flagged);
    let branch = if real_proj(lattice, face, xi).1 < REAL_PROJECTION_CUTOFF {
        Branch::ConstantPhase
    } else {
        Branch::Recursive
    };
    RealTransformValue { value, branch, flagged }
}

// (projection coefficients along the orthogonal tangent basis, projection norm)
fn real_proj(lattice: &FaceLattice, id: FaceId, xi: &[f64]) -> (Vec<f64>, f64) {
    let face = lattice.face(id);
    let coeffs: Vec<f64> = face
        .tangent_int
        .iter()
        .zip(&face.tangent_norm2)
        .map(|(u, n2)| u.iter().zip(xi).map(|(&a, b)| a as f64 * b).sum::<f64>() / n2)
        .collect();
    let norm2: f64 = coeffs.iter().zip(&face.tangent_norm2).map(|(c, n2)| c * c * n2).sum();
    (coeffs, fmath::sqrt(norm2))
}

fn real_visit(
    lattice: &FaceLattice,
    id: FaceId,
    xi: &[f64],
    memo: &mut Vec<Option<Complex64>>,
    flagged: &mut bool,
) -> Complex64 {
    if let Some(v) = memo[id] {
        return v;
    }
    let face = lattice.face(id);
    let (coeffs, norm) = real_proj(lattice, id, xi);
    let value = if norm < REAL_PROJECTION_CUTOFF {
        *flagged |= norm > 0.0;
        let phase: f64 = face.basepoint.to_f64().iter().zip(xi).map(|(x, k)| x * k).sum();
        let (s, c) = fmath::sin_cos(-core::f64::consts::TAU * phase);
        Complex64::new(c, s) * face.volume
    } else {
        // proj_F(ξ) = Σ c_j u_j
        let mut proj = vec![0.0; xi.len()];
        for (c, u) in coeffs.iter().zip(&face.tangent_int) {
            for (p, &a) in proj.iter_mut().zip(u) {
                *p += c * a as f64;
            }
        }
        let mut acc = Complex64::zero();
        for cover in lattice.facets_of(id) {
            let num: f64 = proj.iter().zip(&cover.int_normal).map(|(p, &n)| p * n as f64).sum();
            let w = num / (cover.normal_norm * norm * norm);
            acc += real_visit(lattice, cover.child, xi, memo, flagged) * w;
        }
        acc * stokes_factor(1)
    };
    memo[id] = Some(value);
    value
}

/// `hat P(ξ) = Σ_T R_T(ξ) E_T(ξ) 1_{S(T)}(ξ)`.
pub fn transform_via_chains(lattice: &FaceLattice, chains: &ChainSet, xi: &RationalVector) -> Result<Complex64> {
    if xi.is_zero() {
        return Ok(Complex64::new(lattice.body().volume, 0.0));
    }
    let (dir, scale) = split_frequency(xi)?;
    let inv = *scale.denom() as f64 / *scale.numer() as f64;
    let mut total = Complex64::zero();
    for chain in chains.iter() {
        if !chain.admissible.contains(&dir) {
            continue;
        }
        let r = rational_weight_dir(lattice, chain, &dir) * libm::pow(inv, chain.length() as f64);
        let e = fmath::turn(lattice.face(chain.terminal()).phase_turn(&dir, scale));
        total += r * e;
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    /// Maximum number of simplices in a triangulation.
    pub max_simplices: usize,
    pub tolerance: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { max_simplices: 100_000, tolerance: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureValue {
    pub value: Complex64,
    pub error: f64,
    pub simplices: usize,
}

/// Rounding floor added to the two-triangulation disagreement.
const QUADRATURE_FLOOR: f64 = 1e-12;

/// `∫_P e^{-2πi<ξ,x>} dx` summed over simplices in closed form.
///
/// Each simplex contributes `|det| * exp[z_0, ..., z_d]` with `z_j = -2πi<ξ, v_j>`
/// (a divided difference of `exp`). The error estimate is the disagreement
/// between triangulations pulled from the lexicographically first and last
/// vertices, plus a rounding floor scaled by the total volume.
pub fn transform_quadrature(p: &Polytope, xi: &[f64], options: QuadratureOptions) -> Result<QuadratureValue> {
    if xi.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: xi.len() });
    }
    let all: Vec<usize> = (0..p.vertices().len()).collect();
    let first = lexicographic_min(p.vertices(), &all);
    let last = *all.iter().max_by(|&&a, &&b| p.vertices()[a].cmp(&p.vertices()[b])).unwrap();
    let points: Vec<Vec<f64>> = p.vertices().iter().map(|v| v.to_f64()).collect();
    let mut runs = [(Complex64::zero(), 0.0, 0usize); 2];
    for (run, apex) in runs.iter_mut().zip([first, last]) {
        let simplices = triangulate(p, &all, apex);
        if simplices.len() > options.max_simplices {
            return Err(Error::BudgetExceeded { estimate: f64::INFINITY, tolerance: options.tolerance });
        }
        let mut acc = Complex64::zero();
        let mut mass = 0.0;
        for s in &simplices {
            let jac = fmath::abs(rational::to_f64(&simplex_volume_exact(p.vertices(), s)))
                * (1..=p.dim()).product::<usize>() as f64;
            let nodes: Vec<Complex64> = s
                .iter()
                .map(|&v| {
                    let phase: f64 = points[v].iter().zip(xi).map(|(x, k)| x * k).sum();
                    Complex64::new(0.0, -core::f64::consts::TAU * phase)
                })
                .collect();
            acc += exp_divided_difference(&nodes) * jac;
            mass += jac;
        }
        *run = (acc, mass, simplices.len());
    }
    let value = runs[0].0;
    let error = (runs[0].0 - runs[1].0).norm() + QUADRATURE_FLOOR * (1.0 + runs[0].1);
    if error > options.tolerance {
        return Err(Error::BudgetExceeded { estimate: error, tolerance: options.tolerance });
    }
    Ok(QuadratureValue { value, error, simplices: runs[0].2 })
}

/// Divided difference `exp[z_0, ..., z_n]`.
///
/// Nodes that all lie within distance 1 of their centroid use the Taylor series
/// `e^m Σ_k h_k(z - m) / (k + n)!`; otherwise the two most distant nodes are split
/// off with the usual recurrence, so every division is by a gap of at least 1.
pub fn exp_divided_difference(z: &[Complex64]) -> Complex64 {
    let n = z.len();
    if n == 1 {
        return z[0].exp();
    }
    let mut best = (0, 0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let gap = (z[i] - z[j]).norm();
            if gap > best.2 {
                best = (i, j, gap);
            }
        }
    }
    if best.2 <= 1.0 {
        return exp_dd_series(z);
    }
    let (i, j, _) = best;
    let without = |k: usize| -> Vec<Complex64> {
        z.iter().enumerate().filter(|&(idx, _)| idx != k).map(|(_, v)| *v).collect()
    };
    (exp_divided_difference(&without(j)) - exp_divided_difference(&without(i))) / (z[i] - z[j])
}

fn exp_dd_series(z: &[Complex64]) -> Complex64 {
    let n = z.len();
    let mean = z.iter().sum::<Complex64>() / n as f64;
    let w: Vec<Complex64> = z.iter().map(|x| x - mean).collect();
    // h[k] = complete homogeneous symmetric polynomial of degree k in w
    const TERMS: usize = 40;
    let mut h = [Complex64::zero(); TERMS];
    h[0] = Complex64::new(1.0, 0.0);
    for wi in &w {
        for k in 1..TERMS {
            let prev = h[k - 1];
            h[k] += wi * prev;
        }
    }
    let mut factorial = (1..n).map(|k| k as f64).product::<f64>();
    let mut sum = Complex64::zero();
    for (k, hk) in h.iter().enumerate() {
        sum += hk / factorial;
        factorial *= (k + n) as f64;
    }
    mean.exp() * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::enumerate_chains;
    use core::f64::consts::PI;

    fn lattice(pts: &[&[i64]]) -> FaceLattice {
        let p = Polytope::new(pts.iter().map(|p| RationalVector::from_integers(p)).collect()).unwrap();
        FaceLattice::new(&p).unwrap()
    }

    fn q(s: &[&str]) -> RationalVector {
        RationalVector::new(s.iter().map(|x| rational::parse_rational(x).unwrap()).collect())
    }

    #[test]
    fn segment_at_zero() {
        let seg = lattice(&[&[0], &[1]]);
        let v = transform_face(&seg, 0, &RationalVector::zeros(1)).unwrap();
        assert_eq!(v.value, Complex64::new(1.0, 0.0));
        assert_eq!(v.branch, Branch::ConstantPhase);
    }

    #[test]
    fn square_values() {
        let sq = lattice(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let v = transform_face(&sq, 0, &q(&["1", "0"])).unwrap();
        assert!(v.value.norm() < 1e-15);
        assert_eq!(v.branch, Branch::Recursive);
        let v = transform_face(&sq, 0, &q(&["1/2", "0"])).unwrap();
        assert!((v.value - Complex64::new(0.0, -2.0 / PI)).norm() < 1e-15);
    }

    #[test]
    fn dual_paths_on_triangle() {
        let tri = lattice(&[&[0, 0], &[2, 0], &[0, 1]]);
        let chains = enumerate_chains(&tri).unwrap();
        for xi in [["1", "0"], ["1", "2"], ["1/3", "-1/2"], ["0", "5"], ["-2", "7/3"]] {
            let xi = q(&xi);
            let a = transform_face(&tri, 0, &xi).unwrap().value;
            let b = transform_via_chains(&tri, &chains, &xi).unwrap();
            assert!((a - b).norm() < 1e-13, "{xi}: {a} vs {b}");
        }
    }

    #[test]
    fn divided_difference_limits() {
        // coincident nodes: exp[z, z] = e^z
        let z = Complex64::new(0.3, -0.2);
        let dd = exp_divided_difference(&[z, z]);
        assert!((dd - z.exp()).norm() < 1e-15);
        // exp[0, a] = (e^a - 1) / a, near and far
        for a in [Complex64::new(0.0, 1e-6), Complex64::new(0.0, 0.7), Complex64::new(0.0, 12.0)] {
            let dd = exp_divided_difference(&[Complex64::zero(), a]);
            let exact = if a.norm() < 1e-3 { 1.0 + a / 2.0 + a * a / 6.0 } else { (a.exp() - 1.0) / a };
            assert!((dd - exact).norm() < 1e-12 * (1.0 + exact.norm()), "{a}");
        }
        // exp[0,0,0] = 1/2
        let dd = exp_divided_difference(&[Complex64::zero(); 3]);
        assert!((dd - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn quadrature_square() {
        let sq = lattice(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let opts = QuadratureOptions::default();
        let v = transform_quadrature(sq.polytope(), &[0.0, 0.0], opts).unwrap();
        assert!((v.value - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let v = transform_quadrature(sq.polytope(), &[0.5, 0.0], opts).unwrap();
        assert!((v.value - Complex64::new(0.0, -2.0 / PI)).norm() < 1e-9);
    }

    #[test]
    fn real_path_flags_near_zero_projection() {
        let sq = lattice(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let v = transform_face_real(&sq, 0, &[0.5, 1e-12]);
        assert!(v.flagged);
        let w = transform_face_real(&sq, 0, &[0.5, 0.0]);
        assert!(!w.flagged);
        assert!((w.value - Complex64::new(0.0, -2.0 / PI)).norm() < 1e-14);
    }
}
