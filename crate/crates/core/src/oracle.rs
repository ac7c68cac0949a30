//! Direct solid angles and lattice-point sums, used as ground truth for the
//! Fourier-side machinery.
//!
//! Points are classified exactly against the facet inequalities. Boundary angles
//! are closed-form up to codimension two in any dimension and at vertices of 3D
//! polytopes; everything else is estimated by sampling directions.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fmath;
use crate::geometry::{FaceId, FaceLattice, Polytope};
use crate::rational::{self, Rational, RationalVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolidAngleMethod {
    /// Interior or exterior, decided exactly.
    Classified,
    Exact1D,
    Exact2D,
    Exact3D,
    /// Closed form on a facet or ridge of a polytope in dimension `>= 4`.
    Dihedral,
    MonteCarlo { samples: usize },
    GaussianSmoothing { eps: f64, samples: usize },
}

impl SolidAngleMethod {
    pub fn is_exact(&self) -> bool {
        !matches!(self, SolidAngleMethod::MonteCarlo { .. } | SolidAngleMethod::GaussianSmoothing { .. })
    }
}

impl core::fmt::Display for SolidAngleMethod {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolidAngleMethod::Classified => f.write_str("classified"),
            SolidAngleMethod::Exact1D => f.write_str("exact1d"),
            SolidAngleMethod::Exact2D => f.write_str("exact2d"),
            SolidAngleMethod::Exact3D => f.write_str("exact3d"),
            SolidAngleMethod::Dihedral => f.write_str("dihedral"),
            SolidAngleMethod::MonteCarlo { samples } => write!(f, "montecarlo({samples})"),
            SolidAngleMethod::GaussianSmoothing { eps, samples } => write!(f, "gaussian({eps},{samples})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolidAngleValue {
    pub value: f64,
    pub method: SolidAngleMethod,
    /// `0` for exact methods.
    pub stderr: f64,
}

impl SolidAngleValue {
    fn exact(value: f64, method: SolidAngleMethod) -> Self {
        SolidAngleValue { value, method, stderr: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceAngle {
    pub face: FaceId,
    pub omega: SolidAngleValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    /// Directions sampled per Monte Carlo estimate.
    pub samples: usize,
    pub seed: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { samples: 2_000_000, seed: 0 }
    }
}

/// `ω_P(x)` with default options.
pub fn solid_angle_at(p: &Polytope, x: &RationalVector) -> Result<SolidAngleValue> {
    solid_angle_at_with(p, x, &OracleOptions::default())
}

pub fn solid_angle_at_with(p: &Polytope, x: &RationalVector, options: &OracleOptions) -> Result<SolidAngleValue> {
    check_dim(p, x.dim())?;
    let mut active = Vec::new();
    for (i, h) in p.facets().iter().enumerate() {
        let s = h.evaluate(x);
        if s.is_positive() {
            return Ok(SolidAngleValue::exact(0.0, SolidAngleMethod::Classified));
        }
        if s.is_zero() {
            active.push(i);
        }
    }
    Ok(cone_angle(p, &active, options))
}

fn check_dim(p: &Polytope, found: usize) -> Result<()> {
    if found != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found });
    }
    Ok(())
}

/// Solid angle of the tangent cone `{u : <a_i, u> <= 0, i in active}` at a point
/// whose active facets are `active`.
fn cone_angle(p: &Polytope, active: &[usize], options: &OracleOptions) -> SolidAngleValue {
    let d = p.dim();
    if active.is_empty() {
        return SolidAngleValue::exact(1.0, SolidAngleMethod::Classified);
    }
    let normals: Vec<RationalVector> = active.iter().map(|&f| p.facets()[f].normal.clone()).collect();
    let codim = rational::rank(&normals, d);
    let exact = match d {
        1 => SolidAngleMethod::Exact1D,
        2 => SolidAngleMethod::Exact2D,
        3 => SolidAngleMethod::Exact3D,
        _ => SolidAngleMethod::Dihedral,
    };
    match codim {
        1 => SolidAngleValue::exact(0.5, exact),
        2 => {
            // a ridge lies in exactly two facets
            let a = p.facets()[active[0]].int_normal();
            let b = p.facets()[active[1]].int_normal();
            SolidAngleValue::exact((core::f64::consts::PI - normal_angle(a, b)) / core::f64::consts::TAU, exact)
        }
        3 if d == 3 => SolidAngleValue::exact(girard(p, active), SolidAngleMethod::Exact3D),
        _ => monte_carlo_cone(p, active, options),
    }
}

fn normal_angle(a: &[i64], b: &[i64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(&x, &y)| x as f64 * y as f64).sum();
    let na: f64 = fmath::sqrt(a.iter().map(|&x| (x as f64) * (x as f64)).sum());
    let nb: f64 = fmath::sqrt(b.iter().map(|&x| (x as f64) * (x as f64)).sum());
    fmath::acos(dot / (na * nb))
}

// Vertex of a 3-polytope: the spherical polygon cut out by the tangent cone has
// area 2π minus the sum of the angles between normals of facets meeting along
// an edge through the vertex.
fn girard(p: &Polytope, active: &[usize]) -> f64 {
    let mut turn = 0.0;
    for (k, &i) in active.iter().enumerate() {
        for &j in &active[k + 1..] {
            if p.common_vertices(&[i, j]).len() >= 2 {
                turn += normal_angle(p.facets()[i].int_normal(), p.facets()[j].int_normal());
            }
        }
    }
    (core::f64::consts::TAU - turn) / (2.0 * core::f64::consts::TAU)
}

fn cone_seed(seed: u64, active: &[usize]) -> u64 {
    // FNV-1a over the active facet list, so a cone gets the same stream wherever it appears
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for &f in active {
        for byte in (f as u64).to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Fraction of Gaussian directions `u` with `<a_i, u> <= 0` for every active facet.
fn monte_carlo_cone(p: &Polytope, active: &[usize], options: &OracleOptions) -> SolidAngleValue {
    let normals: Vec<Vec<f64>> =
        active.iter().map(|&f| p.facets()[f].int_normal().iter().map(|&x| x as f64).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cone_seed(options.seed, active));
    let n = options.samples.max(1);
    let mut u = vec![0.0; p.dim()];
    let mut hits = 0usize;
    for _ in 0..n {
        u.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
        if normals.iter().all(|a| a.iter().zip(&u).map(|(x, y)| x * y).sum::<f64>() <= 0.0) {
            hits += 1;
        }
    }
    let value = hits as f64 / n as f64;
    SolidAngleValue {
        value,
        method: SolidAngleMethod::MonteCarlo { samples: n },
        stderr: fmath::sqrt(value * (1.0 - value) / n as f64),
    }
}

/// Monte Carlo estimate of `ω_P(x)` regardless of dimension (cross-checks the exact paths).
pub fn solid_angle_monte_carlo(p: &Polytope, x: &RationalVector, options: &OracleOptions) -> Result<SolidAngleValue> {
    check_dim(p, x.dim())?;
    if !p.contains(x) {
        return Ok(SolidAngleValue::exact(0.0, SolidAngleMethod::Classified));
    }
    Ok(monte_carlo_cone(p, &p.active_facets(x), options))
}

/// `(1_P * G_ε)(x)`: the probability that `x + sqrt(ε/2π) Z` lies in `P` for a
/// standard normal `Z`.
pub fn gaussian_smoothed_weight(p: &Polytope, x: &[f64], eps: f64, samples: usize, seed: u64) -> Result<SolidAngleValue> {
    check_dim(p, x.len())?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("ε must be positive".into()));
    }
    let facets: Vec<(Vec<f64>, f64)> = p
        .facets()
        .iter()
        .map(|h| (h.normal.to_f64(), rational::to_f64(&h.offset)))
        .collect();
    let sigma = fmath::sqrt(eps / core::f64::consts::TAU);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = samples.max(1);
    let mut y = vec![0.0; x.len()];
    let mut hits = 0usize;
    for _ in 0..n {
        for (yi, xi) in y.iter_mut().zip(x) {
            let z: f64 = rng.sample(StandardNormal);
            *yi = xi + sigma * z;
        }
        if facets.iter().all(|(a, b)| a.iter().zip(&y).map(|(u, v)| u * v).sum::<f64>() <= *b) {
            hits += 1;
        }
    }
    let value = hits as f64 / n as f64;
    Ok(SolidAngleValue {
        value,
        method: SolidAngleMethod::GaussianSmoothing { eps, samples: n },
        stderr: fmath::sqrt(value * (1.0 - value) / n as f64),
    })
}

/// `A_P(t)` summed directly over the integer points of `tP`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectSum {
    pub t: Rational64,
    pub value: f64,
    /// Standard error from sampled cone angles (`0` when all angles are exact).
    pub stderr: f64,
    /// Integer points of `tP`, boundary included.
    pub lattice_points: usize,
}

// Facet inequality <a, x> <= t * num/den over the integers.
struct ScaledFacet {
    normal: Vec<i64>,
    num: i128,
    den: i128,
}

/// Integer points of `tP` with their active facet sets, in lexicographic order.
pub fn lattice_points_with_active(p: &Polytope, t: Rational64) -> Result<Vec<(Vec<i64>, Vec<usize>)>> {
    if !t.is_positive() {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let d = p.dim();
    let tq = rational::from_rational64(t);
    let facets: Vec<ScaledFacet> = p
        .facets()
        .iter()
        .map(|h| {
            let b = &h.offset * &tq;
            Ok(ScaledFacet {
                normal: h.int_normal().to_vec(),
                num: b.numer().to_i128().ok_or(Error::Overflow("facet offset"))?,
                den: b.denom().to_i128().ok_or(Error::Overflow("facet offset"))?,
            })
        })
        .collect::<Result<_>>()?;
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for v in p.vertices() {
        for k in 0..d {
            let c: Rational = &v[k] * &tq;
            let f = c.floor().to_integer().to_i64().ok_or(Error::Overflow("bounding box"))?;
            let g = c.ceil().to_integer().to_i64().ok_or(Error::Overflow("bounding box"))?;
            lo[k] = lo[k].min(f);
            hi[k] = hi[k].max(g);
        }
    }
    let mut out = Vec::new();
    let mut x = lo.clone();
    'outer: loop {
        let mut active = Vec::new();
        let mut inside = true;
        for (i, f) in facets.iter().enumerate() {
            let lhs: i128 = f.normal.iter().zip(&x).map(|(&a, &b)| a as i128 * b as i128).sum::<i128>() * f.den;
            if lhs > f.num {
                inside = false;
                break;
            }
            if lhs == f.num {
                active.push(i);
            }
        }
        if inside {
            out.push((x.clone(), active));
        }
        for k in (0..d).rev() {
            if x[k] < hi[k] {
                x[k] += 1;
                continue 'outer;
            }
            x[k] = lo[k];
        }
        break;
    }
    Ok(out)
}

pub fn solid_angle_sum_direct(p: &Polytope, t: Rational64) -> Result<DirectSum> {
    solid_angle_sum_direct_with(p, t, &OracleOptions::default())
}

pub fn solid_angle_sum_direct_with(p: &Polytope, t: Rational64, options: &OracleOptions) -> Result<DirectSum> {
    let points = lattice_points_with_active(p, t)?;
    let mut cones: BTreeMap<Vec<usize>, (SolidAngleValue, usize)> = BTreeMap::new();
    for (_, active) in &points {
        cones.entry(active.clone()).or_insert_with(|| (cone_angle(p, active, options), 0)).1 += 1;
    }
    let value = cones.values().map(|(w, c)| w.value * *c as f64).sum();
    // one estimate per cone, so errors within a cone add linearly
    let stderr = fmath::sqrt(cones.values().map(|(w, c)| fmath::powi(w.stderr * *c as f64, 2)).sum());
    Ok(DirectSum { t, value, stderr, lattice_points: points.len() })
}

/// `ω_P(F)` at the vertex centroid of every face.
pub fn face_angles(lattice: &FaceLattice, options: &OracleOptions) -> Result<Vec<FaceAngle>> {
    let p = lattice.polytope();
    lattice
        .faces()
        .iter()
        .map(|f| {
            let omega = solid_angle_at_with(p, &centroid(p, &f.vertices), options)?;
            Ok(FaceAngle { face: f.id, omega })
        })
        .collect()
}

pub fn centroid(p: &Polytope, vertices: &[usize]) -> RationalVector {
    let mut sum = RationalVector::zeros(p.dim());
    for &v in vertices {
        sum = sum.add(&p.vertices()[v]);
    }
    sum.scale(&Rational::new(1.into(), (vertices.len() as i64).into()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrianchonGram {
    /// `Σ_F (-1)^{dim F} ω_P(F)`.
    pub value: f64,
    pub stderr: f64,
}

pub fn brianchon_gram(lattice: &FaceLattice, options: &OracleOptions) -> Result<BrianchonGram> {
    let angles = face_angles(lattice, options)?;
    let mut value = 0.0;
    let mut var = 0.0;
    for a in &angles {
        let sign = if lattice.face(a.face).dim % 2 == 0 { 1.0 } else { -1.0 };
        value += sign * a.omega.value;
        var += a.omega.stderr * a.omega.stderr;
    }
    Ok(BrianchonGram { value, stderr: fmath::sqrt(var) })
}

/// Both sides of `A_P(t) = Σ_F ω_P(F) L_{F°}(t)` for an integer `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EhrhartRelation {
    pub lhs: f64,
    pub rhs: f64,
}

pub fn ehrhart_relation_check(lattice: &FaceLattice, t: i64, options: &OracleOptions) -> Result<EhrhartRelation> {
    let p = lattice.polytope();
    let t = Rational64::from_integer(t);
    let lhs = solid_angle_sum_direct_with(p, t, options)?.value;
    // a point of tP lies in the relative interior of tF exactly when its active
    // facets are the facets containing F
    let by_facets: BTreeMap<&[usize], FaceId> = lattice.faces().iter().map(|f| (f.facets.as_slice(), f.id)).collect();
    let mut counts = vec![0usize; lattice.faces().len()];
    for (_, active) in lattice_points_with_active(p, t)? {
        let face = by_facets.get(active.as_slice()).ok_or(Error::InvalidArgument("unmatched active facet set".into()))?;
        counts[*face] += 1;
    }
    let mut rhs = 0.0;
    for a in face_angles(lattice, options)? {
        rhs += a.omega.value * counts[a.face] as f64;
    }
    Ok(EhrhartRelation { lhs, rhs })
}
