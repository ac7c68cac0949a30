// Fixtures, independent oracles and property checks shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use solidsum_core::chain::{chain_rational_weight, enumerate_chains, link_weight, ChainSet};
use solidsum_core::geometry::{project_onto_tangent, FaceId, FaceLattice, Polytope};
use solidsum_core::lattice::integer_points_in_subspace;
use solidsum_core::rational::{self, Rational, RationalVector};
use std::f64::consts::PI;

pub struct Fixture {
    pub name: &'static str,
    pub lattice: FaceLattice,
    pub chains: ChainSet,
}

pub fn fixture(name: &'static str, pts: &[&[i64]]) -> Fixture {
    let p = Polytope::new(pts.iter().map(|p| RationalVector::from_integers(p)).collect()).unwrap();
    let lattice = FaceLattice::new(&p).unwrap();
    let chains = enumerate_chains(&lattice).unwrap();
    Fixture { name, lattice, chains }
}

pub fn segment() -> Fixture {
    fixture("segment", &[&[0], &[1]])
}

pub fn square() -> Fixture {
    fixture("square", &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
}

pub fn triangle() -> Fixture {
    fixture("triangle", &[&[0, 0], &[1, 0], &[0, 1]])
}

pub fn tetra_111() -> Fixture {
    fixture("tetra_111", &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])
}

pub fn tetra_235() -> Fixture {
    fixture("tetra_235", &[&[0, 0, 0], &[2, 0, 0], &[0, 3, 0], &[0, 0, 5]])
}

pub fn cross4() -> Fixture {
    let mut pts: Vec<Vec<i64>> = Vec::new();
    for k in 0..4 {
        for s in [1, -1] {
            let mut v = vec![0; 4];
            v[k] = s;
            pts.push(v);
        }
    }
    let refs: Vec<&[i64]> = pts.iter().map(Vec::as_slice).collect();
    fixture("cross4", &refs)
}

pub fn q(s: &str) -> Rational64 {
    rational::parse_rational64(s).unwrap()
}

pub fn qv(s: &[&str]) -> RationalVector {
    RationalVector::new(s.iter().map(|x| rational::parse_rational(x).unwrap()).collect())
}

pub fn f(t: Rational64) -> f64 {
    *t.numer() as f64 / *t.denom() as f64
}

/// `{x} - 1/2` off the integers, `0` on them, for an exact rational.
pub fn bernoulli1(x: Rational64) -> f64 {
    let fr = x - x.floor();
    if fr.is_zero() {
        0.0
    } else {
        f(fr) - 0.5
    }
}

/// `A(t)` of `[0,1]^d`: each axis contributes `t - B̄_1(t)` (a box is a product
/// and solid angles of products multiply for axis-aligned boxes).
pub fn cube_solid_angle_sum(d: i32, t: Rational64) -> f64 {
    (f(t) - bernoulli1(t)).powi(d)
}

/// `∫_0^1 e^{-2πisx} dx`.
pub fn segment_transform(s: f64) -> Complex64 {
    if s == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -2.0 * PI * s)) / Complex64::new(0.0, 2.0 * PI * s)
}

pub fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()) || (a - b).norm() <= 1e-14
}

/// Brute-force admissible set of a chain in the box `[-r, r]^d`.
pub fn brute_admissible(lattice: &FaceLattice, faces: &[FaceId], r: i64) -> Vec<Vec<i64>> {
    let d = lattice.dim();
    let last = lattice.face(*faces.last().unwrap());
    let prev = if faces.len() >= 2 { Some(lattice.face(faces[faces.len() - 2])) } else { None };
    let orth = |face: &solidsum_core::Face, x: &RationalVector| face.tangent_basis.iter().all(|u| u.dot(x).is_zero());
    let mut out = Vec::new();
    let mut x = vec![-r; d];
    loop {
        let xv = RationalVector::from_integers(&x);
        let nonzero = x.iter().any(|&c| c != 0);
        let admissible = match prev {
            Some(p) => orth(last, &xv) && !orth(p, &xv),
            None => !nonzero,
        };
        if admissible && nonzero {
            out.push(x.clone());
        }
        let mut k = 0;
        loop {
            if k == d {
                out.sort();
                return out;
            }
            if x[k] < r {
                x[k] += 1;
                break;
            }
            x[k] = -r;
            k += 1;
        }
    }
}

pub type Check = Result<(), String>;

pub fn projection_idempotent(lattice: &FaceLattice, face: FaceId, xi: &RationalVector) -> Check {
    let f = lattice.face(face);
    let p1 = project_onto_tangent(f, xi);
    let p2 = project_onto_tangent(f, &p1);
    if p1 != p2 {
        return Err(format!("projection not idempotent on face {face}: {p1} vs {p2}"));
    }
    let resid = xi.sub(&p1);
    if f.tangent_basis.iter().any(|u| !resid.dot(u).is_zero()) {
        return Err(format!("residual of {xi} not orthogonal to face {face}"));
    }
    Ok(())
}

pub fn admissible_matches_brute_force(lattice: &FaceLattice, chains: &ChainSet, chain: usize) -> Check {
    let r = 5;
    let c = chains.iter().nth(chain).unwrap();
    let d = lattice.dim();
    let pts = c.admissible.enumerate_admissible(r as f64 * (d as f64).sqrt() + 1.0);
    let mut fast: Vec<Vec<i64>> = pts.iter().filter(|x| x.iter().all(|v| v.abs() <= r)).collect();
    fast.sort();
    let brute = brute_admissible(lattice, &c.faces, r);
    if fast != brute {
        return Err(format!("chain {:?}: {} enumerated vs {} brute-force points", c.faces, fast.len(), brute.len()));
    }
    for x in &brute {
        if !c.admissible.contains(x) {
            return Err(format!("chain {:?}: membership rejects {x:?}", c.faces));
        }
    }
    Ok(())
}

pub fn homogeneity(lattice: &FaceLattice, chains: &ChainSet, chain: usize, coeffs: &[i64], t: Rational64) -> Check {
    let c = chains.iter().nth(chain).unwrap();
    let d = lattice.dim();
    let mut xi = vec![0i64; d];
    for (m, b) in coeffs.iter().zip(&c.admissible.basis) {
        for (x, bi) in xi.iter_mut().zip(b) {
            *x += m * bi;
        }
    }
    if !c.admissible.contains(&xi) || t.is_zero() {
        return Ok(());
    }
    let x = RationalVector::from_integers(&xi);
    let tx = x.scale(&rational::from_rational64(t));
    let r1 = chain_rational_weight(lattice, c, &tx).map_err(|e| e.to_string())?;
    let r0 = chain_rational_weight(lattice, c, &x).map_err(|e| e.to_string())?;
    let expected = r0 * f(t).powi(-(c.length() as i32));
    if !close(r1, expected, 1e-12) {
        return Err(format!("R_T(tξ) = {r1}, t^-l R_T(ξ) = {expected} for ξ = {x}, t = {t}"));
    }
    Ok(())
}

/// The two vertices of an edge receive opposite link weights from it.
pub fn vertex_pair_antisymmetry(lattice: &FaceLattice, edge: FaceId, xi: &RationalVector) -> Check {
    let verts: Vec<FaceId> = lattice.facets_of(edge).map(|c| c.child).collect();
    if verts.len() != 2 {
        return Err(format!("edge {edge} has {} vertices", verts.len()));
    }
    match (link_weight(lattice, edge, verts[0], xi), link_weight(lattice, edge, verts[1], xi)) {
        (Ok(a), Ok(b)) => {
            if (a + b).norm() > 1e-15 * a.norm().max(1.0) {
                return Err(format!("edge {edge}: {a} + {b} != 0 at {xi}"));
            }
            Ok(())
        }
        (Err(_), Err(_)) => Ok(()),
        _ => Err(format!("edge {edge}: only one endpoint weight defined at {xi}")),
    }
}

fn det_big(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
    let mut det = Rational::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return BigInt::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c].clone();
        for i in c + 1..n {
            let k = a[i][c].clone() / a[c][c].clone();
            for j in c..n {
                let v = a[c][j].clone() * &k;
                a[i][j] -= v;
            }
        }
    }
    det.to_integer()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// The returned basis spans the same subspace and generates all of its integer points
/// (the gcd of its maximal minors is 1).
pub fn saturated(vectors: &[Vec<i64>], d: usize) -> Check {
    let span: Vec<RationalVector> = vectors.iter().map(|v| RationalVector::from_integers(v)).collect();
    let k = rational::rank(&span, d);
    let s = integer_points_in_subspace(&span, d).map_err(|e| e.to_string())?;
    if s.rank() != k {
        return Err(format!("rank {} for a {k}-dimensional subspace", s.rank()));
    }
    for b in &s.basis {
        let mut rows = span.clone();
        rows.push(RationalVector::from_integers(b));
        if rational::rank(&rows, d) != k {
            return Err(format!("basis vector {b:?} leaves the subspace"));
        }
    }
    if k == 0 {
        return Ok(());
    }
    let mut g = BigInt::zero();
    for cols in combinations(d, k) {
        let m: Vec<Vec<BigInt>> = s.basis.iter().map(|b| cols.iter().map(|&c| BigInt::from(b[c])).collect()).collect();
        g = num_integer::Integer::gcd(&g, &det_big(&m));
    }
    if g.abs() != BigInt::from(1) {
        return Err(format!("basis {:?} has index {g}", s.basis));
    }
    Ok(())
}
