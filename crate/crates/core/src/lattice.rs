//! Integer lattices cut out by rational subspaces.
//!
//! Kernels are computed with unimodular column operations, so the resulting
//! bases are saturated: they generate all of `Z^d ∩ V`, not a finite-index
//! sublattice. Bases are then put in row Hermite normal form so equal lattices
//! print identically.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::geometry::{dot_i, Polytope};
use crate::rational::{nullspace, to_i64_vec, RationalVector};

/// Saturated basis of `{x in Z^d : <row, x> = 0 for all rows}`.
pub fn integer_kernel(rows: &[Vec<BigInt>], d: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    // columns of the unimodular transform
    let mut u: Vec<Vec<BigInt>> =
        (0..d).map(|j| (0..d).map(|i| BigInt::from((i == j) as i32)).collect()).collect();
    let mut pivot = 0;
    for r in 0..a.len() {
        if pivot == d {
            break;
        }
        loop {
            let Some(jmin) = (pivot..d).filter(|&j| !a[r][j].is_zero()).min_by_key(|&j| a[r][j].abs()) else {
                break;
            };
            swap_columns(&mut a, pivot, jmin);
            u.swap(pivot, jmin);
            let mut clean = true;
            for j in pivot + 1..d {
                if a[r][j].is_zero() {
                    continue;
                }
                let q = a[r][j].div_floor(&a[r][pivot]);
                for row in a.iter_mut() {
                    let delta = &q * &row[pivot];
                    row[j] -= delta;
                }
                let (left, right) = u.split_at_mut(j);
                for (x, y) in right[0].iter_mut().zip(&left[pivot]) {
                    *x -= &q * y;
                }
                clean &= a[r][j].is_zero();
            }
            if clean {
                break;
            }
        }
        if !a[r][pivot].is_zero() {
            pivot += 1;
        }
    }
    hermite_rows(u.split_off(pivot))
}

fn swap_columns(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }
}

/// Row Hermite normal form of a full-row-rank integer matrix.
pub fn hermite_rows(mut b: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let Some(d) = b.first().map(Vec::len) else {
        return b;
    };
    let mut r = 0;
    for c in 0..d {
        if r == b.len() {
            break;
        }
        loop {
            let Some(imin) = (r..b.len()).filter(|&i| !b[i][c].is_zero()).min_by_key(|&i| b[i][c].abs()) else {
                break;
            };
            b.swap(r, imin);
            let mut clean = true;
            for i in r + 1..b.len() {
                if b[i][c].is_zero() {
                    continue;
                }
                let q = b[i][c].div_floor(&b[r][c]);
                let (top, bottom) = b.split_at_mut(i);
                for (x, y) in bottom[0].iter_mut().zip(&top[r]) {
                    *x -= &q * y;
                }
                clean &= b[i][c].is_zero();
            }
            if clean {
                break;
            }
        }
        if b[r][c].is_zero() {
            continue;
        }
        if b[r][c].is_negative() {
            for x in b[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = b[i][c].div_floor(&b[r][c]);
            if !q.is_zero() {
                let (top, bottom) = b.split_at_mut(r);
                for (x, y) in top[i].iter_mut().zip(&bottom[0]) {
                    *x -= &q * y;
                }
            }
        }
        r += 1;
    }
    b.truncate(r);
    b
}

/// `Z^d ∩ V` for a rational subspace `V`, optionally minus the points of a
/// smaller saturated sublattice `Z^d ∩ W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SublatticeDescription {
    pub ambient_dim: usize,
    /// Rows form a basis of `Z^d ∩ V`.
    pub basis: Vec<Vec<i64>>,
    /// Basis of the excluded lattice `Z^d ∩ W`; `None` when nothing is excluded.
    pub excluded_basis: Option<Vec<Vec<i64>>>,
    // V = {x : <c, x> = 0 for all c}
    constraints: Vec<Vec<i64>>,
    excluded_constraints: Option<Vec<Vec<i64>>>,
}

impl SublatticeDescription {
    /// `Z^d ∩ span(vectors)^⊥`.
    pub fn orthogonal_to(vectors: &[Vec<i64>], d: usize) -> Result<Self> {
        let rows: Vec<Vec<BigInt>> = vectors.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let basis = integer_kernel(&rows, d);
        Ok(SublatticeDescription {
            ambient_dim: d,
            basis: basis.iter().map(|b| to_i64_vec(b)).collect::<Result<_>>()?,
            excluded_basis: None,
            constraints: vectors.to_vec(),
            excluded_constraints: None,
        })
    }

    /// Removes the points of `other` (which must be a sublattice of `self`).
    pub fn excluding(mut self, other: &SublatticeDescription) -> Self {
        debug_assert!(other.basis.iter().all(|b| self.contains_lattice_point(b)));
        self.excluded_basis = Some(other.basis.clone());
        self.excluded_constraints = Some(other.constraints.clone());
        self
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn excluded_rank(&self) -> Option<usize> {
        self.excluded_basis.as_ref().map(Vec::len)
    }

    pub fn constraints(&self) -> &[Vec<i64>] {
        &self.constraints
    }

    fn contains_lattice_point(&self, xi: &[i64]) -> bool {
        self.constraints.iter().all(|c| dot_i(c, xi) == 0)
    }

    fn is_excluded(&self, xi: &[i64]) -> bool {
        match &self.excluded_constraints {
            Some(cs) => cs.iter().all(|c| dot_i(c, xi) == 0),
            None => false,
        }
    }

    /// Exact membership of an integer point.
    pub fn contains(&self, xi: &[i64]) -> bool {
        self.contains_lattice_point(xi) && !self.is_excluded(xi)
    }

    /// All nonzero admissible points with `||ξ|| <= radius`, ordered by shells.
    ///
    /// Points come in `ξ, -ξ` pairs, sorted by `||ξ||^2` and then lexicographically
    /// on the representative whose first nonzero coordinate is positive. The origin
    /// is never produced; callers add the `ξ = 0` term themselves.
    pub fn enumerate_admissible(&self, radius: f64) -> AdmissiblePoints {
        enumerate_admissible(self, radius)
    }
}

/// Saturated basis of the integer points of `span(subspace_basis)`.
pub fn integer_points_in_subspace(subspace_basis: &[RationalVector], d: usize) -> Result<SublatticeDescription> {
    let complement = nullspace(subspace_basis, d);
    let rows: Vec<Vec<i64>> =
        complement.iter().map(|v| to_i64_vec(&v.primitive_direction())).collect::<Result<_>>()?;
    SublatticeDescription::orthogonal_to(&rows, d)
}

/// Shell-ordered admissible points; see [`SublatticeDescription::enumerate_admissible`].
#[derive(Clone, Debug, Default)]
pub struct AdmissiblePoints {
    dim: usize,
    reps: Vec<i64>,
    norms2: Vec<i128>,
}

impl AdmissiblePoints {
    /// Number of points, counting `ξ` and `-ξ` separately.
    pub fn len(&self) -> usize {
        2 * self.norms2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms2.is_empty()
    }

    /// Canonical representatives (first nonzero coordinate positive) with `||ξ||^2`.
    pub fn pairs(&self) -> impl Iterator<Item = (&[i64], i128)> {
        self.reps.chunks_exact(self.dim.max(1)).zip(self.norms2.iter().copied())
    }

    /// Every point in order: `ξ_1, -ξ_1, ξ_2, -ξ_2, ...`.
    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        self.pairs().flat_map(|(rep, _)| [rep.to_vec(), rep.iter().map(|x| -x).collect()])
    }
}

fn enumerate_admissible(s: &SublatticeDescription, radius: f64) -> AdmissiblePoints {
    let d = s.ambient_dim;
    let r = s.rank();
    let mut out = AdmissiblePoints { dim: d, ..Default::default() };
    if r == 0 || !(radius > 0.0) {
        return out;
    }
    let bounds = coefficient_bounds(&s.basis, radius);
    let r2 = radius * radius;
    let mut found: Vec<(i128, Vec<i64>)> = Vec::new();
    let mut coeffs: Vec<i64> = bounds.iter().map(|b| -b).collect();
    let mut xi = vec![0i64; d];
    // odometer over the box, keeping coefficient vectors whose leading nonzero entry is positive
    loop {
        if leading_positive(&coeffs) {
            xi.iter_mut().for_each(|x| *x = 0);
            for (m, b) in coeffs.iter().zip(&s.basis) {
                if *m != 0 {
                    for (x, bi) in xi.iter_mut().zip(b) {
                        *x += m * bi;
                    }
                }
            }
            let n2 = dot_i(&xi, &xi);
            if (n2 as f64) <= r2 && !s.is_excluded(&xi) {
                let rep = if leading_positive(&xi) { xi.clone() } else { xi.iter().map(|x| -x).collect() };
                found.push((n2, rep));
            }
        }
        let mut k = 0;
        loop {
            if k == r {
                found.sort_unstable();
                for (n2, rep) in found {
                    out.norms2.push(n2);
                    out.reps.extend_from_slice(&rep);
                }
                return out;
            }
            if coeffs[k] < bounds[k] {
                coeffs[k] += 1;
                break;
            }
            coeffs[k] = -bounds[k];
            k += 1;
        }
    }
}

fn leading_positive(v: &[i64]) -> bool {
    v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

// |m_i| <= ||row_i((B B^T)^{-1} B)|| * radius
fn coefficient_bounds(basis: &[Vec<i64>], radius: f64) -> Vec<i64> {
    let r = basis.len();
    let b: Vec<Vec<f64>> = basis.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect();
    let mut g: Vec<Vec<f64>> =
        (0..r).map(|i| (0..r).map(|j| b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum()).collect()).collect();
    let mut inv: Vec<Vec<f64>> = (0..r).map(|i| (0..r).map(|j| (i == j) as i32 as f64).collect()).collect();
    for c in 0..r {
        let p = (c..r).max_by(|&x, &y| g[x][c].abs().total_cmp(&g[y][c].abs())).unwrap();
        g.swap(c, p);
        inv.swap(c, p);
        let piv = g[c][c];
        for j in 0..r {
            g[c][j] /= piv;
            inv[c][j] /= piv;
        }
        for i in 0..r {
            if i != c {
                let k = g[i][c];
                for j in 0..r {
                    g[i][j] -= k * g[c][j];
                    inv[i][j] -= k * inv[c][j];
                }
            }
        }
    }
    (0..r)
        .map(|i| {
            let row: Vec<f64> = (0..b[0].len()).map(|k| (0..r).map(|j| inv[i][j] * b[j][k]).sum()).collect();
            let norm = crate::fmath::sqrt(row.iter().map(|x| x * x).sum());
            crate::fmath::floor(norm * radius * (1.0 + 1e-9)) as i64 + 1
        })
        .collect()
}

/// Primitive integer outward normal of a facet (zero only for irrational normal lines).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveNormal {
    pub vector: Vec<i64>,
    pub facet_id: usize,
}

impl PrimitiveNormal {
    pub fn is_zero(&self) -> bool {
        self.vector.iter().all(|&x| x == 0)
    }

    pub fn norm(&self) -> f64 {
        crate::fmath::sqrt(dot_i(&self.vector, &self.vector) as f64)
    }
}

/// Facet normals of rational polytopes are stored primitive already, so this never
/// returns the zero vector; the variant exists for parity with real polytopes.
pub fn primitive_normal(p: &Polytope, facet_id: usize) -> PrimitiveNormal {
    PrimitiveNormal { vector: p.facets()[facet_id].int_normal().to_vec(), facet_id }
}
