//! Exact V-representation polytopes and their face lattices.
//!
//! Facets are found by brute force over affinely independent `d`-subsets of the
//! vertex list, which is exact and fast enough for the small polytopes this crate
//! targets (`d <= 4`, a few dozen vertices). Faces are then generated top-down:
//! the facets of a face `F` are the inclusion-maximal sets `F ∩ H` over the
//! polytope's facets `H` that do not contain `F`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fmath;
use crate::rational::{
    self, affine_rank, int_to_rational_vector, nullspace, orthogonal_integer_basis, primitive, rank, to_i64_vec,
    Rational, RationalVector,
};

pub type FaceId = usize;

/// Closed halfspace `<normal, x> <= offset` with a primitive integer outward normal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: RationalVector,
    pub offset: Rational,
    pub(crate) int_normal: Vec<i64>,
}

impl Halfspace {
    /// Primitive integer outward normal.
    pub fn int_normal(&self) -> &[i64] {
        &self.int_normal
    }

    pub fn evaluate(&self, x: &RationalVector) -> Rational {
        self.normal.dot(x) - &self.offset
    }
}

/// Full-dimensional convex polytope with exact rational vertices.
#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<RationalVector>,
    facets: Vec<Halfspace>,
    // incidence[v][f]
    incidence: Vec<Vec<bool>>,
}

/// Builds a polytope from a vertex list; duplicates and non-extreme points are dropped.
pub fn build_polytope(vertices: Vec<RationalVector>) -> Result<Polytope> {
    Polytope::new(vertices)
}

impl Polytope {
    pub fn new(mut points: Vec<RationalVector>) -> Result<Self> {
        let dim = points.first().ok_or(Error::Empty)?.dim();
        if dim == 0 {
            return Err(Error::NotFullDimensional { expected: 0, found: 0 });
        }
        if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        points.sort();
        points.dedup();
        let refs: Vec<&RationalVector> = points.iter().collect();
        let hull_dim = affine_rank(&refs).unwrap_or(0);
        if hull_dim < dim {
            return Err(Error::NotFullDimensional { expected: dim, found: hull_dim });
        }

        let facets = enumerate_facets(&points, dim)?;
        // keep only points that are the unique solution of their tight constraints
        let extreme: Vec<RationalVector> = points
            .into_iter()
            .filter(|p| {
                let tight: Vec<RationalVector> =
                    facets.iter().filter(|h| h.evaluate(p).is_zero()).map(|h| h.normal.clone()).collect();
                rank(&tight, dim) == dim
            })
            .collect();
        let incidence = extreme
            .iter()
            .map(|v| facets.iter().map(|h| h.evaluate(v).is_zero()).collect())
            .collect();
        Ok(Polytope { dim, vertices: extreme, facets, incidence })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[RationalVector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn is_incident(&self, vertex: usize, facet: usize) -> bool {
        self.incidence[vertex][facet]
    }

    pub fn facet_vertices(&self, facet: usize) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.incidence[v][facet]).collect()
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        self.facets.iter().all(|h| !h.evaluate(x).is_positive())
    }

    /// Facets whose hyperplane passes through `x` (meaningful for boundary points).
    pub fn active_facets(&self, x: &RationalVector) -> Vec<usize> {
        (0..self.facets.len()).filter(|&f| self.facets[f].evaluate(x).is_zero()).collect()
    }

    /// Vertices lying on every facet in `facets`.
    pub fn common_vertices(&self, facets: &[usize]) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| facets.iter().all(|&f| self.incidence[v][f])).collect()
    }

    /// Exact `d`-dimensional volume, summed over a pulling triangulation.
    pub fn volume(&self) -> Rational {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let apex = lexicographic_min(&self.vertices, &all);
        let mut total = Rational::zero();
        for simplex in triangulate(self, &all, apex) {
            total += simplex_volume_exact(&self.vertices, &simplex).abs();
        }
        total
    }
}

fn enumerate_facets(points: &[RationalVector], dim: usize) -> Result<Vec<Halfspace>> {
    let mut facets: Vec<Halfspace> = Vec::new();
    for combo in (0..points.len()).combinations(dim) {
        if facets.iter().any(|h| combo.iter().all(|&i| h.evaluate(&points[i]).is_zero())) {
            continue;
        }
        let base = &points[combo[0]];
        let diffs: Vec<RationalVector> = combo[1..].iter().map(|&i| points[i].sub(base)).collect();
        let ns = nullspace(&diffs, dim);
        if ns.len() != 1 {
            continue;
        }
        let normal = ns[0].primitive_direction();
        let normal_q = int_to_rational_vector(&normal);
        let offset = normal_q.dot(base);
        let mut below = false;
        let mut above = false;
        for p in points {
            let s = normal_q.dot(p) - &offset;
            below |= s.is_negative();
            above |= s.is_positive();
        }
        let (normal, offset) = match (below, above) {
            (true, true) => continue,
            (false, true) => (normal.iter().map(|x| -x).collect::<Vec<BigInt>>(), -offset),
            _ => (normal, offset),
        };
        facets.push(Halfspace {
            int_normal: to_i64_vec(&normal)?,
            normal: int_to_rational_vector(&normal),
            offset,
        });
    }
    Ok(facets)
}

pub(crate) fn lexicographic_min(vertices: &[RationalVector], subset: &[usize]) -> usize {
    *subset.iter().min_by(|&&a, &&b| vertices[a].cmp(&vertices[b])).expect("non-empty vertex subset")
}

/// Facets (as vertex sets) of the face spanned by `face`, found from the polytope's facets.
fn sub_faces(p: &Polytope, face: &[usize]) -> Vec<Vec<usize>> {
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for f in 0..p.facets.len() {
        if face.iter().all(|&v| p.incidence[v][f]) {
            continue;
        }
        let s: Vec<usize> = face.iter().copied().filter(|&v| p.incidence[v][f]).collect();
        if !s.is_empty() && !candidates.contains(&s) {
            candidates.push(s);
        }
    }
    let maximal: Vec<Vec<usize>> = candidates
        .iter()
        .filter(|s| !candidates.iter().any(|t| t.len() > s.len() && s.iter().all(|v| t.contains(v))))
        .cloned()
        .collect();
    maximal
}

/// Pulling triangulation of a face (given by its vertex indices) from `apex`.
pub fn triangulate(p: &Polytope, face: &[usize], apex: usize) -> Vec<Vec<usize>> {
    let refs: Vec<&RationalVector> = face.iter().map(|&v| &p.vertices[v]).collect();
    let k = affine_rank(&refs).unwrap_or(0);
    if k == 0 {
        return vec![vec![face[0]]];
    }
    let mut out = Vec::new();
    for sub in sub_faces(p, face) {
        if sub.contains(&apex) {
            continue;
        }
        let sub_apex = lexicographic_min(&p.vertices, &sub);
        for mut simplex in triangulate(p, &sub, sub_apex) {
            simplex.push(apex);
            out.push(simplex);
        }
    }
    out
}

fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let k = &m[r][c] / &m[c][c];
            for j in c..n {
                let delta = &k * &m[c][j];
                m[r][j] -= delta;
            }
        }
    }
    det
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Signed volume of a full-dimensional simplex (`d + 1` vertices in `R^d`).
pub(crate) fn simplex_volume_exact(vertices: &[RationalVector], simplex: &[usize]) -> Rational {
    let base = &vertices[simplex[0]];
    let rows: Vec<Vec<Rational>> =
        simplex[1..].iter().map(|&i| vertices[i].sub(base).into_coords()).collect();
    determinant(rows) / Rational::from_integer(BigInt::from(factorial(simplex.len() - 1)))
}

/// `k`-dimensional Hausdorff measure of a `k`-simplex embedded in `R^d`.
pub(crate) fn simplex_hausdorff_volume(vertices: &[RationalVector], simplex: &[usize]) -> f64 {
    let k = simplex.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let base = &vertices[simplex[0]];
    let edges: Vec<RationalVector> = simplex[1..].iter().map(|&i| vertices[i].sub(base)).collect();
    let gram: Vec<Vec<Rational>> = edges.iter().map(|a| edges.iter().map(|b| a.dot(b)).collect()).collect();
    fmath::sqrt(rational::to_f64(&determinant(gram))) / factorial(k) as f64
}

/// A face of the polytope with its tangent data.
#[derive(Clone, Debug)]
pub struct Face {
    pub id: FaceId,
    pub dim: usize,
    /// Sorted vertex indices into the polytope's vertex list.
    pub vertices: Vec<usize>,
    /// Polytope facets containing this face.
    pub facets: Vec<usize>,
    /// Mutually orthogonal primitive integer vectors spanning the tangent space.
    pub tangent_basis: Vec<RationalVector>,
    /// Lexicographically smallest vertex.
    pub basepoint: RationalVector,
    pub volume: f64,
    pub(crate) tangent_int: Vec<Vec<i64>>,
    pub(crate) tangent_norm2: Vec<f64>,
    pub(crate) base_num: Vec<i64>,
    pub(crate) base_den: i64,
}

impl Face {
    #[inline]
    pub(crate) fn tangent_dots<'a>(&'a self, dir: &'a [i64]) -> impl Iterator<Item = i128> + 'a {
        self.tangent_int.iter().map(move |u| dot_i(u, dir))
    }

    /// `dir` is orthogonal to the tangent space (always true for vertices).
    #[inline]
    pub(crate) fn is_orthogonal(&self, dir: &[i64]) -> bool {
        self.tangent_dots(dir).all(|x| x == 0)
    }

    /// `||proj_F(dir)||^2`, from exact inner products.
    #[inline]
    pub(crate) fn proj_norm2(&self, dir: &[i64]) -> f64 {
        self.tangent_dots(dir).zip(&self.tangent_norm2).map(|(x, n)| (x as f64) * (x as f64) / n).sum()
    }

    /// Fractional turn of `scale * <dir, basepoint>`.
    #[inline]
    pub(crate) fn phase_turn(&self, dir: &[i64], scale: num_rational::Rational64) -> f64 {
        rational::fractional_turn(dot_i(&self.base_num, dir), self.base_den as i128, scale)
    }
}

#[inline]
pub(crate) fn dot_i(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Covering pair `(parent, child)` with `child` a facet of `parent`.
#[derive(Clone, Debug)]
pub struct Cover {
    pub parent: FaceId,
    pub child: FaceId,
    /// Primitive integer direction of `N_parent(child)`.
    pub normal: RationalVector,
    /// Euclidean length of `normal`.
    pub normal_norm: f64,
    pub(crate) int_normal: Vec<i64>,
}

/// All nonempty faces of a polytope ordered by inclusion.
#[derive(Clone, Debug)]
pub struct FaceLattice {
    polytope: Polytope,
    faces: Vec<Face>,
    covers: Vec<Cover>,
    down: Vec<Vec<usize>>,
    up: Vec<Vec<usize>>,
    index: BTreeMap<Vec<usize>, FaceId>,
}

pub fn build_face_lattice(p: &Polytope) -> Result<FaceLattice> {
    FaceLattice::new(p)
}

impl FaceLattice {
    pub fn new(p: &Polytope) -> Result<Self> {
        let d = p.dim;
        let body: Vec<usize> = (0..p.vertices.len()).collect();
        let mut sets: Vec<Vec<usize>> = vec![body.clone()];
        let mut index: BTreeMap<Vec<usize>, FaceId> = BTreeMap::new();
        index.insert(body, 0);
        let mut edges: Vec<(FaceId, FaceId)> = Vec::new();
        let mut level = vec![0usize];
        for _ in 0..d {
            let mut next = Vec::new();
            for &f in &level {
                for sub in sub_faces(p, &sets[f].clone()) {
                    let id = *index.entry(sub.clone()).or_insert_with(|| {
                        sets.push(sub);
                        next.push(sets.len() - 1);
                        sets.len() - 1
                    });
                    edges.push((f, id));
                }
            }
            level = next;
        }

        let mut faces = Vec::with_capacity(sets.len());
        for (id, verts) in sets.iter().enumerate() {
            faces.push(make_face(p, id, verts.clone())?);
        }
        let mut down = vec![Vec::new(); faces.len()];
        let mut up = vec![Vec::new(); faces.len()];
        let mut covers = Vec::with_capacity(edges.len());
        for (parent, child) in edges {
            debug_assert_eq!(faces[parent].dim, faces[child].dim + 1);
            let cover = make_cover(p, &faces[parent], &faces[child])?;
            down[parent].push(covers.len());
            up[child].push(covers.len());
            covers.push(cover);
        }
        Ok(FaceLattice { polytope: p.clone(), faces, covers, down, up, index })
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim
    }

    pub fn body(&self) -> &Face {
        &self.faces[0]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: FaceId) -> &Face {
        &self.faces[id]
    }

    pub fn faces_of_dim(&self, k: usize) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.dim == k)
    }

    pub fn covers(&self) -> &[Cover] {
        &self.covers
    }

    /// Covers `(face, G)` for every facet `G` of `face`.
    pub fn facets_of(&self, face: FaceId) -> impl Iterator<Item = &Cover> {
        self.down[face].iter().map(|&c| &self.covers[c])
    }

    /// Covers `(H, face)` for every face `H` that has `face` as a facet.
    pub fn parents_of(&self, face: FaceId) -> impl Iterator<Item = &Cover> {
        self.up[face].iter().map(|&c| &self.covers[c])
    }

    pub fn cover(&self, parent: FaceId, child: FaceId) -> Option<&Cover> {
        self.facets_of(parent).find(|c| c.child == child)
    }

    pub fn face_by_vertices(&self, vertices: &[usize]) -> Option<FaceId> {
        self.index.get(vertices).copied()
    }

    /// Smallest face containing the boundary point `x`, or the body for interior points.
    pub fn carrier_face(&self, x: &RationalVector) -> Option<FaceId> {
        let active = self.polytope.active_facets(x);
        self.face_by_vertices(&self.polytope.common_vertices(&active))
    }

    /// `sum_F (-1)^{dim F}` over all nonempty faces.
    pub fn euler_characteristic(&self) -> i64 {
        self.faces.iter().map(|f| if f.dim % 2 == 0 { 1 } else { -1 }).sum()
    }
}

fn make_face(p: &Polytope, id: FaceId, vertices: Vec<usize>) -> Result<Face> {
    let d = p.dim;
    let base_idx = lexicographic_min(&p.vertices, &vertices);
    let basepoint = p.vertices[base_idx].clone();
    let diffs: Vec<RationalVector> = vertices.iter().map(|&v| p.vertices[v].sub(&basepoint)).collect();
    let basis = orthogonal_integer_basis(&diffs, d);
    let dim = basis.len();
    let tangent_int = basis.iter().map(|u| to_i64_vec(u)).collect::<Result<Vec<_>>>()?;
    let tangent_norm2 = tangent_int.iter().map(|u| dot_i(u, u) as f64).collect();
    let tangent_basis = basis.iter().map(|u| int_to_rational_vector(u)).collect();
    let facets = (0..p.facets.len()).filter(|&f| vertices.iter().all(|&v| p.incidence[v][f])).collect();
    let volume = if dim == 0 {
        1.0
    } else if dim == d {
        rational::to_f64(&p.volume())
    } else {
        triangulate(p, &vertices, base_idx).iter().map(|s| simplex_hausdorff_volume(&p.vertices, s)).sum()
    };
    let (base_num, base_den) = basepoint.integer_form_i64()?;
    Ok(Face {
        id,
        dim,
        vertices,
        facets,
        tangent_basis,
        basepoint,
        volume,
        tangent_int,
        tangent_norm2,
        base_num,
        base_den,
    })
}

fn make_cover(p: &Polytope, parent: &Face, child: &Face) -> Result<Cover> {
    let outside = parent
        .vertices
        .iter()
        .find(|v| !child.vertices.contains(v))
        .ok_or(Error::NotACover(parent.id, child.id))?;
    let w = p.vertices[*outside].sub(&child.basepoint);
    let inward = w.sub(&project_onto_tangent(child, &w));
    let dir: Vec<BigInt> = primitive(inward.primitive_direction().into_iter().map(|x| -x).collect());
    let norm2: BigInt = dir.iter().map(|x| x * x).sum();
    Ok(Cover {
        parent: parent.id,
        child: child.id,
        normal: int_to_rational_vector(&dir),
        normal_norm: fmath::sqrt(norm2.to_f64().unwrap_or(f64::NAN)),
        int_normal: to_i64_vec(&dir)?,
    })
}

/// Orthogonal projection of `xi` onto the tangent space of `face` (exact).
pub fn project_onto_tangent(face: &Face, xi: &RationalVector) -> RationalVector {
    let mut out = RationalVector::zeros(xi.dim());
    for u in &face.tangent_basis {
        let k = xi.dot(u) / u.norm_squared();
        out = out.add(&u.scale(&k));
    }
    out
}

/// Hausdorff volume of a face; `1` for vertices by convention.
pub fn face_volume(face: &Face) -> f64 {
    face.volume
}

/// Same volume, triangulated from a different apex vertex of the face.
pub fn face_volume_from(lattice: &FaceLattice, face: FaceId, apex: usize) -> f64 {
    let f = lattice.face(face);
    if f.dim == 0 {
        return 1.0;
    }
    let p = lattice.polytope();
    triangulate(p, &f.vertices, apex).iter().map(|s| simplex_hausdorff_volume(&p.vertices, s)).sum()
}
