//! Rooted chains `P -> F_1 -> ... -> F_k` of the face lattice and their weights.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fmath;
use crate::geometry::{dot_i, Cover, Face, FaceId, FaceLattice};
use crate::lattice::SublatticeDescription;
use crate::rational::RationalVector;

/// Descending chain of covering pairs starting at the body.
#[derive(Clone, Debug)]
pub struct RootedChain {
    pub faces: Vec<FaceId>,
    /// `Z^d ∩ S(T)`.
    pub admissible: SublatticeDescription,
}

impl RootedChain {
    pub fn length(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn terminal(&self) -> FaceId {
        *self.faces.last().expect("chains contain the body")
    }

    /// Exact admissibility of a rational frequency (the admissible set is a cone).
    pub fn admits(&self, xi: &RationalVector) -> Result<bool> {
        let (dir, _) = split_frequency(xi)?;
        Ok(self.admissible.contains(&dir))
    }
}

/// All rooted chains grouped by length.
#[derive(Clone, Debug)]
pub struct ChainSet {
    by_length: Vec<Vec<RootedChain>>,
}

impl ChainSet {
    pub fn of_length(&self, k: usize) -> &[RootedChain] {
        self.by_length.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = &RootedChain> {
        self.by_length.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.by_length.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn counts(&self) -> Vec<usize> {
        self.by_length.iter().map(Vec::len).collect()
    }
}

pub fn enumerate_chains(lattice: &FaceLattice) -> Result<ChainSet> {
    let d = lattice.dim();
    let orth: Vec<SublatticeDescription> = lattice
        .faces()
        .iter()
        .map(|f| SublatticeDescription::orthogonal_to(&f.tangent_int, d))
        .collect::<Result<_>>()?;
    let mut by_length: Vec<Vec<RootedChain>> = vec![Vec::new(); d + 1];
    by_length[0].push(RootedChain { faces: vec![0], admissible: orth[0].clone() });
    let mut frontier: Vec<Vec<FaceId>> = vec![vec![0]];
    for k in 1..=d {
        let mut next = Vec::new();
        for path in &frontier {
            let last = *path.last().unwrap();
            for cover in lattice.facets_of(last) {
                let mut faces = path.clone();
                faces.push(cover.child);
                let admissible = orth[cover.child].clone().excluding(&orth[last]);
                by_length[k].push(RootedChain { faces: faces.clone(), admissible });
                next.push(faces);
            }
        }
        frontier = next;
    }
    Ok(ChainSet { by_length })
}

/// Writes a rational frequency as `scale * dir` with `dir` a primitive integer vector.
pub fn split_frequency(xi: &RationalVector) -> Result<(Vec<i64>, Rational64)> {
    let (nums, den) = xi.integer_form();
    let g = nums.iter().fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return Ok((vec![0; xi.dim()], Rational64::from_integer(1)));
    }
    let dir = nums.iter().map(|x| (x / &g).to_i64().ok_or(Error::Overflow("frequency"))).collect::<Result<_>>()?;
    let scale = Rational64::new(
        g.to_i64().ok_or(Error::Overflow("frequency scale"))?,
        den.to_i64().ok_or(Error::Overflow("frequency scale"))?,
    );
    Ok((dir, scale))
}

/// Real factor `<proj_F(dir), N_F(G)> / ||proj_F(dir)||^2` of a link weight.
#[inline]
pub(crate) fn link_coefficient(parent: &Face, cover: &Cover, dir: &[i64]) -> f64 {
    let num = dot_i(&cover.int_normal, dir);
    if num == 0 {
        return 0.0;
    }
    num as f64 / (cover.normal_norm * parent.proj_norm2(dir))
}

/// `(i / 2π)^k`, i.e. `(-1 / 2πi)^k`.
pub(crate) fn stokes_factor(k: usize) -> Complex64 {
    let m = libm::pow(TAU, -(k as f64));
    match k % 4 {
        0 => Complex64::new(m, 0.0),
        1 => Complex64::new(0.0, m),
        2 => Complex64::new(-m, 0.0),
        _ => Complex64::new(0.0, -m),
    }
}

fn rational64_f64(q: Rational64) -> f64 {
    crate::rational::rational64_to_f64(q)
}

/// `W_(F,G)(ξ) = (-1/2πi) <proj_F ξ, N_F(G)> / ||proj_F ξ||^2`.
pub fn link_weight(lattice: &FaceLattice, parent: FaceId, child: FaceId, xi: &RationalVector) -> Result<Complex64> {
    let cover = lattice.cover(parent, child).ok_or(Error::NotACover(parent, child))?;
    let (dir, scale) = split_frequency(xi)?;
    let f = lattice.face(parent);
    if f.is_orthogonal(&dir) {
        return Err(Error::ZeroProjection);
    }
    Ok(stokes_factor(1) * (link_coefficient(f, cover, &dir) / rational64_f64(scale)))
}

/// `R_T(dir)` for an integer direction, without checking admissibility.
pub(crate) fn rational_weight_dir(lattice: &FaceLattice, chain: &RootedChain, dir: &[i64]) -> Complex64 {
    let mut product = lattice.face(chain.terminal()).volume;
    for pair in chain.faces.windows(2) {
        let parent = lattice.face(pair[0]);
        let cover = lattice.cover(pair[0], pair[1]).expect("chain links are covers");
        product *= link_coefficient(parent, cover, dir);
        if product == 0.0 {
            break;
        }
    }
    stokes_factor(chain.length()) * product
}

/// Rational weight `R_T(ξ)`: product of link weights times the terminal face volume.
pub fn chain_rational_weight(lattice: &FaceLattice, chain: &RootedChain, xi: &RationalVector) -> Result<Complex64> {
    let (dir, scale) = split_frequency(xi)?;
    if !chain.admissible.contains(&dir) && !(chain.length() == 0 && xi.is_zero()) {
        return Err(Error::NotAdmissible);
    }
    let s = rational64_f64(scale);
    Ok(rational_weight_dir(lattice, chain, &dir) * libm::pow(s, -(chain.length() as f64)))
}

/// Exponential weight `E_T(tξ) = e^{-2πi <tξ, x_0>}` with `x_0` the terminal basepoint.
pub fn chain_exponential_weight(
    lattice: &FaceLattice,
    chain: &RootedChain,
    t: Rational64,
    xi: &RationalVector,
) -> Result<Complex64> {
    let (dir, scale) = split_frequency(xi)?;
    let face = lattice.face(chain.terminal());
    Ok(fmath::turn(face.phase_turn(&dir, t * scale)))
}

/// Total weight `W_T(ξ) = R_T(ξ) E_T(ξ) 1_{S(T)}(ξ)`.
pub fn chain_total_weight(lattice: &FaceLattice, chain: &RootedChain, xi: &RationalVector) -> Result<Complex64> {
    if xi.is_zero() {
        let v = if chain.length() == 0 { lattice.body().volume } else { 0.0 };
        return Ok(Complex64::new(v, 0.0));
    }
    if !chain.admits(xi)? {
        return Ok(Complex64::zero());
    }
    Ok(chain_rational_weight(lattice, chain, xi)? * chain_exponential_weight(lattice, chain, Rational64::from_integer(1), xi)?)
}

/// The three weights of a chain at one frequency and dilation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainWeightValue {
    /// `R_T(ξ)`.
    pub rational: Complex64,
    /// `E_T(tξ)`, on the unit circle.
    pub exponential: Complex64,
    /// `R_T(ξ) E_T(tξ)`, the summand of the quasi-coefficient sums.
    pub total: Complex64,
}

pub fn evaluate_chain(
    lattice: &FaceLattice,
    chain: &RootedChain,
    xi: &RationalVector,
    t: Rational64,
) -> Result<ChainWeightValue> {
    let rational = if xi.is_zero() && chain.length() == 0 {
        Complex64::new(lattice.body().volume, 0.0)
    } else {
        chain_rational_weight(lattice, chain, xi)?
    };
    let exponential = chain_exponential_weight(lattice, chain, t, xi)?;
    Ok(ChainWeightValue { rational, exponential, total: rational * exponential })
}
