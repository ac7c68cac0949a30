//! Exact rational coordinates and the linear algebra used by the predicates.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, Neg};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses `"p/q"`, a plain integer, or a decimal such as `"-1.25"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidRational(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() && digits.is_empty() {
            return Err(bad());
        }
        if !digits.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let mut joined = alloc::string::String::with_capacity(digits.len() + frac.len());
        joined.push_str(digits);
        joined.push_str(frac);
        let mut num: BigInt = if joined.is_empty() { BigInt::zero() } else { joined.parse().map_err(|_| bad())? };
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u32), frac.len());
        return Ok(Rational::new(num, den));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Like [`parse_rational`] but narrowed to 64-bit numerator and denominator.
pub fn parse_rational64(text: &str) -> Result<Rational64> {
    to_rational64(&parse_rational(text)?)
}

pub fn to_rational64(q: &Rational) -> Result<Rational64> {
    let num = q.numer().to_i64().ok_or(Error::Overflow("rational numerator"))?;
    let den = q.denom().to_i64().ok_or(Error::Overflow("rational denominator"))?;
    Ok(Rational64::new(num, den))
}

pub fn from_rational64(q: Rational64) -> Rational {
    Rational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn rational64_to_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Exact rational point or direction in `R^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        RationalVector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        RationalVector(vec![Rational::zero(); dim])
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        RationalVector(coords.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect())
    }

    pub fn from_rational64(coords: &[Rational64]) -> Self {
        RationalVector(coords.iter().map(|&c| from_rational64(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &RationalVector) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn norm_squared(&self) -> Rational {
        self.dot(self)
    }

    pub fn add(&self, other: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Rational) -> RationalVector {
        RationalVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    /// Integer numerators over a common positive denominator.
    pub fn integer_form(&self) -> (Vec<BigInt>, BigInt) {
        let den = self.0.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let nums = self.0.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        (nums, den)
    }

    /// The primitive integer vector pointing in the same direction (zero stays zero).
    pub fn primitive_direction(&self) -> Vec<BigInt> {
        let (nums, _) = self.integer_form();
        primitive(nums)
    }

    /// Integer numerators and common denominator as `i64`.
    pub fn integer_form_i64(&self) -> Result<(Vec<i64>, i64)> {
        let (nums, den) = self.integer_form();
        Ok((to_i64_vec(&nums)?, den.to_i64().ok_or(Error::Overflow("denominator"))?))
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;

    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;

    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{q}")?;
        }
        f.write_str(")")
    }
}

/// Divides out the content of an integer vector.
pub fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x = &*x / &g;
        }
    }
    v
}

pub fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or(Error::Overflow("integer vector"))).collect()
}

pub fn int_to_rational_vector(v: &[BigInt]) -> RationalVector {
    RationalVector(v.iter().map(|x| Rational::from_integer(x.clone())).collect())
}

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn row_reduce(rows: &[RationalVector], ncols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.iter().map(|r| r.coords().to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in &mut m[r] {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let k = m[i][c].clone();
                for j in 0..ncols {
                    let delta = &k * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[RationalVector], ncols: usize) -> usize {
    row_reduce(rows, ncols).1.len()
}

/// Basis of `{x : <row, x> = 0 for every row}`.
pub fn nullspace(rows: &[RationalVector], ncols: usize) -> Vec<RationalVector> {
    let (m, pivots) = row_reduce(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            RationalVector(v)
        })
        .collect()
}

/// Dimension of the affine hull of a point set (`-1` encoded as `None` for no points).
pub fn affine_rank(points: &[&RationalVector]) -> Option<usize> {
    let (first, rest) = points.split_first()?;
    let diffs: Vec<RationalVector> = rest.iter().map(|p| p.sub(first)).collect();
    Some(rank(&diffs, first.dim()))
}

/// Orthogonal (not orthonormal) basis of the span, scaled to primitive integer vectors.
pub fn orthogonal_integer_basis(spanning: &[RationalVector], ncols: usize) -> Vec<Vec<BigInt>> {
    let (reduced, _) = row_reduce(spanning, ncols);
    let mut ortho: Vec<RationalVector> = Vec::with_capacity(reduced.len());
    for row in reduced {
        let mut v = RationalVector(row);
        for u in &ortho {
            let k = v.dot(u) / u.norm_squared();
            v = v.sub(&u.scale(&k));
        }
        ortho.push(int_to_rational_vector(&v.primitive_direction()));
    }
    ortho.iter().map(|u| u.primitive_direction()).collect()
}

/// `e^{-2πi f}` phase fraction of `scale · num / den`, reduced exactly to `[0, 1)`.
pub(crate) fn fractional_turn(num: i128, den: i128, scale: Rational64) -> f64 {
    let n = num * *scale.numer() as i128;
    let d = den * *scale.denom() as i128;
    let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
    let r = n.rem_euclid(d);
    r as f64 / d as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), q(-7, 1));
        assert_eq!(parse_rational("1.3").unwrap(), q(13, 10));
        assert_eq!(parse_rational("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn nullspace_of_plane() {
        let rows = [RationalVector::from_integers(&[1, 1, 1])];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(v.dot(&rows[0]).is_zero());
        }
    }

    #[test]
    fn orthogonal_basis_is_orthogonal() {
        let span = [RationalVector::from_integers(&[1, 2, 0]), RationalVector::from_integers(&[3, 1, 1])];
        let b = orthogonal_integer_basis(&span, 3);
        assert_eq!(b.len(), 2);
        let dot: BigInt = b[0].iter().zip(&b[1]).map(|(x, y)| x * y).sum();
        assert!(dot.is_zero());
    }

    #[test]
    fn fractional_turn_is_exact_at_integers() {
        assert_eq!(fractional_turn(3, 1, Rational64::new(2, 1)), 0.0);
        assert_eq!(fractional_turn(-1, 4, Rational64::new(1, 1)), 0.75);
        assert_eq!(fractional_turn(1, 3, Rational64::new(-3, 1)), 0.0);
    }
}
