//! Fourier transforms of polytope indicator functions and Macdonald solid-angle sums.
//!
//! The crate is organised bottom-up:
//!
//! * [`rational`]: exact rational vectors and the small amount of linear algebra
//!   the geometric predicates need.
//! * [`geometry`]: V-representation polytopes, facet enumeration, the face
//!   lattice, tangent projections and Hausdorff volumes of faces.
//! * [`lattice`]: saturated integer bases of `Z^d ∩ V`, primitive facet normals
//!   and shell enumeration of admissible lattice points.
//! * [`chain`]: rooted chains of the face lattice and their rational,
//!   exponential and total weights.
//! * [`transform`]: the facet recursion for `hat 1_F(ξ)`, the chain-sum
//!   evaluation and an independent simplex quadrature.
//! * [`sums`]: Gaussian-damped Poisson sums for `A_P(t)`, quasi-coefficients
//!   `a_i(t)` and the codimension-one closed form.
//! * [`oracle`]: direct solid angles, lattice-point enumeration of `tP` and the
//!   classical identities used as ground truth.
//!
//! Everything here is pure computation over immutable inputs and builds
//! without `std`; the `solidsum` crate carries file formats and the CLI.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod chain;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod oracle;
pub mod rational;
pub mod sums;
pub mod transform;

mod fmath;

pub use chain::{ChainSet, ChainWeightValue, RootedChain};
pub use error::{Error, Result};
pub use geometry::{Face, FaceId, FaceLattice, Halfspace, Polytope};
pub use lattice::{PrimitiveNormal, SublatticeDescription};
pub use num_complex::Complex64;
pub use num_rational::Rational64;
pub use oracle::{FaceAngle, SolidAngleMethod, SolidAngleValue};
pub use rational::{Rational, RationalVector};
pub use sums::{DampingSchedule, Extrapolation, QuasiCoefficientResult, SumResult};
pub use transform::{Branch, TransformValue};
