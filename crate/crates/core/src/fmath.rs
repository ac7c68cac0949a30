// Thin wrappers so the float code reads like std while building on `core`.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn acos(x: f64) -> f64 {
    libm::acos(x.clamp(-1.0, 1.0))
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn powi(x: f64, k: i32) -> f64 {
    libm::pow(x, k as f64)
}

#[inline]
pub(crate) fn sin_cos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}

/// `e^{-2πi f}` for a phase already reduced to a fraction of a turn.
#[inline]
pub(crate) fn turn(f: f64) -> num_complex::Complex64 {
    let (s, c) = sin_cos(-core::f64::consts::TAU * f);
    num_complex::Complex64::new(c, s)
}
