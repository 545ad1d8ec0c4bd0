//! Float helpers that work without `std`.

pub(crate) use num_traits::Float;

pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const TAU: f64 = core::f64::consts::TAU;

/// Unnormalized sinc, `sin(x)/x` with `sinc(0) = 1`.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        // Taylor to second order; the next term is below 1e-33.
        1.0 - x * x / 6.0
    } else {
        Float::sin(x) / x
    }
}

/// Reduce an angle into `(-pi, pi]`.
pub(crate) fn wrap_angle(phi: f64) -> f64 {
    let mut r = phi % TAU;
    if r <= -PI {
        r += TAU;
    } else if r > PI {
        r -= TAU;
    }
    r
}
