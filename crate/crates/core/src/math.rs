//! Scalar helpers backed by `libm`, so results are bit-identical with and
//! without `std`.

use core::f64::consts::PI;

use crate::C64;

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::new(libm::cos(theta), libm::sin(theta))
}

#[inline]
pub fn modulus(z: C64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Argument of `z` in `(−π, π]`.
///
/// Values within `1e-12` of `−π` are folded onto `+π` so that a sign flip
/// always reports as `π` regardless of the sign of a vanishing imaginary part.
pub fn arg(z: C64) -> f64 {
    wrap_phase(libm::atan2(z.im, z.re))
}

/// Maps an angle into `(−π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let mut t = libm::fmod(theta, 2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if t <= -PI + 1e-12 {
        t += 2.0 * PI;
    }
    t
}

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}
