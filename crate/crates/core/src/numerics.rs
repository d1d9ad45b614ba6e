//! Overflow-safe scalar kernels shared by the thermodynamic formulas.
//!
//! Every Boltzmann-type quantity in this crate is a ratio of sums of
//! exponentials whose arguments can reach several thousand (beta up to 1e4).
//! The helpers here keep all intermediate exponents non-positive.

use std::f64::consts::LN_2;

/// ln(e^a + e^b) without overflow.
pub fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// ln(cosh x), valid for any x.
pub fn log_cosh(x: f64) -> f64 {
    let ax = x.abs();
    ax + (-2.0 * ax).exp().ln_1p() - LN_2
}

/// ln(sinh x) for x > 0. Uses expm1 so small arguments keep full precision.
pub fn log_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    x + (-(-2.0 * x).exp_m1()).ln() - LN_2
}

/// sinh(x)/x extended continuously through x = 0.
pub fn sinhc(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

/// tanh(x)/x extended continuously through x = 0.
pub fn tanhc(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0
    } else {
        x.tanh() / x
    }
}

/// coth(x) for x > 0.
pub fn coth(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    1.0 / x.tanh()
}

/// sech(x)^2 without overflow.
pub fn sech_sq(x: f64) -> f64 {
    let ax = x.abs();
    let e = (-ax).exp();
    let s = 2.0 * e / (1.0 + e * e);
    s * s
}

/// Bisection on a bracketing interval, then the midpoint.
///
/// `f(lo)` and `f(hi)` must have opposite (or zero) signs. Shrinks the
/// interval until its width drops below `xtol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let mut flo = f(lo);
    debug_assert!(flo * f(hi) <= 0.0, "bisect: no sign change");
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logaddexp_matches_naive_in_range() {
        let v = logaddexp(0.5, 2.0);
        assert!((v - (0.5f64.exp() + 2.0f64.exp()).ln()).abs() < 1e-14);
        // symmetric in its arguments, bit for bit
        assert_eq!(logaddexp(0.5, 2.0), logaddexp(2.0, 0.5));
    }

    #[test]
    fn logaddexp_survives_huge_arguments() {
        let v = logaddexp(1234.0, 1232.0);
        assert!((v - (1234.0 + (1.0 + (-2.0f64).exp()).ln())).abs() < 1e-12);
    }

    #[test]
    fn log_cosh_and_sinh_large() {
        assert!((log_cosh(500.0) - (500.0 - LN_2)).abs() < 1e-12);
        assert!((log_sinh(500.0) - (500.0 - LN_2)).abs() < 1e-12);
        assert!((log_sinh(1e-8) - (1e-8f64).sinh().ln()).abs() < 1e-10);
    }

    #[test]
    fn series_kernels() {
        for &x in &[1e-9, 1e-6, 1e-4, 0.5, 3.0] {
            assert!((sinhc(x) - x.sinh() / x).abs() < 1e-13 * sinhc(x));
            assert!((tanhc(x) - x.tanh() / x).abs() < 1e-13);
        }
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15);
        assert!((r - 2.0f64.sqrt()).abs() < 1e-14);
    }
}
