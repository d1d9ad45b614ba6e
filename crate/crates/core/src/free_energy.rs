//! The scalar free-energy functional behind the grand-canonical pressure,
//! its gap equation, and a certified solver for the maximizer set.
//!
//! The pressure of the model is `ln2/beta + mu + sup_{r>=0} f(r)` with
//!
//! ```text
//! f(r) = -gamma r + (1/beta) ln( cosh(beta h) + e^{-lambda beta} cosh(beta g_r) ),
//! g_r  = sqrt( (mu-lambda)^2 + gamma^2 r ).
//! ```
//!
//! Strictly positive stationary points of f are the roots of
//! `h1(g_r) = (gamma/2x) sinh(beta x) - e^{lambda beta} cosh(beta h) - cosh(beta x)`.
//! `h1` overflows f64 as soon as `beta x > ~710`, so root finding runs on the
//! log-scaled surrogate
//! `phi(x) = ln(gamma/2x) + ln sinh(beta x) - ln(e^{lambda beta} cosh(beta h) + cosh(beta x))`,
//! which has exactly the same sign pattern and zeros.

use crate::numerics::{bisect, coth, log_cosh, log_sinh, logaddexp, sech_sq, sinhc};
use crate::params::ModelParams;
use serde::Serialize;
use std::f64::consts::LN_2;
use thiserror::Error;

/// Default tolerance on f-values for declaring two maximizers tied.
pub const TIE_TOL: f64 = 1e-12;
/// Maximizers closer than this in r are merged into one.
const MERGE_TOL: f64 = 1e-10;
/// First-order jump detection threshold shared with the phase module.
pub const JUMP_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    /// Sign-change detection failed while expanding the search interval.
    /// This signals a numerical pathology, not a physical regime.
    #[error("failed to bracket a gap-equation root near x = {0}")]
    BracketFailure(f64),
}

/// Result of maximizing f over r >= 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSolution {
    /// All maximizers within the tie tolerance, ascending (length 1 or 2).
    pub maximizers: Vec<f64>,
    /// The selected condensate density: the largest maximizer.
    pub r_beta: f64,
    /// sup_{r>=0} f(r).
    pub f_at_max: f64,
    /// Strictly positive roots of the gap equation, ascending (0 to 2 of
    /// them). When two exist the lower is a local minimum of f and the upper
    /// a local maximum.
    pub stationary_points: Vec<f64>,
    /// Two distinct maximizers agree in f within the tie tolerance: the
    /// parameter point lies on the critical boundary.
    pub is_critical: bool,
}

/// Exponent-shifted Boltzmann pieces at one (params, g) pair.
///
/// Writing A = e^{lambda beta} cosh(beta h), B = e^{lambda beta} sinh(beta h),
/// C = cosh(beta g), S = sinh(beta g), D = A + C, the fields hold each
/// quantity multiplied by e^{-shift} with a common shift, so every ratio is
/// exact and nothing overflows. None of the forms below subtracts nearly
/// equal numbers.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scaled {
    pub a: f64,
    pub b: f64,
    pub s: f64,
    pub c: f64,
    pub d: f64,
    /// ln(A + C), unshifted.
    pub ln_d: f64,
    /// The common exponent shift.
    pub shift: f64,
}

pub(crate) fn scaled(p: &ModelParams, g: f64) -> Scaled {
    let lb = p.lambda * p.beta;
    let abh = (p.beta * p.h).abs();
    let bg = p.beta * g;
    let shift = (lb + abh).max(bg);
    let ea = (lb + abh - shift).exp();
    let eg = (bg - shift).exp();
    let a = ea * (1.0 + (-2.0 * abh).exp()) * 0.5;
    let b = p.h.signum() * ea * (-(-2.0 * abh).exp_m1()) * 0.5;
    let c = eg * (1.0 + (-2.0 * bg).exp()) * 0.5;
    let s = eg * (-(-2.0 * bg).exp_m1()) * 0.5;
    let d = a + c;
    Scaled {
        a,
        b,
        s,
        c,
        d,
        ln_d: shift + d.ln(),
        shift,
    }
}

/// sinh(beta g) / (g (A + C)): the kernel shared by the electron density and
/// the derivative of f. Continuous through g = 0.
pub(crate) fn density_kernel(p: &ModelParams, g: f64) -> f64 {
    let sc = scaled(p, g);
    if p.beta * g < 1e-8 {
        p.beta * sinhc(p.beta * g) * (-sc.shift).exp() / sc.d
    } else {
        sc.s / (g * sc.d)
    }
}

/// g_r = sqrt((mu-lambda)^2 + gamma^2 r).
pub fn gap_energy(r: f64, p: &ModelParams) -> f64 {
    debug_assert!(r >= 0.0);
    (p.detuning() * p.detuning() + p.gamma * p.gamma * r).sqrt()
}

/// The free-energy functional f(r); log-sum-exp evaluation keeps beta up to
/// 1e4 in range.
pub fn free_energy(r: f64, p: &ModelParams) -> f64 {
    let g = gap_energy(r, p);
    let sc = scaled(p, g);
    -p.gamma * r + (sc.ln_d - p.lambda * p.beta) / p.beta
}

/// Analytic derivative of f with respect to r.
pub fn free_energy_deriv(r: f64, p: &ModelParams) -> f64 {
    let g = gap_energy(r, p);
    let q = density_kernel(p, g);
    p.gamma * (0.5 * p.gamma * q - 1.0)
}

/// Left-hand side minus right-hand side of the gap equation
/// `tanh(beta g) = (2g/gamma)(1 + e^{lambda beta} cosh(beta h)/cosh(beta g))`
/// at condensate density r > 0. Zero exactly at the stationary points of f.
pub fn gap_residual(r: f64, p: &ModelParams) -> f64 {
    debug_assert!(r > 0.0);
    let g = gap_energy(r, p);
    let sc = scaled(p, g);
    (p.beta * g).tanh() - 2.0 * g / p.gamma * (1.0 + sc.a / sc.c)
}

/// d(residual)/dr, used for the final Newton polish of a root.
fn gap_residual_deriv(r: f64, p: &ModelParams) -> f64 {
    let g = gap_energy(r, p);
    let sc = scaled(p, g);
    let a_over_c = sc.a / sc.c;
    let bg = p.beta * g;
    let dres_dg = p.beta * sech_sq(bg) - 2.0 / p.gamma * (1.0 + a_over_c)
        + 2.0 * g * p.beta / p.gamma * a_over_c * bg.tanh();
    dres_dg * p.gamma * p.gamma / (2.0 * g)
}

/// Log-scaled gap function phi(x); same zeros and signs as h1(x) for x > 0.
fn phi(x: f64, p: &ModelParams) -> f64 {
    let sc = scaled(p, x);
    (0.5 * p.gamma).ln() - x.ln() + log_sinh(p.beta * x) - sc.ln_d
}

/// Limit of phi as x -> 0+: sign of h1(0+) = gamma beta / 2 - 1 - A.
fn phi_at_zero(p: &ModelParams) -> f64 {
    let ln_a = p.lambda * p.beta + log_cosh(p.beta * p.h);
    (0.5 * p.gamma * p.beta).ln() - logaddexp(0.0, ln_a)
}

/// d phi / dx.
fn phi_deriv(x: f64, p: &ModelParams) -> f64 {
    let sc = scaled(p, x);
    -1.0 / x + p.beta * coth(p.beta * x) - p.beta * sc.s / sc.d
}

/// sqrt(y / tanh(y) - 1), the strictly concave auxiliary curve whose crossing
/// with the line sqrt(2/(beta gamma)) y locates the single interior critical
/// point of h1.
fn aux_curve(y: f64) -> f64 {
    if y < 1e-3 {
        y / 3f64.sqrt() * (1.0 - y * y / 15.0).sqrt()
    } else {
        (y / y.tanh() - 1.0).sqrt()
    }
}

/// The unique x > 0 where h1'(x) = 0, defined only for beta gamma > 6.
fn h1_turning_point(p: &ModelParams) -> Result<f64, SolverError> {
    let k = (2.0 / (p.beta * p.gamma)).sqrt();
    debug_assert!(k * k < 2.0 / 6.0);
    let psi = |y: f64| k * y - aux_curve(y);
    let mut hi = 1.0;
    let mut n = 0;
    while psi(hi) <= 0.0 {
        hi *= 2.0;
        n += 1;
        if n > 200 {
            return Err(SolverError::BracketFailure(hi));
        }
    }
    let mut lo = 1e-9;
    while psi(lo) > 0.0 {
        lo /= 2.0;
        if lo < 1e-300 {
            return Err(SolverError::BracketFailure(lo));
        }
    }
    let y = bisect(psi, lo, hi, 1e-13 * hi.max(1.0));
    Ok(y / p.beta)
}

/// Expand to the right of `from` until phi < 0.
fn expand_right(p: &ModelParams, from: f64) -> Result<f64, SolverError> {
    let mut x = from.max(1e-8) * 2.0;
    for _ in 0..200 {
        if phi(x, p) < 0.0 {
            return Ok(x);
        }
        x *= 2.0;
    }
    Err(SolverError::BracketFailure(x))
}

/// Shrink to the left of `from` until the sign of phi matches sign(target).
fn shrink_left(p: &ModelParams, from: f64, want_negative: bool) -> Result<f64, SolverError> {
    let mut x = from * 0.5;
    for _ in 0..4000 {
        let v = phi(x, p);
        if (v < 0.0) == want_negative && v != 0.0 {
            return Ok(x);
        }
        x *= 0.5;
        if x < 1e-300 {
            break;
        }
    }
    Err(SolverError::BracketFailure(from))
}

/// Bisection to absolute width 1e-15 followed by Newton polish on phi.
fn refine_root(p: &ModelParams, lo: f64, hi: f64) -> f64 {
    let mut x = bisect(|x| phi(x, p), lo, hi, 1e-15);
    for _ in 0..3 {
        let d = phi_deriv(x, p);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let step = phi(x, p) / d;
        let next = x - step;
        if next > 0.0 && next.is_finite() {
            x = next;
        }
    }
    x
}

/// All strictly positive roots of the gap equation, ascending.
///
/// For beta gamma > 6 the function h1 rises to a single interior maximum and
/// then falls to -infinity, so there are at most two roots, bracketed on
/// either side of the turning point; for beta gamma <= 6 it is monotone
/// decreasing past its boundary value and at most one root exists.
pub fn stationary_points(p: &ModelParams) -> Result<Vec<f64>, SolverError> {
    let delta_abs = p.detuning().abs();
    let phi0 = phi_at_zero(p);
    let mut roots_x: Vec<f64> = Vec::with_capacity(2);

    if p.beta * p.gamma > 6.0 {
        let xt = h1_turning_point(p)?;
        let phit = phi(xt, p);
        if phit == 0.0 {
            roots_x.push(xt);
        } else if phit > 0.0 {
            let hi = expand_right(p, xt)?;
            roots_x.push(refine_root(p, xt, hi));
            if phi0 < 0.0 {
                let lo = shrink_left(p, xt, true)?;
                roots_x.push(refine_root(p, lo, xt));
            }
        }
    } else if phi0 > 0.0 {
        let start = (0.5 * p.gamma).max(delta_abs).max(1.0 / p.beta);
        let hi = expand_right(p, start)?;
        let lo = shrink_left(p, hi, false)?;
        roots_x.push(refine_root(p, lo, hi));
    }

    let mut roots_r: Vec<f64> = roots_x
        .into_iter()
        .filter(|&x| x > delta_abs)
        .map(|x| (x - delta_abs) * (x + delta_abs) / (p.gamma * p.gamma))
        .filter(|&r| r > 0.0)
        .collect();
    roots_r.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // final Newton polish directly on the residual, so the reported roots
    // zero the published gap-equation form to machine precision
    for r in roots_r.iter_mut() {
        for _ in 0..3 {
            let res = gap_residual(*r, p);
            let der = gap_residual_deriv(*r, p);
            if der == 0.0 || !der.is_finite() {
                break;
            }
            let next = *r - res / der;
            if next > 0.0 && next.is_finite() && (next - *r).abs() <= 1e-6 * (*r + 1e-12) {
                *r = next;
            } else {
                break;
            }
        }
    }
    Ok(roots_r)
}

/// Maximize f over r >= 0 with an explicit tie tolerance.
///
/// Candidates are r = 0 and every strictly positive gap-equation root. The
/// returned `r_beta` is the largest maximizer; when two maximizers tie within
/// `tie_tol` the point is flagged critical and both are reported.
pub fn solve_gap(p: &ModelParams, tie_tol: f64) -> Result<GapSolution, SolverError> {
    debug_assert!(tie_tol > 0.0);
    let stat = stationary_points(p)?;
    let mut cands: Vec<(f64, f64)> = Vec::with_capacity(3);
    cands.push((0.0, free_energy(0.0, p)));
    for &r in &stat {
        cands.push((r, free_energy(r, p)));
    }
    let best = cands
        .iter()
        .map(|&(_, fv)| fv)
        .fold(f64::NEG_INFINITY, f64::max);

    let mut maxers: Vec<(f64, f64)> = cands
        .into_iter()
        .filter(|&(_, fv)| best - fv <= tie_tol)
        .collect();
    maxers.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(2);
    for (r, fv) in maxers {
        match merged.last_mut() {
            Some(last) if r - last.0 < MERGE_TOL => {
                if fv > last.1 {
                    *last = (r, fv);
                }
            }
            _ => merged.push((r, fv)),
        }
    }

    let maximizers: Vec<f64> = merged.iter().map(|&(r, _)| r).collect();
    let r_beta = *maximizers.last().expect("at least one maximizer");
    Ok(GapSolution {
        is_critical: maximizers.len() >= 2,
        r_beta,
        f_at_max: best,
        stationary_points: stat,
        maximizers,
    })
}

/// [`solve_gap`] with the default tie tolerance of 1e-12.
pub fn solve_gap_default(p: &ModelParams) -> Result<GapSolution, SolverError> {
    solve_gap(p, TIE_TOL)
}

/// Pressure of the r = 0 (normal) branch regardless of where the true
/// maximum sits. Used by branch-resolved diagnostics and tests.
pub fn normal_branch_pressure(p: &ModelParams) -> f64 {
    LN_2 / p.beta + p.mu + free_energy(0.0, p)
}
