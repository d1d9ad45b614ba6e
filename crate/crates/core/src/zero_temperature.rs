//! Closed-form zero-temperature limits: coupling thresholds, ground-state
//! observables, the Mott window and the critical magnetic field.

use crate::params::ModelParams;
use serde::Serialize;

/// Classification width for the measure-zero boundary cases.
const BOUNDARY_TOL: f64 = 1e-12;

/// Minimal BCS coupling for a superconducting ground state at fixed chemical
/// potential, as a function of x = |mu - lambda| and y = lambda + |h|:
///
/// ```text
/// Gamma_{x,y} = 2(y + sqrt(y^2 - x^2))   for 0 <= x < y (and y > 0),
///               2x                        for x >= y.
/// ```
pub fn gamma_threshold(x: f64, y: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x >= y {
        2.0 * x
    } else {
        2.0 * (y + (y * y - x * x).sqrt())
    }
}

/// Fixed-density analogue: Gamma~_{x,y} = 4y / (x(x-2) + 2) for y >= 0 and 0
/// otherwise. The denominator is (x-1)^2 + 1 >= 1, so the map is total.
pub fn gamma_threshold_density(x: f64, y: f64) -> f64 {
    if y < 0.0 {
        0.0
    } else {
        4.0 * y / ((x - 1.0) * (x - 1.0) + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroTRegime {
    Superconducting,
    /// Standard (non-ferromagnetic) insulator: empty or completely filled.
    Insulator,
    /// One electron pinned per site, no double occupancy; magnetized for
    /// any non-zero field.
    FerromagneticMott,
    /// Within 1e-12 of gamma = Gamma or |mu-lambda| = lambda + |h|, where
    /// the ground state is non-unique and Kronecker-delta weights apply.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroTObservables {
    pub r_inf: f64,
    pub d_inf: f64,
    pub m_inf: f64,
    pub w_inf: f64,
    pub e_inf: f64,
    pub regime: ZeroTRegime,
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// beta -> infinity observables. The temperature field of `p` is ignored.
///
/// Away from the boundary set the answer is the pure-regime one; on it the
/// Kronecker-delta weights of the zero-temperature corollaries are applied
/// (they encode the equal-weight mixture of degenerate ground states) and
/// the regime is reported as `Boundary` rather than silently averaged into a
/// neighboring phase.
pub fn zero_t_observables(p: &ModelParams) -> ZeroTObservables {
    let x = p.detuning().abs();
    let y = p.lambda + p.h.abs();
    let threshold = gamma_threshold(x, y);
    let on_gamma = (p.gamma - threshold).abs() <= BOUNDARY_TOL;
    let on_kink = (x - y).abs() <= BOUNDARY_TOL;
    let boundary = on_gamma || on_kink;

    if p.gamma > threshold && !on_gamma {
        let r = 0.25 - (p.detuning() / p.gamma).powi(2);
        let d = 1.0 + 2.0 * p.detuning() / p.gamma;
        let w = d / 2.0;
        let e = -p.mu * d + 2.0 * p.lambda * w - p.gamma * r;
        return ZeroTObservables {
            r_inf: r,
            d_inf: d,
            m_inf: 0.0,
            w_inf: w,
            e_inf: e,
            regime: if boundary {
                ZeroTRegime::Boundary
            } else {
                ZeroTRegime::Superconducting
            },
        };
    }

    // normal ground state (r_inf = 0; also the gamma = Gamma boundary, where
    // r_beta -> 0)
    let delta_xy = if on_kink { 1.0 } else { 0.0 };
    let delta_h0 = if p.h == 0.0 { 1.0 } else { 0.0 };
    let denom_full = 1.0 + delta_xy * (1.0 + delta_h0);
    let denom_m = 1.0 + delta_xy;
    let chi_outer = if x >= y - BOUNDARY_TOL { 1.0 } else { 0.0 }; // chi_{[y, inf)}(x)
    let chi_inner = if x <= y + BOUNDARY_TOL { 1.0 } else { 0.0 }; // chi_{[0, y]}(x)
    let d = 1.0 + sgn(p.detuning()) / denom_full * chi_outer;
    let m = sgn(p.h) / denom_m * chi_inner;
    let w = (1.0 + sgn(p.detuning())) / (2.0 * denom_full) * chi_outer;
    let e = -p.mu * d - p.h * m + 2.0 * p.lambda * w;
    let regime = if boundary {
        ZeroTRegime::Boundary
    } else if x > y {
        ZeroTRegime::Insulator
    } else {
        ZeroTRegime::FerromagneticMott
    };
    ZeroTObservables {
        r_inf: 0.0,
        d_inf: d,
        m_inf: m,
        w_inf: w,
        e_inf: e,
        regime,
    }
}

/// The detuning window (x1, x2) in which tuning mu drives the
/// superconductor-Mott insulator transition. Present exactly when
/// 2(lambda+|h|) < gamma < 4(lambda+|h|).
pub fn mott_window(p: &ModelParams) -> Option<(f64, f64)> {
    let y = p.lambda + p.h.abs();
    if 2.0 * y < p.gamma && p.gamma < 4.0 * y {
        let x1 = 0.5 * p.gamma.sqrt() * (4.0 * y - p.gamma).sqrt();
        let x2 = 0.5 * p.gamma;
        Some((x1, x2))
    } else {
        None
    }
}

/// Zero-temperature critical magnetic field: the unique y > 0 solving
/// Gamma_{|mu-lambda|, lambda + y} = gamma, defined when gamma exceeds the
/// zero-field threshold Gamma_{|mu-lambda|, lambda}.
pub fn critical_field(p: &ModelParams) -> Option<f64> {
    let x = p.detuning().abs();
    if p.gamma > gamma_threshold(x, p.lambda) {
        Some(p.gamma * (0.25 + (p.detuning() / p.gamma).powi(2)) - p.lambda)
    } else {
        None
    }
}
