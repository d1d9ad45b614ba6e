//! Critical temperatures, transition-order classification and fixed-density
//! thermodynamics including first-order coexistence splits.

use crate::free_energy::{solve_gap_default, SolverError, JUMP_TOL};
use crate::numerics::{bisect, log_cosh, tanhc};
use crate::observables::{electron_density, observable_set, ObservableSet};
use crate::params::{DensityVector, ModelParams};
use crate::zero_temperature::{gamma_threshold, gamma_threshold_density};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("no superconducting transition found in the scanned beta range")]
    NoTransition,
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("electron density must lie strictly between 0 and 2")]
    InvalidDensity,
    #[error("rho = {0} lies outside the coexistence window")]
    OutsideWindow(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransitionOrder {
    First,
    Second,
    None,
}

/// Outcome of a critical-temperature scan along beta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionRecord {
    /// Critical temperature theta_c (r_beta > 0 iff beta > 1/theta_c), if a
    /// transition was found.
    pub theta_c: Option<f64>,
    pub order: TransitionOrder,
    /// Jump of r_beta across the transition (0 for second order).
    pub r_jump: f64,
    /// False when the r_beta > 0 indicator changed sign more than once along
    /// the scan; re-entrant behavior is conjectured impossible but is never
    /// assumed. In that case theta_c reports the smallest transition beta.
    pub monotone_flag: bool,
}

const SCAN_POINTS: usize = 200;
const BETA_TOL: f64 = 1e-6;
const ORDER_OFFSET: f64 = 1e-5;

fn superconducting(beta: f64, mu: f64, lambda: f64, gamma: f64, h: f64) -> Result<bool, PhaseError> {
    let p = ModelParams::new(beta, mu, lambda, gamma, h)
        .map_err(|_| PhaseError::PreconditionViolated("invalid parameters"))?;
    Ok(solve_gap_default(&p)?.r_beta > 0.0)
}

/// Locate the critical temperature by a geometric beta scan of the
/// r_beta > 0 indicator followed by bisection on the first sign change.
pub fn critical_temperature(
    mu: f64,
    lambda: f64,
    gamma: f64,
    h: f64,
    beta_max: f64,
) -> Result<TransitionRecord, PhaseError> {
    if beta_max <= 2.0 / gamma {
        return Err(PhaseError::PreconditionViolated(
            "beta_max must exceed 2/gamma, below which the phase is provably normal",
        ));
    }
    // the phase is provably normal for beta < 2/gamma; start at half that
    let b_lo = 1.0 / gamma;
    let ratio = (beta_max / b_lo).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let mut grid = Vec::with_capacity(SCAN_POINTS);
    let mut flags = Vec::with_capacity(SCAN_POINTS);
    for i in 0..SCAN_POINTS {
        let b = b_lo * ratio.powi(i as i32);
        grid.push(b);
        flags.push(superconducting(b, mu, lambda, gamma, h)?);
    }
    let changes: Vec<usize> = (1..SCAN_POINTS).filter(|&i| flags[i] != flags[i - 1]).collect();
    if changes.is_empty() {
        return Ok(TransitionRecord {
            theta_c: None,
            order: TransitionOrder::None,
            r_jump: 0.0,
            monotone_flag: true,
        });
    }
    let i = changes[0];
    let (mut lo, mut hi) = (grid[i - 1], grid[i]);
    let (flo, _) = (flags[i - 1], flags[i]);
    while hi - lo > BETA_TOL {
        let mid = 0.5 * (lo + hi);
        if superconducting(mid, mu, lambda, gamma, h)? == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta_c = 0.5 * (lo + hi);

    let r_at = |beta: f64| -> Result<f64, PhaseError> {
        let p = ModelParams::new(beta, mu, lambda, gamma, h).unwrap();
        Ok(solve_gap_default(&p)?.r_beta)
    };
    let r_below = r_at(beta_c - ORDER_OFFSET)?;
    let r_above = r_at(beta_c + ORDER_OFFSET)?;
    let r_jump = (r_above - r_below).abs();
    Ok(TransitionRecord {
        theta_c: Some(1.0 / beta_c),
        order: if r_jump > JUMP_TOL {
            TransitionOrder::First
        } else {
            TransitionOrder::Second
        },
        r_jump,
        monotone_flag: changes.len() == 1,
    })
}

/// For lambda <= 0 and h = 0 the functional is strictly concave in r and the
/// transition is second order: beta_c is the unique root of
/// `tanh(beta x)/x = (2/gamma)(1 + e^{lambda beta}/cosh(beta x))` at
/// x = |mu - lambda|.
pub fn second_order_beta_c(mu: f64, lambda: f64, gamma: f64, h: f64) -> Result<f64, PhaseError> {
    if lambda > 0.0 {
        return Err(PhaseError::PreconditionViolated("lambda must be <= 0"));
    }
    if h != 0.0 {
        return Err(PhaseError::PreconditionViolated("h must be 0"));
    }
    let x = (mu - lambda).abs();
    if gamma <= gamma_threshold(x, lambda) {
        return Err(PhaseError::PreconditionViolated(
            "gamma must exceed the zero-temperature threshold",
        ));
    }
    // eta(beta) = LHS - RHS; negative at beta -> 0, positive at infinity
    let eta = |beta: f64| {
        let lhs = beta * tanhc(beta * x);
        let expo = lambda * beta - log_cosh(beta * x);
        lhs - 2.0 / gamma * (1.0 + expo.exp())
    };
    let mut hi = 1.0;
    let mut n = 0;
    while eta(hi) <= 0.0 {
        hi *= 2.0;
        n += 1;
        if n > 60 {
            return Err(PhaseError::PreconditionViolated(
                "no second-order transition in range",
            ));
        }
    }
    let mut lo = hi / 2.0;
    while eta(lo) > 0.0 {
        lo /= 2.0;
    }
    Ok(bisect(eta, lo, hi, 1e-12))
}

/// Classify the transition order by the r_beta jump across theta_c.
pub fn classify_order(
    mu: f64,
    lambda: f64,
    gamma: f64,
    h: f64,
    beta_max: f64,
) -> Result<TransitionRecord, PhaseError> {
    let rec = critical_temperature(mu, lambda, gamma, h, beta_max)?;
    if rec.theta_c.is_none() {
        return Err(PhaseError::NoTransition);
    }
    Ok(rec)
}

/// Both branches of a first-order point at fixed electron density.
///
/// "plus" is the superconducting branch (r_plus > 0, r_minus = 0). On the
/// electron side of half filling d_plus > d_minus as in the defining
/// theorem; on the hole side the density ordering reverses by electron-hole
/// duality while tau and the mixing formulas stay valid verbatim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoexistenceSplit {
    pub mu_c: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    /// Condensate of the superconducting branch; the normal branch carries
    /// r_minus = 0.
    pub r_plus: f64,
    pub m_minus: f64,
    pub m_plus: f64,
    pub w_minus: f64,
    pub w_plus: f64,
    /// Branch energies at the prescribed filling rho:
    /// e_pm = -mu_c rho - h m_pm + 2 lambda w_pm - gamma r_pm.
    pub e_minus: f64,
    pub e_plus: f64,
    /// Mixing weight tau = (rho - d_minus)/(d_plus - d_minus) in [0, 1].
    pub tau: f64,
}

/// Result of inverting the electron density for the chemical potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DensityInversion {
    Unique { mu: f64, observables: ObservableSet },
    Coexistence(CoexistenceSplit),
}

/// Fixed-density mixture observables inside the coexistence window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedDensities {
    pub condensate: f64,
    pub densities: DensityVector,
    pub energy_per_site: f64,
    pub tau: f64,
}

fn split_from_critical_point(
    p: &ModelParams,
    rho: f64,
    sets: &[ObservableSet],
) -> Option<CoexistenceSplit> {
    if sets.len() != 2 {
        return None;
    }
    let (normal, sc) = if sets[0].r == 0.0 {
        (&sets[0], &sets[1])
    } else {
        (&sets[1], &sets[0])
    };
    if sc.r == 0.0 || (sc.densities.d - normal.densities.d).abs() < 1e-12 {
        return None;
    }
    let tau = (rho - normal.densities.d) / (sc.densities.d - normal.densities.d);
    let e_branch = |m: f64, w: f64, r: f64| -p.mu * rho - p.h * m + 2.0 * p.lambda * w - p.gamma * r;
    Some(CoexistenceSplit {
        mu_c: p.mu,
        d_minus: normal.densities.d,
        d_plus: sc.densities.d,
        r_plus: sc.r,
        m_minus: normal.densities.m,
        m_plus: sc.densities.m,
        w_minus: normal.densities.w,
        w_plus: sc.densities.w,
        e_minus: e_branch(normal.densities.m, normal.densities.w, 0.0),
        e_plus: e_branch(sc.densities.m, sc.densities.w, sc.r),
        tau,
    })
}

/// Invert `d_beta(mu) = rho` at fixed (beta, lambda, gamma, h).
///
/// The superconducting candidate `mu = gamma/2 (rho - 1) + lambda` is tested
/// first (inside the superconducting phase it reproduces rho exactly by the
/// linear-density law); otherwise the globally non-decreasing equilibrium
/// density is bisected. Landing on a first-order jump that straddles rho
/// yields the coexistence split.
pub fn chemical_potential_at_density(
    rho: f64,
    beta: f64,
    lambda: f64,
    gamma: f64,
    h: f64,
) -> Result<DensityInversion, PhaseError> {
    if !(rho > 0.0 && rho < 2.0) {
        return Err(PhaseError::InvalidDensity);
    }
    let mu_sc = 0.5 * gamma * (rho - 1.0) + lambda;
    let p_sc = ModelParams::new(beta, mu_sc, lambda, gamma, h)
        .map_err(|_| PhaseError::PreconditionViolated("invalid parameters"))?;
    let gs = solve_gap_default(&p_sc)?;
    if gs.r_beta > 0.0 && !gs.is_critical {
        let sets = observable_set(&p_sc)?;
        return Ok(DensityInversion::Unique {
            mu: mu_sc,
            observables: sets[0],
        });
    }

    let density = |mu: f64| -> Result<f64, PhaseError> {
        let p = ModelParams::new(beta, mu, lambda, gamma, h).unwrap();
        let gs = solve_gap_default(&p)?;
        Ok(electron_density(&p, gs.r_beta))
    };
    // d -> 0 as mu -> -inf and d -> 2 as mu -> +inf
    let mut lo = lambda - 1.0;
    let mut hi = lambda + 1.0;
    let mut n = 0;
    while density(lo)? > rho {
        lo -= (lambda - lo).abs().max(1.0);
        n += 1;
        if n > 100 {
            return Err(PhaseError::PreconditionViolated("density bracketing failed"));
        }
    }
    while density(hi)? < rho {
        hi += (hi - lambda).abs().max(1.0);
        n += 1;
        if n > 200 {
            return Err(PhaseError::PreconditionViolated("density bracketing failed"));
        }
    }
    for _ in 0..120 {
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if density(mid)? < rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu_star = 0.5 * (lo + hi);
    let p_star = ModelParams::new(beta, mu_star, lambda, gamma, h).unwrap();
    let sets = observable_set(&p_star)?;
    if let Some(split) = split_from_critical_point(&p_star, rho, &sets) {
        let (d_lo, d_hi) = if split.d_minus <= split.d_plus {
            (split.d_minus, split.d_plus)
        } else {
            (split.d_plus, split.d_minus)
        };
        if rho >= d_lo - 1e-9 && rho <= d_hi + 1e-9 {
            let mut split = split;
            split.tau = split.tau.clamp(0.0, 1.0);
            return Ok(DensityInversion::Coexistence(split));
        }
    }
    // unique solution: pick the branch whose density matches rho
    let best = sets
        .iter()
        .min_by(|a, b| {
            (a.densities.d - rho)
                .abs()
                .partial_cmp(&(b.densities.d - rho).abs())
                .unwrap()
        })
        .copied()
        .expect("observable_set is never empty");
    Ok(DensityInversion::Unique {
        mu: mu_star,
        observables: best,
    })
}

/// Mixture densities at filling rho inside a first-order window
/// [d_minus, d_plus]: the condensate is tau r_plus and the remaining
/// densities interpolate linearly between the branches.
pub fn coexistence_densities(
    rho: f64,
    beta: f64,
    lambda: f64,
    gamma: f64,
    h: f64,
) -> Result<MixedDensities, PhaseError> {
    match chemical_potential_at_density(rho, beta, lambda, gamma, h)? {
        DensityInversion::Coexistence(s) => {
            let tau = s.tau;
            Ok(MixedDensities {
                condensate: tau * s.r_plus,
                densities: DensityVector {
                    d: rho,
                    m: (1.0 - tau) * s.m_minus + tau * s.m_plus,
                    w: (1.0 - tau) * s.w_minus + tau * s.w_plus,
                },
                energy_per_site: (1.0 - tau) * s.e_minus + tau * s.e_plus,
                tau,
            })
        }
        DensityInversion::Unique { .. } => Err(PhaseError::OutsideWindow(rho)),
    }
}

/// Zero-temperature condensate at fixed electron density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FixedDensityZeroT {
    /// gamma clears the fixed-density threshold: r_inf = rho(2 - rho)/4.
    Condensate(f64),
    /// Below the threshold phase mixtures can occur and no closed form
    /// applies; the finite-beta coexistence machinery must be consulted.
    Unresolved,
}

pub fn fixed_density_zero_t(
    rho: f64,
    lambda: f64,
    gamma: f64,
    h: f64,
) -> Result<FixedDensityZeroT, PhaseError> {
    if !(rho > 0.0 && rho < 2.0) {
        return Err(PhaseError::InvalidDensity);
    }
    let threshold = gamma_threshold_density(rho, lambda + h.abs()).max(0.0);
    if gamma > threshold {
        Ok(FixedDensityZeroT::Condensate(rho * (2.0 - rho) / 4.0))
    } else {
        Ok(FixedDensityZeroT::Unresolved)
    }
}
