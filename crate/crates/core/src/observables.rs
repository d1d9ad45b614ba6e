//! Infinite-volume pressure and equilibrium observable densities.

use crate::free_energy::{
    density_kernel, gap_energy, scaled, solve_gap_default, GapSolution, SolverError, JUMP_TOL,
};
use crate::params::{DensityVector, ModelParams};
use serde::Serialize;
use std::f64::consts::LN_2;

/// All observables evaluated at one parameter point for one maximizer of f.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableSet {
    pub pressure: f64,
    /// Cooper pair condensate density in [0, 1/4].
    pub r: f64,
    pub densities: DensityVector,
    pub energy_per_site: f64,
    /// Index into `GapSolution::maximizers` this set was computed from.
    pub from_maximizer: usize,
}

/// Grand-canonical pressure from a solved gap problem.
pub fn pressure(p: &ModelParams, gs: &GapSolution) -> f64 {
    LN_2 / p.beta + p.mu + gs.f_at_max
}

/// Electron density per site at condensate density r.
pub fn electron_density(p: &ModelParams, r: f64) -> f64 {
    1.0 + p.detuning() * density_kernel(p, gap_energy(r, p))
}

/// Magnetization density at condensate density r.
pub fn magnetization(p: &ModelParams, r: f64) -> f64 {
    let sc = scaled(p, gap_energy(r, p));
    sc.b / sc.d
}

/// Coulomb correlation (double occupancy) density at condensate density r.
///
/// The theorem's `w = (d - m coth(beta h))/2` and its h -> 0 analytic limit
/// are algebraically the same expression: `m coth(beta h)` equals
/// `e^{lambda beta} cosh(beta h) / D` identically, which is what gets
/// evaluated here, so no crossover between branches is needed.
pub fn coulomb_correlation(p: &ModelParams, r: f64) -> f64 {
    let sc = scaled(p, gap_energy(r, p));
    0.5 * (electron_density(p, r) - sc.a / sc.d)
}

/// Mean energy per site from the densities and the condensate.
pub fn mean_energy(p: &ModelParams, dens: &DensityVector, r: f64) -> f64 {
    -p.mu * dens.d - p.h * dens.m + 2.0 * p.lambda * dens.w - p.gamma * r
}

fn observables_at(p: &ModelParams, gs: &GapSolution, idx: usize) -> ObservableSet {
    let r = gs.maximizers[idx];
    let d = electron_density(p, r);
    let m = magnetization(p, r);
    let w = coulomb_correlation(p, r);
    let densities = DensityVector { d, m, w };
    ObservableSet {
        pressure: pressure(p, gs),
        r,
        densities,
        energy_per_site: mean_energy(p, &densities, r),
        from_maximizer: idx,
    }
}

/// One ObservableSet per maximizer: a single entry away from critical
/// points, two (normal and superconducting branch) exactly on them.
pub fn observable_set(p: &ModelParams) -> Result<Vec<ObservableSet>, SolverError> {
    let gs = solve_gap_default(p)?;
    Ok((0..gs.maximizers.len())
        .map(|i| observables_at(p, &gs, i))
        .collect())
}

/// A first-order transition inside the differentiation stencil: the mean
/// energy jumps and the specific heat is infinite there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscontinuityReport {
    pub beta_minus: f64,
    pub beta_plus: f64,
    pub energy_minus: f64,
    pub energy_plus: f64,
    pub r_jump: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SpecificHeat {
    Value(f64),
    Discontinuous(DiscontinuityReport),
}

/// Specific heat c = -beta^2 d(epsilon)/d(beta), under the convention that
/// the finite-volume correction term is zero.
///
/// The stencil `[beta - dbeta, beta + dbeta]` is used to detect a
/// first-order jump; on a single branch the derivative itself is evaluated
/// analytically (implicit differentiation of the gap equation on the
/// superconducting branch), because deep in the gapped phase the true
/// c decays like beta^2 e^{-beta (gamma/2 - lambda)} and falls below what a
/// finite difference of epsilon ~ O(1) can resolve in f64.
pub fn specific_heat(p: &ModelParams, dbeta: f64) -> Result<SpecificHeat, SolverError> {
    debug_assert!(dbeta > 0.0 && dbeta < p.beta);
    let pm = ModelParams {
        beta: p.beta - dbeta,
        ..*p
    };
    let pp = ModelParams {
        beta: p.beta + dbeta,
        ..*p
    };
    let gm = solve_gap_default(&pm)?;
    let gp = solve_gap_default(&pp)?;
    let r_jump = (gp.r_beta - gm.r_beta).abs();
    if gm.is_critical || gp.is_critical || r_jump > JUMP_TOL {
        let om = observables_at(&pm, &gm, gm.maximizers.len() - 1);
        let op = observables_at(&pp, &gp, gp.maximizers.len() - 1);
        return Ok(SpecificHeat::Discontinuous(DiscontinuityReport {
            beta_minus: pm.beta,
            beta_plus: pp.beta,
            energy_minus: om.energy_per_site,
            energy_plus: op.energy_per_site,
            r_jump,
        }));
    }
    let gs = solve_gap_default(p)?;
    Ok(SpecificHeat::Value(
        -p.beta * p.beta * energy_beta_derivative(p, &gs),
    ))
}

/// Analytic d(epsilon)/d(beta) on the branch selected by `gs.r_beta`.
///
/// Writing A = e^{lb} cosh(bh), B = e^{lb} sinh(bh), S = sinh(bg),
/// C = cosh(bg), D = A + C, the mean energy is
/// `eps = (lambda - mu) d - (h B + lambda A)/D - gamma r`. On the normal
/// branch g is frozen at |mu - lambda|; on the superconducting branch g(beta)
/// follows the gap equation F(g, beta) = (gamma/2g) S - D = 0, and
/// g' = -F_beta / F_g with the exactly reduced forms
/// `F_beta = g (A C + 1)/S - A'` and `F_g = -D/g + beta (A C + 1)/S`.
fn energy_beta_derivative(p: &ModelParams, gs: &GapSolution) -> f64 {
    let r = gs.r_beta;
    let g = gap_energy(r, p);
    let sc = scaled(p, g);
    let (a_hat, b_hat, s_hat) = (sc.a / sc.d, sc.b / sc.d, sc.s / sc.d);
    let a_prime = p.lambda * a_hat + p.h * b_hat; // A'/D
    let b_prime = p.lambda * b_hat + p.h * a_hat; // B'/D

    if r > 0.0 {
        // (AC + 1)/(S D), exponent-shifted: A C/(S D) = a_hat * coth(beta g)
        let bg = p.beta * g;
        let inv_sd = (-(crate::numerics::log_sinh(bg) + sc.ln_d)).exp();
        let ac1_over_sd = a_hat / bg.tanh() + inv_sd;
        let f_beta = g * ac1_over_sd - a_prime; // F_beta / D
        let f_g = -1.0 / g + p.beta * ac1_over_sd; // F_g / D
        let g_dot = -f_beta / f_g;
        let t = g + p.beta * g_dot;
        let d_dot_over_d = a_prime + s_hat * t;
        let m_dot = b_prime - b_hat * d_dot_over_d;
        let a_over_d_dot = a_prime - a_hat * d_dot_over_d;
        let r_dot = 2.0 * g * g_dot / (p.gamma * p.gamma);
        // d is beta-independent on this branch (linear-density law)
        -p.h * m_dot - p.lambda * a_over_d_dot - p.gamma * r_dot
    } else {
        let q = density_kernel(p, g); // S/(g D)
        let d_dot_over_d = a_prime + g * s_hat;
        let c_hat = sc.c / sc.d;
        // q' at fixed g: C/D - q * D'/D
        let q_dot = c_hat - q * d_dot_over_d;
        let delta = p.detuning();
        let d_dot = delta * q_dot;
        let m_dot = b_prime - b_hat * d_dot_over_d;
        let a_over_d_dot = a_prime - a_hat * d_dot_over_d;
        let w_dot = 0.5 * (d_dot - a_over_d_dot);
        -p.mu * d_dot - p.h * m_dot + 2.0 * p.lambda * w_dot
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_energy::normal_branch_pressure;
    use approx::assert_relative_eq;

    fn pt(beta: f64, mu: f64, lambda: f64, gamma: f64, h: f64) -> ModelParams {
        ModelParams::new(beta, mu, lambda, gamma, h).unwrap()
    }

    #[test]
    fn pressure_of_four_equal_states() {
        let p = pt(1.0, 0.0, 0.0, 0.1, 0.0);
        let gs = solve_gap_default(&p).unwrap();
        assert_relative_eq!(pressure(&p, &gs), 4f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn normal_pressure_equals_one_site_closed_form() {
        // at r = 0 the pressure reduces to the gamma-free one-site pressure
        // ln(1 + e^{b(mu-h)} + e^{b(mu+h)} + e^{2b(mu-lambda)}) / b
        for (beta, mu, lambda, h) in [(1.3, 0.4, 0.9, 0.3), (4.0, -0.5, 0.2, -0.7)] {
            let p = pt(beta, mu, lambda, 2.6, h);
            let closed = ((beta * (mu - h)).exp()
                + (beta * (mu + h)).exp()
                + (2.0 * beta * (mu - lambda)).exp())
            .ln_1p()
                / beta;
            assert_relative_eq!(normal_branch_pressure(&p), closed, max_relative = 1e-13);
        }
    }

    #[test]
    fn pressure_reference_point() {
        // frozen from the 50-digit scan oracle
        let p = pt(7.0, 1.0, 0.575, 2.6, 0.0);
        let gs = solve_gap_default(&p).unwrap();
        assert_relative_eq!(pressure(&p, &gs), 1.146358180601752, max_relative = 1e-13);
    }

    #[test]
    fn density_is_one_at_half_filling() {
        for beta in [0.5, 3.0, 40.0] {
            let p = pt(beta, 0.7, 0.7, 2.6, 0.2);
            assert_eq!(electron_density(&p, 0.0), 1.0);
            assert_eq!(electron_density(&p, 0.2), 1.0);
        }
    }

    #[test]
    fn linear_density_law_in_superconducting_phase() {
        let p = pt(7.0, 1.0, 0.575, 2.6, 0.0);
        let gs = solve_gap_default(&p).unwrap();
        assert!(gs.r_beta > 0.0);
        let d = electron_density(&p, gs.r_beta);
        assert_relative_eq!(
            d,
            1.0 + 2.0 * p.detuning() / p.gamma,
            max_relative = 1e-12
        );
    }

    #[test]
    fn normal_branch_density_matches_pressure_derivative() {
        // central difference of the r = 0 branch pressure in mu, step 1e-6
        let p = pt(7.0, 1.0, 0.575, 2.6, 0.0);
        let d = electron_density(&p, 0.0);
        let step = 1e-6;
        let up = normal_branch_pressure(&pt(7.0, 1.0 + step, 0.575, 2.6, 0.0));
        let dn = normal_branch_pressure(&pt(7.0, 1.0 - step, 0.575, 2.6, 0.0));
        assert_relative_eq!(d, (up - dn) / (2.0 * step), max_relative = 1e-8);
    }

    #[test]
    fn magnetization_zero_field_and_two_closed_forms() {
        let p = pt(7.0, 1.0, 0.575, 2.6, 0.0);
        assert_eq!(magnetization(&p, 0.1), 0.0);

        // with r > 0 the theorem form and the gap-equation form
        // m = 2 g e^{lb} sinh(bh) / (gamma sinh(bg)) agree
        let p = pt(7.0, 1.0, 0.575, 2.6, 0.1);
        let gs = solve_gap_default(&p).unwrap();
        assert!(gs.r_beta > 0.0);
        let m1 = magnetization(&p, gs.r_beta);
        let g = gap_energy(gs.r_beta, &p);
        let m2 = 2.0 * g * (p.beta * p.h).sinh() * (p.lambda * p.beta).exp()
            / (p.gamma * (p.beta * g).sinh());
        assert_relative_eq!(m1, m2, max_relative = 1e-10);
    }

    #[test]
    fn coulomb_correlation_continuous_at_h_zero() {
        let w0 = coulomb_correlation(&pt(7.0, 1.0, 0.575, 2.6, 0.0), 0.05);
        let w1 = coulomb_correlation(&pt(7.0, 1.0, 0.575, 2.6, 1e-9), 0.05);
        assert!((w0 - w1).abs() < 1e-8);
    }

    #[test]
    fn coulomb_correlation_low_temperature_limits() {
        // superconducting: w -> d/2
        let p = pt(200.0, 1.0, 0.575, 2.6, 0.0);
        let gs = solve_gap_default(&p).unwrap();
        assert!(gs.r_beta > 0.0);
        let d = electron_density(&p, gs.r_beta);
        let w = coulomb_correlation(&p, gs.r_beta);
        assert_relative_eq!(w, d / 2.0, epsilon = 1e-10);

        // normal branch with |mu-lambda| < lambda + |h|: w -> 0
        let p = pt(200.0, 0.5, 0.575, 1.0, 0.0);
        assert!(solve_gap_default(&p).unwrap().r_beta == 0.0);
        assert!(coulomb_correlation(&p, 0.0) < 1e-12);
        assert!(coulomb_correlation(&p, 0.0) > 0.0);
    }

    #[test]
    fn mean_energy_linear_form() {
        let z = DensityVector {
            d: 0.0,
            m: 0.0,
            w: 0.0,
        };
        assert_eq!(mean_energy(&pt(1.0, 0.3, 0.2, 1.0, 0.1), &z, 0.0), 0.0);

        // zero-T superconducting limit: -gamma/4 + (lambda-mu)(1 + (mu-lambda)/gamma)
        let p = pt(500.0, 1.0, 0.575, 2.6, 0.0);
        let sets = observable_set(&p).unwrap();
        assert_eq!(sets.len(), 1);
        let expect = -p.gamma / 4.0 + (p.lambda - p.mu) * (1.0 + p.detuning() / p.gamma);
        assert_relative_eq!(sets[0].energy_per_site, expect, epsilon = 1e-10);
    }

    #[test]
    fn mean_energy_matches_beta_derivative_of_beta_pressure() {
        // eps = -d(beta p)/d(beta) on a transition-free interval
        let base = pt(7.0, 1.0, 0.575, 2.6, 0.0);
        let sets = observable_set(&base).unwrap();
        let step = 1e-6;
        let bp = |beta: f64| {
            let p = pt(beta, 1.0, 0.575, 2.6, 0.0);
            beta * pressure(&p, &solve_gap_default(&p).unwrap())
        };
        let eps_fd = -(bp(base.beta + step) - bp(base.beta - step)) / (2.0 * step);
        assert_relative_eq!(sets[0].energy_per_site, eps_fd, max_relative = 1e-7);
    }

    #[test]
    fn observable_set_branch_count() {
        let one = observable_set(&pt(7.0, 1.0, 0.575, 2.6, 0.0)).unwrap();
        assert_eq!(one.len(), 1);
        // second-order onset: single set with r = 0 just below beta_c
        let below = observable_set(&pt(2.0, 1.0, 0.0, 2.6, 0.0)).unwrap();
        assert_eq!(below.len(), 1);
        assert_eq!(below[0].r, 0.0);
    }

    #[test]
    fn specific_heat_matches_five_point_stencil_in_smooth_region() {
        // moderate beta, transition-free: high-order FD of eps is accurate
        let p = pt(4.0, 1.0, 0.3, 2.6, 0.0);
        let eps = |beta: f64| {
            let q = pt(beta, 1.0, 0.3, 2.6, 0.0);
            let gs = solve_gap_default(&q).unwrap();
            let sets = observable_set(&q).unwrap();
            assert!(!gs.is_critical);
            sets.last().unwrap().energy_per_site
        };
        let hstep = 1e-3;
        let b = p.beta;
        let deriv = (-eps(b + 2.0 * hstep) + 8.0 * eps(b + hstep) - 8.0 * eps(b - hstep)
            + eps(b - 2.0 * hstep))
            / (12.0 * hstep);
        let c_fd = -b * b * deriv;
        match specific_heat(&p, 1e-4 * b).unwrap() {
            SpecificHeat::Value(c) => assert_relative_eq!(c, c_fd, max_relative = 1e-4),
            other => panic!("expected a value, got {other:?}"),
        }
    }

    #[test]
    fn specific_heat_normal_branch_stencil() {
        let p = pt(2.0, 0.4, 0.6, 1.2, 0.25);
        assert_eq!(solve_gap_default(&p).unwrap().r_beta, 0.0);
        let eps = |beta: f64| {
            let q = pt(beta, 0.4, 0.6, 1.2, 0.25);
            observable_set(&q).unwrap()[0].energy_per_site
        };
        let hstep = 1e-3;
        let deriv = (-eps(2.0 + 2.0 * hstep) + 8.0 * eps(2.0 + hstep) - 8.0 * eps(2.0 - hstep)
            + eps(2.0 - 2.0 * hstep))
            / (12.0 * hstep);
        match specific_heat(&p, 2e-4).unwrap() {
            SpecificHeat::Value(c) => {
                assert_relative_eq!(c, -4.0 * deriv, max_relative = 1e-4)
            }
            other => panic!("expected a value, got {other:?}"),
        }
    }

    #[test]
    fn specific_heat_reports_first_order_jump() {
        // first-order transition at beta_c = 5.8901 for lambda = 0.575
        let p = pt(5.8901, 1.0, 0.575, 2.6, 0.0);
        match specific_heat(&p, 0.01).unwrap() {
            SpecificHeat::Discontinuous(rep) => {
                assert!(rep.r_jump > 0.1);
                assert!(rep.energy_plus < rep.energy_minus);
            }
            other => panic!("expected a discontinuity, got {other:?}"),
        }
    }

    #[test]
    fn specific_heat_gap_asymptote() {
        // the true low-temperature law: c ~ (gamma - 2 lambda)^2/2 beta^2
        // e^{-beta(gamma/2 - lambda)}, the lowest excitation being a broken
        // pair at energy g - lambda (verified against 50-digit central
        // differences of the closed-form mean energy)
        let (mu, lambda, gamma) = (1.0, 0.3, 2.6);
        for &beta in &[12.0, 16.0] {
            let p = pt(beta, mu, lambda, gamma, 0.0);
            let c = match specific_heat(&p, 1e-4 * beta).unwrap() {
                SpecificHeat::Value(c) => c,
                other => panic!("expected a value, got {other:?}"),
            };
            let asym = 0.5 * (gamma - 2.0 * lambda).powi(2)
                * beta
                * beta
                * (-beta * (gamma / 2.0 - lambda)).exp();
            assert_relative_eq!(c, asym, max_relative = 2e-3 * beta.max(12.0) / 12.0);
        }
        // frozen 50-digit reference at beta = 12
        let p = pt(12.0, mu, lambda, gamma, 0.0);
        if let SpecificHeat::Value(c) = specific_heat(&p, 1.2e-3).unwrap() {
            assert_relative_eq!(c, 1.77011182226e-3, max_relative = 1e-8);
        } else {
            panic!("expected value");
        }
    }
}
