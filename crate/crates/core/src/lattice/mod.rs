//! Exact small-lattice oracle: full diagonalization of the N-site
//! Hamiltonian, thermal expectations, and Bogoliubov quasi-averages under
//! the U(1)-breaking perturbation.

mod fermion;
mod one_site;

pub use one_site::{approximating_pressure, cooper_field_fluctuation, one_site_state, OneSiteState};

use crate::params::{DensityVector, ModelParams};
use fermion::{apply_pair_annihilator, apply_pair_creator, site_occupation};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

type C64 = Complex64;

/// Dense diagonalization is capped at six sites (state space 4^6 = 4096).
pub const MAX_SITES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice size {0} exceeds the supported maximum of {MAX_SITES} sites")]
    DimensionTooLarge(usize),
    #[error("eigendecomposition failed")]
    Eigen,
}

/// Exact N-site grand-canonical quantities from the thermal Gibbs state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteLatticeResult {
    pub n_sites: usize,
    /// p_N = ln Trace(e^{-beta H_N}) / (beta N).
    pub pressure_n: f64,
    /// Cooper pair condensate density omega_N(c0^* c0)/N.
    pub condensate_n: f64,
    pub densities: DensityVector,
    pub energy_per_site: f64,
}

fn check_size(n: usize) -> Result<(), LatticeError> {
    if n == 0 || n > MAX_SITES {
        Err(LatticeError::DimensionTooLarge(n))
    } else {
        Ok(())
    }
}

/// Diagonal part of H_N per basis state.
fn diagonal_energies(n: usize, p: &ModelParams) -> Vec<f64> {
    let dim = 1usize << (2 * n);
    (0..dim)
        .map(|s| {
            let mut e = 0.0;
            for x in 0..n {
                let (nu, nd) = site_occupation(x, s);
                e += -p.mu * (nu + nd) as f64 - p.h * (nu as f64 - nd as f64)
                    + 2.0 * p.lambda * (nu * nd) as f64;
            }
            e
        })
        .collect()
}

/// Sparse action of P = sum_x b_x (total pair annihilator): for each basis
/// state, the list of (target, site) images. All amplitudes are +1.
struct PairOperator {
    n: usize,
    images: Vec<Vec<usize>>,
}

impl PairOperator {
    fn build(n: usize) -> Self {
        let dim = 1usize << (2 * n);
        let images = (0..dim)
            .map(|s| {
                (0..n)
                    .filter_map(|x| apply_pair_annihilator(x, s))
                    .collect()
            })
            .collect();
        Self { n, images }
    }

    /// u += P v.
    fn apply(&self, v: &[f64], u: &mut [f64]) {
        for (s, tgts) in self.images.iter().enumerate() {
            for &t in tgts {
                u[t] += v[s];
            }
        }
    }

    fn apply_c(&self, v: &[C64], u: &mut [C64]) {
        for (s, tgts) in self.images.iter().enumerate() {
            for &t in tgts {
                u[t] += v[s];
            }
        }
    }
}

/// Assemble the dense N-site Hamiltonian in the occupation basis. The BCS
/// term -(gamma/N) sum_{x,y} b_x^dagger b_y is built from the pair-hop
/// images; every amplitude is +1 because the Jordan-Wigner strings of an
/// on-site pair cancel.
pub fn hamiltonian(n: usize, p: &ModelParams) -> Result<Array2<f64>, LatticeError> {
    check_size(n)?;
    let dim = 1usize << (2 * n);
    let mut h = Array2::<f64>::zeros((dim, dim));
    for (s, &e) in diagonal_energies(n, p).iter().enumerate() {
        h[(s, s)] = e;
    }
    let coupling = p.gamma / n as f64;
    for s in 0..dim {
        for x in 0..n {
            if let Some(t) = apply_pair_annihilator(x, s) {
                for y in 0..n {
                    if let Some(u) = apply_pair_creator(y, t) {
                        h[(u, s)] -= coupling;
                    }
                }
            }
        }
    }
    Ok(h)
}

struct ThermalState {
    evals: Array1<f64>,
    evecs: Array2<f64>,
    weights: Vec<f64>,
    z: f64,
    e_min: f64,
}

fn thermalize(h: Array2<f64>, beta: f64) -> Result<ThermalState, LatticeError> {
    let (evals, evecs) = h.eigh(UPLO::Lower).map_err(|_| LatticeError::Eigen)?;
    let e_min = evals.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = evals.iter().map(|&e| (-beta * (e - e_min)).exp()).collect();
    let z = weights.iter().sum();
    Ok(ThermalState {
        evals,
        evecs,
        weights,
        z,
        e_min,
    })
}

impl ThermalState {
    /// Expectation of a diagonal observable given per-state values.
    fn expect_diagonal(&self, values: &[f64]) -> f64 {
        let dim = self.evals.len();
        let mut acc = 0.0;
        for k in 0..dim {
            if self.weights[k] == 0.0 {
                continue;
            }
            let v = self.evecs.column(k);
            let mut o = 0.0;
            for s in 0..dim {
                o += v[s] * v[s] * values[s];
            }
            acc += self.weights[k] * o;
        }
        acc / self.z
    }

    /// omega(P^dagger P) for the total pair annihilator.
    fn expect_pair_number(&self, pair: &PairOperator) -> f64 {
        let dim = self.evals.len();
        let mut acc = 0.0;
        let mut u = vec![0.0; dim];
        for k in 0..dim {
            if self.weights[k] == 0.0 {
                continue;
            }
            u.iter_mut().for_each(|x| *x = 0.0);
            let v = self.evecs.column(k);
            pair.apply(v.as_slice().expect("contiguous column"), &mut u);
            acc += self.weights[k] * u.iter().map(|x| x * x).sum::<f64>();
        }
        acc / self.z
    }

    /// omega(b_a^dagger b_b) between two fixed sites.
    fn expect_pair_hop(&self, site_a: usize, site_b: usize) -> f64 {
        let dim = self.evals.len();
        let mut acc = 0.0;
        for k in 0..dim {
            if self.weights[k] == 0.0 {
                continue;
            }
            let v = self.evecs.column(k);
            let mut o = 0.0;
            for s in 0..dim {
                if let Some(t) = apply_pair_annihilator(site_b, s) {
                    if let Some(u) = apply_pair_creator(site_a, t) {
                        o += v[u] * v[s];
                    }
                }
            }
            acc += self.weights[k] * o;
        }
        acc / self.z
    }
}

/// Exact pressure and one-site densities of the N-site Gibbs state.
pub fn finite_pressure(n: usize, p: &ModelParams) -> Result<FiniteLatticeResult, LatticeError> {
    check_size(n)?;
    let dim = 1usize << (2 * n);
    let ts = thermalize(hamiltonian(n, p)?, p.beta)?;
    let pressure_n = (ts.z.ln() - p.beta * ts.e_min) / (p.beta * n as f64);

    let per_site = |f: &dyn Fn(u32, u32) -> f64| -> Vec<f64> {
        (0..dim)
            .map(|s| {
                (0..n)
                    .map(|x| {
                        let (nu, nd) = site_occupation(x, s);
                        f(nu, nd)
                    })
                    .sum()
            })
            .collect()
    };
    let d = ts.expect_diagonal(&per_site(&|nu, nd| (nu + nd) as f64)) / n as f64;
    let m = ts.expect_diagonal(&per_site(&|nu, nd| nu as f64 - nd as f64)) / n as f64;
    let w = ts.expect_diagonal(&per_site(&|nu, nd| (nu * nd) as f64)) / n as f64;

    let pair = PairOperator::build(n);
    let condensate_n = ts.expect_pair_number(&pair) / (n * n) as f64;

    let mut energy = 0.0;
    for k in 0..dim {
        energy += ts.weights[k] * ts.evals[k];
    }
    energy /= ts.z * n as f64;

    Ok(FiniteLatticeResult {
        n_sites: n,
        pressure_n,
        condensate_n,
        densities: DensityVector { d, m, w },
        energy_per_site: energy,
    })
}

/// omega_N(c0^* c0)/N, the finite-lattice Cooper pair condensate density.
pub fn finite_condensate(n: usize, p: &ModelParams) -> Result<f64, LatticeError> {
    Ok(finite_pressure(n, p)?.condensate_n)
}

/// omega(b_a^dagger b_b) for two fixed sites of the unperturbed Gibbs state;
/// by permutation invariance the value is independent of the distinct pair
/// chosen.
pub fn pair_correlation(
    n: usize,
    p: &ModelParams,
    site_a: usize,
    site_b: usize,
) -> Result<f64, LatticeError> {
    check_size(n)?;
    if site_a >= n || site_b >= n {
        return Err(LatticeError::DimensionTooLarge(site_a.max(site_b)));
    }
    let ts = thermalize(hamiltonian(n, p)?, p.beta)?;
    Ok(ts.expect_pair_hop(site_a, site_b))
}

/// Bogoliubov quasi-average omega_{N,alpha,phi}((1/N) sum_x b_x) under the
/// symmetry-breaking perturbation
/// `H_{N,alpha,phi} = H_N - alpha sum_x (e^{-i phi} b_x + e^{i phi} b_x^dagger)`.
///
/// For phases with sin(phi) = 0 the Hamiltonian stays real symmetric and a
/// real solve is used; otherwise the full complex Hermitian problem is
/// solved.
pub fn quasi_average(
    n: usize,
    alpha: f64,
    phi: f64,
    p: &ModelParams,
) -> Result<C64, LatticeError> {
    check_size(n)?;
    let dim = 1usize << (2 * n);
    let pair = PairOperator::build(n);

    if phi.sin() == 0.0 {
        let sign = phi.cos().signum();
        let mut h = hamiltonian(n, p)?;
        for (s, tgts) in pair.images.iter().enumerate() {
            for &t in tgts {
                h[(t, s)] -= alpha * sign;
                h[(s, t)] -= alpha * sign;
            }
        }
        let ts = thermalize(h, p.beta)?;
        let mut acc = 0.0;
        let mut u = vec![0.0; dim];
        for k in 0..dim {
            if ts.weights[k] == 0.0 {
                continue;
            }
            u.iter_mut().for_each(|x| *x = 0.0);
            let v = ts.evecs.column(k);
            pair.apply(v.as_slice().expect("contiguous column"), &mut u);
            let o: f64 = v.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
            acc += ts.weights[k] * o;
        }
        return Ok(C64::new(acc / (ts.z * n as f64), 0.0));
    }

    let e_phi = C64::from_polar(1.0, phi);
    let mut h = hamiltonian(n, p)?.mapv(C64::from);
    for (s, tgts) in pair.images.iter().enumerate() {
        for &t in tgts {
            // -alpha e^{-i phi} b contributes at (t, s); Hermitian partner at (s, t)
            h[(t, s)] -= alpha * e_phi.conj();
            h[(s, t)] -= alpha * e_phi;
        }
    }
    let (evals, evecs) = h.eigh(UPLO::Lower).map_err(|_| LatticeError::Eigen)?;
    let e_min = evals.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = evals.iter().map(|&e| (-p.beta * (e - e_min)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let mut acc = C64::new(0.0, 0.0);
    let mut u = vec![C64::new(0.0, 0.0); dim];
    for k in 0..dim {
        if weights[k] == 0.0 {
            continue;
        }
        u.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        let v = evecs.column(k);
        pair.apply_c(v.as_slice().expect("contiguous column"), &mut u);
        let o: C64 = v.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum();
        acc += weights[k] * o;
    }
    Ok(acc / (z * n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_energy::solve_gap_default;
    use crate::observables::pressure;
    use approx::assert_relative_eq;

    fn pt(beta: f64, mu: f64, lambda: f64, gamma: f64, h: f64) -> ModelParams {
        ModelParams::new(beta, mu, lambda, gamma, h).unwrap()
    }

    #[test]
    fn rejects_oversized_lattice() {
        let p = pt(1.0, 0.0, 0.0, 1.0, 0.0);
        assert!(matches!(
            finite_pressure(7, &p),
            Err(LatticeError::DimensionTooLarge(7))
        ));
    }

    #[test]
    fn hamiltonian_is_symmetric_and_number_conserving() {
        let p = pt(2.0, 0.4, 0.3, 1.7, 0.2);
        let h = hamiltonian(3, &p).unwrap();
        let dim = h.nrows();
        for s in 0..dim {
            for t in 0..dim {
                assert_eq!(h[(s, t)], h[(t, s)]);
                if h[(s, t)] != 0.0 {
                    let count = |state: usize| (state as u32).count_ones();
                    assert_eq!(count(s), count(t), "H mixes particle numbers");
                }
            }
        }
    }

    #[test]
    fn frozen_singles_block_structure() {
        // the set of singly-occupied sites (and their spins) is conserved
        let p = pt(2.0, 0.4, 0.3, 1.7, 0.2);
        let n = 3;
        let h = hamiltonian(n, &p).unwrap();
        let signature = |state: usize| -> usize {
            let mut sig = 0usize;
            for x in 0..n {
                let code = match site_occupation(x, state) {
                    (0, 0) | (1, 1) => 0,
                    (1, 0) => 1,
                    (0, 1) => 2,
                    _ => unreachable!(),
                };
                sig |= code << (2 * x);
            }
            sig
        };
        let dim = h.nrows();
        for s in 0..dim {
            for t in 0..dim {
                if s != t && h[(s, t)] != 0.0 {
                    assert_eq!(signature(s), signature(t));
                }
            }
        }
        // block dimensions: choosing k pairable sites leaves 2^k states per
        // (singles set, spin assignment): check the total count
        let mut by_sig = std::collections::HashMap::new();
        for s in 0..dim {
            *by_sig.entry(signature(s)).or_insert(0usize) += 1;
        }
        for (sig, count) in by_sig {
            let pairable = (0..n).filter(|x| (sig >> (2 * x)) & 3 == 0).count();
            assert_eq!(count, 1 << pairable);
        }
    }

    #[test]
    fn single_site_closed_form() {
        // 4 levels: 0, -mu-h, -mu+h, -2mu+2lambda-gamma
        let p = pt(1.7, 0.8, 0.3, 1.9, 0.25);
        let res = finite_pressure(1, &p).unwrap();
        let z = 1.0
            + (p.beta * (p.mu + p.h)).exp()
            + (p.beta * (p.mu - p.h)).exp()
            + (p.beta * (2.0 * p.mu - 2.0 * p.lambda + p.gamma)).exp();
        assert_relative_eq!(res.pressure_n, z.ln() / p.beta, max_relative = 1e-13);
    }

    #[test]
    fn block_solve_matches_dense() {
        // independent route: diagonalize each frozen-singles block separately
        let p = pt(3.0, 0.7, 0.45, 2.2, 0.15);
        let n = 3;
        let dim = 1usize << (2 * n);
        let h = hamiltonian(n, &p).unwrap();
        let signature = |state: usize| -> usize {
            let mut sig = 0usize;
            for x in 0..n {
                let code = match site_occupation(x, state) {
                    (0, 0) | (1, 1) => 0,
                    (1, 0) => 1,
                    (0, 1) => 2,
                    _ => unreachable!(),
                };
                sig |= code << (2 * x);
            }
            sig
        };
        let mut by_sig: std::collections::HashMap<usize, Vec<usize>> = Default::default();
        for s in 0..dim {
            by_sig.entry(signature(s)).or_default().push(s);
        }
        let mut all_evals: Vec<f64> = Vec::with_capacity(dim);
        for states in by_sig.values() {
            let b = states.len();
            let mut hb = Array2::<f64>::zeros((b, b));
            for (i, &s) in states.iter().enumerate() {
                for (j, &t) in states.iter().enumerate() {
                    hb[(i, j)] = h[(s, t)];
                }
            }
            let (evals, _) = hb.eigh(UPLO::Lower).unwrap();
            all_evals.extend(evals.iter());
        }
        let e_min = all_evals.iter().cloned().fold(f64::INFINITY, f64::min);
        let z: f64 = all_evals.iter().map(|&e| (-p.beta * (e - e_min)).exp()).sum();
        let p_blocked = (z.ln() - p.beta * e_min) / (p.beta * n as f64);
        let dense = finite_pressure(n, &p).unwrap().pressure_n;
        assert_relative_eq!(p_blocked, dense, epsilon = 1e-10);
    }

    #[test]
    fn pressure_decreases_toward_infinite_volume() {
        let p = pt(2.0, 1.0, 0.0, 2.6, 0.0);
        let gs = solve_gap_default(&p).unwrap();
        let p_inf = pressure(&p, &gs);
        let mut last = f64::INFINITY;
        for n in [2, 3, 4] {
            let res = finite_pressure(n, &p).unwrap();
            assert!(res.pressure_n >= p_inf - 1e-12, "variational lower bound");
            assert!(res.pressure_n < last);
            last = res.pressure_n;
        }
    }

    #[test]
    fn finite_condensate_trends() {
        // normal phase: small and shrinking; superconducting: approaches r_beta
        let normal = pt(1.0, 1.0, 0.0, 2.6, 0.0);
        let c2 = finite_condensate(2, &normal).unwrap();
        let c4 = finite_condensate(4, &normal).unwrap();
        assert!(c4 < c2);

        let sc = pt(30.0, 1.0, 0.0, 2.6, 0.0);
        let r = solve_gap_default(&sc).unwrap().r_beta;
        let c2 = finite_condensate(2, &sc).unwrap();
        let c4 = finite_condensate(4, &sc).unwrap();
        assert!((c4 - r).abs() < (c2 - r).abs());
    }

    #[test]
    fn single_site_condensate_is_double_occupancy() {
        let p = pt(2.5, 0.6, 0.2, 1.4, 0.1);
        let res = finite_pressure(1, &p).unwrap();
        assert_relative_eq!(res.condensate_n, res.densities.w, max_relative = 1e-12);
    }

    #[test]
    fn pair_correlation_site_independent() {
        let p = pt(4.0, 1.0, 0.3, 2.6, 0.1);
        let g01 = pair_correlation(4, &p, 0, 1).unwrap();
        let g23 = pair_correlation(4, &p, 2, 3).unwrap();
        let g31 = pair_correlation(4, &p, 3, 1).unwrap();
        assert_relative_eq!(g01, g23, epsilon = 1e-12);
        assert_relative_eq!(g01, g31, epsilon = 1e-12);
    }

    #[test]
    fn quasi_average_gauge_behavior() {
        let p = pt(6.0, 1.0, 0.0, 2.6, 0.0);
        // alpha = 0: the trace is U(1)-invariant and the average vanishes
        let qa0 = quasi_average(3, 0.0, 0.0, &p).unwrap();
        assert!(qa0.norm() < 1e-10);

        // the perturbed average is real-positive at phi = 0 and rotates by
        // e^{i phi}
        let qa = quasi_average(3, 0.08, 0.0, &p).unwrap();
        assert!(qa.re > 0.0 && qa.im.abs() < 1e-10);
        let phi = std::f64::consts::FRAC_PI_3;
        let qrot = quasi_average(3, 0.08, phi, &p).unwrap();
        assert_relative_eq!(qrot.norm(), qa.re, max_relative = 1e-10);
        assert_relative_eq!(qrot.arg(), phi, epsilon = 1e-10);
    }
}
