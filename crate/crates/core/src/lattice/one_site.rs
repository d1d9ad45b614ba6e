//! The one-site Gibbs state of the c-approximating Hamiltonian and the
//! Cooper-field fluctuations it carries.

use crate::params::ModelParams;
use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

type C64 = Complex64;

/// Expectations of the one-site Gibbs state associated with the
/// c-approximating Hamiltonian
/// `H_1(c) = -mu n - h(n_up - n_down) + 2 lambda n_up n_down - gamma(c b^* + conj(c) b)`
/// where b = a_down a_up annihilates the on-site pair.
#[derive(Debug, Clone)]
pub struct OneSiteState {
    pub c: C64,
    pub n_up: f64,
    pub n_down: f64,
    /// n_up n_down expectation (double occupancy).
    pub double_occupancy: f64,
    /// Pair expectation zeta_c(b); equals c at self-consistency.
    pub pair: C64,
    /// Cooper field quadratures Phi = b^* + b and Psi = i(b^* - b).
    pub phi: f64,
    pub psi: f64,
    pub phi_sq: f64,
    pub psi_sq: f64,
    /// The 4x4 density matrix in the basis {empty, up, down, up+down}.
    pub density_matrix: Array2<C64>,
    /// (1/beta) ln Trace e^{-beta H_1(c)}.
    pub log_pressure: f64,
}

fn pair_annihilator() -> Array2<C64> {
    let mut b = Array2::zeros((4, 4));
    b[(0, 3)] = C64::new(1.0, 0.0);
    b
}

fn one_site_hamiltonian(c: C64, p: &ModelParams) -> Array2<C64> {
    let mut h = Array2::zeros((4, 4));
    h[(1, 1)] = C64::new(-p.mu - p.h, 0.0);
    h[(2, 2)] = C64::new(-p.mu + p.h, 0.0);
    h[(3, 3)] = C64::new(-2.0 * p.mu + 2.0 * p.lambda, 0.0);
    // -gamma (c b^dagger + conj(c) b)
    h[(3, 0)] = -p.gamma * c;
    h[(0, 3)] = -p.gamma * c.conj();
    h
}

fn expect(rho: &Array2<C64>, op: &Array2<C64>) -> C64 {
    op.dot(rho).diag().sum()
}

/// Build the one-site Gibbs state for order parameter c: exponentiate the
/// 4x4 Hamiltonian (max-shifted), normalize, and evaluate every monomial the
/// analysis uses.
pub fn one_site_state(c: C64, p: &ModelParams) -> OneSiteState {
    let ham = one_site_hamiltonian(c, p);
    let (evals, evecs) = ham.eigh(UPLO::Lower).expect("4x4 eigendecomposition");
    let e_min = evals.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = evals.iter().map(|&e| (-p.beta * (e - e_min)).exp()).collect();
    let z: f64 = weights.iter().sum();

    let mut rho = Array2::<C64>::zeros((4, 4));
    for (k, &w) in weights.iter().enumerate() {
        let v = evecs.column(k);
        for i in 0..4 {
            for j in 0..4 {
                rho[(i, j)] += v[i] * v[j].conj() * C64::new(w / z, 0.0);
            }
        }
    }

    let b = pair_annihilator();
    let b_dag = b.t().mapv(|x| x.conj());
    let phi_op = &b_dag + &b;
    let psi_op = (&b_dag - &b).mapv(|x| x * C64::new(0.0, 1.0));
    let mut n_up = Array2::<C64>::zeros((4, 4));
    n_up[(1, 1)] = C64::new(1.0, 0.0);
    n_up[(3, 3)] = C64::new(1.0, 0.0);
    let mut n_down = Array2::<C64>::zeros((4, 4));
    n_down[(2, 2)] = C64::new(1.0, 0.0);
    n_down[(3, 3)] = C64::new(1.0, 0.0);
    let mut n_updown = Array2::<C64>::zeros((4, 4));
    n_updown[(3, 3)] = C64::new(1.0, 0.0);

    OneSiteState {
        c,
        n_up: expect(&rho, &n_up).re,
        n_down: expect(&rho, &n_down).re,
        double_occupancy: expect(&rho, &n_updown).re,
        pair: expect(&rho, &b),
        phi: expect(&rho, &phi_op).re,
        psi: expect(&rho, &psi_op).re,
        phi_sq: expect(&rho, &phi_op.dot(&phi_op)).re,
        psi_sq: expect(&rho, &psi_op.dot(&psi_op)).re,
        density_matrix: rho,
        log_pressure: (z.ln() - p.beta * e_min) / p.beta,
    }
}

/// Pressure of the c-approximating Hamiltonian, p(c); the infinite-volume
/// pressure is sup_c { -gamma |c|^2 + p(c) }.
pub fn approximating_pressure(c: C64, p: &ModelParams) -> f64 {
    one_site_state(c, p).log_pressure
}

/// Variances of the Cooper field quadratures in the one-site state.
/// At a self-consistent maximizer both are bounded by 2/(gamma beta).
pub fn cooper_field_fluctuation(c: C64, p: &ModelParams) -> (f64, f64) {
    let st = one_site_state(c, p);
    (st.phi_sq - st.phi * st.phi, st.psi_sq - st.psi * st.psi)
}
