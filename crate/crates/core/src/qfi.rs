//! Quantum Fisher information for time estimation along a trajectory (hbar = 1).

use num_complex::Complex64;

use crate::channels::{evolve, ChannelDescriptor};
use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix};
use crate::states::{bures_fidelity, DensityOperator};

/// Default cutoff on `p_j + p_k` in the SLD denominator.
pub const SLD_RANK_TOL: f64 = 1e-10;

/// `t -> rho(t)` for a channel applied to a fixed initial state on `[0, t_max]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub channel: ChannelDescriptor,
    pub state0: DensityOperator,
    pub t_max: f64,
}

impl Trajectory {
    pub fn new(channel: ChannelDescriptor, state0: DensityOperator, t_max: f64) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::DomainError(format!("t_max must be positive, got {t_max}")));
        }
        // surfaces dimension errors at construction
        evolve(&channel, &state0, 0.0)?;
        Ok(Self { channel, state0, t_max })
    }

    pub fn evaluate(&self, t: f64) -> Result<DensityOperator> {
        evolve(&self.channel, &self.state0, t)
    }

    /// Default central-difference step at `t`.
    pub fn default_step(t: f64) -> f64 {
        1e-5 * t.abs().max(1.0)
    }
}

/// SLD and QFI at one instant.
#[derive(Debug, Clone)]
pub struct SldResult {
    pub sld: ComplexMatrix,
    pub qfi: f64,
}

/// Knobs for [`sld_and_qfi_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SldOptions {
    /// Central-difference step; `None` uses [`Trajectory::default_step`].
    pub step: Option<f64>,
    pub rank_tol: f64,
    /// Skip the `[0, t_max]` margin check.
    pub unchecked_domain: bool,
}

impl Default for SldOptions {
    fn default() -> Self {
        Self {
            step: None,
            rank_tol: SLD_RANK_TOL,
            unchecked_domain: false,
        }
    }
}

fn derivative(tr: &Trajectory, t: f64, h: f64, check: bool) -> Result<ComplexMatrix> {
    if t - h < 0.0 || (check && t + h > tr.t_max) {
        return Err(Error::DomainEdge { t, margin: h });
    }
    let plus = tr.evaluate(t + h)?;
    let minus = tr.evaluate(t - h)?;
    Ok((plus.matrix() - minus.matrix()).scale_real(0.5 / h).hermitian_part())
}

/// `d rho / dt` by central differences with the default step.
pub fn state_derivative(tr: &Trajectory, t: f64) -> Result<ComplexMatrix> {
    derivative(tr, t, Trajectory::default_step(t), true)
}

/// SLD from `rho` and `d rho / dt` in the eigenbasis of `rho`.
pub fn sld_from_derivative(rho: &DensityOperator, drho: &ComplexMatrix, rank_tol: f64) -> Result<SldResult> {
    let eig = eigh(rho.matrix())?;
    let v = &eig.eigenvectors;
    let p = &eig.eigenvalues;
    let n = p.len();
    // D = V^dagger drho V
    let d = v.adjoint().matmul(drho).matmul(v);
    let mut l_eig = ComplexMatrix::zeros(n);
    for j in 0..n {
        for k in 0..n {
            let denom = p[j] + p[k];
            if denom >= rank_tol {
                l_eig[(j, k)] = d[(j, k)] * (2.0 / denom);
            }
        }
    }
    // Tr[rho L^2] = sum_jk p_j |L_jk|^2
    let mut qfi = 0.0;
    for j in 0..n {
        for k in 0..n {
            qfi += p[j].max(0.0) * l_eig[(j, k)].norm_sqr();
        }
    }
    let sld = v.matmul(&l_eig).matmul(&v.adjoint()).hermitian_part();
    Ok(SldResult { sld, qfi })
}

pub fn sld_and_qfi(tr: &Trajectory, t: f64) -> Result<SldResult> {
    sld_and_qfi_with(tr, t, SldOptions::default())
}

pub fn sld_and_qfi_with(tr: &Trajectory, t: f64, opts: SldOptions) -> Result<SldResult> {
    let h = opts.step.unwrap_or_else(|| Trajectory::default_step(t));
    let drho = derivative(tr, t, h, !opts.unchecked_domain)?;
    let rho = tr.evaluate(t)?;
    sld_from_derivative(&rho, &drho, opts.rank_tol)
}

/// `4 (1 - F_B(rho(t), rho(t + dt))) / dt^2`.
pub fn qfi_from_fidelity(tr: &Trajectory, t: f64, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::DomainError(format!("dt must be positive, got {dt}")));
    }
    if t < 0.0 || t + dt > tr.t_max {
        return Err(Error::DomainEdge { t, margin: dt });
    }
    let f = bures_fidelity(&tr.evaluate(t)?, &tr.evaluate(t + dt)?)?;
    Ok(4.0 * (1.0 - f) / (dt * dt))
}

/// `4 <Delta H^2>` of a Hermitian generator in a state.
pub fn variance_qfi(rho: &DensityOperator, h: &ComplexMatrix) -> f64 {
    let mean = rho.expectation(h);
    let h2 = h.matmul(h);
    4.0 * (rho.expectation(&h2) - mean * mean)
}

/// `-i[H, rho]`.
pub fn commutator_derivative(h: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let c = &h.matmul(rho) - &rho.matmul(h);
    c.scale(Complex64::new(0.0, -1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_x, pauli_z};
    use crate::states::{random_density, PurityClass};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn rabi(omega: f64) -> (ComplexMatrix, Trajectory) {
        let h = pauli_x().scale_real(omega / 2.0);
        let ch = ChannelDescriptor::hamiltonian(&h).unwrap();
        let tr = Trajectory::new(ch, DensityOperator::basis(2, 0).unwrap(), 20.0).unwrap();
        (h, tr)
    }

    fn equatorial() -> DensityOperator {
        DensityOperator::pure(&[Complex64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap()
    }

    #[test]
    fn stationary_state_has_no_speed() {
        let ch = ChannelDescriptor::dephasing(1.0, 0.0);
        let tr = Trajectory::new(ch, DensityOperator::basis(2, 0).unwrap(), 5.0).unwrap();
        for t in [0.1, 1.0, 3.0] {
            assert!(state_derivative(&tr, t).unwrap().max_norm() < 1e-8);
            assert!(sld_and_qfi(&tr, t).unwrap().qfi.abs() < 1e-12);
            assert!(qfi_from_fidelity(&tr, t, 1e-3).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn damping_population_derivative() {
        let gamma = 0.8;
        let ch = ChannelDescriptor::amplitude_damping(gamma);
        let tr = Trajectory::new(ch, DensityOperator::basis(2, 1).unwrap(), 5.0).unwrap();
        for t in [0.2, 1.0, 2.5] {
            let d = state_derivative(&tr, t).unwrap();
            assert!((d[(1, 1)].re + gamma * (-gamma * t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn rabi_derivative_and_qfi() {
        let omega = 1.7;
        let (h, tr) = rabi(omega);
        for t in [0.3, 1.1, 4.0] {
            let rho = tr.evaluate(t).unwrap();
            let d = state_derivative(&tr, t).unwrap();
            assert!(d.max_abs_diff(&commutator_derivative(&h, rho.matrix())) < 1e-6);
            let res = sld_and_qfi(&tr, t).unwrap();
            assert!((res.qfi - omega * omega).abs() < 1e-6, "{}", res.qfi);
            assert!(res.sld.is_hermitian(1e-8));
        }
    }

    #[test]
    fn dephasing_pure_equatorial_qfi() {
        let (gamma, omega0) = (1.0, 8.0);
        let ch = ChannelDescriptor::dephasing(gamma, omega0);
        let tr = Trajectory::new(ch, equatorial(), 5.0).unwrap();
        for t in [0.2, 0.5, 1.5] {
            let expected = omega0 * omega0 * (-2.0 * gamma * t).exp() + gamma * gamma / ((2.0 * gamma * t).exp() - 1.0);
            let q = sld_and_qfi(&tr, t).unwrap().qfi;
            assert!((q - expected).abs() < 1e-6 * expected, "{q} vs {expected}");
        }
    }

    #[test]
    fn fidelity_estimator_on_mixed_dephasing() {
        // var Z = 0.5 on a pure state: <Z>^2 = 0.5, then mixed by shrinking the Bloch vector
        let z = FRAC_1_SQRT_2;
        let x = (1.0 - z * z).sqrt() * 0.9;
        let rho = DensityOperator::qubit_bloch(x, 0.0, z * 0.9).unwrap();
        let tr = Trajectory::new(ChannelDescriptor::dephasing(1.0, 8.0), rho, 2.0).unwrap();
        let sld = sld_and_qfi(&tr, 0.5).unwrap().qfi;
        let est = qfi_from_fidelity(&tr, 0.5, 1e-4).unwrap();
        assert!((est - sld).abs() < 0.01 * sld, "{est} vs {sld}");
    }

    #[test]
    fn rabi_fidelity_estimator_converges() {
        let omega = 1.3;
        let (_, tr) = rabi(omega);
        let errs: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&dt| (qfi_from_fidelity(&tr, 0.7, dt).unwrap() - omega * omega).abs())
            .collect();
        assert!(errs[1] < 0.1 * errs[0] && errs[2] < 1e-6, "{errs:?}");
    }

    #[test]
    fn unitary_qfi_is_four_variance() {
        for seed in 0..10 {
            let h = random_density(4, PurityClass::Mixed, 100 + seed).unwrap().into_matrix().scale_real(3.0);
            let psi = random_density(4, PurityClass::Pure, seed).unwrap();
            let ch = ChannelDescriptor::hamiltonian(&h).unwrap();
            let tr = Trajectory::new(ch, psi.clone(), 10.0).unwrap();
            let q = sld_and_qfi(&tr, 1.0).unwrap().qfi;
            assert!((q - variance_qfi(&psi, &h)).abs() < 1e-6);
        }
    }

    #[test]
    fn domain_edges() {
        let (_, tr) = rabi(1.0);
        assert!(matches!(state_derivative(&tr, 0.0), Err(Error::DomainEdge { .. })));
        assert!(matches!(sld_and_qfi(&tr, 20.0), Err(Error::DomainEdge { .. })));
        assert!(matches!(qfi_from_fidelity(&tr, 19.9, 0.5), Err(Error::DomainEdge { .. })));
        let z = pauli_z();
        assert!(Trajectory::new(ChannelDescriptor::hamiltonian(&z).unwrap(), DensityOperator::maximally_mixed(4), 1.0).is_err());
    }
}
