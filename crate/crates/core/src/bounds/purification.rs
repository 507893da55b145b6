//! Purification bound `C_Q = 4 <Delta H^2>` of a dilated dephasing evolution,
//! minimized over environment generators.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::channels::{dilation_unitary, z_value, ChannelDescriptor};
use crate::error::{Error, Result};
use crate::linalg::{pauli_x, pauli_y, pauli_z, tensor, ComplexMatrix};
use crate::states::DensityOperator;

/// Coefficients of the symmetric environment generator
/// `h_E = sum_i (-alpha X_i + beta Y_i + delta Z_i)` at one instant.
///
/// `alpha` multiplies `-X`: with that orientation the closed-form variance of
/// [`cq_symmetric`] is exact for `h' = U^dagger h_E U`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnvGeneratorParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

impl EnvGeneratorParams {
    pub fn new(alpha: f64, beta: f64, delta: f64) -> Self {
        Self { alpha, beta, delta }
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.is_finite() && self.beta.is_finite() && self.delta.is_finite()
    }

    /// Single-qubit environment operator.
    pub fn qubit_matrix(&self) -> ComplexMatrix {
        let x = pauli_x().scale_real(-self.alpha);
        let y = pauli_y().scale_real(self.beta);
        let z = pauli_z().scale_real(self.delta);
        &(&x + &y) + &z
    }

    /// `h_E` on `n` environment qubits.
    pub fn matrix(&self, n: usize) -> Result<ComplexMatrix> {
        let single = self.qubit_matrix();
        let dim = 1usize << n;
        let mut h = ComplexMatrix::zeros(dim);
        for i in 0..n {
            let left = ComplexMatrix::identity(1 << i);
            let right = ComplexMatrix::identity(1 << (n - 1 - i));
            h = &h + &tensor(&tensor(&left, &single)?, &right)?;
        }
        Ok(h)
    }
}

type Schedule<T> = Arc<dyn Fn(f64) -> T + Send + Sync>;

/// Time-dependent environment generator.
#[derive(Clone)]
pub enum EnvGenerator {
    /// The symmetric three-parameter family.
    Symmetric(Schedule<EnvGeneratorParams>),
    /// General single-qubit Hermitian `a0 I + ax X + ay Y + az Z`.
    Qubit(Schedule<[f64; 4]>),
    /// Any Hermitian matrix on the environment space.
    Matrix(Schedule<ComplexMatrix>),
}

impl fmt::Debug for EnvGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self {
            Self::Symmetric(_) => "Symmetric",
            Self::Qubit(_) => "Qubit",
            Self::Matrix(_) => "Matrix",
        };
        write!(f, "EnvGenerator::{kind}")
    }
}

impl EnvGenerator {
    pub fn none() -> Self {
        Self::constant(EnvGeneratorParams::default())
    }

    pub fn constant(p: EnvGeneratorParams) -> Self {
        Self::Symmetric(Arc::new(move |_| p))
    }

    pub fn qubit(coeffs: [f64; 4]) -> Self {
        Self::Qubit(Arc::new(move |_| coeffs))
    }

    /// Optimal symmetric parameters for a fixed initial state.
    pub fn optimal(omega0: f64, gamma: f64, n: usize, q: f64, mean_z: f64) -> Self {
        Self::Symmetric(Arc::new(move |t| {
            optimal_env_params(t, omega0, gamma, n, q, mean_z).unwrap_or_default()
        }))
    }

    /// `h_E(t)` as a matrix on `n_env` qubits.
    pub fn matrix_at(&self, t: f64, n_env: usize) -> Result<ComplexMatrix> {
        let m = match self {
            Self::Symmetric(f) => f(t).matrix(n_env)?,
            Self::Qubit(f) => {
                if n_env != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        found: n_env,
                    });
                }
                let [a0, ax, ay, az] = f(t);
                let id = ComplexMatrix::identity(2).scale_real(a0);
                &(&(&id + &pauli_x().scale_real(ax)) + &pauli_y().scale_real(ay)) + &pauli_z().scale_real(az)
            }
            Self::Matrix(f) => f(t),
        };
        if m.dim() != 1 << n_env {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_env,
                found: m.dim(),
            });
        }
        if !m.is_hermitian(1e-9) {
            return Err(Error::NonHermitianGenerator);
        }
        Ok(m)
    }
}

/// A dilated channel together with an environment generator.
#[derive(Debug, Clone)]
pub struct PurifiedEvolution {
    pub channel: ChannelDescriptor,
    pub env_gen: EnvGenerator,
}

impl PurifiedEvolution {
    pub fn new(channel: ChannelDescriptor, env_gen: EnvGenerator) -> Self {
        Self { channel, env_gen }
    }
}

/// Moments of the collective operator `Z = sum_j Z_j / N` in a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZMoments {
    pub mean: f64,
    pub var: f64,
}

impl ZMoments {
    /// `q = <Delta Z^2> / (1 - <Z>^2)`.
    pub fn q(&self) -> Result<f64> {
        let denom = 1.0 - self.mean * self.mean;
        if denom <= 1e-14 {
            return Err(Error::DegenerateState);
        }
        Ok(self.var / denom)
    }
}

/// `<Z>` and `<Delta Z^2>` for `Z = sum_j Z_j / N` on an `N`-qubit state.
pub fn z_moments(rho: &DensityOperator) -> Result<ZMoments> {
    let dim = rho.dim();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::DomainError(format!("dimension {dim} is not a qubit register")));
    }
    let n = dim.trailing_zeros() as usize;
    let (mut m1, mut m2) = (0.0, 0.0);
    for s in 0..dim {
        let p = rho.matrix()[(s, s)].re;
        let z: i32 = (0..n).map(|i| z_value(s, i, n)).sum();
        let z = z as f64 / n as f64;
        m1 += p * z;
        m2 += p * z * z;
    }
    Ok(ZMoments {
        mean: m1,
        var: (m2 - m1 * m1).max(0.0),
    })
}

fn check_rates(t: f64, omega0: f64, gamma: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::DomainError(format!("need t > 0, got {t}")));
    }
    if omega0 < 0.0 || !(gamma > 0.0) {
        return Err(Error::DomainError(format!("need omega0 >= 0 and gamma > 0, got {omega0}, {gamma}")));
    }
    Ok(())
}

/// `<Delta Z^2> [omega0^2 e^{-2 gamma t} + gamma^2 / (e^{2 gamma t} - 1)]`.
pub fn cq_opt_1q(t: f64, omega0: f64, gamma: f64, var_z: f64) -> Result<f64> {
    cq_opt_nq(t, omega0, gamma, 1, 1.0, var_z)
}

/// `<Delta Z^2> [omega0^2 N^2 / (N q (e^{2 gamma t} - 1) + 1) + (gamma^2 N / q) / (e^{2 gamma t} - 1)]`.
pub fn cq_opt_nq(t: f64, omega0: f64, gamma: f64, n: usize, q: f64, var_script_z: f64) -> Result<f64> {
    check_rates(t, omega0, gamma)?;
    if n == 0 || !(q > 0.0 && q <= 1.0 + 1e-12) {
        return Err(Error::DomainError(format!("need N >= 1 and q in (0, 1], got {n}, {q}")));
    }
    if !(0.0..=1.0 + 1e-12).contains(&var_script_z) {
        return Err(Error::DomainError(format!("variance {var_script_z} outside [0, 1]")));
    }
    let nf = n as f64;
    let e = (2.0 * gamma * t).exp_m1();
    Ok(var_script_z * (omega0 * omega0 * nf * nf / (nf * q * e + 1.0) + gamma * gamma * nf / q / e))
}

/// Closed-form `C_Q` of symmetric `N`-qubit dephasing for the symmetric generator family.
pub fn cq_symmetric(t: f64, omega0: f64, gamma: f64, n: usize, m: ZMoments, p: EnvGeneratorParams) -> Result<f64> {
    check_rates(t, omega0, gamma)?;
    if !p.is_finite() {
        return Err(Error::NonHermitianGenerator);
    }
    let nf = n as f64;
    let e = (2.0 * gamma * t).exp_m1();
    let decay = (-gamma * t).exp();
    let big_p = 0.5 * (1.0 + decay);
    let one_minus_p = -0.5 * (-gamma * t).exp_m1();
    let root = big_p.sqrt() * one_minus_p.sqrt();
    let two_p_minus_one = decay;
    let (a, b, d) = (p.alpha, p.beta, p.delta);
    let v = m.var;

    let var_h = nf * nf * omega0 * omega0 * v / 4.0 + nf * gamma * gamma / 4.0 / e;
    let var_h_prime = nf * (a * a + b * b + d * d) + a * a * (nf * nf * v - nf) * 4.0 * big_p * one_minus_p
        - nf * d * d * two_p_minus_one * two_p_minus_one
        + 2.0 * a * d * nf * m.mean * 2.0 * root * two_p_minus_one;
    let cross = -2.0 * a * omega0 * nf * nf * v * root + nf * gamma * b * m.mean / e.sqrt();
    Ok(4.0 * (var_h + var_h_prime + cross))
}

/// Stationary point of [`cq_symmetric`] in `(alpha, beta, delta)`.
///
/// `delta = -alpha <Z> / sqrt(e^{2 gamma t} - 1)` follows from the `delta` condition alone.
pub fn optimal_env_params(t: f64, omega0: f64, gamma: f64, n: usize, q: f64, mean_z: f64) -> Result<EnvGeneratorParams> {
    check_rates(t, omega0, gamma)?;
    if mean_z.abs() >= 1.0 {
        return Err(Error::DegenerateState);
    }
    if n == 0 || !(q > 0.0 && q <= 1.0 + 1e-12) {
        return Err(Error::DomainError(format!("need N >= 1 and q in (0, 1], got {n}, {q}")));
    }
    let nq = n as f64 * q;
    let e = (2.0 * gamma * t).exp_m1();
    let denom = 1.0 + e * nq;
    Ok(EnvGeneratorParams {
        alpha: omega0 * (gamma * t).exp() * e.sqrt() * nq / 2.0 / denom,
        beta: -gamma * mean_z / (2.0 * e.sqrt()),
        delta: -omega0 * (gamma * t).exp() * mean_z * nq / 2.0 / denom,
    })
}

/// `C_Q` for a purified evolution.
///
/// Dephasing with the symmetric family uses the closed form; every other
/// combination goes through [`cq_direct`].
pub fn cq_general(pe: &PurifiedEvolution, rho0: &DensityOperator, t: f64) -> Result<f64> {
    match (&pe.channel, &pe.env_gen) {
        (ChannelDescriptor::Dephasing1Q { gamma, omega0 }, EnvGenerator::Symmetric(f))
        | (ChannelDescriptor::DephasingNQ { gamma, omega0, .. }, EnvGenerator::Symmetric(f)) => {
            let n = pe.channel.system_qubits().unwrap();
            if rho0.dim() != 1 << n {
                return Err(Error::DimensionMismatch {
                    expected: 1 << n,
                    found: rho0.dim(),
                });
            }
            cq_symmetric(t, *omega0, *gamma, n, z_moments(rho0)?, f(t))
        }
        _ => cq_direct(pe, rho0, t),
    }
}

/// `4 <Delta H^2>` in `rho0 (x) |0...0><0...0|_E`, with the generator
/// `H = -i (dU^dagger/dt) U + U^dagger h_E U` built from the dilation by
/// central differences.
pub fn cq_direct(pe: &PurifiedEvolution, rho0: &DensityOperator, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::DomainError(format!("need t > 0, got {t}")));
    }
    let ch = &pe.channel;
    if rho0.dim() != ch.system_dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.system_dim(),
            found: rho0.dim(),
        });
    }
    let n_env = ch.env_qubits();
    let h = (1e-5 * t.max(1.0)).min(0.5 * t);
    let u = dilation_unitary(ch, t)?;
    let up = dilation_unitary(ch, t + h)?;
    let um = dilation_unitary(ch, t - h)?;
    let du_dag = (&up.adjoint() - &um.adjoint()).scale_real(0.5 / h);
    let h_se = du_dag.matmul(&u).scale(Complex64::new(0.0, -1.0)).hermitian_part();

    let h_e = pe.env_gen.matrix_at(t, n_env)?;
    let lifted = tensor(&ComplexMatrix::identity(ch.system_dim()), &h_e)?;
    let total = &h_se + &lifted.conjugate_by(&u.adjoint());

    let mut env0 = ComplexMatrix::zeros(1 << n_env);
    env0[(0, 0)] = Complex64::new(1.0, 0.0);
    let joint = tensor(rho0.matrix(), &env0)?;
    let mean = joint.trace_product(&total).re;
    let second = joint.trace_product(&total.matmul(&total)).re;
    let var = second - mean * mean;
    if var.is_nan() {
        return Err(Error::NonConvergent("variance is not finite".into()));
    }
    Ok(4.0 * var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ghz_state, symmetric_product_state};
    use crate::qfi::{sld_and_qfi, Trajectory};
    use crate::states::{random_density, PurityClass};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pure(psi: &[Complex64]) -> DensityOperator {
        DensityOperator::pure(psi).unwrap()
    }

    #[test]
    fn no_generator_gives_dilation_variance() {
        let (omega0, gamma, n) = (3.0f64, 0.7f64, 2);
        let rho = random_density(4, PurityClass::Pure, 5).unwrap();
        let m = z_moments(&rho).unwrap();
        for t in [0.2, 1.0] {
            let e = (2.0 * gamma * t).exp_m1();
            let expected = 4.0 * (4.0 * omega0 * omega0 * m.var / 4.0 + 2.0 * gamma * gamma / 4.0 / e);
            let pe = PurifiedEvolution::new(ChannelDescriptor::dephasing_n(gamma, omega0, n), EnvGenerator::none());
            let got = cq_general(&pe, &rho, t).unwrap();
            assert!((got - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn closed_form_matches_matrix_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 2, 3] {
            let ch = ChannelDescriptor::dephasing_n(0.9, 4.0, n);
            for trial in 0..4 {
                let rho = random_density(1 << n, if trial % 2 == 0 { PurityClass::Pure } else { PurityClass::Mixed }, trial + 10 * n as u64).unwrap();
                let p = EnvGeneratorParams::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
                let t = rng.random_range(0.1..2.0);
                let analytic = cq_general(&PurifiedEvolution::new(ch.clone(), EnvGenerator::constant(p)), &rho, t).unwrap();
                let h = p.matrix(n).unwrap();
                let matrix = cq_direct(&PurifiedEvolution::new(ch.clone(), EnvGenerator::Matrix(Arc::new(move |_| h.clone()))), &rho, t).unwrap();
                assert!((analytic - matrix).abs() < 1e-6 * analytic.max(1.0), "n={n}: {analytic} vs {matrix}");
            }
        }
    }

    #[test]
    fn optimum_reproduces_closed_form() {
        for n in [1usize, 2, 4] {
            let psi = symmetric_product_state(&[Complex64::new(0.8, 0.0), Complex64::new(0.6, 0.0)], n);
            let m = z_moments(&pure(&psi)).unwrap();
            let q = m.q().unwrap();
            for t in [0.05, 0.5, 1.0, 3.0] {
                let p = optimal_env_params(t, 8.0, 1.0, n, q, m.mean).unwrap();
                let c = cq_symmetric(t, 8.0, 1.0, n, m, p).unwrap();
                let expected = cq_opt_nq(t, 8.0, 1.0, n, q, m.var).unwrap();
                assert!((c - expected).abs() < 1e-9 * expected, "{c} vs {expected}");
            }
        }
    }

    #[test]
    fn zero_mean_kills_beta_and_delta() {
        let p = optimal_env_params(0.7, 5.0, 1.0, 3, 1.0, 0.0).unwrap();
        assert_eq!(p.beta, 0.0);
        assert_eq!(p.delta, 0.0);
        assert!(p.alpha > 0.0);
        assert!(matches!(optimal_env_params(0.7, 5.0, 1.0, 1, 1.0, 1.0), Err(Error::DegenerateState)));
    }

    #[test]
    fn pure_single_qubit_optimum_equals_qfi() {
        let (gamma, omega0) = (1.0, 8.0);
        let psi = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let rho = pure(&psi);
        let m = z_moments(&rho).unwrap();
        let tr = Trajectory::new(ChannelDescriptor::dephasing(gamma, omega0), rho, 5.0).unwrap();
        for t in [0.1, 0.5, 1.0, 2.0] {
            let c = cq_opt_1q(t, omega0, gamma, m.var).unwrap();
            let f = sld_and_qfi(&tr, t).unwrap().qfi;
            assert!((c - f).abs() < 1e-6 * c.max(1.0), "{c} vs {f}");
        }
    }

    #[test]
    fn nq_reduces_to_single_qubit_and_vanishes_late() {
        for t in [0.1, 1.0] {
            assert!((cq_opt_nq(t, 3.0, 1.0, 1, 1.0, 0.4).unwrap() - cq_opt_1q(t, 3.0, 1.0, 0.4).unwrap()).abs() < 1e-15);
        }
        assert_eq!(cq_opt_1q(1.0, 3.0, 1.0, 0.0).unwrap(), 0.0);
        assert!(cq_opt_nq(200.0, 3.0, 1.0, 4, 1.0, 1.0).unwrap() < 1e-100);
        assert!(cq_opt_1q(0.0, 3.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn q_laws() {
        let ghz = pure(&ghz_state(4, 0.3));
        let m = z_moments(&ghz).unwrap();
        assert!((m.var - 1.0).abs() < 1e-15 && (m.q().unwrap() - 1.0).abs() < 1e-15);
        let prod = pure(&symmetric_product_state(&[Complex64::new(0.9, 0.0), Complex64::new(0.0, (1.0f64 - 0.81).sqrt())], 5));
        assert!((z_moments(&prod).unwrap().q().unwrap() - 0.2).abs() < 1e-12);
        let ground = DensityOperator::basis(8, 0).unwrap();
        assert!(matches!(z_moments(&ground).unwrap().q(), Err(Error::DegenerateState)));
    }

    #[test]
    fn amplitude_damping_dilation_bound() {
        // with no environment generator C_Q / 4 = n Theta'^2
        let gamma = 1.3;
        let pe = PurifiedEvolution::new(ChannelDescriptor::amplitude_damping(gamma), EnvGenerator::Matrix(Arc::new(|_| ComplexMatrix::zeros(2))));
        let rho = DensityOperator::qubit_bloch(0.3, 0.1, -0.4).unwrap();
        let n = 0.7;
        for t in [0.2, 1.0] {
            let p = (-gamma * t).exp();
            let dtheta = 0.5 * gamma * p / (p * (1.0 - p)).sqrt();
            let c = cq_general(&pe, &rho, t).unwrap();
            assert!((c - 4.0 * n * dtheta * dtheta).abs() < 1e-6, "{c}");
        }
    }

    #[test]
    fn non_hermitian_generator_rejected() {
        let bad = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let pe = PurifiedEvolution::new(ChannelDescriptor::dephasing(1.0, 1.0), EnvGenerator::Matrix(Arc::new(move |_| bad.clone())));
        let rho = DensityOperator::maximally_mixed(2);
        assert!(matches!(cq_general(&pe, &rho, 0.5), Err(Error::NonHermitianGenerator)));
    }
}
