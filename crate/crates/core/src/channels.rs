//! Qubit channels, their unitary dilations, and the brute-force joint simulator.
//!
//! Each system qubit gets one environment qubit prepared in |0>_E. Joint basis
//! indices are `system_index * 2^n_env + environment_index`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, pauli_y, pauli_z, sigma_minus, sigma_plus, tensor, unitary_from_generator, ComplexMatrix,
    DEFAULT_DIM_CAP, ONE, ZERO,
};
use crate::states::{angle_from_fidelity, DensityOperator};

/// Survival probability `P(t)` of the excited state under amplitude damping.
#[derive(Clone)]
pub enum Survival {
    /// `exp(-gamma t)`.
    Exponential,
    /// Any monotonically decreasing function with `P(0) = 1`.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Survival {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Survival::Exponential => write!(f, "Exponential"),
            Survival::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Time-dependent unitary acting on the system alone.
#[derive(Clone)]
pub struct UnitaryFamily {
    dim: usize,
    family: Arc<dyn Fn(f64) -> ComplexMatrix + Send + Sync>,
}

impl fmt::Debug for UnitaryFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitaryFamily").field("dim", &self.dim).finish()
    }
}

impl UnitaryFamily {
    pub fn new(dim: usize, family: impl Fn(f64) -> ComplexMatrix + Send + Sync + 'static) -> Self {
        Self {
            dim,
            family: Arc::new(family),
        }
    }

    /// `exp(-i H t)` for a time-independent Hamiltonian (hbar = 1).
    pub fn from_hamiltonian(h: &ComplexMatrix) -> Result<Self> {
        let eig = eigh(h)?;
        Ok(Self::new(h.dim(), move |t| {
            eig.map_eigenvalues(|l| Complex64::from_polar(1.0, -l * t))
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        (self.family)(t)
    }
}

/// One of the channel families, with rates in inverse time units.
#[derive(Debug, Clone)]
pub enum ChannelDescriptor {
    AmplitudeDamping { gamma: f64, survival: Survival },
    Dephasing1Q { gamma: f64, omega0: f64 },
    DephasingNQ { gamma: f64, omega0: f64, n_qubits: usize },
    ExplicitUnitary(UnitaryFamily),
}

impl ChannelDescriptor {
    pub fn amplitude_damping(gamma: f64) -> Self {
        Self::AmplitudeDamping {
            gamma,
            survival: Survival::Exponential,
        }
    }

    pub fn dephasing(gamma: f64, omega0: f64) -> Self {
        Self::Dephasing1Q { gamma, omega0 }
    }

    pub fn dephasing_n(gamma: f64, omega0: f64, n_qubits: usize) -> Self {
        Self::DephasingNQ {
            gamma,
            omega0,
            n_qubits,
        }
    }

    pub fn hamiltonian(h: &ComplexMatrix) -> Result<Self> {
        Ok(Self::ExplicitUnitary(UnitaryFamily::from_hamiltonian(h)?))
    }

    pub fn system_qubits(&self) -> Option<usize> {
        match self {
            Self::AmplitudeDamping { .. } | Self::Dephasing1Q { .. } => Some(1),
            Self::DephasingNQ { n_qubits, .. } => Some(*n_qubits),
            Self::ExplicitUnitary(u) => u.dim.is_power_of_two().then(|| u.dim.trailing_zeros() as usize),
        }
    }

    pub fn system_dim(&self) -> usize {
        match self {
            Self::ExplicitUnitary(u) => u.dim,
            other => 1 << other.system_qubits().unwrap(),
        }
    }

    /// Number of environment qubits in the dilation.
    pub fn env_qubits(&self) -> usize {
        match self {
            Self::ExplicitUnitary(_) => 0,
            other => other.system_qubits().unwrap(),
        }
    }

    /// `omega0 / gamma`, when `gamma > 0`.
    pub fn coherence_ratio(&self) -> Option<f64> {
        match self {
            Self::Dephasing1Q { gamma, omega0 } | Self::DephasingNQ { gamma, omega0, .. } if *gamma > 0.0 => {
                Some(omega0 / gamma)
            }
            _ => None,
        }
    }

    /// Survival probability `P(t)` entering the dilation angle.
    pub fn survival(&self, t: f64) -> f64 {
        let p = match self {
            Self::AmplitudeDamping { gamma, survival } => match survival {
                Survival::Exponential => (-gamma * t).exp(),
                Survival::Custom(f) => f(t),
            },
            Self::Dephasing1Q { gamma, .. } | Self::DephasingNQ { gamma, .. } => 0.5 * (1.0 + (-gamma * t).exp()),
            Self::ExplicitUnitary(_) => 1.0,
        };
        p.clamp(0.0, 1.0)
    }

    /// Dilation angle `arccos sqrt(P(t))`.
    pub fn dilation_angle(&self, t: f64) -> f64 {
        dilation_angle(self.survival(t))
    }
}

pub fn dilation_angle(survival: f64) -> f64 {
    survival.clamp(0.0, 1.0).sqrt().acos()
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

fn check_dim(ch: &ChannelDescriptor, rho0: &DensityOperator) -> Result<()> {
    let expected = ch.system_dim();
    if rho0.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: rho0.dim(),
        });
    }
    Ok(())
}

/// Amplitude-damping map with an explicit survival probability.
pub fn amplitude_damp(rho0: &DensityOperator, survival: f64) -> Result<DensityOperator> {
    if rho0.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho0.dim(),
        });
    }
    let p = survival.clamp(0.0, 1.0);
    let m = rho0.matrix();
    let sp = p.sqrt();
    let out = ComplexMatrix::new(
        2,
        vec![
            m[(0, 0)] + m[(1, 1)] * (1.0 - p),
            m[(0, 1)] * sp,
            m[(1, 0)] * sp,
            m[(1, 1)] * p,
        ],
    )?;
    Ok(DensityOperator::from_matrix_unchecked(out))
}

/// Per-qubit dephasing acting on density-matrix entries: the coherence between
/// |..0..> and |..1..> on qubit i picks up `exp(-gamma t) exp(-i omega0 t)`.
fn dephase(rho0: &DensityOperator, n_qubits: usize, gamma: f64, omega0: f64, t: f64) -> DensityOperator {
    let n = 1usize << n_qubits;
    let m = rho0.matrix();
    let decay = (-gamma * t).exp();
    let mut out = m.clone();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let diff = a ^ b;
            let flips = diff.count_ones() as i32;
            // +1 for each qubit with a_i = 0, b_i = 1; -1 for a_i = 1, b_i = 0
            let phase_units = (diff & !a).count_ones() as i32 - (diff & a).count_ones() as i32;
            let factor = Complex64::from_polar(decay.powi(flips), -omega0 * t * phase_units as f64);
            out[(a, b)] = m[(a, b)] * factor;
        }
    }
    DensityOperator::from_matrix_unchecked(out)
}

/// State of the system at time `t` under the channel.
pub fn evolve(ch: &ChannelDescriptor, rho0: &DensityOperator, t: f64) -> Result<DensityOperator> {
    check_time(t)?;
    check_dim(ch, rho0)?;
    match ch {
        ChannelDescriptor::AmplitudeDamping { .. } => amplitude_damp(rho0, ch.survival(t)),
        ChannelDescriptor::Dephasing1Q { gamma, omega0 } => Ok(dephase(rho0, 1, *gamma, *omega0, t)),
        ChannelDescriptor::DephasingNQ {
            gamma,
            omega0,
            n_qubits,
        } => Ok(dephase(rho0, *n_qubits, *gamma, *omega0, t)),
        ChannelDescriptor::ExplicitUnitary(u) => {
            let ut = u.at(t);
            Ok(DensityOperator::from_matrix_unchecked(
                rho0.matrix().conjugate_by(&ut).hermitian_part(),
            ))
        }
    }
}

fn amplitude_damping_generator() -> ComplexMatrix {
    let a = tensor(&sigma_plus(), &sigma_minus()).unwrap();
    let b = tensor(&sigma_minus(), &sigma_plus()).unwrap();
    &a + &b
}

/// Single-pair dephasing dilation on (system, environment).
fn dephasing_pair_unitary(omega0: f64, theta: f64, t: f64) -> Result<ComplexMatrix> {
    let id = ComplexMatrix::identity(2);
    let free = unitary_from_generator(&tensor(&pauli_z(), &id)?, omega0 * t / 2.0)?;
    let coupling = unitary_from_generator(&tensor(&pauli_z(), &pauli_y())?, theta)?;
    Ok(free.matmul(&coupling))
}

/// Joint system+environment unitary at time `t`.
pub fn dilation_unitary(ch: &ChannelDescriptor, t: f64) -> Result<ComplexMatrix> {
    dilation_unitary_with_cap(ch, t, DEFAULT_DIM_CAP)
}

pub fn dilation_unitary_with_cap(ch: &ChannelDescriptor, t: f64, cap: usize) -> Result<ComplexMatrix> {
    check_time(t)?;
    let theta = ch.dilation_angle(t);
    match ch {
        ChannelDescriptor::AmplitudeDamping { .. } => unitary_from_generator(&amplitude_damping_generator(), theta),
        ChannelDescriptor::Dephasing1Q { omega0, .. } => dephasing_pair_unitary(*omega0, theta, t),
        ChannelDescriptor::DephasingNQ { omega0, n_qubits, .. } => {
            let n = *n_qubits;
            let dim = 1usize
                .checked_shl(2 * n as u32)
                .filter(|d| *d <= cap)
                .ok_or(Error::DimensionOverflow {
                    dim: 1usize.checked_shl(2 * n as u32).unwrap_or(usize::MAX),
                    cap,
                })?;
            let (c, s) = (theta.cos(), theta.sin());
            let ns = 1usize << n;
            let mut u = ComplexMatrix::zeros(dim);
            // block diagonal in the system basis; each block is a product of
            // exp(-i theta z_i Y) = [[c, -z s], [z s, c]] on the environment qubits
            for sys in 0..ns {
                let zsum: i32 = (0..n).map(|i| z_value(sys, i, n)).sum();
                let phase = Complex64::from_polar(1.0, -omega0 * t * zsum as f64 / 2.0);
                for e in 0..ns {
                    for e2 in 0..ns {
                        let mut amp = 1.0;
                        for i in 0..n {
                            let z = z_value(sys, i, n) as f64;
                            let (row, col) = (bit(e, i, n), bit(e2, i, n));
                            amp *= match (row, col) {
                                (0, 0) | (1, 1) => c,
                                (0, 1) => -z * s,
                                _ => z * s,
                            };
                            if amp == 0.0 {
                                break;
                            }
                        }
                        if amp != 0.0 {
                            u[(sys * ns + e, sys * ns + e2)] = phase * amp;
                        }
                    }
                }
            }
            Ok(u)
        }
        ChannelDescriptor::ExplicitUnitary(u) => Ok(u.at(t)),
    }
}

/// Bit of qubit `i` (qubit 0 most significant) in an `n`-qubit index.
fn bit(index: usize, i: usize, n: usize) -> usize {
    (index >> (n - 1 - i)) & 1
}

/// Eigenvalue of Z on qubit `i`: +1 for |0>, -1 for |1>.
pub(crate) fn z_value(index: usize, i: usize, n: usize) -> i32 {
    1 - 2 * bit(index, i, n) as i32
}

/// Pure state of system plus environment.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    amplitudes: Vec<Complex64>,
    n_sys: usize,
    n_env: usize,
}

impl JointState {
    pub fn new(amplitudes: Vec<Complex64>, n_sys: usize, n_env: usize) -> Result<Self> {
        let dim = 1usize << (n_sys + n_env);
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::DomainError(format!("joint state norm^2 {norm} != 1")));
        }
        Ok(Self {
            amplitudes,
            n_sys,
            n_env,
        })
    }

    /// `|psi>|0...0>_E`.
    pub fn with_env_ground(psi: &[Complex64], n_env: usize) -> Result<Self> {
        if !psi.len().is_power_of_two() {
            return Err(Error::DomainError("system vector length must be a power of two".into()));
        }
        let n_sys = psi.len().trailing_zeros() as usize;
        let mut env = vec![ZERO; 1 << n_env];
        env[0] = ONE;
        Self::new(crate::linalg::kron_vec(psi, &env), n_sys, n_env)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn n_sys(&self) -> usize {
        self.n_sys
    }

    pub fn n_env(&self) -> usize {
        self.n_env
    }

    fn total_qubits(&self) -> usize {
        self.n_sys + self.n_env
    }

    /// Applies a full joint unitary.
    pub fn apply(&mut self, u: &ComplexMatrix) -> Result<()> {
        if u.dim() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: u.dim(),
            });
        }
        self.amplitudes = u.apply(&self.amplitudes);
        Ok(())
    }

    /// Applies a 4x4 unitary to qubits `qa` (left factor) and `qb` of the joint register.
    pub fn apply_two_qubit(&mut self, u: &ComplexMatrix, qa: usize, qb: usize) -> Result<()> {
        let n = self.total_qubits();
        if u.dim() != 4 || qa >= n || qb >= n || qa == qb {
            return Err(Error::DomainError(format!("bad two-qubit gate on ({qa}, {qb})")));
        }
        let ma = 1usize << (n - 1 - qa);
        let mb = 1usize << (n - 1 - qb);
        let dim = self.amplitudes.len();
        for base in 0..dim {
            if base & ma != 0 || base & mb != 0 {
                continue;
            }
            let idx = [base, base | mb, base | ma, base | ma | mb];
            let old: Vec<Complex64> = idx.iter().map(|&k| self.amplitudes[k]).collect();
            for (r, &k) in idx.iter().enumerate() {
                self.amplitudes[k] = (0..4).map(|c| u[(r, c)] * old[c]).sum();
            }
        }
        Ok(())
    }

    /// `Tr_E |psi><psi|`.
    pub fn reduced_system(&self) -> DensityOperator {
        let ns = 1usize << self.n_sys;
        let ne = 1usize << self.n_env;
        let mut m = ComplexMatrix::zeros(ns);
        for a in 0..ns {
            for b in a..ns {
                let mut acc = ZERO;
                for e in 0..ne {
                    acc += self.amplitudes[a * ne + e] * self.amplitudes[b * ne + e].conj();
                }
                m[(a, b)] = acc;
                m[(b, a)] = acc.conj();
            }
        }
        DensityOperator::from_matrix_unchecked(m)
    }
}

/// Largest system register the brute-force joint simulator accepts.
pub const MAX_ORACLE_QUBITS: usize = 6;

/// Brute-force evolution of `|psi>|0>_E` by applying the dilation gate by gate.
pub fn evolve_joint(ch: &ChannelDescriptor, psi: &[Complex64], t: f64) -> Result<JointState> {
    check_time(t)?;
    let n = ch
        .system_qubits()
        .ok_or_else(|| Error::DomainError("system is not a qubit register".into()))?;
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::DimensionOverflow {
            dim: 1 << (2 * n),
            cap: DEFAULT_DIM_CAP,
        });
    }
    if psi.len() != ch.system_dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.system_dim(),
            found: psi.len(),
        });
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
    let n_env = ch.env_qubits();
    let mut state = JointState::with_env_ground(&psi, n_env)?;
    match ch {
        ChannelDescriptor::AmplitudeDamping { .. } | ChannelDescriptor::Dephasing1Q { .. } => {
            state.apply(&dilation_unitary(ch, t)?)?;
        }
        ChannelDescriptor::DephasingNQ { gamma, omega0, .. } => {
            let pair = dilation_unitary(&ChannelDescriptor::dephasing(*gamma, *omega0), t)?;
            for i in 0..n {
                state.apply_two_qubit(&pair, i, n + i)?;
            }
        }
        ChannelDescriptor::ExplicitUnitary(u) => state.apply(&u.at(t))?,
    }
    Ok(state)
}

/// GHZ state `(|0...0> + e^{i phi}|1...1>)/sqrt 2`.
pub fn ghz_state(n_qubits: usize, phi: f64) -> Vec<Complex64> {
    let dim = 1usize << n_qubits;
    let mut v = vec![ZERO; dim];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    v[0] = Complex64::new(s, 0.0);
    v[dim - 1] = Complex64::from_polar(s, phi);
    v
}

/// `|phi>^{⊗n}` for a single-qubit state.
pub fn symmetric_product_state(qubit: &[Complex64; 2], n_qubits: usize) -> Vec<Complex64> {
    (0..n_qubits).fold(vec![ONE], |acc, _| crate::linalg::kron_vec(&acc, qubit))
}

/// `cos^2 D` for a GHZ state after dephasing for `gt = gamma tau`, with `r = omega0 / gamma`.
pub fn exact_fidelity_ghz(n: usize, r: f64, gt: f64) -> f64 {
    let nf = n as f64;
    0.5 * (1.0 + (-nf * gt).exp() * (nf * r * gt).cos())
}

/// `cos^2 D` for `n` equatorial qubits in a symmetric product state.
pub fn exact_fidelity_separable(n: usize, r: f64, gt: f64) -> f64 {
    exact_fidelity_separable_real(n as f64, r, gt)
}

pub(crate) fn exact_fidelity_separable_real(n: f64, r: f64, gt: f64) -> f64 {
    (0.5 * (1.0 + (-gt).exp() * (r * gt).cos())).powf(n)
}

/// Number of qubits at which exact separable dephasing switches from the
/// `1/sqrt N` to the `1/N` regime: `(r^2 - 1) ln sec D`.
pub fn exact_transition_n(r: f64, d: f64) -> Result<f64> {
    if r <= 1.0 {
        return Err(Error::DomainError(format!("transition needs r > 1, got {r}")));
    }
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&d) {
        return Err(Error::DomainError(format!("distance {d} outside [0, pi/2)")));
    }
    Ok((r * r - 1.0) * -d.cos().ln())
}

/// First `gt` at which `fidelity(gt) <= target`, for a damped oscillation at ratio `r`.
///
/// Scans in steps well below the oscillation period and bisects the first
/// bracketing step. On failure returns the smallest fidelity seen.
fn first_crossing(fidelity: impl Fn(f64) -> f64, target: f64, r: f64) -> std::result::Result<f64, f64> {
    let step = (std::f64::consts::PI / (8.0 * r.max(1e-3))).min(0.05);
    let x_end = 45.0;
    let mut lo = 0.0;
    let mut min_f = fidelity(0.0);
    while lo < x_end {
        let hi = lo + step;
        let f_hi = fidelity(hi);
        if f_hi <= target {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if fidelity(m) <= target {
                    b = m;
                } else {
                    a = m;
                }
            }
            return Ok(b);
        }
        min_f = min_f.min(f_hi);
        lo = hi;
    }
    Err(min_f)
}

fn check_exact_target(n: usize, r: f64, d: f64) -> Result<()> {
    if n == 0 || !(r >= 0.0 && r.is_finite()) || !(d > 0.0 && d < std::f64::consts::FRAC_PI_2) {
        return Err(Error::DomainError(format!(
            "need N >= 1, finite r >= 0 and 0 < D < pi/2; got {n}, {r}, {d}"
        )));
    }
    Ok(())
}

/// Exact `gamma tau` at which a dephased symmetric equatorial product state
/// first reaches Bures angle `d`.
///
/// Returns [`Error::Unreachable`] with the largest angle ever reached when
/// the fidelity never drops to `cos^2 d`.
pub fn exact_time_separable(n: usize, r: f64, d: f64) -> Result<f64> {
    check_exact_target(n, r, d)?;
    let target = d.cos().powi(2);
    first_crossing(|x| exact_fidelity_separable(n, r, x), target, r)
        .map_err(|f| Error::Unreachable { limit: angle_from_fidelity(f) })
}

/// Exact `gamma tau` at which a dephased GHZ state first reaches Bures angle `d`.
pub fn exact_time_ghz(n: usize, r: f64, d: f64) -> Result<f64> {
    check_exact_target(n, r, d)?;
    let target = d.cos().powi(2);
    // the fidelity depends on N gamma tau only
    first_crossing(|y| exact_fidelity_ghz(1, r, y), target, r)
        .map(|y| y / n as f64)
        .map_err(|f| Error::Unreachable { limit: angle_from_fidelity(f) })
}

/// Qubit number at which the exact separable time equals the transition time
/// `gamma tau_tr = 2 / (r^2 - 1)`, solving the exact fidelity for `N`.
pub fn exact_transition_by_inversion(r: f64, d: f64) -> Result<f64> {
    if r <= 1.0 {
        return Err(Error::DomainError(format!("transition needs r > 1, got {r}")));
    }
    check_exact_target(1, r, d)?;
    let x = 2.0 / (r * r - 1.0);
    let f1 = exact_fidelity_separable(1, r, x);
    Ok((d.cos().powi(2)).ln() / f1.ln())
}
