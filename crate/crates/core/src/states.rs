//! Density operators and the Bures fidelity / angle between them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix, ZERO};

/// Tolerance on Hermiticity and unit trace of a density operator.
pub const DENSITY_TOL: f64 = 1e-9;
/// Most negative eigenvalue accepted as numerical noise.
pub const EIGEN_CLAMP: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let eig = eigh(&matrix)?;
        let min = eig.eigenvalues[0];
        if min < -EIGEN_CLAMP {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    /// Skips validation; for outputs of maps that are trace preserving and
    /// completely positive by construction.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// |psi><psi| for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidDensity("state vector has zero norm".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self {
            matrix: ComplexMatrix::projector(&v),
        })
    }

    /// Computational basis state |k>.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DomainError(format!("basis index {k} >= {dim}")));
        }
        let mut psi = vec![ZERO; dim];
        psi[k] = Complex64::new(1.0, 0.0);
        Self::pure(&psi)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// Qubit state with the given Bloch vector (|r| <= 1). `+z` is |0>.
    pub fn qubit_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let m = ComplexMatrix::new(
            2,
            vec![
                Complex64::new((1.0 + z) / 2.0, 0.0),
                Complex64::new(x / 2.0, -y / 2.0),
                Complex64::new(x / 2.0, y / 2.0),
                Complex64::new((1.0 - z) / 2.0, 0.0),
            ],
        )?;
        Self::new(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Tr(rho O) for a Hermitian observable; the real part.
    pub fn expectation(&self, observable: &ComplexMatrix) -> f64 {
        self.matrix.trace_product(observable).re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }
}

/// Sampling class for [`random_density`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurityClass {
    Pure,
    Mixed,
}

/// Random normalized complex Gaussian vector.
pub fn random_state_vector(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random density operator drawn from `rng`.
pub fn random_density_with(dim: usize, class: PurityClass, rng: &mut impl Rng) -> Result<DensityOperator> {
    if dim < 2 {
        return Err(Error::DomainError(format!("dimension {dim} < 2")));
    }
    match class {
        PurityClass::Pure => DensityOperator::pure(&random_state_vector(dim, rng)),
        PurityClass::Mixed => {
            let data: Vec<Complex64> = (0..dim * dim)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let g = ComplexMatrix::new(dim, data)?;
            let ggd = g.matmul(&g.adjoint()).hermitian_part();
            let tr = ggd.trace().re;
            Ok(DensityOperator::from_matrix_unchecked(ggd.scale_real(1.0 / tr)))
        }
    }
}

/// Random density operator, deterministic per seed.
pub fn random_density(dim: usize, class: PurityClass, seed: u64) -> Result<DensityOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_density_with(dim, class, &mut rng)
}

/// Relative cutoff below which an eigenvalue is indistinguishable from rounding noise.
fn noise_floor(dim: usize, largest: f64) -> f64 {
    8.0 * dim as f64 * f64::EPSILON * largest.max(0.0)
}

/// Bures fidelity `[Tr sqrt(sqrt(a) b sqrt(a))]^2`, clamped into [0, 1].
///
/// The inner operator is formed on the support of `a` only, so rank-deficient
/// arguments do not leak rounding noise through the square roots.
pub fn bures_fidelity(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let n = a.dim();
    let ea = eigh(a.matrix())?;
    let largest = *ea.eigenvalues.last().unwrap();
    if ea.eigenvalues[0] < -EIGEN_CLAMP {
        return Err(Error::NegativeEigenvalue {
            value: ea.eigenvalues[0],
        });
    }
    let floor = noise_floor(n, largest);
    let support: Vec<usize> = (0..n).filter(|&k| ea.eigenvalues[k] > floor).collect();
    let k = support.len();
    if k == 0 {
        return Ok(0.0);
    }

    // W = V_S diag(sqrt p_S), shape n x k; M = W^dagger b W
    let mut w = vec![ZERO; n * k];
    for (col, &s) in support.iter().enumerate() {
        let sp = ea.eigenvalues[s].sqrt();
        for row in 0..n {
            w[row * k + col] = ea.eigenvectors[(row, s)] * sp;
        }
    }
    let bm = b.matrix();
    let mut bw = vec![ZERO; n * k];
    for row in 0..n {
        for mid in 0..n {
            let x = bm[(row, mid)];
            if x == ZERO {
                continue;
            }
            for col in 0..k {
                bw[row * k + col] += x * w[mid * k + col];
            }
        }
    }
    let mut m = ComplexMatrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = ZERO;
            for row in 0..n {
                acc += w[row * k + i].conj() * bw[row * k + j];
            }
            m[(i, j)] = acc;
        }
    }
    let em = eigh(&m.hermitian_part())?;
    let top = em.eigenvalues.last().copied().unwrap_or(0.0);
    let floor_m = noise_floor(k, top);
    let root_sum: f64 = em
        .eigenvalues
        .iter()
        .filter(|&&mu| mu > floor_m)
        .map(|mu| mu.sqrt())
        .sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// Bures angle `arccos sqrt(F_B)` in radians.
pub fn bures_angle(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    Ok(angle_from_fidelity(bures_fidelity(a, b)?))
}

pub fn angle_from_fidelity(f: f64) -> f64 {
    f.clamp(0.0, 1.0).sqrt().acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_1_SQRT_2};

    fn plus() -> DensityOperator {
        DensityOperator::pure(&[Complex64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap()
    }

    #[test]
    fn identical_states_have_unit_fidelity() {
        for seed in 0..5 {
            let r = random_density(4, PurityClass::Mixed, seed).unwrap();
            assert!((bures_fidelity(&r, &r).unwrap() - 1.0).abs() < 1e-12);
            let p = random_density(4, PurityClass::Pure, seed).unwrap();
            assert!((bures_fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_and_mixed_examples() {
        let z0 = DensityOperator::basis(2, 0).unwrap();
        let z1 = DensityOperator::basis(2, 1).unwrap();
        assert_eq!(bures_fidelity(&z0, &z1).unwrap(), 0.0);
        assert!((bures_angle(&z0, &z1).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(bures_angle(&z0, &z0).unwrap(), 0.0);
        let mixed = DensityOperator::maximally_mixed(2);
        assert!((bures_fidelity(&plus(), &mixed).unwrap() - 0.5).abs() < 1e-14);
        assert!((bures_fidelity(&mixed, &plus()).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn one_percent_fidelity_is_94_percent_of_max_distance() {
        let d = angle_from_fidelity(0.01);
        assert!((d - 1.4706289).abs() < 1e-6);
        assert!((d / FRAC_PI_2 - 0.936).abs() < 1e-3);
    }

    #[test]
    fn dimension_mismatch() {
        let a = DensityOperator::maximally_mixed(2);
        let b = DensityOperator::maximally_mixed(4);
        assert!(matches!(bures_fidelity(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn random_density_classes() {
        let p = random_density(2, PurityClass::Pure, 3).unwrap();
        let e = eigh(p.matrix()).unwrap();
        assert!(e.eigenvalues[0].abs() < 1e-10);
        assert!((p.purity() - 1.0).abs() < 1e-12);
        let m = random_density(4, PurityClass::Mixed, 3).unwrap();
        DensityOperator::new(m.matrix().clone()).unwrap();
        assert_eq!(m, random_density(4, PurityClass::Mixed, 3).unwrap());
        assert_ne!(m, random_density(4, PurityClass::Mixed, 4).unwrap());
        assert!(random_density(1, PurityClass::Pure, 0).is_err());
    }

    #[test]
    fn invalid_density_rejected() {
        assert!(DensityOperator::new(ComplexMatrix::diag(&[0.5, 0.6])).is_err());
        assert!(DensityOperator::new(ComplexMatrix::diag(&[1.5, -0.5])).is_err());
        let nh = ComplexMatrix::from_real_rows(&[&[0.5, 0.2], &[0.0, 0.5]]).unwrap();
        assert!(DensityOperator::new(nh).is_err());
        assert!(DensityOperator::qubit_bloch(1.0, 1.0, 0.0).is_err());
    }
}
