use num_complex::Complex64;

use super::{ComplexMatrix, HERMITIAN_TOL, ZERO};
use crate::error::{Error, Result};

/// Eigenvalues below this are an error for PSD operations; values in between
/// it and zero are numerical noise and are clamped to zero.
pub(crate) const PSD_CLAMP: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix: `m = V diag(eigenvalues) V^dagger`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let n = self.eigenvalues.len();
        (0..n).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    /// `V f(diag) V^dagger` for a scalar function applied to the eigenvalues.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += v[(i, k)] * fl[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|l| Complex64::new(l, 0.0))
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eigh(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NonHermitianInput { deviation });
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let frob2: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum();
    let off2 = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[(i, j)].norm_sqr();
            }
        }
        2.0 * s
    };

    for _ in 0..MAX_SWEEPS {
        if off2(&a) <= f64::EPSILON * f64::EPSILON * frob2 * 1e-2 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let abs_g = g.norm();
                if abs_g <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if abs_g < 1e-3 * f64::EPSILON * (app.abs().min(aqq.abs())) {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let phase = g / abs_g;
                let theta = (aqq - app) / (2.0 * abs_g);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let e_minus = phase.conj();
                // columns: A <- A U with U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                let u_qp = -e_minus * s;
                let u_qq = e_minus * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * u_qp;
                    a[(k, q)] = akp * s + akq * u_qq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * u_qp;
                    v[(k, q)] = vkp * s + vkq * u_qq;
                }
                // rows: A <- U^dagger A
                let ud_pq = u_qp.conj();
                let ud_qq = u_qq.conj();
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * ud_pq;
                    a[(q, k)] = apk * s + aqk * ud_qq;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, new)] = v[(i, old)];
        }
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn matrix_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(m)?;
    if let Some(&min) = eig.eigenvalues.first() {
        if min < -PSD_CLAMP {
            return Err(Error::NegativeEigenvalue { value: min });
        }
    }
    Ok(eig.map_eigenvalues(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)))
}

/// `exp(-i theta G)` for a Hermitian generator `G`.
pub fn unitary_from_generator(generator: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
    let eig = eigh(generator)?;
    Ok(eig.map_eigenvalues(|l| Complex64::from_polar(1.0, -theta * l)))
}
