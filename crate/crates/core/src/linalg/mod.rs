//! Dense complex linear algebra for small quantum systems.
//!
//! Matrices are square and stored row-major. Composite spaces use a single
//! ordering convention everywhere: system factors sit to the left of
//! environment factors, and qubit `i` sits to the left of qubit `i + 1`, so
//! qubit 0 is the most significant bit of a basis index.

mod eigen;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eigen::{eigh, matrix_sqrt, unitary_from_generator, HermitianEigen};

/// Default cap on the dimension of any matrix built by [`tensor`] (12 qubits).
pub const DEFAULT_DIM_CAP: usize = 1 << 12;

/// Tolerance used by [`eigh`] for the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-9;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DomainError("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Builds a matrix from rows; every row must have as many entries as there are rows.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Self::new(dim, data)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Outer product |u><v|.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        let dim = u.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in u {
            for b in v {
                data.push(a * b.conj());
            }
        }
        Self::new(dim, data)
    }

    /// Projector |psi><psi|.
    pub fn projector(psi: &[Complex64]) -> Self {
        Self::outer(psi, psi).expect("same vector")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm of `self - other`; infinite when the dimensions differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm of `self - self^dagger`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// (M + M^dagger) / 2.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let out_row = &mut out[i * n..(i + 1) * n];
            for (k, a) in row.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len(), "matrix-vector dimension mismatch");
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// <u| M |v>.
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        self.apply(v)
            .iter()
            .zip(u)
            .map(|(mv, ui)| ui.conj() * mv)
            .sum()
    }

    /// Tr(self * other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim, "trace_product dimension mismatch");
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    /// U * self * U^dagger.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for row in self.data.chunks(self.dim) {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, vec![ZERO, -I, I, ZERO]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diag(&[1.0, -1.0])
}

/// Raising operator |1><0|.
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap()
}

/// Lowering operator |0><1|.
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
}

/// Kronecker product `a ⊗ b` with `a` as the leftmost factor.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    tensor_with_cap(a, b, DEFAULT_DIM_CAP)
}

pub fn tensor_with_cap(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let dim = a
        .dim
        .checked_mul(b.dim)
        .ok_or(Error::DimensionOverflow { dim: usize::MAX, cap })?;
    if dim > cap {
        return Err(Error::DimensionOverflow { dim, cap });
    }
    let (na, nb) = (a.dim, b.dim);
    let mut data = vec![ZERO; dim * dim];
    for i in 0..na {
        for j in 0..na {
            let x = a.data[i * na + j];
            if x == ZERO {
                continue;
            }
            for k in 0..nb {
                let row = (i * nb + k) * dim + j * nb;
                for l in 0..nb {
                    data[row + l] = x * b.data[k * nb + l];
                }
            }
        }
    }
    Ok(ComplexMatrix { dim, data })
}

/// Tensor product of a list of factors, leftmost first.
pub fn tensor_all(factors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let mut iter = factors.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::DomainError("empty tensor product".into()))?;
    iter.try_fold(first.clone(), |acc, f| tensor(&acc, f))
}

/// Kronecker product of state vectors, leftmost first.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Traces out every subsystem not listed in `keep`.
///
/// `dims` lists the factor dimensions in tensor order; `keep` holds indices into `dims`
/// and the kept factors appear in the result in ascending index order.
pub fn partial_trace(m: &ComplexMatrix, keep: &[usize], dims: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != m.dim {
        return Err(Error::BadPartition(format!(
            "factor dimensions {dims:?} do not multiply to {}",
            m.dim
        )));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(Error::BadPartition(format!(
            "invalid kept subsystems {keep:?} for {} factors",
            dims.len()
        )));
    }

    // strides of each factor in the full index
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep_sorted.contains(i)).collect();
    let keep_dims: Vec<usize> = keep_sorted.iter().map(|&i| dims[i]).collect();
    let trace_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let out_dim: usize = keep_dims.iter().product();
    let trace_dim: usize = trace_dims.iter().product();

    let offsets = |sel: &[usize], sel_dims: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for (pos, &f) in sel.iter().enumerate().rev() {
                    let d = sel_dims[pos];
                    off += (idx % d) * strides[f];
                    idx /= d;
                }
                off
            })
            .collect()
    };
    let keep_off = offsets(&keep_sorted, &keep_dims, out_dim);
    let trace_off = offsets(&traced, &trace_dims, trace_dim);

    let mut out = ComplexMatrix::zeros(out_dim);
    for (a, &ka) in keep_off.iter().enumerate() {
        for (b, &kb) in keep_off.iter().enumerate() {
            let mut acc = ZERO;
            for &c in &trace_off {
                acc += m.data[(ka + c) * m.dim + kb + c];
            }
            out.data[a * out_dim + b] = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn from_rows_preserves_order() {
        let rows = vec![vec![c(1.0, 0.0), c(2.0, 1.0)], vec![c(3.0, -1.0), c(4.0, 0.0)]];
        let m = ComplexMatrix::from_rows(rows.clone()).unwrap();
        assert_eq!(m.rows(), rows);
        assert_eq!(m[(0, 1)], c(2.0, 1.0));
        assert_eq!(m.as_slice().len(), 4);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = ComplexMatrix::from_rows(vec![vec![ONE, ONE], vec![ONE]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        assert!(ComplexMatrix::new(2, vec![ONE; 3]).is_err());
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn z_tensor_identity_is_block_diagonal() {
        let m = tensor(&pauli_z(), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(m, ComplexMatrix::diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn pauli_product_squares_to_identity() {
        let zy = tensor(&pauli_z(), &pauli_y()).unwrap();
        assert!(zy.matmul(&zy).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn tensor_respects_cap() {
        let a = ComplexMatrix::identity(8);
        let err = tensor_with_cap(&a, &a, 32).unwrap_err();
        assert_eq!(err, Error::DimensionOverflow { dim: 64, cap: 32 });
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)];
        let rho = ComplexMatrix::projector(&bell);
        let red = partial_trace(&rho, &[0], &[2, 2]).unwrap();
        assert!(red.max_abs_diff(&ComplexMatrix::diag(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(0.7, 0.0), c(0.1, 0.2)],
            vec![c(0.1, -0.2), c(0.3, 0.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::diag(&[0.25, 0.25, 0.5]);
        let ab = tensor(&a, &b).unwrap();
        assert!(partial_trace(&ab, &[0], &[2, 3]).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(partial_trace(&ab, &[1], &[2, 3]).unwrap().max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn partial_trace_middle_factor() {
        let a = pauli_x();
        let b = ComplexMatrix::diag(&[0.2, 0.8]);
        let d = pauli_y();
        let abd = tensor_all(&[a.clone(), b, d.clone()]).unwrap();
        let kept = partial_trace(&abd, &[0, 2], &[2, 2, 2]).unwrap();
        assert!(kept.max_abs_diff(&tensor(&a, &d).unwrap()) < 1e-15);
    }

    #[test]
    fn bad_partitions() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(partial_trace(&m, &[0], &[2, 3]), Err(Error::BadPartition(_))));
        assert!(matches!(partial_trace(&m, &[2], &[2, 2]), Err(Error::BadPartition(_))));
        assert!(matches!(partial_trace(&m, &[0, 0], &[2, 2]), Err(Error::BadPartition(_))));
    }

    #[test]
    fn raising_lowering_convention() {
        // sigma_plus |0> = |1>
        let v = sigma_plus().apply(&[ONE, ZERO]);
        assert_eq!(v, vec![ZERO, ONE]);
        let n = sigma_plus().matmul(&sigma_minus());
        assert_eq!(n, ComplexMatrix::diag(&[0.0, 1.0]));
    }
}
