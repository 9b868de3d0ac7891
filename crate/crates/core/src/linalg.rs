//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are plain `nalgebra` dynamic matrices of `Complex64`. Two-atom
//! operators always place atom 1 in the left Kronecker factor, so the basis
//! index of `|m⟩₁|n⟩₂` is `m * dim_b + n`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type StateVector = DVector<C64>;

/// Relative Hermiticity tolerance accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Level counts of the two subsystems of a bipartite operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteDims {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteDims {
    pub const fn new(dim_a: usize, dim_b: usize) -> Self {
        Self { dim_a, dim_b }
    }

    pub const fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// Composite index of `|m⟩_A |n⟩_B`.
    pub const fn index(&self, m: usize, n: usize) -> usize {
        m * self.dim_b + n
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max|M − M†| / max|M|`, or the absolute defect for the zero matrix.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    let scale = max_abs(m);
    if scale > 0.0 {
        defect / scale
    } else {
        defect
    }
}

fn ensure_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Transpose with respect to subsystem A: block `(i, j)` of the result is
/// block `(j, i)` of the input, each block being `dim_b × dim_b`.
pub fn partial_transpose(rho: &ComplexMatrix, dims: BipartiteDims) -> Result<ComplexMatrix> {
    let n = dims.total();
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: rho.nrows().max(rho.ncols()),
        });
    }
    let db = dims.dim_b;
    Ok(ComplexMatrix::from_fn(n, n, |row, col| {
        let (i, k) = (row / db, row % db);
        let (j, l) = (col / db, col % db);
        rho[(j * db + k, i * db + l)]
    }))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigvals(m: &ComplexMatrix) -> Result<Vec<f64>> {
    ensure_square(m)?;
    let defect = hermiticity_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect, tolerance: HERMITIAN_TOL });
    }
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let mut vals: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// `Tr|M|` for Hermitian `M`.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigvals(m)?.iter().map(|l| l.abs()).sum())
}

/// `½‖A − B‖₁` for Hermitian operands.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), actual: b.nrows() });
    }
    Ok(0.5 * trace_norm(&(a - b))?)
}

pub fn projector(psi: &StateVector) -> ComplexMatrix {
    psi * psi.adjoint()
}

/// Column-stacked vectorization.
pub fn vectorize(m: &ComplexMatrix) -> StateVector {
    StateVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &StateVector, dim: usize) -> Result<ComplexMatrix> {
    if v.len() != dim * dim {
        return Err(Error::DimensionMismatch { expected: dim * dim, actual: v.len() });
    }
    Ok(ComplexMatrix::from_column_slice(dim, dim, v.as_slice()))
}

/// Properties checked by [`check_density_matrix`].
#[derive(Debug, Clone, Copy)]
pub struct DensityTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl DensityTolerance {
    /// For user-supplied initial states.
    pub const STRICT: Self = Self { hermiticity: 1e-10, trace: 1e-10, positivity: 1e-10 };
    /// For numerically propagated states.
    pub const PROPAGATED: Self = Self { hermiticity: 1e-8, trace: 1e-6, positivity: 1e-6 };
}

/// Verifies Hermiticity, unit trace and positivity; returns the minimum
/// eigenvalue on success.
pub fn check_density_matrix(rho: &ComplexMatrix, tol: DensityTolerance) -> Result<f64> {
    ensure_square(rho)?;
    let defect = hermiticity_defect(rho);
    if defect > tol.hermiticity {
        return Err(Error::NotDensityMatrix(format!(
            "Hermiticity defect {defect:.3e} exceeds {:.1e}",
            tol.hermiticity
        )));
    }
    let tr = trace(rho);
    if (tr - C64::new(1.0, 0.0)).norm() > tol.trace {
        return Err(Error::NotDensityMatrix(format!(
            "trace {:.12} differs from 1 by more than {:.1e}",
            tr.re, tol.trace
        )));
    }
    let sym = (rho + rho.adjoint()) * c(0.5, 0.0);
    let min = sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol.positivity {
        return Err(Error::NotDensityMatrix(format!(
            "minimum eigenvalue {min:.3e} below -{:.1e}",
            tol.positivity
        )));
    }
    Ok(min)
}
