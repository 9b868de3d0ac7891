//! Figures of merit: fidelity, CHSH correlation, negativity, populations.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigvals, kron, partial_transpose, trace, BipartiteDims, ComplexMatrix, StateVector};
use crate::models::Target;

/// Agreement required between the two negativity formulas.
pub const NEGATIVITY_CONSISTENCY_TOL: f64 = 1e-10;

fn ensure_side(rho: &ComplexMatrix, n: usize) -> Result<()> {
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: rho.nrows().max(rho.ncols()) });
    }
    Ok(())
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity(psi: &StateVector, rho: &ComplexMatrix) -> Result<f64> {
    ensure_side(rho, psi.len())?;
    let z = psi.dotc(&(rho * psi));
    if z.im.abs() > 1e-10 {
        return Err(Error::NotHermitian { defect: z.im.abs(), tolerance: 1e-10 });
    }
    Ok(z.re)
}

/// `⟨b|ρ|b⟩` for every basis state.
pub fn populations<'a, I>(rho: &ComplexMatrix, basis: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a StateVector>,
{
    basis.into_iter().map(|b| fidelity(b, rho)).collect()
}

/// Bell operator on two three-level atoms. The Pauli matrices act on
/// `span{|f⟩, |a⟩}` of each atom (`|f⟩` as qubit 0) and vanish on `|r⟩`.
#[derive(Debug, Clone)]
pub struct ObservableChsh {
    pub matrix: ComplexMatrix,
}

fn embedded_pauli_x() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(3, 3);
    m[(0, 1)] = c(1.0, 0.0);
    m[(1, 0)] = c(1.0, 0.0);
    m
}

fn embedded_pauli_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(3, 3);
    m[(0, 1)] = c(0.0, -1.0);
    m[(1, 0)] = c(0.0, 1.0);
    m
}

impl ObservableChsh {
    /// `σy⊗(−σy−σx)/√2 + σx⊗(−σy−σx)/√2 + σx⊗(σy−σx)/√2 − σy⊗(σy−σx)/√2`
    pub fn standard() -> Self {
        let (sx, sy) = (embedded_pauli_x(), embedded_pauli_y());
        let s = c(FRAC_1_SQRT_2, 0.0);
        let minus = (-&sy - &sx) * s;
        let plus = (&sy - &sx) * s;
        let matrix = kron(&sy, &minus) + kron(&sx, &minus) + kron(&sx, &plus) - kron(&sy, &plus);
        Self { matrix }
    }

    /// Operator matched to a Bell-scheme target. The triplet is the singlet
    /// with a π phase on atom 2, so its operator is the standard one
    /// conjugated by that phase, which flips the sign of every term.
    pub fn for_target(target: Target) -> Result<Self> {
        match target {
            Target::Singlet => Ok(Self::standard()),
            Target::Triplet => Ok(Self { matrix: -Self::standard().matrix }),
            other => Err(Error::InvalidArgument(format!(
                "CHSH correlation is defined for the Bell scheme only, not target {}",
                other.name()
            ))),
        }
    }

    pub fn expectation(&self, rho: &ComplexMatrix) -> Result<f64> {
        ensure_side(rho, 9)?;
        Ok(trace(&(&self.matrix * rho)).re)
    }
}

/// `Tr(O_CHSH ρ)` with the standard operator.
pub fn chsh_correlation(rho: &ComplexMatrix) -> Result<f64> {
    ObservableChsh::standard().expectation(rho)
}

/// Both negativity formulas: `(‖ρ^{T_A}‖₁ − 1)/2` and the absolute sum of the
/// negative eigenvalues of `ρ^{T_A}`. `ρ` is normalized to unit trace first.
pub fn negativity_forms(rho: &ComplexMatrix, dims: BipartiteDims) -> Result<(f64, f64)> {
    ensure_side(rho, dims.total())?;
    let tr = trace(rho);
    if (tr.re - 1.0).abs() > 1e-6 || tr.im.abs() > 1e-6 {
        return Err(Error::NotDensityMatrix(format!("trace {:.9} is not 1", tr.re)));
    }
    let normalized = rho / tr;
    let lambdas = hermitian_eigvals(&partial_transpose(&normalized, dims)?)?;
    let trace_norm: f64 = lambdas.iter().map(|l| l.abs()).sum();
    let from_norm = (trace_norm - 1.0) / 2.0;
    let from_eigs: f64 = lambdas.iter().map(|l| (l.abs() - l) / 2.0).sum();
    Ok((from_norm, from_eigs))
}

/// Negativity with partial transpose over atom 1; both formulas are
/// evaluated and must agree.
pub fn negativity(rho: &ComplexMatrix, dims: BipartiteDims) -> Result<f64> {
    let (from_norm, from_eigs) = negativity_forms(rho, dims)?;
    if (from_norm - from_eigs).abs() > NEGATIVITY_CONSISTENCY_TOL {
        return Err(Error::InconsistentNegativity { trace_norm_form: from_norm, eigen_form: from_eigs });
    }
    Ok(from_norm)
}
