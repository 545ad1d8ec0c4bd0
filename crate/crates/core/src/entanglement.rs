//! Exact entanglement quantities.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::Float;
use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues_unchecked, CMatrix, Complex64, EigenDecomposition,
};
use crate::state::DensityMatrix;

/// Largest Hermiticity defect accepted by the eigensolver entry points.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;

/// Real eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

fn check_hermitian(matrix: &CMatrix) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::invalid("matrix", "must be square"));
    }
    let defect = matrix.hermiticity_defect();
    if !(defect < HERMITIAN_INPUT_TOL) {
        return Err(Error::invalid(
            "matrix",
            format!("not Hermitian (defect {defect:e})"),
        ));
    }
    Ok(())
}

pub fn hermitian_eigenvalues(matrix: &CMatrix) -> Result<Spectrum> {
    check_hermitian(matrix)?;
    Ok(Spectrum {
        eigenvalues: hermitian_eigenvalues_unchecked(matrix),
    })
}

/// Eigenvalues and eigenvectors; see [`EigenDecomposition`].
pub fn hermitian_eigen_decomposition(matrix: &CMatrix) -> Result<EigenDecomposition> {
    check_hermitian(matrix)?;
    Ok(hermitian_eigen(matrix))
}

/// Transpose of the signal factor of an operator on `C^{d_s} (x) C^{d_i}`:
/// entry `((j,a),(k,b))` moves to `((k,a),(j,b))`.
pub fn partial_transpose_matrix(matrix: &CMatrix, d_s: usize, d_i: usize) -> Result<CMatrix> {
    if !matrix.is_square() || matrix.rows() != d_s * d_i {
        return Err(Error::invalid(
            "bipartition",
            format!(
                "({d_s}, {d_i}) does not fit a {}x{} matrix",
                matrix.rows(),
                matrix.cols()
            ),
        ));
    }
    let mut out = CMatrix::zeros(matrix.rows(), matrix.cols());
    for j in 0..d_s {
        for k in 0..d_s {
            for a in 0..d_i {
                for b in 0..d_i {
                    out[(k * d_i + a, j * d_i + b)] = matrix[(j * d_i + a, k * d_i + b)];
                }
            }
        }
    }
    Ok(out)
}

/// Partial transpose on the signal subsystem of a bipartite state.
pub fn partial_transpose(state: &DensityMatrix) -> Result<CMatrix> {
    let (d_s, d_i) = state
        .bipartition()
        .ok_or_else(|| Error::invalid("bipartition", "state has no tensor-product structure"))?;
    partial_transpose_matrix(state.matrix(), d_s, d_i)
}

/// `sum_k |lambda_k|` of a Hermitian matrix.
pub fn trace_norm(matrix: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(matrix)?
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .sum())
}

/// `log2 ||rho^{T_s}||_1`, clamped at zero. States on the reduced pathway
/// basis are embedded into the full pathway basis first.
pub fn logarithmic_negativity(state: &DensityMatrix) -> Result<f64> {
    let full = state.to_bipartite();
    let pt = partial_transpose(&full)?;
    Ok(Float::log2(trace_norm(&pt)?).max(0.0))
}

/// `sigma_y (x) sigma_y`
fn spin_flip() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 3)] = Complex64::new(-1.0, 0.0);
    m[(1, 2)] = Complex64::new(1.0, 0.0);
    m[(2, 1)] = Complex64::new(1.0, 0.0);
    m[(3, 0)] = Complex64::new(-1.0, 0.0);
    m
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`, where `l_k` are the
/// square roots of the eigenvalues of `rho (sy sy) rho* (sy sy)`, taken from
/// the Hermitian form `sqrt(rho) (sy sy) rho* (sy sy) sqrt(rho)`.
pub fn concurrence_two_qubit(state: &DensityMatrix) -> Result<f64> {
    let full = state.to_bipartite();
    if full.bipartition() != Some((2, 2)) {
        return Err(Error::invalid(
            "state",
            format!(
                "concurrence needs a 2x2 bipartition, got {:?}",
                full.bipartition()
            ),
        ));
    }
    let rho = full.matrix();
    let sqrt_rho = hermitian_eigen(rho).reconstruct_with(|l| Float::sqrt(l.max(0.0)));
    let yy = spin_flip();
    let tilde = &(&yy * &rho.conj()) * &yy;
    let r2 = &(&sqrt_rho * &tilde) * &sqrt_rho;
    let lambdas: Vec<f64> = hermitian_eigenvalues_unchecked(&r2.hermitian_part())
        .into_iter()
        .map(|l| Float::sqrt(l.max(0.0)))
        .collect();
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}
