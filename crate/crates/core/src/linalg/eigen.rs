//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies a real Givens rotation, so the iteration is the
//! classical real Jacobi method in a rotating phase frame. Convergence is
//! quadratic once the off-diagonal mass is small.

use alloc::vec::Vec;

use super::{CMatrix, Complex64};
use crate::float::Float;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    /// `sum_k f(lambda_k) v_k v_k^dagger`
    pub fn reconstruct_with(&self, mut f: impl FnMut(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |r, c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &w) in weights.iter().enumerate() {
                if w != 0.0 {
                    acc += self.vectors[(r, k)] * self.vectors[(c, k)].conj() * w;
                }
            }
            acc
        })
    }
}

/// Full eigen-decomposition of a Hermitian matrix. Only the Hermitian part of
/// the input is used; callers check the defect themselves.
pub fn hermitian_eigen(a: &CMatrix) -> EigenDecomposition {
    jacobi(a, true)
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues_unchecked(a: &CMatrix) -> Vec<f64> {
    jacobi(a, false).values
}

fn off_diagonal_norm_sqr(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi(input: &CMatrix, want_vectors: bool) -> EigenDecomposition {
    assert!(input.is_square(), "eigen-decomposition needs a square matrix");
    let n = input.rows();
    let mut a = input.hermitian_part();
    for k in 0..n {
        a[(k, k)].im = 0.0;
    }
    let mut v = CMatrix::identity(if want_vectors { n } else { 0 });
    let total = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm_sqr(&a);
        if off <= (f64::EPSILON * total).powi(2) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Skip pivots that are negligible against both diagonal entries.
                if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                let phase = apq / mag; // e^{i phi}
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + Float::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / Float::sqrt(t * t + 1.0);
                let s = t * c;
                rotate(&mut a, p, q, c, s, phase);
                a[(p, p)] = Complex64::new(app - t * mag, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                if want_vectors {
                    rotate_columns(&mut v, p, q, c, s, phase);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = if want_vectors {
        CMatrix::from_fn(n, n, |r, c| v[(r, order[c])])
    } else {
        CMatrix::zeros(0, 0)
    };
    EigenDecomposition { values, vectors }
}

/// Columns p, q of `m` times `U` where
/// `U_pp = c, U_pq = s, U_qp = -s e^{-i phi}, U_qq = c e^{-i phi}`.
fn rotate_columns(m: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let ph = phase.conj();
    for k in 0..m.rows() {
        let mp = m[(k, p)];
        let mq = m[(k, q)] * ph;
        m[(k, p)] = mp * c - mq * s;
        m[(k, q)] = mp * s + mq * c;
    }
}

/// `A <- U^dagger A U` for the rotation of [`rotate_columns`].
fn rotate(a: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    rotate_columns(a, p, q, c, s, phase);
    let n = a.rows();
    for k in 0..n {
        let bp = a[(p, k)];
        let bq = a[(q, k)] * phase;
        a[(p, k)] = bp * c - bq * s;
        a[(q, k)] = bp * s + bq * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let e = hermitian_eigen(&CMatrix::from_diagonal(&[0.3, 0.7, -1.0]));
        assert_eq!(e.values, vec![0.7, 0.3, -1.0]);
    }

    #[test]
    fn pauli_y_has_eigenvalues_plus_minus_one() {
        let y =
            CMatrix::from_row_major(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let e = hermitian_eigen(&y);
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
        let back = e.reconstruct_with(|l| l);
        assert!((&back - &y).max_abs() < 1e-15);
    }

    #[test]
    fn reconstructs_dense_hermitian() {
        let n = 7;
        let a = CMatrix::from_fn(n, n, |r, k| {
            let (x, y) = (r as f64, k as f64);
            if r == k {
                c(x.sin() * 3.0, 0.0)
            } else if r < k {
                c((x * 1.3 + y).cos(), (x - 2.0 * y).sin())
            } else {
                c((y * 1.3 + x).cos(), -(y - 2.0 * x).sin())
            }
        });
        let e = hermitian_eigen(&a);
        let back = e.reconstruct_with(|l| l);
        let resid = (&back - &a).frobenius_norm();
        assert!(resid < 1e-12 * a.frobenius_norm(), "{resid}");
        let unit = &e.vectors.adjoint() * &e.vectors;
        assert!((&unit - &CMatrix::identity(n)).max_abs() < 1e-13);
    }
}
