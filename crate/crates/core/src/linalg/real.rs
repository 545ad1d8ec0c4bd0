use alloc::vec;
use alloc::vec::Vec;

use crate::float::Float;

/// Dense symmetric real matrix used for Schur complements.
#[derive(Debug, Clone)]
pub(crate) struct RealMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(n: usize) -> Self {
        RealMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }
}

/// Cholesky-factors a symmetric positive definite matrix in place (lower
/// triangle). A ridge proportional to the largest diagonal entry is added if
/// the plain factorization breaks down. Returns the ridge that was used, or
/// `None` if even the largest ridge failed.
pub(crate) fn factor_spd_in_place(a: &mut RealMatrix) -> Option<f64> {
    let n = a.n;
    let original = a.data.clone();
    let scale = (0..n)
        .map(|k| original[k * n + k].abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut ridge = 0.0;
    for attempt in 0..8 {
        if attempt > 0 {
            a.data.copy_from_slice(&original);
            ridge = scale * 1e-14 * Float::powi(100.0, attempt - 1);
            for k in 0..n {
                a.data[k * n + k] += ridge;
            }
        }
        if factor(a) {
            return Some(ridge);
        }
    }
    None
}

/// Solves `A x = b` with a factor from [`factor_spd_in_place`].
pub(crate) fn solve_factored(l: &RealMatrix, b: &mut [f64]) {
    substitute(l, b);
}

fn factor(a: &mut RealMatrix) -> bool {
    let n = a.n;
    for j in 0..n {
        let mut d = a.data[j * n + j];
        for k in 0..j {
            let l = a.data[j * n + k];
            d -= l * l;
        }
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        let djj = Float::sqrt(d);
        a.data[j * n + j] = djj;
        for i in j + 1..n {
            let mut s = a.data[i * n + j];
            let (ri, rj) = (i * n, j * n);
            for k in 0..j {
                s -= a.data[ri + k] * a.data[rj + k];
            }
            a.data[i * n + j] = s / djj;
        }
    }
    true
}

fn substitute(l: &RealMatrix, b: &mut [f64]) {
    let n = l.n;
    for i in 0..n {
        let mut s = b[i];
        for (k, bk) in b.iter().enumerate().take(i) {
            s -= l.data[i * n + k] * bk;
        }
        b[i] = s / l.data[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for (k, bk) in b.iter().enumerate().skip(i + 1) {
            s -= l.data[k * n + i] * bk;
        }
        b[i] = s / l.data[i * n + i];
    }
}
