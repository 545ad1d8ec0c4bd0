//! Small dense complex linear algebra.
//!
//! Matrices here are at most a few hundred rows, so everything is plain
//! row-major storage with cubic algorithms.

mod eigen;
mod matrix;
mod real;

pub use num_complex::Complex64;

pub use self::eigen::{hermitian_eigen, hermitian_eigenvalues_unchecked, EigenDecomposition};
pub use self::matrix::CMatrix;
pub(crate) use self::real::{factor_spd_in_place, solve_factored, RealMatrix};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `e^{i x}`
pub(crate) fn cis(x: f64) -> Complex64 {
    use crate::float::Float;
    Complex64::new(Float::cos(x), Float::sin(x))
}
