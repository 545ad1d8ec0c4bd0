#![allow(dead_code)]

use std::f64::consts::PI;

use angular_qudit_core::entanglement::partial_transpose_matrix;
use angular_qudit_core::linalg::hermitian_eigen;
use angular_qudit_core::{Basis, CMatrix, Complex64, DensityMatrix, SpiralSpectrum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gaussian_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    (r * (2.0 * PI * u2).cos(), r * (2.0 * PI * u2).sin())
}

pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let (a, b) = gaussian_pair(rng);
        c(a, b)
    })
}

/// `G G^dagger / Tr` for a `d x rank` Gaussian `G`.
pub fn random_density_matrix(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> CMatrix {
    let g = ginibre(rng, d, rank);
    let rho = &g * &g.adjoint();
    let t = rho.trace().re;
    rho.scale(1.0 / t).hermitian_part()
}

pub fn random_state(rng: &mut ChaCha8Rng, dims: (usize, usize), rank: usize) -> DensityMatrix {
    let m = random_density_matrix(rng, dims.0 * dims.1, rank);
    DensityMatrix::new(
        m,
        Basis::Product {
            signal: dims.0,
            idler: dims.1,
        },
    )
    .unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    ginibre(rng, d, d).hermitian_part()
}

/// Gram-Schmidt on the columns of a Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let g = ginibre(rng, d, d);
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..d {
        let mut v: Vec<Complex64> = (0..d).map(|i| g[(i, j)]).collect();
        for u in &cols {
            let p: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= p * y;
            }
        }
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        cols.push(v);
    }
    CMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Mixture of random product states.
pub fn random_separable(rng: &mut ChaCha8Rng, dims: (usize, usize), terms: usize) -> DensityMatrix {
    let d = dims.0 * dims.1;
    let mut acc = CMatrix::zeros(d, d);
    let mut total = 0.0;
    for _ in 0..terms {
        let w: f64 = rng.gen_range(0.05..1.0);
        let a = random_density_matrix(rng, dims.0, 1);
        let b = random_density_matrix(rng, dims.1, 1);
        acc.add_scaled(w, &a.kron(&b));
        total += w;
    }
    DensityMatrix::new(
        acc.scale(1.0 / total).hermitian_part(),
        Basis::Product {
            signal: dims.0,
            idler: dims.1,
        },
    )
    .unwrap()
}

/// `sum_k |lambda_k|` of the partial transpose, through an eigendecomposition
/// of `(rho^T)^dagger rho^T` so it does not share code with the library's
/// trace norm.
pub fn log_negativity_oracle(rho: &CMatrix, dims: (usize, usize)) -> f64 {
    let pt = partial_transpose_matrix(rho, dims.0, dims.1).unwrap();
    let sq = &pt.adjoint() * &pt;
    let norm: f64 = hermitian_eigen(&sq.hermitian_part())
        .values
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .sum();
    norm.log2().max(0.0)
}

pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

pub fn envelope(spectrum: &SpiralSpectrum, alpha: f64, ls: i64, li: i64) -> f64 {
    let mut acc = c(0.0, 0.0);
    for l in -spectrum.truncation()..=spectrum.truncation() {
        acc +=
            spectrum.amplitude(l) * sinc((ls - l) as f64 * alpha / 2.0) * sinc((li + l) as f64 * alpha / 2.0);
    }
    acc.norm_sqr()
}

/// Two-slit rate: `envelope * (r00 + r11 + 2 sqrt(r00 r11) V cos(beta (l_s + l_i) + theta))`.
#[allow(clippy::too_many_arguments)]
pub fn two_slit_rate(
    spectrum: &SpiralSpectrum,
    alpha: f64,
    beta: f64,
    r00: f64,
    visibility: f64,
    theta: f64,
    ls: i64,
    li: i64,
) -> f64 {
    let r11 = 1.0 - r00;
    let s = (ls + li) as f64;
    envelope(spectrum, alpha, ls, li)
        * (r00 + r11 + 2.0 * (r00 * r11).sqrt() * visibility * (beta * s + theta).cos())
}

/// Roots of the characteristic polynomial of a Hermitian 3x3 matrix,
/// descending, by the trigonometric form of the cubic formula.
pub fn cubic_eigenvalues(a: &CMatrix) -> [f64; 3] {
    let e = |r: usize, col: usize| a[(r, col)];
    let tr = (e(0, 0) + e(1, 1) + e(2, 2)).re;
    let minors = (e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0))
        + (e(0, 0) * e(2, 2) - e(0, 2) * e(2, 0))
        + (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1));
    let det = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
        - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
    // x^3 - tr x^2 + minors x - det, shifted to t^3 + p t + q with x = t + tr/3.
    let (b, cc, d) = (-tr, minors.re, -det.re);
    let p = cc - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
    let shift = -b / 3.0;
    if p.abs() < 1e-300 {
        return [shift; 3];
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut roots = [0.0; 3];
    for (k, r) in roots.iter_mut().enumerate() {
        *r = shift + m * (theta - 2.0 * PI * k as f64 / 3.0).cos();
    }
    roots.sort_by(|x, y| y.partial_cmp(x).unwrap());
    roots
}

/// `(1/sqrt(d)) sum_k |k>|k>` as a density matrix on `d x d`.
pub fn maximally_entangled(d: usize) -> DensityMatrix {
    let mut v = vec![c(0.0, 0.0); d * d];
    for k in 0..d {
        v[k * d + k] = c(1.0 / (d as f64).sqrt(), 0.0);
    }
    DensityMatrix::new(CMatrix::outer(&v, &v), Basis::Product { signal: d, idler: d }).unwrap()
}
