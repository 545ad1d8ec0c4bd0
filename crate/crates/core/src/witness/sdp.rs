//! Primal-dual interior-point method for small block SDPs over complex
//! Hermitian matrices.
//!
//! Dual form solved:   maximize `b^T y`  s.t. `Z = C - sum_j y_j A_j >= 0`.
//! Primal counterpart: minimize `<C, X>` s.t. `<A_j, X> = b_j`, `X >= 0`.
//!
//! Inner products are `Re Tr(A B)`. Search directions are HKM with a Mehrotra
//! predictor-corrector, started from an infeasible scaled identity.

use alloc::vec;
use alloc::vec::Vec;

use crate::float::Float;
use crate::linalg::{
    factor_spd_in_place, hermitian_eigenvalues_unchecked, solve_factored, CMatrix, Complex64, RealMatrix,
};

/// Sparse Hermitian matrix; every stored entry is listed explicitly.
#[derive(Debug, Clone, Default)]
pub(crate) struct SparseHerm {
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl SparseHerm {
    pub fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let v = m[(r, c)];
                if v.re != 0.0 || v.im != 0.0 {
                    entries.push((r, c, v));
                }
            }
        }
        SparseHerm { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Re Tr(self * m)`
    fn inner(&self, m: &CMatrix) -> f64 {
        self.entries.iter().map(|&(r, c, v)| (v * m[(c, r)]).re).sum()
    }

    /// `out += s * self`
    fn add_to(&self, out: &mut CMatrix, s: f64) {
        for &(r, c, v) in &self.entries {
            out[(r, c)] += v * s;
        }
    }

    fn frobenius_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SdpProblem {
    pub block_dims: Vec<usize>,
    pub c: Vec<CMatrix>,
    /// `a[j][block]`
    pub a: Vec<Vec<SparseHerm>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SdpOutcome {
    Converged,
    MaxIterations,
    /// The dual objective passed the caller's cap, so the primal is empty.
    DualUnbounded,
    /// The iteration could not continue (a lost factorization or a stalled
    /// step); the last iterate is returned.
    Stalled,
}

#[derive(Debug, Clone)]
pub(crate) struct SdpSolution {
    pub y: Vec<f64>,
    pub x: Vec<CMatrix>,
    pub outcome: SdpOutcome,
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct IpmSettings {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub step_fraction: f64,
    pub dual_objective_cap: Option<f64>,
}

fn herm_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.trace_product(b).re
}

/// Largest `t` with `M + t D >= 0`, given the Cholesky factor of `M`.
fn max_step(chol: &CMatrix, d: &CMatrix) -> f64 {
    let linv = chol.lower_triangular_inverse();
    let s = &(&linv * d) * &linv.adjoint();
    let lmin = hermitian_eigenvalues_unchecked(&s).last().copied().unwrap_or(0.0);
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

impl SdpProblem {
    fn m(&self) -> usize {
        self.b.len()
    }

    /// `A(X)_j = sum_blocks <A_j, X>`
    fn apply(&self, x: &[CMatrix]) -> Vec<f64> {
        self.a
            .iter()
            .map(|aj| aj.iter().zip(x).map(|(a, xb)| a.inner(xb)).sum())
            .collect()
    }

    /// `sum_j y_j A_j` per block.
    fn adjoint(&self, y: &[f64]) -> Vec<CMatrix> {
        let mut out: Vec<CMatrix> = self.block_dims.iter().map(|&d| CMatrix::zeros(d, d)).collect();
        for (aj, &yj) in self.a.iter().zip(y) {
            if yj != 0.0 {
                for (a, o) in aj.iter().zip(out.iter_mut()) {
                    a.add_to(o, yj);
                }
            }
        }
        out
    }

    /// Schur complement `M_jk = sum_blocks Re Tr(A_j X A_k Z^{-1})`.
    fn schur(&self, x: &[CMatrix], zinv: &[CMatrix]) -> RealMatrix {
        let m = self.m();
        let mut schur = RealMatrix::zeros(m);
        for (blk, &d) in self.block_dims.iter().enumerate() {
            let (xb, zb) = (&x[blk], &zinv[blk]);
            for j in 0..m {
                let aj = &self.a[j][blk];
                if aj.is_empty() {
                    continue;
                }
                // G = X A_j Z^{-1}, touching only the columns A_j uses.
                let mut xa = CMatrix::zeros(d, d);
                let mut used = vec![false; d];
                for &(p, q, v) in &aj.entries {
                    used[q] = true;
                    for r in 0..d {
                        xa[(r, q)] += xb[(r, p)] * v;
                    }
                }
                let mut g = CMatrix::zeros(d, d);
                for r in 0..d {
                    for q in (0..d).filter(|&q| used[q]) {
                        let w = xa[(r, q)];
                        if w.re == 0.0 && w.im == 0.0 {
                            continue;
                        }
                        for s in 0..d {
                            g[(r, s)] += w * zb[(q, s)];
                        }
                    }
                }
                for k in j..m {
                    let ak = &self.a[k][blk];
                    if ak.is_empty() {
                        continue;
                    }
                    let v = ak.inner(&g);
                    schur.data[j * m + k] += v;
                }
            }
        }
        for j in 0..m {
            for k in 0..j {
                schur.data[j * m + k] = schur.data[k * m + j];
            }
        }
        schur
    }

    pub fn solve(&self, settings: &IpmSettings) -> SdpSolution {
        let m = self.m();
        let nb = self.block_dims.len();
        let n_total: usize = self.block_dims.iter().sum();
        let b_norm = Float::sqrt(self.b.iter().map(|v| v * v).sum::<f64>());
        let c_norm = Float::sqrt(self.c.iter().map(|c| c.frobenius_norm().powi(2)).sum::<f64>());
        let a_norm_max = self
            .a
            .iter()
            .map(|aj| Float::sqrt(aj.iter().map(SparseHerm::frobenius_sqr).sum::<f64>()))
            .fold(0.0, f64::max);

        let sqrt_n = Float::sqrt(n_total as f64);
        let xi = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(aj, bj)| {
                (1.0 + bj.abs()) / (1.0 + Float::sqrt(aj.iter().map(SparseHerm::frobenius_sqr).sum::<f64>()))
            })
            .fold(sqrt_n.max(10.0), f64::max);
        let eta = sqrt_n.max(10.0).max(c_norm).max(a_norm_max);

        let mut x: Vec<CMatrix> = self
            .block_dims
            .iter()
            .map(|&d| CMatrix::identity(d).scale(xi))
            .collect();
        let mut z: Vec<CMatrix> = self
            .block_dims
            .iter()
            .map(|&d| CMatrix::identity(d).scale(eta))
            .collect();
        let mut y = vec![0.0; m];

        let mut sol = SdpSolution {
            y: y.clone(),
            x: x.clone(),
            outcome: SdpOutcome::MaxIterations,
            iterations: 0,
            primal_objective: 0.0,
            dual_objective: 0.0,
            relative_gap: f64::INFINITY,
            primal_infeasibility: f64::INFINITY,
            dual_infeasibility: f64::INFINITY,
        };

        for iter in 0..=settings.max_iterations {
            let ax = self.apply(&x);
            let rp: Vec<f64> = self.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let aty = self.adjoint(&y);
            let rd: Vec<CMatrix> = (0..nb).map(|k| &(&self.c[k] - &z[k]) - &aty[k]).collect();
            let pobj: f64 = (0..nb).map(|k| herm_inner(&self.c[k], &x[k])).sum();
            let dobj: f64 = self.b.iter().zip(&y).map(|(b, y)| b * y).sum();
            let xz: f64 = (0..nb).map(|k| herm_inner(&x[k], &z[k])).sum();
            let mu = xz / n_total as f64;

            sol.y.clone_from(&y);
            sol.x.clone_from(&x);
            sol.iterations = iter;
            sol.primal_objective = pobj;
            sol.dual_objective = dobj;
            sol.relative_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            sol.primal_infeasibility = Float::sqrt(rp.iter().map(|v| v * v).sum::<f64>()) / (1.0 + b_norm);
            sol.dual_infeasibility =
                Float::sqrt(rd.iter().map(|r| r.frobenius_norm().powi(2)).sum::<f64>()) / (1.0 + c_norm);

            let tol = settings.tolerance;
            if sol.relative_gap < tol && sol.primal_infeasibility < tol && sol.dual_infeasibility < tol {
                sol.outcome = SdpOutcome::Converged;
                return sol;
            }
            if let Some(cap) = settings.dual_objective_cap {
                if dobj > cap && sol.dual_infeasibility < tol.sqrt() {
                    sol.outcome = SdpOutcome::DualUnbounded;
                    return sol;
                }
            }
            if iter == settings.max_iterations {
                break;
            }

            let (Some(x_chol), Some(z_chol)) = (
                x.iter().map(CMatrix::cholesky).collect::<Option<Vec<_>>>(),
                z.iter().map(CMatrix::cholesky).collect::<Option<Vec<_>>>(),
            ) else {
                sol.outcome = SdpOutcome::Stalled;
                return sol;
            };
            let zinv: Vec<CMatrix> = z_chol
                .iter()
                .map(|l| {
                    let li = l.lower_triangular_inverse();
                    &li.adjoint() * &li
                })
                .collect();

            let mut schur = self.schur(&x, &zinv);
            if factor_spd_in_place(&mut schur).is_none() {
                sol.outcome = SdpOutcome::Stalled;
                return sol;
            }

            // X Rd Z^{-1} is shared by predictor and corrector.
            let x_rd_zinv: Vec<CMatrix> = (0..nb).map(|k| &(&x[k] * &rd[k]) * &zinv[k]).collect();
            let a_x_rd_zinv = self.apply(&x_rd_zinv);

            let direction = |rc_zinv: &[CMatrix]| {
                let a_rc = self.apply(rc_zinv);
                let mut dy: Vec<f64> = (0..m).map(|j| rp[j] - a_rc[j] + a_x_rd_zinv[j]).collect();
                solve_factored(&schur, &mut dy);
                let atdy = self.adjoint(&dy);
                let dz: Vec<CMatrix> = (0..nb).map(|k| &rd[k] - &atdy[k]).collect();
                let dx: Vec<CMatrix> = (0..nb)
                    .map(|k| (&rc_zinv[k] - &(&(&x[k] * &dz[k]) * &zinv[k])).hermitian_part())
                    .collect();
                (dx, dy, dz)
            };
            let steps = |dx: &[CMatrix], dz: &[CMatrix]| {
                let ap = (0..nb)
                    .map(|k| max_step(&x_chol[k], &dx[k]))
                    .fold(f64::INFINITY, f64::min);
                let ad = (0..nb)
                    .map(|k| max_step(&z_chol[k], &dz[k]))
                    .fold(f64::INFINITY, f64::min);
                (
                    (settings.step_fraction * ap).min(1.0),
                    (settings.step_fraction * ad).min(1.0),
                )
            };

            // Predictor: target X Z = 0.
            let neg_x: Vec<CMatrix> = x.iter().map(|xk| xk.scale(-1.0)).collect();
            let (dx_p, _, dz_p) = direction(&neg_x);
            let (ap, ad) = steps(&dx_p, &dz_p);
            let xz_pred: f64 = (0..nb)
                .map(|k| {
                    let xn = &x[k] + &dx_p[k].scale(ap);
                    let zn = &z[k] + &dz_p[k].scale(ad);
                    herm_inner(&xn, &zn)
                })
                .sum();
            let sigma = (xz_pred / xz).clamp(0.0, 1.0).powi(3);

            // Corrector: target X Z = sigma mu I - dXp dZp.
            let rc_zinv: Vec<CMatrix> = (0..nb)
                .map(|k| {
                    let d = self.block_dims[k];
                    let mut rc = &(&x[k] * &z[k]).scale(-1.0) - &(&dx_p[k] * &dz_p[k]);
                    for i in 0..d {
                        rc[(i, i)] += Complex64::new(sigma * mu, 0.0);
                    }
                    &rc * &zinv[k]
                })
                .collect();
            let (dx, dy, dz) = direction(&rc_zinv);
            let (ap, ad) = steps(&dx, &dz);
            if ap < 1e-12 && ad < 1e-12 {
                sol.outcome = SdpOutcome::Stalled;
                return sol;
            }
            for k in 0..nb {
                x[k].add_scaled(ap, &dx[k]);
                z[k].add_scaled(ad, &dz[k]);
                x[k] = x[k].hermitian_part();
                z[k] = z[k].hermitian_part();
            }
            for (yj, dyj) in y.iter_mut().zip(&dy) {
                *yj += ad * dyj;
            }
        }
        sol.outcome = SdpOutcome::MaxIterations;
        sol
    }
}
