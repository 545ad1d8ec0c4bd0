//! Certified lower bounds on the logarithmic negativity from incomplete,
//! local measurement data.
//!
//! For any Hermitian `H` with `-I <= H <= I` and reals `nu_i`, `nu_0` with
//! `H^{T_s} >= nu_0 I + sum_i nu_i M_i`, every state reproducing the data
//! `Tr(rho M_i) = m_i` satisfies
//! `||rho^{T_s}||_1 >= Tr(H^{T_s} rho) >= nu_0 + sum_i nu_i m_i`.
//! [`negativity_lower_bound`] maximizes the right-hand side with an
//! interior-point solver and then repairs the iterate into an exactly
//! feasible pair, so the bound never depends on the solver having
//! converged. `nu_0` carries the normalization `Tr(rho) = 1`.

mod operators;
mod sdp;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::entanglement::partial_transpose_matrix;
use crate::error::{Error, Result};
use crate::float::Float;
use crate::linalg::{hermitian_eigenvalues_unchecked, CMatrix, Complex64};
use crate::state::DensityMatrix;

pub use self::operators::{
    adaptive_measurement_set, embed_pathway_state, local_tomography_basis, oam_projectors,
    superposition_projectors, tomographically_complete_set, MeasurementOperator, SuperpositionSpec,
};
use self::sdp::{IpmSettings, SdpOutcome, SdpProblem, SparseHerm};

/// Expectation values must be real to within this.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative gap and infeasibility target of the interior-point solver.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Relative tolerance for treating a measurement as a linear combination
    /// of the others.
    pub dependency_tolerance: f64,
    /// Largest mismatch allowed between the data of a dependent measurement
    /// and the combination of the data it depends on.
    pub consistency_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-8,
            max_iterations: 120,
            step_fraction: 0.95,
            dependency_tolerance: 1e-9,
            consistency_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    /// Converged to the requested tolerance.
    Optimal,
    /// A valid certificate from an iterate that did not fully converge.
    Feasible,
    /// No unit-trace state reproduces the data.
    Infeasible,
    /// Iteration budget exhausted; the best iterate was repaired.
    MaxIterations,
}

impl SolverStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::Feasible => "feasible",
            SolverStatus::Infeasible => "infeasible",
            SolverStatus::MaxIterations => "max-iterations",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "optimal" => SolverStatus::Optimal,
            "feasible" => SolverStatus::Feasible,
            "infeasible" => SolverStatus::Infeasible,
            "max-iterations" => SolverStatus::MaxIterations,
            _ => return None,
        })
    }
}

/// Dual-feasible `(H, nu)` and the lower bound it certifies.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCertificate {
    /// `(d_s, d_i)` of the measured system.
    pub dims: (usize, usize),
    pub h: CMatrix,
    /// One coefficient per measurement operator.
    pub nu: Vec<f64>,
    /// Coefficient of the identity (the trace condition `Tr(rho) = 1`).
    pub trace_multiplier: f64,
    /// `trace_multiplier + sum_i nu_i m_i`, a lower bound on `||rho^{T_s}||_1`.
    pub objective: f64,
    /// `log2(max(1, objective))`
    pub bound: f64,
    pub status: SolverStatus,
    pub iterations: usize,
    /// Relative primal-dual gap of the final interior-point iterate.
    pub duality_gap: f64,
}

impl WitnessCertificate {
    /// `H = 0`, `nu = 0`: always valid, certifies nothing.
    pub fn trivial(dims: (usize, usize), measurements: usize, status: SolverStatus) -> Self {
        let d = dims.0 * dims.1;
        WitnessCertificate {
            dims,
            h: CMatrix::zeros(d, d),
            nu: vec![0.0; measurements],
            trace_multiplier: 0.0,
            objective: 0.0,
            bound: 0.0,
            status,
            iterations: 0,
            duality_gap: f64::INFINITY,
        }
    }
}

/// `log2(max(1, x))`
pub fn bound_from_objective(objective: f64) -> f64 {
    Float::log2(objective.max(1.0))
}

/// `Tr(M_i rho)` for each operator.
pub fn expectation_values(state: &DensityMatrix, ops: &[MeasurementOperator]) -> Result<Vec<f64>> {
    ops.iter()
        .map(|op| {
            if op.matrix.rows() != state.dim() {
                return Err(Error::invalid(
                    "ops",
                    format!(
                        "operator `{}` has dimension {} but the state has {}",
                        op.label,
                        op.matrix.rows(),
                        state.dim()
                    ),
                ));
            }
            let z = op.matrix.trace_product(state.matrix());
            if z.im.abs() > EXPECTATION_IMAG_TOL {
                return Err(Error::NumericalInconsistency {
                    quantity: "Im Tr(M rho)",
                    value: z.im,
                });
            }
            Ok(z.re)
        })
        .collect()
}

fn check_inputs(ops: &[MeasurementOperator], data: &[f64]) -> Result<(usize, usize)> {
    let first = ops
        .first()
        .ok_or_else(|| Error::invalid("ops", "no measurement operators"))?;
    if ops.len() != data.len() {
        return Err(Error::invalid(
            "m",
            format!("{} operators but {} expectation values", ops.len(), data.len()),
        ));
    }
    let dims = first.dims;
    for op in ops {
        if op.dims != dims {
            return Err(Error::invalid(
                "ops",
                format!(
                    "operator `{}` has dims {:?}, expected {dims:?}",
                    op.label, op.dims
                ),
            ));
        }
        let defect = op.matrix.hermiticity_defect();
        if defect > operators::OPERATOR_HERMITICITY_TOL {
            return Err(Error::invalid(
                "ops",
                format!("operator `{}` is not Hermitian ({defect:e})", op.label),
            ));
        }
    }
    if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid("m", format!("non-finite expectation value {bad}")));
    }
    Ok(dims)
}

/// Identity followed by the measurements, reduced to a linearly independent
/// subset. Returns the kept indices (0 is the identity, `i + 1` is `ops[i]`),
/// or the index of a measurement whose data contradicts the others.
fn independent_subset(
    ops: &[MeasurementOperator],
    data: &[f64],
    identity: &CMatrix,
    cfg: &SolverConfig,
) -> core::result::Result<Vec<usize>, usize> {
    let all: Vec<&CMatrix> = core::iter::once(identity)
        .chain(ops.iter().map(|o| &o.matrix))
        .collect();
    let values: Vec<f64> = core::iter::once(1.0).chain(data.iter().copied()).collect();
    let gram = |a: usize, b: usize| all[a].trace_product(all[b]).re;

    let mut kept: Vec<usize> = Vec::new();
    // Rows of the Cholesky factor of the Gram matrix of `kept`.
    let mut chol: Vec<Vec<f64>> = Vec::new();
    for cand in 0..all.len() {
        let g: Vec<f64> = kept.iter().map(|&k| gram(k, cand)).collect();
        let mut w = vec![0.0; kept.len()];
        for i in 0..kept.len() {
            let s: f64 = (0..i).map(|k| chol[i][k] * w[k]).sum();
            w[i] = (g[i] - s) / chol[i][i];
        }
        let self_norm = gram(cand, cand);
        let resid = self_norm - w.iter().map(|v| v * v).sum::<f64>();
        if resid > cfg.dependency_tolerance * self_norm.max(1e-300) {
            let mut row = w;
            row.push(Float::sqrt(resid));
            chol.push(row);
            kept.push(cand);
        } else {
            // cand = sum_k coef_k kept_k with L L^T coef = g, L w = g.
            let mut coef = w;
            for i in (0..kept.len()).rev() {
                let s: f64 = (i + 1..kept.len()).map(|k| chol[k][i] * coef[k]).sum();
                coef[i] = (coef[i] - s) / chol[i][i];
            }
            let predicted: f64 = coef.iter().zip(&kept).map(|(c, &k)| c * values[k]).sum();
            let scale = 1.0 + values[cand].abs() + coef.iter().map(|c| c.abs()).sum::<f64>();
            if (predicted - values[cand]).abs() > cfg.consistency_tolerance * scale {
                return Err(cand);
            }
        }
    }
    Ok(kept)
}

/// Sparse Hermitian basis of `d x d` matrices: `E_pp`, then
/// `E_pq + E_qp` and `i E_pq - i E_qp` for `p < q`.
fn hermitian_basis(d: usize) -> Vec<SparseHerm> {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(d * d);
    for p in 0..d {
        out.push(SparseHerm {
            entries: vec![(p, p, one)],
        });
    }
    for p in 0..d {
        for q in p + 1..d {
            out.push(SparseHerm {
                entries: vec![(p, q, one), (q, p, one)],
            });
            out.push(SparseHerm {
                entries: vec![(p, q, i), (q, p, -i)],
            });
        }
    }
    out
}

/// Partial transpose of a sparse operator on `C^{d_s} (x) C^{d_i}`.
fn sparse_partial_transpose(m: &SparseHerm, d_i: usize) -> SparseHerm {
    SparseHerm {
        entries: m
            .entries
            .iter()
            .map(|&(r, c, v)| {
                let (j, a) = (r / d_i, r % d_i);
                let (k, b) = (c / d_i, c % d_i);
                (k * d_i + a, j * d_i + b, v)
            })
            .collect(),
    }
}

/// `H^{T_s} - nu_0 I - sum_i nu_i M_i`
fn witness_slack(
    h: &CMatrix,
    dims: (usize, usize),
    nu0: f64,
    nu: &[f64],
    ops: &[MeasurementOperator],
) -> CMatrix {
    let mut s = partial_transpose_matrix(h, dims.0, dims.1).expect("dims checked");
    for k in 0..s.rows() {
        s[(k, k)] -= Complex64::new(nu0, 0.0);
    }
    for (op, &v) in ops.iter().zip(nu) {
        if v != 0.0 {
            s.add_scaled(-v, &op.matrix);
        }
    }
    s.hermitian_part()
}

fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues_unchecked(m).last().copied().unwrap_or(0.0)
}

fn operator_norm(m: &CMatrix) -> f64 {
    let ev = hermitian_eigenvalues_unchecked(&m.hermitian_part());
    ev.first()
        .map(|a| a.abs())
        .unwrap_or(0.0)
        .max(ev.last().map(|a| a.abs()).unwrap_or(0.0))
}

/// Extra slack put into the witness constraint by the repair step.
const REPAIR_MARGIN: f64 = 1e-11;

/// Best lower bound on the logarithmic negativity of any state with
/// `Tr(M_i rho) = m_i`, as a verifiable certificate.
pub fn negativity_lower_bound(
    ops: &[MeasurementOperator],
    data: &[f64],
    cfg: &SolverConfig,
) -> Result<WitnessCertificate> {
    let dims = check_inputs(ops, data)?;
    let d = dims.0 * dims.1;
    let identity = CMatrix::identity(d);

    let kept = match independent_subset(ops, data, &identity, cfg) {
        Ok(kept) => kept,
        Err(_) => {
            return Ok(WitnessCertificate::trivial(
                dims,
                ops.len(),
                SolverStatus::Infeasible,
            ))
        }
    };

    // y = [multipliers of kept constraints..., coordinates of H...]
    let basis = hermitian_basis(d);
    let empty = SparseHerm::default();
    let mut a: Vec<Vec<SparseHerm>> = Vec::with_capacity(kept.len() + basis.len());
    let mut b = Vec::with_capacity(a.capacity());
    for &k in &kept {
        let (m, v) = if k == 0 {
            (SparseHerm::from_dense(&identity), 1.0)
        } else {
            (SparseHerm::from_dense(&ops[k - 1].matrix), data[k - 1])
        };
        a.push(vec![m, empty.clone(), empty.clone()]);
        b.push(v);
    }
    for e in &basis {
        let mut pt = sparse_partial_transpose(e, dims.1);
        pt.entries.iter_mut().for_each(|t| t.2 = -t.2);
        let neg = SparseHerm {
            entries: e.entries.iter().map(|&(r, c, v)| (r, c, -v)).collect(),
        };
        a.push(vec![pt, e.clone(), neg]);
        b.push(0.0);
    }
    let problem = SdpProblem {
        block_dims: vec![d, d, d],
        c: vec![CMatrix::zeros(d, d), identity.clone(), identity.clone()],
        a,
        b,
    };
    // No state has trace norm of the partial transpose above min(d_s, d_i).
    let cap = dims.0.min(dims.1) as f64;
    let settings = IpmSettings {
        tolerance: cfg.tolerance,
        max_iterations: cfg.max_iterations,
        step_fraction: cfg.step_fraction,
        dual_objective_cap: Some(2.0 * cap + 1.0),
    };
    let sol = problem.solve(&settings);

    // Unpack and repair into an exactly feasible pair.
    let mut nu = vec![0.0; ops.len()];
    let mut nu0 = 0.0;
    for (slot, &k) in kept.iter().enumerate() {
        if k == 0 {
            nu0 = sol.y[slot];
        } else {
            nu[k - 1] = sol.y[slot];
        }
    }
    let mut h = CMatrix::zeros(d, d);
    for (e, &coord) in basis.iter().zip(&sol.y[kept.len()..]) {
        for &(r, c, v) in &e.entries {
            h[(r, c)] += v * coord;
        }
    }
    let h_norm = operator_norm(&h);
    if h_norm > 1.0 {
        h = h.scale(1.0 / h_norm);
    }
    let lmin = min_eigenvalue(&witness_slack(&h, dims, nu0, &nu, ops));
    if lmin < REPAIR_MARGIN {
        nu0 += lmin - REPAIR_MARGIN;
    }
    let objective = nu0 + nu.iter().zip(data).map(|(n, m)| n * m).sum::<f64>();

    let status = match sol.outcome {
        SdpOutcome::DualUnbounded => SolverStatus::Infeasible,
        _ if objective > cap * (1.0 + 1e-6) => SolverStatus::Infeasible,
        SdpOutcome::Converged => SolverStatus::Optimal,
        SdpOutcome::MaxIterations => SolverStatus::MaxIterations,
        SdpOutcome::Stalled => SolverStatus::Feasible,
    };
    Ok(WitnessCertificate {
        dims,
        h,
        nu,
        trace_multiplier: nu0,
        objective,
        bound: bound_from_objective(objective),
        status,
        iterations: sol.iterations,
        duality_gap: sol.relative_gap,
    })
}

/// Independent re-check of a certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateCheck {
    pub passed: bool,
    /// `||H||_inf`
    pub operator_norm: f64,
    /// Smallest eigenvalue of `H^{T_s} - nu_0 I - sum_i nu_i M_i`.
    pub min_slack_eigenvalue: f64,
    /// `|stored objective - recomputed objective|`
    pub objective_defect: f64,
    /// `|stored bound - log2(max(1, recomputed objective))|`
    pub bound_defect: f64,
    /// Human-readable reasons for a failure.
    pub problems: Vec<String>,
}

/// Re-checks `||H|| <= 1 + tol`, `H^{T_s} - nu_0 I - sum nu_i M_i >= -tol` and
/// the stored objective and bound, from the certificate fields alone.
pub fn verify_certificate(
    cert: &WitnessCertificate,
    ops: &[MeasurementOperator],
    data: &[f64],
    tol: f64,
) -> CertificateCheck {
    let mut problems = Vec::new();
    let d = cert.dims.0 * cert.dims.1;
    let shapes_ok = cert.h.rows() == d
        && cert.h.cols() == d
        && cert.nu.len() == ops.len()
        && data.len() == ops.len()
        && ops.iter().all(|o| o.dims == cert.dims && o.matrix.rows() == d);
    if !shapes_ok {
        problems.push(String::from(
            "certificate, operators and data have inconsistent shapes",
        ));
        return CertificateCheck {
            passed: false,
            operator_norm: f64::NAN,
            min_slack_eigenvalue: f64::NAN,
            objective_defect: f64::NAN,
            bound_defect: f64::NAN,
            problems,
        };
    }
    let herm_defect = cert.h.hermiticity_defect();
    if herm_defect > tol {
        problems.push(format!("H is not Hermitian (defect {herm_defect:e})"));
    }
    let norm = operator_norm(&cert.h);
    if norm > 1.0 + tol {
        problems.push(format!("||H|| = {norm} exceeds 1"));
    }
    let slack = min_eigenvalue(&witness_slack(
        &cert.h,
        cert.dims,
        cert.trace_multiplier,
        &cert.nu,
        ops,
    ));
    if slack < -tol {
        problems.push(format!(
            "witness constraint violated: smallest eigenvalue {slack:e}"
        ));
    }
    let objective = cert.trace_multiplier + cert.nu.iter().zip(data).map(|(n, m)| n * m).sum::<f64>();
    let objective_defect = (objective - cert.objective).abs();
    if objective_defect > tol * (1.0 + objective.abs()) {
        problems.push(format!(
            "stored objective {} but data give {objective}",
            cert.objective
        ));
    }
    let bound_defect = (bound_from_objective(objective) - cert.bound).abs();
    if bound_defect > tol {
        problems.push(format!(
            "stored bound {} is not log2(max(1, {objective}))",
            cert.bound
        ));
    }
    CertificateCheck {
        passed: problems.is_empty(),
        operator_norm: norm,
        min_slack_eigenvalue: slack,
        objective_defect,
        bound_defect,
        problems,
    }
}
