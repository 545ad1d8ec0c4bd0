//! Pathway-basis density matrices and their OAM representation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::Float;
use crate::linalg::{cis, hermitian_eigenvalues_unchecked, CMatrix, Complex64};
use crate::physics::{slit_amplitude, AngularMask, SpiralSpectrum};

/// Tolerances a [`DensityMatrix`] is held to on construction.
pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;

/// Smallest captured trace fraction [`pathway_to_oam`] accepts.
pub const MIN_CAPTURED_FRACTION: f64 = 0.5;

/// Extra OAM orders kept beyond the source truncation by default.
pub const DEFAULT_OAM_MARGIN: i64 = 15;

/// Labeled basis of a density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Reduced pathway basis `|s,n>|i,n>`, `n = 0..slits`. Not a tensor
    /// product; see [`DensityMatrix::to_bipartite`].
    PathwayDiagonal { slits: usize },
    /// Full pathway basis `|s,n>|i,m>` at index `n * idler + m`.
    Pathway { signal: usize, idler: usize },
    /// Truncated OAM basis `|l_s>|l_i>`, `|l| <= l_max`, at index
    /// `(l_s + l_max) * (2 l_max + 1) + (l_i + l_max)`.
    Oam { l_max: i64 },
    /// Unlabeled bipartite space.
    Product { signal: usize, idler: usize },
}

/// Label of one basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisLabel {
    /// Signal slit `n`, idler slit `m`.
    Pathway(usize, usize),
    /// Signal OAM `l_s`, idler OAM `l_i`.
    Oam(i64, i64),
    /// Plain local indices.
    Index(usize, usize),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match *self {
            Basis::PathwayDiagonal { slits } => slits,
            Basis::Pathway { signal, idler } | Basis::Product { signal, idler } => signal * idler,
            Basis::Oam { l_max } => {
                let side = (2 * l_max + 1) as usize;
                side * side
            }
        }
    }

    /// `(d_s, d_i)`, or `None` for the reduced pathway basis.
    pub fn bipartition(&self) -> Option<(usize, usize)> {
        match *self {
            Basis::PathwayDiagonal { .. } => None,
            Basis::Pathway { signal, idler } | Basis::Product { signal, idler } => Some((signal, idler)),
            Basis::Oam { l_max } => {
                let side = (2 * l_max + 1) as usize;
                Some((side, side))
            }
        }
    }

    pub fn labels(&self) -> Vec<BasisLabel> {
        match *self {
            Basis::PathwayDiagonal { slits } => (0..slits).map(|n| BasisLabel::Pathway(n, n)).collect(),
            Basis::Pathway { signal, idler } => (0..signal)
                .flat_map(|n| (0..idler).map(move |m| BasisLabel::Pathway(n, m)))
                .collect(),
            Basis::Oam { l_max } => (-l_max..=l_max)
                .flat_map(|ls| (-l_max..=l_max).map(move |li| BasisLabel::Oam(ls, li)))
                .collect(),
            Basis::Product { signal, idler } => (0..signal)
                .flat_map(|a| (0..idler).map(move |b| BasisLabel::Index(a, b)))
                .collect(),
        }
    }
}

/// Index of `(l_s, l_i)` in [`Basis::Oam`].
pub fn oam_index(l_max: i64, l_s: i64, l_i: i64) -> Option<usize> {
    if l_s.abs() > l_max || l_i.abs() > l_max {
        return None;
    }
    let side = 2 * l_max + 1;
    Some(((l_s + l_max) * side + (l_i + l_max)) as usize)
}

/// Hermitian, unit-trace, positive semidefinite operator on a labeled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    basis: Basis,
}

impl DensityMatrix {
    /// Validates against [`HERMITICITY_TOL`], [`TRACE_TOL`] and [`PSD_TOL`].
    pub fn new(matrix: CMatrix, basis: Basis) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != basis.dim() {
            return Err(Error::invalid(
                "matrix",
                format!(
                    "{}x{} matrix does not fit a basis of dimension {}",
                    matrix.rows(),
                    matrix.cols(),
                    basis.dim()
                ),
            ));
        }
        // A Cholesky factor of rho + tol I proves min eigenvalue >= -tol
        // without the cost of a full eigendecomposition.
        let mut shifted = matrix.hermitian_part();
        for k in 0..shifted.rows() {
            shifted[(k, k)] += Complex64::new(PSD_TOL, 0.0);
        }
        if shifted.cholesky().is_some() {
            return Self::from_congruence(matrix, basis);
        }
        let report = validate_density(&matrix, PSD_TOL);
        if report.hermiticity_defect > HERMITICITY_TOL {
            return Err(Error::invalid(
                "matrix",
                format!("not Hermitian (defect {:e})", report.hermiticity_defect),
            ));
        }
        if report.trace_defect > TRACE_TOL {
            return Err(Error::invalid(
                "matrix",
                format!("trace differs from 1 by {:e}", report.trace_defect),
            ));
        }
        if report.min_eigenvalue < -PSD_TOL {
            return Err(Error::InvalidState {
                min_eigenvalue: report.min_eigenvalue,
            });
        }
        Ok(DensityMatrix {
            matrix: matrix.hermitian_part(),
            basis,
        })
    }

    /// For matrices that are positive semidefinite by construction, such as
    /// `T rho T^dagger` of a valid `rho`: checks only Hermiticity and trace.
    pub(crate) fn from_congruence(matrix: CMatrix, basis: Basis) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::invalid(
                "matrix",
                format!("not Hermitian (defect {defect:e})"),
            ));
        }
        let trace = matrix.trace();
        let trace_defect = Float::sqrt((trace.re - 1.0).powi(2) + trace.im.powi(2));
        if trace_defect > TRACE_TOL {
            return Err(Error::invalid(
                "matrix",
                format!("trace differs from 1 by {trace_defect:e}"),
            ));
        }
        Ok(DensityMatrix {
            matrix: matrix.hermitian_part(),
            basis,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn bipartition(&self) -> Option<(usize, usize)> {
        self.basis.bipartition()
    }

    pub fn basis_labels(&self) -> Vec<BasisLabel> {
        self.basis.labels()
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.matrix[(r, c)]
    }

    /// `Tr(rho^2)`
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// The same operator in a genuine tensor-product basis. The reduced
    /// pathway basis `|s,n>|i,n>` is embedded into the full `N x N` pathway
    /// basis; other bases are returned unchanged.
    pub fn to_bipartite(&self) -> DensityMatrix {
        match self.basis {
            Basis::PathwayDiagonal { slits } => {
                let mut full = CMatrix::zeros(slits * slits, slits * slits);
                for n in 0..slits {
                    for m in 0..slits {
                        full[(n * slits + n, m * slits + m)] = self.matrix[(n, m)];
                    }
                }
                DensityMatrix {
                    matrix: full,
                    basis: Basis::Pathway {
                        signal: slits,
                        idler: slits,
                    },
                }
            }
            _ => self.clone(),
        }
    }

    /// Reinterprets a bipartite state on a plain product basis.
    pub fn with_basis(self, basis: Basis) -> Result<Self> {
        if basis.dim() != self.dim() {
            return Err(Error::invalid("basis", "dimension does not match the matrix"));
        }
        Ok(DensityMatrix { basis, ..self })
    }
}

/// Diagnostic defects of a candidate density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub passed: bool,
}

/// Checks Hermiticity, unit trace and positivity against a single tolerance.
pub fn validate_density(matrix: &CMatrix, tol: f64) -> ValidationReport {
    if !matrix.is_square() {
        return ValidationReport {
            hermiticity_defect: f64::INFINITY,
            trace_defect: f64::INFINITY,
            min_eigenvalue: f64::NEG_INFINITY,
            passed: false,
        };
    }
    let hermiticity_defect = matrix.hermiticity_defect();
    let trace = matrix.trace();
    let trace_defect = Float::sqrt((trace.re - 1.0).powi(2) + trace.im.powi(2));
    let min_eigenvalue = hermitian_eigenvalues_unchecked(matrix)
        .last()
        .copied()
        .unwrap_or(0.0);
    let passed = hermiticity_defect <= tol && trace_defect <= tol && min_eigenvalue >= -tol;
    ValidationReport {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
        passed,
    }
}

/// How the phase `theta` enters the off-diagonal coherences for `N > 2`.
/// Both agree for two slits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// `rho_nm ~ e^{i theta (m - n)}`: a pure state for `V = 1`.
    #[default]
    Ladder,
    /// `rho_nm ~ e^{i theta}` for every `n < m`. Not positive for large `V`
    /// with `theta != 0` and `N > 2`; such inputs are rejected.
    Uniform,
}

/// Parameters of the symmetric pathway state.
#[derive(Debug, Clone, PartialEq)]
pub struct PathwayStateParams {
    /// Diagonal populations `rho_nn`.
    pub weights: Vec<f64>,
    /// Degree of coherence of the off-diagonal terms.
    pub visibility: f64,
    /// Off-diagonal phase `theta`, radians.
    pub phase: f64,
    pub convention: PhaseConvention,
}

impl PathwayStateParams {
    /// Equal populations `1/N`.
    pub fn uniform(slits: usize, visibility: f64, phase: f64) -> Self {
        let w = if slits == 0 { 0.0 } else { 1.0 / slits as f64 };
        PathwayStateParams {
            weights: vec![w; slits],
            visibility,
            phase,
            convention: PhaseConvention::Ladder,
        }
    }

    pub fn with_convention(mut self, convention: PhaseConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn slits(&self) -> usize {
        self.weights.len()
    }

    fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::invalid("N", "need at least one slit"));
        }
        if self.weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::invalid("weights", "populations must be non-negative"));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "weights",
                format!("populations sum to {total}, not 1"),
            ));
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::invalid(
                "V",
                format!("visibility must lie in [0, 1], got {}", self.visibility),
            ));
        }
        if !self.phase.is_finite() {
            return Err(Error::invalid("theta", "phase must be finite"));
        }
        Ok(())
    }
}

/// Symmetric pathway state on the reduced basis `|s,n>|i,n>`:
/// `rho_nn = w_n`, `rho_nm = sqrt(w_n w_m) V e^{i phase(n,m)}`.
pub fn pure_qudit_state(params: &PathwayStateParams) -> Result<DensityMatrix> {
    params.validate()?;
    let n = params.slits();
    let w = &params.weights;
    let matrix = CMatrix::from_fn(n, n, |r, c| {
        if r == c {
            return Complex64::new(w[r], 0.0);
        }
        let mag = Float::sqrt(w[r] * w[c]) * params.visibility;
        let phase = match params.convention {
            PhaseConvention::Ladder => params.phase * (c as f64 - r as f64),
            PhaseConvention::Uniform if c > r => params.phase,
            PhaseConvention::Uniform => -params.phase,
        };
        cis(phase) * mag
    });
    DensityMatrix::new(matrix, Basis::PathwayDiagonal { slits: n })
}

/// Werner-like mixture over all `N x M` pathways:
/// `(1 - V) I / (N M) + V |u><u|`, `u_k = e^{i theta k} / sqrt(N M)`.
pub fn asymmetric_mixed_state(
    signal_slits: usize,
    idler_slits: usize,
    visibility: f64,
    phase: f64,
) -> Result<DensityMatrix> {
    if signal_slits == 0 || idler_slits == 0 {
        return Err(Error::invalid("N", "need at least one slit on each side"));
    }
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::invalid(
            "V",
            format!("visibility must lie in [0, 1], got {visibility}"),
        ));
    }
    let d = signal_slits * idler_slits;
    let inv = 1.0 / d as f64;
    let u: Vec<Complex64> = (0..d).map(|k| cis(phase * k as f64) * Float::sqrt(inv)).collect();
    let mut matrix = CMatrix::outer(&u, &u).scale(visibility);
    for k in 0..d {
        matrix[(k, k)] += Complex64::new((1.0 - visibility) * inv, 0.0);
    }
    DensityMatrix::new(
        matrix,
        Basis::Pathway {
            signal: signal_slits,
            idler: idler_slits,
        },
    )
}

/// Result of [`pathway_to_oam`].
#[derive(Debug, Clone)]
pub struct OamExpansion {
    /// Unit-trace state on [`Basis::Oam`].
    pub state: DensityMatrix,
    /// `1 / sqrt(untruncated norm)`: the constant that normalizes the
    /// expanded state over all OAM orders.
    pub normalization_constant: f64,
    /// Trace kept by the truncation before renormalizing.
    pub truncated_trace: f64,
    /// Trace over all OAM orders, in closed form.
    pub untruncated_trace: f64,
}

impl OamExpansion {
    /// Share of the untruncated trace inside `|l| <= l_out`.
    pub fn captured_fraction(&self) -> f64 {
        self.truncated_trace / self.untruncated_trace
    }
}

fn pathway_labels(
    state: &DensityMatrix,
    mask_s: &AngularMask,
    mask_i: &AngularMask,
) -> Result<Vec<(usize, usize)>> {
    if !mask_s.slits_disjoint() || !mask_i.slits_disjoint() {
        return Err(Error::invalid(
            "mask",
            "slits overlap; the OAM expansion needs disjoint slits",
        ));
    }
    match state.basis() {
        Basis::PathwayDiagonal { slits } => {
            if mask_s.slits() != slits || mask_i.slits() != slits {
                return Err(Error::invalid(
                    "mask",
                    format!("masks must have {slits} slits to match the state"),
                ));
            }
            Ok((0..slits).map(|n| (n, n)).collect())
        }
        Basis::Pathway { signal, idler } => {
            if mask_s.slits() != signal || mask_i.slits() != idler {
                return Err(Error::invalid(
                    "mask",
                    format!("masks must have ({signal}, {idler}) slits to match the state"),
                ));
            }
            Ok(state
                .basis_labels()
                .into_iter()
                .map(|l| match l {
                    BasisLabel::Pathway(n, m) => (n, m),
                    _ => unreachable!(),
                })
                .collect())
        }
        _ => Err(Error::invalid("state", "expected a pathway-basis state")),
    }
}

/// OAM amplitudes of one pathway ket on the truncated grid,
/// `sum_l c_l A_s,n(l' - l) A_i,m(l'' + l)`.
fn pathway_ket(
    mask_s: &AngularMask,
    mask_i: &AngularMask,
    spectrum: &SpiralSpectrum,
    (n, m): (usize, usize),
    l_out: i64,
) -> Vec<Complex64> {
    let side = (2 * l_out + 1) as usize;
    let mut ket = vec![Complex64::new(0.0, 0.0); side * side];
    for (l, c) in spectrum.iter() {
        let sig: Vec<Complex64> = (-l_out..=l_out)
            .map(|lp| slit_amplitude(mask_s.alpha(), mask_s.beta(), n, lp - l))
            .collect();
        let idl: Vec<Complex64> = (-l_out..=l_out)
            .map(|lpp| slit_amplitude(mask_i.alpha(), mask_i.beta(), m, lpp + l))
            .collect();
        for (a, s) in sig.iter().enumerate() {
            let cs = c * s;
            for (b, i) in idl.iter().enumerate() {
                ket[a * side + b] += cs * i;
            }
        }
    }
    ket
}

/// Squared norm of a pathway ket summed over every OAM order.
///
/// Slit indicators are idempotent, so Parseval collapses the infinite sums to
/// `sum_{l1,l2} c_l1 conj(c_l2) A_s,n(l2 - l1) A_i,m(l1 - l2)`.
fn pathway_norm_sqr(
    mask_s: &AngularMask,
    mask_i: &AngularMask,
    spectrum: &SpiralSpectrum,
    (n, m): (usize, usize),
) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (l1, c1) in spectrum.iter() {
        for (l2, c2) in spectrum.iter() {
            acc += c1
                * c2.conj()
                * slit_amplitude(mask_s.alpha(), mask_s.beta(), n, l2 - l1)
                * slit_amplitude(mask_i.alpha(), mask_i.beta(), m, l1 - l2);
        }
    }
    acc.re
}

/// `C = 1 / sqrt(sum_k rho_kk |t_k|^2)`: the constant that normalizes the
/// OAM expansion of `state` over all OAM orders.
pub fn normalization_constant(
    state: &DensityMatrix,
    mask_s: &AngularMask,
    mask_i: &AngularMask,
    spectrum: &SpiralSpectrum,
) -> Result<f64> {
    let labels = pathway_labels(state, mask_s, mask_i)?;
    let total: f64 = labels
        .iter()
        .enumerate()
        .map(|(k, &lab)| state.matrix()[(k, k)].re * pathway_norm_sqr(mask_s, mask_i, spectrum, lab))
        .sum();
    if !(total > 0.0) {
        return Err(Error::NumericalInconsistency {
            quantity: "untruncated trace",
            value: total,
        });
    }
    Ok(1.0 / Float::sqrt(total))
}

/// Expands a pathway-basis state into the OAM product basis with
/// `|l_s|, |l_i| <= l_out` and renormalizes it.
///
/// Distinct pathways pass through disjoint slits, so their kets are
/// orthogonal over the full OAM space and the untruncated trace is
/// `sum_k rho_kk |t_k|^2`.
pub fn pathway_to_oam(
    state: &DensityMatrix,
    mask_s: &AngularMask,
    mask_i: &AngularMask,
    spectrum: &SpiralSpectrum,
    l_out: i64,
) -> Result<OamExpansion> {
    if l_out < spectrum.truncation() {
        return Err(Error::invalid(
            "L_out",
            format!(
                "must be at least the spectrum truncation {}",
                spectrum.truncation()
            ),
        ));
    }
    let labels = pathway_labels(state, mask_s, mask_i)?;
    let kets: Vec<Vec<Complex64>> = labels
        .iter()
        .map(|&k| pathway_ket(mask_s, mask_i, spectrum, k, l_out))
        .collect();
    let dim = kets[0].len();
    let rho = state.matrix();

    // rho_oam = T rho T^dagger with the kets as columns of T.
    let mut t_rho = CMatrix::zeros(dim, labels.len());
    for r in 0..dim {
        for c in 0..labels.len() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, ket) in kets.iter().enumerate() {
                acc += ket[r] * rho[(k, c)];
            }
            t_rho[(r, c)] = acc;
        }
    }
    let mut out = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in r..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, ket) in kets.iter().enumerate() {
                acc += t_rho[(r, k)] * ket[c].conj();
            }
            out[(r, c)] = acc;
            out[(c, r)] = acc.conj();
        }
        out[(r, r)].im = 0.0;
    }

    let truncated_trace = out.trace().re;
    let c = normalization_constant(state, mask_s, mask_i, spectrum)?;
    let untruncated_trace = 1.0 / (c * c);
    let captured = truncated_trace / untruncated_trace;
    if !(captured >= MIN_CAPTURED_FRACTION) {
        return Err(Error::TruncationTooAggressive { captured, l_out });
    }
    let matrix = out.scale(1.0 / truncated_trace);
    let state = DensityMatrix::from_congruence(matrix, Basis::Oam { l_max: l_out })?;
    Ok(OamExpansion {
        state,
        normalization_constant: c,
        truncated_trace,
        untruncated_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::float::PI;

    #[test]
    fn two_slit_maximal_state() {
        let rho = pure_qudit_state(&PathwayStateParams::uniform(2, 1.0, 0.0)).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!((rho.entry(r, c) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn four_slit_phase_ladder() {
        let rho = pure_qudit_state(&PathwayStateParams::uniform(4, 1.0, PI / 4.0)).unwrap();
        for n in 0..4 {
            assert!((rho.entry(n, n).re - 0.25).abs() < 1e-15);
            for m in 0..4 {
                if m != n {
                    assert!((rho.entry(n, m).norm() - 0.25).abs() < 1e-15);
                }
            }
            if n + 1 < 4 {
                assert!((rho.entry(n, n + 1).arg() - PI / 4.0).abs() < 1e-14);
                assert!((rho.entry(n + 1, n).arg() + PI / 4.0).abs() < 1e-14);
            }
        }
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_phase_convention_is_rejected_when_not_positive() {
        let p = PathwayStateParams::uniform(4, 1.0, PI / 4.0).with_convention(PhaseConvention::Uniform);
        match pure_qudit_state(&p) {
            Err(Error::InvalidState { min_eigenvalue }) => assert!(min_eigenvalue < -0.1),
            other => panic!("{other:?}"),
        }
        let p = PathwayStateParams::uniform(2, 1.0, PI / 4.0).with_convention(PhaseConvention::Uniform);
        let ladder = pure_qudit_state(&PathwayStateParams::uniform(2, 1.0, PI / 4.0)).unwrap();
        assert_eq!(pure_qudit_state(&p).unwrap(), ladder);
    }

    #[test]
    fn dephased_state_is_diagonal() {
        let rho = pure_qudit_state(&PathwayStateParams::uniform(2, 0.0, 1.0)).unwrap();
        assert_eq!(rho.matrix(), &CMatrix::from_diagonal(&[0.5, 0.5]));
    }

    #[test]
    fn parameter_errors() {
        assert!(pure_qudit_state(&PathwayStateParams::uniform(3, 1.2, 0.0)).is_err());
        assert!(pure_qudit_state(&PathwayStateParams::uniform(3, -0.1, 0.0)).is_err());
        let bad = PathwayStateParams {
            weights: vec![0.7, 0.7],
            visibility: 0.5,
            phase: 0.0,
            convention: PhaseConvention::Ladder,
        };
        assert!(pure_qudit_state(&bad).is_err());
        assert!(asymmetric_mixed_state(2, 2, 1.5, 0.0).is_err());
        assert!(asymmetric_mixed_state(0, 2, 0.5, 0.0).is_err());
    }

    #[test]
    fn mixed_state_limits() {
        let rho = asymmetric_mixed_state(2, 3, 0.0, 0.7).unwrap();
        assert!((rho.matrix() - &CMatrix::identity(6).scale(1.0 / 6.0)).max_abs() < 1e-15);
        let rho = asymmetric_mixed_state(2, 3, 1.0, 0.0).unwrap();
        let ev = hermitian_eigenvalues_unchecked(rho.matrix());
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!(ev[1..].iter().all(|e| e.abs() < 1e-12));
        for r in 0..6 {
            for c in 0..6 {
                assert!((rho.entry(r, c).re - 1.0 / 6.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn validation_report_defects() {
        let rho = pure_qudit_state(&PathwayStateParams::uniform(3, 0.8, 0.3)).unwrap();
        let r = validate_density(rho.matrix(), 1e-10);
        assert!(r.passed);
        assert!(r.hermiticity_defect < 1e-10 && r.trace_defect < 1e-10);

        let short = CMatrix::from_diagonal(&[0.5, 0.4]);
        let r = validate_density(&short, 1e-10);
        assert!((r.trace_defect - 0.1).abs() < 1e-15);
        assert!(!r.passed);

        let mut skew = CMatrix::from_diagonal(&[0.5, 0.5]);
        skew[(0, 1)] = Complex64::new(1e-6, 0.0);
        let r = validate_density(&skew, 1e-10);
        assert!((r.hermiticity_defect - 1e-6).abs() < 1e-18);
        assert!(!r.passed);
    }

    #[test]
    fn embedding_into_full_pathway_basis() {
        let rho = pure_qudit_state(&PathwayStateParams::uniform(2, 1.0, 0.0)).unwrap();
        let full = rho.to_bipartite();
        assert_eq!(full.bipartition(), Some((2, 2)));
        assert!((full.entry(0, 3).re - 0.5).abs() < 1e-15);
        assert_eq!(full.entry(1, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn oam_labels_and_index_agree() {
        let b = Basis::Oam { l_max: 2 };
        for (k, label) in b.labels().into_iter().enumerate() {
            let BasisLabel::Oam(ls, li) = label else { panic!() };
            assert_eq!(oam_index(2, ls, li), Some(k));
        }
        assert_eq!(oam_index(2, 3, 0), None);
    }

    #[test]
    fn truncation_gate() {
        let mask = AngularMask::new(2, PI / 10.0, PI / 4.0).unwrap();
        let rho = pure_qudit_state(&PathwayStateParams::uniform(2, 1.0, 0.0)).unwrap();
        let spec = SpiralSpectrum::uniform(0).unwrap();
        assert!(matches!(
            pathway_to_oam(&rho, &mask, &mask, &spec, 2),
            Err(Error::TruncationTooAggressive { .. })
        ));
        let spec = SpiralSpectrum::uniform(3).unwrap();
        assert!(pathway_to_oam(&rho, &mask, &mask, &spec, 2).is_err());
    }
}
