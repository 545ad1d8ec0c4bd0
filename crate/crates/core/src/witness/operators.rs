//! Local measurement operators on `C^{d_s} (x) C^{d_i}`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::{Float, PI};
use crate::linalg::{cis, CMatrix, Complex64};
use crate::state::{oam_index, Basis, DensityMatrix};

pub(crate) const OPERATOR_HERMITICITY_TOL: f64 = 1e-12;

/// A Hermitian observable on the signal-idler product space.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOperator {
    pub matrix: CMatrix,
    pub label: String,
    /// `(d_s, d_i)`
    pub dims: (usize, usize),
    /// `(A, B)` when the operator is `A (x) B`.
    pub local_factors: Option<(CMatrix, CMatrix)>,
}

impl MeasurementOperator {
    pub fn new(matrix: CMatrix, dims: (usize, usize), label: impl Into<String>) -> Result<Self> {
        let d = dims.0 * dims.1;
        if !matrix.is_square() || matrix.rows() != d || d == 0 {
            return Err(Error::invalid("matrix", format!("expected a {d}x{d} operator")));
        }
        let defect = matrix.hermiticity_defect();
        if defect > OPERATOR_HERMITICITY_TOL {
            return Err(Error::invalid(
                "matrix",
                format!("not Hermitian (defect {defect:e})"),
            ));
        }
        Ok(MeasurementOperator {
            matrix: matrix.hermitian_part(),
            label: label.into(),
            dims,
            local_factors: None,
        })
    }

    /// `A (x) B` for Hermitian `A`, `B`.
    pub fn product(a: &CMatrix, b: &CMatrix, label: impl Into<String>) -> Result<Self> {
        if !a.is_square() || !b.is_square() {
            return Err(Error::invalid("matrix", "local factors must be square"));
        }
        let mut op = Self::new(a.kron(b), (a.rows(), b.rows()), label)?;
        op.local_factors = Some((a.clone(), b.clone()));
        Ok(op)
    }

    pub fn identity(dims: (usize, usize)) -> Self {
        Self::product(&CMatrix::identity(dims.0), &CMatrix::identity(dims.1), "I")
            .expect("identity is Hermitian")
    }
}

fn oam_ket(l_max: i64, l: i64) -> Result<Vec<Complex64>> {
    if l.abs() > l_max {
        return Err(Error::invalid(
            "l",
            format!("OAM value {l} outside [-{l_max}, {l_max}]"),
        ));
    }
    let mut v = vec![Complex64::new(0.0, 0.0); (2 * l_max + 1) as usize];
    v[(l + l_max) as usize] = Complex64::new(1.0, 0.0);
    Ok(v)
}

fn check_l_max(l_max: i64) -> Result<()> {
    if l_max < 0 {
        return Err(Error::invalid(
            "l_max",
            format!("must be non-negative, got {l_max}"),
        ));
    }
    Ok(())
}

/// Joint projectors `|l_s><l_s| (x) |l_i><l_i|` in the truncated OAM basis.
pub fn oam_projectors(l_max: i64, pairs: &[(i64, i64)]) -> Result<Vec<MeasurementOperator>> {
    check_l_max(l_max)?;
    pairs
        .iter()
        .map(|&(ls, li)| {
            let s = oam_ket(l_max, ls)?;
            let i = oam_ket(l_max, li)?;
            MeasurementOperator::product(
                &CMatrix::outer(&s, &s),
                &CMatrix::outer(&i, &i),
                format!("P({ls},{li})"),
            )
        })
        .collect()
}

/// Product of local projectors onto `(|a> + e^{i phase}|b>)/sqrt(2)` on each
/// side. Equal OAM values on one side give the plain projector `|a><a|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionSpec {
    /// `(l_s, l_i)` of the first pair.
    pub first: (i64, i64),
    /// `(l_s, l_i)` of the second pair.
    pub second: (i64, i64),
    pub phase_signal: f64,
    pub phase_idler: f64,
}

fn local_superposition(l_max: i64, a: i64, b: i64, phase: f64) -> Result<CMatrix> {
    let ka = oam_ket(l_max, a)?;
    if a == b {
        return Ok(CMatrix::outer(&ka, &ka));
    }
    let kb = oam_ket(l_max, b)?;
    let w = cis(phase);
    let s = Float::sqrt(0.5);
    let v: Vec<Complex64> = ka.iter().zip(&kb).map(|(x, y)| (x + w * y) * s).collect();
    Ok(CMatrix::outer(&v, &v))
}

pub fn superposition_projectors(l_max: i64, specs: &[SuperpositionSpec]) -> Result<Vec<MeasurementOperator>> {
    check_l_max(l_max)?;
    specs
        .iter()
        .map(|sp| {
            let a = local_superposition(l_max, sp.first.0, sp.second.0, sp.phase_signal)?;
            let b = local_superposition(l_max, sp.first.1, sp.second.1, sp.phase_idler)?;
            let label = format!(
                "S({},{}|{},{};{:.6},{:.6})",
                sp.first.0, sp.first.1, sp.second.0, sp.second.1, sp.phase_signal, sp.phase_idler
            );
            MeasurementOperator::product(&a, &b, label)
        })
        .collect()
}

/// `d^2` Hermitian operators spanning all `d x d` Hermitian matrices:
/// `|p><p|`, then `|p><q| + |q><p|` and `-i|p><q| + i|q><p|` for `p < q`.
pub fn local_tomography_basis(d: usize) -> Vec<(CMatrix, String)> {
    let mut out = Vec::with_capacity(d * d);
    for p in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(p, p)] = Complex64::new(1.0, 0.0);
        out.push((m, format!("Z{p}")));
    }
    for p in 0..d {
        for q in p + 1..d {
            let mut x = CMatrix::zeros(d, d);
            x[(p, q)] = Complex64::new(1.0, 0.0);
            x[(q, p)] = Complex64::new(1.0, 0.0);
            out.push((x, format!("X{p}{q}")));
            let mut y = CMatrix::zeros(d, d);
            y[(p, q)] = Complex64::new(0.0, -1.0);
            y[(q, p)] = Complex64::new(0.0, 1.0);
            out.push((y, format!("Y{p}{q}")));
        }
    }
    out
}

/// All products of local tomography operators: `d_s^2 d_i^2` operators whose
/// expectation values determine the state.
pub fn tomographically_complete_set(dims: (usize, usize)) -> Vec<MeasurementOperator> {
    let bs = local_tomography_basis(dims.0);
    let bi = local_tomography_basis(dims.1);
    let mut out = Vec::with_capacity(bs.len() * bi.len());
    for (a, la) in &bs {
        for (b, lb) in &bi {
            out.push(MeasurementOperator::product(a, b, format!("{la}x{lb}")).expect("Hermitian"));
        }
    }
    out
}

/// All joint OAM projectors, plus superposition projectors (local phases
/// `{0, pi/2}` on each side) between every pair of the `top_k` most
/// populated `(l_s, l_i)` cells of `probabilities`, which is indexed like the
/// OAM basis.
pub fn adaptive_measurement_set(
    l_max: i64,
    probabilities: &[f64],
    top_k: usize,
) -> Result<Vec<MeasurementOperator>> {
    check_l_max(l_max)?;
    let side = 2 * l_max + 1;
    if probabilities.len() != (side * side) as usize {
        return Err(Error::invalid(
            "probabilities",
            format!("expected {} entries, got {}", side * side, probabilities.len()),
        ));
    }
    let pairs: Vec<(i64, i64)> = (-l_max..=l_max)
        .flat_map(|ls| (-l_max..=l_max).map(move |li| (ls, li)))
        .collect();
    let mut ops = oam_projectors(l_max, &pairs)?;

    let mut ranked: Vec<(i64, i64)> = pairs
        .iter()
        .copied()
        .filter(|&(ls, li)| probabilities[oam_index(l_max, ls, li).expect("in range")] > 0.0)
        .collect();
    // Stable on ties, so the set is deterministic.
    ranked.sort_by(|a, b| {
        let pa = probabilities[oam_index(l_max, a.0, a.1).expect("in range")];
        let pb = probabilities[oam_index(l_max, b.0, b.1).expect("in range")];
        pb.partial_cmp(&pa).unwrap_or(core::cmp::Ordering::Equal)
    });
    ranked.truncate(top_k);

    let mut specs = Vec::new();
    for (x, &p) in ranked.iter().enumerate() {
        for &q in &ranked[x + 1..] {
            if p.0 == q.0 || p.1 == q.1 {
                continue;
            }
            for phase_signal in [0.0, PI / 2.0] {
                for phase_idler in [0.0, PI / 2.0] {
                    specs.push(SuperpositionSpec {
                        first: p,
                        second: q,
                        phase_signal,
                        phase_idler,
                    });
                }
            }
        }
    }
    ops.extend(superposition_projectors(l_max, &specs)?);
    Ok(ops)
}

/// Places a pathway state on the OAM grid by identifying slit `n` with
/// `l_s = n - floor(N/2)` and slit `m` with `l_i = -(m - floor(M/2))`.
pub fn embed_pathway_state(state: &DensityMatrix, l_max: i64) -> Result<DensityMatrix> {
    check_l_max(l_max)?;
    let full = state.to_bipartite();
    let (ds, di) = match full.basis() {
        Basis::Pathway { signal, idler } | Basis::Product { signal, idler } => (signal, idler),
        Basis::Oam { .. } => return Ok(full),
        Basis::PathwayDiagonal { .. } => unreachable!("embedded by to_bipartite"),
    };
    let side = (2 * l_max + 1) as usize;
    let (hs, hi) = ((ds / 2) as i64, (di / 2) as i64);
    let fits = |count: usize, half: i64| (count as i64 - 1 - half) <= l_max && half <= l_max;
    if !fits(ds, hs) || !fits(di, hi) {
        return Err(Error::invalid(
            "l_max",
            format!("a {ds}x{di} pathway state does not fit in |l| <= {l_max}"),
        ));
    }
    let map = |k: usize| {
        let (n, m) = (k / di, k % di);
        oam_index(l_max, n as i64 - hs, -(m as i64 - hi)).expect("checked")
    };
    let mut out = CMatrix::zeros(side * side, side * side);
    let src = full.matrix();
    for r in 0..ds * di {
        for c in 0..ds * di {
            out[(map(r), map(c))] = src[(r, c)];
        }
    }
    DensityMatrix::new(out, Basis::Oam { l_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{pure_qudit_state, PathwayStateParams};

    #[test]
    fn projectors_are_idempotent() {
        let specs = [SuperpositionSpec {
            first: (1, -1),
            second: (-1, 1),
            phase_signal: 0.3,
            phase_idler: -1.1,
        }];
        let ops = superposition_projectors(1, &specs).unwrap();
        let p = &ops[0].matrix;
        let p2 = p * p;
        assert!((&p2 - p).max_abs() < 1e-14);
        assert!((p.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tomography_basis_is_complete_and_orthogonal() {
        let ops = tomographically_complete_set((2, 3));
        assert_eq!(ops.len(), 36);
        for (a, x) in ops.iter().enumerate() {
            for (b, y) in ops.iter().enumerate() {
                let g = x.matrix.trace_product(&y.matrix);
                if a != b {
                    assert!(g.norm() < 1e-14);
                } else {
                    assert!(g.re > 0.5);
                }
            }
        }
    }

    #[test]
    fn adaptive_set_for_bell_state() {
        let rho = pure_qudit_state(&PathwayStateParams::uniform(2, 1.0, 0.0)).unwrap();
        let oam = embed_pathway_state(&rho, 1).unwrap();
        let diag: Vec<f64> = (0..9).map(|k| oam.entry(k, k).re).collect();
        let ops = adaptive_measurement_set(1, &diag, 4).unwrap();
        // 9 projectors + one populated pair times four phase settings.
        assert_eq!(ops.len(), 13);
    }

    #[test]
    fn embedding_places_slits_anticorrelated() {
        let rho = pure_qudit_state(&PathwayStateParams::uniform(3, 1.0, 0.0)).unwrap();
        let oam = embed_pathway_state(&rho, 1).unwrap();
        for l in -1..=1 {
            let k = oam_index(1, l, -l).unwrap();
            assert!((oam.entry(k, k).re - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(embed_pathway_state(&rho, 0).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(oam_projectors(1, &[(2, 0)]).is_err());
        assert!(oam_projectors(-1, &[]).is_err());
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(MeasurementOperator::new(m, (1, 2), "bad").is_err());
    }
}
