//! Coincidence rates, fringe scans and visibility.
//!
//! Every rate factorizes into a diffraction envelope fixed by the slit width
//! and the source spectrum, times an interference factor fixed by the slit
//! spacing and the pathway state. The factor is the quadratic form `v^dagger
//! rho v` with `v_n = e^{i beta (l_s + l_i) n}`, so it is non-negative for any
//! physical state.

use alloc::format;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::float::{sinc, Float, PI, TAU};
use crate::linalg::{cis, Complex64};
use crate::physics::{AngularMask, SpiralSpectrum};
use crate::state::{Basis, DensityMatrix};

/// Interference factors below this are reported instead of clamped.
pub const NEGATIVE_RATE_TOL: f64 = 1e-9;

/// Envelope samples smaller than this fraction of the scan maximum are left
/// out of envelope-corrected quantities.
pub const ENVELOPE_FLOOR: f64 = 1e-12;

/// `|sum_l c_l sinc((l_s - l) alpha/2) sinc((l_i + l) alpha/2)|^2`
pub fn diffraction_envelope(spectrum: &SpiralSpectrum, alpha: f64, l_s: i64, l_i: i64) -> f64 {
    diffraction_envelope_split(spectrum, alpha, alpha, l_s, l_i)
}

/// Envelope with separate slit widths for signal and idler.
pub fn diffraction_envelope_split(
    spectrum: &SpiralSpectrum,
    alpha_s: f64,
    alpha_i: f64,
    l_s: i64,
    l_i: i64,
) -> f64 {
    let amp: Complex64 = spectrum
        .iter()
        .map(|(l, c)| c * sinc((l_s - l) as f64 * alpha_s / 2.0) * sinc((l_i + l) as f64 * alpha_i / 2.0))
        .sum();
    amp.norm_sqr()
}

/// `<w|rho|w>` for a phase vector `w`, clamped at zero after the sign check.
fn quadratic_factor(state: &DensityMatrix, w: &[Complex64]) -> Result<f64> {
    let value = state.matrix().quadratic_form(w).re;
    if value < -NEGATIVE_RATE_TOL {
        return Err(Error::NumericalInconsistency {
            quantity: "interference factor",
            value,
        });
    }
    Ok(value.max(0.0))
}

/// `sum_{n,m} rho_nm e^{-i beta (l_s + l_i)(n - m)}` for a symmetric state.
pub fn interference_factor(state: &DensityMatrix, beta: f64, oam_sum: i64) -> Result<f64> {
    let Basis::PathwayDiagonal { slits } = state.basis() else {
        return Err(Error::invalid("state", "expected the reduced pathway basis"));
    };
    let w: Vec<Complex64> = (0..slits)
        .map(|n| cis(beta * oam_sum as f64 * n as f64))
        .collect();
    quadratic_factor(state, &w)
}

/// Coincidence rate for equal masks on both photons, up to the global
/// prefactor.
pub fn coincidence_rate(
    state: &DensityMatrix,
    mask: &AngularMask,
    spectrum: &SpiralSpectrum,
    l_s: i64,
    l_i: i64,
) -> Result<f64> {
    match state.basis() {
        Basis::PathwayDiagonal { slits } if slits == mask.slits() => {}
        Basis::PathwayDiagonal { slits } => {
            return Err(Error::invalid(
                "mask",
                format!(
                    "{}-slit mask does not match a {slits}-pathway state",
                    mask.slits()
                ),
            ))
        }
        _ => return Err(Error::invalid("state", "expected the reduced pathway basis")),
    }
    let factor = interference_factor(state, mask.beta(), l_s + l_i)?;
    Ok(diffraction_envelope(spectrum, mask.alpha(), l_s, l_i) * factor)
}

fn bipartite_pathway_state(
    state: &DensityMatrix,
    mask_s: &AngularMask,
    mask_i: &AngularMask,
) -> Result<DensityMatrix> {
    let full = state.to_bipartite();
    match full.basis() {
        Basis::Pathway { signal, idler } if signal == mask_s.slits() && idler == mask_i.slits() => Ok(full),
        Basis::Pathway { signal, idler } => Err(Error::invalid(
            "mask",
            format!(
                "masks with ({}, {}) slits do not match a ({signal}, {idler}) pathway state",
                mask_s.slits(),
                mask_i.slits()
            ),
        )),
        _ => Err(Error::invalid("state", "expected a pathway-basis state")),
    }
}

/// `sum rho_{nm,n'm'} e^{-i beta_s l_s (n - n')} e^{-i beta_i l_i (m - m')}`
pub fn asymmetric_interference_factor(
    state: &DensityMatrix,
    mask_s: &AngularMask,
    mask_i: &AngularMask,
    l_s: i64,
    l_i: i64,
) -> Result<f64> {
    let full = bipartite_pathway_state(state, mask_s, mask_i)?;
    let (ns, ni) = (mask_s.slits(), mask_i.slits());
    let (ps, pi) = (mask_s.beta() * l_s as f64, mask_i.beta() * l_i as f64);
    let w: Vec<Complex64> = (0..ns)
        .flat_map(|n| (0..ni).map(move |m| cis(ps * n as f64 + pi * m as f64)))
        .collect();
    quadratic_factor(&full, &w)
}

/// Coincidence rate for independent signal and idler masks (any pathway
/// state, including mixed ones on the full `N x M` basis).
pub fn coincidence_rate_asymmetric(
    state: &DensityMatrix,
    mask_s: &AngularMask,
    mask_i: &AngularMask,
    spectrum: &SpiralSpectrum,
    l_s: i64,
    l_i: i64,
) -> Result<f64> {
    let factor = asymmetric_interference_factor(state, mask_s, mask_i, l_s, l_i)?;
    Ok(diffraction_envelope_split(spectrum, mask_s.alpha(), mask_i.alpha(), l_s, l_i) * factor)
}

/// Global prefactor `C^2 alpha^2 / (16 pi^4)` applied in raw mode.
pub fn rate_prefactor(normalization_constant: f64, alpha: f64) -> f64 {
    normalization_constant * normalization_constant * alpha * alpha / (16.0 * Float::powi(PI, 4))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RateNormalization {
    /// Scaled by [`rate_prefactor`] with the given normalization constant.
    Raw { normalization_constant: f64 },
    /// Divided by the largest rate of the scan.
    #[default]
    PeakNormalized,
}

/// Coincidence rates over integer `(l_s, l_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeGrid {
    pub l_s: Vec<i64>,
    pub l_i: Vec<i64>,
    /// Row-major: one row of `l_s.len()` samples per `l_i` value.
    pub rates: Vec<f64>,
    /// Diffraction envelope at each sample, unscaled.
    pub envelope: Vec<f64>,
    pub normalization: RateNormalization,
}

impl FringeGrid {
    pub fn rows(&self) -> usize {
        self.l_i.len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let w = self.l_s.len();
        &self.rates[r * w..(r + 1) * w]
    }

    fn envelope_row(&self, r: usize) -> &[f64] {
        let w = self.l_s.len();
        &self.envelope[r * w..(r + 1) * w]
    }

    /// `(l_s, rate)` of the first maximum in row `r`.
    pub fn peak(&self, r: usize) -> (i64, f64) {
        let row = self.row(r);
        let mut best = 0;
        for (k, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = k;
            }
        }
        (self.l_s[best], row[best])
    }

    /// Rates divided by the envelope; `None` where the envelope is negligible.
    pub fn corrected_row(&self, r: usize) -> Vec<Option<f64>> {
        let env = self.envelope_row(r);
        let floor = ENVELOPE_FLOOR * env.iter().copied().fold(0.0, f64::max);
        self.row(r)
            .iter()
            .zip(env)
            .map(|(&rate, &e)| (e > floor && e > 0.0).then(|| rate / e))
            .collect()
    }

    /// Dominant non-zero frequency, in cycles per unit of `l_s`, of the
    /// envelope-corrected row. Errors if any sample is masked out.
    pub fn fringe_frequency(&self, r: usize) -> Result<f64> {
        let samples: Option<Vec<f64>> = self.corrected_row(r).into_iter().collect();
        let samples = samples
            .ok_or_else(|| Error::invalid("grid", "envelope vanishes inside the scan; cannot correct it"))?;
        dominant_frequency(&samples)
            .ok_or_else(|| Error::invalid("grid", "scan too short or flat for a frequency estimate"))
    }
}

/// Oversampling of the frequency grid in [`dominant_frequency`].
const FREQUENCY_OVERSAMPLING: usize = 8;

/// Frequency, in cycles per sample, of the largest peak of the zero-padded
/// DFT of `samples` (grid step `1 / (8 n)`, DC excluded). `None` if fewer
/// than four samples or no oscillation at all.
pub fn dominant_frequency(samples: &[f64]) -> Option<f64> {
    let n = samples.len();
    if n < 4 {
        return None;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let padded = FREQUENCY_OVERSAMPLING * n;
    let mut best = (0usize, 0.0f64);
    for k in 1..=padded / 2 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &x) in samples.iter().enumerate() {
            acc += cis(-TAU * (k * j % padded) as f64 / padded as f64) * (x - mean);
        }
        let p = acc.norm_sqr();
        if p > best.1 * (1.0 + 1e-12) {
            best = (k, p);
        }
    }
    let scale: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
    (best.0 > 0 && scale > 0.0 && best.1 > 1e-24 * scale * n as f64).then(|| best.0 as f64 / padded as f64)
}

/// Rates over `l_s_range` for each value in `l_i_values`. Symmetric states
/// use [`coincidence_rate`] with `mask_s`; full pathway states use
/// [`coincidence_rate_asymmetric`].
pub fn fringe_grid(
    state: &DensityMatrix,
    mask_s: &AngularMask,
    mask_i: &AngularMask,
    spectrum: &SpiralSpectrum,
    l_i_values: &[i64],
    l_s_range: RangeInclusive<i64>,
    normalization: RateNormalization,
) -> Result<FringeGrid> {
    if l_s_range.is_empty() {
        return Err(Error::invalid("l_s_range", "lower bound exceeds upper bound"));
    }
    let symmetric = matches!(state.basis(), Basis::PathwayDiagonal { .. });
    if symmetric {
        if mask_s != mask_i {
            return Err(Error::invalid(
                "mask",
                "a reduced pathway state needs identical signal and idler masks",
            ));
        }
        coincidence_rate(state, mask_s, spectrum, 0, 0)?;
    }
    let l_s: Vec<i64> = l_s_range.collect();
    let mut rates = Vec::with_capacity(l_s.len() * l_i_values.len());
    let mut envelope = Vec::with_capacity(rates.capacity());
    for &li in l_i_values {
        for &ls in &l_s {
            let (env, factor) = if symmetric {
                (
                    diffraction_envelope(spectrum, mask_s.alpha(), ls, li),
                    interference_factor(state, mask_s.beta(), ls + li)?,
                )
            } else {
                (
                    diffraction_envelope_split(spectrum, mask_s.alpha(), mask_i.alpha(), ls, li),
                    asymmetric_interference_factor(state, mask_s, mask_i, ls, li)?,
                )
            };
            envelope.push(env);
            rates.push(env * factor);
        }
    }
    match normalization {
        RateNormalization::Raw {
            normalization_constant,
        } => {
            let k = rate_prefactor(normalization_constant, mask_s.alpha());
            rates.iter_mut().for_each(|r| *r *= k);
        }
        RateNormalization::PeakNormalized => {
            let peak = rates.iter().copied().fold(0.0, f64::max);
            if peak > 0.0 {
                rates.iter_mut().for_each(|r| *r /= peak);
            }
        }
    }
    Ok(FringeGrid {
        l_s,
        l_i: l_i_values.to_vec(),
        rates,
        envelope,
        normalization,
    })
}

/// Single-row scan at fixed `l_i`.
pub fn fringe_scan(
    state: &DensityMatrix,
    mask_s: &AngularMask,
    mask_i: &AngularMask,
    spectrum: &SpiralSpectrum,
    l_i: i64,
    l_s_range: RangeInclusive<i64>,
    normalization: RateNormalization,
) -> Result<FringeGrid> {
    fringe_grid(state, mask_s, mask_i, spectrum, &[l_i], l_s_range, normalization)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityEstimate {
    pub visibility: f64,
    /// Set when the corrected fringe has no contrast at all.
    pub flat: bool,
}

/// `(R_max - R_min) / (R_max + R_min)` over envelope-corrected samples of
/// every row of the grid.
pub fn visibility_from_fringes(grid: &FringeGrid) -> VisibilityEstimate {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in 0..grid.rows() {
        for v in grid.corrected_row(r).into_iter().flatten() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() || hi + lo <= 0.0 || hi - lo <= 1e-12 * hi.abs() {
        return VisibilityEstimate {
            visibility: 0.0,
            flat: true,
        };
    }
    VisibilityEstimate {
        visibility: ((hi - lo) / (hi + lo)).clamp(0.0, 1.0),
        flat: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{pure_qudit_state, PathwayStateParams};

    fn two_slit(v: f64) -> (DensityMatrix, AngularMask, SpiralSpectrum) {
        (
            pure_qudit_state(&PathwayStateParams::uniform(2, v, 0.0)).unwrap(),
            AngularMask::new(2, PI / 10.0, PI / 4.0).unwrap(),
            SpiralSpectrum::uniform(10).unwrap(),
        )
    }

    #[test]
    fn envelope_of_single_mode_source() {
        let s = SpiralSpectrum::uniform(0).unwrap();
        assert_eq!(diffraction_envelope(&s, PI / 10.0, 0, 0), 1.0);
    }

    #[test]
    fn destructive_interference() {
        let (rho, mask, spec) = two_slit(1.0);
        // beta (l_s + l_i) = pi at l_s + l_i = 4.
        let r = coincidence_rate(&rho, &mask, &spec, 1, 3).unwrap();
        assert!(r.abs() < 1e-15, "{r}");
    }

    #[test]
    fn dimension_mismatch() {
        let (rho, _, spec) = two_slit(1.0);
        let m3 = AngularMask::new(3, PI / 10.0, PI / 4.0).unwrap();
        assert!(matches!(
            coincidence_rate(&rho, &m3, &spec, 0, 0),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn visibility_extremes() {
        for v in [0.0, 1.0, 0.875] {
            let (rho, mask, spec) = two_slit(v);
            let g = fringe_scan(
                &rho,
                &mask,
                &mask,
                &spec,
                0,
                -12..=12,
                RateNormalization::PeakNormalized,
            )
            .unwrap();
            let est = visibility_from_fringes(&g);
            assert!((est.visibility - v).abs() < 1e-9, "{v} {est:?}");
            assert_eq!(est.flat, v == 0.0);
        }
    }

    #[test]
    fn peak_normalized_maximum_is_one() {
        let (rho, mask, spec) = two_slit(0.875);
        let g = fringe_scan(
            &rho,
            &mask,
            &mask,
            &spec,
            2,
            -12..=12,
            RateNormalization::PeakNormalized,
        )
        .unwrap();
        assert_eq!(g.peak(0), (-2, 1.0));
        assert!(g.rates.iter().all(|&r| (0.0..=1.0).contains(&r)));
    }

    #[test]
    fn raw_mode_applies_prefactor() {
        let (rho, mask, spec) = two_slit(0.5);
        let raw = fringe_scan(
            &rho,
            &mask,
            &mask,
            &spec,
            0,
            0..=0,
            RateNormalization::Raw {
                normalization_constant: 2.0,
            },
        )
        .unwrap();
        let direct = coincidence_rate(&rho, &mask, &spec, 0, 0).unwrap();
        assert!((raw.rates[0] - direct * rate_prefactor(2.0, PI / 10.0)).abs() < 1e-18);
    }

    #[test]
    fn empty_range_is_rejected() {
        let (rho, mask, spec) = two_slit(0.5);
        #[allow(clippy::reversed_empty_ranges)]
        let r = fringe_scan(
            &rho,
            &mask,
            &mask,
            &spec,
            0,
            3..=2,
            RateNormalization::PeakNormalized,
        );
        assert!(r.is_err());
    }

    #[test]
    fn dominant_frequency_of_cosine() {
        let xs: Vec<f64> = (0..64)
            .map(|j| 1.0 + (TAU * 5.0 * j as f64 / 64.0).cos())
            .collect();
        assert_eq!(dominant_frequency(&xs), Some(5.0 / 64.0));
        assert_eq!(dominant_frequency(&[1.0; 16]), None);
    }
}
