//! Source spectrum, angular masks and slit Fourier amplitudes.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::{sinc, wrap_angle, Float, PI, TAU};
use crate::linalg::{cis, Complex64};

/// Tolerance on the unit-norm invariant of [`SpiralSpectrum`].
pub const SPECTRUM_NORM_TOL: f64 = 1e-12;

/// Truncated OAM amplitudes `c_l`, `l = -L..=L`, of the down-converted pair
/// `sum_l c_l |l>_s |-l>_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpiralSpectrum {
    truncation: i64,
    amplitudes: Vec<Complex64>,
}

impl SpiralSpectrum {
    /// Flat spectrum, `c_l = 1/sqrt(2L+1)`.
    pub fn uniform(truncation: i64) -> Result<Self> {
        if truncation < 0 {
            return Err(Error::invalid("L", "truncation must be non-negative"));
        }
        let c = 1.0 / Float::sqrt((2 * truncation + 1) as f64);
        let amplitudes = (0..2 * truncation + 1).map(|_| Complex64::new(c, 0.0)).collect();
        Ok(SpiralSpectrum {
            truncation,
            amplitudes,
        })
    }

    /// Gaussian spiral bandwidth, `c_l ~ exp(-l^2 / (2 sigma^2))`.
    pub fn gaussian(truncation: i64, sigma: f64) -> Result<Self> {
        if truncation < 0 {
            return Err(Error::invalid("L", "truncation must be non-negative"));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid("sigma", format!("must be positive, got {sigma}")));
        }
        let raw: Vec<f64> = (-truncation..=truncation)
            .map(|l| Float::exp(-((l * l) as f64) / (2.0 * sigma * sigma)))
            .collect();
        Self::from_amplitudes(
            truncation,
            raw.into_iter().map(|a| Complex64::new(a, 0.0)).collect(),
        )
    }

    /// Arbitrary amplitudes for `l = -L..=L`, rescaled to unit norm.
    pub fn from_amplitudes(truncation: i64, amplitudes: Vec<Complex64>) -> Result<Self> {
        if truncation < 0 {
            return Err(Error::invalid("L", "truncation must be non-negative"));
        }
        if amplitudes.len() as i64 != 2 * truncation + 1 {
            return Err(Error::invalid(
                "amplitudes",
                format!(
                    "expected {} entries, got {}",
                    2 * truncation + 1,
                    amplitudes.len()
                ),
            ));
        }
        let norm = Float::sqrt(amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>());
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid(
                "amplitudes",
                "spectrum has zero or non-finite norm",
            ));
        }
        let amplitudes = amplitudes.into_iter().map(|c| c / norm).collect();
        Ok(SpiralSpectrum {
            truncation,
            amplitudes,
        })
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `c_l`, zero outside the truncation window.
    pub fn amplitude(&self, l: i64) -> Complex64 {
        if l.abs() > self.truncation {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[(l + self.truncation) as usize]
        }
    }

    /// `(l, c_l)` pairs in increasing `l`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(k, &c)| (k as i64 - self.truncation, c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// How strictly [`AngularMask`] checks the slit geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskCheck {
    /// `N (alpha + beta) <= 2 pi`.
    #[default]
    Budget,
    /// Only requires the slits not to overlap anywhere on the circle:
    /// `(N - 1) beta + alpha <= 2 pi`. Needed for some published parameter
    /// sets, e.g. six slits at `beta = pi/4`, that exceed the budget rule.
    NonOverlapping,
    /// Only requires `alpha > 0`. Slits may overlap, so only the closed-form
    /// rates are meaningful; the OAM expansion rejects such masks. Used to
    /// evaluate published parameter sets with `beta < alpha`.
    Unchecked,
}

/// `N` slits of angular width `alpha`, slit `n` centered at `n * beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularMask {
    slits: usize,
    alpha: f64,
    beta: f64,
}

/// Slack on the geometric inequalities so exact fractions of pi pass.
const GEOMETRY_SLACK: f64 = 1e-12;

impl AngularMask {
    pub fn new(slits: usize, alpha: f64, beta: f64) -> Result<Self> {
        Self::with_check(slits, alpha, beta, MaskCheck::Budget)
    }

    pub fn with_check(slits: usize, alpha: f64, beta: f64, check: MaskCheck) -> Result<Self> {
        if slits == 0 {
            return Err(Error::invalid("N", "need at least one slit"));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(
                "alpha",
                format!("slit width must be positive, got {alpha}"),
            ));
        }
        if !beta.is_finite() {
            return Err(Error::invalid("beta", "slit spacing must be finite"));
        }
        if check == MaskCheck::Unchecked {
            return Ok(AngularMask { slits, alpha, beta });
        }
        if slits > 1 && beta < alpha - GEOMETRY_SLACK {
            return Err(Error::invalid(
                "beta",
                format!("slit spacing {beta} is smaller than slit width {alpha}"),
            ));
        }
        let n = slits as f64;
        match check {
            MaskCheck::Budget => {
                if n * (alpha + beta) > TAU * (1.0 + GEOMETRY_SLACK) {
                    return Err(Error::invalid(
                        "N",
                        format!("N(alpha + beta) = {} exceeds 2 pi", n * (alpha + beta)),
                    ));
                }
            }
            MaskCheck::NonOverlapping | MaskCheck::Unchecked => {
                if (n - 1.0) * beta + alpha > TAU * (1.0 + GEOMETRY_SLACK) {
                    return Err(Error::invalid(
                        "N",
                        format!("(N-1) beta + alpha = {} exceeds 2 pi", (n - 1.0) * beta + alpha),
                    ));
                }
            }
        }
        Ok(AngularMask { slits, alpha, beta })
    }

    pub fn slits(&self) -> usize {
        self.slits
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// True if no two slits share an angle.
    pub fn slits_disjoint(&self) -> bool {
        let n = self.slits as f64;
        self.slits == 1
            || (self.beta >= self.alpha - GEOMETRY_SLACK
                && (n - 1.0) * self.beta + self.alpha <= TAU * (1.0 + GEOMETRY_SLACK))
    }

    fn check_slit(&self, n: usize) -> Result<()> {
        if n >= self.slits {
            return Err(Error::invalid(
                "n",
                format!("slit index {n} out of range for a {}-slit mask", self.slits),
            ));
        }
        Ok(())
    }
}

/// Amplitude transmission of slit `n` at angle `phi`: 1 inside the slit, else 0.
pub fn slit_transmission(mask: &AngularMask, n: usize, phi: f64) -> Result<u8> {
    mask.check_slit(n)?;
    let offset = wrap_angle(phi - n as f64 * mask.beta);
    Ok(u8::from(offset.abs() <= mask.alpha / 2.0))
}

/// Closed-form Fourier amplitude of slit `n` at OAM `l`:
/// `(alpha / 2 pi) e^{-i l beta n} sinc(alpha l / 2)`.
pub fn slit_fourier(mask: &AngularMask, n: usize, l: i64) -> Result<Complex64> {
    mask.check_slit(n)?;
    Ok(slit_amplitude(mask.alpha, mask.beta, n, l))
}

pub(crate) fn slit_amplitude(alpha: f64, beta: f64, n: usize, l: i64) -> Complex64 {
    let lf = l as f64;
    cis(-lf * beta * n as f64) * (alpha / TAU * sinc(alpha * lf / 2.0))
}

/// Fourier amplitude of slit `n` by composite Simpson quadrature of
/// `(1/2 pi) * integral A_n(phi) e^{-i l phi} dphi` over the slit aperture.
pub fn slit_fourier_numeric(
    mask: &AngularMask,
    n: usize,
    l: i64,
    quadrature_points: usize,
) -> Result<Complex64> {
    mask.check_slit(n)?;
    if quadrature_points < 64 {
        return Err(Error::invalid(
            "quadrature_points",
            format!("need at least 64 points, got {quadrature_points}"),
        ));
    }
    // Simpson needs an even interval count.
    let intervals = quadrature_points + quadrature_points % 2;
    let center = n as f64 * mask.beta;
    let (lo, hi) = (center - mask.alpha / 2.0, center + mask.alpha / 2.0);
    let h = (hi - lo) / intervals as f64;
    let lf = l as f64;
    let f = |phi: f64| cis(-lf * phi);
    let mut acc = f(lo) + f(hi);
    for k in 1..intervals {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(lo + k as f64 * h) * w;
    }
    Ok(acc * (h / 3.0) / TAU)
}

/// Physical limits of a spatial light modulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlmSpec {
    pixel_diameter: f64,
    pixel_size_um: f64,
}

impl SlmSpec {
    /// Aperture diameter in pixels and pixel pitch in micrometers.
    pub fn new(pixel_diameter: f64, pixel_size_um: f64) -> Result<Self> {
        if !(pixel_diameter > 0.0) || !pixel_diameter.is_finite() {
            return Err(Error::invalid("pixel_diameter", "must be positive"));
        }
        if !(pixel_size_um > 0.0) || !pixel_size_um.is_finite() {
            return Err(Error::invalid("pixel_size", "must be positive"));
        }
        Ok(SlmSpec {
            pixel_diameter,
            pixel_size_um,
        })
    }

    pub fn pixel_diameter(&self) -> f64 {
        self.pixel_diameter
    }

    pub fn pixel_size_um(&self) -> f64 {
        self.pixel_size_um
    }

    /// Physical aperture diameter in micrometers.
    pub fn diameter_um(&self) -> f64 {
        self.pixel_diameter * self.pixel_size_um
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlmCapacity {
    /// Narrowest realizable slit, radians.
    pub alpha_min: f64,
    /// Spacing assumed when counting slits (equal to `alpha_min`).
    pub beta: f64,
    /// Largest slit count with `alpha = beta = alpha_min`.
    pub n_max: u64,
    /// Largest pathway dimension, `n_max^2`.
    pub d_max: u64,
}

/// Smallest slit `alpha = 2 atan(2 d / D)` and the slit count it allows when
/// slits and gaps are equally wide.
pub fn slm_capacity(spec: &SlmSpec) -> SlmCapacity {
    let alpha_min = 2.0 * Float::atan(2.0 * spec.pixel_size_um / spec.diameter_um());
    let beta = alpha_min;
    let n_max = Float::floor(TAU / (alpha_min + beta)) as u64;
    SlmCapacity {
        alpha_min,
        beta,
        n_max,
        d_max: n_max * n_max,
    }
}

/// `pi * num / den`, the form used for angles in presets and scenarios.
pub fn pi_fraction(num: f64, den: f64) -> f64 {
    PI * num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask() -> AngularMask {
        AngularMask::new(2, PI / 10.0, PI / 4.0).unwrap()
    }

    #[test]
    fn unchecked_mask_allows_overlap() {
        assert!(AngularMask::new(6, PI / 10.0, PI / 11.0).is_err());
        let m = AngularMask::with_check(6, PI / 10.0, PI / 11.0, MaskCheck::Unchecked).unwrap();
        assert!(!m.slits_disjoint());
        assert!(mask().slits_disjoint());
        assert!(AngularMask::with_check(1, 0.0, 0.0, MaskCheck::Unchecked).is_err());
    }

    #[test]
    fn uniform_spectrum_weights() {
        let s = SpiralSpectrum::uniform(0).unwrap();
        assert_eq!(s.amplitude(0), Complex64::new(1.0, 0.0));
        let s = SpiralSpectrum::uniform(10).unwrap();
        assert_eq!(s.amplitudes().len(), 21);
        for (_, c) in s.iter() {
            assert!((c.norm_sqr() - 1.0 / 21.0).abs() < 1e-15);
        }
        assert!((s.norm_sqr() - 1.0).abs() < SPECTRUM_NORM_TOL);
        assert!(SpiralSpectrum::uniform(-1).is_err());
    }

    #[test]
    fn gaussian_spectrum_ratio_and_norm() {
        let s = SpiralSpectrum::gaussian(0, 0.3).unwrap();
        assert!((s.amplitude(0).re - 1.0).abs() < 1e-15);
        let s = SpiralSpectrum::gaussian(10, 4.0).unwrap();
        let ratio = s.amplitude(4).norm() / s.amplitude(0).norm();
        assert!((ratio - Float::exp(-0.5)).abs() < 1e-14);
        assert!((s.norm_sqr() - 1.0).abs() < SPECTRUM_NORM_TOL);
        assert!(s.iter().all(|(_, c)| c.re > 0.0 && c.im == 0.0));
        assert!(matches!(
            SpiralSpectrum::gaussian(3, 0.0),
            Err(Error::InvalidParameter { name: "sigma", .. })
        ));
        assert!(SpiralSpectrum::gaussian(3, -1.0).is_err());
    }

    #[test]
    fn mask_geometry_rules() {
        assert!(AngularMask::new(0, 0.1, 0.2).is_err());
        assert!(AngularMask::new(2, 0.0, 0.2).is_err());
        assert!(AngularMask::new(2, 0.3, 0.2).is_err());
        // 6 (pi/10 + pi/4) = 2.1 pi breaks the budget but the slits are disjoint.
        assert!(AngularMask::new(6, PI / 10.0, PI / 4.0).is_err());
        assert!(AngularMask::with_check(6, PI / 10.0, PI / 4.0, MaskCheck::NonOverlapping).is_ok());
        // Exactly on the budget.
        assert!(AngularMask::new(10, PI / 10.0, PI / 10.0).is_ok());
    }

    #[test]
    fn transmission_examples() {
        let m = AngularMask::new(3, PI / 10.0, PI / 4.0).unwrap();
        assert_eq!(slit_transmission(&m, 0, 0.0).unwrap(), 1);
        assert_eq!(slit_transmission(&m, 0, PI / 10.0).unwrap(), 0);
        assert_eq!(slit_transmission(&m, 2, PI / 2.0).unwrap(), 1);
        assert_eq!(slit_transmission(&m, 0, TAU + 0.01).unwrap(), 1);
        assert!(slit_transmission(&m, 3, 0.0).is_err());
    }

    #[test]
    fn transmission_wraps_across_branch_cut() {
        let m = AngularMask::new(1, 0.2, 0.2).unwrap();
        assert_eq!(slit_transmission(&m, 0, -0.05).unwrap(), 1);
        let m = AngularMask::with_check(2, 0.2, PI, MaskCheck::NonOverlapping).unwrap();
        // Slit 1 is centered on the cut at pi.
        assert_eq!(slit_transmission(&m, 1, -PI + 0.05).unwrap(), 1);
        assert_eq!(slit_transmission(&m, 1, PI - 0.05).unwrap(), 1);
    }

    #[test]
    fn fourier_examples() {
        let m = mask();
        let a0 = slit_fourier(&m, 0, 0).unwrap();
        assert!((a0.re - 0.05).abs() < 1e-16 && a0.im == 0.0);
        let a10 = slit_fourier(&m, 0, 10).unwrap();
        assert!((a10.re - 0.05 * 2.0 / PI).abs() < 1e-15);
        assert!((a10.re - 0.031831).abs() < 1e-6);
        assert!(a10.im.abs() < 1e-17);
        let a = slit_fourier(&m, 1, 4).unwrap();
        let expected = -(0.05 * sinc(2.0 * PI / 10.0));
        assert!((a.re - expected).abs() < 1e-15 && a.im.abs() < 1e-15);
    }

    #[test]
    fn numeric_needs_enough_points() {
        assert!(slit_fourier_numeric(&mask(), 0, 0, 63).is_err());
        let z = slit_fourier_numeric(&mask(), 0, 0, 64).unwrap();
        assert!((z.re - 0.05).abs() < 1e-8 && z.im.abs() < 1e-15);
    }

    #[test]
    fn slm_capacity_of_reference_modulator() {
        let cap = slm_capacity(&SlmSpec::new(2643.0, 3.74).unwrap());
        let ratio = cap.alpha_min / (PI / 2000.0);
        assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
        assert!((cap.n_max as f64 - 2000.0).abs() <= 100.0, "{}", cap.n_max);
        assert_eq!(cap.d_max, cap.n_max * cap.n_max);
        assert!(SlmSpec::new(0.0, 1.0).is_err());
        assert!(SlmSpec::new(10.0, -1.0).is_err());
    }

    #[test]
    fn slm_alpha_shrinks_with_aperture() {
        let mut last = f64::INFINITY;
        for px in [100.0, 1000.0, 1e4, 1e6, 1e9] {
            let a = slm_capacity(&SlmSpec::new(px, 3.74).unwrap()).alpha_min;
            assert!(a < last);
            last = a;
        }
        assert!(last < 1e-8);
    }
}
