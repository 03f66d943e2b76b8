use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One reflected/transmitted space-time harmonic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harmonic {
    pub n: i64,
    pub f_hz: f64,
    pub re_r: f64,
    pub im_r: f64,
    pub re_t: f64,
    pub im_t: f64,
    /// Reflection angle from the normal; `None` unless propagating.
    pub theta_r_rad: Option<f64>,
    /// Reflected power flux normalized to the incident flux.
    pub power_r: f64,
    pub power_t: f64,
    /// Set for evanescent and non-positive-frequency harmonics, which carry
    /// no far-field power.
    pub evanescent: bool,
}

/// Why a harmonic does or does not radiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarmonicKind {
    Propagating,
    Evanescent,
    NonPositiveFrequency,
}

impl Harmonic {
    pub fn r(&self) -> Complex64 {
        Complex64::new(self.re_r, self.im_r)
    }

    pub fn t(&self) -> Complex64 {
        Complex64::new(self.re_t, self.im_t)
    }

    pub fn kind(&self) -> HarmonicKind {
        if self.f_hz <= 0.0 {
            HarmonicKind::NonPositiveFrequency
        } else if self.evanescent {
            HarmonicKind::Evanescent
        } else {
            HarmonicKind::Propagating
        }
    }

    pub fn is_propagating(&self) -> bool {
        self.kind() == HarmonicKind::Propagating
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicSpectrum {
    pub f_0_hz: f64,
    /// Signed modulation frequency: harmonic `n` sits at `f_0 + n f_mod`.
    pub f_mod_hz: f64,
    pub theta_i_rad: f64,
    pub truncation: usize,
    pub harmonics: Vec<Harmonic>,
}

impl HarmonicSpectrum {
    pub fn get(&self, n: i64) -> Option<&Harmonic> {
        let idx = n + self.truncation as i64;
        if idx < 0 {
            return None;
        }
        self.harmonics.get(idx as usize).filter(|h| h.n == n)
    }

    /// `|R_n|`, zero outside the truncation.
    pub fn r_magnitude(&self, n: i64) -> f64 {
        self.get(n).map_or(0.0, |h| h.r().norm())
    }

    /// Reflected power of harmonic `n`; zero when absent or non-radiating.
    pub fn power_r(&self, n: i64) -> f64 {
        self.get(n).map_or(0.0, |h| h.power_r)
    }

    pub fn power_t(&self, n: i64) -> f64 {
        self.get(n).map_or(0.0, |h| h.power_t)
    }

    /// Harmonic with the largest reflected power among `range`; ties go to
    /// the lowest index.
    pub fn argmax_power_r(&self, range: std::ops::RangeInclusive<i64>) -> Option<i64> {
        let mut best: Option<(i64, f64)> = None;
        for n in range {
            let p = self.power_r(n);
            if best.map_or(true, |(_, bp)| p > bp) {
                best = Some((n, p));
            }
        }
        best.map(|(n, _)| n)
    }

    pub fn max_power_r(&self) -> f64 {
        self.harmonics.iter().map(|h| h.power_r).fold(0.0, f64::max)
    }

    pub fn total_power(&self) -> f64 {
        self.harmonics.iter().map(|h| h.power_r + h.power_t).sum()
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        self.harmonics.iter().map(|h| h.n)
    }
}
