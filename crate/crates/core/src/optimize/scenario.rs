use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::floquet::{IncidentWave, SolverConfig};
use crate::modulation::{Direction, ModulationProfile, Normalization};

/// Distance kept from the secant pole when `phi_rf` is pulled back into the
/// feasible region: `phi_rf <= pi/2 - phi_dc - JOINT_MARGIN`.
pub const JOINT_MARGIN: f64 = 0.05;

/// Searched parameters, in the order used for simplex coordinates.
pub const PARAMETERS: [&str; 5] = ["phi_dc", "phi_rf", "thickness_wavelengths", "f_s_hz", "gamma_v"];

fn default_n_max() -> i64 {
    7
}

fn unit() -> f64 {
    1.0
}

fn default_margin_db() -> f64 {
    10.0
}

fn default_eps() -> f64 {
    1.0
}

/// Closed interval per parameter. Equal endpoints hold a parameter fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub phi_dc: [f64; 2],
    pub phi_rf: [f64; 2],
    pub thickness_wavelengths: [f64; 2],
    pub f_s_hz: [f64; 2],
    pub gamma_v: [f64; 2],
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            phi_dc: [0.1, 1.4],
            phi_rf: [0.05, FRAC_PI_2 - 0.1 - JOINT_MARGIN],
            thickness_wavelengths: [0.1, 0.6],
            f_s_hz: [1.5e9, 6e9],
            gamma_v: [0.3, 1.5],
        }
    }
}

impl Bounds {
    pub fn as_array(&self) -> [[f64; 2]; 5] {
        [
            self.phi_dc,
            self.phi_rf,
            self.thickness_wavelengths,
            self.f_s_hz,
            self.gamma_v,
        ]
    }
}

/// Parameters pinned regardless of `bounds`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixed {
    #[serde(default)]
    pub phi_dc: Option<f64>,
    #[serde(default)]
    pub phi_rf: Option<f64>,
    #[serde(default)]
    pub thickness_wavelengths: Option<f64>,
    #[serde(default)]
    pub f_s_hz: Option<f64>,
    #[serde(default)]
    pub gamma_v: Option<f64>,
}

impl Fixed {
    fn as_array(&self) -> [Option<f64>; 5] {
        [
            self.phi_dc,
            self.phi_rf,
            self.thickness_wavelengths,
            self.f_s_hz,
            self.gamma_v,
        ]
    }
}

/// One selective-excitation design problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub targets: BTreeSet<i64>,
    /// Harmonics to keep dark; `None` means every non-target `n` in
    /// `[1, n_max]`.
    #[serde(default)]
    pub suppressed: Option<BTreeSet<i64>>,
    #[serde(default = "default_n_max")]
    pub n_max: i64,
    #[serde(default)]
    pub bounds: Bounds,
    #[serde(default)]
    pub fixed: Fixed,
    #[serde(rename = "f_0_hz")]
    pub f_0: f64,
    #[serde(rename = "theta_i_rad", default)]
    pub theta_i: f64,
    /// Weight of the suppressed power in the score.
    #[serde(default = "unit")]
    pub penalty: f64,
    #[serde(rename = "selectivity_margin_db", default = "default_margin_db")]
    pub margin_db: f64,
    #[serde(default = "default_eps")]
    pub eps_background: f64,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default)]
    pub direction: Direction,
    /// Solver settings for each evaluation; a single solve at
    /// `solver.truncation` is made per point.
    #[serde(default)]
    pub solver: SolverConfig,
}

impl Scenario {
    pub fn new(targets: impl IntoIterator<Item = i64>, f_0: f64) -> Self {
        Self {
            targets: targets.into_iter().collect(),
            suppressed: None,
            n_max: default_n_max(),
            bounds: Bounds::default(),
            fixed: Fixed::default(),
            f_0,
            theta_i: 0.0,
            penalty: 1.0,
            margin_db: default_margin_db(),
            eps_background: 1.0,
            normalization: Normalization::Bias,
            direction: Direction::Forward,
            solver: SolverConfig::default(),
        }
    }

    /// Pins every parameter to `profile`.
    pub fn pinned(targets: impl IntoIterator<Item = i64>, f_0: f64, profile: &ModulationProfile) -> Self {
        let mut s = Self::new(targets, f_0);
        s.bounds = Bounds {
            phi_dc: [profile.phi_dc; 2],
            phi_rf: [profile.phi_rf; 2],
            thickness_wavelengths: [profile.thickness; 2],
            f_s_hz: [profile.f_s; 2],
            gamma_v: [profile.gamma_v; 2],
        };
        s.eps_background = profile.eps_background;
        s.normalization = profile.normalization;
        s.direction = profile.direction;
        s
    }

    pub fn suppressed_set(&self) -> BTreeSet<i64> {
        match &self.suppressed {
            Some(s) => s.clone(),
            None => (1..=self.n_max).filter(|n| !self.targets.contains(n)).collect(),
        }
    }

    pub fn incident(&self) -> IncidentWave {
        IncidentWave::oblique(self.f_0, self.theta_i)
    }

    /// Effective interval per parameter after applying `fixed`.
    pub fn intervals(&self) -> [[f64; 2]; 5] {
        let mut out = self.bounds.as_array();
        for (iv, fix) in out.iter_mut().zip(self.fixed.as_array()) {
            if let Some(v) = fix {
                *iv = [v, v];
            }
        }
        out
    }

    /// Indices into [`PARAMETERS`] with a non-degenerate interval.
    pub fn free_parameters(&self) -> Vec<usize> {
        self.intervals()
            .iter()
            .enumerate()
            .filter(|(_, iv)| iv[1] > iv[0])
            .map(|(i, _)| i)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::invalid("targets", "at least one target harmonic is required"));
        }
        if self.n_max < 1 {
            return Err(Error::invalid("n_max", "must be at least 1"));
        }
        let suppressed = self.suppressed_set();
        if let Some(n) = self.targets.intersection(&suppressed).next() {
            return Err(Error::invalid(
                "suppressed",
                format!("harmonic {n} is both target and suppressed"),
            ));
        }
        for (name, iv) in PARAMETERS.iter().zip(self.intervals()) {
            ensure_finite(name, iv[0])?;
            ensure_finite(name, iv[1])?;
            if iv[0] > iv[1] {
                return Err(Error::invalid(name, format!("empty interval [{}, {}]", iv[0], iv[1])));
            }
        }
        let [dc, rf, d, fs, gamma] = self.intervals();
        if dc[0] < 0.0 || rf[0] < 0.0 {
            return Err(Error::invalid("phi_dc", "flux bounds must be non-negative"));
        }
        if dc[0] + rf[0] >= FRAC_PI_2 {
            return Err(Error::SecantPole { sum: dc[0] + rf[0] });
        }
        if d[0] <= 0.0 || fs[0] <= 0.0 || gamma[0] <= 0.0 {
            return Err(Error::invalid("bounds", "thickness, f_s and gamma_v must be positive"));
        }
        ensure_finite("penalty", self.penalty)?;
        if self.penalty < 0.0 {
            return Err(Error::invalid("penalty", "must be non-negative"));
        }
        ensure_finite("selectivity_margin_db", self.margin_db)?;
        self.incident().validate()?;
        self.solver.validate()?;
        self.profile_at(&self.project(&self.lower_corner())).validate()
    }

    fn lower_corner(&self) -> [f64; 5] {
        self.intervals().map(|iv| iv[0])
    }

    /// Clamps a point into its box and pulls `phi_rf` (then `phi_dc`) back
    /// below `pi/2 - JOINT_MARGIN` where the intervals allow it.
    pub fn project(&self, x: &[f64; 5]) -> [f64; 5] {
        let iv = self.intervals();
        let mut p = [0.0; 5];
        for i in 0..5 {
            p[i] = x[i].clamp(iv[i][0], iv[i][1]);
        }
        let cap = FRAC_PI_2 - JOINT_MARGIN;
        if p[0] + p[1] > cap {
            p[1] = (cap - p[0]).max(iv[1][0]);
        }
        if p[0] + p[1] > cap {
            p[0] = (cap - p[1]).max(iv[0][0]);
        }
        p
    }

    pub fn profile_at(&self, p: &[f64; 5]) -> ModulationProfile {
        let mut profile = ModulationProfile::new(p[0], p[1], p[2], p[3], p[4]).with_eps_background(self.eps_background);
        profile.normalization = self.normalization;
        profile.direction = self.direction;
        profile
    }
}
