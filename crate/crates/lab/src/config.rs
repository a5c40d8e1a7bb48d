//! Scenario configuration files (TOML, one scenario per file).

use std::path::{Path, PathBuf};

use nsf_core::duhamel::ForceSpec;
use nsf_core::picard::SolverConfig;
use nsf_core::spectral::{geometric_times, uniform_times, FieldRecipe, Grid};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    ScalingInvariance,
    SmallDataGlobal,
    BlowupSweep,
    DecompositionCheck,
    LongtimeCalderon,
    StabilityPerturbation,
    WeakStrongUniqueness,
    ForceGallery,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        ScenarioKind::ScalingInvariance,
        ScenarioKind::SmallDataGlobal,
        ScenarioKind::BlowupSweep,
        ScenarioKind::DecompositionCheck,
        ScenarioKind::LongtimeCalderon,
        ScenarioKind::StabilityPerturbation,
        ScenarioKind::WeakStrongUniqueness,
        ScenarioKind::ForceGallery,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::ScalingInvariance => "scaling_invariance",
            ScenarioKind::SmallDataGlobal => "small_data_global",
            ScenarioKind::BlowupSweep => "blowup_sweep",
            ScenarioKind::DecompositionCheck => "decomposition_check",
            ScenarioKind::LongtimeCalderon => "longtime_calderon",
            ScenarioKind::StabilityPerturbation => "stability_perturbation",
            ScenarioKind::WeakStrongUniqueness => "weak_strong_uniqueness",
            ScenarioKind::ForceGallery => "force_gallery",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioKind::ScalingInvariance => {
                "critical Besov norm of random fields before and after dilation"
            }
            ScenarioKind::SmallDataGlobal => "Picard solve of small data with measured γ",
            ScenarioKind::BlowupSweep => "large data on nested horizons with growth curve",
            ScenarioKind::DecompositionCheck => "H/W/Z expansion evaluated against the solution",
            ScenarioKind::LongtimeCalderon => "small + finite-energy data to long times",
            ScenarioKind::StabilityPerturbation => "difference/perturbation ratios over δ",
            ScenarioKind::WeakStrongUniqueness => "two solution paths, energy of their difference",
            ScenarioKind::ForceGallery => "𝒴 norms and forced solutions for a set of forces",
        }
    }

    /// Scenarios that report Kato norms and so need a grid refined at `t = 0`.
    pub fn needs_geometric_times(self) -> bool {
        matches!(
            self,
            ScenarioKind::SmallDataGlobal
                | ScenarioKind::DecompositionCheck
                | ScenarioKind::LongtimeCalderon
                | ScenarioKind::StabilityPerturbation
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(default = "two_pi")]
    pub box_length: f64,
}

fn two_pi() -> f64 {
    2.0 * std::f64::consts::PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeGridConfig {
    Uniform {
        horizon: f64,
        samples: usize,
    },
    /// `0` followed by `samples - 1` geometrically spaced points from
    /// `first` to `horizon`.
    Geometric {
        first: f64,
        horizon: f64,
        samples: usize,
    },
}

impl TimeGridConfig {
    pub fn times(&self) -> Result<Vec<f64>> {
        Ok(match *self {
            TimeGridConfig::Uniform { horizon, samples } => uniform_times(horizon, samples)?,
            TimeGridConfig::Geometric {
                first,
                horizon,
                samples,
            } => geometric_times(first, horizon, samples)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    /// Seeds every random choice the scenario makes itself.
    pub seed: u64,
    #[serde(default = "default_p")]
    pub p: f64,
    pub grid: GridConfig,
    #[serde(default)]
    pub time: Option<TimeGridConfig>,
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub force: Option<ForceSpec>,
    #[serde(default)]
    pub initial: Option<FieldRecipe>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Scenario-specific parameters, validated by the scenario.
    #[serde(default)]
    pub params: toml::Table,
}

fn default_p() -> f64 {
    4.0
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path).map_err(|e| LabError::io(path, e))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| LabError::Config(format!("{} is not UTF-8", path.display())))?;
        Ok((Self::from_toml(&text)?, bytes))
    }

    pub fn grid(&self) -> Result<Grid> {
        Ok(Grid::new(self.grid.n, self.grid.box_length)?)
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        self.time
            .as_ref()
            .ok_or_else(|| {
                LabError::Config(format!("{} needs a [time] table", self.scenario.name()))
            })?
            .times()
    }

    /// Solver settings with `p` taken from the top level.
    pub fn solver(&self) -> SolverConfig {
        let mut s = self.solver.unwrap_or_else(|| SolverConfig::new(self.p));
        s.p = self.p;
        s
    }

    pub fn initial(&self) -> Result<&FieldRecipe> {
        self.initial.as_ref().ok_or_else(|| {
            LabError::Config(format!("{} needs an [initial] table", self.scenario.name()))
        })
    }

    pub fn force(&self) -> ForceSpec {
        self.force.clone().unwrap_or_else(ForceSpec::zero)
    }

    pub fn params<T: DeserializeOwned>(&self) -> Result<T> {
        T::deserialize(toml::Value::Table(self.params.clone()))
            .map_err(|e| LabError::Config(format!("[params]: {e}")))
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 3.0 && self.p.is_finite()) {
            return Err(LabError::Config(format!(
                "p must satisfy 3 < p < ∞, got {}",
                self.p
            )));
        }
        self.grid()?;
        if self.scenario != ScenarioKind::ScalingInvariance {
            let times = self.times()?;
            if self.scenario.needs_geometric_times()
                && matches!(self.time, Some(TimeGridConfig::Uniform { .. }))
            {
                return Err(LabError::Config(format!(
                    "{} reports Kato norms and needs a geometric time grid",
                    self.scenario.name()
                )));
            }
            debug_assert!(times.len() >= 2);
            self.solver().validate()?;
        }
        if let Some(f) = &self.force {
            f.validate()?;
        }
        if let Some(r) = &self.initial {
            r.build(&self.grid()?)?;
        }
        crate::scenarios::validate_params(self)
    }
}
