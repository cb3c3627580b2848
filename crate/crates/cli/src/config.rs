//! Experiment config files: JSON, `schema_version` 1, unknown keys rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use inertial_kuramoto::bifurcation::PitchforkPrediction;
use inertial_kuramoto::freq_dist::FrequencyDistribution;
use inertial_kuramoto::graphon::Graphon;
use inertial_kuramoto::simulator::{SimConfig, SweepMode};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub distribution: DistributionSpec,
    pub graphon: GraphonSpec,
    #[serde(default)]
    pub simulation: SimulationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<KGrid>,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_replicas() -> usize {
    4
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistKind {
    Gaussian,
    Cauchy,
}

/// `param` is σ for Gaussian and Δ for Cauchy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub kind: DistKind,
    pub param: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_exponent: Option<f64>,
}

impl DistributionSpec {
    pub fn build(&self) -> Result<FrequencyDistribution> {
        let d = match self.kind {
            DistKind::Gaussian => FrequencyDistribution::gaussian(self.param)?,
            DistKind::Cauchy => FrequencyDistribution::cauchy(self.param)?,
        };
        Ok(match self.decay_exponent {
            Some(a) => d.with_decay_exponent(a)?,
            None => d,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphonSpec {
    ErdosRenyi { p: f64 },
    SmallWorld { p: f64, r: f64 },
    Complete,
}

impl GraphonSpec {
    pub fn build(&self) -> Result<Graphon> {
        Ok(match *self {
            GraphonSpec::ErdosRenyi { p } => Graphon::erdos_renyi(p)?,
            GraphonSpec::SmallWorld { p, r } => Graphon::small_world(p, r)?,
            GraphonSpec::Complete => Graphon::Complete,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub n: usize,
    pub dt: f64,
    pub t_transient: f64,
    pub t_average: f64,
    pub perturbation: f64,
    /// Measured and seeded Fourier mode; chosen from the spectrum when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<i64>,
    #[serde(default)]
    pub sweep_mode: SweepMode,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            n: d.n,
            dt: d.dt,
            t_transient: d.t_transient,
            t_average: d.t_average,
            perturbation: d.perturbation,
            mode: None,
            sweep_mode: SweepMode::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GridUnits {
    #[default]
    Absolute,
    /// Multiples of the positive critical coupling.
    #[serde(rename = "k_c")]
    KC,
    /// Multiples of the negative critical coupling.
    #[serde(rename = "k_c_minus")]
    KCMinus,
}

/// `count` equally spaced couplings from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub units: GridUnits,
}

impl KGrid {
    pub fn couplings(&self, prediction: &PitchforkPrediction) -> Result<Vec<f64>> {
        let unit = match self.units {
            GridUnits::Absolute => 1.0,
            GridUnits::KC => prediction.k_c,
            GridUnits::KCMinus => match prediction.k_c_minus {
                Some(k) => k,
                None => bail!("k_grid units k_c_minus need a graphon with a negative eigenvalue"),
            },
        };
        let (a, b) = (self.min * unit, self.max * unit);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Ok(match self.count {
            0 => Vec::new(),
            1 => vec![lo],
            m => (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect(),
        })
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config: Self =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema_version {}, expected {SCHEMA_VERSION}", self.schema_version);
        }
        self.distribution.build().context("distribution")?;
        self.graphon.build().context("graphon")?;
        self.sim_config(0).validate().context("simulation")?;
        if self.replicas == 0 {
            bail!("replicas must be at least 1");
        }
        if let Some(g) = &self.k_grid {
            if !(g.min.is_finite() && g.max.is_finite()) || g.min > g.max {
                bail!("k_grid needs finite min <= max, got [{}, {}]", g.min, g.max);
            }
        }
        Ok(())
    }

    pub fn sim_config(&self, mode: i64) -> SimConfig {
        let s = &self.simulation;
        SimConfig {
            n: s.n,
            coupling: 0.0,
            dt: s.dt,
            t_transient: s.t_transient,
            t_average: s.t_average,
            seed: self.seed,
            mode,
            perturbation: s.perturbation,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2A: &str = r#"{
        "schema_version": 1,
        "distribution": {"kind": "gaussian", "param": 0.3},
        "graphon": {"kind": "erdos_renyi", "p": 0.5},
        "k_grid": {"min": 0.5, "max": 2.0, "count": 40, "units": "k_c"}
    }"#;

    #[test]
    fn round_trip() {
        let a: ExperimentConfig = serde_json::from_str(FIG2A).unwrap();
        let b: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(a, b);
        a.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_keys() {
        let typo = FIG2A.replace("\"k_grid\"", "\"kgrid\"");
        assert!(serde_json::from_str::<ExperimentConfig>(&typo).is_err());
        let nested = FIG2A.replace("\"p\": 0.5", "\"p\": 0.5, \"q\": 1");
        assert!(serde_json::from_str::<ExperimentConfig>(&nested).is_err());
    }

    #[test]
    fn rejects_wrong_schema_and_ranges() {
        let mut c: ExperimentConfig = serde_json::from_str(FIG2A).unwrap();
        c.schema_version = 2;
        assert!(c.validate().is_err());
        c.schema_version = 1;
        c.graphon = GraphonSpec::ErdosRenyi { p: 1.5 };
        assert!(c.validate().is_err());
    }
}
