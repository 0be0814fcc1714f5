//! Experiment configuration: one JSON document per run, tagged by `command`.

use std::path::{Path, PathBuf};

use cyllab_core::degeneration::{FamilyGrid, SampleRule};
use cyllab_core::solve::DEFAULT_TOL;
use cyllab_core::{Complex64, SpectralBoundaryData, VectorFieldModel, VectorFieldSequence, WeightSchedule};
use serde::{Deserialize, Serialize};

/// Supported resolution ranges.
pub const MAX_S_SAMPLES: usize = 1 << 20;
pub const MAX_T_MODES: usize = 1 << 10;

/// Profile used when a subcommand is run without a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Full,
    /// `S = 512`, `T = 32`, two family entries.
    Quick,
}

/// Boundary data inline or from a JSON file (a list of `{side, k, re, im}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BdataSource {
    File(PathBuf),
    Inline(SpectralBoundaryData),
}

impl BdataSource {
    pub fn load(&self) -> anyhow::Result<SpectralBoundaryData> {
        match self {
            BdataSource::Inline(b) => Ok(b.clone()),
            BdataSource::File(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| anyhow::anyhow!("reading {}: {e}", p.display()))?;
                Ok(serde_json::from_str(&text)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub r: f64,
    pub s_samples: usize,
    pub t_modes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub grid: GridConfig,
    pub eps: f64,
    pub vfield: VectorFieldModel,
    pub bdata: BdataSource,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Field header written by `solve`.
    pub field: PathBuf,
    pub vfield: VectorFieldModel,
    pub eps: f64,
    /// Allowed ratio between fitted decay constants and their boundary scale.
    pub kappa: f64,
    /// Tolerance on the center-of-mass residual.
    pub com_tol: f64,
    /// Centers used by the convolution check.
    pub max_centers: usize,
    /// Size of the random corpus for the elliptic-constant probe; 0 skips it.
    #[serde(default)]
    pub elliptic_corpus: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub ell: f64,
    pub r_list: Vec<f64>,
    pub grid: FamilyGrid,
    pub vfield: VectorFieldSequence,
    pub bdata: BdataSource,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowlineConfig {
    pub vfield: VectorFieldModel,
    pub start: Vec<f64>,
    pub duration: f64,
    pub step: f64,
    #[serde(default)]
    pub backward: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    Solve(SolveConfig),
    Check(CheckConfig),
    Family(FamilyConfig),
    Flowline(FlowlineConfig),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Check(_) => "check",
            Command::Family(_) => "family",
            Command::Flowline(_) => "flowline",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub out_dir: PathBuf,
    /// Seed for random probe corpora.
    pub seed: u64,
    #[serde(flatten)]
    pub command: Command,
}

/// Validation failure naming every offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub problems: Vec<(String, String)>,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let keys: Vec<&str> = self.problems.iter().map(|(k, _)| k.as_str()).collect();
        write!(f, "invalid config keys [{}]", keys.join(", "))?;
        for (k, why) in &self.problems {
            write!(f, "\n  {k}: {why}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Default)]
struct Problems(Vec<(String, String)>);

impl Problems {
    fn require(&mut self, ok: bool, key: &str, why: impl Into<String>) {
        if !ok {
            self.0.push((key.to_string(), why.into()));
        }
    }

    fn positive(&mut self, v: f64, key: &str) {
        self.require(v > 0.0 && v.is_finite(), key, format!("must be positive, got {v}"));
    }

    fn t_modes(&mut self, t: usize, key: &str) {
        self.require(t >= 2 && t % 2 == 0 && t <= MAX_T_MODES, key, format!("must be even in [2, {MAX_T_MODES}], got {t}"));
    }

    fn s_samples(&mut self, s: usize, key: &str) {
        self.require((16..=MAX_S_SAMPLES).contains(&s), key, format!("must lie in [16, {MAX_S_SAMPLES}], got {s}"));
    }

    fn real_dim(&mut self, d: usize, key: &str) {
        self.require(d >= 2 && d % 2 == 0, key, format!("real dimension must be even and >= 2, got {d}"));
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut p = Problems::default();
        match &self.command {
            Command::Solve(c) => {
                p.positive(c.grid.r, "grid.r");
                p.s_samples(c.grid.s_samples, "grid.s_samples");
                p.t_modes(c.grid.t_modes, "grid.t_modes");
                p.require(c.eps >= 0.0 && c.eps.is_finite(), "eps", "must be a nonnegative number");
                p.positive(c.tol, "tol");
                p.real_dim(c.vfield.real_dim(), "vfield");
            }
            Command::Check(c) => {
                p.require(c.eps >= 0.0 && c.eps.is_finite(), "eps", "must be a nonnegative number");
                p.positive(c.kappa, "kappa");
                p.positive(c.com_tol, "com_tol");
                p.require(c.max_centers >= 1, "max_centers", "must be at least 1");
                p.real_dim(c.vfield.real_dim(), "vfield");
            }
            Command::Family(c) => {
                p.require(c.ell >= 0.0 && c.ell.is_finite(), "ell", "must be a nonnegative number");
                p.require(!c.r_list.is_empty(), "r_list", "must not be empty");
                p.require(
                    c.r_list.iter().all(|r| *r >= 2.0 && r.is_finite()) && c.r_list.windows(2).all(|w| w[1] > w[0]),
                    "r_list",
                    "radii must be >= 2 and strictly increasing",
                );
                match c.grid.samples {
                    SampleRule::Fixed { s_samples } => p.s_samples(s_samples, "grid.samples.s_samples"),
                    SampleRule::Density { samples_per_unit } => p.positive(samples_per_unit, "grid.samples.samples_per_unit"),
                }
                p.t_modes(c.grid.t_modes, "grid.t_modes");
                p.positive(c.tol, "tol");
                p.real_dim(c.vfield.limit.real_dim(), "vfield");
            }
            Command::Flowline(c) => {
                p.positive(c.duration, "duration");
                p.positive(c.step, "step");
                p.require(c.step <= c.duration, "step", "must not exceed duration");
                p.require(c.start.len() == c.vfield.real_dim(), "start", "length must match the field's real dimension");
                p.require(c.start.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-9, "start", "must lie in the closed unit ball");
            }
        }
        if p.0.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { problems: p.0 })
        }
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// `V_n = 0.5 x + (1/n) R` on `C^2`, with `R` a slow rotation.
pub fn default_sequence() -> VectorFieldSequence {
    VectorFieldSequence::new(
        VectorFieldModel::scalar(0.5, 4),
        VectorFieldModel::rotation(0.005, 4).expect("even dimension"),
        WeightSchedule::Harmonic,
    )
    .expect("matching dimensions")
}

/// Zero mode `0.3 e_1` on the left, `k = -1` on the left and `k = 1` on the right.
pub fn default_bdata() -> SpectralBoundaryData {
    let c = |re: f64| Complex64::new(re, 0.0);
    SpectralBoundaryData::from_modes(&[
        (0, vec![c(0.3), c(0.0)]),
        (-1, vec![c(0.1), c(0.0)]),
        (1, vec![c(0.1), c(0.05)]),
    ])
    .expect("valid template")
}

impl Profile {
    pub fn grid(self, r: f64) -> GridConfig {
        match self {
            Profile::Quick => GridConfig { r, s_samples: 512, t_modes: 32 },
            Profile::Full => GridConfig { r, s_samples: 2048, t_modes: 64 },
        }
    }

    pub fn family_grid(self) -> FamilyGrid {
        match self {
            Profile::Quick => FamilyGrid { samples: SampleRule::Fixed { s_samples: 512 }, t_modes: 32 },
            Profile::Full => FamilyGrid { samples: SampleRule::Density { samples_per_unit: 100.0 }, t_modes: 16 },
        }
    }

    pub fn r_list(self) -> Vec<f64> {
        match self {
            Profile::Quick => vec![10.0, 20.0],
            Profile::Full => vec![10.0, 20.0, 40.0, 80.0],
        }
    }

    pub fn solve(self) -> SolveConfig {
        SolveConfig {
            grid: self.grid(10.0),
            eps: 0.05,
            vfield: VectorFieldModel::scalar(0.5, 4),
            bdata: BdataSource::Inline(default_bdata()),
            tol: DEFAULT_TOL,
        }
    }

    pub fn check(self, field: PathBuf) -> CheckConfig {
        CheckConfig {
            field,
            vfield: VectorFieldModel::scalar(0.5, 4),
            eps: 0.05,
            kappa: cyllab_core::estimates::DEFAULT_KAPPA,
            com_tol: 1e-5,
            max_centers: 64,
            elliptic_corpus: 0,
        }
    }

    pub fn family(self) -> FamilyConfig {
        FamilyConfig {
            ell: 0.5,
            r_list: self.r_list(),
            grid: self.family_grid(),
            vfield: default_sequence(),
            bdata: BdataSource::Inline(default_bdata()),
            tol: DEFAULT_TOL,
        }
    }

    pub fn flowline(self) -> FlowlineConfig {
        FlowlineConfig {
            vfield: VectorFieldModel::scalar(0.5, 4),
            start: vec![0.3, 0.0, 0.0, 0.0],
            duration: 1.0,
            step: if self == Profile::Quick { 0.05 } else { 0.01 },
            backward: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn configs() -> Vec<ExperimentConfig> {
        let p = Profile::Quick;
        [
            Command::Solve(p.solve()),
            Command::Check(p.check("field.json".into())),
            Command::Family(p.family()),
            Command::Flowline(p.flowline()),
        ]
        .into_iter()
        .map(|command| ExperimentConfig { out_dir: "out".into(), seed: 7, command })
        .collect()
    }

    #[test]
    fn defaults_validate_and_round_trip() {
        for c in configs() {
            c.validate().unwrap();
            let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.to_json(), c.to_json());
        }
    }

    #[test]
    fn validation_lists_every_offending_key() {
        let mut c = configs().remove(0);
        if let Command::Solve(s) = &mut c.command {
            s.tol = 0.0;
            s.grid.t_modes = 7;
            s.eps = -1.0;
        }
        let err = c.validate().unwrap_err();
        let keys: Vec<&str> = err.problems.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, vec!["grid.t_modes", "eps", "tol"]);
        assert!(err.to_string().starts_with("invalid config keys [grid.t_modes, eps, tol]"));
    }

    #[test]
    fn bdata_file_source() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.json");
        std::fs::write(&path, serde_json::to_string(&default_bdata()).unwrap()).unwrap();
        assert_eq!(BdataSource::File(path).load().unwrap(), default_bdata());
        assert!(BdataSource::File(dir.path().join("missing.json")).load().is_err());
    }
}
