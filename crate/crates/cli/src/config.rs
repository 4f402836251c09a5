use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use skillscape_core::econometrics::SynthConfig;
use skillscape_core::ingest::{Year, DEFAULT_EXCLUDED_DIVISIONS};

use crate::PipelineError;

/// Declarative description of a full pipeline run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: Inputs,
    /// When present, inputs are generated instead of read.
    pub synthetic: Option<SynthConfig>,
    pub filter: Filter,
    pub delineation: Delineation,
    pub years: Years,
    pub complexity: Complexity,
    pub relatedness: Relatedness,
    pub regressions: Regressions,
    pub scaling: Scaling,
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    /// Base directory for the relative paths below.
    pub dir: PathBuf,
    pub employment: PathBuf,
    pub population: PathBuf,
    /// Without a commuting table every municipality is its own city.
    pub commuting: Option<PathBuf>,
    pub flows: PathBuf,
    pub firms: Option<PathBuf>,
    pub aux: Option<PathBuf>,
    /// Skip malformed rows instead of failing.
    pub permissive: bool,
}

impl Default for Inputs {
    fn default() -> Self {
        Inputs {
            dir: PathBuf::from("."),
            employment: "employment.csv".into(),
            population: "population.csv".into(),
            commuting: Some("commuting.csv".into()),
            flows: "flows.csv".into(),
            firms: Some("firms.csv".into()),
            aux: Some("aux.csv".into()),
            permissive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Filter {
    pub exclude: Vec<String>,
}

impl Default for Filter {
    fn default() -> Self {
        Filter {
            exclude: DEFAULT_EXCLUDED_DIVISIONS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Delineation {
    pub threshold: f64,
    pub pop_floor: f64,
}

impl Default for Delineation {
    fn default() -> Self {
        Delineation {
            threshold: 0.10,
            pop_floor: 50_000.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Years {
    pub start: Option<Year>,
    pub end: Option<Year>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Complexity {
    /// `eig` or `reflections`.
    pub method: String,
    pub iterations: usize,
    pub rca_cutoff: f64,
    /// Score a single year instead of the pooled panel.
    pub year: Option<Year>,
}

impl Default for Complexity {
    fn default() -> Self {
        Complexity {
            method: "eig".into(),
            iterations: 50,
            rca_cutoff: 1.0,
            year: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Relatedness {
    pub clip_negative: bool,
    /// Year whose density table is written; all years when unset.
    pub density_year: Option<Year>,
}

impl Default for Relatedness {
    fn default() -> Self {
        Relatedness {
            clip_negative: true,
            density_year: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Regressions {
    /// `robust` (HC1) or `classical`.
    pub se: String,
    pub city_fe: bool,
    pub year_fe: bool,
    pub table5: Vec<u8>,
    pub table6: Vec<u8>,
    pub vif_threshold: f64,
    pub min_firm_employees: f64,
    pub hr_covariates: bool,
}

impl Default for Regressions {
    fn default() -> Self {
        Regressions {
            se: "robust".into(),
            city_fe: false,
            year_fe: true,
            table5: vec![1, 2, 3, 4],
            table6: vec![1, 2, 3],
            vif_threshold: 10.0,
            min_firm_employees: 50.0,
            hr_covariates: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scaling {
    /// Defaults to the last panel year.
    pub year: Option<Year>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub dir: PathBuf,
}

impl Default for Output {
    fn default() -> Self {
        Output { dir: "out".into() }
    }
}

impl PipelineConfig {
    /// Reads a TOML config. Relative input and output paths are resolved
    /// against the config file's directory.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: PipelineConfig =
            toml::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.inputs.dir.is_relative() {
            cfg.inputs.dir = base.join(&cfg.inputs.dir);
        }
        if cfg.output.dir.is_relative() {
            cfg.output.dir = base.join(&cfg.output.dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if !["eig", "reflections"].contains(&self.complexity.method.as_str()) {
            return bad(format!("unknown complexity method `{}`", self.complexity.method));
        }
        if !["robust", "classical"].contains(&self.regressions.se.as_str()) {
            return bad(format!("unknown standard-error mode `{}`", self.regressions.se));
        }
        if let Some(c) = self.regressions.table5.iter().find(|c| !(1..=4).contains(*c)) {
            return bad(format!("table5 has columns 1-4, got {c}"));
        }
        if let Some(c) = self.regressions.table6.iter().find(|c| !(1..=3).contains(*c)) {
            return bad(format!("table6 has columns 1-3, got {c}"));
        }
        if let (Some(s), Some(e)) = (self.years.start, self.years.end) {
            if s > e {
                return bad(format!("years.start {s} is after years.end {e}"));
            }
        }
        if let Some(s) = &self.synthetic {
            s.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn input(&self, file: &Path) -> PathBuf {
        self.inputs.dir.join(file)
    }
}
