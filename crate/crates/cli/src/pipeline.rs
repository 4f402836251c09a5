//! Stage graph, content-addressed caching and the run manifest.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::PipelineConfig;
use crate::stages;
use crate::PipelineError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Synth,
    Delineate,
    Panel,
    Relatedness,
    Complexity,
    Potential,
    Frame,
    Table5,
    Table6,
    Elasticity,
    Firmstats,
    Scaling,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 13] = [
        Stage::Synth,
        Stage::Delineate,
        Stage::Panel,
        Stage::Relatedness,
        Stage::Complexity,
        Stage::Potential,
        Stage::Frame,
        Stage::Table5,
        Stage::Table6,
        Stage::Elasticity,
        Stage::Firmstats,
        Stage::Scaling,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Synth => "synth",
            Stage::Delineate => "delineate",
            Stage::Panel => "panel",
            Stage::Relatedness => "relatedness",
            Stage::Complexity => "complexity",
            Stage::Potential => "potential",
            Stage::Frame => "frame",
            Stage::Table5 => "table5",
            Stage::Table6 => "table6",
            Stage::Elasticity => "elasticity",
            Stage::Firmstats => "firmstats",
            Stage::Scaling => "scaling",
            Stage::Report => "report",
        }
    }

    pub fn deps(self, has_synth: bool) -> Vec<Stage> {
        use Stage::*;
        let mut d = match self {
            Synth => vec![],
            Delineate => vec![],
            Panel => vec![Delineate],
            Relatedness => vec![],
            Complexity => vec![Panel],
            Potential => vec![Panel, Relatedness],
            Frame => vec![Panel, Potential],
            Table5 | Table6 => vec![Frame],
            Elasticity | Scaling => vec![Panel, Complexity],
            Firmstats => vec![Complexity],
            Report => vec![Table5, Table6, Elasticity, Firmstats, Scaling],
        };
        if has_synth && self != Synth {
            d.push(Synth);
        }
        d
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub key: String,
    /// Output path relative to the output directory → SHA-256 of contents.
    pub outputs: BTreeMap<String, String>,
    pub diagnostics: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config_hash: String,
    pub stages: BTreeMap<String, StageRecord>,
}

/// What a stage produced: relative output paths and diagnostics.
#[derive(Debug, Default)]
pub struct StageOutput {
    pub files: Vec<String>,
    pub diagnostics: BTreeMap<String, Value>,
}

impl StageOutput {
    pub fn file(&mut self, rel: &str) -> &mut Self {
        self.files.push(rel.to_string());
        self
    }

    pub fn diag(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub executed: Vec<String>,
    pub cached: Vec<String>,
}

pub struct Pipeline {
    pub cfg: PipelineConfig,
    pub out: PathBuf,
    previous: Option<Manifest>,
    records: Mutex<BTreeMap<Stage, StageRecord>>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(path: &Path) -> Result<String, PipelineError> {
    let bytes = std::fs::read(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(sha256_hex(&bytes))
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let out = cfg.output.dir.clone();
        let previous = std::fs::read(out.join(MANIFEST))
            .ok()
            .and_then(|b| serde_json::from_slice::<Manifest>(&b).ok());
        Ok(Pipeline {
            cfg,
            out,
            previous,
            records: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.out.join(rel)
    }

    fn has_synth(&self) -> bool {
        self.cfg.synthetic.is_some()
    }

    /// Raw input paths, or the generated ones for a synthetic run.
    pub fn raw_input(&self, name: &str) -> Option<PathBuf> {
        if self.has_synth() {
            return Some(self.path(&format!("inputs/{name}.csv")));
        }
        let i = &self.cfg.inputs;
        let rel = match name {
            "employment" => Some(&i.employment),
            "population" => Some(&i.population),
            "flows" => Some(&i.flows),
            "commuting" => i.commuting.as_ref(),
            "firms" => i.firms.as_ref(),
            "aux" => i.aux.as_ref(),
            _ => None,
        }?;
        let p = self.cfg.input(rel);
        // Optional inputs that are absent are treated as not configured.
        if matches!(name, "commuting" | "firms" | "aux") && !p.exists() {
            return None;
        }
        Some(p)
    }

    fn closure(&self, targets: &[Stage]) -> BTreeSet<Stage> {
        let mut need = BTreeSet::new();
        let mut stack: Vec<Stage> = targets.to_vec();
        while let Some(s) = stack.pop() {
            if s == Stage::Firmstats && !self.has_synth() && self.raw_input("firms").is_none() {
                continue;
            }
            if need.insert(s) {
                stack.extend(s.deps(self.has_synth()));
            }
        }
        need
    }

    /// Runs the targets and everything they depend on, independent stages in
    /// parallel, then writes the manifest.
    pub fn run(&self, targets: &[Stage]) -> Result<RunSummary, PipelineError> {
        std::fs::create_dir_all(&self.out).map_err(|source| PipelineError::Io {
            path: self.out.clone(),
            source,
        })?;
        let need = self.closure(targets);
        let mut done: BTreeSet<Stage> = BTreeSet::new();
        let mut summary = RunSummary::default();
        while done.len() < need.len() {
            let wave: Vec<Stage> = need
                .iter()
                .copied()
                .filter(|s| !done.contains(s))
                .filter(|s| {
                    s.deps(self.has_synth())
                        .iter()
                        .all(|d| done.contains(d) || !need.contains(d))
                })
                .collect();
            let results: Vec<(Stage, Result<bool, PipelineError>)> =
                wave.par_iter().map(|&s| (s, self.run_stage(s))).collect();
            for (s, r) in results {
                if r? {
                    summary.cached.push(s.name().to_string());
                } else {
                    summary.executed.push(s.name().to_string());
                }
                done.insert(s);
            }
        }
        self.write_manifest()?;
        Ok(summary)
    }

    fn stage_inputs(&self, stage: Stage) -> Vec<PathBuf> {
        let raw = |n: &str| self.raw_input(n).into_iter().collect::<Vec<_>>();
        match stage {
            Stage::Delineate => {
                let c = raw("commuting");
                if c.is_empty() {
                    raw("employment")
                } else {
                    c
                }
            }
            Stage::Panel => [raw("employment"), raw("population")].concat(),
            Stage::Relatedness => raw("flows"),
            Stage::Frame => raw("aux"),
            Stage::Firmstats => raw("firms"),
            _ => vec![],
        }
    }

    fn params(&self, stage: Stage) -> Value {
        let c = &self.cfg;
        let v = match stage {
            Stage::Synth => serde_json::to_value(&c.synthetic),
            Stage::Delineate => serde_json::to_value(&c.delineation),
            Stage::Panel => serde_json::to_value((&c.filter, &c.years, c.inputs.permissive)),
            Stage::Relatedness => Ok(Value::Null),
            Stage::Complexity => serde_json::to_value(&c.complexity),
            Stage::Potential => serde_json::to_value((&c.complexity, &c.relatedness)),
            Stage::Frame => Ok(Value::Null),
            Stage::Table5 | Stage::Table6 | Stage::Elasticity | Stage::Firmstats => {
                serde_json::to_value(&c.regressions)
            }
            Stage::Scaling => serde_json::to_value((&c.scaling, c.complexity.rca_cutoff)),
            Stage::Report => Ok(Value::Null),
        };
        v.expect("config serializes")
    }

    fn key(&self, stage: Stage) -> Result<String, PipelineError> {
        let mut h = Sha256::new();
        h.update(stage.name().as_bytes());
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update(self.params(stage).to_string().as_bytes());
        for p in self.stage_inputs(stage) {
            h.update(
                p.file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
            );
            h.update(digest_file(&p)?.as_bytes());
        }
        let records = self.records.lock().expect("lock");
        for d in stage.deps(self.has_synth()) {
            if let Some(r) = records.get(&d) {
                h.update(d.name().as_bytes());
                h.update(r.key.as_bytes());
                for (f, dg) in &r.outputs {
                    h.update(f.as_bytes());
                    h.update(dg.as_bytes());
                }
            }
        }
        Ok(hex::encode(h.finalize()))
    }

    fn cached(&self, stage: Stage, key: &str) -> Option<StageRecord> {
        let prev = self.previous.as_ref()?.stages.get(stage.name())?;
        if prev.key != key {
            return None;
        }
        for (f, d) in &prev.outputs {
            match digest_file(&self.path(f)) {
                Ok(got) if &got == d => {}
                _ => return None,
            }
        }
        Some(prev.clone())
    }

    /// Returns whether the stage was served from cache.
    fn run_stage(&self, stage: Stage) -> Result<bool, PipelineError> {
        let key = self.key(stage)?;
        if let Some(rec) = self.cached(stage, &key) {
            info!("{}: cached", stage.name());
            self.records.lock().expect("lock").insert(stage, rec);
            return Ok(true);
        }
        info!("{}: running", stage.name());
        let out = stages::execute(self, stage).map_err(|e| match e {
            PipelineError::Stage { .. } => e,
            other => PipelineError::Stage {
                stage: stage.name().to_string(),
                message: other.to_string(),
            },
        })?;
        let mut outputs = BTreeMap::new();
        for f in out.files {
            let d = digest_file(&self.path(&f))?;
            outputs.insert(f, d);
        }
        let rec = StageRecord {
            key,
            outputs,
            diagnostics: out.diagnostics,
        };
        self.records.lock().expect("lock").insert(stage, rec);
        Ok(false)
    }

    pub fn record(&self, stage: Stage) -> Option<StageRecord> {
        self.records.lock().expect("lock").get(&stage).cloned()
    }

    pub fn manifest(&self) -> Manifest {
        let cfg_json = serde_json::to_string(&self.cfg_for_hash()).expect("config serializes");
        Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: sha256_hex(cfg_json.as_bytes()),
            stages: self
                .records
                .lock()
                .expect("lock")
                .iter()
                .map(|(s, r)| (s.name().to_string(), r.clone()))
                .collect(),
        }
    }

    /// The configuration without machine-specific paths.
    fn cfg_for_hash(&self) -> PipelineConfig {
        let mut c = self.cfg.clone();
        c.output.dir = PathBuf::new();
        c.inputs.dir = PathBuf::new();
        c
    }

    fn write_manifest(&self) -> Result<(), PipelineError> {
        // Keep entries of stages not run this time.
        let mut m = self.manifest();
        if let Some(prev) = &self.previous {
            if prev.config_hash == m.config_hash {
                for (k, v) in &prev.stages {
                    m.stages.entry(k.clone()).or_insert_with(|| v.clone());
                }
            }
        }
        let mut text = serde_json::to_string_pretty(&m)?;
        text.push('\n');
        let p = self.path(MANIFEST);
        std::fs::write(&p, text).map_err(|source| PipelineError::Io { path: p, source })
    }
}
