//! Monte Carlo harness: a registry of named experiments, deterministic
//! per-trial seeding, aggregation and reports.

pub mod experiments;
pub mod report;
pub mod stats;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::digest::{DigestHeader, DigestMode};
use crate::error::{Error, Result};
pub use report::{emit_report, report_to_string, ConfigEcho, Metric, ReportFormat, Resources, RunReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub experiment: String,
    pub n_nodes: usize,
    pub n_rounds: usize,
    /// Hash width; in bijective mode it is implied by `n_nodes`.
    pub digest_width: Option<usize>,
    pub digest_mode: DigestMode,
    pub m: usize,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub edge_density: f64,
    pub collision_budget: usize,
    pub digest_key: String,
    pub f_key: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: "gmw".into(),
            n_nodes: 8,
            n_rounds: 8,
            digest_width: None,
            digest_mode: DigestMode::Hash,
            m: 32,
            k: 4,
            trials: 10_000,
            seed: 0,
            output_path: None,
            edge_density: 0.5,
            collision_budget: 100_000,
            digest_key: "zkxfer-digest".into(),
            f_key: "zkxfer-f".into(),
        }
    }
}

impl RunConfig {
    pub fn for_experiment(name: &str) -> Self {
        Self { experiment: name.into(), ..Self::default() }
    }

    /// Checks shared by every experiment.
    pub fn validate_common(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.edge_density > 0.0 && self.edge_density < 1.0) {
            return Err(Error::InvalidDensity(self.edge_density));
        }
        Ok(())
    }
}

/// What an experiment reports for one metric, fixed before any trial runs.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub name: String,
    pub model_value: f64,
    pub reference_value: Option<f64>,
}

impl MetricSpec {
    pub fn new(name: &str, model_value: f64) -> Self {
        Self { name: name.into(), model_value, reference_value: None }
    }

    pub fn with_reference(mut self, r: f64) -> Self {
        self.reference_value = Some(r);
        self
    }
}

/// One trial's contribution: `(successes, count)` per metric, in the order
/// of [`Plan::metrics`].
#[derive(Debug, Clone, Default)]
pub struct TrialRecord {
    pub counts: Vec<(u64, u64)>,
    pub resources: Resources,
    pub transcript: Vec<serde_json::Value>,
}

/// A validated, ready-to-run configuration of one experiment.
pub trait Plan {
    fn metrics(&self) -> Vec<MetricSpec>;
    fn trial(&self, rng: &mut ChaCha8Rng, want_transcript: bool) -> Result<TrialRecord>;

    fn digest(&self) -> Option<DigestHeader> {
        None
    }

    fn f_key_hex(&self) -> Option<String> {
        None
    }

    fn notes(&self) -> Vec<String> {
        Vec::new()
    }
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// Validates `cfg` for this experiment and builds its plan.
    fn plan(&self, cfg: &RunConfig) -> Result<Box<dyn Plan>>;
}

#[derive(Default)]
pub struct Registry {
    experiments: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_builtin() -> Self {
        let mut r = Self::new();
        for e in experiments::builtin() {
            r.register(e);
        }
        r
    }

    pub fn register(&mut self, e: Box<dyn Experiment>) {
        self.experiments.insert(e.name(), e);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Experiment> {
        self.experiments.get(name).map(|e| e.as_ref())
    }

    /// `(name, description)` in name order.
    pub fn list(&self) -> Vec<(&'static str, &'static str)> {
        self.experiments.values().map(|e| (e.name(), e.description())).collect()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.experiments.keys().copied().collect()
    }
}

/// Per-trial seeds: successive SplitMix64 outputs from the master seed. The
/// generator is a bijective mix of a counter stepping by an odd constant,
/// so the first 2^64 outputs are pairwise distinct.
pub fn trial_seeds(master: u64) -> impl Iterator<Item = u64> {
    let mut sm = SplitMix64::seed_from_u64(master);
    std::iter::repeat_with(move || sm.next_u64())
}

pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    run_with(&Registry::with_builtin(), cfg, None)
}

/// Runs `cfg.trials` trials. When `transcript` is given it receives the
/// first trial's transcript lines.
pub fn run_with(
    registry: &Registry,
    cfg: &RunConfig,
    mut transcript: Option<&mut Vec<serde_json::Value>>,
) -> Result<RunReport> {
    let exp = registry
        .get(&cfg.experiment)
        .ok_or_else(|| Error::Config(format!("unknown experiment {:?}", cfg.experiment)))?;
    cfg.validate_common()?;
    let plan = exp.plan(cfg)?;
    let specs = plan.metrics();
    let start = Instant::now();
    let mut totals = vec![(0u64, 0u64); specs.len()];
    let mut resources = Resources::default();
    for (i, seed) in trial_seeds(cfg.seed).take(cfg.trials as usize).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let want = i == 0 && transcript.is_some();
        let rec = plan.trial(&mut rng, want)?;
        debug_assert_eq!(rec.counts.len(), specs.len());
        for (t, c) in totals.iter_mut().zip(&rec.counts) {
            t.0 += c.0;
            t.1 += c.1;
        }
        resources.bell_pairs = resources.bell_pairs.max(rec.resources.bell_pairs);
        resources.qubits = resources.qubits.max(rec.resources.qubits);
        resources.collision_calls += rec.resources.collision_calls;
        if want {
            if let Some(t) = transcript.as_deref_mut() {
                *t = rec.transcript;
            }
        }
    }
    let metrics = specs
        .iter()
        .zip(&totals)
        .map(|(s, &(hits, n))| Metric::new(&s.name, hits, n, s.model_value, s.reference_value))
        .collect();
    Ok(RunReport {
        schema_version: report::SCHEMA_VERSION,
        experiment: cfg.experiment.clone(),
        config: ConfigEcho {
            config: cfg.clone(),
            digest: plan.digest(),
            f_key_hex: plan.f_key_hex(),
            notes: plan.notes(),
        },
        metrics,
        resources,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
