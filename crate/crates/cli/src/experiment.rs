use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use rsbm::graphgen::{sample_instance, SamplerOptions};
use rsbm::model::default_saw_depth;
use rsbm::recovery::{majority_iterate, overlap, spectral_recover, RecoverOptions, RecoveryResult};
use rsbm::saw::tangle_audit;
use rsbm::spectral::{top_eigenpairs, EigenOptions};
use rsbm::{PlantedInstance, RecoveryMethod, RsbmParams, SamplerKind};

use crate::commands::inject_errors;
use crate::error::{CliError, Result};

/// Version tag written in every CSV row and aggregate file.
pub const EXPERIMENT_SCHEMA: &str = "rsbm-experiment/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamsSpec {
    One(RsbmParams),
    Many(Vec<RsbmParams>),
}

impl ParamsSpec {
    pub fn list(&self) -> Vec<RsbmParams> {
        match self {
            ParamsSpec::One(p) => vec![*p],
            ParamsSpec::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub csv: PathBuf,
    pub json: PathBuf,
    /// Per-trial wall-clock sidecar; defaults to `<csv>.timings.json`.
    #[serde(default)]
    pub timings: Option<PathBuf>,
}

fn default_trials() -> usize {
    1
}

fn default_method() -> RecoveryMethod {
    RecoveryMethod::SpectralAdjacency
}

fn default_sampler() -> SamplerKind {
    SamplerKind::Configuration
}

/// Batch description read from JSON. Relative output paths resolve against
/// the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: ParamsSpec,
    #[serde(default = "default_sampler")]
    pub sampler: SamplerKind,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "default_method")]
    pub method: RecoveryMethod,
    /// Walk length for spectral_saw; the model's depth rule when absent.
    #[serde(default)]
    pub l: Option<usize>,
    /// Fraction of each side flipped before majority_only.
    #[serde(default)]
    pub error_injection: Option<f64>,
    #[serde(default)]
    pub max_rounds: Option<usize>,
    #[serde(default)]
    pub balanced_rounding: bool,
    /// Also record the top three adjacency eigenvalues and the gap.
    #[serde(default)]
    pub spectrum: bool,
    #[serde(default)]
    pub jobs: Option<usize>,
    pub outputs: Outputs,
}

impl ExperimentConfig {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.trials == 0 {
            return Err("trials must be at least 1".into());
        }
        let params = self.params.list();
        if params.is_empty() {
            return Err("params must not be empty".into());
        }
        for p in &params {
            p.validate_structure().map_err(|e| e.to_string())?;
        }
        if let Some(eps) = self.error_injection {
            if !(0.0..0.5).contains(&eps) {
                return Err(format!("error_injection must lie in [0, 1/2), got {eps}"));
            }
        }
        if self.method == RecoveryMethod::MajorityOnly && self.error_injection.is_none() {
            return Err("majority_only needs error_injection".into());
        }
        if self.l == Some(0) {
            return Err("l must be at least 1".into());
        }
        if self.max_rounds == Some(0) {
            return Err("max_rounds must be at least 1".into());
        }
        if self.jobs == Some(0) {
            return Err("jobs must be at least 1".into());
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|message| CliError::Config {
            path: path.to_path_buf(),
            message,
        })?;
        Ok(cfg)
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub schema_version: String,
    pub param_index: usize,
    pub n: usize,
    pub d1: usize,
    pub d2: usize,
    pub sampler: String,
    pub method: String,
    pub l: Option<usize>,
    pub seed: u64,
    pub agreement: Option<f64>,
    pub errors: Option<usize>,
    pub rounds: Option<usize>,
    pub converged: Option<bool>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub lambda3: Option<f64>,
    pub gamma: Option<f64>,
    pub tangle_free: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrialTiming {
    pub param_index: usize,
    pub seed: u64,
    pub sample_ms: f64,
    pub recover_ms: f64,
}

/// Summary of all trials sharing one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub param_index: usize,
    pub params: RsbmParams,
    pub trials: usize,
    pub completed: usize,
    pub failed: usize,
    /// Fraction of all trials ending with zero errors.
    pub success_rate: f64,
    pub mean_agreement: Option<f64>,
    pub mean_errors: Option<f64>,
    pub max_errors: Option<usize>,
    pub mean_rounds: Option<f64>,
    pub converged: usize,
}

pub struct ExperimentOutcome {
    pub rows: Vec<TrialRow>,
    pub groups: Vec<GroupSummary>,
    pub timings: Vec<TrialTiming>,
}

fn elapsed_ms(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn recover_one(cfg: &ExperimentConfig, inst: &PlantedInstance, l: Option<usize>) -> Result<RecoveryResult> {
    let max_rounds = cfg
        .max_rounds
        .unwrap_or_else(|| rsbm::recovery::default_max_rounds(inst.graph.num_vertices()));
    match cfg.method {
        RecoveryMethod::MajorityOnly => {
            let eps = cfg.error_injection.unwrap_or(0.0);
            let init = inject_errors(&inst.labels, eps, inst.seed)?;
            Ok(majority_iterate(&inst.graph, &init, max_rounds, Some(&inst.labels))?)
        }
        method => {
            let opts = RecoverOptions {
                eigen: EigenOptions::default().with_seed(inst.seed),
                saw_depth: l.unwrap_or(1),
                balanced_rounding: cfg.balanced_rounding,
                max_rounds: Some(max_rounds),
                params: Some(inst.params),
            };
            Ok(spectral_recover(&inst.graph, method, &opts, Some(&inst.labels))?)
        }
    }
}

fn run_trial(cfg: &ExperimentConfig, param_index: usize, params: RsbmParams, seed: u64) -> (TrialRow, TrialTiming) {
    let l = match cfg.method {
        RecoveryMethod::SpectralSaw => Some(cfg.l.unwrap_or_else(|| default_saw_depth(&params))),
        _ => None,
    };
    let mut row = TrialRow {
        schema_version: EXPERIMENT_SCHEMA.into(),
        param_index,
        n: params.n,
        d1: params.d1,
        d2: params.d2,
        sampler: cfg.sampler.name().into(),
        method: cfg.method.name().into(),
        l,
        seed,
        agreement: None,
        errors: None,
        rounds: None,
        converged: None,
        lambda1: None,
        lambda2: None,
        lambda3: None,
        gamma: None,
        tangle_free: None,
        error: None,
    };
    let mut timing = TrialTiming {
        param_index,
        seed,
        sample_ms: 0.0,
        recover_ms: 0.0,
    };
    let t = Instant::now();
    let inst = match sample_instance(&params, seed, cfg.sampler, &SamplerOptions::default()) {
        Ok(i) => i,
        Err(e) => {
            row.error = Some(e.to_string());
            return (row, timing);
        }
    };
    timing.sample_ms = elapsed_ms(t);

    let t = Instant::now();
    let outcome = recover_one(cfg, &inst, l).and_then(|r| {
        let o = overlap(&inst.labels, &r.final_labels)?;
        Ok((r, o))
    });
    match outcome {
        Ok((r, o)) => {
            row.agreement = Some(o.agreement);
            row.errors = Some(o.errors);
            row.rounds = Some(r.rounds_used);
            row.converged = Some(r.converged);
            row.lambda2 = r.lambda2;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    if cfg.spectrum && row.error.is_none() {
        let opts = EigenOptions::default().with_seed(seed);
        match top_eigenpairs(&inst.graph, 3.min(inst.graph.num_vertices()), &opts) {
            Ok(s) => {
                row.lambda1 = s.eigenvalues.first().copied();
                row.lambda2 = s.eigenvalues.get(1).copied().or(row.lambda2);
                row.lambda3 = s.eigenvalues.get(2).copied();
                row.gamma = s.gamma;
            }
            Err(e) => row.error = Some(e.to_string()),
        }
    }
    if let Some(l) = l {
        row.tangle_free = Some(tangle_audit(&inst.graph, l).tangle_free);
    }
    timing.recover_ms = elapsed_ms(t);
    (row, timing)
}

fn summarize(param_index: usize, params: RsbmParams, rows: &[&TrialRow]) -> GroupSummary {
    let done: Vec<&&TrialRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    let mean = |xs: Vec<f64>| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    GroupSummary {
        param_index,
        params,
        trials: rows.len(),
        completed: done.len(),
        failed: rows.len() - done.len(),
        success_rate: done.iter().filter(|r| r.errors == Some(0)).count() as f64 / rows.len() as f64,
        mean_agreement: mean(done.iter().filter_map(|r| r.agreement).collect()),
        mean_errors: mean(done.iter().filter_map(|r| r.errors.map(|e| e as f64)).collect()),
        max_errors: done.iter().filter_map(|r| r.errors).max(),
        mean_rounds: mean(done.iter().filter_map(|r| r.rounds.map(|e| e as f64)).collect()),
        converged: done.iter().filter(|r| r.converged == Some(true)).count(),
    }
}

/// Runs every trial; row order is (param_index, seed) regardless of `jobs`.
pub fn run(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<ExperimentOutcome> {
    cfg.validate().map_err(CliError::Validation)?;
    let params = cfg.params.list();
    let tasks: Vec<(usize, RsbmParams, u64)> = params
        .iter()
        .enumerate()
        .flat_map(|(i, p)| (0..cfg.trials as u64).map(move |t| (i, *p, cfg.seed_base.wrapping_add(t))))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs.or(cfg.jobs) {
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start worker pool: {e}")))?;
    let results: Vec<(TrialRow, TrialTiming)> =
        pool.install(|| tasks.par_iter().map(|&(i, p, s)| run_trial(cfg, i, p, s)).collect());
    let (rows, timings): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let groups = params
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mine: Vec<&TrialRow> = rows.iter().filter(|r| r.param_index == i).collect();
            summarize(i, *p, &mine)
        })
        .collect();
    Ok(ExperimentOutcome { rows, groups, timings })
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Loads the config, runs it and writes the CSV, aggregate JSON and timings.
pub fn run_file(config: &Path, jobs: Option<usize>) -> Result<String> {
    if jobs == Some(0) {
        return Err(CliError::Validation("--jobs must be at least 1".into()));
    }
    let cfg = ExperimentConfig::load(config)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let csv_path = resolve(base, &cfg.outputs.csv);
    let json_path = resolve(base, &cfg.outputs.json);
    let timings_path = match &cfg.outputs.timings {
        Some(p) => resolve(base, p),
        None => {
            let mut s = csv_path.clone().into_os_string();
            s.push(".timings.json");
            PathBuf::from(s)
        }
    };

    let start = Instant::now();
    let out = run(&cfg, jobs)?;
    let total_ms = elapsed_ms(start);

    let mut w = csv::Writer::from_path(&csv_path)?;
    for row in &out.rows {
        w.serialize(row)?;
    }
    w.flush()?;

    let aggregate = json!({
        "schema_version": EXPERIMENT_SCHEMA,
        "config": cfg,
        "groups": out.groups,
    });
    fs::write(&json_path, serde_json::to_string_pretty(&aggregate)? + "\n")?;
    let timings = json!({
        "schema_version": EXPERIMENT_SCHEMA,
        "total_ms": total_ms,
        "trials": out.timings,
    });
    fs::write(&timings_path, serde_json::to_string_pretty(&timings)? + "\n")?;

    let failed: usize = out.groups.iter().map(|g| g.failed).sum();
    Ok(format!(
        "{} trials ({} failed) -> {}, {}",
        out.rows.len(),
        failed,
        csv_path.display(),
        json_path.display()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_config() -> ExperimentConfig {
        serde_json::from_str(
            r#"{"params": {"n": 50, "d1": 10, "d2": 2}, "trials": 2,
                "outputs": {"csv": "out.csv", "json": "out.json"}}"#,
        )
        .unwrap()
    }

    #[test]
    fn config_defaults_and_round_trip() {
        let cfg = sample_config();
        assert_eq!(cfg.sampler, SamplerKind::Configuration);
        assert_eq!(cfg.method, RecoveryMethod::SpectralAdjacency);
        assert_eq!(cfg.params.list().len(), 1);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), cfg);
    }

    #[test]
    fn config_rejects_unknown_fields_and_bad_values() {
        let bad = r#"{"params": {"n": 50, "d1": 10, "d2": 2}, "trails": 2,
                      "outputs": {"csv": "a", "json": "b"}}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(bad).is_err());
        let mut cfg = sample_config();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = sample_config();
        cfg.method = RecoveryMethod::MajorityOnly;
        assert!(cfg.validate().is_err());
        cfg.error_injection = Some(0.5);
        assert!(cfg.validate().is_err());
        cfg.error_injection = Some(0.1);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rows_are_ordered_and_independent_of_jobs() {
        let mut cfg = sample_config();
        cfg.params = ParamsSpec::Many(vec![RsbmParams::unchecked(40, 10, 2), RsbmParams::unchecked(30, 8, 2)]);
        cfg.trials = 3;
        cfg.seed_base = 7;
        let a = run(&cfg, Some(1)).unwrap();
        let b = run(&cfg, Some(4)).unwrap();
        assert_eq!(a.rows, b.rows);
        let keys: Vec<(usize, u64)> = a.rows.iter().map(|r| (r.param_index, r.seed)).collect();
        assert_eq!(keys, vec![(0, 7), (0, 8), (0, 9), (1, 7), (1, 8), (1, 9)]);
        assert_eq!(a.groups.len(), 2);
        assert!(a.groups.iter().all(|g| g.trials == 3));
    }
}
