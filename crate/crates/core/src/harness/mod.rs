//! Experiment orchestration.
//!
//! An [`ExperimentConfig`] names a method, an objective and a budget.
//! [`run_experiment`] executes seeded repetitions and, when an output
//! directory is set, writes `trace_<r>.csv` per repetition plus one
//! `summary.json`.
//!
//! Trace columns are `trial,stage,y,status,x_1..x_s` followed by one column
//! per decoded parameter. Floats use the shortest representation that
//! round-trips.

mod compare;
mod external;

pub use compare::{compare_methods, compare_outcomes, Comparison, MethodStats};
pub use external::{evaluate_external, parse_output, ExternalObjective, ExternalObjectiveSpec};

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augud::{construct_ud, AugudConfig};
use crate::bench;
use crate::error::{Error, Result};
use crate::objective::{Direction, FailurePolicy, Objective};
use crate::samplers::{self, SamplerKind};
use crate::sequd::{default_stage_size, run_seqrand, run_sequd, Evaluator, History, SequdConfig};
use crate::space::SearchSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sequd,
    Seqrand,
    Random,
    Lhs,
    Sobol,
    Grid,
    Ud,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Sequd,
        Method::Seqrand,
        Method::Random,
        Method::Lhs,
        Method::Sobol,
        Method::Grid,
        Method::Ud,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Sequd => "sequd",
            Method::Seqrand => "seqrand",
            Method::Random => "random",
            Method::Lhs => "lhs",
            Method::Sobol => "sobol",
            Method::Grid => "grid",
            Method::Ud => "ud",
        }
    }

    pub fn is_sequential(self) -> bool {
        matches!(self, Method::Sequd | Method::Seqrand)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ObjectiveSpec {
    /// A registered benchmark function, searched over its own domain.
    Builtin(String),
    External(ExternalObjectiveSpec),
}

fn one() -> usize {
    1
}

fn default_budget() -> usize {
    100
}

/// One experiment. Parsed from a single JSON document; command-line flags
/// override individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Label used in comparison tables; defaults to the method name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub method: Method,
    pub objective: ObjectiveSpec,
    /// Search space as a list of parameter definitions. Required for
    /// external objectives, not allowed for builtin ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<serde_json::Value>,
    /// Defaults to the benchmark's direction, or maximize for external
    /// objectives.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    /// Concurrent evaluations within a batch.
    #[serde(default = "one")]
    pub parallelism: usize,
    /// Concurrent repetitions.
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Runs per stage for sequential methods; defaults by dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_per_stage: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_levels: Option<usize>,
    #[serde(default)]
    pub augud: AugudConfig,
    #[serde(default = "one")]
    pub shooting: usize,
}

impl ExperimentConfig {
    /// Minimal config for a builtin benchmark.
    pub fn builtin(method: Method, function: &str, budget: usize) -> Self {
        Self {
            name: None,
            method,
            objective: ObjectiveSpec::Builtin(function.to_string()),
            space: None,
            direction: None,
            budget,
            repetitions: 1,
            seed: 0,
            parallelism: 1,
            workers: 1,
            output: None,
            n_per_stage: None,
            q_levels: None,
            augud: AugudConfig::default(),
            shooting: 1,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.method.to_string())
    }

    pub fn objective_name(&self) -> String {
        match &self.objective {
            ObjectiveSpec::Builtin(name) => name.clone(),
            ObjectiveSpec::External(spec) => spec.command.join(" "),
        }
    }

    /// Checks the config and builds the space and objective it describes.
    pub fn resolve(&self) -> Result<Resolved> {
        if self.budget < 1 {
            return Err(Error::Config("budget must be >= 1".into()));
        }
        if self.repetitions < 1 || self.parallelism < 1 || self.workers < 1 {
            return Err(Error::Config(
                "repetitions, parallelism and workers must be >= 1".into(),
            ));
        }
        let (space, objective, direction): (SearchSpace, Box<dyn Objective>, Direction) =
            match &self.objective {
                ObjectiveSpec::Builtin(name) => {
                    if self.space.is_some() {
                        return Err(Error::Config(format!(
                            "builtin objective '{name}' uses its own domain; remove 'space'"
                        )));
                    }
                    let f = bench::lookup(name).map_err(|e| Error::Config(e.to_string()))?;
                    let direction = self.direction.unwrap_or(f.direction);
                    (f.space(), Box::new(f), direction)
                }
                ObjectiveSpec::External(spec) => {
                    spec.validate()?;
                    let raw = self.space.as_ref().ok_or_else(|| {
                        Error::Config("external objectives need a 'space'".into())
                    })?;
                    let space = SearchSpace::from_json(&raw.to_string())
                        .map_err(|e| Error::Config(e.to_string()))?;
                    let objective = ExternalObjective { spec: spec.clone() };
                    (space, Box::new(objective), self.direction.unwrap_or_default())
                }
            };
        let s = space.dimension();
        if self.method == Method::Grid && s != 2 {
            return Err(Error::Config(format!(
                "grid search needs a 2-dimensional space, got {s}"
            )));
        }
        if self.method == Method::Sobol && s > samplers::SOBOL_MAX_DIM {
            return Err(Error::Config(format!(
                "sobol supports at most {} dimensions",
                samplers::SOBOL_MAX_DIM
            )));
        }
        self.augud.validate().map_err(|e| Error::Config(e.to_string()))?;
        let sequd = if self.method.is_sequential() {
            let cfg = self.sequd_config(s, direction, 0);
            cfg.validate()?;
            Some(cfg)
        } else {
            None
        };
        Ok(Resolved {
            space,
            objective,
            direction,
            sequd,
        })
    }

    fn failure_policy(&self) -> FailurePolicy {
        match &self.objective {
            ObjectiveSpec::External(spec) => spec.failure_policy,
            ObjectiveSpec::Builtin(_) => FailurePolicy::Record,
        }
    }

    fn sequd_config(&self, s: usize, direction: Direction, seed: u64) -> SequdConfig {
        let (n, q) = default_stage_size(s);
        SequdConfig {
            t_max: self.budget,
            n_per_stage: self.n_per_stage.unwrap_or(n),
            q_levels: self.q_levels.unwrap_or(q),
            augud: self.augud.clone(),
            seed,
            parallelism: self.parallelism,
            direction,
            shooting: self.shooting,
            failure_policy: self.failure_policy(),
        }
    }
}

/// A validated experiment, ready to run.
pub struct Resolved {
    pub space: SearchSpace,
    pub objective: Box<dyn Objective>,
    pub direction: Direction,
    sequd: Option<SequdConfig>,
}

/// One repetition: a method run under `seed`.
pub fn run_once(cfg: &ExperimentConfig, resolved: &Resolved, seed: u64) -> Result<History> {
    let space = &resolved.space;
    let objective = resolved.objective.as_ref();
    if let Some(base) = &resolved.sequd {
        let scfg = SequdConfig { seed, ..base.clone() };
        return match cfg.method {
            Method::Sequd => run_sequd(space, objective, &scfg),
            _ => run_seqrand(space, objective, &scfg),
        };
    }
    let s = space.dimension();
    let n = cfg.budget;
    let design = match cfg.method {
        Method::Random => samplers::sample(SamplerKind::Random, n, s, seed)?,
        Method::Lhs => samplers::sample(SamplerKind::Lhs, n, s, seed)?,
        Method::Sobol => samplers::sample(SamplerKind::Sobol, n, s, seed)?,
        Method::Grid => samplers::sample(SamplerKind::Grid, n, s, seed)?,
        Method::Ud => construct_ud(n, s, n, &cfg.augud.clone().with_seed(seed))?
            .design
            .to_unit(),
        Method::Sequd | Method::Seqrand => unreachable!("sequential methods resolve a config"),
    };
    let eval = Evaluator::new(space, objective, cfg.parallelism, cfg.failure_policy())?;
    let mut history = History::new(resolved.direction);
    eval.run_batch(&mut history, 1, design.to_rows())?;
    Ok(history)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub trials: usize,
    pub best: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepetitionSummary {
    pub repetition: usize,
    pub seed: u64,
    pub trials: usize,
    pub failures: usize,
    /// Incumbent value; absent when every trial failed.
    pub best: Option<f64>,
    pub incumbent_trial: Option<usize>,
    pub incumbent: Option<serde_json::Value>,
    /// Incumbent after every 10 trials and after the last one.
    pub best_so_far: Vec<CurvePoint>,
    pub wall_time_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub method: Method,
    pub objective: String,
    pub direction: Direction,
    pub budget: usize,
    pub repetitions: usize,
    pub base_seed: u64,
    pub total_trials: usize,
    pub mean_best: Option<f64>,
    pub std_best: Option<f64>,
    /// Overall incumbent across repetitions.
    pub best: Option<f64>,
    pub incumbent: Option<serde_json::Value>,
    pub wall_time_secs: f64,
    pub runs: Vec<RepetitionSummary>,
}

pub struct ExperimentOutcome {
    pub summary: Summary,
    pub histories: Vec<History>,
}

fn curve(history: &History) -> Vec<CurvePoint> {
    let bsf = history.best_so_far();
    let mut points: Vec<usize> = (10..=bsf.len()).step_by(10).collect();
    if !bsf.is_empty() && !bsf.len().is_multiple_of(10) {
        points.push(bsf.len());
    }
    points
        .into_iter()
        .map(|t| CurvePoint {
            trials: t,
            best: Some(bsf[t - 1]).filter(|v| v.is_finite()),
        })
        .collect()
}

/// Mean and sample standard deviation; `None` for an empty slice.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Some((mean, std))
}

fn trace_name(repetition: usize) -> String {
    format!("trace_{repetition}.csv")
}

/// Runs every repetition and writes traces and the summary when
/// `cfg.output` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let resolved = cfg.resolve()?;
    if let Some(dir) = &cfg.output {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let start = Instant::now();
    let run = |r: usize| -> Result<(History, RepetitionSummary)> {
        let seed = cfg.seed.wrapping_add(r as u64);
        let t0 = Instant::now();
        let history = run_once(cfg, &resolved, seed)?;
        let wall = t0.elapsed().as_secs_f64();
        let trace = match &cfg.output {
            Some(dir) => {
                let name = trace_name(r);
                let path = dir.join(&name);
                fs::write(&path, trace_csv(&history, &resolved.space)?)
                    .map_err(|e| Error::io(&path, e))?;
                Some(name)
            }
            None => None,
        };
        let inc = history.incumbent();
        let rep = RepetitionSummary {
            repetition: r,
            seed,
            trials: history.len(),
            failures: history.failures(),
            best: inc.map(|r| r.value),
            incumbent_trial: inc.map(|r| r.trial),
            incumbent: inc.map(|r| serde_json::to_value(&r.config).expect("config serializes")),
            best_so_far: curve(&history),
            wall_time_secs: wall,
            trace,
        };
        log::info!(
            "{} rep {r} (seed {seed}): {} trials, best {:?}",
            cfg.label(),
            rep.trials,
            rep.best
        );
        Ok((history, rep))
    };
    let results: Vec<Result<(History, RepetitionSummary)>> = if cfg.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| (0..cfg.repetitions).into_par_iter().map(run).collect())
    } else {
        (0..cfg.repetitions).map(run).collect()
    };
    let mut histories = Vec::with_capacity(cfg.repetitions);
    let mut runs = Vec::with_capacity(cfg.repetitions);
    for result in results {
        let (h, rep) = result?;
        histories.push(h);
        runs.push(rep);
    }

    let bests: Vec<f64> = runs.iter().filter_map(|r| r.best).collect();
    let stats = mean_std(&bests);
    let overall = runs
        .iter()
        .filter(|r| r.best.is_some())
        .fold(None::<&RepetitionSummary>, |acc, r| match acc {
            Some(a) if !resolved.direction.is_better(r.best.unwrap(), a.best.unwrap()) => Some(a),
            _ => Some(r),
        });
    let summary = Summary {
        name: cfg.label(),
        method: cfg.method,
        objective: cfg.objective_name(),
        direction: resolved.direction,
        budget: cfg.budget,
        repetitions: cfg.repetitions,
        base_seed: cfg.seed,
        total_trials: runs.iter().map(|r| r.trials).sum(),
        mean_best: stats.map(|s| s.0),
        std_best: stats.map(|s| s.1),
        best: overall.and_then(|r| r.best),
        incumbent: overall.and_then(|r| r.incumbent.clone()),
        wall_time_secs: start.elapsed().as_secs_f64(),
        runs,
    };
    if let Some(dir) = &cfg.output {
        let path = dir.join("summary.json");
        let text = serde_json::to_string_pretty(&summary)?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    }
    Ok(ExperimentOutcome { summary, histories })
}

/// Trace CSV of a history.
pub fn trace_csv(history: &History, space: &SearchSpace) -> Result<String> {
    let s = space.dimension();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["trial", "stage", "y", "status"].map(String::from).to_vec();
    header.extend((1..=s).map(|i| format!("x_{i}")));
    header.extend(space.params().iter().map(|p| p.name.clone()));
    w.write_record(&header)?;
    for r in history.records() {
        let mut row = vec![
            r.trial.to_string(),
            r.stage.to_string(),
            r.value.to_string(),
            r.status.label().to_string(),
        ];
        row.extend(r.unit.iter().map(f64::to_string));
        row.extend(r.config.values.iter().map(|(_, v)| v.to_string()));
        w.write_record(&row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Parse(format!("trace buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub trial: usize,
    pub stage: usize,
    pub y: f64,
    pub ok: bool,
    pub unit: Vec<f64>,
    pub params: Vec<String>,
}

/// Parses a trace written by [`trace_csv`].
pub fn parse_trace(text: &str) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    let s = header.iter().filter(|h| h.starts_with("x_")).count();
    let field = |rec: &csv::StringRecord, i: usize| -> Result<String> {
        rec.get(i)
            .map(str::to_string)
            .ok_or_else(|| Error::Parse(format!("missing column {i}")))
    };
    let num = |text: String, what: &str| -> Result<f64> {
        text.parse()
            .map_err(|_| Error::Parse(format!("bad {what} value {text:?}")))
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let trial = field(&rec, 0)?
            .parse()
            .map_err(|_| Error::Parse("bad trial index".into()))?;
        let stage = field(&rec, 1)?
            .parse()
            .map_err(|_| Error::Parse("bad stage".into()))?;
        let y = num(field(&rec, 2)?, "y")?;
        let ok = match field(&rec, 3)?.as_str() {
            "ok" => true,
            "failed" => false,
            other => return Err(Error::Parse(format!("bad status {other:?}"))),
        };
        let unit = (0..s)
            .map(|j| num(field(&rec, 4 + j)?, "x"))
            .collect::<Result<Vec<_>>>()?;
        let params = rec.iter().skip(4 + s).map(str::to_string).collect();
        rows.push(TraceRow {
            trial,
            stage,
            y,
            ok,
            unit,
            params,
        });
    }
    Ok(rows)
}

/// Incumbent value of parsed trace rows.
pub fn trace_best(rows: &[TraceRow], direction: Direction) -> Option<f64> {
    rows.iter()
        .filter(|r| r.ok)
        .map(|r| r.y)
        .fold(None, |best, y| match best {
            Some(b) if !direction.is_better(y, b) => Some(b),
            _ => Some(y),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("bayes".parse::<Method>().is_err());
    }

    #[test]
    fn config_parsing() {
        let cfg = ExperimentConfig::from_json(
            r#"{"method": "sequd", "objective": {"builtin": "cliff"}, "budget": 50}"#,
        )
        .unwrap();
        assert_eq!(cfg.budget, 50);
        assert_eq!(cfg.repetitions, 1);
        assert!(ExperimentConfig::from_json(r#"{"method": "sequd"}"#).is_err());
        assert!(ExperimentConfig::from_json(
            r#"{"method": "sequd", "objective": {"builtin": "cliff"}, "bogus": 1}"#
        )
        .is_err());
    }

    #[test]
    fn method_constraints() {
        let grid = ExperimentConfig::builtin(Method::Grid, "hart3", 100);
        assert!(matches!(grid.resolve(), Err(Error::Config(_))));
        let small = ExperimentConfig::builtin(Method::Sequd, "cliff", 10);
        assert!(matches!(small.resolve(), Err(Error::Config(_))));
        let unknown = ExperimentConfig::builtin(Method::Random, "nope", 10);
        assert!(matches!(unknown.resolve(), Err(Error::Config(_))));
    }

    #[test]
    fn single_random_trial() {
        let cfg = ExperimentConfig::builtin(Method::Random, "branin", 1);
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.histories[0].len(), 1);
        assert_eq!(out.summary.runs[0].best, Some(out.histories[0].records()[0].value));
        assert_eq!(out.summary.total_trials, 1);
    }

    #[test]
    fn curve_points() {
        let cfg = ExperimentConfig::builtin(Method::Random, "branin", 25);
        let out = run_experiment(&cfg).unwrap();
        let trials: Vec<usize> = out.summary.runs[0].best_so_far.iter().map(|p| p.trials).collect();
        assert_eq!(trials, vec![10, 20, 25]);
    }

    #[test]
    fn trace_round_trip() {
        let cfg = ExperimentConfig::builtin(Method::Lhs, "camel6", 30);
        let resolved = cfg.resolve().unwrap();
        let h = run_once(&cfg, &resolved, 4).unwrap();
        let rows = parse_trace(&trace_csv(&h, &resolved.space).unwrap()).unwrap();
        assert_eq!(rows.len(), 30);
        for (row, rec) in rows.iter().zip(h.records()) {
            assert_eq!(row.y, rec.value);
            assert_eq!(row.unit, rec.unit);
        }
        assert_eq!(trace_best(&rows, Direction::Minimize), h.best_value());
    }

    #[test]
    fn mean_and_std() {
        assert_eq!(mean_std(&[]), None);
        assert_eq!(mean_std(&[2.0]), Some((2.0, 0.0)));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
    }
}
