//! Rank tables across methods run on the same objective and seeds.

use serde::Serialize;

use super::{mean_std, run_experiment, ExperimentConfig, Summary};
use crate::error::{Error, Result};
use crate::objective::Direction;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodStats {
    pub label: String,
    pub mean_best: Option<f64>,
    pub std_best: Option<f64>,
    /// Mean per-repetition rank, 1 = best, ties share the average rank.
    pub mean_rank: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub direction: Direction,
    pub seeds: Vec<u64>,
    /// Final best per method (outer) and repetition (inner); `None` when a
    /// repetition had no successful trial.
    pub bests: Vec<Vec<Option<f64>>>,
    pub methods: Vec<MethodStats>,
}

/// Ranks of `scores` (higher is better), averaging ties.
fn average_ranks(scores: &[f64]) -> Vec<f64> {
    scores
        .iter()
        .enumerate()
        .map(|(i, &si)| {
            let above = scores.iter().filter(|&&s| s > si).count();
            let tied = scores
                .iter()
                .enumerate()
                .filter(|&(k, &s)| k != i && s == si)
                .count();
            1.0 + above as f64 + tied as f64 / 2.0
        })
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Compares finished experiments given as `(label, summary)` pairs.
pub fn compare_outcomes(entries: &[(String, &Summary)]) -> Result<Comparison> {
    if entries.len() < 2 {
        return Err(Error::Config("a comparison needs at least two methods".into()));
    }
    let first = entries[0].1;
    for (label, s) in &entries[1..] {
        if s.budget != first.budget {
            return Err(Error::Config(format!(
                "budget mismatch: {} has {}, {} has {}",
                entries[0].0, first.budget, label, s.budget
            )));
        }
        if s.runs.len() != first.runs.len() {
            return Err(Error::Config(format!(
                "repetition mismatch: {} has {}, {} has {}",
                entries[0].0,
                first.runs.len(),
                label,
                s.runs.len()
            )));
        }
        if s.base_seed != first.base_seed {
            return Err(Error::Config(format!(
                "seed mismatch: {} starts at {}, {} at {}",
                entries[0].0, first.base_seed, label, s.base_seed
            )));
        }
        if s.direction != first.direction {
            return Err(Error::Config(format!("{label} optimizes in the other direction")));
        }
    }
    let direction = first.direction;
    let reps = first.runs.len();
    let bests: Vec<Vec<Option<f64>>> = entries
        .iter()
        .map(|(_, s)| s.runs.iter().map(|r| r.best).collect())
        .collect();
    let mut rank_sums = vec![0.0; entries.len()];
    for r in 0..reps {
        let scores: Vec<f64> = bests
            .iter()
            .map(|b| b[r].map_or(f64::NEG_INFINITY, |v| direction.score(v)))
            .collect();
        for (sum, rank) in rank_sums.iter_mut().zip(average_ranks(&scores)) {
            *sum += rank;
        }
    }
    let methods = entries
        .iter()
        .zip(&bests)
        .zip(rank_sums)
        .map(|(((label, _), b), rank_sum)| {
            let ok: Vec<f64> = b.iter().flatten().copied().collect();
            let stats = mean_std(&ok);
            MethodStats {
                label: label.clone(),
                mean_best: stats.map(|s| s.0),
                std_best: stats.map(|s| s.1),
                mean_rank: rank_sum / reps as f64,
            }
        })
        .collect();
    Ok(Comparison {
        direction,
        seeds: first.runs.iter().map(|r| r.seed).collect(),
        bests,
        methods,
    })
}

/// Runs every config and compares them. Configs must share budget,
/// repetitions and base seed.
pub fn compare_methods(cfgs: &[ExperimentConfig]) -> Result<Comparison> {
    if cfgs.len() < 2 {
        return Err(Error::Config("a comparison needs at least two methods".into()));
    }
    if let Some(c) = cfgs.iter().find(|c| c.budget != cfgs[0].budget) {
        return Err(Error::Config(format!(
            "budget mismatch: {} has {}, {} has {}",
            cfgs[0].label(),
            cfgs[0].budget,
            c.label(),
            c.budget
        )));
    }
    let mut labels: Vec<String> = Vec::with_capacity(cfgs.len());
    for (i, c) in cfgs.iter().enumerate() {
        let label = c.label();
        labels.push(if labels.contains(&label) {
            format!("{label}#{i}")
        } else {
            label
        });
    }
    let outcomes = cfgs.iter().map(run_experiment).collect::<Result<Vec<_>>>()?;
    let entries: Vec<(String, &Summary)> = labels
        .into_iter()
        .zip(&outcomes)
        .map(|(l, o)| (l, &o.summary))
        .collect();
    compare_outcomes(&entries)
}

impl Comparison {
    /// `method,mean_best,std_best,mean_rank`, one row per method.
    pub fn rank_csv(&self) -> String {
        let mut out = String::from("method,mean_best,std_best,mean_rank\n");
        for m in &self.methods {
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&m.label),
                fmt_opt(m.mean_best),
                fmt_opt(m.std_best),
                m.mean_rank
            ));
        }
        out
    }

    /// `repetition,seed,<method>...`: final best per seed, for paired tests.
    pub fn pairs_csv(&self) -> String {
        let mut out = String::from("repetition,seed");
        for m in &self.methods {
            out.push(',');
            out.push_str(&csv_field(&m.label));
        }
        out.push('\n');
        for (r, seed) in self.seeds.iter().enumerate() {
            out.push_str(&format!("{r},{seed}"));
            for b in &self.bests {
                out.push(',');
                out.push_str(&fmt_opt(b[r]));
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
