//! Sequential uniform-design optimization.
//!
//! Stage 1 evaluates a uniform design `U_n(q^s)` over the whole unit cube.
//! Every later stage halves the search box around the incumbent, doubles the
//! level resolution, snaps already evaluated points that fall inside the new
//! box onto its grid, and augments them with `n - n_e` new runs chosen by
//! [`run_augud_with`]. The run stops when the next stage would exceed the
//! budget.
//!
//! [`run_seqrand`] is the ablation that fills each stage box with `n`
//! uniform random points instead.
//!
//! All internal comparisons maximize [`Direction::score`]; recorded values
//! keep the objective's own sign.

mod grid;
mod history;

pub use grid::{
    center_index, shift_into_bounds, snap_existing, stage_spacing, zoom_levels, GridAxis,
    SubspaceGrid,
};
pub use history::{History, TrialRecord, TrialStatus};

use rand::Rng;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::augud::{construct_ud, run_augud_with, AugudConfig, BalancePolicy};
use crate::error::{Error, Result};
use crate::objective::{Direction, EvalError, FailurePolicy, Objective};
use crate::seeded_rng;
use crate::space::{SearchSpace, TrialConfig};

/// Finest grid spacing a run zooms to; below it neighbouring levels are no
/// longer distinct doubles.
pub const MIN_SPACING: f64 = 1e-15;

/// `(n, q) = (15, 15)` for `s <= 5`, `(25, 25)` otherwise.
pub fn default_stage_size(s: usize) -> (usize, usize) {
    if s <= 5 {
        (15, 15)
    } else {
        (25, 25)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequdConfig {
    pub t_max: usize,
    pub n_per_stage: usize,
    pub q_levels: usize,
    /// Search settings for every stage; the seed is replaced per stage.
    pub augud: AugudConfig,
    pub seed: u64,
    /// Maximum concurrent evaluations within a stage.
    pub parallelism: usize,
    pub direction: Direction,
    /// Number of incumbents zoomed into per stage. Values above 1 are
    /// experimental.
    pub shooting: usize,
    pub failure_policy: FailurePolicy,
}

impl Default for SequdConfig {
    fn default() -> Self {
        Self {
            t_max: 100,
            n_per_stage: 15,
            q_levels: 15,
            augud: AugudConfig::default(),
            seed: 0,
            parallelism: 1,
            direction: Direction::Maximize,
            shooting: 1,
            failure_policy: FailurePolicy::Record,
        }
    }
}

impl SequdConfig {
    /// Defaults with the stage size for an `s`-dimensional space.
    pub fn for_dimension(s: usize) -> Self {
        let (n, q) = default_stage_size(s);
        Self {
            n_per_stage: n,
            q_levels: q,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_per_stage < 1 || self.q_levels < 1 {
            return bad("runs and levels per stage must be >= 1".into());
        }
        if !self.n_per_stage.is_multiple_of(self.q_levels) {
            return bad(format!(
                "runs per stage ({}) must be a multiple of the level count ({})",
                self.n_per_stage, self.q_levels
            ));
        }
        if self.t_max < self.n_per_stage {
            return bad(format!(
                "budget {} is smaller than one stage of {} runs",
                self.t_max, self.n_per_stage
            ));
        }
        if self.parallelism < 1 {
            return bad("parallelism must be >= 1".into());
        }
        if self.shooting < 1 {
            return bad("shooting must be >= 1".into());
        }
        self.augud.validate()
    }
}

/// Evaluates fixed batches of unit points, concurrently when asked, and
/// appends them to a history in submission order.
pub(crate) struct Evaluator<'a, O: Objective + ?Sized> {
    space: &'a SearchSpace,
    objective: &'a O,
    pool: Option<ThreadPool>,
    policy: FailurePolicy,
}

impl<'a, O: Objective + ?Sized> Evaluator<'a, O> {
    pub(crate) fn new(
        space: &'a SearchSpace,
        objective: &'a O,
        parallelism: usize,
        policy: FailurePolicy,
    ) -> Result<Self> {
        let pool = if parallelism > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(parallelism)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Some(pool)
        } else {
            None
        };
        Ok(Self {
            space,
            objective,
            pool,
            policy,
        })
    }

    pub(crate) fn run_batch(
        &self,
        history: &mut History,
        stage: usize,
        points: Vec<Vec<f64>>,
    ) -> Result<()> {
        let first = history.len();
        let configs = points
            .iter()
            .map(|p| self.space.decode(p))
            .collect::<Result<Vec<TrialConfig>>>()?;
        let call = |(i, c): (usize, &TrialConfig)| -> std::result::Result<f64, EvalError> {
            let y = self.objective.evaluate(c, first + i)?;
            if y.is_finite() {
                Ok(y)
            } else {
                Err(EvalError::NonFinite(y))
            }
        };
        let outcomes: Vec<_> = match &self.pool {
            Some(pool) => pool.install(|| configs.par_iter().enumerate().map(call).collect()),
            None => configs.iter().enumerate().map(call).collect(),
        };
        for (i, ((unit, config), outcome)) in points.into_iter().zip(configs).zip(outcomes).enumerate() {
            if let Err(e) = &outcome {
                if self.policy == FailurePolicy::Abort {
                    return Err(Error::Objective(format!("trial {}: {e}", first + i)));
                }
                log::warn!("trial {} failed: {e}", first + i);
            }
            history.push(stage, unit, config, outcome.map_err(|e| e.to_string()));
        }
        Ok(())
    }
}

/// Unit points of the `k` best distinct trials; the cube center if nothing
/// succeeded yet.
fn zoom_centers(history: &History, k: usize, s: usize) -> Vec<Vec<f64>> {
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    for r in history.ranked() {
        if centers.len() == k {
            break;
        }
        if !centers.contains(&r.unit) {
            centers.push(r.unit.clone());
        }
    }
    if centers.is_empty() {
        centers.push(vec![0.5; s]);
    }
    centers
}

fn check_space(space: &SearchSpace) -> Result<usize> {
    let s = space.dimension();
    if s < 1 {
        return Err(Error::Config("search space has no parameters".into()));
    }
    Ok(s)
}

/// Runs the sequential uniform-design optimizer. Deterministic in `cfg.seed`
/// for deterministic objectives, independent of `cfg.parallelism`.
pub fn run_sequd<O: Objective + ?Sized>(
    space: &SearchSpace,
    objective: &O,
    cfg: &SequdConfig,
) -> Result<History> {
    cfg.validate()?;
    let s = check_space(space)?;
    let (n, q) = (cfg.n_per_stage, cfg.q_levels);
    let eval = Evaluator::new(space, objective, cfg.parallelism, cfg.failure_policy)?;
    let mut master = seeded_rng(cfg.seed, 0);
    let mut history = History::new(cfg.direction);

    let ud = construct_ud(n, s, q, &cfg.augud.clone().with_seed(master.random()))?;
    let grid = SubspaceGrid::initial(s, q)?;
    let points = ud.design.rows().map(|r| grid.to_unit(r)).collect();
    eval.run_batch(&mut history, 1, points)?;

    let mut j = 2;
    'stages: while history.len() < cfg.t_max && stage_spacing(j, q) >= MIN_SPACING {
        let stage_seed: u64 = master.random();
        for (c, center) in zoom_centers(&history, cfg.shooting, s).into_iter().enumerate() {
            let grid = SubspaceGrid::zoomed(&center, j, q)?;
            let units = history.records().iter().map(|r| r.unit.as_slice());
            let (fixed, used) = snap_existing(units, &grid)?;
            let n_j = n.saturating_sub(used.len());
            if history.len() + n_j > cfg.t_max {
                break 'stages;
            }
            if n_j == 0 {
                log::debug!("stage {j}: subspace already holds {} points", used.len());
                continue;
            }
            let aug_cfg = cfg.augud.clone().with_seed(stage_seed.wrapping_add(c as u64));
            let aug = run_augud_with(&fixed, n_j, s, q, &aug_cfg, BalancePolicy::Relaxed)?;
            let points = aug.design.rows().map(|r| grid.to_unit(r)).collect();
            eval.run_batch(&mut history, j, points)?;
        }
        j += 1;
    }
    Ok(history)
}

fn uniform_in<R: Rng>(rng: &mut R, bounds: &[(f64, f64)]) -> Vec<f64> {
    bounds
        .iter()
        .map(|&(lo, hi)| (lo + rng.random::<f64>() * (hi - lo)).clamp(lo, hi))
        .collect()
}

/// Sequential random search: same zooming as [`run_sequd`], but each stage
/// draws `n` uniform points from its box.
pub fn run_seqrand<O: Objective + ?Sized>(
    space: &SearchSpace,
    objective: &O,
    cfg: &SequdConfig,
) -> Result<History> {
    cfg.validate()?;
    let s = check_space(space)?;
    let (n, q) = (cfg.n_per_stage, cfg.q_levels);
    let eval = Evaluator::new(space, objective, cfg.parallelism, cfg.failure_policy)?;
    let mut rng = seeded_rng(cfg.seed, 1);
    let mut history = History::new(cfg.direction);

    let cube = vec![(0.0, 1.0); s];
    let points = (0..n).map(|_| uniform_in(&mut rng, &cube)).collect();
    eval.run_batch(&mut history, 1, points)?;

    let mut j = 2;
    'stages: while history.len() < cfg.t_max && stage_spacing(j, q) >= MIN_SPACING {
        for center in zoom_centers(&history, cfg.shooting, s) {
            if history.len() + n > cfg.t_max {
                break 'stages;
            }
            let bounds = SubspaceGrid::zoomed(&center, j, q)?.bounds();
            let points = (0..n).map(|_| uniform_in(&mut rng, &bounds)).collect();
            eval.run_batch(&mut history, j, points)?;
        }
        j += 1;
    }
    Ok(history)
}
