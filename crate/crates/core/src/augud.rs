//! Augmented uniform designs.
//!
//! Given a fixed block of existing runs, [`run_augud`] searches for a free
//! block of `n2` runs that minimizes the discrepancy of the stacked design.
//! The search is threshold accepting over element-wise exchanges: an outer
//! loop adapts the threshold from the hit ratio, an inner loop rolls over the
//! columns and, for each, scores a batch of candidate swaps and accepts the
//! best one with probability `1 - min(1, max(0, delta / T))`.
//!
//! All discrepancy arithmetic is on the squared value; results report both.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{cd2_combined_squared, Cd2Cache, LevelDesign};
use crate::error::{Error, Result};
use crate::seeded_rng;

/// Threshold used when `gamma * CD2^2` of the initial design is not positive.
pub const MIN_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugudConfig {
    /// Initial threshold as a multiple of the initial discrepancy.
    pub gamma: f64,
    /// Hit-ratio level below which the threshold grows.
    pub eta: f64,
    /// Threshold scaling factor in (0, 1).
    pub alpha: f64,
    pub m_outer: usize,
    pub m_inner: usize,
    /// Candidate swaps per inner iteration; defaults to [`exchange_budget`].
    pub m_exchange: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AugudConfig {
    fn default() -> Self {
        Self {
            gamma: 0.005,
            eta: 0.1,
            alpha: 0.8,
            m_outer: 50,
            m_inner: 100,
            m_exchange: None,
            restarts: 1,
            seed: 0,
        }
    }
}

impl AugudConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return bad("eta must lie in [0, 1]");
        }
        if self.gamma.is_nan() || self.gamma <= 0.0 {
            return bad("gamma must be positive");
        }
        if self.m_outer < 1 || self.m_inner < 1 || self.restarts < 1 {
            return bad("loop and restart counts must be >= 1");
        }
        if self.m_exchange == Some(0) {
            return bad("m_exchange must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugudResult {
    /// The free block, in the same level space as the fixed block.
    pub design: LevelDesign,
    /// Root discrepancy of the stacked fixed + free design.
    pub combined_cd2: f64,
    pub combined_cd2_squared: f64,
    /// Squared discrepancy of the winning restart's initial design.
    pub initial_cd2_squared: f64,
    /// Exchanges committed by the winning restart.
    pub iterations: usize,
    pub restart_index: usize,
}

/// How strictly the free block must complete the column balance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalancePolicy {
    /// Stacked design must be exactly balanced; infeasible inputs are errors.
    Strict,
    /// Fill each column's least-used levels first; used when the fixed block
    /// comes from snapped points that already break balance.
    Relaxed,
}

/// `max(1, floor(min(50, 0.2 n2^2 (q - 1) / (2q))))`.
pub fn exchange_budget(n2: usize, q: usize) -> Result<usize> {
    if n2 < 2 {
        return Err(Error::InvalidArgument(format!(
            "exchange needs at least 2 free runs, got {n2}"
        )));
    }
    if q < 1 {
        return Err(Error::InvalidArgument("level count must be >= 1".into()));
    }
    let n2 = n2 as f64;
    let q = q as f64;
    let raw = (0.2 * n2 * n2 * (q - 1.0) / (2.0 * q)).min(50.0);
    Ok((raw.floor() as usize).max(1))
}

/// Acceptance probability for a candidate that changes the criterion by
/// `delta`.
pub fn accept_probability(delta: f64, threshold: f64) -> Result<f64> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    Ok(1.0 - (delta / threshold).clamp(0.0, 1.0))
}

fn check_fixed(fixed: &LevelDesign, s: usize, q: usize) -> Result<()> {
    if fixed.is_empty() {
        return Ok(());
    }
    if fixed.factors() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: fixed.factors(),
        });
    }
    if fixed.level_count() != q {
        return Err(Error::InvalidArgument(format!(
            "fixed block uses {} levels, expected {q}",
            fixed.level_count()
        )));
    }
    Ok(())
}

/// Initial free block making the stacked design balanced. Deterministic in
/// `seed`.
pub fn init_augmented(fixed: &LevelDesign, n2: usize, q: usize, seed: u64) -> Result<LevelDesign> {
    let s = fixed.factors();
    let mut rng = seeded_rng(seed, 0);
    init_free_block(fixed, n2, s, q, BalancePolicy::Strict, &mut rng)
}

pub(crate) fn init_free_block<R: Rng>(
    fixed: &LevelDesign,
    n2: usize,
    s: usize,
    q: usize,
    policy: BalancePolicy,
    rng: &mut R,
) -> Result<LevelDesign> {
    if q < 1 || s < 1 {
        return Err(Error::InvalidArgument("factors and levels must be >= 1".into()));
    }
    check_fixed(fixed, s, q)?;
    let n1 = fixed.runs();
    let total = n1 + n2;
    if policy == BalancePolicy::Strict {
        if !total.is_multiple_of(q) {
            return Err(Error::NotDivisible { runs: total, levels: q });
        }
        let limit = total / q;
        for col in 0..s.min(fixed.factors()) {
            if fixed.is_empty() {
                break;
            }
            for (k, &count) in fixed.column_counts(col).iter().enumerate() {
                if count > limit {
                    return Err(Error::BalanceInfeasible {
                        column: col,
                        level: k as u32 + 1,
                        count,
                        limit,
                    });
                }
            }
        }
    }

    let mut levels = vec![0u32; n2 * s];
    for col in 0..s {
        let mut counts = if fixed.is_empty() {
            vec![0usize; q]
        } else {
            fixed.column_counts(col)
        };
        let mut column = Vec::with_capacity(n2);
        for _ in 0..n2 {
            // least used level, lowest level on ties
            let (k, _) = counts
                .iter()
                .enumerate()
                .min_by_key(|&(k, &c)| (c, k))
                .expect("q >= 1");
            counts[k] += 1;
            column.push(k as u32 + 1);
        }
        column.shuffle(rng);
        for (i, u) in column.into_iter().enumerate() {
            levels[i * s + col] = u;
        }
    }
    Ok(LevelDesign::from_flat(n2, s, q, levels))
}

/// Upper-triangle pair `(a, b)`, `a < b`, for linear index `t` over `n` rows.
fn decode_pair(mut t: usize, n: usize) -> (usize, usize) {
    let mut a = 0;
    while t >= n - 1 - a {
        t -= n - 1 - a;
        a += 1;
    }
    (a, a + 1 + t)
}

struct Run {
    free: LevelDesign,
    squared: f64,
    initial: f64,
    accepted: usize,
}

fn single_run(
    fixed: &LevelDesign,
    n2: usize,
    s: usize,
    q: usize,
    cfg: &AugudConfig,
    policy: BalancePolicy,
    restart: usize,
) -> Result<Run> {
    let mut rng = seeded_rng(cfg.seed, restart as u64);
    let init = init_free_block(fixed, n2, s, q, policy, &mut rng)?;
    let fixed = if fixed.is_empty() {
        LevelDesign::empty(s, q)
    } else {
        fixed.clone()
    };
    let combined = fixed.stack(&init)?;
    let mut cache = Cd2Cache::new(&combined.to_unit())?;
    let initial = cache.squared();
    if n2 < 2 {
        return Ok(Run {
            free: init,
            squared: initial,
            initial,
            accepted: 0,
        });
    }

    let n1 = fixed.runs();
    let pair_count = n2 * (n2 - 1) / 2;
    let m_exchange = cfg
        .m_exchange
        .map_or_else(|| exchange_budget(n2, q), Ok)?
        .min(pair_count);

    let mut levels = init.as_flat().to_vec();
    let mut best_levels = levels.clone();
    let mut best = initial;
    let mut threshold = cfg.gamma * initial;
    if threshold.is_nan() || threshold <= 0.0 {
        threshold = MIN_THRESHOLD;
    }
    let mut accepted = 0usize;

    for _outer in 0..cfg.m_outer {
        let mut hits = 0usize;
        for j in 1..=cfg.m_inner {
            let col = j % s;
            let mut choice: Option<(f64, usize, usize)> = None;
            for t in index::sample(&mut rng, pair_count, m_exchange) {
                let (a, b) = decode_pair(t, n2);
                let delta = cache.delta(col, n1 + a, n1 + b);
                if choice.is_none_or(|(d, _, _)| delta < d) {
                    choice = Some((delta, a, b));
                }
            }
            let (delta, a, b) = choice.expect("m_exchange >= 1");
            let p = accept_probability(delta, threshold)?;
            if rng.random::<f64>() < p {
                cache.commit(col, n1 + a, n1 + b);
                levels.swap(a * s + col, b * s + col);
                hits += 1;
                accepted += 1;
                let current = cache.squared();
                if current < best {
                    best = current;
                    best_levels.copy_from_slice(&levels);
                }
            }
        }
        let hit_ratio = hits as f64 / cfg.m_inner as f64;
        threshold = if hit_ratio < cfg.eta {
            threshold / cfg.alpha
        } else {
            cfg.alpha * threshold
        };
    }

    let free = LevelDesign::from_flat(n2, s, q, best_levels);
    let squared = if fixed.is_empty() {
        crate::design::cd2_squared(&free.to_unit())?
    } else {
        cd2_combined_squared(&fixed.to_unit(), &free.to_unit())?
    };
    Ok(Run {
        free,
        squared,
        initial,
        accepted,
    })
}

/// Augments `fixed` (possibly empty) with `n2` runs so the stacked design is
/// balanced and has low discrepancy. Deterministic in `cfg.seed`.
pub fn run_augud(
    fixed: &LevelDesign,
    n2: usize,
    s: usize,
    q: usize,
    cfg: &AugudConfig,
) -> Result<AugudResult> {
    run_augud_with(fixed, n2, s, q, cfg, BalancePolicy::Strict)
}

/// [`run_augud`] with an explicit balance policy.
pub fn run_augud_with(
    fixed: &LevelDesign,
    n2: usize,
    s: usize,
    q: usize,
    cfg: &AugudConfig,
    policy: BalancePolicy,
) -> Result<AugudResult> {
    cfg.validate()?;
    if n2 < 1 {
        return Err(Error::InvalidArgument("n2 must be >= 1".into()));
    }
    let runs: Vec<Result<Run>> = if cfg.restarts == 1 {
        vec![single_run(fixed, n2, s, q, cfg, policy, 0)]
    } else {
        (0..cfg.restarts)
            .into_par_iter()
            .map(|r| single_run(fixed, n2, s, q, cfg, policy, r))
            .collect()
    };
    let mut winner: Option<(usize, Run)> = None;
    for (idx, run) in runs.into_iter().enumerate() {
        let run = run?;
        // runs arrive in restart order, so strict < keeps the lowest index on ties
        if winner.as_ref().is_none_or(|(_, w)| run.squared < w.squared) {
            winner = Some((idx, run));
        }
    }
    let (restart_index, run) = winner.expect("restarts >= 1");
    Ok(AugudResult {
        design: run.free,
        combined_cd2: run.squared.sqrt(),
        combined_cd2_squared: run.squared,
        initial_cd2_squared: run.initial,
        iterations: run.accepted,
        restart_index,
    })
}

/// Uniform design `U_n(q^s)`: augmentation of an empty fixed block.
pub fn construct_ud(n: usize, s: usize, q: usize, cfg: &AugudConfig) -> Result<AugudResult> {
    if n < 1 || s < 1 || q < 1 {
        return Err(Error::InvalidArgument(
            "runs, factors and levels must all be >= 1".into(),
        ));
    }
    run_augud(&LevelDesign::empty(s, q), n, s, q, cfg)
}
