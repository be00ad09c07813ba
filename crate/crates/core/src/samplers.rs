//! Non-sequential baseline designs over the unit cube.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::design::UnitDesign;
use crate::error::{Error, Result};
use crate::{seeded_rng, sobol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Grid,
    Random,
    Lhs,
    Sobol,
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(Self::Grid),
            "random" => Ok(Self::Random),
            "lhs" => Ok(Self::Lhs),
            "sobol" => Ok(Self::Sobol),
            other => Err(Error::InvalidArgument(format!("unknown sampler '{other}'"))),
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Grid => "grid",
            Self::Random => "random",
            Self::Lhs => "lhs",
            Self::Sobol => "sobol",
        })
    }
}

/// Highest dimension the Sobol generator supports.
pub const SOBOL_MAX_DIM: usize = sobol::MAX_DIM;

/// `(a, b)` with `a * b <= n`, maximizing `a * b` then minimizing `|a - b|`,
/// `a <= b`.
pub fn grid_shape(n: usize) -> (usize, usize) {
    let mut best = (1, n);
    for a in 1..=n {
        if a * a > n {
            break;
        }
        let b = n / a;
        let better = a * b > best.0 * best.1
            || (a * b == best.0 * best.1 && b.abs_diff(a) < best.1.abs_diff(best.0));
        if better {
            best = (a, b);
        }
    }
    best
}

/// Draws `n` points in `[0, 1]^s`. Grid designs may return fewer than `n`
/// points when `n` has no exact near-square factorization.
pub fn sample(kind: SamplerKind, n: usize, s: usize, seed: u64) -> Result<UnitDesign> {
    if n < 1 || s < 1 {
        return Err(Error::InvalidArgument("n and s must be >= 1".into()));
    }
    let mut rng = seeded_rng(seed, 0);
    let points = match kind {
        SamplerKind::Random => (0..n * s).map(|_| rng.random::<f64>()).collect(),
        SamplerKind::Lhs => {
            let mut points = vec![0.0; n * s];
            let mut perm: Vec<usize> = (0..n).collect();
            for col in 0..s {
                perm.shuffle(&mut rng);
                for (i, &cell) in perm.iter().enumerate() {
                    points[i * s + col] = (cell as f64 + rng.random::<f64>()) / n as f64;
                }
            }
            points
        }
        SamplerKind::Sobol => {
            if s > sobol::MAX_DIM {
                return Err(Error::InvalidArgument(format!(
                    "sobol supports at most {} dimensions",
                    sobol::MAX_DIM
                )));
            }
            sobol::points(n, s)
        }
        SamplerKind::Grid => {
            if s != 2 {
                return Err(Error::InvalidArgument(format!(
                    "grid search is only defined for 2 dimensions, got {s}"
                )));
            }
            let (a, b) = grid_shape(n);
            let mut points = Vec::with_capacity(2 * a * b);
            for i in 0..a {
                for j in 0..b {
                    points.push((i as f64 + 0.5) / a as f64);
                    points.push((j as f64 + 0.5) / b as f64);
                }
            }
            return Ok(UnitDesign::from_flat(a * b, 2, points));
        }
    };
    Ok(UnitDesign::from_flat(n, s, points))
}
