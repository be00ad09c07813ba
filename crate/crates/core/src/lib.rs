//! Uniform-design construction and sequential uniform-design optimization.
//!
//! * [`design`]: level designs, unit-cube mapping, centered L2 discrepancy
//!   with incremental exchange updates.
//! * [`augud`]: augmented uniform designs by threshold-accepting exchange.
//! * [`sequd`]: the sequential zoom-and-augment optimizer and its random
//!   ablation.
//! * [`space`]: typed search spaces and their unit-cube embedding.
//! * [`samplers`] and [`bench`]: baseline point generators and synthetic
//!   test functions.
//! * [`harness`]: experiment orchestration, external objectives, traces and
//!   method comparison.

pub mod augud;
pub mod bench;
pub mod design;
pub mod error;
pub mod harness;
pub mod objective;
pub mod samplers;
pub mod sequd;
pub mod space;

mod sobol;

pub use error::{Error, Result};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for `seed`; distinct `stream`s are independent.
pub(crate) fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
