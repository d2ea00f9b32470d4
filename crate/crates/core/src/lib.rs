//! Angle-based local intrinsic dimensionality.
//!
//! The crate estimates, for each point of a dataset, how many dimensions its
//! neighborhood spans. The angle-based estimators ([`angle_id::abid`],
//! [`angle_id::rabid`]) invert the mean squared cosine between the directions
//! to the `k` nearest neighbors; the distance-based baselines in [`baseline`]
//! use the growth of neighbor distances instead. [`theory`] holds the exact
//! cosine distributions the estimators rest on, [`synth`] the seeded test
//! datasets and [`analysis`] the aggregation used to compare estimators.

pub mod analysis;
pub mod angle_id;
pub mod baseline;
pub mod cli;
pub mod data;
pub mod error;
pub mod estimate;
pub mod io;
pub mod neighbors;
pub mod special;
pub mod synth;
pub mod theory;

pub use data::{DataMatrix, EstimateFlags, EstimateTable, Estimator, IdEstimate};
pub use error::{Error, Result};
pub use neighbors::{DirectionBundle, NeighborList, Query};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used everywhere a seed is accepted.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
