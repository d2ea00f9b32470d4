//! Distance-based reference estimators: Hill (MLE), method of moments and
//! generalized expansion dimension.
//!
//! All three only look at ratios of neighbor distances. Degenerate inputs
//! (all distances equal) are reported with the value `k` and the
//! `degenerate_zero_denominator` flag instead of an infinite value.

use crate::data::{EstimateFlags, Estimator, IdEstimate};
use crate::error::{Error, Result};
use crate::neighbors::NeighborList;

fn check_sorted(distances: &[f64]) -> Result<()> {
    if distances.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::InvalidArgument(
            "neighbor distances must be positive and finite".into(),
        ));
    }
    if distances.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(
            "neighbor distances must be non-decreasing".into(),
        ));
    }
    Ok(())
}

fn degenerate(estimator: Estimator, k: usize) -> IdEstimate {
    IdEstimate::new(estimator, k as f64, k).with_flags(EstimateFlags::DEGENERATE_ZERO_DENOMINATOR)
}

pub fn mle_hill(nl: &NeighborList) -> Result<IdEstimate> {
    mle_hill_from_distances(&nl.distances)
}

/// Hill estimator over `k − 1` log-ratios against the `k`-th distance:
/// `−((1/(k−1)) Σ_{i<k} ln(d_i/d_k))⁻¹`.
pub fn mle_hill_from_distances(distances: &[f64]) -> Result<IdEstimate> {
    let k = distances.len();
    if k < 2 {
        return Err(Error::insufficient("Hill estimator", k, 2));
    }
    check_sorted(distances)?;
    let dk = distances[k - 1];
    let log_sum: f64 = distances[..k - 1].iter().map(|d| (d / dk).ln()).sum();
    if log_sum == 0.0 {
        return Ok(degenerate(Estimator::Mle, k));
    }
    Ok(IdEstimate::new(
        Estimator::Mle,
        -((k - 1) as f64) / log_sum,
        k,
    ))
}

pub fn mom(nl: &NeighborList) -> Result<IdEstimate> {
    mom_from_distances(&nl.distances)
}

/// First-moment estimator `m̂ / (w − m̂)` with `m̂` the mean distance and `w = d_k`.
pub fn mom_from_distances(distances: &[f64]) -> Result<IdEstimate> {
    let k = distances.len();
    if k < 2 {
        return Err(Error::insufficient("method-of-moments estimator", k, 2));
    }
    check_sorted(distances)?;
    let w = distances[k - 1];
    let mean = distances.iter().sum::<f64>() / k as f64;
    let gap = w - mean;
    if distances[0] == w || !(gap > 0.0) {
        return Ok(degenerate(Estimator::Mom, k));
    }
    Ok(IdEstimate::new(Estimator::Mom, mean / gap, k))
}

/// Neighbor ranks (1-based) whose distances the expansion dimension compares.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum GedPair {
    /// `(⌈k/2⌉, k)`.
    #[default]
    HalfAndFull,
    /// Explicit ranks `(inner, outer)` with `1 ≤ inner < outer ≤ k`.
    Ranks(usize, usize),
}

impl GedPair {
    fn resolve(self, k: usize) -> Result<(usize, usize)> {
        let (inner, outer) = match self {
            GedPair::HalfAndFull => (k.div_ceil(2), k),
            GedPair::Ranks(a, b) => (a, b),
        };
        if inner == 0 || inner >= outer || outer > k {
            return Err(Error::InvalidArgument(format!(
                "expansion-dimension ranks ({inner}, {outer}) invalid for k={k}"
            )));
        }
        Ok((inner, outer))
    }
}

pub fn ged(nl: &NeighborList, pair: GedPair) -> Result<IdEstimate> {
    ged_from_distances(&nl.distances, pair)
}

/// Generalized expansion dimension `ln(k₂/k₁) / ln(d_{k₂}/d_{k₁})`.
pub fn ged_from_distances(distances: &[f64], pair: GedPair) -> Result<IdEstimate> {
    let k = distances.len();
    if k < 4 {
        return Err(Error::insufficient("expansion dimension", k, 4));
    }
    check_sorted(distances)?;
    let (inner, outer) = pair.resolve(k)?;
    let (r1, r2) = (distances[inner - 1], distances[outer - 1]);
    if r1 == r2 {
        return Ok(degenerate(Estimator::Ged, k));
    }
    let value = (outer as f64 / inner as f64).ln() / (r2 / r1).ln();
    Ok(IdEstimate::new(Estimator::Ged, value, k))
}
