//! Composition of neighbor search and the estimators over whole datasets.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::angle_id::{abid, cosine_square_stats, rabid};
use crate::baseline::{ged, mle_hill, mom, GedPair};
use crate::data::{
    DataMatrix, EstimateTable, Estimator, IdEstimate, NeighborhoodEstimates, PointEstimates,
};
use crate::error::{Error, Result};
use crate::neighbors::{direction_bundle, knn, NeighborList, Query};

#[derive(Debug, Clone, Copy, Default)]
pub struct EstimateOptions {
    pub ged_pair: GedPair,
}

/// Smallest `k` every estimator in the set accepts.
pub fn min_k(estimators: &[Estimator]) -> usize {
    estimators
        .iter()
        .map(|e| match e {
            Estimator::Abid => 1,
            Estimator::Rabid | Estimator::Mle | Estimator::Mom => 2,
            Estimator::Ged => 4,
        })
        .max()
        .unwrap_or(1)
}

/// Evaluates every requested estimator on one neighbor list.
pub fn estimate_neighborhood(
    data: &DataMatrix,
    query: Query<'_>,
    neighbors: &NeighborList,
    estimators: &[Estimator],
    options: &EstimateOptions,
) -> Result<NeighborhoodEstimates> {
    let required = min_k(estimators);
    if neighbors.k() < required {
        return Err(Error::insufficient(query, neighbors.k(), required));
    }
    let stats = if estimators.iter().any(|e| e.is_angle_based()) {
        Some(cosine_square_stats(&direction_bundle(data, query, neighbors)?))
    } else {
        None
    };
    let mut estimates = BTreeMap::new();
    for &e in estimators {
        let est: IdEstimate = match e {
            Estimator::Abid => abid(stats.as_ref().expect("computed for angle estimators")),
            Estimator::Rabid => rabid(stats.as_ref().expect("computed for angle estimators"))?,
            Estimator::Mle => mle_hill(neighbors)?,
            Estimator::Mom => mom(neighbors)?,
            Estimator::Ged => ged(neighbors, options.ged_pair)?,
        };
        estimates.insert(e, est);
    }
    Ok(NeighborhoodEstimates {
        estimates,
        mean_cosine: stats.map(|s| s.mean_cosine),
    })
}

/// kNN followed by every requested estimator on the same neighbor list.
pub fn estimate_point(
    data: &DataMatrix,
    query: Query<'_>,
    k: usize,
    estimators: &[Estimator],
) -> Result<NeighborhoodEstimates> {
    estimate_point_with(data, query, k, estimators, &EstimateOptions::default())
}

pub fn estimate_point_with(
    data: &DataMatrix,
    query: Query<'_>,
    k: usize,
    estimators: &[Estimator],
    options: &EstimateOptions,
) -> Result<NeighborhoodEstimates> {
    let required = min_k(estimators);
    if k < required {
        return Err(Error::insufficient(query, k, required));
    }
    let neighbors = knn(data, query, k)?;
    estimate_neighborhood(data, query, &neighbors, estimators, options)
}

/// Estimates for the listed points (all points when `points` is `None`),
/// computed in parallel. Row order follows `points`.
///
/// On failure the error names the first failing point in row order.
pub fn estimate_table(
    data: &DataMatrix,
    k: usize,
    estimators: &[Estimator],
    points: Option<&[usize]>,
    options: &EstimateOptions,
) -> Result<EstimateTable> {
    let all: Vec<usize>;
    let points = match points {
        Some(p) => p,
        None => {
            all = (0..data.n()).collect();
            &all
        }
    };
    let results: Vec<Result<PointEstimates>> = points
        .par_iter()
        .map(|&i| {
            estimate_point_with(data, Query::Index(i), k, estimators, options).map(|r| {
                PointEstimates {
                    index: i,
                    estimates: r.estimates,
                    mean_cosine: r.mean_cosine,
                }
            })
        })
        .collect();
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    EstimateTable::new(estimators.to_vec(), k, rows)
}
