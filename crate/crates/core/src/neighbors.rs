//! Exact k-nearest-neighbor search and neighbor direction vectors.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// The point a neighborhood is built around.
#[derive(Debug, Clone, Copy)]
pub enum Query<'a> {
    /// A point of the dataset, by row index.
    Index(usize),
    /// A point that need not belong to the dataset.
    Point(&'a [f64]),
}

impl Query<'_> {
    fn coords<'d>(&'d self, data: &'d DataMatrix) -> &'d [f64] {
        match *self {
            Query::Index(i) => data.row(i),
            Query::Point(p) => p,
        }
    }

    fn validate(&self, data: &DataMatrix) -> Result<()> {
        match *self {
            Query::Index(i) if i >= data.n() => Err(Error::InvalidArgument(format!(
                "query index {i} out of range for {} points",
                data.n()
            ))),
            Query::Point(p) if p.len() != data.dim() => Err(Error::InvalidArgument(format!(
                "query has dimension {}, data has {}",
                p.len(),
                data.dim()
            ))),
            Query::Point(p) if p.iter().any(|v| !v.is_finite()) => {
                Err(Error::InvalidArgument("query point is not finite".into()))
            }
            _ => Ok(()),
        }
    }

    fn id(&self) -> Option<usize> {
        match *self {
            Query::Index(i) => Some(i),
            Query::Point(_) => None,
        }
    }
}

impl fmt::Display for Query<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Index(i) => write!(f, "point {i}"),
            Query::Point(_) => f.write_str("external query point"),
        }
    }
}

/// Ordered neighbors of one query: ascending distance, ties by ascending index.
///
/// Never contains the query itself or any exact duplicate of it.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    /// Row index of the query, `None` for an external point.
    pub query: Option<usize>,
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
}

impl NeighborList {
    pub fn k(&self) -> usize {
        self.indices.len()
    }

    /// The first `k` neighbors.
    pub fn prefix(&self, k: usize) -> NeighborList {
        let k = k.min(self.k());
        NeighborList {
            query: self.query,
            indices: self.indices[..k].to_vec(),
            distances: self.distances[..k].to_vec(),
        }
    }
}

/// Unit direction vectors from a query to each of its neighbors, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionBundle {
    directions: Vec<f64>,
    dim: usize,
}

impl DirectionBundle {
    /// Builds a bundle from vectors, normalizing each. Zero vectors are rejected.
    pub fn from_vectors<R: AsRef<[f64]>>(vectors: &[R]) -> Result<Self> {
        let dim = vectors.first().map(|v| v.as_ref().len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidArgument("empty direction bundle".into()));
        }
        let mut directions = Vec::with_capacity(vectors.len() * dim);
        for v in vectors {
            let v = v.as_ref();
            if v.len() != dim {
                return Err(Error::InvalidArgument("ragged direction vectors".into()));
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::InvalidArgument(
                    "direction vectors must be finite and non-zero".into(),
                ));
            }
            directions.extend(v.iter().map(|x| x / norm));
        }
        Ok(Self { directions, dim })
    }

    /// Number of directions.
    pub fn k(&self) -> usize {
        self.directions.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn direction(&self, j: usize) -> &[f64] {
        &self.directions[j * self.dim..(j + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.directions.chunks_exact(self.dim)
    }

    /// The first `k` directions.
    pub fn prefix(&self, k: usize) -> DirectionBundle {
        let k = k.min(self.k());
        DirectionBundle {
            directions: self.directions[..k * self.dim].to_vec(),
            dim: self.dim,
        }
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// All candidates at non-zero distance from the query.
fn candidates(data: &DataMatrix, query: &Query<'_>) -> Vec<(f64, usize)> {
    let q = query.coords(data);
    data.rows()
        .enumerate()
        .map(|(j, row)| (euclidean(q, row), j))
        .filter(|&(d, _)| d != 0.0)
        .collect()
}

fn into_list(query: &Query<'_>, pairs: Vec<(f64, usize)>) -> NeighborList {
    let (distances, indices) = pairs.into_iter().unzip();
    NeighborList {
        query: query.id(),
        indices,
        distances,
    }
}

/// Exact `k` nearest neighbors by brute force.
pub fn knn(data: &DataMatrix, query: Query<'_>, k: usize) -> Result<NeighborList> {
    query.validate(data)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut pairs = candidates(data, &query);
    if pairs.len() < k {
        return Err(Error::insufficient(query, pairs.len(), k));
    }
    if pairs.len() > k {
        pairs.select_nth_unstable_by(k - 1, by_distance_then_index);
        pairs.truncate(k);
    }
    pairs.sort_unstable_by(by_distance_then_index);
    Ok(into_list(&query, pairs))
}

/// All neighbors within `radius` (inclusive), excluding zero-distance points.
pub fn radius_neighbors(data: &DataMatrix, query: Query<'_>, radius: f64) -> Result<NeighborList> {
    query.validate(data)?;
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let mut pairs: Vec<_> = candidates(data, &query)
        .into_iter()
        .filter(|&(d, _)| d <= radius)
        .collect();
    pairs.sort_unstable_by(by_distance_then_index);
    Ok(into_list(&query, pairs))
}

/// `knn` for every listed point, in parallel; results follow the order of `points`.
pub fn knn_many(data: &DataMatrix, points: &[usize], k: usize) -> Result<Vec<NeighborList>> {
    points
        .par_iter()
        .map(|&i| knn(data, Query::Index(i), k))
        .collect()
}

/// Unit directions from the query to each neighbor, in neighbor order.
pub fn direction_bundle(
    data: &DataMatrix,
    query: Query<'_>,
    neighbors: &NeighborList,
) -> Result<DirectionBundle> {
    query.validate(data)?;
    if neighbors.k() == 0 {
        return Err(Error::InvalidArgument("empty neighbor list".into()));
    }
    let q = query.coords(data);
    let dim = data.dim();
    let mut directions = Vec::with_capacity(neighbors.k() * dim);
    for (&j, &dist) in neighbors.indices.iter().zip(&neighbors.distances) {
        directions.extend(data.row(j).iter().zip(q).map(|(x, y)| (x - y) / dist));
    }
    Ok(DirectionBundle { directions, dim })
}
