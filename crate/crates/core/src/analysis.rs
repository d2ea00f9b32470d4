//! Histograms, stability trails and correlations over per-point estimates.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::data::{DataMatrix, Estimator};
use crate::error::{Error, Result};
use crate::estimate::{estimate_neighborhood, min_k, EstimateOptions};
use crate::neighbors::{knn, Query};

/// Fixed-width histogram with half-open bins `[origin + i·w, origin + (i+1)·w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    pub origin: f64,
    /// Non-empty bins only, keyed by bin index.
    pub counts: BTreeMap<i64, usize>,
    pub n_total: usize,
}

impl Histogram {
    pub fn bin_of(&self, v: f64) -> i64 {
        ((v - self.origin) / self.bin_width).floor() as i64
    }

    pub fn bin_left(&self, bin: i64) -> f64 {
        self.origin + bin as f64 * self.bin_width
    }

    /// Every bin from the lowest to the highest occupied one, zeros included,
    /// as `(left edge, count)`.
    pub fn dense_bins(&self) -> Vec<(f64, usize)> {
        match (self.counts.keys().next(), self.counts.keys().next_back()) {
            (Some(&lo), Some(&hi)) => (lo..=hi)
                .map(|b| (self.bin_left(b), self.counts.get(&b).copied().unwrap_or(0)))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Dense bins whose left edge lies in `[min, max]`; display only.
    pub fn clipped(&self, min: Option<f64>, max: Option<f64>) -> Histogram {
        let counts = self
            .counts
            .iter()
            .filter(|(&b, _)| {
                let left = self.bin_left(b);
                min.is_none_or(|m| left >= m) && max.is_none_or(|m| left <= m)
            })
            .map(|(&b, &c)| (b, c))
            .collect::<BTreeMap<_, _>>();
        Histogram {
            n_total: counts.values().sum(),
            counts,
            ..*self
        }
    }

    /// Most populated bin (lowest index on ties).
    pub fn mode_bin(&self) -> Option<i64> {
        self.counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&b, _)| b)
    }

    /// Center of the most populated bin.
    pub fn mode(&self) -> Option<f64> {
        self.mode_bin()
            .map(|b| self.bin_left(b) + self.bin_width / 2.0)
    }
}

pub fn histogram(values: &[f64], bin_width: f64, origin: f64) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::Empty("histogram of no values".into()));
    }
    if !(bin_width > 0.0) || !bin_width.is_finite() || !origin.is_finite() {
        return Err(Error::InvalidArgument(
            "bin width must be positive and origin finite".into(),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("histogram values must be finite".into()));
    }
    let mut h = Histogram {
        bin_width,
        origin,
        counts: BTreeMap::new(),
        n_total: values.len(),
    };
    for &v in values {
        *h.counts.entry(h.bin_of(v)).or_insert(0) += 1;
    }
    Ok(h)
}

/// Estimates of selected points across increasing neighborhood sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct TrailMatrix {
    pub estimator: Estimator,
    pub k_values: Vec<usize>,
    /// Point index of each row.
    pub points: Vec<usize>,
    /// `estimates[row][j]` is the estimate at `k_values[j]`.
    pub estimates: Vec<Vec<f64>>,
}

impl TrailMatrix {
    /// Estimates of every point at one `k`.
    pub fn column(&self, k: usize) -> Option<Vec<f64>> {
        let j = self.k_values.iter().position(|&x| x == k)?;
        Some(self.estimates.iter().map(|row| row[j]).collect())
    }
}

/// One kNN search per point at the largest `k`; smaller neighborhoods are
/// prefixes of that list.
pub fn trails(
    data: &DataMatrix,
    k_values: &[usize],
    estimator: Estimator,
    points: &[usize],
    options: &EstimateOptions,
) -> Result<TrailMatrix> {
    if k_values.is_empty() || k_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "k values must be non-empty and strictly increasing".into(),
        ));
    }
    let required = min_k(&[estimator]);
    if k_values[0] < required {
        return Err(Error::insufficient(
            format!("{estimator} trails"),
            k_values[0],
            required,
        ));
    }
    let k_max = *k_values.last().expect("non-empty");
    let estimates = points
        .par_iter()
        .map(|&i| {
            let query = Query::Index(i);
            let full = knn(data, query, k_max)?;
            k_values
                .iter()
                .map(|&k| {
                    let r = estimate_neighborhood(data, query, &full.prefix(k), &[estimator], options)?;
                    Ok(r.estimates[&estimator].value)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrailMatrix {
        estimator,
        k_values: k_values.to_vec(),
        points: points.to_vec(),
        estimates,
    })
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "correlation needs equal lengths ≥ 2, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Pearson product-moment correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::InvalidArgument(
            "correlation of a constant sequence is undefined".into(),
        ));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Ranks starting at 1; tied values share their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation: Pearson on average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    pearson(&average_ranks(a), &average_ranks(b))
}
