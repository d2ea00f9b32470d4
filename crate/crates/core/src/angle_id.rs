//! Angle-based intrinsic dimensionality.
//!
//! For unit directions `v_1..v_k` from a query to its neighbors, the squared
//! cosines `c_ij² = ⟨v_i, v_j⟩²` of a uniformly filled `d`-dimensional
//! neighborhood have mean `1/d`. Inverting the empirical mean gives two
//! estimators:
//!
//! * ABID uses the full `k×k` matrix including the unit diagonal:
//!   `k² / (Σ_{i≠j} c_ij² + k)`. It never exceeds the spanning dimension of
//!   the directions and never exceeds `k`.
//! * RABID uses only the `k² − k` off-diagonal cells:
//!   `(k² − k) / Σ_{i≠j} c_ij²`. It may divide by zero or exceed `k`; both
//!   cases are clamped to `k`.
//!
//! The two are related exactly by `E[C₁²] = ((k−1)·E[C²] + 1) / k`.

use crate::data::{EstimateFlags, Estimator, IdEstimate};
use crate::error::{Error, Result};
use crate::neighbors::DirectionBundle;

/// Sufficient statistics of the pairwise cosine matrix of a bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineSquareStats {
    pub k: usize,
    /// `Σ_{i≠j} c_ij²` over ordered pairs.
    pub off_diag_sq_sum: f64,
    /// Mean off-diagonal cosine; 0 when `k = 1`.
    pub mean_cosine: f64,
}

impl CosineSquareStats {
    fn pairs(&self) -> f64 {
        let k = self.k as f64;
        k * k - k
    }

    /// `E[C²]`, the mean squared off-diagonal cosine. `None` when `k < 2`.
    pub fn mean_sq(&self) -> Option<f64> {
        (self.k >= 2).then(|| self.off_diag_sq_sum / self.pairs())
    }

    /// `E[C₁²]`, the mean squared cosine including the diagonal of ones.
    pub fn mean_sq_with_diagonal(&self) -> f64 {
        let k = self.k as f64;
        (self.off_diag_sq_sum + k) / (k * k)
    }
}

/// Above this ratio of `k` to `D` the `D×D` Gram route is cheaper than the
/// pairwise loop.
fn use_gram_route(k: usize, dim: usize) -> bool {
    dim <= k
}

pub fn cosine_square_stats(bundle: &DirectionBundle) -> CosineSquareStats {
    let k = bundle.k();
    let dim = bundle.dim();
    let (sq_sum, cos_sum) = if use_gram_route(k, dim) {
        gram_sums(bundle)
    } else {
        pairwise_sums(bundle)
    };
    let kf = k as f64;
    let pairs = kf * kf - kf;
    let off_diag_sq_sum = sq_sum.clamp(0.0, pairs);
    let mean_cosine = if k < 2 { 0.0 } else { cos_sum / pairs };
    CosineSquareStats {
        k,
        off_diag_sq_sum,
        mean_cosine,
    }
}

/// Off-diagonal sums via `‖UᵀU‖_F² = ‖UUᵀ‖_F²` and `‖Σ u_i‖² = Σ_{i,j} c_ij`.
fn gram_sums(bundle: &DirectionBundle) -> (f64, f64) {
    let dim = bundle.dim();
    let k = bundle.k() as f64;
    let mut gram = vec![0.0; dim * dim];
    let mut total = vec![0.0; dim];
    for v in bundle.iter() {
        for a in 0..dim {
            total[a] += v[a];
            let row = &mut gram[a * dim..(a + 1) * dim];
            for b in a..dim {
                row[b] += v[a] * v[b];
            }
        }
    }
    let mut frob = 0.0;
    for a in 0..dim {
        frob += gram[a * dim + a] * gram[a * dim + a];
        for b in a + 1..dim {
            frob += 2.0 * gram[a * dim + b] * gram[a * dim + b];
        }
    }
    let sum_norm_sq: f64 = total.iter().map(|t| t * t).sum();
    (frob - k, sum_norm_sq - k)
}

fn pairwise_sums(bundle: &DirectionBundle) -> (f64, f64) {
    let k = bundle.k();
    let mut sq = 0.0;
    let mut lin = 0.0;
    for i in 0..k {
        let vi = bundle.direction(i);
        for j in i + 1..k {
            let c: f64 = vi.iter().zip(bundle.direction(j)).map(|(a, b)| a * b).sum();
            sq += c * c;
            lin += c;
        }
    }
    (2.0 * sq, 2.0 * lin)
}

/// Regularized estimate `E[C₁²]⁻¹`. Always in `(0, k]`; never flagged.
pub fn abid(stats: &CosineSquareStats) -> IdEstimate {
    let k = stats.k as f64;
    IdEstimate::new(Estimator::Abid, k * k / (stats.off_diag_sq_sum + k), stats.k)
}

/// `E[C²]⁻¹` before clamping; `+∞` when all directions are pairwise orthogonal.
pub fn rabid_unclamped(stats: &CosineSquareStats) -> Result<f64> {
    if stats.k < 2 {
        return Err(Error::insufficient("raw angle-based estimate", stats.k, 2));
    }
    Ok(stats.pairs() / stats.off_diag_sq_sum)
}

/// Raw estimate `E[C²]⁻¹`, clamped to `k`.
pub fn rabid(stats: &CosineSquareStats) -> Result<IdEstimate> {
    let raw = rabid_unclamped(stats)?;
    let k = stats.k as f64;
    let est = IdEstimate::new(Estimator::Rabid, raw, stats.k);
    Ok(if stats.off_diag_sq_sum == 0.0 {
        IdEstimate { value: k, ..est }
            .with_flags(EstimateFlags::CLAMPED_TO_K | EstimateFlags::DEGENERATE_ZERO_DENOMINATOR)
    } else if raw > k {
        IdEstimate { value: k, ..est }.with_flags(EstimateFlags::CLAMPED_TO_K)
    } else {
        est
    })
}

/// Converts an un-clamped raw estimate into the regularized one for the same `k`.
pub fn abid_from_rabid(raw: f64, k: usize) -> f64 {
    let k = k as f64;
    k / ((k - 1.0) / raw + 1.0)
}

const FIXED_POINT_TOL: f64 = 1e-12;
const FIXED_POINT_MAX_ITER: usize = 10_000_000;

/// Finds the fixed point of the raw-estimate regularization
/// `d ↦ E[C²]⁻¹ · (k − d)/(k − 1)` by iteration from `d₀ = E[C²]⁻¹`.
///
/// The map is affine with slope `−1/(E[C²](k−1))`. When that slope is
/// steeper than one in magnitude the forward iteration repels, and the
/// inverse map `d ↦ k − d·E[C²](k−1)` is iterated instead; both share the
/// fixed point, which coincides with [`abid`].
pub fn abid_via_fixed_point(stats: &CosineSquareStats) -> Result<f64> {
    if stats.k < 2 {
        return Err(Error::insufficient("fixed-point estimate", stats.k, 2));
    }
    if !(stats.off_diag_sq_sum > 0.0) {
        return Err(Error::Domain(
            "fixed point needs a positive off-diagonal square sum".into(),
        ));
    }
    let k = stats.k as f64;
    let c = stats.off_diag_sq_sum / stats.pairs();
    let gain = c * (k - 1.0);
    let inv_c = 1.0 / c;
    let forward = gain >= 1.0;
    // with unit slope the map is an involution: it either starts at the fixed
    // point or oscillates forever
    let max_iter = if gain == 1.0 { 2 } else { FIXED_POINT_MAX_ITER };
    let mut d = inv_c;
    for _ in 0..max_iter {
        let next = if forward {
            inv_c * (k - d) / (k - 1.0)
        } else {
            k - d * gain
        };
        if !next.is_finite() {
            break;
        }
        if (next - d).abs() < FIXED_POINT_TOL {
            return Ok(next);
        }
        d = next;
    }
    Err(Error::Divergence(format!(
        "no convergence after {max_iter} steps (slope magnitude {})",
        if forward { 1.0 / gain } else { gain }
    )))
}

/// Smallest neighborhood size for which the raw estimate of a `d`-dimensional
/// linear neighborhood cannot exceed `d + c`: `⌈d²/c + (1 − 1/c)·d⌉`.
pub fn required_k(d: usize, c: f64) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument("c must be positive and finite".into()));
    }
    // d²/c + (1 − 1/c)·d rearranged to d + d(d−1)/c so that d = 1 is exact.
    let df = d as f64;
    Ok(d + (df * (df - 1.0) / c).ceil() as usize)
}

/// True when `k` is below `d + 2` for the estimated `d`, the smallest
/// neighborhood for which the regularized estimate is properly regularized.
pub fn under_regularized(k: usize, estimate: f64) -> bool {
    (k as f64) < estimate.ceil() + 2.0
}
