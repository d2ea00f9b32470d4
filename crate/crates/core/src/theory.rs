//! Distribution of angles and cosine similarities between independent
//! uniform points on a `d`-sphere.
//!
//! The angle `θ` has density `Γ(d/2) / (Γ(½)Γ((d−1)/2)) · sin(θ)^{d−2}` on
//! `[0, π]`. The cosine `C = cos θ` follows a symmetric beta law rescaled to
//! `[−1, 1]`: `(1 + C)/2 ~ Beta((d−1)/2, (d−1)/2)`, so `E[C] = 0` and
//! `Var[C] = E[C²] = 1/d`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::special::{gamma, ln_beta, ln_gamma, regularized_incomplete_beta};

/// Ambient dimension of the sphere the points are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SphereDim(usize);

impl SphereDim {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("sphere dimension must be at least 1".into()));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Beta shape parameter `(d − 1)/2` of the rescaled cosine law.
    fn shape(self) -> f64 {
        (self.0 as f64 - 1.0) / 2.0
    }

    fn require_density(self) -> Result<()> {
        if self.0 < 2 {
            return Err(Error::Domain(
                "densities need d ≥ 2; for d = 1 cosines are ±1".into(),
            ));
        }
        Ok(())
    }
}

pub fn angle_pdf(theta: f64, d: SphereDim) -> Result<f64> {
    d.require_density()?;
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::Domain(format!("angle {theta} outside [0, π]")));
    }
    let df = d.get() as f64;
    let ln_norm = ln_gamma(df / 2.0) - ln_gamma(0.5) - ln_gamma((df - 1.0) / 2.0);
    Ok(ln_norm.exp() * theta.sin().powi(d.get() as i32 - 2))
}

fn check_cosine(c: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&c) {
        return Err(Error::Domain(format!("cosine {c} outside [−1, 1]")));
    }
    Ok(())
}

/// `½ · BetaPDF((1+c)/2; (d−1)/2, (d−1)/2)`. Infinite at `c = ±1` for `d = 2`.
pub fn cosine_pdf(c: f64, d: SphereDim) -> Result<f64> {
    d.require_density()?;
    check_cosine(c)?;
    let a = d.shape();
    let x = (1.0 + c) / 2.0;
    let y = (1.0 - c) / 2.0;
    let norm = (-ln_beta(a, a)).exp();
    Ok(0.5 * norm * (x.powf(a - 1.0) * y.powf(a - 1.0)))
}

/// `I_{(1+c)/2}((d−1)/2, (d−1)/2)`, evaluated on the negative half and
/// mirrored so the symmetry `F(−c) = 1 − F(c)` holds exactly.
pub fn cosine_cdf(c: f64, d: SphereDim) -> Result<f64> {
    d.require_density()?;
    check_cosine(c)?;
    let a = d.shape();
    Ok(if c == 0.0 {
        0.5
    } else if c < 0.0 {
        regularized_incomplete_beta((1.0 + c) / 2.0, a, a)
    } else {
        1.0 - regularized_incomplete_beta((1.0 - c) / 2.0, a, a)
    })
}

/// `(E[C], Var[C]) = (0, 1/d)`.
pub fn cosine_moments(d: SphereDim) -> (f64, f64) {
    (0.0, 1.0 / d.get() as f64)
}

/// Relative residual of `Γ(x)Γ(x+½) = 2^{1−2x} Γ(½) Γ(2x)`, a self-test of
/// the gamma implementation.
pub fn legendre_identity_residual(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("duplication formula needs x > 0, got {x}")));
    }
    let lhs = gamma(x) * gamma(x + 0.5);
    let rhs = 2f64.powf(1.0 - 2.0 * x) * gamma(0.5) * gamma(2.0 * x);
    if !lhs.is_finite() || !rhs.is_finite() || rhs == 0.0 {
        return Err(Error::Range(format!("gamma overflows at x = {x}")));
    }
    Ok(((lhs - rhs) / rhs).abs())
}

/// I.i.d. cosines following the law for dimension `d`. `(1+C)/2` is drawn as
/// `X/(X+Y)` with `X, Y ~ Gamma((d−1)/2, 1)`; `d = 1` yields ±1 with equal odds.
pub fn sample_cosines(d: SphereDim, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = crate::seeded_rng(seed);
    if d.get() == 1 {
        return (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
    }
    let g = Gamma::new(d.shape(), 1.0).expect("shape (d−1)/2 is positive for d ≥ 2");
    (0..n)
        .map(|_| {
            let x: f64 = g.sample(&mut rng);
            let y: f64 = g.sample(&mut rng);
            2.0 * (x / (x + y)) - 1.0
        })
        .collect()
}

/// Cosines between disjoint consecutive row pairs `(0,1), (2,3), …`, measured
/// about the origin. An odd final row is ignored.
pub fn pair_cosines(data: &DataMatrix) -> Vec<f64> {
    (0..data.n() / 2)
        .map(|p| {
            let a = data.row(2 * p);
            let b = data.row(2 * p + 1);
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            (dot / (na * nb)).clamp(-1.0, 1.0)
        })
        .collect()
}

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n − F|`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("no samples for the KS statistic".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max))
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}
