//! Seeded synthetic datasets. Every generator is a pure function of its
//! parameters and seed.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::seeded_rng;

/// Largest lattice dimensionality accepted (4¹⁰ ≈ 10⁶ points).
pub const MAX_LATTICE_DIMS: usize = 10;
/// Largest Koch recursion depth accepted (3·4¹⁰ segments).
pub const MAX_KOCH_DEPTH: usize = 10;

/// Dataset description; identical specs produce bit-identical data.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Ball { n: usize, d: usize },
    Sphere { n: usize, d: usize },
    Gaussian { n: usize, d: usize },
    Koch { depth: usize, n: usize },
    Lattice { dims: usize, levels: Vec<f64>, jitter: f64 },
    NestedCubes { max_dim: usize, n_per_cube: usize, rotate: bool },
    OffsetDisc { n: usize, h: f64 },
    ThinRectangle { n: usize, length: f64, width: f64 },
}

impl GeneratorSpec {
    pub fn shape(&self) -> &'static str {
        match self {
            GeneratorSpec::Ball { .. } => "ball",
            GeneratorSpec::Sphere { .. } => "sphere",
            GeneratorSpec::Gaussian { .. } => "gaussian",
            GeneratorSpec::Koch { .. } => "koch",
            GeneratorSpec::Lattice { .. } => "lattice",
            GeneratorSpec::NestedCubes { .. } => "nested_cubes",
            GeneratorSpec::OffsetDisc { .. } => "offset_disc",
            GeneratorSpec::ThinRectangle { .. } => "rectangle",
        }
    }
}

/// Generator output. `labels` name the source cube for nested hypercubes;
/// `query` is the off-plane point of the offset disc.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub data: DataMatrix,
    pub labels: Option<Vec<usize>>,
    pub query: Option<Vec<f64>>,
}

impl From<DataMatrix> for Generated {
    fn from(data: DataMatrix) -> Self {
        Self {
            data,
            labels: None,
            query: None,
        }
    }
}

pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Generated> {
    Ok(match spec {
        GeneratorSpec::Ball { n, d } => sample_ball(*n, *d, seed)?.into(),
        GeneratorSpec::Sphere { n, d } => sample_sphere(*n, *d, seed)?.into(),
        GeneratorSpec::Gaussian { n, d } => sample_gaussian(*n, *d, seed)?.into(),
        GeneratorSpec::Koch { depth, n } => koch_snowflake(*depth, *n, seed)?.into(),
        GeneratorSpec::Lattice {
            dims,
            levels,
            jitter,
        } => jittered_lattice(*dims, levels, *jitter, seed)?.into(),
        GeneratorSpec::NestedCubes {
            max_dim,
            n_per_cube,
            rotate,
        } => {
            let (data, labels) = nested_hypercubes(*max_dim, *n_per_cube, *rotate, seed)?;
            Generated {
                data,
                labels: Some(labels),
                query: None,
            }
        }
        GeneratorSpec::OffsetDisc { n, h } => {
            let (data, query) = offset_disc(*n, *h, seed)?;
            Generated {
                data,
                labels: None,
                query: Some(query),
            }
        }
        GeneratorSpec::ThinRectangle { n, length, width } => {
            thin_rectangle(*n, *length, *width, seed)?.into()
        }
    })
}

fn check_counts(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument(format!(
            "need n ≥ 1 and d ≥ 1, got n={n}, d={d}"
        )));
    }
    Ok(())
}

fn gaussian_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

fn unit_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vec(rng, d);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform points in the unit `d`-ball: Gaussian direction times `U^{1/d}`.
pub fn sample_ball(n: usize, d: usize, seed: u64) -> Result<DataMatrix> {
    check_counts(n, d)?;
    let mut rng = seeded_rng(seed);
    let mut values = Vec::with_capacity(n * d);
    for _ in 0..n {
        let dir = unit_vec(&mut rng, d);
        let r = rng.random::<f64>().powf(1.0 / d as f64);
        values.extend(dir.into_iter().map(|x| x * r));
    }
    DataMatrix::from_flat(values, d)
}

/// Uniform points on the unit sphere in `R^d` (normalized Gaussians).
pub fn sample_sphere(n: usize, d: usize, seed: u64) -> Result<DataMatrix> {
    check_counts(n, d)?;
    let mut rng = seeded_rng(seed);
    let values = (0..n).flat_map(|_| unit_vec(&mut rng, d)).collect();
    DataMatrix::from_flat(values, d)
}

/// Standard spherical Gaussian in `R^d`.
pub fn sample_gaussian(n: usize, d: usize, seed: u64) -> Result<DataMatrix> {
    check_counts(n, d)?;
    let mut rng = seeded_rng(seed);
    let values = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    DataMatrix::from_flat(values, d)
}

/// Closed Koch snowflake polyline at the given depth, starting from an
/// equilateral triangle of side 1. Returns the vertices in order; the curve
/// closes back to the first vertex.
pub fn koch_vertices(depth: usize) -> Result<Vec<[f64; 2]>> {
    if depth > MAX_KOCH_DEPTH {
        return Err(Error::InvalidArgument(format!(
            "Koch depth {depth} exceeds {MAX_KOCH_DEPTH}"
        )));
    }
    let mut verts = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]];
    // counter-clockwise traversal: the outward side is to the right
    let (s, c) = (-PI / 3.0).sin_cos();
    for _ in 0..depth {
        let mut next = Vec::with_capacity(verts.len() * 4);
        for i in 0..verts.len() {
            let a = verts[i];
            let b = verts[(i + 1) % verts.len()];
            let dx = (b[0] - a[0]) / 3.0;
            let dy = (b[1] - a[1]) / 3.0;
            let p1 = [a[0] + dx, a[1] + dy];
            let p3 = [a[0] + 2.0 * dx, a[1] + 2.0 * dy];
            let peak = [p1[0] + c * dx - s * dy, p1[1] + s * dx + c * dy];
            next.extend([a, p1, peak, p3]);
        }
        verts = next;
    }
    Ok(verts)
}

/// Points uniform by arc length along the depth-`depth` Koch snowflake.
pub fn koch_snowflake(depth: usize, n: usize, seed: u64) -> Result<DataMatrix> {
    check_counts(n, 1)?;
    let verts = koch_vertices(depth)?;
    let m = verts.len();
    let mut cumulative = Vec::with_capacity(m);
    let mut total = 0.0;
    for i in 0..m {
        let (a, b) = (verts[i], verts[(i + 1) % m]);
        total += (b[0] - a[0]).hypot(b[1] - a[1]);
        cumulative.push(total);
    }
    let mut rng = seeded_rng(seed);
    let mut values = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let s = rng.random::<f64>() * total;
        let seg = cumulative.partition_point(|&c| c <= s).min(m - 1);
        let start = if seg == 0 { 0.0 } else { cumulative[seg - 1] };
        let t = ((s - start) / (cumulative[seg] - start)).clamp(0.0, 1.0);
        let (a, b) = (verts[seg], verts[(seg + 1) % m]);
        values.push(a[0] + t * (b[0] - a[0]));
        values.push(a[1] + t * (b[1] - a[1]));
    }
    DataMatrix::from_flat(values, 2)
}

/// Default lattice levels `{0, 1/3, 2/3, 1}`.
pub fn default_lattice_levels() -> Vec<f64> {
    vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]
}

/// Every combination of `levels` in `dims` coordinates, each coordinate
/// displaced by jitter uniform in `[0, jitter]`. The first coordinate varies
/// slowest.
pub fn jittered_lattice(dims: usize, levels: &[f64], jitter: f64, seed: u64) -> Result<DataMatrix> {
    if dims == 0 {
        return Err(Error::InvalidArgument("lattice needs dims ≥ 1".into()));
    }
    if dims > MAX_LATTICE_DIMS {
        return Err(Error::InvalidArgument(format!(
            "lattice with {dims} dims exceeds the size guard of {MAX_LATTICE_DIMS}"
        )));
    }
    if levels.is_empty() || !(jitter >= 0.0) {
        return Err(Error::InvalidArgument(
            "lattice needs at least one level and non-negative jitter".into(),
        ));
    }
    let base = levels.len();
    let count = base.pow(dims as u32);
    let mut rng = seeded_rng(seed);
    let mut values = Vec::with_capacity(count * dims);
    let mut digits = vec![0usize; dims];
    for _ in 0..count {
        for &digit in &digits {
            values.push(levels[digit] + rng.random::<f64>() * jitter);
        }
        for digit in digits.iter_mut().rev() {
            *digit += 1;
            if *digit < base {
                break;
            }
            *digit = 0;
        }
    }
    DataMatrix::from_flat(values, dims)
}

/// Random orthogonal `dim×dim` matrix (row-major), Gram–Schmidt on a
/// Gaussian matrix.
pub fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v = gaussian_vec(rng, dim);
        for _ in 0..2 {
            for b in &basis {
                let proj: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

/// Applies `x ↦ Qx` to every row.
pub fn rotate(data: &DataMatrix, q: &[Vec<f64>]) -> Result<DataMatrix> {
    if q.len() != data.dim() {
        return Err(Error::InvalidArgument("rotation size mismatch".into()));
    }
    data.map_rows(|x| {
        q.iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    })
}

/// Cubes of dimension `1..=max_dim`, each with `n_per_cube` points uniform in
/// `[−½, ½]^m` placed in the first `m` coordinates of `R^max_dim`. Any two
/// cubes intersect in a `min(i, j)`-dimensional subspace. Labels give the
/// source cube dimension.
pub fn nested_hypercubes(
    max_dim: usize,
    n_per_cube: usize,
    rotate_all: bool,
    seed: u64,
) -> Result<(DataMatrix, Vec<usize>)> {
    if !(1..=8).contains(&max_dim) || n_per_cube == 0 {
        return Err(Error::InvalidArgument(format!(
            "nested cubes need 1 ≤ max_dim ≤ 8 and n_per_cube ≥ 1, got {max_dim}, {n_per_cube}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut values = Vec::with_capacity(max_dim * max_dim * n_per_cube);
    let mut labels = Vec::with_capacity(max_dim * n_per_cube);
    for m in 1..=max_dim {
        for _ in 0..n_per_cube {
            for j in 0..max_dim {
                values.push(if j < m { rng.random::<f64>() - 0.5 } else { 0.0 });
            }
            labels.push(m);
        }
    }
    let mut data = DataMatrix::from_flat(values, max_dim)?;
    if rotate_all {
        let q = random_orthogonal(max_dim, &mut rng);
        data = rotate(&data, &q)?;
    }
    Ok((data, labels))
}

/// `n` points uniform on the unit disc in the `z = 0` plane of `R³`, and the
/// query point `(0, 0, h)` above its center.
pub fn offset_disc(n: usize, h: f64, seed: u64) -> Result<(DataMatrix, Vec<f64>)> {
    if n < 3 || !(h >= 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "offset disc needs n ≥ 3 and finite h ≥ 0, got n={n}, h={h}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut values = Vec::with_capacity(3 * n);
    for _ in 0..n {
        let r = rng.random::<f64>().sqrt();
        let phi = 2.0 * PI * rng.random::<f64>();
        values.extend([r * phi.cos(), r * phi.sin(), 0.0]);
    }
    Ok((DataMatrix::from_flat(values, 3)?, vec![0.0, 0.0, h]))
}

/// Uniform points in the rectangle `[0, length] × [0, width]`, a noised
/// line segment when `width ≪ length`.
pub fn thin_rectangle(n: usize, length: f64, width: f64, seed: u64) -> Result<DataMatrix> {
    check_counts(n, 2)?;
    if !(length > 0.0) || !(width >= 0.0) {
        return Err(Error::InvalidArgument(
            "rectangle needs positive length and non-negative width".into(),
        ));
    }
    let mut rng = seeded_rng(seed);
    let values = (0..n)
        .flat_map(|_| [rng.random::<f64>() * length, rng.random::<f64>() * width])
        .collect();
    DataMatrix::from_flat(values, 2)
}
