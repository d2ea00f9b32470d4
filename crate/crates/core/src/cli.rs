//! Command-line front end: `generate`, `estimate`, `histogram`, `trails`
//! and `validate`.
//!
//! Data goes to files (or standard output when `-o` is omitted); progress
//! and diagnostics go to standard error. Exit codes: 0 success, 1 usage,
//! 2 data error, 3 validation failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::index::sample;

use crate::analysis::{histogram, trails};
use crate::angle_id::under_regularized;
use crate::baseline::GedPair;
use crate::data::{DataMatrix, Estimator};
use crate::error::Error;
use crate::estimate::{estimate_point_with, estimate_table, EstimateOptions};
use crate::io::{format_float, load_column, load_csv, to_csv_string, write_csv, CsvOptions, LabeledMatrix, TableCsv, ToCsv};
use crate::neighbors::Query;
use crate::synth::{default_lattice_levels, generate, GeneratorSpec};
use crate::theory::{
    angle_pdf, cosine_cdf, ks_critical_1pct, ks_statistic, legendre_identity_residual,
    pair_cosines, sample_cosines, SphereDim,
};
use crate::{seeded_rng, synth};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "abid", version, about = "Angle-based local intrinsic dimensionality")]
pub struct Cli {
    /// Worker threads for per-point estimation (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
    /// Per-point dimensionality estimates for a CSV dataset.
    Estimate(EstimateArgs),
    /// Histogram of one column of an estimate table.
    Histogram(HistogramArgs),
    /// Estimates of selected points over a range of neighborhood sizes.
    Trails(TrailsArgs),
    /// Self-checks of the cosine distribution theory and special functions.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Shape {
    Ball,
    Sphere,
    Gaussian,
    Koch,
    Lattice,
    NestedCubes,
    OffsetDisc,
    Rectangle,
}

#[derive(Debug, Args)]
pub struct DataInput {
    /// Input CSV file.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Field delimiter.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Skip the first row of the input.
    #[arg(long)]
    pub header: bool,
}

impl DataInput {
    fn load(&self) -> Result<DataMatrix, Error> {
        load_csv(&self.input, CsvOptions {
            delimiter: delimiter_byte(self.delimiter)?,
            header: self.header,
        })
    }
}

fn delimiter_byte(c: char) -> Result<u8, Error> {
    u8::try_from(c)
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| Error::InvalidArgument(format!("delimiter '{c}' is not ASCII")))
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub shape: Shape,
    /// Number of points (ball, sphere, gaussian, koch, offset-disc, rectangle).
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Dimension (ball, sphere, gaussian).
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Koch recursion depth.
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Lattice dimensionality.
    #[arg(long, default_value_t = 8)]
    pub dims: usize,
    /// Lattice levels per coordinate.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// Upper bound of the uniform lattice jitter.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub jitter: f64,
    /// Largest nested hypercube dimension.
    #[arg(long, default_value_t = 5)]
    pub max_dim: usize,
    #[arg(long, default_value_t = 5000)]
    pub n_per_cube: usize,
    /// Apply one random rotation to the nested hypercubes.
    #[arg(long)]
    pub rotate: bool,
    /// Height of the offset-disc query point above the disc.
    #[arg(long, default_value_t = 20.0)]
    pub h: f64,
    /// Rectangle length.
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    /// Rectangle width.
    #[arg(long, default_value_t = 0.04)]
    pub width: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (standard output when omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

impl GenerateArgs {
    fn spec(&self) -> GeneratorSpec {
        match self.shape {
            Shape::Ball => GeneratorSpec::Ball { n: self.n, d: self.d },
            Shape::Sphere => GeneratorSpec::Sphere { n: self.n, d: self.d },
            Shape::Gaussian => GeneratorSpec::Gaussian { n: self.n, d: self.d },
            Shape::Koch => GeneratorSpec::Koch {
                depth: self.depth,
                n: self.n,
            },
            Shape::Lattice => GeneratorSpec::Lattice {
                dims: self.dims,
                levels: self.levels.clone().unwrap_or_else(default_lattice_levels),
                jitter: self.jitter,
            },
            Shape::NestedCubes => GeneratorSpec::NestedCubes {
                max_dim: self.max_dim,
                n_per_cube: self.n_per_cube,
                rotate: self.rotate,
            },
            Shape::OffsetDisc => GeneratorSpec::OffsetDisc { n: self.n, h: self.h },
            Shape::Rectangle => GeneratorSpec::ThinRectangle {
                n: self.n,
                length: self.length,
                width: self.width,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataInput,
    /// Neighborhood size.
    #[arg(long)]
    pub k: usize,
    /// Comma-separated estimator tags: abid, rabid, mle, mom, ged.
    #[arg(long, default_value = "abid", value_delimiter = ',')]
    pub estimators: Vec<String>,
    /// Neighbor ranks compared by ged (default ⌈k/2⌉,k).
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub ged_pair: Option<Vec<usize>>,
    /// Add mean_cosine and flags columns.
    #[arg(long)]
    pub diagnostics: bool,
    /// Estimate only around this external point (comma-separated coordinates).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub query: Option<Vec<f64>>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    /// Estimate table CSV (with header).
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, default_value = "abid")]
    pub column: String,
    #[arg(long, default_value_t = 0.25)]
    pub bin_width: f64,
    #[arg(long, default_value_t = 0.0)]
    pub origin: f64,
    /// Lowest bin edge shown.
    #[arg(long, allow_negative_numbers = true)]
    pub min: Option<f64>,
    /// Highest bin edge shown.
    #[arg(long, allow_negative_numbers = true)]
    pub max: Option<f64>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrailsArgs {
    #[command(flatten)]
    pub data: DataInput,
    #[arg(long)]
    pub k_min: usize,
    #[arg(long)]
    pub k_max: usize,
    #[arg(long, default_value_t = 1)]
    pub k_step: usize,
    #[arg(long, default_value = "abid")]
    pub estimator: String,
    /// Number of randomly chosen points (all points when omitted).
    #[arg(long)]
    pub points: Option<usize>,
    /// Seed of the point selection.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Sphere dimension.
    #[arg(long, default_value_t = 5)]
    pub d: usize,
    /// Cosine samples per check.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

enum Failure {
    Usage(String),
    Data(Error),
    Validation(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Domain(_) => Failure::Usage(e.to_string()),
            other => Failure::Data(other),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return EXIT_DATA;
        }
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
        Err(Failure::Validation(failed)) => {
            eprintln!("validation failed: {}", failed.join(", "));
            EXIT_VALIDATION
        }
    }
}

fn dispatch(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Histogram(a) => cmd_histogram(a),
        Command::Trails(a) => cmd_trails(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn emit<T: ToCsv + ?Sized>(value: &T, output: Option<&PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => write_csv(value, path)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(to_csv_string(value).as_bytes())
                .map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    Ok(())
}

fn parse_estimators(tags: &[String]) -> Result<Vec<Estimator>, Failure> {
    let mut out: Vec<Estimator> = Vec::new();
    for tag in tags {
        let e: Estimator = tag.parse()?;
        if !out.contains(&e) {
            out.push(e);
        }
    }
    if out.is_empty() {
        return Err(Failure::Usage("no estimators requested".into()));
    }
    out.sort();
    Ok(out)
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), Failure> {
    let spec = args.spec();
    let generated = generate(&spec, args.seed)?;
    let data = &generated.data;
    eprintln!(
        "generated {}: n={} D={} seed={}",
        spec.shape(),
        data.n(),
        data.dim(),
        args.seed
    );
    if let Some(q) = &generated.query {
        let coords: Vec<String> = q.iter().map(|&v| format_float(v)).collect();
        eprintln!("query point: {}", coords.join(","));
    }
    match &generated.labels {
        Some(labels) => emit(&LabeledMatrix { data, labels }, args.output.as_ref()),
        None => emit(data, args.output.as_ref()),
    }
}

fn cmd_estimate(args: &EstimateArgs) -> Result<(), Failure> {
    let estimators = parse_estimators(&args.estimators)?;
    let options = EstimateOptions {
        ged_pair: match args.ged_pair.as_deref() {
            Some(&[a, b]) => GedPair::Ranks(a, b),
            Some(_) => return Err(Failure::Usage("--ged-pair takes two ranks".into())),
            None => GedPair::HalfAndFull,
        },
    };
    let data = args.data.load()?;
    eprintln!(
        "estimating {} with k={} on n={} D={}",
        estimators.iter().map(|e| e.tag()).collect::<Vec<_>>().join(","),
        args.k,
        data.n(),
        data.dim()
    );

    if let Some(q) = &args.query {
        let r = estimate_point_with(&data, Query::Point(q), args.k, &estimators, &options)?;
        let mut header = vec!["index".to_string()];
        header.extend(estimators.iter().map(|e| e.tag().to_string()));
        let mut row = vec!["query".to_string()];
        row.extend(estimators.iter().map(|e| format_float(r.estimates[e].value)));
        if args.diagnostics {
            header.extend(["mean_cosine".into(), "flags".into()]);
            row.push(r.mean_cosine.map(format_float).unwrap_or_default());
            let flags: Vec<String> = estimators
                .iter()
                .flat_map(|e| r.estimates[e].flags.names().map(move |n| format!("{}:{n}", e.tag())))
                .collect();
            row.push(flags.join(";"));
        }
        let text = format!("{}\n{}\n", header.join(","), row.join(","));
        return write_text(&text, args.output.as_ref());
    }

    let table = estimate_table(&data, args.k, &estimators, None, &options)?;
    if let Some(values) = table.column(Estimator::Abid) {
        let low = values.iter().filter(|&&v| under_regularized(args.k, v)).count();
        if low > 0 {
            eprintln!(
                "warning: k={} is below estimate+2 for {low} points; those estimates are not properly regularized",
                args.k
            );
        }
    }
    emit(
        &TableCsv {
            table: &table,
            diagnostics: args.diagnostics,
        },
        args.output.as_ref(),
    )
}

fn write_text(text: &str, output: Option<&PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_histogram(args: &HistogramArgs) -> Result<(), Failure> {
    let values = load_column(&args.input, &args.column, delimiter_byte(args.delimiter)?)?;
    let h = histogram(&values, args.bin_width, args.origin)?;
    if let Some(mode) = h.mode() {
        eprintln!("{} values, mode bin centered at {}", h.n_total, format_float(mode));
    }
    let shown = if args.min.is_some() || args.max.is_some() {
        h.clipped(args.min, args.max)
    } else {
        h
    };
    emit(&shown, args.output.as_ref())
}

fn cmd_trails(args: &TrailsArgs) -> Result<(), Failure> {
    let estimator: Estimator = args.estimator.parse()?;
    if args.k_step == 0 || args.k_min == 0 || args.k_min > args.k_max {
        return Err(Failure::Usage(
            "need 1 ≤ k-min ≤ k-max and k-step ≥ 1".into(),
        ));
    }
    let k_values: Vec<usize> = (args.k_min..=args.k_max).step_by(args.k_step).collect();
    let data = args.data.load()?;
    let points: Vec<usize> = match args.points {
        Some(m) if m > data.n() => {
            return Err(Failure::Usage(format!(
                "--points {m} exceeds the {} points in the data",
                data.n()
            )))
        }
        Some(m) => {
            let mut p = sample(&mut seeded_rng(args.seed), data.n(), m).into_vec();
            p.sort_unstable();
            p
        }
        None => (0..data.n()).collect(),
    };
    eprintln!(
        "trails of {estimator} for {} points over k={:?} (selection seed {})",
        points.len(),
        k_values,
        args.seed
    );
    let t = trails(&data, &k_values, estimator, &points, &EstimateOptions::default())?;
    emit(&t, args.output.as_ref())
}

struct Check {
    name: String,
    value: f64,
    threshold: f64,
    passed: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value < threshold,
        }
    }
}

/// Composite Simpson rule on `[a, b]` with `intervals` (even) sub-intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let inner: f64 = (1..intervals)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), Failure> {
    let dim = SphereDim::new(args.d)?;
    let d = args.d;
    let n = args.samples;
    if n < 2 {
        return Err(Failure::Usage("--samples must be at least 2".into()));
    }
    eprintln!("validating d={d} with {n} samples, seed={}", args.seed);
    let mut checks = Vec::new();

    let ball = synth::sample_ball(2 * n, d, args.seed)?;
    let cosines = pair_cosines(&ball);
    let m = cosines.len() as f64;
    let mean = cosines.iter().sum::<f64>() / m;
    let var = cosines.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / m;
    checks.push(Check::below("ball cosine |mean|", mean.abs(), 0.01));
    checks.push(Check::below("ball cosine |d·var − 1|", (d as f64 * var - 1.0).abs(), 0.05));

    let drawn = sample_cosines(dim, n, args.seed.wrapping_add(1));
    let second = drawn.iter().map(|c| c * c).sum::<f64>() / n as f64;
    checks.push(Check::below("sampled |d·E[C²] − 1|", (d as f64 * second - 1.0).abs(), 0.05));

    if d >= 2 {
        let critical = ks_critical_1pct(n);
        let sphere = synth::sample_sphere(2 * n, d, args.seed.wrapping_add(2))?;
        let cdf = |c: f64| cosine_cdf(c, dim).expect("cosines lie in [−1, 1]");
        let sphere_cos = pair_cosines(&sphere);
        checks.push(Check::below(
            "sphere cosines KS",
            ks_statistic(&sphere_cos, cdf)?,
            ks_critical_1pct(sphere_cos.len()),
        ));
        checks.push(Check::below("sampled cosines KS", ks_statistic(&drawn, cdf)?, critical));
        let mass = simpson(
            |t| angle_pdf(t, dim).expect("θ in [0, π]"),
            0.0,
            std::f64::consts::PI,
            4000,
        );
        checks.push(Check::below("angle density |∫ − 1|", (mass - 1.0).abs(), 1e-8));
    } else {
        eprintln!("d = 1: cosines are ±1, distribution checks skipped");
    }

    let worst = (1..=40)
        .map(|i| legendre_identity_residual(0.5 * i as f64))
        .collect::<Result<Vec<f64>, Error>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::below("Legendre duplication residual", worst, 1e-10));

    println!("{:<32} {:>14} {:>12}  status", "check", "value", "threshold");
    for c in &checks {
        println!(
            "{:<32} {:>14.6e} {:>12.3e}  {}",
            c.name,
            c.value,
            c.threshold,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    if failed.is_empty() {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL");
        Err(Failure::Validation(failed))
    }
}
