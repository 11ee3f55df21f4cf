mod data;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use specseg::{
    case_spec, run_replications, table_report, Baseline, BandwidthRule, DetectorConfig, NoiseKind, PiecewiseSpec,
    Prepared, Solver,
};

use crate::data::{emit, read_series, spectra_tsv, write_series, SpectrumOptions};
use crate::error::CliError;

/// Change-point detection for piecewise-stationary time series by
/// comparing smoothed spectra.
#[derive(Parser)]
#[command(name = "specseg", version)]
struct Cli {
    /// Worker threads for parallel work (default: all logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect change points in a single-column CSV series.
    Detect(DetectArgs),
    /// Simulate a piecewise-stationary series to CSV.
    Simulate(SimulateArgs),
    /// Replicate simulation and detection, and report accuracy.
    Bench(BenchArgs),
    /// Write normalized segment spectra as TSV.
    Spectrum(SpectrumArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    /// Exact DP over every grid point; needs --known-k.
    Dp,
    /// Screening pass, then DP (known K) or BIC.
    Screen,
    /// Penalized search with pruning.
    Pelt,
    /// BIC with DP over every grid point.
    Bic,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    Pooled,
    White,
}

#[derive(Clone, Copy, ValueEnum)]
enum BandwidthArg {
    /// m from the series length, shared by every segment.
    Series,
    /// m from each segment's own length.
    Segment,
}

impl From<BandwidthArg> for BandwidthRule {
    fn from(b: BandwidthArg) -> Self {
        match b {
            BandwidthArg::Series => BandwidthRule::Series,
            BandwidthArg::Segment => BandwidthRule::Segment,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Gaussian,
    T4,
}

impl From<NoiseArg> for NoiseKind {
    fn from(n: NoiseArg) -> Self {
        match n {
            NoiseArg::Gaussian => NoiseKind::Gaussian,
            NoiseArg::T4 => NoiseKind::ScaledT4,
        }
    }
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `a:b`, got `{s}`"))?;
    let p = |v: &str| v.trim().parse::<T>().map_err(|_| format!("bad number `{v}`"));
    Ok((p(a)?, p(b)?))
}

fn parse_band(s: &str) -> Result<(f64, f64), String> {
    parse_pair(s)
}

fn parse_rows(s: &str) -> Result<(usize, usize), String> {
    parse_pair(s)
}

fn parse_sweep(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(format!("expected `lo:hi:step`, got `{s}`"));
    };
    let p = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("bad number `{v}`"));
    let (lo, hi, step) = (p(lo)?, p(hi)?, p(step)?);
    if !(step > 0.0 && lo <= hi) {
        return Err("need lo <= hi and step > 0".into());
    }
    Ok((lo, hi, step))
}

fn parse_boundaries(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| format!("bad index `{t}`")))
        .collect()
}

/// Detector settings shared by `detect` and `bench`.
#[derive(Args)]
struct Tuning {
    /// Minimum segment length in samples.
    #[arg(long, default_value_t = 350)]
    ml: usize,
    /// Largest number of change points BIC considers.
    #[arg(long, default_value_t = 6)]
    kmax: usize,
    /// Bandwidth exponent: m = round(length^alpha).
    #[arg(long, default_value_t = 1.0 / 3.0)]
    alpha: f64,
    /// Which length the bandwidth is computed from.
    #[arg(long, value_enum, default_value_t = BandwidthArg::Series)]
    bandwidth: BandwidthArg,
    #[arg(long, value_enum, default_value_t = BaselineArg::Pooled)]
    baseline: BaselineArg,
    /// Points in the frequency grid.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Change points are only searched at multiples of this unit.
    #[arg(long = "n-su", default_value_t = 1)]
    n_su: usize,
    /// Exponent of the BIC penalty me_bic · N^c.
    #[arg(long, default_value_t = 0.73)]
    c: f64,
    #[arg(long, value_enum, default_value_t = SolverArg::Screen)]
    solver: SolverArg,
    /// Screening window length (default: --ml).
    #[arg(long)]
    screen_window: Option<usize>,
    /// Turn off PELT pruning (exact but slower).
    #[arg(long)]
    no_prune: bool,
    /// Restrict the frequency grid to [lo, hi] radians, e.g. `0:3.1416`.
    #[arg(long, value_parser = parse_band, allow_hyphen_values = true)]
    band: Option<(f64, f64)>,
}

impl Tuning {
    fn config(&self) -> DetectorConfig {
        DetectorConfig {
            ml: self.ml,
            k_max: self.kmax,
            alpha: self.alpha,
            bandwidth: self.bandwidth.into(),
            baseline: match self.baseline {
                BaselineArg::Pooled => Baseline::Pooled,
                BaselineArg::White => Baseline::WhiteNoise,
            },
            grid_size: self.grid,
            n_su: self.n_su,
            penalty_exponent: self.c,
            solver: match self.solver {
                SolverArg::Dp => Solver::DpKnownK,
                SolverArg::Screen => Solver::Screening,
                SolverArg::Pelt => Solver::Pelt,
                SolverArg::Bic => Solver::BicExhaustive,
            },
            screen_window: self.screen_window,
            pelt_pruning: !self.no_prune,
            band: self.band,
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    /// Single-column CSV; an optional one-line header is skipped.
    input: PathBuf,
    #[command(flatten)]
    tuning: Tuning,
    /// Fix the number of change points instead of selecting it.
    #[arg(long)]
    known_k: Option<usize>,
    /// Keep data rows a..b (0-based, end exclusive) before detecting.
    #[arg(long, value_parser = parse_rows)]
    rows: Option<(usize, usize)>,
    /// Result document path (default: stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write the detected segments' normalized spectra to this TSV.
    #[arg(long)]
    spectra: Option<PathBuf>,
    /// Include the wall-clock runtime in the result document.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in case 1 to 4.
    #[arg(long)]
    case: Option<u32>,
    /// Piecewise process description file.
    #[arg(long)]
    spec: Option<PathBuf>,
}

impl Source {
    fn load(&self, noise: Option<NoiseArg>, length: Option<usize>) -> Result<PiecewiseSpec, CliError> {
        let mut spec = match (&self.case, &self.spec) {
            (Some(id), _) => case_spec(*id, noise.map_or(NoiseKind::Gaussian, Into::into))?,
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let spec = PiecewiseSpec::parse(&text)
                    .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
                match noise {
                    Some(n) => spec.with_noise(n.into()),
                    None => spec,
                }
            }
            (None, None) => unreachable!("clap requires one source"),
        };
        if let Some(n) = length {
            spec = spec.rescaled(n);
            spec.validate()?;
        }
        Ok(spec)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    /// Innovation distribution (overrides the spec file's).
    #[arg(long, value_enum)]
    noise: Option<NoiseArg>,
    /// Rescale segment lengths proportionally to this total.
    #[arg(long)]
    length: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Series CSV; the true change points go to `<stem>.truth.json`.
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum)]
    noise: Option<NoiseArg>,
    #[arg(long)]
    length: Option<usize>,
    #[command(flatten)]
    tuning: Tuning,
    #[arg(long)]
    known_k: Option<usize>,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    /// Replicate i uses seed + i.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also report mean K̂ for penalty exponents lo, lo + step, …, hi.
    #[arg(long, value_parser = parse_sweep)]
    sweep_c: Option<(f64, f64, f64)>,
    /// Row label in the table (default: derived from the source).
    #[arg(long)]
    label: Option<String>,
    /// Write `<prefix>.tsv` (and `<prefix>.sweep.tsv`) next to the printed table.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    input: PathBuf,
    /// Change points, comma separated; none means one segment.
    #[arg(long)]
    boundaries: Option<String>,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = BandwidthArg::Series)]
    bandwidth: BandwidthArg,
    #[arg(long, default_value_t = 512)]
    grid: usize,
    #[arg(long, value_parser = parse_band, allow_hyphen_values = true)]
    band: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_rows)]
    rows: Option<(usize, usize)>,
    /// TSV path (default: stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct PenaltyDoc {
    me_bic: f64,
    c: f64,
    c_n: f64,
}

#[derive(Serialize)]
struct DetectDoc {
    input: String,
    n: usize,
    rows: Option<(usize, usize)>,
    k_hat: usize,
    change_points: Vec<usize>,
    fractions: Vec<f64>,
    objective: f64,
    solver: Solver,
    penalty: Option<PenaltyDoc>,
    layer_values: Option<Vec<Option<f64>>>,
    candidates: usize,
    evaluations: usize,
    spectra: Option<String>,
    config: DetectorConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_seconds: Option<f64>,
}

#[derive(Serialize)]
struct TruthDoc<'a> {
    n: usize,
    change_points: &'a [usize],
    seed: u64,
    spec: &'a PiecewiseSpec,
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn detect(args: &DetectArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = args.tuning.config();
    let values = read_series(&args.input, args.rows)?;
    let n = values.len();
    let found = Prepared::new(&values, &cfg)?.detect(&cfg, args.known_k)?;
    let spectra = match &args.spectra {
        Some(path) => {
            let opts = SpectrumOptions {
                alpha: cfg.alpha,
                grid_size: cfg.grid_size,
                band: cfg.band,
                bandwidth: cfg.bandwidth,
            };
            emit(Some(path), &spectra_tsv(&values, &found.segmentation.boundaries, &opts)?)?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let doc = DetectDoc {
        input: args.input.display().to_string(),
        n,
        rows: args.rows,
        k_hat: found.k_hat,
        change_points: found.change_points().to_vec(),
        fractions: found.segmentation.fractions(),
        objective: found.segmentation.objective,
        solver: found.solver,
        penalty: found.penalty.map(|p| PenaltyDoc {
            me_bic: p.me_bic,
            c: p.c,
            c_n: p.c_n,
        }),
        layer_values: found.layer_values.clone(),
        candidates: found.candidates.len(),
        evaluations: found.evaluations,
        spectra,
        config: cfg,
        runtime_seconds: args.timing.then(|| start.elapsed().as_secs_f64()),
    };
    emit(args.output.as_deref(), &to_json(&doc))
}

fn truth_path(output: &Path) -> PathBuf {
    output.with_extension("truth.json")
}

fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let spec = args.source.load(args.noise, args.length)?;
    let sim = specseg::simulate_piecewise(&spec, args.seed)?;
    write_series(&args.output, &sim.values)?;
    let truth = TruthDoc {
        n: sim.values.len(),
        change_points: &sim.change_points,
        seed: args.seed,
        spec: &spec,
    };
    emit(Some(&truth_path(&args.output)), &to_json(&truth))
}

fn bench(args: &BenchArgs) -> Result<(), CliError> {
    let cfg = args.tuning.config();
    let spec = args.source.load(args.noise, args.length)?;
    if args.sweep_c.is_some() && (args.known_k.is_some() || matches!(cfg.solver, Solver::Pelt | Solver::DpKnownK)) {
        return Err(CliError::Infeasible(
            "--sweep-c needs BIC selection: --solver screen or bic without --known-k".into(),
        ));
    }
    let runs = run_replications(&spec, &cfg, args.reps, args.seed, args.known_k)?;
    let label = args.label.clone().unwrap_or_else(|| match (&args.source.case, &args.source.spec) {
        (Some(id), _) => format!("case {id}"),
        (None, Some(p)) => p.display().to_string(),
        (None, None) => String::new(),
    });
    let report = table_report(&[(label, runs.summary.clone())]);
    print!("{}", report.text);

    let sweep = args.sweep_c.map(|(lo, hi, step)| {
        let steps = ((hi - lo) / step + 1e-9).floor() as usize;
        let cs: Vec<f64> = (0..=steps).map(|i| lo + step * i as f64).collect();
        let mut tsv = String::from("c\tmean_k_hat\n");
        for (c, k) in runs.penalty_sweep(&cs) {
            tsv.push_str(&format!("{c:.4}\t{k}\n"));
        }
        tsv
    });
    if let Some(s) = &sweep {
        print!("\n{s}");
    }
    if let Some(prefix) = &args.output {
        emit(Some(&prefix.with_extension("tsv")), &report.tsv)?;
        if let Some(s) = &sweep {
            emit(Some(&prefix.with_extension("sweep.tsv")), s)?;
        }
    }
    Ok(())
}

fn spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let values = read_series(&args.input, args.rows)?;
    let n = values.len();
    if n < 2 {
        return Err(specseg::Error::EmptyInput(n).into());
    }
    let inner = match &args.boundaries {
        Some(s) => parse_boundaries(s).map_err(CliError::Parse)?,
        None => Vec::new(),
    };
    let mut bounds = vec![0];
    bounds.extend(inner);
    bounds.push(n);
    if bounds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Parse(format!(
            "--boundaries must be increasing and inside (0, {n})"
        )));
    }
    let opts = SpectrumOptions {
        alpha: args.alpha,
        grid_size: args.grid,
        band: args.band,
        bandwidth: args.bandwidth.into(),
    };
    emit(args.output.as_deref(), &spectra_tsv(&values, &bounds, &opts)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("specseg: cannot size the worker pool: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Detect(a) => detect(a),
        Command::Simulate(a) => simulate(a),
        Command::Bench(a) => bench(a),
        Command::Spectrum(a) => spectrum(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("specseg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
