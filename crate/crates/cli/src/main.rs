use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tchebi::codec::{curve_csv, quality_curve};
use tchebi::corpus::synthetic_corpus;
use tchebi::optimizer::{
    candidates_csv, enumerate_candidates, pareto_select, refine_exact, SearchGrid,
};
use tchebi::{
    compress_image, count_operations, dct_matrix, dtt_matrix, parametric_matrix, Algorithm,
    CodecTransform, Execution, GrayImage, MetricsReport, ScaledApproximation, TransformId,
};

#[derive(Parser)]
#[command(
    name = "tchebi",
    version,
    about = "Tchebichef transforms and multiplierless approximations"
)]
struct Cli {
    /// Worker threads for data-parallel stages (default: all cores).
    #[arg(long, global = true, env = "TCHEBI_THREADS")]
    threads: Option<usize>,

    /// Decimal places for floating-point output (default: full precision).
    #[arg(long, global = true)]
    precision: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a transform matrix.
    Matrix(MatrixArgs),
    /// Grid search over the rounding parameter.
    Search(SearchArgs),
    /// Coding metrics for one transform.
    Metrics(MetricsArgs),
    /// Compress and reconstruct one PGM image.
    Compress(CompressArgs),
    /// SSIM / quality-factor sweep over a set of images.
    Curve(CurveArgs),
    /// Arithmetic cost of the 8-point approximation.
    Opcount(OpcountArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    ExactDtt,
    ExactDct,
    LowComplexity,
    Approx,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, value_enum)]
    kind: MatrixKind,
    /// Rounding parameter for low-complexity and approx kinds.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 0.001)]
    step: f64,
    #[arg(long, default_value_t = 0.001)]
    min: f64,
    #[arg(long, default_value_t = 2.499)]
    max: f64,
    /// Add exact rational interval endpoints.
    #[arg(long)]
    refine_exact: bool,
    /// Only print Pareto-optimal candidates.
    #[arg(long)]
    front: bool,
    #[arg(long, default_value_t = 0.95)]
    rho: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricsKind {
    ExactDtt,
    ExactDct,
    Approx,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long, value_enum)]
    kind: MetricsKind,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 0.95)]
    rho: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u8).range(1..=99))]
    qf: u8,
    #[arg(long, default_value = "approx-dtt8")]
    transform: TransformId,
    #[arg(long)]
    output: PathBuf,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    /// Directory of 8-bit PGM images (default: built-in synthetic corpus).
    #[arg(long)]
    input_dir: Option<PathBuf>,
    /// Quality factors as `start:stop:step`.
    #[arg(long, default_value = "10:90:5", value_parser = parse_qf_range)]
    qf: QfRange,
    #[arg(long, value_delimiter = ',', default_value = "exact-dtt8,approx-dtt8")]
    transforms: Vec<TransformId>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Fast8,
    Direct8,
}

#[derive(Args)]
struct OpcountArgs {
    #[arg(long, value_enum, default_value = "fast8")]
    algorithm: AlgorithmArg,
}

#[derive(Clone)]
struct QfRange(Vec<u8>);

fn parse_qf_range(s: &str) -> Result<QfRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<u8>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let (start, stop, step) = match nums.as_slice() {
        [q] => (*q, *q, 1),
        [a, b] => (*a, *b, 1),
        [a, b, c] => (*a, *b, *c),
        _ => return Err("expected start:stop[:step]".into()),
    };
    if step == 0 || start == 0 || stop > 99 || start > stop {
        return Err(format!("invalid quality range {s}"));
    }
    Ok(QfRange((start..=stop).step_by(step as usize).collect()))
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

struct Output {
    precision: Option<usize>,
}

impl Output {
    fn number(&self, v: f64) -> Value {
        match self.precision {
            Some(p) => format!("{v:.p$}")
                .parse::<f64>()
                .map(Value::from)
                .unwrap_or(Value::Null),
            None => Value::from(v),
        }
    }

    fn round(&self, v: Value) -> Value {
        match v {
            Value::Number(n) if n.is_f64() => self.number(n.as_f64().unwrap_or(f64::NAN)),
            Value::Array(a) => Value::Array(a.into_iter().map(|x| self.round(x)).collect()),
            Value::Object(o) => {
                Value::Object(o.into_iter().map(|(k, x)| (k, self.round(x))).collect())
            }
            other => other,
        }
    }

    fn json(&self, v: Value) -> String {
        let mut s = serde_json::to_string(&self.round(v)).expect("values serialize");
        s.push('\n');
        s
    }

    fn real_csv(&self, rows: &[Vec<f64>]) -> String {
        rows.iter()
            .map(|r| {
                let cells: Vec<String> = r
                    .iter()
                    .map(|v| match self.precision {
                        Some(p) => format!("{v:.p$}"),
                        None => format!("{v}"),
                    })
                    .collect();
                cells.join(",") + "\n"
            })
            .collect()
    }
}

fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_matrix(args: &MatrixArgs, out: &Output) -> CliResult<String> {
    let real = |m: &tchebi::SquareMatrix| match args.format {
        Format::Json => out.json(json!(m.rows())),
        Format::Csv => out.real_csv(&m.rows()),
    };
    Ok(match args.kind {
        MatrixKind::ExactDtt => real(dtt_matrix(args.n)?.matrix()),
        MatrixKind::ExactDct => real(dct_matrix(args.n)?.matrix()),
        MatrixKind::LowComplexity => {
            let m = parametric_matrix(args.n, args.alpha)?;
            match args.format {
                Format::Json => out.json(json!(m.as_int().rows())),
                Format::Csv => m.as_int().to_csv(),
            }
        }
        MatrixKind::Approx => {
            let a = ScaledApproximation::at(args.n, args.alpha)?;
            match args.format {
                Format::Json => out.json(json!({
                    "scaling": a.scaling(),
                    "core": a.core().as_int().rows(),
                })),
                Format::Csv => {
                    let mut s = out.real_csv(&[a.scaling().to_vec()]);
                    s.push_str(&a.core().as_int().to_csv());
                    s
                }
            }
        }
    })
}

fn run_search(args: &SearchArgs, out: &Output, exec: Execution) -> CliResult<String> {
    let grid = SearchGrid {
        min: args.min,
        max: args.max,
        step: args.step,
    };
    let mut candidates = enumerate_candidates(args.n, grid, args.rho, exec)?;
    if args.front {
        let front = pareto_select(&candidates)?;
        candidates.retain(|c| front.iter().any(|f| f.alpha_low == c.alpha_low));
    }
    if args.refine_exact {
        refine_exact(args.n, grid, &mut candidates)?;
    }
    Ok(candidates_csv(&candidates, out.precision))
}

fn run_metrics(args: &MetricsArgs, out: &Output) -> CliResult<String> {
    let report = match args.kind {
        MetricsKind::ExactDtt => MetricsReport::for_transform(&dtt_matrix(args.n)?, args.rho)?,
        MetricsKind::ExactDct => MetricsReport::for_transform(&dct_matrix(args.n)?, args.rho)?,
        MetricsKind::Approx => MetricsReport::for_approximation(
            &ScaledApproximation::at(args.n, args.alpha)?,
            args.rho,
        )?,
    };
    Ok(out.json(serde_json::to_value(report)?))
}

fn run_compress(args: &CompressArgs, out: &Output, exec: Execution) -> CliResult<String> {
    let img = load(&args.input)?;
    let t = CodecTransform::new(args.transform)?;
    let (rec, report) = compress_image(&img, args.qf, &t, exec)?;
    rec.save(&args.output)
        .map_err(|e| format!("{}: {e}", args.output.display()))?;
    Ok(out.json(serde_json::to_value(report)?))
}

fn load(path: &Path) -> CliResult<GrayImage> {
    Ok(GrayImage::load(path).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn load_dir(dir: &Path) -> CliResult<Vec<GrayImage>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")));
    paths.sort();
    if paths.is_empty() {
        return Err(format!("no .pgm files in {}", dir.display()).into());
    }
    paths.iter().map(|p| load(p)).collect()
}

fn run_curve(args: &CurveArgs, out: &Output, exec: Execution) -> CliResult<String> {
    let corpus = match &args.input_dir {
        Some(dir) => load_dir(dir)?,
        None => synthetic_corpus().into_iter().map(|(_, img)| img).collect(),
    };
    let rows = quality_curve(&corpus, &args.qf.0, &args.transforms, exec)?;
    Ok(curve_csv(&rows, out.precision))
}

fn run(cli: Cli) -> CliResult<()> {
    let exec = match cli.threads {
        Some(0) => return Err("--threads must be at least 1".into()),
        Some(1) => Execution::Sequential,
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()?;
            Execution::Parallel
        }
        None => Execution::Parallel,
    };
    let out = Output {
        precision: cli.precision,
    };
    match &cli.command {
        Command::Matrix(a) => emit(&run_matrix(a, &out)?, None),
        Command::Search(a) => emit(&run_search(a, &out, exec)?, a.out.as_deref()),
        Command::Metrics(a) => emit(&run_metrics(a, &out)?, a.out.as_deref()),
        Command::Compress(a) => emit(&run_compress(a, &out, exec)?, a.report.as_deref()),
        Command::Curve(a) => emit(&run_curve(a, &out, exec)?, a.out.as_deref()),
        Command::Opcount(a) => {
            let alg = match a.algorithm {
                AlgorithmArg::Fast8 => Algorithm::Fast8,
                AlgorithmArg::Direct8 => Algorithm::Direct8,
            };
            emit(
                &out.json(serde_json::to_value(count_operations(alg)?)?),
                None,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
