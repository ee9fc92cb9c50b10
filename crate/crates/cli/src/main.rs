use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use bottleneck_cli::config::RunConfigFile;
use bottleneck_cli::inputs::{
    parse_bounds, parse_complex, parse_matrix_csv, parse_point_csv, read_system, read_text,
};
use bottleneck_cli::plot::{emit_plot, PlotOutcome};
use bottleneck_cli::report::BottleneckOutput;
use bottleneck_cli::InputError;
use bottleneck_core::algebra::{square_system, PolySystem};
use bottleneck_core::baseline::{
    bench_csv, bench_family, bench_markdown, multihom_for_family, solve_direct, DirectSolveReport,
};
use bottleneck_core::bottleneck::{
    run_bottlenecks, BottleneckError, BottleneckRunConfig, RunReport,
};
use bottleneck_core::families::Family;
use bottleneck_core::rng::{SeedTree, Stream};
use bottleneck_core::startsys::{solve_squared_normal_locus, LocusOptions, NormalLocusResult};
use bottleneck_core::topology::{
    read_cloud_csv, rips_components, sample_curve, write_cloud_csv, SampleCloud,
};
use bottleneck_core::Complex;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "bottleneck",
    version,
    about = "Bottlenecks of algebraic varieties by homotopy continuation"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Common {
    /// TOML run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; every random choice derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the random gamma, as `re,im` with modulus 1.
    #[arg(long, global = true, value_name = "RE,IM", allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Base point file, one `re[,im]` row per coordinate.
    #[arg(long, global = true)]
    p0: Option<PathBuf>,
    /// Newton corrector tolerance while tracking.
    #[arg(long, global = true)]
    tol_newton: Option<f64>,
    /// Endgame tolerance on the scaled residual at t = 0.
    #[arg(long, global = true)]
    tol_final: Option<f64>,
    /// Imaginary parts below this count as real.
    #[arg(long, global = true)]
    tol_real: Option<f64>,
    /// Relative distance under which two pairs are the same.
    #[arg(long, global = true)]
    tol_dedup: Option<f64>,
    /// Relative |x - y| under which an endpoint is diagonal.
    #[arg(long, global = true)]
    diag_tol: Option<f64>,
    /// Step budget per path.
    #[arg(long, global = true)]
    max_steps: Option<usize>,
    /// Worker threads for path tracking.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exit with status 3 when the run reports numerical warnings.
    #[arg(long, global = true)]
    strict: bool,
    /// Projection matrix (CSV, m x n) for the projected bottleneck problem.
    #[arg(long, global = true, value_name = "M.csv")]
    project: Option<PathBuf>,
    /// Include wall-clock timings in reports.
    #[arg(long, global = true)]
    timings: bool,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Normal locus of one variety with respect to a base point.
    NormalLocus {
        #[arg(long)]
        system: Option<PathBuf>,
    },
    /// Bottleneck pairs of X and Y.
    Bottlenecks {
        #[arg(long)]
        x: Option<PathBuf>,
        #[arg(long)]
        y: Option<PathBuf>,
        /// X = Y; Y defaults to X.
        #[arg(long)]
        symmetric: bool,
        /// Write the real pairs as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write plot data for the real pairs into this directory.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Direct multihomogeneous solve of the Lagrange system.
    SolveDirect {
        #[arg(long)]
        x: Option<PathBuf>,
        #[arg(long)]
        y: Option<PathBuf>,
        #[arg(long)]
        symmetric: bool,
    },
    /// Benchmark row for a generated family.
    Bench {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(Family::names()))]
        family: String,
        /// Ambient dimension.
        #[arg(long)]
        n: Option<usize>,
        /// Also run the direct method.
        #[arg(long)]
        direct: bool,
        /// Only compute the multihomogeneous root count.
        #[arg(long)]
        count_only: bool,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
    },
    /// Sample the real points of a curve on a grid of hyperplanes.
    Sample {
        #[arg(long)]
        system: Option<PathBuf>,
        /// `lo,hi;lo,hi;...`
        #[arg(long = "box", allow_hyphen_values = true)]
        bounds: Option<String>,
        #[arg(long)]
        spacing: Option<f64>,
    },
    /// Connected components of the Vietoris-Rips graph of a point cloud.
    Components {
        #[arg(long)]
        cloud: Option<PathBuf>,
        #[arg(long)]
        r: Option<f64>,
        /// Write the cloud with a label column.
        #[arg(long)]
        labels_out: Option<PathBuf>,
    },
    /// Plot data from a bottlenecks report and an optional sample.
    Plot {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        cloud: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Csv,
    Json,
}

enum Failure {
    Validation(anyhow::Error),
    Numerical(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Validation(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Validation(e)
    }
}

/// Pipeline errors from the solver. Shape and parameter problems are the
/// user's; anything else is numerical.
fn solver_failure(e: BottleneckError) -> Failure {
    match e {
        BottleneckError::Tracker(_) => Failure::Numerical(e.to_string()),
        _ => Failure::Validation(e.into()),
    }
}

#[derive(Serialize)]
struct LocusOutput<'a> {
    config_echo: &'a RunConfigFile,
    #[serde(flatten)]
    result: &'a NormalLocusResult,
}

#[derive(Serialize)]
struct DirectOutput<'a> {
    config_echo: &'a RunConfigFile,
    #[serde(flatten)]
    report: &'a DirectSolveReport,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}

fn effective_config(c: &Common) -> Result<RunConfigFile, Failure> {
    let mut cfg = match &c.config {
        Some(p) => RunConfigFile::from_toml(&read_text(p)?)?,
        None => RunConfigFile::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(g) = &c.gamma {
        let z = parse_complex(g)?;
        cfg.gamma = Some([z.re, z.im]);
    }
    if c.p0.is_some() {
        cfg.p0.clone_from(&c.p0);
    }
    if c.project.is_some() {
        cfg.projection.clone_from(&c.project);
    }
    if let Some(v) = c.tol_newton {
        cfg.tracker.newton_tol = v;
    }
    if let Some(v) = c.tol_final {
        cfg.tracker.final_tol = v;
    }
    if let Some(v) = c.max_steps {
        cfg.tracker.max_steps = v;
    }
    if let Some(v) = c.tol_real {
        cfg.tolerances.real = v;
    }
    if let Some(v) = c.tol_dedup {
        cfg.tolerances.dedup = v;
    }
    if let Some(v) = c.diag_tol {
        cfg.tolerances.diag = v;
    }
    if c.threads.is_some() {
        cfg.threads = c.threads;
    }
    cfg.strict |= c.strict;
    cfg.validate()?;
    Ok(cfg)
}

fn run_config(cfg: &RunConfigFile, symmetric: bool) -> Result<BottleneckRunConfig, Failure> {
    let p0 = match &cfg.p0 {
        Some(p) => Some(parse_point_csv(&read_text(p)?)?),
        None => None,
    };
    let projection = match &cfg.projection {
        Some(p) => Some(parse_matrix_csv(&read_text(p)?)?),
        None => None,
    };
    let t = &cfg.tolerances;
    Ok(BottleneckRunConfig {
        gamma: cfg.gamma.map(|[re, im]| Complex::new(re, im)),
        p0,
        symmetric,
        diag_tol: t.diag,
        real_tol: t.real,
        dedup_tol: t.dedup,
        filter_tol: t.filter,
        normality_tol: t.normality,
        projection,
        tracker: cfg.tracker(),
    })
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).context("writing stdout")?;
        }
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).context("serializing report")?;
    s.push('\n');
    Ok(s)
}

fn strict_check(strict: bool, warnings: &[String]) -> Result<(), Failure> {
    for w in warnings {
        eprintln!("warning: {w}");
    }
    if strict && !warnings.is_empty() {
        return Err(Failure::Numerical(warnings.join("; ")));
    }
    Ok(())
}

fn required(path: Option<PathBuf>, what: &str) -> Result<PathBuf, Failure> {
    path.ok_or_else(|| Failure::Validation(anyhow!("missing {what}")))
}

/// X and Y from flags or the config file; in symmetric mode Y defaults to X.
fn pair_systems(
    cfg: &RunConfigFile,
    x: Option<PathBuf>,
    y: Option<PathBuf>,
    symmetric: bool,
) -> Result<(PolySystem, PolySystem, bool), Failure> {
    let symmetric = symmetric || cfg.systems.symmetric;
    let xp = required(x.or_else(|| cfg.systems.x.clone()), "--x")?;
    let yp = y.or_else(|| cfg.systems.y.clone());
    let sx = read_system(&xp)?;
    let sy = match yp {
        Some(p) => read_system(&p)?,
        None if symmetric => sx.clone(),
        None => {
            return Err(Failure::Validation(anyhow!(
                "missing --y (or pass --symmetric)"
            )))
        }
    };
    Ok((sx, sy, symmetric))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = effective_config(&cli.common)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let out = cli.common.output.as_deref();
    let timings = cli.common.timings;
    match cli.command {
        Command::NormalLocus { system } => {
            let path = required(system.or_else(|| cfg.systems.x.clone()), "--system")?;
            let spec = read_system(&path)?;
            let rc = run_config(&cfg, false)?;
            let tree = SeedTree::new(cfg.seed);
            let sq = square_system(&spec, tree.child(Stream::SquareX))
                .map_err(|e| Failure::Validation(e.into()))?;
            let p0 = rc.p0.clone().unwrap_or_else(|| {
                bottleneck_core::rng::complex_gaussian_vec(
                    &mut tree.rng(Stream::BasePoint),
                    spec.num_vars(),
                )
            });
            let opts = LocusOptions {
                tolerances: rc.locus_tolerances(),
                metric: rc.metric(),
                gamma: rc.gamma,
            };
            let result = solve_squared_normal_locus(
                &sq,
                &p0,
                &rc.tracker,
                &opts,
                tree.child(Stream::NormalLocusX),
            )
            .map_err(|e| Failure::Validation(e.into()))?;
            emit(
                out,
                &json(&LocusOutput {
                    config_echo: &cfg,
                    result: &result,
                })?,
            )?;
            strict_check(cfg.strict, &result.warning.into_iter().collect::<Vec<_>>())
        }
        Command::Bottlenecks {
            x,
            y,
            symmetric,
            csv,
            plot,
        } => {
            let (sx, sy, symmetric) = pair_systems(&cfg, x, y, symmetric)?;
            let rc = run_config(&cfg, symmetric)?;
            let mut report = run_bottlenecks(&sx, &sy, &rc, cfg.seed).map_err(solver_failure)?;
            if !timings {
                report.timings = None;
            }
            if let Some(path) = csv {
                std::fs::write(&path, real_pairs_csv(&report))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(dir) = plot {
                report_plot(emit_plot(
                    &report.pairs,
                    &[],
                    sx.num_vars(),
                    cfg.seed,
                    &dir,
                )?);
            }
            let warnings = report.warnings.clone();
            let output = BottleneckOutput {
                config_echo: cfg.clone(),
                report,
            };
            emit(out, &output.to_json())?;
            strict_check(cfg.strict, &warnings)
        }
        Command::SolveDirect { x, y, symmetric } => {
            let (sx, sy, symmetric) = pair_systems(&cfg, x, y, symmetric)?;
            let rc = run_config(&cfg, symmetric)?;
            let tree = SeedTree::new(cfg.seed);
            let fx = square_system(&sx, tree.child(Stream::SquareX))
                .map_err(|e| Failure::Validation(e.into()))?;
            let fy = if symmetric {
                fx.clone()
            } else {
                square_system(&sy, tree.child(Stream::SquareY))
                    .map_err(|e| Failure::Validation(e.into()))?
            };
            let mut report = solve_direct(&fx, &fy, &rc, cfg.seed).map_err(solver_failure)?;
            if !timings {
                report.wall_time = None;
            }
            emit(
                out,
                &json(&DirectOutput {
                    config_echo: &cfg,
                    report: &report,
                })?,
            )?;
            let c = &report.counts;
            let warnings: Vec<String> = (c.truncated + c.unverified > 0)
                .then(|| {
                    format!(
                        "{} truncated and {} unverified endpoints",
                        c.truncated, c.unverified
                    )
                })
                .into_iter()
                .collect();
            strict_check(cfg.strict, &warnings)
        }
        Command::Bench {
            family,
            n,
            direct,
            count_only,
            format,
        } => {
            let fam = parse_family(&family, n)?;
            if count_only {
                let count = multihom_for_family(fam, cfg.seed).map_err(solver_failure)?;
                return emit(out, &format!("{count}\n"));
            }
            let rc = run_config(&cfg, false)?;
            let mut row = bench_family(fam, &rc, cfg.seed, direct).map_err(solver_failure)?;
            if !timings {
                row.seconds = None;
            }
            let text = match format {
                Format::Markdown => bench_markdown(std::slice::from_ref(&row)),
                Format::Csv => bench_csv(std::slice::from_ref(&row)),
                Format::Json => json(&row)?,
            };
            emit(out, &text)
        }
        Command::Sample {
            system,
            bounds,
            spacing,
        } => {
            let path = required(system.or_else(|| cfg.sample.system.clone()), "--system")?;
            let spec = read_system(&path)?;
            let bounds = match bounds {
                Some(b) => parse_bounds(&b)?,
                None => cfg.sample.bounds.clone(),
            };
            let spacing = spacing
                .or(cfg.sample.spacing)
                .ok_or_else(|| Failure::Validation(anyhow!("missing --spacing")))?;
            let intervals: Vec<(f64, f64)> = bounds.iter().map(|[a, b]| (*a, *b)).collect();
            let cloud = sample_curve(&spec, &intervals, spacing, &cfg.tracker(), cfg.seed)
                .map_err(|e| Failure::Validation(e.into()))?;
            emit(out, &cloud_csv(&cloud.points, None)?)?;
            eprintln!("{}", sample_summary(&cloud));
            let warnings: Vec<String> = cloud
                .points
                .is_empty()
                .then(|| "empty sample".to_string())
                .into_iter()
                .collect();
            strict_check(cfg.strict, &warnings)
        }
        Command::Components {
            cloud,
            r,
            labels_out,
        } => {
            let path = required(cloud.or_else(|| cfg.components.cloud.clone()), "--cloud")?;
            let r = r
                .or(cfg.components.r)
                .ok_or_else(|| Failure::Validation(anyhow!("missing --r")))?;
            let file = std::fs::File::open(&path)
                .with_context(|| format!("opening {}", path.display()))?;
            let points = read_cloud_csv(file).map_err(|e| Failure::Validation(e.into()))?;
            let (count, labels) =
                rips_components(&points, r).map_err(|e| Failure::Validation(e.into()))?;
            if let Some(lp) = labels_out {
                std::fs::write(&lp, cloud_csv(&points, Some(&labels))?)
                    .with_context(|| format!("writing {}", lp.display()))?;
            }
            emit(out, &format!("{count}\n"))
        }
        Command::Plot {
            report,
            cloud,
            out_dir,
        } => {
            let text = read_text(&report)?;
            let parsed: BottleneckOutput = serde_json::from_str(&text)
                .with_context(|| format!("{} is not a bottlenecks report", report.display()))?;
            let points = match cloud {
                Some(p) => {
                    let file = std::fs::File::open(&p)
                        .with_context(|| format!("opening {}", p.display()))?;
                    read_cloud_csv(file).map_err(|e| Failure::Validation(e.into()))?
                }
                None => Vec::new(),
            };
            let n = parsed.report.config.p0.len();
            if let Some(w) = points.first().map(Vec::len).filter(|&w| w != n) {
                return Err(Failure::Validation(anyhow!(
                    "cloud has {w} coordinates, report has {n}"
                )));
            }
            report_plot(emit_plot(
                &parsed.report.pairs,
                &points,
                n,
                parsed.report.config.seed,
                &out_dir,
            )?);
            Ok(())
        }
    }
}

fn parse_family(name: &str, n: Option<usize>) -> Result<Family, Failure> {
    let fam = Family::parse(name, n)
        .ok_or_else(|| Failure::Validation(anyhow!("unknown family {name}")))?;
    let fixed = match fam {
        Family::QuadricSurfaces
        | Family::CubicSurfaces
        | Family::CubicSurface
        | Family::QuarticSurfaces
        | Family::Goursat => Some(3),
        Family::Ellipse | Family::TwoOvals => Some(2),
        Family::Cycloheptane => Some(12),
        Family::RationalNormalCurves(k) | Family::CompleteIntersectionCurve(k) => {
            if k < 2 {
                return Err(Failure::Validation(anyhow!("--n must be at least 2")));
            }
            None
        }
    };
    match (fixed, n) {
        (Some(f), Some(k)) if f != k => Err(Failure::Validation(anyhow!(
            "{name} lives in dimension {f}, not {k}"
        ))),
        _ => Ok(fam),
    }
}

fn report_plot(outcome: PlotOutcome) {
    match outcome {
        PlotOutcome::Nothing => eprintln!("nothing to plot"),
        PlotOutcome::Written { files, projected } => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            if projected {
                eprintln!("coordinates projected to R^3");
            }
        }
    }
}

fn cloud_csv(points: &[Vec<f64>], labels: Option<&[usize]>) -> Result<String, Failure> {
    let mut buf = Vec::new();
    write_cloud_csv(points, labels, &mut buf).context("writing csv")?;
    Ok(String::from_utf8(buf).context("csv is utf-8")?)
}

fn sample_summary(cloud: &SampleCloud) -> String {
    match cloud.largest_gap {
        Some(g) => format!(
            "{} points from {} slices, largest nearest-neighbour gap {g:.6}",
            cloud.points.len(),
            cloud.slices
        ),
        None => format!("{} points from {} slices", cloud.points.len(), cloud.slices),
    }
}

fn real_pairs_csv(report: &RunReport) -> String {
    let n = report.config.p0.len();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.extend((1..=n).map(|i| format!("y{i}")));
    header.push("distance".into());
    let mut s = header.join(",") + "\n";
    for p in report.pairs.iter().filter(|p| p.is_real) {
        let row: Vec<String> =
            p.x.iter()
                .chain(&p.y)
                .map(|c| format!("{:?}", c.re))
                .chain(std::iter::once(format!(
                    "{:?}",
                    p.distance.unwrap_or(f64::NAN)
                )))
                .collect();
        s += &row.join(",");
        s.push('\n');
    }
    s
}
