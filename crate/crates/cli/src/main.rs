use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ridgerep::io::{measure_to_string, network_to_string, read_measure, to_json};
use ridgerep::pwl::{
    default_crease_tol, detect_creases, line_trace, pwl_certificate, sample_general_position,
    sample_line, Ball, CertificateConfig, Checks, CreaseConfig, GeneralPositionSet,
    DEFAULT_RESOLUTION,
};
use ridgerep::{default_residual_tol, eval_measure, extract_finite_network, Error, Representation};

const EXIT_INPUT: u8 = 2;
const EXIT_RESIDUAL: u8 = 3;
const EXIT_CERTIFICATE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "ridgerep",
    version,
    about = "Integral representations of shallow ReLU networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize, fold and merge a measure file.
    Canonicalize {
        input: PathBuf,
        /// Output file (stdout if omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the represented function on a grid or a list of points.
    Eval {
        measure: PathBuf,
        /// Per-axis `min:max:n`, comma separated; a single spec applies to every axis.
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "points",
            required_unless_present = "points"
        )]
        grid: Option<String>,
        /// CSV file with one point per row.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Turn the atomic part into a finite-width network.
    Extract {
        measure: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Largest particle total variation accepted as zero.
        #[arg(long)]
        residual_tol: Option<f64>,
    },
    /// Run the piecewise-linearity certificate.
    Verify {
        measure: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [CheckKind::Creases, CheckKind::Slab, CheckKind::CramerWold])]
        checks: Vec<CheckKind>,
        #[arg(long, env = "RIDGE_SEED", default_value_t = 0)]
        seed: u64,
        /// Report file (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of probe lines.
        #[arg(long, default_value_t = 5)]
        lines: usize,
        /// Radius of the ball the line bases are drawn from.
        #[arg(long, default_value_t = 1.0)]
        ball_radius: f64,
        /// Height range `lo:hi` sampled along each line.
        #[arg(long, allow_hyphen_values = true, default_value = "-4:4")]
        range: String,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// Sample one vertical line and report its creases.
    Probe {
        measure: PathBuf,
        /// Base point, comma separated (empty for dimension 1).
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        z0: String,
        #[arg(long, allow_hyphen_values = true, default_value = "-2:2")]
        range: String,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        /// Absolute crease threshold; defaults to a slope-relative one.
        #[arg(long)]
        crease_tol: Option<f64>,
        /// Trace CSV (stdout if omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Crease report JSON (stderr if omitted).
        #[arg(long)]
        creases: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Creases,
    Slab,
    CramerWold,
}

/// Outcome that maps to a dedicated exit code.
#[derive(Debug)]
struct CertificateFailed(String);

impl std::fmt::Display for CertificateFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "certificate failed: {}", self.0)
    }
}

impl std::error::Error for CertificateFailed {}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    s.push('\n');
    s
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("range must be lo:hi, got {s:?}"))?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

fn parse_vector(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {t:?}"))
        })
        .collect()
}

fn grid_points(spec: &str, dim: usize) -> Result<Vec<Vec<f64>>> {
    let mut axes = Vec::new();
    for part in spec.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        let [lo, hi, n] = fields.as_slice() else {
            bail!("grid axis must be min:max:n, got {part:?}");
        };
        let (lo, hi): (f64, f64) = (lo.trim().parse()?, hi.trim().parse()?);
        let n: usize = n.trim().parse()?;
        if n == 0 || !(lo.is_finite() && hi.is_finite()) {
            bail!("bad grid axis {part:?}");
        }
        let axis: Vec<f64> = if n == 1 {
            vec![lo]
        } else {
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * i as f64 / (n - 1) as f64
                    }
                })
                .collect()
        };
        axes.push(axis);
    }
    if axes.len() == 1 && dim > 1 {
        axes = vec![axes[0].clone(); dim];
    }
    if axes.len() != dim {
        bail!(
            "grid has {} axes but the measure has dimension {dim}",
            axes.len()
        );
    }
    // first axis varies slowest
    let mut points = vec![Vec::new()];
    for axis in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

fn csv_points(path: &Path, dim: usize) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(p) => {
                if p.len() != dim {
                    bail!("row {} has {} coordinates, expected {dim}", i + 1, p.len());
                }
                points.push(p);
            }
            // a non-numeric first row is a header
            Err(_) if i == 0 => {}
            Err(e) => bail!("row {}: {e}", i + 1),
        }
    }
    Ok(points)
}

fn eval_csv(rep: &Representation, points: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=rep.dim()).map(|i| format!("x{i}")).collect();
    header.push("f".into());
    w.write_record(&header)?;
    for p in points {
        let f = eval_measure(&rep.measure, &rep.tail, p)?;
        let row: Vec<String> = p
            .iter()
            .chain(std::iter::once(&f))
            .map(f64::to_string)
            .collect();
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn opt_to_string(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Canonicalize { input, out } => {
            let rep = read_measure(&input)?;
            emit(out.as_deref(), &with_newline(measure_to_string(&rep)?))
        }
        Command::Eval {
            measure,
            grid,
            points,
            out,
        } => {
            let rep = read_measure(&measure)?;
            let pts = match (grid, points) {
                (Some(g), _) => grid_points(&g, rep.dim())?,
                (None, Some(p)) => csv_points(&p, rep.dim())?,
                (None, None) => bail!("either --grid or --points is required"),
            };
            emit(out.as_deref(), &eval_csv(&rep, &pts)?)
        }
        Command::Extract {
            measure,
            out,
            residual_tol,
        } => {
            let rep = read_measure(&measure)?;
            let tol = residual_tol.unwrap_or_else(|| default_residual_tol(&rep.measure));
            let net = extract_finite_network(&rep.measure, &rep.tail, tol)?;
            log::info!("extracted {} units", net.units().len());
            emit(out.as_deref(), &with_newline(network_to_string(&net)?))
        }
        Command::Verify {
            measure,
            checks,
            seed,
            out,
            lines,
            ball_radius,
            range,
            resolution,
        } => {
            let rep = read_measure(&measure)?;
            let n = rep.dim() - 1;
            let gp = if n == 0 {
                GeneralPositionSet::trivial()
            } else {
                sample_general_position(n, lines, &Ball::centered(n, ball_radius), seed)?
            };
            let mut cfg = CertificateConfig {
                checks: Checks {
                    creases: checks.contains(&CheckKind::Creases),
                    slab: checks.contains(&CheckKind::Slab),
                    cramer_wold: checks.contains(&CheckKind::CramerWold),
                },
                y_range: parse_range(&range)?,
                resolution,
                ..CertificateConfig::default()
            };
            cfg.cramer_wold.seed = seed;
            let cert = pwl_certificate(&rep.measure, &rep.tail, &gp, &cfg)?;
            let report = with_newline(to_json(&cert)?);
            emit(out.as_deref(), &report)?;
            eprintln!("{}", cert.conclusion);
            if !cert.pass {
                for line in &cert.trace {
                    eprintln!("  {line}");
                }
                return Err(CertificateFailed(cert.conclusion).into());
            }
            Ok(())
        }
        Command::Probe {
            measure,
            z0,
            range,
            resolution,
            crease_tol,
            out,
            creases,
        } => {
            let rep = read_measure(&measure)?;
            let z0 = parse_vector(&z0)?;
            if z0.len() + 1 != rep.dim() {
                bail!("--z0 needs {} coordinates", rep.dim() - 1);
            }
            let f = |x: &[f64]| eval_measure(&rep.measure, &rep.tail, x).unwrap_or(f64::NAN);
            let cfg = CreaseConfig::default();
            let samples = sample_line(f, &z0, parse_range(&range)?, resolution)?;
            let tol = crease_tol.unwrap_or_else(|| default_crease_tol(&samples, cfg.rel_tol));
            let report = detect_creases(&samples, tol, &cfg);

            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["y", "f", "first_diff", "second_diff"])?;
            for row in line_trace(&samples) {
                w.write_record([
                    row.y.to_string(),
                    row.f.to_string(),
                    opt_to_string(row.first_diff),
                    opt_to_string(row.second_diff),
                ])?;
            }
            emit(out.as_deref(), &String::from_utf8(w.into_inner()?)?)?;

            let json = with_newline(to_json(&report)?);
            match creases {
                Some(p) => emit(Some(&p), &json),
                None => {
                    eprint!("{json}");
                    Ok(())
                }
            }
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<CertificateFailed>().is_some() {
        return EXIT_CERTIFICATE;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::NonzeroResidual { .. }) => EXIT_RESIDUAL,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
