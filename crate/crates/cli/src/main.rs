mod degenerate;
mod integrate;
mod report;
mod verify;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use painleve_core::catalog::CatalogError;
use painleve_core::degeneration::diagram_closure;
use painleve_core::numint::{NumError, ParamValues};
use painleve_core::Catalog;
use rayon::prelude::*;

use crate::report::{to_sorted_json, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Num(#[from] NumError),
    /// The integrator gave up part way; a verification failure, not a usage error.
    #[error("integration failed: {0}")]
    Integration(NumError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Integration(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

#[derive(Parser)]
#[command(name = "painleve", version, about = "Checks isomonodromic deformations, degenerations and Painleve trajectories")]
struct Cli {
    /// Catalog file; the bundled catalog is used when neither this nor PAINLEVE_CATALOG is set.
    #[arg(long, global = true, env = "PAINLEVE_CATALOG")]
    catalog: Option<PathBuf>,
    /// Output format. Defaults to text, or csv for `integrate`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Selection {
    ids: Vec<String>,
    #[arg(long)]
    all: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compatibility, elimination, signature and matrix checks.
    Verify(Selection),
    /// Degeneration rules and the coalescence diagram.
    Degenerate {
        #[command(flatten)]
        selection: Selection,
        /// Add a numeric slope table for every rule.
        #[arg(long)]
        probe: bool,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Write the verified diagram as DOT.
        #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "degenerations.dot")]
        emit_dot: Option<PathBuf>,
    },
    /// Integrates the Hamiltonian flow of a family.
    Integrate {
        family: String,
        #[arg(long)]
        alpha: Option<f64>,
        /// Other parameters as NAME=VALUE.
        #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        y0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        z0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t1: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Largest accepted scalar-equation residual.
        #[arg(long, default_value_t = 1e-6)]
        residual_tol: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("`{s}` is not NAME=VALUE"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn load(path: Option<&Path>) -> Result<Catalog, CliError> {
    Ok(match path {
        Some(p) => Catalog::load(p)?,
        None => Catalog::bundled()?,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn select(sel: &Selection, all: impl FnOnce() -> Vec<String>) -> Result<Vec<String>, CliError> {
    match (sel.all, sel.ids.is_empty()) {
        (true, true) => Ok(all()),
        (true, false) => Err(CliError::Usage("give ids or --all, not both".into())),
        (false, false) => Ok(sel.ids.clone()),
        (false, true) => Err(CliError::Usage("nothing selected, give ids or --all".into())),
    }
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool")
}

fn emit(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Text => Ok(report.to_text()),
        Format::Json => Ok(report.to_json()),
        f => Err(CliError::Usage(format!("{f:?} output is not available for `{}`", report.command).to_lowercase())),
    }
}

fn run(cli: Cli) -> Result<(String, bool), CliError> {
    let cat = load(cli.catalog.as_deref())?;
    let jobs = cli.jobs;
    match cli.command {
        Command::Verify(sel) => {
            let format = cli.format.unwrap_or(Format::Text);
            let ids = select(&sel, || verify::all_ids(&cat))?;
            let targets = ids.iter().map(|id| verify::resolve(&cat, id)).collect::<Result<Vec<_>, _>>()?;
            if !matches!(format, Format::Text | Format::Json) {
                return Err(CliError::Usage(format!("{format:?} output is not available for `verify`").to_lowercase()));
            }
            let entries = pool(jobs).install(|| targets.par_iter().map(|t| verify::run(&cat, t)).collect());
            let report = Report::new("verify", entries);
            Ok((emit(&report, format)?, report.passed))
        }
        Command::Degenerate {
            selection,
            probe,
            seed,
            emit_dot,
        } => {
            let format = cli.format.unwrap_or(Format::Text);
            if format == Format::Csv {
                return Err(CliError::Usage("csv output is not available for `degenerate`".into()));
            }
            let wants_diagram = selection.all || emit_dot.is_some() || format == Format::Dot;
            let selection = if selection.ids.is_empty() && wants_diagram {
                Selection { ids: vec![], all: true }
            } else {
                selection
            };
            let ids = select(&selection, || cat.rules.iter().map(|r| r.id.clone()).collect())?;
            let rules = ids.iter().map(|id| cat.rule(id)).collect::<Result<Vec<_>, _>>()?;
            let mut entries: Vec<_> = pool(jobs).install(|| rules.par_iter().map(|r| degenerate::run(&cat, r, probe, seed)).collect());
            let diagram = wants_diagram.then(|| diagram_closure(&cat));
            if let Some(d) = &diagram {
                entries.push(degenerate::diagram_entry(d));
            }
            let report = Report::new("degenerate", entries);
            let dot = match &diagram {
                Some(Ok(d)) => Some(d.to_dot()),
                _ => None,
            };
            if let (Some(path), Some(dot)) = (&emit_dot, &dot) {
                write_file(path, dot)?;
            }
            let text = match format {
                Format::Dot => dot.unwrap_or_default(),
                f => emit(&report, f)?,
            };
            Ok((text, report.passed))
        }
        Command::Integrate {
            family,
            alpha,
            params,
            y0,
            z0,
            t0,
            t1,
            tol,
            residual_tol,
            out,
        } => {
            let format = cli.format.unwrap_or(Format::Csv);
            if format == Format::Dot {
                return Err(CliError::Usage("dot output is not available for `integrate`".into()));
            }
            let mut values: ParamValues = params.into_iter().collect();
            if let Some(a) = alpha {
                values.insert("alpha".into(), a);
            }
            let req = integrate::Request {
                family,
                params: values,
                y0,
                z0,
                t0,
                t1,
                tol,
                residual_tol,
            };
            let outcome = integrate::run(&cat, req)?;
            let csv = outcome.trajectory.to_csv();
            if let Some(path) = &out {
                write_file(path, &csv)?;
            }
            let text = match format {
                Format::Json => to_sorted_json(&outcome),
                Format::Csv if out.is_none() => {
                    eprint!("{}", outcome.summary());
                    csv
                }
                _ => outcome.summary(),
            };
            Ok((text, outcome.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, passed)) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            ExitCode::from(if passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
