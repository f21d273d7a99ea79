//! Command-line front end. Exit codes: 0 success, 1 a gate failed, 2 the
//! input or parameters were invalid.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::experiments::report::{read_csv, summary_json, to_csv, plot_series};
use crate::experiments::{run_all, ExperimentConfig, ExperimentError};
use crate::families::{
    gen_clamshell, gen_clamshell_integer, gen_integer_lattice, gen_maximal_separated, gen_random_wellspaced,
    gen_uniform, FamilyError, GridBox,
};
use crate::geometry::Aabb3;
use crate::incidence::{
    bin_dyadic, count_ct0_bruteforce, count_ct0_exact, count_ct0_tolerance, count_ct_delta_bruteforce,
    count_ct_delta_hashed, IncidenceError,
};
use crate::io::{family_hash, read_family, short_hash, write_collection, write_family, write_pairs, write_richness, FormatError};
use crate::planks::{enumerate_incomparable, mu_histogram, verify_incomparable, PlankError};

pub const SEED_ENV: &str = "TANGENCY_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Incidence(#[from] IncidenceError),
    #[error(transparent)]
    Plank(#[from] PlankError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("gates failed: {0}")]
    GateFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::GateFailed(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tangency", version, about = "Circle tangency counting and lightplank experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Wellspaced,
    Grid,
    Clamshell,
    ClamshellInt,
    Lattice,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoxKind {
    Cube,
    Annular,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a circle family file.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long = "R")]
        r: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Size parameter of clamshell, lattice and uniform families.
        #[arg(long = "N", alias = "n")]
        n: Option<usize>,
        #[arg(long = "box", value_enum, default_value = "cube")]
        bbox: BoxKind,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Count near-tangent or exactly tangent pairs of a family file.
    Count {
        family: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
        /// Exact tangency (integer arithmetic when the family is integral).
        #[arg(long)]
        exact: bool,
        /// Add dyadic distance buckets.
        #[arg(long)]
        bin: bool,
        /// Use the quadratic reference scan.
        #[arg(long)]
        oracle: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Enumerate incomparable 1 x sqrt(S) x S planks, optionally with richness.
    Planks {
        #[arg(long = "R")]
        r: f64,
        #[arg(long = "S")]
        s: Option<f64>,
        #[arg(long = "K", default_value_t = 2.0)]
        k: f64,
        #[arg(long = "box", value_enum, default_value = "cube")]
        bbox: BoxKind,
        /// Family whose richness histogram is written instead of the planks.
        #[arg(long)]
        family: Option<PathBuf>,
        /// Check pairwise incomparability exhaustively.
        #[arg(long)]
        verify: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the experiments of a TOML config.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated experiment names.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Report prefix; writes `<prefix>.csv` and `<prefix>.json`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Turn a report CSV into `log2(R) log2(ratio)` series files.
    Plotdata {
        report: PathBuf,
        /// JSON summary to check the CSV against; defaults to the sibling `.json`.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
}

fn need<T>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Invalid(format!("missing required parameter {name}")))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(
    kind: Kind,
    r: Option<f64>,
    rho: Option<f64>,
    eps: Option<f64>,
    seed: Option<u64>,
    n: Option<usize>,
    bbox: BoxKind,
    output: &Option<PathBuf>,
) -> Result<(), CliError> {
    let fam = match kind {
        Kind::Wellspaced => gen_random_wellspaced(need(r, "R")?, need(rho, "rho")?, need(eps, "eps")?, seed.unwrap_or(0))?,
        Kind::Grid => {
            let layout = match bbox {
                BoxKind::Cube => GridBox::Cube,
                BoxKind::Annular => GridBox::Annular,
            };
            gen_maximal_separated(need(r, "R")?, need(rho, "rho")?, layout)?
        }
        Kind::Clamshell => gen_clamshell(need(n, "N")?)?,
        Kind::ClamshellInt => gen_clamshell_integer(need(n, "N")?)?,
        Kind::Lattice => gen_integer_lattice(need(n, "N")?)?,
        Kind::Uniform => gen_uniform(need(n, "N")?, seed.unwrap_or(0))?,
    };
    emit(output, &write_family(&fam))
}

fn cmd_count(
    family: &Path,
    delta: Option<f64>,
    exact: bool,
    bin: bool,
    oracle: bool,
    output: &Option<PathBuf>,
) -> Result<(), CliError> {
    let x = read_family(&read(family)?)?;
    let mut set = if exact {
        match (x.is_integer(), oracle) {
            (true, false) => count_ct0_exact(&x)?,
            (true, true) => count_ct0_bruteforce(&x)?,
            (false, _) => count_ct0_tolerance(&x, delta)?,
        }
    } else {
        let d = need(delta, "delta")?;
        if oracle {
            count_ct_delta_bruteforce(&x, d)?
        } else {
            count_ct_delta_hashed(&x, d)?
        }
    };
    if bin && set.by_distance.is_none() {
        set = bin_dyadic(&set, &x)?;
    }
    if !bin {
        set.by_distance = None;
    }
    if let Some(p) = output {
        write(p, &write_pairs(&set, &x))?;
    }
    println!("|X|={} |CT_delta|={} delta={}", x.len(), set.len(), set.delta);
    Ok(())
}

fn box_for(kind: BoxKind, r: f64) -> Aabb3 {
    match kind {
        BoxKind::Cube => Aabb3::cube(0.0, r),
        BoxKind::Annular => Aabb3::annular(r),
    }
}

fn cmd_planks(
    r: f64,
    s: Option<f64>,
    k: f64,
    bbox: BoxKind,
    family: &Option<PathBuf>,
    verify: bool,
    output: &Option<PathBuf>,
) -> Result<(), CliError> {
    let fam = family.as_deref().map(|p| read(p).and_then(|t| Ok(read_family(&t)?))).transpose()?;
    let region = fam.as_ref().map_or(box_for(bbox, r), |f| f.bbox());
    let c = enumerate_incomparable(r, s.unwrap_or(r), k, region)?;
    let mut summary = format!("|P|={} maximal={}", c.len(), c.is_maximal());
    if verify {
        match verify_incomparable(&c) {
            Ok(stats) => summary.push_str(&format!(" verified_pairs={}", stats.tested_pairs)),
            Err((p, q)) => {
                return Err(CliError::GateFailed(format!(
                    "comparable planks at {:?} and {:?}",
                    p.center, q.center
                )))
            }
        }
    }
    match &fam {
        Some(x) => {
            let hist = mu_histogram(&c, x, 1.0);
            summary.push_str(&format!(" rich={} max_richness={}", hist.rich_planks(), hist.max().unwrap_or(0)));
            emit(output, &write_richness(&hist, &family_hash(x)))?;
        }
        None => {
            if output.is_some() {
                emit(output, &write_collection(&c))?;
            }
        }
    }
    if output.is_some() || fam.is_none() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_experiment(
    config: &Option<PathBuf>,
    only: &[String],
    workers: Option<usize>,
    seed: Option<u64>,
    output: &Option<PathBuf>,
) -> Result<(), CliError> {
    let mut cfg = match config {
        Some(p) => ExperimentConfig::from_toml(&read(p)?)?,
        None => ExperimentConfig::all_defaults(),
    };
    if let Ok(v) = std::env::var(SEED_ENV) {
        cfg.run.seed = v
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("{SEED_ENV} must be an unsigned integer, got {v:?}")))?;
    }
    if let Some(s) = seed {
        cfg.run.seed = s;
    }
    if workers.is_some() {
        cfg.run.workers = workers;
    }
    if !only.is_empty() {
        cfg.restrict(only)?;
    }
    cfg.validate()?;
    let prefix = output
        .clone()
        .or_else(|| cfg.run.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("report"));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Invalid(format!("workers: {e}")))?;
    let reports = pool.install(|| run_all(&cfg))?;
    let hash = cfg.hash();
    let csv = to_csv(&reports, &hash);
    let json = summary_json(&reports, &hash, &csv);
    write(&prefix.with_extension("csv"), &csv)?;
    write(
        &prefix.with_extension("json"),
        &(serde_json::to_string_pretty(&json).expect("summary serializes") + "\n"),
    )?;
    let mut failed = Vec::new();
    for rep in &reports {
        for g in &rep.gates {
            println!("{} {} {}: {}", rep.experiment, if g.passed { "pass" } else { "FAIL" }, g.name, g.detail);
            if !g.passed {
                failed.push(format!("{}/{}", rep.experiment, g.name));
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::GateFailed(failed.join(", ")))
    }
}

fn cmd_plotdata(report: &Path, summary: &Option<PathBuf>, output: &Path) -> Result<(), CliError> {
    let csv = read(report)?;
    let (config_hash, rows) = read_csv(&csv)?;
    let csv_hash = short_hash(csv.as_bytes());
    let summary_path = summary.clone().unwrap_or_else(|| report.with_extension("json"));
    if summary.is_some() || summary_path.exists() {
        let js: serde_json::Value = serde_json::from_str(&read(&summary_path)?)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", summary_path.display())))?;
        if js["csv_hash"].as_str() != Some(csv_hash.as_str()) {
            return Err(CliError::Invalid(format!(
                "summary {} does not describe this report (csv hash {csv_hash})",
                summary_path.display()
            )));
        }
        if config_hash.is_some() && js["config_hash"].as_str() != config_hash.as_deref() {
            return Err(CliError::Invalid("config hash differs between report and summary".into()));
        }
    }
    let series = plot_series(&rows);
    if !series.is_empty() {
        fs::create_dir_all(output).map_err(|source| CliError::Io {
            path: output.to_path_buf(),
            source,
        })?;
    }
    for (name, pts) in &series {
        let mut text = format!("# source_hash={csv_hash}\n# log2(R) log2(ratio)\n");
        for (x, y) in pts {
            text.push_str(&format!("{x} {y}\n"));
        }
        write(&output.join(format!("{name}.dat")), &text)?;
    }
    println!("series={}", series.len());
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate {
            kind,
            r,
            rho,
            eps,
            seed,
            n,
            bbox,
            output,
        } => cmd_generate(*kind, *r, *rho, *eps, *seed, *n, *bbox, output),
        Command::Count {
            family,
            delta,
            exact,
            bin,
            oracle,
            output,
        } => cmd_count(family, *delta, *exact, *bin, *oracle, output),
        Command::Planks {
            r,
            s,
            k,
            bbox,
            family,
            verify,
            output,
        } => cmd_planks(*r, *s, *k, *bbox, family, *verify, output),
        Command::Experiment {
            config,
            only,
            workers,
            seed,
            output,
        } => cmd_experiment(config, only, *workers, *seed, output),
        Command::Plotdata {
            report,
            summary,
            output,
        } => cmd_plotdata(report, summary, output),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
