//! The `monopoles` command line: verification suites and data emission.
//!
//! Every subcommand reads an optional JSON [`RunConfig`], applies flag
//! overrides, validates, and writes JSON or CSV. Exit codes: 0 on success, 1
//! when a check fails or a computation breaks down, 2 for usage and
//! configuration errors.

pub mod config;
pub mod verify;

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{Module, RunConfig, ScatterMode};
pub use verify::{CheckRecord, VerificationReport};

use crate::error::Error;
use crate::hyperbolic::{self, PointUHS};
use crate::metric::{KahlerStructure, MFramePoint};
use crate::scattering::{self, EuclideanLine, LinearFit};
use crate::spectral::{self, SpectralDataC1};
use crate::symplectic::{self, OmegaRecord};
use crate::C64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{0}")]
    Library(#[from] Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Library(e) => match e {
                Error::Config(_)
                | Error::InvalidPoint(_)
                | Error::Precondition(_)
                | Error::Range(_)
                | Error::DegenerateRestriction
                | Error::Multiplicity(_) => 2,
                _ => 1,
            },
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "monopoles", version, about = "Singular monopole moduli: checks and data")]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Where to write the JSON document (default: stdout).
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,

    /// Where to write CSV rows (default: stdout).
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant suite and print a JSON report.
    Verify {
        #[arg(long, value_enum)]
        only: Option<Module>,
        /// Add a non-closed term of this size to the Dirac connection.
        #[arg(long)]
        broken_connection: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Curvature over a grid of points, one CSV row per point.
    Metric {
        #[arg(long)]
        step: Option<f64>,
    },
    /// Growth-exponent fits or spectral-line scans.
    Scatter {
        #[arg(long, value_enum)]
        mode: Option<ScatterMode>,
        #[arg(long, value_delimiter = ',')]
        impacts: Option<Vec<f64>>,
        #[arg(long)]
        center: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Lift the twistor line of a point and print its spectral data.
    Spectral {
        /// The point as `x,y,z`.
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<f64>>,
        #[arg(long)]
        phase: Option<f64>,
    },
    /// Residue against contour evaluation of the symplectic form.
    Symplectic {
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        max_sheets: Option<usize>,
    },
}

/// Loads the configuration and applies the global and subcommand flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.json.is_some() {
        cfg.output.json = cli.json.clone();
    }
    if cli.csv.is_some() {
        cfg.output.csv = cli.csv.clone();
    }
    match &cli.command {
        Command::Verify { only, broken_connection, samples } => {
            cfg.verify.only = only.or(cfg.verify.only);
            if let Some(b) = broken_connection {
                cfg.verify.broken_connection = *b;
            }
            if let Some(n) = samples {
                cfg.verify.random_samples = *n;
            }
        }
        Command::Metric { step } => {
            if let Some(s) = step {
                cfg.tolerances.metric_step = *s;
            }
        }
        Command::Scatter { mode, impacts, center, delta } => {
            if let Some(m) = mode {
                cfg.scatter.mode = *m;
            }
            if let Some(i) = impacts {
                cfg.scatter.impacts = i.clone();
            }
            if let Some(c) = center {
                cfg.scatter.center = *c;
            }
            if let Some(d) = delta {
                cfg.scatter.delta = *d;
            }
        }
        Command::Spectral { q, phase } => {
            if let Some(q) = q {
                cfg.spectral.q = q
                    .as_slice()
                    .try_into()
                    .map_err(|_| CliError::Usage(format!("--q takes x,y,z, got {} values", q.len())))?;
            }
            if let Some(p) = phase {
                cfg.spectral.phase = *p;
            }
        }
        Command::Symplectic { instances, max_sheets } => {
            if let Some(n) = instances {
                cfg.symplectic.instances = *n;
            }
            if let Some(k) = max_sheets {
                cfg.symplectic.max_sheets = *k;
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub theta: f64,
    pub scalar: f64,
    pub ricci: f64,
    pub weyl_sd: f64,
    pub weyl_asd: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSample {
    pub rows: Vec<MetricRow>,
    pub skipped: Vec<String>,
}

/// Curvature of the Kähler metric in the configured gauge over the grid; grid
/// points near a center, or where evaluation fails, are skipped and reported.
pub fn metric_sample(cfg: &RunConfig) -> Result<MetricSample, CliError> {
    let v = cfg.monopole.potential()?;
    let k = KahlerStructure::new(&v, cfg.metric.boundary());
    let step = cfg.tolerances.metric_step;
    let g = &cfg.metric;
    let mut grid = Vec::new();
    for &x in &g.x.values() {
        for &y in &g.y.values() {
            for &z in &g.z.values() {
                for &theta in &g.theta.values() {
                    grid.push(MFramePoint { x, y, z, theta });
                }
            }
        }
    }
    let results: Vec<Result<MetricRow, String>> = grid
        .par_iter()
        .map(|p| {
            let base = p.base();
            if let Some(c) = v.centers().iter().find(|c| hyperbolic::dist(c, &base) < g.exclusion) {
                return Err(format!("({}, {}, {}, {}) is within {} of the center {:?}", p.x, p.y, p.z, p.theta, g.exclusion, c.as_array()));
            }
            let r = k.curvature(p, step).map_err(|e| format!("({}, {}, {}, {}): {e}", p.x, p.y, p.z, p.theta))?;
            Ok(MetricRow {
                x: p.x,
                y: p.y,
                z: p.z,
                theta: p.theta,
                scalar: r.scalar,
                ricci: r.ricci_norm,
                weyl_sd: r.weyl_sd_norm,
                weyl_asd: r.weyl_asd_norm,
                step: r.step,
            })
        })
        .collect();
    let mut out = MetricSample { rows: Vec::new(), skipped: Vec::new() };
    for r in results {
        match r {
            Ok(row) => out.rows.push(row),
            Err(msg) => out.skipped.push(msg),
        }
    }
    Ok(out)
}

/// One CSV row of a scattering experiment; fields that do not apply are empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub px: Option<f64>,
    pub py: Option<f64>,
    pub pz: Option<f64>,
    pub dx: Option<f64>,
    pub dy: Option<f64>,
    pub dz: Option<f64>,
    pub impact: f64,
    pub log_norm: Option<f64>,
    pub indicator: Option<f64>,
    pub m_gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterSummary {
    pub seed: u64,
    pub mode: ScatterMode,
    pub fit: Option<LinearFit>,
    pub min_indicator: Option<f64>,
    pub max_m_gamma: Option<f64>,
    pub rows: usize,
}

pub fn scatter(cfg: &RunConfig) -> Result<(Vec<ScatterRow>, ScatterSummary), CliError> {
    let s = &cfg.scatter;
    let tol = cfg.tolerances.ode;
    match s.mode {
        ScatterMode::Growth => {
            if s.impacts.is_empty() {
                return Err(CliError::Usage("scatter: the family of impact parameters is empty".into()));
            }
            let v = cfg.monopole.potential()?;
            let fit = scattering::abelian_growth_exponent(&v, s.center, s.delta, &s.impacts, tol)?;
            let rows: Vec<ScatterRow> = fit
                .samples
                .iter()
                .map(|g| ScatterRow {
                    px: None,
                    py: None,
                    pz: None,
                    dx: None,
                    dy: None,
                    dz: None,
                    impact: g.impact,
                    log_norm: Some(g.log_norm),
                    indicator: None,
                    m_gamma: None,
                })
                .collect();
            let summary = ScatterSummary {
                seed: cfg.seed,
                mode: s.mode,
                fit: Some(fit.fit),
                min_indicator: None,
                max_m_gamma: None,
                rows: rows.len(),
            };
            Ok((rows, summary))
        }
        ScatterMode::Scan => {
            if s.lines.is_empty() {
                return Err(CliError::Usage("scatter: the family of lines is empty".into()));
            }
            let lines = s
                .lines
                .iter()
                .map(|l| EuclideanLine::new(l.through, l.direction))
                .collect::<Result<Vec<_>, _>>()?;
            let records = scattering::scan_lines(&lines, s.horizon, tol)?;
            let rows: Vec<ScatterRow> = records
                .iter()
                .map(|r| ScatterRow {
                    px: Some(r.line.point[0]),
                    py: Some(r.line.point[1]),
                    pz: Some(r.line.point[2]),
                    dx: Some(r.line.direction[0]),
                    dy: Some(r.line.direction[1]),
                    dz: Some(r.line.direction[2]),
                    impact: r.line.impact_parameter(),
                    log_norm: None,
                    indicator: Some(r.indicator),
                    m_gamma: r.m_gamma,
                })
                .collect();
            let summary = ScatterSummary {
                seed: cfg.seed,
                mode: s.mode,
                fit: None,
                min_indicator: records.iter().map(|r| r.indicator).reduce(f64::min),
                max_m_gamma: records.iter().filter_map(|r| r.m_gamma).reduce(f64::max),
                rows: rows.len(),
            };
            Ok((rows, summary))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub seed: u64,
    pub data: SpectralDataC1,
    pub product_residual: f64,
    pub reality_residual: f64,
    pub phase: Phase,
    pub divisor_disjoint: bool,
    pub divisor_matches: bool,
}

/// Tolerance on the `xy = p̃` residual below which `spectral` succeeds.
pub const SPECTRAL_RESIDUAL_TOL: f64 = 1e-10;

pub fn spectral(cfg: &RunConfig) -> Result<SpectralReport, CliError> {
    let v = cfg.monopole.potential()?;
    let [x, y, z] = cfg.spectral.q;
    let q = PointUHS::new(x, y, z)?;
    if let Some(c) = v.centers().iter().find(|c| hyperbolic::dist(c, &q) < 1e-9) {
        return Err(CliError::Usage(format!("spectral: q coincides with the center {:?}", c.as_array())));
    }
    let phase = C64::from_polar(1.0, cfg.spectral.phase);
    let data = spectral::lift_twistor_line(&q, &v, phase)?;
    let target = spectral::restricted_ptilde_squared_divisor(&data)?;
    Ok(SpectralReport {
        seed: cfg.seed,
        product_residual: data.product_residual(64),
        reality_residual: data.reality_residual(64),
        phase: Phase { re: data.factors.phase.re, im: data.factors.phase.im, modulus: data.factors.phase.norm() },
        divisor_disjoint: data.divisor_is_disjoint_from_conjugate(1e-6),
        divisor_matches: spectral::multisets_agree(&data.divisor_with_conjugate(), &target, 1e-3),
        data,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticReport {
    pub seed: u64,
    pub nodes: usize,
    pub tolerance: f64,
    pub max_discrepancy: f64,
    pub pass: bool,
    pub records: Vec<OmegaRecord>,
}

pub const SYMPLECTIC_TOL: f64 = 1e-8;

pub fn symplectic(cfg: &RunConfig) -> Result<SymplecticReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let nodes = cfg.tolerances.contour_nodes;
    let mut records = Vec::with_capacity(cfg.symplectic.instances);
    for j in 0..cfg.symplectic.instances {
        let (x1, x2, sheets) = verify::synthetic_instance(&mut rng, 1 + j % cfg.symplectic.max_sheets)?;
        records.push(symplectic::omega_record(&x1, &x2, &sheets, nodes)?);
    }
    let max_discrepancy = records
        .iter()
        .map(|r| r.discrepancy / (1.0 + r.residue.norm()))
        .fold(0.0, f64::max);
    Ok(SymplecticReport {
        seed: cfg.seed,
        nodes,
        tolerance: SYMPLECTIC_TOL,
        max_discrepancy,
        pass: max_discrepancy <= SYMPLECTIC_TOL,
        records,
    })
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => Ok(Box::new(File::create(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })?)),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn write_json<T: Serialize>(value: &T, out: Box<dyn Write>) -> Result<(), CliError> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|source| CliError::Io { path: "output".into(), source })?;
    Ok(())
}

fn write_csv<T: Serialize>(rows: &[T], out: Box<dyn Write>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| CliError::Io { path: "csv output".into(), source })?;
    Ok(())
}

/// Runs a parsed command line; `Ok(false)` means a check failed.
pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let cfg = resolve_config(cli)?;
    let json_out = cfg.output.json.as_deref();
    let csv_out = cfg.output.csv.as_deref();
    match cli.command {
        Command::Verify { .. } => {
            let report = verify::run(&cfg)?;
            for r in report.records.iter().filter(|r| !r.pass) {
                eprintln!("FAIL {} measured {:e} ({})", r.id, r.measured, r.anchor);
            }
            write_json(&report, open_output(json_out)?)?;
            Ok(report.all_passed())
        }
        Command::Metric { .. } => {
            let sample = metric_sample(&cfg)?;
            for s in &sample.skipped {
                eprintln!("warning: skipped grid point {s}");
            }
            write_csv(&sample.rows, open_output(csv_out)?)?;
            Ok(true)
        }
        Command::Scatter { .. } => {
            let (rows, summary) = scatter(&cfg)?;
            write_csv(&rows, open_output(csv_out)?)?;
            match (json_out, csv_out) {
                (Some(p), _) => write_json(&summary, open_output(Some(p))?)?,
                (None, Some(_)) => write_json(&summary, open_output(None)?)?,
                (None, None) => eprintln!("{}", serde_json::to_string(&summary)?),
            }
            Ok(true)
        }
        Command::Spectral { .. } => {
            let report = spectral(&cfg)?;
            let ok = report.product_residual < SPECTRAL_RESIDUAL_TOL && report.divisor_disjoint;
            write_json(&report, open_output(json_out)?)?;
            Ok(ok)
        }
        Command::Symplectic { .. } => {
            let report = symplectic(&cfg)?;
            write_json(&report, open_output(json_out)?)?;
            Ok(report.pass)
        }
    }
}

/// Parses `args`, runs, and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("monopoles").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_the_config() {
        let cli = parse(&["--seed", "9", "scatter", "--impacts", "0.01,0.001", "--delta", "0.4"]);
        let cfg = resolve_config(&cli).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.scatter.impacts, vec![0.01, 0.001]);
        assert_eq!(cfg.scatter.delta, 0.4);
    }

    #[test]
    fn empty_family_is_a_usage_error() {
        let mut cfg = RunConfig::default();
        cfg.scatter.impacts.clear();
        let err = scatter(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        cfg.scatter.mode = ScatterMode::Scan;
        cfg.scatter.lines.clear();
        assert_eq!(scatter(&cfg).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn spectral_at_a_center_is_rejected() {
        let mut cfg = RunConfig::default();
        cfg.spectral.q = cfg.monopole.centers[0];
        assert_eq!(spectral(&cfg).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn library_errors_map_to_exit_codes() {
        assert_eq!(CliError::from(Error::Config("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(Error::Integration("x".into())).exit_code(), 1);
    }
}
