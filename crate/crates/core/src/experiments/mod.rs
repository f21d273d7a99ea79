//! Drivers that evaluate both sides of the counting inequalities over
//! parameter sweeps, fit log-log slopes and check tail bounds.
//!
//! Each driver returns an [`ExperimentReport`]: one [`ReportRow`] per
//! configuration and seed, plus fits, gates and notes. Rows whose family
//! violates the hypotheses of the inequality are kept and marked
//! [`Verdict::Flagged`]. Jobs run on the rayon pool and are collected in
//! configuration order, so reports do not depend on the worker count.

pub mod chernoff;
pub mod config;
pub mod drivers;
pub mod fit;
pub mod plank_sum;
pub mod report;
pub mod sharpness;

use std::time::Instant;

use thiserror::Error;

pub use chernoff::{chernoff_tails, ChernoffResult};
pub use config::ExperimentConfig;
pub use drivers::{run_chernoff, run_ct_bound, run_exact_ct, run_rectangle_bound};
pub use fit::{fit_loglog, FitError, LogLogFit};
pub use plank_sum::{run_plank_sum, run_plank_sum_check};
pub use report::{ExperimentReport, Gate, ReportRow, Verdict};
pub use sharpness::run_sharpness;

use crate::families::FamilyError;
use crate::incidence::IncidenceError;
use crate::planks::PlankError;

/// Experiment names, in run order.
pub const EXPERIMENTS: [&str; 6] = ["rectangle_bound", "ct_bound", "exact_ct", "plank_sum", "sharpness", "chernoff"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid [{section}] {field}: {reason}")]
    Invalid {
        section: &'static str,
        field: &'static str,
        reason: String,
    },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Incidence(#[from] IncidenceError),
    #[error(transparent)]
    Plank(#[from] PlankError),
    #[error(transparent)]
    Chernoff(#[from] chernoff::ChernoffError),
}

/// Runs every configured experiment in [`EXPERIMENTS`] order.
pub fn run_all(cfg: &ExperimentConfig) -> Result<Vec<ExperimentReport>, ExperimentError> {
    cfg.validate()?;
    let seed = cfg.run.seed;
    let mut out = Vec::new();
    if let Some(c) = &cfg.rectangle_bound {
        out.push(run_rectangle_bound(c)?);
    }
    if let Some(c) = &cfg.ct_bound {
        out.push(run_ct_bound(c)?);
    }
    if let Some(c) = &cfg.exact_ct {
        out.push(run_exact_ct(c)?);
    }
    if let Some(c) = &cfg.plank_sum {
        out.push(run_plank_sum(c, seed)?);
    }
    if let Some(c) = &cfg.sharpness {
        out.push(run_sharpness(c, seed)?);
    }
    if let Some(c) = &cfg.chernoff {
        out.push(run_chernoff(c, seed)?);
    }
    Ok(out)
}

/// Runs `f`, returning its value and the elapsed milliseconds.
pub(crate) fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_millis() as u64)
}
