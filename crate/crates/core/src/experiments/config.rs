//! Experiment configuration, read from TOML with one table per experiment.

use serde::{Deserialize, Serialize};

use super::ExperimentError;

fn invalid(section: &'static str, field: &'static str, reason: impl Into<String>) -> ExperimentError {
    ExperimentError::Invalid {
        section,
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub run: RunConfig,
    pub rectangle_bound: Option<RectangleBoundConfig>,
    pub ct_bound: Option<CtBoundConfig>,
    pub exact_ct: Option<ExactCtConfig>,
    pub plank_sum: Option<PlankSumConfig>,
    pub sharpness: Option<SharpnessConfig>,
    pub chernoff: Option<ChernoffConfig>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Base seed; job `i` of a seeded experiment uses `seed + i`.
    #[serde(default)]
    pub seed: u64,
    /// Report path prefix: `<output>.csv` and `<output>.json`.
    pub output: Option<String>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RectangleBoundConfig {
    #[serde(alias = "R")]
    pub r: Vec<f64>,
    /// Separation law `ρ = R^rho_exponent`.
    pub rho_exponent: f64,
    #[serde(alias = "K")]
    pub k: Vec<f64>,
    pub slope_max: f64,
    /// Size of the clamshell control run at the smallest `R`; 0 disables it.
    pub control_n: usize,
}

impl Default for RectangleBoundConfig {
    fn default() -> Self {
        Self {
            r: vec![256.0, 512.0, 1024.0, 2048.0, 4096.0],
            rho_exponent: 0.5,
            k: vec![2.0],
            slope_max: 0.35,
            control_n: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CtBoundConfig {
    pub delta: Vec<f64>,
    pub rho: Vec<f64>,
    /// Families up to this size are also counted by brute force.
    pub oracle_max: usize,
}

impl Default for CtBoundConfig {
    fn default() -> Self {
        Self {
            delta: vec![1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
            rho: vec![4.0],
            oracle_max: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExactCtConfig {
    pub n: Vec<usize>,
    /// Compare against the quadratic integer scan.
    pub oracle: bool,
    /// Size of the integer clamshell control; 0 disables it.
    pub control_n: usize,
}

impl Default for ExactCtConfig {
    fn default() -> Self {
        Self {
            n: vec![4, 8, 16, 32],
            oracle: true,
            control_n: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlankSumConfig {
    pub families: usize,
    pub size: usize,
    pub delta: f64,
    #[serde(alias = "A")]
    pub a: f64,
    #[serde(alias = "K")]
    pub k: f64,
    /// Frozen regression constant for `LHS / RHS`.
    pub ratio_max: f64,
}

impl Default for PlankSumConfig {
    fn default() -> Self {
        Self {
            families: 50,
            size: 1000,
            delta: 0.01,
            a: 2.0,
            k: 2.0,
            ratio_max: super::plank_sum::RATIO_BASELINE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SharpnessConfig {
    #[serde(alias = "R")]
    pub r: f64,
    pub rho: f64,
    pub eps: f64,
    pub seeds: usize,
    #[serde(alias = "K")]
    pub k: f64,
    pub success_rate: f64,
    pub aggregate_min: f64,
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        Self {
            r: 1024.0,
            rho: 32.0,
            eps: 0.2,
            seeds: 20,
            k: 2.0,
            success_rate: 0.9,
            aggregate_min: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChernoffConfig {
    pub n: Vec<u64>,
    pub p: Vec<f64>,
    pub trials: u64,
    /// Grid points with `np` below this are skipped.
    pub min_np: f64,
}

impl Default for ChernoffConfig {
    fn default() -> Self {
        Self {
            n: vec![100, 1000, 10_000],
            p: vec![0.01, 0.05, 0.1],
            trials: 1_000_000,
            min_np: 5.0,
        }
    }
}

fn nonempty<T>(v: &[T], section: &'static str, field: &'static str) -> Result<(), ExperimentError> {
    if v.is_empty() {
        Err(invalid(section, field, "grid is empty"))
    } else {
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every experiment with its default parameters.
    pub fn all_defaults() -> Self {
        Self {
            run: RunConfig::default(),
            rectangle_bound: Some(RectangleBoundConfig::default()),
            ct_bound: Some(CtBoundConfig::default()),
            exact_ct: Some(ExactCtConfig::default()),
            plank_sum: Some(PlankSumConfig::default()),
            sharpness: Some(SharpnessConfig::default()),
            chernoff: Some(ChernoffConfig::default()),
        }
    }

    /// Keeps only the named experiments.
    pub fn restrict(&mut self, names: &[String]) -> Result<(), ExperimentError> {
        for n in names {
            if !super::EXPERIMENTS.contains(&n.as_str()) {
                return Err(invalid("run", "only", format!("unknown experiment {n:?}")));
            }
        }
        let keep = |name: &str| names.iter().any(|n| n == name);
        if !keep("rectangle_bound") {
            self.rectangle_bound = None;
        }
        if !keep("ct_bound") {
            self.ct_bound = None;
        }
        if !keep("exact_ct") {
            self.exact_ct = None;
        }
        if !keep("plank_sum") {
            self.plank_sum = None;
        }
        if !keep("sharpness") {
            self.sharpness = None;
        }
        if !keep("chernoff") {
            self.chernoff = None;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if let Some(w) = self.run.workers {
            if w == 0 {
                return Err(invalid("run", "workers", "must be at least 1"));
            }
        }
        if let Some(c) = &self.rectangle_bound {
            const S: &str = "rectangle_bound";
            nonempty(&c.r, S, "R")?;
            nonempty(&c.k, S, "K")?;
            if c.r.iter().any(|&r| !(r >= 4.0 && r.is_finite())) {
                return Err(invalid(S, "R", "every R must be finite and at least 4"));
            }
            if !(c.rho_exponent > 0.0 && c.rho_exponent <= 1.0) {
                return Err(invalid(S, "rho_exponent", "must lie in (0, 1]"));
            }
            if c.k.iter().any(|&k| !(k >= 1.0 && k.is_finite())) {
                return Err(invalid(S, "K", "every K must be at least 1"));
            }
        }
        if let Some(c) = &self.ct_bound {
            const S: &str = "ct_bound";
            nonempty(&c.delta, S, "delta")?;
            nonempty(&c.rho, S, "rho")?;
            if c.delta.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
                return Err(invalid(S, "delta", "every delta must lie in (0, 1)"));
            }
            for &d in &c.delta {
                for &rho in &c.rho {
                    if !(rho >= 1.0 && rho * d <= 1.0) {
                        return Err(invalid(S, "rho", format!("need 1 <= rho <= 1/delta, got rho={rho} delta={d}")));
                    }
                }
            }
        }
        if let Some(c) = &self.exact_ct {
            nonempty(&c.n, "exact_ct", "n")?;
            if c.n.iter().any(|&n| n < 2) {
                return Err(invalid("exact_ct", "n", "every n must be at least 2"));
            }
        }
        if let Some(c) = &self.plank_sum {
            const S: &str = "plank_sum";
            if c.families == 0 {
                return Err(invalid(S, "families", "must be at least 1"));
            }
            if c.size < 2 {
                return Err(invalid(S, "size", "must be at least 2"));
            }
            if !(c.delta > 0.0 && c.delta < 0.5) {
                return Err(invalid(S, "delta", "must lie in (0, 1/2)"));
            }
            if !(c.a > 1.0) {
                return Err(invalid(S, "A", "must exceed 1"));
            }
            if !(c.k >= 1.0) {
                return Err(invalid(S, "K", "must be at least 1"));
            }
        }
        if let Some(c) = &self.sharpness {
            const S: &str = "sharpness";
            if c.seeds == 0 {
                return Err(invalid(S, "seeds", "must be at least 1"));
            }
            if !(c.r >= 10.0) {
                return Err(invalid(S, "R", "must be at least 10"));
            }
            if !(c.eps >= 0.0) {
                return Err(invalid(S, "eps", "must be nonnegative"));
            }
            if !(c.rho <= c.r.sqrt()) {
                return Err(invalid(S, "rho", "must be at most sqrt(R)"));
            }
            if !(c.rho >= c.r.powf(c.eps)) {
                return Err(invalid(S, "rho", "must be at least R^eps"));
            }
            if !(c.k >= 1.0) {
                return Err(invalid(S, "K", "must be at least 1"));
            }
        }
        if let Some(c) = &self.chernoff {
            const S: &str = "chernoff";
            nonempty(&c.n, S, "n")?;
            nonempty(&c.p, S, "p")?;
            if c.n.contains(&0) {
                return Err(invalid(S, "n", "every n must be at least 1"));
            }
            if c.p.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
                return Err(invalid(S, "p", "every p must lie in (0, 1)"));
            }
            if c.trials == 0 {
                return Err(invalid(S, "trials", "must be at least 1"));
            }
        }
        Ok(())
    }

    /// Hash of the canonical serialization, written into every report.
    /// Worker count and output path do not affect results and are excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.run.workers = None;
        c.run.output = None;
        let canon = serde_json::to_string(&c).expect("config serializes");
        crate::io::short_hash(canon.as_bytes())
    }
}
