//! The randomized construction: occupancy of its `ρ`-cubes and the richness
//! of every `1 × R^{1/2} × R` plank, seed by seed.

use rayon::prelude::*;

use super::config::SharpnessConfig;
use super::report::{ExperimentReport, Gate, ReportRow, Verdict};
use super::{timed, ExperimentError};
use crate::families::{cube_occupancy, gen_random_wellspaced};
use crate::geometry::Aabb3;
use crate::io::family_hash;
use crate::planks::{enumerate_incomparable, mu_histogram, PlankCollection};

#[derive(Debug, Clone, PartialEq)]
pub struct SeedOutcome {
    pub seed: u64,
    pub size: usize,
    pub max_occupancy: usize,
    pub occupancy_ok: bool,
    /// Planks whose richness falls outside the window.
    pub violations: u64,
    /// Planks whose richness falls inside the window.
    pub in_window: u64,
    pub min_richness: usize,
    pub max_richness: usize,
    pub family_hash: String,
}

impl SeedOutcome {
    pub fn passed(&self) -> bool {
        self.occupancy_ok && self.violations == 0
    }
}

/// Expected richness `100⁻³ R^{3/2} p` of a plank.
pub fn expected_richness(r: f64, rho: f64, eps: f64) -> f64 {
    let p = r.powf(eps) / rho.powi(3);
    1e-6 * r.powf(1.5) * p
}

/// Generates the family for `seed` and checks it against `c`.
pub fn sharpness_seed(cfg: &SharpnessConfig, seed: u64, c: &PlankCollection) -> Result<SeedOutcome, ExperimentError> {
    let x = gen_random_wellspaced(cfg.r, cfg.rho, cfg.eps, seed)?;
    let occ = cube_occupancy(&x, cfg.rho)?;
    let m = expected_richness(cfg.r, cfg.rho, cfg.eps);
    let (lo, hi) = (m / 10.0, 10.0 * m);
    let inside = |n: usize| n as f64 >= lo && n as f64 <= hi;
    let hist = mu_histogram(c, &x, 1.0);
    let zero = c.len() - hist.rich_planks();
    let mut violations = 0;
    let mut in_window = 0;
    for (&n, &count) in hist.counts.iter().chain([(&0usize, &zero)]) {
        if inside(n) {
            in_window += count;
        } else {
            violations += count;
        }
    }
    Ok(SeedOutcome {
        seed,
        size: x.len(),
        max_occupancy: occ.max_count,
        occupancy_ok: occ.max_count as f64 <= 10.0 * cfg.r.powf(cfg.eps),
        violations,
        in_window,
        min_richness: if zero > 0 { 0 } else { hist.min().unwrap_or(0) },
        max_richness: hist.max().unwrap_or(0),
        family_hash: family_hash(&x),
    })
}

pub fn run_sharpness(cfg: &SharpnessConfig, seed: u64) -> Result<ExperimentReport, ExperimentError> {
    const NAME: &str = "sharpness";
    let mut rep = ExperimentReport::new(NAME);
    let planks = enumerate_incomparable(cfg.r, cfg.r, cfg.k, Aabb3::cube(0.0, cfg.r))?;
    let total = planks.len();
    let m = expected_richness(cfg.r, cfg.rho, cfg.eps);
    let seeds: Vec<u64> = (0..cfg.seeds as u64).map(|i| seed.wrapping_add(i)).collect();
    let results: Vec<_> = seeds
        .par_iter()
        .map(|&s| timed(|| sharpness_seed(cfg, s, &planks)))
        .collect();
    let mut passed = 0;
    let mut ratios = Vec::new();
    let mut spread_ok = true;
    for (res, ms) in results {
        let o = res?;
        // μ^{4/3}|𝒫_μ| with μ = m and 𝒫_μ the planks inside the window.
        let lhs = m.powf(4.0 / 3.0) * o.in_window as f64;
        let rhs = (o.size as f64).powf(4.0 / 3.0);
        let mut row = ReportRow::new(NAME).sides(lhs, rhs);
        row.r = Some(cfg.r);
        row.rho = Some(cfg.rho);
        row.eps = Some(cfg.eps);
        row.k = Some(cfg.k);
        row.seed = Some(o.seed);
        row.mu_hat = Some(m);
        row.pass = Verdict::from_bool(o.passed());
        row.runtime_ms = ms;
        if o.size > 0 {
            ratios.push(row.ratio);
        }
        if o.passed() {
            passed += 1;
            if o.max_richness as f64 > 100.0 * o.min_richness.max(1) as f64 || o.min_richness == 0 {
                spread_ok = false;
            }
        }
        rep.notes.push(format!(
            "seed {}: |X|={} max cube occupancy {} ({}), richness in [{}, {}], {} planks outside the window",
            o.seed,
            o.size,
            o.max_occupancy,
            if o.occupancy_ok { "ok" } else { "too high" },
            o.min_richness,
            o.max_richness,
            o.violations
        ));
        rep.push(row, o.family_hash.clone());
    }
    let rate = passed as f64 / seeds.len() as f64;
    let aggregate = if ratios.is_empty() {
        0.0
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    rep.values.insert("success_rate".into(), rate);
    rep.values.insert("expected_richness".into(), m);
    rep.values.insert("planks".into(), total as f64);
    rep.values.insert("aggregate_ratio".into(), aggregate);
    if m * 10.0 < 1.0 {
        rep.notes.push(format!(
            "richness window [{}, {}] contains no positive integer at these parameters",
            m / 10.0,
            m * 10.0
        ));
    }
    rep.gates.push(Gate::new(
        "success_rate",
        rate >= cfg.success_rate,
        format!("{passed} of {} seeds pass both gates", seeds.len()),
    ));
    rep.gates.push(Gate::new(
        "aggregate_ratio",
        aggregate >= cfg.aggregate_min,
        format!("mean mu^(4/3)|P_mu|/|X|^(4/3) = {aggregate}"),
    ));
    if passed > 0 {
        rep.gates.push(Gate::new(
            "single_bucket",
            spread_ok,
            "richness max/min within 100 on passing seeds",
        ));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_richness_formula() {
        let m = expected_richness(1024.0, 32.0, 0.2);
        assert!((m - 1e-6 * 32768.0 * 4.0 / 32768.0).abs() < 1e-15);
    }

    #[test]
    fn small_run_is_reproducible() {
        let cfg = SharpnessConfig {
            r: 64.0,
            rho: 8.0,
            eps: 0.1,
            seeds: 3,
            ..SharpnessConfig::default()
        };
        let a = run_sharpness(&cfg, 5).unwrap();
        let b = run_sharpness(&cfg, 5).unwrap();
        let strip = |r: &ExperimentReport| {
            r.rows
                .iter()
                .map(|row| ReportRow { runtime_ms: 0, ..row.clone() })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(a.rows.len(), 3);
    }

    #[test]
    fn rejects_rho_above_sqrt_r() {
        let cfg = SharpnessConfig {
            rho: 33.0,
            ..SharpnessConfig::default()
        };
        assert!(run_sharpness(&cfg, 0).is_err());
    }
}
