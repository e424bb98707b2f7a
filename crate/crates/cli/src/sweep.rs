//! Seeded parameter sweeps producing CSV rows of ratio reports.

use std::collections::BTreeMap;

use rayon::prelude::*;
use strongmax_core::lab::{apstar_report, Inequality, Instance, Measurement, RatioReport, CSV_HEADER};

use crate::config::ExperimentConfig;
use crate::generators::generate;
use crate::{CliError, CliResult};

/// Seed of trial `trial` in a sweep seeded with `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ trial as u64
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepOutput {
    /// One row per measured (level, trial, inequality, p, t), in that order.
    pub rows: Vec<RatioReport>,
    /// Per (level, inequality, p, t) maxima; empty for single-trial sweeps.
    pub summary: Vec<RatioReport>,
    /// Measurements dropped for a non-positive denominator.
    pub skipped: usize,
}

impl SweepOutput {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in self.rows.iter().chain(&self.summary) {
            out.push_str(&r.to_csv_row());
            out.push('\n');
        }
        out
    }
}

fn options(values: &[f64], used: bool) -> Vec<Option<f64>> {
    if used {
        values.iter().copied().map(Some).collect()
    } else {
        vec![None]
    }
}

/// Evaluates every requested measurement for one generated instance.
pub fn measure_trial(cfg: &ExperimentConfig, level: u32, trial: usize) -> CliResult<Vec<Measurement>> {
    let seed = trial_seed(cfg.seed, trial);
    let (f, w) = generate(cfg.generator, cfg.dims, level, seed)?;
    let c = cfg.complexity_for(cfg.dims)?;
    let inequalities = cfg.inequalities_or_default();
    let needs_instance = inequalities.iter().any(|&i| i != Inequality::Apstar);
    let inst = if needs_instance { Some(Instance::new(f, w.clone(), c)?) } else { None };

    let mut out = Vec::new();
    for ineq in inequalities {
        for p in options(&cfg.p, ineq.uses_p()) {
            for t in options(&cfg.t, ineq.uses_t()) {
                let m = match (ineq, inst.as_ref()) {
                    (Inequality::Apstar, _) => apstar_report(&w, p.unwrap_or(2.0))?,
                    (Inequality::WeakFs, Some(i)) => i.weak_fs(t.unwrap_or(1.0), p.unwrap_or(2.0))?,
                    (Inequality::StrongFs, Some(i)) => i.strong_fs(p.unwrap_or(2.0))?,
                    (Inequality::StrongFsSingleWeight, Some(i)) => i.strong_fs_single_weight(p.unwrap_or(2.0))?,
                    (Inequality::Endpoint, Some(i)) => i.endpoint(t.unwrap_or(1.0))?,
                    (Inequality::LlogL2d, Some(i)) => i.llogl_2d(t.unwrap_or(1.0))?,
                    (_, None) => unreachable!("instance built whenever a ratio needs it"),
                };
                out.push(match m {
                    Measurement::Measured(r) => {
                        if !r.ratio.is_finite() || r.ratio < 0.0 {
                            return Err(CliError::Violation(format!(
                                "{} ratio {} at L = {level}, seed {seed}",
                                r.inequality, r.ratio
                            )));
                        }
                        Measurement::Measured(r.with_source(cfg.generator.name(), seed))
                    }
                    skipped => skipped,
                });
            }
        }
    }
    Ok(out)
}

/// Runs every (level, trial) pair in parallel. Results are collected in
/// job order, so the CSV does not depend on scheduling.
pub fn run_sweep(cfg: &ExperimentConfig) -> CliResult<SweepOutput> {
    cfg.validate_sweep()?;
    if cfg.trials == 0 {
        return Err(CliError::Input("trials must be at least 1".into()));
    }
    let jobs: Vec<(u32, usize)> =
        cfg.levels.iter().flat_map(|&l| (0..cfg.trials).map(move |t| (l, t))).collect();
    let results: Vec<Vec<Measurement>> =
        jobs.par_iter().map(|&(level, trial)| measure_trial(cfg, level, trial)).collect::<CliResult<_>>()?;

    let mut out = SweepOutput::default();
    for m in results.into_iter().flatten() {
        match m {
            Measurement::Measured(r) => out.rows.push(r),
            Measurement::Skipped { .. } => out.skipped += 1,
        }
    }
    if cfg.trials > 1 {
        out.summary = summarize(&out.rows);
    }
    Ok(out)
}

type CellKey = (u32, Inequality, Option<u64>, Option<u64>);

/// Maximum ratio per (level, inequality, p, t). Ties keep the earliest
/// trial. The summary row is tagged `<generator>:max` and carries the seed
/// of the maximising trial.
pub fn summarize(rows: &[RatioReport]) -> Vec<RatioReport> {
    let mut best: BTreeMap<CellKey, &RatioReport> = BTreeMap::new();
    for r in rows {
        let key = (r.level, r.inequality, r.p.map(f64::to_bits), r.t.map(f64::to_bits));
        match best.get(&key) {
            Some(b) if b.ratio >= r.ratio => {}
            _ => {
                best.insert(key, r);
            }
        }
    }
    let mut out: Vec<RatioReport> = best
        .into_values()
        .map(|r| {
            let mut s = r.clone();
            s.generator = format!("{}:max", r.generator);
            s
        })
        .collect();
    out.sort_by(|a, b| {
        (a.level, a.inequality)
            .cmp(&(b.level, b.inequality))
            .then(a.p.partial_cmp(&b.p).unwrap())
            .then(a.t.partial_cmp(&b.t).unwrap())
    });
    out
}
