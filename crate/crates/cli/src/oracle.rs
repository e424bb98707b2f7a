//! Exhaustive comparison of the fast paths against their oracles on small
//! random instances.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strongmax_core::covering::audit_selection;
use strongmax_core::maximal::{BRUTEFORCE_MAX_DIMS, BRUTEFORCE_MAX_LEVEL};
use strongmax_core::{
    maximal, maximal_bruteforce, partition_by_order, select_exp, select_half, Basis, DyadicRect, Grid, RectFamily,
};

use crate::config::ExperimentConfig;
use crate::sweep::trial_seed;
use crate::{CliError, CliResult};

/// Deviations above this fail the run.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

const ORACLE_MAX_LEVEL: u32 = 3;
const MAX_FAMILY: usize = 32;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleDiffReport {
    pub grids: usize,
    pub families: usize,
    pub selections: usize,
    /// `max |maximal - maximal_bruteforce|` over all cells, grids and `c`.
    pub max_maximal_deviation: f64,
    /// Largest criterion mismatch found by the selection audits.
    pub max_criterion_deviation: f64,
}

impl OracleDiffReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_maximal_deviation.max(self.max_criterion_deviation)
    }

    /// Fails when any deviation exceeds [`ORACLE_TOLERANCE`].
    pub fn check(&self) -> CliResult<()> {
        if self.max_deviation() > ORACLE_TOLERANCE {
            return Err(CliError::Violation(format!(
                "oracle deviation {:e} exceeds {ORACLE_TOLERANCE:e}",
                self.max_deviation()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for OracleDiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "grids {} max |maximal - bruteforce| {:e}", self.grids, self.max_maximal_deviation)?;
        write!(
            f,
            "families {} selections {} max criterion deviation {:e}",
            self.families, self.selections, self.max_criterion_deviation
        )
    }
}

/// Grid values are multiples of 1/16 in [-1, 1], so block sums and
/// averages are exact and the expected deviation is zero.
fn dyadic_grid(rng: &mut ChaCha8Rng, dims: usize, level: u32) -> CliResult<Grid> {
    Ok(Grid::from_fn(dims, level, |_| f64::from(rng.gen_range(-16i32..=16)) / 16.0)?)
}

fn random_family(rng: &mut ChaCha8Rng, dims: usize, level: u32) -> CliResult<RectFamily> {
    let size = rng.gen_range(1..=MAX_FAMILY);
    let rects = (0..size)
        .map(|_| {
            let pairs: Vec<(u32, usize)> = (0..dims)
                .map(|_| {
                    let k = rng.gen_range(0..=level);
                    (k, rng.gen_range(0..1usize << k))
                })
                .collect();
            DyadicRect::from_pairs(level, &pairs)
        })
        .collect::<strongmax_core::Result<Vec<_>>>()?;
    Ok(RectFamily::new(dims, level, rects)?)
}

/// For each level and trial, compares `maximal` with the dyadic brute force
/// for every complexity, and for `d >= 2` audits both selection rules on a
/// random family. Audit failures other than criterion drift are returned
/// as violations.
pub fn run_oracle_diff(cfg: &ExperimentConfig) -> CliResult<OracleDiffReport> {
    let dims = cfg.dims;
    if dims == 0 || dims > BRUTEFORCE_MAX_DIMS {
        return Err(CliError::Input(format!("oracle-diff supports d in [1, {BRUTEFORCE_MAX_DIMS}], got {dims}")));
    }
    let max_level = ORACLE_MAX_LEVEL.min(BRUTEFORCE_MAX_LEVEL);
    if let Some(&l) = cfg.levels.iter().find(|&&l| l > max_level) {
        return Err(CliError::Input(format!("oracle-diff supports L <= {max_level}, got {l}")));
    }

    let mut report = OracleDiffReport::default();
    for &level in &cfg.levels {
        for trial in 0..cfg.trials {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, trial));
            let f = dyadic_grid(&mut rng, dims, level)?;
            for c in 1..=dims {
                let fast = maximal(&f, c)?;
                let slow = maximal_bruteforce(&f, c, Basis::Dyadic)?;
                for (a, b) in fast.values().iter().zip(slow.values()) {
                    report.max_maximal_deviation = report.max_maximal_deviation.max((a - b).abs());
                }
            }
            report.grids += 1;

            if dims < 2 {
                continue;
            }
            let fam = random_family(&mut rng, dims, level)?;
            report.families += 1;
            for part in partition_by_order(&fam)?.values() {
                let mut runs = vec![select_half(part)?];
                for m in 2..=dims {
                    runs.push(select_exp(part, m)?);
                }
                for sel in &runs {
                    let audit = audit_selection(part, sel)?;
                    report.max_criterion_deviation = report.max_criterion_deviation.max(audit.max_criterion_deviation);
                    report.selections += 1;
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_trial_list_is_a_no_op() {
        let cfg = ExperimentConfig { dims: 2, levels: vec![2], trials: 0, ..Default::default() };
        let r = run_oracle_diff(&cfg).unwrap();
        assert_eq!(r, OracleDiffReport::default());
        assert!(r.check().is_ok());
    }

    #[test]
    fn exact_on_dyadic_values() {
        for dims in 1..=3 {
            let cfg = ExperimentConfig { dims, levels: vec![1, 2], trials: 5, seed: 3, ..Default::default() };
            let r = run_oracle_diff(&cfg).unwrap();
            assert_eq!(r.max_deviation(), 0.0);
            assert_eq!(r.grids, 10);
        }
    }

    #[test]
    fn rejects_large_instances() {
        let cfg = ExperimentConfig { dims: 2, levels: vec![4], trials: 1, ..Default::default() };
        assert!(matches!(run_oracle_diff(&cfg), Err(CliError::Input(_))));
        let cfg = ExperimentConfig { dims: 4, levels: vec![1], trials: 1, ..Default::default() };
        assert!(matches!(run_oracle_diff(&cfg), Err(CliError::Input(_))));
    }
}
