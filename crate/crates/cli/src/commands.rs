//! File-level operations behind the `maximal`, `select` and `ratios`
//! subcommands. Each takes text and returns text; the binary does the I/O.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use strongmax_core::lab::{apstar_report, Inequality, Instance, Measurement, CSV_HEADER};
use strongmax_core::{
    check_covering_exp, check_covering_half, maximal, partition_by_order, select_exp, select_half, Grid,
    Procedure, RectFamily,
};

use crate::config::ExperimentConfig;
use crate::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or to stdout when `None`.
pub fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `M_c f` of a grid file, in the same format.
pub fn maximal_text(grid: &str, complexity: Option<usize>) -> CliResult<String> {
    let f = Grid::from_text(grid)?;
    let c = complexity.unwrap_or(f.dims());
    Ok(maximal(&f, c)?.to_text())
}

/// Selected rectangles as a family file plus a per-class log.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectOutput {
    pub family: String,
    pub log: String,
}

/// Splits a family by axis order, runs the chosen rule on each class and
/// checks the covering bound at complexity `m` (default `d`).
pub fn select_text(family: &str, procedure: Procedure, m: Option<usize>) -> CliResult<SelectOutput> {
    let fam = RectFamily::from_text(family)?;
    let dims = fam.dims();
    let m = m.unwrap_or(dims);
    if procedure == Procedure::Exp && (m < 2 || m > dims) {
        return Err(CliError::Input(format!("the exp rule needs 2 <= m <= d, got m = {m}, d = {dims}")));
    }
    let mut chosen = Vec::new();
    let mut log = String::new();
    for (order, part) in partition_by_order(&fam)? {
        let sel = match procedure {
            Procedure::Half => select_half(&part)?,
            Procedure::Exp => select_exp(&part, m)?,
        };
        let _ = write!(log, "order {:?}: {} candidates, {} selected", order.0, part.len(), sel.len());
        if (2..=dims).contains(&m) {
            let chk = match procedure {
                Procedure::Half => check_covering_half(&part, &sel, m)?,
                Procedure::Exp => check_covering_exp(&part, &sel, m)?,
            };
            let _ = write!(log, ", covering {} (min ratio {:.6})", if chk.holds { "holds" } else { "fails" }, chk.min_ratio);
            if let Some(w) = chk.witness {
                let _ = write!(log, " at {w:?}");
            }
        }
        log.push('\n');
        chosen.extend(sel.selected().iter().cloned());
    }
    let out = RectFamily::new(dims, fam.level(), chosen)?;
    Ok(SelectOutput { family: out.to_text(), log })
}

/// Ratio CSV for a fixed `(f, w)`. Without a weight file `w = 1`, which
/// only suits the endpoint ratio; the others reject it.
pub fn ratios_csv(f_text: &str, w_text: Option<&str>, cfg: &ExperimentConfig) -> CliResult<String> {
    let f = Grid::from_text(f_text)?;
    let inequalities = if cfg.inequalities.is_empty() {
        vec![Inequality::Endpoint]
    } else {
        cfg.inequalities.clone()
    };
    let w = match w_text {
        Some(t) => Grid::from_text(t)?,
        None => {
            if let Some(i) = inequalities.iter().find(|&&i| i != Inequality::Endpoint) {
                return Err(CliError::Input(format!("{i} needs a weight file")));
            }
            Grid::constant(f.dims(), f.level(), 1.0)?
        }
    };
    let c = cfg.complexity_for(f.dims())?;
    let inst = Instance::new(f, w.clone(), c)?;

    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for ineq in inequalities {
        let ps: Vec<Option<f64>> = if ineq.uses_p() { cfg.p.iter().copied().map(Some).collect() } else { vec![None] };
        let ts: Vec<Option<f64>> = if ineq.uses_t() { cfg.t.iter().copied().map(Some).collect() } else { vec![None] };
        for &p in &ps {
            for &t in &ts {
                let (p, t) = (p.unwrap_or(2.0), t.unwrap_or(1.0));
                let m = match ineq {
                    Inequality::WeakFs => inst.weak_fs(t, p)?,
                    Inequality::StrongFs => inst.strong_fs(p)?,
                    Inequality::StrongFsSingleWeight => inst.strong_fs_single_weight(p)?,
                    Inequality::Endpoint => inst.endpoint(t)?,
                    Inequality::LlogL2d => inst.llogl_2d(t)?,
                    Inequality::Apstar => apstar_report(&w, p)?,
                };
                match m {
                    Measurement::Measured(r) => {
                        out.push_str(&r.with_source("file", 0).to_csv_row());
                        out.push('\n');
                    }
                    Measurement::Skipped { inequality, reason } => eprintln!("skipped {inequality}: {reason}"),
                }
            }
        }
    }
    Ok(out)
}
