//! Experiment parameters from `key=value` text and command-line overrides.

use std::path::PathBuf;

use strongmax_core::lab::Inequality;
use strongmax_core::Procedure;

use crate::generators::Generator;
use crate::{CliError, CliResult};

/// Every parameter a subcommand may read. Values are applied in order:
/// defaults, then a config file, then flags.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dims: usize,
    pub levels: Vec<u32>,
    /// `None` means "use the grid dimension".
    pub complexity: Option<usize>,
    pub p: Vec<f64>,
    pub t: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub generator: Generator,
    pub inequalities: Vec<Inequality>,
    pub procedure: Procedure,
    pub input: Option<PathBuf>,
    pub weight: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dims: 2,
            levels: vec![3],
            complexity: None,
            p: vec![1.5, 2.0],
            t: vec![1.0 / 64.0, 1.0 / 8.0, 0.5],
            trials: 100,
            seed: 0,
            generator: Generator::Uniform,
            inequalities: Vec::new(),
            procedure: Procedure::Half,
            input: None,
            weight: None,
            output: None,
        }
    }
}

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{key}={value}: {why}"))
}

/// Parses `x`, `a/b` or a float literal.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
            a / b
        }
        None => s.parse().map_err(|e| format!("{e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

fn list<T>(value: &str, mut one: impl FnMut(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(&mut one).collect()
}

/// `3,4,5` or the inclusive range `3-6`.
fn parse_levels(value: &str) -> Result<Vec<u32>, String> {
    if let Some((a, b)) = value.split_once('-') {
        let a: u32 = a.trim().parse().map_err(|e| format!("{e}"))?;
        let b: u32 = b.trim().parse().map_err(|e| format!("{e}"))?;
        if a > b {
            return Err(format!("empty range {a}-{b}"));
        }
        return Ok((a..=b).collect());
    }
    list(value, |s| s.parse().map_err(|e| format!("{e}")))
}

impl ExperimentConfig {
    /// Sets one parameter from its textual form. Keys match the long flag
    /// names; `level` and `levels` are synonyms.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let value = value.trim();
        let err = |why: String| bad(key, value, why);
        match key {
            "dim" | "dims" => self.dims = value.parse().map_err(|e| err(format!("{e}")))?,
            "level" | "levels" => self.levels = parse_levels(value).map_err(err)?,
            "complexity" | "c" => self.complexity = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "p" => self.p = list(value, parse_real).map_err(err)?,
            "t" => self.t = list(value, parse_real).map_err(err)?,
            "trials" => self.trials = value.parse().map_err(|e| err(format!("{e}")))?,
            "seed" => self.seed = value.parse().map_err(|e| err(format!("{e}")))?,
            "generator" => {
                self.generator = Generator::from_name(value).ok_or_else(|| err("unknown generator".into()))?
            }
            "inequality" | "inequalities" => {
                self.inequalities =
                    list(value, |s| Inequality::from_tag(s).ok_or_else(|| format!("unknown inequality {s}")))
                        .map_err(err)?
            }
            "procedure" => {
                self.procedure = match value {
                    "half" => Procedure::Half,
                    "exp" => Procedure::Exp,
                    _ => return Err(err("expected half or exp".into())),
                }
            }
            "input" => self.input = Some(value.into()),
            "weight" => self.weight = Some(value.into()),
            "output" => self.output = Some(value.into()),
            _ => return Err(CliError::Input(format!("unknown key {key}"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> CliResult<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("config line {}: expected key=value", n + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> CliResult<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Complexity to use on a grid of dimension `dims`.
    pub fn complexity_for(&self, dims: usize) -> CliResult<usize> {
        let c = self.complexity.unwrap_or(dims);
        if c == 0 || c > dims {
            return Err(CliError::Input(format!("complexity {c} outside [1, {dims}]")));
        }
        Ok(c)
    }

    /// Inequalities to evaluate, defaulting to every one that applies to
    /// the configured dimension.
    pub fn inequalities_or_default(&self) -> Vec<Inequality> {
        if !self.inequalities.is_empty() {
            return self.inequalities.clone();
        }
        let mut out = vec![Inequality::WeakFs, Inequality::StrongFs, Inequality::Endpoint];
        if self.dims == 2 {
            out.push(Inequality::LlogL2d);
        }
        out
    }

    /// Checks the sweep bounds: `1 <= L <= 8` for `d <= 2`, `1 <= L <= 5`
    /// for `d = 3`.
    pub fn validate_sweep(&self) -> CliResult<()> {
        let max_level = match self.dims {
            1 | 2 => 8,
            3 => 5,
            d => return Err(CliError::Input(format!("sweeps support d in [1, 3], got {d}"))),
        };
        if self.levels.is_empty() {
            return Err(CliError::Input("no levels given".into()));
        }
        if let Some(&l) = self.levels.iter().find(|&&l| l == 0 || l > max_level) {
            return Err(CliError::Input(format!("level {l} outside [1, {max_level}] for d = {}", self.dims)));
        }
        self.complexity_for(self.dims)?;
        for ineq in self.inequalities_or_default() {
            if ineq == Inequality::LlogL2d && self.dims != 2 {
                return Err(CliError::Input("llogl-2d needs d = 2".into()));
            }
            if ineq.uses_p() && self.p.is_empty() {
                return Err(CliError::Input(format!("{ineq} needs at least one p")));
            }
            if ineq.uses_t() && self.t.is_empty() {
                return Err(CliError::Input(format!("{ineq} needs at least one t")));
            }
        }
        if let Some(p) = self.p.iter().find(|&&p| p <= 1.0) {
            return Err(CliError::Input(format!("p = {p} must exceed 1")));
        }
        if let Some(t) = self.t.iter().find(|&&t| t <= 0.0) {
            return Err(CliError::Input(format!("t = {t} must be positive")));
        }
        Ok(())
    }
}
