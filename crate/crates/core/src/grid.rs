//! Dense isotropic grids over the dyadic lattice.
//!
//! A [`Grid`] samples a real function on `d` axes of `2^L` cells each, stored
//! row-major (axis 0 varies slowest). Cells carry unit measure, so integrals
//! are sums and averages are arithmetic means.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};

/// Upper bound on `d * L`; keeps every grid addressable and allocatable.
pub const MAX_CELL_BITS: u32 = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dims: usize,
    level: u32,
    values: Vec<f64>,
}

impl Grid {
    /// Builds a grid from row-major values. Every value must be finite.
    pub fn new(dims: usize, level: u32, values: Vec<f64>) -> Result<Self> {
        let len = cell_count(dims, level)?;
        if values.len() != len {
            return invalid(format!(
                "expected {len} values for a {dims}-dimensional grid of level {level}, got {}",
                values.len()
            ));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("non-finite value {} at cell {pos}", values[pos]));
        }
        Ok(Self { dims, level, values })
    }

    pub fn constant(dims: usize, level: u32, value: f64) -> Result<Self> {
        let len = cell_count(dims, level)?;
        Self::new(dims, level, vec![value; len])
    }

    pub fn zeros(dims: usize, level: u32) -> Result<Self> {
        Self::constant(dims, level, 0.0)
    }

    /// Evaluates `f` at the coordinates of every cell.
    pub fn from_fn(dims: usize, level: u32, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = cell_count(dims, level)?;
        let mut coords = vec![0usize; dims];
        let side = 1usize << level;
        let mut values = Vec::with_capacity(len);
        for _ in 0..len {
            values.push(f(&coords));
            advance(&mut coords, side);
        }
        Self::new(dims, level, values)
    }

    /// Indicator of a set of cells given by coordinates.
    pub fn indicator<'a>(
        dims: usize,
        level: u32,
        cells: impl IntoIterator<Item = &'a [usize]>,
    ) -> Result<Self> {
        let mut g = Self::zeros(dims, level)?;
        for c in cells {
            let idx = g.flat_index(c)?;
            g.values[idx] = 1.0;
        }
        Ok(g)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Cells per axis, `2^L`.
    pub fn side(&self) -> usize {
        1 << self.level
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, coords: &[usize]) -> Result<f64> {
        Ok(self.values[self.flat_index(coords)?])
    }

    pub fn flat_index(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.dims {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for a {}-dimensional grid",
                coords.len(),
                self.dims
            )));
        }
        let side = self.side();
        let mut idx = 0usize;
        for &x in coords {
            if x >= side {
                return invalid(format!("coordinate {x} outside [0, {side})"));
            }
            idx = idx * side + x;
        }
        Ok(idx)
    }

    pub fn coords(&self, mut flat: usize) -> Vec<usize> {
        let side = self.side();
        let mut out = vec![0; self.dims];
        for slot in out.iter_mut().rev() {
            *slot = flat % side;
            flat /= side;
        }
        out
    }

    pub fn abs(&self) -> Grid {
        self.map_unchecked(f64::abs)
    }

    /// Applies `op` cellwise; fails if any result is non-finite.
    pub fn map(&self, op: impl Fn(f64) -> f64) -> Result<Grid> {
        Grid::new(self.dims, self.level, self.values.iter().map(|&v| op(v)).collect())
    }

    pub(crate) fn map_unchecked(&self, op: impl Fn(f64) -> f64) -> Grid {
        Grid {
            dims: self.dims,
            level: self.level,
            values: self.values.iter().map(|&v| op(v)).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Grid> {
        self.map(|v| v * factor)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.dims == other.dims && self.level == other.level
    }

    pub fn ensure_same_shape(&self, other: &Grid) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "grid (d={}, L={}) vs grid (d={}, L={})",
                self.dims, self.level, other.dims, other.level
            )))
        }
    }

    /// Weights must be nonnegative everywhere.
    pub fn ensure_weight(&self) -> Result<()> {
        match self.values.iter().position(|&v| v < 0.0) {
            Some(pos) => invalid(format!(
                "weight is negative ({}) at cell {:?}",
                self.values[pos],
                self.coords(pos)
            )),
            None => Ok(()),
        }
    }

    /// Parses the grid text format: `d`, then the `d` extents, then the
    /// row-major values, all whitespace separated.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| line.split_whitespace().map(move |tok| (i + 1, tok)));

        let (line, tok) = tokens.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let dims: usize = tok.parse().map_err(|_| Error::Parse { line, msg: format!("bad dimension {tok:?}") })?;
        if dims == 0 {
            return Err(Error::Parse { line, msg: "dimension must be positive".into() });
        }

        let mut level = None;
        for axis in 0..dims {
            let (line, tok) = tokens.next().ok_or(Error::Parse {
                line: 2,
                msg: format!("missing extent for axis {axis}"),
            })?;
            let extent: usize = tok
                .parse()
                .map_err(|_| Error::Parse { line, msg: format!("bad extent {tok:?}") })?;
            if !extent.is_power_of_two() {
                return Err(Error::Parse { line, msg: format!("extent {extent} is not a power of two") });
            }
            let l = extent.trailing_zeros();
            match level {
                None => level = Some(l),
                Some(prev) if prev != l => {
                    return Err(Error::Parse { line, msg: "grid extents must be equal on every axis".into() })
                }
                Some(_) => {}
            }
        }
        let level = level.unwrap_or(0);
        let expected = cell_count(dims, level)?;

        let mut values = Vec::with_capacity(expected);
        for (line, tok) in tokens {
            let v: f64 = tok.parse().map_err(|_| Error::Parse { line, msg: format!("bad value {tok:?}") })?;
            if !v.is_finite() {
                return Err(Error::Parse { line, msg: format!("non-finite value {tok:?}") });
            }
            values.push(v);
        }
        if values.len() != expected {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {expected} values, found {}", values.len()),
            });
        }
        Grid::new(dims, level, values)
    }

    /// Writes the grid text format, one last-axis row per line. Values use the
    /// shortest representation that parses back to the same `f64`.
    pub fn to_text(&self) -> String {
        let side = self.side();
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.dims);
        let extents: Vec<String> = (0..self.dims).map(|_| side.to_string()).collect();
        let _ = writeln!(out, "{}", extents.join(" "));
        for row in self.values.chunks(side) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
        out
    }
}

pub(crate) fn cell_count(dims: usize, level: u32) -> Result<usize> {
    if dims == 0 {
        return invalid("grid dimension must be at least 1");
    }
    let bits = (dims as u64) * u64::from(level);
    if bits > u64::from(MAX_CELL_BITS) {
        return Err(Error::ResourceLimit(format!(
            "d*L = {bits} exceeds the supported {MAX_CELL_BITS} bits of cells"
        )));
    }
    Ok(1usize << bits)
}

/// Row-major increment of a coordinate vector on a cube of the given side.
pub(crate) fn advance(coords: &mut [usize], side: usize) {
    for c in coords.iter_mut().rev() {
        *c += 1;
        if *c < side {
            return;
        }
        *c = 0;
    }
}

/// Flat indices of the cells in the half-open box `lo..hi`, row-major.
pub(crate) fn box_cells(lo: &[usize], hi: &[usize], side: usize) -> Vec<usize> {
    let dims = lo.len();
    if (0..dims).any(|i| hi[i] <= lo[i]) {
        return Vec::new();
    }
    let total: usize = (0..dims).map(|i| hi[i] - lo[i]).product();
    let mut out = Vec::with_capacity(total);
    let mut cur = lo.to_vec();
    for _ in 0..total {
        out.push(cur.iter().fold(0usize, |acc, &x| acc * side + x));
        for i in (0..dims).rev() {
            cur[i] += 1;
            if cur[i] < hi[i] {
                break;
            }
            cur[i] = lo[i];
        }
    }
    out
}

/// Weighted measure of the strict superlevel set `{g > t}`; `w` defaults to
/// counting measure.
pub fn superlevel_measure(g: &Grid, t: f64, w: Option<&Grid>) -> Result<f64> {
    match w {
        None => Ok(g.values.iter().filter(|&&v| v > t).count() as f64),
        Some(w) => {
            g.ensure_same_shape(w)?;
            w.ensure_weight()?;
            Ok(g.values
                .iter()
                .zip(&w.values)
                .filter(|(&v, _)| v > t)
                .map(|(_, &wv)| wv)
                .sum())
        }
    }
}

/// `(sum |f|^p w)^(1/p)` under counting measure, `w = 1` when absent.
pub fn lp_norm(f: &Grid, p: f64, w: Option<&Grid>) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return invalid(format!("exponent p = {p} must be a finite number >= 1"));
    }
    let total: f64 = match w {
        None => f.values.iter().map(|v| v.abs().powf(p)).sum(),
        Some(w) => {
            f.ensure_same_shape(w)?;
            w.ensure_weight()?;
            f.values.iter().zip(&w.values).map(|(v, wv)| v.abs().powf(p) * wv).sum()
        }
    };
    Ok(total.powf(1.0 / p))
}
