//! Greedy selection of sparse subfamilies from families of dyadic rectangles.
//!
//! Two procedures scan a canonically ordered family (longest side first) and
//! keep a rectangle when its overlap with what was already kept is small:
//!
//! * [`select_half`] keeps `R` when `|(∪ kept) ∩ R| < |R| / 2`;
//! * [`select_exp`] keeps `R` when
//!   `Σ_{y∈R} (exp(n(y)^(1/(m-1))) - 1) < e |R|`, where `n(y)` counts the
//!   kept rectangles containing `y`.
//!
//! Unions and overlap counts are rasterised on the grid. The verifiers
//! recompute the relevant maximal function and check the covering
//! statements cell by cell.

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::fmt::Write as _;

use crate::dyadic::DyadicRect;
use crate::error::{invalid, Error, Result};
use crate::grid::{cell_count, Grid};
use crate::maximal::maximal;

/// Relative slack for floating comparisons against `e`-scaled thresholds.
const EXP_THRESHOLD_SLACK: f64 = 1e-12;

/// A permutation of axes listing sidelengths in nonincreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxisOrder(pub Vec<usize>);

impl AxisOrder {
    pub fn identity(dims: usize) -> Self {
        Self((0..dims).collect())
    }

    /// Axes sorted by sidelength, longest first; equal lengths keep axis order.
    pub fn of(r: &DyadicRect) -> Self {
        let lens = r.sidelengths();
        let mut axes: Vec<usize> = (0..lens.len()).collect();
        axes.sort_by(|&a, &b| lens[b].cmp(&lens[a]));
        Self(axes)
    }
}

/// An ordered list of rectangles on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RectFamily {
    dims: usize,
    level: u32,
    rects: Vec<DyadicRect>,
    origin: Vec<usize>,
    order: Option<AxisOrder>,
}

impl RectFamily {
    pub fn new(dims: usize, level: u32, rects: Vec<DyadicRect>) -> Result<Self> {
        cell_count(dims, level)?;
        for (i, r) in rects.iter().enumerate() {
            if r.dims() != dims || r.grid_level() != level {
                return invalid(format!(
                    "rectangle {i} lives on (d={}, L={}), family on (d={dims}, L={level})",
                    r.dims(),
                    r.grid_level()
                ));
            }
        }
        let origin = (0..rects.len()).collect();
        Ok(Self { dims, level, rects, origin, order: None })
    }

    /// Checks every rectangle is canonical under `order` and re-sorts the
    /// list by longest side, descending, ties by original index.
    pub fn canonicalize(mut self, order: AxisOrder) -> Result<Self> {
        if order.0.len() != self.dims {
            return invalid("axis order length differs from the dimension");
        }
        let mut seen = vec![false; self.dims];
        for &a in &order.0 {
            if a >= self.dims || std::mem::replace(&mut seen[a], true) {
                return invalid(format!("{:?} is not a permutation", order.0));
            }
        }
        if let Some(i) = self.rects.iter().position(|r| !r.is_canonical_in(&order.0)) {
            return invalid(format!(
                "rectangle {} with sides {:?} is not nonincreasing in axis order {:?}",
                self.origin[i],
                self.rects[i].sidelengths(),
                order.0
            ));
        }
        let mut keyed: Vec<(usize, usize, DyadicRect)> = self
            .rects
            .drain(..)
            .zip(self.origin.drain(..))
            .map(|(r, o)| (r.longest_side(), o, r))
            .collect();
        keyed.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, o, r) in keyed {
            self.origin.push(o);
            self.rects.push(r);
        }
        self.order = Some(order);
        Ok(self)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn rects(&self) -> &[DyadicRect] {
        &self.rects
    }

    /// Index of each member in the list the family was built from.
    pub fn origin(&self) -> &[usize] {
        &self.origin
    }

    pub fn axis_order(&self) -> Option<&AxisOrder> {
        self.order.as_ref()
    }

    pub fn is_canonical(&self) -> bool {
        self.order.is_some()
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// Cell mask of the union of all members.
    pub fn union_mask(&self) -> Vec<bool> {
        union_mask(self.dims, self.level, &self.rects)
    }

    /// Parses `d L count` followed by one rectangle per line, each given as
    /// `level_1 index_1 ... level_d index_d`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (ln, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let head: Vec<usize> = parse_ints(header, ln + 1)?;
        let [dims, level, count] = head[..] else {
            return Err(Error::Parse { line: ln + 1, msg: "header must be `d L count`".into() });
        };
        let level = u32::try_from(level).map_err(|_| Error::Parse { line: ln + 1, msg: "level too large".into() })?;
        let mut rects = Vec::with_capacity(count);
        for (ln, line) in lines {
            let nums = parse_ints(line, ln + 1)?;
            if nums.len() != 2 * dims {
                return Err(Error::Parse {
                    line: ln + 1,
                    msg: format!("expected {} integers, found {}", 2 * dims, nums.len()),
                });
            }
            let pairs: Vec<(u32, usize)> = nums.chunks(2).map(|p| (p[0] as u32, p[1])).collect();
            let r = DyadicRect::from_pairs(level, &pairs)
                .map_err(|e| Error::Parse { line: ln + 1, msg: e.to_string() })?;
            rects.push(r);
        }
        if rects.len() != count {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("header announces {count} rectangles, found {}", rects.len()),
            });
        }
        Self::new(dims, level, rects)
    }

    pub fn to_text(&self) -> String {
        rects_to_text(self.dims, self.level, &self.rects)
    }
}

pub(crate) fn rects_to_text(dims: usize, level: u32, rects: &[DyadicRect]) -> String {
    let mut out = format!("{dims} {level} {}\n", rects.len());
    for r in rects {
        let fields: Vec<String> =
            r.sides().iter().flat_map(|s| [s.level.to_string(), s.index.to_string()]).collect();
        let _ = writeln!(out, "{}", fields.join(" "));
    }
    out
}

fn parse_ints(line: &str, line_no: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::Parse { line: line_no, msg: format!("bad integer {tok:?}") })
        })
        .collect()
}

fn union_mask(dims: usize, level: u32, rects: &[DyadicRect]) -> Vec<bool> {
    let mut mask = vec![false; 1usize << (dims as u32 * level)];
    for r in rects {
        for c in r.cells() {
            mask[c] = true;
        }
    }
    mask
}

/// Splits a family by the axis order that makes each member canonical and
/// canonicalises each part. Every member lands in exactly one part.
pub fn partition_by_order(fam: &RectFamily) -> Result<BTreeMap<AxisOrder, RectFamily>> {
    let mut groups: BTreeMap<AxisOrder, (Vec<DyadicRect>, Vec<usize>)> = BTreeMap::new();
    for (r, &o) in fam.rects.iter().zip(&fam.origin) {
        let entry = groups.entry(AxisOrder::of(r)).or_default();
        entry.0.push(r.clone());
        entry.1.push(o);
    }
    groups
        .into_iter()
        .map(|(order, (rects, origin))| {
            let part = RectFamily { dims: fam.dims, level: fam.level, rects, origin, order: None };
            Ok((order.clone(), part.canonicalize(order)?))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Procedure {
    /// Keep when overlap is below half the rectangle.
    Half,
    /// Keep when the exponential overlap integral is below `e |R|`.
    Exp,
}

impl Procedure {
    pub fn name(self) -> &'static str {
        match self {
            Procedure::Half => "half",
            Procedure::Exp => "exp",
        }
    }
}

/// Decision record for one family member.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateTrace {
    pub position: usize,
    /// Overlap cell count (half) or overlap integral (exp) at decision time.
    pub criterion: f64,
    /// `|R|/2` (half) or `e|R|` (exp).
    pub threshold: f64,
    pub selected: bool,
}

/// Output of a selection run. Immutable once returned.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult {
    procedure: Procedure,
    complexity: Option<usize>,
    dims: usize,
    level: u32,
    selected: Vec<DyadicRect>,
    positions: Vec<usize>,
    residuals: Vec<Vec<usize>>,
    trace: Vec<CandidateTrace>,
}

impl SelectionResult {
    fn empty(procedure: Procedure, complexity: Option<usize>, fam: &RectFamily) -> Self {
        Self {
            procedure,
            complexity,
            dims: fam.dims,
            level: fam.level,
            selected: Vec::new(),
            positions: Vec::new(),
            residuals: Vec::new(),
            trace: Vec::new(),
        }
    }

    pub fn procedure(&self) -> Procedure {
        self.procedure
    }

    /// The `m` of an exponential run; `None` for the half rule.
    pub fn complexity(&self) -> Option<usize> {
        self.complexity
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Selected rectangles in selection order.
    pub fn selected(&self) -> &[DyadicRect] {
        &self.selected
    }

    /// Family positions of the selected rectangles.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// `E(R̃_i)`: flat indices of the cells of the `i`-th selected rectangle
    /// not covered by earlier selections, ascending.
    pub fn residuals(&self) -> &[Vec<usize>] {
        &self.residuals
    }

    pub fn trace(&self) -> &[CandidateTrace] {
        &self.trace
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    /// Number of selected rectangles containing each cell.
    pub fn overlap_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; 1usize << (self.dims as u32 * self.level)];
        for r in &self.selected {
            for c in r.cells() {
                counts[c] += 1;
            }
        }
        counts
    }

    pub fn union_mask(&self) -> Vec<bool> {
        union_mask(self.dims, self.level, &self.selected)
    }
}

fn require_canonical(fam: &RectFamily) -> Result<()> {
    if fam.is_canonical() {
        Ok(())
    } else {
        invalid("selection requires a canonical family (see RectFamily::canonicalize)")
    }
}

/// Greedy half-overlap selection.
pub fn select_half(fam: &RectFamily) -> Result<SelectionResult> {
    require_canonical(fam)?;
    let mut out = SelectionResult::empty(Procedure::Half, None, fam);
    let mut covered = vec![false; 1usize << (fam.dims as u32 * fam.level)];
    for (pos, r) in fam.rects.iter().enumerate() {
        let cells = r.cells();
        let overlap = cells.iter().filter(|&&c| covered[c]).count();
        let selected = 2 * overlap < cells.len();
        out.trace.push(CandidateTrace {
            position: pos,
            criterion: overlap as f64,
            threshold: cells.len() as f64 / 2.0,
            selected,
        });
        if selected {
            let residual: Vec<usize> = cells.iter().copied().filter(|&c| !covered[c]).collect();
            for &c in &cells {
                covered[c] = true;
            }
            out.selected.push(r.clone());
            out.positions.push(pos);
            out.residuals.push(residual);
        }
    }
    Ok(out)
}

/// `exp(k^(1/(m-1))) - 1`.
pub(crate) fn exp_overlap_term(count: u32, m: usize) -> f64 {
    (f64::from(count)).powf(1.0 / (m - 1) as f64).exp() - 1.0
}

fn check_exp_complexity(m: usize) -> Result<()> {
    if m < 2 {
        return invalid(format!("the exponential rule needs m >= 2, got {m}"));
    }
    Ok(())
}

/// `Σ_{y∈r} (exp(counts(y)^(1/(m-1))) - 1)` for a grid of overlap counts.
pub fn overlap_integral(counts: &Grid, r: &DyadicRect, m: usize) -> Result<f64> {
    check_exp_complexity(m)?;
    if r.dims() != counts.dims() || r.grid_level() != counts.level() {
        return Err(Error::ShapeMismatch("rectangle does not fit the count grid".into()));
    }
    let vals = counts.values();
    let mut sum = 0.0;
    for c in r.cells() {
        let v = vals[c];
        if v < 0.0 || v.fract() != 0.0 || v > f64::from(u32::MAX) {
            return invalid(format!("overlap count {v} at cell {c} is not a nonnegative integer"));
        }
        sum += exp_overlap_term(v as u32, m);
    }
    Ok(sum)
}

/// Greedy exponential-overlap selection with parameter `m >= 2`.
pub fn select_exp(fam: &RectFamily, m: usize) -> Result<SelectionResult> {
    check_exp_complexity(m)?;
    require_canonical(fam)?;
    let mut out = SelectionResult::empty(Procedure::Exp, Some(m), fam);
    let mut counts = vec![0u32; 1usize << (fam.dims as u32 * fam.level)];
    let terms: Vec<f64> = (0..=fam.len() as u32).map(|k| exp_overlap_term(k, m)).collect();
    for (pos, r) in fam.rects.iter().enumerate() {
        let cells = r.cells();
        let integral: f64 = cells.iter().map(|&c| terms[counts[c] as usize]).sum();
        let threshold = E * cells.len() as f64;
        let selected = integral < threshold;
        out.trace.push(CandidateTrace { position: pos, criterion: integral, threshold, selected });
        if selected {
            let residual: Vec<usize> = cells.iter().copied().filter(|&c| counts[c] == 0).collect();
            for &c in &cells {
                counts[c] += 1;
            }
            out.selected.push(r.clone());
            out.positions.push(pos);
            out.residuals.push(residual);
        }
    }
    Ok(out)
}

/// Result of a covering verification.
#[derive(Clone, Debug, PartialEq)]
pub struct CoveringCheck {
    pub holds: bool,
    /// First failing cell (row-major), if any.
    pub witness: Option<Vec<usize>>,
    /// Smallest `value / threshold` over the checked cells (1.0 if none).
    pub min_ratio: f64,
    /// Whether every cell of the union clears the headline threshold
    /// (`1/2` or `e`) with no per-cell relaxation.
    pub literal_holds: bool,
    pub cells_checked: usize,
}

fn check_context(all: &RectFamily, sel: &SelectionResult, m: usize, procedure: Procedure) -> Result<()> {
    if sel.procedure != procedure {
        return invalid(format!("expected a {} selection, got {}", procedure.name(), sel.procedure.name()));
    }
    if all.dims != sel.dims || all.level != sel.level {
        return Err(Error::ShapeMismatch("family and selection live on different grids".into()));
    }
    if m < 2 || m > all.dims {
        return invalid(format!("covering check needs 2 <= m <= d = {}, got {m}", all.dims));
    }
    Ok(())
}

fn coords_of(flat: usize, dims: usize, level: u32) -> Vec<usize> {
    let side = 1usize << level;
    let mut out = vec![0; dims];
    let mut f = flat;
    for slot in out.iter_mut().rev() {
        *slot = f % side;
        f /= side;
    }
    out
}

/// Checks `∪ R_i ⊆ {M_(m-1)[1_(∪ R̃_i)] >= 1/2}` cell by cell.
pub fn check_covering_half(all: &RectFamily, sel: &SelectionResult, m: usize) -> Result<CoveringCheck> {
    check_context(all, sel, m, Procedure::Half)?;
    let indicator = Grid::new(
        sel.dims,
        sel.level,
        sel.union_mask().into_iter().map(|b| if b { 1.0 } else { 0.0 }).collect(),
    )?;
    let field = maximal(&indicator, m - 1)?;
    let mut check = CoveringCheck { holds: true, witness: None, min_ratio: 1.0, literal_holds: true, cells_checked: 0 };
    for (cell, inside) in all.union_mask().into_iter().enumerate() {
        if !inside {
            continue;
        }
        check.cells_checked += 1;
        let ratio = field.values()[cell] / 0.5;
        check.min_ratio = check.min_ratio.min(ratio);
        if ratio < 1.0 && check.holds {
            check.holds = false;
            check.literal_holds = false;
            check.witness = Some(coords_of(cell, sel.dims, sel.level));
        }
    }
    Ok(check)
}

/// Checks the exponential covering statement with
/// `Φ = exp((Σ 1_(R̃_i))^(1/(m-1))) - 1`:
///
/// * every cell of a rejected rectangle has `M_(m-1) Φ >= e`;
/// * every other cell of the union lies in a selected rectangle and has
///   `M_(m-1) Φ >= e - 1` (the value of `Φ` on a singly covered cell).
///
/// `literal_holds` reports whether all cells of the union reach `e`.
pub fn check_covering_exp(all: &RectFamily, sel: &SelectionResult, m: usize) -> Result<CoveringCheck> {
    check_context(all, sel, m, Procedure::Exp)?;
    if sel.complexity != Some(m) {
        return invalid(format!("selection was run with m = {:?}, check asked for m = {m}", sel.complexity));
    }
    let phi: Vec<f64> = sel.overlap_counts().into_iter().map(|k| exp_overlap_term(k, m)).collect();
    let field = maximal(&Grid::new(sel.dims, sel.level, phi)?, m - 1)?;

    let mut rejected = vec![false; field.len()];
    let mut next_sel = sel.positions.iter().peekable();
    for (pos, r) in all.rects.iter().enumerate() {
        if next_sel.peek() == Some(&&pos) {
            next_sel.next();
            continue;
        }
        for c in r.cells() {
            rejected[c] = true;
        }
    }

    let mut check = CoveringCheck { holds: true, witness: None, min_ratio: 1.0, literal_holds: true, cells_checked: 0 };
    for (cell, inside) in all.union_mask().into_iter().enumerate() {
        if !inside {
            continue;
        }
        check.cells_checked += 1;
        let value = field.values()[cell];
        if value < E * (1.0 - EXP_THRESHOLD_SLACK) {
            check.literal_holds = false;
        }
        let threshold = if rejected[cell] { E } else { E - 1.0 };
        let ratio = value / threshold;
        check.min_ratio = check.min_ratio.min(ratio);
        if ratio < 1.0 - EXP_THRESHOLD_SLACK && check.holds {
            check.holds = false;
            check.witness = Some(coords_of(cell, sel.dims, sel.level));
        }
    }
    Ok(check)
}

/// `(|E(R̃_i)|, |R̃_i|, ratio)` for one selected rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsenessEntry {
    pub residual: usize,
    pub size: usize,
    pub ratio: f64,
}

/// Residual ratios of a half-rule selection; fails on the first `i` with
/// `|E(R̃_i)| < |R̃_i| / 2`.
pub fn sparseness_report(sel: &SelectionResult) -> Result<Vec<SparsenessEntry>> {
    if sel.procedure != Procedure::Half {
        return invalid("the sparseness bound applies to half-rule selections only");
    }
    sel.selected
        .iter()
        .zip(&sel.residuals)
        .enumerate()
        .map(|(i, (r, e))| {
            let size = r.cell_count();
            if 2 * e.len() < size {
                return Err(Error::Invariant(format!(
                    "selected rectangle {i} keeps only {} of {size} cells outside earlier selections",
                    e.len()
                )));
            }
            Ok(SparsenessEntry { residual: e.len(), size, ratio: e.len() as f64 / size as f64 })
        })
        .collect()
}

/// Summary of an independent re-run of a selection.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub candidates: usize,
    /// Largest `|criterion - recomputed criterion|` over all candidates.
    pub max_criterion_deviation: f64,
}

/// Replays a selection with per-cell containment tests instead of the
/// rasterised union, and checks every decision, the residual sets, their
/// disjointness and that they tile the union of the selection.
pub fn audit_selection(fam: &RectFamily, sel: &SelectionResult) -> Result<AuditReport> {
    if sel.trace.len() != fam.len() {
        return Err(Error::Invariant(format!(
            "trace has {} entries for a family of {}",
            sel.trace.len(),
            fam.len()
        )));
    }
    let dims = fam.dims;
    let level = fam.level;
    let mut kept: Vec<&DyadicRect> = Vec::new();
    let mut max_dev = 0.0f64;
    for (pos, r) in fam.rects.iter().enumerate() {
        let cells: Vec<Vec<usize>> = r.cells().into_iter().map(|c| coords_of(c, dims, level)).collect();
        let size = cells.len();
        let depth = |x: &[usize]| kept.iter().filter(|k| k.contains_cell(x)).count() as u32;
        let (criterion, selected) = match sel.procedure {
            Procedure::Half => {
                let overlap = cells.iter().filter(|x| depth(x) > 0).count();
                (overlap as f64, 2 * overlap < size)
            }
            Procedure::Exp => {
                let m = sel.complexity.ok_or_else(|| Error::Invariant("exp selection without m".into()))?;
                let integral: f64 = cells
                    .iter()
                    .map(|x| (f64::from(depth(x))).powf(1.0 / (m - 1) as f64).exp() - 1.0)
                    .sum();
                (integral, integral < E * size as f64)
            }
        };
        let t = &sel.trace[pos];
        max_dev = max_dev.max((t.criterion - criterion).abs());
        if t.selected != selected {
            return Err(Error::Invariant(format!(
                "candidate {pos}: recorded decision {} but criterion {criterion} gives {selected}",
                t.selected
            )));
        }
        if selected {
            kept.push(r);
        }
    }
    if kept.len() != sel.selected.len() || kept.iter().zip(&sel.selected).any(|(a, b)| *a != b) {
        return Err(Error::Invariant("replayed selection differs from the recorded one".into()));
    }

    let mut owner = vec![usize::MAX; 1usize << (dims as u32 * level)];
    for (i, residual) in sel.residuals.iter().enumerate() {
        for &c in residual {
            let x = coords_of(c, dims, level);
            let earlier = sel.selected[..i].iter().any(|k| k.contains_cell(&x));
            if !sel.selected[i].contains_cell(&x) || earlier {
                return Err(Error::Invariant(format!("cell {x:?} does not belong to E({i})")));
            }
            if owner[c] != usize::MAX {
                return Err(Error::Invariant(format!("residuals {} and {i} share cell {x:?}", owner[c])));
            }
            owner[c] = i;
        }
    }
    for (c, inside) in sel.union_mask().into_iter().enumerate() {
        if inside && owner[c] == usize::MAX {
            return Err(Error::Invariant(format!(
                "cell {:?} is covered but lies in no residual",
                coords_of(c, dims, level)
            )));
        }
    }
    Ok(AuditReport { candidates: fam.len(), max_criterion_deviation: max_dev })
}
