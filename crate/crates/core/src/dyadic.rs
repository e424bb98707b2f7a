//! Dyadic intervals, rectangles and rectangle shapes on a grid of level `L`.

use std::collections::BTreeSet;

use crate::error::{invalid, Result};
use crate::grid::box_cells;

/// The interval of cells `[j * 2^(L-k), (j+1) * 2^(L-k))` at level `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    pub level: u32,
    pub index: usize,
}

impl DyadicInterval {
    pub fn new(level: u32, index: usize, grid_level: u32) -> Result<Self> {
        if level > grid_level {
            return invalid(format!("interval level {level} exceeds grid level {grid_level}"));
        }
        if index >= 1usize << level {
            return invalid(format!("interval index {index} outside [0, 2^{level})"));
        }
        Ok(Self { level, index })
    }

    /// The interval at `level` containing cell `x`.
    pub fn containing(x: usize, level: u32, grid_level: u32) -> Self {
        Self { level, index: x >> (grid_level - level) }
    }

    /// Length in cells.
    pub fn len(&self, grid_level: u32) -> usize {
        1 << (grid_level - self.level)
    }

    pub fn start(&self, grid_level: u32) -> usize {
        self.index << (grid_level - self.level)
    }

    pub fn end(&self, grid_level: u32) -> usize {
        self.start(grid_level) + self.len(grid_level)
    }

    pub fn contains_cell(&self, x: usize, grid_level: u32) -> bool {
        x >> (grid_level - self.level) == self.index
    }

    /// Whether `self` contains `other` (as cell sets).
    pub fn contains(&self, other: &DyadicInterval) -> bool {
        self.level <= other.level && other.index >> (other.level - self.level) == self.index
    }

    pub fn intersects(&self, other: &DyadicInterval) -> bool {
        self.contains(other) || other.contains(self)
    }
}

/// Per-axis dyadic levels `(k_1, ..., k_d)`; sidelength on axis `i` is
/// `2^(L - k_i)` cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape(pub Vec<u32>);

impl Shape {
    pub fn levels(&self) -> &[u32] {
        &self.0
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    /// Number of distinct sidelengths.
    pub fn complexity(&self) -> usize {
        self.0.iter().collect::<BTreeSet<_>>().len()
    }
}

/// All shapes on a `d`-dimensional grid of level `L` with at most `c`
/// distinct sidelengths, in lexicographic order of level vectors.
pub fn enumerate_shapes(level: u32, dims: usize, c: usize) -> Result<Vec<Shape>> {
    if dims == 0 {
        return invalid("dimension must be at least 1");
    }
    if c == 0 || c > dims {
        return invalid(format!("complexity {c} outside [1, {dims}]"));
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; dims];
    loop {
        let shape = Shape(cur.clone());
        if shape.complexity() <= c {
            out.push(shape);
        }
        let mut axis = dims;
        loop {
            if axis == 0 {
                return Ok(out);
            }
            axis -= 1;
            if cur[axis] < level {
                cur[axis] += 1;
                break;
            }
            cur[axis] = 0;
        }
    }
}

/// A product of dyadic intervals, one per axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRect {
    grid_level: u32,
    sides: Vec<DyadicInterval>,
}

impl DyadicRect {
    pub fn new(grid_level: u32, sides: Vec<DyadicInterval>) -> Result<Self> {
        if sides.is_empty() {
            return invalid("a rectangle needs at least one axis");
        }
        for s in &sides {
            DyadicInterval::new(s.level, s.index, grid_level)?;
        }
        Ok(Self { grid_level, sides })
    }

    /// Builds from `(level, index)` pairs, one per axis.
    pub fn from_pairs(grid_level: u32, pairs: &[(u32, usize)]) -> Result<Self> {
        let sides = pairs
            .iter()
            .map(|&(k, j)| DyadicInterval::new(k, j, grid_level))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid_level, sides)
    }

    /// The whole domain.
    pub fn full(dims: usize, grid_level: u32) -> Self {
        Self { grid_level, sides: vec![DyadicInterval { level: 0, index: 0 }; dims] }
    }

    /// The unique rectangle of `shape` that contains the cell `coords`.
    pub fn containing(shape: &Shape, coords: &[usize], grid_level: u32) -> Result<Self> {
        if shape.dims() != coords.len() {
            return invalid("shape and coordinates disagree on dimension");
        }
        let side = 1usize << grid_level;
        let mut sides = Vec::with_capacity(coords.len());
        for (&k, &x) in shape.levels().iter().zip(coords) {
            if k > grid_level || x >= side {
                return invalid("shape level or coordinate outside the grid");
            }
            sides.push(DyadicInterval::containing(x, k, grid_level));
        }
        Ok(Self { grid_level, sides })
    }

    pub fn grid_level(&self) -> u32 {
        self.grid_level
    }

    pub fn dims(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[DyadicInterval] {
        &self.sides
    }

    pub fn shape(&self) -> Shape {
        Shape(self.sides.iter().map(|s| s.level).collect())
    }

    /// `(|P_1(R)|, ..., |P_d(R)|)` in cells.
    pub fn sidelengths(&self) -> Vec<usize> {
        self.sides.iter().map(|s| s.len(self.grid_level)).collect()
    }

    pub fn longest_side(&self) -> usize {
        self.sidelengths().into_iter().max().unwrap_or(0)
    }

    /// `|R|` in cells.
    pub fn cell_count(&self) -> usize {
        self.sidelengths().into_iter().product()
    }

    pub fn complexity(&self) -> usize {
        self.shape().complexity()
    }

    /// Number of axes attaining the longest sidelength; this is `m̂` once
    /// the axes are listed in nonincreasing sidelength order.
    pub fn long_side_multiplicity(&self) -> usize {
        let lens = self.sidelengths();
        let max = lens.iter().copied().max().unwrap_or(0);
        lens.iter().filter(|&&l| l == max).count()
    }

    /// Sidelengths nonincreasing in the given axis order.
    pub fn is_canonical_in(&self, order: &[usize]) -> bool {
        let lens = self.sidelengths();
        order.windows(2).all(|w| lens[w[0]] >= lens[w[1]])
    }

    pub fn lo(&self) -> Vec<usize> {
        self.sides.iter().map(|s| s.start(self.grid_level)).collect()
    }

    pub fn hi(&self) -> Vec<usize> {
        self.sides.iter().map(|s| s.end(self.grid_level)).collect()
    }

    pub fn contains_cell(&self, coords: &[usize]) -> bool {
        coords.len() == self.sides.len()
            && self.sides.iter().zip(coords).all(|(s, &x)| s.contains_cell(x, self.grid_level))
    }

    pub fn intersects(&self, other: &DyadicRect) -> bool {
        self.sides.iter().zip(&other.sides).all(|(a, b)| a.intersects(b))
    }

    /// Flat (row-major) indices of the cells of `R`.
    pub fn cells(&self) -> Vec<usize> {
        box_cells(&self.lo(), &self.hi(), 1 << self.grid_level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_geometry() {
        let i = DyadicInterval::new(1, 1, 3).unwrap();
        assert_eq!((i.start(3), i.end(3), i.len(3)), (4, 8, 4));
        assert!(i.contains_cell(5, 3));
        assert!(!i.contains_cell(3, 3));
        assert!(DyadicInterval::new(2, 4, 3).is_err());
        assert!(DyadicInterval::new(4, 0, 3).is_err());
    }

    #[test]
    fn intervals_nested_or_disjoint() {
        let l = 4;
        let all: Vec<DyadicInterval> = (0..=l)
            .flat_map(|k| (0..1usize << k).map(move |j| DyadicInterval { level: k, index: j }))
            .collect();
        for a in &all {
            for b in &all {
                let ca: BTreeSet<usize> = (a.start(l)..a.end(l)).collect();
                let cb: BTreeSet<usize> = (b.start(l)..b.end(l)).collect();
                let meet = ca.intersection(&cb).count();
                if a.level == b.level && a != b {
                    assert_eq!(meet, 0);
                }
                let nested = ca.is_subset(&cb) || cb.is_subset(&ca);
                assert!(nested || meet == 0);
                assert_eq!(a.intersects(b), meet > 0);
                assert_eq!(a.contains(b), cb.is_subset(&ca));
            }
        }
    }

    #[test]
    fn shapes_cubes_only() {
        let s = enumerate_shapes(2, 2, 1).unwrap();
        assert_eq!(s, vec![Shape(vec![0, 0]), Shape(vec![1, 1]), Shape(vec![2, 2])]);
    }

    #[test]
    fn shapes_unrestricted() {
        let s = enumerate_shapes(2, 2, 2).unwrap();
        assert_eq!(s.len(), 9);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn shapes_three_axes_two_lengths() {
        assert_eq!(enumerate_shapes(1, 3, 2).unwrap().len(), 8);
        // (L+1)^d minus vectors with d distinct levels
        assert_eq!(enumerate_shapes(2, 3, 2).unwrap().len(), 27 - 6);
    }

    #[test]
    fn shapes_reject_bad_complexity() {
        assert!(enumerate_shapes(2, 2, 0).is_err());
        assert!(enumerate_shapes(2, 2, 3).is_err());
    }

    #[test]
    fn rect_measures() {
        let r = DyadicRect::from_pairs(2, &[(0, 0), (1, 1), (2, 3)]).unwrap();
        assert_eq!(r.sidelengths(), vec![4, 2, 1]);
        assert_eq!(r.cell_count(), 8);
        assert_eq!(r.complexity(), 3);
        assert_eq!(r.long_side_multiplicity(), 1);
        assert!(r.is_canonical_in(&[0, 1, 2]));
        assert!(!r.is_canonical_in(&[2, 1, 0]));
        assert_eq!(r.cells().len(), 8);
        assert!(r.contains_cell(&[3, 2, 3]));
        assert!(!r.contains_cell(&[3, 1, 3]));

        let q = DyadicRect::from_pairs(2, &[(1, 0), (1, 0)]).unwrap();
        assert_eq!(q.long_side_multiplicity(), 2);
    }

    #[test]
    fn containing_rect_holds_cell() {
        let shape = Shape(vec![1, 2]);
        let r = DyadicRect::containing(&shape, &[3, 2], 2).unwrap();
        assert!(r.contains_cell(&[3, 2]));
        assert_eq!(r.sidelengths(), vec![2, 1]);
    }
}
