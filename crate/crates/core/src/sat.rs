//! Summed-area tables for constant-time box sums on `d`-dimensional grids.

use crate::dyadic::DyadicRect;
use crate::error::{invalid, Error, Result};
use crate::grid::Grid;

/// Zero-padded cumulative sums: entry at padded coordinates `(c_1, ..., c_d)`
/// holds the sum of all cells `x` with `x_i < c_i`. Accumulation runs over
/// axes in the fixed order `0..d`.
#[derive(Clone, Debug)]
pub struct SummedAreaTable {
    dims: usize,
    level: u32,
    stride: usize,
    table: Vec<f64>,
}

impl SummedAreaTable {
    pub fn build(g: &Grid) -> Result<Self> {
        if let Some(pos) = g.values().iter().position(|v| !v.is_finite()) {
            return invalid(format!("non-finite value at cell {pos}"));
        }
        let dims = g.dims();
        let side = g.side();
        let stride = side + 1;
        let total = stride.pow(dims as u32);
        let mut table = vec![0.0; total];

        let mut coords = vec![0usize; dims];
        for &v in g.values() {
            let idx = coords.iter().fold(0usize, |acc, &x| acc * stride + x + 1);
            table[idx] = v;
            crate::grid::advance(&mut coords, side);
        }

        for axis in 0..dims {
            let step = stride.pow((dims - 1 - axis) as u32);
            for idx in 0..total {
                if !(idx / step).is_multiple_of(stride) {
                    table[idx] += table[idx - step];
                }
            }
        }
        Ok(Self { dims, level: g.level(), stride, table })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    fn padded(&self, corner: impl Iterator<Item = usize>) -> usize {
        corner.fold(0usize, |acc, x| acc * self.stride + x)
    }

    /// Sum over all cells `y` with `y_i <= coords_i` on every axis.
    pub fn cumulative(&self, coords: &[usize]) -> f64 {
        self.table[self.padded(coords.iter().map(|&x| x + 1))]
    }

    /// Sum over the half-open cell box `lo..hi` via `2^d`-corner
    /// inclusion-exclusion.
    pub fn box_sum(&self, lo: &[usize], hi: &[usize]) -> Result<f64> {
        let side = self.stride - 1;
        if lo.len() != self.dims || hi.len() != self.dims {
            return Err(Error::ShapeMismatch("box corners do not match table dimension".into()));
        }
        if lo.iter().zip(hi).any(|(&a, &b)| a > b || b > side) {
            return invalid(format!("box {lo:?}..{hi:?} outside the grid"));
        }
        Ok(self.box_sum_unchecked(lo, hi))
    }

    pub(crate) fn box_sum_unchecked(&self, lo: &[usize], hi: &[usize]) -> f64 {
        let d = self.dims;
        let mut sum = 0.0;
        for mask in 0..(1usize << d) {
            let idx = self.padded((0..d).map(|i| if mask >> (d - 1 - i) & 1 == 1 { hi[i] } else { lo[i] }));
            if (d - mask.count_ones() as usize).is_multiple_of(2) {
                sum += self.table[idx];
            } else {
                sum -= self.table[idx];
            }
        }
        sum
    }

    pub fn rect_sum(&self, r: &DyadicRect) -> Result<f64> {
        if r.dims() != self.dims || r.grid_level() != self.level {
            return invalid(format!(
                "rectangle (d={}, L={}) does not fit table (d={}, L={})",
                r.dims(),
                r.grid_level(),
                self.dims,
                self.level
            ));
        }
        Ok(self.box_sum_unchecked(&r.lo(), &r.hi()))
    }

    /// Arithmetic mean over the cells of `r`.
    pub fn rect_average(&self, r: &DyadicRect) -> Result<f64> {
        Ok(self.rect_sum(r)? / r.cell_count() as f64)
    }
}
