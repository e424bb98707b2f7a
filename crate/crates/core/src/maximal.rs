//! Complexity-`c` maximal operators over dyadic rectangles.
//!
//! `M_c f(x)` is the largest average of `|f|` over a rectangle containing `x`
//! whose sidelengths take at most `c` distinct values. `M_1` is the dyadic
//! Hardy–Littlewood operator and `M_d` the strong maximal operator.

use rayon::prelude::*;

use crate::dyadic::{enumerate_shapes, Shape};
use crate::error::{invalid, Error, Result};
use crate::grid::{box_cells, Grid};
use crate::sat::SummedAreaTable;

/// Rectangle basis for the brute-force oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Products of dyadic intervals.
    Dyadic,
    /// Every integer-aligned cell box; complexity counts distinct extents.
    AllDiscrete,
}

/// Largest dimension accepted by [`maximal_bruteforce`].
pub const BRUTEFORCE_MAX_DIMS: usize = 3;
/// Largest grid level accepted by [`maximal_bruteforce`].
pub const BRUTEFORCE_MAX_LEVEL: u32 = 4;

/// A maximal function together with the parameters that produced it.
#[derive(Clone, Debug)]
pub struct MaximalField {
    pub complexity: usize,
    pub basis: Basis,
    pub values: Grid,
}

impl MaximalField {
    /// Fast dyadic evaluation.
    pub fn dyadic(f: &Grid, c: usize) -> Result<Self> {
        Ok(Self { complexity: c, basis: Basis::Dyadic, values: maximal(f, c)? })
    }

    pub fn bruteforce(f: &Grid, c: usize, basis: Basis) -> Result<Self> {
        Ok(Self { complexity: c, basis, values: maximal_bruteforce(f, c, basis)? })
    }
}

fn check_complexity(f: &Grid, c: usize) -> Result<()> {
    if c == 0 || c > f.dims() {
        return invalid(format!("complexity {c} outside [1, {}]", f.dims()));
    }
    Ok(())
}

/// Dyadic `M_c f`.
///
/// Each cell lies in exactly one rectangle of every shape, so the operator is
/// a pointwise maximum over shapes of piecewise-constant block averages. All
/// block sums come from a single summed-area table of `|f|`.
pub fn maximal(f: &Grid, c: usize) -> Result<Grid> {
    check_complexity(f, c)?;
    let shapes = enumerate_shapes(f.level(), f.dims(), c)?;
    let abs = f.abs();
    let sat = SummedAreaTable::build(&abs)?;

    // Seeding with |f| (the single-cell averages) makes M_c f >= |f| exact
    // despite rounding in the table.
    let values = shapes
        .par_iter()
        .fold(
            || abs.values().to_vec(),
            |mut acc, shape| {
                accumulate_shape(&sat, shape, &mut acc);
                acc
            },
        )
        .reduce(
            || abs.values().to_vec(),
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.max(y);
                }
                a
            },
        );
    Grid::new(f.dims(), f.level(), values)
}

/// Folds the block averages of one shape into `acc` by pointwise max.
fn accumulate_shape(sat: &SummedAreaTable, shape: &Shape, acc: &mut [f64]) {
    let dims = sat.dims();
    let level = sat.level();
    let side = 1usize << level;
    let levels = shape.levels();

    let blocks: Vec<usize> = levels.iter().map(|&k| 1usize << k).collect();
    let lens: Vec<usize> = levels.iter().map(|&k| 1usize << (level - k)).collect();
    let volume = lens.iter().product::<usize>() as f64;
    let nblocks: usize = blocks.iter().product();

    let mut averages = Vec::with_capacity(nblocks);
    let mut idx = vec![0usize; dims];
    let mut lo = vec![0usize; dims];
    let mut hi = vec![0usize; dims];
    for _ in 0..nblocks {
        for i in 0..dims {
            lo[i] = idx[i] * lens[i];
            hi[i] = lo[i] + lens[i];
        }
        averages.push(sat.box_sum_unchecked(&lo, &hi) / volume);
        for i in (0..dims).rev() {
            idx[i] += 1;
            if idx[i] < blocks[i] {
                break;
            }
            idx[i] = 0;
        }
    }

    // contribution[i][x] = (x >> (L - k_i)) * (block stride of axis i)
    let mut stride = 1usize;
    let mut contribution = vec![Vec::new(); dims];
    for i in (0..dims).rev() {
        let shift = level - levels[i];
        contribution[i] = (0..side).map(|x| (x >> shift) * stride).collect();
        stride *= blocks[i];
    }

    if dims == 1 {
        for (x, slot) in acc.iter_mut().enumerate() {
            *slot = slot.max(averages[contribution[0][x]]);
        }
        return;
    }

    // Iterate rows along the last axis; the prefix offset is fixed per row.
    let last = &contribution[dims - 1];
    let mut coords = vec![0usize; dims - 1];
    for row in acc.chunks_mut(side) {
        let base: usize = coords.iter().enumerate().map(|(i, &x)| contribution[i][x]).sum();
        for (x, slot) in row.iter_mut().enumerate() {
            *slot = slot.max(averages[base + last[x]]);
        }
        crate::grid::advance(&mut coords, side);
    }
}

/// Direct enumeration oracle for `M_c f`. Sums every rectangle of the basis
/// cell by cell, with no sharing between rectangles or shapes.
pub fn maximal_bruteforce(f: &Grid, c: usize, basis: Basis) -> Result<Grid> {
    check_complexity(f, c)?;
    if f.dims() > BRUTEFORCE_MAX_DIMS || f.level() > BRUTEFORCE_MAX_LEVEL {
        return Err(Error::ResourceLimit(format!(
            "brute force supports d <= {BRUTEFORCE_MAX_DIMS} and L <= {BRUTEFORCE_MAX_LEVEL}, got d = {}, L = {}",
            f.dims(),
            f.level()
        )));
    }
    let dims = f.dims();
    let side = f.side();
    let vals = f.values();
    let mut out = vec![0.0f64; f.len()];

    // Candidate per-axis intervals as (start, end).
    let intervals: Vec<(usize, usize)> = match basis {
        Basis::Dyadic => (0..=f.level())
            .flat_map(|k| {
                let len = side >> k;
                (0..1usize << k).map(move |j| (j * len, (j + 1) * len))
            })
            .collect(),
        Basis::AllDiscrete => (0..side).flat_map(|a| (a + 1..=side).map(move |b| (a, b))).collect(),
    };

    let mut choice = vec![0usize; dims];
    let total = intervals.len().pow(dims as u32);
    let mut lo = vec![0usize; dims];
    let mut hi = vec![0usize; dims];
    for _ in 0..total {
        for i in 0..dims {
            (lo[i], hi[i]) = intervals[choice[i]];
        }
        let mut extents: Vec<usize> = (0..dims).map(|i| hi[i] - lo[i]).collect();
        extents.sort_unstable();
        extents.dedup();
        if extents.len() <= c {
            let cells = box_cells(&lo, &hi, side);
            let sum: f64 = cells.iter().map(|&i| vals[i].abs()).sum();
            let avg = sum / cells.len() as f64;
            for &i in &cells {
                if avg > out[i] {
                    out[i] = avg;
                }
            }
        }
        for i in (0..dims).rev() {
            choice[i] += 1;
            if choice[i] < intervals.len() {
                break;
            }
            choice[i] = 0;
        }
    }
    Grid::new(dims, f.level(), out)
}

/// `W = M_c M_(c-1) ... M_1 w`, with `M_1` applied first.
pub fn compose(w: &Grid, c: usize) -> Result<Grid> {
    w.ensure_weight()?;
    check_complexity(w, c)?;
    let mut cur = w.clone();
    for k in 1..=c {
        cur = maximal(&cur, k)?;
    }
    Ok(cur)
}

/// Two-dimensional `M_2 M_1 w`: the strong maximal operator applied after
/// the cube maximal operator.
pub fn compose_strong_over_cube_2d(w: &Grid) -> Result<Grid> {
    if w.dims() != 2 {
        return invalid(format!("expected a 2-dimensional weight, got d = {}", w.dims()));
    }
    w.ensure_weight()?;
    maximal(&maximal(w, 1)?, 2)
}
