#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strongmax_core::Grid;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Values in [-1, 1) with a fair share of exact zeros.
pub fn random_grid(rng: &mut ChaCha8Rng, dims: usize, level: u32) -> Grid {
    Grid::from_fn(dims, level, |_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(-1.0..1.0) }).unwrap()
}

pub fn random_weight(rng: &mut ChaCha8Rng, dims: usize, level: u32, floor: f64) -> Grid {
    Grid::from_fn(dims, level, |_| floor + rng.gen_range(0.0..4.0f64).powi(3)).unwrap()
}

/// Sum over the box `lo..hi` by visiting every cell.
pub fn direct_box_sum(g: &Grid, lo: &[usize], hi: &[usize]) -> f64 {
    let mut sum = 0.0;
    for flat in 0..g.len() {
        let x = g.coords(flat);
        if x.iter().zip(lo.iter().zip(hi)).all(|(&v, (&a, &b))| a <= v && v < b) {
            sum += g.values()[flat];
        }
    }
    sum
}

/// Every half-open box `lo..hi` of a `side^dims` grid.
pub fn all_boxes(dims: usize, side: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let intervals: Vec<(usize, usize)> = (0..side).flat_map(|a| (a + 1..=side).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; dims];
    loop {
        out.push((pick.iter().map(|&i| intervals[i].0).collect(), pick.iter().map(|&i| intervals[i].1).collect()));
        let mut axis = dims;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            pick[axis] += 1;
            if pick[axis] < intervals.len() {
                break;
            }
            pick[axis] = 0;
        }
    }
}

/// Dyadic maximal function by enumerating, for every cell, every dyadic
/// level vector with at most `c` distinct entries.
#[allow(clippy::needless_range_loop)]
pub fn dyadic_maximal_oracle(f: &Grid, c: usize) -> Vec<f64> {
    let dims = f.dims();
    let level = f.level() as usize;
    let side = f.side();
    let abs = f.abs();
    let mut out = vec![0.0; f.len()];
    for flat in 0..f.len() {
        let x = f.coords(flat);
        let mut levels = vec![0usize; dims];
        loop {
            let mut distinct = levels.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() <= c {
                let lo: Vec<usize> = (0..dims)
                    .map(|i| {
                        let len = side >> levels[i];
                        x[i] / len * len
                    })
                    .collect();
                let hi: Vec<usize> = (0..dims).map(|i| lo[i] + (side >> levels[i])).collect();
                let vol: usize = (0..dims).map(|i| hi[i] - lo[i]).product();
                let avg = direct_box_sum(&abs, &lo, &hi) / vol as f64;
                out[flat] = f64::max(out[flat], avg);
            }
            let mut axis = dims;
            let done = loop {
                if axis == 0 {
                    break true;
                }
                axis -= 1;
                levels[axis] += 1;
                if levels[axis] <= level {
                    break false;
                }
                levels[axis] = 0;
            };
            if done {
                break;
            }
        }
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
