//! Seeded instance generators producing pairs `(f, w)` with `w >= WEIGHT_FLOOR`.
//!
//! Besides uniform noise they include shapes that tend to stress strong-type
//! bounds: weights concentrated next to the mass of `f`, alternating blocks,
//! and separable power laws that favour long thin rectangles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strongmax_core::Grid;

use crate::CliResult;

/// Lower bound added to every generated weight, so `A_p*` stays finite.
pub const WEIGHT_FLOOR: f64 = 1e-6;

/// Largest per-axis offset, in cells, between clustered masses of `f` and `w`.
const CLUSTER_RADIUS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `f` and `w` with independent uniform cells.
    Uniform,
    /// `f = w = 1`; no randomness.
    UniformConstant,
    /// One unit mass for `f`, one for `w` a few cells away.
    PointMass,
    /// Two to four masses each, `w` clustered around the masses of `f`.
    FewPointMasses,
    /// Dyadic checkerboards at independent scales.
    Checkerboard,
    /// Separable profiles `Π (1 + x_i)^(-a_i)`.
    PowerLawProfile,
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::Uniform,
        Generator::UniformConstant,
        Generator::PointMass,
        Generator::FewPointMasses,
        Generator::Checkerboard,
        Generator::PowerLawProfile,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Uniform => "uniform",
            Generator::UniformConstant => "uniform-constant",
            Generator::PointMass => "point-mass",
            Generator::FewPointMasses => "few-point-masses",
            Generator::Checkerboard => "checkerboard",
            Generator::PowerLawProfile => "power-law-profile",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == name)
    }
}

fn random_cell(rng: &mut ChaCha8Rng, dims: usize, side: usize) -> Vec<usize> {
    (0..dims).map(|_| rng.gen_range(0..side)).collect()
}

fn near(rng: &mut ChaCha8Rng, center: &[usize], side: usize) -> Vec<usize> {
    let r = CLUSTER_RADIUS.min(side - 1);
    center
        .iter()
        .map(|&x| {
            let lo = x.saturating_sub(r);
            let hi = (x + r).min(side - 1);
            rng.gen_range(lo..=hi)
        })
        .collect()
}

fn masses(dims: usize, level: u32, cells: &[Vec<usize>], heights: &[f64], floor: f64) -> CliResult<Grid> {
    let mut g = Grid::constant(dims, level, floor)?.into_values();
    let probe = Grid::zeros(dims, level)?;
    for (c, &h) in cells.iter().zip(heights) {
        g[probe.flat_index(c)?] += h;
    }
    Ok(Grid::new(dims, level, g)?)
}

/// `1` on cells whose block coordinates at scale `2^j` have even sum.
fn board(coords: &[usize], j: u32) -> bool {
    coords.iter().map(|&x| x >> j).sum::<usize>() % 2 == 0
}

/// Draws `(f, w)` from the stream seeded by `seed`.
pub fn generate(kind: Generator, dims: usize, level: u32, seed: u64) -> CliResult<(Grid, Grid)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = 1usize << level;
    let pair = match kind {
        Generator::Uniform => {
            let f = Grid::from_fn(dims, level, |_| rng.gen_range(0.0..1.0))?;
            let w = Grid::from_fn(dims, level, |_| WEIGHT_FLOOR + rng.gen_range(0.0..1.0))?;
            (f, w)
        }
        Generator::UniformConstant => (Grid::constant(dims, level, 1.0)?, Grid::constant(dims, level, 1.0)?),
        Generator::PointMass => {
            let x = random_cell(&mut rng, dims, side);
            let y = near(&mut rng, &x, side);
            (masses(dims, level, &[x], &[1.0], 0.0)?, masses(dims, level, &[y], &[1.0], WEIGHT_FLOOR)?)
        }
        Generator::FewPointMasses => {
            let k = rng.gen_range(2..=4);
            let xs: Vec<Vec<usize>> = (0..k).map(|_| random_cell(&mut rng, dims, side)).collect();
            let hf: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
            let ys: Vec<Vec<usize>> = (0..k)
                .map(|_| {
                    let i = rng.gen_range(0..xs.len());
                    near(&mut rng, &xs[i], side)
                })
                .collect();
            let hw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
            (masses(dims, level, &xs, &hf, 0.0)?, masses(dims, level, &ys, &hw, WEIGHT_FLOOR)?)
        }
        Generator::Checkerboard => {
            let jf = rng.gen_range(0..level);
            let jw = rng.gen_range(0..level);
            let contrast = rng.gen_range(1.0..100.0);
            let f = Grid::from_fn(dims, level, |c| if board(c, jf) { 1.0 } else { 0.0 })?;
            let w = Grid::from_fn(dims, level, |c| if board(c, jw) { contrast } else { 1.0 })?;
            (f, w)
        }
        Generator::PowerLawProfile => {
            let a: Vec<f64> = (0..dims).map(|_| rng.gen_range(0.0..2.0)).collect();
            let b: Vec<f64> = (0..dims).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let profile = |c: &[usize], e: &[f64]| c.iter().zip(e).map(|(&x, &s)| (1.0 + x as f64).powf(s)).product::<f64>();
            let f = Grid::from_fn(dims, level, |c| profile(c, &a).recip())?;
            let w = Grid::from_fn(dims, level, |c| WEIGHT_FLOOR + profile(c, &b))?;
            (f, w)
        }
    };
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for g in Generator::ALL {
            assert_eq!(Generator::from_name(g.name()), Some(g));
        }
        assert_eq!(Generator::from_name("gaussian"), None);
    }

    #[test]
    fn seeded_and_floored() {
        for g in Generator::ALL {
            for level in 1..=4 {
                let a = generate(g, 2, level, 11).unwrap();
                let b = generate(g, 2, level, 11).unwrap();
                assert_eq!(a, b);
                assert!(a.1.min_value() >= WEIGHT_FLOOR.min(1.0), "{}", g.name());
                assert!(a.0.max_value() > 0.0);
            }
        }
    }

    #[test]
    fn point_mass_is_clustered() {
        for seed in 0..50 {
            let (f, w) = generate(Generator::PointMass, 2, 5, seed).unwrap();
            let x = f.coords(f.values().iter().position(|&v| v == 1.0).unwrap());
            let y = w.coords(w.values().iter().position(|&v| v > 0.5).unwrap());
            assert!(x.iter().zip(&y).all(|(a, b)| a.abs_diff(*b) <= CLUSTER_RADIUS));
        }
    }
}
