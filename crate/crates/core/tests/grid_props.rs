mod common;

use common::{all_boxes, direct_box_sum, random_grid, rng};
use proptest::prelude::*;
use strongmax_core::{lp_norm, superlevel_measure, Grid, SummedAreaTable};

#[test]
fn sat_matches_direct_sums_on_4x4() {
    let mut r = rng(11);
    let g = random_grid(&mut r, 2, 2);
    let sat = SummedAreaTable::build(&g).unwrap();
    let boxes = all_boxes(2, 4);
    assert_eq!(boxes.len(), 100);
    for (lo, hi) in boxes {
        let fast = sat.box_sum(&lo, &hi).unwrap();
        let slow = direct_box_sum(&g, &lo, &hi);
        assert!((fast - slow).abs() <= 1e-12, "{lo:?}..{hi:?}: {fast} vs {slow}");
    }
}

#[test]
fn sat_matches_direct_sums_up_to_d3_l3() {
    let mut r = rng(12);
    for dims in 1..=3 {
        for level in 0..=3 {
            let g = random_grid(&mut r, dims, level);
            let sat = SummedAreaTable::build(&g).unwrap();
            let scale: f64 = g.values().iter().map(|v| v.abs()).sum::<f64>().max(1.0);
            for (lo, hi) in all_boxes(dims, g.side()) {
                let fast = sat.box_sum(&lo, &hi).unwrap();
                let slow = direct_box_sum(&g, &lo, &hi);
                assert!((fast - slow).abs() <= 1e-9 * scale, "d={dims} L={level} {lo:?}..{hi:?}");
            }
        }
    }
}

#[test]
fn sat_rejects_non_finite() {
    // Grids cannot hold non-finite values, so the table never sees one.
    assert!(Grid::new(1, 1, vec![1.0, f64::NAN]).is_err());
}

#[test]
fn lp_norm_matches_direct_loop() {
    let mut r = rng(13);
    let f = random_grid(&mut r, 2, 3);
    let w = common::random_weight(&mut r, 2, 3, 0.0);
    let mut total = 0.0;
    for i in 0..f.len() {
        total += f.values()[i] * f.values()[i] * w.values()[i];
    }
    let fast = lp_norm(&f, 2.0, Some(&w)).unwrap();
    assert!((fast - total.sqrt()).abs() <= 1e-12 * total.sqrt());
}

fn grid_pair(level: u32) -> impl Strategy<Value = (Grid, Grid)> {
    let n = 1usize << (2 * level);
    (prop::collection::vec(-5.0..5.0f64, n), prop::collection::vec(0.0..3.0f64, n))
        .prop_map(move |(a, b)| (Grid::new(2, level, a).unwrap(), Grid::new(2, level, b).unwrap()))
}

proptest! {
    #[test]
    fn superlevel_nonincreasing_in_t((g, w) in grid_pair(2), t1 in -6.0..6.0f64, dt in 0.0..3.0f64) {
        let a = superlevel_measure(&g, t1, Some(&w)).unwrap();
        let b = superlevel_measure(&g, t1 + dt, Some(&w)).unwrap();
        prop_assert!(b <= a);
        prop_assert!(superlevel_measure(&g, t1 + dt, None).unwrap() <= superlevel_measure(&g, t1, None).unwrap());
    }

    #[test]
    fn superlevel_additive_in_weight((g, w1) in grid_pair(2), (_, w2) in grid_pair(2), t in -5.0..5.0f64) {
        let sum = Grid::new(2, 2, w1.values().iter().zip(w2.values()).map(|(a, b)| a + b).collect()).unwrap();
        let lhs = superlevel_measure(&g, t, Some(&sum)).unwrap();
        let rhs = superlevel_measure(&g, t, Some(&w1)).unwrap() + superlevel_measure(&g, t, Some(&w2)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn lp_power_additive_on_disjoint_supports((f, w) in grid_pair(2), p in 1.0..4.0f64, split in 0usize..16) {
        let left = Grid::new(2, 2, f.values().iter().enumerate().map(|(i, &v)| if i < split { v } else { 0.0 }).collect()).unwrap();
        let right = Grid::new(2, 2, f.values().iter().enumerate().map(|(i, &v)| if i < split { 0.0 } else { v }).collect()).unwrap();
        let whole = lp_norm(&f, p, Some(&w)).unwrap().powf(p);
        let parts = lp_norm(&left, p, Some(&w)).unwrap().powf(p) + lp_norm(&right, p, Some(&w)).unwrap().powf(p);
        prop_assert!((whole - parts).abs() <= 1e-9 * (1.0 + whole));
    }

    #[test]
    fn text_round_trip_is_bitwise(g in grid_pair(2).prop_map(|p| p.0)) {
        prop_assert_eq!(Grid::from_text(&g.to_text()).unwrap(), g);
    }
}
