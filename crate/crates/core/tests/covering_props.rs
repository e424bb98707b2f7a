mod common;

use std::collections::HashMap;
use std::f64::consts::E;

use common::rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use strongmax_core::covering::audit_selection;
use strongmax_core::{
    check_covering_exp, check_covering_half, partition_by_order, select_exp, select_half, sparseness_report,
    AxisOrder, DyadicRect, RectFamily,
};

fn random_rect(r: &mut ChaCha8Rng, dims: usize, level: u32) -> DyadicRect {
    let pairs: Vec<(u32, usize)> = (0..dims)
        .map(|_| {
            let k = r.gen_range(0..=level);
            (k, r.gen_range(0..1usize << k))
        })
        .collect();
    DyadicRect::from_pairs(level, &pairs).unwrap()
}

fn random_family(r: &mut ChaCha8Rng, dims: usize, level: u32, size: usize) -> RectFamily {
    RectFamily::new(dims, level, (0..size).map(|_| random_rect(r, dims, level)).collect()).unwrap()
}

/// Cells of a rectangle as coordinate vectors, independent of flat indexing.
fn cell_coords(rect: &DyadicRect) -> Vec<Vec<usize>> {
    let lo = rect.lo();
    let hi = rect.hi();
    let mut out = vec![lo.clone()];
    for axis in 0..lo.len() {
        out = out
            .into_iter()
            .flat_map(|c| {
                (lo[axis]..hi[axis]).map(move |x| {
                    let mut c = c.clone();
                    c[axis] = x;
                    c
                })
            })
            .collect();
    }
    out
}

/// Replays both rules with hash maps of overlap counts.
fn replay(fam: &RectFamily, exp_m: Option<usize>) -> Vec<usize> {
    let mut depth: HashMap<Vec<usize>, u32> = HashMap::new();
    let mut kept = Vec::new();
    for (pos, rect) in fam.rects().iter().enumerate() {
        let cells = cell_coords(rect);
        let keep = match exp_m {
            None => {
                let overlap = cells.iter().filter(|c| depth.get(*c).copied().unwrap_or(0) > 0).count();
                2 * overlap < cells.len()
            }
            Some(m) => {
                let integral: f64 = cells
                    .iter()
                    .map(|c| (f64::from(depth.get(c).copied().unwrap_or(0))).powf(1.0 / (m - 1) as f64).exp() - 1.0)
                    .sum();
                integral < E * cells.len() as f64
            }
        };
        if keep {
            kept.push(pos);
            for c in cells {
                *depth.entry(c).or_default() += 1;
            }
        }
    }
    kept
}

#[test]
fn partition_places_every_rectangle_once() {
    let mut r = rng(31);
    for _ in 0..50 {
        let fam = random_family(&mut r, 3, 3, 40);
        let parts = partition_by_order(&fam).unwrap();
        let mut seen = vec![0usize; fam.len()];
        for (order, part) in &parts {
            assert!(part.is_canonical());
            assert_eq!(part.axis_order(), Some(order));
            for (rect, &o) in part.rects().iter().zip(part.origin()) {
                assert_eq!(rect, &fam.rects()[o]);
                assert_eq!(&AxisOrder::of(rect), order);
                seen[o] += 1;
            }
            let longest: Vec<usize> = part.rects().iter().map(|x| x.longest_side()).collect();
            assert!(longest.windows(2).all(|w| w[0] >= w[1]));
        }
        assert!(seen.iter().all(|&n| n == 1));
    }
}

#[test]
fn selections_match_independent_replay() {
    let mut r = rng(32);
    for trial in 0..120 {
        let dims = 2 + trial % 2;
        let level = r.gen_range(1..=4);
        let size = r.gen_range(1..=64);
        let fam = random_family(&mut r, dims, level, size);
        for part in partition_by_order(&fam).unwrap().values() {
            let half = select_half(part).unwrap();
            assert_eq!(half.positions(), &replay(part, None)[..]);
            audit_selection(part, &half).unwrap();
            assert!(sparseness_report(&half).unwrap().iter().all(|e| 2 * e.residual >= e.size));

            for m in 2..=dims {
                let exp = select_exp(part, m).unwrap();
                assert_eq!(exp.positions(), &replay(part, Some(m))[..]);
                let audit = audit_selection(part, &exp).unwrap();
                assert_eq!(audit.max_criterion_deviation, 0.0);
            }
        }
    }
}

#[test]
fn covering_claims_hold_at_full_complexity() {
    let mut r = rng(33);
    let mut literal_failures = 0;
    for trial in 0..200 {
        let dims = 2 + trial % 2;
        let level = r.gen_range(1..=4);
        let size = r.gen_range(1..=64);
        let fam = random_family(&mut r, dims, level, size);
        for part in partition_by_order(&fam).unwrap().values() {
            let half = select_half(part).unwrap();
            let chk = check_covering_half(part, &half, dims).unwrap();
            assert!(chk.holds, "trial {trial}: witness {:?}", chk.witness);

            let exp = select_exp(part, dims).unwrap();
            let chk = check_covering_exp(part, &exp, dims).unwrap();
            assert!(chk.holds, "trial {trial}: witness {:?}", chk.witness);
            literal_failures += usize::from(!chk.literal_holds);
        }
    }
    // Cells covered once by a selected rectangle only reach e - 1.
    assert!(literal_failures > 0);
}

#[test]
fn residuals_tile_the_union() {
    let mut r = rng(34);
    for _ in 0..40 {
        let fam = random_family(&mut r, 2, 3, 30);
        for part in partition_by_order(&fam).unwrap().values() {
            for sel in [select_half(part).unwrap(), select_exp(part, 2).unwrap()] {
                let mut owner = vec![0u32; sel.union_mask().len()];
                for e in sel.residuals() {
                    for &c in e {
                        owner[c] += 1;
                    }
                }
                for (c, inside) in sel.union_mask().into_iter().enumerate() {
                    assert_eq!(owner[c], u32::from(inside));
                }
                assert_eq!(sel.residuals()[0].len(), sel.selected()[0].cell_count());
            }
        }
    }
}

#[test]
fn selection_is_deterministic_but_order_dependent() {
    let mut r = rng(35);
    let fam = random_family(&mut r, 2, 3, 40);
    for part in partition_by_order(&fam).unwrap().values() {
        assert_eq!(select_half(part).unwrap(), select_half(part).unwrap());
        assert_eq!(select_exp(part, 2).unwrap(), select_exp(part, 2).unwrap());
    }

    // Two equal-length bars overlapping a square: whichever bar comes first
    // is kept and decides which cells the square sees.
    let a = DyadicRect::from_pairs(2, &[(0, 0), (2, 0)]).unwrap();
    let b = DyadicRect::from_pairs(2, &[(0, 0), (2, 1)]).unwrap();
    let ab = RectFamily::new(2, 2, vec![a.clone(), b.clone(), a.clone()]).unwrap();
    let ba = RectFamily::new(2, 2, vec![b.clone(), a.clone(), b.clone()]).unwrap();
    let ab = select_half(&ab.canonicalize(AxisOrder::identity(2)).unwrap()).unwrap();
    let ba = select_half(&ba.canonicalize(AxisOrder::identity(2)).unwrap()).unwrap();
    assert_eq!(ab.selected(), &[a.clone(), b.clone()]);
    assert_eq!(ba.selected(), &[b, a]);
}

#[test]
fn family_text_round_trip_random() {
    let mut r = rng(36);
    for _ in 0..20 {
        let fam = random_family(&mut r, 3, 4, 17);
        assert_eq!(RectFamily::from_text(&fam.to_text()).unwrap(), fam);
    }
}
