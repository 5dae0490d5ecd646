mod common;

use common::*;
use ct_compand::pyramid::{build_contrast_pyramid, build_gaussian_pyramid, collapse, expand, max_depth, reduce};
use ct_compand::{Grid, Kernel};
use rand::Rng;

const SIZES: [(usize, usize); 6] = [(2, 2), (3, 5), (8, 8), (17, 9), (31, 32), (32, 27)];

#[test]
fn reduce_matches_direct_sum() {
    let mut r = rng(1);
    for a in [0.3, 0.4, 0.5, 0.6] {
        let k = Kernel::new(a).unwrap();
        for (w, h) in SIZES {
            let g = random_grid(&mut r, w, h, -1.0, 1.0);
            let got = reduce(&g, &k).unwrap();
            assert!(max_abs_diff(&got, &reduce_oracle(&g, a)) <= 1e-12, "{w}x{h} a={a}");
        }
    }
}

#[test]
fn expand_matches_zero_interleave() {
    let mut r = rng(2);
    for a in [0.3, 0.4, 0.6] {
        let k = Kernel::new(a).unwrap();
        for (w, h) in [(1, 1), (2, 3), (4, 4), (9, 5), (16, 13)] {
            let g = random_grid(&mut r, w, h, -1.0, 1.0);
            for (tw, th) in [(2 * w, 2 * h), (2 * w - 1, 2 * h), (2 * w, 2 * h - 1), (2 * w - 1, 2 * h - 1)] {
                if tw == 0 || th == 0 {
                    continue;
                }
                let got = expand(&g, tw, th, &k).unwrap();
                assert!(max_abs_diff(&got, &expand_oracle(&g, tw, th, a)) <= 1e-12, "{w}x{h}->{tw}x{th}");
            }
        }
    }
}

#[test]
fn expand_rejects_incompatible_targets() {
    let k = Kernel::default();
    let g = Grid::filled(4, 4, 1.0);
    assert!(expand(&g, 9, 8, &k).is_err());
    assert!(expand(&g, 8, 6, &k).is_err());
}

#[test]
fn contrast_and_collapse_match_oracles() {
    let mut r = rng(3);
    for (w, h) in [(16, 16), (31, 24), (32, 32), (27, 19)] {
        let a = r.random_range(0.3..0.6);
        let k = Kernel::new(a).unwrap();
        let depth = max_depth(w, h).unwrap().min(3);
        let input = random_grid(&mut r, w, h, 1e-3, 1.0);

        let gauss = build_gaussian_pyramid(&input, depth, &k).unwrap();
        let g_oracle = gaussian_oracle(&input, depth, a);
        assert_eq!(gauss.len(), g_oracle.len());
        for (got, want) in gauss.levels().iter().zip(&g_oracle) {
            assert!(max_abs_diff(got, want) <= 1e-12);
        }

        let c = build_contrast_pyramid(&gauss, &k, 1e-3).unwrap();
        let c_oracle = contrast_oracle(&g_oracle, a, 1e-3);
        for (got, want) in c.levels().iter().zip(&c_oracle) {
            assert!(max_abs_diff(got, want) <= 1e-12);
        }

        // Perturb the contrasts so collapse is not just the identity.
        let perturbed: Vec<Grid> = c.levels().iter().map(|l| l.map(|v| v * 1.1 - 0.05)).collect();
        let got = collapse(&ct_compand::Pyramid::new(perturbed.clone()).unwrap(), &gauss, &k).unwrap();
        let want = collapse_oracle(&perturbed, g_oracle.last().unwrap(), a);
        assert!(max_abs_diff(&got, &want) <= 1e-12);
    }
}

#[test]
fn unmodulated_collapse_restores_input() {
    let mut r = rng(4);
    let k = Kernel::default();
    for (w, h) in [(64, 64), (45, 38), (128, 97)] {
        let input = random_grid(&mut r, w, h, 1e-3, 1.0);
        let depth = max_depth(w, h).unwrap().min(4);
        let gauss = build_gaussian_pyramid(&input, depth, &k).unwrap();
        let c = build_contrast_pyramid(&gauss, &k, 1e-3).unwrap();
        let out = collapse(&c, &gauss, &k).unwrap();
        assert!(max_abs_diff(&out, &input) <= 1e-9, "{w}x{h}");
    }
}
