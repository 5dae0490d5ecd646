mod common;

use common::*;
use ct_compand::modulate::{modulation_stages, soft_threshold_field, NakaRushton};
use ct_compand::pyramid::{build_contrast_pyramid, build_gaussian_pyramid, max_depth};
use ct_compand::texture::build_sorf_pyramid;
use ct_compand::{CompandParams, Grid, Kernel, Mode};
use rand::Rng;

#[test]
fn sorf_matches_substituted_sum() {
    let mut r = rng(10);
    for (w, h) in [(16, 16), (32, 32), (29, 21), (32, 17)] {
        let a = r.random_range(0.3..=0.5);
        let k = Kernel::new(a).unwrap();
        let depth = max_depth(w, h).unwrap();
        let input = random_grid(&mut r, w, h, 1e-3, 1.0);
        let w_n: Vec<f64> = (0..depth).map(|_| r.random_range(0.0..=1.0)).collect();
        let mu = r.random_range(0.3..=1.5);

        let gauss = build_gaussian_pyramid(&input, depth, &k).unwrap();
        let got = build_sorf_pyramid(&gauss, &w_n, mu, &k).unwrap();
        let want = sorf_nested_oracle(gauss.levels(), &w_n, mu, a);
        for (n, (g, o)) in got.levels().iter().zip(&want).enumerate() {
            assert!(max_abs_diff(g, o) <= 1e-10, "{w}x{h} level {n}: {}", max_abs_diff(g, o));
        }
    }
}

/// Soft threshold at `m`, moved to every level with the oracle filters.
fn st_oracle(gauss: &[Grid], m: usize, a: f64) -> Vec<Grid> {
    let bm = &gauss[m];
    let max = bm.as_slice().iter().cloned().fold(f64::MIN, f64::max);
    let at_m = Grid::from_fn(bm.width(), bm.height(), |x, y| (-bm.get(x, y) / max).exp());
    let depth = gauss.len() - 2;
    (0..=depth)
        .map(|n| {
            let mut cur = at_m.clone();
            if n < m {
                for j in (n..m).rev() {
                    cur = expand_like(&cur, &gauss[j], a);
                }
            } else {
                for _ in m..n {
                    cur = reduce_oracle(&cur, a);
                }
            }
            cur
        })
        .collect()
}

#[test]
fn modulation_cascade_matches_per_pixel_formula() {
    let mut r = rng(11);
    for (w, h) in [(16, 16), (32, 32), (24, 31)] {
        let depth = max_depth(w, h).unwrap();
        let a = 0.4;
        let k = Kernel::new(a).unwrap();
        let mut p = CompandParams::default().with_levels(depth);
        p.amp_bone = r.random_range(0.5..40.0);
        p.amp_soft = r.random_range(0.5..40.0);
        p.lambda_bone = (0..=depth).map(|_| r.random_range(0.1..2.0)).collect();
        p.lambda_soft = (0..=depth).map(|_| r.random_range(0.1..2.0)).collect();
        p.alpha = r.random_range(0.5..2.0);
        p.offset = r.random_range(-0.2..0.2);
        p.r_max = (p.alpha + 1.0) * (1.0 - p.offset);
        let m = r.random_range(0..=depth);

        let input = random_grid(&mut r, w, h, 1e-3, 1.0);
        let gauss = build_gaussian_pyramid(&input, depth, &k).unwrap();
        let c = build_contrast_pyramid(&gauss, &k, p.epsilon).unwrap();
        let s = build_sorf_pyramid(&gauss, &p.w_n, p.mu, &k).unwrap();
        let stages = modulation_stages(&c, &s, &gauss, &p, m).unwrap();

        let st = st_oracle(gauss.levels(), m, a);
        for (sf, so) in soft_threshold_field(&gauss, m, &k).unwrap().iter().zip(&st) {
            assert!(max_abs_diff(sf, so) <= 1e-12);
        }
        for n in 0..=depth {
            let sl = s.level(n);
            let smax = sl.as_slice().iter().cloned().fold(f64::MIN, f64::max);
            let want = Grid::from_fn(sl.width(), sl.height(), |x, y| {
                let t = st[n].get(x, y);
                let delta = p.amp_bone * (1.0 - t) * p.lambda_bone[n] + p.amp_soft * t * p.lambda_soft[n];
                let gamma = delta * (smax - sl.get(x, y));
                p.r_max / (p.alpha + (p.beta / c.level(n).get(x, y)).powf(gamma)) + p.offset
            });
            let err = max_abs_diff(stages.modulated.level(n), &want);
            assert!(err <= 1e-10, "{w}x{h} level {n}: {err}");
        }
    }
}

#[test]
fn natural_mode_uses_single_channel() {
    let mut r = rng(12);
    let depth = 3;
    let k = Kernel::default();
    let p = CompandParams { mode: Mode::Natural, ..Default::default() }.with_levels(depth);
    let input = random_grid(&mut r, 32, 32, 1e-3, 1.0);
    let gauss = build_gaussian_pyramid(&input, depth, &k).unwrap();
    let c = build_contrast_pyramid(&gauss, &k, p.epsilon).unwrap();
    let s = build_sorf_pyramid(&gauss, &p.w_n, p.mu, &k).unwrap();
    let stages = modulation_stages(&c, &s, &gauss, &p, 0).unwrap();
    let nr = NakaRushton::from_params(&p);
    for n in 0..=depth {
        let sl = s.level(n);
        let smax = sl.max();
        let want = Grid::from_fn(sl.width(), sl.height(), |x, y| {
            nr.response(c.level(n).get(x, y), p.amp_bone * p.lambda_bone[n] * (smax - sl.get(x, y)))
        });
        assert!(max_abs_diff(stages.modulated.level(n), &want) <= 1e-12);
    }
}
