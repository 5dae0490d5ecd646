//! Brute-force reference implementations shared by the integration tests.
//!
//! These deliberately avoid the crate's separable loops: every filter is a
//! direct 2D double sum over an explicitly mirrored (or zero-interleaved)
//! grid.
#![allow(dead_code)]

pub mod dicom;

use ct_compand::Grid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_grid(rng: &mut ChaCha8Rng, w: usize, h: usize, lo: f64, hi: f64) -> Grid {
    Grid::from_fn(w, h, |_, _| rng.random_range(lo..=hi))
}

/// Reflect-101 by repeated folding.
pub fn fold(mut i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let last = n as isize - 1;
    loop {
        if i < 0 {
            i = -i;
        } else if i > last {
            i = 2 * last - i;
        } else {
            return i as usize;
        }
    }
}

pub fn taps(a: f64) -> [f64; 5] {
    [0.25 - a / 2.0, 0.25, a, 0.25, 0.25 - a / 2.0]
}

pub fn reduce_oracle(g: &Grid, a: f64) -> Grid {
    let k = taps(a);
    let (w, h) = g.dims();
    Grid::from_fn(w.div_ceil(2), h.div_ceil(2), |i, j| {
        let mut acc = 0.0;
        for (m, km) in (-2..=2).zip(k) {
            for (n, kn) in (-2..=2).zip(k) {
                acc += km * kn * g.get(fold(2 * i as isize + m, w), fold(2 * j as isize + n, h));
            }
        }
        acc
    })
}

pub fn expand_oracle(g: &Grid, tw: usize, th: usize, a: f64) -> Grid {
    let k = taps(a);
    let up = Grid::from_fn(tw, th, |x, y| if x % 2 == 0 && y % 2 == 0 { g.get(x / 2, y / 2) } else { 0.0 });
    Grid::from_fn(tw, th, |x, y| {
        let mut acc = 0.0;
        for (m, km) in (-2..=2).zip(k) {
            for (n, kn) in (-2..=2).zip(k) {
                acc += km * kn * up.get(fold(x as isize - m, tw), fold(y as isize - n, th));
            }
        }
        4.0 * acc
    })
}

pub fn expand_like(coarse: &Grid, fine: &Grid, a: f64) -> Grid {
    expand_oracle(coarse, fine.width(), fine.height(), a)
}

pub fn gaussian_oracle(input: &Grid, depth: usize, a: f64) -> Vec<Grid> {
    let mut levels = vec![input.clone()];
    for n in 0..=depth {
        let next = reduce_oracle(&levels[n], a);
        levels.push(next);
    }
    levels
}

pub fn contrast_oracle(gauss: &[Grid], a: f64, eps: f64) -> Vec<Grid> {
    (0..gauss.len() - 1)
        .map(|n| {
            let e = expand_like(&gauss[n + 1], &gauss[n], a);
            Grid::from_fn(e.width(), e.height(), |x, y| gauss[n].get(x, y) / e.get(x, y).max(eps))
        })
        .collect()
}

pub fn collapse_oracle(contrasts: &[Grid], coarsest: &Grid, a: f64) -> Grid {
    let mut cur = coarsest.clone();
    for c in contrasts.iter().rev() {
        let e = expand_like(&cur, c, a);
        cur = Grid::from_fn(c.width(), c.height(), |x, y| c.get(x, y) * e.get(x, y));
    }
    cur
}

/// Texture levels from the fully substituted sum
/// `S_n = sum_k (prod_{j<k} (1 - W_j)) W_k Expand^(k-n)(|DoG_k|^mu)`
/// with `W_N = 1`. Valid when every kernel tap is nonnegative, so expanded
/// texture never undershoots zero.
pub fn sorf_nested_oracle(gauss: &[Grid], w_n: &[f64], mu: f64, a: f64) -> Vec<Grid> {
    let depth = gauss.len() - 2;
    let powered: Vec<Grid> = (0..=depth)
        .map(|k| {
            let e = expand_like(&gauss[k + 1], &gauss[k], a);
            Grid::from_fn(e.width(), e.height(), |x, y| (gauss[k].get(x, y) - e.get(x, y)).abs().powf(mu))
        })
        .collect();
    (0..=depth)
        .map(|n| {
            let mut total = Grid::filled(gauss[n].width(), gauss[n].height(), 0.0);
            let mut carry = 1.0;
            for k in n..=depth {
                let wk = if k == depth { 1.0 } else { w_n[k] };
                let mut term = powered[k].clone();
                for j in (n..k).rev() {
                    term = expand_like(&term, &gauss[j], a);
                }
                let coef = carry * wk;
                total = Grid::from_fn(total.width(), total.height(), |x, y| total.get(x, y) + coef * term.get(x, y));
                carry *= 1.0 - wk;
            }
            total
        })
        .collect()
}

/// Direct 2D truncated Gaussian convolution, `sigma = radius / 2`.
pub fn blur_oracle(u: &Grid, radius: usize) -> Grid {
    let sigma = radius as f64 / 2.0;
    let r = radius as isize;
    let (w, h) = u.dims();
    Grid::from_fn(w, h, |x, y| {
        let (mut acc, mut norm) = (0.0, 0.0);
        for dy in -r..=r {
            for dx in -r..=r {
                let k = (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp();
                acc += k * u.get(fold(x as isize + dx, w), fold(y as isize + dy, h));
                norm += k;
            }
        }
        acc / norm
    })
}

pub fn max_abs_diff(a: &Grid, b: &Grid) -> f64 {
    assert_eq!(a.dims(), b.dims());
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
