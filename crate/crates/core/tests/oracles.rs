//! Brute-force reference values frozen into the acceptance suite.
//!
//! Regenerate with `cargo test -p b2disc --test oracles -- --ignored --nocapture`.

use std::f64::consts::PI;

mod common;
use common::FLOOR_ORACLE;

/// `n_k = k!`, `k = 1..=10`.
fn factorials() -> Vec<u64> {
    (1..=10u64)
        .scan(1u64, |acc, k| {
            *acc *= k;
            Some(*acc)
        })
        .collect()
}

/// Minimum of `(1 − r²)·r·|Σ n_k z^{n_k − 1}|` over a polar grid of
/// `{1/(2n_j) ≤ 1 − |z| ≤ 2/n_j}`: `radii` log-spaced depths and
/// `angle_factor·n_j` equispaced angles, with phases reduced exactly in
/// integer arithmetic.
fn dense_floor(j: usize, radii: usize, angle_factor: u64) -> f64 {
    let n = factorials();
    let nj = n[j - 1];
    let angles = angle_factor * nj;
    let table: Vec<(f64, f64)> = (0..angles).map(|i| (2.0 * PI * i as f64 / angles as f64).sin_cos()).collect();
    let (dlo, dhi) = (1.0 / (2.0 * nj as f64), 2.0 / nj as f64);
    let mut best = f64::INFINITY;
    for ri in 0..radii {
        let d = dlo * (dhi / dlo).powf(ri as f64 / (radii - 1) as f64);
        let r = 1.0 - d;
        let mags: Vec<f64> = n.iter().map(|&nk| nk as f64 * ((nk - 1) as f64 * r.ln()).exp()).collect();
        let steps: Vec<u64> = n.iter().map(|&nk| (nk - 1) % angles).collect();
        let scale = (1.0 - r * r) * r;
        for i in 0..angles {
            let (mut re, mut im) = (0.0, 0.0);
            for (m, s) in mags.iter().zip(&steps) {
                let idx = ((*s as u128 * i as u128) % angles as u128) as usize;
                let (sin, cos) = table[idx];
                re += m * cos;
                im += m * sin;
            }
            best = best.min(scale * (re * re + im * im).sqrt());
        }
    }
    best
}

#[test]
#[ignore]
fn regenerate_floor_oracle() {
    for j in 6..=9 {
        println!("({j}, {:e}),", dense_floor(j, 64, 16));
    }
}

#[test]
fn coarser_grids_never_undercut_the_frozen_floor() {
    for &(j, v) in &FLOOR_ORACLE[..2] {
        // a sub-grid of the frozen one: 3 | 63 and 4 | 16
        let coarse = dense_floor(j, 22, 4);
        assert!(coarse >= v * (1.0 - 1e-12), "j = {j}: {coarse} < {v}");
    }
}
