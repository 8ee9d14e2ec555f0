//! Small numerical building blocks shared by the quadrature and
//! sampling code.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Gauss–Legendre rule with `n` nodes, mapped to `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    assert!(n > 0, "Gauss–Legendre rule needs at least one node");
    let mut out = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
        if 2 * i + 1 != n {
            out.push((0.5 * (1.0 + x), 0.5 * w));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Radical inverse of `index` in the given prime base.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// Two-dimensional Halton point (bases 2 and 3).
pub fn halton2(index: u64) -> (f64, f64) {
    (radical_inverse(index, 2), radical_inverse(index, 3))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Geometric-tail extrapolation of a sequence of positive increments.
/// Returns `(ratio, tail)` where `ratio` is the last observed increment
/// ratio and `tail` the sum of the continued geometric series, or
/// `None` when the increments do not decay.
pub fn geometric_tail(last: f64, previous: f64) -> (f64, Option<f64>) {
    if previous <= 0.0 || !previous.is_finite() || !last.is_finite() {
        return (f64::NAN, if last == 0.0 { Some(0.0) } else { None });
    }
    let ratio = last / previous;
    if ratio < 1.0 {
        (ratio, Some(last * ratio / (1.0 - ratio)))
    } else {
        (ratio, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..=12 {
            let rule = gauss_legendre_unit(n);
            assert_eq!(rule.len(), n);
            let total: f64 = rule.iter().map(|(_, w)| w).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
            for deg in 0..(2 * n) {
                let q: f64 = rule.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert_abs_diff_eq!(q, 1.0 / (deg as f64 + 1.0), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn halton_is_in_the_unit_square() {
        assert_eq!(halton2(0), (0.0, 0.0));
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_abs_diff_eq!(radical_inverse(5, 3), 7.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn geometric_tail_sums_the_series() {
        let (r, t) = geometric_tail(0.25, 0.5);
        assert_eq!(r, 0.5);
        assert_abs_diff_eq!(t.unwrap(), 0.25, epsilon = 1e-15);
        assert!(geometric_tail(2.0, 1.0).1.is_none());
    }
}
