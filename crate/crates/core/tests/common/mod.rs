//! Frozen reference values shared by the integration targets.

#![allow(dead_code)]

/// Minimum of `(1 − |z|²)|z||g′(z)|` on `A_j(2)` for `g = Σ_{k ≤ 10} z^{k!}`,
/// from the dense polar grid in `oracles.rs` (64 depths, 16·n_j angles).
pub const FLOOR_ORACLE: [(usize, f64); 4] =
    [(6, 2.522214409344701e-3), (7, 1.1502194984616692e-2), (8, 6.998378887604559e-2), (9, 1.2235925989730269e-1)];
