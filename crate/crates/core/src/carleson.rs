//! Arcs, Carleson squares and their dyadic top-half tilings, plus the
//! box quadrature that every supremum in the crate is built on.
//!
//! Normalizations: the circle has length 1 and the disc has area 1, so an
//! arc of normalized length `m` spans `2πm` radians and its square
//! `Q_I = {z ≠ 0 : z/|z| ∈ I, 1 − |z| < m}` has area `m(1 − (1 − m)²)`.
//!
//! Integrals over a square are computed generation by generation over the
//! top halves `T_J = {z ∈ Q_J : 1 − |z| ≥ m(J)/2}` of its dyadic subarcs.
//! The per-generation contributions of an integrable boundary singularity
//! decay geometrically, so the part below the finest generation is
//! extrapolated from the last increments, and increments that stop
//! decaying mark the integral as divergent.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::DiskPoint;
use crate::numerics::gauss_legendre_unit;

const TWO_PI: f64 = 2.0 * PI;

/// Relative change between two refinements below which an integral is
/// reported as converged.
pub const CONVERGENCE_RTOL: f64 = 1e-4;

/// A boundary arc; `length` is normalized so that the whole circle is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub center_angle: f64,
    pub length: f64,
}

impl Arc {
    pub fn new(center_angle: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= 1.0) {
            return Err(invalid("length", format!("arc length must lie in (0, 1], got {length}")));
        }
        if !center_angle.is_finite() {
            return Err(invalid("center_angle", "arc center must be finite"));
        }
        Ok(Arc { center_angle: center_angle.rem_euclid(TWO_PI), length })
    }

    pub fn full_circle() -> Self {
        Arc { center_angle: PI, length: 1.0 }
    }

    /// Arc from its starting point, both in normalized units.
    pub fn from_start(start_fraction: f64, length: f64) -> Result<Self> {
        Self::new(TWO_PI * (start_fraction + 0.5 * length), length)
    }

    pub fn start_fraction(&self) -> f64 {
        (self.center_angle / TWO_PI - 0.5 * self.length).rem_euclid(1.0)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.center_angle)
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        let x = (theta / TWO_PI - self.start_fraction()).rem_euclid(1.0);
        x < self.length || self.length >= 1.0
    }

    pub fn children(&self) -> [Arc; 2] {
        let s = self.start_fraction();
        let h = 0.5 * self.length;
        [
            Arc { center_angle: (TWO_PI * (s + 0.5 * h)).rem_euclid(TWO_PI), length: h },
            Arc { center_angle: (TWO_PI * (s + 1.5 * h)).rem_euclid(TWO_PI), length: h },
        ]
    }
}

/// The Carleson square over an arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonSquare {
    pub arc: Arc,
}

impl CarlesonSquare {
    pub fn new(arc: Arc) -> Self {
        CarlesonSquare { arc }
    }

    pub fn side(&self) -> f64 {
        self.arc.length
    }

    pub fn area(&self) -> f64 {
        let m = self.arc.length;
        m * (1.0 - (1.0 - m) * (1.0 - m))
    }

    /// `z_Q = (1 − m(I)) ξ(I)`.
    pub fn anchor(&self) -> Complex64 {
        self.arc.center() * (1.0 - self.arc.length)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        r > 0.0 && r < 1.0 && 1.0 - r < self.arc.length && self.arc.contains_angle(z.arg())
    }

    pub fn top_half_contains(&self, z: Complex64) -> bool {
        self.contains(z) && 1.0 - z.norm() >= 0.5 * self.arc.length
    }

    pub fn top_half_area(&self) -> f64 {
        let m = self.arc.length;
        let outer = 1.0 - 0.5 * m;
        let inner = 1.0 - m;
        m * (outer * outer - inner * inner)
    }

    pub fn children(&self) -> [CarlesonSquare; 2] {
        let [a, b] = self.arc.children();
        [CarlesonSquare::new(a), CarlesonSquare::new(b)]
    }
}

/// Dyadic subarcs of a root, optionally rotated by a fraction of the
/// root length (the shifted grids of the one-third trick).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicTree {
    pub root: Arc,
    pub levels: u32,
    pub shift: f64,
}

impl DyadicTree {
    pub fn new(root: Arc, levels: u32, shift: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&shift) {
            return Err(invalid("shift", format!("shift must lie in [0, 1), got {shift}")));
        }
        Ok(DyadicTree { root, levels, shift })
    }

    pub fn arc(&self, level: u32, index: u64) -> Arc {
        let m = self.root.length / (1u64 << level) as f64;
        let start = self.root.start_fraction() + self.shift * self.root.length + index as f64 * m;
        Arc { center_angle: (TWO_PI * (start + 0.5 * m)).rem_euclid(TWO_PI), length: m }
    }

    pub fn arcs_at(&self, level: u32) -> impl Iterator<Item = Arc> + '_ {
        (0..(1u64 << level)).map(move |j| self.arc(level, j))
    }

    pub fn squares(&self) -> impl Iterator<Item = (u32, u64, CarlesonSquare)> + '_ {
        (0..=self.levels).flat_map(move |k| (0..(1u64 << k)).map(move |j| (k, j, CarlesonSquare::new(self.arc(k, j)))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadScheme {
    /// Tensor Gauss rule on every dyadic top half.
    #[default]
    TopHalfTiling,
    /// One angular panel per radial band.
    PolarTensor,
}

/// Box quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxQuadrature {
    /// Number of dyadic generations resolved below a square before the
    /// remainder is extrapolated.
    pub radial_levels: u32,
    pub angular_nodes: usize,
    pub radial_nodes: usize,
    pub scheme: QuadScheme,
}

impl Default for BoxQuadrature {
    fn default() -> Self {
        BoxQuadrature { radial_levels: 10, angular_nodes: 6, radial_nodes: 3, scheme: QuadScheme::TopHalfTiling }
    }
}

impl BoxQuadrature {
    pub fn validate(&self) -> Result<()> {
        if self.radial_levels < 4 || self.radial_levels > 26 {
            return Err(invalid("radial_levels", format!("need 4..=26 generations, got {}", self.radial_levels)));
        }
        if self.angular_nodes == 0 || self.radial_nodes == 0 || self.angular_nodes > 64 || self.radial_nodes > 64 {
            return Err(invalid("angular_nodes", "node counts must lie in 1..=64"));
        }
        Ok(())
    }

    pub fn refined(&self) -> Self {
        BoxQuadrature {
            radial_levels: (self.radial_levels + 2).min(26),
            angular_nodes: self.angular_nodes * 2,
            radial_nodes: self.radial_nodes + 1,
            scheme: self.scheme,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceStatus {
    Converged,
    /// Finite, but the two finest refinements differ by more than
    /// [`CONVERGENCE_RTOL`].
    Unconverged,
    /// The generation increments do not decay.
    Divergent,
    /// The integrand could not be evaluated on part of the square.
    Unsupported,
}

impl ConvergenceStatus {
    pub fn is_finite(&self) -> bool {
        matches!(self, ConvergenceStatus::Converged | ConvergenceStatus::Unconverged)
    }

    /// The worse of two statuses.
    pub fn combine(self, other: ConvergenceStatus) -> ConvergenceStatus {
        use ConvergenceStatus::*;
        let rank = |s: ConvergenceStatus| match s {
            Converged => 0,
            Unconverged => 1,
            Divergent => 2,
            Unsupported => 3,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

/// An integral over a square assembled from generation increments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxIntegral {
    /// Extrapolated integral (infinite when divergent).
    pub value: f64,
    /// Sum over the resolved generations only.
    pub resolved: f64,
    /// Observed decay ratio of the finest increments.
    pub ratio: f64,
    pub status: ConvergenceStatus,
}

/// Classifies an integral from its total over the resolved generations
/// and its four finest increments `c[0] = c_D, c[1] = c_{D−1}, ...`.
pub fn classify_increments(resolved: f64, finest: [f64; 4], generations: u32) -> BoxIntegral {
    let [c0, c1, c2, c3] = finest;
    if !resolved.is_finite() || finest.iter().any(|c| c.is_nan()) {
        let status = if finest.iter().chain([resolved].iter()).any(|c| c.is_nan()) {
            ConvergenceStatus::Unsupported
        } else {
            ConvergenceStatus::Divergent
        };
        return BoxIntegral { value: f64::INFINITY, resolved, ratio: f64::NAN, status };
    }
    if c0 == 0.0 {
        return BoxIntegral { value: resolved, resolved, ratio: 0.0, status: ConvergenceStatus::Converged };
    }
    let ratio_of = |a: f64, b: f64| if b > 0.0 { (a / b).sqrt() } else { f64::INFINITY };
    let ratio = ratio_of(c0, c2);
    // growth by more than 2x across the last three refinements
    let s_d = resolved;
    let s_d3 = resolved - c0 - c1 - c2;
    let tripled = generations >= 8 && s_d3 > 0.0 && s_d > 2.0 * s_d3;
    if ratio >= 1.0 || tripled {
        return BoxIntegral { value: f64::INFINITY, resolved, ratio, status: ConvergenceStatus::Divergent };
    }
    let value = resolved + c0 * ratio / (1.0 - ratio);
    let prev_ratio = ratio_of(c1, c3);
    let prev = if prev_ratio < 1.0 { resolved - c0 + c1 * prev_ratio / (1.0 - prev_ratio) } else { f64::INFINITY };
    let status = if (value - prev).abs() <= CONVERGENCE_RTOL * value.abs() {
        ConvergenceStatus::Converged
    } else {
        ConvergenceStatus::Unconverged
    };
    BoxIntegral { value, resolved, ratio, status }
}

/// Quadrature nodes on the dyadic top halves of a root square, down to a
/// fixed number of generations.
#[derive(Debug, Clone)]
pub struct TileGrid {
    root_start: f64,
    root_len: f64,
    depth: u32,
    scheme: QuadScheme,
    radial: Vec<(f64, f64)>,
    angular: Vec<(f64, f64)>,
}

impl TileGrid {
    /// Tiles for the square over `root` with `depth + 1` generations.
    pub fn new(root: Arc, depth: u32, quad: &BoxQuadrature) -> Self {
        Self::with_shift(root, 0.0, depth, quad)
    }

    /// As [`TileGrid::new`], with the root rotated by `shift·m(root)`.
    pub fn with_shift(root: Arc, shift: f64, depth: u32, quad: &BoxQuadrature) -> Self {
        let angular_nodes = match quad.scheme {
            QuadScheme::TopHalfTiling => quad.angular_nodes,
            QuadScheme::PolarTensor => quad.angular_nodes * 8,
        };
        TileGrid {
            root_start: root.start_fraction() + shift * root.length,
            root_len: root.length,
            depth,
            scheme: quad.scheme,
            radial: gauss_legendre_unit(quad.radial_nodes),
            angular: gauss_legendre_unit(angular_nodes),
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn tiles_at(&self, generation: u32) -> usize {
        match self.scheme {
            QuadScheme::TopHalfTiling => 1usize << generation,
            QuadScheme::PolarTensor => 1,
        }
    }

    fn generation_offset(&self, generation: u32) -> usize {
        match self.scheme {
            QuadScheme::TopHalfTiling => (1usize << generation) - 1,
            QuadScheme::PolarTensor => generation as usize,
        }
    }

    pub fn tile_count(&self) -> usize {
        self.generation_offset(self.depth + 1)
    }

    pub fn nodes_per_tile(&self) -> usize {
        self.radial.len() * self.angular.len()
    }

    pub fn node_count(&self) -> usize {
        self.tile_count() * self.nodes_per_tile()
    }

    /// Visits the nodes of one tile: `(point, area weight)`.
    fn tile_nodes(&self, generation: u32, index: usize, mut f: impl FnMut(Complex64, f64)) {
        let m = self.root_len / (1u64 << generation) as f64;
        let width = self.root_len / self.tiles_at(generation) as f64;
        let x0 = self.root_start + index as f64 * width;
        let d0 = 0.5 * m;
        for &(v, wv) in &self.radial {
            let d = d0 + v * d0;
            let r = 1.0 - d;
            let radial_weight = 2.0 * r * wv * d0;
            for &(u, wu) in &self.angular {
                let theta = TWO_PI * (x0 + u * width);
                f(Complex64::from_polar(r, theta), radial_weight * wu * width);
            }
        }
    }

    /// All node positions, tile-major in generation order.
    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.node_count());
        for g in 0..=self.depth {
            for j in 0..self.tiles_at(g) {
                self.tile_nodes(g, j, |z, _| out.push(z));
            }
        }
        out
    }

    /// Per-tile sums `Σ weight · f(z)`, for several integrands at once.
    pub fn tile_sums<const K: usize>(&self, f: impl Fn(Complex64) -> [f64; K] + Sync) -> Vec<[f64; K]> {
        let mut tiles = Vec::with_capacity(self.tile_count());
        for g in 0..=self.depth {
            tiles.extend((0..self.tiles_at(g)).map(|j| (g, j)));
        }
        tiles
            .par_iter()
            .map(|&(g, j)| {
                let mut acc = [0.0; K];
                self.tile_nodes(g, j, |z, w| {
                    let v = f(z);
                    for k in 0..K {
                        acc[k] += w * v[k];
                    }
                });
                acc
            })
            .collect()
    }

    /// Per-tile sums from values precomputed at [`TileGrid::points`].
    pub fn tile_sums_from<T: Sync, const K: usize>(
        &self,
        samples: &[T],
        f: impl Fn(&T) -> [f64; K] + Sync,
    ) -> Vec<[f64; K]> {
        let per_tile = self.nodes_per_tile();
        assert_eq!(samples.len(), self.node_count(), "samples do not match the grid");
        let weights = self.tile_weight_table();
        (0..self.tile_count())
            .into_par_iter()
            .map(|t| {
                let g = self.generation_of(t);
                let w = &weights[g as usize];
                let mut acc = [0.0; K];
                for (i, s) in samples[t * per_tile..(t + 1) * per_tile].iter().enumerate() {
                    let v = f(s);
                    for k in 0..K {
                        acc[k] += w[i] * v[k];
                    }
                }
                acc
            })
            .collect()
    }

    fn generation_of(&self, tile: usize) -> u32 {
        match self.scheme {
            QuadScheme::TopHalfTiling => usize::BITS - 1 - (tile + 1).leading_zeros(),
            QuadScheme::PolarTensor => tile as u32,
        }
    }

    /// Node weights depend only on the generation.
    fn tile_weight_table(&self) -> Vec<Vec<f64>> {
        (0..=self.depth)
            .map(|g| {
                let mut w = Vec::with_capacity(self.nodes_per_tile());
                self.tile_nodes(g, 0, |_, x| w.push(x));
                w
            })
            .collect()
    }

    /// Generation-by-generation totals of per-tile sums.
    pub fn generation_totals(&self, tile_values: &[f64]) -> Vec<f64> {
        (0..=self.depth)
            .map(|g| {
                let off = self.generation_offset(g);
                tile_values[off..off + self.tiles_at(g)].iter().sum()
            })
            .collect()
    }

    /// Integral over the root square from per-tile sums.
    pub fn root_integral(&self, tile_values: &[f64]) -> BoxIntegral {
        let gens = self.generation_totals(tile_values);
        integral_from_generations(&gens)
    }

    /// Integrals over every dyadic subsquare of the root down to
    /// `max_level`, indexed `[level][index]`. Only meaningful for the
    /// top-half tiling.
    pub fn subtree_integrals(&self, tile_values: &[f64], max_level: u32) -> Vec<Vec<BoxIntegral>> {
        assert_eq!(self.scheme, QuadScheme::TopHalfTiling);
        assert!(max_level + 3 <= self.depth, "need three generations below the finest box");
        let depth = self.depth as usize;
        let gen = |g: usize| {
            let off = (1usize << g) - 1;
            &tile_values[off..off + (1usize << g)]
        };
        // subtree totals, bottom-up
        let mut totals: Vec<Vec<f64>> = vec![Vec::new(); depth + 1];
        totals[depth] = gen(depth).to_vec();
        for g in (0..depth).rev() {
            let below = &totals[g + 1];
            totals[g] = gen(g).iter().enumerate().map(|(j, t)| t + below[2 * j] + below[2 * j + 1]).collect();
        }
        // block sums of the four finest generations at every scanned level
        let finest: Vec<Vec<Vec<f64>>> = (0..4)
            .map(|back| {
                let g = depth - back;
                let mut levels = vec![Vec::new(); max_level as usize + 1];
                let mut cur = gen(g).to_vec();
                let mut lvl = g;
                while lvl > max_level as usize {
                    cur = cur.chunks(2).map(|c| c[0] + c[1]).collect();
                    lvl -= 1;
                }
                levels[lvl] = cur;
                while lvl > 0 {
                    let next: Vec<f64> = levels[lvl].chunks(2).map(|c| c[0] + c[1]).collect();
                    lvl -= 1;
                    levels[lvl] = next;
                }
                levels
            })
            .collect();
        (0..=max_level as usize)
            .map(|k| {
                (0..(1usize << k))
                    .map(|j| {
                        let c = [finest[0][k][j], finest[1][k][j], finest[2][k][j], finest[3][k][j]];
                        classify_increments(totals[k][j], c, (depth - k) as u32)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Classifies an integral from its full list of generation increments.
pub fn integral_from_generations(gens: &[f64]) -> BoxIntegral {
    let n = gens.len();
    assert!(n >= 4, "need at least four generations");
    let resolved: f64 = gens.iter().sum();
    classify_increments(resolved, [gens[n - 1], gens[n - 2], gens[n - 3], gens[n - 4]], (n - 1) as u32)
}

/// A log-density on the disc; weights and plain integrands implement it.
pub trait LogDensity: Sync {
    /// `log w(z)`; `NaN` outside the support.
    fn log_density(&self, z: Complex64) -> f64;

    /// Exact `∫_Q w^sign dA` when a closed form exists.
    fn closed_form_integral(&self, _square: &CarlesonSquare, _sign: f64) -> Option<BoxIntegral> {
        None
    }
}

/// Average of a function over a square and whether it converged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxAverage {
    pub value: f64,
    pub status: ConvergenceStatus,
    pub ratio: f64,
}

impl BoxAverage {
    fn from_integral(i: BoxIntegral, area: f64) -> Self {
        BoxAverage { value: i.value / area, status: i.status, ratio: i.ratio }
    }
}

/// `∫_Q w^sign dA`.
pub fn box_integral_signed<W: LogDensity + ?Sized>(
    w: &W,
    sign: f64,
    square: &CarlesonSquare,
    quad: &BoxQuadrature,
) -> BoxIntegral {
    if let Some(exact) = w.closed_form_integral(square, sign) {
        return exact;
    }
    let grid = TileGrid::new(square.arc, quad.radial_levels, quad);
    let sums = grid.tile_sums(|z| [(sign * w.log_density(z)).exp()]);
    let flat: Vec<f64> = sums.into_iter().map(|[v]| v).collect();
    grid.root_integral(&flat)
}

/// `(1/A(Q)) ∫_Q w dA` with a convergence flag.
pub fn box_average<W: LogDensity + ?Sized>(w: &W, square: &CarlesonSquare, quad: &BoxQuadrature) -> BoxAverage {
    BoxAverage::from_integral(box_integral_signed(w, 1.0, square, quad), square.area())
}

/// Average of `w^{-1}`, obtained by negating the log.
pub fn box_average_inverse<W: LogDensity + ?Sized>(w: &W, square: &CarlesonSquare, quad: &BoxQuadrature) -> BoxAverage {
    BoxAverage::from_integral(box_integral_signed(w, -1.0, square, quad), square.area())
}

/// Integral of an arbitrary real function over a square.
pub fn integrate_square(
    f: impl Fn(Complex64) -> f64 + Sync,
    square: &CarlesonSquare,
    quad: &BoxQuadrature,
) -> BoxIntegral {
    let grid = TileGrid::new(square.arc, quad.radial_levels, quad);
    let sums: Vec<f64> = grid.tile_sums(|z| [f(z)]).into_iter().map(|[v]| v).collect();
    grid.root_integral(&sums)
}

/// Where a scan found its supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanMax {
    pub value: f64,
    pub square: CarlesonSquare,
    pub shift: f64,
    pub level: u32,
    pub index: u64,
}

impl ScanMax {
    pub fn divergent(&self) -> bool {
        self.value == f64::INFINITY
    }
}

pub const DEFAULT_SHIFTS: [f64; 3] = [0.0, 1.0 / 3.0, 2.0 / 3.0];

/// Maximum of `f` over the dyadic squares of every shifted grid down to
/// `max_level`. A value of `+∞` from `f` marks divergence and wins.
/// Ties keep the first square in (shift, level, index) order.
pub fn dyadic_sup_scan(
    f: impl Fn(&CarlesonSquare) -> f64 + Sync,
    root: Arc,
    max_level: u32,
    shifts: &[f64],
) -> Result<ScanMax> {
    if max_level > 24 {
        return Err(invalid("max_level", format!("at most 24 levels, got {max_level}")));
    }
    if shifts.is_empty() {
        return Err(invalid("shifts", "need at least one grid"));
    }
    let mut jobs = Vec::new();
    for &s in shifts {
        let tree = DyadicTree::new(root, max_level, s)?;
        for k in 0..=max_level {
            for j in 0..(1u64 << k) {
                jobs.push((s, k, j, CarlesonSquare::new(tree.arc(k, j))));
            }
        }
    }
    let values: Vec<f64> = jobs.par_iter().map(|(_, _, _, q)| f(q)).collect();
    let mut best: Option<ScanMax> = None;
    for ((s, k, j, q), v) in jobs.into_iter().zip(values) {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if best.is_none_or(|b| v > b.value) {
            best = Some(ScanMax { value: v, square: q, shift: s, level: k, index: j });
        }
    }
    Ok(best.expect("at least one square"))
}

/// One tile of a top-half decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopHalfTile {
    pub generation: u32,
    pub square: CarlesonSquare,
    /// Area of `T_J`.
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tiling {
    pub tiles: Vec<TopHalfTile>,
    /// Area of the strip `1 − |z| < m(I)·2^{−depth−1}` left uncovered.
    pub residual_area: f64,
}

impl Tiling {
    pub fn total_area(&self) -> f64 {
        self.tiles.iter().map(|t| t.area).sum::<f64>() + self.residual_area
    }
}

pub fn tile_top_halves(square: &CarlesonSquare, depth: u32) -> Tiling {
    let tree = DyadicTree { root: square.arc, levels: depth, shift: 0.0 };
    let mut tiles = Vec::with_capacity((1usize << (depth + 1)) - 1);
    for g in 0..=depth {
        for arc in tree.arcs_at(g) {
            let q = CarlesonSquare::new(arc);
            tiles.push(TopHalfTile { generation: g, square: q, area: q.top_half_area() });
        }
    }
    let m = square.arc.length;
    let delta = m / (1u64 << (depth + 1)) as f64;
    let residual_area = m * (1.0 - (1.0 - delta) * (1.0 - delta));
    Tiling { tiles, residual_area }
}

/// Persistent map from `(weight, square, level)` to a computed average.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QuadratureCache {
    pub entries: BTreeMap<String, f64>,
}

impl QuadratureCache {
    pub fn key(weight_hash: &str, square: &CarlesonSquare, level: u32) -> String {
        format!("{weight_hash}/{:.17e}:{:.17e}/{level}", square.arc.center_angle, square.arc.length)
    }

    pub fn get(&self, weight_hash: &str, square: &CarlesonSquare, level: u32) -> Option<f64> {
        self.entries.get(&Self::key(weight_hash, square, level)).copied()
    }

    pub fn insert(&mut self, weight_hash: &str, square: &CarlesonSquare, level: u32, value: f64) {
        self.entries.insert(Self::key(weight_hash, square, level), value);
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Angular position of a point as a fraction of the circle in `[0, 1)`.
pub fn angle_fraction(z: DiskPoint) -> f64 {
    (z.z().arg() / TWO_PI).rem_euclid(1.0)
}
