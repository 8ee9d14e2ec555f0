//! Analytic functions on the disc, the Bloch seminorm, and the lacunary
//! construction whose exponential is not approximable by bounded
//! functions: annuli, floors, off-annuli bounds and the truncated area
//! function.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carleson::{integrate_square, Arc, BoxQuadrature, CarlesonSquare};
use crate::error::{invalid, Error, Result};
use crate::geometry::{DiskPoint, StolzAngle};
use crate::numerics::{gauss_legendre_unit, seeded_rng};

/// Functions with closed-form value and derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// `z`
    Identity,
    /// `−log(1 − z)`
    NegLogOneMinus,
}

/// An analytic function on the disc with derivative evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticFunction {
    /// `Σ c_m z^m`.
    PowerSeries { coeffs: Vec<Complex64> },
    /// `Σ a_k z^{n_k}` with strictly increasing exponents.
    Lacunary { coeffs: Vec<Complex64>, exponents: Vec<u64> },
    /// `scale · h(z)` for a closed-form `h`.
    ClosedForm { form: ClosedForm, scale: Complex64 },
}

/// `z^n` without overflow or loss for huge `n`.
fn power(z: Complex64, n: u64) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if n <= 64 {
        return z.powu(n as u32);
    }
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let nf = n as f64;
    let modulus = (nf * r.ln()).exp();
    if modulus < 1e-300 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(modulus, (nf * z.arg()).rem_euclid(2.0 * PI))
}

impl AnalyticFunction {
    pub fn identity() -> Self {
        AnalyticFunction::ClosedForm { form: ClosedForm::Identity, scale: Complex64::new(1.0, 0.0) }
    }

    pub fn neg_log_one_minus() -> Self {
        AnalyticFunction::ClosedForm { form: ClosedForm::NegLogOneMinus, scale: Complex64::new(1.0, 0.0) }
    }

    pub fn constant(c: Complex64) -> Self {
        AnalyticFunction::PowerSeries { coeffs: vec![c] }
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        AnalyticFunction::PowerSeries { coeffs }
    }

    pub fn lacunary(coeffs: Vec<Complex64>, exponents: Vec<u64>) -> Result<Self> {
        if coeffs.len() != exponents.len() {
            return Err(invalid("exponents", "need one exponent per coefficient"));
        }
        if exponents.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("exponents", "lacunary exponents must increase strictly"));
        }
        Ok(AnalyticFunction::Lacunary { coeffs, exponents })
    }

    /// `Σ_{k=1}^{K} z^{2^k}/k`, a little-Bloch lacunary polynomial.
    pub fn dyadic_harmonic(terms: u32) -> Self {
        let terms = terms.min(62);
        AnalyticFunction::Lacunary {
            coeffs: (1..=terms).map(|k| Complex64::new(1.0 / k as f64, 0.0)).collect(),
            exponents: (1..=terms).map(|k| 1u64 << k).collect(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        match self {
            AnalyticFunction::PowerSeries { coeffs } => {
                AnalyticFunction::PowerSeries { coeffs: coeffs.iter().map(|a| a * c).collect() }
            }
            AnalyticFunction::Lacunary { coeffs, exponents } => AnalyticFunction::Lacunary {
                coeffs: coeffs.iter().map(|a| a * c).collect(),
                exponents: exponents.clone(),
            },
            AnalyticFunction::ClosedForm { form, scale } => {
                AnalyticFunction::ClosedForm { form: *form, scale: scale * c }
            }
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            AnalyticFunction::PowerSeries { coeffs } => {
                coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
            }
            AnalyticFunction::Lacunary { coeffs, exponents } => {
                coeffs.iter().zip(exponents).map(|(a, &n)| a * power(z, n)).sum()
            }
            AnalyticFunction::ClosedForm { form, scale } => {
                let v = match form {
                    ClosedForm::Identity => z,
                    ClosedForm::NegLogOneMinus => -(Complex64::new(1.0, 0.0) - z).ln(),
                };
                scale * v
            }
        }
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        match self {
            AnalyticFunction::PowerSeries { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, (m, a)| acc * z + a * m as f64),
            AnalyticFunction::Lacunary { coeffs, exponents } => coeffs
                .iter()
                .zip(exponents)
                .filter(|&(_, &n)| n > 0)
                .map(|(a, &n)| a * n as f64 * power(z, n - 1))
                .sum(),
            AnalyticFunction::ClosedForm { form, scale } => {
                let v = match form {
                    ClosedForm::Identity => Complex64::new(1.0, 0.0),
                    ClosedForm::NegLogOneMinus => (Complex64::new(1.0, 0.0) - z).inv(),
                };
                scale * v
            }
        }
    }

    /// `(1 − |z|²)|g′(z)|`.
    pub fn bloch_density(&self, z: Complex64) -> f64 {
        (1.0 - z.norm_sqr()) * self.deriv(z).norm()
    }

    /// Taylor coefficients `b_0..b_{n−1}` of `g′`.
    pub fn derivative_coeffs(&self, n: usize) -> Vec<Complex64> {
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        match self {
            AnalyticFunction::PowerSeries { coeffs } => {
                for (m, a) in coeffs.iter().enumerate().skip(1) {
                    if m - 1 < n {
                        b[m - 1] = a * m as f64;
                    }
                }
            }
            AnalyticFunction::Lacunary { coeffs, exponents } => {
                for (a, &e) in coeffs.iter().zip(exponents) {
                    if e >= 1 && ((e - 1) as usize) < n {
                        b[(e - 1) as usize] = a * e as f64;
                    }
                }
            }
            AnalyticFunction::ClosedForm { form, scale } => match form {
                ClosedForm::Identity => {
                    if n > 0 {
                        b[0] = *scale;
                    }
                }
                ClosedForm::NegLogOneMinus => b.iter_mut().for_each(|x| *x = *scale),
            },
        }
        b
    }

    /// Bounded members of the disc algebra built in here.
    pub fn is_bounded(&self) -> bool {
        match self {
            AnalyticFunction::ClosedForm { form: ClosedForm::NegLogOneMinus, scale } => scale.norm() == 0.0,
            _ => true,
        }
    }
}

/// Radial-geometric evaluation grid: radii `1 − 2^{−i/per_octave}` up
/// to `1 − 2^{−levels}`, with about `angular_factor/(1 − r)` angles per
/// circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochGrid {
    pub levels: u32,
    pub per_octave: u32,
    pub angular_factor: f64,
    pub min_angular: usize,
    pub max_angular: usize,
}

impl Default for BlochGrid {
    fn default() -> Self {
        BlochGrid { levels: 16, per_octave: 8, angular_factor: 8.0, min_angular: 64, max_angular: 1 << 16 }
    }
}

impl BlochGrid {
    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 || self.levels > 30 {
            return Err(invalid("levels", format!("need 1..=30 levels, got {}", self.levels)));
        }
        if self.per_octave == 0 || self.min_angular == 0 || self.max_angular < self.min_angular {
            return Err(invalid("per_octave", "grid resolution must be positive"));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        let n = self.levels * self.per_octave;
        std::iter::once(0.0).chain((1..=n).map(|i| 1.0 - (-(i as f64) / self.per_octave as f64).exp2())).collect()
    }

    pub fn angles_at(&self, r: f64) -> usize {
        let want = (self.angular_factor / (1.0 - r)).ceil() as usize;
        want.clamp(self.min_angular, self.max_angular)
    }

    fn circle_sup(&self, r: f64, f: &(impl Fn(Complex64) -> f64 + Sync)) -> f64 {
        let n = self.angles_at(r);
        (0..n)
            .into_par_iter()
            .map(|i| f(Complex64::from_polar(r, 2.0 * PI * i as f64 / n as f64)))
            .reduce(|| 0.0, f64::max)
    }
}

/// `sup (1 − |z|²)|g′(z)|` over the grid; a lower bound for `‖g‖_𝓑`.
pub fn bloch_seminorm(g: &AnalyticFunction, grid: &BlochGrid) -> Result<f64> {
    grid.validate()?;
    let f = |z: Complex64| g.bloch_density(z);
    Ok(grid.radii().into_iter().map(|r| grid.circle_sup(r, &f)).fold(0.0, f64::max))
}

/// Per-radius suprema of `(1 − |z|²)|g′(z)|`.
pub fn little_bloch_profile(g: &AnalyticFunction, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    let grid = BlochGrid { max_angular: 1 << 20, ..BlochGrid::default() };
    radii
        .iter()
        .map(|&r| {
            if !(0.0..1.0).contains(&r) {
                return Err(invalid("radii", format!("radius {r} is outside [0, 1)")));
            }
            Ok((r, grid.circle_sup(r, &|z| g.bloch_density(z))))
        })
        .collect()
}

/// `(1 − |z|²)|g′(z)| > ε`.
pub fn level_set_member(g: &AnalyticFunction, eps: f64, z: DiskPoint) -> bool {
    g.bloch_density(z.z()) > eps
}

/// Exponent sequences for the counterexample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceSpec {
    /// `n_k = k!`
    Factorial,
    /// `n_1 = 2`, `n_{k+1} = n_k·(k + 1)`.
    SuperLacunary,
    /// Explicit exponents; the consecutive ratios must increase strictly.
    Custom(Vec<u64>),
}

/// Largest term count whose exponents still fit in `u64`.
pub const MAX_COUNTEREXAMPLE_TERMS: usize = 20;

pub fn sequence_exponents(spec: &SequenceSpec, terms: usize) -> Result<Vec<u64>> {
    if !(2..=MAX_COUNTEREXAMPLE_TERMS).contains(&terms) {
        return Err(invalid("terms", format!("need 2..={MAX_COUNTEREXAMPLE_TERMS} terms, got {terms}")));
    }
    let n: Vec<u64> = match spec {
        SequenceSpec::Factorial => (1..=terms as u64)
            .scan(1u64, |acc, k| {
                *acc *= k;
                Some(*acc)
            })
            .collect(),
        SequenceSpec::SuperLacunary => (1..=terms as u64)
            .scan(1u64, |acc, k| {
                *acc *= if k == 1 { 2 } else { k };
                Some(*acc)
            })
            .collect(),
        SequenceSpec::Custom(v) => {
            if v.len() < terms {
                return Err(invalid("terms", "custom sequence is shorter than the requested term count"));
            }
            v[..terms].to_vec()
        }
    };
    check_super_lacunary(&n)?;
    Ok(n)
}

/// Finite witness of `n_{k+1}/n_k → ∞`: strictly increasing exponents
/// whose consecutive ratios increase strictly after the first step.
pub fn check_super_lacunary(n: &[u64]) -> Result<()> {
    if n.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NotSuperLacunary("exponents must increase strictly".into()));
    }
    let ratios: Vec<f64> = n.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    if ratios.len() >= 3 && ratios[1..].windows(2).any(|r| r[1] <= r[0]) {
        return Err(Error::NotSuperLacunary(format!("ratios {ratios:?} do not grow")));
    }
    Ok(())
}

/// The lacunary series `Σ z^{n_k}` with unit coefficients.
pub fn build_counterexample(spec: &SequenceSpec, terms: usize) -> Result<AnalyticFunction> {
    let n = sequence_exponents(spec, terms)?;
    AnalyticFunction::lacunary(vec![Complex64::new(1.0, 0.0); n.len()], n)
}

fn lacunary_parts(g: &AnalyticFunction) -> Result<(&[Complex64], &[u64])> {
    match g {
        AnalyticFunction::Lacunary { coeffs, exponents } => Ok((coeffs, exponents)),
        _ => Err(invalid("g", "a lacunary series is required")),
    }
}

/// `A_k(M) = {1/(M n_k) ≤ 1 − |z| ≤ M/n_k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusFamily {
    pub m: f64,
    pub exponents: Vec<u64>,
}

impl AnnulusFamily {
    pub fn new(m: f64, exponents: Vec<u64>) -> Result<Self> {
        if !(m > 1.0) {
            return Err(invalid("M", format!("need M > 1, got {m}")));
        }
        Ok(AnnulusFamily { m, exponents })
    }

    /// Depth range `(d_min, d_max)` of `A_k`, 1-based `k`, with `d_max`
    /// capped at 1.
    pub fn depth_range(&self, k: usize) -> (f64, f64) {
        let n = self.exponents[k - 1] as f64;
        (1.0 / (self.m * n), (self.m / n).min(1.0))
    }

    pub fn contains_depth(&self, d: f64) -> bool {
        (1..=self.exponents.len()).any(|k| {
            let (lo, hi) = self.depth_range(k);
            lo <= d && d <= hi
        })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.contains_depth(1.0 - z.norm())
    }

    /// Whether `A_k` and `A_{k+1}` are disjoint for every `k ≥ from`.
    pub fn disjoint_from(&self, from: usize) -> bool {
        (from..self.exponents.len()).all(|k| {
            let (lo, _) = self.depth_range(k);
            let (_, hi_next) = self.depth_range(k + 1);
            hi_next < lo
        })
    }
}

/// Empirical lower bound on an annulus together with the two correction
/// sums of the floor inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusFloor {
    pub j: usize,
    pub floor: f64,
    pub argmin: DiskPoint,
    /// `(4/n_j) Σ_{k<j} |a_k| n_k`.
    pub lower_correction: f64,
    /// `(4/n_j) Σ_{k>j} |a_k| n_k (1 − 1/(2n_j))^{n_k}`.
    pub upper_correction: f64,
    pub samples: usize,
}

/// The two correction sums for the `j`-th annulus (1-based).
pub fn floor_corrections(coeffs: &[Complex64], exponents: &[u64], j: usize) -> (f64, f64) {
    let nj = exponents[j - 1] as f64;
    let lower: f64 = (0..j - 1).map(|k| coeffs[k].norm() * exponents[k] as f64).sum::<f64>() * 4.0 / nj;
    let q = (1.0 - 1.0 / (2.0 * nj)).ln();
    let upper: f64 = (j..exponents.len())
        .map(|k| {
            let nk = exponents[k] as f64;
            coeffs[k].norm() * nk * (nk * q).exp()
        })
        .sum::<f64>()
        * 4.0
        / nj;
    (lower, upper)
}

/// Minimum of `(1 − |z|²)|z||g′(z)|` over area-uniform samples of `A_j(2)`.
pub fn annulus_floor(g: &AnalyticFunction, j: usize, samples: usize, seed: u64) -> Result<AnnulusFloor> {
    let (coeffs, exponents) = lacunary_parts(g)?;
    if j == 0 || j > exponents.len() {
        return Err(invalid("j", format!("annulus index {j} outside 1..={}", exponents.len())));
    }
    if samples < 1000 {
        return Err(invalid("samples", "need at least 10^3 samples"));
    }
    let family = AnnulusFamily::new(2.0, exponents.to_vec())?;
    let (dmin, dmax) = family.depth_range(j);
    let r_in = 1.0 - dmax;
    let r_out = 1.0 - dmin;
    let mut rng = seeded_rng(seed);
    let points: Vec<Complex64> = (0..samples)
        .map(|_| {
            let s: f64 = rng.r#gen();
            let t: f64 = rng.r#gen();
            let r = (r_in * r_in + s * (r_out * r_out - r_in * r_in)).sqrt();
            Complex64::from_polar(r, 2.0 * PI * t)
        })
        .collect();
    let values: Vec<f64> = points.par_iter().map(|&z| g.bloch_density(z) * z.norm()).collect();
    let (idx, floor) =
        values.iter().enumerate().fold((0, f64::INFINITY), |best, (i, &v)| if v < best.1 { (i, v) } else { best });
    let (lower_correction, upper_correction) = floor_corrections(coeffs, exponents, j);
    Ok(AnnulusFloor { j, floor, argmin: DiskPoint::clamped(points[idx]), lower_correction, upper_correction, samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffAnnuliSup {
    pub m: f64,
    pub sup: f64,
    pub points: usize,
    /// Set when no grid point lies outside the annuli.
    pub coverage_warning: bool,
}

/// `sup (1 − |z|²)|g′(z)|` over grid points outside `A(M)`. Functions
/// that are not lacunary have no annuli.
pub fn off_annuli_sup(g: &AnalyticFunction, m: f64, grid: &BlochGrid) -> Result<OffAnnuliSup> {
    grid.validate()?;
    let family = match g {
        AnalyticFunction::Lacunary { exponents, .. } => Some(AnnulusFamily::new(m, exponents.clone())?),
        _ => {
            if !(m > 1.0) {
                return Err(invalid("M", format!("need M > 1, got {m}")));
            }
            None
        }
    };
    let mut sup = 0.0f64;
    let mut points = 0usize;
    for r in grid.radii() {
        if family.as_ref().is_some_and(|f| f.contains_depth(1.0 - r)) {
            continue;
        }
        points += grid.angles_at(r);
        sup = sup.max(grid.circle_sup(r, &|z| g.bloch_density(z)));
    }
    Ok(OffAnnuliSup { m, sup, points, coverage_warning: points == 0 })
}

/// Radial/angular resolution of the area-function quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaQuadrature {
    pub panels_per_octave: usize,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl Default for AreaQuadrature {
    fn default() -> Self {
        AreaQuadrature { panels_per_octave: 8, radial_nodes: 4, angular_nodes: 64 }
    }
}

/// `(∫_{Γ(ξ) ∩ K(ε,g), 1−|z| ≥ δ} dA/(1 − |z|²)²)^{1/2}` with the default
/// Stolz aperture at `ξ = e^{i·xi_angle}`.
pub fn area_function_truncated(
    g: &AnalyticFunction,
    eps: f64,
    xi_angle: f64,
    delta: f64,
    quad: &AreaQuadrature,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(invalid("delta", format!("truncation must lie in (0, 1/4), got {delta}")));
    }
    let stolz = StolzAngle::with_default_aperture(xi_angle);
    let octaves = (-delta.log2()).ceil() as usize;
    let panels = octaves * quad.panels_per_octave;
    let lo = delta.log2();
    let gl = gauss_legendre_unit(quad.radial_nodes);
    let width = -lo / panels as f64;
    let total: f64 = (0..panels)
        .into_par_iter()
        .map(|p| {
            let mut acc = 0.0;
            for &(u, w) in &gl {
                let t = lo + (p as f64 + u) * width;
                let d = t.exp2();
                let r = 1.0 - d;
                let h = stolz.half_angle_at_depth(d);
                if h == 0.0 || r <= 0.0 {
                    continue;
                }
                let n = quad.angular_nodes;
                let mut hits = 0usize;
                for i in 0..n {
                    let theta = xi_angle - h + 2.0 * h * (i as f64 + 0.5) / n as f64;
                    let z = Complex64::from_polar(r, theta);
                    if g.bloch_density(z) > eps {
                        hits += 1;
                    }
                }
                // dA = r dr dθ / π and dr = d·ln2·dt
                let measure = 2.0 * h * hits as f64 / n as f64;
                let omr2 = d * (2.0 - d);
                acc += w * width * std::f64::consts::LN_2 * d * r / PI * measure / (omr2 * omr2);
            }
            acc
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    // summed in a fixed order so reports are reproducible
    Ok(total.sqrt())
}

/// Cauchy-estimate comparison at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyOscPoint {
    pub z: DiskPoint,
    /// `None` when the oscillation integral vanishes.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyOscReport {
    pub max_ratio: f64,
    pub skipped: usize,
    pub points: Vec<CauchyOscPoint>,
}

/// Square over the arc centred at `arg z` whose length `2(1 − |z|)`
/// makes it contain the disc `|ζ − z| < 1 − |z|`.
pub fn cauchy_square(z: DiskPoint) -> CarlesonSquare {
    let rho = 1.0 - z.modulus();
    let reach = (rho / z.modulus()).min(1.0).asin() / PI;
    let m = (2.0 * rho).max(reach) * (1.0 + 1e-12);
    CarlesonSquare::new(Arc { center_angle: z.z().arg().rem_euclid(2.0 * PI), length: m.min(1.0) })
}

/// Max over the grid of `(1 − |z|²)²|f′(z)|²` divided by the mean square
/// oscillation of `Re f` over `Q_z`.
pub fn cauchyosc_ratio(f: &AnalyticFunction, z_grid: &[DiskPoint], quad: &BoxQuadrature) -> Result<CauchyOscReport> {
    let mut points = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        if !(z.modulus() > 0.75) {
            return Err(invalid("z_grid", format!("need 3/4 < |z| < 1, got |z| = {}", z.modulus())));
        }
        let q = cauchy_square(z);
        // the rule's own area, so constants have zero oscillation
        let area = integrate_square(|_| 1.0, &q, quad).value;
        let mean = integrate_square(|w| f.eval(w).re, &q, quad).value / area;
        let osc = integrate_square(|w| (f.eval(w).re - mean).powi(2), &q, quad).value / area;
        let lhs = (z.one_minus_norm_sqr() * f.deriv(z.z()).norm()).powi(2);
        // quadrature noise on a constant is far below this
        let ratio = if osc > 1e-12 * (1.0 + mean * mean) && osc.is_finite() { Some(lhs / osc) } else { None };
        points.push(CauchyOscPoint { z, ratio });
    }
    let max_ratio = points.iter().filter_map(|p| p.ratio).fold(0.0, f64::max);
    let skipped = points.iter().filter(|p| p.ratio.is_none()).count();
    Ok(CauchyOscReport { max_ratio, skipped, points })
}

/// Everything the counterexample run records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub spec: SequenceSpec,
    pub terms: usize,
    pub coeffs: Vec<Complex64>,
    pub exponents: Vec<u64>,
    pub floors: Vec<AnnulusFloor>,
    pub off_annuli: Vec<OffAnnuliSup>,
    /// `(δ, truncated area function at ξ = 1)`.
    pub area_table: Vec<(f64, f64)>,
    pub area_eps: f64,
}

/// Settings for [`counterexample_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSettings {
    pub floor_indices: Vec<usize>,
    pub floor_samples: usize,
    pub m_values: Vec<f64>,
    pub grid: BlochGrid,
    pub deltas: Vec<f64>,
    pub area_quad: AreaQuadrature,
    pub seed: u64,
}

impl Default for CounterexampleSettings {
    fn default() -> Self {
        CounterexampleSettings {
            floor_indices: (1..=9).collect(),
            floor_samples: 10_000,
            m_values: vec![3.0, 5.0, 8.0],
            grid: BlochGrid { levels: 24, per_octave: 6, angular_factor: 4.0, min_angular: 64, max_angular: 1 << 14 },
            deltas: (3..=9).map(|k| 2f64.powi(-k)).collect(),
            area_quad: AreaQuadrature::default(),
            seed: 7,
        }
    }
}

pub fn counterexample_report(
    spec: &SequenceSpec,
    terms: usize,
    settings: &CounterexampleSettings,
) -> Result<CounterexampleReport> {
    let g = build_counterexample(spec, terms)?;
    let (coeffs, exponents) = lacunary_parts(&g)?;
    let floors = settings
        .floor_indices
        .iter()
        .filter(|&&j| j >= 1 && j <= terms)
        .map(|&j| annulus_floor(&g, j, settings.floor_samples, settings.seed.wrapping_add(j as u64)))
        .collect::<Result<Vec<_>>>()?;
    let off_annuli =
        settings.m_values.iter().map(|&m| off_annuli_sup(&g, m, &settings.grid)).collect::<Result<Vec<_>>>()?;
    // half the smallest floor beyond the first few annuli
    let tail_floor = floors.iter().filter(|f| f.j * 2 > terms).map(|f| f.floor).fold(f64::INFINITY, f64::min);
    let area_eps = if tail_floor.is_finite() && tail_floor > 0.0 { 0.5 * tail_floor } else { 0.05 };
    let area_table = settings
        .deltas
        .iter()
        .map(|&d| Ok((d, area_function_truncated(&g, area_eps, 0.0, d, &settings.area_quad)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CounterexampleReport {
        spec: spec.clone(),
        terms,
        coeffs: coeffs.to_vec(),
        exponents: exponents.to_vec(),
        floors,
        off_annuli,
        area_table,
        area_eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn evaluation_and_derivatives() {
        let p = AnalyticFunction::polynomial(vec![c(1.0), c(2.0), c(3.0)]);
        let z = Complex64::new(0.3, -0.2);
        assert!((p.eval(z) - (1.0 + 2.0 * z + 3.0 * z * z)).norm() < 1e-15);
        assert!((p.deriv(z) - (2.0 + 6.0 * z)).norm() < 1e-15);
        let l = AnalyticFunction::neg_log_one_minus();
        assert!((l.deriv(z) - (c(1.0) - z).inv()).norm() < 1e-15);
        let lac = AnalyticFunction::lacunary(vec![c(1.0), c(1.0)], vec![1, 100]).unwrap();
        assert!((lac.eval(z) - (z + z.powu(100))).norm() < 1e-15);
        assert!(AnalyticFunction::lacunary(vec![c(1.0), c(1.0)], vec![3, 3]).is_err());
    }

    #[test]
    fn huge_exponents_stay_finite() {
        let g = build_counterexample(&SequenceSpec::Factorial, 20).unwrap();
        let z = Complex64::from_polar(1.0 - 1e-12, 1.0);
        assert!(g.eval(z).is_finite());
        assert!(g.deriv(z).is_finite());
    }

    #[test]
    fn seminorm_examples() {
        let grid = BlochGrid::default();
        assert_abs_diff_eq!(bloch_seminorm(&AnalyticFunction::identity(), &grid).unwrap(), 1.0, epsilon = 1e-15);
        let l = bloch_seminorm(&AnalyticFunction::neg_log_one_minus(), &grid).unwrap();
        assert_abs_diff_eq!(l, 2.0, epsilon = 1e-3);
        let g = build_counterexample(&SequenceSpec::Factorial, 8).unwrap();
        let s = bloch_seminorm(&g, &grid).unwrap();
        assert!(s.is_finite() && s > 0.5);
    }

    #[test]
    fn little_bloch_examples() {
        let radii = [0.9, 0.99, 0.999];
        let poly = little_bloch_profile(&AnalyticFunction::polynomial(vec![c(0.0), c(1.0), c(1.0)]), &radii).unwrap();
        assert!(poly[2].1 < poly[0].1 && poly[2].1 < 0.01);
        let log = little_bloch_profile(&AnalyticFunction::neg_log_one_minus(), &radii).unwrap();
        assert_abs_diff_eq!(log[2].1, 1.999, epsilon = 1e-9);
    }

    #[test]
    fn level_set_examples() {
        let id = AnalyticFunction::identity();
        assert!(!level_set_member(&id, 2.0, DiskPoint::new(0.3, 0.3).unwrap()));
        assert!(level_set_member(&id, 0.5, DiskPoint::ORIGIN));
        let l = AnalyticFunction::neg_log_one_minus();
        assert!(level_set_member(&l, 1.9, DiskPoint::new(1.0 - 1e-4, 0.0).unwrap()));
    }

    #[test]
    fn sequences() {
        let n = sequence_exponents(&SequenceSpec::Factorial, 10).unwrap();
        assert_eq!(n, vec![1, 2, 6, 24, 120, 720, 5040, 40320, 362880, 3628800]);
        for (k, w) in n.windows(2).enumerate() {
            assert_eq!(w[1] / w[0], k as u64 + 2);
        }
        let dyadic: Vec<u64> = (1..=10).map(|k| 1 << k).collect();
        assert!(matches!(sequence_exponents(&SequenceSpec::Custom(dyadic), 10), Err(Error::NotSuperLacunary(_))));
        assert_eq!(sequence_exponents(&SequenceSpec::SuperLacunary, 4).unwrap(), vec![2, 4, 12, 48]);
        assert!(sequence_exponents(&SequenceSpec::Factorial, 21).is_err());
    }

    #[test]
    fn factorial_annuli_are_disjoint_once_the_ratio_exceeds_four() {
        // A_k(2), A_{k+1}(2) separate iff n_{k+1}/n_k = k + 1 > 4
        let n = sequence_exponents(&SequenceSpec::Factorial, 12).unwrap();
        let fam = AnnulusFamily::new(2.0, n).unwrap();
        assert!(fam.disjoint_from(4));
        assert!(!fam.disjoint_from(3));
        assert!(!fam.disjoint_from(2));
    }

    #[test]
    fn off_annuli_without_annuli_is_the_seminorm() {
        let s = off_annuli_sup(&AnalyticFunction::identity(), 3.0, &BlochGrid::default()).unwrap();
        assert_eq!(s.sup, 1.0);
        let g = AnalyticFunction::lacunary(vec![c(1.0)], vec![1]).unwrap();
        let covered = off_annuli_sup(&g, 1e6, &BlochGrid::default()).unwrap();
        assert!(covered.coverage_warning);
        assert_eq!(covered.sup, 0.0);
    }

    #[test]
    fn area_function_vanishes_off_the_level_set() {
        let q = AreaQuadrature::default();
        assert_eq!(area_function_truncated(&AnalyticFunction::identity(), 2.0, 0.0, 0.01, &q).unwrap(), 0.0);
        let small = AnalyticFunction::polynomial(vec![c(0.0), c(0.1)]);
        assert_eq!(area_function_truncated(&small, 0.2, 0.0, 0.01, &q).unwrap(), 0.0);
        assert!(area_function_truncated(&small, 0.2, 0.0, 0.3, &q).is_err());
    }

    #[test]
    fn area_function_of_the_whole_stolz_angle() {
        // with K everything, the integrand is (1 − |z|²)^{−2} over the Stolz region;
        // compare against a brute-force Riemann sum in polar coordinates
        let g = AnalyticFunction::identity();
        let delta = 0.05;
        let v = area_function_truncated(&g, -1.0, 0.0, delta, &AreaQuadrature::default()).unwrap();
        let stolz = StolzAngle::with_default_aperture(0.0);
        let (nr, nt) = (4000, 2000);
        let mut acc = 0.0;
        for i in 0..nr {
            let r = (1.0 - delta) * (i as f64 + 0.5) / nr as f64;
            for k in 0..nt {
                let t = -PI + 2.0 * PI * (k as f64 + 0.5) / nt as f64;
                if stolz.contains(Complex64::from_polar(r, t)) {
                    acc += r / (1.0 - r * r).powi(2);
                }
            }
        }
        acc *= (1.0 - delta) / nr as f64 * 2.0 * PI / nt as f64 / PI;
        assert_abs_diff_eq!(v * v / acc, 1.0, epsilon = 5e-3);
    }

    #[test]
    fn cauchy_square_contains_the_disc() {
        for &(r, t) in &[(0.8, 0.0), (0.95, 2.0), (0.999, -1.0)] {
            let z = DiskPoint::polar(r, t).unwrap();
            let q = cauchy_square(z);
            let rho = 1.0 - r;
            for k in 0..64 {
                let w = z.z() + Complex64::from_polar(0.999 * rho, 2.0 * PI * k as f64 / 64.0);
                assert!(q.contains(w));
            }
        }
    }

    #[test]
    fn cauchyosc_examples() {
        let quad = BoxQuadrature { radial_levels: 8, ..BoxQuadrature::default() };
        let grid: Vec<DiskPoint> = [0.8, 0.9, 0.99].iter().map(|&r| DiskPoint::polar(r, 0.5).unwrap()).collect();
        let constant = cauchyosc_ratio(&AnalyticFunction::constant(c(3.0)), &grid, &quad).unwrap();
        assert_eq!(constant.skipped, 3);
        let id = cauchyosc_ratio(&AnalyticFunction::identity(), &grid, &quad).unwrap();
        assert_eq!(id.skipped, 0);
        let ratios: Vec<f64> = id.points.iter().map(|p| p.ratio.unwrap()).collect();
        let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 2.0, "{ratios:?}");
        assert!(cauchyosc_ratio(&AnalyticFunction::identity(), &[DiskPoint::ORIGIN], &quad).is_err());
    }
}
