//! Hyperbolic nets, the McShane extension, and the splitting of a
//! log-weight into a bounded part plus a hyperbolic Lipschitz part.
//!
//! Everything here uses [`MetricConvention::Standard`]: the extension is
//! only Lipschitz when β satisfies the triangle inequality.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carleson::{Arc, BoxQuadrature};
use crate::error::{invalid, Error, Result};
use crate::geometry::{hyperbolic_distance, DiskPoint, MetricConvention};
use crate::numerics::{halton2, seeded_rng};
use crate::weights::{
    b2_characteristic, bmo_disc_norm, epsilon_condition, gamma, maximize_over_pairs, oscillation_constant,
    sample_pairs, GammaReport, Weight,
};

const CONV: MetricConvention = MetricConvention::Standard;

fn dist(a: Complex64, b: Complex64) -> f64 {
    hyperbolic_distance(a, b, CONV)
}

/// Hyperbolic area of `{|z| < r}` for the metric `|dz|/(1 − |z|²)`.
pub fn hyperbolic_area(r: f64) -> f64 {
    PI * r * r / ((1.0 - r) * (1.0 + r))
}

/// Maps a unit-square point to a hyperbolic-area-uniform point of `{|z| < r_max}`.
fn hyperbolic_uniform(a: f64, b: f64, r_max: f64) -> Complex64 {
    let k = r_max * r_max / ((1.0 - r_max) * (1.0 + r_max));
    let x = a * k;
    Complex64::from_polar((x / (1.0 + x)).sqrt(), 2.0 * PI * b)
}

fn halton_offset(seed: u64) -> u64 {
    seed % 1_000_003
}

/// Points spread hyperbolically over `{|z| < r_max}`.
pub fn probe_points(count: usize, r_max: f64, seed: u64) -> Vec<Complex64> {
    let off = halton_offset(seed.wrapping_add(0x51ed)) + 7_919;
    (0..count as u64)
        .map(|i| {
            let (a, b) = halton2(off + i);
            hyperbolic_uniform(a, b, r_max)
        })
        .collect()
}

/// Buckets points by rows of hyperbolic radius and angular bins of
/// roughly constant hyperbolic width, for ball queries.
#[derive(Debug, Clone)]
struct NetIndex {
    h: f64,
    rows: Vec<Vec<Vec<usize>>>,
    len: usize,
}

impl NetIndex {
    fn new(points: &[Complex64], h: f64) -> Self {
        let t_max = points.iter().map(|z| z.norm().min(1.0 - 1e-16).atanh()).fold(0.0, f64::max);
        let n_rows = (t_max / h).floor() as usize + 1;
        let rows = (0..n_rows)
            .map(|i| {
                let bins = (PI * (2.0 * i as f64 * h).sinh() / h).floor().clamp(1.0, 65536.0) as usize;
                vec![Vec::new(); bins]
            })
            .collect();
        let mut idx = NetIndex { h, rows, len: 0 };
        for (i, &z) in points.iter().enumerate() {
            idx.insert(i, z);
        }
        idx
    }

    fn row_of(&self, r: f64) -> usize {
        ((r.min(1.0 - 1e-16).atanh() / self.h) as usize).min(self.rows.len() - 1)
    }

    fn bin_of(n: usize, theta: f64) -> usize {
        (((theta / (2.0 * PI)).rem_euclid(1.0) * n as f64) as usize).min(n - 1)
    }

    fn insert(&mut self, i: usize, z: Complex64) {
        let row = self.row_of(z.norm());
        let n = self.rows[row].len();
        self.rows[row][Self::bin_of(n, z.arg())].push(i);
        self.len += 1;
    }

    /// Visits a superset of the points within β < `d` of `z`; returns
    /// whether every point was visited.
    fn candidates(&self, z: Complex64, d: f64, mut visit: impl FnMut(usize)) -> bool {
        let delta = d.tanh();
        let everything = |visit: &mut dyn FnMut(usize)| {
            self.rows.iter().flatten().flatten().for_each(|&j| visit(j));
            true
        };
        if !(delta < 1.0 - 1e-12) {
            return everything(&mut visit);
        }
        // the pseudo-hyperbolic ball is a euclidean disc
        let m = z.norm_sqr();
        let den = 1.0 - delta * delta * m;
        let c = z * ((1.0 - delta * delta) / den);
        let rad = delta * (1.0 - m) / den;
        let cn = c.norm();
        let (i0, i1) = (self.row_of((cn - rad).max(0.0)), self.row_of(cn + rad));
        let full = rad >= cn * (1.0 - 1e-9);
        if full && i0 == 0 && i1 == self.rows.len() - 1 {
            return everything(&mut visit);
        }
        let half = if full { PI } else { (rad / cn).min(1.0).asin() };
        for row in &self.rows[i0..=i1] {
            let n = row.len();
            let width = 2.0 * PI / n as f64;
            let k = (2.0 * half / width).ceil() as usize + 3;
            if full || k >= n {
                row.iter().flatten().for_each(|&j| visit(j));
            } else {
                let start = Self::bin_of(n, c.arg() - half) + n - 1;
                for b in 0..k {
                    row[(start + b) % n].iter().for_each(|&j| visit(j));
                }
            }
        }
        false
    }

    /// Distance from `z` to the nearest indexed point.
    fn nearest(&self, points: &[Complex64], z: Complex64, start: f64) -> f64 {
        let mut d = start.max(1e-3);
        loop {
            let mut best = f64::INFINITY;
            let all = self.candidates(z, d, |j| best = best.min(dist(z, points[j])));
            if best <= d || all {
                return best;
            }
            d *= 2.0;
        }
    }
}

/// Separated point set covering the truncated disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicNet {
    pub points: Vec<DiskPoint>,
    /// Pairwise β is at least this.
    pub separation: f64,
    /// Largest distance from a probe point to the net.
    pub covering: f64,
    pub r_max: f64,
    pub candidates: usize,
    pub probes: usize,
    /// Set when `covering > 2·separation`: the candidate mesh was too coarse.
    pub coverage_warning: bool,
}

impl HyperbolicNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Default number of greedy candidates: a fixed multiple of the packing
/// bound `area / area(ball of radius s/2)`.
pub fn default_candidates(s: f64, r_max: f64) -> usize {
    let ball = PI * (0.5 * s).sinh().powi(2);
    (64.0 * hyperbolic_area(r_max) / ball).clamp(256.0, 2e6) as usize
}

pub fn build_net(s: f64, r_max: f64, seed: u64) -> Result<HyperbolicNet> {
    build_net_with(s, r_max, seed, default_candidates(s, r_max), 4000)
}

/// Greedy net over a low-discrepancy candidate stream, seeded with the origin.
pub fn build_net_with(s: f64, r_max: f64, seed: u64, candidates: usize, probes: usize) -> Result<HyperbolicNet> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(invalid("separation", format!("need s > 0, got {s}")));
    }
    if !(r_max > 0.0 && r_max < 1.0) {
        return Err(invalid("r_max", format!("need 0 < r_max < 1, got {r_max}")));
    }
    let off = halton_offset(seed) + 1;
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    let boundary = Complex64::new(r_max, 0.0);
    let mut index = NetIndex::new(&[boundary], s);
    index.insert(0, pts[0]);
    for i in 0..candidates as u64 {
        let (a, b) = halton2(off + i);
        let z = hyperbolic_uniform(a, b, r_max);
        let mut ok = true;
        index.candidates(z, s, |j| ok = ok && dist(z, pts[j]) >= s);
        if ok {
            index.insert(pts.len(), z);
            pts.push(z);
        }
    }
    let probe = probe_points(probes, r_max, seed);
    let covering = probe.par_iter().map(|&z| index.nearest(&pts, z, s)).reduce(|| 0.0, f64::max);
    Ok(HyperbolicNet {
        points: pts.iter().map(|&z| DiskPoint::clamped(z)).collect(),
        separation: s,
        covering,
        r_max,
        candidates,
        probes,
        coverage_warning: covering > 2.0 * s,
    })
}

/// `v(z) = min_j (value_j + L·β(z, z_j))`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McShane {
    points: Vec<DiskPoint>,
    values: Vec<f64>,
    lipschitz: f64,
    #[serde(skip)]
    index: OnceLock<(Vec<Complex64>, NetIndex)>,
}

impl McShane {
    pub fn points(&self) -> &[DiskPoint] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn index(&self) -> &(Vec<Complex64>, NetIndex) {
        self.index.get_or_init(|| {
            let pts: Vec<Complex64> = self.points.iter().map(|p| p.z()).collect();
            let idx = NetIndex::new(&pts, 0.5);
            (pts, idx)
        })
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        let vmin = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        if self.lipschitz == 0.0 {
            return vmin;
        }
        let (pts, idx) = self.index();
        let term = |j: usize| self.values[j] + self.lipschitz * dist(z, pts[j]);
        let mut best = f64::INFINITY;
        idx.candidates(z, 1.0, |j| best = best.min(term(j)));
        if !best.is_finite() {
            return (0..pts.len()).map(term).fold(f64::INFINITY, f64::min);
        }
        // a term below `best` needs β(z, z_j) < (best − min value)/L
        let reach = (best - vmin) / self.lipschitz;
        idx.candidates(z, reach, |j| best = best.min(term(j)));
        best
    }
}

/// Builds the extension after checking the values are `L`-Lipschitz on the net.
pub fn mcshane_extend(points: &[DiskPoint], values: &[f64], lipschitz: f64) -> Result<McShane> {
    if points.is_empty() || points.len() != values.len() {
        return Err(invalid("values", "need one value per net point"));
    }
    if !(lipschitz >= 0.0 && lipschitz.is_finite()) {
        return Err(invalid("lipschitz", format!("need a finite L ≥ 0, got {lipschitz}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("values", "net values must be finite"));
    }
    let violation = (0..points.len()).into_par_iter().find_map_first(|i| {
        (i + 1..points.len()).find_map(|j| {
            let d = dist(points[i].z(), points[j].z());
            let gap = (values[i] - values[j]).abs();
            (values[i] > values[j] + lipschitz * d || values[j] > values[i] + lipschitz * d)
                .then_some(Error::LipschitzViolation { i, j, gap, distance: d, lipschitz })
        })
    });
    if let Some(e) = violation {
        return Err(e);
    }
    Ok(McShane { points: points.to_vec(), values: values.to_vec(), lipschitz, index: OnceLock::new() })
}

/// Pairs below this distance are ignored by the empirical Lipschitz
/// estimate; rounding in `v` would dominate the quotient.
pub const MIN_PAIR_DISTANCE: f64 = 1e-4;

/// `sup |v(z) − v(ζ)|/β(z, ζ)` over sampled pairs in `{|z| < r_max}`,
/// plus short geodesic steps out of the first net points.
pub fn empirical_lipschitz(
    v: impl Fn(Complex64) -> f64 + Sync,
    anchors: &[Complex64],
    pair_budget: usize,
    r_max: f64,
    seed: u64,
) -> f64 {
    let mut pairs = sample_pairs(pair_budget, seed, r_max);
    let mut rng = seeded_rng(seed ^ 0xa11ce);
    for &a in anchors.iter().take(256) {
        let step = Complex64::from_polar(0.25f64.tanh(), rng.r#gen::<f64>() * 2.0 * PI);
        // φ_a(step) is at β = 0.25 from a
        let b = (a - step) / (Complex64::new(1.0, 0.0) - a.conj() * step);
        if b.norm() < r_max {
            pairs.push((a, b));
        }
    }
    maximize_over_pairs(&pairs, seed, r_max, |z, w| {
        let d = dist(z, w);
        if d < MIN_PAIR_DISTANCE {
            0.0
        } else {
            (v(z) - v(w)).abs() / d
        }
    })
    .max(0.0)
}

/// Tuning shared by [`decompose`], [`distance_sandwich`] and [`s_norm_upper`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecomposeSettings {
    pub r_max: f64,
    /// Floor for the net separation when the measured `C_ε` vanishes.
    pub s_min: f64,
    pub pair_budget: usize,
    pub probes: usize,
    /// Dyadic depth of the B₂ precondition check.
    pub b2_level: u32,
    pub quad: BoxQuadrature,
    /// Times the separation may grow by 3/2 after a Lipschitz violation.
    pub max_enlargements: u32,
    pub seed: u64,
}

impl Default for DecomposeSettings {
    fn default() -> Self {
        DecomposeSettings {
            r_max: 0.999,
            s_min: 1.0,
            pair_budget: 20_000,
            probes: 4000,
            b2_level: 8,
            quad: BoxQuadrature::default(),
            max_enlargements: 6,
            seed: 1,
        }
    }
}

impl DecomposeSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return Err(invalid("r_max", format!("need 0 < r_max < 1, got {}", self.r_max)));
        }
        if !(self.s_min > 0.0) {
            return Err(invalid("s_min", "separation floor must be positive"));
        }
        if self.probes == 0 {
            return Err(invalid("probes", "need at least one probe"));
        }
        self.quad.validate()
    }
}

/// `log w = u + v` with `u` bounded and `v` hyperbolic Lipschitz.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decomposition {
    pub f: Weight,
    /// `None` means `v ≡ 0`.
    pub lipschitz_part: Option<McShane>,
    pub eps: f64,
    pub eta: f64,
    /// Measured `C(4ε)` of the ε-condition.
    pub c_eps: f64,
    pub separation: f64,
    pub net_size: usize,
    pub covering: f64,
    pub coverage_warning: bool,
    pub u_sup: f64,
    pub v_lip: f64,
    pub r_max: f64,
    pub probes: usize,
    pub pair_budget: usize,
    pub seed: u64,
}

impl Decomposition {
    pub fn v(&self, z: Complex64) -> f64 {
        self.lipschitz_part.as_ref().map_or(0.0, |m| m.eval(z))
    }

    pub fn u(&self, z: Complex64) -> f64 {
        self.components(z).0
    }

    /// `(u, v, f)` at `z`.
    pub fn components(&self, z: Complex64) -> (f64, f64, f64) {
        let f = self.f.log_eval(z);
        let v = self.v(z);
        (f - v, v, f)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// `sup |f|` on the probes, and whether it stays put when the truncation
/// radius moves to `1 − (1 − r_max)²`.
fn bounded_signature(f: &Weight, r_max: f64, probes: usize, seed: u64) -> (f64, bool) {
    let sup = |r: f64| probe_points(probes, r, seed).par_iter().map(|&z| f.log_eval(z).abs()).reduce(|| 0.0, f64::max);
    let inner = sup(r_max);
    let outer = sup(1.0 - (1.0 - r_max) * (1.0 - r_max));
    (inner, inner.is_finite() && outer <= 1.01 * inner)
}

/// Splits `f = log w` into `u + v` with `v` Lipschitz of constant `4ε + η`.
/// A `gamma_cert` whose passing bound is `≤ ε` stands in for the B₂ check
/// of `e^{f/ε}`.
pub fn decompose(
    f: &Weight,
    eps: f64,
    eta: f64,
    gamma_cert: Option<&GammaReport>,
    settings: &DecomposeSettings,
) -> Result<Decomposition> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("need ε > 0, got {eps}")));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(invalid("eta", format!("need η > 0, got {eta}")));
    }
    settings.validate()?;
    let certified = gamma_cert.is_some_and(|g| g.first_passing <= eps);
    if !certified
        && !b2_characteristic(&f.powf(1.0 / eps), Arc::full_circle(), settings.b2_level, &settings.quad)?.in_b2
    {
        return Err(Error::NotB2(eps));
    }
    let mut out = Decomposition {
        f: f.clone(),
        lipschitz_part: None,
        eps,
        eta,
        c_eps: 0.0,
        separation: 0.0,
        net_size: 0,
        covering: 0.0,
        coverage_warning: false,
        u_sup: 0.0,
        v_lip: 0.0,
        r_max: settings.r_max,
        probes: settings.probes,
        pair_budget: settings.pair_budget,
        seed: settings.seed,
    };
    let (sup_f, bounded) = bounded_signature(f, settings.r_max, settings.probes, settings.seed);
    if bounded {
        // bounded functions need no Lipschitz part
        out.u_sup = sup_f;
        return Ok(out);
    }
    let lipschitz = 4.0 * eps + eta;
    out.c_eps = epsilon_condition(f, 4.0 * eps, settings.pair_budget, settings.seed, CONV)?;
    let mut s = (out.c_eps / eta).max(settings.s_min);
    let mut attempt = 0;
    let (net, ext) = loop {
        let net = build_net(s, settings.r_max, settings.seed)?;
        let values: Vec<f64> = net.points.par_iter().map(|p| f.log_eval(p.z())).collect();
        match mcshane_extend(&net.points, &values, lipschitz) {
            Ok(ext) => break (net, ext),
            Err(e @ Error::LipschitzViolation { .. }) => {
                attempt += 1;
                if attempt > settings.max_enlargements {
                    return Err(e);
                }
                s *= 1.5;
            }
            Err(e) => return Err(e),
        }
    };
    let probes = probe_points(settings.probes, settings.r_max, settings.seed ^ 0x9e37);
    out.u_sup = probes.par_iter().map(|&z| (f.log_eval(z) - ext.eval(z)).abs()).reduce(|| 0.0, f64::max);
    let anchors: Vec<Complex64> = net.points.iter().map(|p| p.z()).collect();
    out.v_lip = empirical_lipschitz(|z| ext.eval(z), &anchors, settings.pair_budget, settings.r_max, settings.seed);
    out.separation = s;
    out.net_size = net.len();
    out.covering = net.covering;
    out.coverage_warning = net.coverage_warning;
    out.lipschitz_part = Some(ext);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SandwichStatus {
    Ok,
    Failed,
    /// γ moved by more than 10% between the two finest scan depths.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichSettings {
    pub gamma_level: u32,
    pub quad: BoxQuadrature,
    pub osc_budget: usize,
    pub decompose: DecomposeSettings,
}

impl Default for SandwichSettings {
    fn default() -> Self {
        SandwichSettings {
            gamma_level: 10,
            quad: BoxQuadrature::default(),
            osc_budget: 4000,
            decompose: DecomposeSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub gamma: f64,
    pub gamma_coarse: f64,
    pub dist_lower: f64,
    pub dist_upper: f64,
    pub sandwich_ok: bool,
    pub status: SandwichStatus,
    /// Oscillation constants at the budget and twice the budget.
    pub oscillation: [f64; 2],
    pub tol: f64,
    pub eps: f64,
    pub eta: f64,
    pub c_eps: f64,
    pub net_size: usize,
    pub u_sup: f64,
    pub v_lip: f64,
}

/// Two-sided check `2γ ≤ dist_HLip(f, L^∞) ≤ 4γ`: the lower side from the
/// last failing bisection point, the upper side from [`decompose`] at
/// `ε = γ(1 + tol)`, `η = γ·tol`.
pub fn distance_sandwich(f: &Weight, tol: f64, settings: &SandwichSettings) -> Result<SandwichReport> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid("tol", format!("need 0 < tol < 1, got {tol}")));
    }
    let seed = settings.decompose.seed;
    let osc = [
        oscillation_constant(f, settings.osc_budget, seed, CONV)?,
        oscillation_constant(f, 2 * settings.osc_budget, seed, CONV)?,
    ];
    if !osc.iter().all(|c| c.is_finite()) {
        return Err(invalid("f", "e^f does not have bounded hyperbolic oscillation"));
    }
    let g = gamma(f, tol, settings.gamma_level, &settings.quad)?;
    let coarse = gamma(f, tol, settings.gamma_level.saturating_sub(2).max(2), &settings.quad)?;
    let mut report = SandwichReport {
        gamma: g.gamma,
        gamma_coarse: coarse.gamma,
        dist_lower: 0.0,
        dist_upper: 0.0,
        sandwich_ok: true,
        status: SandwichStatus::Ok,
        oscillation: osc,
        tol,
        eps: 0.0,
        eta: 0.0,
        c_eps: 0.0,
        net_size: 0,
        u_sup: 0.0,
        v_lip: 0.0,
    };
    if g.gamma > 0.0 {
        let eps = g.gamma * (1.0 + tol);
        let eta = g.gamma * tol;
        let d = decompose(f, eps, eta, Some(&g), &settings.decompose)?;
        report.eps = eps;
        report.eta = eta;
        report.c_eps = d.c_eps;
        report.net_size = d.net_size;
        report.u_sup = d.u_sup;
        report.v_lip = d.v_lip;
        report.dist_upper = d.v_lip;
        report.dist_lower = 2.0 * g.last_failing * (1.0 - tol);
        report.sandwich_ok =
            report.dist_lower <= report.dist_upper && report.dist_upper <= 4.0 * g.gamma * (1.0 + 3.0 * tol);
    }
    let drift = (g.gamma - coarse.gamma).abs();
    report.status = if drift > 0.1 * g.gamma.max(coarse.gamma) + tol {
        SandwichStatus::Inconclusive
    } else if report.sandwich_ok {
        SandwichStatus::Ok
    } else {
        SandwichStatus::Failed
    };
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SNormEntry {
    pub eps: f64,
    /// `u_sup + v_lip`; `None` when `e^{f/ε}` fails the B₂ check.
    pub total: Option<f64>,
    pub u_sup: f64,
    pub v_lip: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SNormReport {
    pub value: f64,
    pub entries: Vec<SNormEntry>,
    /// `sup |f|` when `f` looks bounded (the split `u = f`, `v = 0`).
    pub bounded_candidate: Option<f64>,
}

/// Upper bound for `inf {‖u‖_∞ + ‖v‖_HLip}` over decompositions at each
/// grid ε, with `η = eta_rel·ε`.
pub fn s_norm_upper(f: &Weight, eps_grid: &[f64], eta_rel: f64, settings: &DecomposeSettings) -> Result<SNormReport> {
    let (sup_f, bounded) = bounded_signature(f, settings.r_max, settings.probes, settings.seed);
    let bounded_candidate = bounded.then_some(sup_f);
    let mut entries = Vec::with_capacity(eps_grid.len());
    if bounded_candidate.is_none() {
        for &eps in eps_grid {
            match decompose(f, eps, eta_rel * eps, None, settings) {
                Ok(d) => {
                    entries.push(SNormEntry { eps, total: Some(d.u_sup + d.v_lip), u_sup: d.u_sup, v_lip: d.v_lip })
                }
                Err(Error::NotB2(_)) => entries.push(SNormEntry { eps, total: None, u_sup: f64::NAN, v_lip: f64::NAN }),
                Err(e) => return Err(e),
            }
        }
    }
    let value = entries.iter().filter_map(|e| e.total).chain(bounded_candidate).fold(f64::INFINITY, f64::min);
    Ok(SNormReport { value, entries, bounded_candidate })
}

/// Extends `f` to the plane by `f(1/z̄)` outside the disc.
pub fn reflect(f: impl Fn(Complex64) -> f64, z: Complex64) -> f64 {
    if z.norm_sqr() <= 1.0 {
        f(z)
    } else {
        f(1.0 / z.conj())
    }
}

/// `bmo_disc_norm(v)/γ` for the Lipschitz part of a decomposition; the
/// empirical constant in the lower estimate `γ ≤ ‖f − u‖_BMO / c`.
pub fn bmo_lower_constant(d: &Decomposition, gamma: f64, disc_budget: usize, samples: usize, seed: u64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(invalid("gamma", "need γ > 0"));
    }
    let part = d.clone();
    let v = Weight::custom("lipschitz part", move |z| part.v(z));
    Ok(bmo_disc_norm(&v, disc_budget, samples, seed)? / gamma)
}
