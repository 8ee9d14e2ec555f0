//! The Bergman projection by quadrature, Cesàro operators `T_g f = ∫₀^z f g′`
//! and estimates of their spectral radius.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::AnalyticFunction;
use crate::carleson::{Arc, BoxQuadrature, DEFAULT_SHIFTS};
use crate::error::{invalid, Error, Result};
use crate::geometry::{hyperbolic_distance, DiskPoint, MetricConvention, MobiusMap};
use crate::numerics::gauss_legendre_unit;
use crate::weights::{maximize_over_pairs, pair_radius_cap, sample_pairs, B2Scanner};

/// Polar product rule for `∫_𝔻 F dA` with `dA = r dr dθ/π`: Gauss–Legendre
/// panels in `r` halving toward the circle, trapezoid in `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionQuadrature {
    pub radial_panels: u32,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl Default for ProjectionQuadrature {
    fn default() -> Self {
        ProjectionQuadrature { radial_panels: 12, radial_nodes: 12, angular_nodes: 256 }
    }
}

impl ProjectionQuadrature {
    pub fn validate(&self) -> Result<()> {
        if !(1..=48).contains(&self.radial_panels) || !(1..=64).contains(&self.radial_nodes) || self.angular_nodes < 4 {
            return Err(invalid("quadrature", "need 1..=48 panels, 1..=64 radial nodes and at least 4 angles"));
        }
        Ok(())
    }

    pub fn refined(&self) -> Self {
        ProjectionQuadrature {
            radial_panels: (self.radial_panels + 4).min(48),
            radial_nodes: (self.radial_nodes + 4).min(64),
            angular_nodes: self.angular_nodes * 2,
        }
    }

    /// Nodes and weights (weights sum to 1).
    pub fn rule(&self) -> Vec<(Complex64, f64)> {
        let gl = gauss_legendre_unit(self.radial_nodes);
        let mut edges: Vec<f64> = (0..self.radial_panels).map(|k| 1.0 - 0.5f64.powi(k as i32)).collect();
        edges.push(1.0);
        let n = self.angular_nodes;
        let mut out = Vec::with_capacity(edges.len() * gl.len() * n);
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            for &(x, wx) in &gl {
                let r = a + (b - a) * x;
                let weight = 2.0 * r * (b - a) * wx / n as f64;
                for j in 0..n {
                    out.push((Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / n as f64), weight));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub values: Vec<Complex64>,
    /// Largest change under one refinement.
    pub tolerance: f64,
    pub divergent: bool,
}

fn project_with(f: &[Complex64], rule: &[(Complex64, f64)], z: Complex64) -> Complex64 {
    rule.iter()
        .zip(f)
        .map(|(&(zeta, w), &fz)| {
            let k = Complex64::new(1.0, 0.0) - zeta.conj() * z;
            fz * w / (k * k)
        })
        .sum()
}

/// `P(f)(z) = ∫_𝔻 f(ζ)/(1 − ζ̄z)² dA(ζ)` at each grid point.
pub fn project(
    f: impl Fn(Complex64) -> Complex64 + Sync,
    z_grid: &[Complex64],
    quad: &ProjectionQuadrature,
) -> Result<ProjectionReport> {
    quad.validate()?;
    if z_grid.iter().any(|z| !(z.norm() < 1.0)) {
        return Err(invalid("z_grid", "projection points must lie in the open disc"));
    }
    let eval = |q: &ProjectionQuadrature| -> Vec<Complex64> {
        let rule = q.rule();
        let fv: Vec<Complex64> = rule.par_iter().map(|&(z, _)| f(z)).collect();
        z_grid.par_iter().map(|&z| project_with(&fv, &rule, z)).collect()
    };
    let coarse = eval(quad);
    let values = eval(&quad.refined());
    let tolerance = coarse.iter().zip(&values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let finite = values.iter().all(|v| v.re.is_finite() && v.im.is_finite());
    let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    Ok(ProjectionReport { values, tolerance, divergent: !finite || !(tolerance <= 1e-2 * scale) })
}

/// `max_ζ |P(f)(φ_z(ζ))·φ_z′(ζ) − P((f∘φ_z)·φ_z′)(ζ)|` with both sides
/// computed by the same rule.
pub fn conformal_identity_residual(
    f: impl Fn(Complex64) -> Complex64 + Sync,
    z: DiskPoint,
    zeta_grid: &[Complex64],
    quad: &ProjectionQuadrature,
) -> Result<f64> {
    quad.validate()?;
    let phi = MobiusMap::new(z);
    let rule = quad.rule();
    let fv: Vec<Complex64> = rule.par_iter().map(|&(p, _)| f(p)).collect();
    let gv: Vec<Complex64> = rule.par_iter().map(|&(p, _)| f(phi.apply_complex(p)) * phi.derivative(p)).collect();
    let res = zeta_grid
        .par_iter()
        .map(|&zeta| {
            let lhs = project_with(&fv, &rule, phi.apply_complex(zeta)) * phi.derivative(zeta);
            let rhs = project_with(&gv, &rule, zeta);
            (lhs - rhs).norm()
        })
        .reduce(|| 0.0, f64::max);
    if !res.is_finite() {
        return Err(invalid("f", "projection is not finite"));
    }
    Ok(res)
}

/// Truncation of `T_g` to `span{e_0, …, e_{N−1}}`, `e_n = √(n+1) z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CesaroMatrix {
    pub symbol: AnalyticFunction,
    pub matrix: DMatrix<Complex64>,
}

/// Entry `(k, n)` equals `b_{k−n−1}·√(n+1)/(k·√(k+1))` where `g′ = Σ b_m z^m`.
pub fn cesaro_matrix(g: &AnalyticFunction, n: usize) -> CesaroMatrix {
    let b = g.derivative_coeffs(n);
    let matrix = DMatrix::from_fn(n, n, |k, j| {
        if k > j {
            b[k - j - 1] * (((j + 1) as f64).sqrt() / (k as f64 * ((k + 1) as f64).sqrt()))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    CesaroMatrix { symbol: g.clone(), matrix }
}

impl CesaroMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Monomial coefficients of `T_g f` (up to degree N − 1) for `f = Σ c_n z^n`.
    pub fn apply_monomial(&self, c: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        // z^n = e_n/√(n+1)
        let x = nalgebra::DVector::from_fn(n, |i, _| c.get(i).copied().unwrap_or_default() / ((i + 1) as f64).sqrt());
        let y = &self.matrix * x;
        (0..n).map(|k| y[k] * ((k + 1) as f64).sqrt()).collect()
    }

    pub fn is_strictly_lower(&self) -> bool {
        let n = self.dim();
        (0..n).all(|k| (k..n).all(|j| self.matrix[(k, j)] == Complex64::new(0.0, 0.0)))
    }

    /// Eigenvalues; read off the diagonal for triangular matrices.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let n = self.dim();
        let lower = (0..n).all(|k| (k + 1..n).all(|j| self.matrix[(k, j)] == Complex64::new(0.0, 0.0)));
        if lower {
            return Ok((0..n).map(|i| self.matrix[(i, i)]).collect());
        }
        self.matrix
            .clone()
            .try_schur(1e-14, 10_000)
            .map(|s| s.eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default())
            .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))
    }
}

/// Antiderivative coefficients of `f·g′` for polynomial `f`, computed
/// directly from the series; the reference for [`CesaroMatrix`].
pub fn cesaro_direct(g: &AnalyticFunction, c: &[Complex64], n: usize) -> Vec<Complex64> {
    let b = g.derivative_coeffs(n);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, ci) in c.iter().enumerate() {
        for (m, bm) in b.iter().enumerate() {
            let k = i + m + 1;
            if k < n {
                out[k] += ci * bm / k as f64;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    MatrixTruncation,
    B2Criterion,
    EpsilonCriterion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumStatus {
    Ok,
    /// The predicate disagrees between the two finest scan depths.
    Inconclusive,
}

/// One diagnostic row: `(N, eigen radius, ‖M^{N/2}‖^{2/N})` for
/// truncations, `(λ, passed)` for the B₂ bisection, `(ε, C, C at double
/// budget)` for the ε-criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub param: f64,
    pub values: Vec<f64>,
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub method: SpectrumMethod,
    pub p: f64,
    pub radius: f64,
    pub trace: Vec<TraceEntry>,
    pub xi_grid: Vec<f64>,
    pub max_level: Option<u32>,
    pub seed: Option<u64>,
    pub status: SpectrumStatus,
}

fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Eigenvalue radius of truncations `N = 8, 16, …, n_max`; strictly lower
/// triangular truncations are nilpotent, so the Gelfand quotient
/// `‖M^k‖^{1/k}` at `k = N/2` is recorded beside it.
pub fn truncation_spectral_radius(g: &AnalyticFunction, n_max: usize) -> Result<SpectrumReport> {
    if n_max < 8 {
        return Err(invalid("n", "need N ≥ 8"));
    }
    let mut trace = Vec::new();
    let mut radius = 0.0;
    let mut n = 8;
    while n <= n_max {
        let m = cesaro_matrix(g, n);
        radius = m.eigenvalues()?.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let k = n / 2;
        let mut power = DMatrix::<Complex64>::identity(n, n);
        let mut base = m.matrix.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                power = &power * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        let gelfand = spectral_norm(&power).powf(1.0 / k as f64);
        trace.push(TraceEntry { param: n as f64, values: vec![radius, gelfand], passed: None });
        if n == n_max {
            break;
        }
        n = (2 * n).min(n_max);
    }
    Ok(SpectrumReport {
        method: SpectrumMethod::MatrixTruncation,
        p: 2.0,
        radius,
        trace,
        xi_grid: Vec::new(),
        max_level: None,
        seed: None,
        status: SpectrumStatus::Ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSettings {
    pub max_level: u32,
    pub quad: BoxQuadrature,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        // the predicate needs about eight levels to settle near the threshold
        SpectrumSettings { max_level: 8, quad: BoxQuadrature { radial_levels: 8, ..BoxQuadrature::default() } }
    }
}

/// Least `λ` with `exp(p·Re(g/(λξ))) ∈ B₂` for every `ξ` of a uniform grid,
/// by bisection to absolute tolerance `tol`.
pub fn spectral_radius_b2(
    g: &AnalyticFunction,
    p: f64,
    xi_count: usize,
    tol: f64,
    settings: &SpectrumSettings,
) -> Result<SpectrumReport> {
    if !(p > 0.0) {
        return Err(invalid("p", format!("need p > 0, got {p}")));
    }
    if xi_count < 16 {
        return Err(invalid("xi_count", "need at least 16 directions"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "tolerance must be positive"));
    }
    let xi: Vec<f64> = (0..xi_count).map(|j| 2.0 * PI * j as f64 / xi_count as f64).collect();
    let scanner = B2Scanner::new(Arc::full_circle(), settings.max_level, &DEFAULT_SHIFTS, &settings.quad)?;
    let coarse_level = settings.max_level.saturating_sub(1);
    let coarse = B2Scanner::new(Arc::full_circle(), coarse_level, &DEFAULT_SHIFTS, &settings.quad)?;
    let values = |s: &B2Scanner| -> Vec<Vec<Complex64>> {
        s.points().into_iter().map(|pts| pts.par_iter().map(|&z| g.eval(z)).collect()).collect()
    };
    let fine_vals = values(&scanner);
    let coarse_vals = values(&coarse);
    let passes = |s: &B2Scanner, vals: &[Vec<Complex64>], lambda: f64| -> Result<bool> {
        for &t in &xi {
            let rot = Complex64::from_polar(p / lambda, -t);
            if !s.scan_samples(vals, |gz| (gz * rot).re)?.in_b2 {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut trace = Vec::new();
    let mut inconclusive = false;
    let mut test = |lambda: f64| -> Result<bool> {
        let ok = passes(&scanner, &fine_vals, lambda)?;
        if ok != passes(&coarse, &coarse_vals, lambda)? {
            inconclusive = true;
        }
        trace.push(TraceEntry { param: lambda, values: Vec::new(), passed: Some(ok) });
        Ok(ok)
    };
    let radius = if test(tol)? {
        0.0
    } else {
        let mut lo = tol;
        let mut hi = 1.0f64.max(2.0 * tol);
        while !test(hi)? {
            lo = hi;
            hi *= 2.0;
            if hi > 1e6 {
                return Err(invalid("g", "the B₂ criterion fails for every tested λ"));
            }
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if test(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(SpectrumReport {
        method: SpectrumMethod::B2Criterion,
        p,
        radius,
        trace,
        xi_grid: xi,
        max_level: Some(settings.max_level),
        seed: None,
        status: if inconclusive { SpectrumStatus::Inconclusive } else { SpectrumStatus::Ok },
    })
}

/// `max |g(z) − g(ζ)| − ε β(z, ζ)` over sampled pairs.
pub fn analytic_epsilon_condition(
    g: &AnalyticFunction,
    eps: f64,
    pair_budget: usize,
    seed: u64,
    convention: MetricConvention,
) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(invalid("eps", format!("need ε ≥ 0, got {eps}")));
    }
    if pair_budget < 1000 {
        return Err(invalid("pair_budget", "need at least 10^3 pairs"));
    }
    let pairs = sample_pairs(pair_budget, seed, 1.0);
    let v = maximize_over_pairs(&pairs, seed, pair_radius_cap(pair_budget, 1.0), |z, w| {
        (g.eval(z) - g.eval(w)).norm() - eps * hyperbolic_distance(z, w, convention)
    });
    Ok(v.max(0.0))
}

/// Relative change allowed when the pair budget doubles.
pub const EPS_STABILITY: f64 = 0.01;

/// Smallest grid `ε` whose constant `C(ε)` is stable under budget doubling.
pub fn spectral_radius_eps(
    g: &AnalyticFunction,
    pair_budget: usize,
    eps_grid: &[f64],
    seed: u64,
    convention: MetricConvention,
) -> Result<SpectrumReport> {
    if eps_grid.is_empty() || eps_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("eps_grid", "ε grid must be nonempty and increasing"));
    }
    let rows: Vec<TraceEntry> = eps_grid
        .iter()
        .map(|&eps| {
            let a = analytic_epsilon_condition(g, eps, pair_budget, seed, convention)?;
            let b = analytic_epsilon_condition(g, eps, 2 * pair_budget, seed, convention)?;
            let stable = (b - a).abs() <= EPS_STABILITY * a.max(1.0);
            Ok(TraceEntry { param: eps, values: vec![a, b], passed: Some(stable) })
        })
        .collect::<Result<_>>()?;
    let radius = rows.iter().find(|r| r.passed == Some(true)).map_or(f64::INFINITY, |r| r.param);
    Ok(SpectrumReport {
        method: SpectrumMethod::EpsilonCriterion,
        p: 2.0,
        radius,
        trace: rows,
        xi_grid: Vec::new(),
        max_level: None,
        seed: Some(seed),
        status: if radius.is_finite() { SpectrumStatus::Ok } else { SpectrumStatus::Inconclusive },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> Vec<Complex64> {
        [0.0, 0.3, 0.6, 0.85].iter().map(|&r| Complex64::from_polar(r, 0.7 * r + 0.2)).collect()
    }

    #[test]
    fn rule_weights_sum_to_one() {
        let total: f64 = ProjectionQuadrature::default().rule().iter().map(|p| p.1).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn projection_examples() {
        let q = ProjectionQuadrature::default();
        let z = grid();
        let sq = project(|w| w * w, &z, &q).unwrap();
        for (v, z) in sq.values.iter().zip(&z) {
            assert!((v - z * z).norm() < 1e-6);
        }
        let bar = project(|w| w.conj(), &z, &q).unwrap();
        assert!(bar.values.iter().all(|v| v.norm() < 1e-6));
        let modsq = project(|w| Complex64::new(w.norm_sqr(), 0.0), &z, &q).unwrap();
        assert!(modsq.values.iter().all(|v| (v - 0.5).norm() < 1e-6));
        assert!(!modsq.divergent && modsq.tolerance < 1e-6);
    }

    #[test]
    fn conformal_identity_examples() {
        let q = ProjectionQuadrature::default();
        let zeta = grid();
        let poly = |w: Complex64| w * w * w - 2.0 * w;
        let r = conformal_identity_residual(poly, DiskPoint::polar(0.5, 1.0).unwrap(), &zeta, &q).unwrap();
        assert!(r < 1e-6, "{r}");
        let modsq = |w: Complex64| Complex64::new(w.norm_sqr(), 0.0);
        for z in [DiskPoint::ORIGIN, DiskPoint::new(0.5, 0.0).unwrap(), DiskPoint::new(0.0, 0.5).unwrap()] {
            let r = conformal_identity_residual(modsq, z, &zeta, &q).unwrap();
            assert!(r < 1e-5, "{r}");
        }
    }

    #[test]
    fn cesaro_matrix_examples() {
        let v = cesaro_matrix(&AnalyticFunction::identity(), 16);
        assert!(v.is_strictly_lower());
        assert!(v.eigenvalues().unwrap().iter().all(|e| *e == Complex64::new(0.0, 0.0)));
        // T_z(z^n) = z^{n+1}/(n+1)
        assert_abs_diff_eq!(v.matrix[(3, 2)].re, 3f64.sqrt() / (3.0 * 2.0), epsilon = 1e-15);
        let zero = cesaro_matrix(&AnalyticFunction::constant(Complex64::new(2.0, 0.0)), 8);
        assert!(zero.matrix.iter().all(|e| e.norm() == 0.0));
        let log = cesaro_matrix(&AnalyticFunction::neg_log_one_minus(), 12);
        assert!((0..12).all(|k| (0..k).all(|j| log.matrix[(k, j)].norm() > 0.0)));
    }

    #[test]
    fn cesaro_entries_match_quadrature() {
        // ⟨T_g e_n, e_k⟩ by polar quadrature of T_g e_n · conj(e_k)
        let g = AnalyticFunction::neg_log_one_minus();
        let m = cesaro_matrix(&g, 6);
        let rule = ProjectionQuadrature { radial_panels: 1, radial_nodes: 16, angular_nodes: 32 }.rule();
        for (k, n) in [(1, 0), (3, 1), (5, 2), (2, 2)] {
            // T_g(z^n) = Σ_m z^{n+m+1}/(n+m+1) truncated at degree 5
            let tg = |z: Complex64| (n + 1..6).map(|d| z.powu(d as u32) / d as f64).sum::<Complex64>();
            let val: Complex64 = rule
                .iter()
                .map(|&(z, w)| {
                    tg(z) * ((n + 1) as f64).sqrt() * (z.conj().powu(k as u32) * ((k + 1) as f64).sqrt()) * w
                })
                .sum();
            assert!((val - m.matrix[(k, n)]).norm() < 1e-12, "({k},{n}) {val} {}", m.matrix[(k, n)]);
        }
    }

    #[test]
    fn cesaro_matches_direct_antiderivative() {
        let g = AnalyticFunction::polynomial(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, 0.25),
        ]);
        let m = cesaro_matrix(&g, 16);
        let c: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64 * 0.3 - 1.0, 0.1 * i as f64)).collect();
        let a = m.apply_monomial(&c);
        let b = cesaro_direct(&g, &c, 16);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn truncation_radius_is_zero() {
        let r = truncation_spectral_radius(&AnalyticFunction::identity(), 64).unwrap();
        assert_eq!(r.radius, 0.0);
        assert_eq!(r.trace.len(), 4);
        let log = truncation_spectral_radius(&AnalyticFunction::neg_log_one_minus(), 32).unwrap();
        assert_eq!(log.radius, 0.0);
        assert!(log.trace.iter().all(|t| t.values[1] > 0.0));
        assert!(truncation_spectral_radius(&AnalyticFunction::identity(), 4).is_err());
    }

    #[test]
    fn b2_spectral_radius_examples() {
        let s = SpectrumSettings { max_level: 7, quad: BoxQuadrature { radial_levels: 7, ..BoxQuadrature::default() } };
        let bounded = AnalyticFunction::identity().scaled(Complex64::new(0.5, 0.0));
        let r = spectral_radius_b2(&bounded, 2.0, 16, 0.05, &s).unwrap();
        assert!(r.radius <= 0.05, "{r:?}");
        // exp(2Re(g/λξ)) ≍ |1 − z|^{−2cosθ/λ}: B₂ iff λ > 1
        let log = spectral_radius_b2(&AnalyticFunction::neg_log_one_minus(), 2.0, 16, 0.05, &s).unwrap();
        assert!((log.radius - 1.0).abs() <= 0.1, "{log:?}");
    }

    #[test]
    fn eps_criterion_examples() {
        let conv = MetricConvention::Squared;
        let grid = [0.0, 1.0, 1.5, 1.9, 2.0, 2.1, 2.5];
        let b = spectral_radius_eps(&AnalyticFunction::identity(), 4000, &grid, 1, conv).unwrap();
        assert_eq!(b.radius, 0.0);
        let log = spectral_radius_eps(&AnalyticFunction::neg_log_one_minus(), 4000, &grid, 1, conv).unwrap();
        assert!((1.9..=2.1).contains(&log.radius), "{log:?}");
    }
}
