//! Hyperbolic geometry of the unit disc.
//!
//! Points of the disc, the involutive Möbius automorphisms
//! `φ_z(ζ) = (z − ζ)/(1 − z̄ζ)`, the two readings of the hyperbolic
//! metric, geodesic sampling and hyperbolic arc length.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the open unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct DiskPoint {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    re: f64,
    im: f64,
}

impl TryFrom<RawPoint> for DiskPoint {
    type Error = Error;
    fn try_from(raw: RawPoint) -> Result<Self> {
        DiskPoint::new(raw.re, raw.im)
    }
}

impl From<DiskPoint> for RawPoint {
    fn from(p: DiskPoint) -> Self {
        RawPoint { re: p.re, im: p.im }
    }
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(re.is_finite() && im.is_finite()) || re.hypot(im) >= 1.0 {
            return Err(Error::OutsideDisc { re, im });
        }
        Ok(DiskPoint { re, im })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn polar(radius: f64, angle: f64) -> Result<Self> {
        Self::from_complex(Complex64::from_polar(radius, angle))
    }

    /// Pulls a point back inside the disc. Used when roundoff in a
    /// composed map lands exactly on the circle.
    pub(crate) fn clamped(z: Complex64) -> Self {
        let r = z.norm();
        if r < 1.0 {
            DiskPoint { re: z.re, im: z.im }
        } else {
            let s = (1.0 - f64::EPSILON) / r;
            DiskPoint { re: z.re * s, im: z.im * s }
        }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// `1 − |z|²`, computed as `(1 − |z|)(1 + |z|)`.
    pub fn one_minus_norm_sqr(&self) -> f64 {
        let r = self.modulus();
        (1.0 - r) * (1.0 + r)
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Self {
        p.z()
    }
}

/// The disc automorphism `φ_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub base: DiskPoint,
}

impl MobiusMap {
    pub fn new(base: DiskPoint) -> Self {
        MobiusMap { base }
    }

    pub fn apply_complex(&self, zeta: Complex64) -> Complex64 {
        let z = self.base.z();
        (z - zeta) / (Complex64::new(1.0, 0.0) - z.conj() * zeta)
    }

    pub fn apply(&self, zeta: DiskPoint) -> DiskPoint {
        DiskPoint::clamped(self.apply_complex(zeta.z()))
    }

    /// `φ_z′(ζ) = −(1 − |z|²)/(1 − z̄ζ)²`.
    pub fn derivative(&self, zeta: Complex64) -> Complex64 {
        let z = self.base.z();
        let d = Complex64::new(1.0, 0.0) - z.conj() * zeta;
        -(1.0 - z.norm_sqr()) / (d * d)
    }
}

pub fn mobius_apply(map: &MobiusMap, zeta: DiskPoint) -> DiskPoint {
    map.apply(zeta)
}

/// Which formula stands behind `β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricConvention {
    /// `½ log((1 + ρ²)/(1 − ρ²))` with `ρ = |φ_z(ζ)|`.
    #[default]
    Squared,
    /// `½ log((1 + ρ)/(1 − ρ))`, the usual hyperbolic distance.
    Standard,
}

/// Pseudo-hyperbolic distance `|φ_z(ζ)|`, clamped to `[0, 1)`.
pub fn pseudo_distance(z: Complex64, zeta: Complex64) -> f64 {
    let num = (z - zeta).norm();
    let den = (Complex64::new(1.0, 0.0) - z.conj() * zeta).norm();
    if den == 0.0 {
        return 1.0 - f64::EPSILON;
    }
    (num / den).min(1.0 - f64::EPSILON / 2.0)
}

/// `1 − ρ²` where `ρ = |φ_z(ζ)|`, via the exact identity
/// `1 − |φ_z(ζ)|² = (1 − |z|²)(1 − |ζ|²)/|1 − z̄ζ|²`.
/// This stays accurate when `ρ` is within rounding of 1.
fn one_minus_rho_sq(z: Complex64, zeta: Complex64) -> f64 {
    let rz = z.norm();
    let rw = zeta.norm();
    let a = (1.0 - rz) * (1.0 + rz);
    let b = (1.0 - rw) * (1.0 + rw);
    let den = (Complex64::new(1.0, 0.0) - z.conj() * zeta).norm_sqr();
    (a * b / den).max(f64::MIN_POSITIVE)
}

/// Hyperbolic distance under the chosen convention. Finite for all
/// points of the disc.
pub fn hyperbolic_distance(z: Complex64, zeta: Complex64, convention: MetricConvention) -> f64 {
    let rho = pseudo_distance(z, zeta);
    let omr2 = one_minus_rho_sq(z, zeta);
    match convention {
        MetricConvention::Squared => {
            // (1 + ρ²)/(1 − ρ²) = 1 + 2ρ²/(1 − ρ²)
            let rho2 = rho * rho;
            0.5 * (2.0 * rho2 / omr2).ln_1p()
        }
        MetricConvention::Standard => {
            // (1 + ρ)/(1 − ρ) = 1 + 2ρ(1 + ρ)/(1 − ρ²)
            0.5 * (2.0 * rho * (1.0 + rho) / omr2).ln_1p()
        }
    }
}

pub fn beta(z: DiskPoint, zeta: DiskPoint, convention: MetricConvention) -> f64 {
    hyperbolic_distance(z.z(), zeta.z(), convention)
}

/// Points on the hyperbolic geodesic from `z` to `zeta`, equally spaced
/// in standard hyperbolic arclength, both endpoints included.
pub fn geodesic_sample(z: DiskPoint, zeta: DiskPoint, n: usize) -> Result<Vec<DiskPoint>> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("geodesic sampling needs at least 2 points, got {n}"),
        });
    }
    let map = MobiusMap::new(z);
    let w = map.apply_complex(zeta.z());
    let rho = w.norm();
    if rho == 0.0 {
        return Ok(vec![z; n]);
    }
    // φ_z sends z to 0 and ζ to w; the geodesic from 0 to w is the
    // radius through w, and φ_z is its own inverse.
    let total = rho.atanh();
    let dir = w / rho;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let p = if i == 0 {
            z
        } else if i == n - 1 {
            zeta
        } else {
            let t = total * i as f64 / (n - 1) as f64;
            let u = dir * t.tanh();
            map.apply(DiskPoint::clamped(u))
        };
        out.push(p);
    }
    Ok(out)
}

/// Hyperbolic length `∫ |dz|/(1 − |z|²)` of a polygonal path, using the
/// midpoint rule on each segment.
pub fn hyperbolic_length(path: &[DiskPoint]) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidParameter { name: "path", reason: "a path needs at least two points".into() });
    }
    let len = path
        .windows(2)
        .map(|w| {
            let a = w[0].z();
            let b = w[1].z();
            let m = (a + b) * 0.5;
            (b - a).norm() / (1.0 - m.norm_sqr())
        })
        .sum();
    Ok(len)
}

/// Subdivides every segment of `path` into `k` pieces.
pub fn refine_path(path: &[DiskPoint], k: usize) -> Vec<DiskPoint> {
    let k = k.max(1);
    let mut out = Vec::with_capacity(path.len() * k);
    for w in path.windows(2) {
        let a = w[0].z();
        let b = w[1].z();
        for i in 0..k {
            let t = i as f64 / k as f64;
            out.push(DiskPoint::clamped(a + (b - a) * t));
        }
    }
    if let Some(last) = path.last() {
        out.push(*last);
    }
    out
}

/// Non-tangential approach region `{|z − ξ| < σ(1 − |z|)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StolzAngle {
    /// Vertex angle; the vertex is `e^{i·vertex_angle}`.
    pub vertex_angle: f64,
    pub aperture: f64,
}

pub const DEFAULT_STOLZ_APERTURE: f64 = 2.0;

impl StolzAngle {
    pub fn new(vertex_angle: f64, aperture: f64) -> Result<Self> {
        if !(aperture > 1.0) || !aperture.is_finite() {
            return Err(Error::InvalidParameter {
                name: "aperture",
                reason: format!("Stolz aperture must exceed 1, got {aperture}"),
            });
        }
        Ok(StolzAngle { vertex_angle: vertex_angle.rem_euclid(2.0 * PI), aperture })
    }

    pub fn with_default_aperture(vertex_angle: f64) -> Self {
        StolzAngle { vertex_angle: vertex_angle.rem_euclid(2.0 * PI), aperture: DEFAULT_STOLZ_APERTURE }
    }

    pub fn vertex(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.vertex_angle)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.vertex()).norm() < self.aperture * (1.0 - z.norm())
    }

    /// Half-width in angle of the section of the region on the circle
    /// `|z| = 1 − d`; zero when the circle misses the region.
    pub fn half_angle_at_depth(&self, d: f64) -> f64 {
        let r = 1.0 - d;
        if r <= 0.0 {
            return PI;
        }
        // |re^{iθ} − 1|² = d² + 2r(1 − cos θ) < σ²d²
        let c = (self.aperture * self.aperture - 1.0) * d * d / (2.0 * r);
        if c <= 0.0 {
            0.0
        } else if c >= 2.0 {
            PI
        } else {
            (1.0 - c).acos()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(re, im).unwrap()
    }

    #[test]
    fn rejects_points_outside_the_disc() {
        assert!(DiskPoint::new(1.0, 0.0).is_err());
        assert!(DiskPoint::new(0.8, 0.8).is_err());
        assert!(DiskPoint::new(f64::NAN, 0.0).is_err());
        assert!(DiskPoint::new(0.5, -0.5).is_ok());
    }

    #[test]
    fn mobius_examples() {
        let z = p(0.3, -0.4);
        let map = MobiusMap::new(z);
        assert_abs_diff_eq!(map.apply(z).modulus(), 0.0, epsilon = 1e-15);
        assert!((map.apply(DiskPoint::ORIGIN).z() - z.z()).norm() < 1e-15);
        let zeta = p(0.1, 0.7);
        let phi0 = MobiusMap::new(DiskPoint::ORIGIN).apply(zeta);
        assert!((phi0.z() - -zeta.z()).norm() < 1e-15);
        let v = MobiusMap::new(p(0.5, 0.0)).apply(p(0.25, 0.0));
        assert_abs_diff_eq!(v.re(), 0.285_714_285_714_285_7, epsilon = 1e-15);
        let back = map.apply(map.apply(zeta));
        assert!((back.z() - zeta.z()).norm() < 1e-14);
    }

    #[test]
    fn distance_examples() {
        let z = p(0.2, 0.1);
        for c in [MetricConvention::Squared, MetricConvention::Standard] {
            assert_eq!(beta(z, z, c), 0.0);
        }
        let d = beta(DiskPoint::ORIGIN, p(0.5, 0.0), MetricConvention::Squared);
        assert_abs_diff_eq!(d, 0.255_412_811_882_995_3, epsilon = 1e-12);
        let s = beta(DiskPoint::ORIGIN, p(0.5, 0.0), MetricConvention::Standard);
        assert_abs_diff_eq!(s, 0.5f64.atanh(), epsilon = 1e-14);
    }

    #[test]
    fn distance_near_the_boundary_is_finite() {
        let a = p(1.0 - 1e-17_f64.max(f64::EPSILON), 0.0);
        let b = p(-(1.0 - f64::EPSILON), 0.0);
        for c in [MetricConvention::Squared, MetricConvention::Standard] {
            let d = beta(a, b, c);
            assert!(d.is_finite() && d > 30.0, "{d}");
        }
        // tiny separations keep full relative accuracy
        let x = p(0.999_999, 0.0);
        let y = p(0.999_999, 1e-9);
        let d = beta(x, y, MetricConvention::Standard);
        let rho = pseudo_distance(x.z(), y.z());
        assert_abs_diff_eq!(d / rho.atanh(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn geodesic_examples() {
        let r = p(0.6, 0.0);
        let two = geodesic_sample(DiskPoint::ORIGIN, r, 2).unwrap();
        assert_eq!(two, vec![DiskPoint::ORIGIN, r]);

        let q = p(0.3, 0.5);
        for pt in geodesic_sample(DiskPoint::ORIGIN, q, 9).unwrap() {
            let cross = pt.re() * q.im() - pt.im() * q.re();
            assert_abs_diff_eq!(cross, 0.0, epsilon = 1e-15);
        }

        let mid = geodesic_sample(p(-0.7, 0.0), p(0.7, 0.0), 5).unwrap()[2];
        assert_abs_diff_eq!(mid.modulus(), 0.0, epsilon = 1e-15);

        let same = geodesic_sample(q, q, 4).unwrap();
        assert!(same.iter().all(|x| *x == q));
        assert!(geodesic_sample(q, r, 1).is_err());
    }

    #[test]
    fn geodesic_is_evenly_spaced_and_has_the_right_length() {
        let a = p(0.5, 0.6);
        let b = p(-0.8, 0.1);
        let pts = geodesic_sample(a, b, 41).unwrap();
        let steps: Vec<f64> = pts.windows(2).map(|w| beta(w[0], w[1], MetricConvention::Standard)).collect();
        let total = beta(a, b, MetricConvention::Standard);
        for s in &steps {
            assert_abs_diff_eq!(*s, total / 40.0, epsilon = 1e-10);
        }
        let fine = geodesic_sample(a, b, 4001).unwrap();
        assert_abs_diff_eq!(hyperbolic_length(&fine).unwrap(), total, epsilon = 1e-6);
    }

    #[test]
    fn hyperbolic_length_examples() {
        let q = p(0.4, 0.4);
        assert_eq!(hyperbolic_length(&[q, q, q]).unwrap(), 0.0);

        let n = 10_000;
        let path: Vec<DiskPoint> = (0..=n).map(|i| p(0.9 * i as f64 / n as f64, 0.0)).collect();
        let len = hyperbolic_length(&path).unwrap();
        assert_abs_diff_eq!(len, 0.9f64.atanh(), epsilon = 1e-6);

        let rev: Vec<DiskPoint> = path.iter().rev().copied().collect();
        assert_abs_diff_eq!(hyperbolic_length(&rev).unwrap(), len, epsilon = 1e-12);
        assert!(hyperbolic_length(&[q]).is_err());
    }

    #[test]
    fn stolz_angle_contains_the_radius() {
        let s = StolzAngle::with_default_aperture(1.3);
        for k in 1..100 {
            let t = k as f64 / 100.0;
            assert!(s.contains(s.vertex() * (1.0 - t)));
        }
        assert!(!s.contains(-s.vertex() * 0.5));
        assert!(StolzAngle::new(0.0, 1.0).is_err());
    }

    #[test]
    fn stolz_half_angle_matches_membership() {
        let s = StolzAngle::new(0.0, 3.0).unwrap();
        for d in [0.3, 0.05, 1e-3] {
            let h = s.half_angle_at_depth(d);
            let inside = Complex64::from_polar(1.0 - d, h * 0.999);
            let outside = Complex64::from_polar(1.0 - d, h * 1.001);
            assert!(s.contains(inside));
            assert!(!s.contains(outside));
        }
    }
}
