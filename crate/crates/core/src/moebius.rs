//! Möbius transformations acting on the boundary sphere `ℂ ∪ {∞}` and, by
//! Poincaré extension, on upper half-space `ℍ³ = {(z, t) : t > 0}`.
//!
//! Distances on the boundary use the metric `|dz| / (1 + |z|²)`, which is half
//! the round metric of the unit sphere under stereographic projection. In
//! this normalization `d(0, ∞) = π/2` and the sphere has diameter `π/2`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite values with modulus above this are treated as `∞`.
pub const INFINITY_CUTOFF: f64 = 1e12;

/// Tolerance on `|ad - bc - 1|` after normalization.
pub const DETERMINANT_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A point of `∂∞ℍ³ ≃ ℂ ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Finite(Complex64),
    Infinity,
}

impl BoundaryPoint {
    pub const ZERO: BoundaryPoint = BoundaryPoint::Finite(ZERO);

    /// Canonicalizing constructor: non-finite values and values with modulus
    /// above [`INFINITY_CUTOFF`] become `∞`.
    pub fn new(z: Complex64) -> Self {
        Self::with_cutoff(z, INFINITY_CUTOFF)
    }

    pub fn with_cutoff(z: Complex64, cutoff: f64) -> Self {
        if !z.re.is_finite() || !z.im.is_finite() || z.norm() > cutoff {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(z)
        }
    }

    pub fn from_re_im(re: f64, im: f64) -> Self {
        Self::new(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            BoundaryPoint::Finite(z) => Some(z),
            BoundaryPoint::Infinity => None,
        }
    }

    /// Inverse stereographic projection onto the unit sphere in `ℝ³`, with
    /// `0` at the south pole and `∞` at the north pole.
    pub fn to_sphere(&self) -> [f64; 3] {
        match *self {
            BoundaryPoint::Infinity => [0.0, 0.0, 1.0],
            BoundaryPoint::Finite(z) => {
                let r2 = z.norm_sqr();
                let s = 1.0 / (1.0 + r2);
                [2.0 * z.re * s, 2.0 * z.im * s, (r2 - 1.0) * s]
            }
        }
    }

    /// Stereographic projection from the unit sphere. The input is
    /// normalized first; the north pole maps to `∞`.
    pub fn from_sphere(v: [f64; 3]) -> Self {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let (x, y, w) = (v[0] / n, v[1] / n, v[2] / n);
        let denom = 1.0 - w;
        if denom <= 0.0 {
            return BoundaryPoint::Infinity;
        }
        BoundaryPoint::new(Complex64::new(x / denom, y / denom))
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Infinity => write!(f, "inf"),
            BoundaryPoint::Finite(z) => write!(f, "{}", z),
        }
    }
}

impl From<Complex64> for BoundaryPoint {
    fn from(z: Complex64) -> Self {
        BoundaryPoint::new(z)
    }
}

/// Geodesic distance in the boundary metric `|dz| / (1 + |z|²)`.
///
/// Uses the chordal identity `tan d(p, q) = |p - q| / |1 + p̄q|`, which is
/// well conditioned for both nearby and antipodal pairs.
pub fn spherical_distance(p: BoundaryPoint, q: BoundaryPoint) -> f64 {
    match (p, q) {
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => 0.0,
        (BoundaryPoint::Finite(z), BoundaryPoint::Infinity)
        | (BoundaryPoint::Infinity, BoundaryPoint::Finite(z)) => 1.0f64.atan2(z.norm()),
        (BoundaryPoint::Finite(z), BoundaryPoint::Finite(w)) => {
            (z - w).norm().atan2((ONE + z.conj() * w).norm())
        }
    }
}

/// Largest possible value of [`spherical_distance`].
pub const SPHERE_DIAMETER: f64 = FRAC_PI_2;

/// A point `(z, t)` of upper half-space, `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpacePoint {
    pub z: Complex64,
    pub t: f64,
}

impl HalfSpacePoint {
    pub fn new(z: Complex64, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "half-space point needs finite z and t > 0, got ({z}, {t})"
            )));
        }
        Ok(HalfSpacePoint { z, t })
    }

    /// The point `(0, 1)`.
    pub fn origin() -> Self {
        HalfSpacePoint { z: ZERO, t: 1.0 }
    }

    /// Euclidean coordinates `(x, y, t)`.
    pub fn coords(&self) -> [f64; 3] {
        [self.z.re, self.z.im, self.t]
    }
}

/// Hyperbolic distance in `ℍ³`, from
/// `cosh d = 1 + (|z₁ - z₂|² + (t₁ - t₂)²) / (2 t₁ t₂)`
/// rewritten through `asinh` to avoid cancellation at short range.
pub fn hyperbolic_distance(p: HalfSpacePoint, q: HalfSpacePoint) -> f64 {
    let euclid = ((p.z - q.z).norm_sqr() + (p.t - q.t).powi(2)).sqrt();
    2.0 * (euclid / (2.0 * (p.t * q.t).sqrt())).asinh()
}

/// Trace classification of an element of `PSL(2, ℂ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ElementClass {
    Identity,
    Elliptic,
    Parabolic,
    /// Carries the translation length along the axis.
    Loxodromic(f64),
}

impl ElementClass {
    pub fn translation_length(&self) -> f64 {
        match *self {
            ElementClass::Loxodromic(l) => l,
            _ => 0.0,
        }
    }
}

/// A normalized `2×2` complex matrix `(a, b; c, d)` with `ad - bc = 1`,
/// acting by `z ↦ (az + b) / (cz + d)`. The overall sign is not tracked.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoebiusTransform {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MoebiusTransform {
    /// Builds the transformation, dividing all entries by a square root of
    /// the determinant.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        let entries_finite = [a, b, c, d].iter().all(|w| w.re.is_finite() && w.im.is_finite());
        if !entries_finite || !det.re.is_finite() || !det.im.is_finite() || det.norm() == 0.0 {
            return Err(Error::DegenerateMatrix(det));
        }
        let s = det.sqrt();
        Ok(MoebiusTransform { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        MoebiusTransform { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    /// `z ↦ z + w`.
    pub fn translation(w: Complex64) -> Self {
        MoebiusTransform { a: ONE, b: w, c: ZERO, d: ONE }
    }

    /// `z ↦ λz`, as the matrix `(√λ, 0; 0, 1/√λ)`.
    pub fn dilation(lambda: Complex64) -> Result<Self> {
        if lambda.norm() == 0.0 {
            return Err(Error::InvalidArgument("dilation factor must be nonzero".into()));
        }
        let s = lambda.sqrt();
        Ok(MoebiusTransform { a: s, b: ZERO, c: ZERO, d: ONE / s })
    }

    /// Rotation by `theta` about the vertical geodesic `0 – ∞`.
    pub fn rotation(theta: f64) -> Self {
        let h = Complex64::from_polar(1.0, theta / 2.0);
        MoebiusTransform { a: h, b: ZERO, c: ZERO, d: h.conj() }
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        MoebiusTransform { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self ∘ other`, renormalized to unit determinant.
    pub fn compose(&self, other: &Self) -> Self {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        let det = a * d - b * c;
        // A product of unimodular matrices cannot be singular; only rounding
        // moves the determinant away from 1.
        let s = det.sqrt();
        if s.norm() == 0.0 || !s.re.is_finite() || !s.im.is_finite() {
            return MoebiusTransform { a, b, c, d };
        }
        MoebiusTransform { a: a / s, b: b / s, c: c / s, d: d / s }
    }

    /// Largest entrywise distance to `other` up to the `±` ambiguity.
    pub fn distance_psl(&self, other: &Self) -> f64 {
        let diff = |sgn: f64| {
            [
                (self.a - other.a * sgn).norm(),
                (self.b - other.b * sgn).norm(),
                (self.c - other.c * sgn).norm(),
                (self.d - other.d * sgn).norm(),
            ]
            .into_iter()
            .fold(0.0, f64::max)
        };
        diff(1.0).min(diff(-1.0))
    }

    pub fn apply_boundary(&self, p: BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c == ZERO {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::new(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == ZERO {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::new((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Poincaré extension to upper half-space.
    pub fn apply_halfspace(&self, x: HalfSpacePoint) -> HalfSpacePoint {
        let cz_d = self.c * x.z + self.d;
        let t2 = x.t * x.t;
        let denom = cz_d.norm_sqr() + self.c.norm_sqr() * t2;
        let z = ((self.a * x.z + self.b) * cz_d.conj() + self.a * self.c.conj() * t2) / denom;
        HalfSpacePoint { z, t: x.t / denom }
    }

    /// Trace-based classification. `|tr² - 4| ≤ tol` wins over every other
    /// case, so borderline inputs resolve to parabolic (or identity).
    pub fn classify(&self, tol: f64) -> ElementClass {
        let tr = self.trace();
        let tr2 = tr * tr;
        if (tr2 - 4.0).norm() <= tol {
            let diagonal = self.b.norm() <= tol && self.c.norm() <= tol;
            if diagonal && (self.a - self.d).norm() <= tol {
                return ElementClass::Identity;
            }
            return ElementClass::Parabolic;
        }
        if tr2.im.abs() <= tol && tr2.re >= -tol && tr2.re < 4.0 {
            return ElementClass::Elliptic;
        }
        let lambda = larger_eigenvalue(tr);
        ElementClass::Loxodromic(2.0 * lambda.norm().ln())
    }

    /// Roots of `cz² + (d - a)z - b = 0`, with `∞` when `c ≈ 0`.
    pub fn fixed_points(&self) -> Result<Vec<BoundaryPoint>> {
        if self.classify(1e-12) == ElementClass::Identity {
            return Err(Error::NoIsolatedFixedPoints);
        }
        let scale = self.a.norm().max(self.d.norm()).max(1.0);
        let dma = self.d - self.a;
        if self.c.norm() <= 1e-14 * scale {
            let mut pts = vec![BoundaryPoint::Infinity];
            if dma.norm() > 1e-12 * scale {
                let z = BoundaryPoint::new(self.b / dma);
                if !z.is_infinite() {
                    pts.push(z);
                }
            }
            return Ok(pts);
        }
        let disc = (self.trace() * self.trace() - 4.0).sqrt();
        // (a - d ± disc) / 2c, choosing the sign that avoids cancellation and
        // recovering the partner root from the product of roots -b/c.
        let amd = -dma;
        let plus = amd + disc;
        let minus = amd - disc;
        let (big, _) = if plus.norm() >= minus.norm() { (plus, minus) } else { (minus, plus) };
        if big.norm() == 0.0 {
            return Ok(vec![BoundaryPoint::new(amd / (2.0 * self.c))]);
        }
        let z1 = big / (2.0 * self.c);
        let z2 = -2.0 * self.b / big;
        if disc.norm() <= 1e-12 * scale {
            return Ok(vec![BoundaryPoint::new(z1)]);
        }
        Ok(vec![BoundaryPoint::new(z1), BoundaryPoint::new(z2)])
    }

    /// Fixed point attached to the eigenvalue of larger modulus, i.e. the
    /// attracting fixed point of a loxodromic element. `None` unless the
    /// eigenvalue moduli differ.
    pub fn attracting_fixed_point(&self) -> Option<BoundaryPoint> {
        let lambda = larger_eigenvalue(self.trace());
        if lambda.norm() <= 1.0 + 1e-12 {
            return None;
        }
        // Eigenvector (b, λ - a) or equivalently (λ - d, c); take the better
        // conditioned pair.
        let u1 = (self.b, lambda - self.a);
        let u2 = (lambda - self.d, self.c);
        let (num, den) = if u1.0.norm() + u1.1.norm() >= u2.0.norm() + u2.1.norm() { u1 } else { u2 };
        if den == ZERO {
            return Some(BoundaryPoint::Infinity);
        }
        Some(BoundaryPoint::new(num / den))
    }

    pub fn repelling_fixed_point(&self) -> Option<BoundaryPoint> {
        self.inverse().attracting_fixed_point()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|w| w.im.abs() <= tol)
    }
}

impl Mul for MoebiusTransform {
    type Output = MoebiusTransform;

    fn mul(self, rhs: MoebiusTransform) -> MoebiusTransform {
        self.compose(&rhs)
    }
}

impl Mul for &MoebiusTransform {
    type Output = MoebiusTransform;

    fn mul(self, rhs: &MoebiusTransform) -> MoebiusTransform {
        self.compose(rhs)
    }
}

fn larger_eigenvalue(tr: Complex64) -> Complex64 {
    let disc = (tr * tr - 4.0).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    if l1.norm() >= l2.norm() {
        l1
    } else {
        l2
    }
}
