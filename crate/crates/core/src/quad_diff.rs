//! Holomorphic quadratic differentials `α = f(z) dz²` on the unit disk,
//! stored as truncated Taylor series, and the Schwarz-lemma radius inside
//! which a differential vanishing at the origin stays small.
//!
//! The disk carries the Poincaré metric `h = 4|dz|²/(1-|z|²)²`, in which
//! `‖α‖_h(z) = (1-|z|²)² |f(z)| / 4`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss_equation::ConformalFactorField;

/// Highest Taylor degree accepted.
pub const MAX_DEGREE: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadDifferential {
    coefficients: Vec<Complex64>,
}

impl QuadDifferential {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        Self::with_cap(coefficients, MAX_DEGREE)
    }

    pub fn with_cap(mut coefficients: Vec<Complex64>, max_degree: usize) -> Result<Self> {
        while coefficients.last().map_or(false, |c| *c == Complex64::new(0.0, 0.0)) {
            coefficients.pop();
        }
        if coefficients.len() > max_degree + 1 {
            return Err(Error::InvalidArgument(format!(
                "degree {} exceeds the cap {max_degree}",
                coefficients.len() - 1
            )));
        }
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite Taylor coefficient".into()));
        }
        Ok(QuadDifferential { coefficients })
    }

    pub fn zero() -> Self {
        QuadDifferential { coefficients: Vec::new() }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero();
        }
        QuadDifferential { coefficients: self.coefficients.iter().map(|c| c * s).collect() }
    }

    /// `f(z)` by Horner's rule.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// `‖α‖_h(z) = (1-|z|²)²|f(z)|/4`.
    pub fn norm_hyperbolic(&self, z: Complex64) -> Result<f64> {
        let r2 = z.norm_sqr();
        if !(r2 < 1.0) {
            return Err(Error::Domain(z));
        }
        Ok(self.norm_hyperbolic_unchecked(z))
    }

    pub(crate) fn norm_hyperbolic_unchecked(&self, z: Complex64) -> f64 {
        let w = 1.0 - z.norm_sqr();
        w * w * self.eval(z).norm() / 4.0
    }

    /// `‖α‖_g(z) = e^{-2u(z)} ‖α‖_h(z)` for `g = e^{2u} h`, with `u`
    /// interpolated bilinearly from the solved field.
    pub fn norm_induced(&self, u: &ConformalFactorField, z: Complex64) -> Result<f64> {
        let uz = u.interpolate(z)?;
        Ok((-2.0 * uz).exp() * self.norm_hyperbolic(z)?)
    }

    /// Sampled supremum of `‖α‖_h` over the disk, with its location.
    pub fn sup_norm_hyperbolic(&self, sampling: &SupNormSampling) -> (f64, Complex64) {
        let mut best = (0.0, Complex64::new(0.0, 0.0));
        if self.is_zero() {
            return best;
        }
        for i in 0..=sampling.radii {
            let r = sampling.max_radius * i as f64 / sampling.radii as f64;
            for j in 0..sampling.angles {
                let z = Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / sampling.angles as f64);
                let v = self.norm_hyperbolic_unchecked(z);
                if v > best.0 {
                    best = (v, z);
                }
            }
        }
        // local pattern search from the best sample
        let mut step = sampling.max_radius / sampling.radii as f64;
        let (mut val, mut at) = best;
        while step > 1e-12 {
            let mut moved = false;
            for k in 0..8 {
                let cand = at + Complex64::from_polar(step, std::f64::consts::FRAC_PI_4 * k as f64);
                if cand.norm() >= sampling.max_radius {
                    continue;
                }
                let v = self.norm_hyperbolic_unchecked(cand);
                if v > val {
                    val = v;
                    at = cand;
                    moved = true;
                    break;
                }
            }
            if !moved {
                step /= 2.0;
            }
        }
        (val, at)
    }

    /// Rescales so that the sampled sup of `‖α‖_h` equals `target`.
    pub fn normalized_to(&self, target: f64, sampling: &SupNormSampling) -> Self {
        let (sup, _) = self.sup_norm_hyperbolic(sampling);
        if sup == 0.0 {
            return self.clone();
        }
        self.scaled(target / sup)
    }
}

/// Concentric-circle sampling used to estimate `sup ‖α‖_h`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SupNormSampling {
    pub radii: usize,
    pub angles: usize,
    pub max_radius: f64,
}

impl Default for SupNormSampling {
    fn default() -> Self {
        SupNormSampling { radii: 256, angles: 2048, max_radius: 1.0 - 1e-3 }
    }
}

impl SupNormSampling {
    pub fn coarse() -> Self {
        SupNormSampling { radii: 64, angles: 256, max_radius: 1.0 - 1e-3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackRadius {
    /// Hyperbolic radius.
    pub radius: f64,
    /// Euclidean radius `2C'ε` of the same disk about the origin.
    pub euclidean_radius: f64,
    /// The closed form left its valid range and was evaluated at the cap.
    pub saturated: bool,
}

/// Radius `r = log((1 + 2C'ε)/(1 - 2C'ε))`, `C' = (1 - 1/4)²/(4C) = 9/(64C)`:
/// if `α(0) = 0` and `sup ‖α‖_h ≤ C`, then `‖α‖_h < ε` on `B_h(0, r)`.
///
/// When `2C'ε ≥ 1` the argument is capped at `1 - 1e-9` and the result is
/// flagged as saturated.
pub fn harnack_radius(eps: f64, c: f64) -> Result<HarnackRadius> {
    if !(eps > 0.0) || !(c > 0.0) || !eps.is_finite() || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("need eps > 0 and C > 0, got eps = {eps}, C = {c}")));
    }
    let c_prime = 9.0 / (64.0 * c);
    let mut x = 2.0 * c_prime * eps;
    let saturated = x >= 1.0;
    if saturated {
        x = 1.0 - 1e-9;
    }
    Ok(HarnackRadius { radius: ((1.0 + x) / (1.0 - x)).ln(), euclidean_radius: x, saturated })
}

/// A ball of induced-metric radius `r_h / √2` sits inside the hyperbolic ball
/// of radius `r_h`, because `u > -ln(2)/2` makes `g ≥ h/2`.
pub fn induced_ball_radius(r_h: f64) -> Result<f64> {
    if !(r_h >= 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be nonnegative, got {r_h}")));
    }
    Ok(r_h / std::f64::consts::SQRT_2)
}

/// Euclidean radius of the hyperbolic ball `B_h(0, r)` in the disk model.
pub fn euclidean_radius_of_hyperbolic_ball(r: f64) -> f64 {
    (r / 2.0).tanh()
}

/// Record tying a norm bound to the radius it certifies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBoundCertificate {
    pub c: f64,
    pub eps: f64,
    pub r: f64,
    pub basepoint: Complex64,
}

impl NormBoundCertificate {
    pub fn new(alpha: &QuadDifferential, c: f64, eps: f64, basepoint: Complex64) -> Result<Self> {
        if alpha.eval(basepoint).norm() > 1e-10 {
            return Err(Error::Precondition(format!("basepoint {basepoint} is not a zero of the differential")));
        }
        let r = harnack_radius(eps, c)?.radius;
        Ok(NormBoundCertificate { c, eps, r, basepoint })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackReport {
    pub radius: HarnackRadius,
    pub sup_norm: f64,
    pub max_norm_in_ball: f64,
    pub argmax: Complex64,
    pub samples: usize,
    pub passed: bool,
}

/// Checks `‖α‖_h ≤ ε` on `B_h(0, harnack_radius(ε, C))` by sampling.
///
/// Requires `α(0) = 0` and a sampled `sup ‖α‖_h ≤ C`; callers move a general
/// zero to the origin with a disk automorphism first.
pub fn verify_harnack(alpha: &QuadDifferential, c: f64, eps: f64, samples: usize) -> Result<HarnackReport> {
    verify_harnack_with(alpha, c, eps, samples, &SupNormSampling::default())
}

pub fn verify_harnack_with(
    alpha: &QuadDifferential,
    c: f64,
    eps: f64,
    samples: usize,
    sampling: &SupNormSampling,
) -> Result<HarnackReport> {
    let at_origin = alpha.eval(Complex64::new(0.0, 0.0)).norm();
    if at_origin > 1e-12 {
        return Err(Error::Precondition(format!("differential does not vanish at 0 (|f(0)| = {at_origin:e})")));
    }
    let (sup, witness) = alpha.sup_norm_hyperbolic(sampling);
    if sup > c * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "sup of the hyperbolic norm {sup} exceeds C = {c} at {witness}"
        )));
    }
    let radius = harnack_radius(eps, c)?;
    let rho = euclidean_radius_of_hyperbolic_ball(radius.radius);
    let mut best = (0.0, Complex64::new(0.0, 0.0));
    for z in disk_samples(rho, samples) {
        let v = alpha.norm_hyperbolic_unchecked(z);
        if v > best.0 {
            best = (v, z);
        }
    }
    Ok(HarnackReport {
        radius,
        sup_norm: sup,
        max_norm_in_ball: best.0,
        argmax: best.1,
        samples,
        passed: best.0 <= eps * (1.0 + 1e-9),
    })
}

/// About `n` points covering the closed disk `|z| ≤ rho`: a sunflower
/// spiral for the interior plus a ring on the boundary circle.
pub fn disk_samples(rho: f64, n: usize) -> impl Iterator<Item = Complex64> {
    let ring = ((n as f64).sqrt() * 4.0).ceil() as usize;
    let interior = n.saturating_sub(ring).max(1);
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    let spiral = (0..interior).map(move |i| {
        let r = rho * ((i as f64 + 0.5) / interior as f64).sqrt();
        Complex64::from_polar(r, golden * i as f64)
    });
    let edge = (0..ring).map(move |j| Complex64::from_polar(rho, std::f64::consts::TAU * j as f64 / ring as f64));
    spiral.chain(edge)
}
