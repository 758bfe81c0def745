use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kleinian::{grid_spacing, largest_empty_ball, min_distance_to_sample, LimitSetSample};
use crate::moebius::{BoundaryPoint, HalfSpacePoint};
use crate::quad_diff::{euclidean_radius_of_hyperbolic_ball, harnack_radius, SupNormSampling};
use crate::surface::gauss_map::unit_normal;
use crate::surface::{beltrami_estimate_within, gauss_map_patch, gauss_map_point, ImmersedPatch, Sign};

/// Offsets from the normalized position tolerated by [`assemble_certificate`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;

/// Attached to every certificate: the two analytic constants are inputs.
pub const CONSTANTS_NOTE: &str =
    "C_epstein and C_koebe are configured constants, not derived; R is relative to them";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    /// Target bound on `‖α‖_g` used to size the Harnack ball.
    pub epsilon_target: f64,
    pub c_epstein: f64,
    pub c_koebe: f64,
    /// Relative slack in the CONSISTENT comparison.
    pub slack: f64,
    /// Rays used to locate the Euclidean disk inside the induced ball.
    pub angles: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        // c_epstein = 1/2 makes β = 1 at ε = 0, the Jacobian of the
        // identity Gauss map of the totally geodesic disk
        CertifyConfig { epsilon_target: 0.1, c_epstein: 0.5, c_koebe: 4.0, slack: 0.05, angles: 256 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub epsilon: f64,
    /// Induced-metric radius of the ball on which `ε` bounds `‖α‖_g`.
    pub r: f64,
    /// Hyperbolic radius of the enclosing `h`-ball that was measured.
    pub r_hyperbolic: f64,
    /// Euclidean radius of a coordinate disk inside `B_g(p, r)`.
    pub r1: f64,
    /// Dilatation bound `((1+ε)/(1−ε))^{1/2}`.
    pub k: f64,
    pub beta: f64,
    pub c_epstein: f64,
    pub c_koebe: f64,
    pub big_r: f64,
    pub empirical_empty_radius: Option<f64>,
    pub slack: f64,
    pub verdict: Verdict,
    /// Measured on the Gauss map over the coordinate disk of radius `r1`.
    pub measured_dilatation: f64,
    pub measured_min_jacobian: f64,
    /// `sup ‖α‖_h` over the unit disk, the Harnack constant.
    pub sup_norm_hyperbolic: f64,
    pub harnack_saturated: bool,
    pub boundary_condition: String,
    pub note: String,
}

impl Certificate {
    /// Re-evaluates `β = 2 C_epstein (1−ε²)` and `R = r₁ √β / C_koebe` from
    /// the stored fields.
    pub fn arithmetic_holds(&self) -> bool {
        let beta = 2.0 * self.c_epstein * (1.0 - self.epsilon * self.epsilon);
        beta == self.beta && self.r1 * beta.sqrt() / self.c_koebe == self.big_r
    }
}

/// `R = r₁ √β / C_koebe` with `β = 2 C_epstein (1 − ε²)`.
pub fn certified_radius(r1: f64, eps: f64, c_epstein: f64, c_koebe: f64) -> Result<f64> {
    if !(eps < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon {eps} is outside the almost-Fuchsian range")));
    }
    if !(r1 > 0.0 && eps >= 0.0 && c_epstein > 0.0 && c_koebe > 0.0) {
        return Err(Error::InvalidArgument("r1, C_epstein and C_koebe must be positive, epsilon nonnegative".into()));
    }
    let beta = 2.0 * c_epstein * (1.0 - eps * eps);
    Ok(r1 * beta.sqrt() / c_koebe)
}

/// Largest `s` such that every sampled ray `[0, s e^{iθ}]` has induced
/// length at most `r`; the coordinate disk of radius `s` then lies in
/// `B_g(0, r)`.
fn coordinate_radius_in_induced_ball(patch: &ImmersedPatch, r: f64, angles: usize) -> Result<f64> {
    let rho = patch.grid.radius();
    let steps = 2000;
    let ds = rho / steps as f64;
    let density = |z: Complex64| -> Result<f64> {
        Ok(patch.u.interpolate(z)?.exp() * 2.0 / (1.0 - z.norm_sqr()))
    };
    let mut best = rho;
    for a in 0..angles {
        let dir = Complex64::from_polar(1.0, std::f64::consts::TAU * a as f64 / angles as f64);
        let mut length = 0.0;
        let mut prev = density(Complex64::new(0.0, 0.0))?;
        let mut reach = rho;
        for k in 1..=steps {
            let s = k as f64 * ds;
            let cur = density(dir * s)?;
            let piece = 0.5 * (prev + cur) * ds;
            if length + piece > r {
                // linear in-step crossing
                reach = s - ds + ds * (r - length) / piece;
                break;
            }
            length += piece;
            prev = cur;
        }
        best = best.min(reach);
    }
    Ok(best)
}

/// Builds the certificate for a normalized patch, optionally testing it
/// against a limit-set sample.
pub fn assemble_certificate(
    patch: &ImmersedPatch,
    sample: Option<&LimitSetSample>,
    config: &CertifyConfig,
) -> Result<Certificate> {
    let offsets = patch.normalization_offsets();
    if offsets.max() > NORMALIZATION_TOLERANCE {
        return Err(Error::Precondition(format!(
            "patch is not normalized: center offset {:e}, normal offset {:e}, |f(center)| = {:e}",
            offsets.position, offsets.normal, offsets.differential
        )));
    }
    if !(config.epsilon_target > 0.0 && config.epsilon_target < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon target {} outside (0, 1)", config.epsilon_target)));
    }
    let grid = &patch.grid;
    let disk_limit = ((1.0 + grid.radius()) / (1.0 - grid.radius())).ln();

    // ‖α‖_h ≤ ε/2 forces ‖α‖_g ≤ ε because e^{−2u} ≤ 2
    let (sup_h, _) = patch.alpha.sup_norm_hyperbolic(&SupNormSampling::default());
    let (r_hyperbolic, saturated) = if sup_h > 0.0 {
        let hr = harnack_radius(config.epsilon_target / 2.0, sup_h)?;
        (hr.radius.min(disk_limit), hr.saturated || hr.radius > disk_limit)
    } else {
        (disk_limit, true)
    };
    let r = r_hyperbolic / SQRT_2;

    let euclid = euclidean_radius_of_hyperbolic_ball(r_hyperbolic);
    let epsilon = (0..grid.len())
        .filter(|&k| grid.point(k).norm() <= euclid)
        .map(|k| (-2.0 * patch.u.values[k]).exp() * patch.alpha.norm_hyperbolic_unchecked(grid.point(k)))
        .fold(0.0, f64::max);
    if epsilon >= 1.0 {
        return Err(Error::NotAlmostFuchsian { sup: epsilon, at: Complex64::new(0.0, 0.0) });
    }

    let r1 = coordinate_radius_in_induced_ball(patch, r, config.angles)?;
    let k = ((1.0 + epsilon) / (1.0 - epsilon)).sqrt();
    let beta = 2.0 * config.c_epstein * (1.0 - epsilon * epsilon);
    let big_r = r1 * beta.sqrt() / config.c_koebe;

    let gauss = gauss_map_patch(patch, Sign::Plus)?;
    let est = beltrami_estimate_within(&gauss, r1);
    let measured_min_jacobian = (0..grid.len())
        .filter(|&k| grid.point(k).norm() <= r1)
        .filter_map(|k| est.jacobian[k])
        .fold(f64::INFINITY, f64::min);

    let empirical_empty_radius = match sample {
        Some(s) if !s.is_empty() => Some(min_distance_to_sample(BoundaryPoint::ZERO, s)?),
        _ => None,
    };
    let verdict = match empirical_empty_radius {
        None => Verdict::Inconclusive,
        Some(e) if e >= big_r * (1.0 - config.slack) => Verdict::Consistent,
        Some(_) => Verdict::Violated,
    };

    Ok(Certificate {
        epsilon,
        r,
        r_hyperbolic,
        r1,
        k,
        beta,
        c_epstein: config.c_epstein,
        c_koebe: config.c_koebe,
        big_r,
        empirical_empty_radius,
        slack: config.slack,
        verdict,
        measured_dilatation: est.k,
        measured_min_jacobian,
        sup_norm_hyperbolic: sup_h,
        harnack_saturated: saturated,
        boundary_condition: crate::gauss_equation::BOUNDARY_CONDITION.to_string(),
        note: CONSTANTS_NOTE.to_string(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NecessaryVerdict {
    Passes,
    FailsNecessaryCondition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessaryConditionReport {
    pub radius: f64,
    pub center: BoundaryPoint,
    pub threshold: f64,
    /// Grid slack subtracted from the threshold.
    pub slack: f64,
    pub verdict: NecessaryVerdict,
    pub note: String,
}

/// Largest empty ball against a radius threshold, with one lattice spacing
/// of slack. Passing is necessary for almost-Fuchsian, not sufficient.
pub fn necessary_condition_check(
    sample: &LimitSetSample,
    threshold: f64,
    resolution: usize,
) -> Result<NecessaryConditionReport> {
    let ball = largest_empty_ball(sample, resolution)?;
    let slack = grid_spacing(resolution);
    let passes = ball.radius >= threshold - slack;
    let (verdict, note) = if passes {
        (
            NecessaryVerdict::Passes,
            "PASSES: an empty ball of the required radius exists; this is necessary, not sufficient, \
             for the group to be almost-Fuchsian",
        )
    } else {
        (
            NecessaryVerdict::FailsNecessaryCondition,
            "FAILS_NECESSARY_CONDITION: no empty ball of the required radius; the group is not almost-Fuchsian \
             at this threshold",
        )
    };
    Ok(NecessaryConditionReport { radius: ball.radius, center: ball.center, threshold, slack, verdict, note: note.into() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatPoint {
    pub node: usize,
    pub position: HalfSpacePoint,
    pub plus: BoundaryPoint,
    pub minus: BoundaryPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallCheck {
    pub node: usize,
    pub sign: Sign,
    pub center: BoundaryPoint,
    pub nearest_distance: f64,
    pub empty: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatsCertificate {
    pub zero_points: Vec<FlatPoint>,
    pub r_prime: f64,
    pub balls: Vec<BallCheck>,
    pub all_empty: bool,
    pub sample_size: usize,
}

/// Norm below which a node counts as a zero of `α`.
pub const FLAT_THRESHOLD: f64 = 1e-6;

/// Checks the `R′`-balls about both Gauss images of every listed zero of
/// `α` against one limit-set sample.
pub fn flats_certificate(
    patch: &ImmersedPatch,
    zeros: &[usize],
    r_prime: f64,
    sample: &LimitSetSample,
) -> Result<FlatsCertificate> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let grid = &patch.grid;
    let mut zero_points = Vec::with_capacity(zeros.len());
    let mut balls = Vec::with_capacity(2 * zeros.len());
    for &node in zeros {
        if node >= grid.len() {
            return Err(Error::InvalidArgument(format!("node {node} is not on the grid")));
        }
        let z = grid.point(node);
        let norm = (-2.0 * patch.u.values[node]).exp() * patch.alpha.norm_hyperbolic_unchecked(z);
        if norm >= FLAT_THRESHOLD {
            return Err(Error::DegenerateNode { index: node, reason: format!("not a zero of alpha (norm {norm:e})") });
        }
        let frame = &patch.frames[node];
        let normal = unit_normal(frame);
        let plus = gauss_map_point(&frame.position, &normal, Sign::Plus)?;
        let minus = gauss_map_point(&frame.position, &normal, Sign::Minus)?;
        for (sign, center) in [(Sign::Plus, plus), (Sign::Minus, minus)] {
            let nearest_distance = min_distance_to_sample(center, sample)?;
            balls.push(BallCheck { node, sign, center, nearest_distance, empty: nearest_distance >= r_prime });
        }
        zero_points.push(FlatPoint { node, position: frame.position, plus, minus });
    }
    let all_empty = balls.iter().all(|b| b.empty);
    Ok(FlatsCertificate { zero_points, r_prime, balls, all_empty, sample_size: sample.len() })
}

/// Spherical distance from `0` to the nearest sample point.
pub fn empty_radius_at_origin(sample: &LimitSetSample) -> Result<f64> {
    min_distance_to_sample(BoundaryPoint::ZERO, sample)
}
