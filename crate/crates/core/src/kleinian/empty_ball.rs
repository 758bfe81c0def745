use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{spherical_distance, BoundaryPoint};

use super::hausdorff::NearestBoundary;
use super::LimitSetSample;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmptyBall {
    pub center: BoundaryPoint,
    /// Distance from `center` to the nearest sample point; every candidate
    /// examined is a valid empty ball, so this bounds the optimum from below.
    pub radius: f64,
}

/// `n` near-uniform points on the unit sphere (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Typical spacing, in the boundary metric, of the `resolution²`-point
/// lattice: the sphere has area `π` in that metric.
pub fn grid_spacing(resolution: usize) -> f64 {
    std::f64::consts::PI.sqrt() / resolution as f64
}

/// Searches `resolution²` lattice centers for the one farthest from the
/// sample, then polishes the best few by a shrinking pattern search.
pub fn largest_empty_ball(sample: &LimitSetSample, resolution: usize) -> Result<EmptyBall> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if resolution < 10 {
        return Err(Error::InvalidArgument(format!("resolution must be at least 10, got {resolution}")));
    }
    let spacing = grid_spacing(resolution);
    // Thinning moves every nearest distance by at most its resolution. Dense
    // samples on a circle make exact queries near the poles all ties.
    let coarse = LimitSetSample::from_points(sample.points.iter().copied(), spacing / 64.0);
    let nearest = NearestBoundary::new(&coarse.points);
    let lattice = fibonacci_sphere(resolution * resolution);
    let scored: Vec<(usize, f64)> = lattice
        .par_iter()
        .enumerate()
        .map(|(i, v)| (i, nearest.distance(BoundaryPoint::from_sphere(*v))))
        .collect();

    let mut ranked = scored;
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let seeds: Vec<[f64; 3]> = ranked.iter().take(8).map(|&(i, _)| lattice[i]).collect();

    let polished: Vec<([f64; 3], f64)> = seeds
        .par_iter()
        .map(|seed| polish(&nearest, *seed, 2.0 * spacing))
        .collect();
    let (best, _) = polished
        .into_iter()
        .fold(([0.0, 0.0, 1.0], f64::NEG_INFINITY), |acc, cand| if cand.1 > acc.1 { cand } else { acc });
    let center = BoundaryPoint::from_sphere(best);
    let radius = sample
        .points
        .par_iter()
        .map(|&p| spherical_distance(center, p))
        .reduce(|| f64::INFINITY, f64::min);
    Ok(EmptyBall { center, radius })
}

fn polish(nearest: &NearestBoundary<'_>, start: [f64; 3], initial_step: f64) -> ([f64; 3], f64) {
    let score = |v: &[f64; 3]| nearest.distance(BoundaryPoint::from_sphere(*v));
    let mut x = start;
    let mut fx = score(&x);
    // step is a chord length; the boundary metric halves angles
    let mut step = 2.0 * initial_step;
    let floor = initial_step / 256.0;
    while step > floor {
        let (e1, e2) = tangent_basis(&x);
        let mut improved = false;
        for k in 0..8 {
            let a = std::f64::consts::FRAC_PI_4 * k as f64;
            let (c, s) = (a.cos() * step, a.sin() * step);
            let cand = normalize([
                x[0] + c * e1[0] + s * e2[0],
                x[1] + c * e1[1] + s * e2[1],
                x[2] + c * e1[2] + s * e2[2],
            ]);
            let fc = score(&cand);
            if fc > fx {
                x = cand;
                fx = fc;
                improved = true;
                break;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (x, fx)
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn tangent_basis(x: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if x[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let e1 = normalize(cross(&helper, x));
    let e2 = cross(x, &e1);
    (e1, e2)
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
