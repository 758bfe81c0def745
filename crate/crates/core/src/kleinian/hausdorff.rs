//! Hausdorff distance between boundary samples in the metric `|dz|/(1+|z|²)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moebius::{spherical_distance, BoundaryPoint};

use super::spatial::SphereIndex;
use super::LimitSetSample;

/// Sets smaller than this are scanned directly.
const INDEX_THRESHOLD: usize = 32;

/// `max_{a ∈ from} min_{b ∈ to} d(a, b)`.
pub fn directed_hausdorff(from: &[BoundaryPoint], to: &[BoundaryPoint]) -> Result<f64> {
    if from.is_empty() || to.is_empty() {
        return Err(Error::EmptySample);
    }
    if to.len() < INDEX_THRESHOLD {
        return Ok(from
            .iter()
            .map(|a| to.iter().map(|b| spherical_distance(*a, *b)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max));
    }
    let index = NearestBoundary::new(to);
    Ok(from.par_iter().map(|a| index.distance(*a)).reduce(|| 0.0, f64::max))
}

/// Symmetric Hausdorff distance, the max of both directed distances.
pub fn hausdorff_distance(a: &LimitSetSample, b: &LimitSetSample) -> Result<f64> {
    let forward = directed_hausdorff(&a.points, &b.points)?;
    let reverse = directed_hausdorff(&b.points, &a.points)?;
    Ok(forward.max(reverse))
}

/// Distance from `p` to the nearest sample point.
pub fn min_distance_to_sample(p: BoundaryPoint, sample: &LimitSetSample) -> Result<f64> {
    directed_hausdorff(&[p], &sample.points)
}

/// Exact nearest-point distance oracle: the kd-tree proposes the chord
/// nearest point, then every point within a hair of that chord is rescored
/// with [`spherical_distance`] so ties resolve exactly as a linear scan would.
pub(crate) struct NearestBoundary<'a> {
    points: &'a [BoundaryPoint],
    index: SphereIndex,
}

impl<'a> NearestBoundary<'a> {
    pub(crate) fn new(points: &'a [BoundaryPoint]) -> Self {
        let index = SphereIndex::new(points.iter().map(|p| p.to_sphere()).collect());
        NearestBoundary { points, index }
    }

    pub(crate) fn distance(&self, p: BoundaryPoint) -> f64 {
        let v = p.to_sphere();
        let (_, best2) = self.index.nearest(&v).expect("nonempty index");
        let reach = best2.sqrt() * (1.0 + 1e-9) + 1e-12;
        let mut hits = Vec::new();
        self.index.within(&v, reach * reach, &mut hits);
        hits.iter()
            .map(|&i| spherical_distance(p, self.points[i]))
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;

    fn sample(points: &[BoundaryPoint]) -> LimitSetSample {
        LimitSetSample::from_points(points.iter().copied(), 1e-12)
    }

    #[test]
    fn zero_for_identical_samples() {
        let a = sample(&[BoundaryPoint::ZERO, BoundaryPoint::from_re_im(2.0, -1.0)]);
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn zero_to_infinity() {
        let a = sample(&[BoundaryPoint::ZERO]);
        let b = sample(&[BoundaryPoint::Infinity]);
        assert!((hausdorff_distance(&a, &b).unwrap() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn empty_input_is_an_error() {
        let a = sample(&[BoundaryPoint::ZERO]);
        let empty = LimitSetSample::from_points([], 1e-6);
        assert!(matches!(hausdorff_distance(&a, &empty), Err(Error::EmptySample)));
        assert!(matches!(hausdorff_distance(&empty, &a), Err(Error::EmptySample)));
    }

    #[test]
    fn directed_distance_is_asymmetric() {
        let a = [BoundaryPoint::ZERO, BoundaryPoint::from_re_im(1.0, 0.0)];
        let b = [BoundaryPoint::ZERO];
        assert!((directed_hausdorff(&a, &b).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(directed_hausdorff(&b, &a).unwrap(), 0.0);
    }
}
