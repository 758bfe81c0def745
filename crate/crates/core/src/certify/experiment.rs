//! Observational run along a family of groups: limit-set sample, largest
//! empty ball and Hausdorff step distance per member.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kleinian::{
    hausdorff_distance, largest_empty_ball, limit_set_sample, GroupPresentation, LimitSetConfig, LimitSetSample,
};
use crate::moebius::{BoundaryPoint, HalfSpacePoint, MoebiusTransform};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub depth: usize,
    pub resolution: usize,
    pub limit_set: LimitSetConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { depth: 6, resolution: 60, limit_set: LimitSetConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub label: String,
    pub points: usize,
    pub empty_radius: Option<f64>,
    pub empty_center: Option<BoundaryPoint>,
    /// Hausdorff distance to the previous successfully sampled group.
    pub hausdorff_step: Option<f64>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    /// Smallest empty-ball radius over the successful rows.
    pub min_empty_radius: Option<f64>,
    pub note: String,
}

/// Runs every group in order. Failures are recorded on their row and the
/// run continues.
pub fn barrier_experiment(groups: &[GroupPresentation], config: &ExperimentConfig) -> Result<ExperimentReport> {
    if groups.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least two groups, got {}", groups.len())));
    }
    let mut rows = Vec::with_capacity(groups.len());
    let mut previous: Option<LimitSetSample> = None;
    for g in groups {
        let mut row = ExperimentRow {
            label: g.label.clone(),
            points: 0,
            empty_radius: None,
            empty_center: None,
            hausdorff_step: None,
            warnings: Vec::new(),
            error: None,
        };
        let outcome = limit_set_sample(g, config.depth, HalfSpacePoint::origin(), &config.limit_set).and_then(|s| {
            let ball = largest_empty_ball(&s, config.resolution)?;
            Ok((s, ball))
        });
        match outcome {
            Ok((sample, ball)) => {
                row.points = sample.len();
                row.empty_radius = Some(ball.radius);
                row.empty_center = Some(ball.center);
                row.warnings = sample.warnings.clone();
                if let Some(prev) = &previous {
                    row.hausdorff_step = hausdorff_distance(prev, &sample).ok();
                }
                previous = Some(sample);
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        rows.push(row);
    }
    let min_empty_radius = rows.iter().filter_map(|r| r.empty_radius).reduce(f64::min);
    Ok(ExperimentReport {
        rows,
        min_empty_radius,
        note: "observational: bounded empty radii along the family are consistent with, not proof of, \
               a non-degenerate limit"
            .into(),
    })
}

/// `group` conjugated by `diag(λ, 1/λ)`, which acts as `z ↦ λ² z`.
pub fn dilation_family(group: &GroupPresentation, lambdas: &[f64]) -> Result<Vec<GroupPresentation>> {
    lambdas
        .iter()
        .map(|&l| {
            let m = MoebiusTransform::dilation(num_complex::Complex64::new(l * l, 0.0))?;
            Ok(group.conjugate(&m, format!("{} conj diag({l}, 1/{l})", group.label)))
        })
        .collect()
}

/// Largest empty ball for a circle `|z| = c` about the origin: the bigger of
/// the two complementary caps, `max(atan c, atan 1/c)`.
pub fn circle_empty_radius(c: f64) -> f64 {
    c.atan().max((1.0 / c).atan())
}
