//! Metrics on the equidistant surfaces `t ↦ exp(t N)` of a minimal disk:
//! `g((cosh t 𝕀 + sinh t 𝕊)·, (cosh t 𝕀 + sinh t 𝕊)·)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::immersion::ImmersedPatch;

pub type Mat2 = [[f64; 2]; 2];

/// Node-wise 2×2 matrices; metrics stored here are exactly symmetric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricTensorField {
    pub values: Vec<Mat2>,
}

impl MetricTensorField {
    pub fn min_eigenvalue(&self) -> f64 {
        self.values.iter().map(symmetric_min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue() > 0.0
    }
}

pub fn symmetric_min_eigenvalue(m: &Mat2) -> f64 {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let half_diff = 0.5 * (m[0][0] - m[1][1]);
    mean - half_diff.hypot(m[0][1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistantReport {
    pub metric: MetricTensorField,
    pub min_eigenvalue: f64,
}

/// `Mᵀ g M` with `M = cosh t 𝕀 + sinh t 𝕊`, per node.
pub fn equidistant_metric(g: &MetricTensorField, shape: &MetricTensorField, t: f64) -> EquidistantReport {
    let (c, s) = (t.cosh(), t.sinh());
    let values: Vec<Mat2> = g
        .values
        .par_iter()
        .zip(&shape.values)
        .map(|(g, sh)| {
            let m = [[c + s * sh[0][0], s * sh[0][1]], [s * sh[1][0], c + s * sh[1][1]]];
            let entry = |i: usize, j: usize| {
                let mut acc = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        acc += m[a][i] * g[a][b] * m[b][j];
                    }
                }
                acc
            };
            let off = 0.5 * (entry(0, 1) + entry(1, 0));
            [[entry(0, 0), off], [off, entry(1, 1)]]
        })
        .collect();
    let metric = MetricTensorField { values };
    let min_eigenvalue = metric.min_eigenvalue();
    EquidistantReport { metric, min_eigenvalue }
}

/// Induced metric `e^{2φ} 𝕀` and shape operator `𝕊 = g⁻¹B` of a patch in
/// the coordinate `z`, with `B = Re(f dz²)`.
pub fn patch_fundamental_forms(patch: &ImmersedPatch) -> (MetricTensorField, MetricTensorField) {
    let (g, s): (Vec<Mat2>, Vec<Mat2>) = (0..patch.grid.len())
        .map(|k| {
            let e2 = (2.0 * patch.log_conformal_factor(k)).exp();
            let f = patch.alpha.eval(patch.grid.point(k));
            let b = [[f.re, -f.im], [-f.im, -f.re]];
            ([[e2, 0.0], [0.0, e2]], [[b[0][0] / e2, b[0][1] / e2], [b[1][0] / e2, b[1][1] / e2]])
        })
        .unzip();
    (MetricTensorField { values: g }, MetricTensorField { values: s })
}

/// Distance at which `cosh t − λ sinh t` vanishes, for principal curvature
/// `λ > 1`.
pub fn degeneracy_distance(lambda: f64) -> Option<f64> {
    (lambda > 1.0).then(|| (1.0 / lambda).atanh())
}
