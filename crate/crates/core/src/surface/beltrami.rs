//! Finite-difference Beltrami coefficients and Jacobians of grid-sampled
//! boundary maps.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::moebius::{spherical_distance, BoundaryPoint};

use super::gauss_map::BoundaryField;

/// Nodes whose image is this close to `∞` (boundary metric) are excluded.
pub const INFINITY_EXCLUSION: f64 = 0.1;

/// `|f_z|` below this marks a node degenerate.
pub const DEGENERATE_DERIVATIVE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeltramiEstimate {
    /// `μ = f_z̄ / f_z`, `None` where excluded.
    pub mu: Vec<Option<Complex64>>,
    /// `|f_z|² − |f_z̄|²`, `None` where excluded.
    pub jacobian: Vec<Option<f64>>,
    pub max_mu: f64,
    pub argmax: Option<usize>,
    /// `(1 + max|μ|)/(1 − max|μ|)`; infinite when `max|μ| ≥ 1`.
    pub k: f64,
    pub near_infinity: Vec<usize>,
    pub degenerate: Vec<usize>,
}

enum NodeResult {
    Ok(Complex64, Complex64),
    NearInfinity,
    Degenerate,
}

fn finite_value(map: &BoundaryField, node: Option<usize>) -> Option<Complex64> {
    let node = node?;
    let p = map.values[node];
    if spherical_distance(p, BoundaryPoint::Infinity) < INFINITY_EXCLUSION {
        return None;
    }
    p.finite()
}

/// Second-order derivative along one axis: central where both neighbors are
/// usable, otherwise one-sided from two neighbors on the same side.
fn axis_derivative(map: &BoundaryField, node: usize, fwd: usize, back: usize) -> Option<Complex64> {
    let grid = &map.grid;
    let h = grid.spacing();
    let f0 = finite_value(map, Some(node))?;
    let n1 = grid.neighbor(node, fwd);
    let m1 = grid.neighbor(node, back);
    if let (Some(a), Some(b)) = (finite_value(map, n1), finite_value(map, m1)) {
        return Some((a - b) / (2.0 * h));
    }
    if let (Some(a), Some(aa)) = (finite_value(map, n1), finite_value(map, n1.and_then(|n| grid.neighbor(n, fwd)))) {
        return Some((-3.0 * f0 + 4.0 * a - aa) / (2.0 * h));
    }
    if let (Some(b), Some(bb)) = (finite_value(map, m1), finite_value(map, m1.and_then(|n| grid.neighbor(n, back)))) {
        return Some((3.0 * f0 - 4.0 * b + bb) / (2.0 * h));
    }
    None
}

fn node_derivatives(map: &BoundaryField, node: usize) -> NodeResult {
    if finite_value(map, Some(node)).is_none() {
        return NodeResult::NearInfinity;
    }
    match (axis_derivative(map, node, 0, 1), axis_derivative(map, node, 2, 3)) {
        (Some(fx), Some(fy)) => {
            let i = Complex64::i();
            let fz = 0.5 * (fx - i * fy);
            let fzb = 0.5 * (fx + i * fy);
            if fz.norm() < DEGENERATE_DERIVATIVE {
                NodeResult::Degenerate
            } else {
                NodeResult::Ok(fz, fzb)
            }
        }
        _ => NodeResult::Degenerate,
    }
}

/// Beltrami coefficient and Jacobian at every node, with statistics over
/// all nodes.
pub fn beltrami_estimate(map: &BoundaryField) -> BeltramiEstimate {
    beltrami_estimate_within(map, f64::INFINITY)
}

/// As [`beltrami_estimate`], with statistics restricted to nodes with
/// `|z| ≤ radius`. Derivatives still use every available neighbor.
pub fn beltrami_estimate_within(map: &BoundaryField, radius: f64) -> BeltramiEstimate {
    let grid = &map.grid;
    let results: Vec<NodeResult> = (0..grid.len()).into_par_iter().map(|k| node_derivatives(map, k)).collect();
    let mut est = BeltramiEstimate {
        mu: vec![None; grid.len()],
        jacobian: vec![None; grid.len()],
        max_mu: 0.0,
        argmax: None,
        k: 1.0,
        near_infinity: Vec::new(),
        degenerate: Vec::new(),
    };
    for (k, r) in results.into_iter().enumerate() {
        let counted = grid.point(k).norm() <= radius;
        match r {
            NodeResult::Ok(fz, fzb) => {
                let mu = fzb / fz;
                est.mu[k] = Some(mu);
                est.jacobian[k] = Some(fz.norm_sqr() - fzb.norm_sqr());
                if counted && (est.argmax.is_none() || mu.norm() > est.max_mu) {
                    est.max_mu = mu.norm();
                    est.argmax = Some(k);
                }
            }
            NodeResult::NearInfinity if counted => est.near_infinity.push(k),
            NodeResult::Degenerate if counted => est.degenerate.push(k),
            _ => {}
        }
    }
    est.k = dilatation(est.max_mu);
    est
}

/// `K = (1 + m)/(1 − m)`.
pub fn dilatation(max_mu: f64) -> f64 {
    if max_mu >= 1.0 {
        f64::INFINITY
    } else {
        (1.0 + max_mu) / (1.0 - max_mu)
    }
}

/// Euclidean Jacobian `|f_z|² − |f_z̄|²` per node.
pub fn jacobian_estimate(map: &BoundaryField) -> Vec<Option<f64>> {
    beltrami_estimate(map).jacobian
}
