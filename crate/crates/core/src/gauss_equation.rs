//! Conformal factor `u` of the induced metric `g = e^{2u} h` of a minimal
//! disk with holomorphic quadratic differential `α`:
//!
//! ```text
//! Δ_h u + 1 − e^{2u} − e^{−2u} ‖α‖_h² = 0,   Δ_h = ((1−|z|²)²/4) Δ
//! ```
//!
//! solved on a [`DiskGrid`] with `u = 0` on `|z| = ρ`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::banded::BandedMatrix;
use crate::error::{Error, Result};
use crate::grid::DiskGrid;
use crate::quad_diff::QuadDifferential;

pub const DEFAULT_DISK_RADIUS: f64 = 0.85;
pub const DEFAULT_GRID_SIDE: usize = 129;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 50;

/// Label attached to every report derived from a disk solve.
pub const BOUNDARY_CONDITION: &str = "dirichlet u = 0 on |z| = rho";

/// Lower bound `−ln(2)/2` for the conformal factor.
pub const LOWER_BOUND: f64 = -std::f64::consts::LN_2 / 2.0;

/// Slack allowed on the upper bound `u ≤ 0`.
pub const UPPER_SLACK: f64 = 1e-10;

/// Consecutive residual increases tolerated before giving up.
const DIVERGENCE_STREAK: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalFactorField {
    pub grid: DiskGrid,
    /// One value per grid node; the circle carries the implicit value 0.
    pub values: Vec<f64>,
    pub residual_norm: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl ConformalFactorField {
    /// Wraps given node values; the residual is not evaluated.
    pub fn from_values(grid: DiskGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid with {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(ConformalFactorField { grid, values, residual_norm: f64::NAN, converged: false, iterations: 0 })
    }

    pub fn constant(grid: DiskGrid, value: f64) -> Self {
        let values = vec![value; grid.len()];
        ConformalFactorField { grid, values, residual_norm: f64::NAN, converged: false, iterations: 0 }
    }

    /// Marks a field as a converged solution after checking its residual.
    pub fn verified(mut self, alpha: &QuadDifferential, tol: f64) -> Result<Self> {
        let r = residual(&self, alpha)?;
        self.residual_norm = max_abs(&r);
        self.converged = self.residual_norm <= tol;
        Ok(self)
    }

    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }

    /// Value at a lattice position, with points outside the disk filled by
    /// linear continuation through the zero boundary value.
    fn lattice_value(&self, i: usize, j: usize) -> f64 {
        if let Some(node) = self.grid.node_at(i as i64, j as i64) {
            return self.values[node];
        }
        let h = self.grid.spacing();
        let (mut sum, mut count) = (0.0, 0);
        for (dir, &(di, dj)) in crate::grid::DIRECTIONS.iter().enumerate() {
            // neighbor Q = P - d, whose arm in direction d points at P
            let Some(q) = self.grid.node_at(i as i64 - di, j as i64 - dj) else { continue };
            let arm = self.grid.arms(q)[dir];
            if arm >= 0.1 * h {
                sum += self.values[q] * (1.0 - h / arm);
            }
            count += 1;
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }

    /// Bilinear interpolation at `z`, `|z| ≤ ρ`.
    pub fn interpolate(&self, z: Complex64) -> Result<f64> {
        let (i, j, fx, fy) = self.grid.locate(z).ok_or(Error::Domain(z))?;
        let v00 = self.lattice_value(i, j);
        let v10 = self.lattice_value(i + 1, j);
        let v01 = self.lattice_value(i, j + 1);
        let v11 = self.lattice_value(i + 1, j + 1);
        Ok((1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11))
    }

    /// Second-order gradient `(u_x, u_y)` at a node, using the circle as the
    /// neighbor where an arm is cut.
    pub fn gradient(&self, node: usize) -> (f64, f64) {
        let arms = self.grid.arms(node);
        let nb = |dir: usize| self.grid.neighbor(node, dir).map_or(0.0, |k| self.values[k]);
        let u = self.values[node];
        let d = |fwd: f64, hf: f64, back: f64, hb: f64| {
            (hb * hb * (fwd - u) + hf * hf * (u - back)) / (hf * hb * (hf + hb))
        };
        (d(nb(0), arms[0], nb(1), arms[1]), d(nb(2), arms[2], nb(3), arms[3]))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Shortley–Weller Euclidean Laplacian at `node` with zero boundary data.
fn laplacian(grid: &DiskGrid, values: &[f64], node: usize) -> f64 {
    let [he, hw, hn, hs] = grid.arms(node);
    let nb = |dir: usize| grid.neighbor(node, dir).map_or(0.0, |k| values[k]);
    let u = values[node];
    2.0 / (he + hw) * ((nb(0) - u) / he - (u - nb(1)) / hw)
        + 2.0 / (hn + hs) * ((nb(2) - u) / hn - (u - nb(3)) / hs)
}

/// `(1−|z|²)²/4`, the factor turning the Euclidean Laplacian into `Δ_h`.
fn hyperbolic_factor(z: Complex64) -> f64 {
    let s = 1.0 - z.norm_sqr();
    s * s / 4.0
}

fn squared_norms(grid: &DiskGrid, alpha: &QuadDifferential) -> Vec<f64> {
    (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let n = alpha.norm_hyperbolic_unchecked(grid.point(k));
            n * n
        })
        .collect()
}

fn residual_values(grid: &DiskGrid, values: &[f64], norms2: &[f64]) -> Vec<f64> {
    (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let u = values[k];
            hyperbolic_factor(grid.point(k)) * laplacian(grid, values, k) + 1.0
                - (2.0 * u).exp()
                - (-2.0 * u).exp() * norms2[k]
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Pointwise residual of the discretized equation at every node.
pub fn residual(u: &ConformalFactorField, alpha: &QuadDifferential) -> Result<Vec<f64>> {
    if u.values.len() != u.grid.len() {
        return Err(Error::GridMismatch(format!(
            "field has {} values, grid has {} nodes",
            u.values.len(),
            u.grid.len()
        )));
    }
    Ok(residual_values(&u.grid, &u.values, &squared_norms(&u.grid, alpha)))
}

/// Largest `‖α‖_h` over the grid nodes and where it is attained.
pub fn grid_sup_norm(alpha: &QuadDifferential, grid: &DiskGrid) -> (f64, Complex64) {
    (0..grid.len())
        .map(|k| (alpha.norm_hyperbolic_unchecked(grid.point(k)), grid.point(k)))
        .fold((0.0, Complex64::new(0.0, 0.0)), |acc, c| if c.0 > acc.0 { c } else { acc })
}

/// Damped Newton iteration from `u ≡ 0`. Each step solves the linearized
/// stencil system exactly with a banded factorization, then halves the step
/// until the max-norm residual drops.
pub fn solve(alpha: &QuadDifferential, grid: &DiskGrid, tol: f64, max_iter: usize) -> Result<ConformalFactorField> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let (sup, at) = grid_sup_norm(alpha, grid);
    if sup >= 1.0 {
        return Err(Error::NotAlmostFuchsian { sup, at });
    }

    let n = grid.len();
    let bw = grid.bandwidth();
    let norms2 = squared_norms(grid, alpha);
    let weights: Vec<f64> = grid.points().map(|z| 1.0 / hyperbolic_factor(z)).collect();

    let mut u = vec![0.0; n];
    let mut res = residual_values(grid, &u, &norms2);
    let mut norm = max_abs(&res);
    let mut iterations = 0;
    let mut increases = 0;

    while norm > tol && iterations < max_iter {
        // Rows scaled by 4/(1−|z|²)²: Euclidean stencil plus a negative diagonal.
        let mut jac = BandedMatrix::zeros(n, bw);
        let mut rhs = vec![0.0; n];
        for k in 0..n {
            let [he, hw, hn, hs] = grid.arms(k);
            let cx = 2.0 / (he + hw);
            let cy = 2.0 / (hn + hs);
            let coef = [cx / he, cx / hw, cy / hn, cy / hs];
            let mut diag = -(coef[0] + coef[1] + coef[2] + coef[3]);
            diag += weights[k] * (-2.0 * (2.0 * u[k]).exp() + 2.0 * (-2.0 * u[k]).exp() * norms2[k]);
            jac.add(k, k, diag);
            for (dir, c) in coef.iter().enumerate() {
                if let Some(nb) = grid.neighbor(k, dir) {
                    jac.add(k, nb, *c);
                }
            }
            rhs[k] = -weights[k] * res[k];
        }
        if jac.solve_in_place(&mut rhs).is_none() {
            return Err(failure(grid, u, norm, iterations));
        }
        let step = rhs;

        let mut lambda = 1.0;
        let (trial, trial_res, trial_norm) = loop {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
            let trial_res = residual_values(grid, &trial, &norms2);
            let trial_norm = max_abs(&trial_res);
            if trial_norm.is_finite() && trial_norm < (1.0 - 1e-4 * lambda) * norm || lambda < 1.0 / 1024.0 {
                break (trial, trial_res, trial_norm);
            }
            lambda /= 2.0;
        };
        iterations += 1;
        if !(trial_norm < norm) {
            increases += 1;
            if increases >= DIVERGENCE_STREAK || !trial_norm.is_finite() {
                return Err(failure(grid, u, norm, iterations));
            }
        } else {
            increases = 0;
        }
        u = trial;
        res = trial_res;
        norm = trial_norm;
    }

    Ok(ConformalFactorField {
        grid: grid.clone(),
        values: u,
        residual_norm: norm,
        converged: norm <= tol,
        iterations,
    })
}

fn failure(grid: &DiskGrid, values: Vec<f64>, residual: f64, iterations: usize) -> Error {
    Error::SolverFailure {
        iterations,
        residual,
        last_iterate: Box::new(ConformalFactorField {
            grid: grid.clone(),
            values,
            residual_norm: residual,
            converged: false,
            iterations,
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub min: f64,
    pub max: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub passed: bool,
    pub boundary_condition: String,
}

/// Checks `−ln(2)/2 < u ≤ 0` over the nodes.
pub fn check_bounds(u: &ConformalFactorField) -> BoundsReport {
    let min = u.values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = u.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    BoundsReport {
        min,
        max,
        lower_bound: LOWER_BOUND,
        upper_bound: UPPER_SLACK,
        passed: min > LOWER_BOUND && max <= UPPER_SLACK,
        boundary_condition: BOUNDARY_CONDITION.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlmostFuchsianReport {
    /// Largest `‖α‖_g` over the nodes.
    pub sup: f64,
    pub argmax: usize,
    pub at: Complex64,
    pub passed: bool,
    pub boundary_condition: String,
}

/// `sup ‖α‖_g = sup e^{−2u} ‖α‖_h` over the nodes; passes when below 1.
pub fn almost_fuchsian_check(u: &ConformalFactorField, alpha: &QuadDifferential) -> AlmostFuchsianReport {
    let (argmax, sup) = (0..u.grid.len())
        .map(|k| (k, (-2.0 * u.values[k]).exp() * alpha.norm_hyperbolic_unchecked(u.grid.point(k))))
        .fold((0, 0.0), |acc, c| if c.1 > acc.1 { c } else { acc });
    AlmostFuchsianReport {
        sup,
        argmax,
        at: u.grid.point(argmax),
        passed: sup < 1.0,
        boundary_condition: BOUNDARY_CONDITION.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_alpha(c: f64) -> QuadDifferential {
        QuadDifferential::new(vec![Complex64::new(c, 0.0)]).unwrap()
    }

    /// Radial shooting solution of the same boundary value problem for a
    /// constant differential, whose norm depends only on `|z|`.
    fn radial_oracle(c: f64, rho: f64) -> impl Fn(f64) -> f64 {
        let rhs = move |r: f64, u: f64| {
            let s = 1.0 - r * r;
            let n = c * s * s / 4.0;
            4.0 / (s * s) * ((2.0 * u).exp() + (-2.0 * u).exp() * n * n - 1.0)
        };
        let steps = 20_000;
        let shoot = move |a: f64| -> Vec<(f64, f64)> {
            // series start: u ≈ a + rhs(0,a) r²/4
            let r0 = 1e-6;
            let s0 = rhs(0.0, a);
            let (mut r, mut u, mut v) = (r0, a + s0 * r0 * r0 / 4.0, s0 * r0 / 2.0);
            let dr = (rho - r0) / steps as f64;
            let f = |r: f64, u: f64, v: f64| (v, rhs(r, u) - v / r);
            let mut out = vec![(0.0, a), (r, u)];
            for _ in 0..steps {
                let k1 = f(r, u, v);
                let k2 = f(r + dr / 2.0, u + dr / 2.0 * k1.0, v + dr / 2.0 * k1.1);
                let k3 = f(r + dr / 2.0, u + dr / 2.0 * k2.0, v + dr / 2.0 * k2.1);
                let k4 = f(r + dr, u + dr * k3.0, v + dr * k3.1);
                u += dr / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                v += dr / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                r += dr;
                out.push((r, u));
            }
            out
        };
        let (mut lo, mut hi) = (-0.5, 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if shoot(mid).last().unwrap().1 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let profile = shoot(0.5 * (lo + hi));
        move |r: f64| {
            let k = profile.partition_point(|p| p.0 <= r).clamp(1, profile.len() - 1);
            let (a, b) = (profile[k - 1], profile[k]);
            a.1 + (b.1 - a.1) * (r - a.0) / (b.0 - a.0)
        }
    }

    #[test]
    fn zero_differential_gives_zero_field() {
        let grid = DiskGrid::new(0.85, 33).unwrap();
        let u = solve(&QuadDifferential::zero(), &grid, 1e-10, 20).unwrap();
        assert!(u.converged);
        assert_eq!(u.iterations, 0);
        assert!(u.values.iter().all(|&v| v == 0.0));
        assert!(u.residual_norm <= 1e-12);
    }

    #[test]
    fn residual_of_constant_field() {
        let grid = DiskGrid::new(0.85, 33).unwrap();
        let u = ConformalFactorField::constant(grid.clone(), -0.1);
        let r = residual(&u, &QuadDifferential::zero()).unwrap();
        let want = 1.0 - (-0.2f64).exp();
        for k in (0..grid.len()).filter(|&k| !grid.is_boundary_adjacent(k)) {
            assert!((r[k] - want).abs() < 1e-12);
        }
        assert!((want - 0.1813).abs() < 1e-4);
    }

    #[test]
    fn residual_rejects_mismatched_field() {
        let grid = DiskGrid::new(0.85, 33).unwrap();
        let mut u = ConformalFactorField::constant(grid, 0.0);
        u.values.pop();
        assert!(matches!(residual(&u, &QuadDifferential::zero()), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn bounds_reporter() {
        let grid = DiskGrid::new(0.85, 17).unwrap();
        assert!(check_bounds(&ConformalFactorField::constant(grid.clone(), 0.0)).passed);
        assert!(!check_bounds(&ConformalFactorField::constant(grid.clone(), -0.5)).passed);
        assert!(!check_bounds(&ConformalFactorField::constant(grid, 1e-6)).passed);
    }

    #[test]
    fn outside_regime_is_rejected() {
        let grid = DiskGrid::new(0.85, 33).unwrap();
        // ‖α‖_h = c (1−|z|²)²/4 peaks at the origin
        match solve(&constant_alpha(4.4), &grid, 1e-10, 20) {
            Err(Error::NotAlmostFuchsian { sup, at }) => {
                assert!((sup - 1.1).abs() < 1e-12);
                assert_eq!(at, Complex64::new(0.0, 0.0));
            }
            other => panic!("{other:?}"),
        }
        assert!(solve(&QuadDifferential::zero(), &grid, 0.0, 20).is_err());
    }

    #[test]
    fn small_differential_satisfies_bounds() {
        let grid = DiskGrid::new(0.85, 65).unwrap();
        let alpha = constant_alpha(1.2);
        let u = solve(&alpha, &grid, 1e-10, 50).unwrap();
        assert!(u.converged, "{}", u.residual_norm);
        assert!(max_abs(&residual(&u, &alpha).unwrap()) <= 1e-10);
        let b = check_bounds(&u);
        assert!(b.passed, "{b:?}");
        assert!(b.min < 0.0);
        let af = almost_fuchsian_check(&u, &alpha);
        assert!(af.passed && af.sup <= 0.6, "{af:?}");
    }

    #[test]
    fn matches_radial_shooting_oracle() {
        let c = 2.0;
        let oracle = radial_oracle(c, 0.85);
        let mut errors = Vec::new();
        for side in [33, 65] {
            let grid = DiskGrid::new(0.85, side).unwrap();
            let u = solve(&constant_alpha(c), &grid, 1e-12, 50).unwrap();
            let err = (0..grid.len())
                .map(|k| (u.values[k] - oracle(grid.point(k).norm())).abs())
                .fold(0.0, f64::max);
            errors.push(err);
        }
        assert!(errors[1] < 2e-4, "{errors:?}");
        assert!(errors[0] / errors[1] > 3.0, "{errors:?}");
    }

    #[test]
    fn second_order_under_refinement() {
        let alpha = QuadDifferential::new(vec![
            Complex64::new(0.6, 0.2),
            Complex64::new(0.0, 0.5),
            Complex64::new(-0.4, 0.0),
        ])
        .unwrap();
        let sides = [33usize, 65, 129];
        let fields: Vec<_> = sides
            .iter()
            .map(|&s| solve(&alpha, &DiskGrid::new(0.85, s).unwrap(), 1e-12, 50).unwrap())
            .collect();
        let diff = |coarse: &ConformalFactorField, fine: &ConformalFactorField| {
            (0..coarse.grid.len())
                .map(|k| {
                    let (i, j) = coarse.grid.lattice_position(k);
                    let f = fine.grid.node_at(2 * i as i64, 2 * j as i64).unwrap();
                    (coarse.values[k] - fine.values[f]).abs()
                })
                .fold(0.0, f64::max)
        };
        let order = (diff(&fields[0], &fields[1]) / diff(&fields[1], &fields[2])).log2();
        assert!(order >= 1.8, "observed order {order}");
    }

    #[test]
    fn scaling_up_lowers_the_field() {
        let grid = DiskGrid::new(0.85, 33).unwrap();
        let base = QuadDifferential::new(vec![Complex64::new(0.5, 0.5), Complex64::new(1.0, 0.0)]).unwrap();
        let u1 = solve(&base, &grid, 1e-11, 50).unwrap();
        let u2 = solve(&base.scaled(1.5), &grid, 1e-11, 50).unwrap();
        assert!(u1.values.iter().zip(&u2.values).all(|(a, b)| b <= a));
    }

    #[test]
    fn interpolation_reproduces_nodes_and_vanishes_on_circle() {
        let grid = DiskGrid::new(0.85, 33).unwrap();
        let u = solve(&constant_alpha(2.0), &grid, 1e-11, 50).unwrap();
        for k in (0..grid.len()).step_by(7) {
            assert!((u.interpolate(grid.point(k)).unwrap() - u.values[k]).abs() < 1e-14);
        }
        let edge = u.interpolate(Complex64::from_polar(0.85, 0.3)).unwrap();
        assert!(edge.abs() < 2e-3, "{edge}");
        assert!(u.interpolate(Complex64::new(0.9, 0.0)).is_err());
    }
}
