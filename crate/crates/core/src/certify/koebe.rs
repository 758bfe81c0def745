//! Quasiconformal Koebe-type bounds: the Astala–Gehring average
//! `a_f(x) = exp(½ ⟨log J_f⟩_{B(x)})` against the distance ratio
//! `d(f(x), ∂V) / d(x, ∂U)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::DiskGrid;
use crate::kleinian::LimitSetSample;
use crate::surface::{beltrami_estimate, BoundaryField};

/// Radial Gauss–Legendre order used for ball averages.
const RADIAL_NODES: usize = 48;
/// Angular samples per radial node.
const ANGULAR_NODES: usize = 192;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KoebeReport {
    pub a_value: f64,
    /// `d(f(x), ∂V) / d(x, ∂U)` at the grid center.
    pub ratio: f64,
    pub k: f64,
    /// Smallest `C` with `ratio/C ≤ a ≤ C·ratio`.
    pub empirical_c: f64,
    pub c_koebe: f64,
    pub holds: bool,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// the Legendre recurrence.
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Local least-squares polynomial fit of node data, evaluated at `z`.
struct LocalFit<'a> {
    grid: &'a DiskGrid,
    values: &'a [f64],
}

impl LocalFit<'_> {
    fn eval(&self, z: Complex64) -> f64 {
        let grid = self.grid;
        let h = grid.spacing();
        let fi = ((z.re + grid.radius()) / h).round() as i64;
        let fj = ((z.im + grid.radius()) / h).round() as i64;
        let mut pts: Vec<(f64, f64, f64)> = Vec::with_capacity(49);
        for dj in -3..=3 {
            for di in -3..=3 {
                if let Some(node) = grid.node_at(fi + di, fj + dj) {
                    let d = (grid.point(node) - z) / h;
                    if d.norm() <= 2.6 {
                        pts.push((d.re, d.im, self.values[node]));
                    }
                }
            }
        }
        for degree in [3usize, 2, 1] {
            let terms = (degree + 1) * (degree + 2) / 2;
            if pts.len() >= terms + 4 {
                if let Some(v) = fit_at_origin(&pts, degree) {
                    return v;
                }
            }
        }
        pts.iter().map(|p| p.2).sum::<f64>() / pts.len().max(1) as f64
    }
}

fn monomials(x: f64, y: f64, degree: usize, out: &mut Vec<f64>) {
    out.clear();
    for total in 0..=degree {
        for py in 0..=total {
            out.push(x.powi((total - py) as i32) * y.powi(py as i32));
        }
    }
}

/// Value at the origin of the least-squares polynomial of the given degree.
fn fit_at_origin(pts: &[(f64, f64, f64)], degree: usize) -> Option<f64> {
    let m = (degree + 1) * (degree + 2) / 2;
    let mut ata = vec![0.0; m * m];
    let mut atb = vec![0.0; m];
    let mut row = Vec::with_capacity(m);
    for &(x, y, v) in pts {
        monomials(x, y, degree, &mut row);
        for i in 0..m {
            atb[i] += row[i] * v;
            for j in 0..m {
                ata[i * m + j] += row[i] * row[j];
            }
        }
    }
    // Cholesky-free Gaussian elimination with partial pivoting
    for k in 0..m {
        let p = (k..m).max_by(|&a, &b| ata[a * m + k].abs().total_cmp(&ata[b * m + k].abs()))?;
        if ata[p * m + k].abs() < 1e-12 {
            return None;
        }
        if p != k {
            for j in 0..m {
                ata.swap(k * m + j, p * m + j);
            }
            atb.swap(k, p);
        }
        for i in k + 1..m {
            let l = ata[i * m + k] / ata[k * m + k];
            for j in k..m {
                ata[i * m + j] -= l * ata[k * m + j];
            }
            atb[i] -= l * atb[k];
        }
    }
    let mut x = vec![0.0; m];
    for k in (0..m).rev() {
        let mut s = atb[k];
        for j in k + 1..m {
            s -= ata[k * m + j] * x[j];
        }
        x[k] = s / ata[k * m + k];
    }
    Some(x[0])
}

/// `exp(½ · mean of log J)` over the largest disk about node `x` inside the
/// grid disk. Area weights come from a polar Gauss–Legendre × trapezoid
/// rule; `log J` between nodes is a local least-squares cubic.
pub fn astala_gehring_a(jacobian: &[Option<f64>], x: usize, grid: &DiskGrid) -> Result<f64> {
    if jacobian.len() != grid.len() {
        return Err(Error::GridMismatch(format!("{} Jacobian values for {} nodes", jacobian.len(), grid.len())));
    }
    let center = grid.point(x);
    let radius = grid.radius() - center.norm();
    let mut log_j = vec![0.0; grid.len()];
    for k in 0..grid.len() {
        let inside = (grid.point(k) - center).norm() < radius + grid.spacing();
        match jacobian[k] {
            Some(j) if j > 0.0 && j.is_finite() => log_j[k] = j.ln(),
            Some(j) if inside => {
                return Err(Error::DegenerateNode { index: k, reason: format!("Jacobian {j} is not positive") });
            }
            None if inside => {
                return Err(Error::DegenerateNode { index: k, reason: "no Jacobian available".into() });
            }
            _ => {}
        }
    }
    let fit = LocalFit { grid, values: &log_j };
    let gl = gauss_legendre(RADIAL_NODES);
    let total: f64 = gl
        .par_iter()
        .map(|&(s, w)| {
            let r = 0.5 * radius * (s + 1.0);
            let ring: f64 = (0..ANGULAR_NODES)
                .map(|k| {
                    let theta = std::f64::consts::TAU * (k as f64 + 0.5) / ANGULAR_NODES as f64;
                    fit.eval(center + Complex64::from_polar(r, theta))
                })
                .sum::<f64>()
                / ANGULAR_NODES as f64;
            // ∫ r dr over [0, R] has weight R/2 · w · r
            0.5 * radius * w * r * ring
        })
        .sum();
    let mean = total / (0.5 * radius * radius);
    Ok((0.5 * mean).exp())
}

/// Compares `a_f` at the grid center with the distance ratio, taking `∂U` to
/// be the grid circle and `∂V` the images of the nodes adjacent to it.
/// The image ring lies inside `V`, so the ratio under-estimates
/// `d(f(0), ∂V)` for expanding maps. The Jacobian is the finite-difference
/// estimate of [`beltrami_estimate`].
pub fn koebe_bounds_check(map: &BoundaryField, c_koebe: f64) -> Result<KoebeReport> {
    let est = beltrami_estimate(map);
    koebe_report(map, &est.jacobian, est.k, c_koebe)
}

/// [`koebe_bounds_check`] with a caller-supplied Jacobian, e.g. `|f′|²` for
/// a holomorphic map whose finite differences are unreliable near a pole.
pub fn koebe_bounds_check_with_jacobian(
    map: &BoundaryField,
    jacobian: &[Option<f64>],
    c_koebe: f64,
) -> Result<KoebeReport> {
    let k = beltrami_estimate(map).k;
    koebe_report(map, jacobian, k, c_koebe)
}

fn koebe_report(map: &BoundaryField, jacobian: &[Option<f64>], k: f64, c_koebe: f64) -> Result<KoebeReport> {
    let grid = &map.grid;
    check_injective(map)?;
    let center = grid.center();
    let a_value = astala_gehring_a(jacobian, center, grid)?;
    let f0 = map.values[center]
        .finite()
        .ok_or_else(|| Error::Precondition("center maps to infinity".into()))?;
    let image_distance = (0..grid.len())
        .filter(|&k| grid.is_boundary_adjacent(k))
        .filter_map(|k| map.values[k].finite())
        .map(|w| (w - f0).norm())
        .fold(f64::INFINITY, f64::min);
    let ratio = image_distance / (grid.radius() - grid.point(center).norm());
    let empirical_c = (a_value / ratio).max(ratio / a_value);
    Ok(KoebeReport { a_value, ratio, k, empirical_c, c_koebe, holds: empirical_c <= c_koebe })
}

/// Deduplicates the images of every `stride`-th node at resolution `1e-9`.
fn check_injective(map: &BoundaryField) -> Result<()> {
    let stride = (map.values.len() / 20_000).max(1);
    let picked: Vec<_> = map.values.iter().step_by(stride).copied().collect();
    let deduped = LimitSetSample::from_points(picked.iter().copied(), 1e-9);
    if deduped.len() < picked.len() {
        return Err(Error::Precondition(format!(
            "map is not injective at resolution 1e-9 ({} of {} sampled images distinct)",
            deduped.len(),
            picked.len()
        )));
    }
    Ok(())
}
