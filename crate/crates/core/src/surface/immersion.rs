//! Moving-frame reconstruction of a minimal disk in ℍ³ from its induced
//! metric `g = e^{2u} h` and Hopf differential `α = f dz²`.
//!
//! With `φ = u + ln(2/(1−|z|²))`, `g = e^{2φ}|dz|²`, second fundamental
//! form `B = Re(f dz²)` and orthonormal frame `F = (X, e1, e2, N)` in the
//! hyperboloid model, the structure equations read `∂F = F A` with
//!
//! ```text
//! ∂x X  = e^φ e1                       ∂y X  = e^φ e2
//! ∂x e1 = e^φ X − φ_y e2 − e^{−φ}B11 N  ∂y e1 = φ_x e2 − e^{−φ}B12 N
//! ∂x e2 = φ_y e1 − e^{−φ}B12 N          ∂y e2 = e^φ X − φ_x e1 − e^{−φ}B22 N
//! ∂x N  = e^{−φ}(B11 e1 + B12 e2)       ∂y N  = e^{−φ}(B12 e1 + B22 e2)
//! ```
//!
//! The system is integrable exactly when `u` solves the Gauss equation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss_equation::ConformalFactorField;
use crate::grid::DiskGrid;
use crate::quad_diff::QuadDifferential;

use super::frame::{
    column, lorentz_gram_defect, lorentz_inverse, mat_axpy, mat_mul, max_abs_diff_from_identity, minkowski,
    FramePoint, Mat4,
};

pub const DEFAULT_LOOP_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImmersedPatch {
    pub grid: DiskGrid,
    pub frames: Vec<FramePoint>,
    pub u: ConformalFactorField,
    pub alpha: QuadDifferential,
    /// Largest holonomy defect `max |F⁻¹ F' − I|` over grid plaquettes.
    pub loop_error: f64,
    /// Largest Lorentz Gram defect of the integrated frames.
    pub gram_defect: f64,
    pub tolerance: f64,
    pub valid: bool,
    #[serde(skip)]
    lorentz: Vec<Mat4>,
}

/// Local geometric data `(z, u, u_x, u_y)` defining the connection.
#[derive(Clone, Copy, Debug)]
struct Sample {
    z: Complex64,
    u: f64,
    ux: f64,
    uy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

fn connection(s: &Sample, alpha: &QuadDifferential, axis: Axis) -> Mat4 {
    let w = 1.0 - s.z.norm_sqr();
    let phi = s.u + (2.0 / w).ln();
    let phi_x = s.ux + 2.0 * s.z.re / w;
    let phi_y = s.uy + 2.0 * s.z.im / w;
    let e = phi.exp();
    let f = alpha.eval(s.z);
    let (b11, b12, b22) = (f.re / e, -f.im / e, -f.re / e);
    let mut a = [[0.0; 4]; 4];
    match axis {
        Axis::X => {
            a[1][0] = e;
            a[0][1] = e;
            a[2][1] = -phi_y;
            a[3][1] = -b11;
            a[1][2] = phi_y;
            a[3][2] = -b12;
            a[1][3] = b11;
            a[2][3] = b12;
        }
        Axis::Y => {
            a[2][0] = e;
            a[2][1] = phi_x;
            a[3][1] = -b12;
            a[0][2] = e;
            a[1][2] = -phi_x;
            a[3][2] = -b22;
            a[1][3] = b12;
            a[2][3] = b22;
        }
    }
    a
}

struct Integrator<'a> {
    grid: &'a DiskGrid,
    alpha: &'a QuadDifferential,
    samples: Vec<Sample>,
    ax: Vec<Mat4>,
    ay: Vec<Mat4>,
}

impl<'a> Integrator<'a> {
    fn new(u: &'a ConformalFactorField, alpha: &'a QuadDifferential) -> Self {
        let grid = &u.grid;
        let samples: Vec<Sample> = (0..grid.len())
            .map(|k| {
                let (ux, uy) = u.gradient(k);
                Sample { z: grid.point(k), u: u.values[k], ux, uy }
            })
            .collect();
        let ax = samples.par_iter().map(|s| connection(s, alpha, Axis::X)).collect();
        let ay = samples.par_iter().map(|s| connection(s, alpha, Axis::Y)).collect();
        Integrator { grid, alpha, samples, ax, ay }
    }

    /// Transports `f` from node `p` to its lattice neighbor `q` with one RK4
    /// step; midpoint data use cubic Hermite interpolation of `u`.
    fn step(&self, f: &Mat4, p: usize, q: usize) -> Mat4 {
        let (sp, sq) = (&self.samples[p], &self.samples[q]);
        let d = sq.z - sp.z;
        let (axis, delta) = if d.re.abs() > d.im.abs() { (Axis::X, d.re) } else { (Axis::Y, d.im) };
        let (dp, dq) = match axis {
            Axis::X => (sp.ux, sq.ux),
            Axis::Y => (sp.uy, sq.uy),
        };
        let mid = Sample {
            z: 0.5 * (sp.z + sq.z),
            u: 0.5 * (sp.u + sq.u) + delta * (dp - dq) / 8.0,
            ux: 0.5 * (sp.ux + sq.ux),
            uy: 0.5 * (sp.uy + sq.uy),
        };
        let table = match axis {
            Axis::X => &self.ax,
            Axis::Y => &self.ay,
        };
        let (a0, a1) = (&table[p], &table[q]);
        let am = connection(&mid, self.alpha, axis);
        let k1 = mat_mul(f, a0);
        let k2 = mat_mul(&mat_axpy(f, 0.5 * delta, &k1), &am);
        let k3 = mat_mul(&mat_axpy(f, 0.5 * delta, &k2), &am);
        let k4 = mat_mul(&mat_axpy(f, delta, &k3), a1);
        let mut out = *f;
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] += delta / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
        out
    }

    /// Spanning tree: along the row through the center, then up and down
    /// every column.
    fn integrate(&self, anchor: Mat4) -> Vec<Mat4> {
        let grid = self.grid;
        let mut frames: Vec<Option<Mat4>> = vec![None; grid.len()];
        let center = grid.center();
        frames[center] = Some(anchor);
        let (ic, jc) = grid.lattice_position(center);
        let (ic, jc) = (ic as i64, jc as i64);

        let mut row = vec![center];
        for di in [1i64, -1] {
            let mut prev = center;
            let mut i = ic + di;
            while let Some(node) = grid.node_at(i, jc) {
                frames[node] = Some(self.step(frames[prev].as_ref().unwrap(), prev, node));
                row.push(node);
                prev = node;
                i += di;
            }
        }
        let columns: Vec<Vec<(usize, Mat4)>> = row
            .par_iter()
            .map(|&start| {
                let (i, _) = grid.lattice_position(start);
                let mut out = Vec::new();
                for dj in [1i64, -1] {
                    let mut prev = start;
                    let mut f = frames[start].unwrap();
                    let mut j = jc + dj;
                    while let Some(node) = grid.node_at(i as i64, j) {
                        f = self.step(&f, prev, node);
                        out.push((node, f));
                        prev = node;
                        j += dj;
                    }
                }
                out
            })
            .collect();
        for col in columns {
            for (node, f) in col {
                frames[node] = Some(f);
            }
        }
        frames.into_iter().map(|f| f.expect("every node lies on the spanning tree")).collect()
    }

    fn loop_error(&self, frames: &[Mat4]) -> f64 {
        let grid = self.grid;
        (0..grid.len())
            .into_par_iter()
            .filter_map(|k| {
                let (i, j) = grid.lattice_position(k);
                let (i, j) = (i as i64, j as i64);
                let east = grid.node_at(i + 1, j)?;
                let north = grid.node_at(i, j + 1)?;
                let corner = grid.node_at(i + 1, j + 1)?;
                let f = &frames[k];
                let via_east = self.step(&self.step(f, k, east), east, corner);
                let via_north = self.step(&self.step(f, k, north), north, corner);
                Some(max_abs_diff_from_identity(&mat_mul(&lorentz_inverse(&via_east), &via_north)))
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Integrates frames outward from `anchor`, placed at the grid center.
pub fn integrate_immersion(
    u: &ConformalFactorField,
    alpha: &QuadDifferential,
    anchor: &FramePoint,
) -> Result<ImmersedPatch> {
    integrate_immersion_with(u, alpha, anchor, DEFAULT_LOOP_TOLERANCE)
}

pub fn integrate_immersion_with(
    u: &ConformalFactorField,
    alpha: &QuadDifferential,
    anchor: &FramePoint,
    tolerance: f64,
) -> Result<ImmersedPatch> {
    if !u.converged {
        return Err(Error::Precondition(format!(
            "conformal factor is not converged (residual {:e})",
            u.residual_norm
        )));
    }
    let anchor = FramePoint::new(anchor.position, anchor.tangent1, anchor.tangent2, anchor.normal)?;
    let integrator = Integrator::new(u, alpha);
    let lorentz = integrator.integrate(anchor.to_lorentz());
    let loop_error = integrator.loop_error(&lorentz);
    let gram_defect = lorentz.par_iter().map(lorentz_gram_defect).reduce(|| 0.0, f64::max);
    let frames = lorentz.iter().map(FramePoint::from_lorentz).collect();
    Ok(ImmersedPatch {
        grid: u.grid.clone(),
        frames,
        u: u.clone(),
        alpha: alpha.clone(),
        loop_error,
        gram_defect,
        tolerance,
        valid: loop_error <= tolerance,
        lorentz,
    })
}

/// Offsets of a patch from the normalized position: distance of the center
/// from `(0, 1)`, deviation of its normal from `(0, 0, −1)`, and `|f(0)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationOffsets {
    pub position: f64,
    pub normal: f64,
    pub differential: f64,
}

impl NormalizationOffsets {
    pub fn max(&self) -> f64 {
        self.position.max(self.normal).max(self.differential)
    }
}

impl ImmersedPatch {
    pub fn center_frame(&self) -> &FramePoint {
        &self.frames[self.grid.center()]
    }

    pub fn normalization_offsets(&self) -> NormalizationOffsets {
        let c = self.center_frame();
        let position = (c.position.z.norm_sqr() + (c.position.t - 1.0).powi(2)).sqrt();
        let n = c.normal;
        let normal = (n[0] * n[0] + n[1] * n[1] + (n[2] + 1.0).powi(2)).sqrt();
        let differential = self.alpha.eval(self.grid.point(self.grid.center())).norm();
        NormalizationOffsets { position, normal, differential }
    }

    /// `φ = u + ln(2/(1−|z|²))` at a node, so that `g = e^{2φ}|dz|²`.
    pub fn log_conformal_factor(&self, node: usize) -> f64 {
        self.u.values[node] + (2.0 / (1.0 - self.grid.point(node).norm_sqr())).ln()
    }

    /// Largest relative deviation of the first fundamental form, recomputed
    /// from the integrated positions by central differences, from
    /// `e^{2φ}|dz|²`. Nodes without both neighbors on an axis are skipped.
    pub fn first_form_defect(&self) -> f64 {
        self.first_form_defect_within(f64::INFINITY)
    }

    /// As [`ImmersedPatch::first_form_defect`], over nodes with `|z| ≤ radius`.
    pub fn first_form_defect_within(&self, radius: f64) -> f64 {
        let grid = &self.grid;
        let h = grid.spacing();
        (0..grid.len())
            .into_par_iter()
            .filter_map(|k| {
                let nb: Vec<usize> = (0..4).filter_map(|d| grid.neighbor(k, d)).collect();
                if nb.len() < 4 || grid.point(k).norm() > radius {
                    return None;
                }
                let pos = |n: usize| column(&self.lorentz[n], 0);
                let diff = |a: usize, b: usize| {
                    let (pa, pb) = (pos(a), pos(b));
                    [0, 1, 2, 3].map(|r| (pa[r] - pb[r]) / (2.0 * h))
                };
                let xx = diff(nb[0], nb[1]);
                let yy = diff(nb[2], nb[3]);
                let scale = (2.0 * self.log_conformal_factor(k)).exp();
                let g11 = minkowski(&xx, &xx) / scale;
                let g12 = minkowski(&xx, &yy) / scale;
                let g22 = minkowski(&yy, &yy) / scale;
                Some((g11 - 1.0).abs().max(g12.abs()).max((g22 - 1.0).abs()))
            })
            .reduce(|| 0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss_equation::solve;

    fn flat_patch(side: usize) -> ImmersedPatch {
        let grid = DiskGrid::new(0.85, side).unwrap();
        let u = solve(&QuadDifferential::zero(), &grid, 1e-12, 10).unwrap();
        integrate_immersion(&u, &QuadDifferential::zero(), &FramePoint::anchor()).unwrap()
    }

    #[test]
    fn flat_data_gives_the_unit_hemisphere() {
        let patch = flat_patch(129);
        assert!(patch.valid);
        for (k, f) in patch.frames.iter().enumerate() {
            let z = patch.grid.point(k);
            let d = 1.0 + z.norm_sqr();
            let want_z = 2.0 * z / d;
            let want_t = (1.0 - z.norm_sqr()) / d;
            assert!((f.position.z - want_z).norm() < 1e-6, "{k}");
            assert!((f.position.t - want_t).abs() < 1e-6);
            // normal along the inward radius of the hemisphere
            let p = f.position;
            let n = [-p.z.re * p.t, -p.z.im * p.t, -p.t * p.t];
            for c in 0..3 {
                assert!((f.normal[c] - n[c]).abs() < 1e-6);
            }
        }
        assert!(patch.gram_defect < 1e-6, "{:e}", patch.gram_defect);
    }

    #[test]
    fn unconverged_field_is_rejected() {
        let grid = DiskGrid::new(0.85, 17).unwrap();
        let u = ConformalFactorField::constant(grid, 0.0);
        assert!(integrate_immersion(&u, &QuadDifferential::zero(), &FramePoint::anchor()).is_err());
    }

    #[test]
    fn normalized_flat_patch() {
        let patch = flat_patch(17);
        assert!(patch.normalization_offsets().max() < 1e-15);
    }

    #[test]
    fn loop_error_is_fourth_order() {
        let alpha = QuadDifferential::new(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.8, 0.3),
            Complex64::new(-0.5, 0.6),
        ])
        .unwrap();
        let errs: Vec<f64> = [33usize, 65]
            .iter()
            .map(|&s| {
                let grid = DiskGrid::new(0.85, s).unwrap();
                let u = solve(&alpha, &grid, 1e-12, 50).unwrap();
                integrate_immersion(&u, &alpha, &FramePoint::anchor()).unwrap().loop_error
            })
            .collect();
        let order = (errs[0] / errs[1]).log2();
        assert!(order >= 3.5, "{errs:?} order {order}");
    }

    #[test]
    fn first_form_matches_metric() {
        let alpha = QuadDifferential::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let defects: Vec<(f64, f64)> = [33usize, 65]
            .iter()
            .map(|&s| {
                let grid = DiskGrid::new(0.85, s).unwrap();
                let u = solve(&alpha, &grid, 1e-12, 50).unwrap();
                let p = integrate_immersion(&u, &alpha, &FramePoint::anchor()).unwrap();
                (p.first_form_defect(), p.first_form_defect_within(0.6))
            })
            .collect();
        assert!(defects[1].0 < 3e-2, "{defects:?}");
        let order = (defects[0].1 / defects[1].1).log2();
        assert!(order > 1.8, "{defects:?}");
    }
}
