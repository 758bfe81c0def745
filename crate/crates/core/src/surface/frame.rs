//! Orthonormal frames in ℍ³, in the upper half-space (I/O) and hyperboloid
//! (integration) models.
//!
//! Half-space tangent vectors are Euclidean 3-vectors `(dx, dy, dt)`; a
//! vector is hyperbolic-unit at height `t` when its Euclidean norm is `t`.
//! Hyperboloid frames are 4×4 matrices whose columns are `X, e1, e2, N` in
//! coordinates `(x0, x1, x2, x3)` with form `−x0² + x1² + x2² + x3²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::HalfSpacePoint;

pub type Vec3 = [f64; 3];
pub type Vec4 = [f64; 4];
/// Column-major in meaning: `m[r][c]` is coordinate `r` of column `c`.
pub type Mat4 = [[f64; 4]; 4];

pub const GRAM_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FramePoint {
    pub position: HalfSpacePoint,
    pub tangent1: Vec3,
    pub tangent2: Vec3,
    pub normal: Vec3,
}

impl FramePoint {
    /// Validates orthonormality (within [`GRAM_TOLERANCE`]) and orientation.
    pub fn new(position: HalfSpacePoint, tangent1: Vec3, tangent2: Vec3, normal: Vec3) -> Result<Self> {
        let f = FramePoint { position, tangent1, tangent2, normal };
        let defect = f.gram_defect();
        if !(defect <= GRAM_TOLERANCE) {
            return Err(Error::Precondition(format!("frame is not orthonormal (Gram defect {defect:e})")));
        }
        if !f.is_positively_oriented() {
            return Err(Error::Precondition("frame has the wrong orientation".into()));
        }
        Ok(f)
    }

    /// The normalized frame at `(0, 1)`: `∂x, ∂y` tangent, normal pointing
    /// down towards `0`.
    pub fn anchor() -> Self {
        FramePoint {
            position: HalfSpacePoint::origin(),
            tangent1: [1.0, 0.0, 0.0],
            tangent2: [0.0, 1.0, 0.0],
            normal: [0.0, 0.0, -1.0],
        }
    }

    /// Largest entry of `Gram − I` in the hyperbolic inner product.
    pub fn gram_defect(&self) -> f64 {
        let t2 = self.position.t * self.position.t;
        let v = [self.tangent1, self.tangent2, self.normal];
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let g = dot3(&v[i], &v[j]) / t2;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Oriented like [`FramePoint::anchor`]: `(tangent1, tangent2, −normal)`
    /// is right-handed.
    pub fn is_positively_oriented(&self) -> bool {
        dot3(&cross3(&self.tangent1, &self.tangent2), &self.normal) < 0.0
    }

    pub fn to_lorentz(&self) -> Mat4 {
        let x = hyperboloid_point(&self.position);
        let cols = [
            x,
            push_to_hyperboloid(&self.position, &self.tangent1),
            push_to_hyperboloid(&self.position, &self.tangent2),
            push_to_hyperboloid(&self.position, &self.normal),
        ];
        from_columns(&cols)
    }

    /// Inverse of [`FramePoint::to_lorentz`]; performs no validation.
    pub fn from_lorentz(m: &Mat4) -> Self {
        let x = column(m, 0);
        let position = half_space_point(&x);
        FramePoint {
            position,
            tangent1: pull_to_half_space(&x, &column(m, 1)),
            tangent2: pull_to_half_space(&x, &column(m, 2)),
            normal: pull_to_half_space(&x, &column(m, 3)),
        }
    }
}

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn minkowski(a: &Vec4, b: &Vec4) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// `(z, t) ↦ ((1 + t² + |z|²)/2t, x/t, y/t, (t² + |z|² − 1)/2t)`.
pub fn hyperboloid_point(p: &HalfSpacePoint) -> Vec4 {
    let (z, t) = (p.z, p.t);
    let r2 = z.norm_sqr();
    [(1.0 + t * t + r2) / (2.0 * t), z.re / t, z.im / t, (t * t + r2 - 1.0) / (2.0 * t)]
}

pub fn half_space_point(x: &Vec4) -> HalfSpacePoint {
    let s = x[0] - x[3];
    HalfSpacePoint { z: Complex64::new(x[1] / s, x[2] / s), t: 1.0 / s }
}

/// Differential of [`hyperboloid_point`] applied to `v = (dx, dy, dt)`.
pub fn push_to_hyperboloid(p: &HalfSpacePoint, v: &Vec3) -> Vec4 {
    let (x, y, t) = (p.z.re, p.z.im, p.t);
    let r2 = x * x + y * y;
    let dt0 = 0.5 - (1.0 + r2) / (2.0 * t * t);
    let dt3 = 0.5 - (r2 - 1.0) / (2.0 * t * t);
    [
        (x * v[0] + y * v[1]) / t + dt0 * v[2],
        v[0] / t - x * v[2] / (t * t),
        v[1] / t - y * v[2] / (t * t),
        (x * v[0] + y * v[1]) / t + dt3 * v[2],
    ]
}

/// Differential of [`half_space_point`] at `x` applied to `v`.
pub fn pull_to_half_space(x: &Vec4, v: &Vec4) -> Vec3 {
    let s = x[0] - x[3];
    let ds = v[0] - v[3];
    [
        v[1] / s - x[1] * ds / (s * s),
        v[2] / s - x[2] * ds / (s * s),
        -ds / (s * s),
    ]
}

pub fn column(m: &Mat4, c: usize) -> Vec4 {
    [m[0][c], m[1][c], m[2][c], m[3][c]]
}

pub fn from_columns(cols: &[Vec4; 4]) -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for (c, col) in cols.iter().enumerate() {
        for r in 0..4 {
            m[r][c] = col[r];
        }
    }
    m
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..4 {
                    out[i][j] += aik * b[k][j];
                }
            }
        }
    }
    out
}

pub fn mat_axpy(a: &Mat4, s: f64, b: &Mat4) -> Mat4 {
    let mut out = *a;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] += s * b[i][j];
        }
    }
    out
}

/// `η Fᵀ η`, the inverse of a Lorentz-orthonormal frame.
pub fn lorentz_inverse(f: &Mat4) -> Mat4 {
    let eta = [-1.0, 1.0, 1.0, 1.0];
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = eta[i] * f[j][i] * eta[j];
        }
    }
    out
}

/// Largest entry of `Fᵀ η F − η`.
pub fn lorentz_gram_defect(f: &Mat4) -> f64 {
    let eta = [-1.0, 1.0, 1.0, 1.0];
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let g = minkowski(&column(f, i), &column(f, j));
            let target = if i == j { eta[i] } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

pub fn max_abs_diff_from_identity(m: &Mat4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[i][j] - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::moebius::hyperbolic_distance;

    #[test]
    fn anchor_is_valid_and_maps_to_standard_frame() {
        let a = FramePoint::anchor();
        assert!(FramePoint::new(a.position, a.tangent1, a.tangent2, a.normal).is_ok());
        let m = a.to_lorentz();
        let want = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, -1.0]];
        assert_eq!(m, want);
    }

    #[test]
    fn rejects_bad_frames() {
        let p = HalfSpacePoint::origin();
        assert!(FramePoint::new(p, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]).is_err());
        assert!(FramePoint::new(p, [1.0, 0.0, 0.0], [0.0, 1.1, 0.0], [0.0, 0.0, -1.0]).is_err());
    }

    proptest! {
        #[test]
        fn hyperboloid_round_trip(x in -3.0..3.0f64, y in -3.0..3.0f64, t in 0.05..5.0f64,
                                  v in prop::array::uniform3(-1.0..1.0f64)) {
            let p = HalfSpacePoint::new(Complex64::new(x, y), t).unwrap();
            let h = hyperboloid_point(&p);
            prop_assert!((minkowski(&h, &h) + 1.0).abs() < 1e-9 * (1.0 + h[0] * h[0]));
            let q = half_space_point(&h);
            prop_assert!((q.z - p.z).norm() < 1e-12 * (1.0 + p.z.norm()));
            prop_assert!((q.t / p.t - 1.0).abs() < 1e-12);
            let w = push_to_hyperboloid(&p, &v);
            prop_assert!(minkowski(&w, &h).abs() < 1e-9 * (1.0 + h[0] * h[0]));
            // isometry: hyperbolic length of v is |v|/t
            prop_assert!((minkowski(&w, &w) - dot3(&v, &v) / (t * t)).abs() < 1e-9 * (1.0 + h[0] * h[0]));
            let back = pull_to_half_space(&h, &w);
            for k in 0..3 {
                prop_assert!((back[k] - v[k]).abs() < 1e-9);
            }
        }

        #[test]
        fn distance_agrees_between_models(a in prop::array::uniform3(-1.0..1.0f64),
                                          b in prop::array::uniform3(-1.0..1.0f64)) {
            let p = HalfSpacePoint::new(Complex64::new(a[0], a[1]), a[2].exp()).unwrap();
            let q = HalfSpacePoint::new(Complex64::new(b[0], b[1]), b[2].exp()).unwrap();
            let cosh_d = -minkowski(&hyperboloid_point(&p), &hyperboloid_point(&q));
            prop_assert!((cosh_d.max(1.0).acosh() - hyperbolic_distance(p, q)).abs() < 1e-7);
        }
    }
}
