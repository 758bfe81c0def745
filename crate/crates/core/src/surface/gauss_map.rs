use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::DiskGrid;
use crate::moebius::{BoundaryPoint, HalfSpacePoint};

use super::frame::{dot3, FramePoint, Vec3};
use super::immersion::ImmersedPatch;

/// Relative tolerance on `|v| = t` for hyperbolic-unit input vectors.
pub const UNIT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Grid-indexed boundary values, one per node of `grid`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryField {
    pub grid: DiskGrid,
    pub values: Vec<BoundaryPoint>,
}

impl BoundaryField {
    pub fn new(grid: DiskGrid, values: Vec<BoundaryPoint>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        Ok(BoundaryField { grid, values })
    }

    /// Samples `f` at every node.
    pub fn from_map(grid: &DiskGrid, f: impl Fn(Complex64) -> BoundaryPoint + Sync) -> Self {
        let values = (0..grid.len()).into_par_iter().map(|k| f(grid.point(k))).collect();
        BoundaryField { grid: grid.clone(), values }
    }
}

/// Endpoint at infinity of the geodesic ray from `p` with initial
/// direction `±v`.
///
/// Writing `(u_z, u_t) = v/t`, the ray is a vertical line when `u_z = 0` and
/// otherwise a semicircle meeting `t = 0` at `z + t (u_t + 1)/|u_z| · u_z/|u_z|`.
pub fn gauss_map_point(p: &HalfSpacePoint, v: &Vec3, sign: Sign) -> Result<BoundaryPoint> {
    let norm = dot3(v, v).sqrt();
    if !((norm / p.t - 1.0).abs() <= UNIT_TOLERANCE) {
        return Err(Error::Precondition(format!(
            "direction has hyperbolic length {} instead of 1",
            norm / p.t
        )));
    }
    let s = sign.factor() / norm;
    let (uz, ut) = (Complex64::new(v[0] * s, v[1] * s), v[2] * s);
    let m = uz.norm();
    if m == 0.0 {
        return Ok(if ut > 0.0 { BoundaryPoint::Infinity } else { BoundaryPoint::new(p.z) });
    }
    // (u_t + 1)/|u_z| = |u_z|/(1 − u_t), stable when u_t ≈ −1
    let reach = if ut < 0.0 { m / (1.0 - ut) } else { (1.0 + ut) / m };
    Ok(BoundaryPoint::new(p.z + uz / m * (p.t * reach)))
}

/// Normal of a frame rescaled to hyperbolic-unit length. Integration drift
/// in the length is reported by the patch's Gram defect, not here.
pub fn unit_normal(frame: &FramePoint) -> Vec3 {
    let n = frame.normal;
    let s = frame.position.t / dot3(&n, &n).sqrt();
    [n[0] * s, n[1] * s, n[2] * s]
}

/// Applies [`gauss_map_point`] to every frame of a valid patch, using
/// [`unit_normal`].
pub fn gauss_map_patch(patch: &ImmersedPatch, sign: Sign) -> Result<BoundaryField> {
    if !patch.valid {
        return Err(Error::Precondition(format!(
            "patch is not valid (loop error {:e} above {:e})",
            patch.loop_error, patch.tolerance
        )));
    }
    let values = patch
        .frames
        .par_iter()
        .enumerate()
        .map(|(k, f)| {
            gauss_map_point(&f.position, &unit_normal(f), sign)
                .map_err(|e| Error::DegenerateNode { index: k, reason: e.to_string() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryField { grid: patch.grid.clone(), values })
}
