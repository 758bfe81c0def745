//! Cartesian grid clipped to the disk `|z| < ρ`.
//!
//! Unknowns live on lattice nodes strictly inside the disk. A node whose
//! lattice neighbor falls outside gets a shortened arm ending on the circle
//! (Shortley–Weller), where the Dirichlet value is imposed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Direction order used for arms and neighbors: east, west, north, south.
pub const DIRECTIONS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    radius: f64,
    side: usize,
    spacing: f64,
    /// Lattice coordinates `(i, j)` of each node, row-major in `j` then `i`.
    lattice: Vec<(usize, usize)>,
    /// `side × side` table from lattice position to node index.
    lookup: Vec<Option<u32>>,
    /// Arm lengths per node in [`DIRECTIONS`] order.
    arms: Vec<[f64; 4]>,
    /// Node has at least one arm cut short by the circle.
    boundary_adjacent: Vec<bool>,
}

impl DiskGrid {
    /// `side × side` lattice on `[-ρ, ρ]²`. `side` must be odd so that the
    /// origin is a node.
    pub fn new(radius: f64, side: usize) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidArgument(format!("disk radius must lie in (0, 1), got {radius}")));
        }
        if side < 5 || side % 2 == 0 {
            return Err(Error::InvalidArgument(format!("grid side must be odd and at least 5, got {side}")));
        }
        let spacing = 2.0 * radius / (side - 1) as f64;
        let coord = |k: usize| -radius + k as f64 * spacing;
        let inside = |i: usize, j: usize| {
            let (x, y) = (coord(i), coord(j));
            (x * x + y * y).sqrt() < radius * (1.0 - 1e-12)
        };

        let mut lattice = Vec::new();
        let mut lookup = vec![None; side * side];
        for j in 0..side {
            for i in 0..side {
                if inside(i, j) {
                    lookup[j * side + i] = Some(lattice.len() as u32);
                    lattice.push((i, j));
                }
            }
        }

        let mut arms = Vec::with_capacity(lattice.len());
        let mut boundary_adjacent = Vec::with_capacity(lattice.len());
        for &(i, j) in &lattice {
            let (x, y) = (coord(i), coord(j));
            let mut arm = [spacing; 4];
            let mut cut = false;
            for (k, &(di, dj)) in DIRECTIONS.iter().enumerate() {
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                let neighbor_inside = ni >= 0
                    && nj >= 0
                    && (ni as usize) < side
                    && (nj as usize) < side
                    && inside(ni as usize, nj as usize);
                if !neighbor_inside {
                    arm[k] = distance_to_circle(x, y, di as f64, dj as f64, radius).min(spacing);
                    cut = true;
                }
            }
            arms.push(arm);
            boundary_adjacent.push(cut);
        }

        Ok(DiskGrid { radius, side, spacing, lattice, lookup, arms, boundary_adjacent })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn lattice_coord(&self, k: usize) -> f64 {
        -self.radius + k as f64 * self.spacing
    }

    pub fn lattice_position(&self, node: usize) -> (usize, usize) {
        self.lattice[node]
    }

    pub fn point(&self, node: usize) -> Complex64 {
        let (i, j) = self.lattice[node];
        Complex64::new(self.lattice_coord(i), self.lattice_coord(j))
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }

    pub fn node_at(&self, i: i64, j: i64) -> Option<usize> {
        if i < 0 || j < 0 || i as usize >= self.side || j as usize >= self.side {
            return None;
        }
        self.lookup[j as usize * self.side + i as usize].map(|v| v as usize)
    }

    /// Neighbor of `node` in direction `dir` (index into [`DIRECTIONS`]),
    /// `None` when the arm ends on the circle.
    pub fn neighbor(&self, node: usize, dir: usize) -> Option<usize> {
        let (i, j) = self.lattice[node];
        let (di, dj) = DIRECTIONS[dir];
        self.node_at(i as i64 + di, j as i64 + dj)
    }

    pub fn arms(&self, node: usize) -> [f64; 4] {
        self.arms[node]
    }

    /// Flag for nodes whose stencil touches the Dirichlet circle.
    pub fn is_boundary_adjacent(&self, node: usize) -> bool {
        self.boundary_adjacent[node]
    }

    pub fn center(&self) -> usize {
        let mid = (self.side / 2) as i64;
        self.node_at(mid, mid).expect("odd grid has a center node")
    }

    /// Largest `|index(node) - index(neighbor)|`, the half-bandwidth of any
    /// nearest-neighbor stencil matrix.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0;
        for node in 0..self.len() {
            for dir in 0..4 {
                if let Some(nb) = self.neighbor(node, dir) {
                    bw = bw.max(node.abs_diff(nb));
                }
            }
        }
        bw
    }

    /// Lattice cell `(i, j)` containing `z` and the local offsets in `[0, 1]`.
    pub(crate) fn locate(&self, z: Complex64) -> Option<(usize, usize, f64, f64)> {
        if z.norm() > self.radius {
            return None;
        }
        let fx = (z.re + self.radius) / self.spacing;
        let fy = (z.im + self.radius) / self.spacing;
        let i = (fx.floor() as i64).clamp(0, self.side as i64 - 2) as usize;
        let j = (fy.floor() as i64).clamp(0, self.side as i64 - 2) as usize;
        Some((i, j, fx - i as f64, fy - j as f64))
    }

    pub fn same_shape(&self, other: &DiskGrid) -> bool {
        self.side == other.side && self.radius == other.radius
    }
}

/// Distance from `(x, y)` along the unit direction `(dx, dy)` to the circle
/// `|z| = ρ`, for a point inside the circle.
fn distance_to_circle(x: f64, y: f64, dx: f64, dy: f64, radius: f64) -> f64 {
    // |p + s d|² = ρ²  ⇒  s² + 2 (p·d) s + |p|² - ρ² = 0, positive root
    let pd = x * dx + y * dy;
    let c = x * x + y * y - radius * radius;
    let disc = (pd * pd - c).max(0.0).sqrt();
    // c < 0 so the positive root is -pd + disc; use the stable form
    if pd > 0.0 {
        -c / (pd + disc)
    } else {
        disc - pd
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(DiskGrid::new(1.0, 33).is_err());
        assert!(DiskGrid::new(0.5, 32).is_err());
        assert!(DiskGrid::new(0.5, 3).is_err());
    }

    #[test]
    fn nodes_are_strictly_inside_and_center_is_origin() {
        let g = DiskGrid::new(0.85, 33).unwrap();
        assert!(g.points().all(|z| z.norm() < 0.85));
        assert_eq!(g.point(g.center()), Complex64::new(0.0, 0.0));
        // lattice points on the circle itself are not unknowns
        assert!(g.node_at(0, 16).is_none());
    }

    #[test]
    fn arms_end_on_the_circle() {
        let g = DiskGrid::new(0.7, 21).unwrap();
        for node in 0..g.len() {
            let z = g.point(node);
            for (dir, &(di, dj)) in DIRECTIONS.iter().enumerate() {
                let arm = g.arms(node)[dir];
                assert!(arm > 0.0 && arm <= g.spacing() * (1.0 + 1e-12));
                if g.neighbor(node, dir).is_none() {
                    let end = z + Complex64::new(di as f64, dj as f64) * arm;
                    assert!((end.norm() - 0.7).abs() < 1e-12);
                    assert!(g.is_boundary_adjacent(node));
                }
            }
        }
    }

    #[test]
    fn bandwidth_is_about_one_row() {
        let g = DiskGrid::new(0.85, 65).unwrap();
        assert!(g.bandwidth() <= 65);
    }
}
