//! Cartesian grids with Shortley–Weller arms at curved boundaries.

use std::path::Path;

use serde::Serialize;

use crate::error::{param, Result};

use super::domain::DomainSpec2D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    Exterior,
    Interior,
    /// Interior node with at least one arm cut by the boundary.
    BoundaryAdjacent,
}

/// Arms in the order east, west, north, south.
pub const DIRS: [(usize, f64); 4] = [(0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arms {
    /// Arm lengths (h for a full arm, less where the boundary cuts it).
    pub len: [f64; 4],
    /// Neighbour node index, or `None` when the arm ends on the boundary.
    #[serde(skip)]
    pub nbr: [Option<usize>; 4],
}

/// Nodal field on the lattice (x0 + i h, y0 + j h), row-major in j.
#[derive(Debug, Clone, Serialize)]
pub struct Field2D {
    pub domain: DomainSpec2D,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub values: Vec<f64>,
    pub mask: Vec<NodeKind>,
    /// Distance to the boundary (0 at exterior nodes).
    pub dist: Vec<f64>,
    pub arms: Vec<Arms>,
}

/// Builds the lattice through the origin covering the domain.
pub fn build_grid(dom: &DomainSpec2D, h: f64) -> Result<Field2D> {
    let (a, b) = dom.semi_axes();
    if !(h > 0.0) || !h.is_finite() || h > 0.5 * b {
        return param(format!("grid spacing {h} must lie in (0, {}]", 0.5 * b));
    }
    let half_x = (a / h).ceil() as usize + 1;
    let half_y = (b / h).ceil() as usize + 1;
    let (nx, ny) = (2 * half_x + 1, 2 * half_y + 1);
    let (x0, y0) = (-(half_x as f64) * h, -(half_y as f64) * h);
    let total = nx * ny;
    let mut mask = vec![NodeKind::Exterior; total];
    let mut dist = vec![0.0; total];
    for j in 0..ny {
        for i in 0..nx {
            let (x, y) = (x0 + i as f64 * h, y0 + j as f64 * h);
            if dom.contains(x, y) {
                mask[j * nx + i] = NodeKind::Interior;
                dist[j * nx + i] = dom.distance(x, y);
            }
        }
    }
    let mut arms = vec![Arms { len: [h; 4], nbr: [None; 4] }; total];
    for j in 0..ny {
        for i in 0..nx {
            let p = j * nx + i;
            if mask[p] == NodeKind::Exterior {
                continue;
            }
            let (x, y) = (x0 + i as f64 * h, y0 + j as f64 * h);
            let mut cut = false;
            for (d, &(axis, sign)) in DIRS.iter().enumerate() {
                let (di, dj) = if axis == 0 { (sign as isize, 0) } else { (0, sign as isize) };
                let q = ((j as isize + dj) as usize) * nx + (i as isize + di) as usize;
                if mask[q] != NodeKind::Exterior {
                    arms[p].nbr[d] = Some(q);
                } else {
                    let len = dom.crossing(x, y, axis, sign).min(h);
                    arms[p].len[d] = len.max(1e-12 * h);
                    cut = true;
                }
            }
            if cut {
                mask[p] = NodeKind::BoundaryAdjacent;
            }
        }
    }
    if mask.iter().all(|m| *m == NodeKind::Exterior) {
        return param("grid has no interior nodes");
    }
    Ok(Field2D { domain: *dom, h, nx, ny, x0, y0, values: vec![0.0; total], mask, dist, arms })
}

impl Field2D {
    pub fn coords(&self, p: usize) -> (f64, f64) {
        (self.x0 + (p % self.nx) as f64 * self.h, self.y0 + (p / self.nx) as f64 * self.h)
    }

    pub fn is_inside(&self, p: usize) -> bool {
        self.mask[p] != NodeKind::Exterior
    }

    pub fn interior_count(&self) -> usize {
        self.mask.iter().filter(|m| **m != NodeKind::Exterior).count()
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).filter(|&p| self.is_inside(p))
    }

    /// Index of the lattice node at the origin.
    pub fn centre(&self) -> usize {
        (self.ny / 2) * self.nx + self.nx / 2
    }

    /// Boundary point where arm `d` of node `p` ends.
    pub fn arm_end(&self, p: usize, d: usize) -> (f64, f64) {
        let (x, y) = self.coords(p);
        let (axis, sign) = DIRS[d];
        let len = self.arms[p].len[d];
        if axis == 0 {
            (x + sign * len, y)
        } else {
            (x, y + sign * len)
        }
    }

    /// CSV with columns (x, y, d, u) over interior nodes.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        crate::report::write_csv(
            path,
            &["x", "y", "d", "u"],
            self.interior_nodes().map(|p| {
                let (x, y) = self.coords(p);
                vec![x, y, self.dist[p], self.values[p]]
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_disk_has_nine_nodes() {
        let g = build_grid(&DomainSpec2D::disk(1.0).unwrap(), 0.5).unwrap();
        assert_eq!(g.interior_count(), 9);
        assert_eq!(g.dist[g.centre()], 1.0);
        assert_eq!(g.coords(g.centre()), (0.0, 0.0));
    }

    #[test]
    fn arms_end_on_the_boundary() {
        let dom = DomainSpec2D::ellipse(1.2, 1.0).unwrap();
        let g = build_grid(&dom, 1.0 / 16.0).unwrap();
        for p in g.interior_nodes() {
            for d in 0..4 {
                if g.arms[p].nbr[d].is_none() {
                    let (x, y) = g.arm_end(p, d);
                    assert!(((x / 1.2).powi(2) + y * y - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_degenerate_spacing() {
        let dom = DomainSpec2D::disk(1.0).unwrap();
        assert!(build_grid(&dom, 0.0).is_err());
        assert!(build_grid(&dom, 0.8).is_err());
    }
}
