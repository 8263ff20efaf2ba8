//! Rectangular domains and uniform tensor-product grids.
//!
//! The solver works on rectangles `[ax, bx] x [ay, by]` that may straddle the
//! plane `x = 0` where the operator weight `|x|^{2λ}` vanishes. Grids are
//! uniform per axis with boundary nodes included; interior nodes are indexed
//! by a row-major bijection used by the sparse operator.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("invalid domain [{ax}, {bx}] x [{ay}, {by}]: bounds must be finite with ax < bx and ay < by")]
    InvalidDomain { ax: f64, bx: f64, ay: f64, by: f64 },
    #[error("grid {nx} x {ny} has no interior nodes: nx and ny must both be >= 3")]
    TooFewNodes { nx: usize, ny: usize },
}

/// Closed axis-aligned rectangle `[ax, bx] x [ay, by]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub ax: f64,
    pub bx: f64,
    pub ay: f64,
    pub by: f64,
}

impl Domain {
    pub fn new(ax: f64, bx: f64, ay: f64, by: f64) -> Result<Self, GeometryError> {
        let finite = ax.is_finite() && bx.is_finite() && ay.is_finite() && by.is_finite();
        if !finite || !(ax < bx) || !(ay < by) {
            return Err(GeometryError::InvalidDomain { ax, bx, ay, by });
        }
        Ok(Self { ax, bx, ay, by })
    }

    /// True iff the rectangle meets the plane `x = 0`, i.e. the operator
    /// weight `|x|^{2λ}` degenerates somewhere in the closed domain.
    pub fn contains_degeneracy(&self) -> bool {
        self.ax <= 0.0 && 0.0 <= self.bx
    }

    pub fn width(&self) -> f64 {
        self.bx - self.ax
    }

    pub fn height(&self) -> f64 {
        self.by - self.ay
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Closed-rectangle membership test.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.ax <= x && x <= self.bx && self.ay <= y && y <= self.by
    }
}

/// Uniform node lattice over a [`Domain`], boundary nodes included.
///
/// Node `(i, j)` sits at `(ax + i*hx, ay + j*hy)` with `i in 0..nx`,
/// `j in 0..ny`. Boundary nodes are exactly those with `i in {0, nx-1}` or
/// `j in {0, ny-1}`; the remaining `(nx-2)*(ny-2)` interior nodes are mapped
/// bijectively onto `0..n_interior()` by [`Grid::interior_index`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub domain: Domain,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

impl Grid {
    pub fn new(domain: Domain, nx: usize, ny: usize) -> Result<Self, GeometryError> {
        if nx < 3 || ny < 3 {
            return Err(GeometryError::TooFewNodes { nx, ny });
        }
        let hx = domain.width() / (nx - 1) as f64;
        let hy = domain.height() / (ny - 1) as f64;
        Ok(Self { domain, nx, ny, hx, hy })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.domain.ax + i as f64 * self.hx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.domain.ay + j as f64 * self.hy
    }

    pub fn n_nodes(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n_interior(&self) -> usize {
        (self.nx - 2) * (self.ny - 2)
    }

    /// Flat index of node `(i, j)` into a full node vector.
    #[inline]
    pub fn node_id(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    /// Interior linear index of node `(i, j)`, or `None` on the boundary.
    #[inline]
    pub fn interior_index(&self, i: usize, j: usize) -> Option<usize> {
        if i >= 1 && i <= self.nx - 2 && j >= 1 && j <= self.ny - 2 {
            Some((i - 1) + (j - 1) * (self.nx - 2))
        } else {
            None
        }
    }

    /// Inverse of [`Grid::interior_index`].
    #[inline]
    pub fn interior_coords(&self, k: usize) -> (usize, usize) {
        debug_assert!(k < self.n_interior());
        let w = self.nx - 2;
        (k % w + 1, k / w + 1)
    }

    /// Grid with both node counts doubled (`nx -> 2nx - 1`); coarse node
    /// coordinates are a subset of the fine ones when the spacings halve
    /// exactly (dyadic bounds).
    pub fn refine_doubled(&self) -> Grid {
        Grid::new(self.domain, 2 * self.nx - 1, 2 * self.ny - 1)
            .expect("refinement of a valid grid is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_rejects_bad_bounds() {
        assert!(Domain::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Domain::new(2.0, 1.0, 0.0, 1.0).is_err());
        assert!(Domain::new(0.0, f64::NAN, 0.0, 1.0).is_err());
        assert!(Domain::new(0.0, f64::INFINITY, 0.0, 1.0).is_err());
    }

    #[test]
    fn degeneracy_flag_matches_sign_change() {
        let d = Domain::new(-1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(d.contains_degeneracy());
        let d = Domain::new(0.5, 2.0, 0.0, 1.0).unwrap();
        assert!(!d.contains_degeneracy());
        let d = Domain::new(1.0, 2.0, 0.0, 1.0).unwrap();
        assert!(!d.contains_degeneracy());
        // degeneracy on the boundary edge still counts
        let d = Domain::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(d.contains_degeneracy());
    }

    #[test]
    fn grid_rejects_fewer_than_three_nodes() {
        let d = Domain::new(-1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(
            Grid::new(d, 2, 5).unwrap_err(),
            GeometryError::TooFewNodes { nx: 2, ny: 5 }
        );
        assert!(Grid::new(d, 3, 2).is_err());
    }

    #[test]
    fn three_by_three_has_single_interior_node() {
        let d = Domain::new(-1.0, 1.0, 0.0, 1.0).unwrap();
        let g = Grid::new(d, 3, 3).unwrap();
        assert_eq!(g.hx, 1.0);
        assert_eq!(g.hy, 0.5);
        assert_eq!(g.n_interior(), 1);
        assert_eq!(g.x(1), 0.0);
        assert_eq!(g.y(1), 0.5);
    }

    #[test]
    fn five_by_five_coordinates() {
        let d = Domain::new(-1.0, 1.0, 0.0, 1.0).unwrap();
        let g = Grid::new(d, 5, 5).unwrap();
        assert_eq!(g.n_interior(), 9);
        let xs: Vec<f64> = (0..5).map(|i| g.x(i)).collect();
        assert_eq!(xs, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn interior_map_round_trips() {
        let d = Domain::new(-1.0, 1.0, 0.0, 1.0).unwrap();
        let g = Grid::new(d, 7, 5).unwrap();
        let mut seen = vec![false; g.n_interior()];
        for j in 0..g.ny {
            for i in 0..g.nx {
                match g.interior_index(i, j) {
                    Some(k) => {
                        assert!(!g.is_boundary(i, j));
                        assert!(k < g.n_interior());
                        assert!(!seen[k]);
                        seen[k] = true;
                        assert_eq!(g.interior_coords(k), (i, j));
                    }
                    None => assert!(g.is_boundary(i, j)),
                }
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn dyadic_refinement_preserves_coarse_coordinates() {
        let d = Domain::new(-1.0, 1.0, 0.0, 1.0).unwrap();
        let coarse = Grid::new(d, 5, 9).unwrap();
        let fine = coarse.refine_doubled();
        assert_eq!(fine.nx, 9);
        assert_eq!(fine.ny, 17);
        for i in 0..coarse.nx {
            assert_eq!(coarse.x(i), fine.x(2 * i));
        }
        for j in 0..coarse.ny {
            assert_eq!(coarse.y(j), fine.y(2 * j));
        }
    }
}
