//! Node fields and the sparse matrix of the negative Grushin operator
//! `-Δ_λ u = -(u_xx + |x|^{2λ} u_yy)` with homogeneous Dirichlet data.
//!
//! The matrix acts on interior nodes only; couplings to boundary nodes are
//! dropped (boundary data is always zero here). Rows are the raw 5-point
//! stencil without any `hx*hy` scaling so the summation-by-parts identity
//! with [`crate::analysis::energy`] is exact up to reassociation.

use std::io::Write;

use thiserror::Error;

use crate::geometry::Grid;

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("field lives on a different grid than the operator")]
    GridMismatch,
    #[error("field is not a Dirichlet field: nonzero value at a boundary node")]
    NotDirichlet,
    #[error("degeneracy exponent must be >= 0, got {0}")]
    NegativeLambda(f64),
}

/// Scalar function sampled at every grid node, boundary included.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: *grid, values: vec![0.0; grid.n_nodes()] }
    }

    /// Sample `f(x, y)` at every node, boundary included.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.n_nodes());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                values.push(f(grid.x(i), grid.y(j)));
            }
        }
        Self { grid: *grid, values }
    }

    /// Sample `f` at interior nodes and force zero on the boundary.
    pub fn dirichlet_from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut field = Self::from_fn(grid, f);
        field.zero_boundary();
        field
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self { grid: *grid, values: vec![c; grid.n_nodes()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.node_id(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let id = self.grid.node_id(i, j);
        self.values[id] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn zero_boundary(&mut self) {
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                if self.grid.is_boundary(i, j) {
                    self.values[self.grid.node_id(i, j)] = 0.0;
                }
            }
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                if self.grid.is_boundary(i, j) && self.get(i, j) != 0.0 {
                    return false;
                }
            }
        }
        true
    }

    /// Nodewise map, same grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max |u|` over all nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| f64::max(m, v.abs()))
    }

    /// `max |a - b|` over all nodes; grids must match.
    pub fn sup_diff(a: &Field, b: &Field) -> Result<f64, OperatorError> {
        if a.grid != b.grid {
            return Err(OperatorError::GridMismatch);
        }
        Ok(a.values
            .iter()
            .zip(&b.values)
            .fold(0.0, |m, (&x, &y)| f64::max(m, (x - y).abs())))
    }

    /// Copy interior node values into a dense vector ordered by the grid's
    /// interior map.
    pub(crate) fn interior_vec(&self) -> Vec<f64> {
        let g = &self.grid;
        let mut out = Vec::with_capacity(g.n_interior());
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Build a Dirichlet field from interior values (boundary set to zero).
    pub(crate) fn from_interior_vec(grid: &Grid, interior: &[f64]) -> Self {
        assert_eq!(interior.len(), grid.n_interior());
        let mut field = Self::zeros(grid);
        for (k, &v) in interior.iter().enumerate() {
            let (i, j) = grid.interior_coords(k);
            field.set(i, j, v);
        }
        field
    }
}

/// Degeneracy weight `|x|^{2λ}`; exactly 1 for λ = 0 and exactly 0 at x = 0
/// when λ > 0.
#[inline]
pub fn grushin_weight(x: f64, lambda: f64) -> f64 {
    x.abs().powf(2.0 * lambda)
}

/// Symmetric positive-definite matrix of `-Δ_λ` on interior nodes, CSR with
/// column indices sorted per row.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    grid: Grid,
    lambda: f64,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Assemble the 5-point stencil of `-Δ_λ` on `grid`. For interior node
/// `(i, j)` the row encodes
/// `(-u_{i-1,j} + 2u_{i,j} - u_{i+1,j})/hx^2 + w_i (-u_{i,j-1} + 2u_{i,j} - u_{i,j+1})/hy^2`
/// with `w_i = |x_i|^{2λ}`; couplings to boundary nodes are dropped.
pub fn assemble_grushin(grid: &Grid, lambda: f64) -> Result<SparseOperator, OperatorError> {
    if !(lambda >= 0.0) {
        return Err(OperatorError::NegativeLambda(lambda));
    }
    let n = grid.n_interior();
    let inv_hx2 = 1.0 / (grid.hx * grid.hx);
    let inv_hy2 = 1.0 / (grid.hy * grid.hy);

    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(5 * n);
    let mut values = Vec::with_capacity(5 * n);
    row_ptr.push(0);

    for k in 0..n {
        let (i, j) = grid.interior_coords(k);
        let w = grushin_weight(grid.x(i), lambda);
        let wy = w * inv_hy2;
        // columns in increasing index order: south, west, diag, east, north
        if let Some(c) = grid.interior_index(i, j - 1) {
            if wy != 0.0 {
                col_idx.push(c);
                values.push(-wy);
            }
        }
        if let Some(c) = grid.interior_index(i - 1, j) {
            col_idx.push(c);
            values.push(-inv_hx2);
        }
        col_idx.push(k);
        values.push(2.0 * inv_hx2 + 2.0 * wy);
        if let Some(c) = grid.interior_index(i + 1, j) {
            col_idx.push(c);
            values.push(-inv_hx2);
        }
        if let Some(c) = grid.interior_index(i, j + 1) {
            if wy != 0.0 {
                col_idx.push(c);
                values.push(-wy);
            }
        }
        row_ptr.push(col_idx.len());
    }

    Ok(SparseOperator { grid: *grid, lambda, row_ptr, col_idx, values })
}

impl SparseOperator {
    pub fn dim(&self) -> usize {
        self.grid.n_interior()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Stored entries as `(row, col, value)` triplets in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(move |p| (r, self.col_idx[p], self.values[p]))
        })
    }

    /// Diagonal entries, in row order.
    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim()];
        for (r, c, v) in self.entries() {
            if r == c {
                d[r] = v;
            }
        }
        d
    }

    /// `y = A x` on interior vectors.
    pub(crate) fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *out = acc;
        }
    }

    /// Apply the stencil to a Dirichlet field; the result is again a
    /// Dirichlet field (zero boundary).
    pub fn apply(&self, u: &Field) -> Result<Field, OperatorError> {
        if *u.grid() != self.grid {
            return Err(OperatorError::GridMismatch);
        }
        if !u.is_dirichlet() {
            return Err(OperatorError::NotDirichlet);
        }
        let x = u.interior_vec();
        let mut y = vec![0.0; self.dim()];
        self.matvec(&x, &mut y);
        Ok(Field::from_interior_vec(&self.grid, &y))
    }

    /// Dump the matrix in coordinate text format, one `row col value` triplet
    /// per line, row-major, values with 17 significant digits.
    pub fn write_coo<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (r, c, v) in self.entries() {
            writeln!(w, "{} {} {:.16e}", r, c, v)?;
        }
        Ok(())
    }

    pub fn to_coo_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_coo(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("coo dump is ascii")
    }
}
