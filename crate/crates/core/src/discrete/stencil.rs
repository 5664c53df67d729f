//! Corner-gradient flux stencil.
//!
//! In every cell and at every corner `s` the discrete gradient component
//! `j` is the difference quotient along the cell edge parallel to axis `j`
//! through `s`. The energy form is
//! `a(u,v) = Σ_cells Σ_corners 2^{-d} h^d ⟨A_cell ∇u, ∇v⟩`
//! and the operator is `L = ∇ₕ* A ∇ₕ` with respect to `⟨u,v⟩ = h^d Σ u·v̄`.
//! For `A = I` this is the standard `2d+1`-point Laplacian.

use num_complex::Complex64;

use super::grid::BoxGrid;
use crate::linalg::CMatrix;

/// Contribution of one cell to `L u` at its `2^d` corners.
///
/// `a` is the row-major `dN×dN` cell matrix, `local_u` the corner values
/// (`2^d × N`), `out` receives the corner contributions (accumulated).
pub(crate) fn cell_flux(
    a: &[Complex64],
    d: usize,
    nc: usize,
    inv_h: f64,
    local_u: &[Complex64],
    out: &mut [Complex64],
    g: &mut [Complex64],
    f: &mut [Complex64],
) {
    let corners = 1usize << d;
    let dn = d * nc;
    let scale = inv_h / corners as f64;
    for s in 0..corners {
        corner_gradient(d, nc, inv_h, local_u, s, g);
        for (r, fr) in f.iter_mut().enumerate().take(dn) {
            let row = &a[r * dn..(r + 1) * dn];
            *fr = row.iter().zip(g.iter()).map(|(x, y)| x * y).sum();
        }
        for j in 0..d {
            let hi = s | (1 << j);
            let lo = s & !(1 << j);
            for al in 0..nc {
                let v = f[j * nc + al] * scale;
                out[hi * nc + al] += v;
                out[lo * nc + al] -= v;
            }
        }
    }
}

/// Gradient at corner `s` of a cell, flattened as `j·N + β`.
pub(crate) fn corner_gradient(d: usize, nc: usize, inv_h: f64, local_u: &[Complex64], s: usize, g: &mut [Complex64]) {
    for j in 0..d {
        let hi = s | (1 << j);
        let lo = s & !(1 << j);
        for b in 0..nc {
            g[j * nc + b] = (local_u[hi * nc + b] - local_u[lo * nc + b]) * inv_h;
        }
    }
}

/// Assembled stencil: a grid, one coefficient matrix per cell, and the
/// cell-to-node table.
#[derive(Debug, Clone)]
pub struct Stencil {
    grid: BoxGrid,
    n_comp: usize,
    coeffs: Vec<Complex64>,
    cell_nodes: Vec<usize>,
}

impl Stencil {
    /// `cell_matrices[c]` is the coefficient of cell `c`.
    pub fn new(grid: BoxGrid, n_comp: usize, cell_matrices: &[CMatrix]) -> Self {
        let dn = grid.d() * n_comp;
        assert_eq!(cell_matrices.len(), grid.num_cells());
        let mut coeffs = Vec::with_capacity(grid.num_cells() * dn * dn);
        for m in cell_matrices {
            assert_eq!((m.nrows(), m.ncols()), (dn, dn));
            for r in 0..dn {
                for c in 0..dn {
                    coeffs.push(m[(r, c)]);
                }
            }
        }
        let corners = 1 << grid.d();
        let mut cell_nodes = Vec::with_capacity(grid.num_cells() * corners);
        let mut buf = Vec::with_capacity(corners);
        for c in 0..grid.num_cells() {
            grid.cell_corners(c, &mut buf);
            cell_nodes.extend_from_slice(&buf);
        }
        Self {
            grid,
            n_comp,
            coeffs,
            cell_nodes,
        }
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn n_comp(&self) -> usize {
        self.n_comp
    }

    /// Length of a grid function (`nodes × N`).
    pub fn len(&self) -> usize {
        self.grid.num_nodes() * self.n_comp
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn corners(&self) -> usize {
        1 << self.grid.d()
    }

    fn cell_matrix(&self, c: usize) -> &[Complex64] {
        let dn = self.grid.d() * self.n_comp;
        &self.coeffs[c * dn * dn..(c + 1) * dn * dn]
    }

    fn gather(&self, c: usize, u: &[Complex64], local: &mut [Complex64]) {
        let nc = self.n_comp;
        let corners = self.corners();
        for (s, &node) in self.cell_nodes[c * corners..(c + 1) * corners].iter().enumerate() {
            local[s * nc..(s + 1) * nc].copy_from_slice(&u[node * nc..(node + 1) * nc]);
        }
    }

    /// `out = L u`.
    pub fn apply(&self, u: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(u.len(), self.len());
        assert_eq!(out.len(), self.len());
        let d = self.grid.d();
        let nc = self.n_comp;
        let corners = self.corners();
        let inv_h = 1.0 / self.grid.h();
        let zero = Complex64::new(0.0, 0.0);
        out.fill(zero);
        let mut local = vec![zero; corners * nc];
        let mut local_out = vec![zero; corners * nc];
        let mut g = vec![zero; d * nc];
        let mut f = vec![zero; d * nc];
        for c in 0..self.grid.num_cells() {
            self.gather(c, u, &mut local);
            local_out.fill(zero);
            cell_flux(self.cell_matrix(c), d, nc, inv_h, &local, &mut local_out, &mut g, &mut f);
            for (s, &node) in self.cell_nodes[c * corners..(c + 1) * corners].iter().enumerate() {
                for al in 0..nc {
                    out[node * nc + al] += local_out[s * nc + al];
                }
            }
        }
    }

    pub fn apply_vec(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
        self.apply(u, &mut out);
        out
    }

    /// Corner gradients, laid out as `cell × corner × (j·N + β)`.
    pub fn gradient(&self, u: &[Complex64]) -> Vec<Complex64> {
        let d = self.grid.d();
        let nc = self.n_comp;
        let corners = self.corners();
        let dn = d * nc;
        let inv_h = 1.0 / self.grid.h();
        let zero = Complex64::new(0.0, 0.0);
        let mut local = vec![zero; corners * nc];
        let mut out = vec![zero; self.grid.num_cells() * corners * dn];
        for c in 0..self.grid.num_cells() {
            self.gather(c, u, &mut local);
            for s in 0..corners {
                let off = (c * corners + s) * dn;
                corner_gradient(d, nc, inv_h, &local, s, &mut out[off..off + dn]);
            }
        }
        out
    }

    /// Quadrature weight `2^{-d} h^d` of one corner-gradient sample.
    pub fn gradient_weight(&self) -> f64 {
        self.grid.h().powi(self.grid.d() as i32) / self.corners() as f64
    }

    /// `‖∇ₕu‖²` in the weighted corner norm.
    pub fn gradient_norm_sq(&self, u: &[Complex64]) -> f64 {
        self.gradient(u).iter().map(|z| z.norm_sqr()).sum::<f64>() * self.gradient_weight()
    }

    /// Diagonal of `L`, one entry per `(node, component)`.
    pub fn diagonal(&self) -> Vec<Complex64> {
        let d = self.grid.d();
        let nc = self.n_comp;
        let corners = self.corners();
        let inv_h = 1.0 / self.grid.h();
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; self.len()];
        let mut local = vec![zero; corners * nc];
        let mut local_out = vec![zero; corners * nc];
        let mut g = vec![zero; d * nc];
        let mut f = vec![zero; d * nc];
        for c in 0..self.grid.num_cells() {
            for (s, &node) in self.cell_nodes[c * corners..(c + 1) * corners].iter().enumerate() {
                for al in 0..nc {
                    local.fill(zero);
                    local[s * nc + al] = Complex64::new(1.0, 0.0);
                    local_out.fill(zero);
                    cell_flux(self.cell_matrix(c), d, nc, inv_h, &local, &mut local_out, &mut g, &mut f);
                    out[node * nc + al] += local_out[s * nc + al];
                }
            }
        }
        out
    }
}

/// `⟨u, v⟩ = h^d Σ u·v̄` without the `h^d` factor.
pub fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm2(u: &[Complex64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
