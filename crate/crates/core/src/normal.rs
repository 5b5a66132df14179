//! The transverse problem across the confining layer.
//!
//! `H_n = β[V(q₃) + (γ³∂₃)²] + drift` reduces in each β block to the
//! tridiagonal operator `T = V − ∂₃² + c ∂₃` (positive block) and `−T`
//! (negative block). Case (a) carries the drift `c = −ω/2m`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::hamiltonian::{ConfinementCase, ConfinementKind};
use crate::spectral::Block;
use crate::{Error, Result, C64};

pub const MIN_NORMAL_NODES: usize = 64;

/// Uniform grid on `[−W, W]`: interior nodes of a Dirichlet box, or a ring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalGrid {
    pub nodes: usize,
    pub half_width: f64,
    pub periodic: bool,
}

impl NormalGrid {
    pub fn new(nodes: usize, half_width: f64, periodic: bool) -> Result<Self> {
        if nodes < MIN_NORMAL_NODES {
            return Err(Error::GridTooCoarse { axis: 2, nodes, min: MIN_NORMAL_NODES });
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("normal half-width must be positive, got {half_width}")));
        }
        Ok(NormalGrid { nodes, half_width, periodic })
    }

    /// Dirichlet box sized to the case: the well itself for (c), many
    /// decay lengths for (a) and (b).
    pub fn for_case(case: &ConfinementCase, nodes: usize) -> Result<Self> {
        let w = match case.kind {
            ConfinementKind::SquareWell { width } => 0.5 * width,
            ConfinementKind::Harmonic { omega } => 10.0 * (case.m * omega).powf(-0.25),
            ConfinementKind::Linear { omega } => 16.0 * (case.m * omega).powf(-1.0 / 3.0),
        };
        Self::new(nodes, w, false)
    }

    pub fn spacing(&self) -> f64 {
        let span = 2.0 * self.half_width;
        if self.periodic {
            span / self.nodes as f64
        } else {
            span / (self.nodes + 1) as f64
        }
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        let h = self.spacing();
        if self.periodic {
            -self.half_width + i as f64 * h
        } else {
            -self.half_width + (i + 1) as f64 * h
        }
    }
}

/// Positive-block operator `T` in tridiagonal (plus wrap) form.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalOperator {
    pub grid: NormalGrid,
    pub diag: Vec<f64>,
    /// `T[i+1][i]`.
    pub lower: Vec<f64>,
    /// `T[i][i+1]`.
    pub upper: Vec<f64>,
}

impl NormalOperator {
    pub fn is_symmetric(&self) -> bool {
        self.lower == self.upper
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.diag.len();
        let mut t = DMatrix::zeros(n, n);
        for i in 0..n {
            t[(i, i)] = self.diag[i];
        }
        for i in 0..n - 1 {
            t[(i + 1, i)] = self.lower[i];
            t[(i, i + 1)] = self.upper[i];
        }
        if self.grid.periodic {
            t[(0, n - 1)] = self.lower[n - 1];
            t[(n - 1, 0)] = self.upper[n - 1];
        }
        t
    }

    /// Sorted eigenvalues of `T`.
    ///
    /// A non-symmetric Dirichlet tridiagonal with `T[i][i+1]·T[i+1][i] > 0`
    /// is diagonally similar to the symmetric one with off-diagonal
    /// `√(T[i][i+1]·T[i+1][i])`, so its spectrum is real and obtained
    /// from that form.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.diag.len();
        let sym = if self.is_symmetric() {
            self.to_dense()
        } else {
            if self.grid.periodic {
                return Err(Error::InvalidParameter("drift on a periodic normal grid has complex spectrum".into()));
            }
            let mut t = DMatrix::zeros(n, n);
            for i in 0..n {
                t[(i, i)] = self.diag[i];
            }
            for i in 0..n - 1 {
                let p = self.lower[i] * self.upper[i];
                if !(p > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "normal grid too coarse for the drift term: off-diagonal product {p:e} at node {i}"
                    )));
                }
                let s = p.sqrt() * self.upper[i].signum();
                t[(i, i + 1)] = s;
                t[(i + 1, i)] = s;
            }
            t
        };
        let mut v: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        Ok(v)
    }

    /// Eigenvalues of the dense non-symmetric matrix, sorted by real part.
    pub fn eigenvalues_general(&self) -> Vec<C64> {
        let mut v: Vec<C64> = self.to_dense().complex_eigenvalues().iter().copied().collect();
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v
    }

    /// Eigenvalues of one β block of `H_n`, ascending.
    pub fn block_eigenvalues(&self, block: Block) -> Result<Vec<f64>> {
        let v = self.eigenvalues()?;
        Ok(match block {
            Block::Positive => v,
            Block::Negative => v.iter().rev().map(|x| -x).collect(),
        })
    }
}

/// `T = V − ∂² + c ∂` with second-order central differences.
pub fn assemble_hn_with(grid: &NormalGrid, potential: impl Fn(f64) -> f64, drift: f64) -> NormalOperator {
    let n = grid.nodes;
    let h = grid.spacing();
    let k = 1.0 / (h * h);
    let d = drift / (2.0 * h);
    let diag = (0..n).map(|i| potential(grid.coordinate(i)) + 2.0 * k).collect();
    // a wrap entry sits in slot n−1 on periodic grids
    let links = if grid.periodic { n } else { n - 1 };
    NormalOperator { grid: *grid, diag, lower: vec![-k - d; links], upper: vec![-k + d; links] }
}

/// Normal Hamiltonian for a confinement case.
pub fn assemble_hn(case: &ConfinementCase, grid: &NormalGrid) -> Result<NormalOperator> {
    if grid.nodes < MIN_NORMAL_NODES {
        return Err(Error::GridTooCoarse { axis: 2, nodes: grid.nodes, min: MIN_NORMAL_NODES });
    }
    let m = case.m;
    Ok(match case.kind {
        ConfinementKind::Linear { omega } => assemble_hn_with(grid, |q| m * omega * q.abs(), -omega / (2.0 * m)),
        ConfinementKind::Harmonic { omega } => assemble_hn_with(grid, |q| m * omega * q * q, 0.0),
        ConfinementKind::SquareWell { .. } => assemble_hn_with(grid, |_| 0.0, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn infinite_well_levels() {
        let case = ConfinementCase::new(ConfinementKind::SquareWell { width: 1.5 }, 10.0).unwrap();
        let grid = NormalGrid::for_case(&case, 256).unwrap();
        let vals = assemble_hn(&case, &grid).unwrap().eigenvalues().unwrap();
        for n in 1..=5 {
            let exact = (n as f64 * PI / 1.5).powi(2);
            assert!((vals[n - 1] - exact).abs() / exact < 1e-3);
        }
    }

    #[test]
    fn harmonic_ladder() {
        let case = ConfinementCase::new(ConfinementKind::Harmonic { omega: 1.0 }, 10.0).unwrap();
        let grid = NormalGrid::for_case(&case, 256).unwrap();
        let vals = assemble_hn(&case, &grid).unwrap().eigenvalues().unwrap();
        let quantum = 10f64.sqrt();
        for n in 0..5 {
            let exact = quantum * (2 * n + 1) as f64;
            assert!((vals[n] - exact).abs() / exact < 0.02, "{n}: {} vs {exact}", vals[n]);
        }
    }

    #[test]
    fn free_ring_has_discrete_momentum_spectrum() {
        let grid = NormalGrid::new(64, 1.0, true).unwrap();
        let op = assemble_hn_with(&grid, |_| 0.0, 0.0);
        let vals = op.eigenvalues().unwrap();
        let h = grid.spacing();
        let mut expect: Vec<f64> =
            (0..64).map(|j| (2.0 - 2.0 * (2.0 * PI * j as f64 / 64.0).cos()) / (h * h)).collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in vals.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-9 * b.max(1.0));
        }
        let neg = op.block_eigenvalues(Block::Negative).unwrap();
        assert!((neg[0] + expect[63]).abs() < 1e-9 * expect[63]);
    }

    #[test]
    fn linear_case_spectrum_is_real() {
        let case = ConfinementCase::new(ConfinementKind::Linear { omega: 1.0 }, 2.0).unwrap();
        let grid = NormalGrid::for_case(&case, 128).unwrap();
        let op = assemble_hn(&case, &grid).unwrap();
        assert!(!op.is_symmetric());
        let real = op.eigenvalues().unwrap();
        let general = op.eigenvalues_general();
        for (a, b) in real.iter().zip(&general) {
            assert!(b.im.abs() < 1e-8);
            assert!((a - b.re).abs() < 1e-8 * a.abs().max(1.0));
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        assert_eq!(NormalGrid::new(63, 1.0, false), Err(Error::GridTooCoarse { axis: 2, nodes: 63, min: 64 }));
    }
}
