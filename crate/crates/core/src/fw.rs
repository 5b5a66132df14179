//! Exact Foldy-Wouthuysen conjugations of finite Dirac Hamiltonians.
//!
//! A step takes the odd part `𝓞` of `H`, forms the Hermitian generator
//! `S = −iβ𝓞/2m` and returns `e^{iS} H e^{−iS}`, with the exponential
//! evaluated by eigendecomposition rather than a truncated series. Each
//! step removes the current odd part to leading order, so after `n` steps
//! the residual odd part is suppressed by roughly `(‖𝓞‖/m)^n`. The iteration
//! converges only for `m` above the odd-part scale `‖𝓞‖₂`; below it the odd
//! residual grows.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::clifford::gamma;
use crate::geometry::SurfaceChart;
use crate::grid::Grid2D;
use crate::hamiltonian::assemble_hs;
use crate::spectral::{beta_left, central_dirac, pointwise, GridOperator};
use crate::{Error, Result, C64};

pub const MAX_STEPS: usize = 3;

/// A dense Hermitian Dirac Hamiltonian with its β grading.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    pub matrix: DMatrix<C64>,
    pub m: f64,
    pub steps: usize,
    pub grid: Option<[usize; 2]>,
}

fn grading_sign(i: usize) -> f64 {
    if i % 4 < 2 {
        1.0
    } else {
        -1.0
    }
}

/// `β ⊗ I` as a dense matrix.
pub fn grading(dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |r, c| if r == c { C64::new(grading_sign(r), 0.0) } else { C64::new(0.0, 0.0) })
}

/// `(M + βMβ)/2` and `(M − βMβ)/2`.
pub fn even_odd(m: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let mut even = m.clone();
    let mut odd = m.clone();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if grading_sign(r) == grading_sign(c) {
                odd[(r, c)] = C64::new(0.0, 0.0);
            } else {
                even[(r, c)] = C64::new(0.0, 0.0);
            }
        }
    }
    (even, odd)
}

/// Frobenius norm of `(H − βHβ)/2`.
pub fn odd_residual_norm(h: &DMatrix<C64>) -> f64 {
    even_odd(h).1.norm()
}

fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.norm();
    if n == 0.0 {
        0.0
    } else {
        (m - m.adjoint()).norm() / n
    }
}

impl BlockOperator {
    pub fn new(matrix: DMatrix<C64>, m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {m}")));
        }
        if matrix.nrows() != matrix.ncols() || matrix.nrows() % 4 != 0 {
            return Err(Error::InvalidParameter(format!(
                "Dirac operator must be square with dimension divisible by 4, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > 1e-12 {
            return Err(Error::NonHermitianInput { residual: defect });
        }
        Ok(BlockOperator { matrix, m, steps: 0, grid: None })
    }

    /// Dense copy of a grid operator in the unitary frame.
    pub fn from_grid_operator(op: &GridOperator, m: f64) -> Result<Self> {
        let mut b = Self::new(op.unitary_frame().to_dense(), m)?;
        b.grid = Some(op.grid.n);
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn odd_residual(&self) -> f64 {
        odd_residual_norm(&self.matrix)
    }

    /// Spectral norm of the odd part, the scale `m` has to exceed.
    pub fn odd_scale(&self) -> f64 {
        let odd = even_odd(&self.matrix).1;
        SymmetricEigen::new(odd).eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Eigenvalues of the positive-β block alone, ascending.
    pub fn upper_block_eigenvalues(&self) -> Vec<f64> {
        let idx: Vec<usize> = (0..self.dim()).filter(|&i| i % 4 < 2).collect();
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.matrix[(idx[r], idx[c])]);
        let mut v: Vec<f64> = SymmetricEigen::new(sub).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Diagnostics of one conjugation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    /// `‖U†U − I‖_F`.
    pub unitarity_defect: f64,
    pub odd_before: f64,
    pub odd_after: f64,
}

/// One exact FW conjugation `e^{iS} H e^{−iS}`, `S = −iβ𝓞/2m`.
pub fn fw_step(h: &BlockOperator) -> Result<(BlockOperator, StepReport)> {
    let defect = hermiticity_defect(&h.matrix);
    if defect > 1e-11 {
        return Err(Error::NonHermitianInput { residual: defect });
    }
    let dim = h.dim();
    let odd = even_odd(&h.matrix).1;
    let odd_before = odd.norm();
    if odd_before == 0.0 {
        let report = StepReport { unitarity_defect: 0.0, odd_before, odd_after: 0.0 };
        return Ok((BlockOperator { steps: h.steps + 1, ..h.clone() }, report));
    }
    // S = −iβ𝓞/2m is Hermitian because β𝓞 is anti-Hermitian
    let mut s = odd.clone();
    for r in 0..dim {
        let f = C64::new(0.0, -grading_sign(r) / (2.0 * h.m));
        for c in 0..dim {
            s[(r, c)] *= f;
        }
    }
    let s = (&s + s.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(s);
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| C64::from_polar(1.0, x)));
    let u = v * phases * v.adjoint();
    let ud = u.adjoint();
    let unitarity_defect = (&ud * &u - DMatrix::identity(dim, dim)).norm();
    let mut out = &u * &h.matrix * &ud;
    out = (&out + out.adjoint()) * C64::new(0.5, 0.0);
    let odd_after = odd_residual_norm(&out);
    Ok((
        BlockOperator { matrix: out, m: h.m, steps: h.steps + 1, grid: h.grid },
        StepReport { unitarity_defect, odd_before, odd_after },
    ))
}

/// Applies `n_steps ≤ 3` conjugations; the history starts with the
/// residual of the input.
pub fn fw_sequence(h: &BlockOperator, n_steps: usize) -> Result<(BlockOperator, Vec<f64>, Vec<StepReport>)> {
    if n_steps > MAX_STEPS {
        return Err(Error::InvalidParameter(format!("at most {MAX_STEPS} FW steps, got {n_steps}")));
    }
    let mut cur = h.clone();
    let mut history = vec![cur.odd_residual()];
    let mut reports = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        let (next, report) = fw_step(&cur)?;
        history.push(report.odd_after);
        reports.push(report);
        cur = next;
    }
    Ok((cur, history, reports))
}

/// `H = βm + βV + 𝓞` with `𝓞 = −iβD` for the self-adjoint central surface
/// Dirac operator `D = γ̄^a(∂_a + Ω_a)` and `V = v₀ cos q₁`.
pub fn surface_dirac_hamiltonian(chart: &SurfaceChart, grid: &Grid2D, m: f64, v0: f64) -> Result<BlockOperator> {
    let (_, terms) = assemble_hs(chart, grid, m)?;
    let w = terms.weights().to_vec();
    let d = central_dirac(grid, &terms.fields, &w);
    let odd = beta_left(&d).scale(C64::new(0.0, -1.0));
    let even = pointwise(grid, |p| {
        let v = v0 * grid.coords(p)[0].cos();
        (m + v) * crate::clifford::beta()
    });
    let op = GridOperator::new(odd.add(&even), w, grid.clone());
    BlockOperator::from_grid_operator(&op, m)
}

/// `βm + p βγ¹`, the flat one-dimensional Dirac Hamiltonian on a plane wave.
pub fn free_dirac_mode(m: f64, p: f64) -> Result<BlockOperator> {
    let b = crate::clifford::beta();
    let h = m * b + p * (b * gamma(1));
    BlockOperator::new(DMatrix::from_fn(4, 4, |r, c| h.get(r, c)), m)
}

/// Least-squares slope of `ln y` against `ln x`; `None` if fewer than two
/// positive samples.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 || pts.len() != xs.len() {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::StencilOrder;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_mass_is_fixed() {
        let h = BlockOperator::new(grading(8) * C64::new(3.0, 0.0), 3.0).unwrap();
        let (out, report) = fw_step(&h).unwrap();
        assert_eq!(out.matrix, h.matrix);
        assert_eq!(report.odd_after, 0.0);
        let (_, hist, _) = fw_sequence(&h, 3).unwrap();
        assert!(hist.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn zero_steps_is_identity() {
        let h = free_dirac_mode(2.0, 0.3).unwrap();
        let (out, hist, _) = fw_sequence(&h, 0).unwrap();
        assert_eq!(out.matrix, h.matrix);
        assert_eq!(hist.len(), 1);
        assert!(fw_sequence(&h, 4).is_err());
    }

    #[test]
    fn fully_odd_residual() {
        let n = 5;
        let g1 = gamma(1);
        let m = DMatrix::from_fn(4 * n, 4 * n, |r, c| if r / 4 == c / 4 { g1.get(r % 4, c % 4) } else { C64::new(0.0, 0.0) });
        assert!((odd_residual_norm(&m) - 2.0 * (n as f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn free_mode_reaches_relativistic_energy() {
        let (m, p) = (10.0, 0.1);
        let (out, hist, reports) = fw_sequence(&free_dirac_mode(m, p).unwrap(), 3).unwrap();
        let e = out.upper_block_eigenvalues();
        let exact = (m * m + p * p).sqrt();
        assert!((e[0] - exact).abs() <= 1e-5 && (e[1] - exact).abs() <= 1e-5);
        assert!(hist.windows(2).all(|w| w[1] <= w[0]));
        assert!(reports.iter().all(|r| r.unitarity_defect < 1e-12));

        let (_, hist, _) = fw_sequence(&free_dirac_mode(50.0, 0.5).unwrap(), 3).unwrap();
        assert!(hist[3] * 10.0 <= hist[1]);
    }

    fn toy(m: f64, seed: u64) -> (DMatrix<C64>, DMatrix<C64>, DMatrix<C64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut z = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let raw = DMatrix::from_fn(8, 8, |_, _| z());
        let herm = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
        let (even, odd) = even_odd(&herm);
        let h = grading(8) * C64::new(m, 0.0) + &even + &odd;
        (h, even, odd)
    }

    #[test]
    fn one_step_even_part_matches_series() {
        let errs: Vec<f64> = [20.0, 40.0, 80.0]
            .iter()
            .map(|&m| {
                let (h, e, o) = toy(m, 11);
                let (out, _) = fw_step(&BlockOperator::new(h, m).unwrap()).unwrap();
                let b = grading(8);
                let o2 = &o * &o;
                let comm = |a: &DMatrix<C64>, c: &DMatrix<C64>| a * c - c * a;
                let series = &b * C64::new(m, 0.0) + &e + &b * &o2 / C64::new(2.0 * m, 0.0)
                    - comm(&o, &comm(&o, &e)) / C64::new(8.0 * m * m, 0.0);
                (even_odd(&out.matrix).0 - series).norm()
            })
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 8.0).abs() < 1.0, "ratio {ratio}");
        }
    }

    #[test]
    fn torus_steps_preserve_spectrum() {
        let chart = SurfaceChart::torus(2.0, 0.5).unwrap();
        let grid = Grid2D::for_chart(&chart, [8, 8], StencilOrder::Second).unwrap();
        let h = surface_dirac_hamiltonian(&chart, &grid, 20.0, 1.0).unwrap();
        assert!(h.odd_residual() > 0.0);
        let before = h.eigenvalues();
        let (out, report) = fw_step(&h).unwrap();
        assert!(report.unitarity_defect < 1e-12);
        let after = out.eigenvalues();
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-2.5)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 2.5).abs() < 1e-12);
        assert_eq!(loglog_slope(&xs, &[0.0, 0.0, 0.0]), None);
    }
}
