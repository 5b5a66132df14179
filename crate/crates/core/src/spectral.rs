//! Grid operators on (nodes) ⊗ (4-spinor), their discretisation primitives,
//! Hermitian eigensolvers and gap observables.
//!
//! Operators act on vectors indexed `4·node + spinor`. The inner product is
//! weighted by `√g` at each node, so "self-adjoint" means `M = M‡` with
//! `M‡ = W⁻¹ M† W`. Spectra are computed in the unitary frame
//! `W^{1/2} M W^{-1/2}`, where this becomes ordinary Hermiticity.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{beta, SpinorMatrix};
use crate::geometry::{frame_at, Preset, SurfaceChart};
use crate::grid::Grid2D;
use crate::sparse::CsrMatrix;
use crate::{Error, Result, C64};

const RE1: C64 = C64::new(1.0, 0.0);

/// A discretised operator together with the node weights defining its
/// inner product.
#[derive(Clone, Debug)]
pub struct GridOperator {
    pub matrix: CsrMatrix,
    pub weights: Vec<f64>,
    pub grid: Grid2D,
}

fn spread(weights: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
    weights.iter().flat_map(|&w| [f(w); 4]).collect()
}

/// `W⁻¹ M† W` for per-node weights `W`.
pub fn weighted_adjoint(m: &CsrMatrix, weights: &[f64]) -> CsrMatrix {
    m.adjoint().scale_rows_cols(&spread(weights, |w| 1.0 / w), &spread(weights, |w| w))
}

/// `β ⊗ I` applied from the left.
pub fn beta_left(m: &CsrMatrix) -> CsrMatrix {
    let sign: Vec<f64> = (0..m.nrows()).map(|i| if i % 4 < 2 { 1.0 } else { -1.0 }).collect();
    m.scale_rows_cols(&sign, &vec![1.0; m.ncols()])
}

/// Odd part `(M − βMβ)/2`.
pub fn odd_part(m: &CsrMatrix) -> CsrMatrix {
    let sign: Vec<f64> = (0..m.nrows()).map(|i| if i % 4 < 2 { 1.0 } else { -1.0 }).collect();
    m.sub(&m.scale_rows_cols(&sign, &sign)).scale(C64::new(0.5, 0.0))
}

impl GridOperator {
    pub fn new(matrix: CsrMatrix, weights: Vec<f64>, grid: Grid2D) -> Self {
        assert_eq!(matrix.nrows(), 4 * grid.len());
        assert_eq!(weights.len(), grid.len());
        GridOperator { matrix, weights, grid }
    }

    pub fn zero(weights: Vec<f64>, grid: Grid2D) -> Self {
        let n = 4 * grid.len();
        Self::new(CsrMatrix::zeros(n, n), weights, grid)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_matrix(&self, matrix: CsrMatrix) -> Self {
        GridOperator { matrix, weights: self.weights.clone(), grid: self.grid.clone() }
    }

    pub fn adjoint(&self) -> Self {
        self.with_matrix(weighted_adjoint(&self.matrix, &self.weights))
    }

    /// `(M + M‡)/2`.
    pub fn symmetrized(&self) -> Self {
        self.with_matrix(self.matrix.add(&self.adjoint().matrix).scale(C64::new(0.5, 0.0)))
    }

    pub fn add(&self, other: &GridOperator) -> Self {
        self.with_matrix(self.matrix.add(&other.matrix))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.with_matrix(self.matrix.scale(C64::new(s, 0.0)))
    }

    /// Matrix in the unitary frame `W^{1/2} M W^{-1/2}`.
    pub fn unitary_frame(&self) -> CsrMatrix {
        self.matrix.scale_rows_cols(&spread(&self.weights, f64::sqrt), &spread(&self.weights, |w| 1.0 / w.sqrt()))
    }

    /// `‖M − M‡‖ / ‖M‖` measured in the unitary frame (Frobenius norms).
    pub fn hermiticity_residual(&self) -> f64 {
        let u = self.unitary_frame();
        let norm = u.norm_fro();
        if norm == 0.0 {
            0.0
        } else {
            u.sub(&u.adjoint()).norm_fro() / norm
        }
    }

    /// Frobenius norm of the odd part; zero iff the operator commutes with β.
    pub fn odd_residual(&self) -> f64 {
        odd_part(&self.unitary_frame()).norm_fro()
    }

    pub fn norm(&self) -> f64 {
        self.unitary_frame().norm_inf()
    }

    fn block_indices(&self, block: Block) -> Vec<usize> {
        let offset = match block {
            Block::Positive => 0,
            Block::Negative => 2,
        };
        (0..self.grid.len()).flat_map(|p| [4 * p + offset, 4 * p + offset + 1]).collect()
    }

    /// One β block in the unitary frame (dimension `2N`).
    pub fn block(&self, block: Block) -> CsrMatrix {
        self.unitary_frame().submatrix(&self.block_indices(block))
    }
}

/// Pointwise spinor field `C(x)` as a block-diagonal operator.
pub fn pointwise(grid: &Grid2D, coef: impl Fn(usize) -> SpinorMatrix) -> CsrMatrix {
    let mut t = Vec::with_capacity(16 * grid.len());
    for p in 0..grid.len() {
        let c = coef(p);
        push_block(&mut t, p, p, &c, RE1);
    }
    CsrMatrix::from_triplets(4 * grid.len(), 4 * grid.len(), &t)
}

fn push_block(t: &mut Vec<(usize, usize, C64)>, x: usize, y: usize, c: &SpinorMatrix, w: C64) {
    for s in 0..4 {
        for u in 0..4 {
            let v = c.get(s, u);
            if v != C64::new(0.0, 0.0) {
                t.push((4 * x + s, 4 * y + u, v * w));
            }
        }
    }
}

/// `C(x) ∂_axis` with the given stencil `(offset, weight·h)`.
pub fn coefficient_derivative(
    grid: &Grid2D,
    axis: usize,
    stencil: &[(i64, f64)],
    coef: impl Fn(usize) -> SpinorMatrix,
) -> CsrMatrix {
    let h = grid.h[axis];
    let mut t = Vec::with_capacity(16 * stencil.len() * grid.len());
    for p in 0..grid.len() {
        let c = coef(p);
        for &(off, w) in stencil {
            if let Some(q) = grid.shift(p, axis, off) {
                push_block(&mut t, p, q, &c, C64::new(w / h, 0.0));
            }
        }
    }
    CsrMatrix::from_triplets(4 * grid.len(), 4 * grid.len(), &t)
}

/// Scalar first-derivative matrix on the nodes (no spinor factor).
pub fn scalar_derivative(grid: &Grid2D, axis: usize, stencil: &[(i64, f64)]) -> CsrMatrix {
    let h = grid.h[axis];
    let mut t = Vec::new();
    for p in 0..grid.len() {
        for &(off, w) in stencil {
            if let Some(q) = grid.shift(p, axis, off) {
                t.push((p, q, C64::new(w / h, 0.0)));
            }
        }
    }
    CsrMatrix::from_triplets(grid.len(), grid.len(), &t)
}

/// Coefficient fields of a surface Dirac operator `γ̄^a(∂_a + Ω_a)`.
#[derive(Clone, Debug)]
pub struct DiracFields {
    pub gammas: Vec<[SpinorMatrix; 2]>,
    pub connection: Vec<[SpinorMatrix; 2]>,
}

/// `Σ_a γ̄^a(x)[δ_a + Ω_a(x)]` with the supplied one-dimensional stencil.
pub fn dirac_operator(grid: &Grid2D, fields: &DiracFields, stencil: &[(i64, f64)]) -> CsrMatrix {
    let mut m = pointwise(grid, |p| {
        let g = &fields.gammas[p];
        let o = &fields.connection[p];
        g[0] * o[0] + g[1] * o[1]
    });
    for axis in 0..2 {
        m = m.add(&coefficient_derivative(grid, axis, stencil, |p| fields.gammas[p][axis]));
    }
    m
}

/// `½(A‡A + AA‡)` for `A = γ̄^a(δ⁺_a + Ω_a)`, a self-adjoint discretisation of
/// `[γ̄^a(∂_a + Ω_a)]²`.
pub fn kinetic_operator(grid: &Grid2D, fields: &DiracFields, weights: &[f64]) -> CsrMatrix {
    let a = dirac_operator(grid, fields, grid.order.forward());
    let ad = weighted_adjoint(&a, weights);
    ad.matmul(&a).add(&a.matmul(&ad)).scale(C64::new(0.5, 0.0))
}

/// Self-adjoint central-difference surface Dirac operator.
pub fn central_dirac(grid: &Grid2D, fields: &DiracFields, weights: &[f64]) -> CsrMatrix {
    let d = dirac_operator(grid, fields, grid.order.central());
    d.add(&weighted_adjoint(&d, weights)).scale(C64::new(0.5, 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Block {
    Positive,
    Negative,
}

impl Block {
    pub fn label(self) -> &'static str {
        match self {
            Block::Positive => "positive",
            Block::Negative => "negative",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    Auto,
    Dense,
    Iterative,
}

impl std::str::FromStr for SolveMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SolveMode::Auto),
            "dense" => Ok(SolveMode::Dense),
            "iterative" => Ok(SolveMode::Iterative),
            other => Err(Error::InvalidParameter(format!("unknown solve mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub k: usize,
    pub mode: SolveMode,
    /// Residual target relative to the operator norm.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Largest block dimension handled by the dense solver in `Auto` mode.
    pub dense_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { k: 8, mode: SolveMode::Auto, tol: 1e-8, max_iter: 2000, seed: 0, dense_limit: 5000 }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    pub block: Block,
    /// `‖Hv − λv‖` in the unitary frame, `‖v‖ = 1`.
    pub residual: f64,
    /// Dominant Fourier index along the cyclic coordinate.
    pub fourier_index: i64,
    /// Eigenvector in the unitary frame, full spinor layout.
    pub vector: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub hermiticity_residual: f64,
    pub odd_residual: f64,
    pub operator_norm: f64,
    pub grid: [usize; 2],
    pub stencil_order: u32,
    pub iterations: usize,
    pub solver: &'static str,
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    /// Sorted ascending by value.
    pub pairs: Vec<Eigenpair>,
    pub diagnostics: Diagnostics,
}

impl SpectrumResult {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    /// Pairs of one block, ascending.
    pub fn block(&self, block: Block) -> Vec<&Eigenpair> {
        self.pairs.iter().filter(|p| p.block == block).collect()
    }

    pub fn block_values(&self, block: Block) -> Vec<f64> {
        self.block(block).iter().map(|p| p.value).collect()
    }
}

/// Lowest `k` eigenpairs of the positive block and highest `k` of the
/// negative block.
pub fn eigensolve(op: &GridOperator, opts: &SolveOptions) -> Result<SpectrumResult> {
    let herm = op.hermiticity_residual();
    if !(herm <= 1e-10) {
        return Err(Error::NonHermitianInput { residual: herm });
    }
    let norm = op.norm();
    let odd = op.odd_residual();
    let half = 2 * op.grid.len();
    if opts.k > half {
        return Err(Error::InvalidParameter(format!("requested {} eigenpairs from a block of dimension {half}", opts.k)));
    }
    let mut diagnostics = Diagnostics {
        hermiticity_residual: herm,
        odd_residual: odd,
        operator_norm: norm,
        grid: op.grid.n,
        stencil_order: op.grid.order.as_int(),
        iterations: 0,
        solver: "dense",
    };
    let mut pairs = Vec::new();
    if opts.k == 0 {
        return Ok(SpectrumResult { pairs, diagnostics });
    }
    let cyclic = cyclic_axis(&op.grid);
    if odd <= 1e-12 * norm.max(1.0) {
        let dense = match opts.mode {
            SolveMode::Dense => true,
            SolveMode::Iterative => false,
            SolveMode::Auto => half <= opts.dense_limit,
        };
        for block in [Block::Positive, Block::Negative] {
            let mut h = op.block(block);
            if block == Block::Negative {
                h = h.scale(C64::new(-1.0, 0.0));
            }
            let target = opts.tol * h.norm_inf().max(f64::MIN_POSITIVE);
            let (values, vectors, iters) = if dense {
                lowest_dense(&h, opts.k)
            } else {
                diagnostics.solver = "chebyshev";
                lowest_iterative(&h, opts.k, target, opts.max_iter, opts.seed)?
            };
            diagnostics.iterations = diagnostics.iterations.max(iters);
            let offset = if block == Block::Positive { 0 } else { 2 };
            for (j, &v) in values.iter().enumerate() {
                let col = vectors.column(j);
                let residual = residual_norm(&h, col.as_slice(), v);
                let mut full = vec![C64::new(0.0, 0.0); op.dim()];
                for p in 0..op.grid.len() {
                    full[4 * p + offset] = col[2 * p];
                    full[4 * p + offset + 1] = col[2 * p + 1];
                }
                let value = if block == Block::Positive { v } else { -v };
                pairs.push(Eigenpair {
                    value,
                    block,
                    residual,
                    fourier_index: dominant_fourier_index(&op.grid, &full, cyclic),
                    vector: full,
                });
            }
        }
    } else {
        // not block diagonal: solve the whole operator and label by ⟨β⟩
        let h = op.unitary_frame();
        let eig = SymmetricEigen::new(hermitize(&h.to_dense()));
        let mut all: Vec<(f64, Vec<C64>)> = (0..eig.eigenvalues.len())
            .map(|j| (eig.eigenvalues[j], eig.eigenvectors.column(j).iter().copied().collect()))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let beta_exp = |v: &[C64]| -> f64 {
            v.iter().enumerate().map(|(i, z)| if i % 4 < 2 { z.norm_sqr() } else { -z.norm_sqr() }).sum()
        };
        let pos: Vec<_> = all.iter().filter(|(_, v)| beta_exp(v) > 0.0).take(opts.k).cloned().collect();
        let neg: Vec<_> = all.iter().rev().filter(|(_, v)| beta_exp(v) <= 0.0).take(opts.k).cloned().collect();
        for (block, list) in [(Block::Positive, pos), (Block::Negative, neg)] {
            for (value, vector) in list {
                pairs.push(Eigenpair {
                    value,
                    block,
                    residual: residual_norm(&h, &vector, value),
                    fourier_index: dominant_fourier_index(&op.grid, &vector, cyclic),
                    vector,
                });
            }
        }
    }
    sort_pairs(&mut pairs);
    Ok(SpectrumResult { pairs, diagnostics })
}

fn sort_pairs(pairs: &mut [Eigenpair]) {
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    // within numerically degenerate clusters order by Fourier index
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && (pairs[end].value - pairs[start].value).abs() <= 1e-9 * pairs[start].value.abs().max(1.0) {
            end += 1;
        }
        pairs[start..end].sort_by_key(|p| (p.block, p.fourier_index.abs(), p.fourier_index));
        start = end;
    }
}

fn cyclic_axis(grid: &Grid2D) -> Option<usize> {
    [1, 0].into_iter().find(|&a| grid.periodic[a])
}

/// Fourier index along `axis` carrying the largest share of `|v|²`.
pub fn dominant_fourier_index(grid: &Grid2D, v: &[C64], axis: Option<usize>) -> i64 {
    let Some(axis) = axis else { return 0 };
    let n = grid.n[axis];
    let other = 1 - axis;
    let mut power = vec![0.0; n];
    for line in 0..grid.n[other] {
        for s in 0..4 {
            for (kk, pw) in power.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..n {
                    let node = if axis == 1 { grid.index(line, j) } else { grid.index(j, line) };
                    let phase = -std::f64::consts::TAU * (kk * j) as f64 / n as f64;
                    acc += v[4 * node + s] * C64::from_polar(1.0, phase);
                }
                *pw += acc.norm_sqr();
            }
        }
    }
    let mut best = 0;
    for k in 1..n {
        if power[k] > power[best] * (1.0 + 1e-9) {
            best = k;
        }
    }
    let best = best as i64;
    if best > n as i64 / 2 {
        best - n as i64
    } else {
        best
    }
}

fn hermitize(d: &DMatrix<C64>) -> DMatrix<C64> {
    (d + d.adjoint()) * C64::new(0.5, 0.0)
}

fn residual_norm(h: &CsrMatrix, v: &[C64], lambda: f64) -> f64 {
    let hv = h.apply(v);
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    hv.iter().zip(v).map(|(a, b)| (a - b * lambda).norm_sqr()).sum::<f64>().sqrt() / norm
}

/// Dense Hermitian eigensolve; returns the `k` lowest pairs.
pub fn lowest_dense(h: &CsrMatrix, k: usize) -> (Vec<f64>, DMatrix<C64>, usize) {
    let eig = SymmetricEigen::new(hermitize(&h.to_dense()));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order[..k].iter().map(|&j| eig.eigenvalues[j]).collect();
    let vectors = DMatrix::from_fn(h.nrows(), k, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors, 0)
}

fn apply_block(h: &CsrMatrix, x: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    for c in 0..x.ncols() {
        let col: Vec<C64> = x.column(c).iter().copied().collect();
        let y = h.apply(&col);
        out.column_mut(c).copy_from_slice(&y);
    }
    out
}

fn orthonormalize(x: DMatrix<C64>) -> DMatrix<C64> {
    x.qr().q()
}

/// Chebyshev-filtered block subspace iteration with Rayleigh–Ritz
/// extraction for the `k` lowest eigenpairs of a sparse Hermitian matrix.
pub fn lowest_iterative(
    h: &CsrMatrix,
    k: usize,
    target: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(Vec<f64>, DMatrix<C64>, usize)> {
    let n = h.nrows();
    let p = (k + (k / 2).max(8)).min(n);
    let (_, hi) = h.gershgorin();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::from_fn(n, p, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let mut x = orthonormalize(x);
    let degree = 24;
    let mut achieved = f64::INFINITY;
    for it in 1..=max_iter {
        let hx = apply_block(h, &x);
        let small = hermitize(&(x.adjoint() * &hx));
        let eig = SymmetricEigen::new(small);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let q = DMatrix::from_fn(p, p, |r, c| eig.eigenvectors[(r, order[c])]);
        let theta: Vec<f64> = order.iter().map(|&j| eig.eigenvalues[j]).collect();
        x = &x * &q;
        let hx = hx * &q;
        achieved = (0..k)
            .map(|j| (hx.column(j) - x.column(j) * C64::new(theta[j], 0.0)).norm())
            .fold(0.0, f64::max);
        if achieved <= target {
            return Ok((theta[..k].to_vec(), x.columns(0, k).into_owned(), it));
        }
        let cut = theta[p - 1];
        let (e, c) = if cut < hi { ((hi - cut) / 2.0, (hi + cut) / 2.0) } else { (1.0, cut) };
        let mut y_prev = x.clone();
        let mut y = (apply_block(h, &x) - &x * C64::new(c, 0.0)) / C64::new(e, 0.0);
        for _ in 1..degree {
            let next = (apply_block(h, &y) - &y * C64::new(c, 0.0)) * C64::new(2.0 / e, 0.0) - &y_prev;
            y_prev = y;
            y = next;
            let scale = y.norm();
            if scale > 1e100 {
                y /= C64::new(scale, 0.0);
                y_prev /= C64::new(scale, 0.0);
            }
        }
        x = orthonormalize(y);
    }
    Err(Error::ConvergenceFailure { iterations: max_iter, achieved, target })
}

/// One row of a gap scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapRow {
    pub theta: f64,
    /// `α^φ_φ`, the curvature multiplying the Zeeman-like term.
    pub zeeman_coeff: f64,
    /// `Ω_φ` as the coefficient of `iΣ₃/2`.
    pub spin_conn_coeff: f64,
    pub doublet_splitting: f64,
    pub geom_pot: f64,
}

/// Per-θ-row coefficient fields and local doublet splittings.
///
/// The splitting on row `θ_j` is the eigenvalue spread of the Zeeman-like
/// operator restricted to that row and to the span of the two lowest
/// positive-energy states, normalised by their weight on the row.
pub fn gap_scan(result: &SpectrumResult, chart: &SurfaceChart, grid: &Grid2D, zeeman: &GridOperator) -> Result<Vec<GapRow>> {
    match chart.preset() {
        Preset::Torus { .. } | Preset::Sphere { .. } => {}
        _ => return Err(Error::UnsupportedChart(format!("{} has no θ coordinate for a gap scan", chart.name()))),
    }
    let pos = result.block(Block::Positive);
    if pos.len() < 2 {
        return Err(Error::InvalidParameter("gap scan needs at least two positive-block eigenpairs".into()));
    }
    let v = [&pos[0].vector, &pos[1].vector];
    let z = zeeman.unitary_frame();
    let mut rows = Vec::with_capacity(grid.n[0]);
    for i in 0..grid.n[0] {
        let theta = grid.coordinate(0, i);
        let f = frame_at(chart, [theta, 0.0])?;
        let mut m = [[C64::new(0.0, 0.0); 2]; 2];
        let mut weight = 0.0;
        for j in 0..grid.n[1] {
            let node = grid.index(i, j);
            for s in 0..2 {
                let r = 4 * node + s;
                weight += 0.5 * (v[0][r].norm_sqr() + v[1][r].norm_sqr());
                for (c, val) in z.row(r) {
                    if c / 4 != node {
                        continue;
                    }
                    for a in 0..2 {
                        for b in 0..2 {
                            m[a][b] += v[a][r].conj() * val * v[b][c];
                        }
                    }
                }
            }
        }
        let diff = (m[0][0] - m[1][1]) * 0.5;
        let spread = 2.0 * (diff * diff + m[0][1] * m[1][0]).sqrt().norm();
        rows.push(GapRow {
            theta,
            zeeman_coeff: f.alpha_mixed[(1, 1)],
            spin_conn_coeff: f.omega[1],
            doublet_splitting: if weight > 0.0 { spread / weight } else { 0.0 },
            geom_pot: f.geometric_potential(),
        });
    }
    Ok(rows)
}

/// `β` as a grid operator.
pub fn beta_operator(grid: &Grid2D) -> CsrMatrix {
    let b = beta();
    pointwise(grid, |_| b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::gamma;
    use crate::geometry::{Domain, Interval, SurfaceChart};
    use crate::grid::StencilOrder;

    fn ring(n: usize) -> Grid2D {
        let d = Domain([Interval::periodic(0.0, 1.0), Interval::periodic(0.0, 1.0)]);
        Grid2D::new(&d, [n, n], [true, true], StencilOrder::Second).unwrap()
    }

    #[test]
    fn central_derivative_has_sine_symbol() {
        let g = ring(16);
        let d = scalar_derivative(&g, 1, g.order.central()).to_dense();
        let skew = &d + d.adjoint();
        assert!(skew.norm() < 1e-14);
        // restrict to one ring and apply to a Fourier mode
        let h = g.h[1];
        let kk = 3.0;
        let k = std::f64::consts::TAU * kk;
        let v: Vec<C64> = (0..g.len()).map(|p| C64::from_polar(1.0, k * g.coords(p)[1])).collect();
        let dv = scalar_derivative(&g, 1, g.order.central()).apply(&v);
        let symbol = C64::new(0.0, (k * h).sin() / h);
        for p in 0..g.len() {
            assert!((dv[p] - symbol * v[p]).norm() < 1e-12);
        }
    }

    #[test]
    fn kinetic_on_flat_box_is_compact_laplacian() {
        let chart = SurfaceChart::plane(1.0, 1.0).unwrap();
        let g = Grid2D::for_chart(&chart, [8, 8], StencilOrder::Second).unwrap();
        let fields = DiracFields {
            gammas: vec![[gamma(1), gamma(2)]; g.len()],
            connection: vec![[SpinorMatrix::zero(); 2]; g.len()],
        };
        let w = vec![1.0; g.len()];
        let k = kinetic_operator(&g, &fields, &w);
        let op = GridOperator::new(k, w, g.clone());
        let (vals, _, _) = lowest_dense(&op.block(Block::Positive), 2 * g.len());
        let mut expect: Vec<f64> = Vec::new();
        for a in 0..8 {
            for b in 0..8 {
                let lam = |j: usize| (2.0 - 2.0 * (std::f64::consts::TAU * j as f64 / 8.0).cos()) / (g.h[0] * g.h[0]);
                expect.push(lam(a) + lam(b));
                expect.push(lam(a) + lam(b));
            }
        }
        expect.sort_by(f64::total_cmp);
        for (a, b) in vals.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-10 * b.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn iterative_matches_dense() {
        let chart = SurfaceChart::plane(1.0, 1.3).unwrap();
        let g = Grid2D::for_chart(&chart, [12, 10], StencilOrder::Second).unwrap();
        let fields = DiracFields {
            gammas: vec![[gamma(1), gamma(2)]; g.len()],
            connection: vec![[SpinorMatrix::zero(); 2]; g.len()],
        };
        let w = vec![1.0; g.len()];
        let pot = pointwise(&g, |p| {
            let q = g.coords(p);
            (3.0 * (q[0] * 6.0).cos() + q[1]) * SpinorMatrix::identity()
        });
        let h = GridOperator::new(kinetic_operator(&g, &fields, &w).add(&pot), w, g).block(Block::Positive);
        let (d, _, _) = lowest_dense(&h, 6);
        let (it, vecs, _) = lowest_iterative(&h, 6, 1e-10 * h.norm_inf(), 2000, 7).unwrap();
        for j in 0..6 {
            assert!((d[j] - it[j]).abs() < 1e-8, "{j}: {} vs {}", d[j], it[j]);
            let col: Vec<C64> = vecs.column(j).iter().copied().collect();
            assert!(residual_norm(&h, &col, it[j]) < 1e-9 * h.norm_inf());
        }
    }

    #[test]
    fn weighted_adjoint_inverts_itself() {
        let g = ring(8);
        let w: Vec<f64> = (0..g.len()).map(|p| 1.0 + 0.1 * p as f64).collect();
        let m = coefficient_derivative(&g, 0, g.order.forward(), |p| (p as f64) * gamma(1) + SpinorMatrix::identity());
        let back = weighted_adjoint(&weighted_adjoint(&m, &w), &w);
        assert!(back.max_abs_diff(&m) < 1e-12);
        let op = GridOperator::new(m, w, g);
        assert!(op.symmetrized().hermiticity_residual() < 1e-14);
    }

    #[test]
    fn fourier_index_of_plane_wave() {
        let g = ring(8);
        let v: Vec<C64> = (0..4 * g.len())
            .map(|i| {
                let q = g.coords(i / 4);
                C64::from_polar(1.0, -std::f64::consts::TAU * 2.0 * q[1])
            })
            .collect();
        assert_eq!(dominant_fourier_index(&g, &v, Some(1)), -2);
        assert_eq!(dominant_fourier_index(&g, &v, Some(0)), 0);
    }
}
