//! Flat Dirac algebra in the standard Dirac basis.
//!
//! `β = diag(1, 1, -1, -1)` and `γ^i = [[0, σ_i], [-σ_i, 0]]`. The spatial
//! gammas are anti-Hermitian and square to `-1`, so `{γ^i, γ^j} = -2δ^{ij}`;
//! this is the choice for which `-iβγ^i ∂_i` is Hermitian. Flat indices 1 and 2
//! refer to the tangent frame of the surface, index 3 to its normal.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4};

use crate::geometry::GeometryFrame;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// A 4×4 complex matrix acting on Dirac spinors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinorMatrix(pub Matrix4<C64>);

impl SpinorMatrix {
    pub fn zero() -> Self {
        SpinorMatrix(Matrix4::zeros())
    }

    pub fn identity() -> Self {
        SpinorMatrix(Matrix4::identity())
    }

    pub fn from_fn(f: impl FnMut(usize, usize) -> C64) -> Self {
        SpinorMatrix(Matrix4::from_fn(f))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn scale(&self, c: C64) -> Self {
        SpinorMatrix(self.0 * c)
    }

    pub fn scale_re(&self, c: f64) -> Self {
        SpinorMatrix(self.0 * C64::new(c, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        SpinorMatrix(self.0.adjoint())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        SpinorMatrix(self.0 * other.0 - other.0 * self.0)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        SpinorMatrix(self.0 * other.0 + other.0 * self.0)
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        SpinorMatrix((self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn norm_fro(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Upper-left (positive-energy) 2×2 block.
    pub fn upper_block(&self) -> [[C64; 2]; 2] {
        [
            [self.0[(0, 0)], self.0[(0, 1)]],
            [self.0[(1, 0)], self.0[(1, 1)]],
        ]
    }
}

impl Add for SpinorMatrix {
    type Output = SpinorMatrix;
    fn add(self, rhs: Self) -> Self {
        SpinorMatrix(self.0 + rhs.0)
    }
}

impl AddAssign for SpinorMatrix {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl Sub for SpinorMatrix {
    type Output = SpinorMatrix;
    fn sub(self, rhs: Self) -> Self {
        SpinorMatrix(self.0 - rhs.0)
    }
}

impl Mul for SpinorMatrix {
    type Output = SpinorMatrix;
    fn mul(self, rhs: Self) -> Self {
        SpinorMatrix(self.0 * rhs.0)
    }
}

impl Mul<SpinorMatrix> for f64 {
    type Output = SpinorMatrix;
    fn mul(self, rhs: SpinorMatrix) -> SpinorMatrix {
        rhs.scale_re(self)
    }
}

impl Mul<SpinorMatrix> for C64 {
    type Output = SpinorMatrix;
    fn mul(self, rhs: SpinorMatrix) -> SpinorMatrix {
        rhs.scale(self)
    }
}

impl Neg for SpinorMatrix {
    type Output = SpinorMatrix;
    fn neg(self) -> Self {
        SpinorMatrix(-self.0)
    }
}

fn pauli(k: usize) -> [[C64; 2]; 2] {
    match k {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("Pauli index must be 1, 2 or 3, got {k}"),
    }
}

/// `β = γ⁰`.
pub fn beta() -> SpinorMatrix {
    SpinorMatrix(Matrix4::from_diagonal(&nalgebra::Vector4::new(
        ONE, ONE, -ONE, -ONE,
    )))
}

/// Flat spatial gamma `γ^i`, `i ∈ {1, 2, 3}`.
pub fn gamma(i: usize) -> SpinorMatrix {
    let s = pauli(i);
    let mut m = Matrix4::zeros();
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c + 2)] = s[r][c];
            m[(r + 2, c)] = -s[r][c];
        }
    }
    SpinorMatrix(m)
}

/// Spin matrix `Σ_k = diag(σ_k, σ_k)`; `Σ_3 = iγ¹γ²` is the normal spin.
pub fn sigma(k: usize) -> SpinorMatrix {
    let s = pauli(k);
    let mut m = Matrix4::zeros();
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] = s[r][c];
            m[(r + 2, c + 2)] = s[r][c];
        }
    }
    SpinorMatrix(m)
}

/// Reduced surface gamma `γ̄^a = e^a_i γ^i`.
pub fn reduced_gamma(frame: &GeometryFrame, a: usize) -> SpinorMatrix {
    (0..2).fold(SpinorMatrix::zero(), |acc, i| {
        acc + frame.inv_zweibein[a][i] * gamma(i + 1)
    })
}

/// Lowered reduced gamma `γ̄_a = e_a^i γ^i`.
pub fn lowered_gamma(frame: &GeometryFrame, a: usize) -> SpinorMatrix {
    (0..2).fold(SpinorMatrix::zero(), |acc, i| {
        acc + frame.zweibein[a][i] * gamma(i + 1)
    })
}

/// Spin matrix along the tangent direction `a`, `e^a_i Σ^i` normalised to unit norm.
pub fn tangent_spin(frame: &GeometryFrame, a: usize) -> SpinorMatrix {
    let e = frame.inv_zweibein[a];
    let norm = (e[0] * e[0] + e[1] * e[1]).sqrt();
    (e[0] / norm) * sigma(1) + (e[1] / norm) * sigma(2)
}

/// Tangential spin-connection matrix `Ω_a = c_a · iΣ₃/2`.
pub fn omega_matrix(coefficient: f64) -> SpinorMatrix {
    sigma(3).scale(C64::new(0.0, 0.5 * coefficient))
}

/// Spinor generator of a frame rotation rate.
///
/// `w[(i, j)] = (∂T_i)·T_j` (antisymmetric) maps to `½ Σ_{i<j} w_ij γ^i γ^j`,
/// which satisfies `[Γ, γ^i] = Σ_j w_ij γ^j`.
pub fn spin_generator(w: &Matrix3<f64>) -> SpinorMatrix {
    let mut out = SpinorMatrix::zero();
    for i in 0..3 {
        for j in (i + 1)..3 {
            if w[(i, j)] != 0.0 {
                out += (0.5 * w[(i, j)]) * (gamma(i + 1) * gamma(j + 1));
            }
        }
    }
    out
}

/// β-grading projection: `even = (M + βMβ)/2`, `odd = (M − βMβ)/2`.
pub fn even_odd_split(m: &SpinorMatrix) -> (SpinorMatrix, SpinorMatrix) {
    let b = beta();
    let conj = b * *m * b;
    (
        (*m + conj).scale_re(0.5),
        (*m - conj).scale_re(0.5),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{frame_at, SurfaceChart};

    fn assert_close(a: &SpinorMatrix, b: &SpinorMatrix, tol: f64) {
        let d = (*a - *b).max_abs();
        assert!(d <= tol, "matrices differ by {d:e}\n{:?}\n{:?}", a.0, b.0);
    }

    #[test]
    fn clifford_relations() {
        let id = SpinorMatrix::identity();
        for i in 1..=3 {
            for j in 1..=3 {
                let expect = if i == j { -2.0 * id } else { SpinorMatrix::zero() };
                assert_close(&gamma(i).anticommutator(&gamma(j)), &expect, 1e-14);
            }
            assert_close(&beta().anticommutator(&gamma(i)), &SpinorMatrix::zero(), 1e-14);
            assert_close(&gamma(i).adjoint(), &(-gamma(i)), 0.0);
        }
        assert_close(&(beta() * beta()), &id, 0.0);
    }

    #[test]
    fn spin_matrices_are_gamma_bivectors() {
        let i = C64::new(0.0, 1.0);
        assert_close(&sigma(3), &(gamma(1) * gamma(2)).scale(i), 1e-15);
        assert_close(&sigma(1), &(gamma(2) * gamma(3)).scale(i), 1e-15);
        assert_close(&sigma(2), &(gamma(3) * gamma(1)).scale(i), 1e-15);
        assert_close(&sigma(3), &sigma(3).adjoint(), 0.0);
        let diag: Vec<f64> = (0..4).map(|k| sigma(3).get(k, k).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn normal_spin_product_identity() {
        // γ³γ²Σ₃ = Σ₂, used when matching the Zeeman-like term on the torus.
        assert_close(&(gamma(3) * gamma(2) * sigma(3)), &sigma(2), 1e-15);
    }

    #[test]
    fn generator_reproduces_rotation_rates() {
        let mut w = Matrix3::zeros();
        w[(0, 1)] = 0.7;
        w[(1, 0)] = -0.7;
        w[(0, 2)] = -0.3;
        w[(2, 0)] = 0.3;
        w[(1, 2)] = 1.1;
        w[(2, 1)] = -1.1;
        let g = spin_generator(&w);
        for i in 0..3 {
            let mut expect = SpinorMatrix::zero();
            for j in 0..3 {
                expect += w[(i, j)] * gamma(j + 1);
            }
            assert_close(&g.commutator(&gamma(i + 1)), &expect, 1e-14);
        }
        // the 12 part is Ω with coefficient −w₁₂
        let mut w12 = Matrix3::zeros();
        w12[(0, 1)] = 0.4;
        w12[(1, 0)] = -0.4;
        assert_close(&spin_generator(&w12), &omega_matrix(-0.4), 1e-15);
    }

    #[test]
    fn grading_examples() {
        let v = 0.37;
        let bv = v * beta();
        let (e, o) = even_odd_split(&bv);
        assert_close(&e, &bv, 0.0);
        assert_close(&o, &SpinorMatrix::zero(), 0.0);

        let m = (beta() * gamma(3)).scale(C64::new(0.0, -1.0));
        let (e, o) = even_odd_split(&m);
        assert_close(&e, &SpinorMatrix::zero(), 1e-15);
        assert_close(&o, &m, 1e-15);

        let m = beta() + gamma(1);
        let (e, o) = even_odd_split(&m);
        assert_close(&e, &beta(), 1e-15);
        assert_close(&o, &gamma(1), 1e-15);
        assert_close(&e.commutator(&beta()), &SpinorMatrix::zero(), 1e-14);
        assert_close(&o.anticommutator(&beta()), &SpinorMatrix::zero(), 1e-14);

        let (ee, eo) = even_odd_split(&e);
        assert_close(&ee, &e, 1e-15);
        assert_close(&eo, &SpinorMatrix::zero(), 1e-15);
    }

    #[test]
    fn reduced_gammas_on_plane_are_flat() {
        let chart = SurfaceChart::plane(2.0, 3.0).unwrap();
        let f = frame_at(&chart, [0.4, 1.1]).unwrap();
        assert_close(&reduced_gamma(&f, 0), &gamma(1), 0.0);
        assert_close(&reduced_gamma(&f, 1), &gamma(2), 0.0);
    }

    #[test]
    fn reduced_gamma_anticommutator_matches_inverse_metric() {
        let charts = [
            SurfaceChart::torus(2.0, 0.5).unwrap(),
            SurfaceChart::sphere(1.3).unwrap(),
            SurfaceChart::egg_crate(0.3, 2.0).unwrap(),
        ];
        for chart in &charts {
            let f = frame_at(chart, [0.71, 0.29]).unwrap();
            for a in 0..2 {
                for b in 0..2 {
                    let lhs = reduced_gamma(&f, a).anticommutator(&reduced_gamma(&f, b));
                    let rhs = (-2.0 * f.g_inv[(a, b)]) * SpinorMatrix::identity();
                    assert_close(&lhs, &rhs, 1e-12);
                }
            }
        }
        // torus θ direction: g^{θθ} = 1/r²
        let f = frame_at(&charts[0], [0.3, 0.0]).unwrap();
        let gt = reduced_gamma(&f, 0);
        assert_close(&(gt * gt), &(-4.0 * SpinorMatrix::identity()), 1e-13);
    }
}
