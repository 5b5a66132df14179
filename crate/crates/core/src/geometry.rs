//! Differential geometry of a parametrised surface and of its normal
//! neighbourhood `R(q₁, q₂, q₃) = r(q₁, q₂) + q₃ n(q₁, q₂)`.
//!
//! Everything the Hamiltonian assembly needs is collected pointwise into a
//! [`GeometryFrame`]. Preset charts evaluate their derivatives in closed form;
//! custom charts fall back to central finite differences.
//!
//! Conventions: `n = (∂₁r × ∂₂r)/|∂₁r × ∂₂r|`, `α_ab = ∂_a r · ∂_b n`, and
//! the Weingarten map `α^a_b = g^{ac} α_cb` is stored with row index `a`.
//! The orthonormal tangent frame is Gram–Schmidt on `(∂₁r, ∂₂r)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3, Vector3};

use crate::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat2 = Matrix2<f64>;
pub type Mat3 = Matrix3<f64>;

/// Anti-diagonal constant `ε` selecting the off-diagonal Weingarten entries.
pub const EPSILON: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];

/// Charts with `|∂₁r × ∂₂r|` below this are rejected.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Relative finite-difference step for first derivatives of custom charts.
pub const H_GEO: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub min: f64,
    pub max: f64,
    pub periodic: bool,
}

impl Interval {
    pub fn periodic(min: f64, max: f64) -> Self {
        Interval { min, max, periodic: true }
    }

    pub fn bounded(min: f64, max: f64) -> Self {
        Interval { min, max, periodic: false }
    }

    pub fn extent(&self) -> f64 {
        self.max - self.min
    }
}

/// Rectangular parameter domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain(pub [Interval; 2]);

impl Domain {
    pub fn periodic_flags(&self) -> [bool; 2] {
        [self.0[0].periodic, self.0[1].periodic]
    }

    pub fn contains(&self, q: [f64; 2]) -> bool {
        self.0
            .iter()
            .zip(q)
            .all(|(iv, x)| iv.periodic || (x >= iv.min && x <= iv.max))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preset {
    Torus { major: f64, minor: f64 },
    Sphere { radius: f64 },
    Cylinder { radius: f64, length: f64 },
    Plane { lx: f64, ly: f64 },
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivMode {
    Analytic,
    FiniteDifference,
}

type ParamMap = Arc<dyn Fn([f64; 2]) -> Vec3 + Send + Sync>;

/// A regular parametrisation `(q₁, q₂) → ℝ³`.
#[derive(Clone)]
pub struct SurfaceChart {
    preset: Preset,
    name: String,
    domain: Domain,
    map: Option<ParamMap>,
}

impl fmt::Debug for SurfaceChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceChart")
            .field("preset", &self.preset)
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

impl SurfaceChart {
    /// Torus with tube angle `θ = q₁` and azimuth `φ = q₂`:
    /// `r = ((R + r cosθ) cosφ, (R + r cosθ) sinφ, −r sinθ)`.
    ///
    /// The sign of the z component makes `∂_θ r × ∂_φ r` point outward, so the
    /// Weingarten map is `diag(1/r, cosθ/(R + r cosθ))`.
    pub fn torus(major: f64, minor: f64) -> Result<Self> {
        positive("R", major)?;
        positive("r", minor)?;
        if major <= minor {
            return Err(Error::InvalidParameter(format!(
                "torus requires R > r, got R = {major}, r = {minor}"
            )));
        }
        Ok(SurfaceChart {
            preset: Preset::Torus { major, minor },
            name: "torus".into(),
            domain: Domain([Interval::periodic(0.0, TAU), Interval::periodic(0.0, TAU)]),
            map: None,
        })
    }

    /// Sphere in polar coordinates, `θ = q₁ ∈ [0, π]`, `φ = q₂`.
    pub fn sphere(radius: f64) -> Result<Self> {
        positive("a", radius)?;
        Ok(SurfaceChart {
            preset: Preset::Sphere { radius },
            name: "sphere".into(),
            domain: Domain([Interval::bounded(0.0, PI), Interval::periodic(0.0, TAU)]),
            map: None,
        })
    }

    /// Cylinder `(ρ cos q₁, ρ sin q₁, q₂)` with `q₂ ∈ [0, L]`.
    pub fn cylinder(radius: f64, length: f64) -> Result<Self> {
        positive("rho", radius)?;
        positive("L", length)?;
        Ok(SurfaceChart {
            preset: Preset::Cylinder { radius, length },
            name: "cylinder".into(),
            domain: Domain([Interval::periodic(0.0, TAU), Interval::bounded(0.0, length)]),
            map: None,
        })
    }

    /// Flat periodic box `[0, L₁) × [0, L₂)`.
    pub fn plane(lx: f64, ly: f64) -> Result<Self> {
        positive("L1", lx)?;
        positive("L2", ly)?;
        Ok(SurfaceChart {
            preset: Preset::Plane { lx, ly },
            name: "plane".into(),
            domain: Domain([Interval::periodic(0.0, lx), Interval::periodic(0.0, ly)]),
            map: None,
        })
    }

    /// Arbitrary chart; derivatives by finite differences.
    pub fn custom(
        name: impl Into<String>,
        domain: Domain,
        map: impl Fn([f64; 2]) -> Vec3 + Send + Sync + 'static,
    ) -> Self {
        SurfaceChart {
            preset: Preset::Custom,
            name: name.into(),
            domain,
            map: Some(Arc::new(map)),
        }
    }

    /// Periodic graph `z = A sin(2πx/L) sin(2πy/L)`. Its Weingarten map is not
    /// diagonal in the coordinates, so it exercises every curvature term.
    pub fn egg_crate(amplitude: f64, period: f64) -> Result<Self> {
        positive("L", period)?;
        let k = TAU / period;
        Ok(Self::custom(
            "egg_crate",
            Domain([Interval::periodic(0.0, period), Interval::periodic(0.0, period)]),
            move |q| Vec3::new(q[0], q[1], amplitude * (k * q[0]).sin() * (k * q[1]).sin()),
        ))
    }

    /// The torus parametrisation evaluated by finite differences and without
    /// the `R > r` check; `R = r` gives the horn torus, degenerate at `θ = π`.
    pub fn torus_fd(major: f64, minor: f64) -> Result<Self> {
        positive("R", major)?;
        positive("r", minor)?;
        Ok(Self::custom(
            "torus_fd",
            Domain([Interval::periodic(0.0, TAU), Interval::periodic(0.0, TAU)]),
            move |q| {
                let rho = major + minor * q[0].cos();
                Vec3::new(rho * q[1].cos(), rho * q[1].sin(), -minor * q[0].sin())
            },
        ))
    }

    pub fn preset(&self) -> Preset {
        self.preset
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn deriv_mode(&self) -> DerivMode {
        if self.map.is_some() {
            DerivMode::FiniteDifference
        } else {
            DerivMode::Analytic
        }
    }

    pub fn position(&self, q: [f64; 2]) -> Vec3 {
        match &self.map {
            Some(f) => f(q),
            None => self.analytic_partial(q, 0, 0),
        }
    }

    /// Mixed partial `∂₁^i ∂₂^j r`.
    pub fn partial(&self, q: [f64; 2], i: usize, j: usize) -> Vec3 {
        match &self.map {
            Some(f) => fd_partial(f.as_ref(), &self.domain, q, i, j),
            None => self.analytic_partial(q, i, j),
        }
    }

    /// Position and all partial derivatives up to third order.
    pub fn jet(&self, q: [f64; 2]) -> Jet {
        let p = |i, j| self.partial(q, i, j);
        let d = [p(1, 0), p(0, 1)];
        let dd = [[p(2, 0), p(1, 1)], [p(1, 1), p(0, 2)]];
        let t = [p(3, 0), p(2, 1), p(1, 2), p(0, 3)];
        // ddd[a][b][c] depends only on how many indices equal 1
        let mut ddd = [[[Vec3::zeros(); 2]; 2]; 2];
        for (a, plane) in ddd.iter_mut().enumerate() {
            for (b, row) in plane.iter_mut().enumerate() {
                for (c, v) in row.iter_mut().enumerate() {
                    *v = t[a + b + c];
                }
            }
        }
        Jet { r: self.position(q), d, dd, ddd }
    }

    fn analytic_partial(&self, q: [f64; 2], i: usize, j: usize) -> Vec3 {
        match self.preset {
            Preset::Torus { major, minor } => {
                let rho = if i == 0 { major + minor * q[0].cos() } else { minor * dcos(i, q[0]) };
                let z = if j == 0 { -minor * dsin(i, q[0]) } else { 0.0 };
                Vec3::new(rho * dcos(j, q[1]), rho * dsin(j, q[1]), z)
            }
            Preset::Sphere { radius } => {
                let s = radius * dsin(i, q[0]);
                let z = if j == 0 { radius * dcos(i, q[0]) } else { 0.0 };
                Vec3::new(s * dcos(j, q[1]), s * dsin(j, q[1]), z)
            }
            Preset::Cylinder { radius, .. } => {
                let (x, y) = if j == 0 {
                    (radius * dcos(i, q[0]), radius * dsin(i, q[0]))
                } else {
                    (0.0, 0.0)
                };
                let z = match (i, j) {
                    (0, 0) => q[1],
                    (0, 1) => 1.0,
                    _ => 0.0,
                };
                Vec3::new(x, y, z)
            }
            Preset::Plane { .. } => match (i, j) {
                (0, 0) => Vec3::new(q[0], q[1], 0.0),
                (1, 0) => Vec3::new(1.0, 0.0, 0.0),
                (0, 1) => Vec3::new(0.0, 1.0, 0.0),
                _ => Vec3::zeros(),
            },
            Preset::Custom => unreachable!("custom charts carry a parameter map"),
        }
    }
}

/// k-th derivative of cos.
fn dcos(k: usize, x: f64) -> f64 {
    match k % 4 {
        0 => x.cos(),
        1 => -x.sin(),
        2 => -x.cos(),
        _ => x.sin(),
    }
}

/// k-th derivative of sin.
fn dsin(k: usize, x: f64) -> f64 {
    match k % 4 {
        0 => x.sin(),
        1 => x.cos(),
        2 => -x.sin(),
        _ => -x.cos(),
    }
}

/// Central stencil `(offsets, weights)` for the `order`-th derivative and the
/// relative step used with it.
fn stencil(order: usize, total: usize) -> (&'static [i32], &'static [f64], f64) {
    match (order, total) {
        (0, _) => (&[0], &[1.0], 0.0),
        (1, 1) => (&[-1, 1], &[-0.5, 0.5], H_GEO),
        (1, 2) => (&[-2, -1, 1, 2], &[1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0], 1e-3),
        (1, _) => (&[-2, -1, 1, 2], &[1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0], 2e-3),
        (2, 2) => (
            &[-2, -1, 0, 1, 2],
            &[-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0],
            1e-3,
        ),
        (2, _) => (
            &[-2, -1, 0, 1, 2],
            &[-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0],
            2e-3,
        ),
        (3, _) => (
            &[-3, -2, -1, 0, 1, 2, 3],
            &[0.125, -1.0, 1.625, 0.0, -1.625, 1.0, -0.125],
            2e-3,
        ),
        _ => panic!("derivatives above third order are not needed"),
    }
}

fn fd_partial(f: &(dyn Fn([f64; 2]) -> Vec3 + Send + Sync), domain: &Domain, q: [f64; 2], i: usize, j: usize) -> Vec3 {
    let total = i + j;
    if total == 0 {
        return f(q);
    }
    let (o1, w1, s1) = stencil(i, total);
    let (o2, w2, s2) = stencil(j, total);
    let h1 = s1 * domain.0[0].extent();
    let h2 = s2 * domain.0[1].extent();
    let mut acc = Vec3::zeros();
    for (&a, &wa) in o1.iter().zip(w1) {
        for (&b, &wb) in o2.iter().zip(w2) {
            let w = wa * wb;
            if w != 0.0 {
                acc += w * f([q[0] + a as f64 * h1, q[1] + b as f64 * h2]);
            }
        }
    }
    acc / (h1.powi(i as i32) * h2.powi(j as i32))
}

/// Position and partial derivatives of the embedding at one point.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub r: Vec3,
    pub d: [Vec3; 2],
    pub dd: [[Vec3; 2]; 2],
    pub ddd: [[[Vec3; 2]; 2]; 2],
}

/// Normal field and its first two derivatives.
#[derive(Clone, Copy, Debug)]
struct NormalJet {
    n: Vec3,
    dn: [Vec3; 2],
    ddn: [[Vec3; 2]; 2],
    area: f64,
}

fn normal_jet(jet: &Jet, q: [f64; 2]) -> Result<NormalJet> {
    let [d1, d2] = jet.d;
    let big_n = d1.cross(&d2);
    let s = big_n.norm();
    if !(s >= DEGENERACY_TOL) {
        return Err(Error::DegenerateChart { q, norm: s });
    }
    let n = big_n / s;
    let dbig: [Vec3; 2] = std::array::from_fn(|a| jet.dd[a][0].cross(&d2) + d1.cross(&jet.dd[a][1]));
    let ds: [f64; 2] = std::array::from_fn(|a| n.dot(&dbig[a]));
    let dn: [Vec3; 2] = std::array::from_fn(|a| (dbig[a] - n * n.dot(&dbig[a])) / s);
    let ddn: [[Vec3; 2]; 2] = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let u = dbig[b];
            let du = jet.ddd[a][b][0].cross(&d2)
                + jet.dd[b][0].cross(&jet.dd[a][1])
                + jet.dd[a][0].cross(&jet.dd[b][1])
                + d1.cross(&jet.ddd[a][b][1]);
            let nu = n.dot(&u);
            let num = du - dn[a] * nu - n * (dn[a].dot(&u) + n.dot(&du));
            num / s - (u - n * nu) * (ds[a] / (s * s))
        })
    });
    Ok(NormalJet { n, dn, ddn, area: s })
}

/// Gram–Schmidt frame `(T₁, T₂, n)` of the shifted tangents `∂_a R` and the
/// rotation rates `ω_A[(i, j)] = ∂_A T_i · T_j` for `A = 1, 2, 3`.
fn tube_rotation(jet: &Jet, nj: &NormalJet, q3: f64, twist: f64) -> ([Vec3; 3], [Mat3; 3]) {
    let e: [Vec3; 2] = std::array::from_fn(|b| jet.d[b] + nj.dn[b] * q3);
    // derivative directions: A = 0, 1 tangential, A = 2 normal
    let de: [[Vec3; 2]; 3] = [
        std::array::from_fn(|b| jet.dd[0][b] + nj.ddn[0][b] * q3),
        std::array::from_fn(|b| jet.dd[1][b] + nj.ddn[1][b] * q3),
        std::array::from_fn(|b| nj.dn[b]),
    ];
    let dn: [Vec3; 3] = [nj.dn[0], nj.dn[1], Vec3::zeros()];

    let l1 = e[0].norm();
    let t1 = e[0] / l1;
    let proj = e[1].dot(&t1);
    let u2 = e[1] - t1 * proj;
    let l2 = u2.norm();
    let t2 = u2 / l2;

    let (c, s) = (twist.cos(), twist.sin());
    let frame = [c * t1 + s * t2, -s * t1 + c * t2, nj.n];

    let mut rates = [Mat3::zeros(); 3];
    for (axis, rate) in rates.iter_mut().enumerate() {
        let de1 = de[axis][0];
        let de2 = de[axis][1];
        let dt1 = (de1 - t1 * t1.dot(&de1)) / l1;
        let du2 = de2 - t1 * (de2.dot(&t1) + e[1].dot(&dt1)) - dt1 * proj;
        let dt2 = (du2 - t2 * t2.dot(&du2)) / l2;
        let dframe = [c * dt1 + s * dt2, -s * dt1 + c * dt2, dn[axis]];
        for i in 0..3 {
            for j in 0..3 {
                rate[(i, j)] = dframe[i].dot(&frame[j]);
            }
        }
        // enforce exact antisymmetry of the rotation generator
        *rate = (*rate - rate.transpose()) * 0.5;
    }
    (frame, rates)
}

/// Pointwise geometric payload consumed by the Hamiltonian assembly.
#[derive(Clone, Copy, Debug)]
pub struct GeometryFrame {
    pub q: [f64; 2],
    pub position: Vec3,
    /// `∂_a r`.
    pub tangents: [Vec3; 2],
    pub normal: Vec3,
    /// Orthonormal frame vectors `t_1, t_2` in ℝ³.
    pub frame: [Vec3; 2],
    pub g: Mat2,
    pub g_inv: Mat2,
    pub sqrt_g: f64,
    /// `α_ab = ∂_a r · ∂_b n`.
    pub alpha_low: Mat2,
    /// `α^a_b = g^{ac} α_cb`, row index `a`.
    pub alpha_mixed: Mat2,
    /// `e_a^i`; the normal column `i = 3` vanishes on the surface.
    pub zweibein: [[f64; 3]; 2],
    /// `e^a_i`, stored as `[a][i]`.
    pub inv_zweibein: [[f64; 2]; 2],
    /// `Ω_a` as coefficients of `iΣ₃/2`.
    pub omega: [f64; 2],
    /// Full tangential rotation rates `ω_a[(i, j)]` at `q₃ = 0`.
    pub rotation: [Mat3; 2],
    /// Normal rotation rate `ω_3` at `q₃ = 0` (generator of `Γ₃`).
    pub gamma3_conn: Mat3,
    /// `∂₃ ω_a` at `q₃ = 0`.
    pub d3_rotation: [Mat3; 2],
    /// `∂₃ ω_3` at `q₃ = 0`.
    pub d3_gamma3: Mat3,
    /// `(Tr α, det α)` of the Weingarten map.
    pub f_coeffs: (f64, f64),
}

impl GeometryFrame {
    /// Principal curvatures, ascending.
    pub fn principal_curvatures(&self) -> [f64; 2] {
        let (t, d) = self.f_coeffs;
        let disc = (0.25 * t * t - d).max(0.0).sqrt();
        [0.5 * t - disc, 0.5 * t + disc]
    }

    /// `|ε^a_b| α^a_b α^b_a / 2`, summed. Off-diagonal Weingarten entries at
    /// roundoff level relative to `‖α‖` count as zero.
    pub fn geometric_potential(&self) -> f64 {
        let a = &self.alpha_mixed;
        let floor = 64.0 * f64::EPSILON * a.norm();
        let clean = |v: f64| if v.abs() <= floor { 0.0 } else { v };
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                acc += EPSILON[i][j].abs() * clean(a[(i, j)]) * clean(a[(j, i)]);
            }
        }
        0.5 * acc
    }
}

/// Geometry at `q` in the Gram–Schmidt frame.
pub fn frame_at(chart: &SurfaceChart, q: [f64; 2]) -> Result<GeometryFrame> {
    frame_at_rotated(chart, q, 0.0)
}

/// Geometry with the tangent frame rotated by a constant angle.
pub fn frame_at_rotated(chart: &SurfaceChart, q: [f64; 2], twist: f64) -> Result<GeometryFrame> {
    let jet = chart.jet(q);
    let nj = normal_jet(&jet, q)?;
    let d = jet.d;
    let g = Mat2::new(d[0].dot(&d[0]), d[0].dot(&d[1]), d[1].dot(&d[0]), d[1].dot(&d[1]));
    let g_inv = g
        .try_inverse()
        .ok_or(Error::DegenerateChart { q, norm: nj.area })?;
    let alpha_low = Mat2::from_fn(|a, b| d[a].dot(&nj.dn[b]));
    let alpha_mixed = g_inv * alpha_low;

    let (frame, rates) = tube_rotation(&jet, &nj, 0.0, twist);
    let zweibein: [[f64; 3]; 2] =
        std::array::from_fn(|a| [d[a].dot(&frame[0]), d[a].dot(&frame[1]), 0.0]);
    let e = Mat2::new(zweibein[0][0], zweibein[0][1], zweibein[1][0], zweibein[1][1]);
    let e_inv = e
        .try_inverse()
        .ok_or(Error::DegenerateChart { q, norm: nj.area })?;
    // e^a_i is the inverse of e_a^i: Σ_i e_a^i e^b_i = δ_a^b
    let inv_zweibein: [[f64; 2]; 2] = std::array::from_fn(|a| [e_inv[(0, a)], e_inv[(1, a)]]);

    let scale = 1.0 + alpha_mixed.norm();
    let delta = 1e-3 / scale;
    let rate_at = |q3: f64| tube_rotation(&jet, &nj, q3, twist).1;
    let central = |h: f64| {
        let (p, m) = (rate_at(h), rate_at(-h));
        [0, 1, 2].map(|k| (p[k] - m[k]) / (2.0 * h))
    };
    let (c1, c2) = (central(delta), central(0.5 * delta));
    let d3: [Mat3; 3] = std::array::from_fn(|k| (c2[k] * 4.0 - c1[k]) / 3.0);

    Ok(GeometryFrame {
        q,
        position: jet.r,
        tangents: d,
        normal: nj.n,
        frame: [frame[0], frame[1]],
        g,
        g_inv,
        sqrt_g: g.determinant().sqrt(),
        alpha_low,
        alpha_mixed,
        zweibein,
        inv_zweibein,
        omega: [-rates[0][(0, 1)], -rates[1][(0, 1)]],
        rotation: [rates[0], rates[1]],
        gamma3_conn: rates[2],
        d3_rotation: [d3[0], d3[1]],
        d3_gamma3: d3[2],
        f_coeffs: (alpha_mixed.trace(), alpha_mixed.determinant()),
    })
}

/// `G_AB` of the normal neighbourhood by differentiating `R = r + q₃ n` directly.
pub fn embedded_metric_direct(chart: &SurfaceChart, q: [f64; 2], q3: f64) -> Result<Mat3> {
    let jet = chart.jet(q);
    let nj = normal_jet(&jet, q)?;
    let e: [Vec3; 3] = [jet.d[0] + nj.dn[0] * q3, jet.d[1] + nj.dn[1] * q3, nj.n];
    let f = e[0].cross(&e[1]).dot(&nj.n) / nj.area;
    if !(f > 0.0) {
        return Err(Error::OutsideTube { q, q3, f });
    }
    Ok(Mat3::from_fn(|a, b| e[a].dot(&e[b])))
}

/// `G_ab = g + q₃(gα + (gα)ᵀ) + q₃² αᵀgα` with `α` the Weingarten map,
/// padded with `G₃₃ = 1`.
pub fn expansion_metric(frame: &GeometryFrame, q3: f64) -> Mat3 {
    let g = frame.g;
    let w = frame.alpha_mixed;
    let gw = g * w;
    let tangential = g + (gw + gw.transpose()) * q3 + w.transpose() * g * w * (q3 * q3);
    let mut out = Mat3::zeros();
    out.fixed_view_mut::<2, 2>(0, 0).copy_from(&tangential);
    out[(2, 2)] = 1.0;
    out
}

/// `f = 1 + Tr(α) q₃ + det(α) q₃²`, so that `√G = f √g`.
pub fn rescale_factor(frame: &GeometryFrame, q3: f64) -> f64 {
    let (t, d) = frame.f_coeffs;
    1.0 + t * q3 + d * q3 * q3
}

/// Spin-connection data at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinConnection {
    /// `Ω_a` as coefficients of `iΣ₃/2`.
    pub omega: [f64; 2],
    /// Rotation rate generating `Γ₃`.
    pub gamma3: Mat3,
}

pub fn spin_connection_at(chart: &SurfaceChart, q: [f64; 2]) -> Result<SpinConnection> {
    let f = frame_at(chart, q)?;
    Ok(SpinConnection { omega: f.omega, gamma3: f.gamma3_conn })
}
