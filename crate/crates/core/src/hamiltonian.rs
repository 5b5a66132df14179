//! Surface effective Hamiltonian and confinement corrections.
//!
//! With `X` the sum of the inner surface terms,
//!
//! ```text
//! H_s = βm + (β/2m) X,
//! X   = [γ̄^a(∂_a + Ω_a)]²                       kinetic
//!     − γ³ α^a_b γ̄^b ∂_a                         curvature-deformed spin-orbit
//!     + γ³ α^a_b γ̄^b (Ω_a + E_a) + γ³ γ̄^a ∂₃Γ_a   Zeeman-like
//!     + ∂₃Γ₃                                      normal connection
//!     + α^1_2 α^2_1                               geometric potential
//! ```
//!
//! where `E_a = ½ Σ_{b≠a} α^b_a γ̄_b γ³`. Every term of `X` is even in the
//! Clifford grading, so `H_s` is block diagonal and its two blocks are
//! opposite once `βm` is removed. The assembled operator is the
//! `√g`-weighted symmetrisation `(T + T‡)/2` of the raw sum `T`; the
//! pointwise Zeeman-like matrices are anti-Hermitian and drop out of it.

use std::fmt;
use std::str::FromStr;

use crate::clifford::{beta, gamma, lowered_gamma, omega_matrix, reduced_gamma, sigma, spin_generator, SpinorMatrix};
use crate::geometry::{GeometryFrame, SurfaceChart};
use crate::grid::Grid2D;
use crate::spectral::{
    beta_left, central_dirac, coefficient_derivative, kinetic_operator, pointwise, DiracFields, GridOperator,
};
use crate::sparse::CsrMatrix;
use crate::{Error, Result, C64};

/// The three transverse confinements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConfinementKind {
    /// `V = mω|q₃|`.
    Linear { omega: f64 },
    /// `V = mω q₃²`.
    Harmonic { omega: f64 },
    /// Infinitely deep well of width `L`.
    SquareWell { width: f64 },
}

/// Case label as it appears in configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseLabel {
    Linear,
    Harmonic,
    SquareWell,
}

impl FromStr for CaseLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" | "linear" => Ok(CaseLabel::Linear),
            "b" | "harmonic" => Ok(CaseLabel::Harmonic),
            "c" | "square_well" | "square-well" | "well" => Ok(CaseLabel::SquareWell),
            _ => Err(Error::UnknownCase(s.to_string())),
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::Linear => "linear",
            CaseLabel::Harmonic => "harmonic",
            CaseLabel::SquareWell => "square_well",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfinementCase {
    pub kind: ConfinementKind,
    pub m: f64,
}

impl ConfinementCase {
    pub fn new(kind: ConfinementKind, m: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {m}")));
        }
        let p = match kind {
            ConfinementKind::Linear { omega } | ConfinementKind::Harmonic { omega } => omega,
            ConfinementKind::SquareWell { width } => width,
        };
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("confinement parameter must be positive, got {p}")));
        }
        Ok(ConfinementCase { kind, m })
    }

    /// Builds a case from its label; `omega` feeds (a)/(b), `width` feeds (c).
    pub fn from_label(label: CaseLabel, omega: f64, width: f64, m: f64) -> Result<Self> {
        let kind = match label {
            CaseLabel::Linear => ConfinementKind::Linear { omega },
            CaseLabel::Harmonic => ConfinementKind::Harmonic { omega },
            CaseLabel::SquareWell => ConfinementKind::SquareWell { width },
        };
        Self::new(kind, m)
    }

    pub fn label(&self) -> CaseLabel {
        match self.kind {
            ConfinementKind::Linear { .. } => CaseLabel::Linear,
            ConfinementKind::Harmonic { .. } => CaseLabel::Harmonic,
            ConfinementKind::SquareWell { .. } => CaseLabel::SquareWell,
        }
    }
}

/// The individual contributions to `H_s`, each already multiplied by its
/// prefactor (`βm` or `β/2m`) and left unsymmetrised.
#[derive(Clone, Debug)]
pub struct HamiltonianTerms {
    pub m: f64,
    pub mass: GridOperator,
    pub kinetic: GridOperator,
    pub soc: GridOperator,
    pub zeeman_like: GridOperator,
    pub normal_conn: GridOperator,
    pub geom_pot: GridOperator,
    /// Dirac coefficient fields shared by the kinetic and confinement terms.
    pub fields: DiracFields,
    /// Largest `|α^1_2 α^2_1|` over the grid.
    pub geom_pot_max: f64,
}

impl HamiltonianTerms {
    pub fn raw_total(&self) -> GridOperator {
        self.mass
            .add(&self.kinetic)
            .add(&self.soc)
            .add(&self.zeeman_like)
            .add(&self.normal_conn)
            .add(&self.geom_pot)
    }

    /// Relative `√g`-weighted asymmetry of the unsymmetrised total.
    pub fn asymmetry(&self) -> f64 {
        self.raw_total().hermiticity_residual()
    }

    pub fn weights(&self) -> &[f64] {
        &self.mass.weights
    }

    pub fn grid(&self) -> &Grid2D {
        &self.mass.grid
    }
}

/// Pointwise coefficient fields feeding the surface terms.
struct SurfaceFields {
    weights: Vec<f64>,
    dirac: DiracFields,
    /// Coefficient of `∂_a` in the spin-orbit term.
    soc: Vec<[SpinorMatrix; 2]>,
    zeeman: Vec<SpinorMatrix>,
    normal_conn: Vec<SpinorMatrix>,
    geom_pot: Vec<f64>,
}

fn general_fields(frames: &[GeometryFrame]) -> SurfaceFields {
    let g3 = gamma(3);
    let mut out = SurfaceFields {
        weights: Vec::with_capacity(frames.len()),
        dirac: DiracFields { gammas: Vec::new(), connection: Vec::new() },
        soc: Vec::new(),
        zeeman: Vec::new(),
        normal_conn: Vec::new(),
        geom_pot: Vec::new(),
    };
    for f in frames {
        let al = &f.alpha_mixed;
        let up = [reduced_gamma(f, 0), reduced_gamma(f, 1)];
        let down = [lowered_gamma(f, 0), lowered_gamma(f, 1)];
        let omega = [omega_matrix(f.omega[0]), omega_matrix(f.omega[1])];
        // α^a_b γ̄^b for each a
        let curved: [SpinorMatrix; 2] = std::array::from_fn(|a| al[(a, 0)] * up[0] + al[(a, 1)] * up[1]);
        let eps: [SpinorMatrix; 2] = std::array::from_fn(|a| {
            let b = 1 - a;
            (0.5 * al[(b, a)]) * (down[b] * g3)
        });
        let mut zeeman = SpinorMatrix::zero();
        for a in 0..2 {
            zeeman += g3 * curved[a] * (omega[a] + eps[a]);
            zeeman += g3 * up[a] * spin_generator(&f.d3_rotation[a]);
        }
        out.weights.push(f.sqrt_g);
        out.dirac.gammas.push(up);
        out.dirac.connection.push(omega);
        out.soc.push(std::array::from_fn(|a| -(g3 * curved[a])));
        out.zeeman.push(zeeman);
        out.normal_conn.push(spin_generator(&f.d3_gamma3));
        out.geom_pot.push(f.geometric_potential());
    }
    out
}

fn assemble_from_fields(grid: &Grid2D, fields: SurfaceFields, m: f64) -> (GridOperator, HamiltonianTerms) {
    let w = fields.weights;
    let inner = |matrix: CsrMatrix| GridOperator::new(beta_left(&matrix).scale(C64::new(0.5 / m, 0.0)), w.clone(), grid.clone());
    let b = beta();
    let mass = GridOperator::new(pointwise(grid, |_| m * b), w.clone(), grid.clone());
    let kinetic = inner(kinetic_operator(grid, &fields.dirac, &w));
    let mut soc = CsrMatrix::zeros(4 * grid.len(), 4 * grid.len());
    for axis in 0..2 {
        soc = soc.add(&coefficient_derivative(grid, axis, grid.order.central(), |p| fields.soc[p][axis]));
    }
    let soc = inner(soc);
    let zeeman_like = inner(pointwise(grid, |p| fields.zeeman[p]));
    let normal_conn = inner(pointwise(grid, |p| fields.normal_conn[p]));
    let geom_pot = inner(pointwise(grid, |p| fields.geom_pot[p] * SpinorMatrix::identity()));
    let geom_pot_max = fields.geom_pot.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let terms = HamiltonianTerms {
        m,
        mass,
        kinetic,
        soc,
        zeeman_like,
        normal_conn,
        geom_pot,
        fields: fields.dirac,
        geom_pot_max,
    };
    (terms.raw_total().symmetrized(), terms)
}

fn check_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mass must be positive, got {m}")))
    }
}

/// Assembles the symmetrised surface Hamiltonian on `grid`.
pub fn assemble_hs(chart: &SurfaceChart, grid: &Grid2D, m: f64) -> Result<(GridOperator, HamiltonianTerms)> {
    check_mass(m)?;
    let chart_flags = chart.domain().periodic_flags();
    if grid.periodic != chart_flags {
        return Err(Error::NonPeriodicMismatch { grid: grid.periodic, chart: chart_flags });
    }
    let frames = grid.frames(chart)?;
    Ok(assemble_from_fields(grid, general_fields(&frames), m))
}

/// The torus Hamiltonian written directly from its closed-form coefficients:
/// `γ̄^θ = γ¹/r`, `γ̄^φ = γ²/ρ`, `Ω_φ = sinθ`, spin-orbit coefficients
/// `(1/r, cosθ/ρ)`, the Zeeman-like term `−i(cosθ/ρ)(sinθ/2)Σ^φ` and no
/// geometric potential, with `ρ = R + r cosθ`.
pub fn torus_hs_closed_form(major: f64, minor: f64, grid: &Grid2D, m: f64) -> Result<GridOperator> {
    check_mass(m)?;
    if !(major > minor && minor > 0.0) {
        return Err(Error::InvalidParameter(format!("torus requires R > r > 0, got R = {major}, r = {minor}")));
    }
    if grid.periodic != [true, true] {
        return Err(Error::NonPeriodicMismatch { grid: grid.periodic, chart: [true, true] });
    }
    let (g1, g2, g3) = (gamma(1), gamma(2), gamma(3));
    let n = grid.len();
    let mut fields = SurfaceFields {
        weights: Vec::with_capacity(n),
        dirac: DiracFields { gammas: Vec::with_capacity(n), connection: Vec::with_capacity(n) },
        soc: Vec::with_capacity(n),
        zeeman: Vec::with_capacity(n),
        normal_conn: vec![SpinorMatrix::zero(); n],
        geom_pot: vec![0.0; n],
    };
    for p in 0..n {
        let theta = grid.coords(p)[0];
        let (s, c) = theta.sin_cos();
        let rho = major + minor * c;
        let gt = (1.0 / minor) * g1;
        let gp = (1.0 / rho) * g2;
        fields.weights.push(minor * rho);
        fields.dirac.gammas.push([gt, gp]);
        fields.dirac.connection.push([SpinorMatrix::zero(), omega_matrix(s)]);
        fields.soc.push([-((1.0 / minor) * (g3 * gt)), -((c / rho) * (g3 * gp))]);
        fields.zeeman.push(sigma(2).scale(C64::new(0.0, -c * s / (2.0 * rho))));
    }
    Ok(assemble_from_fields(grid, fields, m).0)
}

/// Confinement correction added to `H_s` for the given case.
///
/// (a) `−(β/4m) ω γ³ γ̄^a(∂_a + Ω_a)`, (b) the constant `−(β/4m) ω`,
/// (c) zero.
pub fn assemble_hpp(case: &ConfinementCase, base: &HamiltonianTerms) -> GridOperator {
    let grid = base.grid();
    let w = base.weights().to_vec();
    let m = case.m;
    let dim = 4 * grid.len();
    let matrix = match case.kind {
        ConfinementKind::Linear { omega } => {
            let d = central_dirac(grid, &base.fields, &w);
            let g3 = gamma(3);
            let g3d = pointwise(grid, |_| g3).matmul(&d);
            let op = GridOperator::new(beta_left(&g3d).scale(C64::new(-omega / (4.0 * m), 0.0)), w.clone(), grid.clone());
            op.symmetrized().matrix
        }
        ConfinementKind::Harmonic { omega } => {
            let b = beta();
            pointwise(grid, |_| (-omega / (4.0 * m)) * b)
        }
        ConfinementKind::SquareWell { .. } => CsrMatrix::zeros(dim, dim),
    };
    GridOperator::new(matrix, w, grid.clone())
}

/// `H_s + H″` for a confinement case.
pub fn effective_hamiltonian(hs: &GridOperator, case: &ConfinementCase, base: &HamiltonianTerms) -> GridOperator {
    hs.add(&assemble_hpp(case, base))
}
