//! Browser bindings: torus geometry profile, the low-lying spectrum with its
//! gap scan, and FW odd-residual histories. Every export returns JSON.

use serde::Serialize;
use spinsurf::fw::{fw_sequence, surface_dirac_hamiltonian};
use spinsurf::geometry::{frame_at, SurfaceChart};
use spinsurf::grid::{Grid2D, StencilOrder};
use spinsurf::hamiltonian::assemble_hs;
use spinsurf::spectral::{eigensolve, gap_scan, Block, SolveOptions};
use wasm_bindgen::prelude::*;

/// Largest grid side for the in-browser eigensolve.
pub const MAX_SPECTRUM_NODES: usize = 24;
/// Largest grid side for the full-matrix FW sequence.
pub const MAX_FW_NODES: usize = 8;

#[derive(Serialize)]
struct ProfilePoint {
    theta: f64,
    zeeman_coeff: f64,
    spin_conn_coeff: f64,
    kappa: [f64; 2],
    geom_pot: f64,
}

#[derive(Serialize)]
struct GapPoint {
    theta: f64,
    zeeman_coeff: f64,
    spin_conn_coeff: f64,
    doublet_splitting: f64,
}

#[derive(Serialize)]
struct Spectrum {
    positive: Vec<f64>,
    negative: Vec<f64>,
    gap: Vec<GapPoint>,
    hermiticity_residual: f64,
    solver: &'static str,
}

#[derive(Serialize)]
struct FwRun {
    m: f64,
    odd_scale: f64,
    residuals: Vec<f64>,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn torus_grid(major: f64, minor: f64, n: usize, max: usize) -> Result<(SurfaceChart, Grid2D), String> {
    if n > max {
        return Err(format!("grid side {n} exceeds the demo limit {max}"));
    }
    let chart = SurfaceChart::torus(major, minor).map_err(|e| e.to_string())?;
    let grid = Grid2D::for_chart(&chart, [n, n], StencilOrder::Second).map_err(|e| e.to_string())?;
    Ok((chart, grid))
}

pub fn profile_json(major: f64, minor: f64, samples: usize) -> Result<String, String> {
    let chart = SurfaceChart::torus(major, minor).map_err(|e| e.to_string())?;
    let pts = (0..samples.max(2))
        .map(|i| {
            let theta = std::f64::consts::TAU * i as f64 / samples.max(2) as f64;
            let f = frame_at(&chart, [theta, 0.0]).map_err(|e| e.to_string())?;
            Ok(ProfilePoint {
                theta,
                zeeman_coeff: f.alpha_mixed[(1, 1)],
                spin_conn_coeff: f.omega[1],
                kappa: f.principal_curvatures(),
                geom_pot: f.geometric_potential(),
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    to_json(&pts)
}

pub fn spectrum_json(major: f64, minor: f64, m: f64, n: usize, k: usize) -> Result<String, String> {
    let (chart, grid) = torus_grid(major, minor, n, MAX_SPECTRUM_NODES)?;
    let (hs, terms) = assemble_hs(&chart, &grid, m).map_err(|e| e.to_string())?;
    let res = eigensolve(&hs, &SolveOptions { k: k.max(2), ..SolveOptions::default() }).map_err(|e| e.to_string())?;
    let gap = gap_scan(&res, &chart, &grid, &terms.zeeman_like)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|r| GapPoint {
            theta: r.theta,
            zeeman_coeff: r.zeeman_coeff,
            spin_conn_coeff: r.spin_conn_coeff,
            doublet_splitting: r.doublet_splitting,
        })
        .collect();
    to_json(&Spectrum {
        positive: res.block_values(Block::Positive),
        negative: res.block_values(Block::Negative),
        gap,
        hermiticity_residual: res.diagnostics.hermiticity_residual,
        solver: res.diagnostics.solver,
    })
}

pub fn fw_json(major: f64, minor: f64, n: usize, masses: &[f64], v0: f64) -> Result<String, String> {
    let (chart, grid) = torus_grid(major, minor, n, MAX_FW_NODES)?;
    let runs = masses
        .iter()
        .map(|&m| {
            let h = surface_dirac_hamiltonian(&chart, &grid, m, v0).map_err(|e| e.to_string())?;
            let (_, residuals, _) = fw_sequence(&h, 3).map_err(|e| e.to_string())?;
            Ok(FwRun { m, odd_scale: h.odd_scale(), residuals })
        })
        .collect::<Result<Vec<_>, String>>()?;
    to_json(&runs)
}

/// Zeeman-like coefficient, spin connection and curvatures around the tube.
#[wasm_bindgen]
pub fn torus_profile(major: f64, minor: f64, samples: usize) -> Result<String, JsValue> {
    profile_json(major, minor, samples).map_err(|e| JsValue::from_str(&e))
}

/// Lowest `k` levels per β block of `H_s` on an `n × n` torus grid.
#[wasm_bindgen]
pub fn torus_spectrum(major: f64, minor: f64, m: f64, n: usize, k: usize) -> Result<String, JsValue> {
    spectrum_json(major, minor, m, n, k).map_err(|e| JsValue::from_str(&e))
}

/// Odd residual after 0 to 3 FW steps for each mass.
#[wasm_bindgen]
pub fn fw_residuals(major: f64, minor: f64, n: usize, masses: Vec<f64>, v0: f64) -> Result<String, JsValue> {
    fw_json(major, minor, n, &masses, v0).map_err(|e| JsValue::from_str(&e))
}
