use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use spinsurf::fw::{free_dirac_mode, fw_sequence, loglog_slope, surface_dirac_hamiltonian, BlockOperator};
use spinsurf::geometry::{embedded_metric_direct, expansion_metric, frame_at, SurfaceChart};
use spinsurf::hamiltonian::{assemble_hpp, assemble_hs, effective_hamiltonian, CaseLabel};
use spinsurf::normal::{assemble_hn, NormalGrid};
use spinsurf::spectral::{eigensolve, gap_scan, Block, Diagnostics, SpectrumResult};

use crate::config::RunConfig;
use crate::output::{num, write_json, Csv};
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest node count for full-matrix FW studies.
pub const FW_MAX_NODES: usize = 256;

pub struct Report {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    /// Set when a built-in assertion failed after the outputs were written.
    pub failure: Option<String>,
}

fn summary(command: &str, cfg: &RunConfig, body: Value) -> Result<Value, CliError> {
    let mut v = json!({
        "command": command,
        "version": VERSION,
        "config": serde_json::to_value(cfg).map_err(|e| CliError::Io(std::io::Error::other(e)))?,
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, body) {
        dst.extend(src);
    }
    Ok(v)
}

fn diagnostics_json(d: &Diagnostics) -> Value {
    json!({
        "hermiticity_residual": d.hermiticity_residual,
        "odd_residual": d.odd_residual,
        "operator_norm": d.operator_norm,
        "grid": d.grid,
        "stencil_order": d.stencil_order,
        "iterations": d.iterations,
        "solver": d.solver,
    })
}

fn finish(cfg: &RunConfig, csv: (&Csv, &str), json_name: &str, body: Value, command: &str) -> Result<Vec<PathBuf>, CliError> {
    let dir = cfg.out_dir();
    let mut files = vec![csv.0.write(&dir, csv.1)?];
    if cfg.output.json {
        files.push(write_json(&dir, json_name, &summary(command, cfg, body)?)?);
    }
    Ok(files)
}

fn sample_point(chart: &SurfaceChart, rng: &mut ChaCha8Rng) -> [f64; 2] {
    let d = chart.domain();
    std::array::from_fn(|a| {
        let iv = d.0[a];
        let pad = if iv.periodic { 0.0 } else { 0.02 * iv.extent() };
        rng.random_range(iv.min + pad..iv.max - pad)
    })
}

pub fn geometry(cfg: &RunConfig) -> Result<Report, CliError> {
    let chart = cfg.chart()?;
    let grid = cfg.grid_for(&chart)?;
    let frames = grid.frames(&chart)?;
    let mut csv = Csv::new(&[
        "q1", "q2", "g11", "g12", "g22", "alpha1", "alpha2", "omega1", "omega2", "f_trace", "f_det", "geom_pot",
    ]);
    for f in &frames {
        let k = f.principal_curvatures();
        csv.row(&[
            num(f.q[0]),
            num(f.q[1]),
            num(f.g[(0, 0)]),
            num(f.g[(0, 1)]),
            num(f.g[(1, 1)]),
            num(k[0]),
            num(k[1]),
            num(f.omega[0]),
            num(f.omega[1]),
            num(f.f_coeffs.0),
            num(f.f_coeffs.1),
            num(f.geometric_potential()),
        ]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    let mut worst_at = [0.0, 0.0, 0.0];
    for _ in 0..cfg.geometry.samples {
        let q = sample_point(&chart, &mut rng);
        let f = frame_at(&chart, q)?;
        let kmax = f.principal_curvatures().iter().fold(0.0f64, |a, k| a.max(k.abs()));
        let reach = if kmax > 0.0 { 1.0 / kmax } else { 1.0 };
        let q3 = cfg.geometry.q3_fraction * reach * rng.random_range(-1.0..1.0);
        let direct = embedded_metric_direct(&chart, q, q3)?;
        let dev = (direct - expansion_metric(&f, q3)).norm() / f.g.norm();
        if dev > worst {
            worst = dev;
            worst_at = [q[0], q[1], q3];
        }
    }
    let pass = worst <= cfg.geometry.identity_tol;
    let body = json!({
        "chart": chart.name(),
        "nodes": frames.len(),
        "metric_identity": {
            "samples": cfg.geometry.samples,
            "max_relative_deviation": worst,
            "worst_point": worst_at,
            "tolerance": cfg.geometry.identity_tol,
            "pass": pass,
        },
    });
    let files = finish(cfg, (&csv, "geometry.csv"), "geometry.json", body, "geometry")?;
    let failure = (!pass).then(|| format!("metric expansion identity deviates by {worst:e}"));
    Ok(Report { files, warnings: vec![], failure })
}

fn solve_case(cfg: &RunConfig, label: CaseLabel, k: usize) -> Result<(SurfaceChart, spinsurf::grid::Grid2D, SpectrumResult, spinsurf::hamiltonian::HamiltonianTerms), CliError> {
    let chart = cfg.chart()?;
    let grid = cfg.grid_for(&chart)?;
    let (hs, terms) = assemble_hs(&chart, &grid, cfg.physics.m)?;
    let case = cfg.confinement(label, cfg.physics.m)?;
    let heff = effective_hamiltonian(&hs, &case, &terms);
    let result = eigensolve(&heff, &cfg.solve_options(k)?).map_err(CliError::solver)?;
    Ok((chart, grid, result, terms))
}

pub fn spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let (chart, _, result, _) = solve_case(cfg, cfg.case_label()?, cfg.solve.k)?;
    let mut csv = Csv::new(&["index", "block", "eigenvalue", "residual"]);
    for (i, p) in result.pairs.iter().enumerate() {
        csv.row(&[i.to_string(), p.block.label().into(), num(p.value), num(p.residual)]);
    }
    let body = json!({
        "chart": chart.name(),
        "case": cfg.case_label()?.to_string(),
        "eigenpairs": result.pairs.len(),
        "diagnostics": diagnostics_json(&result.diagnostics),
    });
    let files = finish(cfg, (&csv, "spectrum.csv"), "spectrum.json", body, "spectrum")?;
    Ok(Report { files, warnings: vec![], failure: None })
}

pub fn gap_scan_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let chart = cfg.chart()?;
    if !matches!(cfg.surface.preset.as_str(), "torus" | "sphere") {
        return Err(CliError::Config(format!("surface.preset: gap-scan needs a torus or sphere, got `{}`", chart.name())));
    }
    let (chart, grid, result, terms) = solve_case(cfg, cfg.case_label()?, cfg.solve.k.max(2))?;
    let rows = gap_scan(&result, &chart, &grid, &terms.zeeman_like)?;
    let mut csv = Csv::new(&["theta", "zeeman_coeff", "spin_conn_coeff", "doublet_splitting"]);
    for r in &rows {
        csv.row(&[num(r.theta), num(r.zeeman_coeff), num(r.spin_conn_coeff), num(r.doublet_splitting)]);
    }
    let pos = result.block_values(Block::Positive);
    let min = rows.iter().map(|r| r.doublet_splitting).fold(f64::INFINITY, f64::min);
    let minima: Vec<f64> = rows.iter().filter(|r| r.doublet_splitting <= min + 1e-12).map(|r| r.theta).collect();
    let body = json!({
        "chart": chart.name(),
        "rows": rows.len(),
        "global_doublet_gap": pos[1] - pos[0],
        "min_doublet_splitting": min,
        "minima_theta": minima,
        "max_geom_pot": rows.iter().fold(0.0f64, |a, r| a.max(r.geom_pot.abs())),
        "diagnostics": diagnostics_json(&result.diagnostics),
    });
    let files = finish(cfg, (&csv, "gap_scan.csv"), "gap_scan.json", body, "gap-scan")?;
    Ok(Report { files, warnings: vec![], failure: None })
}

fn fw_input(cfg: &RunConfig, chart: &SurfaceChart, grid: &spinsurf::grid::Grid2D, m: f64) -> Result<BlockOperator, CliError> {
    match cfg.fw.input.as_str() {
        "free_mode" => Ok(free_dirac_mode(m, cfg.fw.momentum)?),
        _ => Ok(surface_dirac_hamiltonian(chart, grid, m, cfg.fw.v0)?),
    }
}

pub fn fw_verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let chart = cfg.chart()?;
    let grid = cfg.fw_grid_for(&chart)?;
    if cfg.fw.input == "surface" && grid.len() > FW_MAX_NODES {
        return Err(CliError::Config(format!(
            "fw: full-matrix FW studies allow at most {FW_MAX_NODES} nodes, got {}",
            grid.len()
        )));
    }
    let steps = cfg.fw.steps;
    let histories: Vec<Result<(Vec<f64>, f64), CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = cfg
            .fw
            .masses
            .iter()
            .map(|&m| {
                let (chart, grid) = (&chart, &grid);
                s.spawn(move || -> Result<(Vec<f64>, f64), CliError> {
                    let h = fw_input(cfg, chart, grid, m)?;
                    let (_, history, _) = fw_sequence(&h, steps).map_err(CliError::solver)?;
                    Ok((history, h.odd_scale()))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("FW worker panicked")).collect()
    });
    let histories = histories.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut csv = Csv::new(&["m", "steps", "odd_residual"]);
    let mut warnings = Vec::new();
    let mut odd_scale = 0.0f64;
    for (&m, (history, scale)) in cfg.fw.masses.iter().zip(&histories) {
        for (s, r) in history.iter().enumerate() {
            csv.row(&[num(m), s.to_string(), num(*r)]);
        }
        odd_scale = odd_scale.max(*scale);
        let monotone = history.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
        if !monotone {
            warnings.push(format!("odd residual is not monotone in the step count at m = {m}: {history:?}"));
        } else if m <= *scale {
            warnings.push(format!(
                "m = {m} does not exceed the odd scale {scale:.6}; residual decrease is not guaranteed to continue"
            ));
        }
    }
    let converged = warnings.is_empty();
    let finals: Vec<f64> = histories.iter().map(|h| *h.0.last().unwrap()).collect();
    let slope = loglog_slope(&cfg.fw.masses, &finals);
    let status = match slope {
        None if finals.iter().all(|&r| r == 0.0) => "undefined: all residuals vanish",
        None => "undefined: fewer than two positive residuals",
        Some(_) if !converged => "not asserted: expansion not converged",
        Some(s) if s <= cfg.fw.slope_max => "pass",
        Some(_) => "fail",
    };
    let body = json!({
        "chart": chart.name(),
        "input": cfg.fw.input,
        "final_residuals": finals,
        "odd_scale": odd_scale,
        "slope": slope,
        "slope_max": cfg.fw.slope_max,
        "slope_status": status,
        "converged": converged,
        "warnings": warnings,
    });
    let files = finish(cfg, (&csv, "fw_verify.csv"), "fw_verify.json", body, "fw-verify")?;
    let failure = (status == "fail").then(|| {
        format!("log-log slope {} exceeds {}", slope.unwrap_or(f64::NAN), cfg.fw.slope_max)
    });
    Ok(Report { files, warnings, failure })
}

pub const SHIFT_TOL: f64 = 1e-8;

pub fn compare_confinement(cfg: &RunConfig) -> Result<Report, CliError> {
    let chart = cfg.chart()?;
    let grid = cfg.grid_for(&chart)?;
    let m = cfg.physics.m;
    let (hs, terms) = assemble_hs(&chart, &grid, m)?;
    let harmonic = cfg.confinement(CaseLabel::Harmonic, m)?;
    let well = cfg.confinement(CaseLabel::SquareWell, m)?;
    let well_zero = assemble_hpp(&well, &terms).matrix.max_abs() == 0.0;
    let opts = cfg.solve_options(cfg.solve.k)?;
    let rb = eigensolve(&effective_hamiltonian(&hs, &harmonic, &terms), &opts).map_err(CliError::solver)?;
    let rc = eigensolve(&effective_hamiltonian(&hs, &well, &terms), &opts).map_err(CliError::solver)?;
    let shift = cfg.physics.omega / (4.0 * m);
    let mut csv = Csv::new(&["index", "block", "harmonic", "square_well", "difference", "expected"]);
    let mut worst = 0.0f64;
    for block in [Block::Positive, Block::Negative] {
        let expect = match block {
            Block::Positive => -shift,
            Block::Negative => shift,
        };
        for (i, (b, c)) in rb.block_values(block).iter().zip(rc.block_values(block)).enumerate() {
            worst = worst.max((b - c - expect).abs());
            csv.row(&[i.to_string(), block.label().into(), num(*b), num(c), num(b - c), num(expect)]);
        }
    }
    let mut normal = serde_json::Map::new();
    for label in [CaseLabel::Linear, CaseLabel::Harmonic, CaseLabel::SquareWell] {
        let case = cfg.confinement(label, m)?;
        let ngrid = NormalGrid::for_case(&case, cfg.physics.normal_nodes).map_err(|e| CliError::Config(format!("physics.normal_nodes: {e}")))?;
        let op = assemble_hn(&case, &ngrid)?;
        let vals = op.eigenvalues()?;
        let max_imag = if op.is_symmetric() {
            0.0
        } else {
            op.eigenvalues_general().iter().fold(0.0f64, |a, z| a.max(z.im.abs()))
        };
        normal.insert(
            label.to_string(),
            json!({
                "half_width": ngrid.half_width,
                "lowest": vals.iter().take(4).collect::<Vec<_>>(),
                "max_imaginary_part": max_imag,
            }),
        );
    }
    let pass = worst <= SHIFT_TOL && well_zero;
    let body = json!({
        "chart": chart.name(),
        "expected_shift": -shift,
        "max_shift_error": worst,
        "tolerance": SHIFT_TOL,
        "square_well_correction_zero": well_zero,
        "pass": pass,
        "normal_spectra": normal,
        "diagnostics": {
            "harmonic": diagnostics_json(&rb.diagnostics),
            "square_well": diagnostics_json(&rc.diagnostics),
        },
    });
    let files = finish(cfg, (&csv, "compare_confinement.csv"), "compare_confinement.json", body, "compare-confinement")?;
    let failure = (!pass).then(|| format!("confinement shift error {worst:e}, square-well correction zero: {well_zero}"));
    Ok(Report { files, warnings: vec![], failure })
}
