use thiserror::Error;

/// Failure modes of the geometry, assembly and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate chart at q = ({}, {}): |∂₁r × ∂₂r| = {norm:e}", q[0], q[1])]
    DegenerateChart { q: [f64; 2], norm: f64 },

    #[error("normal offset q3 = {q3} leaves the tubular neighbourhood at q = ({}, {}) (f = {f})", q[0], q[1])]
    OutsideTube { q: [f64; 2], q3: f64, f: f64 },

    #[error("grid too coarse along axis {axis}: {nodes} nodes, need at least {min}")]
    GridTooCoarse { axis: usize, nodes: usize, min: usize },

    #[error("grid periodicity {grid:?} does not match chart periodicity {chart:?}")]
    NonPeriodicMismatch { grid: [bool; 2], chart: [bool; 2] },

    #[error("operator is not Hermitian: relative residual {residual:e}")]
    NonHermitianInput { residual: f64 },

    #[error("eigensolver did not converge after {iterations} iterations: residual {achieved:e}, target {target:e}")]
    ConvergenceFailure {
        iterations: usize,
        achieved: f64,
        target: f64,
    },

    #[error("unsupported chart: {0}")]
    UnsupportedChart(String),

    #[error("unknown confinement case `{0}`")]
    UnknownCase(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
