//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("Gregory correction count n = {n} outside the supported range 1..=6")]
    OrderOutOfRange { n: usize },
    #[error("grid with M = {m} subintervals cannot host n = {n} edge corrections ({sidedness} rule needs M >= {min})")]
    GridTooSmall {
        n: usize,
        m: usize,
        min: usize,
        sidedness: &'static str,
    },
    #[error("sample count {samples} does not match weight count {weights}")]
    LengthMismatch { samples: usize, weights: usize },
}

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("discrete eigenvalue {index} has Im zeta = {im} but must lie in the open upper half-plane")]
    EigenvalueNotUpperHalf { index: usize, im: f64 },
    #[error("normal-dispersion data cannot carry a discrete spectrum ({count} pairs given)")]
    DiscreteWithNormalDispersion { count: usize },
    #[error("spectral grid has {grid} nodes but the reflection sequence has {reflection}")]
    GridMismatch { grid: usize, reflection: usize },
    #[error("spectral grid must be strictly increasing and uniform")]
    BadGrid,
    #[error("weight vector ({weights} entries) does not match the spectral grid ({grid} nodes)")]
    WeightMismatch { weights: usize, grid: usize },
    #[error("failed to read spectral data: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse spectral data: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("leading principal minor breakdown at block size {size} (condition estimate {cond:.3e})")]
    Breakdown { size: usize, cond: f64 },
    #[error("right-hand side has {got} block rows, system expects {expected}")]
    RhsMismatch { got: usize, expected: usize },
    #[error("capacity system of rank {rank} is numerically singular (condition estimate {cond:.3e})")]
    CapacitySingular { rank: usize, cond: f64 },
}

#[derive(Debug, Error)]
pub enum GlmeError {
    #[error("grid rejected: M = {m} GLME subintervals cannot host scheme {scheme} (needs M >= {min})")]
    DegenerateGrid {
        m: usize,
        scheme: String,
        min: usize,
    },
    #[error("split recovery needs spectral data for the reversed signal")]
    MissingRightData,
    #[error("split recovery needs an even output subinterval count, got {m_out}")]
    OddSplit { m_out: usize },
    #[error("solver breakdown at t = {t:.6} (block size {size})")]
    SweepBreakdown { t: f64, size: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("signal does not decay at the grid boundary: |q| = {value:.3e} exceeds {limit:.3e}")]
    BoundaryNotDecayed { value: f64, limit: f64 },
    #[error("Newton iteration failed to converge for the seed near {re:.3}+{im:.3}i")]
    NewtonStalled { re: f64, im: f64 },
    #[error("eigenvalue search requires anomalous dispersion")]
    NormalHasNoDiscrete,
    #[error("no closed form available for this signal")]
    NoClosedForm,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("pointwise error is undefined: max|q_exact| = 0")]
    ZeroReference,
    #[error("experiment needs a closed-form reference signal")]
    NoReference,
    #[error("ladder must be strictly increasing powers of two, got {0:?}")]
    BadLadder(Vec<usize>),
    #[error("scheme list is empty")]
    NoSchemes,
    #[error("{cell}: {source}")]
    Cell {
        cell: String,
        #[source]
        source: GlmeError,
    },
    #[error(transparent)]
    Glme(#[from] GlmeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config error: {0}")]
    Json(#[from] serde_json::Error),
}
