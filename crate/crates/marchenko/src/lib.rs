//! High-order inverse scattering transform for the Zakharov-Shabat system.
//!
//! The crate recovers a complex signal `q(t)` from its nonlinear Fourier
//! spectrum (reflection coefficient plus bound states) by solving the
//! Gelfand-Levitan-Marchenko equations with Gregory-corrected quadrature,
//! a bordered block-Toeplitz Levinson recursion, and a low-rank Woodbury
//! update that confines the non-Toeplitz part of the discretization to a
//! small capacity system.
//!
//! Modules:
//! - [`quadrature`]: Gregory weight vectors (orders 1..6, one- and two-sided)
//!   generated from moment conditions.
//! - [`spectral`]: spectral data types, the GLME kernel, and its sampled
//!   track along the recovery sweep.
//! - [`toeplitz`]: 2x2-block Toeplitz systems and the Levinson recursion
//!   with grow-by-one bordering.
//! - [`woodbury`]: the diagonal low-rank weight correction and the four-step
//!   capacity solve.
//! - [`glme`]: the recovery sweeps (Gregory schemes and the second-order
//!   staggered baseline).
//! - [`zs`]: the independent forward-scattering oracle and closed-form
//!   signal/spectrum generators.
//! - [`experiment`]: convergence, timing trade-off, and pointwise-error
//!   studies with CSV output.
//!
//! See the `examples/` directory for runnable entry points covering each of
//! these, and the `marchenko` binary for the command-line front end.

pub mod block;
pub mod error;
pub mod experiment;
mod gamma;
pub mod glme;
pub mod quadrature;
pub mod spectral;
pub mod toeplitz;
pub mod woodbury;
pub mod zs;

pub use error::{ExperimentError, GlmeError, OracleError, QuadratureError, SolveError, SpectralError};
pub use glme::{
    recover, recover_reference_tib, GridConfig, RecoverOptions, RecoveredPotential, Scheme, Split,
};
pub use quadrature::{gregory_weights, integrate, Sidedness, WeightVector};
pub use spectral::{kernel_value, DiscretePair, Dispersion, KernelTrack, Side, SpectralData};
pub use toeplitz::{levinson_solve, BlockToeplitzSystem, LevinsonState};
pub use woodbury::{build_correction, woodbury_solve, LowRankCorrection, ToeplitzSolver};
pub use zs::{
    analytic_spectral_data, find_eigenvalues, forward_scatter, make_signal, numeric_spectral_data,
    SignalKind, SignalSamples,
};
