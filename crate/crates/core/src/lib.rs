//! Resonance analysis and numerics for the quintic generalized
//! Benjamin–Bona–Mahony equation
//!
//! ```text
//! u_t − u_xxt + ∂_x(u + u⁵) = 0.
//! ```
//!
//! * [`dispersion`]: ω, the reflection `r`, the interaction phase and its
//!   local Taylor models.
//! * [`resonance`]: reduction of space-resonant families to `Φ_{A,B}` and
//!   classification of their roots.
//! * [`spectral`]: periodic grids, Littlewood–Paley multipliers, the free flow.
//! * [`solver`]: RK4 on the profile equation with exact dealiasing.
//! * [`diagnostics`]: decay fits, scattering, weighted norms, Duhamel check.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dispersion;
pub mod error;
pub mod resonance;
pub mod snapshot;
pub mod solver;
pub mod spectral;

pub use diagnostics::{
    bootstrap_norms, duhamel_residual, fit_decay, scatter_cauchy, BootstrapNorms, DecayReport,
    ScatterReport, Verdict,
};
pub use dispersion::{
    omega, omega_deriv, phase, phase_gradient, reflect, remainder_study, taylor_model, PhasePoint,
    RemainderStudy, SignPattern, TaylorModel, TaylorModelKind,
};
pub use error::{Error, Result};
pub use resonance::{
    classify_pair, enumerate_families, find_roots, generalized_phase, sample_manifold,
    solve_anomalous, verify_h_shape, AnomalousSolution, ClassTag, Classification, CoeffPair,
    FamilyConfig, ManifoldKind,
};
pub use snapshot::Snapshot;
pub use solver::{run, InvariantTriple, RunConfig, Solver, SolverState, Trajectory};
pub use spectral::{free_evolve, lp_decompose, lp_project, make_grid, Grid, LpBand, SpectralField};
