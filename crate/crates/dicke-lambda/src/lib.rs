//! Collective superradiance and electromagnetically induced transparency in
//! ensembles of three-level lambda atoms in the Dicke limit.
//!
//! Two solvers cover the same physics from opposite ends:
//!
//! * an **exact** solver that enumerates the permutation-symmetric subspace
//!   (dimension `(N+1)(N+2)/2`), assembles the collective Lindblad
//!   generator as a sparse superoperator, and solves for steady states and
//!   transients ([`symspace`], [`liouvillian`]);
//! * a **mean-field** solver for a representative atom with `(N−1)`-scaled
//!   feedback built from its own expectation values, plus the closed-form
//!   linear-probe susceptibility ([`meanfield`]).
//!
//! On top of those sit detuning scans and lineshape metrics
//! ([`spectroscopy`]), group-velocity and slow-light analysis
//! ([`slowlight`]), and burst extraction with finite-size scaling
//! ([`superradiance`]). The [`validate`] module re-runs the built-in
//! consistency checks and writes a machine-readable report.
//!
//! See the crate `examples/` directory for one runnable program per
//! capability; the `dicke-lambda` binary exposes the same entry points as
//! subcommands.

pub mod density;
pub mod error;
pub mod fit;
pub mod liouvillian;
mod linsolve;
pub mod meanfield;
pub mod ode;
pub mod params;
pub mod slowlight;
pub mod sparse;
pub mod spectroscopy;
pub mod superradiance;
pub mod symspace;

pub use error::{Error, Result};
pub use params::ModelParams;
