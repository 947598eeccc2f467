//! Pseudospectral solver for the penalized Allen-Cahn-Ohta-Kawasaki (pACOK)
//! equation: the L2 gradient flow of the Ohta-Kawasaki free energy with the
//! volume constraint enforced by a quadratic penalty.
//!
//! Time stepping is a first-order stabilized linear semi-implicit scheme that
//! treats the stiff linear terms (plus two stabilizers `kappa_h`, `beta_h`)
//! implicitly and every nonlinear/nonlocal term explicitly, so each step is a
//! single diagonal solve in Fourier space. With stabilizers above the bounds
//! from [`solver::stability_constants`] the discrete energy is nonincreasing
//! for any time step.
//!
//! Modules:
//! - [`grid`]: periodic collocation grid and real grid functions;
//! - [`spectral`]: DFT/iDFT and Fourier-diagonal operators;
//! - [`model`]: potentials, free energy, and the three-force decomposition;
//! - [`solver`]: the semi-implicit scheme, stability bounds, time loop;
//! - [`analysis`]: initial conditions and experiment harnesses;
//! - [`config`], [`snapshot`], [`csv_io`], [`cli`]: run configuration,
//!   binary field snapshots, CSV logs, and the command-line driver.
//!
//! See the crate examples for one runnable program per capability.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod grid;
pub mod model;
pub mod snapshot;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{Field, GridSpec};
pub use model::{EnergyBreakdown, Indicator, ModelParams, PotentialBounds};
pub use solver::{SolverParams, StepReport};
pub use spectral::Spectrum;
