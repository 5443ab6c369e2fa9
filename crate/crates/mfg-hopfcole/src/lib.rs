//! Stationary mean field games with power Hamiltonians, solved two ways and
//! cross-verified through the generalized Hopf-Cole transformation.
//!
//! The coupled system for a value function `u`, a stationary density `m`,
//! and an ergodic constant `lambda` is
//!
//! ```text
//! -nu Lap u + (h0/r') |Du|^{r'} + lambda = f(x, m)
//! -nu Lap m - div(h0 |Du|^{r'-2} Du m)  = 0
//! int m = 1,  m > 0
//! ```
//!
//! In one space dimension with Neumann conditions, or under radial symmetry,
//! the substitution `phi = m^{1/r}` (with `r` conjugate to `r'`) decouples
//! the system into a single quasilinear problem for `phi > 0`:
//!
//! ```text
//! -mu Lap_r phi + (f(x, phi^r) - lambda) phi^{r-1} = 0,   int phi^r = 1,
//! mu = nu (nu r / h0)^{r-1}
//! ```
//!
//! where `Lap_r` is the r-Laplace operator. This crate implements both
//! formulations numerically and the transformation between them:
//!
//! - [`params`] — exponent and coefficient algebra of the Hamiltonian.
//! - [`domain`] — interval / radial-ball grids, quadrature, differences.
//! - [`coupling`] — the cost `f(x, m)` and its energy primitive.
//! - [`transform`] — the change of variables, forward and inverse, with the
//!   gradient-alignment check that licenses it.
//! - [`rlaplace`] — constrained energy descent for the decoupled problem,
//!   with epsilon-regularized diffusion and an independent linear-eigenvalue
//!   cross-check for the quadratic case.
//! - [`oracle`] — damped Newton on the discretized coupled system; the
//!   brute-force reference for everything else.
//! - [`verify`] — residual reports, exponent-identity checks, and dual-path
//!   cross-validation.
//! - [`cli`] — batch front end (`solve`, `transform`, `verify`, `sweep`)
//!   reading flat config files and writing CSV tables plus summaries.
//!
//! Start from the runnable examples: `quadratic_hopf_cole` (coupled solve
//! and the classical substitution), `decoupled_rlaplace` (energy descent),
//! `transform_round_trip`, `radial_ground_state`, `convergence_sweep`, and
//! `batch_pipeline` (the config-driven command layer).

// Validation comparisons are written `!(x > 0.0)` so NaN fails them, and
// numerical kernels index in stencil form.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod banded;
pub mod cli;
pub mod config;
pub mod coupling;
pub mod domain;
pub mod error;
pub mod expr;
pub mod io;
pub mod oracle;
pub mod params;
pub mod rlaplace;
pub mod transform;
pub mod util;
pub mod verify;

pub use coupling::Coupling;
pub use domain::{differentiate_midpoint, differentiate_nodal, integrate, DomainSpec, GridFunction};
pub use error::{Error, Result};
pub use oracle::{hjb_residual, kolmogorov_weak_residual, smooth_hamiltonian_guard, solve_coupled, HamiltonianRegime};
pub use params::{conjugate_exponent, mu_coefficient, HamiltonianParams};
pub use rlaplace::{discrete_energy, lambda_from_phi, solve_rlaplace, SolveTrace, SolverConfig};
pub use transform::{
    check_gradient_alignment, forward_transform, inverse_transform, quadratic_hopfcole_reference,
    AlignmentReport, MFGSolution, PhiSolution,
};
pub use verify::{cross_validate, proof_identity_suite, rlaplace_weak_residual, ResidualReport};
