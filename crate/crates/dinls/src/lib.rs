//! Numerical laboratory for the inhomogeneous nonlinear Schrödinger equation
//! with two power-type nonlinearities (DINLS),
//!
//! ```text
//! i ∂_t u + Δu = λ₁ |x|^{-b₁} |u|^{p₁} u + λ₂ |x|^{-b₂} |u|^{p₂} u,
//! u(0) = u₀ ∈ H¹(ℝᴺ),    N ∈ {3, 4, 5},    p₂ = (4 - 2b₂)/(N - 2),
//! ```
//!
//! where the second power sits exactly at the energy-critical exponent. The
//! crate provides:
//!
//! - [`params`] — exact rational validation of the parameter constraints,
//!   Schrödinger-admissible exponent calculus, and classifiers for the known
//!   global-existence and finite-time-blow-up regimes;
//! - [`grid`] — cell-centered radial grids, quadrature for the ℝᴺ volume
//!   measure, radial derivatives, and the reduced variable v = r^{(N-1)/2} u;
//! - [`observables`] — mass, energy, weighted Lᵖ norms, variance V(t), the
//!   virial quantity y(t), and the virial second-derivative formula;
//! - [`solver`] — Strang-split time integration with an exact nonlinear phase
//!   rotation and a sine-transform linear propagator, adaptive phase-limited
//!   stepping, blow-up detection, and an independent Duhamel–Picard oracle;
//! - [`verify`] — desk-scale numerical checks of the interpolation inequality,
//!   kinetic-energy boundedness, and splitting convergence order;
//! - [`cli`] — configuration parsing, experiment orchestration, and CSV/JSON
//!   artifact serialization behind the `dinls` binary.
//!
//! Every runnable capability also ships as an example under `examples/`.

pub mod cli;
pub mod grid;
pub mod observables;
pub mod params;
pub mod solver;
pub mod verify;

pub use grid::{Field, RadialGrid};
pub use params::{AdmissiblePair, ProblemParams, Rational, RegimeKind, RegimeVerdict};
pub use solver::{RunOutcome, RunStatus, SolverConfig};
