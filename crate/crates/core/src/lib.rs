//! Shared-endpoint correlation of random edge flows.
//!
//! Edge flows are modelled as antisymmetric Gaussian processes
//! `f(x, y) = u(x, y) - u(y, x)` evaluated on the traits of the two endpoint
//! vertices. Flows on edges that share an endpoint are correlated with
//! coefficient `rho`, and that single number fixes how much of a random flow
//! is transitive (a gradient of vertex ratings) and how much is cyclic.
//!
//! The crate is organised bottom up:
//!
//! * [`numerics`]: Bessel functions, adaptive quadrature, expectations over
//!   positive scale laws, guarded Cholesky and seeded random streams.
//! * [`kernels`]: isotropic base kernels, their spectra, roughness
//!   coefficients and scale-mixture representations.
//! * [`correlation`]: every route to `rho` and the flow variance `sigma2`.
//! * [`asymptotics`]: smoothness and roughness limits, regime tags and Padé
//!   approximants.
//! * [`montecarlo`]: independent sampling estimators and Matérn sample paths.
//! * [`graphflow`]: graphs, the signed edge adjacency, the Helmholtz-Hodge
//!   decomposition and ensemble checks of the expected component sizes.
//! * [`cli`]: the run configuration and the `rho`, `sweep`, `mc`, `hhd` and
//!   `paths` commands behind the `flowcorr` binary.
//!
//! The runnable programs under `examples/` walk through each capability.
#![forbid(unsafe_code)]

pub mod asymptotics;
pub mod cli;
pub mod correlation;
pub mod graphflow;
pub mod kernels;
pub mod montecarlo;
pub mod numerics;

pub use numerics::{NumericsError, QuadratureSpec, RngStream};
