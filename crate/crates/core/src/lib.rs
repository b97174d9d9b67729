//! Simulation and numerical solvers for generalized Bak-Sneppen models.
//!
//! The crate covers both directions of the chain:
//!
//! * [`model`] and [`sim`] run the forward dynamics (minimum species plus a
//!   shift-invariant replacement set receive fresh uniform fitnesses) and
//!   collect streaming histograms.
//! * [`one_site`] and [`two_site`] compute stationary densities when all but
//!   one, or all but two adjacent, species are replaced at each step.
//! * [`reverse`] samples the time-reversed chain given a candidate density,
//!   and [`functional`] checks the stationarity identity that any such
//!   density must satisfy.
//!
//! Every numerical route has an independent counterpart so results can be
//! cross-checked: Monte Carlo against closed forms, fixed points against
//! ODE solutions, backward samples against forward samples.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod density;
pub mod error;
pub mod functional;
pub mod io;
pub mod model;
pub mod one_site;
pub mod quad;
pub mod reverse;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod two_site;

pub use density::{DensityProvider, Provenance, UniformDensity};
pub use error::{Error, Result};
pub use model::{argmin_species, forward_step, FitnessConfig, ReplacementPattern};
pub use rng::RngStream;
