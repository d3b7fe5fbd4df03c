//! Shallow networks with random hidden parameters, the ridgelet transform,
//! and lower bounds on how well such networks can approximate a target.
//!
//! The crate is organised bottom-up:
//!
//! - [`quad`], [`target`] and [`activation`] hold the numerical primitives.
//! - [`net`] samples hidden layers and fits output weights.
//! - [`ridgelet`] computes transforms, reconstructions and spectrum grids.
//! - [`bounds`] turns ridgelet decay into approximation lower bounds.
//! - [`experiments`] reproduces the simulation studies and writes run directories.
//! - [`cli`] exposes every experiment as a subcommand.

pub mod activation;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod net;
pub mod plot;
pub mod quad;
pub mod ridgelet;
pub mod seeds;
pub mod target;

pub use activation::{Activation, ActivationProfile};
pub use error::{Error, Result};
pub use quad::{Estimate, QuadratureSpec, Rule};
pub use target::{GaussianBump, TargetFunction, TargetKind};
