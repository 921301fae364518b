//! Particle and inerton-cloud oscillator mechanics.
//!
//! The crate integrates the coupled particle/cloud equations of motion as a
//! hybrid system, checks them against their closed-form solution and first
//! integral, evaluates the relativistic Lagrangians and their Euler-Lagrange
//! residuals, derives the de Broglie relations from the cyclic action, and
//! verifies the spin-channel and Dirac-matrix constructions.
//!
//! Batch work (randomized property sweeps, the check registry, residual
//! evaluation) is data-parallel through [`exec::Execution`]; disable the
//! default `parallel` feature for a purely sequential build.
// `!(a < b)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod action;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod kinematics;
pub mod lagrangian;
pub mod observables;
pub mod presets;
pub mod quadrature;
pub mod spin;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use kinematics::{DerivedKinematics, SystemParams};
pub use state::AggregateState;
