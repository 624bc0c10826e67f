//! Simulator and training engine for a small dissipative quantum neural
//! network.
//!
//! States are density matrices on qubit registers. A perceptron is a unitary
//! acting on every qubit of the previous layer plus one fresh qubit of the
//! next layer; tracing out the previous layer after the layer unitaries is
//! the dissipative, non-linear activation. Perceptron unitaries are factored
//! through a composite parameterization with `d^2` real angles, which yields
//! exact analytic derivatives and therefore an analytic gradient of the
//! fidelity cost. Training is gradient ascent with a grid line search on the
//! step size, with optional uncertainty-relation diagnostics.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable the default
//! `std` feature for embedded use. All operations are deterministic given a
//! seeded generator, and nothing here performs IO.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod comp_param;
pub mod error;
pub mod linalg;
pub mod network;
pub mod qprops;
pub mod training;

pub use error::{Error, Result};
