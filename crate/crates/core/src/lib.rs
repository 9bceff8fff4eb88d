//! Linearized optimal power flow for multiphase radial distribution feeders
//! with wye- and delta-connected, voltage-dependent loads.
//!
//! The crate has two solvers over the same [`network::Network`]:
//!
//! - [`lp_solver`] assembles the lossless linear branch-flow model in the
//!   Hermitian voltage products `W = V Vᴴ`, with a balanced-phasor
//!   approximation of the branch currents, an exact-under-balance mapping of
//!   delta powers to bus withdrawals ([`delta_wye`]) and a tangent-line
//!   approximation of exponential loads ([`load_models`]).
//! - [`ac_oracle`] solves the exact nonlinear phasor power flow with a
//!   backward/forward sweep and is the ground truth for error metrics.
//!
//! [`experiments`] compares the two and runs the parameter sweeps; the
//! `mdopf` binary exposes them on the command line.

// `!(a <= b)` guards are written that way on purpose so NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ac_oracle;
pub mod delta_wye;
pub mod experiments;
pub mod feeder_io;
pub mod load_models;
pub mod lp_solver;
pub mod network;
mod sparse;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

pub use ac_oracle::{power_mismatch, sweep_solve, AcError, AcLoadMode, PhasorState, SweepConfig};
pub use lp_solver::{LinearSolution, LoadMode, LpError, ModelConfig};
pub use network::{
    Bus, Configuration, Line, LoadModel, LoadSpec, Network, Phase, PhaseSet, ShuntDevice,
};

pub type CVec3 = Vector3<Complex64>;
pub type CMat3 = Matrix3<Complex64>;

/// γ = e^{−i2π/3}.
pub fn gamma() -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI / 3.0)
}

/// Balanced positive-sequence phasors `vbar · (1, γ, γ²)`.
pub fn balanced_vref(vbar: f64) -> CVec3 {
    let g = gamma();
    CVec3::new(Complex64::new(vbar, 0.0), g * vbar, g * g * vbar)
}
