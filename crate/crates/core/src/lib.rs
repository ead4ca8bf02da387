//! Numerical core for the dissipative Rabi model.
//!
//! A two-level atom coupled to one truncated cavity mode, including the
//! antirotating part of the coupling, driven by thermal damping and atomic
//! dephasing. Three independent routes to the dynamics live here:
//!
//! * [`master`]: adaptive integration of the Lindblad master equation,
//! * [`trajectory`]: quantum-jump unraveling of the dephasing channel,
//! * [`noise`]: pure-state evolution under a stochastic atomic frequency.
//!
//! [`analysis`] turns the resulting [`ObservableSeries`] into asymptotic
//! photon generation rates.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel execution, file
//! formats and the command-line front end live in the `rabi-sim` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod ensemble;
mod error;
pub mod integrator;
pub mod linalg;
pub mod master;
pub mod noise;
pub mod observables;
pub mod operators;
pub mod params;
pub mod rng;
pub mod space;
pub mod state;
pub mod trajectory;

pub use error::{Error, Result};
pub use linalg::{CMatrix, SparseOp, C64};
pub use master::{evolve, lindblad_rhs, DensityMatrix, Liouvillian, TimeGrid};
pub use observables::{ObservableRecord, ObservableSeries, Observables};
pub use operators::QOperator;
pub use params::SimParams;
pub use space::HilbertSpace;
pub use state::{AtomState, FieldState, StateSpec, StateVector};
