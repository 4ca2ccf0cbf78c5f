//! Landau-Zener-Stückelberg interference in a driven four-level flux qubit.
//!
//! The drive is folded into dephasing-broadened multiphoton transition rates
//! ([`lz_rates`]), which feed stationary rate equations over the lowest four
//! diabatic levels ([`steady_state`]). [`sweep`] maps the left-well population
//! over static flux detuning and drive amplitude, and [`dynamics`] integrates
//! the same rate equations in time as an independent check on the stationary
//! solver.
//!
//! Units are fixed throughout: frequencies, rates, gaps and detunings in
//! ordinary-frequency GHz (not angular), flux in mΦ₀, time in ns, temperature
//! in kelvin.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamics;
pub mod error;
pub mod lz_rates;
pub mod output;
pub mod qubit;
pub mod steady_state;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use qubit::{CrossingChannel, CrossingSpec, DiabaticLevel, DriveSpec, QubitSpec, Well};
pub use steady_state::{Model, PopulationVector, RateMatrix, Regime, TransitionRates};
pub use sweep::{GridSpec, SweepGrid};
