//! Lévy processes from their generating triplet `(a, Q, ν)`: characteristic
//! exponents, exact path simulation by Lévy–Itô decomposition, jump-measure
//! statistics, Monte Carlo checks of the decomposition and recovery of a
//! one-dimensional triplet from its exponent.
//!
//! The numerical core is generic over [`scalar::Real`] (`f32`, `f64`); the
//! aliases below fix `f64` or `f32`.

pub mod error;
pub mod jumpmeasure;
mod linalg;
pub mod measure;
pub mod quad;
pub mod recover;
pub mod rng;
pub mod scalar;
pub mod simulate;
pub mod verify;

pub use error::{LevyError, Result};

pub type LevyTriplet64 = measure::LevyTriplet<f64>;
pub type LevyTriplet32 = measure::LevyTriplet<f32>;
pub type LevyMeasure64 = measure::LevyMeasure<f64>;
pub type LevyMeasure32 = measure::LevyMeasure<f32>;
pub type Region64 = measure::Region<f64>;
pub type BorelRegion64 = jumpmeasure::BorelRegion<f64>;
pub type PathSample64 = simulate::PathSample<f64>;
pub type PathSample32 = simulate::PathSample<f32>;
pub type SimConfig64 = simulate::SimConfig<f64>;
pub type ExponentHandle64 = measure::CharacteristicExponentHandle<f64>;
