//! Polaron master-equation simulator for polarization-entangled photon pairs
//! generated by the biexciton–exciton cascade of a pulse-driven quantum dot
//! in a two-mode (H/V) microcavity.

pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod metrics;
pub mod ode;
pub mod ops;
pub mod params;
pub mod phonon;
pub mod quadrature;
pub mod runner;
pub mod superop;

pub use error::{Error, Result};
