//! Decoherence, record formation and redundancy for a qubit coupled to a
//! spin environment.
//!
//! The crate pairs cheap estimators built on the quantum Chernoff
//! information ([`chernoff`]) with exact Holevo computations ([`holevo`])
//! that check them. [`model`] describes scenarios, [`dynamics`] evolves
//! individual environment spins in closed form, [`ensembles`] holds the
//! analytic averages and the ready-made scenarios, and [`cli`] drives the
//! `qdarwin` binary.

pub mod error;
pub mod qmath;
pub mod model;
pub mod dynamics;
pub mod chernoff;
pub mod holevo;
pub mod ensembles;
pub mod cli;

pub use error::{Error, Result};
