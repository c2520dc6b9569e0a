//! Dressed-state single-photon source built from a cascaded biexciton–exciton
//! quantum dot under continuous-wave driving.

pub mod analytics;
pub mod engine;
pub mod error;
pub mod fom;
pub mod phonons;
pub mod quantum;
pub mod registry;
pub mod system;
pub mod units;

pub use error::{Error, Result};
