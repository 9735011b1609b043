pub mod axioms;
pub mod cli;
pub mod domains;
pub mod error;
pub mod mechanisms;
pub mod model;
pub mod richness;
pub mod ttc;
pub mod verifier;

pub use error::{Error, Result};
