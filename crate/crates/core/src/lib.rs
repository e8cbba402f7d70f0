//! Transfunctions between finite measure spaces: the measures they act on,
//! property audits, and their extensions to signed and vector measures.

pub mod cli;
pub mod doc;
pub mod error;
pub mod extension;
pub mod measure;
pub mod ring;
pub mod sample;
pub mod transfunction;

pub use error::{Error, Result};
