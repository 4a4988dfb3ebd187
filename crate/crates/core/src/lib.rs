//! Early-citer analysis and citation count prediction.

pub mod cli;
pub mod corpus;
pub mod earlyciters;
pub mod features;
pub mod error;
pub mod graphs;
pub mod models;
pub mod study;
mod persist;
pub mod text;
pub mod topics;

pub use error::{Error, Result};
