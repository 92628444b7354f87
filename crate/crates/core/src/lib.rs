//! A toolchain for building and benchmarking network intrusion detection
//! models on flow-record datasets.
//!
//! The pipeline: ingest CSV flow records ([`dataset`]), select a feature
//! subset with a decision-tree wrapper ([`wrapper`]), transform with min-max
//! normalization and one-hot encoding ([`preprocess`]), train a classifier
//! ([`dtree`], [`classifiers`]), and report accuracy, detection rate, false
//! alert rate, and model building time ([`metrics`]).

pub mod classifiers;
pub mod dataset;
pub mod dtree;
mod error;
pub mod metrics;
pub mod preprocess;
pub mod wrapper;

pub use error::{Error, Result};
