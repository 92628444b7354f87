//! Typed, immutable flow-record tables: CSV ingestion, filtration, class
//! counts, and a synthetic generator for property tests.

mod schema;
mod synth;
mod table;

pub use schema::{ColumnKind, ColumnSchema, Schema, SchemaFile, SchemaFileColumn};
pub use synth::{generate_synthetic, SynthSpec};
pub use table::{ClassDistribution, Column, Dataset, Label, NominalBuilder, NominalColumn};

