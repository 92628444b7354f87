//! Data transformation: min-max normalization, one-hot encoding, and
//! feature-subset projection. The pipeline order is selection, then
//! normalization, then encoding; fitted stats and vocabularies are immutable
//! and serialize to versioned JSON so a fit can be reapplied bit-identically.

mod encode;
mod normalize;
mod subset;

pub use encode::{fit_onehot, apply_onehot, EncoderMap};
pub use normalize::{fit_minmax, apply_minmax, NormalizerStats};
pub use subset::{project, FeatureSubset};
