//! The classifier zoo behind one fit/predict contract: gain-ratio tree,
//! random forest, brute-force kNN, Gaussian naive Bayes, a single-hidden-
//! layer MLP, and a linear-SVM stand-in. All tie-breaks resolve to attack.

mod gnb;
mod knn;
mod linsvm;
mod mlp;
mod numeric;

use serde::{Deserialize, Serialize};

pub use gnb::{GnbModel, GnbParams};
pub use knn::{KnnModel, KnnParams};
pub use linsvm::{LinSvmModel, LinSvmParams};
pub use mlp::{MlpGradient, MlpModel, MlpNet, MlpParams};

use crate::dataset::{Dataset, Label};
use crate::dtree::{DecisionTree, ForestParams, RandomForest, TreeParams};
use crate::error::{Error, Result};

/// Which classifier a spec or report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Tree,
    Forest,
    Knn,
    Gnb,
    Mlp,
    Linsvm,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Tree => "tree",
            ClassifierKind::Forest => "forest",
            ClassifierKind::Knn => "knn",
            ClassifierKind::Gnb => "gnb",
            ClassifierKind::Mlp => "mlp",
            ClassifierKind::Linsvm => "linsvm",
        }
    }

    pub const ALL: [ClassifierKind; 6] = [
        ClassifierKind::Tree,
        ClassifierKind::Forest,
        ClassifierKind::Knn,
        ClassifierKind::Gnb,
        ClassifierKind::Mlp,
        ClassifierKind::Linsvm,
    ];
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A classifier kind plus its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassifierSpec {
    Tree(TreeParams),
    Forest(ForestParams),
    Knn(KnnParams),
    Gnb(GnbParams),
    Mlp(MlpParams),
    Linsvm(LinSvmParams),
}

impl ClassifierSpec {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierSpec::Tree(_) => ClassifierKind::Tree,
            ClassifierSpec::Forest(_) => ClassifierKind::Forest,
            ClassifierSpec::Knn(_) => ClassifierKind::Knn,
            ClassifierSpec::Gnb(_) => ClassifierKind::Gnb,
            ClassifierSpec::Mlp(_) => ClassifierKind::Mlp,
            ClassifierSpec::Linsvm(_) => ClassifierKind::Linsvm,
        }
    }

    pub fn default_for(kind: ClassifierKind) -> ClassifierSpec {
        match kind {
            ClassifierKind::Tree => ClassifierSpec::Tree(TreeParams::default()),
            ClassifierKind::Forest => ClassifierSpec::Forest(ForestParams::default()),
            ClassifierKind::Knn => ClassifierSpec::Knn(KnnParams::default()),
            ClassifierKind::Gnb => ClassifierSpec::Gnb(GnbParams::default()),
            ClassifierKind::Mlp => ClassifierSpec::Mlp(MlpParams::default()),
            ClassifierKind::Linsvm => ClassifierSpec::Linsvm(LinSvmParams::default()),
        }
    }

    /// Reseed every stochastic component from one master seed.
    pub fn with_seed(mut self, seed: u64) -> ClassifierSpec {
        match &mut self {
            ClassifierSpec::Forest(p) => p.seed = seed,
            ClassifierSpec::Mlp(p) => p.seed = seed,
            ClassifierSpec::Linsvm(p) => p.seed = seed,
            ClassifierSpec::Tree(_) | ClassifierSpec::Knn(_) | ClassifierSpec::Gnb(_) => {}
        }
        self
    }
}

/// An opaque fitted classifier. Prediction rejects data whose columns do not
/// match what the model was fit on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrainedModel {
    Tree(DecisionTree),
    Forest(RandomForest),
    Knn(KnnModel),
    Gnb(GnbModel),
    Mlp(MlpModel),
    Linsvm(LinSvmModel),
}

impl TrainedModel {
    /// Fit per spec. Tree and forest accept mixed columns; the numeric-only
    /// kinds require a normalized, encoded dataset.
    pub fn fit(spec: &ClassifierSpec, train: &Dataset) -> Result<TrainedModel> {
        Ok(match spec {
            ClassifierSpec::Tree(p) => TrainedModel::Tree(DecisionTree::fit(train, p)?),
            ClassifierSpec::Forest(p) => TrainedModel::Forest(RandomForest::fit(train, p)?),
            ClassifierSpec::Knn(p) => TrainedModel::Knn(KnnModel::fit(train, p)?),
            ClassifierSpec::Gnb(p) => TrainedModel::Gnb(GnbModel::fit(train, p)?),
            ClassifierSpec::Mlp(p) => TrainedModel::Mlp(MlpModel::fit(train, p)?),
            ClassifierSpec::Linsvm(p) => TrainedModel::Linsvm(LinSvmModel::fit(train, p)?),
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            TrainedModel::Tree(_) => ClassifierKind::Tree,
            TrainedModel::Forest(_) => ClassifierKind::Forest,
            TrainedModel::Knn(_) => ClassifierKind::Knn,
            TrainedModel::Gnb(_) => ClassifierKind::Gnb,
            TrainedModel::Mlp(_) => ClassifierKind::Mlp,
            TrainedModel::Linsvm(_) => ClassifierKind::Linsvm,
        }
    }

    pub fn predict(&self, d: &Dataset) -> Result<Vec<Label>> {
        match self {
            TrainedModel::Tree(m) => m.predict(d),
            TrainedModel::Forest(m) => m.predict(d),
            TrainedModel::Knn(m) => m.predict(d),
            TrainedModel::Gnb(m) => m.predict(d),
            TrainedModel::Mlp(m) => m.predict(d),
            TrainedModel::Linsvm(m) => m.predict(d),
        }
    }

    /// Monotone attack-likeness score. Thresholding each kind at its natural
    /// boundary reproduces `predict` exactly.
    pub fn decision_scores(&self, d: &Dataset) -> Result<Vec<f64>> {
        match self {
            TrainedModel::Tree(m) => m.leaf_attack_fractions(d),
            TrainedModel::Forest(m) => m.vote_fractions(d),
            TrainedModel::Knn(m) => m.neighbor_attack_fractions(d),
            TrainedModel::Gnb(m) => m.log_posterior_differences(d),
            TrainedModel::Mlp(m) => m.logits(d),
            TrainedModel::Linsvm(m) => m.margins(d),
        }
    }

    pub fn to_artifact_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelArtifact {
            version: MODEL_ARTIFACT_VERSION,
            model: self.clone(),
        })?)
    }

    pub fn from_artifact_json(json: &str) -> Result<TrainedModel> {
        let envelope: ModelArtifact = serde_json::from_str(json).map_err(|e| Error::Artifact {
            reason: format!("cannot parse model artifact: {e}"),
        })?;
        if envelope.version != MODEL_ARTIFACT_VERSION {
            return Err(Error::Artifact {
                reason: format!(
                    "model artifact version {} is not supported (expected {MODEL_ARTIFACT_VERSION})",
                    envelope.version
                ),
            });
        }
        Ok(envelope.model)
    }
}

pub const MODEL_ARTIFACT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelArtifact {
    version: u32,
    model: TrainedModel,
}
