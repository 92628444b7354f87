use serde::{Deserialize, Serialize};

use crate::dataset::{ColumnKind, Dataset, Schema};
use crate::error::{Error, Result};

/// Ordered set of attribute names, the unit the wrapper searches over.
/// Never includes the label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSubset {
    names: Vec<String>,
}

impl FeatureSubset {
    pub fn new(names: Vec<String>) -> Result<FeatureSubset> {
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::invalid_param(
                    "subset",
                    format!("duplicate feature name {name:?}"),
                ));
            }
        }
        Ok(FeatureSubset { names })
    }

    pub fn empty() -> FeatureSubset {
        FeatureSubset { names: Vec::new() }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    /// All attributes of `schema`, in schema order.
    pub fn all_attributes(schema: &Schema) -> FeatureSubset {
        FeatureSubset {
            names: schema
                .attribute_positions()
                .map(|p| schema.column(p).name.clone())
                .collect(),
        }
    }

    /// Check every name against a schema; the label cannot be selected.
    pub fn validate(&self, schema: &Schema) -> Result<()> {
        for name in &self.names {
            match schema.position_of(name) {
                None => {
                    return Err(Error::UnknownColumn { name: name.clone() });
                }
                Some(p) if schema.column(p).kind == ColumnKind::Label => {
                    return Err(Error::LabelColumn { name: name.clone() });
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// The built-in 19-feature subset selected by the decision-tree wrapper
    /// on UNSW-NB15 (config preset `table2`). The published list names a
    /// `stepb` column that does not exist in the dataset; it is mapped to
    /// `stcpb` here, and reports using this preset flag the substitution.
    pub fn wrapper_dt19() -> FeatureSubset {
        let names = [
            "proto",
            "service",
            "spkts",
            "sbytes",
            "dbytes",
            "dttl",
            "sloss",
            "dloss",
            "swin",
            "stcpb",
            "trans_depth",
            "response_body_len",
            "ct_srv_src",
            "ct_src_dport_ltm",
            "ct_dst_sport_ltm",
            "ct_dst_src_ltm",
            "ct_flw_http_mthd",
            "ct_src_ltm",
            "ct_srv_dst",
        ];
        FeatureSubset {
            names: names.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Human-readable note attached to reports built from `wrapper_dt19`.
    pub fn wrapper_dt19_note() -> &'static str {
        "preset subset maps the published feature name 'stepb' to the dataset's 'stcpb'"
    }
}

/// Dataset containing exactly the subset's columns, in subset order, plus
/// the label. An empty subset yields a label-only dataset.
pub fn project(d: &Dataset, subset: &FeatureSubset) -> Result<Dataset> {
    subset.validate(d.schema())?;
    let mut cols = Vec::with_capacity(subset.len() + 1);
    let mut data = Vec::with_capacity(subset.len() + 1);
    for name in subset.names() {
        let pos = d.schema().position_of(name).expect("validated above");
        let meta = d.schema().column(pos);
        cols.push((meta.name.clone(), meta.kind));
        data.push(d.column(pos).clone());
    }
    let label_pos = d.schema().label_position();
    cols.push((
        d.schema().column(label_pos).name.clone(),
        ColumnKind::Label,
    ));
    data.push(d.column(label_pos).clone());
    Dataset::from_columns(Schema::new(cols)?, data)
}
