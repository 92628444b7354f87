use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a column holds and how the pipeline treats it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Nominal,
    Label,
}

/// Name, kind, and position of one column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    pub position: usize,
}

/// Ordered column layout of a dataset.
///
/// Invariants enforced at construction: names are unique, exactly one column
/// has the label kind, and positions run contiguously from 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    columns: Vec<ColumnSchema>,
}

impl Schema {
    pub fn new(columns: Vec<(String, ColumnKind)>) -> Result<Self> {
        let columns: Vec<ColumnSchema> = columns
            .into_iter()
            .enumerate()
            .map(|(position, (name, kind))| ColumnSchema {
                name,
                kind,
                position,
            })
            .collect();
        let schema = Schema { columns };
        schema.validate()?;
        Ok(schema)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for col in &self.columns {
            if !seen.insert(col.name.as_str()) {
                return Err(Error::InvalidSchema {
                    reason: format!("duplicate column name {:?}", col.name),
                });
            }
        }
        let labels = self
            .columns
            .iter()
            .filter(|c| c.kind == ColumnKind::Label)
            .count();
        if labels != 1 {
            return Err(Error::InvalidSchema {
                reason: format!("expected exactly one label column, found {labels}"),
            });
        }
        Ok(())
    }

    pub fn columns(&self) -> &[ColumnSchema] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn position_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, position: usize) -> &ColumnSchema {
        &self.columns[position]
    }

    pub fn label_position(&self) -> usize {
        self.columns
            .iter()
            .position(|c| c.kind == ColumnKind::Label)
            .expect("schema invariant: one label column")
    }

    /// Positions of the non-label columns, in schema order.
    pub fn attribute_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.columns
            .iter()
            .filter(|c| c.kind != ColumnKind::Label)
            .map(|c| c.position)
    }

    pub fn attribute_count(&self) -> usize {
        self.columns.len() - 1
    }

    /// Same column names and kinds in the same order.
    pub fn matches(&self, other: &Schema) -> bool {
        self.columns.len() == other.columns.len()
            && self
                .columns
                .iter()
                .zip(&other.columns)
                .all(|(a, b)| a.name == b.name && a.kind == b.kind)
    }

    /// The raw 45-column layout of the published UNSW-NB15 attribute files:
    /// a record id, 42 flow attributes (39 numeric, 3 nominal), the attack
    /// category, and the binary label.
    pub fn unsw_nb15_raw() -> Schema {
        use ColumnKind::*;
        let cols = [
            ("id", Numeric),
            ("dur", Numeric),
            ("proto", Nominal),
            ("service", Nominal),
            ("state", Nominal),
            ("spkts", Numeric),
            ("dpkts", Numeric),
            ("sbytes", Numeric),
            ("dbytes", Numeric),
            ("rate", Numeric),
            ("sttl", Numeric),
            ("dttl", Numeric),
            ("sload", Numeric),
            ("dload", Numeric),
            ("sloss", Numeric),
            ("dloss", Numeric),
            ("sinpkt", Numeric),
            ("dinpkt", Numeric),
            ("sjit", Numeric),
            ("djit", Numeric),
            ("swin", Numeric),
            ("stcpb", Numeric),
            ("dtcpb", Numeric),
            ("dwin", Numeric),
            ("tcprtt", Numeric),
            ("synack", Numeric),
            ("ackdat", Numeric),
            ("smean", Numeric),
            ("dmean", Numeric),
            ("trans_depth", Numeric),
            ("response_body_len", Numeric),
            ("ct_srv_src", Numeric),
            ("ct_state_ttl", Numeric),
            ("ct_dst_ltm", Numeric),
            ("ct_src_dport_ltm", Numeric),
            ("ct_dst_sport_ltm", Numeric),
            ("ct_dst_src_ltm", Numeric),
            ("is_ftp_login", Numeric),
            ("ct_ftp_cmd", Numeric),
            ("ct_flw_http_mthd", Numeric),
            ("ct_src_ltm", Numeric),
            ("ct_srv_dst", Numeric),
            ("is_sm_ips_ports", Numeric),
            ("attack_cat", Nominal),
            ("label", Label),
        ];
        Schema::new(
            cols.iter()
                .map(|(n, k)| (n.to_string(), *k))
                .collect(),
        )
        .expect("built-in schema is valid")
    }

    /// Look up a built-in schema by name.
    pub fn builtin(name: &str) -> Option<Schema> {
        match name {
            "unsw-nb15-raw" => Some(Schema::unsw_nb15_raw()),
            _ => None,
        }
    }
}

/// Versioned on-disk form of a schema, for synthetic datasets and custom files.
#[derive(Debug, Serialize, Deserialize)]
pub struct SchemaFile {
    pub version: u32,
    pub columns: Vec<SchemaFileColumn>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SchemaFileColumn {
    pub name: String,
    pub kind: ColumnKind,
}

pub const SCHEMA_FILE_VERSION: u32 = 1;

impl SchemaFile {
    pub fn from_schema(schema: &Schema) -> Self {
        SchemaFile {
            version: SCHEMA_FILE_VERSION,
            columns: schema
                .columns()
                .iter()
                .map(|c| SchemaFileColumn {
                    name: c.name.clone(),
                    kind: c.kind,
                })
                .collect(),
        }
    }

    pub fn into_schema(self) -> Result<Schema> {
        if self.version != SCHEMA_FILE_VERSION {
            return Err(Error::Artifact {
                reason: format!(
                    "schema file version {} is not supported (expected {})",
                    self.version, SCHEMA_FILE_VERSION
                ),
            });
        }
        Schema::new(self.columns.into_iter().map(|c| (c.name, c.kind)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unsw_raw_schema_shape() {
        let s = Schema::unsw_nb15_raw();
        assert_eq!(s.len(), 45);
        assert_eq!(s.attribute_count(), 44); // id + 42 attributes + attack_cat
        assert_eq!(s.label_position(), 44);
        let nominal = s
            .columns()
            .iter()
            .filter(|c| c.kind == ColumnKind::Nominal)
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>();
        assert_eq!(nominal, ["proto", "service", "state", "attack_cat"]);
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = Schema::new(vec![
            ("a".into(), ColumnKind::Numeric),
            ("a".into(), ColumnKind::Nominal),
            ("label".into(), ColumnKind::Label),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::InvalidSchema { .. }));
    }

    #[test]
    fn exactly_one_label_required() {
        assert!(Schema::new(vec![("a".into(), ColumnKind::Numeric)]).is_err());
        assert!(Schema::new(vec![
            ("a".into(), ColumnKind::Label),
            ("b".into(), ColumnKind::Label)
        ])
        .is_err());
    }
}
