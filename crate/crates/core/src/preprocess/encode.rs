use serde::{Deserialize, Serialize};

use crate::dataset::{Column, ColumnKind, Dataset, Schema};
use crate::error::{Error, Result};

const VERSION: u32 = 1;

/// Ordered one-hot vocabularies, one per nominal column.
///
/// Category order is deterministic: first appearance in the training rows,
/// then first appearance in the testing rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderMap {
    version: u32,
    columns: Vec<ColumnVocab>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ColumnVocab {
    name: String,
    categories: Vec<String>,
}

impl EncoderMap {
    pub fn categories(&self, name: &str) -> Option<&[String]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.categories.as_slice())
    }

    /// Width of the encoded feature space for `schema`: numeric attribute
    /// count plus the vocabulary sizes of its nominal columns.
    pub fn encoded_width(&self, schema: &Schema) -> Result<usize> {
        let mut width = 0;
        for meta in schema.columns() {
            match meta.kind {
                ColumnKind::Numeric => width += 1,
                ColumnKind::Nominal => {
                    width += self
                        .categories(&meta.name)
                        .ok_or_else(|| Error::NotFitted {
                            artifact: "encoder".to_string(),
                            name: meta.name.clone(),
                        })?
                        .len()
                }
                ColumnKind::Label => {}
            }
        }
        Ok(width)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<EncoderMap> {
        let map: EncoderMap = serde_json::from_str(json)?;
        if map.version != VERSION {
            return Err(Error::Artifact {
                reason: format!(
                    "encoder version {} is not supported (expected {VERSION})",
                    map.version
                ),
            });
        }
        Ok(map)
    }
}

/// Build one-hot vocabularies over both predefined splits: per nominal
/// column, the union of categories observed in `train` then `test`, in
/// first-appearance order. The two datasets must share a schema.
pub fn fit_onehot(train: &Dataset, test: &Dataset) -> Result<EncoderMap> {
    if !train.schema().matches(test.schema()) {
        return Err(Error::SchemaMismatch {
            reason: "train and test schemas differ".to_string(),
        });
    }
    let mut columns = Vec::new();
    for meta in train.schema().columns() {
        if meta.kind != ColumnKind::Nominal {
            continue;
        }
        let mut categories: Vec<String> = Vec::new();
        for d in [train, test] {
            let col = d
                .column(meta.position)
                .as_nominal()
                .expect("nominal kind holds nominal column");
            // A column vocabulary is already in first-appearance order, but
            // may contain categories no surviving row references; walk rows.
            let mut seen = vec![false; col.vocab().len()];
            for &code in col.codes() {
                let code = code as usize;
                if !seen[code] {
                    seen[code] = true;
                    let cat = &col.vocab()[code];
                    if !categories.iter().any(|c| c == cat) {
                        categories.push(cat.clone());
                    }
                }
            }
        }
        columns.push(ColumnVocab {
            name: meta.name.clone(),
            categories,
        });
    }
    Ok(EncoderMap {
        version: VERSION,
        columns,
    })
}

/// Replace each nominal column with its indicator block. Output column order:
/// numeric columns in original order, then one encoded block per nominal
/// column in original order, then the label. A category absent from the
/// vocabulary maps to the all-zero vector.
pub fn apply_onehot(map: &EncoderMap, d: &Dataset) -> Result<Dataset> {
    let rows = d.row_count();
    let mut names: Vec<(String, ColumnKind)> = Vec::new();
    let mut columns: Vec<Column> = Vec::new();

    for meta in d.schema().columns() {
        if meta.kind == ColumnKind::Numeric {
            names.push((meta.name.clone(), ColumnKind::Numeric));
            columns.push(d.column(meta.position).clone());
        }
    }
    for meta in d.schema().columns() {
        if meta.kind != ColumnKind::Nominal {
            continue;
        }
        let categories = map.categories(&meta.name).ok_or_else(|| Error::NotFitted {
            artifact: "encoder".to_string(),
            name: meta.name.clone(),
        })?;
        let col = d
            .column(meta.position)
            .as_nominal()
            .expect("nominal kind holds nominal column");
        // Dataset code -> indicator column offset, or None when the category
        // is out of vocabulary.
        let translate: Vec<Option<usize>> = col
            .vocab()
            .iter()
            .map(|cat| categories.iter().position(|c| c == cat))
            .collect();
        let mut block = vec![vec![0.0f64; rows]; categories.len()];
        for (row, &code) in col.codes().iter().enumerate() {
            if let Some(offset) = translate[code as usize] {
                block[offset][row] = 1.0;
            }
        }
        for (cat, indicator) in categories.iter().zip(block) {
            names.push((format!("{}={}", meta.name, cat), ColumnKind::Numeric));
            columns.push(Column::Numeric(indicator));
        }
    }
    let label_pos = d.schema().label_position();
    names.push((
        d.schema().column(label_pos).name.clone(),
        ColumnKind::Label,
    ));
    columns.push(d.column(label_pos).clone());

    Dataset::from_columns(Schema::new(names)?, columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Label, NominalColumn};

    fn proto_dataset(categories: &[&str], labels_attack: bool) -> Dataset {
        let schema = Schema::new(vec![
            ("num".into(), ColumnKind::Numeric),
            ("protocol_type".into(), ColumnKind::Nominal),
            ("label".into(), ColumnKind::Label),
        ])
        .unwrap();
        let label = if labels_attack {
            Label::Attack
        } else {
            Label::Normal
        };
        Dataset::from_columns(
            schema,
            vec![
                Column::Numeric((0..categories.len()).map(|i| i as f64).collect()),
                Column::Nominal(NominalColumn::from_values(categories)),
                Column::Label(vec![label; categories.len()]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn three_protocols_encode_as_exact_indicators() {
        let train = proto_dataset(&["UDP", "TCP", "ICMP"], true);
        let map = fit_onehot(&train, &train).unwrap();
        assert_eq!(
            map.categories("protocol_type").unwrap(),
            ["UDP", "TCP", "ICMP"]
        );
        let out = apply_onehot(&map, &train).unwrap();
        // numeric first, then the indicator block, then the label
        let names: Vec<&str> = out
            .schema()
            .columns()
            .iter()
            .map(|c| c.name.as_str())
            .collect();
        assert_eq!(
            names,
            [
                "num",
                "protocol_type=UDP",
                "protocol_type=TCP",
                "protocol_type=ICMP",
                "label"
            ]
        );
        assert_eq!(out.column(1).as_numeric().unwrap(), &[1.0, 0.0, 0.0]);
        assert_eq!(out.column(2).as_numeric().unwrap(), &[0.0, 1.0, 0.0]);
        assert_eq!(out.column(3).as_numeric().unwrap(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn vocabulary_is_train_then_test_first_appearance() {
        let train = proto_dataset(&["tcp", "udp", "tcp"], true);
        let test = proto_dataset(&["icmp", "udp", "arp"], false);
        let map = fit_onehot(&train, &test).unwrap();
        assert_eq!(
            map.categories("protocol_type").unwrap(),
            ["tcp", "udp", "icmp", "arp"]
        );
        assert_eq!(map.encoded_width(train.schema()).unwrap(), 5); // 1 numeric + 4
    }

    #[test]
    fn single_category_column_encodes_to_all_ones() {
        let train = proto_dataset(&["only", "only"], true);
        let map = fit_onehot(&train, &train).unwrap();
        let out = apply_onehot(&map, &train).unwrap();
        assert_eq!(out.column(1).as_numeric().unwrap(), &[1.0, 1.0]);
    }

    #[test]
    fn out_of_vocabulary_category_maps_to_all_zeros() {
        let train = proto_dataset(&["tcp", "udp"], true);
        let map = fit_onehot(&train, &train).unwrap();
        let unseen = proto_dataset(&["gre", "tcp"], false);
        let out = apply_onehot(&map, &unseen).unwrap();
        assert_eq!(out.column(1).as_numeric().unwrap(), &[0.0, 1.0]); // tcp
        assert_eq!(out.column(2).as_numeric().unwrap(), &[0.0, 0.0]); // udp
    }

    #[test]
    fn no_nominal_columns_is_identity() {
        let schema = Schema::new(vec![
            ("a".into(), ColumnKind::Numeric),
            ("b".into(), ColumnKind::Numeric),
            ("label".into(), ColumnKind::Label),
        ])
        .unwrap();
        let d = Dataset::from_columns(
            schema,
            vec![
                Column::Numeric(vec![1.0]),
                Column::Numeric(vec![2.0]),
                Column::Label(vec![Label::Attack]),
            ],
        )
        .unwrap();
        let map = fit_onehot(&d, &d).unwrap();
        assert_eq!(apply_onehot(&map, &d).unwrap(), d);
    }

    #[test]
    fn schema_mismatch_and_missing_column_errors() {
        let train = proto_dataset(&["tcp"], true);
        let other = Dataset::from_columns(
            Schema::new(vec![
                ("x".into(), ColumnKind::Numeric),
                ("label".into(), ColumnKind::Label),
            ])
            .unwrap(),
            vec![Column::Numeric(vec![1.0]), Column::Label(vec![Label::Normal])],
        )
        .unwrap();
        assert!(matches!(
            fit_onehot(&train, &other).unwrap_err(),
            Error::SchemaMismatch { .. }
        ));
        let map = fit_onehot(&other, &other).unwrap();
        assert!(matches!(
            apply_onehot(&map, &train).unwrap_err(),
            Error::NotFitted { .. }
        ));
    }

    #[test]
    fn encoder_json_round_trip() {
        let train = proto_dataset(&["tcp", "udp"], true);
        let map = fit_onehot(&train, &train).unwrap();
        let json = map.to_json().unwrap();
        assert_eq!(EncoderMap::from_json(&json).unwrap(), map);
    }
}
