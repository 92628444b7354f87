use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::schema::{ColumnKind, Schema};
use crate::error::{Error, Result};

/// Binary class of a flow record. Attack is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Normal,
    Attack,
}

impl Label {
    pub fn from_bit(bit: u8) -> Option<Label> {
        match bit {
            0 => Some(Label::Normal),
            1 => Some(Label::Attack),
            _ => None,
        }
    }

    pub fn as_bit(self) -> u8 {
        match self {
            Label::Normal => 0,
            Label::Attack => 1,
        }
    }

    pub fn is_attack(self) -> bool {
        self == Label::Attack
    }
}

/// A nominal column: category codes plus the vocabulary that interns them,
/// in first-appearance order.
#[derive(Debug, Clone, PartialEq)]
pub struct NominalColumn {
    codes: Vec<u32>,
    vocab: Vec<String>,
}

impl NominalColumn {
    pub fn from_values<I, S>(values: I) -> NominalColumn
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut builder = NominalBuilder::new();
        for v in values {
            builder.push(v.as_ref());
        }
        builder.finish()
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn category(&self, row: usize) -> &str {
        &self.vocab[self.codes[row] as usize]
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn select_rows(&self, rows: &[usize]) -> NominalColumn {
        NominalColumn::from_values(rows.iter().map(|&r| self.category(r)))
    }
}

/// Incremental builder that interns categories as they appear.
pub struct NominalBuilder {
    codes: Vec<u32>,
    vocab: Vec<String>,
    index: HashMap<String, u32>,
}

impl NominalBuilder {
    pub fn new() -> Self {
        NominalBuilder {
            codes: Vec::new(),
            vocab: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn push(&mut self, value: &str) {
        let code = match self.index.get(value) {
            Some(&c) => c,
            None => {
                let c = self.vocab.len() as u32;
                self.vocab.push(value.to_string());
                self.index.insert(value.to_string(), c);
                c
            }
        };
        self.codes.push(code);
    }

    pub fn finish(self) -> NominalColumn {
        NominalColumn {
            codes: self.codes,
            vocab: self.vocab,
        }
    }
}

impl Default for NominalBuilder {
    fn default() -> Self {
        Self::new()
    }
}

/// Column storage, parallel to the schema.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Nominal(NominalColumn),
    Label(Vec<Label>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Nominal(c) => c.len(),
            Column::Label(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            Column::Numeric(_) => ColumnKind::Numeric,
            Column::Nominal(_) => ColumnKind::Nominal,
            Column::Label(_) => ColumnKind::Label,
        }
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match self {
            Column::Numeric(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_nominal(&self) -> Option<&NominalColumn> {
        match self {
            Column::Nominal(c) => Some(c),
            _ => None,
        }
    }
}

/// Immutable column-oriented table of flow records with a binary label.
///
/// Numeric cells are finite, labels are 0/1, and every column has the same
/// length; all three are checked at construction. Values are safe to share
/// across worker threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    columns: Vec<Column>,
    row_count: usize,
}

/// Attack/normal counts of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub attack_count: usize,
    pub normal_count: usize,
    pub attack_fraction: f64,
}

impl Dataset {
    pub fn from_columns(schema: Schema, columns: Vec<Column>) -> Result<Dataset> {
        if columns.len() != schema.len() {
            return Err(Error::InvalidSchema {
                reason: format!(
                    "schema has {} columns but {} were provided",
                    schema.len(),
                    columns.len()
                ),
            });
        }
        let row_count = columns.first().map_or(0, Column::len);
        for (col, meta) in columns.iter().zip(schema.columns()) {
            if col.kind() != meta.kind {
                return Err(Error::InvalidSchema {
                    reason: format!("column {:?} has mismatched kind", meta.name),
                });
            }
            if col.len() != row_count {
                return Err(Error::InvalidSchema {
                    reason: format!(
                        "column {:?} has {} rows, expected {}",
                        meta.name,
                        col.len(),
                        row_count
                    ),
                });
            }
            if let Column::Numeric(values) = col {
                if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NumericParse {
                        row: i + 1,
                        column: meta.name.clone(),
                        value: values[i].to_string(),
                    });
                }
            }
        }
        Ok(Dataset {
            schema,
            columns,
            row_count,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn column(&self, position: usize) -> &Column {
        &self.columns[position]
    }

    pub fn column_by_name(&self, name: &str) -> Option<&Column> {
        self.schema.position_of(name).map(|p| &self.columns[p])
    }

    pub fn labels(&self) -> &[Label] {
        match &self.columns[self.schema.label_position()] {
            Column::Label(v) => v,
            _ => unreachable!("label position holds the label column"),
        }
    }

    /// Parse an RFC 4180 CSV file whose header matches `schema` in name and
    /// order. Row numbers in errors are 1-based over data rows.
    pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
        let path = path.as_ref();
        let path_str = path.display().to_string();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path_str.clone(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(file);

        let headers = reader.headers().map_err(|source| Error::Csv {
            path: path_str.clone(),
            source,
        })?;
        if headers.len() != schema.len() {
            return Err(Error::HeaderMismatch {
                path: path_str,
                position: headers.len().min(schema.len()),
                expected: schema
                    .columns()
                    .get(headers.len())
                    .map(|c| c.name.clone())
                    .unwrap_or_else(|| format!("{} columns", schema.len())),
                found: headers
                    .get(schema.len())
                    .map(str::to_string)
                    .unwrap_or_else(|| format!("{} columns", headers.len())),
            });
        }
        for (i, (header, col)) in headers.iter().zip(schema.columns()).enumerate() {
            if header != col.name {
                return Err(Error::HeaderMismatch {
                    path: path_str,
                    position: i,
                    expected: col.name.clone(),
                    found: header.to_string(),
                });
            }
        }

        enum Builder {
            Numeric(Vec<f64>),
            Nominal(NominalBuilder),
            Label(Vec<Label>),
        }
        let mut builders: Vec<Builder> = schema
            .columns()
            .iter()
            .map(|c| match c.kind {
                ColumnKind::Numeric => Builder::Numeric(Vec::new()),
                ColumnKind::Nominal => Builder::Nominal(NominalBuilder::new()),
                ColumnKind::Label => Builder::Label(Vec::new()),
            })
            .collect();

        let mut record = csv::StringRecord::new();
        let mut row = 0usize;
        loop {
            match reader.read_record(&mut record) {
                Ok(false) => break,
                Ok(true) => {}
                Err(source) => {
                    return Err(Error::Csv {
                        path: path_str,
                        source,
                    })
                }
            }
            row += 1;
            if record.len() != schema.len() {
                return Err(Error::RaggedRow {
                    row,
                    expected: schema.len(),
                    found: record.len(),
                });
            }
            for (field, (builder, col)) in record
                .iter()
                .zip(builders.iter_mut().zip(schema.columns()))
            {
                match builder {
                    Builder::Numeric(values) => {
                        let parsed = field.trim().parse::<f64>().ok().filter(|v| v.is_finite());
                        match parsed {
                            Some(v) => values.push(v),
                            None => {
                                return Err(Error::NumericParse {
                                    row,
                                    column: col.name.clone(),
                                    value: field.to_string(),
                                })
                            }
                        }
                    }
                    Builder::Nominal(b) => b.push(field),
                    Builder::Label(values) => {
                        let label = match field.trim() {
                            "0" => Label::Normal,
                            "1" => Label::Attack,
                            other => {
                                return Err(Error::LabelParse {
                                    row,
                                    column: col.name.clone(),
                                    value: other.to_string(),
                                })
                            }
                        };
                        values.push(label);
                    }
                }
            }
        }

        let columns = builders
            .into_iter()
            .map(|b| match b {
                Builder::Numeric(v) => Column::Numeric(v),
                Builder::Nominal(b) => Column::Nominal(b.finish()),
                Builder::Label(v) => Column::Label(v),
            })
            .collect();
        Dataset::from_columns(schema.clone(), columns)
    }

    /// Write the table back out as RFC 4180 CSV with a header row. Floats use
    /// the shortest representation that parses back to the same value, so a
    /// write/load round trip reproduces the dataset exactly.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let path_str = path.display().to_string();
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path_str.clone(),
            source,
        })?;
        let mut writer = csv::Writer::from_writer(file);
        let io_err = |source: csv::Error| Error::Csv {
            path: path_str.clone(),
            source,
        };

        writer
            .write_record(self.schema.columns().iter().map(|c| c.name.as_str()))
            .map_err(io_err)?;
        let mut record = Vec::with_capacity(self.schema.len());
        for row in 0..self.row_count {
            record.clear();
            for col in &self.columns {
                match col {
                    Column::Numeric(v) => record.push(v[row].to_string()),
                    Column::Nominal(c) => record.push(c.category(row).to_string()),
                    Column::Label(v) => record.push(v[row].as_bit().to_string()),
                }
            }
            writer.write_record(&record).map_err(io_err)?;
        }
        writer.flush().map_err(|source| Error::Io {
            path: path_str,
            source,
        })?;
        Ok(())
    }

    /// New dataset without the named columns. The label column cannot be
    /// dropped; positions re-compact.
    pub fn drop_columns(&self, names: &[&str]) -> Result<Dataset> {
        let mut drop = vec![false; self.schema.len()];
        for name in names {
            let pos = self
                .schema
                .position_of(name)
                .ok_or_else(|| Error::UnknownColumn {
                    name: name.to_string(),
                })?;
            if self.schema.column(pos).kind == ColumnKind::Label {
                return Err(Error::LabelColumn {
                    name: name.to_string(),
                });
            }
            drop[pos] = true;
        }
        let mut cols = Vec::new();
        let mut kept = Vec::new();
        for (i, col) in self.columns.iter().enumerate() {
            if !drop[i] {
                let meta = self.schema.column(i);
                cols.push((meta.name.clone(), meta.kind));
                kept.push(col.clone());
            }
        }
        Dataset::from_columns(Schema::new(cols)?, kept)
    }

    pub fn class_distribution(&self) -> ClassDistribution {
        let attack_count = self.labels().iter().filter(|l| l.is_attack()).count();
        let normal_count = self.row_count - attack_count;
        let attack_fraction = if self.row_count == 0 {
            0.0
        } else {
            attack_count as f64 / self.row_count as f64
        };
        ClassDistribution {
            attack_count,
            normal_count,
            attack_fraction,
        }
    }

    /// Keep only the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|col| match col {
                Column::Numeric(v) => Column::Numeric(rows.iter().map(|&r| v[r]).collect()),
                Column::Nominal(c) => Column::Nominal(c.select_rows(rows)),
                Column::Label(v) => Column::Label(rows.iter().map(|&r| v[r]).collect()),
            })
            .collect();
        Dataset {
            schema: self.schema.clone(),
            columns,
            row_count: rows.len(),
        }
    }

    /// SHA-256 over a canonical byte serialization of schema and cells;
    /// stable across runs for identical content.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for col in self.schema.columns() {
            hasher.update(col.name.as_bytes());
            hasher.update([match col.kind {
                ColumnKind::Numeric => 0u8,
                ColumnKind::Nominal => 1,
                ColumnKind::Label => 2,
            }]);
        }
        hasher.update((self.row_count as u64).to_le_bytes());
        for col in &self.columns {
            match col {
                Column::Numeric(v) => {
                    for x in v {
                        hasher.update(x.to_le_bytes());
                    }
                }
                Column::Nominal(c) => {
                    for code in c.codes() {
                        hasher.update(code.to_le_bytes());
                    }
                    for cat in c.vocab() {
                        hasher.update(cat.as_bytes());
                        hasher.update([0xff]);
                    }
                }
                Column::Label(v) => {
                    for l in v {
                        hasher.update([l.as_bit()]);
                    }
                }
            }
        }
        hex_string(&hasher.finalize())
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        use std::fmt::Write;
        write!(s, "{b:02x}").unwrap();
    }
    s
}
