//! Typed tabular data with stable row identities.
//!
//! Cells are kept as trimmed strings. Every column is also dictionary-encoded
//! so that equality tests, inverted indexes and entropy counts work on `u32`
//! codes; numeric columns additionally carry parsed `f64` shadow values.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttrKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeMeta {
    pub name: String,
    pub index: usize,
    pub kind: AttrKind,
    pub missing_token: String,
}

#[derive(Debug, Clone, PartialEq)]
struct Column {
    dictionary: Vec<String>,
    codes: Vec<u32>,
    missing: Option<u32>,
    numeric: Option<Vec<Option<f64>>>,
}

impl Column {
    fn build(cells: impl Iterator<Item = String>, missing_token: &str) -> Self {
        let mut lookup: HashMap<String, u32> = HashMap::new();
        let mut dictionary = Vec::new();
        let mut codes = Vec::new();
        for cell in cells {
            let code = *lookup.entry(cell.clone()).or_insert_with(|| {
                dictionary.push(cell);
                (dictionary.len() - 1) as u32
            });
            codes.push(code);
        }
        let missing = lookup.get(missing_token).copied();

        let parsed: Vec<Option<f64>> = dictionary
            .iter()
            .enumerate()
            .map(|(code, value)| {
                if Some(code as u32) == missing {
                    None
                } else {
                    parse_finite(value)
                }
            })
            .collect();
        let all_numeric = parsed
            .iter()
            .enumerate()
            .all(|(code, v)| v.is_some() || Some(code as u32) == missing);
        let numeric = all_numeric.then(|| codes.iter().map(|&c| parsed[c as usize]).collect());

        Column {
            dictionary,
            codes,
            missing,
            numeric,
        }
    }
}

fn parse_finite(value: &str) -> Option<f64> {
    value.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// An immutable relation instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    attributes: Vec<AttributeMeta>,
    rows: Vec<Vec<String>>,
    columns: Vec<Column>,
    missing_token: String,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub missing_token: String,
    /// Columns dropped before typing (id columns, label columns).
    pub exclude_cols: Vec<String>,
}

impl LoadOptions {
    pub fn excluding<I, S>(mut self, cols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.exclude_cols.extend(cols.into_iter().map(Into::into));
        self
    }
}

pub fn load_dataset(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Dataset::from_reader(file, options)
}

impl Dataset {
    pub fn from_rows(
        headers: Vec<String>,
        rows: Vec<Vec<String>>,
        missing_token: impl Into<String>,
    ) -> Result<Self> {
        let missing_token = missing_token.into();
        let mut seen = HashSet::new();
        for name in &headers {
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("duplicate column name {name:?}")));
            }
        }
        for (row, cells) in rows.iter().enumerate() {
            if cells.len() != headers.len() {
                return Err(Error::RowShape {
                    row,
                    expected: headers.len(),
                    found: cells.len(),
                });
            }
        }

        let columns: Vec<Column> = (0..headers.len())
            .map(|a| Column::build(rows.iter().map(|r| r[a].clone()), &missing_token))
            .collect();
        let attributes = headers
            .into_iter()
            .zip(&columns)
            .enumerate()
            .map(|(index, (name, col))| AttributeMeta {
                name,
                index,
                kind: if col.numeric.is_some() {
                    AttrKind::Numeric
                } else {
                    AttrKind::Categorical
                },
                missing_token: missing_token.clone(),
            })
            .collect();

        Ok(Dataset {
            attributes,
            rows,
            columns,
            missing_token,
        })
    }

    pub fn from_reader<R: Read>(reader: R, options: &LoadOptions) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = csv.headers()?.iter().map(str::to_owned).collect();

        for excluded in &options.exclude_cols {
            if !header.iter().any(|h| h == excluded) {
                return Err(Error::Schema(format!(
                    "excluded column {excluded:?} is not in the header"
                )));
            }
        }
        let keep: Vec<usize> = (0..header.len())
            .filter(|&i| !options.exclude_cols.contains(&header[i]))
            .collect();

        let mut rows = Vec::new();
        for (row, record) in csv.records().enumerate() {
            let record = record?;
            if record.len() != header.len() {
                return Err(Error::RowShape {
                    row,
                    expected: header.len(),
                    found: record.len(),
                });
            }
            rows.push(keep.iter().map(|&i| record[i].to_owned()).collect());
        }
        let headers = keep.iter().map(|&i| header[i].clone()).collect();
        Dataset::from_rows(headers, rows, options.missing_token.clone())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn attributes(&self) -> &[AttributeMeta] {
        &self.attributes
    }

    pub fn attr_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn missing_token(&self) -> &str {
        &self.missing_token
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn row(&self, row: usize) -> &[String] {
        &self.rows[row]
    }

    pub fn cell(&self, row: usize, attr: usize) -> &str {
        &self.rows[row][attr]
    }

    pub fn is_missing(&self, row: usize, attr: usize) -> bool {
        let col = &self.columns[attr];
        col.missing == Some(col.codes[row])
    }

    /// Dictionary code of a cell. Codes are only comparable within a column.
    pub fn code(&self, row: usize, attr: usize) -> u32 {
        self.columns[attr].codes[row]
    }

    pub fn column_codes(&self, attr: usize) -> &[u32] {
        &self.columns[attr].codes
    }

    pub fn missing_code(&self, attr: usize) -> Option<u32> {
        self.columns[attr].missing
    }

    pub fn code_of(&self, attr: usize, value: &str) -> Option<u32> {
        self.columns[attr]
            .dictionary
            .iter()
            .position(|v| v == value)
            .map(|c| c as u32)
    }

    pub fn value_of(&self, attr: usize, code: u32) -> &str {
        &self.columns[attr].dictionary[code as usize]
    }

    /// Number of distinct raw values in a column, the missing token included.
    pub fn cardinality(&self, attr: usize) -> usize {
        self.columns[attr].dictionary.len()
    }

    /// Parsed shadow value; `None` for categorical columns and missing cells.
    pub fn numeric(&self, row: usize, attr: usize) -> Option<f64> {
        self.columns[attr].numeric.as_ref().and_then(|v| v[row])
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(self.attributes.iter().map(|a| a.name.as_str()))?;
        for row in &self.rows {
            csv.write_record(row)?;
        }
        csv.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file)
    }

    pub(crate) fn rows_cloned(&self) -> Vec<Vec<String>> {
        self.rows.clone()
    }

    pub(crate) fn header_names(&self) -> Vec<String> {
        self.attributes.iter().map(|a| a.name.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Clean,
    Dirty,
}

impl Label {
    fn parse(raw: &str) -> Option<Label> {
        match raw.trim().to_ascii_lowercase().as_str() {
            "clean" => Some(Label::Clean),
            "dirty" => Some(Label::Dirty),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Clean => "clean",
            Label::Dirty => "dirty",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub labels: BTreeMap<usize, Label>,
}

impl GroundTruth {
    pub fn new(labels: BTreeMap<usize, Label>) -> Self {
        GroundTruth { labels }
    }

    pub fn get(&self, row: usize) -> Option<Label> {
        self.labels.get(&row).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dirty_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .filter(|(_, l)| **l == Label::Dirty)
            .map(|(r, _)| *r)
    }

    /// Reads a label column out of a data file, aligned with row order.
    pub fn from_label_column(
        path: impl AsRef<Path>,
        column: &str,
        dataset: &Dataset,
    ) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut csv = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(file);
        let at = csv
            .headers()?
            .iter()
            .position(|h| h == column)
            .ok_or_else(|| Error::Schema(format!("label column {column:?} not found")))?;
        let mut labels = BTreeMap::new();
        for (row, record) in csv.records().enumerate() {
            let record = record?;
            if row >= dataset.len() {
                return Err(Error::Key {
                    row_id: row.to_string(),
                    rows: dataset.len(),
                });
            }
            let raw = record.get(at).unwrap_or("");
            let label = Label::parse(raw).ok_or_else(|| Error::Label {
                row,
                value: raw.to_owned(),
            })?;
            labels.insert(row, label);
        }
        Ok(GroundTruth { labels })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(["row_id", "label"])?;
        for (row, label) in &self.labels {
            csv.write_record([row.to_string().as_str(), label.as_str()])?;
        }
        csv.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Loads a two-column `row_id,label` file.
pub fn load_ground_truth(path: impl AsRef<Path>, dataset: &Dataset) -> Result<GroundTruth> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    ground_truth_from_reader(file, dataset)
}

pub fn ground_truth_from_reader<R: Read>(reader: R, dataset: &Dataset) -> Result<GroundTruth> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (id_at, label_at) = match (find("row_id"), find("label")) {
        (Some(i), Some(l)) => (i, l),
        _ if headers.is_empty() => return Ok(GroundTruth::default()),
        _ => {
            return Err(Error::Schema(
                "ground truth header must contain row_id and label".into(),
            ))
        }
    };

    let mut labels = BTreeMap::new();
    for record in csv.records() {
        let record = record?;
        let raw_id = record.get(id_at).unwrap_or("");
        let row = raw_id
            .parse::<usize>()
            .ok()
            .filter(|&r| r < dataset.len())
            .ok_or_else(|| Error::Key {
                row_id: raw_id.to_owned(),
                rows: dataset.len(),
            })?;
        let raw = record.get(label_at).unwrap_or("");
        let label = Label::parse(raw).ok_or_else(|| Error::Label {
            row,
            value: raw.to_owned(),
        })?;
        labels.insert(row, label);
    }
    Ok(GroundTruth { labels })
}
