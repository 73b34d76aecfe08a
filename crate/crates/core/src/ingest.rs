//! CSV loading: one-hot encoding of categorical columns, optional min-max
//! scaling of numeric columns, and protected-attribute extraction.
//!
//! A column is numeric when its first data cell parses as a number; every
//! other cell of a numeric column must then parse too. Categorical levels are
//! one-hot encoded in lexicographic order, so reloading a file always yields
//! the same feature layout.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::balance::BalanceRatio;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    MinMax,
    None,
}

/// Where a dataset lives and how to read it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub protected_column: String,
    /// Protected value mapped to label 1; the other value maps to 0.
    pub positive_label: String,
    #[serde(default)]
    pub drop_columns: Vec<String>,
    #[serde(default)]
    pub scale: Scale,
    /// Column holding external row ids; rows are numbered from 0 otherwise.
    #[serde(default)]
    pub id_column: Option<String>,
    /// Field delimiter; sniffed from the header when absent.
    #[serde(default)]
    pub delimiter: Option<char>,
}

impl DatasetSpec {
    pub fn new(
        path: impl Into<PathBuf>,
        protected_column: impl Into<String>,
        positive_label: impl Into<String>,
    ) -> Self {
        Self {
            path: path.into(),
            protected_column: protected_column.into(),
            positive_label: positive_label.into(),
            drop_columns: Vec::new(),
            scale: Scale::MinMax,
            id_column: None,
            delimiter: None,
        }
    }
}

enum Column {
    Numeric { name: String, values: Vec<f64> },
    Categorical { name: String, levels: Vec<String>, values: Vec<usize> },
}

pub fn load_csv(spec: &DatasetSpec) -> Result<Dataset> {
    let display = spec.path.display().to_string();
    let text = fs::read_to_string(&spec.path)?;
    parse_csv(&text, spec, &display)
}

fn sniff_delimiter(text: &str) -> u8 {
    let header = text.lines().next().unwrap_or("");
    if header.matches(';').count() > header.matches(',').count() {
        b';'
    } else {
        b','
    }
}

fn parse_csv(text: &str, spec: &DatasetSpec, path: &str) -> Result<Dataset> {
    let ingest = |message: String| Error::Ingest {
        path: path.to_string(),
        message,
    };
    if text.trim().is_empty() {
        return Err(Error::EmptyFile { path: path.into() });
    }
    let delimiter = match spec.delimiter {
        Some(c) if c.is_ascii() => c as u8,
        Some(c) => return Err(ingest(format!("delimiter {c:?} is not ASCII"))),
        None => sniff_delimiter(text),
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| ingest(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let column_index = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                path: path.into(),
                column: name.into(),
            })
    };
    let protected_col = column_index(&spec.protected_column)?;
    let id_col = spec.id_column.as_deref().map(column_index).transpose()?;
    let mut excluded: HashSet<usize> = spec
        .drop_columns
        .iter()
        .map(|c| column_index(c))
        .collect::<Result<_>>()?;
    excluded.insert(protected_col);
    excluded.extend(id_col);

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ingest(format!("row {}: {e}", i + 1)))?;
        let cells: Vec<String> = record.iter().map(|c| c.trim().to_string()).collect();
        if let Some(j) = cells.iter().position(String::is_empty) {
            return Err(Error::MissingValue {
                path: path.into(),
                row: i + 1,
                column: headers[j].clone(),
            });
        }
        rows.push(cells);
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile { path: path.into() });
    }

    let levels: BTreeSet<&str> = rows.iter().map(|r| r[protected_col].as_str()).collect();
    if levels.len() > 2 {
        return Err(Error::ProtectedNotBinary {
            path: path.into(),
            column: spec.protected_column.clone(),
            count: levels.len(),
        });
    }
    if !levels.contains(spec.positive_label.as_str()) {
        return Err(ingest(format!(
            "positive label {:?} does not occur in column `{}`",
            spec.positive_label, spec.protected_column
        )));
    }
    let protected: Vec<u8> = rows
        .iter()
        .map(|r| u8::from(r[protected_col] == spec.positive_label))
        .collect();

    let mut columns = Vec::new();
    for (j, name) in headers.iter().enumerate() {
        if excluded.contains(&j) {
            continue;
        }
        if rows[0][j].parse::<f64>().is_ok() {
            let values = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    r[j].parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::UnparseableNumeric {
                            path: path.into(),
                            row: i + 1,
                            column: name.clone(),
                            value: r[j].clone(),
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            columns.push(Column::Numeric {
                name: name.clone(),
                values,
            });
        } else {
            let levels: Vec<String> = rows
                .iter()
                .map(|r| r[j].clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let values = rows
                .iter()
                .map(|r| levels.binary_search(&r[j]).expect("level present"))
                .collect();
            columns.push(Column::Categorical {
                name: name.clone(),
                levels,
                values,
            });
        }
    }
    if columns.is_empty() {
        return Err(ingest("no feature columns remain".into()));
    }

    let n = rows.len();
    let mut features = vec![Vec::new(); n];
    let mut names = Vec::new();
    for column in columns {
        match column {
            Column::Numeric { name, mut values } => {
                if spec.scale == Scale::MinMax {
                    min_max(&mut values);
                }
                for (row, v) in features.iter_mut().zip(values) {
                    row.push(v);
                }
                names.push(name);
            }
            Column::Categorical {
                name,
                levels,
                values,
            } => {
                for (row, &level) in features.iter_mut().zip(&values) {
                    row.extend((0..levels.len()).map(|l| if l == level { 1.0 } else { 0.0 }));
                }
                names.extend(levels.iter().map(|l| format!("{name}={l}")));
            }
        }
    }
    let row_ids = match id_col {
        Some(c) => rows.iter().map(|r| r[c].clone()).collect(),
        None => (0..n).map(|i| i.to_string()).collect(),
    };
    Dataset::with_names(features, protected, row_ids, names)
}

/// Rescales to [0, 1]; a constant column becomes all zeros.
fn min_max(values: &mut [f64]) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    for v in values.iter_mut() {
        *v = if range > 0.0 { (*v - lo) / range } else { 0.0 };
    }
}

/// Balance of the whole dataset; errors if a group is absent.
pub fn dataset_balance(data: &Dataset) -> Result<BalanceRatio> {
    data.balance()
}

/// Writes a dataset back out as CSV with a `protected` column of 0/1 labels.
pub fn write_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["id".to_string()];
    header.extend(data.feature_names().iter().cloned());
    header.push("protected".into());
    w.write_record(&header)?;
    for i in 0..data.len() {
        let mut rec = vec![data.row_ids()[i].clone()];
        rec.extend(data.row(i).iter().map(|v| v.to_string()));
        rec.push(data.label(i).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> DatasetSpec {
        DatasetSpec::new("mem.csv", "sex", "F")
    }

    fn parse(text: &str, spec: &DatasetSpec) -> Result<Dataset> {
        parse_csv(text, spec, "mem.csv")
    }

    #[test]
    fn one_hot_width() {
        let text = "age,school,score,sex\n15,GP,3.5,F\n16,MS,2.0,M\n17,GP,1.0,F\n";
        let d = parse(text, &spec()).unwrap();
        assert_eq!(d.dim(), 2 + 2);
        assert_eq!(d.feature_names(), ["age", "school=GP", "school=MS", "score"]);
        assert_eq!(d.row(0), [0.0, 1.0, 0.0, 1.0]);
        assert_eq!(d.row(1), [0.5, 0.0, 1.0, 0.4]);
        assert_eq!(d.protected(), [1, 0, 1]);
    }

    #[test]
    fn constant_column_scales_to_zero() {
        let d = parse("a,b,sex\n4,1,F\n4,2,M\n4,3,M\n", &spec()).unwrap();
        assert!(d.features().iter().all(|r| r[0] == 0.0));
        assert!(d.features().iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn unscaled_keeps_raw_values() {
        let mut s = spec();
        s.scale = Scale::None;
        let d = parse("a,sex\n10,F\n30,M\n", &s).unwrap();
        assert_eq!(d.features(), [vec![10.0], vec![30.0]]);
    }

    #[test]
    fn semicolon_files_and_quotes() {
        let text = "\"school\";\"sex\";\"age\"\n\"GP\";\"F\";18\n\"MS\";\"M\";17\n";
        let d = parse(text, &spec()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.dim(), 3);
        assert_eq!(d.group_counts(), [1, 1]);
    }

    #[test]
    fn dropped_and_id_columns_are_not_features() {
        let mut s = spec();
        s.drop_columns = vec!["noise".into()];
        s.id_column = Some("sid".into());
        let d = parse("sid,noise,a,sex\nx1,9,1,F\nx2,8,2,M\n", &s).unwrap();
        assert_eq!(d.feature_names(), ["a"]);
        assert_eq!(d.row_ids(), ["x1", "x2"]);
    }

    #[test]
    fn diagnostics_are_distinct() {
        assert!(matches!(
            parse("a,gender\n1,F\n", &spec()),
            Err(Error::MissingColumn { column, .. }) if column == "sex"
        ));
        assert!(matches!(
            parse("a,sex\n1,F\n2,M\n3,X\n", &spec()),
            Err(Error::ProtectedNotBinary { count: 3, .. })
        ));
        assert!(matches!(
            parse("a,sex\n1,F\nabc,M\n", &spec()),
            Err(Error::UnparseableNumeric { row: 2, column, value, .. }) if column == "a" && value == "abc"
        ));
        assert!(matches!(parse("", &spec()), Err(Error::EmptyFile { .. })));
        assert!(matches!(parse("a,sex\n", &spec()), Err(Error::EmptyFile { .. })));
        assert!(matches!(
            parse("a,b,sex\n1,2,F\n3,,M\n", &spec()),
            Err(Error::MissingValue { row: 2, column, .. }) if column == "b"
        ));
        assert!(matches!(
            parse("a,sex\n1,M\n2,M\n", &spec()),
            Err(Error::Ingest { .. })
        ));
        let mut s = spec();
        s.drop_columns = vec!["a".into()];
        assert!(matches!(parse("a,sex\n1,F\n", &s), Err(Error::Ingest { .. })));
    }

    #[test]
    fn dataset_level_balance() {
        let mut text = String::from("a,sex\n");
        for i in 0..50 {
            text.push_str(&format!("{i},{}\n", if i < 10 { "F" } else { "M" }));
        }
        let d = parse(&text, &spec()).unwrap();
        assert_eq!(dataset_balance(&d).unwrap().value(), 0.25);
    }
}
