// Copyright 2026 The SHARQ Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Relational datasets: loading, discretization, sampling and element queries.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SharqError};

/// An attribute-value pair. Elements order by `(attribute, value)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element {
    #[serde(rename = "attr")]
    pub attribute: String,
    pub value: String,
}

impl Element {
    pub fn new(attribute: impl Into<String>, value: impl Into<String>) -> Self {
        Element {
            attribute: attribute.into(),
            value: value.into(),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.attribute, self.value)
    }
}

impl FromStr for Element {
    type Err = SharqError;

    /// Parses `ATTR=VALUE`, splitting at the first `=`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('=') {
            Some((attr, value)) if !attr.trim().is_empty() => {
                Ok(Element::new(attr.trim(), value.trim()))
            }
            _ => Err(SharqError::Config(format!(
                "element selector {s:?} is not of the form ATTR=VALUE"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LoadOptions {
    pub delimiter: u8,
    pub missing_token: String,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            delimiter: b',',
            missing_token: String::new(),
        }
    }
}

/// Which columns `discretize` treats as numeric.
#[derive(Clone, Debug, Default)]
pub enum NumericDetection {
    /// Every column whose non-missing values all parse as finite numbers.
    #[default]
    Auto,
    /// Only the named columns, and only if they are numeric.
    Columns(Vec<String>),
    /// Leave every column untouched.
    Disabled,
}

/// A relational table with a total value for every attribute of every row.
///
/// Immutable once built; every transformation returns a new dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    attributes: Vec<String>,
    rows: Vec<Vec<String>>,
    missing_token: String,
}

impl Dataset {
    pub fn from_rows(attributes: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self> {
        Self::with_missing_token(attributes, rows, String::new())
    }

    pub fn with_missing_token(
        attributes: Vec<String>,
        rows: Vec<Vec<String>>,
        missing_token: String,
    ) -> Result<Self> {
        check_header(&attributes)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != attributes.len() {
                return Err(SharqError::Parse {
                    line: i as u64 + 2,
                    message: format!("expected {} fields, found {}", attributes.len(), row.len()),
                });
            }
        }
        Ok(Dataset {
            attributes,
            rows,
            missing_token,
        })
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn missing_token(&self) -> &str {
        &self.missing_token
    }

    pub fn attribute_index(&self, attribute: &str) -> Result<usize> {
        self.attributes
            .iter()
            .position(|a| a == attribute)
            .ok_or_else(|| SharqError::Lookup(format!("unknown attribute {attribute:?}")))
    }

    /// Observed values of one column.
    pub fn domain(&self, attribute: &str) -> Result<BTreeSet<String>> {
        let col = self.attribute_index(attribute)?;
        Ok(self.rows.iter().map(|r| r[col].clone()).collect())
    }

    pub fn domains(&self) -> BTreeMap<String, BTreeSet<String>> {
        self.attributes
            .iter()
            .enumerate()
            .map(|(col, a)| {
                (
                    a.clone(),
                    self.rows.iter().map(|r| r[col].clone()).collect(),
                )
            })
            .collect()
    }

    /// The elements of one row.
    pub fn row_elements(&self, row: usize) -> impl Iterator<Item = Element> + '_ {
        self.attributes
            .iter()
            .zip(&self.rows[row])
            .map(|(a, v)| Element::new(a.clone(), v.clone()))
    }

    /// Every (attribute, value) pair that occurs in some row.
    pub fn elements(&self) -> BTreeSet<Element> {
        let mut out = BTreeSet::new();
        for (col, attr) in self.attributes.iter().enumerate() {
            for row in &self.rows {
                out.insert(Element::new(attr.clone(), row[col].clone()));
            }
        }
        out
    }

    /// Fraction of rows holding `element.value` in column `element.attribute`.
    pub fn element_frequency(&self, element: &Element) -> Result<f64> {
        let col = self.attribute_index(&element.attribute)?;
        if self.rows.is_empty() {
            return Err(SharqError::Precondition(
                "element frequency over an empty dataset".into(),
            ));
        }
        let hits = self.rows.iter().filter(|r| r[col] == element.value).count();
        Ok(hits as f64 / self.rows.len() as f64)
    }

    /// Count of rows containing every element of `elements`.
    ///
    /// An element naming an attribute the dataset lacks matches no row.
    pub fn count_matching<'a, I>(&self, elements: I) -> usize
    where
        I: IntoIterator<Item = &'a Element>,
    {
        let mut columns = Vec::new();
        for e in elements {
            match self.attribute_index(&e.attribute) {
                Ok(col) => columns.push((col, e.value.as_str())),
                Err(_) => return 0,
            }
        }
        self.rows
            .iter()
            .filter(|row| columns.iter().all(|(col, v)| row[*col] == *v))
            .count()
    }

    /// Replaces numeric columns with equal-width bin labels `"lo-hi"` over `[min, max]`.
    pub fn discretize(&self, bins: usize, detection: &NumericDetection) -> Result<Dataset> {
        if bins < 2 {
            return Err(SharqError::Config(format!(
                "bins must be at least 2, got {bins}"
            )));
        }
        let mut rows = self.rows.clone();
        for (col, attr) in self.attributes.iter().enumerate() {
            let wanted = match detection {
                NumericDetection::Auto => true,
                NumericDetection::Columns(names) => names.iter().any(|n| n == attr),
                NumericDetection::Disabled => false,
            };
            if !wanted {
                continue;
            }
            let Some(values) = self.numeric_column(col) else {
                continue;
            };
            let labels = bin_labels(&values, bins);
            for (row, label) in rows.iter_mut().zip(labels) {
                if let Some(label) = label {
                    row[col] = label;
                }
            }
        }
        Ok(Dataset {
            attributes: self.attributes.clone(),
            rows,
            missing_token: self.missing_token.clone(),
        })
    }

    /// Parsed values of a column, `None` for missing cells; `None` overall if the
    /// column is not numeric.
    fn numeric_column(&self, col: usize) -> Option<Vec<Option<f64>>> {
        let mut any = false;
        let mut out = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let cell = &row[col];
            if *cell == self.missing_token {
                out.push(None);
                continue;
            }
            let x: f64 = cell.trim().parse().ok()?;
            if !x.is_finite() {
                return None;
            }
            any = true;
            out.push(Some(x));
        }
        any.then_some(out)
    }

    /// Uniform sample without replacement of `min(n, len)` rows, kept in their
    /// original order.
    pub fn sample_rows(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(SharqError::Config("sample size must be positive".into()));
        }
        let rows = if n >= self.rows.len() {
            self.rows.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = rand::seq::index::sample(&mut rng, self.rows.len(), n).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| self.rows[i].clone()).collect()
        };
        Ok(Dataset {
            attributes: self.attributes.clone(),
            rows,
            missing_token: self.missing_token.clone(),
        })
    }
}

fn check_header(attributes: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for a in attributes {
        if a.is_empty() {
            return Err(SharqError::Config("empty attribute name in header".into()));
        }
        if !seen.insert(a.as_str()) {
            return Err(SharqError::Config(format!(
                "duplicate attribute name {a:?} in header"
            )));
        }
    }
    Ok(())
}

fn bin_labels(values: &[Option<f64>], bins: usize) -> Vec<Option<String>> {
    let present = values.iter().flatten();
    let min = present.clone().copied().fold(f64::INFINITY, f64::min);
    let max = present.copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        let label = format!("{min:.1}-{max:.1}");
        return values.iter().map(|v| v.map(|_| label.clone())).collect();
    }
    let width = (max - min) / bins as f64;
    let label = |b: usize| {
        let lo = min + width * b as f64;
        let hi = if b + 1 == bins {
            max
        } else {
            min + width * (b + 1) as f64
        };
        format!("{lo:.1}-{hi:.1}")
    };
    values
        .iter()
        .map(|v| {
            v.map(|x| {
                let b = (((x - min) / width).floor() as usize).min(bins - 1);
                label(b)
            })
        })
        .collect()
}

/// Reads a delimited file whose first record is the header.
pub fn load_dataset(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset> {
    let file = std::fs::File::open(path.as_ref())?;
    read_dataset(file, options)
}

pub fn read_dataset<R: std::io::Read>(reader: R, options: &LoadOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let attributes: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    check_header(&attributes)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != attributes.len() {
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            return Err(SharqError::Parse {
                line,
                message: format!(
                    "expected {} fields, found {}",
                    attributes.len(),
                    record.len()
                ),
            });
        }
        rows.push(record.iter().map(str::to_string).collect());
    }
    Dataset::with_missing_token(attributes, rows, options.missing_token.clone())
}
