use std::collections::BTreeSet;
use std::fmt;

use chrono::{Datelike, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

/// Closed set of attribute data types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DataType {
    #[serde(rename = "text")]
    Text,
    #[serde(rename = "date")]
    Date,
    #[serde(rename = "Boolean", alias = "boolean")]
    Boolean,
    #[serde(rename = "geospatial")]
    Geospatial,
    #[serde(rename = "temporal")]
    Temporal,
    #[serde(rename = "numeric")]
    Numeric,
}

impl DataType {
    pub fn is_temporal(self) -> bool {
        matches!(self, DataType::Date | DataType::Temporal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DataType::Text => "text",
            DataType::Date => "date",
            DataType::Boolean => "Boolean",
            DataType::Geospatial => "geospatial",
            DataType::Temporal => "temporal",
            DataType::Numeric => "numeric",
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Measure,
    Dimension,
}

/// Aggregation operators supported by analytical specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Aggregate {
    #[serde(rename = "sum")]
    Sum,
    #[serde(rename = "average")]
    Average,
    #[serde(rename = "median")]
    Median,
    #[serde(rename = "count")]
    Count,
    #[serde(rename = "distinct count")]
    DistinctCount,
}

impl Aggregate {
    pub const ALL: [Aggregate; 5] = [
        Aggregate::Sum,
        Aggregate::Average,
        Aggregate::Median,
        Aggregate::Count,
        Aggregate::DistinctCount,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Aggregate::Sum => "sum",
            Aggregate::Average => "average",
            Aggregate::Median => "median",
            Aggregate::Count => "count",
            Aggregate::DistinctCount => "distinct count",
        }
    }

    pub fn from_operator(op: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.as_str() == op)
    }

    /// Whether the aggregate can be applied to a non-numeric column.
    pub fn counts(self) -> bool {
        matches!(self, Aggregate::Count | Aggregate::DistinctCount)
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Attribute {
    pub name: String,
    pub data_type: DataType,
    pub role: Role,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default)]
    pub related_terms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taxonomy_node: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_semantics: Option<String>,
}

impl Attribute {
    pub fn new(name: impl Into<String>, data_type: DataType, role: Role) -> Self {
        Self {
            name: name.into(),
            data_type,
            role,
            synonyms: Vec::new(),
            related_terms: Vec::new(),
            taxonomy_node: None,
            unit_semantics: None,
        }
    }

    pub fn is_measure(&self) -> bool {
        self.role == Role::Measure
    }

    pub fn is_dimension(&self) -> bool {
        self.role == Role::Dimension
    }
}

/// Data-source metadata file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_aggregate: Option<Aggregate>,
    #[serde(default)]
    pub attributes: Vec<Attribute>,
}

/// A curated tabular dataset with typed, role-tagged attribute metadata.
///
/// Cells are kept as the raw CSV strings; an empty (or whitespace-only) cell
/// is blank and is ignored by role inference and aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSource {
    pub id: String,
    pub name: String,
    pub description: String,
    pub attributes: Vec<Attribute>,
    pub rows: Vec<Vec<String>>,
    /// Aggregate used when a query names a measure without an operator.
    pub default_aggregate: Option<Aggregate>,
}

impl DataSource {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Case-insensitive attribute lookup.
    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name.eq_ignore_ascii_case(name))
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attribute_index(name).map(|i| &self.attributes[i])
    }

    pub fn column(&self, idx: usize) -> impl Iterator<Item = &str> + '_ {
        self.rows.iter().map(move |r| r[idx].as_str())
    }

    /// Parsed numeric cells; blanks and unparsable cells are `None`.
    pub fn numeric_column(&self, idx: usize) -> Vec<Option<f64>> {
        self.column(idx).map(parse_number).collect()
    }

    /// Distinct non-blank trimmed values of a column, ascending.
    pub fn distinct_values(&self, idx: usize) -> Vec<String> {
        let set: BTreeSet<&str> = self.column(idx).map(str::trim).filter(|v| !v.is_empty()).collect();
        set.into_iter().map(str::to_string).collect()
    }

    pub fn measures(&self) -> impl Iterator<Item = &Attribute> {
        self.attributes.iter().filter(|a| a.is_measure())
    }

    pub fn dimensions(&self) -> impl Iterator<Item = &Attribute> {
        self.attributes.iter().filter(|a| a.is_dimension())
    }

    pub fn first_temporal(&self) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.data_type.is_temporal())
    }

    pub fn first_geospatial(&self) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.data_type == DataType::Geospatial)
    }

    pub fn metadata(&self) -> SourceMetadata {
        SourceMetadata {
            id: Some(self.id.clone()),
            name: self.name.clone(),
            description: self.description.clone(),
            default_aggregate: self.default_aggregate,
            attributes: self.attributes.clone(),
        }
    }
}

/// Parses a numeric cell. Accepts a leading sign, a currency symbol, a
/// trailing percent sign and thousands separators.
pub fn parse_number(cell: &str) -> Option<f64> {
    let mut s = cell.trim();
    if s.is_empty() {
        return None;
    }
    let mut negative = false;
    if let Some(rest) = s.strip_prefix('-') {
        negative = true;
        s = rest;
    }
    s = s.trim_start_matches(['$', '€', '£', '¥']);
    s = s.strip_suffix('%').unwrap_or(s);
    let cleaned: String = s.chars().filter(|&c| c != ',').collect();
    if cleaned.is_empty() || cleaned.starts_with(['+', '-']) && negative {
        return None;
    }
    if !cleaned.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'))
    {
        return None;
    }
    let v: f64 = cleaned.parse().ok()?;
    v.is_finite().then_some(if negative { -v } else { v })
}

/// Parses a temporal cell into a calendar date. Month-only values map to the
/// first of the month and bare years (1000 to 9999) to January 1.
pub fn parse_temporal(cell: &str) -> Option<NaiveDate> {
    let s = cell.trim();
    if s.is_empty() {
        return None;
    }
    for fmt in ["%Y-%m-%d", "%Y/%m/%d", "%m/%d/%Y"] {
        if let Ok(d) = NaiveDate::parse_from_str(s, fmt) {
            return Some(d);
        }
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M"] {
        if let Ok(d) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(d.date());
        }
    }
    if let Ok(d) = chrono::DateTime::parse_from_rfc3339(s) {
        return Some(d.date_naive());
    }
    if let Some((y, m)) = s.split_once('-') {
        if y.len() == 4 && m.len() == 2 {
            if let (Ok(y), Ok(m)) = (y.parse::<i32>(), m.parse::<u32>()) {
                return NaiveDate::from_ymd_opt(y, m, 1);
            }
        }
    }
    if s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit()) {
        let y: i32 = s.parse().ok()?;
        if y >= 1000 {
            return NaiveDate::from_ymd_opt(y, 1, 1);
        }
    }
    None
}

/// Whether a cell is a recognized date pattern (bare years excluded).
pub fn looks_like_date(cell: &str) -> bool {
    let s = cell.trim();
    !(s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit())) && parse_temporal(s).is_some()
}

/// `YYYY-MM` bucket of a date.
pub fn month_bucket(d: NaiveDate) -> String {
    format!("{:04}-{:02}", d.year(), d.month())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("10"), Some(10.0));
        assert_eq!(parse_number(" $1,200.50 "), Some(1200.5));
        assert_eq!(parse_number("-$5"), Some(-5.0));
        assert_eq!(parse_number("12%"), Some(12.0));
        assert_eq!(parse_number("1e3"), Some(1000.0));
        assert_eq!(parse_number(""), None);
        assert_eq!(parse_number("abc"), None);
        assert_eq!(parse_number("NaN"), None);
        assert_eq!(parse_number("inf"), None);
    }

    #[test]
    fn temporal_patterns() {
        let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day).unwrap();
        assert_eq!(parse_temporal("2020-01-05"), Some(d(2020, 1, 5)));
        assert_eq!(parse_temporal("2020/01/05"), Some(d(2020, 1, 5)));
        assert_eq!(parse_temporal("01/05/2020"), Some(d(2020, 1, 5)));
        assert_eq!(parse_temporal("2020-03"), Some(d(2020, 3, 1)));
        assert_eq!(parse_temporal("2020-03-04T10:00:00"), Some(d(2020, 3, 4)));
        assert_eq!(parse_temporal("2013"), Some(d(2013, 1, 1)));
        assert_eq!(parse_temporal("2020-13-01"), None);
        assert!(!looks_like_date("2013"));
        assert!(looks_like_date("2013-02"));
    }

    #[test]
    fn data_type_serde_names() {
        let s = serde_json::to_string(&[DataType::Boolean, DataType::Numeric]).unwrap();
        assert_eq!(s, r#"["Boolean","numeric"]"#);
        let a: Aggregate = serde_json::from_str(r#""distinct count""#).unwrap();
        assert_eq!(a, Aggregate::DistinctCount);
    }
}
