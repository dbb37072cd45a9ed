use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::corpus::{parse_number, parse_temporal, Aggregate, DataSource, DataType};
use crate::qa::spec::{AnalyticalSpec, Filter, LimitDirection, Predicate, TimeGrain, RECORD_COUNT};
use crate::qa::QaError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Number(f64),
    Text(String),
    Null,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Cell::Number(v) => crate::qa::keystats::format_value(*v, None),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Column {
    pub name: String,
    pub data_type: DataType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregate: Option<Aggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.column_index(name).map(|i| &self.columns[i])
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn attr_index(source: &DataSource, name: &str) -> Result<usize, QaError> {
    source.attribute_index(name).ok_or_else(|| QaError::UnknownAttribute(name.to_string()))
}

fn row_passes(row: &[String], idx: usize, pred: &Predicate) -> bool {
    let cell = row[idx].trim();
    match pred {
        Predicate::OneOf { values } => values.iter().any(|v| v.trim().eq_ignore_ascii_case(cell)),
        Predicate::YearIs { year } => parse_temporal(cell).is_some_and(|d| d.year() == *year),
        Predicate::YearFrom { year } => parse_temporal(cell).is_some_and(|d| d.year() >= *year),
        _ => parse_number(cell).is_some_and(|v| match pred {
            Predicate::AtLeast { value } => v >= *value,
            Predicate::AtMost { value } => v <= *value,
            Predicate::MoreThan { value } => v > *value,
            Predicate::LessThan { value } => v < *value,
            Predicate::Between { low, high } => v >= *low && v <= *high,
            _ => unreachable!(),
        }),
    }
}

fn check_filter(source: &DataSource, f: &Filter) -> Result<usize, QaError> {
    let idx = attr_index(source, &f.attribute)?;
    let attr = &source.attributes[idx];
    if f.predicate.is_numeric() && attr.data_type != DataType::Numeric {
        return Err(QaError::Execution(format!(
            "numeric comparison on {} attribute {:?}",
            attr.data_type.as_str(),
            attr.name
        )));
    }
    if f.predicate.is_temporal() && !attr.data_type.is_temporal() {
        return Err(QaError::Execution(format!(
            "year comparison on {} attribute {:?}",
            attr.data_type.as_str(),
            attr.name
        )));
    }
    Ok(idx)
}

/// Aggregates numeric values (or raw cells for the counting aggregates).
fn aggregate(agg: Aggregate, cells: &[&str]) -> Cell {
    let present: Vec<&str> = cells.iter().map(|c| c.trim()).filter(|c| !c.is_empty()).collect();
    match agg {
        Aggregate::Count => Cell::Number(present.len() as f64),
        Aggregate::DistinctCount => Cell::Number(present.iter().collect::<BTreeSet<_>>().len() as f64),
        _ => {
            let mut nums: Vec<f64> = present.iter().filter_map(|c| parse_number(c)).collect();
            if nums.is_empty() {
                return Cell::Null;
            }
            let n = nums.len() as f64;
            Cell::Number(match agg {
                Aggregate::Sum => nums.iter().sum(),
                Aggregate::Average => nums.iter().sum::<f64>() / n,
                Aggregate::Median => {
                    nums.sort_by(f64::total_cmp);
                    let mid = nums.len() / 2;
                    if nums.len() % 2 == 0 {
                        (nums[mid - 1] + nums[mid]) / 2.0
                    } else {
                        nums[mid]
                    }
                }
                Aggregate::Count | Aggregate::DistinctCount => unreachable!(),
            })
        }
    }
}

/// Years when the data spans three or more of them, months otherwise.
fn grain_for(idx: usize, rows: &[&Vec<String>]) -> TimeGrain {
    let years: BTreeSet<i32> = rows.iter().filter_map(|r| parse_temporal(&r[idx])).map(|d| d.year()).collect();
    if years.len() >= 3 {
        TimeGrain::Year
    } else {
        TimeGrain::Month
    }
}

fn bucket(cell: &str, grain: TimeGrain) -> Option<String> {
    let d = parse_temporal(cell)?;
    Some(match grain {
        TimeGrain::Year => format!("{:04}", d.year()),
        TimeGrain::Month => format!("{:04}-{:02}", d.year(), d.month()),
    })
}

fn key_cell(source: &DataSource, idx: usize, cell: &str) -> Cell {
    if source.attributes[idx].data_type == DataType::Numeric {
        if let Some(v) = parse_number(cell) {
            return Cell::Number(v);
        }
    }
    Cell::Text(cell.trim().to_string())
}

fn cmp_cells(a: &Cell, b: &Cell) -> Ordering {
    match (a, b) {
        (Cell::Number(x), Cell::Number(y)) => x.total_cmp(y),
        (Cell::Null, Cell::Null) => Ordering::Equal,
        (Cell::Null, _) => Ordering::Greater,
        (_, Cell::Null) => Ordering::Less,
        _ => a.label().cmp(&b.label()),
    }
}

fn measure_column(source: &DataSource, attribute: &str, agg: Aggregate) -> Result<Column, QaError> {
    if attribute == RECORD_COUNT {
        return Ok(Column { name: RECORD_COUNT.into(), data_type: DataType::Numeric, aggregate: Some(agg), unit: None });
    }
    let attr = &source.attributes[attr_index(source, attribute)?];
    if !agg.counts() && attr.data_type != DataType::Numeric {
        return Err(QaError::Execution(format!("cannot {} non-numeric attribute {:?}", agg.as_str(), attr.name)));
    }
    Ok(Column {
        name: attr.name.clone(),
        data_type: DataType::Numeric,
        aggregate: Some(agg),
        unit: if agg.counts() { None } else { attr.unit_semantics.clone() },
    })
}

/// Applies filters, then groups and aggregates, then sorts and limits.
/// Groups are ordered by key ascending; a limit reorders by the first
/// measure before truncating. A correlation spec yields the raw measure
/// pairs of the filtered rows in source order.
pub fn execute_spec(spec: &AnalyticalSpec, source: &DataSource) -> Result<ResultTable, QaError> {
    let mut checks = Vec::new();
    for f in &spec.filters {
        checks.push((check_filter(source, f)?, &f.predicate));
    }
    let rows: Vec<&Vec<String>> =
        source.rows.iter().filter(|r| checks.iter().all(|(i, p)| row_passes(r, *i, p))).collect();

    if let Some((a, b)) = &spec.correlation_pair {
        let (ia, ib) = (attr_index(source, a)?, attr_index(source, b)?);
        for i in [ia, ib] {
            let attr = &source.attributes[i];
            if attr.data_type != DataType::Numeric {
                return Err(QaError::Execution(format!("cannot correlate non-numeric attribute {:?}", attr.name)));
            }
        }
        let color = spec.keys().first().map(|k| attr_index(source, k)).transpose()?;
        let col = |i: usize| Column {
            name: source.attributes[i].name.clone(),
            data_type: source.attributes[i].data_type,
            aggregate: None,
            unit: source.attributes[i].unit_semantics.clone(),
        };
        let mut columns = vec![col(ia), col(ib)];
        columns.extend(color.map(col));
        let mut out = Vec::new();
        for r in &rows {
            if let (Some(x), Some(y)) = (parse_number(&r[ia]), parse_number(&r[ib])) {
                let mut row = vec![Cell::Number(x), Cell::Number(y)];
                row.extend(color.map(|c| key_cell(source, c, &r[c])));
                out.push(row);
            }
        }
        return Ok(ResultTable { columns, rows: out });
    }

    let keys = spec.keys();
    let key_idx: Vec<usize> = keys.iter().map(|k| attr_index(source, k)).collect::<Result<_, _>>()?;
    let temporal_idx = spec.temporal_axis.as_deref().map(|t| attr_index(source, t)).transpose()?;
    let grain = temporal_idx.map(|i| spec.time_grain.unwrap_or_else(|| grain_for(i, &rows)));

    let mut columns: Vec<Column> = key_idx
        .iter()
        .map(|&i| {
            let a = &source.attributes[i];
            Column { name: a.name.clone(), data_type: a.data_type, aggregate: None, unit: None }
        })
        .collect();
    let mut measure_idx = Vec::new();
    for m in &spec.measures {
        columns.push(measure_column(source, &m.attribute, m.aggregate)?);
        measure_idx.push(if m.attribute == RECORD_COUNT { None } else { Some(attr_index(source, &m.attribute)?) });
    }

    // group key (as text labels for ordering) → member rows
    let mut groups: BTreeMap<Vec<KeyPart>, Vec<&Vec<String>>> = BTreeMap::new();
    'rows: for r in &rows {
        let mut key = Vec::with_capacity(key_idx.len());
        for &i in &key_idx {
            let cell = r[i].trim();
            if cell.is_empty() {
                continue 'rows;
            }
            let part = if Some(i) == temporal_idx {
                match bucket(cell, grain.expect("grain set with temporal axis")) {
                    Some(b) => KeyPart(Cell::Text(b)),
                    None => continue 'rows,
                }
            } else {
                KeyPart(key_cell(source, i, cell))
            };
            key.push(part);
        }
        groups.entry(key).or_default().push(r);
    }
    if key_idx.is_empty() && groups.is_empty() {
        groups.insert(Vec::new(), Vec::new());
    }

    let mut out: Vec<Vec<Cell>> = Vec::new();
    for (key, members) in groups {
        let mut row: Vec<Cell> = key.into_iter().map(|k| k.0).collect();
        for (m, idx) in spec.measures.iter().zip(&measure_idx) {
            let cells: Vec<&str> = match idx {
                Some(i) => members.iter().map(|r| r[*i].as_str()).collect(),
                None => members.iter().map(|_| "1").collect(),
            };
            row.push(aggregate(m.aggregate, &cells));
        }
        out.push(row);
    }

    if let (Some(limit), false) = (spec.limit, spec.measures.is_empty()) {
        let mi = keys.len();
        out.sort_by(|a, b| {
            let ord = match limit.direction {
                LimitDirection::Top => cmp_cells(&b[mi], &a[mi]),
                LimitDirection::Bottom => cmp_cells(&a[mi], &b[mi]),
            };
            ord.then_with(|| {
                a[..mi].iter().zip(&b[..mi]).map(|(x, y)| cmp_cells(x, y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
            })
        });
        out.truncate(limit.n as usize);
    }
    Ok(ResultTable { columns, rows: out })
}

/// Orders group keys: numbers numerically, text lexicographically.
#[derive(Debug, Clone, PartialEq)]
struct KeyPart(Cell);

impl Eq for KeyPart {}

impl PartialOrd for KeyPart {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for KeyPart {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_cells(&self.0, &other.0)
    }
}
