use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Aggregate, DataType, Gazetteer, PlaceKind};
use crate::qa::execute::ResultTable;
use crate::qa::spec::AnalyticalSpec;
use crate::qa::QaError;

/// Version of the serialized chart specification.
pub const CHART_SPEC_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mark {
    Bar,
    Line,
    Point,
    Geoshape,
}

impl Mark {
    pub const ALL: [Mark; 4] = [Mark::Bar, Mark::Line, Mark::Point, Mark::Geoshape];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    X,
    Y,
    Color,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Encoding {
    /// Result-table column.
    pub field: String,
    pub data_type: DataType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregate: Option<Aggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

/// Geometry set of the bundled US state outlines.
pub const US_STATES: &str = "us-states";
/// Geometry set for places outside the bundled outlines.
pub const WORLD: &str = "world";

/// Region shapes a geoshape mark joins its data to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Geometry {
    /// Named geometry set, for example `us-states`.
    pub set: String,
    /// Result-table column holding the region names.
    pub key: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChartSpec {
    pub version: u32,
    pub mark: Mark,
    pub encodings: BTreeMap<Channel, Encoding>,
    pub data: ResultTable,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
}

impl ChartSpec {
    pub fn encoding(&self, channel: Channel) -> Option<&Encoding> {
        self.encodings.get(&channel)
    }
}

fn encode(table: &ResultTable, name: &str) -> Result<Encoding, QaError> {
    let col = table
        .column(name)
        .ok_or_else(|| QaError::Encoding(format!("column {name:?} is missing from the result")))?;
    Ok(Encoding { field: col.name.clone(), data_type: col.data_type, aggregate: col.aggregate, unit: col.unit.clone() })
}

fn title(spec: &AnalyticalSpec) -> String {
    if let Some((a, b)) = &spec.correlation_pair {
        return format!("{a} vs {b}");
    }
    let measures: Vec<String> = spec
        .measures
        .iter()
        .map(|m| {
            let agg = m.aggregate.as_str();
            let mut agg = agg.to_string();
            agg[..1].make_ascii_uppercase();
            format!("{agg} of {}", m.attribute)
        })
        .collect();
    let mut t = measures.join(" and ");
    if let Some(axis) = &spec.temporal_axis {
        t.push_str(&format!(" over {axis}"));
    }
    let dims: Vec<&str> = spec
        .keys()
        .into_iter()
        .filter(|k| Some(*k) != spec.temporal_axis.as_deref())
        .collect();
    if !dims.is_empty() {
        t.push_str(&format!(" by {}", dims.join(" and ")));
    }
    t
}

/// Picks a mark and channel assignment:
/// - a correlation pair or two measures: point, measures on x and y;
/// - a temporal axis: line, time on x, measure on y;
/// - a geographic axis: geoshape, measure on color;
/// - otherwise bar, dimension on x, measure on y.
///
/// A further dimension goes to color. Specs needing more than the three
/// channels are rejected.
pub fn choose_encoding(spec: &AnalyticalSpec, table: ResultTable) -> Result<ChartSpec, QaError> {
    if table.is_empty() {
        return Err(QaError::EmptyResult);
    }
    let keys = spec.keys();
    let too_many = |required: usize| {
        QaError::Encoding(format!(
            "the question needs {required} encoding channels but a chart has only x, y and color"
        ))
    };
    let mut enc = BTreeMap::new();
    let mut geometry = None;

    let mark = if let Some((a, b)) = &spec.correlation_pair {
        let required = 2 + keys.len();
        if required > 3 {
            return Err(too_many(required));
        }
        enc.insert(Channel::X, encode(&table, a)?);
        enc.insert(Channel::Y, encode(&table, b)?);
        if let Some(k) = keys.first() {
            enc.insert(Channel::Color, encode(&table, k)?);
        }
        Mark::Point
    } else {
        let required = keys.len() + spec.measures.len();
        if required > 3 {
            return Err(too_many(required));
        }
        let measure = spec
            .measures
            .first()
            .ok_or_else(|| QaError::Encoding("the question names no measure".into()))?;
        if spec.measures.len() == 2 {
            enc.insert(Channel::X, encode(&table, &measure.attribute)?);
            enc.insert(Channel::Y, encode(&table, &spec.measures[1].attribute)?);
            if let Some(k) = keys.first() {
                enc.insert(Channel::Color, encode(&table, k)?);
            }
            Mark::Point
        } else if let Some(t) = &spec.temporal_axis {
            enc.insert(Channel::X, encode(&table, t)?);
            enc.insert(Channel::Y, encode(&table, &measure.attribute)?);
            if let Some(k) = keys.iter().find(|k| *k != t) {
                enc.insert(Channel::Color, encode(&table, k)?);
            }
            Mark::Line
        } else if let Some(g) = &spec.geo_axis {
            if keys.len() > 1 {
                return Err(QaError::Encoding(
                    "a map shows one measure over one geographic attribute".into(),
                ));
            }
            enc.insert(Channel::Color, encode(&table, &measure.attribute)?);
            geometry = Some(Geometry { set: WORLD.into(), key: encode(&table, g)?.field });
            Mark::Geoshape
        } else {
            if let Some(k) = keys.first() {
                enc.insert(Channel::X, encode(&table, k)?);
            }
            enc.insert(Channel::Y, encode(&table, &measure.attribute)?);
            if let Some(k) = keys.get(1) {
                enc.insert(Channel::Color, encode(&table, k)?);
            }
            Mark::Bar
        }
    };
    Ok(ChartSpec { version: CHART_SPEC_VERSION, mark, encodings: enc, data: table, title: title(spec), geometry })
}

/// Uses the US state outlines when every region of a geoshape chart is a
/// US state.
pub fn assign_geometry_set(chart: &mut ChartSpec, gazetteer: &Gazetteer) {
    let Some(geo) = &mut chart.geometry else { return };
    let Some(idx) = chart.data.column_index(&geo.key) else { return };
    let all_states = chart.data.rows.iter().all(|r| {
        gazetteer.lookup(&r[idx].label()).is_some_and(|p| p.kind == PlaceKind::State)
    });
    geo.set = if all_states { US_STATES } else { WORLD }.to_string();
}
