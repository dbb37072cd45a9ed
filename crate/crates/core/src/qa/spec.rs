use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{Aggregate, Attribute, DataSource, DataType};
use crate::parser::{FieldMatch, IntentArg, IntentKind, MatchKind, ParsedQuery, DEFAULT_LIMIT};
use crate::qa::QaError;

/// Pseudo-attribute counting the rows of a group.
pub const RECORD_COUNT: &str = "Number of Records";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MeasureRef {
    pub attribute: String,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "camelCase")]
pub enum Predicate {
    /// Case-insensitive equality with any of the values.
    OneOf { values: Vec<String> },
    AtLeast { value: f64 },
    AtMost { value: f64 },
    MoreThan { value: f64 },
    LessThan { value: f64 },
    /// Inclusive on both ends.
    Between { low: f64, high: f64 },
    YearIs { year: i32 },
    YearFrom { year: i32 },
}

impl Predicate {
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Predicate::AtLeast { .. }
                | Predicate::AtMost { .. }
                | Predicate::MoreThan { .. }
                | Predicate::LessThan { .. }
                | Predicate::Between { .. }
        )
    }

    pub fn is_temporal(&self) -> bool {
        matches!(self, Predicate::YearIs { .. } | Predicate::YearFrom { .. })
    }

    fn numeric(op: &str, numbers: &[f64]) -> Option<Self> {
        let first = *numbers.first()?;
        Some(match op {
            "at least" => Predicate::AtLeast { value: first },
            "at most" => Predicate::AtMost { value: first },
            "more than" => Predicate::MoreThan { value: first },
            "less than" => Predicate::LessThan { value: first },
            "between" => {
                let second = *numbers.get(1)?;
                Predicate::Between { low: first.min(second), high: first.max(second) }
            }
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filter {
    pub attribute: String,
    #[serde(flatten)]
    pub predicate: Predicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitDirection {
    Top,
    Bottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limit {
    pub direction: LimitDirection,
    pub n: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeGrain {
    Year,
    Month,
}

/// Analytical intents bound to the attributes of one data source.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalyticalSpec {
    pub source_id: String,
    pub group_bys: Vec<String>,
    pub measures: Vec<MeasureRef>,
    pub filters: Vec<Filter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<Limit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation_pair: Option<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temporal_axis: Option<String>,
    /// Bucket size of the temporal axis; chosen from the data when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grain: Option<TimeGrain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geo_axis: Option<String>,
}

impl AnalyticalSpec {
    /// Grouping columns in result order: temporal axis, geographic axis,
    /// then the remaining group-bys.
    pub fn keys(&self) -> Vec<&str> {
        let mut keys: Vec<&str> = Vec::new();
        for k in self.temporal_axis.iter().chain(&self.geo_axis).chain(&self.group_bys) {
            if !keys.iter().any(|x| x.eq_ignore_ascii_case(k)) {
                keys.push(k);
            }
        }
        keys
    }

    fn has_measure(&self, attr: &str) -> bool {
        self.measures.iter().any(|m| m.attribute == attr)
    }

    fn push_measure(&mut self, attribute: &str, aggregate: Aggregate) {
        if !self.has_measure(attribute) {
            self.measures.push(MeasureRef { attribute: attribute.to_string(), aggregate });
        }
    }

    fn push_group_by(&mut self, attr: &Attribute) {
        match attr.data_type {
            DataType::Temporal | DataType::Date if self.temporal_axis.is_none() => {
                self.temporal_axis = Some(attr.name.clone())
            }
            DataType::Geospatial if self.geo_axis.is_none() => self.geo_axis = Some(attr.name.clone()),
            _ => {
                if !self.group_bys.contains(&attr.name) {
                    self.group_bys.push(attr.name.clone())
                }
            }
        }
    }

    fn push_one_of(&mut self, attribute: &str, value: &str) {
        for f in &mut self.filters {
            if f.attribute == attribute {
                if let Predicate::OneOf { values } = &mut f.predicate {
                    if !values.iter().any(|v| v.eq_ignore_ascii_case(value)) {
                        values.push(value.to_string());
                    }
                    return;
                }
            }
        }
        self.filters.push(Filter {
            attribute: attribute.to_string(),
            predicate: Predicate::OneOf { values: vec![value.to_string()] },
        });
    }

    fn is_empty(&self) -> bool {
        self.measures.is_empty() && self.keys().is_empty() && self.correlation_pair.is_none()
    }
}

struct Binder<'a> {
    source: &'a DataSource,
    matches: Vec<&'a FieldMatch>,
}

impl<'a> Binder<'a> {
    fn attribute(&self, text: &str) -> Option<&'a Attribute> {
        self.matches
            .iter()
            .find(|m| m.query_ngram == text && m.value.is_none())
            .and_then(|m| self.source.attribute(&m.attribute))
    }

    fn value(&self, text: &str) -> Option<(&'a Attribute, &'a str)> {
        self.matches
            .iter()
            .find(|m| m.query_ngram == text && m.value.is_some())
            .and_then(|m| Some((self.source.attribute(&m.attribute)?, m.value.as_deref()?)))
    }

    /// Attributes bound by an intent argument, or by any matched n-gram
    /// inside a multi-word argument.
    fn attributes_in(&self, text: &str) -> Vec<&'a Attribute> {
        if let Some(a) = self.attribute(text) {
            return vec![a];
        }
        let words: Vec<&str> = text.split(' ').collect();
        let mut out: Vec<&Attribute> = Vec::new();
        for m in self.matches.iter().filter(|m| m.value.is_none()) {
            let inside = contains_run(&words, &m.query_ngram);
            if let (true, Some(a)) = (inside, self.source.attribute(&m.attribute)) {
                if !out.iter().any(|x| x.name == a.name) {
                    out.push(a);
                }
            }
        }
        out
    }

    fn explicit(&self, pred: impl Fn(&Attribute) -> bool) -> Option<&'a Attribute> {
        self.matches
            .iter()
            .filter(|m| m.value.is_none())
            .filter_map(|m| self.source.attribute(&m.attribute))
            .find(|a| pred(a))
    }
}

fn contains_run(words: &[&str], ngram: &str) -> bool {
    let n: Vec<&str> = ngram.split(' ').collect();
    n.len() <= words.len() && words.windows(n.len()).any(|w| w == n.as_slice())
}

/// Binds the parsed intents to attributes of `source`.
pub fn resolve_spec(parsed: &ParsedQuery, source: &DataSource) -> Result<AnalyticalSpec, QaError> {
    let binder = Binder { source, matches: parsed.matches_for(&source.id).collect() };
    let mut spec = AnalyticalSpec { source_id: source.id.clone(), ..Default::default() };
    let mut pending_agg: Option<Aggregate> = None;
    let mut pending_numeric: Vec<Predicate> = Vec::new();
    let mut corr: Vec<String> = Vec::new();
    let mut ranking_measure: Option<String> = None;

    for intent in &parsed.intents {
        let op = intent.operator.as_deref().unwrap_or("");
        let texts: Vec<&str> = intent.arguments.iter().filter_map(IntentArg::text).collect();
        let numbers: Vec<f64> = intent.arguments.iter().filter_map(IntentArg::number).collect();
        match intent.kind {
            IntentKind::Aggregation => {
                let agg = Aggregate::from_operator(op).unwrap_or(Aggregate::Sum);
                let mut bound = false;
                for a in texts.iter().flat_map(|t| binder.attributes_in(t)) {
                    if a.is_measure() || agg.counts() {
                        spec.push_measure(&a.name, agg);
                        bound = true;
                    }
                }
                if !bound {
                    pending_agg = Some(agg);
                }
            }
            IntentKind::Grouping => {
                for a in texts.iter().flat_map(|t| binder.attributes_in(t)) {
                    if a.is_dimension() {
                        spec.push_group_by(a);
                    }
                }
            }
            IntentKind::Correlation => {
                for a in texts.iter().flat_map(|t| binder.attributes_in(t)) {
                    if a.is_measure() && !corr.contains(&a.name) {
                        corr.push(a.name.clone());
                    }
                }
                if corr.is_empty() {
                    // marks the query as correlational; measures come from
                    // the other matches
                    corr.push(String::new());
                }
            }
            IntentKind::FilterLimit => match op {
                "top" | "bottom" => {
                    let direction = if op == "top" { LimitDirection::Top } else { LimitDirection::Bottom };
                    let n = intent.limit().unwrap_or(DEFAULT_LIMIT).max(1);
                    spec.limit = Some(Limit { direction, n });
                    for a in texts.iter().flat_map(|t| binder.attributes_in(t)) {
                        if a.is_dimension() {
                            spec.push_group_by(a);
                        } else if ranking_measure.is_none() {
                            ranking_measure = Some(a.name.clone());
                        }
                    }
                }
                "filter to" => {
                    for t in &texts {
                        if let Some((a, v)) = binder.value(t) {
                            spec.push_one_of(&a.name, v);
                        }
                    }
                }
                _ => {
                    let Some(pred) = Predicate::numeric(op, &numbers) else { continue };
                    match texts.iter().flat_map(|t| binder.attributes_in(t)).find(|a| a.is_measure()) {
                        Some(a) => spec.filters.push(Filter { attribute: a.name.clone(), predicate: pred }),
                        None => pending_numeric.push(pred),
                    }
                }
            },
            IntentKind::Temporal => {
                let axis = binder.explicit(|a| a.data_type.is_temporal()).or_else(|| source.first_temporal());
                let Some(axis) = axis else { continue };
                match op {
                    "month" => spec.time_grain = Some(TimeGrain::Month),
                    "year" => spec.time_grain = Some(TimeGrain::Year),
                    _ => {}
                }
                let year = numbers.iter().find(|v| v.fract() == 0.0).map(|v| *v as i32);
                match year {
                    Some(year) => spec.filters.push(Filter {
                        attribute: axis.name.clone(),
                        predicate: if op == "since" { Predicate::YearFrom { year } } else { Predicate::YearIs { year } },
                    }),
                    None => {
                        if spec.temporal_axis.is_none() {
                            spec.temporal_axis = Some(axis.name.clone());
                        }
                    }
                }
            }
            IntentKind::Geospatial => {
                let mut filtered: Option<String> = None;
                for t in &texts {
                    if let Some((a, v)) = binder.value(t) {
                        if a.data_type == DataType::Geospatial {
                            spec.push_one_of(&a.name, v);
                            filtered = Some(a.name.clone());
                        }
                    }
                }
                let geo = |a: &Attribute| a.data_type == DataType::Geospatial;
                let axis = match &filtered {
                    // a named place narrows the data; map the next finer
                    // geographic attribute if the source has one
                    Some(f) => source.attributes.iter().find(|a| geo(a) && &a.name != f),
                    None => binder.explicit(geo).or_else(|| source.first_geospatial()),
                };
                if let (Some(axis), None) = (axis, &spec.geo_axis) {
                    spec.geo_axis = Some(axis.name.clone());
                }
            }
        }
    }

    // measures named outside any intent
    let default_agg = pending_agg.or(source.default_aggregate).unwrap_or(Aggregate::Sum);
    let mut loose_measures: Vec<&Attribute> = Vec::new();
    for m in binder.matches.iter().filter(|m| m.value.is_none()) {
        if let Some(a) = source.attribute(&m.attribute) {
            if a.is_measure() && !loose_measures.iter().any(|x| x.name == a.name) {
                loose_measures.push(a);
            }
        }
    }
    if !corr.is_empty() {
        corr.retain(|c| !c.is_empty());
        for a in &loose_measures {
            if corr.len() < 2 && !corr.contains(&a.name) {
                corr.push(a.name.clone());
            }
        }
        if corr.len() >= 2 {
            spec.correlation_pair = Some((corr[0].clone(), corr[1].clone()));
        }
    }
    if spec.correlation_pair.is_none() {
        if let Some(r) = &ranking_measure {
            spec.push_measure(r, default_agg);
        }
        for a in &loose_measures {
            if spec.measures.len() >= 2 {
                break;
            }
            spec.push_measure(&a.name, default_agg);
        }
    }

    // dimensions named outside any intent become the grouping when nothing
    // else structures the result
    if spec.keys().is_empty() && spec.correlation_pair.is_none() {
        if let Some(a) = binder.explicit(|a| a.is_dimension()) {
            spec.push_group_by(a);
        }
    }

    // exact value mentions filter the data
    let filtered: BTreeSet<String> = spec.filters.iter().map(|f| f.attribute.clone()).collect();
    for m in &binder.matches {
        if let (Some(v), MatchKind::Exact) = (&m.value, m.match_kind) {
            if !filtered.contains(&m.attribute) {
                spec.push_one_of(&m.attribute, v);
            }
        }
    }

    if spec.measures.is_empty() && spec.correlation_pair.is_none() && !spec.keys().is_empty() {
        let agg = pending_agg.filter(|a| a.counts()).unwrap_or(Aggregate::Count);
        spec.push_measure(RECORD_COUNT, agg);
    }
    if let Some(first) = spec.measures.first().map(|m| m.attribute.clone()) {
        for pred in pending_numeric {
            if first != RECORD_COUNT {
                spec.filters.push(Filter { attribute: first.clone(), predicate: pred });
            }
        }
    }

    if spec.is_empty() {
        return Err(QaError::SpecUnresolvable { source_id: source.id.clone() });
    }
    tracing::debug!(source = %source.id, ?spec, "resolved analytical spec");
    Ok(spec)
}
