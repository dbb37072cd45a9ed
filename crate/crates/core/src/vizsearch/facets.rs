use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::corpus::types::{month_bucket, parse_temporal};
use crate::corpus::VizDocument;
use crate::index::RankedResults;

/// Counts per author, chart type and creation month over a result set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FacetSummary {
    pub author_counts: BTreeMap<String, usize>,
    pub chart_type_counts: BTreeMap<String, usize>,
    pub date_histogram: BTreeMap<String, usize>,
}

pub fn compute_facets<'a>(docs: impl IntoIterator<Item = &'a VizDocument>) -> FacetSummary {
    let mut f = FacetSummary::default();
    for doc in docs {
        *f.author_counts.entry(doc.author_name.clone()).or_insert(0) += 1;
        let types: BTreeSet<&String> = doc.chart_types.iter().collect();
        for t in types {
            *f.chart_type_counts.entry(t.clone()).or_insert(0) += 1;
        }
        *f.date_histogram.entry(month_bucket(doc.created_date)).or_insert(0) += 1;
    }
    f
}

/// Inclusive creation-date window; either end may be open.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateRange {
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
}

impl DateRange {
    /// Parses range ends. A month (`2020-01`) or year (`2020`) as `from`
    /// starts at its first day; as `to` it ends at its last day.
    pub fn parse(from: Option<&str>, to: Option<&str>) -> Result<Self, String> {
        let parse = |s: &str, end: bool| -> Result<NaiveDate, String> {
            let s = s.trim();
            let d = parse_temporal(s).ok_or_else(|| format!("invalid date {s:?}"))?;
            if !end {
                return Ok(d);
            }
            let is_year = s.len() == 4;
            let is_month = s.len() == 7 && s.as_bytes()[4] == b'-';
            Ok(if is_year {
                NaiveDate::from_ymd_opt(d.year(), 12, 31).unwrap()
            } else if is_month {
                last_day_of_month(d)
            } else {
                d
            })
        };
        let range = Self {
            from: from.filter(|s| !s.trim().is_empty()).map(|s| parse(s, false)).transpose()?,
            to: to.filter(|s| !s.trim().is_empty()).map(|s| parse(s, true)).transpose()?,
        };
        if let (Some(a), Some(b)) = (range.from, range.to) {
            if a > b {
                return Err(format!("date range start {a} is after end {b}"));
            }
        }
        Ok(range)
    }

    pub fn contains(&self, d: NaiveDate) -> bool {
        self.from.is_none_or(|f| d >= f) && self.to.is_none_or(|t| d <= t)
    }

    pub fn is_open(&self) -> bool {
        self.from.is_none() && self.to.is_none()
    }
}

fn last_day_of_month(d: NaiveDate) -> NaiveDate {
    let (y, m) = if d.month() == 12 { (d.year() + 1, 1) } else { (d.year(), d.month() + 1) };
    NaiveDate::from_ymd_opt(y, m, 1).unwrap().pred_opt().unwrap()
}

/// Selected facet values. Empty selections do not filter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FacetState {
    #[serde(default)]
    pub selected_authors: BTreeSet<String>,
    #[serde(default)]
    pub selected_chart_types: BTreeSet<String>,
    #[serde(default)]
    pub date_range: DateRange,
}

impl FacetState {
    pub fn is_empty(&self) -> bool {
        self.selected_authors.is_empty() && self.selected_chart_types.is_empty() && self.date_range.is_open()
    }

    /// Conjunction across facet kinds, disjunction within a kind.
    pub fn accepts(&self, doc: &VizDocument) -> bool {
        (self.selected_authors.is_empty() || self.selected_authors.contains(&doc.author_name))
            && (self.selected_chart_types.is_empty()
                || doc.chart_types.iter().any(|t| self.selected_chart_types.contains(t)))
            && self.date_range.contains(doc.created_date)
    }
}

/// Keeps the entries whose documents pass the facet state, in their
/// original order. Entries without a document are dropped unless the state
/// is empty.
pub fn apply_facets<'a>(
    results: &RankedResults,
    lookup: impl Fn(&str) -> Option<&'a VizDocument>,
    state: &FacetState,
) -> RankedResults {
    if state.is_empty() {
        return results.clone();
    }
    RankedResults {
        entries: results
            .entries
            .iter()
            .filter(|e| lookup(&e.id).is_some_and(|d| state.accepts(d)))
            .cloned()
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::RankedEntry;

    fn doc(id: &str, author: &str, types: &[&str], date: &str) -> VizDocument {
        VizDocument {
            id: id.into(),
            title: id.into(),
            caption: String::new(),
            tags: vec![],
            description: String::new(),
            author_name: author.into(),
            created_date: NaiveDate::parse_from_str(date, "%Y-%m-%d").unwrap(),
            chart_types: types.iter().map(|s| s.to_string()).collect(),
            mark_types: vec![],
            source_url: String::new(),
            thumbnail_ref: String::new(),
        }
    }

    fn ranked(ids: &[&str]) -> RankedResults {
        RankedResults {
            entries: ids
                .iter()
                .map(|id| RankedEntry { id: id.to_string(), raw_score: 1.0, norm_score: 1.0 })
                .collect(),
        }
    }

    #[test]
    fn counting() {
        let docs = [doc("a", "x", &["bar", "line"], "2020-01-02"), doc("b", "x", &["bar"], "2020-01-30")];
        let f = compute_facets(&docs);
        assert_eq!(f.author_counts["x"], 2);
        assert_eq!(f.chart_type_counts["bar"], 2);
        assert_eq!(f.chart_type_counts["line"], 1);
        assert_eq!(f.date_histogram["2020-01"], 2);
        assert_eq!(compute_facets(&[]), FacetSummary::default());
    }

    #[test]
    fn filtering() {
        let docs = [
            doc("a", "x", &["treemap"], "2020-03-01"),
            doc("b", "y", &["bar"], "2019-12-31"),
            doc("c", "y", &["treemap", "bar"], "2021-01-01"),
        ];
        let lookup = |id: &str| docs.iter().find(|d| d.id == id);
        let r = ranked(&["c", "a", "b"]);
        assert_eq!(apply_facets(&r, lookup, &FacetState::default()), r);

        let mut s = FacetState::default();
        s.selected_chart_types.insert("treemap".into());
        assert_eq!(apply_facets(&r, lookup, &s).ids().collect::<Vec<_>>(), ["c", "a"]);

        let s = FacetState { date_range: DateRange::parse(Some("2020-01"), Some("2020-12")).unwrap(), ..Default::default() };
        assert_eq!(apply_facets(&r, lookup, &s).ids().collect::<Vec<_>>(), ["a"]);
    }

    #[test]
    fn date_range_parsing() {
        let r = DateRange::parse(Some("2020-02"), Some("2020-02")).unwrap();
        assert_eq!(r.to, NaiveDate::from_ymd_opt(2020, 2, 29));
        let r = DateRange::parse(None, Some("2021")).unwrap();
        assert_eq!(r.to, NaiveDate::from_ymd_opt(2021, 12, 31));
        assert!(DateRange::parse(Some("2021-05"), Some("2020-01")).is_err());
        assert!(DateRange::parse(Some("soon"), None).is_err());
    }
}
