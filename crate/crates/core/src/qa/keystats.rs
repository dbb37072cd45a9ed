use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::qa::encoding::{Channel, ChartSpec, Mark};
use crate::qa::execute::Cell;

/// Statistic sentences about a chart plus the numbers behind them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KeyStats {
    pub lines: Vec<String>,
    pub stats: BTreeMap<String, f64>,
}

impl KeyStats {
    pub fn text(&self) -> String {
        self.lines.join("\n")
    }
}

fn currency_symbol(unit: &str) -> Option<&'static str> {
    match unit.to_ascii_uppercase().as_str() {
        "USD" | "$" => Some("$"),
        "EUR" | "€" => Some("€"),
        "GBP" | "£" => Some("£"),
        "JPY" | "¥" => Some("¥"),
        _ => None,
    }
}

/// Formats a value for a sentence: at most two decimals with trailing zeros
/// dropped, no thousands separators, and a currency symbol or percent sign
/// from the unit.
pub fn format_value(v: f64, unit: Option<&str>) -> String {
    let rounded = (v * 100.0).round() / 100.0;
    let mut s = format!("{:.2}", rounded.abs());
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    let sign = if rounded < 0.0 { "-" } else { "" };
    match unit {
        Some(u) if currency_symbol(u).is_some() => format!("{sign}{}{s}", currency_symbol(u).unwrap()),
        Some("%") | Some("percent") => format!("{sign}{s}%"),
        _ => format!("{sign}{s}"),
    }
}

/// Pearson's r by the two-pass formula; `None` below two points or when a
/// variable is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (dx, dy) = (xs[i] - mx, ys[i] - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn strength(r: f64) -> &'static str {
    match r.abs() {
        a if a >= 0.7 => "strong",
        a if a >= 0.4 => "moderate",
        a if a >= 0.1 => "weak",
        _ => "negligible",
    }
}

/// Label of a row: `Dim: value`, joined over the category columns.
fn row_label(chart: &ChartSpec, row: &[Cell], cats: &[usize]) -> String {
    cats.iter()
        .map(|&i| format!("{}: {}", chart.data.columns[i].name, row[i].label()))
        .collect::<Vec<_>>()
        .join(", ")
}

fn extremes(chart: &ChartSpec, measure: usize, cats: &[usize]) -> KeyStats {
    let mut ks = KeyStats::default();
    let col = &chart.data.columns[measure];
    let unit = col.unit.as_deref();
    let name = &col.name;
    let values: Vec<(usize, f64)> =
        chart.data.rows.iter().enumerate().filter_map(|(i, r)| r[measure].as_f64().map(|v| (i, v))).collect();
    if values.is_empty() {
        return ks;
    }
    let mean = values.iter().map(|v| v.1).sum::<f64>() / values.len() as f64;
    if cats.is_empty() {
        let (_, v) = values[0];
        ks.lines.push(format!("{name} is: {}", format_value(v, unit)));
        ks.stats.insert("value".into(), v);
        return ks;
    }
    // first row wins ties; rows are in category order
    let (min_i, min) = values.iter().copied().fold(values[0], |a, b| if b.1 < a.1 { b } else { a });
    let (max_i, max) = values.iter().copied().fold(values[0], |a, b| if b.1 > a.1 { b } else { a });
    let dims: Vec<&str> = cats.iter().map(|&i| chart.data.columns[i].name.as_str()).collect();
    ks.lines.push(format!(
        "{} has a minimum value of {} for {name}",
        row_label(chart, &chart.data.rows[min_i], cats),
        format_value(min, unit)
    ));
    ks.lines.push(format!(
        "{} has the maximum value of {} for {name}",
        row_label(chart, &chart.data.rows[max_i], cats),
        format_value(max, unit)
    ));
    ks.lines.push(format!("Average {name} across {} is: {}", dims.join(" and "), format_value(mean, unit)));
    ks.stats.insert("min".into(), min);
    ks.stats.insert("max".into(), max);
    ks.stats.insert("mean".into(), mean);
    ks
}

fn correlation(chart: &ChartSpec, x: usize, y: usize) -> KeyStats {
    let mut ks = KeyStats::default();
    let (xs, ys): (Vec<f64>, Vec<f64>) = chart
        .data
        .rows
        .iter()
        .filter_map(|r| Some((r[x].as_f64()?, r[y].as_f64()?)))
        .unzip();
    let (xn, yn) = (&chart.data.columns[x].name, &chart.data.columns[y].name);
    match pearson(&xs, &ys) {
        Some(r) => {
            let dir = if r > 0.0 { "positive" } else if r < 0.0 { "negative" } else { "no" };
            let rs = format_value(r, None);
            ks.lines.push(format!("{xn} and {yn} have a {} {dir} correlation (r = {rs})", strength(r)));
            ks.stats.insert("pearsonR".into(), r);
        }
        None => ks.lines.push(format!(
            "The correlation between {xn} and {yn} is undefined for these {} points",
            xs.len()
        )),
    }
    ks.stats.insert("count".into(), xs.len() as f64);
    ks
}

fn trend(chart: &ChartSpec, x: usize, y: usize, series: Option<usize>) -> KeyStats {
    let mut ks = KeyStats::default();
    let col = &chart.data.columns[y];
    let unit = col.unit.as_deref();
    let mut groups: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    for r in &chart.data.rows {
        if let Some(v) = r[y].as_f64() {
            let key = series.map(|s| r[s].label()).unwrap_or_default();
            groups.entry(key).or_default().push((r[x].label(), v));
        }
    }
    for (key, mut points) in groups {
        points.sort_by(|a, b| a.0.cmp(&b.0));
        let (first, last) = (&points[0], &points[points.len() - 1]);
        let delta = last.1 - first.1;
        let word = if delta.abs() < 1e-9 {
            "flat"
        } else if delta > 0.0 {
            "rising"
        } else {
            "falling"
        };
        let subject = match series {
            Some(s) => format!("{} for {}: {key}", col.name, chart.data.columns[s].name),
            None => col.name.clone(),
        };
        ks.lines.push(format!(
            "{subject} is {word}, from {} in {} to {} in {}",
            format_value(first.1, unit),
            first.0,
            format_value(last.1, unit),
            last.0
        ));
        let stat = if series.is_some() { format!("trendDelta:{key}") } else { "trendDelta".to_string() };
        ks.stats.insert(stat, delta);
    }
    ks
}

/// Summary statistics for a chart: extremes and mean for bars and maps,
/// Pearson's r for scatterplots, first-to-last change per series for lines.
pub fn compute_key_stats(chart: &ChartSpec) -> KeyStats {
    let idx = |c: Channel| chart.encoding(c).and_then(|e| chart.data.column_index(&e.field));
    match chart.mark {
        Mark::Bar => {
            let Some(y) = idx(Channel::Y) else { return KeyStats::default() };
            let cats: Vec<usize> = [idx(Channel::X), idx(Channel::Color)].into_iter().flatten().collect();
            extremes(chart, y, &cats)
        }
        Mark::Geoshape => {
            let Some(m) = idx(Channel::Color) else { return KeyStats::default() };
            let key = chart.geometry.as_ref().and_then(|g| chart.data.column_index(&g.key));
            extremes(chart, m, &key.into_iter().collect::<Vec<_>>())
        }
        Mark::Point => match (idx(Channel::X), idx(Channel::Y)) {
            (Some(x), Some(y)) => correlation(chart, x, y),
            _ => KeyStats::default(),
        },
        Mark::Line => match (idx(Channel::X), idx(Channel::Y)) {
            (Some(x), Some(y)) => trend(chart, x, y, idx(Channel::Color)),
            _ => KeyStats::default(),
        },
    }
}
