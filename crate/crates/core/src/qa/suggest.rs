use crate::corpus::{Aggregate, DataSource, DataType};

/// Dimensions with more distinct values than this are not suggested for
/// grouping.
pub const MAX_SUGGESTED_CARDINALITY: usize = 12;

fn variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64
}

/// Template queries over a source, most interesting first: measures by
/// descending variance, and within a measure, grouping dimensions by
/// ascending cardinality, then trend and map templates.
pub fn suggest_queries(source: &DataSource, k: usize) -> Vec<String> {
    if k == 0 {
        return Vec::new();
    }
    let agg = source.default_aggregate.unwrap_or(Aggregate::Sum);
    let mut measures: Vec<(f64, usize)> = source
        .attributes
        .iter()
        .enumerate()
        .filter(|(_, a)| a.is_measure())
        .map(|(i, _)| (variance(&source.numeric_column(i).into_iter().flatten().collect::<Vec<_>>()), i))
        .collect();
    measures.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut dims: Vec<(usize, usize)> = source
        .attributes
        .iter()
        .enumerate()
        .filter(|(_, a)| a.is_dimension() && !a.data_type.is_temporal())
        .map(|(i, _)| (source.distinct_values(i).len(), i))
        .filter(|(n, _)| (1..=MAX_SUGGESTED_CARDINALITY).contains(n))
        .collect();
    dims.sort();

    let mut out: Vec<String> = Vec::new();
    let mut push = |q: String| {
        if !out.contains(&q) {
            out.push(q);
        }
    };
    for &(_, m) in &measures {
        let measure = &source.attributes[m].name;
        for &(_, d) in &dims {
            push(format!("{} of {measure} by {}", agg.as_str(), source.attributes[d].name));
        }
        for a in source.attributes.iter().filter(|a| a.data_type.is_temporal()) {
            push(format!("trend of {measure} over {}", a.name));
        }
        for a in source.attributes.iter().filter(|a| a.data_type == DataType::Geospatial) {
            push(format!("{measure} across {}", a.name));
        }
    }
    out.truncate(k);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_data_source;
    use crate::Resources;

    #[test]
    fn templates() {
        let r = Resources::bundled();
        let meta = r#"{"name":"S","attributes":[{"name":"Date","dataType":"temporal","role":"dimension"}]}"#;
        let ds = build_data_source(
            "s.csv",
            "s".into(),
            "Region,Date,Sales\nEast,2020-01-01,10\nWest,2020-02-01,30\n".as_bytes(),
            Some(serde_json::from_str(meta).unwrap()),
            &r.gazetteer,
        )
        .unwrap();
        let q = suggest_queries(&ds, 10);
        assert_eq!(q, ["sum of Sales by Region", "trend of Sales over Date"]);
        assert!(suggest_queries(&ds, 0).is_empty());
        assert_eq!(suggest_queries(&ds, 1).len(), 1);
    }
}
