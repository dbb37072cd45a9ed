use crate::corpus::gazetteer::Gazetteer;
use crate::corpus::types::{looks_like_date, parse_number, DataType, Role};
use crate::corpus::CorpusError;

/// Share of non-blank cells that must parse for a pattern to claim a column.
pub const MAJORITY: f64 = 0.95;

fn share<'a>(values: &[&'a str], pred: impl Fn(&'a str) -> bool) -> f64 {
    values.iter().filter(|v| pred(v)).count() as f64 / values.len() as f64
}

/// Infers a column's data type and role from its cells.
///
/// Blank cells are ignored. Checks run in order: Boolean (every value in
/// {true, false, 0, 1}), numeric, temporal and geospatial (each by a 95%
/// majority), falling back to text.
pub fn infer_field_role<S: AsRef<str>>(
    values: &[S],
    gazetteer: &Gazetteer,
) -> Result<(DataType, Role), CorpusError> {
    let cells: Vec<&str> =
        values.iter().map(|v| v.as_ref().trim()).filter(|v| !v.is_empty()).collect();
    if cells.is_empty() {
        return Err(CorpusError::BlankColumn);
    }
    let is_bool = |v: &str| matches!(v.to_ascii_lowercase().as_str(), "true" | "false" | "0" | "1");
    if cells.iter().all(|v| is_bool(v)) {
        return Ok((DataType::Boolean, Role::Dimension));
    }
    if share(&cells, |v| parse_number(v).is_some()) >= MAJORITY {
        return Ok((DataType::Numeric, Role::Measure));
    }
    if share(&cells, looks_like_date) >= MAJORITY {
        return Ok((DataType::Temporal, Role::Dimension));
    }
    if share(&cells, |v| gazetteer.contains(v)) >= MAJORITY {
        return Ok((DataType::Geospatial, Role::Dimension));
    }
    Ok((DataType::Text, Role::Dimension))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Resources;

    fn infer(values: &[&str]) -> Result<(DataType, Role), CorpusError> {
        infer_field_role(values, &Resources::bundled().gazetteer)
    }

    #[test]
    fn examples() {
        assert_eq!(infer(&["10", "20", "5"]).unwrap(), (DataType::Numeric, Role::Measure));
        assert_eq!(infer(&["2020-01-01", "2021-03-05"]).unwrap(), (DataType::Temporal, Role::Dimension));
        assert_eq!(infer(&["Seattle", "Austin", "Boston"]).unwrap(), (DataType::Geospatial, Role::Dimension));
        assert_eq!(infer(&["true", "FALSE", "1"]).unwrap(), (DataType::Boolean, Role::Dimension));
        assert_eq!(infer(&["Drama", "Horror"]).unwrap(), (DataType::Text, Role::Dimension));
    }

    #[test]
    fn blanks_are_ignored() {
        assert_eq!(infer(&["", "3", " ", "4"]).unwrap(), (DataType::Numeric, Role::Measure));
        assert!(matches!(infer(&["", "  "]), Err(CorpusError::BlankColumn)));
        assert!(matches!(infer(&[]), Err(CorpusError::BlankColumn)));
    }

    #[test]
    fn majority_threshold() {
        let mut v: Vec<String> = (0..19).map(|i| i.to_string()).collect();
        v.push("n/a".into());
        assert_eq!(infer_field_role(&v, &Resources::bundled().gazetteer).unwrap().0, DataType::Numeric);
        v.push("n/a".into());
        assert_eq!(infer_field_role(&v, &Resources::bundled().gazetteer).unwrap().0, DataType::Text);
    }
}
