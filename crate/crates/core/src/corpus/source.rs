use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use crate::corpus::gazetteer::Gazetteer;
use crate::corpus::infer::infer_field_role;
use crate::corpus::lexicon::{enrich_attribute, Lexicon};
use crate::corpus::types::{Attribute, DataSource, DataType, Role, SourceMetadata};
use crate::corpus::CorpusError;

/// Reads a data-source metadata file.
pub fn read_metadata(path: &Path) -> Result<SourceMetadata, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CorpusError::Metadata {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Loads a CSV data source with its metadata file.
///
/// The source id is the metadata `id` when present, else the CSV file stem.
pub fn load_data_source(
    csv_path: &Path,
    meta_path: &Path,
    gazetteer: &Gazetteer,
) -> Result<DataSource, CorpusError> {
    let meta = read_metadata(meta_path)?;
    let id = meta.id.clone().unwrap_or_else(|| {
        csv_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    });
    let file = std::fs::File::open(csv_path).map_err(|e| CorpusError::io(csv_path, e))?;
    let label = csv_path.display().to_string();
    build_data_source(&label, id, file, Some(meta), gazetteer)
}

/// Parses CSV text and combines it with optional metadata. `label` names the
/// input in error messages.
pub fn build_data_source<R: Read>(
    label: &str,
    id: String,
    csv: R,
    meta: Option<SourceMetadata>,
    gazetteer: &Gazetteer,
) -> Result<DataSource, CorpusError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(csv);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CorpusError::csv(label, 1, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(CorpusError::schema(label, "missing header row"));
    }
    let mut seen = BTreeSet::new();
    for h in &header {
        if h.is_empty() {
            return Err(CorpusError::schema(label, "empty column name in header"));
        }
        if !seen.insert(h.to_lowercase()) {
            return Err(CorpusError::schema(label, format!("duplicate column {h:?}")));
        }
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i as u64 + 2;
        let record = record.map_err(|e| CorpusError::csv(label, line, e))?;
        if record.len() == 1 && record.get(0).is_some_and(|c| c.trim().is_empty()) && header.len() > 1 {
            continue;
        }
        if record.len() != header.len() {
            return Err(CorpusError::RowLength {
                input: label.to_string(),
                row: line,
                expected: header.len(),
                found: record.len(),
            });
        }
        rows.push(record.iter().map(|c| c.trim().to_string()).collect::<Vec<_>>());
    }

    let meta = meta.unwrap_or_else(|| SourceMetadata {
        id: None,
        name: id.clone(),
        description: String::new(),
        default_aggregate: None,
        attributes: Vec::new(),
    });
    for declared in &meta.attributes {
        if !header.iter().any(|h| h.eq_ignore_ascii_case(&declared.name)) {
            return Err(CorpusError::schema(
                label,
                format!("metadata attribute {:?} is not a CSV column", declared.name),
            ));
        }
    }

    let mut attributes = Vec::with_capacity(header.len());
    for (col, name) in header.iter().enumerate() {
        let declared = meta.attributes.iter().find(|a| a.name.eq_ignore_ascii_case(name));
        let attr = match declared {
            Some(a) => Attribute { name: name.clone(), ..a.clone() },
            None => {
                let values: Vec<&str> = rows.iter().map(|r| r[col].as_str()).collect();
                let (data_type, role) = match infer_field_role(&values, gazetteer) {
                    Ok(inferred) => inferred,
                    Err(CorpusError::BlankColumn) => (DataType::Text, Role::Dimension),
                    Err(e) => return Err(e),
                };
                Attribute::new(name.clone(), data_type, role)
            }
        };
        if attr.role == Role::Measure && attr.data_type != DataType::Numeric {
            return Err(CorpusError::schema(
                label,
                format!("measure {:?} must be numeric, found {}", attr.name, attr.data_type),
            ));
        }
        attributes.push(attr);
    }

    Ok(DataSource {
        id,
        name: meta.name,
        description: meta.description,
        attributes,
        rows,
        default_aggregate: meta.default_aggregate,
    })
}

/// Loads and enriches every `<name>.csv` in a directory, in file-name order.
/// A sibling `<name>.meta.json` supplies metadata when present; undeclared
/// columns are inferred.
pub fn load_source_dir(
    dir: &Path,
    gazetteer: &Gazetteer,
    lexicon: &Lexicon,
) -> Result<Vec<DataSource>, CorpusError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CorpusError::io(dir, e))?;
    let mut csvs = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CorpusError::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            csvs.push(path);
        }
    }
    csvs.sort();
    let mut out: Vec<DataSource> = Vec::new();
    for csv in csvs {
        let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let meta_path = dir.join(format!("{stem}.meta.json"));
        let mut source = if meta_path.exists() {
            load_data_source(&csv, &meta_path, gazetteer)?
        } else {
            let file = std::fs::File::open(&csv).map_err(|e| CorpusError::io(&csv, e))?;
            build_data_source(&csv.display().to_string(), stem, file, None, gazetteer)?
        };
        if out.iter().any(|s| s.id == source.id) {
            return Err(CorpusError::schema(&csv.display().to_string(), format!("duplicate source id {:?}", source.id)));
        }
        enrich_source(&mut source, lexicon);
        out.push(source);
    }
    Ok(out)
}

/// Enriches every attribute of a source in place.
pub fn enrich_source(source: &mut DataSource, lexicon: &Lexicon) {
    for attr in &mut source.attributes {
        *attr = enrich_attribute(attr, lexicon);
    }
}
