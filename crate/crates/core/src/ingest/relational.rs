use std::collections::HashSet;

use super::{Record, Source, SourceInfo, SourceModel};
use crate::error::{Error, Result};

/// Parses a CSV table with a header line. One record per row, keyed by the
/// value of the first column.
pub fn load_relational(text: &str, table_name: &str) -> Result<Vec<Record>> {
    Ok(read_table(text, table_name)?.records)
}

pub fn read_table(text: &str, table_name: &str) -> Result<Source> {
    let parse_err = |line: u64, message: String| Error::Parse {
        source_name: table_name.to_string(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(table_name, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(parse_err(1, "empty header".into()));
    }

    let mut info = SourceInfo::new(table_name, SourceModel::Relational);
    for h in &header {
        info.note_attribute(h);
    }

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(table_name, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let pairs: Vec<(String, String)> = header
            .iter()
            .cloned()
            .zip(row.iter().map(str::to_string))
            .collect();
        let record_id = pairs[0].1.clone();
        if !seen.insert(record_id.clone()) {
            return Err(parse_err(line, format!("duplicate record id `{record_id}`")));
        }
        records.push(Record {
            source_model: SourceModel::Relational,
            source_name: table_name.to_string(),
            record_id,
            own_len: pairs.len(),
            pairs,
        });
    }
    Ok(Source { info, records })
}

pub(crate) fn csv_error(source_name: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("expected {expected_len} columns, found {len}"),
        _ => e.to_string(),
    };
    Error::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    }
}
