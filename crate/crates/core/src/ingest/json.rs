use std::collections::HashSet;

use serde_json::Value;

use super::{Record, Source, SourceInfo, SourceModel};
use crate::error::{Error, Result};

/// Parses a JSON array of objects, or newline-delimited objects, into one
/// record per top-level object.
pub fn load_json(text: &str, collection_name: &str) -> Result<Vec<Record>> {
    Ok(read_json(text, collection_name)?.records)
}

pub fn read_json(text: &str, collection_name: &str) -> Result<Source> {
    let json_err = |offset: usize, message: String| Error::Json {
        source_name: collection_name.to_string(),
        offset,
        message,
    };
    let from_serde = |e: serde_json::Error| json_err(byte_offset(text, e.line(), e.column()), e.to_string());

    // (byte offset, object)
    let mut objects: Vec<(usize, Value)> = Vec::new();
    let trimmed = text.trim_start();
    let start = text.len() - trimmed.len();
    if trimmed.starts_with('[') {
        let value: Value = serde_json::from_str(text).map_err(from_serde)?;
        if let Value::Array(items) = value {
            objects.extend(items.into_iter().map(|v| (start, v)));
        }
    } else {
        let mut stream = serde_json::Deserializer::from_str(text).into_iter::<Value>();
        loop {
            let offset = stream.byte_offset();
            match stream.next() {
                None => break,
                Some(Ok(v)) => {
                    let lead = text[offset..].len() - text[offset..].trim_start().len();
                    objects.push((offset + lead, v));
                }
                Some(Err(e)) => return Err(from_serde(e)),
            }
        }
    }

    let mut info = SourceInfo::new(collection_name, SourceModel::Json);
    let mut records = Vec::with_capacity(objects.len());
    let mut seen = HashSet::new();
    for (position, (offset, value)) in objects.into_iter().enumerate() {
        let Value::Object(map) = value else {
            return Err(json_err(
                offset,
                format!("top-level element {position} is not an object"),
            ));
        };
        let record_id = match map.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(v @ (Value::Number(_) | Value::Bool(_))) => v.to_string(),
            _ => format!("#{position}"),
        };
        if !seen.insert(record_id.clone()) {
            return Err(json_err(offset, format!("duplicate record id `{record_id}`")));
        }
        let mut pairs = Vec::new();
        for (k, v) in &map {
            flatten(k, v, &mut pairs);
        }
        for (k, _) in &pairs {
            info.note_attribute(k);
        }
        records.push(Record {
            source_model: SourceModel::Json,
            source_name: collection_name.to_string(),
            record_id,
            own_len: pairs.len(),
            pairs,
        });
    }
    Ok(Source { info, records })
}

/// Depth-first flattening into dotted key-paths. Array elements reuse the
/// parent's path.
fn flatten(path: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{path}.{k}"), v, out);
            }
        }
        Value::Array(items) => {
            for v in items {
                flatten(path, v, out);
            }
        }
        Value::Null => out.push((path.to_string(), String::new())),
        Value::String(s) => out.push((path.to_string(), s.clone())),
        Value::Number(n) => out.push((path.to_string(), n.to_string())),
        Value::Bool(b) => out.push((path.to_string(), b.to_string())),
    }
}

/// serde_json reports 1-based line/column; convert to a byte offset.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}
