use std::collections::{BTreeMap, HashMap};

use super::relational::csv_error;
use super::{Record, Source, SourceInfo, SourceModel};
use crate::error::{Error, Result};

/// Column holding a node's entity type, e.g. `person`.
pub const LABEL_COLUMN: &str = "label";

struct Node {
    label: String,
    attrs: Vec<(String, String)>,
}

/// One record per node: its label, its own attributes, then for every incident
/// edge (either direction, sorted by neighbor id) the edge label paired with the
/// neighbor's label followed by the neighbor's attributes.
pub fn load_graph(nodes_file: &str, edges_file: &str, graph_name: &str) -> Result<Vec<Record>> {
    Ok(read_graph(nodes_file, edges_file, graph_name)?.records)
}

pub fn read_graph(nodes_file: &str, edges_file: &str, graph_name: &str) -> Result<Source> {
    let nodes_name = format!("{graph_name}/nodes.csv");
    let edges_name = format!("{graph_name}/edges.csv");
    let parse_err = |source_name: &str, line: u64, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };

    let mut reader = csv::ReaderBuilder::new().from_reader(nodes_file.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(&nodes_name, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let id_col = header
        .iter()
        .position(|h| h == "id")
        .ok_or_else(|| parse_err(&nodes_name, 1, "header has no `id` column".into()))?;
    let label_col = header.iter().position(|h| h == LABEL_COLUMN);

    let mut info = SourceInfo::new(graph_name, SourceModel::Graph);
    for (i, h) in header.iter().enumerate() {
        if Some(i) != label_col {
            info.note_attribute(h);
        }
    }

    let mut order: Vec<String> = Vec::new();
    let mut nodes: HashMap<String, Node> = HashMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(&nodes_name, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let id = row[id_col].to_string();
        let label = label_col.map(|c| row[c].to_string()).unwrap_or_default();
        if !label.is_empty() && !info.node_labels.contains(&label) {
            info.node_labels.push(label.clone());
        }
        let attrs = header
            .iter()
            .zip(row.iter())
            .enumerate()
            .filter(|(i, _)| Some(*i) != label_col)
            .map(|(_, (k, v))| (k.clone(), v.to_string()))
            .collect();
        if nodes.insert(id.clone(), Node { label, attrs }).is_some() {
            return Err(parse_err(&nodes_name, line, format!("duplicate node id `{id}`")));
        }
        order.push(id);
    }

    let mut reader = csv::ReaderBuilder::new().from_reader(edges_file.as_bytes());
    let eheader: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(&edges_name, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let col = |name: &str| {
        eheader
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(&edges_name, 1, format!("header has no `{name}` column")))
    };
    let (src_col, dst_col, label_col) = (col("src")?, col("dst")?, col("label")?);

    // node id -> [(neighbor id, edge label)]
    let mut incident: BTreeMap<&str, Vec<(String, String)>> = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(&edges_name, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let (src, dst, label) = (&row[src_col], &row[dst_col], &row[label_col]);
        for end in [src, dst] {
            if !nodes.contains_key(end) {
                return Err(parse_err(
                    &edges_name,
                    line,
                    format!("edge references unknown node id `{end}`"),
                ));
            }
        }
        if !label.is_empty() && !info.edge_labels.iter().any(|l| l == label) {
            info.edge_labels.push(label.to_string());
        }
        let (src_key, _) = nodes.get_key_value(src).expect("checked above");
        incident
            .entry(src_key.as_str())
            .or_default()
            .push((dst.to_string(), label.to_string()));
        if src != dst {
            let (dst_key, _) = nodes.get_key_value(dst).expect("checked above");
            incident
                .entry(dst_key.as_str())
                .or_default()
                .push((src.to_string(), label.to_string()));
        }
    }
    for list in incident.values_mut() {
        list.sort();
    }

    let mut records = Vec::with_capacity(order.len());
    for id in &order {
        let node = &nodes[id];
        let mut pairs = Vec::new();
        if !node.label.is_empty() {
            pairs.push((node.label.clone(), String::new()));
        }
        pairs.extend(node.attrs.iter().cloned());
        let own_len = pairs.len();
        for (neighbor_id, edge_label) in incident.get(id.as_str()).into_iter().flatten() {
            let neighbor = &nodes[neighbor_id];
            pairs.push((edge_label.clone(), neighbor.label.clone()));
            pairs.extend(neighbor.attrs.iter().cloned());
        }
        records.push(Record {
            source_model: SourceModel::Graph,
            source_name: graph_name.to_string(),
            record_id: id.clone(),
            pairs,
            own_len,
        });
    }
    Ok(Source { info, records })
}
