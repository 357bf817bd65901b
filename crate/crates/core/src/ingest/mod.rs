//! Loading relational tables, JSON collections and property graphs into
//! uniform [`Record`]s, and expanding them through equi-join rules.

mod graph;
mod joins;
mod json;
mod relational;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use graph::{load_graph, read_graph};
pub use joins::{apply_joins, DatasetSpec, JoinOptions, JoinRule, JoinedRecord, Selector};
pub use json::{load_json, read_json};
pub use relational::{load_relational, read_table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceModel {
    Relational,
    Json,
    Graph,
}

impl fmt::Display for SourceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceModel::Relational => "relational",
            SourceModel::Json => "json",
            SourceModel::Graph => "graph",
        })
    }
}

/// One row, object or node, flattened into ordered key/value pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub source_model: SourceModel,
    pub source_name: String,
    pub record_id: String,
    pub pairs: Vec<(String, String)>,
    /// Number of leading pairs describing the record itself. Graph nodes
    /// carry their neighbors' attributes after these; joins only look here.
    pub own_len: usize,
}

impl Record {
    pub fn source_ref(&self) -> SourceRef {
        SourceRef {
            source_model: self.source_model,
            source_name: self.source_name.clone(),
            record_id: self.record_id.clone(),
        }
    }

    pub fn own_pairs(&self) -> &[(String, String)] {
        &self.pairs[..self.own_len]
    }

    /// Values stored under `path` among the record's own pairs.
    pub fn values<'a>(&'a self, path: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.own_pairs()
            .iter()
            .filter(move |(k, _)| k == path)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceRef {
    pub source_model: SourceModel,
    pub source_name: String,
    pub record_id: String,
}

/// Schema-level description of one loaded source.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceInfo {
    pub name: String,
    pub model: Option<SourceModel>,
    /// Attribute names / key-paths in first-seen order.
    pub attributes: Vec<String>,
    /// Node labels (graph sources only).
    pub node_labels: Vec<String>,
    /// Edge labels (graph sources only).
    pub edge_labels: Vec<String>,
}

impl SourceInfo {
    pub(crate) fn new(name: &str, model: SourceModel) -> Self {
        SourceInfo {
            name: name.to_string(),
            model: Some(model),
            ..Default::default()
        }
    }

    pub(crate) fn note_attribute(&mut self, path: &str) {
        if !self.attributes.iter().any(|a| a == path) {
            self.attributes.push(path.to_string());
        }
    }

    pub fn has_attribute(&self, path: &str) -> bool {
        self.attributes.iter().any(|a| a == path)
    }
}

/// A loaded source: its schema description plus records in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source {
    pub info: SourceInfo,
    pub records: Vec<Record>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub sources: Vec<SourceInfo>,
    pub records: Vec<Record>,
}

impl Corpus {
    pub fn from_sources(mut sources: Vec<Source>) -> Result<Self> {
        sources.sort_by(|a, b| a.info.name.cmp(&b.info.name));
        for w in sources.windows(2) {
            if w[0].info.name == w[1].info.name {
                return Err(Error::Config(format!(
                    "source name `{}` is used by more than one input",
                    w[0].info.name
                )));
            }
        }
        let mut corpus = Corpus::default();
        for s in sources {
            corpus.sources.push(s.info);
            corpus.records.extend(s.records);
        }
        Ok(corpus)
    }

    pub fn source(&self, name: &str) -> Option<&SourceInfo> {
        self.sources.iter().find(|s| s.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// A dataset directory: `tables/*.csv`, `collections/*.json`,
/// `graphs/<name>/{nodes.csv,edges.csv}` and an optional `joins.config`.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub root: PathBuf,
    pub corpus: Corpus,
    pub spec: DatasetSpec,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        out.push(entry.map_err(|e| Error::io(dir, e))?.path());
    }
    out.sort();
    Ok(out)
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

impl Dataset {
    pub fn load(root: &Path) -> Result<Self> {
        if !root.is_dir() {
            return Err(Error::io(
                root,
                std::io::Error::new(std::io::ErrorKind::NotFound, "dataset directory not found"),
            ));
        }
        let mut sources = Vec::new();
        for path in sorted_entries(&root.join("tables"))? {
            if path.extension().is_some_and(|e| e == "csv") {
                sources.push(read_table(&read(&path)?, &stem_of(&path))?);
            }
        }
        for path in sorted_entries(&root.join("collections"))? {
            if path
                .extension()
                .is_some_and(|e| e == "json" || e == "jsonl")
            {
                sources.push(read_json(&read(&path)?, &stem_of(&path))?);
            }
        }
        for dir in sorted_entries(&root.join("graphs"))? {
            if dir.is_dir() {
                let name = dir
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let nodes = read(&dir.join("nodes.csv"))?;
                let edges_path = dir.join("edges.csv");
                let edges = if edges_path.exists() {
                    read(&edges_path)?
                } else {
                    "src,dst,label\n".to_string()
                };
                sources.push(read_graph(&nodes, &edges, &name)?);
            }
        }
        let corpus = Corpus::from_sources(sources)?;
        let joins = root.join("joins.config");
        let spec = if joins.exists() {
            DatasetSpec::parse(&read(&joins)?)?
        } else {
            DatasetSpec::default()
        };
        spec.validate(&corpus)?;
        Ok(Dataset {
            root: root.to_path_buf(),
            corpus,
            spec,
        })
    }

    pub fn join(&self, max_fanout: usize) -> Result<Vec<JoinedRecord>> {
        apply_joins(
            &self.corpus,
            &self.spec.rules,
            &JoinOptions {
                roots: self.spec.roots.clone(),
                max_fanout,
            },
        )
    }

    /// Banner words per source, for sources that override the default.
    pub fn banners(&self) -> &BTreeMap<String, String> {
        &self.spec.banners
    }
}
