//! Rendering joined records into flat statements and building the schema
//! lexicon used to classify query keywords.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::Result;
pub use crate::ids::StatementId;
use crate::ingest::{Corpus, Dataset, JoinedRecord, Selector, SourceRef};
use crate::text::{words, Normalizer};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub statement_id: StatementId,
    pub tokens: Vec<String>,
    pub raw_text: String,
    pub provenance: Vec<SourceRef>,
}

/// How records are turned into text: per-source banners and hidden
/// attributes.
#[derive(Debug, Clone, Default)]
pub struct RenderOptions {
    pub banners: BTreeMap<String, String>,
    pub hidden: BTreeSet<Selector>,
}

impl RenderOptions {
    pub fn for_dataset(dataset: &Dataset) -> Self {
        RenderOptions {
            banners: dataset.spec.banners.clone(),
            hidden: dataset.spec.hidden.clone(),
        }
    }

    fn is_hidden(&self, source: &str, path: &str) -> bool {
        // avoid allocating a Selector per pair when nothing is hidden
        !self.hidden.is_empty()
            && self.hidden.iter().any(|s| s.source == source && s.path == path)
    }
}

/// Banner words, then "key words value words" for every visible pair, record
/// after record in provenance order. A nested key drops the leading path
/// components it shares with the previous visible key of the same record.
pub fn render_statement(jr: &JoinedRecord, opts: &RenderOptions) -> String {
    let mut out: Vec<String> = Vec::new();
    for rec in jr.records() {
        let banner = opts
            .banners
            .get(&rec.source_name)
            .map(String::as_str)
            .unwrap_or(&rec.source_name);
        out.extend(words(banner));
        let mut prev: Vec<&str> = Vec::new();
        for (key, value) in &rec.pairs {
            if opts.is_hidden(&rec.source_name, key) {
                continue;
            }
            // Nested keys only repeat the parent path when it changes:
            // item.product_id, item.brand -> "item product id … brand …".
            let parts: Vec<&str> = key.split('.').collect();
            let shared = prev
                .iter()
                .zip(&parts)
                .take_while(|(a, b)| a == b)
                .count()
                .min(parts.len() - 1);
            for part in &parts[shared..] {
                out.extend(words(part));
            }
            out.extend(words(value));
            prev = parts;
        }
    }
    out.join(" ")
}

/// Loads, joins, renders and normalizes a dataset into statements with dense
/// ids ordered by provenance.
pub fn build_statements(dataset: &Dataset, config: &Config, normalizer: &Normalizer) -> Result<Vec<Statement>> {
    let joined = dataset.join(config.max_fanout)?;
    Ok(statements_from_joined(joined, &RenderOptions::for_dataset(dataset), normalizer))
}

pub fn statements_from_joined(
    mut joined: Vec<JoinedRecord>,
    opts: &RenderOptions,
    normalizer: &Normalizer,
) -> Vec<Statement> {
    joined.sort_by(|a, b| a.provenance.cmp(&b.provenance));
    let rendered: Vec<(String, Vec<String>)> = joined
        .par_iter()
        .map(|jr| {
            let raw = render_statement(jr, opts);
            let tokens = normalizer.normalize(&raw);
            (raw, tokens)
        })
        .collect();
    let mut statements = Vec::with_capacity(joined.len());
    let mut dropped = 0usize;
    for (jr, (raw_text, tokens)) in joined.into_iter().zip(rendered) {
        if tokens.is_empty() {
            dropped += 1;
            continue;
        }
        statements.push(Statement {
            statement_id: StatementId(statements.len() as u32),
            tokens,
            raw_text,
            provenance: jr.provenance,
        });
    }
    if dropped > 0 {
        log::info!("dropped {dropped} statements with no tokens after normalization");
    }
    statements
}

/// Normalized schema terms: source names, attribute names, key-path
/// components, node labels and (optionally) edge labels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaLexicon {
    pub terms: BTreeSet<String>,
}

impl SchemaLexicon {
    pub fn contains(&self, token: &str) -> bool {
        self.terms.contains(token)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

pub fn build_schema_lexicon(corpus: &Corpus, config: &Config, normalizer: &Normalizer) -> SchemaLexicon {
    let mut terms = BTreeSet::new();
    for src in &corpus.sources {
        let mut add = |text: &str| terms.extend(normalizer.normalize(text));
        add(&src.name);
        for attr in &src.attributes {
            add(attr);
        }
        for label in &src.node_labels {
            add(label);
        }
        if config.schema_includes_edge_labels {
            for label in &src.edge_labels {
                add(label);
            }
        }
    }
    SchemaLexicon { terms }
}

/// Builds the normalizer a config asks for.
pub fn normalizer_for(config: &Config) -> Result<Normalizer> {
    match &config.stopwords {
        Some(path) => Normalizer::from_file(path),
        None => Ok(Normalizer::english()),
    }
}
