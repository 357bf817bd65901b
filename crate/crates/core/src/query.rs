//! Online keyword search: classify keywords, form the candidate set, fit a
//! query density for each candidate in its eigenbasis and rank by
//! divergence.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::colocation::{mine_compounds, MiningOptions};
use crate::config::{CandidateMode, Config};
use crate::error::{Error, Result};
use crate::ids::{StatementId, WordId};
use crate::index::{IndexStore, Vocabulary};
use crate::ingest::SourceRef;
use crate::quantum::{
    maxlik_density_vector, reduce_event, vnd_score, DensitySystem, DensityVector, Event, MaxLikOptions, ReducedEvent,
};
use crate::statements::SchemaLexicon;

/// Normalized keywords split by whether they name part of the schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordQuery {
    pub keywords: Vec<String>,
    pub schema: BTreeSet<String>,
    pub non_schema: BTreeSet<String>,
}

pub fn classify_keywords(keywords: &[String], lexicon: &SchemaLexicon) -> Result<KeywordQuery> {
    if keywords.is_empty() {
        return Err(Error::Argument("query has no keywords after normalization".into()));
    }
    let (schema, non_schema) = keywords.iter().cloned().partition(|k| lexicon.contains(k));
    Ok(KeywordQuery {
        keywords: keywords.to_vec(),
        schema,
        non_schema,
    })
}

fn intersect(a: &[StatementId], b: &[StatementId]) -> Vec<StatementId> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Statements to score, ascending.
///
/// Non-schema keywords must all occur (intersection); schema keywords are
/// pooled (union). `Paper` removes the schema pool from the non-schema
/// matches, `Union` adds it. With no non-schema keyword the schema pool is
/// the candidate set.
pub fn candidate_set(store: &IndexStore, query: &KeywordQuery, mode: CandidateMode) -> Vec<StatementId> {
    let schema: BTreeSet<StatementId> = query
        .schema
        .iter()
        .flat_map(|w| store.postings_lookup(w).iter().copied())
        .collect();
    if query.non_schema.is_empty() {
        return schema.into_iter().collect();
    }
    let mut words = query.non_schema.iter();
    let first = words.next().expect("non-empty");
    let mut non: Vec<StatementId> = store.postings_lookup(first).to_vec();
    for w in words {
        non = intersect(&non, store.postings_lookup(w));
    }
    match mode {
        CandidateMode::Paper => non.into_iter().filter(|id| !schema.contains(id)).collect(),
        CandidateMode::Union => {
            let mut all: BTreeSet<StatementId> = schema;
            all.extend(non);
            all.into_iter().collect()
        }
    }
}

/// Query events over global word ids, before rotation into a candidate.
///
/// One elementary event per keyword occurrence (weight 1) and one
/// superposition per compound mined from the keyword sequence (weight
/// T(c)). Keywords outside the vocabulary get ids past its end so they
/// project to nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryEvents {
    pub events: Vec<Event>,
    pub freqs: Vec<f64>,
}

pub fn query_events(keywords: &[String], vocab: &Vocabulary, config: &Config) -> Result<QueryEvents> {
    if keywords.is_empty() {
        return Err(Error::Argument("query has no keywords".into()));
    }
    let mut unknown: Vec<String> = Vec::new();
    let mut id_of = |w: &str| -> WordId {
        vocab.id(w).unwrap_or_else(|| {
            let pos = unknown.iter().position(|u| *u == w).unwrap_or_else(|| {
                unknown.push(w.to_owned());
                unknown.len() - 1
            });
            WordId((vocab.len() + pos) as u32)
        })
    };
    let mut events = Vec::new();
    for k in keywords {
        events.push(Event::elementary(id_of(k), 1.0));
    }
    for c in mine_compounds(keywords, &MiningOptions::from_config(config)) {
        let ids: Vec<WordId> = c.words.iter().map(|w| id_of(w)).collect();
        events.push(Event::superposition(&ids, &c.sigma_sq, c.multiplicity as f64)?);
    }
    let total: f64 = events.iter().map(|e| e.weight).sum();
    let freqs = events.iter().map(|e| e.weight / total).collect();
    Ok(QueryEvents { events, freqs })
}

/// Query events rotated into a candidate's kept eigenbasis.
pub fn build_query_events(qe: &QueryEvents, ds: &DensitySystem) -> (Vec<ReducedEvent>, Vec<f64>) {
    let reduced = qe.events.iter().map(|e| reduce_event(e, ds)).collect();
    (reduced, qe.freqs.clone())
}

/// Fits the query density in the candidate's eigenbasis. `None` when no
/// query event overlaps the candidate.
pub fn query_density(qe: &QueryEvents, ds: &DensitySystem, config: &Config) -> Result<Option<DensityVector>> {
    let (reduced, freqs) = build_query_events(qe, ds);
    match maxlik_density_vector(&reduced, &freqs, &MaxLikOptions::for_vector(config)) {
        Ok(beta) => Ok(Some(beta)),
        Err(Error::NoOverlap) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Score of one candidate, `None` on no overlap.
pub fn score_candidate(qe: &QueryEvents, ds: &DensitySystem, config: &Config) -> Result<Option<f64>> {
    match query_density(qe, ds, config)? {
        Some(beta) => vnd_score(&beta, &ds.val).map(Some),
        None => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub statement_id: StatementId,
    pub score: f64,
    pub raw_text: String,
    pub provenance: Vec<SourceRef>,
}

/// Normalizes and classifies a raw query against the store's lexicon.
pub fn parse_query(store: &IndexStore, raw: &str) -> Result<KeywordQuery> {
    classify_keywords(&store.normalizer.normalize(raw), &store.lexicon)
}

/// Top-k statements for a raw keyword query, best first. Ties go to the
/// smaller statement id; candidates with no overlap are left out.
pub fn answer_query(store: &IndexStore, raw: &str, k: usize, mode: CandidateMode) -> Result<Vec<QueryResult>> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    let query = parse_query(store, raw)?;
    let candidates = candidate_set(store, &query, mode);
    let qe = query_events(&query.keywords, &store.vocab, &store.config)?;
    let scored: Vec<(StatementId, Option<f64>)> = candidates
        .par_iter()
        .map(|&id| {
            let ds = store
                .system(id)
                .ok_or_else(|| Error::Invariant(format!("no density system for statement {id}")))?;
            Ok((id, score_candidate(&qe, ds, &store.config)?))
        })
        .collect::<Result<_>>()?;
    let mut ranked: Vec<(StatementId, f64)> = scored
        .into_iter()
        .filter_map(|(id, s)| s.map(|s| (id, s)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(k);
    Ok(ranked
        .into_iter()
        .map(|(id, score)| {
            let st = &store.statements[id.0 as usize];
            QueryResult {
                statement_id: id,
                score,
                raw_text: st.raw_text.clone(),
                provenance: st.provenance.clone(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon(terms: &[&str]) -> SchemaLexicon {
        SchemaLexicon {
            terms: terms.iter().map(|t| t.to_string()).collect(),
        }
    }

    fn owned(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn classification_partitions() {
        let q = classify_keywords(&owned(&["rate", "perfect", "rate"]), &lexicon(&["rate"])).unwrap();
        assert_eq!(q.schema, ["rate".to_string()].into());
        assert_eq!(q.non_schema, ["perfect".to_string()].into());
        let q = classify_keywords(&owned(&["a", "b"]), &SchemaLexicon::default()).unwrap();
        assert!(q.schema.is_empty());
        assert!(classify_keywords(&[], &SchemaLexicon::default()).is_err());
    }

    #[test]
    fn single_keyword_single_event() {
        let vocab = Vocabulary::from_sorted(owned(&["a", "b"])).unwrap();
        let qe = query_events(&owned(&["b"]), &vocab, &Config::default()).unwrap();
        assert_eq!(qe.events.len(), 1);
        assert_eq!(qe.freqs, vec![1.0]);
    }

    #[test]
    fn two_word_query_forms_compound() {
        let vocab = Vocabulary::from_sorted(owned(&["comput", "game"])).unwrap();
        let qe = query_events(&owned(&["comput", "game"]), &vocab, &Config::default()).unwrap();
        assert_eq!(qe.events.len(), 3);
        let k = &qe.events[2];
        assert!((k.ket.amplitude(WordId(0)) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(qe.freqs, vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn unknown_keywords_get_fresh_ids() {
        let vocab = Vocabulary::from_sorted(owned(&["a"])).unwrap();
        let qe = query_events(&owned(&["zz", "a", "zz"]), &vocab, &Config::default()).unwrap();
        assert_eq!(qe.events[0].ket.components(), &[(WordId(1), 1.0)]);
        assert_eq!(qe.events[2].ket.components(), &[(WordId(1), 1.0)]);
    }
}
