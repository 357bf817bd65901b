//! Offline pipeline: statements, compounds, event sets, density systems,
//! vocabulary and postings, plus the on-disk index format.

mod persist;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::colocation::{mine_compounds, Compound, MiningOptions};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::ids::{StatementId, WordId};
use crate::ingest::Dataset;
use crate::quantum::{eigendecompose, maxlik_density_matrix, pca_truncate, DensitySystem, Event, MaxLikOptions};
use crate::statements::{build_schema_lexicon, build_statements, normalizer_for, SchemaLexicon, Statement};
use crate::text::Normalizer;

pub use persist::FORMAT_VERSION;

/// Sorted normalized words; a word's id is its position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
}

impl Vocabulary {
    pub fn from_statements(statements: &[Statement]) -> Self {
        let words: BTreeSet<&str> = statements.iter().flat_map(|s| s.tokens.iter().map(String::as_str)).collect();
        Vocabulary {
            words: words.into_iter().map(str::to_owned).collect(),
        }
    }

    pub(crate) fn from_sorted(words: Vec<String>) -> Result<Self> {
        if words.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invariant("vocabulary is not strictly sorted".into()));
        }
        Ok(Vocabulary { words })
    }

    pub fn id(&self, word: &str) -> Option<WordId> {
        self.words
            .binary_search_by(|w| w.as_str().cmp(word))
            .ok()
            .map(|i| WordId(i as u32))
    }

    pub fn word(&self, id: WordId) -> Option<&str> {
        self.words.get(id.0 as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    fn require(&self, word: &str) -> Result<WordId> {
        self.id(word)
            .ok_or_else(|| Error::Invariant(format!("word `{word}` missing from vocabulary")))
    }
}

/// Statement events: one elementary event per distinct word weighted by its
/// count, then one superposition per compound weighted by its multiplicity.
/// Frequencies are the weights normalized to sum one.
pub fn build_event_set(tokens: &[String], compounds: &[Compound], vocab: &Vocabulary) -> Result<(Vec<Event>, Vec<f64>)> {
    let mut counts: Vec<(WordId, u64)> = Vec::new();
    for t in tokens {
        counts.push((vocab.require(t)?, 1));
    }
    counts.sort_by_key(|&(w, _)| w);
    counts.dedup_by(|next, kept| {
        if next.0 == kept.0 {
            kept.1 += next.1;
            true
        } else {
            false
        }
    });
    let mut events: Vec<Event> = counts
        .iter()
        .map(|&(w, n)| Event::elementary(w, n as f64))
        .collect();
    for c in compounds {
        let ids = c.words.iter().map(|w| vocab.require(w)).collect::<Result<Vec<_>>>()?;
        events.push(Event::superposition(&ids, &c.sigma_sq, c.multiplicity as f64)?);
    }
    let total: f64 = events.iter().map(|e| e.weight).sum();
    if !(total > 0.0) {
        return Err(Error::Argument("empty statement".into()));
    }
    let freqs = events.iter().map(|e| e.weight / total).collect();
    Ok((events, freqs))
}

/// Density system of one statement.
pub fn statement_system(statement: &Statement, vocab: &Vocabulary, config: &Config) -> Result<DensitySystem> {
    let compounds = mine_compounds(&statement.tokens, &MiningOptions::from_config(config));
    let (events, freqs) = build_event_set(&statement.tokens, &compounds, vocab)?;
    let rho = maxlik_density_matrix(&events, &freqs, &MaxLikOptions::for_matrix(config))?;
    let es = eigendecompose(&rho)?;
    pca_truncate(&es, config.pca_threshold, statement.statement_id)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexStore {
    pub config: Config,
    pub vocab: Vocabulary,
    /// Statement ids per word id, ascending.
    pub postings: Vec<Vec<StatementId>>,
    /// One system per statement, indexed by statement id.
    pub systems: Vec<DensitySystem>,
    pub statements: Vec<Statement>,
    pub lexicon: SchemaLexicon,
    pub normalizer: Normalizer,
}

/// Runs the offline pipeline over a dataset directory.
pub fn build_index(dataset_dir: &Path, config: &Config) -> Result<IndexStore> {
    config.validate()?;
    let dataset = Dataset::load(dataset_dir).map_err(Error::stage("ingest"))?;
    build_index_from_dataset(&dataset, config)
}

pub fn build_index_from_dataset(dataset: &Dataset, config: &Config) -> Result<IndexStore> {
    let normalizer = normalizer_for(config).map_err(Error::stage("statements"))?;
    let statements = build_statements(dataset, config, &normalizer).map_err(Error::stage("statements"))?;
    let lexicon = build_schema_lexicon(&dataset.corpus, config, &normalizer);
    IndexStore::from_statements(statements, lexicon, normalizer, config)
}

impl IndexStore {
    pub fn from_statements(
        statements: Vec<Statement>,
        lexicon: SchemaLexicon,
        normalizer: Normalizer,
        config: &Config,
    ) -> Result<Self> {
        if statements.is_empty() {
            return Err(Error::NoStatements);
        }
        let vocab = Vocabulary::from_statements(&statements);
        let systems = statements
            .par_iter()
            .map(|st| {
                statement_system(st, &vocab, config).map_err(|e| Error::Stage {
                    stage: "density",
                    source: Box::new(Error::Invariant(format!("statement {}: {e}", st.statement_id))),
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut postings: Vec<Vec<StatementId>> = vec![Vec::new(); vocab.len()];
        for st in &statements {
            let mut ids: Vec<WordId> = st.tokens.iter().map(|t| vocab.require(t)).collect::<Result<_>>()?;
            ids.sort();
            ids.dedup();
            for w in ids {
                postings[w.0 as usize].push(st.statement_id);
            }
        }
        Ok(IndexStore {
            config: config.clone(),
            vocab,
            postings,
            systems,
            statements,
            lexicon,
            normalizer,
        })
    }

    /// Statements containing `word` (already normalized), ascending.
    pub fn postings_lookup(&self, word: &str) -> &[StatementId] {
        self.vocab
            .id(word)
            .map_or(&[][..], |id| self.postings[id.0 as usize].as_slice())
    }

    pub fn statement(&self, id: StatementId) -> Option<&Statement> {
        self.statements.get(id.0 as usize)
    }

    pub fn system(&self, id: StatementId) -> Option<&DensitySystem> {
        self.systems.get(id.0 as usize)
    }

    pub fn dimension_report(&self) -> DimensionReport {
        let mut report = DimensionReport {
            statements: self.statements.len(),
            vocabulary: self.vocab.len(),
            max_h: 0,
            max_m: 0,
            mean_h: 0.0,
            h_within_m: true,
        };
        for (st, ds) in self.statements.iter().zip(&self.systems) {
            let m = st.tokens.iter().collect::<BTreeSet<_>>().len();
            report.max_h = report.max_h.max(ds.h);
            report.max_m = report.max_m.max(m);
            report.mean_h += ds.h as f64;
            report.h_within_m &= ds.h <= m;
        }
        report.mean_h /= self.statements.len().max(1) as f64;
        report
    }
}

/// How far the kept dimension `h` stays below the statement and vocabulary
/// dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub statements: usize,
    pub vocabulary: usize,
    pub max_h: usize,
    pub max_m: usize,
    pub mean_h: f64,
    pub h_within_m: bool,
}

impl fmt::Display for DimensionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "statements={} vocabulary={} max_m={} max_h={} mean_h={:.2} h<=m:{}",
            self.statements, self.vocabulary, self.max_m, self.max_h, self.mean_h, self.h_within_m
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Normalizer;

    const REVIEW: &str = "This computer game help study computer architecture this computer game is funny and this focuses on learning.";

    fn statement(text: &str) -> Statement {
        Statement {
            statement_id: StatementId(0),
            tokens: Normalizer::english().normalize(text),
            raw_text: text.into(),
            provenance: Vec::new(),
        }
    }

    #[test]
    fn review_sentence_event_set() {
        let st = statement(REVIEW);
        let vocab = Vocabulary::from_statements(std::slice::from_ref(&st));
        let compounds: Vec<_> = mine_compounds(&st.tokens, &MiningOptions::default())
            .into_iter()
            .filter(|c| c.words == ["comput", "game"])
            .collect();
        let (events, freqs) = build_event_set(&st.tokens, &compounds, &vocab).unwrap();
        let weight = |w: &str| {
            let id = vocab.id(w).unwrap();
            events.iter().find(|e| e.ket.components() == [(id, 1.0)]).unwrap().weight
        };
        assert_eq!(weight("comput"), 3.0);
        assert_eq!(weight("game"), 2.0);
        assert_eq!(weight("architectur"), 1.0);
        let k = events.last().unwrap();
        assert_eq!(k.weight, 2.0);
        assert!((k.ket.amplitude(vocab.id("comput").unwrap()) - 0.6f64.sqrt()).abs() < 1e-15);
        assert!((k.ket.amplitude(vocab.id("game").unwrap()) - 0.4f64.sqrt()).abs() < 1e-15);
        assert!((freqs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // 8 distinct words plus the compound; 11 tokens plus multiplicity 2.
        assert_eq!(events.len(), 9);
        assert!((freqs[freqs.len() - 1] - 2.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn no_compounds_gives_elementary_only() {
        let st = statement("alpha beta");
        let vocab = Vocabulary::from_statements(std::slice::from_ref(&st));
        let (events, freqs) = build_event_set(&st.tokens, &[], &vocab).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(freqs, vec![0.5, 0.5]);
    }

    #[test]
    fn empty_statement_list() {
        let err = IndexStore::from_statements(Vec::new(), SchemaLexicon::default(), Normalizer::english(), &Config::default())
            .unwrap_err();
        assert!(matches!(err, Error::NoStatements));
    }

    #[test]
    fn postings_match_tokens() {
        let mut a = statement("red apple");
        let mut b = statement("green apple");
        a.statement_id = StatementId(0);
        b.statement_id = StatementId(1);
        let store =
            IndexStore::from_statements(vec![a, b], SchemaLexicon::default(), Normalizer::english(), &Config::default())
                .unwrap();
        assert_eq!(store.postings_lookup("appl"), &[StatementId(0), StatementId(1)]);
        assert_eq!(store.postings_lookup("red"), &[StatementId(0)]);
        assert!(store.postings_lookup("blue").is_empty());
    }
}
