//! Text normalization shared by statements, the schema lexicon and queries:
//! lowercase, split on non-alphanumeric runs, drop stopwords, Porter-stem.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};

const ENGLISH_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// Bound on repeated stemming; real words settle within two or three passes.
const MAX_STEM_PASSES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalizer {
    stopwords: HashSet<String>,
}

impl Default for Normalizer {
    fn default() -> Self {
        Self::english()
    }
}

impl Normalizer {
    /// The shipped English list (`data/stopwords.txt`).
    pub fn english() -> Self {
        Self::from_list(ENGLISH_STOPWORDS)
    }

    /// One word per line; `#` starts a comment line.
    pub fn from_list(text: &str) -> Self {
        let stopwords = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Normalizer { stopwords }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_list(&text))
    }

    /// The stopword list in sorted order.
    pub fn stopwords(&self) -> Vec<&str> {
        let mut words: Vec<&str> = self.stopwords.iter().map(String::as_str).collect();
        words.sort_unstable();
        words
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    pub fn normalize(&self, raw: &str) -> Vec<String> {
        raw.to_lowercase()
            .split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .filter_map(|w| self.normalize_word(w))
            .collect()
    }

    /// A single lowercase alphanumeric word; `None` if it is a stopword.
    fn normalize_word(&self, word: &str) -> Option<String> {
        if self.is_stopword(word) {
            return None;
        }
        let stemmed = stem_to_fixed_point(word);
        (!stemmed.is_empty() && !self.is_stopword(&stemmed)).then_some(stemmed)
    }
}

/// Porter stemming repeated until the word stops changing, so that
/// normalizing already-normalized text is a no-op.
fn stem_to_fixed_point(word: &str) -> String {
    if word.chars().any(|c| c.is_ascii_digit()) {
        return word.to_string();
    }
    let mut current = word.to_string();
    for _ in 0..MAX_STEM_PASSES {
        let next = porter_stemmer::stem(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

/// Splits a key-path or value into lowercase alphanumeric words without
/// stemming. Used for rendering statement text.
pub fn words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}
