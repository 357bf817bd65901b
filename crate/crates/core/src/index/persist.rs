//! Index directory format. Text files only; floats are written with 17
//! significant digits so a reload reproduces every value exactly.
//!
//! - `meta.json`: format version, counts and the full config
//! - `vocab.tsv`: `word_id TAB word`
//! - `postings.jsonl`: `{"word_id":…,"ids":[…]}`
//! - `systems.jsonl`: `{"statement_id":…,"h":…,"val":[…],"vec":[[[word_id,amp],…],…]}`
//! - `statements.jsonl`: one statement per line
//! - `lexicon.txt`: one schema term per line
//! - `stopwords.txt`: the stopword list used at build time

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{IndexStore, Vocabulary};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::ids::{StatementId, WordId};
use crate::numfmt;
use crate::quantum::{DensitySystem, DensityVector};
use crate::statements::{SchemaLexicon, Statement};
use crate::text::Normalizer;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct MetaOut<'a> {
    format_version: u32,
    statements: usize,
    vocabulary: usize,
    config: &'a Config,
}

#[derive(Deserialize)]
struct MetaIn {
    format_version: u32,
    statements: usize,
    vocabulary: usize,
    config: Config,
}

#[derive(Serialize, Deserialize)]
struct PostingLine {
    word_id: WordId,
    ids: Vec<StatementId>,
}

#[derive(Deserialize)]
struct SystemLine {
    statement_id: StatementId,
    h: usize,
    val: Vec<f64>,
    vec: Vec<Vec<(WordId, f64)>>,
}

fn system_line(ds: &DensitySystem) -> String {
    let mut s = format!("{{\"statement_id\":{},\"h\":{},\"val\":[", ds.statement_id, ds.h);
    for (i, v) in ds.val.as_slice().iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&numfmt::format(*v));
    }
    s.push_str("],\"vec\":[");
    for (i, row) in ds.vec.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push('[');
        for (j, (w, a)) in row.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            let _ = write!(s, "[{w},{}]", numfmt::format(*a));
        }
        s.push(']');
    }
    s.push_str("]}");
    s
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("index records serialize")
}

impl IndexStore {
    /// Writes the index into `dir`, creating it if needed.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

        let meta = MetaOut {
            format_version: FORMAT_VERSION,
            statements: self.statements.len(),
            vocabulary: self.vocab.len(),
            config: &self.config,
        };
        let mut text = serde_json::to_string_pretty(&meta).expect("meta serializes");
        text.push('\n');
        write_file(dir, "meta.json", &text)?;

        let mut text = String::new();
        for (i, w) in self.vocab.words().iter().enumerate() {
            let _ = writeln!(text, "{i}\t{w}");
        }
        write_file(dir, "vocab.tsv", &text)?;

        let mut text = String::new();
        for (i, ids) in self.postings.iter().enumerate() {
            text.push_str(&to_json(&PostingLine {
                word_id: WordId(i as u32),
                ids: ids.clone(),
            }));
            text.push('\n');
        }
        write_file(dir, "postings.jsonl", &text)?;

        let mut text = String::new();
        for ds in &self.systems {
            text.push_str(&system_line(ds));
            text.push('\n');
        }
        write_file(dir, "systems.jsonl", &text)?;

        let mut text = String::new();
        for st in &self.statements {
            text.push_str(&to_json(st));
            text.push('\n');
        }
        write_file(dir, "statements.jsonl", &text)?;

        let mut text = String::new();
        for t in &self.lexicon.terms {
            text.push_str(t);
            text.push('\n');
        }
        write_file(dir, "lexicon.txt", &text)?;

        let mut text = String::new();
        for w in self.normalizer.stopwords() {
            text.push_str(w);
            text.push('\n');
        }
        write_file(dir, "stopwords.txt", &text)
    }

    /// Reads an index written by [`save`](Self::save) and checks it for
    /// internal consistency.
    pub fn load(dir: &Path) -> Result<Self> {
        let read = |name: &str| -> Result<(PathBuf, String)> {
            let path = dir.join(name);
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            Ok((path, text))
        };
        let bad = |path: &Path, message: String| Error::Index {
            path: path.to_path_buf(),
            message,
        };
        fn lines<'a, T: Deserialize<'a>>(path: &Path, text: &'a str) -> Result<Vec<T>> {
            text.lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(i, l)| {
                    serde_json::from_str(l).map_err(|e| Error::Index {
                        path: path.to_path_buf(),
                        message: format!("line {}: {e}", i + 1),
                    })
                })
                .collect()
        }

        let (path, text) = read("meta.json")?;
        let meta: MetaIn = serde_json::from_str(&text).map_err(|e| bad(&path, e.to_string()))?;
        if meta.format_version != FORMAT_VERSION {
            return Err(bad(
                &path,
                format!("format version {} (expected {FORMAT_VERSION})", meta.format_version),
            ));
        }

        let (path, text) = read("vocab.tsv")?;
        let mut words = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let (id, word) = line
                .split_once('\t')
                .ok_or_else(|| bad(&path, format!("line {}: expected `id<TAB>word`", i + 1)))?;
            if id.parse::<usize>().ok() != Some(i) {
                return Err(bad(&path, format!("line {}: id {id} out of sequence", i + 1)));
            }
            words.push(word.to_string());
        }
        let vocab = Vocabulary::from_sorted(words).map_err(|e| bad(&path, e.to_string()))?;
        if vocab.len() != meta.vocabulary {
            return Err(bad(&path, format!("{} words, meta says {}", vocab.len(), meta.vocabulary)));
        }

        let (path, text) = read("statements.jsonl")?;
        let statements: Vec<Statement> = lines(&path, &text)?;
        if statements.len() != meta.statements {
            return Err(bad(
                &path,
                format!("{} statements, meta says {}", statements.len(), meta.statements),
            ));
        }
        for (i, st) in statements.iter().enumerate() {
            if st.statement_id.0 as usize != i {
                return Err(bad(&path, format!("statement {} out of sequence", st.statement_id)));
            }
            if let Some(t) = st.tokens.iter().find(|t| vocab.id(t).is_none()) {
                return Err(bad(&path, format!("statement {i}: token `{t}` not in vocabulary")));
            }
        }

        let (path, text) = read("postings.jsonl")?;
        let lines_in: Vec<PostingLine> = lines(&path, &text)?;
        if lines_in.len() != vocab.len() {
            return Err(bad(&path, format!("{} posting lists for {} words", lines_in.len(), vocab.len())));
        }
        let mut postings = Vec::with_capacity(lines_in.len());
        for (i, p) in lines_in.into_iter().enumerate() {
            if p.word_id.0 as usize != i {
                return Err(bad(&path, format!("word {} out of sequence", p.word_id)));
            }
            if p.ids.windows(2).any(|w| w[0] >= w[1]) || p.ids.iter().any(|id| id.0 as usize >= statements.len()) {
                return Err(bad(&path, format!("word {i}: malformed statement list")));
            }
            postings.push(p.ids);
        }

        let (path, text) = read("systems.jsonl")?;
        let lines_in: Vec<SystemLine> = lines(&path, &text)?;
        if lines_in.len() != statements.len() {
            return Err(bad(
                &path,
                format!("{} systems for {} statements", lines_in.len(), statements.len()),
            ));
        }
        let mut systems = Vec::with_capacity(lines_in.len());
        for (i, s) in lines_in.into_iter().enumerate() {
            if s.statement_id.0 as usize != i {
                return Err(bad(&path, format!("system {} out of sequence", s.statement_id)));
            }
            let val = DensityVector::new(s.val).map_err(|e| bad(&path, format!("system {i}: {e}")))?;
            let ds = DensitySystem {
                statement_id: s.statement_id,
                h: s.h,
                val,
                vec: s.vec,
            };
            ds.check().map_err(|e| bad(&path, e.to_string()))?;
            if ds.vec.iter().flatten().any(|(w, _)| w.0 as usize >= vocab.len()) {
                return Err(bad(&path, format!("system {i}: word id out of range")));
            }
            systems.push(ds);
        }

        let (_, text) = read("lexicon.txt")?;
        let lexicon = SchemaLexicon {
            terms: text.lines().filter(|l| !l.is_empty()).map(str::to_owned).collect(),
        };
        let (_, text) = read("stopwords.txt")?;
        let normalizer = Normalizer::from_list(&text);

        Ok(IndexStore {
            config: meta.config,
            vocab,
            postings,
            systems,
            statements,
            lexicon,
            normalizer,
        })
    }
}
