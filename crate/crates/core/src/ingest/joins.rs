use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Corpus, Record, SourceRef};
use crate::error::{Error, Result};

/// `source.key.path`: the first dot separates the source name from the path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Selector {
    pub source: String,
    pub path: String,
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().split_once('.') {
            Some((source, path)) if !source.is_empty() && !path.is_empty() => Ok(Selector {
                source: source.to_string(),
                path: path.to_string(),
            }),
            _ => Err(Error::Config(format!(
                "selector `{s}` is not of the form <source>.<key-path>"
            ))),
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.source, self.path)
    }
}

/// Equi-join between two key-paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinRule {
    pub left: Selector,
    pub right: Selector,
}

/// Contents of a dataset's `joins.config`.
///
/// ```text
/// # comment
/// roots=social_network
/// left=social_network.id right=order.custom_id
/// hide=feedback.id,feedback.person_id
/// banner.social_network=social network
/// ```
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetSpec {
    pub rules: Vec<JoinRule>,
    /// Sources whose records become statement roots; `None` means all.
    pub roots: Option<Vec<String>>,
    /// Attributes kept for joining but left out of statement text.
    pub hidden: BTreeSet<Selector>,
    pub banners: BTreeMap<String, String>,
}

impl DatasetSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = DatasetSpec::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| Error::Config(format!("joins.config line {}: {m}", n + 1));
            if let Some(rest) = line.strip_prefix("roots=") {
                let roots = rest
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect();
                spec.roots = Some(roots);
            } else if let Some(rest) = line.strip_prefix("hide=") {
                for sel in rest.split(',').filter(|s| !s.trim().is_empty()) {
                    spec.hidden.insert(sel.parse()?);
                }
            } else if let Some(rest) = line.strip_prefix("banner.") {
                let (source, words) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected banner.<source>=<words>".into()))?;
                spec.banners
                    .insert(source.trim().to_string(), words.trim().to_string());
            } else if line.starts_with("left=") || line.starts_with("right=") {
                let (mut left, mut right) = (None, None);
                for field in line.split_whitespace() {
                    match field.split_once('=') {
                        Some(("left", v)) => left = Some(v.parse::<Selector>()?),
                        Some(("right", v)) => right = Some(v.parse::<Selector>()?),
                        Some(("kind", "equi")) => {}
                        _ => return Err(err(format!("unexpected field `{field}`"))),
                    }
                }
                match (left, right) {
                    (Some(left), Some(right)) => spec.rules.push(JoinRule { left, right }),
                    _ => return Err(err("a join rule needs both left= and right=".into())),
                }
            } else {
                return Err(err(format!("unrecognized line `{line}`")));
            }
        }
        Ok(spec)
    }

    /// Every selector and source name must resolve in the loaded corpus.
    pub fn validate(&self, corpus: &Corpus) -> Result<()> {
        validate_rules(corpus, &self.rules)?;
        let known = |s: &str| corpus.source(s).is_some();
        for root in self.roots.iter().flatten() {
            if !known(root) {
                return Err(Error::Config(format!("root source `{root}` not loaded")));
            }
        }
        for sel in &self.hidden {
            if !known(&sel.source) {
                return Err(Error::Config(format!("hidden attribute `{sel}` names an unknown source")));
            }
        }
        for source in self.banners.keys() {
            if !known(source) {
                return Err(Error::Config(format!("banner for unknown source `{source}`")));
            }
        }
        Ok(())
    }
}

fn validate_rules(corpus: &Corpus, rules: &[JoinRule]) -> Result<()> {
    for rule in rules {
        for sel in [&rule.left, &rule.right] {
            let info = corpus
                .source(&sel.source)
                .ok_or_else(|| Error::Config(format!("join selector `{sel}` names an unknown source")))?;
            if !info.has_attribute(&sel.path) {
                return Err(Error::Config(format!(
                    "join selector `{sel}`: source has no key-path `{}`",
                    sel.path
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct JoinOptions {
    pub roots: Option<Vec<String>>,
    pub max_fanout: usize,
}

impl Default for JoinOptions {
    fn default() -> Self {
        JoinOptions {
            roots: None,
            max_fanout: 64,
        }
    }
}

/// A root record together with everything reachable from it through join
/// rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinedRecord {
    pub root: Record,
    pub attached: Vec<Record>,
    pub provenance: Vec<SourceRef>,
    /// Set when the fanout cap dropped matching records.
    pub truncated: bool,
}

impl JoinedRecord {
    pub fn records(&self) -> impl Iterator<Item = &Record> {
        std::iter::once(&self.root).chain(self.attached.iter())
    }
}

/// Expands every root record through the join rules, transitively, attaching
/// matches in rule order and then record id order.
pub fn apply_joins(
    corpus: &Corpus,
    rules: &[JoinRule],
    opts: &JoinOptions,
) -> Result<Vec<JoinedRecord>> {
    validate_rules(corpus, rules)?;
    let records = &corpus.records;

    // (rule, side) -> key value -> record indices sorted by record id
    let mut lookup: Vec<[HashMap<&str, Vec<usize>>; 2]> = Vec::with_capacity(rules.len());
    for rule in rules {
        let mut maps: [HashMap<&str, Vec<usize>>; 2] = Default::default();
        for (side, sel) in [&rule.left, &rule.right].into_iter().enumerate() {
            for (i, rec) in records.iter().enumerate() {
                if rec.source_name != sel.source {
                    continue;
                }
                let mut seen = HashSet::new();
                for v in rec.values(&sel.path).filter(|v| !v.is_empty()) {
                    if seen.insert(v) {
                        maps[side].entry(v).or_default().push(i);
                    }
                }
            }
            for list in maps[side].values_mut() {
                list.sort_by(|&a, &b| records[a].record_id.cmp(&records[b].record_id));
            }
        }
        lookup.push(maps);
    }

    let mut roots: Vec<usize> = match &opts.roots {
        None => (0..records.len()).collect(),
        Some(names) => (0..records.len())
            .filter(|&i| names.iter().any(|n| *n == records[i].source_name))
            .collect(),
    };
    roots.sort_by_key(|&i| records[i].source_ref());

    let joined = roots
        .par_iter()
        .map(|&root| expand(records, rules, &lookup, root, opts.max_fanout))
        .collect::<Vec<_>>();
    for jr in joined.iter().filter(|jr| jr.truncated) {
        log::warn!(
            "join fanout cap {} reached for {} {}; extra matches dropped",
            opts.max_fanout,
            jr.root.source_name,
            jr.root.record_id
        );
    }
    Ok(joined)
}

fn expand(
    records: &[Record],
    rules: &[JoinRule],
    lookup: &[[HashMap<&str, Vec<usize>>; 2]],
    root: usize,
    max_fanout: usize,
) -> JoinedRecord {
    let mut included = vec![root];
    let mut member: HashSet<usize> = HashSet::from([root]);
    let mut truncated = false;
    'outer: loop {
        let mut changed = false;
        for (ri, rule) in rules.iter().enumerate() {
            let mut found: BTreeSet<(&str, &str, usize)> = BTreeSet::new();
            for &idx in &included {
                let rec = &records[idx];
                for (side, sel) in [(0usize, &rule.left), (1, &rule.right)] {
                    if rec.source_name != sel.source {
                        continue;
                    }
                    for v in rec.values(&sel.path) {
                        for &j in lookup[ri][1 - side].get(v).into_iter().flatten() {
                            if !member.contains(&j) {
                                let r = &records[j];
                                found.insert((r.source_name.as_str(), r.record_id.as_str(), j));
                            }
                        }
                    }
                }
            }
            for (_, _, j) in found {
                if included.len() > max_fanout {
                    truncated = true;
                    break 'outer;
                }
                member.insert(j);
                included.push(j);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let attached: Vec<Record> = included[1..].iter().map(|&i| records[i].clone()).collect();
    let provenance = included.iter().map(|&i| records[i].source_ref()).collect();
    JoinedRecord {
        root: records[root].clone(),
        attached,
        provenance,
        truncated,
    }
}
