//! Co-location compounds: word sets that keep appearing together inside a
//! short window of a token sequence.
//!
//! `T(c)` is the number of pairwise-disjoint windows of at most
//! `l * |c| + slack` consecutive tokens that contain every word of `c`;
//! `T(w)` is the number of occurrences of `w` in the whole sequence. The
//! participation ratio is `PR(c, w) = T(c) / T(w)` and the participation
//! index `PI(c)` is the smallest ratio over the members of `c`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::config::{Config, WeightMode};
use crate::error::{Error, Result};

pub type Rational = Ratio<u64>;

/// Window sizing for a compound of `p` words: `l * p + slack` tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowRule {
    pub l: usize,
    pub slack: usize,
}

impl Default for WindowRule {
    fn default() -> Self {
        WindowRule { l: 1, slack: 1 }
    }
}

impl WindowRule {
    pub fn from_config(config: &Config) -> Self {
        WindowRule {
            l: config.l,
            slack: config.window_slack,
        }
    }

    pub fn len(&self, compound_size: usize) -> usize {
        self.l * compound_size + self.slack
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompoundStats {
    pub words: Vec<String>,
    pub t_c: u64,
    pub t_w: Vec<u64>,
    pub pi: Rational,
}

impl CompoundStats {
    pub fn pr(&self, i: usize) -> Rational {
        Rational::new(self.t_c, self.t_w[i])
    }
}

/// A compound with its co-location weights (σᵢ², same order as `words`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compound {
    pub words: Vec<String>,
    pub sigma_sq: Vec<f64>,
    pub multiplicity: u64,
}

/// Maps tokens to small integers so window scans compare integers.
struct Encoded {
    seq: Vec<u32>,
    ids: HashMap<String, u32>,
    names: Vec<String>,
}

impl Encoded {
    fn new<S: AsRef<str>>(tokens: &[S]) -> Self {
        let mut ids = HashMap::new();
        let mut names = Vec::new();
        let seq = tokens
            .iter()
            .map(|t| {
                let t = t.as_ref();
                *ids.entry(t.to_string()).or_insert_with(|| {
                    names.push(t.to_string());
                    (names.len() - 1) as u32
                })
            })
            .collect();
        Encoded { seq, ids, names }
    }

    fn occurrences(&self, id: u32) -> u64 {
        self.seq.iter().filter(|&&x| x == id).count() as u64
    }
}

fn distinct_members<S: AsRef<str>>(c: &[S]) -> Result<Vec<&str>> {
    let set: BTreeSet<&str> = c.iter().map(AsRef::as_ref).collect();
    if set.len() < 2 {
        return Err(Error::Argument(format!(
            "a compound needs at least two distinct words, got {}",
            set.len()
        )));
    }
    Ok(set.into_iter().collect())
}

/// Earliest-ending greedy scan; optimal for counting disjoint windows.
fn disjoint_windows(seq: &[u32], members: &[u32], window: usize) -> u64 {
    let mut count = 0;
    let mut free = 0usize;
    for end in 0..seq.len() {
        let start = free.max((end + 1).saturating_sub(window));
        if start > end || end + 1 - start < members.len() {
            continue;
        }
        let span = &seq[start..=end];
        if members.iter().all(|m| span.contains(m)) {
            count += 1;
            free = end + 1;
        }
    }
    count
}

/// `T(c)`: number of disjoint windows containing every word of `c`.
pub fn count_windows<S: AsRef<str>, W: AsRef<str>>(tokens: &[S], c: &[W], rule: WindowRule) -> Result<u64> {
    let members = distinct_members(c)?;
    let enc = Encoded::new(tokens);
    let Some(ids) = members
        .iter()
        .map(|w| enc.ids.get(*w).copied())
        .collect::<Option<Vec<u32>>>()
    else {
        return Ok(0);
    };
    Ok(disjoint_windows(&enc.seq, &ids, rule.len(members.len())))
}

pub fn compound_stats<S: AsRef<str>, W: AsRef<str>>(tokens: &[S], c: &[W], rule: WindowRule) -> Result<CompoundStats> {
    let members = distinct_members(c)?;
    let t_c = count_windows(tokens, &members, rule)?;
    let t_w: Vec<u64> = members
        .iter()
        .map(|w| tokens.iter().filter(|t| t.as_ref() == *w).count() as u64)
        .collect();
    if let Some(i) = t_w.iter().position(|&t| t == 0) {
        return Err(Error::Argument(format!("`{}` does not occur in the statement", members[i])));
    }
    let pi = t_w
        .iter()
        .map(|&tw| Rational::new(t_c, tw))
        .min()
        .expect("at least two members");
    Ok(CompoundStats {
        words: members.iter().map(|s| s.to_string()).collect(),
        t_c,
        t_w,
        pi,
    })
}

/// `PR(c, w) = T(c) / T(w)`, kept as an exact fraction.
pub fn participation_ratio<S: AsRef<str>, W: AsRef<str>>(
    c: &[W],
    w: &str,
    tokens: &[S],
    rule: WindowRule,
) -> Result<Rational> {
    let stats = compound_stats(tokens, c, rule)?;
    let i = stats
        .words
        .iter()
        .position(|m| m == w)
        .ok_or_else(|| Error::Argument(format!("`{w}` is not a member of the compound")))?;
    Ok(stats.pr(i))
}

/// `PI(c) = min_w PR(c, w)`.
pub fn participation_index<S: AsRef<str>, W: AsRef<str>>(c: &[W], tokens: &[S], rule: WindowRule) -> Result<Rational> {
    Ok(compound_stats(tokens, c, rule)?.pi)
}

pub fn meets_threshold(pi: Rational, min_threshold: f64) -> bool {
    *pi.numer() as f64 / *pi.denom() as f64 >= min_threshold
}

#[derive(Debug, Clone, Copy)]
pub struct MiningOptions {
    pub min_threshold: f64,
    pub max_size: usize,
    pub rule: WindowRule,
    pub weight_mode: WeightMode,
}

impl MiningOptions {
    pub fn from_config(config: &Config) -> Self {
        MiningOptions {
            min_threshold: config.min_threshold,
            max_size: config.max_compound_size,
            rule: WindowRule::from_config(config),
            weight_mode: config.weight_mode,
        }
    }
}

impl Default for MiningOptions {
    fn default() -> Self {
        Self::from_config(&Config::default())
    }
}

/// Every word set of size 2..=max_size seen together in at least one window,
/// with its statistics, ordered lexicographically by words.
pub fn co_location_candidates<S: AsRef<str>>(tokens: &[S], max_size: usize, rule: WindowRule) -> Vec<CompoundStats> {
    let enc = Encoded::new(tokens);
    let mut found: BTreeSet<Vec<u32>> = BTreeSet::new();
    for size in 2..=max_size {
        let window = rule.len(size);
        for end in 0..enc.seq.len() {
            let start = (end + 1).saturating_sub(window);
            let distinct: BTreeSet<u32> = enc.seq[start..=end].iter().copied().collect();
            if distinct.len() < size {
                continue;
            }
            let distinct: Vec<u32> = distinct.into_iter().collect();
            for_each_subset(&distinct, size, &mut |s| {
                found.insert(s.to_vec());
            });
        }
    }

    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut stats: Vec<CompoundStats> = found
        .into_iter()
        .map(|ids| {
            let t_c = disjoint_windows(&enc.seq, &ids, rule.len(ids.len()));
            let mut members: Vec<(&str, u64)> = ids
                .iter()
                .map(|&id| {
                    let tw = *counts.entry(id).or_insert_with(|| enc.occurrences(id));
                    (enc.names[id as usize].as_str(), tw)
                })
                .collect();
            members.sort();
            let pi = members
                .iter()
                .map(|&(_, tw)| Rational::new(t_c, tw))
                .min()
                .expect("non-empty");
            CompoundStats {
                words: members.iter().map(|(w, _)| w.to_string()).collect(),
                t_w: members.iter().map(|&(_, tw)| tw).collect(),
                t_c,
                pi,
            }
        })
        .collect();
    stats.sort_by(|a, b| a.words.cmp(&b.words));
    stats
}

fn for_each_subset(items: &[u32], size: usize, f: &mut impl FnMut(&[u32])) {
    fn rec(items: &[u32], size: usize, from: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for i in from..items.len() {
            if items.len() - i < size - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, size, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, size, 0, &mut Vec::with_capacity(size), f);
}

pub fn weights(stats: &CompoundStats, mode: WeightMode) -> Vec<f64> {
    match mode {
        WeightMode::Colocation => {
            let total: u64 = stats.t_w.iter().sum();
            stats.t_w.iter().map(|&t| t as f64 / total as f64).collect()
        }
        WeightMode::Average => {
            let p = stats.words.len() as f64;
            vec![1.0 / p; stats.words.len()]
        }
    }
}

/// Candidates whose participation index clears `min_threshold`.
pub fn mine_compounds<S: AsRef<str>>(tokens: &[S], opts: &MiningOptions) -> Vec<Compound> {
    co_location_candidates(tokens, opts.max_size, opts.rule)
        .into_iter()
        .filter(|s| s.t_c > 0 && meets_threshold(s.pi, opts.min_threshold))
        .map(|s| Compound {
            sigma_sq: weights(&s, opts.weight_mode),
            multiplicity: s.t_c,
            words: s.words,
        })
        .collect()
}
