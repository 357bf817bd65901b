//! Precision, recall and F-measure at k over a query set with known
//! relevant statements, and the compound-threshold sweep.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::path::Path;

use rayon::prelude::*;

use crate::colocation::{mine_compounds, MiningOptions};
use crate::config::{CandidateMode, Config, WeightMode};
use crate::error::{Error, Result};
use crate::ids::StatementId;
use crate::index::{build_index_from_dataset, IndexStore};
use crate::ingest::Dataset;
use crate::query::answer_query;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// Metrics of the top `k` results. Precision divides by `min(k, |results|)`
/// so a short result list is not penalized for missing ranks.
pub fn metrics(results: &[StatementId], relevant: &BTreeSet<StatementId>, k: usize) -> Result<Metrics> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    if relevant.is_empty() {
        return Err(Error::Argument("no relevant statements".into()));
    }
    let top = &results[..results.len().min(k)];
    let hits = top.iter().filter(|id| relevant.contains(id)).count() as f64;
    let precision = if top.is_empty() { 0.0 } else { hits / top.len() as f64 };
    let recall = hits / relevant.len() as f64;
    let f_measure = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Metrics {
        precision,
        recall,
        f_measure,
    })
}

/// `id TAB keywords` per line; blank lines and `#` comments are skipped.
pub fn parse_queries(text: &str, source_name: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            source_name: source_name.to_string(),
            line: i as u64 + 1,
            message,
        };
        let (id, keywords) = line
            .split_once('\t')
            .ok_or_else(|| parse_err("expected `id<TAB>keywords`".into()))?;
        if !seen.insert(id.to_string()) {
            return Err(parse_err(format!("duplicate query id `{id}`")));
        }
        out.push((id.to_string(), keywords.to_string()));
    }
    Ok(out)
}

/// Relevant statements per query id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    pub relevant: BTreeMap<String, BTreeSet<StatementId>>,
}

impl Qrels {
    /// `query_id TAB statement_id` per line.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut relevant: BTreeMap<String, BTreeSet<StatementId>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                source_name: source_name.to_string(),
                line: i as u64 + 1,
                message,
            };
            let (qid, sid) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected `query_id<TAB>statement_id`".into()))?;
            let sid: u32 = sid
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad statement id `{sid}`")))?;
            relevant.entry(qid.to_string()).or_default().insert(StatementId(sid));
        }
        Ok(Qrels { relevant })
    }

    pub fn validate(&self, store: &IndexStore) -> Result<()> {
        for (qid, ids) in &self.relevant {
            if let Some(id) = ids.iter().find(|id| store.statement(**id).is_none()) {
                return Err(Error::Argument(format!("qrels for `{qid}` name unknown statement {id}")));
            }
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn read_queries(path: &Path) -> Result<Vec<(String, String)>> {
    parse_queries(&read(path)?, &path.display().to_string())
}

pub fn read_qrels(path: &Path) -> Result<Qrels> {
    Qrels::parse(&read(path)?, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryMetrics {
    pub query_id: String,
    pub results: usize,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub k: usize,
    /// Ordered by query id.
    pub per_query: Vec<QueryMetrics>,
    /// Queries left out of the averages, with the reason.
    pub skipped: Vec<(String, String)>,
    pub average: Metrics,
}

fn mean(per_query: &[QueryMetrics]) -> Metrics {
    let n = per_query.len().max(1) as f64;
    let sum = |f: fn(&Metrics) -> f64| per_query.iter().map(|q| f(&q.metrics)).sum::<f64>() / n;
    Metrics {
        precision: sum(|m| m.precision),
        recall: sum(|m| m.recall),
        f_measure: sum(|m| m.f_measure),
    }
}

/// Runs every query and scores it against the qrels.
pub fn evaluate(
    store: &IndexStore,
    queries: &[(String, String)],
    qrels: &Qrels,
    k: usize,
    mode: CandidateMode,
) -> Result<MetricsReport> {
    qrels.validate(store)?;
    let mut sorted: Vec<&(String, String)> = queries.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let outcomes: Vec<(String, Result<(usize, Metrics)>)> = sorted
        .par_iter()
        .map(|(qid, keywords)| {
            let outcome = (|| {
                let relevant = qrels
                    .relevant
                    .get(qid)
                    .ok_or_else(|| Error::Argument("no relevant statements".into()))?;
                let results = answer_query(store, keywords, k, mode)?;
                let ids: Vec<StatementId> = results.iter().map(|r| r.statement_id).collect();
                Ok((ids.len(), metrics(&ids, relevant, k)?))
            })();
            (qid.clone(), outcome)
        })
        .collect();

    let mut per_query = Vec::new();
    let mut skipped = Vec::new();
    for (query_id, outcome) in outcomes {
        match outcome {
            Ok((results, metrics)) => per_query.push(QueryMetrics {
                query_id,
                results,
                metrics,
            }),
            Err(e) => {
                log::warn!("query `{query_id}` excluded from averages: {e}");
                skipped.push((query_id, e.to_string()));
            }
        }
    }
    let average = mean(&per_query);
    Ok(MetricsReport {
        k,
        per_query,
        skipped,
        average,
    })
}

impl fmt::Display for MetricsReport {
    /// A table followed by one tab-separated `metrics` line per query and
    /// one for the average.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16} {:>7} {:>9} {:>9} {:>9}", "query", "results", "P@k", "R@k", "F@k")?;
        for q in &self.per_query {
            let m = &q.metrics;
            writeln!(
                f,
                "{:<16} {:>7} {:>9.3} {:>9.3} {:>9.3}",
                q.query_id, q.results, m.precision, m.recall, m.f_measure
            )?;
        }
        for (qid, why) in &self.skipped {
            writeln!(f, "{qid:<16} skipped: {why}")?;
        }
        let m = &self.average;
        writeln!(
            f,
            "{:<16} {:>7} {:>9.3} {:>9.3} {:>9.3}",
            "average", "", m.precision, m.recall, m.f_measure
        )?;
        for q in &self.per_query {
            writeln!(f, "{}", machine_line("metrics", &q.query_id, self.k, &q.metrics))?;
        }
        write!(f, "{}", machine_line("metrics", "average", self.k, &self.average))
    }
}

fn machine_line(tag: &str, label: &str, k: usize, m: &Metrics) -> String {
    format!(
        "{tag}\t{label}\tk={k}\tprecision={:.6}\trecall={:.6}\tf_measure={:.6}",
        m.precision, m.recall, m.f_measure
    )
}

/// One column of the threshold sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepColumn {
    /// `0`, `0.2`, … or `non` for average weights at threshold zero.
    pub label: String,
    pub min_threshold: f64,
    pub weight_mode: WeightMode,
    /// Compounds mined over the whole corpus.
    pub compounds: usize,
    pub report: MetricsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub columns: Vec<SweepColumn>,
    /// Every statement's compounds at a higher threshold are a subset of
    /// those at each lower threshold.
    pub monotone: bool,
}

pub const SWEEP_THRESHOLDS: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

fn column_label(t: f64) -> String {
    let s = format!("{t:.1}");
    if s == "0.0" {
        "0".into()
    } else {
        s
    }
}

/// Builds one index per threshold (plus the average-weight column) and
/// evaluates the query set against each.
pub fn sweep(
    dataset: &Dataset,
    base: &Config,
    queries: &[(String, String)],
    qrels: &Qrels,
    k: usize,
    mode: CandidateMode,
) -> Result<SweepReport> {
    let mut settings: Vec<(String, f64, WeightMode)> = SWEEP_THRESHOLDS
        .iter()
        .map(|&t| (column_label(t), t, WeightMode::Colocation))
        .collect();
    settings.push(("non".into(), 0.0, WeightMode::Average));

    let mut columns = Vec::new();
    let mut previous: Option<Vec<BTreeSet<Vec<String>>>> = None;
    let mut monotone = true;
    for (label, min_threshold, weight_mode) in settings {
        let config = Config {
            min_threshold,
            weight_mode,
            ..base.clone()
        };
        let store = build_index_from_dataset(dataset, &config)?;
        let opts = MiningOptions::from_config(&config);
        let mined: Vec<BTreeSet<Vec<String>>> = store
            .statements
            .par_iter()
            .map(|st| mine_compounds(&st.tokens, &opts).into_iter().map(|c| c.words).collect())
            .collect();
        if weight_mode == WeightMode::Colocation {
            if let Some(prev) = &previous {
                monotone &= mined.iter().zip(prev).all(|(now, before)| now.is_subset(before));
            }
            previous = Some(mined.clone());
        }
        let report = evaluate(&store, queries, qrels, k, mode)?;
        columns.push(SweepColumn {
            label,
            min_threshold,
            weight_mode,
            compounds: mined.iter().map(BTreeSet::len).sum(),
            report,
        });
    }
    Ok(SweepReport { columns, monotone })
}

impl fmt::Display for SweepReport {
    /// Rows P/R/F by column, then machine-readable `sweep` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut header = format!("{:<14}", "min_threshold");
        for c in &self.columns {
            let _ = write!(header, " {:>7}", c.label);
        }
        writeln!(f, "{header}")?;
        let row = |name: &str, get: fn(&Metrics) -> f64| {
            let mut s = format!("{name:<14}");
            for c in &self.columns {
                let _ = write!(s, " {:>7.3}", get(&c.report.average));
            }
            s
        };
        writeln!(f, "{}", row("precision", |m| m.precision))?;
        writeln!(f, "{}", row("recall", |m| m.recall))?;
        writeln!(f, "{}", row("f-measure", |m| m.f_measure))?;
        let mut s = format!("{:<14}", "compounds");
        for c in &self.columns {
            let _ = write!(s, " {:>7}", c.compounds);
        }
        writeln!(f, "{s}")?;
        for c in &self.columns {
            writeln!(
                f,
                "{}\tcompounds={}",
                machine_line("sweep", &c.label, c.report.k, &c.report.average),
                c.compounds
            )?;
        }
        write!(f, "sweep\tmonotone_filtering={}", self.monotone)
    }
}
