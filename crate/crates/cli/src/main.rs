//! `qikse`: build an index over a multi-model dataset and search it.

use std::io::{self, BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use qikse::eval::{evaluate, read_qrels, read_queries, sweep};
use qikse::index::{build_index, IndexStore};
use qikse::ingest::Dataset;
use qikse::query::answer_query;
use qikse::synthetic::{generate, SyntheticSpec};
use qikse::{CandidateMode, Config, Error};

/// Keyword search over relational, JSON and graph data.
#[derive(Parser)]
#[command(name = "qikse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a dataset directory.
    Build {
        #[arg(long)]
        data: PathBuf,
        /// TOML config; defaults to $QIKSE_CONFIG, then built-in defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one keyword query.
    Query {
        #[arg(long)]
        index: PathBuf,
        /// Number of results; defaults to the index config.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<CandidateMode>,
        #[arg(required = true)]
        keywords: Vec<String>,
    },
    /// Read queries from standard input, one per line.
    Repl {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<CandidateMode>,
    },
    /// Precision, recall and F-measure at k for a query set.
    Eval {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        qrels: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<CandidateMode>,
    },
    /// Evaluate across compound thresholds 0, 0.2, ..., 1.0 and average weights.
    Sweep {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        qrels: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<CandidateMode>,
    },
    /// Write the seeded synthetic corpus with its queries and qrels.
    GenSynthetic {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn parse_mode(s: &str) -> Result<CandidateMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Argument(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> qikse::Result<()> {
    let mut out = io::stdout().lock();
    match command {
        Command::Build { data, config, out: dir } => {
            let config = Config::resolve(config.as_deref())?;
            let started = Instant::now();
            let store = build_index(&data, &config)?;
            store.save(&dir)?;
            let report = store.dimension_report();
            w(&mut out, format_args!("indexed {} statements into {}\n", store.statements.len(), dir.display()))?;
            w(&mut out, format_args!("{report}\n"))?;
            w(
                &mut out,
                format_args!(
                    "h bound: max_h={} (<= 200: {}), every h <= m: {}\n",
                    report.max_h,
                    report.max_h <= 200,
                    report.h_within_m
                ),
            )?;
            log::info!("build took {:?}", started.elapsed());
        }
        Command::Query { index, k, mode, keywords } => {
            let store = IndexStore::load(&index)?;
            print_results(&mut out, &store, &keywords.join(" "), k, mode)?;
        }
        Command::Repl { index, k, mode } => {
            let store = IndexStore::load(&index)?;
            let interactive = io::stdin().is_terminal();
            let stdin = io::stdin();
            let mut lines = stdin.lock().lines();
            loop {
                if interactive {
                    w(&mut out, format_args!("> "))?;
                    out.flush().map_err(|e| Error::io("<stdout>", e))?;
                }
                let Some(line) = lines.next() else { break };
                let line = line.map_err(|e| Error::io("<stdin>", e))?;
                let line = line.trim();
                if line == ":q" || line == ":quit" {
                    break;
                }
                if line.is_empty() {
                    continue;
                }
                // A bad query should not end the session.
                if let Err(e) = print_results(&mut out, &store, line, k, mode) {
                    eprintln!("error: {e}");
                }
            }
        }
        Command::Eval { index, queries, qrels, k, mode } => {
            let store = IndexStore::load(&index)?;
            let queries = read_queries(&queries)?;
            let qrels = read_qrels(&qrels)?;
            let k = k.unwrap_or(store.config.k);
            let mode = mode.unwrap_or(store.config.candidate_mode);
            let report = evaluate(&store, &queries, &qrels, k, mode)?;
            w(&mut out, format_args!("{report}\n"))?;
        }
        Command::Sweep { data, config, queries, qrels, k, mode } => {
            let config = Config::resolve(config.as_deref())?;
            let dataset = Dataset::load(&data)?;
            let queries = read_queries(&queries)?;
            let qrels = read_qrels(&qrels)?;
            let k = k.unwrap_or(config.k);
            let mode = mode.unwrap_or(config.candidate_mode);
            let report = sweep(&dataset, &config, &queries, &qrels, k, mode)?;
            w(&mut out, format_args!("{report}\n"))?;
        }
        Command::GenSynthetic { out: dir, seed } => {
            let corpus = generate(&dir, &SyntheticSpec { seed, ..Default::default() })?;
            w(
                &mut out,
                format_args!(
                    "wrote {} statements and {} queries to {}\n",
                    corpus.statements,
                    corpus.queries.len(),
                    dir.display()
                ),
            )?;
        }
    }
    Ok(())
}

fn print_results(
    out: &mut impl Write,
    store: &IndexStore,
    keywords: &str,
    k: Option<usize>,
    mode: Option<CandidateMode>,
) -> qikse::Result<()> {
    let k = k.unwrap_or(store.config.k);
    let mode = mode.unwrap_or(store.config.candidate_mode);
    let results = answer_query(store, keywords, k, mode)?;
    if results.is_empty() {
        w(out, format_args!("no results\n"))?;
    }
    for (rank, r) in results.iter().enumerate() {
        w(out, format_args!("{}\t{:.6}\t{}\n", rank + 1, r.score, r.raw_text))?;
    }
    Ok(())
}

fn w(out: &mut impl Write, args: std::fmt::Arguments<'_>) -> qikse::Result<()> {
    out.write_fmt(args).map_err(|e| Error::io(Path::new("<stdout>"), e))
}
