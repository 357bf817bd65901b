use std::path::PathBuf;

use qikse::index::build_index;
use qikse::query::{answer_query, candidate_set, parse_query};
use qikse::{CandidateMode, Config};

pub const WORKED_QUERY: &str = "Rubeus Hagrid friends Blizzard perfect";
pub const HARRY: &str = "social network person id p1 name harry potter friend person id p4 name rubeus hagrid order id o1 custom id p1 total price 135 item product id pro1 brand blizzard feedback rate perfect comment this computer game help study computer architecture this computer game is funny and this focuses on learning";

pub fn demo_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/demo")
}

#[test]
fn worked_example_ranks_harry_first() {
    worked_example_ranks_harry_first_check();
}

pub fn worked_example_ranks_harry_first_check() {
    let store = build_index(&demo_dir(), &Config::default()).unwrap();
    let results = answer_query(&store, WORKED_QUERY, 20, CandidateMode::Paper).unwrap();
    assert!(!results.is_empty());
    assert_eq!(results[0].raw_text, HARRY);
    eprintln!("score {} (reference -2.665)", results[0].score);
}

#[test]
fn worked_query_is_all_non_schema() {
    worked_query_is_all_non_schema_check();
}

pub fn worked_query_is_all_non_schema_check() {
    let store = build_index(&demo_dir(), &Config::default()).unwrap();
    let q = parse_query(&store, WORKED_QUERY).unwrap();
    assert!(q.schema.is_empty());
    let expected: Vec<&str> = vec!["blizzard", "friend", "hagrid", "perfect", "rubeu"];
    assert_eq!(q.non_schema.iter().map(String::as_str).collect::<Vec<_>>(), expected);
}

#[test]
fn rate_is_a_schema_keyword() {
    rate_is_a_schema_keyword_check();
}

pub fn rate_is_a_schema_keyword_check() {
    let store = build_index(&demo_dir(), &Config::default()).unwrap();
    let q = parse_query(&store, "rate").unwrap();
    assert!(q.schema.contains("rate"));
    let feedback_bearing: Vec<_> = store
        .statements
        .iter()
        .filter(|s| s.provenance.iter().any(|p| p.source_name == "feedback"))
        .map(|s| s.statement_id)
        .collect();
    assert_eq!(candidate_set(&store, &q, CandidateMode::Union), feedback_bearing);
}

#[test]
fn blizzard_postings() {
    blizzard_postings_check();
}

pub fn blizzard_postings_check() {
    let store = build_index(&demo_dir(), &Config::default()).unwrap();
    let harry = store.statements.iter().find(|s| s.raw_text == HARRY).unwrap().statement_id;
    assert!(store.postings_lookup("blizzard").contains(&harry));
    assert!(store.postings_lookup("nonexistentword").is_empty());
}
