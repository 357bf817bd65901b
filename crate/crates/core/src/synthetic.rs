//! Seeded synthetic corpus with planted answers.
//!
//! People live in a property graph, their purchases in a JSON collection
//! joined by customer id, and standalone reviews in a relational table. Each
//! planted query names a person by an invented first and last name and an
//! invented brand they bought. Two decoy reviews per query each mention the
//! brand and one of the names, so only the planted person statement holds
//! all three keywords.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::ids::StatementId;
use crate::ingest::Dataset;
use crate::statements::{build_statements, normalizer_for};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub people: usize,
    pub reviews: usize,
    pub planted: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            seed: 7,
            people: 80,
            reviews: 120,
            planted: 10,
        }
    }
}

/// What the generator wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub statements: usize,
    /// `(query id, keywords, answer statement id)`.
    pub queries: Vec<(String, String, StatementId)>,
}

const FIRST: &[&str] = &[
    "anna", "boris", "carla", "dmitri", "elena", "felix", "greta", "hugo", "irene", "jonas", "karin", "lukas", "marta",
    "nils", "olga", "pavel", "rosa", "stefan", "tanja", "viktor",
];
const LAST: &[&str] = &[
    "berg", "costa", "dahl", "engel", "fischer", "garcia", "hansen", "ivanov", "jensen", "keller", "lindqvist",
    "moreau", "novak", "olsen", "petrov", "quist", "romero", "schmidt", "torres", "weber",
];
const CITIES: &[&str] = &[
    "helsinki", "lisbon", "oslo", "porto", "riga", "tallinn", "vienna", "zagreb", "krakow", "bergen",
];
const BRANDS: &[&str] = &[
    "acme", "globex", "initech", "umbrella", "hooli", "vandelay", "wonka", "stark", "wayne", "tyrell",
];
const RATES: &[&str] = &["perfect", "good", "average", "poor", "bad"];
const FILLER: &[&str] = &[
    "delivery", "package", "arrived", "quickly", "quality", "price", "value", "colour", "screen", "battery", "sound",
    "manual", "sturdy", "light", "heavy", "design", "material", "warranty", "support", "cable", "charger", "button",
    "weekend", "gift", "kitchen", "garden", "office", "travel", "winter", "summer", "noise", "comfort", "handle",
    "surface", "window", "bottle", "pocket", "strap", "lens", "keyboard", "printer", "speaker", "monitor", "camera",
    "jacket", "blanket", "lamp", "chair", "table", "shelf",
];
const SYLLABLES: &[&str] = &["zor", "vex", "qua", "mib", "trel", "yon", "fex", "glim", "drax", "kul"];

fn invented(rng: &mut ChaCha8Rng, used: &mut BTreeSet<String>) -> String {
    loop {
        let word: String = (0..3).map(|_| *SYLLABLES.choose(rng).expect("non-empty")).collect();
        if used.insert(word.clone()) {
            return word;
        }
    }
}

fn filler(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    (0..n).map(|_| FILLER.choose(rng).expect("non-empty").to_string()).collect()
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes the dataset plus `queries.tsv` and `qrels.tsv` into `out`.
pub fn generate(out: &Path, spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    if spec.planted > spec.people || spec.planted * 2 > spec.reviews {
        return Err(Error::Argument("too many planted queries for the corpus size".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut used = BTreeSet::new();

    struct Planted {
        first: String,
        last: String,
        brand: String,
    }
    let planted: Vec<Planted> = (0..spec.planted)
        .map(|_| Planted {
            first: invented(&mut rng, &mut used),
            last: invented(&mut rng, &mut used),
            brand: invented(&mut rng, &mut used),
        })
        .collect();

    // People: the first `planted` carry invented names.
    let mut nodes = String::from("id,label,name,city\n");
    for i in 0..spec.people {
        let name = match planted.get(i) {
            Some(p) => format!("{} {}", p.first, p.last),
            None => format!("{} {}", FIRST.choose(&mut rng).expect("names"), LAST.choose(&mut rng).expect("names")),
        };
        let city = CITIES.choose(&mut rng).expect("cities");
        let _ = writeln!(nodes, "u{i},person,{name},{city}");
    }
    let mut edges = String::from("src,dst,label\n");
    let mut seen = BTreeSet::new();
    for i in 0..spec.people {
        let n = rng.gen_range(1..=2);
        for _ in 0..n {
            let j = rng.gen_range(0..spec.people);
            let pair = (i.min(j), i.max(j));
            if i != j && seen.insert(pair) {
                let label = if rng.gen_bool(0.7) { "friend" } else { "colleague" };
                let _ = writeln!(edges, "u{i},u{j},{label}");
            }
        }
    }

    // Purchases: one or two per person; planted people buy their brand.
    let mut purchases = Vec::new();
    let mut order = 0;
    for i in 0..spec.people {
        for _ in 0..rng.gen_range(1..=2) {
            let brand = match planted.get(i) {
                Some(p) => p.brand.clone(),
                None => BRANDS.choose(&mut rng).expect("brands").to_string(),
            };
            purchases.push(serde_json::json!({
                "id": format!("o{order}"),
                "custom_id": format!("u{i}"),
                "total_price": rng.gen_range(5..500),
                "item": [{"product_id": format!("pr{}", rng.gen_range(0..40)), "brand": brand}],
            }));
            order += 1;
        }
    }

    // Reviews: two decoys per planted query, the rest ordinary.
    let mut reviews = String::from("id,product_id,rate,comment\n");
    for r in 0..spec.reviews {
        let mut words = filler(&mut rng, 24);
        if let Some(p) = planted.get(r / 2).filter(|_| r < spec.planted * 2) {
            // Each decoy carries the brand and one of the two names, spread
            // out so they never share a short window.
            let name = if r % 2 == 0 { &p.first } else { &p.last };
            words.insert(3, name.clone());
            words.push(p.brand.clone());
        }
        let rate = RATES.choose(&mut rng).expect("rates");
        let _ = writeln!(
            reviews,
            "r{r},pr{},{rate},{}",
            rng.gen_range(0..40),
            csv_field(&words.join(" "))
        );
    }

    write(&out.join("graphs/people/nodes.csv"), &nodes)?;
    write(&out.join("graphs/people/edges.csv"), &edges)?;
    write(
        &out.join("collections/purchase.json"),
        &(serde_json::to_string_pretty(&purchases).expect("json") + "\n"),
    )?;
    write(&out.join("tables/review.csv"), &reviews)?;
    write(
        &out.join("joins.config"),
        "roots=people,review\nleft=people.id right=purchase.custom_id\n",
    )?;

    // Resolve answers to statement ids the same way the index will.
    let config = Config::default();
    let dataset = Dataset::load(out)?;
    let statements = build_statements(&dataset, &config, &normalizer_for(&config)?)?;
    let mut queries = Vec::new();
    let mut qtext = String::new();
    let mut qrels = String::new();
    for (i, p) in planted.iter().enumerate() {
        let root = format!("u{i}");
        let answer = statements
            .iter()
            .find(|s| s.provenance.first().is_some_and(|r| r.source_name == "people" && r.record_id == root))
            .ok_or_else(|| Error::Invariant(format!("no statement for planted person {root}")))?
            .statement_id;
        let qid = format!("q{:02}", i + 1);
        let keywords = format!("{} {} {}", p.first, p.last, p.brand);
        let _ = writeln!(qtext, "{qid}\t{keywords}");
        let _ = writeln!(qrels, "{qid}\t{answer}");
        queries.push((qid, keywords, answer));
    }
    write(&out.join("queries.tsv"), &qtext)?;
    write(&out.join("qrels.tsv"), &qrels)?;
    Ok(SyntheticCorpus {
        statements: statements.len(),
        queries,
    })
}
