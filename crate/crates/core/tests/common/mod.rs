#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::path::PathBuf;

use lexbridge_core::corpus::{Corpus, Level, Provision};
use lexbridge_core::embedding::EmbeddingStore;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compare against a golden file; `LEXBRIDGE_BLESS=1` rewrites it instead.
pub fn assert_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("LEXBRIDGE_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(expected == actual, "{name} differs from its golden file");
}

pub fn jls_fixture_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixtures().join("jp"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "xml"))
        .collect();
    files.sort();
    files
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const WORDS: [&str; 40] = [
    "contract",
    "seller",
    "buyer",
    "lease",
    "property",
    "delivery",
    "payment",
    "notice",
    "damages",
    "obligation",
    "creditor",
    "debtor",
    "guarantee",
    "deposit",
    "agent",
    "principal",
    "heir",
    "estate",
    "court",
    "period",
    "shall",
    "may",
    "not",
    "the",
    "of",
    "by",
    "within",
    "after",
    "unless",
    "party",
    "claim",
    "right",
    "title",
    "goods",
    "price",
    "defect",
    "repair",
    "termination",
    "consent",
    "registration",
];

pub fn random_text(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(6..16);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Light edits of `text`; lexical similarity stays high.
pub fn near_variant(text: &str, rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..4) {
        0 => text.to_string(),
        1 => format!("{text}."),
        2 => format!("the {text}"),
        _ => text.replacen(' ', "  ", 1),
    }
}

pub fn provision(country: &str, law: &str, ordinal: usize, text: String) -> Provision {
    let eid = format!("art_{}", ordinal + 1);
    Provision {
        provision_id: Provision::make_id(country, law, &eid),
        country: country.to_string(),
        law_id: law.to_string(),
        eid,
        level: Level::Article,
        language: "en".into(),
        text,
        ordinal,
    }
}

/// `counts` provisions per country. A `near_share` of non-JP provisions are
/// near-copies of random JP texts, the rest are random.
pub fn synthetic_corpus(seed: u64, counts: &[(&str, usize)], near_share: f64) -> Corpus {
    let mut rng = rng(seed);
    let jp_count = counts.iter().find(|(c, _)| *c == "JP").map_or(0, |(_, n)| *n);
    let jp_texts: Vec<String> = (0..jp_count).map(|_| random_text(&mut rng)).collect();
    let mut provisions = Vec::new();
    for &(country, n) in counts {
        let law = format!("2000-01-01/{}", country.to_lowercase());
        for i in 0..n {
            let text = if country == "JP" {
                jp_texts[i].clone()
            } else if !jp_texts.is_empty() && rng.gen_bool(near_share) {
                near_variant(jp_texts.choose(&mut rng).unwrap(), &mut rng)
            } else {
                random_text(&mut rng)
            };
            provisions.push(provision(country, &law, i, text));
        }
    }
    Corpus::new("synthetic", provisions, vec![]).unwrap()
}

/// Descending score, then ascending (country, id), written out directly.
pub fn oracle_order(a: &(f64, String, String), b: &(f64, String, String)) -> Ordering {
    match b.0.partial_cmp(&a.0).unwrap() {
        Ordering::Equal => (&a.1, &a.2).cmp(&(&b.1, &b.2)),
        o => o,
    }
}

/// Top-k ids by a plain dot-product loop over every stored vector.
// Index loops kept deliberately naive.
#[allow(clippy::needless_range_loop)]
pub fn brute_force_topk(
    store: &EmbeddingStore,
    corpus: &Corpus,
    query: &[f64],
    k: usize,
    exclude_country: Option<&str>,
) -> Vec<String> {
    let mut all: Vec<(f64, String, String)> = Vec::new();
    for r in store.records() {
        let country = corpus.get(&r.provision_id).unwrap().country.clone();
        if Some(country.as_str()) == exclude_country {
            continue;
        }
        let mut s = 0.0;
        for i in 0..query.len() {
            s += query[i] * r.vector[i];
        }
        all.push((s, country, r.provision_id.clone()));
    }
    all.sort_by(oracle_order);
    all.into_iter().take(k).map(|(_, _, id)| id).collect()
}

/// Jaccard of lowercased character-trigram sets, computed without the
/// library's trigram helper.
pub fn oracle_jaccard(a: &str, b: &str) -> f64 {
    fn grams(s: &str) -> BTreeSet<String> {
        let cs: Vec<char> = s.to_lowercase().chars().collect();
        let mut out = BTreeSet::new();
        if cs.is_empty() {
            return out;
        }
        if cs.len() < 3 {
            out.insert(cs.iter().collect());
            return out;
        }
        for i in 0..cs.len() - 2 {
            out.insert(cs[i..i + 3].iter().collect());
        }
        out
    }
    let (ga, gb) = (grams(a), grams(b));
    if ga.is_empty() && gb.is_empty() {
        return 1.0;
    }
    let inter = ga.intersection(&gb).count() as f64;
    let union = ga.union(&gb).count() as f64;
    inter / union
}

/// Occurrences of opening tag `name` in raw XML text.
pub fn count_open_tags(xml: &str, name: &str) -> usize {
    let needle = format!("<{name}");
    xml.match_indices(&needle)
        .filter(|(i, _)| {
            let next = xml[i + needle.len()..].chars().next();
            matches!(next, Some(' ' | '>' | '/' | '\n' | '\t'))
        })
        .count()
}

/// The raw text between `<MainProvision>` and `</MainProvision>`.
pub fn main_provision(xml: &str) -> &str {
    let start = xml.find("<MainProvision").expect("MainProvision start");
    let end = xml.find("</MainProvision>").expect("MainProvision end");
    &xml[start..end]
}
