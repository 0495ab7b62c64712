//! Exact nearest-neighbour candidate generation with per-country limits.
//!
//! The pipeline per query is: top `topk_cand` foreign neighbours by inner
//! product, then at most `pre_per_country` per target country, then at most
//! `quota_per_country[c]`, always dropping the lowest-scored first.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Provision};
use crate::embedding::{dot, EmbeddingStore};
use crate::fsio::{round6, write_atomic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetrievalConfig {
    pub topk_cand: usize,
    pub pre_per_country: usize,
    pub quota_per_country: BTreeMap<String, usize>,
    pub target_countries: Vec<String>,
    pub query_country: String,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            topk_cand: 120,
            pre_per_country: 80,
            quota_per_country: [("KR".to_string(), 30), ("FR".to_string(), 30)].into(),
            target_countries: vec!["KR".into(), "FR".into()],
            query_country: "JP".into(),
        }
    }
}

impl RetrievalConfig {
    pub fn validate(&self) -> Result<(), String> {
        let max_quota = self.quota_per_country.values().copied().max().unwrap_or(0);
        if self.quota_per_country.values().any(|&q| q == 0) || max_quota == 0 {
            return Err("every quota_per_country value must be at least 1".into());
        }
        if !(self.topk_cand >= self.pre_per_country && self.pre_per_country >= max_quota) {
            return Err(format!(
                "need topk_cand ({}) >= pre_per_country ({}) >= max quota ({max_quota})",
                self.topk_cand, self.pre_per_country
            ));
        }
        if self.target_countries.is_empty() {
            return Err("target_countries is empty".into());
        }
        if self.target_countries.contains(&self.query_country) {
            return Err(format!("query country {} is also a target country", self.query_country));
        }
        for c in &self.target_countries {
            if !self.quota_per_country.contains_key(c) {
                return Err(format!("target country {c} has no quota"));
            }
        }
        Ok(())
    }

    pub fn quota(&self, country: &str) -> usize {
        self.quota_per_country.get(country).copied().unwrap_or(0)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RetrievalError {
    #[error("cannot build an index over zero records")]
    EmptyIndex,
    #[error("{0} is not in the corpus")]
    UnknownProvision(String),
    #[error("query has dimension {found}, index has {expected}")]
    DimMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub provision_id: String,
    pub country: String,
    pub sim_score: f64,
}

/// Descending score, then ascending (country, provision_id).
pub fn rank_order(a_score: f64, a: (&str, &str), b_score: f64, b: (&str, &str)) -> Ordering {
    b_score.total_cmp(&a_score).then_with(|| a.cmp(&b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub query_id: String,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone)]
struct Entry {
    provision_id: String,
    country: String,
    vector: Vec<f64>,
}

/// Flat exact index: every query is scored against every record.
#[derive(Debug, Clone)]
pub struct Index {
    dim: usize,
    entries: Vec<Entry>,
}

pub fn build_index(store: &EmbeddingStore, corpus: &Corpus) -> Result<Index, RetrievalError> {
    if store.is_empty() {
        return Err(RetrievalError::EmptyIndex);
    }
    let entries = store
        .records()
        .iter()
        .map(|r| {
            let p = corpus
                .get(&r.provision_id)
                .ok_or_else(|| RetrievalError::UnknownProvision(r.provision_id.clone()))?;
            Ok(Entry {
                provision_id: r.provision_id.clone(),
                country: p.country.clone(),
                vector: r.vector.clone(),
            })
        })
        .collect::<Result<Vec<_>, RetrievalError>>()?;
    Ok(Index {
        dim: store.dim(),
        entries,
    })
}

impl Index {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Top `k` records by inner product, skipping `exclude_country`.
    pub fn search(
        &self,
        query: &[f64],
        k: usize,
        exclude_country: Option<&str>,
    ) -> Result<Vec<Candidate>, RetrievalError> {
        if query.len() != self.dim {
            return Err(RetrievalError::DimMismatch {
                expected: self.dim,
                found: query.len(),
            });
        }
        let mut scored: Vec<(f64, usize)> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| Some(e.country.as_str()) != exclude_country)
            .map(|(i, e)| (dot(query, &e.vector), i))
            .collect();
        let order = |a: &(f64, usize), b: &(f64, usize)| {
            let (ea, eb) = (&self.entries[a.1], &self.entries[b.1]);
            rank_order(
                a.0,
                (&ea.country, &ea.provision_id),
                b.0,
                (&eb.country, &eb.provision_id),
            )
        };
        if k < scored.len() {
            scored.select_nth_unstable_by(k, order);
            scored.truncate(k);
        }
        scored.sort_by(order);
        let scored = scored
            .into_iter()
            .map(|(sim_score, i)| Candidate {
                provision_id: self.entries[i].provision_id.clone(),
                country: self.entries[i].country.clone(),
                sim_score,
            })
            .collect();
        Ok(scored)
    }
}

/// The `topk_cand` nearest provisions of other countries, restricted to
/// target countries and capped at `pre_per_country` each, in rank order.
pub fn prefilter(
    index: &Index,
    query: &Provision,
    vector: &[f64],
    cfg: &RetrievalConfig,
) -> Result<Vec<Candidate>, RetrievalError> {
    let pool = index.search(vector, cfg.topk_cand, Some(&query.country))?;
    let mut per_country: HashMap<String, usize> = HashMap::new();
    let mut pre = Vec::new();
    for c in pool {
        if !cfg.target_countries.contains(&c.country) {
            continue;
        }
        let n = per_country.entry(c.country.clone()).or_insert(0);
        if *n < cfg.pre_per_country {
            *n += 1;
            pre.push(c);
        }
    }
    Ok(pre)
}

/// Candidates for one query provision: the pre-filtered list cut to each
/// country's quota.
pub fn retrieve(
    index: &Index,
    query: &Provision,
    vector: &[f64],
    cfg: &RetrievalConfig,
) -> Result<CandidateSet, RetrievalError> {
    let pre = prefilter(index, query, vector, cfg)?;
    let mut per_country: HashMap<String, usize> = HashMap::new();
    let mut candidates = Vec::new();
    for c in pre {
        let n = per_country.entry(c.country.clone()).or_insert(0);
        if *n < cfg.quota(&c.country) {
            *n += 1;
            candidates.push(c);
        }
    }
    Ok(CandidateSet {
        query_id: query.provision_id.clone(),
        candidates,
    })
}

#[derive(Serialize)]
struct DumpCandidate<'a> {
    provision_id: &'a str,
    country: &'a str,
    sim_score: f64,
}

#[derive(Serialize)]
struct DumpLine<'a> {
    query_id: &'a str,
    candidates: Vec<DumpCandidate<'a>>,
}

/// Debug dump: one line per query, scores at six decimals.
pub fn candidate_dump(sets: &[CandidateSet]) -> Vec<u8> {
    let mut buf = Vec::new();
    for s in sets {
        let line = DumpLine {
            query_id: &s.query_id,
            candidates: s
                .candidates
                .iter()
                .map(|c| DumpCandidate {
                    provision_id: &c.provision_id,
                    country: &c.country,
                    sim_score: round6(c.sim_score),
                })
                .collect(),
        };
        serde_json::to_writer(&mut buf, &line).expect("dump serializes");
        buf.push(b'\n');
    }
    buf
}

pub fn write_candidate_dump(sets: &[CandidateSet], path: &Path) -> std::io::Result<()> {
    write_atomic(path, &candidate_dump(sets))
}
