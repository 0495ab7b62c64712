//! Pair scoring of query/candidate texts, truncation to `topk_final`, and
//! the correspondence file.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Provision};
use crate::embedding::{char_trigrams, EmbeddingStore};
use crate::fsio::{round6, sha256_hex, write_atomic};
use crate::retrieval::{build_index, rank_order, retrieve, CandidateSet, RetrievalConfig, RetrievalError};

pub const CORRESPONDENCE_FORMAT: &str = "lexbridge-correspondences/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerKind {
    RemoteService,
    LexicalFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RerankConfig {
    pub topk_final: usize,
    pub scorer: ScorerKind,
    pub service_endpoint: Option<String>,
    pub score_floor: Option<f64>,
    pub max_in_flight: usize,
}

impl Default for RerankConfig {
    fn default() -> Self {
        RerankConfig {
            topk_final: 60,
            scorer: ScorerKind::LexicalFallback,
            service_endpoint: None,
            score_floor: None,
            max_in_flight: 4,
        }
    }
}

impl RerankConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.topk_final == 0 {
            return Err("topk_final must be at least 1".into());
        }
        if self.max_in_flight == 0 {
            return Err("max_in_flight must be at least 1".into());
        }
        if self.scorer == ScorerKind::RemoteService && self.service_endpoint.is_none() {
            return Err("scorer remote_service needs service_endpoint".into());
        }
        if let Some(f) = self.score_floor {
            if !(0.0..=1.0).contains(&f) {
                return Err(format!("score_floor {f} is outside [0, 1]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RerankError {
    #[error("scoring service at {endpoint} is unreachable: {message}")]
    ServiceUnreachable { endpoint: String, message: String },
    #[error("scoring service returned a bad response: {0}")]
    ServiceBadResponse(String),
    #[error("no text for provision {0}")]
    MissingText(String),
    #[error("no vector for query provision {0}")]
    MissingVector(String),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    BadRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// Scores (query, candidate) text pairs into [0, 1], one per pair in order.
pub trait PairScorer: Sync {
    fn tag(&self) -> String;
    fn score(&self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, RerankError>;
}

/// Jaccard similarity of the two texts' character-trigram sets.
pub fn lexical_score(a: &str, b: &str) -> f64 {
    jaccard(&trigram_set(a), &trigram_set(b))
}

fn trigram_set(text: &str) -> HashSet<String> {
    char_trigrams(text).into_iter().collect()
}

fn jaccard(sa: &HashSet<String>, sb: &HashSet<String>) -> f64 {
    if sa.is_empty() && sb.is_empty() {
        return 1.0;
    }
    let inter = sa.intersection(sb).count();
    let union = sa.len() + sb.len() - inter;
    inter as f64 / union as f64
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalScorer;

impl PairScorer for LexicalScorer {
    fn tag(&self) -> String {
        "lexical-trigram-jaccard".into()
    }

    fn score(&self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, RerankError> {
        let mut query: Option<(&str, HashSet<String>)> = None;
        Ok(pairs
            .iter()
            .map(|&(a, b)| {
                if query.as_ref().is_none_or(|(q, _)| *q != a) {
                    query = Some((a, trigram_set(a)));
                }
                let (_, qs) = query.as_ref().expect("just set");
                jaccard(qs, &trigram_set(b))
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScorePair {
    pub query_text: String,
    pub candidate_text: String,
}

/// Request body of the scoring wire protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub pairs: Vec<ScorePair>,
}

/// Response body of the scoring wire protocol; `scores[i]` belongs to
/// `pairs[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub scores: Vec<f64>,
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Bring a batch of raw scores into [0, 1]. If any score falls outside,
/// the whole batch goes through the logistic function so that the order
/// within the batch is kept.
pub fn squash_scores(raw: Vec<f64>) -> Vec<f64> {
    if raw.iter().all(|s| (0.0..=1.0).contains(s)) {
        raw
    } else {
        raw.into_iter().map(logistic).collect()
    }
}

/// Client for an external cross-encoder speaking the JSON scoring protocol.
pub struct RemoteScorer {
    endpoint: String,
    client: reqwest::blocking::Client,
}

impl RemoteScorer {
    pub fn new(endpoint: &str) -> Result<Self, RerankError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| RerankError::ServiceUnreachable {
                endpoint: endpoint.to_string(),
                message: e.to_string(),
            })?;
        Ok(RemoteScorer {
            endpoint: endpoint.to_string(),
            client,
        })
    }
}

impl PairScorer for RemoteScorer {
    fn tag(&self) -> String {
        format!("remote:{}", self.endpoint)
    }

    fn score(&self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, RerankError> {
        let body = ScoreRequest {
            pairs: pairs
                .iter()
                .map(|(q, c)| ScorePair {
                    query_text: q.to_string(),
                    candidate_text: c.to_string(),
                })
                .collect(),
        };
        let resp =
            self.client
                .post(&self.endpoint)
                .json(&body)
                .send()
                .map_err(|e| RerankError::ServiceUnreachable {
                    endpoint: self.endpoint.clone(),
                    message: e.to_string(),
                })?;
        let status = resp.status();
        if !status.is_success() {
            return Err(RerankError::ServiceBadResponse(format!("HTTP {status}")));
        }
        let parsed: ScoreResponse = resp
            .json()
            .map_err(|e| RerankError::ServiceBadResponse(e.to_string()))?;
        if parsed.scores.len() != pairs.len() {
            return Err(RerankError::ServiceBadResponse(format!(
                "{} scores for {} pairs",
                parsed.scores.len(),
                pairs.len()
            )));
        }
        if parsed.scores.iter().any(|s| !s.is_finite()) {
            return Err(RerankError::ServiceBadResponse("non-finite score".into()));
        }
        Ok(squash_scores(parsed.scores))
    }
}

/// One score per candidate, in candidate order.
pub fn score_pairs(
    query: &Provision,
    candidates: &CandidateSet,
    corpus: &Corpus,
    scorer: &dyn PairScorer,
) -> Result<Vec<(String, f64)>, RerankError> {
    let texts = candidates
        .candidates
        .iter()
        .map(|c| {
            corpus
                .get(&c.provision_id)
                .map(|p| p.text.as_str())
                .ok_or_else(|| RerankError::MissingText(c.provision_id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if texts.is_empty() {
        return Ok(Vec::new());
    }
    let pairs: Vec<(&str, &str)> = texts.iter().map(|t| (query.text.as_str(), *t)).collect();
    let scores = scorer.score(&pairs)?;
    if scores.len() != pairs.len() {
        return Err(RerankError::ServiceBadResponse(format!(
            "{} scores for {} pairs",
            scores.len(),
            pairs.len()
        )));
    }
    Ok(candidates
        .candidates
        .iter()
        .zip(scores)
        .map(|(c, s)| (c.provision_id.clone(), s))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub provision_id: String,
    pub country: String,
    pub rerank_score: f64,
    pub sim_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceRecord {
    pub query_id: String,
    pub query_text_digest: String,
    pub links: Vec<Link>,
    pub scorer_tag: String,
}

/// Sort scored candidates, apply the optional floor and truncate.
pub fn finalize(
    query: &Provision,
    candidates: &CandidateSet,
    scored: Vec<(String, f64)>,
    cfg: &RerankConfig,
    scorer_tag: &str,
) -> CorrespondenceRecord {
    let by_id: HashMap<&str, (&str, f64)> = candidates
        .candidates
        .iter()
        .map(|c| (c.provision_id.as_str(), (c.country.as_str(), c.sim_score)))
        .collect();
    let mut links: Vec<Link> = scored
        .into_iter()
        .filter_map(|(id, score)| {
            let &(country, sim) = by_id.get(id.as_str())?;
            Some(Link {
                provision_id: id,
                country: country.to_string(),
                rerank_score: score,
                sim_score: sim,
            })
        })
        .filter(|l| cfg.score_floor.is_none_or(|f| l.rerank_score >= f))
        .collect();
    links.sort_by(|a, b| {
        rank_order(
            a.rerank_score,
            (&a.country, &a.provision_id),
            b.rerank_score,
            (&b.country, &b.provision_id),
        )
    });
    links.truncate(cfg.topk_final);
    CorrespondenceRecord {
        query_id: query.provision_id.clone(),
        query_text_digest: sha256_hex(query.text.as_bytes()),
        links,
        scorer_tag: scorer_tag.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceHeader {
    pub format: String,
    pub scorer_tag: String,
    pub query_country: String,
    pub topk_final: usize,
    pub count: usize,
}

/// Everything `run_linking` produced, in query order.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkingOutput {
    pub header: CorrespondenceHeader,
    pub candidates: Vec<CandidateSet>,
    pub records: Vec<CorrespondenceRecord>,
}

fn rounded(record: &CorrespondenceRecord) -> CorrespondenceRecord {
    let mut r = record.clone();
    for l in &mut r.links {
        l.rerank_score = round6(l.rerank_score);
        l.sim_score = round6(l.sim_score);
    }
    r
}

pub fn correspondence_file(header: &CorrespondenceHeader, records: &[CorrespondenceRecord]) -> Vec<u8> {
    let mut buf = serde_json::to_vec(header).expect("header serializes");
    buf.push(b'\n');
    for r in records {
        serde_json::to_writer(&mut buf, &rounded(r)).expect("record serializes");
        buf.push(b'\n');
    }
    buf
}

/// Retrieve, score and finalize every query-country provision, then write
/// the correspondence file to `out` in one atomic step. Nothing is written
/// on error.
pub fn run_linking(
    corpus: &Corpus,
    store: &EmbeddingStore,
    retrieval: &RetrievalConfig,
    rerank: &RerankConfig,
    scorer: &dyn PairScorer,
    out: &Path,
) -> Result<LinkingOutput, RerankError> {
    let mut queries: Vec<&Provision> = corpus
        .provisions()
        .iter()
        .filter(|p| p.country == retrieval.query_country)
        .collect();
    queries.sort_by(|a, b| (&a.law_id, a.ordinal).cmp(&(&b.law_id, b.ordinal)));

    let mut candidate_sets = Vec::new();
    if !queries.is_empty() {
        let index = build_index(store, corpus)?;
        candidate_sets = queries
            .par_iter()
            .map(|q| {
                let v = store
                    .get(&q.provision_id)
                    .ok_or_else(|| RerankError::MissingVector(q.provision_id.clone()))?;
                Ok(retrieve(&index, q, v, retrieval)?)
            })
            .collect::<Result<Vec<_>, RerankError>>()?;
    }

    let tag = scorer.tag();
    let slots: Vec<Mutex<Option<Result<CorrespondenceRecord, RerankError>>>> =
        (0..queries.len()).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = rerank.max_in_flight.min(queries.len()).max(1);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= queries.len() {
                    break;
                }
                let result = score_pairs(queries[i], &candidate_sets[i], corpus, scorer)
                    .map(|scored| finalize(queries[i], &candidate_sets[i], scored, rerank, &tag));
                *slots[i].lock().expect("slot lock") = Some(result);
            });
        }
    });
    let records = slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every query scored"))
        .collect::<Result<Vec<_>, _>>()?;

    let header = CorrespondenceHeader {
        format: CORRESPONDENCE_FORMAT.into(),
        scorer_tag: tag,
        query_country: retrieval.query_country.clone(),
        topk_final: rerank.topk_final,
        count: records.len(),
    };
    write_atomic(out, &correspondence_file(&header, &records)).map_err(|source| RerankError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    Ok(LinkingOutput {
        header,
        candidates: candidate_sets,
        records,
    })
}

pub fn read_correspondences(path: &Path) -> Result<(CorrespondenceHeader, Vec<CorrespondenceRecord>), RerankError> {
    let io_err = |source| RerankError::Io {
        path: path.to_path_buf(),
        source,
    };
    let bad = |line: usize, message: String| RerankError::BadRecord {
        path: path.to_path_buf(),
        line,
        message,
    };
    let file = fs::File::open(path).map_err(io_err)?;
    let mut header: Option<CorrespondenceHeader> = None;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        if header.is_none() {
            let h: CorrespondenceHeader = serde_json::from_str(&line).map_err(|e| bad(i + 1, e.to_string()))?;
            if h.format != CORRESPONDENCE_FORMAT {
                return Err(bad(i + 1, format!("unknown format {}", h.format)));
            }
            header = Some(h);
        } else {
            records.push(serde_json::from_str(&line).map_err(|e| bad(i + 1, e.to_string()))?);
        }
    }
    let header = header.ok_or_else(|| bad(1, "missing header".into()))?;
    if header.count != records.len() {
        return Err(bad(
            0,
            format!("header count {} but {} records", header.count, records.len()),
        ));
    }
    Ok((header, records))
}
