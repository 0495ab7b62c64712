//! Provision vectors: the built-in trigram embedder, vector-file ingestion
//! and similarity.

use std::collections::HashMap;
use std::fs;
use std::hash::Hasher;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};

use fnv::FnvHasher;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::fsio::write_atomic;

/// Norm deviation below which vectors are silently renormalized.
pub const NORM_TOLERANCE: f64 = 1e-3;
/// Norm deviations at or below this are float noise.
const UNIT_EPSILON: f64 = 1e-12;
pub const MIN_TRIGRAM_DIM: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum EmbeddingError {
    #[error("cannot embed empty text")]
    EmptyText,
    #[error("dimension {0} is below the minimum of {MIN_TRIGRAM_DIM}")]
    InvalidDim(usize),
    #[error("{context}: expected dimension {expected}, found {found}")]
    DimMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("{id}: norm {norm} deviates from 1 by at least {NORM_TOLERANCE}")]
    BadNorm { id: String, norm: f64 },
    #[error("{0} is not in the bound corpus")]
    UnknownProvision(String),
    #[error("header declares {declared} records, file holds {found}")]
    HeaderCountMismatch { declared: usize, found: usize },
    #[error("duplicate vector for {0}")]
    DuplicateId(String),
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

/// Lowercased character trigrams in text order. Texts shorter than three
/// characters yield the whole text as their single gram.
pub fn char_trigrams(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.to_lowercase().chars().collect();
    if chars.is_empty() {
        return Vec::new();
    }
    if chars.len() < 3 {
        return vec![chars.into_iter().collect()];
    }
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

fn stable_hash(gram: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(gram.as_bytes());
    h.finish()
}

/// Feature-hashed character trigram embedding, L2-normalized.
///
/// Each trigram's 64-bit FNV-1a hash picks the bucket (`hash % dim`) and the
/// sign (odd bit parity of the hash counts negative).
pub fn trigram_embed(text: &str, dim: usize) -> Result<Vec<f64>, EmbeddingError> {
    if dim < MIN_TRIGRAM_DIM {
        return Err(EmbeddingError::InvalidDim(dim));
    }
    let grams = char_trigrams(text);
    if grams.is_empty() {
        return Err(EmbeddingError::EmptyText);
    }
    let mut v = vec![0.0f64; dim];
    for g in &grams {
        let h = stable_hash(g);
        let sign = if h.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        v[(h % dim as u64) as usize] += sign;
    }
    let norm = l2_norm(&v);
    if norm == 0.0 {
        // Every gram cancelled out; fall back to the first gram's bucket.
        let h = stable_hash(&grams[0]);
        v[(h % dim as u64) as usize] = 1.0;
        return Ok(v);
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(v)
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Cosine similarity, clamped to [-1, 1]. A zero vector scores 0.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, EmbeddingError> {
    if u.len() != v.len() {
        return Err(EmbeddingError::DimMismatch {
            context: "cosine".into(),
            expected: u.len(),
            found: v.len(),
        });
    }
    let denom = l2_norm(u) * l2_norm(v);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((dot(u, v) / denom).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFileHeader {
    pub dim: usize,
    pub provider: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub provision_id: String,
    pub vector: Vec<f64>,
    #[serde(skip)]
    pub provider: String,
}

#[derive(Deserialize)]
struct RawRecord {
    provision_id: String,
    vector: Vec<f64>,
}

#[derive(Serialize)]
struct RecordLine<'a> {
    provision_id: &'a str,
    vector: &'a [f64],
}

/// Unit vectors of a single dimension, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    provider: String,
    records: Vec<EmbeddingRecord>,
    by_id: HashMap<String, usize>,
}

impl EmbeddingStore {
    /// Validate and normalize records. Vectors off unit norm by less than
    /// [`NORM_TOLERANCE`] are rescaled; larger deviations are rejected.
    pub fn from_records(dim: usize, provider: &str, records: Vec<(String, Vec<f64>)>) -> Result<Self, EmbeddingError> {
        let mut out = Vec::with_capacity(records.len());
        let mut by_id = HashMap::with_capacity(records.len());
        for (id, mut vector) in records {
            if vector.len() != dim {
                return Err(EmbeddingError::DimMismatch {
                    context: id,
                    expected: dim,
                    found: vector.len(),
                });
            }
            let norm = l2_norm(&vector);
            if !norm.is_finite() || (norm - 1.0).abs() >= NORM_TOLERANCE {
                return Err(EmbeddingError::BadNorm { id, norm });
            }
            // Rescaling an already unit vector would only perturb its last
            // bits, so written files read back byte for byte.
            if (norm - 1.0).abs() > UNIT_EPSILON {
                vector.iter_mut().for_each(|x| *x /= norm);
            }
            if by_id.insert(id.clone(), out.len()).is_some() {
                return Err(EmbeddingError::DuplicateId(id));
            }
            out.push(EmbeddingRecord {
                provision_id: id,
                vector,
                provider: provider.to_string(),
            });
        }
        Ok(EmbeddingStore {
            dim,
            provider: provider.to_string(),
            records: out,
            by_id,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provider(&self) -> &str {
        &self.provider
    }

    pub fn records(&self) -> &[EmbeddingRecord] {
        &self.records
    }

    pub fn get(&self, provision_id: &str) -> Option<&[f64]> {
        self.by_id.get(provision_id).map(|&i| self.records[i].vector.as_slice())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn header(&self) -> VectorFileHeader {
        VectorFileHeader {
            dim: self.dim,
            provider: self.provider.clone(),
            count: self.records.len(),
        }
    }

    /// Vector-file bytes: a header line then one record per line.
    pub fn to_vector_file(&self) -> Vec<u8> {
        let mut buf = serde_json::to_vec(&self.header()).expect("header serializes");
        buf.push(b'\n');
        for r in &self.records {
            let line = RecordLine {
                provision_id: &r.provision_id,
                vector: &r.vector,
            };
            serde_json::to_writer(&mut buf, &line).expect("record serializes");
            buf.push(b'\n');
        }
        buf
    }

    pub fn write_vectors(&self, path: &Path) -> Result<(), EmbeddingError> {
        write_atomic(path, &self.to_vector_file()).map_err(|source| EmbeddingError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Provider tag recorded for trigram vectors.
pub fn trigram_provider(dim: usize) -> String {
    format!("trigram-fnv1a-d{dim}")
}

/// Embed every provision of `corpus` with [`trigram_embed`], in corpus order.
pub fn embed_corpus(corpus: &Corpus, dim: usize) -> Result<EmbeddingStore, EmbeddingError> {
    let records = corpus
        .provisions()
        .par_iter()
        .map(|p| Ok((p.provision_id.clone(), trigram_embed(&p.text, dim)?)))
        .collect::<Result<Vec<_>, EmbeddingError>>()?;
    EmbeddingStore::from_records(dim, &trigram_provider(dim), records)
}

/// Load a vector file. When `corpus` is given every id must belong to it.
pub fn ingest_vectors(path: &Path, corpus: Option<&Corpus>) -> Result<EmbeddingStore, EmbeddingError> {
    let bad = |line: usize, message: String| EmbeddingError::BadRecord {
        path: path.to_path_buf(),
        line,
        message,
    };
    let file = fs::File::open(path).map_err(|source| EmbeddingError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let header: VectorFileHeader = loop {
        match lines.next() {
            None => return Err(bad(1, "missing header record".into())),
            Some((i, line)) => {
                let line = line.map_err(|source| EmbeddingError::Io {
                    path: path.to_path_buf(),
                    source,
                })?;
                if line.trim().is_empty() {
                    continue;
                }
                break serde_json::from_str(&line).map_err(|e| bad(i + 1, e.to_string()))?;
            }
        }
    };
    if header.dim == 0 {
        return Err(bad(1, "header dim must be positive".into()));
    }
    let mut records = Vec::with_capacity(header.count);
    for (i, line) in lines {
        let line = line.map_err(|source| EmbeddingError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let r: RawRecord = serde_json::from_str(&line).map_err(|e| bad(i + 1, e.to_string()))?;
        if let Some(c) = corpus {
            if c.get(&r.provision_id).is_none() {
                return Err(EmbeddingError::UnknownProvision(r.provision_id));
            }
        }
        records.push((r.provision_id, r.vector));
    }
    if records.len() != header.count {
        return Err(EmbeddingError::HeaderCountMismatch {
            declared: header.count,
            found: records.len(),
        });
    }
    EmbeddingStore::from_records(header.dim, &header.provider, records)
}
