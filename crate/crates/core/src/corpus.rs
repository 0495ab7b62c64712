//! Provision-level text units and their line-delimited corpus files.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::akn::{AknDocument, AknNode};
use crate::fsio::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Article,
    Paragraph,
    Item,
}

impl Level {
    pub fn element(self) -> &'static str {
        match self {
            Level::Article => "article",
            Level::Paragraph => "paragraph",
            Level::Item => "point",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Article => "article",
            Level::Paragraph => "paragraph",
            Level::Item => "item",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "article" => Ok(Level::Article),
            "paragraph" => Ok(Level::Paragraph),
            "item" => Ok(Level::Item),
            other => Err(format!("unknown level `{other}` (article, paragraph, item)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provision {
    pub provision_id: String,
    /// Upper-case ISO 3166 alpha-2.
    pub country: String,
    pub law_id: String,
    #[serde(rename = "eId")]
    pub eid: String,
    pub level: Level,
    pub language: String,
    pub text: String,
    pub ordinal: usize,
}

impl Provision {
    pub fn make_id(country: &str, law_id: &str, eid: &str) -> String {
        format!("{country}:{law_id}:{eid}")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("document has no {0} elements")]
    NoSuchLevel(Level),
    #[error("duplicate provision id {0}")]
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
    #[error("{path}: manifest declares {declared} provisions, file holds {found}")]
    CountMismatch {
        path: PathBuf,
        declared: usize,
        found: usize,
    },
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Collapse whitespace runs to one space and trim.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn flatten(node: &AknNode, out: &mut Vec<String>) {
    if let Some(h) = &node.heading {
        out.push(h.clone());
    }
    if let Some(t) = &node.text {
        out.push(t.clone());
    }
    for c in &node.children {
        flatten(c, out);
    }
}

/// One provision per element of `level`, in document order. Elements whose
/// text is empty after normalization are skipped; ordinals count emitted
/// provisions only.
pub fn extract_provisions(doc: &AknDocument, level: Level) -> Result<Vec<Provision>, CorpusError> {
    let country = doc.identity.country.to_ascii_uppercase();
    let law_id = doc.identity.law_id();
    let target = level.element();
    let mut found = false;
    let mut out = Vec::new();
    for node in doc.root.walk() {
        if node.element != target {
            continue;
        }
        found = true;
        let mut parts = Vec::new();
        flatten(node, &mut parts);
        let text = normalize_whitespace(&parts.join(" "));
        let Some(eid) = node.eid.clone() else { continue };
        if text.is_empty() {
            continue;
        }
        out.push(Provision {
            provision_id: Provision::make_id(&country, &law_id, &eid),
            country: country.clone(),
            law_id: law_id.clone(),
            eid,
            level,
            language: doc.identity.language.clone(),
            text,
            ordinal: out.len(),
        });
    }
    if !found {
        return Err(CorpusError::NoSuchLevel(level));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub corpus_id: String,
    pub countries: Vec<String>,
    pub level: Option<Level>,
    pub provision_count: usize,
    pub sources: Vec<SourceDigest>,
}

/// An in-memory corpus with id lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub manifest: CorpusManifest,
    provisions: Vec<Provision>,
    by_id: HashMap<String, usize>,
}

impl Corpus {
    pub fn new(corpus_id: &str, provisions: Vec<Provision>, sources: Vec<SourceDigest>) -> Result<Self, CorpusError> {
        let mut by_id = HashMap::with_capacity(provisions.len());
        for (i, p) in provisions.iter().enumerate() {
            if by_id.insert(p.provision_id.clone(), i).is_some() {
                return Err(CorpusError::DuplicateId(p.provision_id.clone()));
            }
        }
        let countries: BTreeSet<_> = provisions.iter().map(|p| p.country.clone()).collect();
        let levels: HashSet<_> = provisions.iter().map(|p| p.level).collect();
        let manifest = CorpusManifest {
            corpus_id: corpus_id.to_string(),
            countries: countries.into_iter().collect(),
            level: if levels.len() == 1 {
                levels.into_iter().next()
            } else {
                None
            },
            provision_count: provisions.len(),
            sources,
        };
        Ok(Corpus {
            manifest,
            provisions,
            by_id,
        })
    }

    pub fn provisions(&self) -> &[Provision] {
        &self.provisions
    }

    pub fn get(&self, provision_id: &str) -> Option<&Provision> {
        self.by_id.get(provision_id).map(|&i| &self.provisions[i])
    }

    pub fn len(&self) -> usize {
        self.provisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provisions.is_empty()
    }
}

pub fn manifest_path(corpus_path: &Path) -> PathBuf {
    let mut s = corpus_path.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

/// One JSON record per line, plus a `<path>.manifest` sibling.
pub fn write_corpus(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let mut buf = Vec::new();
    for p in corpus.provisions() {
        serde_json::to_writer(&mut buf, p).expect("provision serializes");
        buf.push(b'\n');
    }
    let mut manifest = serde_json::to_vec_pretty(&corpus.manifest).expect("manifest serializes");
    manifest.push(b'\n');
    write_atomic(path, &buf).map_err(|e| CorpusError::io(path, e))?;
    let mpath = manifest_path(path);
    write_atomic(&mpath, &manifest).map_err(|e| CorpusError::io(&mpath, e))
}

pub fn read_corpus(path: &Path) -> Result<Corpus, CorpusError> {
    let mpath = manifest_path(path);
    let manifest_text = fs::read_to_string(&mpath).map_err(|e| CorpusError::io(&mpath, e))?;
    let manifest: CorpusManifest = serde_json::from_str(&manifest_text).map_err(|e| CorpusError::BadRecord {
        path: mpath.clone(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let file = fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut provisions = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let p: Provision = serde_json::from_str(&line).map_err(|e| CorpusError::BadRecord {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        provisions.push(p);
    }
    if provisions.len() != manifest.provision_count {
        return Err(CorpusError::CountMismatch {
            path: path.to_path_buf(),
            declared: manifest.provision_count,
            found: provisions.len(),
        });
    }
    let mut corpus = Corpus::new(&manifest.corpus_id, provisions, manifest.sources.clone())?;
    corpus.manifest = manifest;
    Ok(corpus)
}
