//! File-to-file pipeline stages driven by one TOML configuration.
//!
//! Output directory layout:
//!
//! ```text
//! akn/*.akn.xml, akn/index.json     convert
//! corpus.jsonl, corpus.jsonl.manifest
//! vectors.jsonl                     embed
//! candidates.jsonl, correspondences.jsonl
//! graph/{run_id}.{graphml,dot,nodelink}, graph/{run_id}.stats.json
//! provenance/{stage}.json
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::akn::{
    convert, parse_akn, serialize_akn, validate_akn, AknParseError, ConvertError, IdentityError, IdentityInputs,
    MappingTable, RuleTableError, ValidationFailed,
};
use crate::corpus::{extract_provisions, read_corpus, write_corpus, Corpus, CorpusError, Level, SourceDigest};
use crate::embedding::{embed_corpus, ingest_vectors, EmbeddingError, MIN_TRIGRAM_DIM};
use crate::fsio::{sha256_hex, write_atomic};
use crate::graph::{
    build_graph, export_graph, graph_stats, select_edges, EdgeRule, ExportFormat, GraphError, GraphLayout,
};
use crate::jls::{parse_jls, JlsError};
use crate::rerank::{
    read_correspondences, run_linking, LexicalScorer, PairScorer, RemoteScorer, RerankConfig, RerankError, ScorerKind,
};
use crate::retrieval::{write_candidate_dump, RetrievalConfig};

pub const SCORER_URL_ENV: &str = "LEXBRIDGE_SCORER_URL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    Jls,
    Akn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub country: String,
    pub dir: PathBuf,
    pub format: SourceFormat,
    /// Expression date for converted JLS laws; defaults to the
    /// promulgation date.
    #[serde(default)]
    pub version_date: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedderKind {
    Trigram,
    Ingest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedderConfig {
    pub kind: EmbedderKind,
    pub dim: usize,
    pub path: Option<PathBuf>,
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        EmbedderConfig {
            kind: EmbedderKind::Trigram,
            dim: 256,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub columns: Vec<String>,
    pub formats: Vec<ExportFormat>,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            columns: GraphLayout::default().columns,
            formats: ExportFormat::ALL.to_vec(),
        }
    }
}

fn default_run_id() -> String {
    "run".into()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_level() -> Level {
    Level::Paragraph
}

fn default_edge_rules() -> Vec<EdgeRule> {
    EdgeRule::defaults()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_run_id")]
    pub run_id: String,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_level")]
    pub level: Level,
    /// Optional mapping rule file replacing the built-in table.
    #[serde(default)]
    pub mapping_rules: Option<PathBuf>,
    pub sources: Vec<SourceConfig>,
    #[serde(default)]
    pub embedder: EmbedderConfig,
    #[serde(default)]
    pub retrieval: RetrievalConfig,
    #[serde(default)]
    pub rerank: RerankConfig,
    #[serde(default = "default_edge_rules")]
    pub edge_rules: Vec<EdgeRule>,
    #[serde(default)]
    pub graph: GraphConfig,
    /// SHA-256 of the configuration file bytes.
    #[serde(skip)]
    pub digest: String,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("stage {stage} needs {path}; run the earlier stages first")]
    StageInputMissing { stage: &'static str, path: PathBuf },
    #[error("{file}: {source}")]
    Jls { file: PathBuf, source: JlsError },
    #[error("{file}: {source}")]
    Identity { file: PathBuf, source: IdentityError },
    #[error("{file}: {source}")]
    Convert { file: PathBuf, source: ConvertError },
    #[error("{file}: {source}")]
    AknParse { file: PathBuf, source: AknParseError },
    #[error("{file}: {source}")]
    AknInvalid { file: PathBuf, source: ValidationFailed },
    #[error("{file}: {message}")]
    Source { file: PathBuf, message: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Rerank(#[from] RerankError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl PipelineError {
    /// Stable identifier for the machine-readable error line.
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::ConfigInvalid(_) => "ConfigInvalid",
            PipelineError::StageInputMissing { .. } => "StageInputMissing",
            PipelineError::Jls { .. } => "JlsParse",
            PipelineError::Identity { .. } => "InvalidIdentity",
            PipelineError::Convert { .. } => "Convert",
            PipelineError::AknParse { .. } => "AknParse",
            PipelineError::AknInvalid { .. } => "AknInvalid",
            PipelineError::Source { .. } => "SourceInvalid",
            PipelineError::Corpus(_) => "Corpus",
            PipelineError::Embedding(_) => "Embedding",
            PipelineError::Rerank(RerankError::ServiceUnreachable { .. }) => "ServiceUnreachable",
            PipelineError::Rerank(RerankError::ServiceBadResponse(_)) => "ServiceBadResponse",
            PipelineError::Rerank(_) => "Link",
            PipelineError::Graph(_) => "Graph",
            PipelineError::Io { .. } => "IoFailure",
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn valid_run_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || "_.-".contains(c)) && !id.starts_with('.')
}

impl PipelineConfig {
    /// Parse TOML text. Relative paths are resolved against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, PipelineError> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| PipelineError::ConfigInvalid(e.to_string()))?;
        cfg.digest = sha256_hex(text.as_bytes());
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.output_dir);
        for s in &mut cfg.sources {
            resolve(&mut s.dir);
            s.country = s.country.to_ascii_uppercase();
        }
        if let Some(p) = &mut cfg.mapping_rules {
            resolve(p);
        }
        if let Some(p) = &mut cfg.embedder.path {
            resolve(p);
        }
        Ok(cfg)
    }

    /// Read the file, apply the scorer URL override from the environment
    /// and validate.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text =
            fs::read_to_string(path).map_err(|e| PipelineError::ConfigInvalid(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut cfg = Self::from_toml(&text, base)?;
        cfg.apply_scorer_override(std::env::var(SCORER_URL_ENV).ok());
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_scorer_override(&mut self, url: Option<String>) {
        if let Some(url) = url.filter(|u| !u.is_empty()) {
            self.rerank.service_endpoint = Some(url);
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let invalid = |m: String| Err(PipelineError::ConfigInvalid(m));
        if !valid_run_id(&self.run_id) {
            return invalid(format!(
                "run_id `{}` may only use letters, digits, `_`, `-`, `.`",
                self.run_id
            ));
        }
        if self.sources.is_empty() {
            return invalid("no sources".into());
        }
        for s in &self.sources {
            if s.country.len() != 2 || !s.country.chars().all(|c| c.is_ascii_alphabetic()) {
                return invalid(format!("source country `{}` is not a two-letter code", s.country));
            }
            if !s.dir.is_dir() {
                return invalid(format!("source directory {} does not exist", s.dir.display()));
            }
        }
        if let Some(p) = &self.mapping_rules {
            if !p.is_file() {
                return invalid(format!("mapping rule file {} does not exist", p.display()));
            }
        }
        match self.embedder.kind {
            EmbedderKind::Trigram if self.embedder.dim < MIN_TRIGRAM_DIM => {
                return invalid(format!("embedder dim must be at least {MIN_TRIGRAM_DIM}"));
            }
            EmbedderKind::Ingest => match &self.embedder.path {
                None => return invalid("embedder kind ingest needs path".into()),
                Some(p) if !p.is_file() => return invalid(format!("vector file {} does not exist", p.display())),
                _ => {}
            },
            _ => {}
        }
        self.retrieval.validate().map_err(PipelineError::ConfigInvalid)?;
        self.rerank.validate().map_err(PipelineError::ConfigInvalid)?;
        let mut seen = BTreeSet::new();
        for r in &self.edge_rules {
            r.validate().map_err(PipelineError::ConfigInvalid)?;
            if !seen.insert(r.country.as_str()) {
                return invalid(format!("two edge rules for {}", r.country));
            }
        }
        for c in &self.retrieval.target_countries {
            if !seen.contains(c.as_str()) {
                return invalid(format!("no edge rule for target country {c}"));
            }
        }
        let columns: BTreeSet<&str> = self.graph.columns.iter().map(String::as_str).collect();
        if columns.len() != self.graph.columns.len() {
            return invalid("graph columns repeat a country".into());
        }
        for c in std::iter::once(&self.retrieval.query_country).chain(&self.retrieval.target_countries) {
            if !columns.contains(c.as_str()) {
                return invalid(format!("graph columns lack {c}"));
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> GraphLayout {
        GraphLayout {
            columns: self.graph.columns.clone(),
            query_country: self.retrieval.query_country.clone(),
        }
    }

    pub fn akn_dir(&self) -> PathBuf {
        self.output_dir.join("akn")
    }

    pub fn akn_index_path(&self) -> PathBuf {
        self.akn_dir().join("index.json")
    }

    pub fn corpus_path(&self) -> PathBuf {
        self.output_dir.join("corpus.jsonl")
    }

    pub fn vectors_path(&self) -> PathBuf {
        self.output_dir.join("vectors.jsonl")
    }

    pub fn candidates_path(&self) -> PathBuf {
        self.output_dir.join("candidates.jsonl")
    }

    pub fn correspondences_path(&self) -> PathBuf {
        self.output_dir.join("correspondences.jsonl")
    }

    pub fn graph_dir(&self) -> PathBuf {
        self.output_dir.join("graph")
    }

    pub fn stats_path(&self) -> PathBuf {
        self.graph_dir().join(format!("{}.stats.json", self.run_id))
    }

    pub fn provenance_path(&self, stage: &str) -> PathBuf {
        self.output_dir.join("provenance").join(format!("{stage}.json"))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageOutcome {
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl StageOutcome {
    fn merge(&mut self, other: StageOutcome) {
        self.outputs.extend(other.outputs);
        self.warnings.extend(other.warnings);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub stage: String,
    pub run_id: String,
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

/// Path text relative to `base` where possible, with `/` separators.
fn display_rel(path: &Path, base: &Path) -> String {
    let rel = path.strip_prefix(base).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn digest_files(paths: &[PathBuf], base: &Path) -> Result<Vec<FileDigest>, PipelineError> {
    paths
        .iter()
        .map(|p| {
            let bytes = fs::read(p).map_err(io_err(p))?;
            Ok(FileDigest {
                file: display_rel(p, base),
                sha256: sha256_hex(&bytes),
            })
        })
        .collect()
}

fn write_provenance(
    cfg: &PipelineConfig,
    stage: &str,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
) -> Result<PathBuf, PipelineError> {
    let base = cfg.output_dir.parent().unwrap_or(Path::new(""));
    let record = Provenance {
        stage: stage.to_string(),
        run_id: cfg.run_id.clone(),
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_sha256: cfg.digest.clone(),
        inputs: digest_files(inputs, base)?,
        outputs: digest_files(outputs, base)?,
    };
    let path = cfg.provenance_path(stage);
    let mut bytes = serde_json::to_vec_pretty(&record).expect("provenance serializes");
    bytes.push(b'\n');
    write_file(&path, &bytes)?;
    Ok(path)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    write_atomic(path, bytes).map_err(io_err(path))
}

fn require(stage: &'static str, path: PathBuf) -> Result<PathBuf, PipelineError> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(PipelineError::StageInputMissing { stage, path })
    }
}

fn source_files(src: &SourceConfig) -> Result<Vec<PathBuf>, PipelineError> {
    let mut files: Vec<PathBuf> = fs::read_dir(&src.dir)
        .map_err(io_err(&src.dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "xml"))
        .collect();
    files.sort();
    Ok(files)
}

/// One converted document as listed in `akn/index.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AknIndexEntry {
    pub file: String,
    pub country: String,
    pub source: String,
    pub source_sha256: String,
}

fn mapping_table(cfg: &PipelineConfig) -> Result<MappingTable, PipelineError> {
    match &cfg.mapping_rules {
        None => Ok(MappingTable::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            MappingTable::parse(&text)
                .map_err(|e: RuleTableError| PipelineError::ConfigInvalid(format!("{}: {e}", p.display())))
        }
    }
}

/// JLS sources are converted; AKN sources are validated and rewritten in
/// canonical form, so later stages see one format.
pub fn cmd_convert(cfg: &PipelineConfig) -> Result<StageOutcome, PipelineError> {
    let table = mapping_table(cfg)?;
    let base = cfg.output_dir.parent().unwrap_or(Path::new(""));
    let mut outcome = StageOutcome::default();
    let mut inputs = Vec::new();
    let mut index = Vec::new();
    let mut written: Vec<(PathBuf, String)> = Vec::new();
    let mut names = BTreeSet::new();
    for src in &cfg.sources {
        for file in source_files(src)? {
            let bytes = fs::read(&file).map_err(io_err(&file))?;
            let text = String::from_utf8(bytes.clone()).map_err(|_| PipelineError::Source {
                file: file.clone(),
                message: "not UTF-8".into(),
            })?;
            let doc = match src.format {
                SourceFormat::Jls => {
                    let parsed = parse_jls(&text).map_err(|source| PipelineError::Jls {
                        file: file.clone(),
                        source,
                    })?;
                    let label = display_rel(&file, base);
                    outcome
                        .warnings
                        .extend(parsed.warnings.iter().map(|w| w.render(&label)));
                    let inputs_id =
                        IdentityInputs::from_jls(&parsed.document, &src.country, src.version_date.as_deref()).map_err(
                            |source| PipelineError::Identity {
                                file: file.clone(),
                                source,
                            },
                        )?;
                    convert(&parsed.document, &inputs_id, &table).map_err(|source| PipelineError::Convert {
                        file: file.clone(),
                        source,
                    })?
                }
                SourceFormat::Akn => {
                    let doc = parse_akn(&text).map_err(|source| PipelineError::AknParse {
                        file: file.clone(),
                        source,
                    })?;
                    let violations = validate_akn(&doc);
                    if !violations.is_empty() {
                        return Err(PipelineError::AknInvalid {
                            file,
                            source: ValidationFailed(violations),
                        });
                    }
                    doc
                }
            };
            if doc.identity.country.to_ascii_uppercase() != src.country {
                return Err(PipelineError::Source {
                    file,
                    message: format!(
                        "document country {} differs from source country {}",
                        doc.identity.country, src.country
                    ),
                });
            }
            let name = doc.identity.file_name();
            if !names.insert(name.clone()) {
                return Err(PipelineError::Source {
                    file,
                    message: format!("second document with identity {name}"),
                });
            }
            let xml = serialize_akn(&doc).map_err(|source| PipelineError::AknInvalid {
                file: file.clone(),
                source,
            })?;
            index.push(AknIndexEntry {
                file: name.clone(),
                country: src.country.clone(),
                source: display_rel(&file, base),
                source_sha256: sha256_hex(&bytes),
            });
            written.push((cfg.akn_dir().join(&name), xml));
            inputs.push(file);
        }
    }
    for (path, xml) in &written {
        write_file(path, xml.as_bytes())?;
        outcome.outputs.push(path.clone());
    }
    let mut idx = serde_json::to_vec_pretty(&index).expect("index serializes");
    idx.push(b'\n');
    write_file(&cfg.akn_index_path(), &idx)?;
    outcome.outputs.push(cfg.akn_index_path());
    outcome
        .outputs
        .push(write_provenance(cfg, "convert", &inputs, &outcome.outputs)?);
    Ok(outcome)
}

pub fn read_akn_index(cfg: &PipelineConfig, stage: &'static str) -> Result<Vec<AknIndexEntry>, PipelineError> {
    let path = require(stage, cfg.akn_index_path())?;
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Source {
        file: path,
        message: e.to_string(),
    })
}

/// Documents without any element at the configured level contribute no
/// provisions and are reported as warnings.
pub fn cmd_corpus(cfg: &PipelineConfig) -> Result<StageOutcome, PipelineError> {
    let entries = read_akn_index(cfg, "corpus")?;
    let mut outcome = StageOutcome::default();
    let mut provisions = Vec::new();
    let mut sources = Vec::new();
    let mut inputs = vec![cfg.akn_index_path()];
    for entry in &entries {
        let path = require("corpus", cfg.akn_dir().join(&entry.file))?;
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let doc = parse_akn(&text).map_err(|source| PipelineError::AknParse {
            file: path.clone(),
            source,
        })?;
        match extract_provisions(&doc, cfg.level) {
            Ok(ps) => provisions.extend(ps),
            Err(CorpusError::NoSuchLevel { .. }) => outcome.warnings.push(format!(
                "WARN {}: no {} elements, document skipped",
                entry.file,
                cfg.level.element()
            )),
            Err(e) => return Err(e.into()),
        }
        sources.push(SourceDigest {
            file: entry.file.clone(),
            sha256: sha256_hex(text.as_bytes()),
        });
        inputs.push(path);
    }
    let corpus = Corpus::new(&cfg.run_id, provisions, sources)?;
    let out = cfg.corpus_path();
    fs::create_dir_all(&cfg.output_dir).map_err(io_err(&cfg.output_dir))?;
    write_corpus(&corpus, &out)?;
    outcome.outputs.push(out.clone());
    outcome.outputs.push(crate::corpus::manifest_path(&out));
    outcome
        .outputs
        .push(write_provenance(cfg, "corpus", &inputs, &outcome.outputs)?);
    Ok(outcome)
}

fn load_corpus(cfg: &PipelineConfig, stage: &'static str) -> Result<Corpus, PipelineError> {
    let path = require(stage, cfg.corpus_path())?;
    require(stage, crate::corpus::manifest_path(&path))?;
    Ok(read_corpus(&path)?)
}

pub fn cmd_embed(cfg: &PipelineConfig) -> Result<StageOutcome, PipelineError> {
    let corpus = load_corpus(cfg, "embed")?;
    let mut inputs = vec![cfg.corpus_path()];
    let store = match cfg.embedder.kind {
        EmbedderKind::Trigram => embed_corpus(&corpus, cfg.embedder.dim)?,
        EmbedderKind::Ingest => {
            let p = cfg.embedder.path.clone().expect("validated");
            let store = ingest_vectors(&p, Some(&corpus))?;
            inputs.push(p);
            store
        }
    };
    let out = cfg.vectors_path();
    store.write_vectors(&out)?;
    let mut outcome = StageOutcome {
        outputs: vec![out],
        warnings: Vec::new(),
    };
    outcome
        .outputs
        .push(write_provenance(cfg, "embed", &inputs, &outcome.outputs)?);
    Ok(outcome)
}

fn make_scorer(cfg: &RerankConfig) -> Result<Box<dyn PairScorer>, PipelineError> {
    Ok(match cfg.scorer {
        ScorerKind::LexicalFallback => Box::new(LexicalScorer),
        ScorerKind::RemoteService => {
            let endpoint = cfg.service_endpoint.as_deref().expect("validated");
            Box::new(RemoteScorer::new(endpoint)?)
        }
    })
}

pub fn cmd_link(cfg: &PipelineConfig) -> Result<StageOutcome, PipelineError> {
    let corpus = load_corpus(cfg, "link")?;
    let vectors = require("link", cfg.vectors_path())?;
    let store = ingest_vectors(&vectors, Some(&corpus))?;
    let scorer = make_scorer(&cfg.rerank)?;
    let out = cfg.correspondences_path();
    let linked = run_linking(&corpus, &store, &cfg.retrieval, &cfg.rerank, scorer.as_ref(), &out)?;
    let dump = cfg.candidates_path();
    write_candidate_dump(&linked.candidates, &dump).map_err(io_err(&dump))?;
    let mut outcome = StageOutcome {
        outputs: vec![dump, out],
        warnings: Vec::new(),
    };
    let inputs = vec![cfg.corpus_path(), vectors];
    outcome
        .outputs
        .push(write_provenance(cfg, "link", &inputs, &outcome.outputs)?);
    Ok(outcome)
}

pub fn cmd_graph(cfg: &PipelineConfig) -> Result<StageOutcome, PipelineError> {
    let records_path = require("graph", cfg.correspondences_path())?;
    let corpus = load_corpus(cfg, "graph")?;
    let (_, records) = read_correspondences(&records_path)?;
    let edges = select_edges(&records, &cfg.edge_rules)?;
    let graph = build_graph(&edges, &corpus, &cfg.layout())?;
    let dir = cfg.graph_dir();
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let mut outcome = StageOutcome {
        outputs: export_graph(&graph, &dir, &cfg.run_id, &cfg.graph.formats)?,
        warnings: Vec::new(),
    };
    let stats = graph_stats(&graph, &cfg.graph.columns);
    let mut bytes = serde_json::to_vec_pretty(&stats).expect("stats serialize");
    bytes.push(b'\n');
    write_file(&cfg.stats_path(), &bytes)?;
    outcome.outputs.push(cfg.stats_path());
    let inputs = vec![records_path, cfg.corpus_path()];
    outcome
        .outputs
        .push(write_provenance(cfg, "graph", &inputs, &outcome.outputs)?);
    Ok(outcome)
}

/// All stages in order, stopping at the first error.
pub fn cmd_all(cfg: &PipelineConfig) -> Result<StageOutcome, PipelineError> {
    let mut outcome = StageOutcome::default();
    for stage in [cmd_convert, cmd_corpus, cmd_embed, cmd_link, cmd_graph] {
        outcome.merge(stage(cfg)?);
    }
    Ok(outcome)
}
