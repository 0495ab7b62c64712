mod common;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use lexbridge_core::corpus::read_corpus;
use lexbridge_core::fsio::sha256_hex;
use lexbridge_core::graph::{parse_graphml, parse_nodelink, tripartite_violations, GraphStats};
use lexbridge_core::pipeline::{
    cmd_all, cmd_convert, cmd_corpus, cmd_embed, cmd_graph, cmd_link, read_akn_index, PipelineConfig, Provenance,
};
use lexbridge_core::rerank::read_correspondences;

use common::fixtures;

const STAGES: [&str; 5] = ["convert", "corpus", "embed", "link", "graph"];

/// A config over copies of a few fixture laws, for quick runs.
fn small_workspace(dir: &Path, extra: &str) -> PipelineConfig {
    for (country, names) in [
        (
            "jp",
            &["02_trust_deposits.xml", "03_basic_contracts.xml", "09_guarantees.xml"][..],
        ),
        ("kr", &["02_3725.xml"][..]),
        ("fr", &["02_89-462.xml"][..]),
    ] {
        let to = dir.join(country);
        fs::create_dir_all(&to).unwrap();
        for n in names {
            fs::copy(fixtures().join(country).join(n), to.join(n)).unwrap();
        }
    }
    let text = format!(
        r#"run_id = "small"
output_dir = "out"
{extra}
[[sources]]
country = "JP"
dir = "jp"
format = "jls"

[[sources]]
country = "KR"
dir = "kr"
format = "akn"

[[sources]]
country = "FR"
dir = "fr"
format = "akn"
"#
    );
    let path = dir.join("lexbridge.toml");
    fs::write(&path, &text).unwrap();
    let cfg = PipelineConfig::from_toml(&text, dir).unwrap();
    cfg.validate().unwrap();
    cfg
}

fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn full_fixture_run_produces_consistent_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixtures().join("lexbridge.toml")).unwrap();
    let mut cfg = PipelineConfig::from_toml(&text, &fixtures()).unwrap();
    cfg.output_dir = dir.path().join("out");
    cfg.validate().unwrap();
    let outcome = cmd_all(&cfg).unwrap();
    assert!(
        outcome.warnings.iter().any(|w| w.contains("SupplProvision")),
        "{:?}",
        outcome.warnings
    );

    // Every stage leaves usable outputs.
    let index = read_akn_index(&cfg, "corpus").unwrap();
    assert_eq!(index.len(), 15);
    for e in &index {
        assert!(cfg.akn_dir().join(&e.file).is_file(), "{}", e.file);
    }
    let corpus = read_corpus(&cfg.corpus_path()).unwrap();
    let per_country = |c: &str| corpus.provisions().iter().filter(|p| p.country == c).count();
    assert_eq!(per_country("KR"), 407);
    assert_eq!(per_country("FR"), 504);
    let (header, records) = read_correspondences(&cfg.correspondences_path()).unwrap();
    assert_eq!(header.count, per_country("JP"));
    assert_eq!(records.len(), per_country("JP"));
    assert!(cfg.candidates_path().is_file());

    // Outputs listed in provenance match the files on disk.
    let base = cfg.output_dir.parent().unwrap();
    for stage in STAGES {
        let prov: Provenance = serde_json::from_str(&fs::read_to_string(cfg.provenance_path(stage)).unwrap()).unwrap();
        assert_eq!(prov.stage, stage);
        assert_eq!(prov.run_id, "demo");
        assert_eq!(prov.config_sha256, sha256_hex(text.as_bytes()));
        assert!(!prov.inputs.is_empty() && !prov.outputs.is_empty(), "{stage}");
        for d in prov.inputs.iter().chain(&prov.outputs) {
            let p = if Path::new(&d.file).is_absolute() {
                PathBuf::from(&d.file)
            } else {
                base.join(&d.file)
            };
            assert_eq!(sha256_hex(&fs::read(&p).unwrap()), d.sha256, "{stage}: {}", d.file);
        }
    }

    // The three exports describe one graph, and the stats recount from it.
    let graph_dir = cfg.graph_dir();
    let nodelink = parse_nodelink(&fs::read_to_string(graph_dir.join("demo.nodelink")).unwrap()).unwrap();
    let graphml = parse_graphml(&fs::read_to_string(graph_dir.join("demo.graphml")).unwrap()).unwrap();
    assert_eq!(nodelink, graphml);
    let dot = fs::read_to_string(graph_dir.join("demo.dot")).unwrap();
    assert_eq!(dot.matches(" -> ").count(), nodelink.edges.len());
    assert!(!nodelink.edges.is_empty());
    assert!(tripartite_violations(&nodelink, "JP").is_empty());

    let stats: GraphStats = serde_json::from_str(&fs::read_to_string(cfg.stats_path()).unwrap()).unwrap();
    assert_eq!(stats.nodes_total, nodelink.nodes.len());
    assert_eq!(stats.edges_total, nodelink.edges.len());
    let country: HashMap<&str, &str> = nodelink
        .nodes
        .iter()
        .map(|n| (n.provision_id.as_str(), n.country.as_str()))
        .collect();
    let mut degree: HashMap<&str, usize> = HashMap::new();
    for e in &nodelink.edges {
        *degree.entry(&e.query_id).or_default() += 1;
        *degree.entry(&e.target_id).or_default() += 1;
    }
    for c in ["KR", "JP", "FR"] {
        let s = &stats.countries[c];
        let ids: Vec<&str> = country.iter().filter(|(_, v)| **v == c).map(|(k, _)| *k).collect();
        assert_eq!(s.nodes, ids.len(), "{c}");
        let mut hist = BTreeMap::new();
        for id in &ids {
            *hist.entry(degree[id]).or_insert(0) += 1;
        }
        assert_eq!(s.degree_histogram, hist, "{c}");
        let scores: Vec<f64> = nodelink
            .edges
            .iter()
            .filter(|e| country[e.query_id.as_str()] == c || country[e.target_id.as_str()] == c)
            .map(|e| e.score)
            .collect();
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        assert!((s.mean_score - mean).abs() < 1e-6, "{c}: {} vs {mean}", s.mean_score);
    }
}

#[test]
fn rerunning_any_stage_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_workspace(dir.path(), "");
    cmd_all(&cfg).unwrap();
    let before = snapshot(&cfg.output_dir);
    assert!(before.len() >= 12, "{:?}", before.keys());
    for stage in [cmd_graph, cmd_link, cmd_embed, cmd_corpus, cmd_convert] {
        stage(&cfg).unwrap();
        assert_eq!(snapshot(&cfg.output_dir), before);
    }
}

#[test]
fn stages_need_their_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_workspace(dir.path(), "");
    for (name, stage) in [
        ("corpus", cmd_corpus as fn(&PipelineConfig) -> _),
        ("embed", cmd_embed),
        ("link", cmd_link),
        ("graph", cmd_graph),
    ] {
        let err = stage(&cfg).unwrap_err();
        assert_eq!(err.code(), "StageInputMissing", "{name}: {err}");
    }
    cmd_convert(&cfg).unwrap();
    cmd_corpus(&cfg).unwrap();
    assert_eq!(cmd_link(&cfg).unwrap_err().code(), "StageInputMissing");
    assert!(!cfg.correspondences_path().exists());
}

#[test]
fn external_vectors_are_ingested() {
    let dir = tempfile::tempdir().unwrap();
    let trigram = small_workspace(dir.path(), "");
    cmd_convert(&trigram).unwrap();
    cmd_corpus(&trigram).unwrap();
    cmd_embed(&trigram).unwrap();
    let external = dir.path().join("external.jsonl");
    fs::copy(trigram.vectors_path(), &external).unwrap();
    let produced = fs::read(trigram.vectors_path()).unwrap();
    fs::remove_file(trigram.vectors_path()).unwrap();

    let ingest = small_workspace(dir.path(), "[embedder]\nkind = \"ingest\"\npath = \"external.jsonl\"\n");
    cmd_embed(&ingest).unwrap();
    assert_eq!(fs::read(ingest.vectors_path()).unwrap(), produced);
    let prov: Provenance = serde_json::from_str(&fs::read_to_string(ingest.provenance_path("embed")).unwrap()).unwrap();
    assert!(prov.inputs.iter().any(|d| d.file.ends_with("external.jsonl")));
}

#[test]
fn source_country_must_match_documents() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_workspace(dir.path(), "");
    fs::copy(
        fixtures().join("fr/01_1804-03.xml"),
        dir.path().join("kr/99_french.xml"),
    )
    .unwrap();
    let err = cmd_convert(&cfg).unwrap_err();
    assert_eq!(err.code(), "SourceInvalid", "{err}");
    assert!(!cfg.akn_index_path().exists());
}
