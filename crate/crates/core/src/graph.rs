//! Thresholded edge selection, the column-layout correspondence graph, its
//! statistics and exports.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::fsio::{round6, write_atomic};
use crate::rerank::{CorrespondenceRecord, Link};
use crate::retrieval::rank_order;
use crate::xml::{self, XmlWriter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRule {
    pub country: String,
    pub min_score: f64,
    pub max_edges_per_query: usize,
}

impl EdgeRule {
    pub fn new(country: &str, min_score: f64, max_edges_per_query: usize) -> Self {
        EdgeRule {
            country: country.to_string(),
            min_score,
            max_edges_per_query,
        }
    }

    pub fn defaults() -> Vec<EdgeRule> {
        vec![EdgeRule::new("KR", 0.95, 3), EdgeRule::new("FR", 0.80, 3)]
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.min_score) {
            return Err(format!(
                "{}: min_score {} is outside [0, 1]",
                self.country, self.min_score
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub query_id: String,
    pub target_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub provision_id: String,
    pub country: String,
    pub column: usize,
    pub row: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CorrespondenceGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<Edge>,
}

impl CorrespondenceGraph {
    pub fn node(&self, id: &str) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.provision_id == id)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("no edge rule for country {country} (query {query_id})")]
    MissingRule { country: String, query_id: String },
    #[error("edge endpoint {0} is not in the corpus")]
    UnknownProvision(String),
    #[error("country {0} has no layout column")]
    NoColumn(String),
    #[error("edge {query_id} -> {target_id} does not connect the query country to a target country")]
    NotTripartite { query_id: String, target_id: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad GraphML: {0}")]
    BadGraphMl(String),
}

/// Per record and country: keep links at or above the threshold, best
/// first, at most `max_edges_per_query` of them.
pub fn select_edges(records: &[CorrespondenceRecord], rules: &[EdgeRule]) -> Result<Vec<Edge>, GraphError> {
    let by_country: HashMap<&str, &EdgeRule> = rules.iter().map(|r| (r.country.as_str(), r)).collect();
    let mut edges = Vec::new();
    for rec in records {
        let mut groups: BTreeMap<&str, Vec<&Link>> = BTreeMap::new();
        for link in &rec.links {
            groups.entry(link.country.as_str()).or_default().push(link);
        }
        for (country, mut links) in groups {
            let rule = by_country.get(country).ok_or_else(|| GraphError::MissingRule {
                country: country.to_string(),
                query_id: rec.query_id.clone(),
            })?;
            links.retain(|l| l.rerank_score >= rule.min_score);
            links.sort_by(|a, b| {
                rank_order(
                    a.rerank_score,
                    (&a.country, &a.provision_id),
                    b.rerank_score,
                    (&b.country, &b.provision_id),
                )
            });
            edges.extend(links.into_iter().take(rule.max_edges_per_query).map(|l| Edge {
                query_id: rec.query_id.clone(),
                target_id: l.provision_id.clone(),
                score: l.rerank_score,
            }));
        }
    }
    Ok(edges)
}

/// Column order of the layout and the country whose provisions are the
/// queries. The query country sits in the middle by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphLayout {
    pub columns: Vec<String>,
    pub query_country: String,
}

impl Default for GraphLayout {
    fn default() -> Self {
        GraphLayout {
            columns: vec!["KR".into(), "JP".into(), "FR".into()],
            query_country: "JP".into(),
        }
    }
}

/// Nodes are the edge endpoints only. Within a column, rows follow
/// (law_id, ordinal).
pub fn build_graph(edges: &[Edge], corpus: &Corpus, layout: &GraphLayout) -> Result<CorrespondenceGraph, GraphError> {
    let column_of: HashMap<&str, usize> = layout
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let mut used: HashSet<&str> = HashSet::new();
    for e in edges {
        let q = corpus
            .get(&e.query_id)
            .ok_or_else(|| GraphError::UnknownProvision(e.query_id.clone()))?;
        let t = corpus
            .get(&e.target_id)
            .ok_or_else(|| GraphError::UnknownProvision(e.target_id.clone()))?;
        if q.country != layout.query_country || t.country == layout.query_country {
            return Err(GraphError::NotTripartite {
                query_id: e.query_id.clone(),
                target_id: e.target_id.clone(),
            });
        }
        used.insert(&q.provision_id);
        used.insert(&t.provision_id);
    }

    let mut per_column: BTreeMap<usize, Vec<(&str, usize, &str, &str)>> = BTreeMap::new();
    for id in used {
        let p = corpus.get(id).expect("checked above");
        let col = *column_of
            .get(p.country.as_str())
            .ok_or_else(|| GraphError::NoColumn(p.country.clone()))?;
        per_column
            .entry(col)
            .or_default()
            .push((&p.law_id, p.ordinal, &p.provision_id, &p.country));
    }
    let mut nodes = Vec::new();
    for (col, mut members) in per_column {
        members.sort();
        for (row, (_, _, id, country)) in members.into_iter().enumerate() {
            nodes.push(GraphNode {
                provision_id: id.to_string(),
                country: country.to_string(),
                column: col,
                row,
            });
        }
    }
    let mut edges = edges.to_vec();
    edges.sort_by(|a, b| (&a.query_id, &a.target_id).cmp(&(&b.query_id, &b.target_id)));
    Ok(CorrespondenceGraph { nodes, edges })
}

/// Every edge that does not run from a query-country node to a node of
/// another country, described as text.
pub fn tripartite_violations(graph: &CorrespondenceGraph, query_country: &str) -> Vec<String> {
    let country: HashMap<&str, &str> = graph
        .nodes
        .iter()
        .map(|n| (n.provision_id.as_str(), n.country.as_str()))
        .collect();
    let mut out = Vec::new();
    for e in &graph.edges {
        match (country.get(e.query_id.as_str()), country.get(e.target_id.as_str())) {
            (Some(&q), Some(&t)) if q == query_country && t != query_country => {}
            (q, t) => out.push(format!(
                "{} ({}) -> {} ({})",
                e.query_id,
                q.copied().unwrap_or("?"),
                e.target_id,
                t.copied().unwrap_or("?")
            )),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryStats {
    pub nodes: usize,
    /// degree -> number of nodes with that degree
    pub degree_histogram: BTreeMap<usize, usize>,
    /// Mean score of the edges touching this country's nodes; 0 without edges.
    pub mean_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub nodes_total: usize,
    pub edges_total: usize,
    pub countries: BTreeMap<String, CountryStats>,
}

/// Statistics for every country in `countries` (zeros when absent) plus
/// any other country present in the graph.
pub fn graph_stats(graph: &CorrespondenceGraph, countries: &[String]) -> GraphStats {
    let mut degree: HashMap<&str, usize> = HashMap::new();
    for e in &graph.edges {
        *degree.entry(&e.query_id).or_default() += 1;
        *degree.entry(&e.target_id).or_default() += 1;
    }
    let country_of: HashMap<&str, &str> = graph
        .nodes
        .iter()
        .map(|n| (n.provision_id.as_str(), n.country.as_str()))
        .collect();
    let mut stats: BTreeMap<String, CountryStats> = countries
        .iter()
        .map(|c| {
            (
                c.clone(),
                CountryStats {
                    nodes: 0,
                    degree_histogram: BTreeMap::new(),
                    mean_score: 0.0,
                },
            )
        })
        .collect();
    for n in &graph.nodes {
        let s = stats.entry(n.country.clone()).or_insert_with(|| CountryStats {
            nodes: 0,
            degree_histogram: BTreeMap::new(),
            mean_score: 0.0,
        });
        s.nodes += 1;
        let d = degree.get(n.provision_id.as_str()).copied().unwrap_or(0);
        *s.degree_histogram.entry(d).or_default() += 1;
    }
    let mut sums: HashMap<&str, (f64, usize)> = HashMap::new();
    for e in &graph.edges {
        let mut touched: Vec<&str> = [&e.query_id, &e.target_id]
            .iter()
            .filter_map(|id| country_of.get(id.as_str()).copied())
            .collect();
        touched.dedup();
        for c in touched {
            let s = sums.entry(c).or_default();
            s.0 += e.score;
            s.1 += 1;
        }
    }
    for (c, (sum, n)) in sums {
        if let Some(s) = stats.get_mut(c) {
            s.mean_score = round6(sum / n as f64);
        }
    }
    GraphStats {
        nodes_total: graph.nodes.len(),
        edges_total: graph.edges.len(),
        countries: stats,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Graphml,
    Dot,
    Nodelink,
}

impl ExportFormat {
    pub const ALL: [ExportFormat; 3] = [ExportFormat::Graphml, ExportFormat::Dot, ExportFormat::Nodelink];

    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Graphml => "graphml",
            ExportFormat::Dot => "dot",
            ExportFormat::Nodelink => "nodelink",
        }
    }
}

fn score_text(score: f64) -> String {
    format!("{:.6}", round6(score))
}

pub fn to_graphml(graph: &CorrespondenceGraph) -> String {
    let mut w = XmlWriter::new();
    w.start("graphml", &[("xmlns", "http://graphml.graphdrawing.org/xmlns")]);
    for (id, domain, name, ty) in [
        ("country", "node", "country", "string"),
        ("column", "node", "column", "int"),
        ("row", "node", "row", "int"),
        ("score", "edge", "score", "double"),
    ] {
        w.empty(
            "key",
            &[("id", id), ("for", domain), ("attr.name", name), ("attr.type", ty)],
        );
    }
    w.start("graph", &[("id", "correspondences"), ("edgedefault", "directed")]);
    for n in &graph.nodes {
        w.start("node", &[("id", &n.provision_id)]);
        w.text_element("data", &[("key", "country")], &n.country);
        w.text_element("data", &[("key", "column")], &n.column.to_string());
        w.text_element("data", &[("key", "row")], &n.row.to_string());
        w.end("node");
    }
    for (i, e) in graph.edges.iter().enumerate() {
        w.start(
            "edge",
            &[
                ("id", &format!("e{i}")),
                ("source", &e.query_id),
                ("target", &e.target_id),
            ],
        );
        w.text_element("data", &[("key", "score")], &score_text(e.score));
        w.end("edge");
    }
    w.end("graph");
    w.end("graphml");
    w.finish()
}

/// Read back a file produced by [`to_graphml`].
pub fn parse_graphml(text: &str) -> Result<CorrespondenceGraph, GraphError> {
    let bad = |m: String| GraphError::BadGraphMl(m);
    let root = xml::parse_document(text).map_err(|e| bad(e.to_string()))?;
    let graph_el = root.child("graph").ok_or_else(|| bad("no <graph>".into()))?;
    let data = |el: &xml::Element, key: &str| -> Result<String, GraphError> {
        el.elements()
            .find(|d| d.local_name() == "data" && d.attr("key") == Some(key))
            .map(|d| d.text())
            .ok_or_else(|| bad(format!("<{}> lacks data {key}", el.local_name())))
    };
    let attr = |el: &xml::Element, name: &str| -> Result<String, GraphError> {
        el.attr(name)
            .map(str::to_string)
            .ok_or_else(|| bad(format!("<{}> lacks @{name}", el.local_name())))
    };
    let int = |s: String| s.parse::<usize>().map_err(|e| bad(format!("{s}: {e}")));
    let mut graph = CorrespondenceGraph::default();
    for el in graph_el.elements() {
        match el.local_name() {
            "node" => graph.nodes.push(GraphNode {
                provision_id: attr(el, "id")?,
                country: data(el, "country")?,
                column: int(data(el, "column")?)?,
                row: int(data(el, "row")?)?,
            }),
            "edge" => {
                let s = data(el, "score")?;
                graph.edges.push(Edge {
                    query_id: attr(el, "source")?,
                    target_id: attr(el, "target")?,
                    score: s.parse().map_err(|e| bad(format!("{s}: {e}")))?,
                })
            }
            _ => {}
        }
    }
    Ok(graph)
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn to_dot(graph: &CorrespondenceGraph) -> String {
    let mut out = String::from("digraph correspondences {\n  rankdir=LR;\n");
    for n in &graph.nodes {
        writeln!(
            out,
            "  {} [country={}, column={}, row={}];",
            dot_quote(&n.provision_id),
            dot_quote(&n.country),
            n.column,
            n.row
        )
        .unwrap();
    }
    for e in &graph.edges {
        writeln!(
            out,
            "  {} -> {} [score={}];",
            dot_quote(&e.query_id),
            dot_quote(&e.target_id),
            score_text(e.score)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize, Deserialize)]
struct NodeLinkNode {
    id: String,
    country: String,
    column: usize,
    row: usize,
}

#[derive(Serialize, Deserialize)]
struct NodeLinkEdge {
    source: String,
    target: String,
    score: f64,
}

/// The node-link JSON layout read by `networkx.node_link_graph`.
#[derive(Serialize, Deserialize)]
struct NodeLink {
    directed: bool,
    multigraph: bool,
    graph: BTreeMap<String, String>,
    nodes: Vec<NodeLinkNode>,
    links: Vec<NodeLinkEdge>,
}

pub fn to_nodelink(graph: &CorrespondenceGraph) -> String {
    let doc = NodeLink {
        directed: true,
        multigraph: false,
        graph: BTreeMap::new(),
        nodes: graph
            .nodes
            .iter()
            .map(|n| NodeLinkNode {
                id: n.provision_id.clone(),
                country: n.country.clone(),
                column: n.column,
                row: n.row,
            })
            .collect(),
        links: graph
            .edges
            .iter()
            .map(|e| NodeLinkEdge {
                source: e.query_id.clone(),
                target: e.target_id.clone(),
                score: round6(e.score),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("node-link serializes");
    s.push('\n');
    s
}

pub fn parse_nodelink(text: &str) -> Result<CorrespondenceGraph, serde_json::Error> {
    let doc: NodeLink = serde_json::from_str(text)?;
    Ok(CorrespondenceGraph {
        nodes: doc
            .nodes
            .into_iter()
            .map(|n| GraphNode {
                provision_id: n.id,
                country: n.country,
                column: n.column,
                row: n.row,
            })
            .collect(),
        edges: doc
            .links
            .into_iter()
            .map(|l| Edge {
                query_id: l.source,
                target_id: l.target,
                score: l.score,
            })
            .collect(),
    })
}

pub fn render(graph: &CorrespondenceGraph, format: ExportFormat) -> String {
    match format {
        ExportFormat::Graphml => to_graphml(graph),
        ExportFormat::Dot => to_dot(graph),
        ExportFormat::Nodelink => to_nodelink(graph),
    }
}

/// Write `{run_id}.{format}` into `dir` for each format.
pub fn export_graph(
    graph: &CorrespondenceGraph,
    dir: &Path,
    run_id: &str,
    formats: &[ExportFormat],
) -> Result<Vec<PathBuf>, GraphError> {
    let mut written = Vec::new();
    for &f in formats {
        let path = dir.join(format!("{run_id}.{}", f.extension()));
        write_atomic(&path, render(graph, f).as_bytes()).map_err(|source| GraphError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
