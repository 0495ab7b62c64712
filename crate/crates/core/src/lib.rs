//! Cross-jurisdiction legal provision linking: JLS to Akoma Ntoso
//! conversion, provision corpora, embedding retrieval, reranking and the
//! tripartite correspondence graph.

mod xml;

pub mod akn;
pub mod corpus;
pub mod embedding;
pub mod fsio;
pub mod graph;
pub mod jls;
pub mod pipeline;
pub mod rerank;
pub mod retrieval;
