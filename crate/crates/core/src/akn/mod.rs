//! Akoma Ntoso documents: conversion from JLS, structural validation and
//! XML serialization.

mod frbr;
mod rules;
mod serialize;
mod validate;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::jls::{self, JlsDocument, JlsKind, JlsNode, StructuralIssue};

pub use frbr::{normalize_number, FrbrIdentity, IdentityError, IdentityInputs};
pub use rules::{MappingRule, MappingTable, NumRecipe, RuleTableError};
pub use serialize::{parse_akn, serialize_akn, AknParseError, ValidationFailed};
pub use validate::{eid_is_well_formed, validate_akn, ValidationReport, Violation, ViolationKind};

pub const AKN_NAMESPACE: &str = "http://docs.oasis-open.org/legaldocml/ns/akn/3.0";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AknNode {
    pub element: String,
    pub eid: Option<String>,
    pub num: Option<String>,
    pub heading: Option<String>,
    /// Only set on `p`.
    pub text: Option<String>,
    pub children: Vec<AknNode>,
}

impl AknNode {
    pub fn new(element: impl Into<String>) -> Self {
        AknNode {
            element: element.into(),
            eid: None,
            num: None,
            heading: None,
            text: None,
            children: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(AknNode::node_count).sum::<usize>()
    }

    /// Pre-order walk over this subtree.
    pub fn walk(&self) -> Vec<&AknNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AknDocument {
    pub identity: FrbrIdentity,
    pub title: Option<String>,
    /// The `act` element; its only child is `body`.
    pub root: AknNode,
}

impl AknDocument {
    pub fn body(&self) -> Option<&AknNode> {
        self.root.children.iter().find(|c| c.element == "body")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConvertError {
    #[error("no mapping rule for {0}")]
    UnmappedKind(JlsKind),
    #[error("invalid identity: {0}")]
    InvalidIdentity(#[from] IdentityError),
    #[error("source hierarchy has {} issue(s), first: {}", .0.len(), .0[0])]
    InvalidHierarchy(Vec<StructuralIssue>),
}

struct Draft {
    node: AknNode,
    prefix: Option<String>,
    /// Source label used for the eId segment.
    label: Option<String>,
    children: Vec<Draft>,
}

/// Convert a validated JLS law into an AKN act using `rules`.
pub fn convert(
    doc: &JlsDocument,
    identity_inputs: &IdentityInputs,
    rules: &MappingTable,
) -> Result<AknDocument, ConvertError> {
    let issues = jls::validate_hierarchy(doc);
    if !issues.is_empty() {
        return Err(ConvertError::InvalidHierarchy(issues));
    }
    let identity = FrbrIdentity::new(identity_inputs)?;
    let mut drafts = map_node(&doc.root, None, rules)?;
    // The Law rule has no prefix and no parent, so it always yields one draft.
    let mut root = drafts.remove(0);
    let mut used = HashSet::new();
    root.children.iter_mut().for_each(|c| assign_eids(c, None, &mut used));
    Ok(AknDocument {
        identity,
        title: (!doc.law_title.is_empty()).then(|| doc.law_title.clone()),
        root: finish(root),
    })
}

fn map_node(node: &JlsNode, parent_target: Option<&str>, rules: &MappingTable) -> Result<Vec<Draft>, ConvertError> {
    let rule = rules.get(node.kind).ok_or(ConvertError::UnmappedKind(node.kind))?;
    let target = rule.target_element.as_str();
    let merged = rule.eid_prefix.is_none() && parent_target == Some(target);

    let mut children = Vec::new();
    for c in &node.children {
        children.extend(map_node(c, Some(target), rules)?);
    }
    if merged {
        return Ok(children);
    }
    let mut out = AknNode::new(target);
    out.heading = node.title.clone();
    out.text = node.text.clone();
    if rule.num_attr_recipe == NumRecipe::NumChild {
        out.num = node.num.clone();
    }
    Ok(vec![Draft {
        node: out,
        prefix: rule.eid_prefix.clone(),
        label: node.num.clone(),
        children,
    }])
}

/// eId segments use only letters, digits, `_` and `-`.
fn eid_label(raw: &str) -> String {
    raw.chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// eIds are `{prefix}_{label}` segments joined to the nearest numbered
/// ancestor. A segment that would repeat an eId already given out gets a
/// `-2`, `-3`, ... suffix.
fn assign_eids(draft: &mut Draft, parent_eid: Option<&str>, used: &mut HashSet<String>) {
    let own = draft.node.eid.clone();
    let base = own.as_deref().or(parent_eid).map(str::to_string);
    let mut positions: HashMap<String, usize> = HashMap::new();
    for child in &mut draft.children {
        if let Some(prefix) = child.prefix.clone() {
            let pos = positions.entry(prefix.clone()).or_insert(0);
            *pos += 1;
            let label = child
                .label
                .as_deref()
                .map(eid_label)
                .filter(|l| !l.is_empty())
                .unwrap_or_else(|| pos.to_string());
            let join = |segment: String| match &base {
                Some(b) => format!("{b}.{segment}"),
                None => segment,
            };
            let mut eid = join(format!("{prefix}_{label}"));
            let mut n = 1;
            while used.contains(&eid) {
                n += 1;
                eid = join(format!("{prefix}_{label}-{n}"));
            }
            used.insert(eid.clone());
            child.node.eid = Some(eid);
        }
        assign_eids(child, base.as_deref(), used);
    }
}

fn finish(draft: Draft) -> AknNode {
    let mut node = draft.node;
    node.children = draft.children.into_iter().map(finish).collect();
    node
}
