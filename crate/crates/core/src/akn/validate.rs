//! Structural checks standing in for full LegalDocML schema validation:
//! eId uniqueness and grammar, element nesting, and identity URIs.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use regex::Regex;

use super::{AknDocument, AknNode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    DuplicateEid(String),
    MalformedEid(String),
    MissingEid,
    /// `p`, `act` and `body` carry no eId.
    UnexpectedEid(String),
    Nesting {
        parent: String,
        child: String,
    },
    RootElement(String),
    /// `act` must contain exactly one `body`.
    BodyCount(usize),
    Identity(String),
    TextOutsideP,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Slash-separated element path, with the eId where one exists.
    pub path: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.path)?;
        match &self.kind {
            ViolationKind::DuplicateEid(e) => write!(f, "duplicate eId {e}"),
            ViolationKind::MalformedEid(e) => write!(f, "malformed eId {e}"),
            ViolationKind::MissingEid => write!(f, "structural element without eId"),
            ViolationKind::UnexpectedEid(e) => write!(f, "unexpected eId {e}"),
            ViolationKind::Nesting { parent, child } => write!(f, "<{child}> inside <{parent}>"),
            ViolationKind::RootElement(e) => write!(f, "root element <{e}> is not <act>"),
            ViolationKind::BodyCount(n) => write!(f, "expected one <body>, found {n}"),
            ViolationKind::Identity(msg) => write!(f, "identity: {msg}"),
            ViolationKind::TextOutsideP => write!(f, "text outside <p>"),
        }
    }
}

pub type ValidationReport = Vec<Violation>;

const CONTAINERS: [&str; 4] = ["part", "chapter", "section", "article"];

fn allowed_children(parent: &str) -> &'static [&'static str] {
    match parent {
        "act" => &["body"],
        "body" | "part" | "chapter" | "section" => &CONTAINERS,
        "article" => &["paragraph"],
        "paragraph" | "point" => &["point", "p"],
        _ => &[],
    }
}

fn needs_eid(element: &str) -> bool {
    !matches!(element, "act" | "body" | "p")
}

fn eid_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[a-z]+_[\p{L}\p{N}_-]+(\.[a-z]+_[\p{L}\p{N}_-]+)*$").expect("eId regex"))
}

/// `prefix_num` segments joined by dots, e.g. `art_5.para_2.point_1`.
pub fn eid_is_well_formed(eid: &str) -> bool {
    eid_regex().is_match(eid)
}

pub fn validate_akn(doc: &AknDocument) -> ValidationReport {
    let mut report = Vec::new();
    for problem in doc.identity.uri_problems() {
        report.push(Violation {
            path: "meta/identification".into(),
            kind: ViolationKind::Identity(problem),
        });
    }
    if doc.root.element != "act" {
        report.push(Violation {
            path: doc.root.element.clone(),
            kind: ViolationKind::RootElement(doc.root.element.clone()),
        });
    }
    let bodies = doc.root.children.iter().filter(|c| c.element == "body").count();
    if bodies != 1 {
        report.push(Violation {
            path: doc.root.element.clone(),
            kind: ViolationKind::BodyCount(bodies),
        });
    }
    let mut seen = HashSet::new();
    check(&doc.root, &doc.root.element, &mut seen, &mut report);
    report
}

fn check<'a>(node: &'a AknNode, path: &str, seen: &mut HashSet<&'a str>, report: &mut ValidationReport) {
    let violation = |kind| Violation {
        path: path.to_string(),
        kind,
    };
    match (&node.eid, needs_eid(&node.element)) {
        (Some(e), true) => {
            if !eid_is_well_formed(e) {
                report.push(violation(ViolationKind::MalformedEid(e.clone())));
            }
            if !seen.insert(e.as_str()) {
                report.push(violation(ViolationKind::DuplicateEid(e.clone())));
            }
        }
        (None, true) => report.push(violation(ViolationKind::MissingEid)),
        (Some(e), false) => report.push(violation(ViolationKind::UnexpectedEid(e.clone()))),
        (None, false) => {}
    }
    if node.text.is_some() && node.element != "p" {
        report.push(violation(ViolationKind::TextOutsideP));
    }
    let allowed = allowed_children(&node.element);
    for child in &node.children {
        let child_path = match &child.eid {
            Some(e) => format!("{path}/{}[{e}]", child.element),
            None => format!("{path}/{}", child.element),
        };
        if !allowed.contains(&child.element.as_str()) {
            report.push(Violation {
                path: child_path.clone(),
                kind: ViolationKind::Nesting {
                    parent: node.element.clone(),
                    child: child.element.clone(),
                },
            });
        }
        check(child, &child_path, seen, report);
    }
}
