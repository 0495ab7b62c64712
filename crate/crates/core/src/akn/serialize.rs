//! Deterministic AKN 3.0 XML writer and the matching reader.
//!
//! The in-memory tree keeps `p` directly under paragraphs and points. On
//! disk the `p` runs are wrapped the way AKN expects: in `<content>` when
//! the element has no sub-provisions, otherwise in `<intro>` (before the
//! first sub-provision) and `<wrapUp>` (after it). The reader unwraps them.

use super::{validate_akn, AknDocument, AknNode, FrbrIdentity, IdentityInputs, Violation, AKN_NAMESPACE};
use crate::xml::{self, Element, XmlWriter};

const AUTHOR: &str = "#lexbridge";

#[derive(Debug, thiserror::Error)]
pub enum AknParseError {
    #[error("malformed XML: {0}")]
    MalformedXml(#[from] xml::XmlError),
    #[error("root element is <{0}>, expected <akomaNtoso>")]
    NotAkomaNtoso(String),
    #[error("root namespace is {0:?}, expected {AKN_NAMESPACE}")]
    Namespace(Option<String>),
    #[error("no document element inside <akomaNtoso>")]
    MissingAct,
    #[error("missing or incomplete meta/identification: {0}")]
    Meta(String),
    #[error("{0}")]
    Identity(#[from] super::IdentityError),
    #[error("FRBR {level} URI `{found}` disagrees with its fields (expected `{expected}`)")]
    UriMismatch {
        level: &'static str,
        found: String,
        expected: String,
    },
}

#[derive(Debug, thiserror::Error)]
#[error("document fails validation with {} violation(s), first: {}", .0.len(), .0[0])]
pub struct ValidationFailed(pub Vec<Violation>);

/// Serialize a valid document. Output is byte-stable: fixed attribute order,
/// two-space indentation, LF line endings.
pub fn serialize_akn(doc: &AknDocument) -> Result<String, ValidationFailed> {
    let report = validate_akn(doc);
    if !report.is_empty() {
        return Err(ValidationFailed(report));
    }
    let id = &doc.identity;
    let mut w = XmlWriter::new();
    w.start("akomaNtoso", &[("xmlns", AKN_NAMESPACE)]);
    w.start(&doc.root.element, &[("name", &id.doc_type)]);
    w.start("meta", &[]);
    w.start("identification", &[("source", AUTHOR)]);

    w.start("FRBRWork", &[]);
    w.empty("FRBRthis", &[("value", &format!("{}/!main", id.work_uri))]);
    w.empty("FRBRuri", &[("value", &id.work_uri)]);
    w.empty("FRBRdate", &[("date", &id.date), ("name", "enactment")]);
    w.empty("FRBRauthor", &[("href", AUTHOR)]);
    w.empty("FRBRcountry", &[("value", &id.country)]);
    w.empty("FRBRnumber", &[("value", &id.number)]);
    w.end("FRBRWork");

    w.start("FRBRExpression", &[]);
    w.empty("FRBRthis", &[("value", &format!("{}/!main", id.expression_uri))]);
    w.empty("FRBRuri", &[("value", &id.expression_uri)]);
    w.empty("FRBRdate", &[("date", &id.version_date), ("name", "version")]);
    w.empty("FRBRauthor", &[("href", AUTHOR)]);
    w.empty("FRBRlanguage", &[("language", &id.language)]);
    w.end("FRBRExpression");

    w.start("FRBRManifestation", &[]);
    w.empty("FRBRthis", &[("value", &id.manifestation_uri)]);
    w.empty("FRBRuri", &[("value", &id.manifestation_uri)]);
    w.empty("FRBRdate", &[("date", &id.version_date), ("name", "generation")]);
    w.empty("FRBRauthor", &[("href", AUTHOR)]);
    w.end("FRBRManifestation");

    w.end("identification");
    w.end("meta");

    if let Some(title) = &doc.title {
        w.start("preface", &[]);
        w.start("longTitle", &[]);
        w.text_element("p", &[], title);
        w.end("longTitle");
        w.end("preface");
    }
    for child in &doc.root.children {
        write_node(&mut w, child);
    }
    w.end(&doc.root.element);
    w.end("akomaNtoso");
    Ok(w.finish())
}

fn write_node(w: &mut XmlWriter, node: &AknNode) {
    if node.element == "p" {
        w.text_element("p", &[], node.text.as_deref().unwrap_or(""));
        return;
    }
    let attrs: Vec<(&str, &str)> = node.eid.iter().map(|e| ("eId", e.as_str())).collect();
    w.start(&node.element, &attrs);
    if let Some(num) = &node.num {
        w.text_element("num", &[], num);
    }
    if let Some(heading) = &node.heading {
        w.text_element("heading", &[], heading);
    }
    let has_sub = node.children.iter().any(|c| c.element != "p");
    let mut i = 0;
    let mut seen_sub = false;
    while i < node.children.len() {
        if node.children[i].element == "p" {
            let start = i;
            while i < node.children.len() && node.children[i].element == "p" {
                i += 1;
            }
            let wrapper = match (has_sub, seen_sub) {
                (false, _) => "content",
                (true, false) => "intro",
                (true, true) => "wrapUp",
            };
            w.start(wrapper, &[]);
            for p in &node.children[start..i] {
                write_node(w, p);
            }
            w.end(wrapper);
        } else {
            seen_sub = true;
            write_node(w, &node.children[i]);
            i += 1;
        }
    }
    w.end(&node.element);
}

/// Elements of the document element that are not part of the body tree.
const SKIPPED_TOP_LEVEL: [&str; 6] = [
    "meta",
    "preface",
    "preamble",
    "conclusions",
    "attachments",
    "components",
];

/// Read an AKN act. Identity comes from `meta/identification`; the tree
/// keeps every element below the document element apart from the
/// wrappers handled by the writer.
pub fn parse_akn(text: &str) -> Result<AknDocument, AknParseError> {
    let root = xml::parse_document(text)?;
    if root.local_name() != "akomaNtoso" {
        return Err(AknParseError::NotAkomaNtoso(root.name.clone()));
    }
    let ns = root.namespace_decl(root.prefix());
    if ns != Some(AKN_NAMESPACE) {
        return Err(AknParseError::Namespace(ns.map(str::to_string)));
    }
    let act = root.elements().next().ok_or(AknParseError::MissingAct)?;
    let identity = read_identity(act)?;
    let title = act
        .child("preface")
        .and_then(|p| p.child("longTitle"))
        .map(|t| t.elements().map(|e| e.text()).collect::<Vec<_>>().join(" "));

    let mut doc_root = AknNode::new(act.local_name());
    for c in act.elements() {
        if !SKIPPED_TOP_LEVEL.contains(&c.local_name()) {
            doc_root.children.push(read_node(c));
        }
    }
    Ok(AknDocument {
        identity,
        title,
        root: doc_root,
    })
}

fn read_identity(act: &Element) -> Result<FrbrIdentity, AknParseError> {
    let ident = act
        .child("meta")
        .and_then(|m| m.child("identification"))
        .ok_or_else(|| AknParseError::Meta("no meta/identification".into()))?;
    let level = |name: &str| {
        ident
            .child(name)
            .ok_or_else(|| AknParseError::Meta(format!("no {name}")))
    };
    let value = |el: &Element, child: &str, attr: &str| {
        el.child(child)
            .and_then(|c| c.attr(attr))
            .map(str::to_string)
            .ok_or_else(|| AknParseError::Meta(format!("no {}/{child}@{attr}", el.local_name())))
    };
    let work = level("FRBRWork")?;
    let expr = level("FRBRExpression")?;
    let manif = level("FRBRManifestation")?;
    let identity = FrbrIdentity::new(&IdentityInputs {
        country: value(work, "FRBRcountry", "value")?,
        date: value(work, "FRBRdate", "date")?,
        number: value(work, "FRBRnumber", "value")?,
        language: value(expr, "FRBRlanguage", "language")?,
        version_date: value(expr, "FRBRdate", "date")?,
    })?;
    for (name, el, expected) in [
        ("work", work, &identity.work_uri),
        ("expression", expr, &identity.expression_uri),
        ("manifestation", manif, &identity.manifestation_uri),
    ] {
        let found = value(el, "FRBRuri", "value")?;
        if &found != expected {
            return Err(AknParseError::UriMismatch {
                level: name,
                found,
                expected: expected.clone(),
            });
        }
    }
    Ok(identity)
}

fn read_node(el: &Element) -> AknNode {
    let mut node = AknNode::new(el.local_name());
    if node.element == "p" {
        node.text = Some(el.text());
        return node;
    }
    node.eid = el.attr("eId").map(str::to_string);
    read_children(el, &mut node);
    node
}

fn read_children(el: &Element, node: &mut AknNode) {
    for c in el.elements() {
        match c.local_name() {
            "num" => node.num = Some(c.text()),
            "heading" => node.heading = Some(c.text()),
            "content" | "intro" | "wrapUp" | "blockList" | "list" => read_children(c, node),
            _ => node.children.push(read_node(c)),
        }
    }
}
