//! Minimal owned XML element tree on top of `quick-xml`.
//!
//! The JLS, AKN and GraphML readers all work on this tree rather than on the
//! raw event stream.

use quick_xml::escape::{escape, partial_escape};
use quick_xml::events::Event;
use quick_xml::Reader;

#[derive(Debug, thiserror::Error)]
#[error("malformed XML at byte {position}: {message}")]
pub struct XmlError {
    pub position: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum XmlNode {
    Element(Element),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Element {
    /// Qualified name as written, including any namespace prefix.
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<XmlNode>,
}

impl Element {
    /// Name without namespace prefix.
    pub fn local_name(&self) -> &str {
        local(&self.name)
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|c| match c {
            XmlNode::Element(e) => Some(e),
            XmlNode::Text(_) => None,
        })
    }

    pub fn child(&self, local_name: &str) -> Option<&Element> {
        self.elements().find(|e| e.local_name() == local_name)
    }

    /// All descendant text in document order, skipping subtrees whose local
    /// name is in `skip`.
    pub fn text_skipping(&self, skip: &[&str]) -> String {
        let mut out = String::new();
        collect_text(self, skip, &mut out);
        out
    }

    pub fn text(&self) -> String {
        self.text_skipping(&[])
    }

    /// Namespace URI bound to `prefix` (empty prefix for the default
    /// namespace) on this element.
    pub fn namespace_decl(&self, prefix: &str) -> Option<&str> {
        if prefix.is_empty() {
            self.attr("xmlns")
        } else {
            self.attr(&format!("xmlns:{prefix}"))
        }
    }

    pub fn prefix(&self) -> &str {
        self.name.split_once(':').map(|(p, _)| p).unwrap_or("")
    }
}

fn collect_text(el: &Element, skip: &[&str], out: &mut String) {
    for c in &el.children {
        match c {
            XmlNode::Text(t) => out.push_str(t),
            XmlNode::Element(e) if !skip.contains(&e.local_name()) => collect_text(e, skip, out),
            XmlNode::Element(_) => {}
        }
    }
}

pub fn local(name: &str) -> &str {
    name.rsplit_once(':').map(|(_, l)| l).unwrap_or(name)
}

/// Parse a document and return its root element.
pub fn parse_document(text: &str) -> Result<Element, XmlError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().check_end_names = true;

    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;

    let err = |reader: &Reader<&[u8]>, message: String| XmlError {
        position: reader.buffer_position(),
        message,
    };

    loop {
        let event = reader.read_event().map_err(|e| err(&reader, e.to_string()))?;
        match event {
            Event::Start(start) => {
                let el = start_element(&start).map_err(|m| err(&reader, m))?;
                stack.push(el);
            }
            Event::Empty(start) => {
                let el = start_element(&start).map_err(|m| err(&reader, m))?;
                attach(&mut stack, &mut root, el).map_err(|m| err(&reader, m))?;
            }
            Event::End(_) => {
                let el = stack.pop().ok_or_else(|| err(&reader, "unbalanced end tag".into()))?;
                attach(&mut stack, &mut root, el).map_err(|m| err(&reader, m))?;
            }
            Event::Text(t) => {
                let s = t.unescape().map_err(|e| err(&reader, e.to_string()))?;
                push_text(&mut stack, &root, &s).map_err(|m| err(&reader, m))?;
            }
            Event::CData(c) => {
                let s = String::from_utf8(c.into_inner().into_owned()).map_err(|e| err(&reader, e.to_string()))?;
                push_text(&mut stack, &root, &s).map_err(|m| err(&reader, m))?;
            }
            Event::Eof => break,
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
        }
    }
    if !stack.is_empty() {
        return Err(err(
            &reader,
            format!("unclosed element <{}>", stack[stack.len() - 1].name),
        ));
    }
    root.ok_or_else(|| err(&reader, "document has no root element".into()))
}

fn start_element(start: &quick_xml::events::BytesStart<'_>) -> Result<Element, String> {
    let name = String::from_utf8(start.name().as_ref().to_vec()).map_err(|e| e.to_string())?;
    let mut attrs = Vec::new();
    for a in start.attributes() {
        let a = a.map_err(|e| e.to_string())?;
        let key = String::from_utf8(a.key.as_ref().to_vec()).map_err(|e| e.to_string())?;
        let value = a.unescape_value().map_err(|e| e.to_string())?.into_owned();
        attrs.push((key, value));
    }
    Ok(Element {
        name,
        attrs,
        children: Vec::new(),
    })
}

fn attach(stack: &mut [Element], root: &mut Option<Element>, el: Element) -> Result<(), String> {
    match stack.last_mut() {
        Some(parent) => {
            parent.children.push(XmlNode::Element(el));
            Ok(())
        }
        None if root.is_none() => {
            *root = Some(el);
            Ok(())
        }
        None => Err("more than one root element".into()),
    }
}

fn push_text(stack: &mut [Element], root: &Option<Element>, s: &str) -> Result<(), String> {
    match stack.last_mut() {
        Some(parent) => {
            if let Some(XmlNode::Text(prev)) = parent.children.last_mut() {
                prev.push_str(s);
            } else {
                parent.children.push(XmlNode::Text(s.to_string()));
            }
            Ok(())
        }
        None if s.trim().is_empty() => Ok(()),
        None if root.is_some() => Err("text after root element".into()),
        None => Err("text before root element".into()),
    }
}

/// Indented writer producing LF line endings and two-space indentation.
#[derive(Default)]
pub struct XmlWriter {
    out: String,
    depth: usize,
}

impl XmlWriter {
    pub fn new() -> Self {
        let mut w = Self::default();
        w.out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        w
    }

    fn indent(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    fn open_tag(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            self.out.push(' ');
            self.out.push_str(k);
            self.out.push_str("=\"");
            self.out.push_str(&escape(v));
            self.out.push('"');
        }
    }

    pub fn start(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.indent();
        self.open_tag(name, attrs);
        self.out.push_str(">\n");
        self.depth += 1;
    }

    pub fn end(&mut self, name: &str) {
        self.depth -= 1;
        self.indent();
        self.out.push_str("</");
        self.out.push_str(name);
        self.out.push_str(">\n");
    }

    pub fn empty(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.indent();
        self.open_tag(name, attrs);
        self.out.push_str("/>\n");
    }

    pub fn text_element(&mut self, name: &str, attrs: &[(&str, &str)], text: &str) {
        self.indent();
        self.open_tag(name, attrs);
        self.out.push('>');
        self.out.push_str(&partial_escape(text));
        self.out.push_str("</");
        self.out.push_str(name);
        self.out.push_str(">\n");
    }

    pub fn finish(self) -> String {
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_elements_and_text() {
        let root = parse_document("<a x=\"1\"><b>hi &amp; bye</b><c/>tail</a>").unwrap();
        assert_eq!(root.name, "a");
        assert_eq!(root.attr("x"), Some("1"));
        assert_eq!(root.child("b").unwrap().text(), "hi & bye");
        assert_eq!(root.text(), "hi & byetail");
    }

    #[test]
    fn rejects_mismatched_tags() {
        assert!(parse_document("<a><b></a>").is_err());
        assert!(parse_document("<a>").is_err());
        assert!(parse_document("").is_err());
        assert!(parse_document("<a/><b/>").is_err());
    }

    #[test]
    fn writer_escapes_and_indents() {
        let mut w = XmlWriter::new();
        w.start("r", &[("k", "a\"<")]);
        w.text_element("t", &[], "x < y");
        w.end("r");
        let s = w.finish();
        assert!(s.contains("<r k=\"a&quot;&lt;\">\n  <t>x &lt; y</t>\n</r>\n"));
        let back = parse_document(&s).unwrap();
        assert_eq!(back.attr("k"), Some("a\"<"));
        assert_eq!(back.child("t").unwrap().text(), "x < y");
    }
}
