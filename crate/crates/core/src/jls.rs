//! Reader for Japanese Legal Standard (e-LAWS) statute XML.
//!
//! Only the hierarchy needed downstream is kept: the law wrapper, the body,
//! structural containers (part, chapter, section), articles, paragraphs,
//! items and sentences. Labels such as `ArticleTitle` or `ParagraphNum` are
//! dropped because the `Num` attribute already carries the number, and
//! wrappers like `ParagraphSentence` are flattened. Anything else is skipped
//! and reported as a [`Warning`].

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::xml::{self, Element, XmlNode, XmlWriter};

#[derive(Debug, thiserror::Error)]
pub enum JlsError {
    #[error("malformed XML: {0}")]
    MalformedXml(#[from] xml::XmlError),
    #[error("no <Law> root element (found <{0}>)")]
    MissingRoot(String),
    #[error("law contains no Article")]
    EmptyBody,
    #[error("law has neither a LawNum element nor a Num attribute")]
    MissingLawNum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JlsKind {
    Law,
    LawBody,
    MainProvision,
    Part,
    Chapter,
    Section,
    Article,
    Paragraph,
    Item,
    Sentence,
}

impl JlsKind {
    pub const ALL: [JlsKind; 10] = [
        JlsKind::Law,
        JlsKind::LawBody,
        JlsKind::MainProvision,
        JlsKind::Part,
        JlsKind::Chapter,
        JlsKind::Section,
        JlsKind::Article,
        JlsKind::Paragraph,
        JlsKind::Item,
        JlsKind::Sentence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            JlsKind::Law => "Law",
            JlsKind::LawBody => "LawBody",
            JlsKind::MainProvision => "MainProvision",
            JlsKind::Part => "Part",
            JlsKind::Chapter => "Chapter",
            JlsKind::Section => "Section",
            JlsKind::Article => "Article",
            JlsKind::Paragraph => "Paragraph",
            JlsKind::Item => "Item",
            JlsKind::Sentence => "Sentence",
        }
    }

    pub fn from_name(name: &str) -> Option<JlsKind> {
        JlsKind::ALL.into_iter().find(|k| k.name() == name)
    }

    fn is_container(self) -> bool {
        matches!(self, JlsKind::Part | JlsKind::Chapter | JlsKind::Section)
    }

    /// Kinds that occur at most once per law and are left unindexed in paths.
    fn is_singular(self) -> bool {
        matches!(self, JlsKind::Law | JlsKind::LawBody | JlsKind::MainProvision)
    }

    fn allows_child(self, child: JlsKind) -> bool {
        use JlsKind::*;
        match self {
            Law => child == LawBody,
            LawBody => child == MainProvision || child.is_container() || child == Article,
            MainProvision | Part | Chapter | Section => child.is_container() || child == Article,
            Article => child == Paragraph,
            Paragraph => matches!(child, Item | Sentence),
            Item => matches!(child, Item | Sentence),
            Sentence => false,
        }
    }

    /// JLS element carrying this kind's heading.
    fn title_element(self) -> Option<&'static str> {
        match self {
            JlsKind::Part => Some("PartTitle"),
            JlsKind::Chapter => Some("ChapterTitle"),
            JlsKind::Section => Some("SectionTitle"),
            JlsKind::Article => Some("ArticleCaption"),
            JlsKind::Paragraph => Some("ParagraphCaption"),
            _ => None,
        }
    }
}

impl fmt::Display for JlsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JlsNode {
    pub kind: JlsKind,
    pub num: Option<String>,
    pub title: Option<String>,
    pub children: Vec<JlsNode>,
    pub text: Option<String>,
}

impl JlsNode {
    pub fn new(kind: JlsKind) -> Self {
        JlsNode {
            kind,
            num: None,
            title: None,
            children: Vec::new(),
            text: None,
        }
    }

    pub fn sentence(text: impl Into<String>) -> Self {
        JlsNode {
            text: Some(text.into()),
            ..JlsNode::new(JlsKind::Sentence)
        }
    }

    pub fn with_num(mut self, num: impl Into<String>) -> Self {
        self.num = Some(num.into());
        self
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    pub fn with_children(mut self, children: Vec<JlsNode>) -> Self {
        self.children = children;
        self
    }

    /// Number of nodes in this subtree, including `self`.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(JlsNode::node_count).sum::<usize>()
    }

    pub fn count_kind(&self, kind: JlsKind) -> usize {
        usize::from(self.kind == kind) + self.children.iter().map(|c| c.count_kind(kind)).sum::<usize>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Era {
    Meiji,
    Taisho,
    Showa,
    Heisei,
    Reiwa,
}

impl Era {
    fn from_attr(s: &str) -> Option<Era> {
        match s {
            "Meiji" => Some(Era::Meiji),
            "Taisho" => Some(Era::Taisho),
            "Showa" => Some(Era::Showa),
            "Heisei" => Some(Era::Heisei),
            "Reiwa" => Some(Era::Reiwa),
            _ => None,
        }
    }

    fn attr(self) -> &'static str {
        match self {
            Era::Meiji => "Meiji",
            Era::Taisho => "Taisho",
            Era::Showa => "Showa",
            Era::Heisei => "Heisei",
            Era::Reiwa => "Reiwa",
        }
    }

    /// Gregorian year of the era's first year.
    pub fn first_year(self) -> i32 {
        match self {
            Era::Meiji => 1868,
            Era::Taisho => 1912,
            Era::Showa => 1926,
            Era::Heisei => 1989,
            Era::Reiwa => 2019,
        }
    }
}

/// Promulgation date as recorded on the `<Law>` element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Promulgation {
    pub era: Era,
    pub year: u32,
    pub month: u32,
    pub day: u32,
}

impl Promulgation {
    pub fn to_date(self) -> Option<chrono::NaiveDate> {
        let year = self.era.first_year() + self.year as i32 - 1;
        chrono::NaiveDate::from_ymd_opt(year, self.month, self.day)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JlsDocument {
    pub law_title: String,
    /// Official law number, e.g. `明治二十九年法律第八十九号`.
    pub law_num: String,
    pub language: String,
    /// `Num` attribute of `<Law>`, the short numeric law number.
    pub number: Option<String>,
    pub promulgation: Option<Promulgation>,
    pub root: JlsNode,
}

/// An element the reader did not understand and dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub path: String,
    pub element: String,
}

impl Warning {
    /// Diagnostic line in the `WARN <file>:<path> skipped element <name>` form.
    pub fn render(&self, file: &str) -> String {
        format!("WARN {file}:{} skipped element {}", self.path, self.element)
    }
}

#[derive(Debug, Clone)]
pub struct ParsedLaw {
    pub document: JlsDocument,
    pub warnings: Vec<Warning>,
}

/// Elements whose content is folded into the enclosing node.
fn is_transparent(name: &str) -> bool {
    matches!(name, "ParagraphSentence" | "ItemSentence" | "Column")
        || subitem_depth(name.strip_suffix("Sentence").unwrap_or("")).is_some()
}

/// Label elements already represented by the `Num` attribute.
fn is_label(name: &str) -> bool {
    matches!(name, "ArticleTitle" | "ParagraphNum" | "ItemTitle")
        || subitem_depth(name.strip_suffix("Title").unwrap_or("")).is_some()
}

fn subitem_depth(name: &str) -> Option<u32> {
    name.strip_prefix("Subitem")?.parse().ok()
}

fn element_kind(name: &str) -> Option<JlsKind> {
    match name {
        "MainProvision" => Some(JlsKind::MainProvision),
        "Part" => Some(JlsKind::Part),
        "Chapter" => Some(JlsKind::Chapter),
        "Section" => Some(JlsKind::Section),
        "Article" => Some(JlsKind::Article),
        "Paragraph" => Some(JlsKind::Paragraph),
        "Item" => Some(JlsKind::Item),
        "Sentence" => Some(JlsKind::Sentence),
        _ if subitem_depth(name).is_some() => Some(JlsKind::Item),
        _ => None,
    }
}

/// Path segment of the `index`-th (1-based) child of `kind` under its parent.
fn segment(kind: JlsKind, index: usize) -> String {
    if kind.is_singular() {
        kind.name().to_string()
    } else {
        format!("{}[{index}]", kind.name())
    }
}

struct Builder {
    warnings: Vec<Warning>,
}

impl Builder {
    fn node(&mut self, el: &Element, kind: JlsKind, path: &str) -> JlsNode {
        let mut node = JlsNode::new(kind);
        node.num = el.attr("Num").map(str::to_string);
        if kind == JlsKind::Sentence {
            node.text = Some(el.text_skipping(&["Rt"]).trim().to_string());
            return node;
        }
        let mut loose_text = String::new();
        let mut loose_at = None;
        self.children_into(el, &mut node, path, &mut loose_text, &mut loose_at);
        let loose = loose_text.trim();
        if !loose.is_empty() {
            let at = loose_at.unwrap_or(node.children.len());
            node.children.insert(at, JlsNode::sentence(loose));
        }
        node
    }

    fn children_into(
        &mut self,
        el: &Element,
        node: &mut JlsNode,
        path: &str,
        loose_text: &mut String,
        loose_at: &mut Option<usize>,
    ) {
        for child in &el.children {
            match child {
                XmlNode::Text(t) => {
                    if !t.trim().is_empty() {
                        loose_at.get_or_insert(node.children.len());
                        if !loose_text.is_empty() {
                            loose_text.push(' ');
                        }
                        loose_text.push_str(t.trim());
                    }
                }
                XmlNode::Element(c) => {
                    let name = c.local_name();
                    if Some(name) == node.kind.title_element() {
                        node.title = Some(c.text_skipping(&["Rt"]).trim().to_string());
                    } else if let Some(kind) = element_kind(name) {
                        let index = 1 + node.children.iter().filter(|n| n.kind == kind).count();
                        let child_path = format!("{path}/{}", segment(kind, index));
                        let built = self.node(c, kind, &child_path);
                        node.children.push(built);
                    } else if is_transparent(name) {
                        self.children_into(c, node, path, loose_text, loose_at);
                    } else if is_label(name) {
                    } else {
                        self.warnings.push(Warning {
                            path: path.to_string(),
                            element: name.to_string(),
                        });
                    }
                }
            }
        }
    }
}

/// Parse one JLS law.
pub fn parse_jls(xml_text: &str) -> Result<ParsedLaw, JlsError> {
    let root = xml::parse_document(xml_text)?;
    if root.local_name() != "Law" {
        return Err(JlsError::MissingRoot(root.name.clone()));
    }
    let mut builder = Builder { warnings: Vec::new() };

    let law_num_text = root
        .child("LawNum")
        .map(|e| e.text().trim().to_string())
        .filter(|s| !s.is_empty());
    let number = root.attr("Num").map(|s| s.trim().to_string()).filter(|s| !s.is_empty());

    let body_el = root.child("LawBody");
    let mut body = JlsNode::new(JlsKind::LawBody);
    let mut law_title = String::new();
    match body_el {
        Some(b) => {
            for c in root.elements() {
                if !matches!(c.local_name(), "LawBody" | "LawNum") {
                    builder.warnings.push(Warning {
                        path: "Law".into(),
                        element: c.local_name().to_string(),
                    });
                }
            }
            if let Some(t) = b.child("LawTitle") {
                law_title = t.text_skipping(&["Rt"]).trim().to_string();
            }
            let filtered = without(b, &["LawTitle"]);
            body = builder.node(&filtered, JlsKind::LawBody, "Law/LawBody");
        }
        None => {
            // Content directly under <Law> is treated as an implicit body.
            let filtered = without(&root, &["LawNum", "LawTitle"]);
            if let Some(t) = root.child("LawTitle") {
                law_title = t.text_skipping(&["Rt"]).trim().to_string();
            }
            body.children = builder.node(&filtered, JlsKind::LawBody, "Law/LawBody").children;
        }
    }

    let mut law = JlsNode::new(JlsKind::Law);
    law.children.push(body);
    if law.count_kind(JlsKind::Article) == 0 {
        return Err(JlsError::EmptyBody);
    }
    let law_num = law_num_text.or_else(|| number.clone()).ok_or(JlsError::MissingLawNum)?;

    let promulgation = (|| {
        Some(Promulgation {
            era: Era::from_attr(root.attr("Era")?)?,
            year: root.attr("Year")?.trim().parse().ok()?,
            month: root.attr("PromulgateMonth")?.trim().parse().ok()?,
            day: root.attr("PromulgateDay")?.trim().parse().ok()?,
        })
    })();

    Ok(ParsedLaw {
        document: JlsDocument {
            law_title,
            law_num,
            language: root.attr("Lang").unwrap_or("ja").to_string(),
            number,
            promulgation,
            root: law,
        },
        warnings: builder.warnings,
    })
}

fn without(el: &Element, names: &[&str]) -> Element {
    Element {
        name: el.name.clone(),
        attrs: el.attrs.clone(),
        children: el
            .children
            .iter()
            .filter(|c| !matches!(c, XmlNode::Element(e) if names.contains(&e.local_name())))
            .cloned()
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IssueRule {
    /// `child` may not appear directly under `parent`.
    ChildKind {
        parent: JlsKind,
        child: JlsKind,
    },
    DuplicateLabel(String),
    TextOutsideSentence,
    RootNotLaw,
    BodyCount(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralIssue {
    pub path: String,
    pub rule: IssueRule,
}

impl fmt::Display for StructuralIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            IssueRule::ChildKind { parent, child } => {
                write!(f, "{}: {child} is not allowed inside {parent}", self.path)
            }
            IssueRule::DuplicateLabel(num) => {
                write!(f, "{}: duplicate sibling num \"{num}\"", self.path)
            }
            IssueRule::TextOutsideSentence => write!(f, "{}: text outside a Sentence", self.path),
            IssueRule::RootNotLaw => write!(f, "{}: root is not Law", self.path),
            IssueRule::BodyCount(n) => write!(f, "{}: expected one LawBody, found {n}", self.path),
        }
    }
}

/// Check the tree invariants: child-kind legality, unique sibling labels and
/// text only in sentences.
pub fn validate_hierarchy(doc: &JlsDocument) -> Vec<StructuralIssue> {
    let mut issues = Vec::new();
    let root = &doc.root;
    if root.kind != JlsKind::Law {
        issues.push(StructuralIssue {
            path: root.kind.name().into(),
            rule: IssueRule::RootNotLaw,
        });
    }
    let bodies = root.children.iter().filter(|c| c.kind == JlsKind::LawBody).count();
    if root.kind == JlsKind::Law && bodies != 1 {
        issues.push(StructuralIssue {
            path: "Law".into(),
            rule: IssueRule::BodyCount(bodies),
        });
    }
    check_node(root, &segment(root.kind, 1), &mut issues);
    issues
}

fn check_node(node: &JlsNode, path: &str, issues: &mut Vec<StructuralIssue>) {
    if node.kind != JlsKind::Sentence && node.text.is_some() {
        issues.push(StructuralIssue {
            path: path.to_string(),
            rule: IssueRule::TextOutsideSentence,
        });
    }
    let mut seen = HashSet::new();
    let mut counters = std::collections::HashMap::new();
    for child in &node.children {
        let index = counters.entry(child.kind).or_insert(0usize);
        *index += 1;
        let child_path = format!("{path}/{}", segment(child.kind, *index));
        if !node.kind.allows_child(child.kind) {
            issues.push(StructuralIssue {
                path: child_path.clone(),
                rule: IssueRule::ChildKind {
                    parent: node.kind,
                    child: child.kind,
                },
            });
        }
        if let Some(num) = &child.num {
            if !seen.insert((child.kind, num.as_str())) {
                issues.push(StructuralIssue {
                    path: child_path.clone(),
                    rule: IssueRule::DuplicateLabel(num.clone()),
                });
            }
        }
        check_node(child, &child_path, issues);
    }
}

impl JlsDocument {
    /// Canonical JLS XML for this tree. Parsing the output yields an equal
    /// document.
    pub fn to_xml(&self) -> String {
        let mut w = XmlWriter::new();
        let mut attrs: Vec<(&str, String)> = Vec::new();
        if let Some(p) = self.promulgation {
            attrs.push(("Era", p.era.attr().to_string()));
            attrs.push(("Year", p.year.to_string()));
            attrs.push(("PromulgateMonth", p.month.to_string()));
            attrs.push(("PromulgateDay", p.day.to_string()));
        }
        if let Some(n) = &self.number {
            attrs.push(("Num", n.clone()));
        }
        attrs.push(("Lang", self.language.clone()));
        let attr_refs: Vec<(&str, &str)> = attrs.iter().map(|(k, v)| (*k, v.as_str())).collect();
        w.start("Law", &attr_refs);
        w.text_element("LawNum", &[], &self.law_num);
        for body in &self.root.children {
            w.start(body.kind.name(), &[]);
            if body.kind == JlsKind::LawBody && !self.law_title.is_empty() {
                w.text_element("LawTitle", &[], &self.law_title);
            }
            for c in &body.children {
                write_node(&mut w, c, 0);
            }
            w.end(body.kind.name());
        }
        w.end("Law");
        w.finish()
    }
}

fn write_node(w: &mut XmlWriter, node: &JlsNode, item_depth: u32) {
    let name = match node.kind {
        JlsKind::Item if item_depth > 0 => format!("Subitem{item_depth}"),
        k => k.name().to_string(),
    };
    let attrs: Vec<(&str, &str)> = node.num.iter().map(|n| ("Num", n.as_str())).collect();
    if node.kind == JlsKind::Sentence {
        w.text_element(&name, &attrs, node.text.as_deref().unwrap_or(""));
        return;
    }
    w.start(&name, &attrs);
    if let (Some(title), Some(el)) = (&node.title, node.kind.title_element()) {
        w.text_element(el, &[], title);
    }
    let depth = if node.kind == JlsKind::Item {
        item_depth + 1
    } else {
        item_depth
    };
    for c in &node.children {
        write_node(w, c, depth);
    }
    w.end(&name);
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"<Law Era="Meiji" Year="29" Num="89" PromulgateMonth="4" PromulgateDay="27" Lang="ja">
  <LawNum>明治二十九年法律第八十九号</LawNum>
  <LawBody>
    <LawTitle>民法</LawTitle>
    <Article Num="1"><Paragraph Num="1"><ParagraphSentence><Sentence Num="1">X</Sentence></ParagraphSentence></Paragraph></Article>
  </LawBody>
</Law>"#;

    #[test]
    fn minimal_law_has_five_nodes() {
        let parsed = parse_jls(MINIMAL).unwrap();
        let doc = parsed.document;
        assert!(parsed.warnings.is_empty());
        assert_eq!(doc.root.node_count(), 5);
        let body = &doc.root.children[0];
        assert_eq!(body.kind, JlsKind::LawBody);
        let sentence = &body.children[0].children[0].children[0];
        assert_eq!(sentence.kind, JlsKind::Sentence);
        assert_eq!(sentence.text.as_deref(), Some("X"));
        assert_eq!(doc.law_title, "民法");
        assert_eq!(doc.number.as_deref(), Some("89"));
        assert_eq!(doc.promulgation.unwrap().to_date().unwrap().to_string(), "1896-04-27");
    }

    #[test]
    fn article_directly_under_law_gets_implicit_body() {
        let xml =
            r#"<Law Num="1"><Article Num="1"><Paragraph Num="1"><Sentence>X</Sentence></Paragraph></Article></Law>"#;
        let doc = parse_jls(xml).unwrap().document;
        assert_eq!(doc.root.node_count(), 5);
        assert_eq!(doc.root.children[0].kind, JlsKind::LawBody);
        assert_eq!(doc.law_num, "1");
        assert!(validate_hierarchy(&doc).is_empty());
    }

    #[test]
    fn empty_law_is_rejected() {
        assert!(matches!(parse_jls("<Law></Law>"), Err(JlsError::EmptyBody)));
    }

    #[test]
    fn wrong_root_and_bad_xml() {
        assert!(matches!(parse_jls("<Act/>"), Err(JlsError::MissingRoot(_))));
        assert!(matches!(parse_jls("<Law><Article>"), Err(JlsError::MalformedXml(_))));
    }

    #[test]
    fn missing_law_number() {
        let xml = "<Law><Article/></Law>";
        assert!(matches!(parse_jls(xml), Err(JlsError::MissingLawNum)));
    }

    #[test]
    fn unknown_elements_are_skipped_with_warning() {
        let xml = r#"<Law Num="1"><LawBody><MainProvision>
            <Article Num="1"><Paragraph Num="1"><Sentence>a</Sentence><TableStruct/></Paragraph></Article>
          </MainProvision><SupplProvision><Article Num="1"/></SupplProvision></LawBody></Law>"#;
        let parsed = parse_jls(xml).unwrap();
        assert_eq!(
            parsed.warnings,
            vec![
                Warning {
                    path: "Law/LawBody/MainProvision/Article[1]/Paragraph[1]".into(),
                    element: "TableStruct".into()
                },
                Warning {
                    path: "Law/LawBody".into(),
                    element: "SupplProvision".into()
                },
            ]
        );
        assert_eq!(
            parsed.warnings[1].render("civil.xml"),
            "WARN civil.xml:Law/LawBody skipped element SupplProvision"
        );
        assert_eq!(parsed.document.root.count_kind(JlsKind::Article), 1);
    }

    #[test]
    fn mixed_text_becomes_implicit_sentence() {
        let xml = r#"<Law Num="1"><LawBody><Article Num="1"><Paragraph Num="1">loose <Item Num="1"><Sentence>i</Sentence></Item> text</Paragraph></Article></LawBody></Law>"#;
        let doc = parse_jls(xml).unwrap().document;
        let para = &doc.root.children[0].children[0].children[0];
        assert_eq!(para.children.len(), 2);
        assert_eq!(para.children[0].kind, JlsKind::Sentence);
        assert_eq!(para.children[0].text.as_deref(), Some("loose text"));
        assert!(validate_hierarchy(&doc).is_empty());
    }

    #[test]
    fn captions_subitems_and_ruby() {
        let xml = r#"<Law Num="1"><LawBody><Chapter Num="1"><ChapterTitle>第一章 通則</ChapterTitle>
          <Article Num="2"><ArticleCaption>（解釈）</ArticleCaption><ArticleTitle>第二条</ArticleTitle>
            <Paragraph Num="1"><ParagraphNum/><ParagraphSentence><Sentence><Ruby>漢<Rt>かん</Rt></Ruby>字</Sentence></ParagraphSentence>
              <Item Num="1"><ItemTitle>一</ItemTitle><ItemSentence><Column><Sentence>c1</Sentence></Column></ItemSentence>
                <Subitem1 Num="1"><Subitem1Title>イ</Subitem1Title><Subitem1Sentence><Sentence>s</Sentence></Subitem1Sentence></Subitem1>
              </Item>
            </Paragraph></Article></Chapter></LawBody></Law>"#;
        let parsed = parse_jls(xml).unwrap();
        assert!(parsed.warnings.is_empty(), "{:?}", parsed.warnings);
        let chapter = &parsed.document.root.children[0].children[0];
        assert_eq!(chapter.title.as_deref(), Some("第一章 通則"));
        let article = &chapter.children[0];
        assert_eq!(article.title.as_deref(), Some("（解釈）"));
        let para = &article.children[0];
        assert_eq!(para.children[0].text.as_deref(), Some("漢字"));
        let item = &para.children[1];
        assert_eq!(item.kind, JlsKind::Item);
        assert_eq!(item.children[1].kind, JlsKind::Item);
        assert!(validate_hierarchy(&parsed.document).is_empty());
    }

    fn doc_with(body_children: Vec<JlsNode>) -> JlsDocument {
        JlsDocument {
            law_title: String::new(),
            law_num: "1".into(),
            language: "ja".into(),
            number: None,
            promulgation: None,
            root: JlsNode::new(JlsKind::Law)
                .with_children(vec![JlsNode::new(JlsKind::LawBody).with_children(body_children)]),
        }
    }

    #[test]
    fn sentence_directly_in_article_is_flagged() {
        let doc = doc_with(vec![JlsNode::new(JlsKind::Article)
            .with_num("1")
            .with_children(vec![JlsNode::sentence("x")])]);
        let issues = validate_hierarchy(&doc);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].path, "Law/LawBody/Article[1]/Sentence[1]");
        assert_eq!(
            issues[0].rule,
            IssueRule::ChildKind {
                parent: JlsKind::Article,
                child: JlsKind::Sentence
            }
        );
    }

    #[test]
    fn duplicate_sibling_labels_are_flagged() {
        let art = |n: &str| {
            JlsNode::new(JlsKind::Article)
                .with_num(n)
                .with_children(vec![JlsNode::new(JlsKind::Paragraph)
                    .with_num("1")
                    .with_children(vec![JlsNode::sentence("x")])])
        };
        let doc = doc_with(vec![art("1"), art("1")]);
        let issues = validate_hierarchy(&doc);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].path, "Law/LawBody/Article[2]");
        assert_eq!(issues[0].rule, IssueRule::DuplicateLabel("1".into()));
    }

    #[test]
    fn valid_minimal_document_has_no_issues() {
        let doc = parse_jls(MINIMAL).unwrap().document;
        assert!(validate_hierarchy(&doc).is_empty());
    }

    #[test]
    fn reserialized_form_parses_to_same_tree() {
        let doc = parse_jls(MINIMAL).unwrap().document;
        let again = parse_jls(&doc.to_xml()).unwrap().document;
        assert_eq!(doc, again);
    }
}
