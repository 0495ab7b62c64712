use std::collections::BTreeMap;
use std::fmt;

use crate::jls::JlsKind;

/// How a source node's `num` surfaces in the output element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumRecipe {
    /// Emitted as a `<num>` child and used for the eId segment.
    NumChild,
    /// Dropped.
    Omit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingRule {
    pub source_kind: JlsKind,
    pub target_element: String,
    pub num_attr_recipe: NumRecipe,
    /// eId segment prefix. Unnumbered rules whose target equals the parent's
    /// target are merged into the parent (LawBody/MainProvision -> body).
    pub eid_prefix: Option<String>,
}

impl MappingRule {
    pub fn new(source_kind: JlsKind, target: &str, eid_prefix: Option<&str>) -> Self {
        MappingRule {
            source_kind,
            target_element: target.to_string(),
            num_attr_recipe: if eid_prefix.is_some() {
                NumRecipe::NumChild
            } else {
                NumRecipe::Omit
            },
            eid_prefix: eid_prefix.map(str::to_string),
        }
    }
}

impl fmt::Display for MappingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source_kind, self.target_element)?;
        if let Some(p) = &self.eid_prefix {
            write!(f, " {p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RuleTableError {
    #[error("line {line}: expected `source_kind -> target_element [eid_prefix]`")]
    Syntax { line: usize },
    #[error("line {line}: unknown source kind `{kind}`")]
    UnknownKind { line: usize, kind: String },
    #[error("line {line}: second rule for {kind}")]
    Duplicate { line: usize, kind: JlsKind },
    #[error("line {line}: `{name}` is not a valid element name or eId prefix")]
    BadName { line: usize, name: String },
}

/// The declarative JLS -> AKN rule table, one rule per source kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingTable {
    rules: BTreeMap<JlsKind, MappingRule>,
}

impl Default for MappingTable {
    fn default() -> Self {
        use JlsKind::*;
        let rules = [
            MappingRule::new(Law, "act", None),
            MappingRule::new(LawBody, "body", None),
            MappingRule::new(MainProvision, "body", None),
            MappingRule::new(Part, "part", Some("part")),
            MappingRule::new(Chapter, "chapter", Some("chp")),
            MappingRule::new(Section, "section", Some("sec")),
            MappingRule::new(Article, "article", Some("art")),
            MappingRule::new(Paragraph, "paragraph", Some("para")),
            MappingRule::new(Item, "point", Some("point")),
            MappingRule::new(Sentence, "p", None),
        ];
        MappingTable {
            rules: rules.into_iter().map(|r| (r.source_kind, r)).collect(),
        }
    }
}

impl MappingTable {
    pub fn empty() -> Self {
        MappingTable { rules: BTreeMap::new() }
    }

    pub fn get(&self, kind: JlsKind) -> Option<&MappingRule> {
        self.rules.get(&kind)
    }

    pub fn insert(&mut self, rule: MappingRule) -> Option<MappingRule> {
        self.rules.insert(rule.source_kind, rule)
    }

    pub fn remove(&mut self, kind: JlsKind) -> Option<MappingRule> {
        self.rules.remove(&kind)
    }

    pub fn rules(&self) -> impl Iterator<Item = &MappingRule> {
        self.rules.values()
    }

    /// Parse a rule file: one `source_kind -> target_element [eid_prefix]`
    /// per line, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, RuleTableError> {
        let mut table = MappingTable::empty();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (lhs, rhs) = content.split_once("->").ok_or(RuleTableError::Syntax { line })?;
            let kind_name = lhs.trim();
            let kind = JlsKind::from_name(kind_name).ok_or_else(|| RuleTableError::UnknownKind {
                line,
                kind: kind_name.to_string(),
            })?;
            let mut parts = rhs.split_whitespace();
            let target = parts.next().ok_or(RuleTableError::Syntax { line })?;
            let prefix = parts.next();
            if parts.next().is_some() {
                return Err(RuleTableError::Syntax { line });
            }
            if !is_xml_name(target) {
                return Err(RuleTableError::BadName {
                    line,
                    name: target.into(),
                });
            }
            if let Some(p) = prefix {
                if !p.chars().all(|c| c.is_ascii_lowercase()) {
                    return Err(RuleTableError::BadName { line, name: p.into() });
                }
            }
            if table.rules.contains_key(&kind) {
                return Err(RuleTableError::Duplicate { line, kind });
            }
            table.insert(MappingRule::new(kind, target, prefix));
        }
        Ok(table)
    }

    pub fn to_text(&self) -> String {
        self.rules.values().map(|r| format!("{r}\n")).collect()
    }
}

fn is_xml_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_covers_every_kind() {
        let t = MappingTable::default();
        for k in JlsKind::ALL {
            assert!(t.get(k).is_some(), "{k}");
        }
        assert_eq!(t.get(JlsKind::Law).unwrap().target_element, "act");
        assert_eq!(t.get(JlsKind::Article).unwrap().target_element, "article");
        assert_eq!(t.get(JlsKind::Paragraph).unwrap().target_element, "paragraph");
        assert_eq!(t.get(JlsKind::Item).unwrap().target_element, "point");
    }

    #[test]
    fn text_form_parses_back() {
        let t = MappingTable::default();
        assert_eq!(MappingTable::parse(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn parses_comments_and_reports_errors() {
        let t = MappingTable::parse("# table\nArticle -> article art  # trailing\n\n").unwrap();
        assert_eq!(t.rules().count(), 1);
        assert_eq!(
            MappingTable::parse("Article article"),
            Err(RuleTableError::Syntax { line: 1 })
        );
        assert!(matches!(
            MappingTable::parse("Annex -> annex"),
            Err(RuleTableError::UnknownKind { .. })
        ));
        assert_eq!(
            MappingTable::parse("Item -> point point\nItem -> item item"),
            Err(RuleTableError::Duplicate {
                line: 2,
                kind: JlsKind::Item
            })
        );
        assert!(matches!(
            MappingTable::parse("Item -> po:int"),
            Err(RuleTableError::BadName { .. })
        ));
    }
}
