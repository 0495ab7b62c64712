//! FRBR Work / Expression / Manifestation identity of a converted act.

use std::sync::OnceLock;

use chrono::NaiveDate;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::jls::JlsDocument;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdentityError {
    #[error("country `{0}` is not an ISO 3166 alpha-2 code")]
    Country(String),
    #[error("`{0}` is not an ISO 8601 calendar date")]
    Date(String),
    #[error("law number `{0}` is empty or contains '/', '@' or '.'")]
    Number(String),
    #[error("language `{0}` is not an ISO 639 code")]
    Language(String),
    #[error("law has no promulgation date and none was supplied")]
    MissingDate,
    #[error("`{0}` does not follow the /akn/{{country}}/act/{{date}}/{{number}}/{{lang}}@{{version}}.xml scheme")]
    Uri(String),
}

/// Raw values an identity is synthesized from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityInputs {
    pub country: String,
    pub date: String,
    pub number: String,
    pub language: String,
    pub version_date: String,
}

impl IdentityInputs {
    /// Identity inputs read from a parsed JLS law. The number is the `Num`
    /// attribute when present, otherwise the full `LawNum` text; the
    /// version date defaults to the promulgation date.
    pub fn from_jls(doc: &JlsDocument, country: &str, version_date: Option<&str>) -> Result<Self, IdentityError> {
        let date = doc
            .promulgation
            .and_then(|p| p.to_date())
            .ok_or(IdentityError::MissingDate)?
            .format("%Y-%m-%d")
            .to_string();
        Ok(IdentityInputs {
            country: country.to_string(),
            number: doc.number.clone().unwrap_or_else(|| doc.law_num.clone()),
            language: doc.language.clone(),
            version_date: version_date.map(str::to_string).unwrap_or_else(|| date.clone()),
            date,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrbrIdentity {
    pub country: String,
    pub doc_type: String,
    pub date: String,
    pub number: String,
    pub language: String,
    pub version_date: String,
    pub work_uri: String,
    pub expression_uri: String,
    pub manifestation_uri: String,
}

/// Strip all whitespace; the remaining characters are kept verbatim.
pub fn normalize_number(raw: &str) -> String {
    raw.chars().filter(|c| !c.is_whitespace()).collect()
}

fn iso_date(s: &str) -> Result<String, IdentityError> {
    let d = NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| IdentityError::Date(s.into()))?;
    let canon = d.format("%Y-%m-%d").to_string();
    if canon != s {
        return Err(IdentityError::Date(s.into()));
    }
    Ok(canon)
}

fn manifestation_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^/akn/(?P<country>[a-z]{2})/act/(?P<date>\d{4}-\d{2}-\d{2})/(?P<number>[^/@.\s]+)/(?P<lang>[a-z]{2,3})@(?P<version>\d{4}-\d{2}-\d{2})\.xml$",
        )
        .expect("manifestation URI regex")
    })
}

impl FrbrIdentity {
    pub fn new(inputs: &IdentityInputs) -> Result<Self, IdentityError> {
        let country = inputs.country.trim().to_ascii_lowercase();
        if country.len() != 2 || !country.chars().all(|c| c.is_ascii_lowercase()) {
            return Err(IdentityError::Country(inputs.country.clone()));
        }
        let date = iso_date(inputs.date.trim())?;
        let version_date = iso_date(inputs.version_date.trim())?;
        let number = normalize_number(&inputs.number);
        if number.is_empty() || number.contains(['/', '@', '.']) {
            return Err(IdentityError::Number(inputs.number.clone()));
        }
        let language = inputs.language.trim().to_string();
        if !(2..=3).contains(&language.len()) || !language.chars().all(|c| c.is_ascii_lowercase()) {
            return Err(IdentityError::Language(inputs.language.clone()));
        }
        let work_uri = format!("/akn/{country}/act/{date}/{number}");
        let expression_uri = format!("{work_uri}/{language}@{version_date}");
        let manifestation_uri = format!("{expression_uri}.xml");
        Ok(FrbrIdentity {
            country,
            doc_type: "act".into(),
            date,
            number,
            language,
            version_date,
            work_uri,
            expression_uri,
            manifestation_uri,
        })
    }

    /// Recover the identity from its manifestation URI.
    pub fn parse_manifestation_uri(uri: &str) -> Result<Self, IdentityError> {
        let caps = manifestation_regex()
            .captures(uri)
            .ok_or_else(|| IdentityError::Uri(uri.into()))?;
        let id = FrbrIdentity::new(&IdentityInputs {
            country: caps["country"].to_string(),
            date: caps["date"].to_string(),
            number: caps["number"].to_string(),
            language: caps["lang"].to_string(),
            version_date: caps["version"].to_string(),
        })?;
        if id.manifestation_uri != uri {
            return Err(IdentityError::Uri(uri.into()));
        }
        Ok(id)
    }

    pub fn inputs(&self) -> IdentityInputs {
        IdentityInputs {
            country: self.country.clone(),
            date: self.date.clone(),
            number: self.number.clone(),
            language: self.language.clone(),
            version_date: self.version_date.clone(),
        }
    }

    /// Problems with the stored URIs relative to the stored fields.
    pub fn uri_problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        match FrbrIdentity::new(&self.inputs()) {
            Err(e) => out.push(e.to_string()),
            Ok(expected) => {
                if self.doc_type != "act" {
                    out.push(format!("doc_type `{}` is not `act`", self.doc_type));
                }
                for (name, have, want) in [
                    ("work", &self.work_uri, &expected.work_uri),
                    ("expression", &self.expression_uri, &expected.expression_uri),
                    ("manifestation", &self.manifestation_uri, &expected.manifestation_uri),
                ] {
                    if have != want {
                        out.push(format!("{name} URI `{have}` should be `{want}`"));
                    }
                }
            }
        }
        out
    }

    /// Work URI without the `/akn/{country}/act/` prefix: `{date}/{number}`.
    pub fn law_id(&self) -> String {
        format!("{}/{}", self.date, self.number)
    }

    /// `{country}-{number}-{language}@{version_date}.akn.xml`
    pub fn file_name(&self) -> String {
        format!(
            "{}-{}-{}@{}.akn.xml",
            self.country, self.number, self.language, self.version_date
        )
    }
}
