//! Case marking, interrogative inventory and verb agreement features.
//!
//! Which postpositions mark which case, and which words count as question
//! words, is data rather than code: a [`MarkerTable`] is read from a TSV file
//! of `role<TAB>form` rows. The default table covers the Latin
//! transliteration; extra tables (for example Devanagari forms) extend it.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::treebank::{ParsedSentence, TokenId};

const DEFAULT_MARKERS: &str = include_str!("../data/markers.tsv");

#[derive(Debug, Error)]
pub enum MorphologyError {
    #[error("failed to read marker table {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}:{line}: {message}")]
    Malformed {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("{0:?} is not a genitive marker")]
    NotGenitive(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkerRole {
    Erg,
    Acc,
    Ins,
    Gen,
    Loc,
    Ben,
    Because,
    Wh,
}

impl MarkerRole {
    pub const ALL: [MarkerRole; 8] = [
        MarkerRole::Erg,
        MarkerRole::Acc,
        MarkerRole::Ins,
        MarkerRole::Gen,
        MarkerRole::Loc,
        MarkerRole::Ben,
        MarkerRole::Because,
        MarkerRole::Wh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MarkerRole::Erg => "erg",
            MarkerRole::Acc => "acc",
            MarkerRole::Ins => "ins",
            MarkerRole::Gen => "gen",
            MarkerRole::Loc => "loc",
            MarkerRole::Ben => "ben",
            MarkerRole::Because => "because",
            MarkerRole::Wh => "wh",
        }
    }

    /// Roles whose forms are case-marking postpositions.
    pub fn is_postposition(self) -> bool {
        !matches!(self, MarkerRole::Because | MarkerRole::Wh)
    }
}

impl FromStr for MarkerRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MarkerRole::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown marker role {:?}", s))
    }
}

impl fmt::Display for MarkerRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Surface forms per marker role. Multi-word forms ("ke dwaaraa") are
/// stored with single spaces between words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerTable {
    forms: BTreeMap<MarkerRole, Vec<String>>,
    max_words: usize,
}

impl Default for MarkerTable {
    fn default() -> Self {
        MarkerTable::parse(DEFAULT_MARKERS, "default").expect("default marker table is well formed")
    }
}

impl MarkerTable {
    pub fn empty() -> Self {
        MarkerTable {
            forms: BTreeMap::new(),
            max_words: 0,
        }
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self, MorphologyError> {
        let mut table = MarkerTable::empty();
        for (i, line) in text.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |message: String| MorphologyError::Malformed {
                source_name: source_name.to_string(),
                line: i + 1,
                message,
            };
            let (role, form) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected role<TAB>form".to_string()))?;
            let role: MarkerRole = role.trim().parse().map_err(malformed)?;
            let form = normalize(form);
            if form.is_empty() {
                return Err(malformed("empty form".to_string()));
            }
            table.insert(role, &form);
        }
        Ok(table)
    }

    pub fn insert(&mut self, role: MarkerRole, form: &str) {
        let form = normalize(form);
        self.max_words = self.max_words.max(form.split(' ').count());
        let forms = self.forms.entry(role).or_default();
        if !forms.contains(&form) {
            forms.push(form);
        }
    }

    /// Adds every entry of `other` to this table.
    pub fn extend(&mut self, other: &MarkerTable) {
        for (role, forms) in &other.forms {
            for form in forms {
                self.insert(*role, form);
            }
        }
    }

    pub fn forms(&self, role: MarkerRole) -> &[String] {
        self.forms.get(&role).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn has(&self, role: MarkerRole, form: &str) -> bool {
        self.forms(role).iter().any(|f| f == form)
    }

    /// Role of a postposition form, if it is one.
    pub fn postposition_role(&self, form: &str) -> Option<MarkerRole> {
        MarkerRole::ALL
            .into_iter()
            .filter(|r| r.is_postposition())
            .find(|r| self.has(*r, form))
    }

    pub fn is_because(&self, form: &str) -> bool {
        self.has(MarkerRole::Because, form)
    }

    /// Membership in the interrogative inventory. Multi-word items are
    /// matched as a single space-joined string.
    pub fn is_interrogative_form(&self, form: &str) -> bool {
        self.has(MarkerRole::Wh, form)
    }

    /// Maximal interrogative spans in a token sequence, matched greedily
    /// left to right with the longest inventory item first.
    pub fn interrogative_spans<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<Range<usize>> {
        let mut spans = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let longest = self.max_words.min(tokens.len() - i);
            let matched = (1..=longest).rev().find(|&len| {
                let joined = tokens[i..i + len]
                    .iter()
                    .map(AsRef::as_ref)
                    .collect::<Vec<_>>()
                    .join(" ");
                self.is_interrogative_form(&joined)
            });
            match matched {
                Some(len) => {
                    spans.push(i..i + len);
                    i += len;
                }
                None => i += 1,
            }
        }
        spans
    }
}

fn normalize(form: &str) -> String {
    form.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn load_marker_table(path: impl AsRef<Path>) -> Result<MarkerTable, MorphologyError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| MorphologyError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    MarkerTable::parse(&text, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseStatus {
    Direct,
    Oblique(String),
}

impl CaseStatus {
    pub fn marker(&self) -> Option<&str> {
        match self {
            CaseStatus::Direct => None,
            CaseStatus::Oblique(m) => Some(m),
        }
    }

    pub fn is_oblique(&self) -> bool {
        matches!(self, CaseStatus::Oblique(_))
    }
}

/// Direct or oblique case of a token.
///
/// The token is oblique when a run of adjacent postposition children spells
/// a marker from the table. Longer runs win, so `ke dwaaraa` is preferred
/// over `ke`. Pronouns with fused case (`usne`) are direct unless their
/// features carry `Case=Erg`.
pub fn case_of(s: &ParsedSentence, id: TokenId, m: &MarkerTable) -> CaseStatus {
    let psp = s.psp_children(id);
    let mut runs: Vec<Vec<&str>> = Vec::new();
    let mut last_id = None;
    for t in &psp {
        match (runs.last_mut(), last_id) {
            (Some(run), Some(prev)) if t.id == prev + 1 => run.push(t.form.as_str()),
            _ => runs.push(vec![t.form.as_str()]),
        }
        last_id = Some(t.id);
    }

    for run in &runs {
        for len in (1..=run.len()).rev() {
            for start in 0..=run.len() - len {
                let candidate = run[start..start + len].join(" ");
                if m.postposition_role(&candidate).is_some() {
                    return CaseStatus::Oblique(candidate);
                }
            }
        }
    }

    let fused_ergative = s.token(id).and_then(|t| t.feat("Case")) == Some("Erg");
    match m.forms(MarkerRole::Erg).first() {
        Some(erg) if fused_ergative => CaseStatus::Oblique(erg.clone()),
        _ => CaseStatus::Direct,
    }
}

/// `kis-` plus the genitive suffix of the marker.
pub fn genitive_interrogative(marker: &str) -> Result<&'static str, MorphologyError> {
    match marker {
        "ka" | "का" => Ok("kiska"),
        "ke" | "के" => Ok("kiske"),
        "ki" | "की" => Ok("kiski"),
        other => Err(MorphologyError::NotGenitive(other.to_string())),
    }
}

/// Interrogative that replaces a noun together with its case marker, e.g.
/// `X ne` becomes `kisne`.
pub fn oblique_interrogative(marker: &str, m: &MarkerTable) -> Option<&'static str> {
    if let Ok(genitive) = genitive_interrogative(marker) {
        return Some(genitive);
    }
    match m.postposition_role(marker)? {
        MarkerRole::Erg => Some("kisne"),
        MarkerRole::Acc => Some("kisko"),
        MarkerRole::Ins if marker.contains(' ') => Some("kiske dwaaraa"),
        MarkerRole::Ins => Some("kisse"),
        MarkerRole::Ben => Some("kiske liye"),
        MarkerRole::Loc => Some(locative_interrogative(marker)),
        _ => None,
    }
}

/// `kis mein` for inessive markers, `kis par` otherwise.
pub fn locative_interrogative(marker: &str) -> &'static str {
    match marker {
        "mein" | "में" => "kis mein",
        _ => "kis par",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gender {
    Masc,
    Fem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Number {
    Sing,
    Plur,
}

// Progressive and past auxiliaries carry the agreement of the verb group.
const AUX_AGREEMENT: &[(&str, Gender, Option<Number>)] = &[
    ("raha", Gender::Masc, Some(Number::Sing)),
    ("rahi", Gender::Fem, None),
    ("rahe", Gender::Masc, Some(Number::Plur)),
    ("tha", Gender::Masc, Some(Number::Sing)),
    ("thi", Gender::Fem, None),
    ("the", Gender::Masc, Some(Number::Plur)),
    ("रहा", Gender::Masc, Some(Number::Sing)),
    ("रही", Gender::Fem, None),
    ("रहे", Gender::Masc, Some(Number::Plur)),
    ("था", Gender::Masc, Some(Number::Sing)),
    ("थी", Gender::Fem, None),
    ("थे", Gender::Masc, Some(Number::Plur)),
];

fn aux_agreement(s: &ParsedSentence, verb_id: TokenId) -> Option<(Gender, Option<Number>)> {
    s.children(verb_id).into_iter().find_map(|child| {
        AUX_AGREEMENT
            .iter()
            .find(|(form, _, _)| *form == child.form)
            .map(|(_, g, n)| (*g, *n))
    })
}

/// Gender of a verb group from its features, falling back to the surface
/// form of its auxiliaries.
pub fn verb_gender(s: &ParsedSentence, verb_id: TokenId) -> Option<Gender> {
    match s.token(verb_id)?.feat("Gender") {
        Some("Masc") => return Some(Gender::Masc),
        Some("Fem") => return Some(Gender::Fem),
        _ => {}
    }
    aux_agreement(s, verb_id).map(|(g, _)| g)
}

pub fn verb_number(s: &ParsedSentence, verb_id: TokenId) -> Option<Number> {
    match s.token(verb_id)?.feat("Number") {
        Some("Sing") => return Some(Number::Sing),
        Some("Plur") => return Some(Number::Plur),
        _ => {}
    }
    aux_agreement(s, verb_id).and_then(|(_, n)| n)
}

/// Feminine counterpart of a masculine progressive auxiliary.
pub fn feminine_aux(form: &str) -> Option<&'static str> {
    match form {
        "raha" | "rahe" => Some("rahi"),
        "रहा" | "रहे" => Some("रही"),
        _ => None,
    }
}
