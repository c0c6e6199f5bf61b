//! Lemma to semantic-category lookup.
//!
//! The question rules pick between interrogatives based on whether a
//! keyword denotes a person, a place, a date and so on. A
//! [`SemanticLexicon`] answers that question from a flat file with two
//! tab-separated columns, lemma then category:
//!
//! ```text
//! dauctar<TAB>OCCUPATION
//! ghar<TAB>PLACE
//! ```
//!
//! Lemmas missing from the lexicon map to [`SemanticCategory::Unknown`].

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::treebank::Token;

const BUILTIN_LEXICON: &str = include_str!("../data/lexicon.tsv");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("failed to read lexicon {path}: {source}")]
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
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SemanticCategory {
    Human,
    Occupation,
    Place,
    Date,
    Path,
    Living,
    Nonliving,
    Property,
    Unknown,
}

impl SemanticCategory {
    pub const ALL: [SemanticCategory; 9] = [
        SemanticCategory::Human,
        SemanticCategory::Occupation,
        SemanticCategory::Place,
        SemanticCategory::Date,
        SemanticCategory::Path,
        SemanticCategory::Living,
        SemanticCategory::Nonliving,
        SemanticCategory::Property,
        SemanticCategory::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SemanticCategory::Human => "HUMAN",
            SemanticCategory::Occupation => "OCCUPATION",
            SemanticCategory::Place => "PLACE",
            SemanticCategory::Date => "DATE",
            SemanticCategory::Path => "PATH",
            SemanticCategory::Living => "LIVING",
            SemanticCategory::Nonliving => "NONLIVING",
            SemanticCategory::Property => "PROPERTY",
            SemanticCategory::Unknown => "UNKNOWN",
        }
    }

    /// People, including occupation nouns.
    pub fn is_human(self) -> bool {
        matches!(self, SemanticCategory::Human | SemanticCategory::Occupation)
    }
}

impl fmt::Display for SemanticCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SemanticCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SemanticCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown semantic category {:?}", s))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SemanticLexicon {
    entries: HashMap<String, SemanticCategory>,
    source_name: String,
    duplicates: usize,
}

impl SemanticLexicon {
    pub fn empty(source_name: impl Into<String>) -> Self {
        SemanticLexicon {
            source_name: source_name.into(),
            ..Default::default()
        }
    }

    /// The category snapshot shipped with the crate.
    pub fn builtin() -> Self {
        SemanticLexicon::parse(BUILTIN_LEXICON, "builtin").expect("builtin lexicon is well formed")
    }

    /// Parses `lemma<TAB>CATEGORY` rows. Blank lines and `#` comments are
    /// skipped; a repeated lemma keeps its last category and is counted in
    /// [`duplicates`](Self::duplicates).
    pub fn parse(text: &str, source_name: &str) -> Result<Self, LexiconError> {
        let mut lexicon = SemanticLexicon::empty(source_name);
        for (i, line) in text.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |message: String| LexiconError::Malformed {
                source_name: source_name.to_string(),
                line: i + 1,
                message,
            };
            let (lemma, category) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected lemma<TAB>CATEGORY".to_string()))?;
            let category: SemanticCategory = category.trim().parse().map_err(malformed)?;
            lexicon.insert(lemma, category);
        }
        Ok(lexicon)
    }

    pub fn insert(&mut self, lemma: &str, category: SemanticCategory) {
        if self.entries.insert(lemma.to_string(), category).is_some() {
            self.duplicates += 1;
        }
    }

    /// Layers `other` on top of `self`; entries from `other` win.
    pub fn overlay(&mut self, other: &SemanticLexicon) {
        for (lemma, category) in &other.entries {
            self.entries.insert(lemma.clone(), *category);
        }
        self.duplicates += other.duplicates;
        if self.source_name.is_empty() {
            self.source_name = other.source_name.clone();
        } else {
            self.source_name = format!("{}+{}", self.source_name, other.source_name);
        }
    }

    pub fn lookup(&self, lemma: &str) -> SemanticCategory {
        self.entries.get(lemma).copied().unwrap_or(SemanticCategory::Unknown)
    }

    /// Category of a token: its lemma first, then its surface form.
    pub fn lookup_token(&self, token: &Token) -> SemanticCategory {
        match self.lookup(&token.lemma) {
            SemanticCategory::Unknown if token.form != token.lemma => self.lookup(&token.form),
            category => category,
        }
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    /// Number of rows that overrode an earlier row for the same lemma.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<SemanticLexicon, LexiconError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    SemanticLexicon::parse(&text, &path.display().to_string())
}
