//! Reading and writing karaka-annotated dependency treebanks.
//!
//! The input is a CoNLL-U-style column format with seven tab-separated
//! columns per token:
//!
//! ```text
//! ID  FORM  LEMMA  UPOS  FEATS  HEAD  DEPREL
//! ```
//!
//! Sentences are separated by blank lines. `# sent_id = ...` and
//! `# text = ...` comment lines are picked up as the sentence id and raw
//! text; any other comment line is ignored. A sentence without a
//! `sent_id` comment is named `s<N>` after its 1-based position in the file.
//!
//! Postpositions are separate tokens attached to their noun with the
//! `psp` (or `lwg__psp`) relation, so a noun is oblique exactly when it has
//! such a child.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type TokenId = usize;

#[derive(Debug, Error)]
pub enum TreebankError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Malformed {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("sentence {sentence_id}: {message}")]
    InvalidSentence { sentence_id: String, message: String },
}

/// Dependency label of a token.
///
/// The karaka relations the question rules dispatch on get their own
/// variants; every other label (`psp`, `root`, `lwg__aux`, ...) is kept
/// verbatim in [`KarakaLabel::Other`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum KarakaLabel {
    K1,
    K1s,
    K2,
    K2p,
    K3,
    Rt,
    Rh,
    K5,
    R6,
    K7s,
    K7t,
    K7p,
    Coof,
    Other(String),
}

impl KarakaLabel {
    pub fn as_str(&self) -> &str {
        match self {
            KarakaLabel::K1 => "k1",
            KarakaLabel::K1s => "k1s",
            KarakaLabel::K2 => "k2",
            KarakaLabel::K2p => "k2p",
            KarakaLabel::K3 => "k3",
            KarakaLabel::Rt => "rt",
            KarakaLabel::Rh => "rh",
            KarakaLabel::K5 => "k5",
            KarakaLabel::R6 => "r6",
            KarakaLabel::K7s => "k7s",
            KarakaLabel::K7t => "k7t",
            KarakaLabel::K7p => "k7p",
            KarakaLabel::Coof => "coof",
            KarakaLabel::Other(s) => s,
        }
    }

    /// Labels that one of the question rules can fire on.
    pub fn is_karaka(&self) -> bool {
        !matches!(self, KarakaLabel::Coof | KarakaLabel::Other(_))
    }

    pub fn is_psp(&self) -> bool {
        matches!(self, KarakaLabel::Other(s) if s == "psp" || s == "lwg__psp")
    }

    pub fn is_aux(&self) -> bool {
        matches!(self, KarakaLabel::Other(s) if s == "aux" || s == "lwg__aux" || s == "lwg__vaux")
    }
}

impl FromStr for KarakaLabel {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "k1" => KarakaLabel::K1,
            "k1s" => KarakaLabel::K1s,
            "k2" => KarakaLabel::K2,
            "k2p" => KarakaLabel::K2p,
            "k3" => KarakaLabel::K3,
            "rt" => KarakaLabel::Rt,
            "rh" => KarakaLabel::Rh,
            "k5" => KarakaLabel::K5,
            "r6" => KarakaLabel::R6,
            "k7s" => KarakaLabel::K7s,
            "k7t" => KarakaLabel::K7t,
            "k7p" => KarakaLabel::K7p,
            "coof" => KarakaLabel::Coof,
            other => KarakaLabel::Other(other.to_string()),
        })
    }
}

impl From<&str> for KarakaLabel {
    fn from(s: &str) -> Self {
        match s.parse() {
            Ok(label) => label,
            Err(never) => match never {},
        }
    }
}

impl From<String> for KarakaLabel {
    fn from(s: String) -> Self {
        KarakaLabel::from(s.as_str())
    }
}

impl From<KarakaLabel> for String {
    fn from(label: KarakaLabel) -> Self {
        label.as_str().to_string()
    }
}

impl fmt::Display for KarakaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: TokenId,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub feats: BTreeMap<String, String>,
    pub head: TokenId,
    pub deprel: KarakaLabel,
}

impl Token {
    pub fn new(id: TokenId, form: &str, upos: &str, head: TokenId, deprel: &str) -> Self {
        Token {
            id,
            form: form.to_string(),
            lemma: form.to_string(),
            upos: upos.to_string(),
            feats: BTreeMap::new(),
            head,
            deprel: KarakaLabel::from(deprel),
        }
    }

    pub fn with_lemma(mut self, lemma: &str) -> Self {
        self.lemma = lemma.to_string();
        self
    }

    pub fn with_feat(mut self, key: &str, value: &str) -> Self {
        self.feats.insert(key.to_string(), value.to_string());
        self
    }

    pub fn feat(&self, key: &str) -> Option<&str> {
        self.feats.get(key).map(String::as_str)
    }

    pub fn is_root(&self) -> bool {
        self.head == 0
    }
}

/// One dependency-parsed sentence. Construction validates the tree, so a
/// `ParsedSentence` always has contiguous ids, a single root and no cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    sentence_id: String,
    tokens: Vec<Token>,
    raw_text: Option<String>,
}

impl ParsedSentence {
    pub fn new(
        sentence_id: impl Into<String>,
        tokens: Vec<Token>,
        raw_text: Option<String>,
    ) -> Result<Self, TreebankError> {
        let sentence = ParsedSentence {
            sentence_id: sentence_id.into(),
            tokens,
            raw_text,
        };
        sentence.validate()?;
        Ok(sentence)
    }

    pub fn builder(sentence_id: impl Into<String>) -> SentenceBuilder {
        SentenceBuilder {
            sentence_id: sentence_id.into(),
            tokens: Vec::new(),
            raw_text: None,
        }
    }

    fn invalid(&self, message: impl Into<String>) -> TreebankError {
        TreebankError::InvalidSentence {
            sentence_id: self.sentence_id.clone(),
            message: message.into(),
        }
    }

    fn validate(&self) -> Result<(), TreebankError> {
        if self.tokens.is_empty() {
            return Err(self.invalid("sentence has no tokens"));
        }
        let n = self.tokens.len();
        for (i, token) in self.tokens.iter().enumerate() {
            if token.id != i + 1 {
                return Err(self.invalid(format!(
                    "token ids must be contiguous from 1, found {} at position {}",
                    token.id,
                    i + 1
                )));
            }
            if token.head == token.id {
                return Err(self.invalid(format!("self-loop at token {}", token.id)));
            }
            if token.head > n {
                return Err(self.invalid(format!(
                    "token {} has head {} outside 0..={}",
                    token.id, token.head, n
                )));
            }
        }
        let roots: Vec<TokenId> = self.tokens.iter().filter(|t| t.is_root()).map(|t| t.id).collect();
        match roots.len() {
            0 => return Err(self.invalid("no root token (head 0)")),
            1 => {}
            _ => return Err(self.invalid(format!("multiple roots: tokens {:?}", roots))),
        }
        // Every token must reach the root within n steps.
        for token in &self.tokens {
            let mut current = token.head;
            let mut steps = 0;
            while current != 0 {
                steps += 1;
                if steps > n {
                    return Err(self.invalid(format!("cycle through token {}", token.id)));
                }
                current = self.tokens[current - 1].head;
            }
        }
        Ok(())
    }

    pub fn sentence_id(&self) -> &str {
        &self.sentence_id
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn raw_text(&self) -> Option<&str> {
        self.raw_text.as_deref()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based id.
    pub fn token(&self, id: TokenId) -> Option<&Token> {
        id.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    /// The unique token attached to the artificial root.
    pub fn main_verb(&self) -> &Token {
        self.tokens
            .iter()
            .find(|t| t.is_root())
            .expect("validated sentence has a root")
    }

    /// Dependents of `id` in surface order.
    pub fn children(&self, id: TokenId) -> Vec<&Token> {
        self.tokens.iter().filter(|t| t.head == id).collect()
    }

    /// Postposition dependents of `id` in surface order.
    pub fn psp_children(&self, id: TokenId) -> Vec<&Token> {
        self.tokens
            .iter()
            .filter(|t| t.head == id && t.deprel.is_psp())
            .collect()
    }

    /// Ids of `id` and all of its descendants, in surface order.
    pub fn subtree(&self, id: TokenId) -> Vec<TokenId> {
        let mut inside = vec![false; self.tokens.len() + 1];
        inside[id] = true;
        // Heads may follow their dependents, so iterate to a fixpoint.
        let mut changed = true;
        while changed {
            changed = false;
            for t in &self.tokens {
                if !inside[t.id] && t.head != 0 && inside[t.head] {
                    inside[t.id] = true;
                    changed = true;
                }
            }
        }
        (1..=self.tokens.len()).filter(|&i| inside[i]).collect()
    }

    pub fn forms(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.form.as_str()).collect()
    }
}

/// Incremental construction of a [`ParsedSentence`], mostly for tests and
/// examples. Ids are assigned in the order tokens are added.
#[derive(Debug, Clone)]
pub struct SentenceBuilder {
    sentence_id: String,
    tokens: Vec<Token>,
    raw_text: Option<String>,
}

impl SentenceBuilder {
    /// Adds a token whose lemma equals its form.
    pub fn token(mut self, form: &str, upos: &str, head: TokenId, deprel: &str) -> Self {
        let id = self.tokens.len() + 1;
        self.tokens.push(Token::new(id, form, upos, head, deprel));
        self
    }

    /// Adds a fully specified token; its id is overwritten with the next position.
    pub fn push(mut self, mut token: Token) -> Self {
        token.id = self.tokens.len() + 1;
        self.tokens.push(token);
        self
    }

    /// Sets a feature on the most recently added token.
    pub fn feat(mut self, key: &str, value: &str) -> Self {
        if let Some(last) = self.tokens.last_mut() {
            last.feats.insert(key.to_string(), value.to_string());
        }
        self
    }

    /// Sets the lemma of the most recently added token.
    pub fn lemma(mut self, lemma: &str) -> Self {
        if let Some(last) = self.tokens.last_mut() {
            last.lemma = lemma.to_string();
        }
        self
    }

    pub fn text(mut self, text: &str) -> Self {
        self.raw_text = Some(text.to_string());
        self
    }

    pub fn build(self) -> Result<ParsedSentence, TreebankError> {
        ParsedSentence::new(self.sentence_id, self.tokens, self.raw_text)
    }
}

pub fn load_treebank(path: impl AsRef<Path>) -> Result<Vec<ParsedSentence>, TreebankError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| TreebankError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_treebank(&text, &path.display().to_string())
}

/// Parses treebank text. `origin` names the source in error messages.
pub fn parse_treebank(text: &str, origin: &str) -> Result<Vec<ParsedSentence>, TreebankError> {
    let mut sentences = Vec::new();
    let mut block = Block::default();

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            if let Some(sentence) = block.finish(sentences.len() + 1)? {
                sentences.push(sentence);
            }
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(id) = comment.strip_prefix("sent_id") {
                block.sentence_id = Some(strip_eq(id).to_string());
            } else if let Some(raw) = comment.strip_prefix("text") {
                block.raw_text = Some(strip_eq(raw).to_string());
            }
            continue;
        }
        let token = parse_token_line(line).map_err(|message| TreebankError::Malformed {
            origin: origin.to_string(),
            line: line_no,
            message,
        })?;
        block.tokens.push(token);
    }
    if let Some(sentence) = block.finish(sentences.len() + 1)? {
        sentences.push(sentence);
    }
    Ok(sentences)
}

fn strip_eq(s: &str) -> &str {
    let s = s.trim_start();
    s.strip_prefix('=').unwrap_or(s).trim()
}

#[derive(Default)]
struct Block {
    sentence_id: Option<String>,
    raw_text: Option<String>,
    tokens: Vec<Token>,
}

impl Block {
    fn finish(&mut self, position: usize) -> Result<Option<ParsedSentence>, TreebankError> {
        let block = std::mem::take(self);
        if block.tokens.is_empty() {
            return Ok(None);
        }
        let id = block.sentence_id.unwrap_or_else(|| format!("s{}", position));
        ParsedSentence::new(id, block.tokens, block.raw_text).map(Some)
    }
}

fn parse_token_line(line: &str) -> Result<Token, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 7 {
        return Err(format!("expected 7 tab-separated columns, found {}", cols.len()));
    }
    let id = cols[0]
        .parse::<TokenId>()
        .ok()
        .filter(|&id| id > 0)
        .ok_or_else(|| format!("invalid token id {:?}", cols[0]))?;
    let head = cols[5]
        .parse::<TokenId>()
        .map_err(|_| format!("invalid head {:?}", cols[5]))?;
    if cols[1].is_empty() {
        return Err("empty FORM column".to_string());
    }
    Ok(Token {
        id,
        form: cols[1].to_string(),
        lemma: cols[2].to_string(),
        upos: cols[3].to_string(),
        feats: parse_feats(cols[4])?,
        head,
        deprel: KarakaLabel::from(cols[6]),
    })
}

fn parse_feats(col: &str) -> Result<BTreeMap<String, String>, String> {
    let mut feats = BTreeMap::new();
    if col == "_" || col.is_empty() {
        return Ok(feats);
    }
    for pair in col.split('|') {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| format!("feature {:?} is not Key=Value", pair))?;
        feats.insert(k.to_string(), v.to_string());
    }
    Ok(feats)
}

/// Serializes sentences in the same format [`parse_treebank`] reads.
pub fn write_treebank(sentences: &[ParsedSentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        out.push_str(&format!("# sent_id = {}\n", s.sentence_id));
        if let Some(text) = &s.raw_text {
            out.push_str(&format!("# text = {}\n", text));
        }
        for t in &s.tokens {
            let feats = if t.feats.is_empty() {
                "_".to_string()
            } else {
                t.feats
                    .iter()
                    .map(|(k, v)| format!("{}={}", k, v))
                    .collect::<Vec<_>>()
                    .join("|")
            };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                t.id, t.form, t.lemma, t.upos, feats, t.head, t.deprel
            ));
        }
        out.push('\n');
    }
    out
}
