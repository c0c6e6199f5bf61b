//! Pruning of overgenerated questions.
//!
//! Filters only ever drop candidates; they never repair them. They run in
//! [`FilterId`] order and a dropped candidate records the first filter that
//! rejected it.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morphology::{case_of, verb_gender, verb_number, Gender, MarkerTable, Number};
use crate::rules::{QuestionCandidate, RuleId};
use crate::treebank::{KarakaLabel, ParsedSentence, TokenId};

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("candidate {candidate_id} refers to unknown sentence {sentence_id}")]
    UnknownSentence {
        candidate_id: String,
        sentence_id: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FilterId {
    #[serde(rename = "F_ANAPHORA")]
    Anaphora,
    #[serde(rename = "F_GENDER_AGREEMENT")]
    GenderAgreement,
    #[serde(rename = "F_WORD_ORDER")]
    WordOrder,
    #[serde(rename = "F_ALREADY_QUESTION")]
    AlreadyQuestion,
    #[serde(rename = "F_COMPLEX_COMPOUND")]
    ComplexCompound,
}

impl FilterId {
    pub const ALL: [FilterId; 5] = [
        FilterId::Anaphora,
        FilterId::GenderAgreement,
        FilterId::WordOrder,
        FilterId::AlreadyQuestion,
        FilterId::ComplexCompound,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FilterId::Anaphora => "F_ANAPHORA",
            FilterId::GenderAgreement => "F_GENDER_AGREEMENT",
            FilterId::WordOrder => "F_WORD_ORDER",
            FilterId::AlreadyQuestion => "F_ALREADY_QUESTION",
            FilterId::ComplexCompound => "F_COMPLEX_COMPOUND",
        }
    }
}

impl fmt::Display for FilterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FilterId {
    type Err = String;

    /// Accepts `F_WORD_ORDER` or `word_order`, in any case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        let key = upper.strip_prefix("F_").unwrap_or(&upper);
        FilterId::ALL
            .into_iter()
            .find(|f| &f.as_str()[2..] == key)
            .ok_or_else(|| format!("unknown filter {:?}", s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterConfig {
    /// Longest allowed phrase on either side of a `coof` conjunct.
    pub theta: usize,
    pub pronoun_pos_tags: BTreeSet<String>,
    pub enabled: BTreeSet<FilterId>,
    /// Supplies the interrogative inventory.
    pub markers: MarkerTable,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            theta: 5,
            pronoun_pos_tags: ["PRON", "PRP"].iter().map(|s| s.to_string()).collect(),
            enabled: FilterId::ALL.into_iter().collect(),
            markers: MarkerTable::default(),
        }
    }
}

impl FilterConfig {
    pub fn with_theta(mut self, theta: usize) -> Self {
        self.theta = theta;
        self
    }

    pub fn without(mut self, filter: FilterId) -> Self {
        self.enabled.remove(&filter);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub candidate_id: String,
    pub kept: bool,
    pub dropped_by: Option<FilterId>,
    pub detail: String,
}

impl FilterVerdict {
    fn new(c: &QuestionCandidate, filter: FilterId, drop_reason: Option<String>) -> Self {
        match drop_reason {
            Some(detail) => FilterVerdict {
                candidate_id: c.candidate_id.clone(),
                kept: false,
                dropped_by: Some(filter),
                detail,
            },
            None => FilterVerdict {
                candidate_id: c.candidate_id.clone(),
                kept: true,
                dropped_by: None,
                detail: String::new(),
            },
        }
    }
}

/// Maps each candidate token to the source token it was copied from.
///
/// Interrogative spans and the final `?` map to `None`, as do tokens the
/// rule inserted or rewrote. The remaining tokens are aligned to the source
/// forms by longest common subsequence, earliest match first.
fn align(c: &QuestionCandidate, s: &ParsedSentence, m: &MarkerTable) -> Vec<Option<TokenId>> {
    let n = c.tokens.len();
    let mut eligible = vec![true; n];
    for span in m.interrogative_spans(&c.tokens) {
        for i in span {
            eligible[i] = false;
        }
    }
    if let Some(last) = eligible.last_mut() {
        *last = false;
    }
    let src = s.tokens();
    let k = src.len();
    // lcs[i][j]: best match count of candidate[i..] against source[j..].
    let mut lcs = vec![vec![0usize; k + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..k).rev() {
            lcs[i][j] = if eligible[i] && c.tokens[i] == src[j].form {
                lcs[i + 1][j + 1] + 1
            } else {
                lcs[i + 1][j].max(lcs[i][j + 1])
            };
        }
    }
    let mut out = vec![None; n];
    let (mut i, mut j) = (0, 0);
    while i < n && j < k {
        if eligible[i] && c.tokens[i] == src[j].form && lcs[i][j] == lcs[i + 1][j + 1] + 1 {
            out[i] = Some(src[j].id);
            i += 1;
            j += 1;
        } else if lcs[i + 1][j] >= lcs[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn check_anaphora(c: &QuestionCandidate, s: &ParsedSentence, cfg: &FilterConfig) -> Option<String> {
    align(c, s, &cfg.markers).into_iter().flatten().find_map(|id| {
        let t = s.token(id)?;
        (cfg.pronoun_pos_tags.contains(&t.upos) && !cfg.markers.is_interrogative_form(&t.form))
            .then(|| format!("pronoun {:?} (token {}) survives in the question", t.form, t.id))
    })
}

fn check_gender(c: &QuestionCandidate, s: &ParsedSentence, cfg: &FilterConfig) -> Option<String> {
    let verb = s.main_verb();
    let gender = verb_gender(s, verb.id)?;
    let target = s.token(c.target_token_id)?;
    let depth_one = s.children(verb.id);

    // Oblique subject: the verb agrees with the object, but kya is masculine.
    if c.interrogative == "kya" && !case_of(s, target.id, &cfg.markers).is_oblique() && gender == Gender::Fem {
        let oblique_subject = depth_one
            .iter()
            .any(|t| t.deprel == KarakaLabel::K1 && case_of(s, t.id, &cfg.markers).is_oblique());
        if oblique_subject {
            return Some(format!(
                "verb {:?} is feminine in agreement with the replaced object; kya is masculine",
                verb.form
            ));
        }
    }

    // Intransitive verb agreeing with a replaced subject; questions default to masculine singular.
    if c.rule == RuleId::K1 {
        let transitive = depth_one.iter().any(|t| t.deprel == KarakaLabel::K2);
        let plural = verb_number(s, verb.id) == Some(Number::Plur);
        if !transitive && (gender == Gender::Fem || plural) {
            return Some(format!(
                "intransitive verb {:?} keeps the replaced subject's agreement",
                verb.form
            ));
        }
    }
    None
}

fn check_word_order(c: &QuestionCandidate, s: &ParsedSentence, cfg: &FilterConfig) -> Option<String> {
    let spans = cfg.markers.interrogative_spans(&c.tokens);
    let span = spans
        .iter()
        .find(|sp| c.tokens[(*sp).clone()].join(" ") == c.interrogative)
        .or(spans.first())?;
    let verb = s.main_verb().id;
    let verb_index = align(c, s, &cfg.markers).iter().position(|a| *a == Some(verb))?;
    (span.start > verb_index).then(|| {
        format!(
            "interrogative at position {} follows the main verb at position {}",
            span.start + 1,
            verb_index + 1
        )
    })
}

fn check_already_question(c: &QuestionCandidate, s: &ParsedSentence, cfg: &FilterConfig) -> Option<String> {
    let forms = s.forms();
    if let Some(span) = cfg.markers.interrogative_spans(&forms).first() {
        return Some(format!(
            "source sentence already contains interrogative {:?}",
            forms[span.clone()].join(" ")
        ));
    }
    if forms.last() == Some(&"?") {
        return Some("source sentence is a question".to_string());
    }
    let spans = cfg.markers.interrogative_spans(&c.tokens);
    (spans.len() >= 2).then(|| format!("question has {} interrogatives", spans.len()))
}

fn check_complex(_c: &QuestionCandidate, s: &ParsedSentence, cfg: &FilterConfig) -> Option<String> {
    let n = s.len();
    s.tokens()
        .iter()
        .filter(|t| t.deprel == KarakaLabel::Coof)
        .find_map(|t| {
            let before = t.id - 1;
            let after = n - t.id;
            (before > cfg.theta || after > cfg.theta).then(|| {
                format!(
                    "coof at token {} has {} tokens before and {} after (theta {})",
                    t.id, before, after, cfg.theta
                )
            })
        })
}

pub fn filter_anaphora(c: &QuestionCandidate, s: &ParsedSentence, cfg: &FilterConfig) -> FilterVerdict {
    FilterVerdict::new(c, FilterId::Anaphora, check_anaphora(c, s, cfg))
}

pub fn filter_gender_agreement(c: &QuestionCandidate, s: &ParsedSentence, cfg: &FilterConfig) -> FilterVerdict {
    FilterVerdict::new(c, FilterId::GenderAgreement, check_gender(c, s, cfg))
}

pub fn filter_word_order(c: &QuestionCandidate, s: &ParsedSentence, cfg: &FilterConfig) -> FilterVerdict {
    FilterVerdict::new(c, FilterId::WordOrder, check_word_order(c, s, cfg))
}

pub fn filter_already_question(c: &QuestionCandidate, s: &ParsedSentence, cfg: &FilterConfig) -> FilterVerdict {
    FilterVerdict::new(c, FilterId::AlreadyQuestion, check_already_question(c, s, cfg))
}

pub fn filter_complex(c: &QuestionCandidate, s: &ParsedSentence, cfg: &FilterConfig) -> FilterVerdict {
    FilterVerdict::new(c, FilterId::ComplexCompound, check_complex(c, s, cfg))
}

/// Verdict for one candidate from every enabled filter, first failure wins.
pub fn judge(c: &QuestionCandidate, s: &ParsedSentence, cfg: &FilterConfig) -> FilterVerdict {
    for filter in &cfg.enabled {
        let reason = match filter {
            FilterId::Anaphora => check_anaphora(c, s, cfg),
            FilterId::GenderAgreement => check_gender(c, s, cfg),
            FilterId::WordOrder => check_word_order(c, s, cfg),
            FilterId::AlreadyQuestion => check_already_question(c, s, cfg),
            FilterId::ComplexCompound => check_complex(c, s, cfg),
        };
        if reason.is_some() {
            return FilterVerdict::new(c, *filter, reason);
        }
    }
    FilterVerdict::new(c, FilterId::Anaphora, None)
}

/// Filters `candidates` against their source sentences. Returns the kept
/// candidates in input order and one verdict per input candidate.
pub fn run_filters(
    candidates: &[QuestionCandidate],
    sentences: &[ParsedSentence],
    cfg: &FilterConfig,
) -> Result<(Vec<QuestionCandidate>, Vec<FilterVerdict>), FilterError> {
    let by_id: HashMap<&str, &ParsedSentence> = sentences.iter().map(|s| (s.sentence_id(), s)).collect();
    let mut kept = Vec::new();
    let mut verdicts = Vec::with_capacity(candidates.len());
    for c in candidates {
        let s = by_id
            .get(c.sentence_id.as_str())
            .ok_or_else(|| FilterError::UnknownSentence {
                candidate_id: c.candidate_id.clone(),
                sentence_id: c.sentence_id.clone(),
            })?;
        let verdict = judge(c, s, cfg);
        if verdict.kept {
            kept.push(c.clone());
        }
        verdicts.push(verdict);
    }
    Ok((kept, verdicts))
}
