//! Karaka substitution rules.
//!
//! Each rule looks for keywords carrying one karaka relation, asks the
//! lexicon and the marker table which interrogative fits, and rewrites the
//! sentence by putting the interrogative in the keyword's slot. The keyword
//! is replaced together with its chunk: the postpositions and modifiers that
//! depend on it. Every other token is copied verbatim and the terminal
//! danda or full stop becomes ` ?`.
//!
//! Rules deliberately overgenerate. When the lexicon cannot tell which
//! interrogative fits, every licensed variant is emitted and the
//! [filters](crate::filters) prune afterwards. The one exception is
//! [`RuleId::R6Nonliving`], which rewrites the verb group and therefore
//! needs positive evidence that the possessed noun is an object.
//!
//! Only dependents of the main verb are considered, except for `r6`
//! possessors (anywhere in the tree) and the reason clause introduced by
//! `kyunki`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lexicon::{SemanticCategory, SemanticLexicon};
use crate::morphology::{
    case_of, feminine_aux, genitive_interrogative, locative_interrogative, oblique_interrogative,
    CaseStatus, MarkerRole, MarkerTable,
};
use crate::treebank::{KarakaLabel, ParsedSentence, Token, TokenId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "R_K1")]
    K1,
    #[serde(rename = "R_K1S")]
    K1s,
    #[serde(rename = "R_K2")]
    K2,
    #[serde(rename = "R_K2P")]
    K2p,
    #[serde(rename = "R_K3")]
    K3,
    #[serde(rename = "R_RT")]
    Rt,
    #[serde(rename = "R_RH")]
    Rh,
    #[serde(rename = "R_K5")]
    K5,
    #[serde(rename = "R_R6")]
    R6,
    #[serde(rename = "R_R6_NONLIVING")]
    R6Nonliving,
    #[serde(rename = "R_K7S")]
    K7s,
    #[serde(rename = "R_K7T")]
    K7t,
}

impl RuleId {
    pub const ALL: [RuleId; 12] = [
        RuleId::K1,
        RuleId::K1s,
        RuleId::K2,
        RuleId::K2p,
        RuleId::K3,
        RuleId::Rt,
        RuleId::Rh,
        RuleId::K5,
        RuleId::R6,
        RuleId::R6Nonliving,
        RuleId::K7s,
        RuleId::K7t,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::K1 => "R_K1",
            RuleId::K1s => "R_K1S",
            RuleId::K2 => "R_K2",
            RuleId::K2p => "R_K2P",
            RuleId::K3 => "R_K3",
            RuleId::Rt => "R_RT",
            RuleId::Rh => "R_RH",
            RuleId::K5 => "R_K5",
            RuleId::R6 => "R_R6",
            RuleId::R6Nonliving => "R_R6_NONLIVING",
            RuleId::K7s => "R_K7S",
            RuleId::K7t => "R_K7T",
        }
    }

    /// Karaka labels whose candidates this rule produces.
    pub fn karakas(self) -> &'static [KarakaLabel] {
        match self {
            RuleId::K1 => &[KarakaLabel::K1],
            RuleId::K1s => &[KarakaLabel::K1s],
            RuleId::K2 => &[KarakaLabel::K2],
            RuleId::K2p => &[KarakaLabel::K2p],
            RuleId::K3 => &[KarakaLabel::K3],
            RuleId::Rt => &[KarakaLabel::Rt],
            RuleId::Rh => &[KarakaLabel::Rh],
            RuleId::K5 => &[KarakaLabel::K5],
            RuleId::R6 | RuleId::R6Nonliving => &[KarakaLabel::R6],
            RuleId::K7s => &[KarakaLabel::K7s, KarakaLabel::K7p],
            RuleId::K7t => &[KarakaLabel::K7t],
        }
    }

    pub fn all() -> BTreeSet<RuleId> {
        RuleId::ALL.into_iter().collect()
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleId {
    type Err = String;

    /// Accepts `R_K1`, `r_k1` or the bare karaka suffix `k1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        let key = upper.strip_prefix("R_").unwrap_or(&upper);
        RuleId::ALL
            .into_iter()
            .find(|r| &r.as_str()[2..] == key)
            .ok_or_else(|| format!("unknown rule {:?}", s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionCandidate {
    pub candidate_id: String,
    pub sentence_id: String,
    pub rule: RuleId,
    pub karaka: KarakaLabel,
    pub interrogative: String,
    pub tokens: Vec<String>,
    pub variation_group: String,
    pub target_token_id: TokenId,
    pub notes: Vec<String>,
}

impl QuestionCandidate {
    /// The question as a single space-joined string.
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

/// A rule matched a keyword but could not produce a question for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipNote {
    pub sentence_id: String,
    pub rule: RuleId,
    pub target_token_id: TokenId,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Generation {
    pub candidates: Vec<QuestionCandidate>,
    pub skipped: Vec<SkipNote>,
}

const TERMINAL_PUNCT: &[&str] = &["।", ".", "|", "?"];

/// How one candidate is derived from its source sentence.
#[derive(Debug, Clone, Default)]
struct Edit {
    deleted: BTreeSet<TokenId>,
    /// Inserted words go immediately before this source token.
    slot: TokenId,
    inserted: Vec<String>,
    rewrites: Vec<(TokenId, String)>,
}

impl Edit {
    fn render(&self, s: &ParsedSentence) -> Vec<String> {
        let mut out = Vec::with_capacity(s.len() + self.inserted.len() + 1);
        for t in s.tokens() {
            if t.id == self.slot {
                out.extend(self.inserted.iter().cloned());
            }
            if self.deleted.contains(&t.id) {
                continue;
            }
            match self.rewrites.iter().find(|(id, _)| *id == t.id) {
                Some((_, form)) => out.push(form.clone()),
                None => out.push(t.form.clone()),
            }
        }
        if out.last().is_some_and(|last| TERMINAL_PUNCT.contains(&last.as_str())) {
            out.pop();
        }
        out.push("?".to_string());
        out
    }
}

fn words(interrogative: &str) -> Vec<String> {
    interrogative.split(' ').map(str::to_string).collect()
}

/// Replace the chunk headed by `target`, except the subtrees rooted at
/// `keep`, with `interrogative` (plus any trailing words).
fn substitute(
    s: &ParsedSentence,
    target: TokenId,
    keep: &[TokenId],
    interrogative: &str,
    trailing: &[&str],
) -> Edit {
    let kept: BTreeSet<TokenId> = keep.iter().flat_map(|&k| s.subtree(k)).collect();
    let deleted: BTreeSet<TokenId> = s.subtree(target).into_iter().filter(|id| !kept.contains(id)).collect();
    let slot = deleted.first().copied().unwrap_or(target);
    let mut inserted = words(interrogative);
    inserted.extend(trailing.iter().map(|w| w.to_string()));
    Edit {
        deleted,
        slot,
        inserted,
        rewrites: Vec::new(),
    }
}

struct Variant {
    interrogative: &'static str,
    edit: Edit,
}

impl Variant {
    fn chunk(s: &ParsedSentence, target: TokenId, interrogative: &'static str) -> Self {
        Variant {
            interrogative,
            edit: substitute(s, target, &[], interrogative, &[]),
        }
    }
}

struct Engine<'a> {
    s: &'a ParsedSentence,
    lex: &'a SemanticLexicon,
    m: &'a MarkerTable,
    out: Generation,
}

impl<'a> Engine<'a> {
    fn new(s: &'a ParsedSentence, lex: &'a SemanticLexicon, m: &'a MarkerTable) -> Self {
        Engine {
            s,
            lex,
            m,
            out: Generation::default(),
        }
    }

    fn depth_one(&self, labels: &[KarakaLabel]) -> Vec<&'a Token> {
        let s: &'a ParsedSentence = self.s;
        s.children(s.main_verb().id)
            .into_iter()
            .filter(|t| labels.contains(&t.deprel))
            .collect()
    }

    fn category(&self, t: &Token) -> SemanticCategory {
        self.lex.lookup_token(t)
    }

    fn case(&self, t: &Token) -> CaseStatus {
        case_of(self.s, t.id, self.m)
    }

    fn role(&self, marker: &str) -> Option<MarkerRole> {
        self.m.postposition_role(marker)
    }

    fn skip(&mut self, rule: RuleId, target: TokenId, reason: impl Into<String>) {
        self.out.skipped.push(SkipNote {
            sentence_id: self.s.sentence_id().to_string(),
            rule,
            target_token_id: target,
            reason: reason.into(),
        });
    }

    /// Emits candidates for one keyword. Each inner list is a group of
    /// variants in free variation.
    fn emit(
        &mut self,
        rule: RuleId,
        karaka: KarakaLabel,
        target: TokenId,
        groups: Vec<Vec<Variant>>,
        notes: &[&str],
    ) {
        let sid = self.s.sentence_id();
        let mut variant_index = 0;
        for (g, group) in groups.into_iter().enumerate() {
            let variation_group = format!("{}-{}-{}-g{}", sid, rule, target, g);
            for variant in group {
                self.out.candidates.push(QuestionCandidate {
                    candidate_id: format!("{}-{}-{}-{}", sid, rule, target, variant_index),
                    sentence_id: sid.to_string(),
                    rule,
                    karaka: karaka.clone(),
                    interrogative: variant.interrogative.to_string(),
                    tokens: variant.edit.render(self.s),
                    variation_group: variation_group.clone(),
                    target_token_id: target,
                    notes: notes.iter().map(|n| n.to_string()).collect(),
                });
                variant_index += 1;
            }
        }
    }

    fn run(&mut self, rule: RuleId) {
        match rule {
            RuleId::K1 => self.k1(),
            RuleId::K1s => self.k1s(),
            RuleId::K2 => self.k2(),
            RuleId::K2p => self.k2p(),
            RuleId::K3 => self.k3(),
            RuleId::Rt => self.rt(),
            RuleId::Rh => self.rh(),
            RuleId::K5 => self.k5(),
            RuleId::R6 => self.r6(),
            RuleId::R6Nonliving => self.r6_nonliving(),
            RuleId::K7s => self.k7s(),
            RuleId::K7t => self.k7t(),
        }
    }

    /// Direct or oblique replacement decided by case alone.
    fn by_case(&mut self, rule: RuleId, label: KarakaLabel, direct: &'static str, oblique_role: MarkerRole, oblique: &'static str) {
        for t in self.depth_one(std::slice::from_ref(&label)) {
            let interrogative = match self.case(t) {
                CaseStatus::Direct => direct,
                CaseStatus::Oblique(marker) if self.role(&marker) == Some(oblique_role) => oblique,
                CaseStatus::Oblique(marker) => match oblique_interrogative(&marker, self.m) {
                    Some(wh) => wh,
                    None => {
                        self.skip(rule, t.id, format!("no interrogative for marker {:?}", marker));
                        continue;
                    }
                },
            };
            let variant = Variant::chunk(self.s, t.id, interrogative);
            self.emit(rule, label.clone(), t.id, vec![vec![variant]], &[]);
        }
    }

    fn k1(&mut self) {
        self.by_case(RuleId::K1, KarakaLabel::K1, "kaun", MarkerRole::Erg, "kisne");
    }

    fn k2(&mut self) {
        self.by_case(RuleId::K2, KarakaLabel::K2, "kya", MarkerRole::Acc, "kisko");
    }

    fn k1s(&mut self) {
        for t in self.depth_one(&[KarakaLabel::K1s]) {
            let category = self.category(t);
            let choices: &[&'static str] = if category.is_human() {
                &["kaun"]
            } else if category == SemanticCategory::Unknown {
                &["kaun", "kaisa"]
            } else {
                &["kaisa"]
            };
            let group = choices.iter().map(|wh| Variant::chunk(self.s, t.id, wh)).collect();
            self.emit(RuleId::K1s, KarakaLabel::K1s, t.id, vec![group], &[]);
        }
    }

    fn k2p(&mut self) {
        for t in self.depth_one(&[KarakaLabel::K2p]) {
            let group = ["kidhar", "kahan"].iter().map(|wh| Variant::chunk(self.s, t.id, wh)).collect();
            self.emit(RuleId::K2p, KarakaLabel::K2p, t.id, vec![group], &[]);
        }
    }

    fn k3(&mut self) {
        for t in self.depth_one(&[KarakaLabel::K3]) {
            let marker = match self.case(t) {
                CaseStatus::Oblique(marker) if self.role(&marker) == Some(MarkerRole::Ins) => marker,
                other => {
                    self.skip(RuleId::K3, t.id, format!("k3 without instrumental marker ({:?})", other));
                    continue;
                }
            };
            let choices: &[&'static str] = if marker.contains(' ') {
                &["kiske dwaaraa"]
            } else {
                match self.category(t) {
                    SemanticCategory::Path | SemanticCategory::Unknown => &["kisse", "kisse hokar"],
                    _ => &["kisse"],
                }
            };
            let group = choices.iter().map(|wh| Variant::chunk(self.s, t.id, wh)).collect();
            self.emit(RuleId::K3, KarakaLabel::K3, t.id, vec![group], &[]);
        }
    }

    fn rt(&mut self) {
        for t in self.depth_one(&[KarakaLabel::Rt]) {
            let category = self.category(t);
            // "for whom" and "why" ask different things, so they never share a group.
            let groups: Vec<Vec<Variant>> = if category.is_human() {
                vec![vec![Variant::chunk(self.s, t.id, "kiske liye")]]
            } else if category == SemanticCategory::Unknown {
                vec![
                    vec![Variant::chunk(self.s, t.id, "kiske liye")],
                    vec![Variant::chunk(self.s, t.id, "kyon")],
                ]
            } else {
                vec![vec![Variant::chunk(self.s, t.id, "kyon")]]
            };
            self.emit(RuleId::Rt, KarakaLabel::Rt, t.id, groups, &[]);
        }
    }

    fn rh(&mut self) {
        let s = self.s;
        let verb = s.main_verb().id;
        let m = self.m;
        for t in s.tokens().iter().filter(|t| m.is_because(&t.form)) {
            if t.id == verb {
                self.skip(RuleId::Rh, t.id, "because-term is the main verb");
                continue;
            }
            // Climb to the dependent of the main verb that holds the clause.
            let mut chunk = t.id;
            while let Some(head) = s.token(chunk).map(|c| c.head) {
                if head == verb || head == 0 {
                    break;
                }
                chunk = head;
            }
            let edit = Edit {
                deleted: s.subtree(chunk).into_iter().collect(),
                slot: verb,
                inserted: words("kyon"),
                rewrites: Vec::new(),
            };
            let variant = Variant {
                interrogative: "kyon",
                edit,
            };
            self.emit(RuleId::Rh, KarakaLabel::Rh, t.id, vec![vec![variant]], &[]);
        }
    }

    fn k5(&mut self) {
        for t in self.depth_one(&[KarakaLabel::K5]) {
            match self.case(t) {
                CaseStatus::Oblique(marker)
                    if self.role(&marker) == Some(MarkerRole::Ins) && !marker.contains(' ') => {}
                other => {
                    self.skip(RuleId::K5, t.id, format!("k5 requires the marker se, found {:?}", other));
                    continue;
                }
            }
            let psp: Vec<TokenId> = self.s.psp_children(t.id).iter().map(|p| p.id).collect();
            // kahan/kidhar keep the source marker: "kahan se".
            let locative = |wh: &'static str| Variant {
                interrogative: wh,
                edit: substitute(self.s, t.id, &psp, wh, &[]),
            };
            let groups = match self.category(t) {
                SemanticCategory::Place => vec![vec![locative("kahan"), locative("kidhar")]],
                SemanticCategory::Unknown => vec![
                    vec![Variant::chunk(self.s, t.id, "kisse")],
                    vec![locative("kahan"), locative("kidhar")],
                ],
                _ => vec![vec![Variant::chunk(self.s, t.id, "kisse")]],
            };
            self.emit(RuleId::K5, KarakaLabel::K5, t.id, groups, &[]);
        }
    }

    fn r6(&mut self) {
        let s = self.s;
        for t in s.tokens().iter().filter(|t| t.deprel == KarakaLabel::R6) {
            let marker = match self.case(t) {
                CaseStatus::Oblique(marker) => marker,
                CaseStatus::Direct => {
                    self.skip(RuleId::R6, t.id, "r6 without genitive postposition");
                    continue;
                }
            };
            let Ok(wh) = genitive_interrogative(&marker) else {
                self.skip(RuleId::R6, t.id, format!("r6 marker {:?} is not genitive", marker));
                continue;
            };
            let variant = Variant::chunk(s, t.id, wh);
            self.emit(RuleId::R6, KarakaLabel::R6, t.id, vec![vec![variant]], &[]);
        }
    }

    fn r6_nonliving(&mut self) {
        let s = self.s;
        let verb = s.main_verb().id;
        for possessed in s.tokens() {
            if possessed.id == verb {
                continue;
            }
            let possessor = s.children(possessed.id).into_iter().find(|c| {
                c.deprel == KarakaLabel::R6
                    && matches!(self.case(c), CaseStatus::Oblique(ref m) if genitive_interrogative(m).is_ok())
            });
            let Some(possessor) = possessor else { continue };
            match self.category(possessed) {
                SemanticCategory::Nonliving => {}
                SemanticCategory::Unknown => {
                    self.skip(
                        RuleId::R6Nonliving,
                        possessed.id,
                        "possessed noun not known to be NONLIVING",
                    );
                    continue;
                }
                _ => continue,
            }

            let mut keep = vec![possessor.id];
            keep.extend(s.psp_children(possessed.id).iter().map(|p| p.id));
            let mut edit = substitute(s, possessed.id, &keep, "kaun si", &["vastu"]);

            // vastu is feminine: the genitive and the progressive auxiliaries follow it.
            for p in s.psp_children(possessor.id) {
                match p.form.as_str() {
                    "ka" | "ke" => edit.rewrites.push((p.id, "ki".to_string())),
                    "का" | "के" => edit.rewrites.push((p.id, "की".to_string())),
                    _ => {}
                }
            }
            for aux in s.children(verb) {
                if let Some(fem) = feminine_aux(&aux.form) {
                    edit.rewrites.push((aux.id, fem.to_string()));
                }
            }
            let variant = Variant {
                interrogative: "kaun si",
                edit,
            };
            self.emit(
                RuleId::R6Nonliving,
                KarakaLabel::R6,
                possessed.id,
                vec![vec![variant]],
                &["genitive and auxiliaries made feminine to agree with vastu"],
            );
        }
    }

    fn k7s(&mut self) {
        for t in self.depth_one(&[KarakaLabel::K7s, KarakaLabel::K7p]) {
            let mut notes = Vec::new();
            if t.deprel == KarakaLabel::K7p {
                notes.push("k7p routed through the k7s rule");
            }
            let mut choices: Vec<&'static str> = vec!["kahan", "kidhar"];
            match self.case(t) {
                CaseStatus::Oblique(marker) if self.role(&marker) == Some(MarkerRole::Loc) => {
                    choices.push(locative_interrogative(&marker));
                }
                _ => notes.push("no locative marker; kis mein/kis par not generated"),
            }
            let group = choices.iter().map(|wh| Variant::chunk(self.s, t.id, wh)).collect();
            self.emit(RuleId::K7s, t.deprel.clone(), t.id, vec![group], &notes);
        }
    }

    fn k7t(&mut self) {
        for t in self.depth_one(&[KarakaLabel::K7t]) {
            let mut choices = vec!["kab"];
            if matches!(self.category(t), SemanticCategory::Date | SemanticCategory::Unknown) {
                choices.extend(["kis din", "konse din"]);
            }
            let group = choices.iter().map(|wh| Variant::chunk(self.s, t.id, wh)).collect();
            self.emit(RuleId::K7t, KarakaLabel::K7t, t.id, vec![group], &[]);
        }
    }
}

fn apply(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable, rule: RuleId) -> Vec<QuestionCandidate> {
    let mut engine = Engine::new(s, lex, m);
    engine.run(rule);
    engine.out.candidates
}

/// `kisne` for ergative subjects, `kaun` for direct ones.
pub fn gen_k1(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable) -> Vec<QuestionCandidate> {
    apply(s, lex, m, RuleId::K1)
}

/// `kaun` for people, `kaisa` for properties.
pub fn gen_k1s(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable) -> Vec<QuestionCandidate> {
    apply(s, lex, m, RuleId::K1s)
}

/// `kisko` with the accusative marker, `kya` without.
pub fn gen_k2(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable) -> Vec<QuestionCandidate> {
    apply(s, lex, m, RuleId::K2)
}

pub fn gen_k2p(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable) -> Vec<QuestionCandidate> {
    apply(s, lex, m, RuleId::K2p)
}

pub fn gen_k3(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable) -> Vec<QuestionCandidate> {
    apply(s, lex, m, RuleId::K3)
}

pub fn gen_rt(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable) -> Vec<QuestionCandidate> {
    apply(s, lex, m, RuleId::Rt)
}

/// Drops the `kyunki` clause and asks `kyon` before the main verb.
pub fn gen_rh(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable) -> Vec<QuestionCandidate> {
    apply(s, lex, m, RuleId::Rh)
}

pub fn gen_k5(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable) -> Vec<QuestionCandidate> {
    apply(s, lex, m, RuleId::K5)
}

pub fn gen_r6(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable) -> Vec<QuestionCandidate> {
    apply(s, lex, m, RuleId::R6)
}

pub fn gen_r6_nonliving(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable) -> Vec<QuestionCandidate> {
    apply(s, lex, m, RuleId::R6Nonliving)
}

/// Also handles `k7p` keywords.
pub fn gen_k7s(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable) -> Vec<QuestionCandidate> {
    apply(s, lex, m, RuleId::K7s)
}

pub fn gen_k7t(s: &ParsedSentence, lex: &SemanticLexicon, m: &MarkerTable) -> Vec<QuestionCandidate> {
    apply(s, lex, m, RuleId::K7t)
}

/// Runs every enabled rule in [`RuleId`] order and keeps the notes for
/// keywords that matched a rule but produced nothing.
pub fn generate_with_notes(
    s: &ParsedSentence,
    lex: &SemanticLexicon,
    m: &MarkerTable,
    enabled: &BTreeSet<RuleId>,
) -> Generation {
    let mut engine = Engine::new(s, lex, m);
    for rule in enabled {
        engine.run(*rule);
    }
    engine.out
}

pub fn generate_all(
    s: &ParsedSentence,
    lex: &SemanticLexicon,
    m: &MarkerTable,
    enabled: &BTreeSet<RuleId>,
) -> Vec<QuestionCandidate> {
    generate_with_notes(s, lex, m, enabled).candidates
}
