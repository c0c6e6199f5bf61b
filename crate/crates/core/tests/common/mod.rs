#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use karaka_qg::evaluation::RatingRecord;
use karaka_qg::filters::{FilterId, FilterVerdict};
use karaka_qg::lexicon::{SemanticCategory, SemanticLexicon};
use karaka_qg::rules::{QuestionCandidate, RuleId};
use karaka_qg::treebank::{KarakaLabel, ParsedSentence};
use karaka_qg::MarkerTable;
use proptest::prelude::*;


pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn texts(cands: &[QuestionCandidate]) -> Vec<String> {
    cands.iter().map(QuestionCandidate::text).collect()
}

/// Built-in lexicon with `word` forced to `cat`.
pub fn lex_with(entries: &[(&str, SemanticCategory)]) -> SemanticLexicon {
    let mut lex = SemanticLexicon::builtin();
    for (word, cat) in entries {
        lex.insert(word, *cat);
    }
    lex
}

// ---------------------------------------------------------------------------
// One rule, hand-built parses, expected question strings.

pub struct GoldenExample {
    pub sentence: ParsedSentence,
    pub lexicon: SemanticLexicon,
    pub expected: Vec<&'static str>,
}

pub struct GoldenCase {
    pub name: &'static str,
    pub rule: RuleId,
    pub examples: Vec<GoldenExample>,
}

fn ex(sentence: ParsedSentence, lexicon: SemanticLexicon, expected: &[&'static str]) -> GoldenExample {
    GoldenExample {
        sentence,
        lexicon,
        expected: expected.to_vec(),
    }
}

fn b(id: &str) -> karaka_qg::treebank::SentenceBuilder {
    ParsedSentence::builder(id)
}

pub fn golden_cases() -> Vec<GoldenCase> {
    use SemanticCategory::*;
    let plain = || lex_with(&[]);
    vec![
        GoldenCase {
            name: "k1 subject",
            rule: RuleId::K1,
            examples: vec![
                ex(
                    b("k1a")
                        .token("X", "PROPN", 5, "k1")
                        .token("ne", "ADP", 1, "psp")
                        .token("Y", "NOUN", 5, "k2")
                        .token("ko", "ADP", 3, "psp")
                        .token("khaya", "VERB", 0, "root")
                        .build()
                        .unwrap(),
                    plain(),
                    &["kisne Y ko khaya ?"],
                ),
                ex(
                    b("k1b")
                        .token("X", "PROPN", 4, "k1")
                        .token("Y", "NOUN", 4, "k2")
                        .token("ko", "ADP", 2, "psp")
                        .token("kha", "VERB", 0, "root")
                        .token("raha", "AUX", 4, "lwg__aux")
                        .token("hai", "AUX", 4, "lwg__aux")
                        .build()
                        .unwrap(),
                    plain(),
                    &["kaun Y ko kha raha hai ?"],
                ),
            ],
        },
        GoldenCase {
            name: "k1s copula complement",
            rule: RuleId::K1s,
            examples: vec![
                ex(
                    b("k1sa")
                        .token("raam", "PROPN", 4, "k1")
                        .token("ek", "DET", 3, "nmod__adj")
                        .token("dauctar", "NOUN", 4, "k1s")
                        .token("hai", "VERB", 0, "root")
                        .build()
                        .unwrap(),
                    plain(),
                    &["raam kaun hai ?"],
                ),
                ex(
                    b("k1sb")
                        .token("raam", "PROPN", 3, "k1")
                        .token("geela", "ADJ", 3, "k1s")
                        .token("hai", "VERB", 0, "root")
                        .build()
                        .unwrap(),
                    plain(),
                    &["raam kaisa hai ?"],
                ),
            ],
        },
        GoldenCase {
            name: "k2 object",
            rule: RuleId::K2,
            examples: vec![
                ex(
                    b("k2a")
                        .token("X", "PROPN", 4, "k1")
                        .token("Y", "NOUN", 4, "k2")
                        .token("ko", "ADP", 2, "psp")
                        .token("khaataa", "VERB", 0, "root")
                        .token("hai", "AUX", 4, "lwg__aux")
                        .build()
                        .unwrap(),
                    plain(),
                    &["X kisko khaataa hai ?"],
                ),
                ex(
                    b("k2b")
                        .token("X", "PROPN", 3, "k1")
                        .token("Y", "NOUN", 3, "k2")
                        .token("khaataa", "VERB", 0, "root")
                        .token("hai", "AUX", 3, "lwg__aux")
                        .build()
                        .unwrap(),
                    plain(),
                    &["X kya khaataa hai ?"],
                ),
            ],
        },
        GoldenCase {
            // The auxiliary "thi" is kept: only the keyword chunk is replaced.
            name: "k2p goal",
            rule: RuleId::K2p,
            examples: vec![ex(
                b("k2p")
                    .token("X", "PROPN", 3, "k1")
                    .token("Y", "NOUN", 3, "k2p")
                    .token("gayi", "VERB", 0, "root")
                    .token("thi", "AUX", 3, "lwg__aux")
                    .build()
                    .unwrap(),
                plain(),
                &["X kidhar gayi thi ?", "X kahan gayi thi ?"],
            )],
        },
        GoldenCase {
            name: "k3 instrument",
            rule: RuleId::K3,
            examples: vec![
                ex(
                    b("k3a")
                        .token("X", "PROPN", 5, "k1")
                        .token("Y", "NOUN", 5, "k3")
                        .token("ke", "ADP", 2, "psp")
                        .token("dwaaraa", "ADP", 2, "psp")
                        .token("jaati", "VERB", 0, "root")
                        .token("hai", "AUX", 5, "lwg__aux")
                        .build()
                        .unwrap(),
                    plain(),
                    &["X kiske dwaaraa jaati hai ?"],
                ),
                ex(
                    b("k3b")
                        .token("X", "PROPN", 4, "k1")
                        .token("Y", "NOUN", 4, "k3")
                        .token("se", "ADP", 2, "psp")
                        .token("jaati", "VERB", 0, "root")
                        .token("hai", "AUX", 4, "lwg__aux")
                        .build()
                        .unwrap(),
                    lex_with(&[("Y", Path)]),
                    &["X kisse jaati hai ?", "X kisse hokar jaati hai ?"],
                ),
            ],
        },
        GoldenCase {
            name: "rt purpose",
            rule: RuleId::Rt,
            examples: [(Human, "X ne kiske liye likha ?"), (Nonliving, "X ne kyon likha ?")]
                .into_iter()
                .map(|(cat, out)| {
                    ex(
                        b("rt")
                            .token("X", "PROPN", 6, "k1")
                            .token("ne", "ADP", 1, "psp")
                            .token("Y", "NOUN", 6, "rt")
                            .token("ke", "ADP", 3, "psp")
                            .token("liye", "ADP", 3, "psp")
                            .token("likha", "VERB", 0, "root")
                            .build()
                            .unwrap(),
                        lex_with(&[("Y", cat)]),
                        &[out],
                    )
                })
                .collect(),
        },
        GoldenCase {
            name: "rh reason",
            rule: RuleId::Rh,
            examples: vec![ex(
                b("rh")
                    .token("X", "PROPN", 4, "k1")
                    .token("ne", "ADP", 1, "psp")
                    .token("Z", "NOUN", 4, "k2")
                    .token("kiya", "VERB", 0, "root")
                    .token("kyunki", "SCONJ", 4, "rh")
                    .token("Y", "NOUN", 5, "ccof")
                    .build()
                    .unwrap(),
                plain(),
                &["X ne Z kyon kiya ?"],
            )],
        },
        GoldenCase {
            name: "k5 source",
            rule: RuleId::K5,
            examples: [
                (Place, vec!["X kahan se bhaagaa ?", "X kidhar se bhaagaa ?"]),
                (Human, vec!["X kisse bhaagaa ?"]),
            ]
            .into_iter()
            .map(|(cat, out)| {
                ex(
                    b("k5")
                        .token("X", "PROPN", 4, "k1")
                        .token("Y", "NOUN", 4, "k5")
                        .token("se", "ADP", 2, "psp")
                        .token("bhaagaa", "VERB", 0, "root")
                        .build()
                        .unwrap(),
                    lex_with(&[("Y", cat)]),
                    &out,
                )
            })
            .collect(),
        },
        GoldenCase {
            name: "r6 possessor",
            rule: RuleId::R6,
            examples: [("ke", "rahe", "hain", "kiske Y ja rahe hain ?"), ("ki", "rahi", "hai", "kiski Y ja rahi hai ?")]
                .into_iter()
                .map(|(gen, aux, cop, out)| {
                    ex(
                        b("r6")
                            .token("X", "PROPN", 3, "r6")
                            .token(gen, "ADP", 1, "psp")
                            .token("Y", "NOUN", 4, "k1")
                            .token("ja", "VERB", 0, "root")
                            .token(aux, "AUX", 4, "lwg__aux")
                            .token(cop, "AUX", 4, "lwg__aux")
                            .build()
                            .unwrap(),
                        plain(),
                        &[out],
                    )
                })
                .collect(),
        },
        GoldenCase {
            name: "r6 non-living possessed",
            rule: RuleId::R6Nonliving,
            examples: vec![ex(
                b("r6nl")
                    .token("X", "PROPN", 3, "r6")
                    .token("ka", "ADP", 1, "psp")
                    .token("Y", "NOUN", 4, "k1")
                    .token("ja", "VERB", 0, "root")
                    .token("raha", "AUX", 4, "lwg__aux")
                    .token("hain", "AUX", 4, "lwg__aux")
                    .build()
                    .unwrap(),
                lex_with(&[("Y", Nonliving)]),
                &["X ki kaun si vastu ja rahi hain ?"],
            )],
        },
        GoldenCase {
            name: "k7s place",
            rule: RuleId::K7s,
            examples: [
                ("mein", ["X kahan baithi thi ?", "X kidhar baithi thi ?", "X kis mein baithi thi ?"]),
                ("par", ["X kahan baithi thi ?", "X kidhar baithi thi ?", "X kis par baithi thi ?"]),
            ]
            .into_iter()
            .map(|(loc, out)| {
                ex(
                    b("k7s")
                        .token("X", "PROPN", 4, "k1")
                        .token("Y", "NOUN", 4, "k7s")
                        .token(loc, "ADP", 2, "psp")
                        .token("baithi", "VERB", 0, "root")
                        .token("thi", "AUX", 4, "lwg__aux")
                        .build()
                        .unwrap(),
                    plain(),
                    &out,
                )
            })
            .collect(),
        },
        GoldenCase {
            name: "k7t time",
            rule: RuleId::K7t,
            examples: vec![ex(
                b("k7t")
                    .token("X", "PROPN", 4, "k1")
                    .token("Y", "NOUN", 4, "k7t")
                    .token("ko", "ADP", 2, "psp")
                    .token("jaegi", "VERB", 0, "root")
                    .build()
                    .unwrap(),
                lex_with(&[("Y", Date)]),
                &["X kab jaegi ?", "X kis din jaegi ?", "X konse din jaegi ?"],
            )],
        },
    ]
}

pub fn ex1() -> ParsedSentence {
    ParsedSentence::builder("ex1")
        .text("kal raam ne raavan ko mara")
        .token("kal", "NOUN", 6, "k7t")
        .token("raam", "PROPN", 6, "k1")
        .token("ne", "ADP", 2, "psp")
        .token("raavan", "PROPN", 6, "k2")
        .token("ko", "ADP", 4, "psp")
        .token("mara", "VERB", 0, "root")
        .build()
        .unwrap()
}

// ---------------------------------------------------------------------------
// Ratings fixture matching the published summary tables.
//
// Candidates fall into three blocks: A = the 30 k1 candidates (all kept,
// every annotator rates each), B = the other kept candidates, C = the
// dropped ones. B and C are rated sparsely; each block's scores are spread
// as evenly as the block sum allows. The search below finds block sizes
// and sums whose means and lower medians round to the published values.

pub const TABLE_COUNTS: [(&str, usize); 10] = [
    ("k1", 30),
    ("k1s", 7),
    ("k2", 17),
    ("k2p", 2),
    ("rt", 4),
    ("rh", 1),
    ("k5", 6),
    ("r6", 13),
    ("k7t", 14),
    ("k7p", 18),
];
pub const TABLE_TOTAL: usize = 112;
pub const TABLE_KEPT: usize = 68;
pub const ANNOTATORS: usize = 5;

pub const K1_SYNTAX: (f64, u8) = (4.28, 5);
pub const K1_SEMANTIC: (f64, u8) = (3.76, 4);
pub const TOTAL_SYNTAX: (f64, u8) = (3.019, 3);
pub const TOTAL_SEMANTIC: (f64, u8) = (3.336, 4);
pub const KEPT_SYNTAX: f64 = 3.244;
pub const KEPT_SEMANTIC: f64 = 3.726;

/// Published values carry three decimals.
pub const TOLERANCE: f64 = 5e-4;

fn rounds_to(sum: usize, n: usize, target: f64) -> bool {
    (sum as f64 / n as f64 - target).abs() < TOLERANCE
}

fn lower_median_of(mut v: Vec<u8>) -> u8 {
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

/// `n` scores in 1..=5 summing to `sum`, as even as possible.
fn balanced(n: usize, sum: usize) -> Vec<u8> {
    let q = sum / n;
    let r = sum % n;
    let mut v = vec![q as u8 + 1; r];
    v.extend(std::iter::repeat_n(q as u8, n - r));
    v
}

/// `n` scores in 3..=5 with the given mean and lower median, using as few
/// fives as possible.
fn k1_block(n: usize, mean: f64, median: u8) -> Vec<u8> {
    let sum = (mean * n as f64).round() as usize;
    for fives in 0..=n {
        for fours in (0..=n - fives).rev() {
            let threes = n - fives - fours;
            if fives * 5 + fours * 4 + threes * 3 != sum {
                continue;
            }
            let mut v = vec![5u8; fives];
            v.extend(std::iter::repeat_n(4, fours));
            v.extend(std::iter::repeat_n(3, threes));
            if lower_median_of(v.clone()) == median {
                return v;
            }
        }
    }
    panic!("no k1 block for mean {} median {}", mean, median)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSolution {
    pub k1_syntax: Vec<u8>,
    pub k1_semantic: Vec<u8>,
    pub kept_ratings: usize,
    pub dropped_ratings: usize,
    pub kept_syntax: Vec<u8>,
    pub kept_semantic: Vec<u8>,
    pub dropped_syntax: Vec<u8>,
    pub dropped_semantic: Vec<u8>,
}

/// Brute-force search for block sizes and sums.
pub fn solve_table() -> TableSolution {
    let n_k1 = TABLE_COUNTS[0].1;
    let a_n = n_k1 * ANNOTATORS;
    let a_syn = k1_block(a_n, K1_SYNTAX.0, K1_SYNTAX.1);
    let a_sem = k1_block(a_n, K1_SEMANTIC.0, K1_SEMANTIC.1);
    let a_syn_sum: usize = a_syn.iter().map(|&x| x as usize).sum();
    let a_sem_sum: usize = a_sem.iter().map(|&x| x as usize).sum();

    let b_cands = TABLE_KEPT - n_k1;
    let c_cands = TABLE_TOTAL - TABLE_KEPT;
    for nb in b_cands..=b_cands * ANNOTATORS {
        let kept_n = a_n + nb;
        let sb_syn: Vec<usize> = (nb..=5 * nb).filter(|s| rounds_to(a_syn_sum + s, kept_n, KEPT_SYNTAX)).collect();
        let sb_sem: Vec<usize> = (nb..=5 * nb).filter(|s| rounds_to(a_sem_sum + s, kept_n, KEPT_SEMANTIC)).collect();
        if sb_syn.is_empty() || sb_sem.is_empty() {
            continue;
        }
        for nc in c_cands..=c_cands * ANNOTATORS {
            let total_n = kept_n + nc;
            for &bs in &sb_syn {
                for &bm in &sb_sem {
                    for cs in nc..=5 * nc {
                        if !rounds_to(a_syn_sum + bs + cs, total_n, TOTAL_SYNTAX.0) {
                            continue;
                        }
                        for cm in nc..=5 * nc {
                            if !rounds_to(a_sem_sum + bm + cm, total_n, TOTAL_SEMANTIC.0) {
                                continue;
                            }
                            let sol = TableSolution {
                                k1_syntax: a_syn.clone(),
                                k1_semantic: a_sem.clone(),
                                kept_ratings: nb,
                                dropped_ratings: nc,
                                kept_syntax: balanced(nb, bs),
                                kept_semantic: balanced(nb, bm),
                                dropped_syntax: balanced(nc, cs),
                                dropped_semantic: balanced(nc, cm),
                            };
                            let all_syn = [&sol.k1_syntax[..], &sol.kept_syntax, &sol.dropped_syntax].concat();
                            let all_sem = [&sol.k1_semantic[..], &sol.kept_semantic, &sol.dropped_semantic].concat();
                            if lower_median_of(all_syn) == TOTAL_SYNTAX.1 && lower_median_of(all_sem) == TOTAL_SEMANTIC.1 {
                                return sol;
                            }
                        }
                    }
                }
            }
        }
    }
    panic!("no ratings layout matches the target tables")
}

fn table_candidate(n: usize, karaka: &str) -> QuestionCandidate {
    let label = KarakaLabel::from(karaka);
    let rule = RuleId::ALL
        .into_iter()
        .find(|r| r.karakas().contains(&label))
        .expect("rule for karaka");
    QuestionCandidate {
        candidate_id: format!("t{:03}", n),
        sentence_id: format!("t{:03}", n),
        rule,
        karaka: label,
        interrogative: "kaun".into(),
        tokens: vec!["kaun".into(), "?".into()],
        variation_group: format!("t{:03}-g0", n),
        target_token_id: 1,
        notes: vec![],
    }
}

pub struct TableFixture {
    pub candidates: Vec<QuestionCandidate>,
    pub verdicts: Vec<FilterVerdict>,
    pub ratings: Vec<RatingRecord>,
}

/// Lays `syntax`/`semantic` over `cands` round-robin: rating `i` goes to
/// candidate `i % len` from annotator `i / len`.
fn spread(cands: &[&QuestionCandidate], syntax: &[u8], semantic: &[u8], out: &mut Vec<RatingRecord>) {
    assert_eq!(syntax.len(), semantic.len());
    assert!(syntax.len() <= cands.len() * ANNOTATORS);
    for (i, (&syn, &sem)) in syntax.iter().zip(semantic).enumerate() {
        out.push(RatingRecord {
            candidate_id: cands[i % cands.len()].candidate_id.clone(),
            annotator_id: format!("a{}", i / cands.len() + 1),
            syntax: syn,
            semantic: sem,
        });
    }
}

pub fn table_fixture() -> TableFixture {
    let sol = solve_table();
    let mut candidates = Vec::new();
    for (karaka, count) in TABLE_COUNTS {
        for _ in 0..count {
            let n = candidates.len() + 1;
            candidates.push(table_candidate(n, karaka));
        }
    }
    // k1 first, then the next 38 kept, the remaining 44 dropped.
    let kept_ids: Vec<bool> = (0..candidates.len()).map(|i| i < TABLE_KEPT).collect();
    let verdicts = candidates
        .iter()
        .zip(&kept_ids)
        .enumerate()
        .map(|(i, (c, &kept))| {
            let dropped_by = (!kept).then(|| FilterId::ALL[i % FilterId::ALL.len()]);
            FilterVerdict {
                candidate_id: c.candidate_id.clone(),
                kept,
                dropped_by,
                detail: dropped_by.map(|f| format!("dropped by {}", f)).unwrap_or_default(),
            }
        })
        .collect();

    let n_k1 = TABLE_COUNTS[0].1;
    let a: Vec<&QuestionCandidate> = candidates[..n_k1].iter().collect();
    let b: Vec<&QuestionCandidate> = candidates[n_k1..TABLE_KEPT].iter().collect();
    let c: Vec<&QuestionCandidate> = candidates[TABLE_KEPT..].iter().collect();
    let mut ratings = Vec::new();
    spread(&a, &sol.k1_syntax, &sol.k1_semantic, &mut ratings);
    spread(&b, &sol.kept_syntax, &sol.kept_semantic, &mut ratings);
    spread(&c, &sol.dropped_syntax, &sol.dropped_semantic, &mut ratings);
    TableFixture {
        candidates,
        verdicts,
        ratings,
    }
}

pub fn ratings_csv(ratings: &[RatingRecord]) -> String {
    let mut out = String::from("candidate_id,annotator_id,syntax,semantic\n");
    for r in ratings {
        out.push_str(&format!("{},{},{},{}\n", r.candidate_id, r.annotator_id, r.syntax, r.semantic));
    }
    out
}

pub fn jsonl<T: serde::Serialize>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| serde_json::to_string(x).unwrap() + "\n")
        .collect()
}

// ---------------------------------------------------------------------------
// Random sentences for the property suites.

const NOUNS: &[&str] = &[
    "raam", "sita", "ghar", "dilli", "kal", "sadak", "kitaab", "kalam", "billi", "geela", "mohan", "dost", "seb", "pyaas",
    "mez",
];
const VERBS: &[&str] = &["khaya", "gaya", "gayi", "likha", "baithi", "jaega", "mara", "dikhani"];
const AUXES: &[&str] = &["raha", "rahi", "rahe", "tha", "thi", "the", "hai", "hain"];
const KARAKAS: &[&str] = &["k1", "k1s", "k2", "k2p", "k3", "rt", "k5", "k7s", "k7p", "k7t", "k4", "adv"];
const MARKERS: &[&str] = &["", "", "ne", "ko", "se", "ke dwaaraa", "ke liye", "mein", "par"];
const GENITIVES: &[&str] = &["", "ka", "ke", "ki"];

#[derive(Debug, Clone)]
pub struct ChunkShape {
    pub noun: &'static str,
    pub deprel: &'static str,
    pub marker: &'static str,
    pub possessor: Option<(&'static str, &'static str)>,
    pub pronoun: bool,
}

#[derive(Debug, Clone)]
pub struct SentenceShape {
    pub chunks: Vec<ChunkShape>,
    pub verb: &'static str,
    pub aux: Vec<&'static str>,
    pub verb_gender: Option<&'static str>,
    pub because: Option<&'static str>,
    pub coof_tail: usize,
    pub danda: bool,
}

fn chunk_shape() -> impl Strategy<Value = ChunkShape> {
    (
        prop::sample::select(NOUNS),
        prop::sample::select(KARAKAS),
        prop::sample::select(MARKERS),
        prop::option::weighted(0.3, (prop::sample::select(NOUNS), prop::sample::select(GENITIVES))),
        prop::bool::weighted(0.1),
    )
        .prop_map(|(noun, deprel, marker, possessor, pronoun)| ChunkShape {
            noun,
            deprel,
            marker,
            possessor: possessor.filter(|(_, g)| !g.is_empty()),
            pronoun,
        })
}

pub fn sentence_shape() -> impl Strategy<Value = SentenceShape> {
    (
        prop::collection::vec(chunk_shape(), 0..5),
        prop::sample::select(VERBS),
        prop::collection::vec(prop::sample::select(AUXES), 0..3),
        prop::option::of(prop::sample::select(&["Masc", "Fem"][..])),
        prop::option::weighted(0.2, prop::sample::select(NOUNS)),
        prop::option::weighted(0.2, 1usize..9),
        any::<bool>(),
    )
        .prop_map(|(chunks, verb, aux, verb_gender, because, coof_tail, danda)| SentenceShape {
            chunks,
            verb,
            aux,
            verb_gender,
            because,
            coof_tail: coof_tail.unwrap_or(0),
            danda,
        })
}

/// Builds a valid parse: chunks, then the verb with its auxiliaries,
/// then an optional `kyunki` clause, coordinated tail and danda.
pub fn build_sentence(id: &str, shape: &SentenceShape) -> ParsedSentence {
    struct Row {
        form: String,
        upos: &'static str,
        head: Head,
        deprel: &'static str,
    }
    enum Head {
        Verb,
        Row(usize),
        Root,
    }
    let mut rows: Vec<Row> = Vec::new();
    let push = |rows: &mut Vec<Row>, form: &str, upos: &'static str, head: Head, deprel: &'static str| {
        rows.push(Row {
            form: form.to_string(),
            upos,
            head,
            deprel,
        });
        rows.len()
    };
    for c in &shape.chunks {
        let possessor = c.possessor.map(|(p, g)| {
            let pid = rows.len() + 1;
            (pid, p, g)
        });
        if let Some((pid, p, g)) = possessor {
            // Possessor attaches to the noun pushed right after its marker.
            let noun_id = pid + 2;
            push(&mut rows, p, "PROPN", Head::Row(noun_id), "r6");
            push(&mut rows, g, "ADP", Head::Row(pid), "psp");
        }
        let upos = if c.pronoun { "PRON" } else { "NOUN" };
        let noun_id = push(&mut rows, c.noun, upos, Head::Verb, c.deprel);
        for m in c.marker.split_whitespace() {
            push(&mut rows, m, "ADP", Head::Row(noun_id), "psp");
        }
    }
    let verb_id = push(&mut rows, shape.verb, "VERB", Head::Root, "root");
    for a in &shape.aux {
        push(&mut rows, a, "AUX", Head::Verb, "lwg__aux");
    }
    if let Some(noun) = shape.because {
        let k = push(&mut rows, "kyunki", "SCONJ", Head::Verb, "rh");
        let n = rows.len() + 1;
        push(&mut rows, noun, "NOUN", Head::Row(n + 1), "k1");
        let v = push(&mut rows, "thi", "VERB", Head::Row(k), "ccof");
        debug_assert_eq!(v, n + 1);
    }
    if shape.coof_tail > 0 {
        let aur = push(&mut rows, "aur", "CCONJ", Head::Verb, "coof");
        let v = aur + shape.coof_tail;
        for i in 1..shape.coof_tail {
            push(&mut rows, NOUNS[i % NOUNS.len()], "NOUN", Head::Row(v), "k2");
        }
        push(&mut rows, "gaya", "VERB", Head::Row(aur), "ccof");
    }
    if shape.danda {
        push(&mut rows, "।", "PUNCT", Head::Verb, "rsym");
    }

    let mut builder = ParsedSentence::builder(id);
    for (i, row) in rows.iter().enumerate() {
        let head = match row.head {
            Head::Verb => verb_id,
            Head::Row(h) => h,
            Head::Root => 0,
        };
        builder = builder.token(&row.form, row.upos, head, row.deprel);
        if i + 1 == verb_id {
            if let Some(g) = shape.verb_gender {
                builder = builder.feat("Gender", g);
            }
        }
    }
    builder.build().expect("generated sentence is a valid tree")
}

pub fn sentence() -> impl Strategy<Value = ParsedSentence> {
    sentence_shape().prop_map(|shape| build_sentence("p", &shape))
}

pub fn corpus() -> impl Strategy<Value = Vec<ParsedSentence>> {
    prop::collection::vec(sentence_shape(), 1..6).prop_map(|shapes| {
        shapes
            .iter()
            .enumerate()
            .map(|(i, shape)| build_sentence(&format!("p{}", i), shape))
            .collect()
    })
}

pub fn markers() -> MarkerTable {
    MarkerTable::default()
}

/// Per-sentence word counts, used by the accounting property.
pub fn bag<'a>(words: impl IntoIterator<Item = &'a str>) -> BTreeMap<&'a str, usize> {
    let mut bag = BTreeMap::new();
    for w in words {
        *bag.entry(w).or_insert(0) += 1;
    }
    bag
}
