//! Aggregation of human Likert ratings.
//!
//! Annotators score each question from 1 to 5 for grammaticality (syntax)
//! and meaningfulness (semantic). Ratings arrive as CSV:
//!
//! ```text
//! candidate_id,annotator_id,syntax,semantic
//! ex1-R_K1-2-0,a1,5,4
//! ```
//!
//! Means are taken over every (candidate, annotator) score in a group and
//! medians are lower medians, so they are always one of the scale points.
//! Statistics of an empty group are absent rather than zero.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::FilterVerdict;
use crate::rules::QuestionCandidate;
use crate::treebank::KarakaLabel;

const HEADER: [&str; 4] = ["candidate_id", "annotator_id", "syntax", "semantic"];

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("failed to read ratings {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Malformed {
        origin: String,
        line: u64,
        message: String,
    },
    #[error("rating refers to unknown candidate {0}")]
    OrphanRating(String),
    #[error("no filter verdict for candidate {0}")]
    MissingVerdict(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub candidate_id: String,
    pub annotator_id: String,
    pub syntax: u8,
    pub semantic: u8,
}

pub fn load_ratings(path: impl AsRef<Path>) -> Result<Vec<RatingRecord>, EvalError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ratings(file, &path.display().to_string())
}

/// Reads and validates ratings CSV. Scores must lie in 1..=5 and each
/// (candidate, annotator) pair may appear once.
pub fn parse_ratings(input: impl Read, origin: &str) -> Result<Vec<RatingRecord>, EvalError> {
    let malformed = |line: u64, message: String| EvalError::Malformed {
        origin: origin.to_string(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    if header.is_empty() {
        return Ok(Vec::new());
    }
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(malformed(1, format!("expected header {}", HEADER.join(","))));
    }

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let score = |i: usize| -> Result<u8, EvalError> {
            let raw = row[i].trim();
            match raw.parse::<u8>() {
                Ok(v) if (1..=5).contains(&v) => Ok(v),
                _ => Err(malformed(line, format!("{} score {:?} outside 1..=5", HEADER[i], raw))),
            }
        };
        let record = RatingRecord {
            candidate_id: row[0].trim().to_string(),
            annotator_id: row[1].trim().to_string(),
            syntax: score(2)?,
            semantic: score(3)?,
        };
        if !seen.insert((record.candidate_id.clone(), record.annotator_id.clone())) {
            return Err(malformed(
                line,
                format!(
                    "duplicate rating of {} by {}",
                    record.candidate_id, record.annotator_id
                ),
            ));
        }
        records.push(record);
    }
    Ok(records)
}

/// Lower median: the element at index `(n - 1) / 2` of the sorted scores.
pub fn lower_median(scores: &[u8]) -> Option<u8> {
    if scores.is_empty() {
        return None;
    }
    let mut sorted = scores.to_vec();
    sorted.sort_unstable();
    Some(sorted[(sorted.len() - 1) / 2])
}

pub fn mean(scores: &[u8]) -> Option<f64> {
    if scores.is_empty() {
        return None;
    }
    let sum: u64 = scores.iter().map(|&s| u64::from(s)).sum();
    Some(sum as f64 / scores.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowStats {
    pub syntax_mean: Option<f64>,
    pub syntax_median: Option<u8>,
    pub semantic_mean: Option<f64>,
    pub semantic_median: Option<u8>,
    /// Number of distinct candidates in the row.
    pub count: usize,
}

#[derive(Debug, Default)]
struct Scores {
    syntax: Vec<u8>,
    semantic: Vec<u8>,
    count: usize,
}

impl Scores {
    fn push(&mut self, r: &RatingRecord) {
        self.syntax.push(r.syntax);
        self.semantic.push(r.semantic);
    }

    fn stats(&self) -> RowStats {
        RowStats {
            syntax_mean: mean(&self.syntax),
            syntax_median: lower_median(&self.syntax),
            semantic_mean: mean(&self.semantic),
            semantic_median: lower_median(&self.semantic),
            count: self.count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalTable {
    pub rows: BTreeMap<KarakaLabel, RowStats>,
    pub totals: RowStats,
}

fn karaka_index(candidates: &[QuestionCandidate]) -> HashMap<&str, &KarakaLabel> {
    candidates
        .iter()
        .map(|c| (c.candidate_id.as_str(), &c.karaka))
        .collect()
}

/// Per-karaka and overall statistics.
pub fn aggregate(ratings: &[RatingRecord], candidates: &[QuestionCandidate]) -> Result<EvalTable, EvalError> {
    let index = karaka_index(candidates);
    let mut rows: BTreeMap<KarakaLabel, Scores> = BTreeMap::new();
    let mut totals = Scores::default();
    for c in candidates {
        rows.entry(c.karaka.clone()).or_default().count += 1;
        totals.count += 1;
    }
    for r in ratings {
        let karaka = index
            .get(r.candidate_id.as_str())
            .ok_or_else(|| EvalError::OrphanRating(r.candidate_id.clone()))?;
        rows.get_mut(*karaka).expect("row exists for every candidate").push(r);
        totals.push(r);
    }
    Ok(EvalTable {
        rows: rows.iter().map(|(k, s)| (k.clone(), s.stats())).collect(),
        totals: totals.stats(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruningStats {
    pub syntax_mean: Option<f64>,
    pub semantic_mean: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeforeAfter {
    pub before: PruningStats,
    pub after: PruningStats,
}

/// Mean scores over all candidates and over the ones the filters kept.
pub fn before_after(
    ratings: &[RatingRecord],
    candidates: &[QuestionCandidate],
    verdicts: &[FilterVerdict],
) -> Result<BeforeAfter, EvalError> {
    let kept: HashMap<&str, bool> = verdicts.iter().map(|v| (v.candidate_id.as_str(), v.kept)).collect();
    let mut before = Scores::default();
    let mut after = Scores::default();
    for c in candidates {
        let is_kept = *kept
            .get(c.candidate_id.as_str())
            .ok_or_else(|| EvalError::MissingVerdict(c.candidate_id.clone()))?;
        before.count += 1;
        if is_kept {
            after.count += 1;
        }
    }
    let index = karaka_index(candidates);
    for r in ratings {
        if !index.contains_key(r.candidate_id.as_str()) {
            return Err(EvalError::OrphanRating(r.candidate_id.clone()));
        }
        before.push(r);
        if kept[r.candidate_id.as_str()] {
            after.push(r);
        }
    }
    let summary = |s: &Scores| PruningStats {
        syntax_mean: mean(&s.syntax),
        semantic_mean: mean(&s.semantic),
        count: s.count,
    };
    Ok(BeforeAfter {
        before: summary(&before),
        after: summary(&after),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub table: EvalTable,
    pub before_after: Option<BeforeAfter>,
}

fn fmt_mean(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |m| format!("{:.3}", m))
}

fn fmt_median(v: Option<u8>) -> String {
    v.map_or_else(|| "-".to_string(), |m| m.to_string())
}

impl EvalReport {
    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<8}{:<10}{:>7}{:>8}{:>7}", "karaka", "criteria", "mean", "median", "count");
        let mut row = |name: &str, stats: &RowStats| {
            let _ = writeln!(
                out,
                "{:<8}{:<10}{:>7}{:>8}{:>7}",
                name,
                "syntax",
                fmt_mean(stats.syntax_mean),
                fmt_median(stats.syntax_median),
                stats.count
            );
            let _ = writeln!(
                out,
                "{:<8}{:<10}{:>7}{:>8}",
                "",
                "semantic",
                fmt_mean(stats.semantic_mean),
                fmt_median(stats.semantic_median)
            );
        };
        for (karaka, stats) in &self.table.rows {
            row(karaka.as_str(), stats);
        }
        row("total", &self.table.totals);

        if let Some(ba) = &self.before_after {
            out.push('\n');
            let _ = writeln!(out, "{:<10}{:>8}{:>8}", "pruning", "before", "after");
            let _ = writeln!(
                out,
                "{:<10}{:>8}{:>8}",
                "syntax",
                fmt_mean(ba.before.syntax_mean),
                fmt_mean(ba.after.syntax_mean)
            );
            let _ = writeln!(
                out,
                "{:<10}{:>8}{:>8}",
                "semantic",
                fmt_mean(ba.before.semantic_mean),
                fmt_mean(ba.after.semantic_mean)
            );
            let _ = writeln!(out, "{:<10}{:>8}{:>8}", "count", ba.before.count, ba.after.count);
        }
        out
    }
}
