//! Rule-based question generation for Hindi from karaka-labeled
//! dependency parses.
//!
//! The pipeline has four stages, each in its own module:
//!
//! 1. [`treebank`] reads parsed sentences in a CoNLL-U-style column format.
//! 2. [`rules`] turns every karaka-labeled keyword into one or more
//!    questions by substituting an interrogative, consulting the
//!    [`lexicon`] for semantic categories and [`morphology`] for case.
//! 3. [`filters`] prunes the overgenerated candidates.
//! 4. [`evaluation`] aggregates human Likert ratings of the candidates.
//!
//! ```
//! use karaka_qg::{generate_all, MarkerTable, ParsedSentence, RuleId, SemanticLexicon};
//!
//! let s = ParsedSentence::builder("ex1")
//!     .token("kal", "NOUN", 6, "k7t")
//!     .token("raam", "PROPN", 6, "k1")
//!     .token("ne", "ADP", 2, "psp")
//!     .token("raavan", "PROPN", 6, "k2")
//!     .token("ko", "ADP", 4, "psp")
//!     .token("mara", "VERB", 0, "root")
//!     .build()?;
//!
//! let lexicon = SemanticLexicon::builtin();
//! let questions = generate_all(&s, &lexicon, &MarkerTable::default(), &RuleId::all());
//! assert_eq!(questions[0].text(), "kal kisne raavan ko mara ?");
//! assert_eq!(questions.len(), 5);
//! # Ok::<(), karaka_qg::treebank::TreebankError>(())
//! ```

pub mod cli;
pub mod evaluation;
pub mod filters;
pub mod lexicon;
pub mod morphology;
pub mod rules;
pub mod treebank;

pub use evaluation::{aggregate, before_after, load_ratings, EvalTable, RatingRecord};
pub use filters::{run_filters, FilterConfig, FilterId, FilterVerdict};
pub use lexicon::{load_lexicon, SemanticCategory, SemanticLexicon};
pub use morphology::{case_of, CaseStatus, MarkerTable};
pub use rules::{generate_all, QuestionCandidate, RuleId};
pub use treebank::{load_treebank, KarakaLabel, ParsedSentence, Token};

// The guide's code listings run as doctests of this crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/treebank.md")]
    mod treebank {}
    #[doc = include_str!("../../../book/src/categories-and-case.md")]
    mod categories_and_case {}
    #[doc = include_str!("../../../book/src/rules.md")]
    mod rules {}
    #[doc = include_str!("../../../book/src/filters.md")]
    mod filters {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
