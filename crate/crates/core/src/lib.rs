//! Fuzzy name search for short corpora such as contact lists.
//!
//! Two stages run per query:
//!
//! 1. every name's precomputed skip-bigram profile is compared with the
//!    query's using a cheap bigram distance, and names above `t1` are dropped;
//! 2. survivors are scored with a local Levenshtein distance (edit distance
//!    from the query to the best-matching substring of the name) and kept
//!    when it is at most `t2`.
//!
//! Results are ordered by local distance, then bigram distance.
//!
//! ```
//! use namefuzz_core::{BigramParams, SearchIndex, SearchParams, search};
//!
//! let (index, _) = SearchIndex::build(
//!     &["Mike Petterson", "Jennifer Mikoilan", "Mark"],
//!     BigramParams::default(),
//! ).unwrap();
//! let hits = search(&index, "mik", &SearchParams::default()).unwrap();
//! let names: Vec<_> = hits.iter().map(|h| h.display_name.as_str()).collect();
//! assert_eq!(names, ["Mike Petterson", "Jennifer Mikoilan"]);
//! ```

pub mod bench;
pub mod bigram;
pub mod error;
pub mod index;
pub mod lld;
pub mod normalize;
pub mod search;

pub use bigram::{bd, BigramParams, BigramProfile, SkipBigram};
pub use error::InvalidArgument;
pub use index::{BuildReport, CorpusEntry, LoadError, SearchIndex};
pub use lld::{global_levenshtein, lld, lld_span, IncrementalSession, LldResult};
pub use normalize::{fold, normalize_query, AugmentedTarget, NormalizedQuery};
pub use search::{search, search_exhaustive, ResultRecord, SearchParams, SearchResult, Typeahead};
