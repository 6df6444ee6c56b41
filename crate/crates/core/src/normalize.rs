//! Case folding and string augmentation.
//!
//! Every corpus name is turned into an [`AugmentedTarget`]: the folded name
//! with a leading space (so word-start matches can be told apart from
//! mid-word ones) and, for names with two or more tokens, a trailing
//! `" " + initials` suffix so that "mp" finds "Mike Petterson".

use serde::{Deserialize, Serialize};

/// Lower-cases, trims and collapses every run of Unicode whitespace into a
/// single ASCII space.
pub fn fold(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for token in raw.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(token.chars().flat_map(char::to_lowercase));
    }
    out
}

/// Builds the augmented form of an already folded name.
///
/// ```
/// use namefuzz_core::normalize::augment_target;
/// assert_eq!(augment_target("abc 123"), " abc 123 a1");
/// assert_eq!(augment_target("mike petterson jr"), " mike petterson jr mp");
/// ```
pub fn augment_target(folded: &str) -> String {
    let mut out = String::with_capacity(folded.len() + 8);
    out.push(' ');
    out.push_str(folded);
    let mut initials = folded.split(' ').filter_map(|t| t.chars().next());
    if let (Some(first), Some(second)) = (initials.next(), initials.next()) {
        out.push(' ');
        out.push(first);
        out.push(second);
    }
    out
}

/// A corpus name in all the forms the search pipeline needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedTarget {
    /// The name exactly as supplied, for display.
    pub original: String,
    pub folded: String,
    pub augmented: String,
    pub token_count: usize,
}

impl AugmentedTarget {
    pub fn new(raw: &str) -> Self {
        let folded = fold(raw);
        let augmented = augment_target(&folded);
        let token_count = if folded.is_empty() {
            0
        } else {
            folded.split(' ').count()
        };
        Self {
            original: raw.to_owned(),
            folded,
            augmented,
            token_count,
        }
    }

    /// True when nothing searchable is left after folding.
    pub fn is_empty(&self) -> bool {
        self.folded.is_empty()
    }
}

/// A folded query. Queries get the leading space but never an initials suffix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedQuery {
    pub folded: String,
    pub augmented: String,
}

impl NormalizedQuery {
    /// Length of the folded query in Unicode scalars.
    pub fn len(&self) -> usize {
        self.folded.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.folded.is_empty()
    }
}

pub fn normalize_query(raw: &str) -> NormalizedQuery {
    let folded = fold(raw);
    let augmented = format!(" {folded}");
    NormalizedQuery { folded, augmented }
}
