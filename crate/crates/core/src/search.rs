//! Online phase: bigram-distance filter, then local Levenshtein rerank.
//!
//! Queries shorter than `min_fuzzy_len` skip fuzzy matching entirely and only
//! return exact substring matches, still ordered by bigram distance so that
//! word-start matches come first.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigram::{BigramParams, BigramProfile};
use crate::error::InvalidArgument;
use crate::index::{CorpusEntry, SearchIndex};
use crate::lld::{lld_chars, lld_span_chars, IncrementalSession, LldResult};
use crate::normalize::{normalize_query, NormalizedQuery};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub k: u32,
    pub lambda: f64,
    /// Bigram-distance threshold (stage 1).
    pub t1: f64,
    /// Local Levenshtein threshold (stage 2).
    pub t2: usize,
    pub min_fuzzy_len: usize,
    /// Maximum number of results, 0 for no limit.
    pub limit: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            k: 1,
            lambda: 1.0,
            t1: 1.0,
            t2: 1,
            min_fuzzy_len: 3,
            limit: 20,
        }
    }
}

/// Every constraint a [`SearchParams`] value broke.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid search parameters: {}", .0.join("; "))]
pub struct ParamViolations(pub Vec<String>);

impl SearchParams {
    pub fn bigram_params(&self) -> BigramParams {
        BigramParams {
            k: self.k,
            lambda: self.lambda,
        }
    }

    pub fn validate(&self) -> Result<(), ParamViolations> {
        let mut v = Vec::new();
        if let Err(e) = self.bigram_params().validate() {
            v.push(e.0);
        }
        if !self.t1.is_finite() {
            v.push(format!("t1 must be a finite number, got {}", self.t1));
        }
        if self.min_fuzzy_len < 1 {
            v.push("min_fuzzy_len must be at least 1".to_owned());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(ParamViolations(v))
        }
    }

    fn check_against(&self, index: &SearchIndex) -> Result<(), InvalidArgument> {
        self.validate()
            .map_err(|e| InvalidArgument::new(e.0.join("; ")))?;
        if self.bigram_params() != index.params() {
            return Err(InvalidArgument::new(format!(
                "search uses k={} lambda={} but the index was built with k={} lambda={}",
                self.k,
                self.lambda,
                index.params().k,
                index.params().lambda
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub entry_id: u64,
    pub display_name: String,
    pub lld: usize,
    pub bd: f64,
    /// 1-based position in the augmented name where the match ends.
    pub end_index: usize,
    /// 1-based inclusive span of the match in the augmented name. A leading
    /// separator space is not part of the span.
    pub span: Option<(usize, usize)>,
}

/// Wire form of a result shared by the CLI's JSON output and the HTTP API.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub id: u64,
    pub name: String,
    pub lld: usize,
    pub bd: f64,
    pub span: Option<[usize; 2]>,
}

impl From<&SearchResult> for ResultRecord {
    fn from(r: &SearchResult) -> Self {
        Self {
            id: r.entry_id,
            name: r.display_name.clone(),
            lld: r.lld,
            bd: r.bd,
            span: r.span.map(|(s, e)| [s, e]),
        }
    }
}

/// Results plus counters used by benchmarks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchOutcome {
    pub results: Vec<SearchResult>,
    pub scanned: usize,
    /// Entries that reached the local Levenshtein stage.
    pub stage1_passed: usize,
    pub fuzzy: bool,
}

/// Extra ordering applied after `(lld, bd)` and before the position and id
/// tie-breaks, e.g. for recency signals.
pub type Tiebreak<'a> = &'a dyn Fn(&SearchResult, &SearchResult) -> Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Gate {
    Staged,
    Exhaustive,
}

/// Two-stage fuzzy search.
pub fn search(
    index: &SearchIndex,
    raw_query: &str,
    params: &SearchParams,
) -> Result<Vec<SearchResult>, InvalidArgument> {
    Ok(search_outcome(index, raw_query, params)?.results)
}

pub fn search_outcome(
    index: &SearchIndex,
    raw_query: &str,
    params: &SearchParams,
) -> Result<SearchOutcome, InvalidArgument> {
    params.check_against(index)?;
    let q = normalize_query(raw_query);
    Ok(execute(
        index,
        &q,
        params,
        Gate::Staged,
        &mut batch_lld,
        None,
    ))
}

/// Same as [`search`] without the bigram gate: every entry is scored by
/// local distance. Used to measure how much the first stage drops.
pub fn search_exhaustive(
    index: &SearchIndex,
    raw_query: &str,
    params: &SearchParams,
) -> Result<Vec<SearchResult>, InvalidArgument> {
    params.check_against(index)?;
    let q = normalize_query(raw_query);
    Ok(execute(index, &q, params, Gate::Exhaustive, &mut batch_lld, None).results)
}

pub fn search_with_tiebreak(
    index: &SearchIndex,
    raw_query: &str,
    params: &SearchParams,
    tiebreak: Tiebreak<'_>,
) -> Result<Vec<SearchResult>, InvalidArgument> {
    params.check_against(index)?;
    let q = normalize_query(raw_query);
    Ok(execute(
        index,
        &q,
        params,
        Gate::Staged,
        &mut batch_lld,
        Some(tiebreak),
    )
    .results)
}

fn batch_lld(_pos: usize, entry: &CorpusEntry, query: &[char]) -> LldResult {
    lld_chars(query, entry.target_chars()).expect("query and target are non-empty")
}

fn compare(a: &SearchResult, b: &SearchResult, tiebreak: Option<Tiebreak<'_>>) -> Ordering {
    a.lld
        .cmp(&b.lld)
        .then_with(|| a.bd.total_cmp(&b.bd))
        .then_with(|| tiebreak.map_or(Ordering::Equal, |f| f(a, b)))
        .then_with(|| a.end_index.cmp(&b.end_index))
        .then_with(|| a.entry_id.cmp(&b.entry_id))
}

fn execute(
    index: &SearchIndex,
    query: &NormalizedQuery,
    params: &SearchParams,
    gate: Gate,
    lld_of: &mut dyn FnMut(usize, &CorpusEntry, &[char]) -> LldResult,
    tiebreak: Option<Tiebreak<'_>>,
) -> SearchOutcome {
    let mut outcome = SearchOutcome::default();
    if query.is_empty() {
        return outcome;
    }
    let profile = BigramProfile::generate(&query.augmented, index.params());
    outcome.fuzzy = query.len() >= params.min_fuzzy_len;

    // The fuzzy path aligns the space-prefixed query so that a match at a
    // word start costs nothing and a mid-word match costs one edit.
    let operand: Vec<char> = if outcome.fuzzy {
        query.augmented.chars().collect()
    } else {
        query.folded.chars().collect()
    };

    let mut results = Vec::new();
    for (pos, entry) in index.entries().enumerate() {
        outcome.scanned += 1;
        let bd = profile.distance_unchecked(&entry.profile);
        let (r, limit) = if outcome.fuzzy {
            if gate == Gate::Staged && bd > params.t1 {
                continue;
            }
            outcome.stage1_passed += 1;
            (lld_of(pos, entry, &operand), params.t2)
        } else {
            outcome.stage1_passed += 1;
            (batch_lld(pos, entry, &operand), 0)
        };
        if r.distance <= limit {
            results.push(SearchResult {
                entry_id: entry.id,
                display_name: entry.name.original.clone(),
                lld: r.distance,
                bd,
                end_index: r.end_index,
                span: None,
            });
        }
    }

    results.sort_by(|a, b| compare(a, b, tiebreak));
    if params.limit > 0 {
        results.truncate(params.limit);
    }
    for r in &mut results {
        let entry = index
            .get(r.entry_id)
            .expect("result ids come from the index");
        r.span = Some(match_span(&operand, entry.target_chars()));
        debug_assert_eq!(r.span.map(|s| s.1), Some(r.end_index));
        if outcome.fuzzy && gate == Gate::Staged {
            debug_assert!(r.lld <= params.t2 && r.bd <= params.t1);
        }
    }
    outcome.results = results;
    outcome
}

fn match_span(query: &[char], target: &[char]) -> (usize, usize) {
    let r = lld_span_chars(query, target).expect("query and target are non-empty");
    let (mut start, end) = r.span.expect("span requested");
    if start < end && target[start - 1] == ' ' {
        start += 1;
    }
    (start, end)
}

/// Search-as-you-type driver. Keeps one [`IncrementalSession`] per entry
/// that has reached the second stage, so each keystroke only adds (or, on
/// backspace, drops) one DP row per surviving entry. Results are always
/// identical to [`search`] on the current query.
#[derive(Debug)]
pub struct Typeahead<'a> {
    index: &'a SearchIndex,
    params: SearchParams,
    raw: String,
    sessions: HashMap<usize, IncrementalSession>,
}

impl<'a> Typeahead<'a> {
    pub fn new(index: &'a SearchIndex, params: SearchParams) -> Result<Self, InvalidArgument> {
        params.check_against(index)?;
        Ok(Self {
            index,
            params,
            raw: String::new(),
            sessions: HashMap::new(),
        })
    }

    pub fn query(&self) -> &str {
        &self.raw
    }

    pub fn push(&mut self, c: char) -> Vec<SearchResult> {
        self.raw.push(c);
        self.results()
    }

    /// Backspace.
    pub fn pop(&mut self) -> Vec<SearchResult> {
        self.raw.pop();
        self.results()
    }

    /// Replaces the whole query; sessions are rewound only as far as the new
    /// query diverges from the old one.
    pub fn set_query(&mut self, raw: &str) -> Vec<SearchResult> {
        raw.clone_into(&mut self.raw);
        self.results()
    }

    pub fn results(&mut self) -> Vec<SearchResult> {
        let q = normalize_query(&self.raw);
        let sessions = &mut self.sessions;
        let mut lld_of = |pos: usize, entry: &CorpusEntry, query: &[char]| {
            let session = sessions.entry(pos).or_insert_with(|| {
                IncrementalSession::from_chars(entry.target_chars().to_vec())
                    .expect("corpus targets are non-empty")
            });
            let common = session
                .query()
                .iter()
                .zip(query)
                .take_while(|(a, b)| a == b)
                .count();
            session.truncate(common);
            for &c in &query[common..] {
                session.push(c);
            }
            session.current().expect("query is non-empty")
        };
        execute(
            self.index,
            &q,
            &self.params,
            Gate::Staged,
            &mut lld_of,
            None,
        )
        .results
    }
}
