//! Local Levenshtein distance.
//!
//! Same recurrence as the classical edit distance, with two changes: the
//! first row is all zeros, so the query may start aligning at any position
//! of the target for free, and the answer is the minimum of the last row
//! rather than its last cell. The result is the edit distance from the whole
//! query to the closest contiguous substring of the target.
//!
//! All routines index Unicode scalars, never bytes.

use crate::error::InvalidArgument;

/// Substitution cost between a query scalar and a target scalar.
/// Insertions and deletions always cost one.
pub trait SubstitutionCost {
    fn cost(&self, query: char, target: char) -> usize;
}

/// Zero for equal scalars, one otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitCost;

impl SubstitutionCost for UnitCost {
    #[inline]
    fn cost(&self, query: char, target: char) -> usize {
        usize::from(query != target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LldResult {
    pub distance: usize,
    /// 1-based target position where the best alignment ends (leftmost on ties).
    pub end_index: usize,
    /// 1-based inclusive `(start, end)` of the aligned target substring, when
    /// a traceback was requested.
    pub span: Option<(usize, usize)>,
}

fn check_operands(query: &[char], target: &[char]) -> Result<(), InvalidArgument> {
    if query.is_empty() {
        return Err(InvalidArgument::new("query must not be empty"));
    }
    if target.is_empty() {
        return Err(InvalidArgument::new("target must not be empty"));
    }
    Ok(())
}

/// Computes row `i` (1-based query position of `qc`) from row `i - 1`.
#[inline]
fn next_row<C: SubstitutionCost>(
    prev: &[usize],
    cur: &mut [usize],
    i: usize,
    qc: char,
    target: &[char],
    costs: &C,
) {
    cur[0] = i;
    for (j, &tc) in target.iter().enumerate() {
        let top = prev[j + 1] + 1;
        let left = cur[j] + 1;
        let diag = prev[j] + costs.cost(qc, tc);
        cur[j + 1] = top.min(left).min(diag);
    }
}

/// Leftmost minimum over columns `1..=m` of a DP row.
#[inline]
fn row_min(row: &[usize]) -> (usize, usize) {
    let mut best = (usize::MAX, 0);
    for (j, &v) in row.iter().enumerate().skip(1) {
        if v < best.0 {
            best = (v, j);
        }
    }
    best
}

/// Local Levenshtein distance over pre-split scalars, unit costs.
pub fn lld_chars(query: &[char], target: &[char]) -> Result<LldResult, InvalidArgument> {
    lld_with(query, target, &UnitCost)
}

pub fn lld_with<C: SubstitutionCost>(
    query: &[char],
    target: &[char],
    costs: &C,
) -> Result<LldResult, InvalidArgument> {
    check_operands(query, target)?;
    let mut prev = vec![0usize; target.len() + 1];
    let mut cur = vec![0usize; target.len() + 1];
    for (i, &qc) in query.iter().enumerate() {
        next_row(&prev, &mut cur, i + 1, qc, target, costs);
        std::mem::swap(&mut prev, &mut cur);
    }
    let (distance, end_index) = row_min(&prev);
    Ok(LldResult {
        distance,
        end_index,
        span: None,
    })
}

/// Local Levenshtein distance of `query` against `target`.
///
/// ```
/// use namefuzz_core::lld::lld;
/// let r = lld("mike", "hi mcke!").unwrap();
/// assert_eq!((r.distance, r.end_index), (1, 7));
/// ```
pub fn lld(query: &str, target: &str) -> Result<LldResult, InvalidArgument> {
    let q: Vec<char> = query.chars().collect();
    let t: Vec<char> = target.chars().collect();
    lld_chars(&q, &t)
}

/// The full `(n + 1) x (m + 1)` local DP matrix, row 0 all zeros.
pub fn lld_matrix(query: &str, target: &str) -> Vec<Vec<usize>> {
    let q: Vec<char> = query.chars().collect();
    let t: Vec<char> = target.chars().collect();
    local_matrix(&q, &t, &UnitCost)
}

fn local_matrix<C: SubstitutionCost>(
    query: &[char],
    target: &[char],
    costs: &C,
) -> Vec<Vec<usize>> {
    let mut rows = Vec::with_capacity(query.len() + 1);
    rows.push(vec![0usize; target.len() + 1]);
    for (i, &qc) in query.iter().enumerate() {
        let mut cur = vec![0usize; target.len() + 1];
        next_row(&rows[i], &mut cur, i + 1, qc, target, costs);
        rows.push(cur);
    }
    rows
}

/// Walks back from `(n, end)` to row 0, preferring diagonal, then top, then
/// left moves. Returns the 1-based start column.
fn traceback(d: &[Vec<usize>], query: &[char], target: &[char], end: usize) -> usize {
    let (mut i, mut j) = (query.len(), end);
    while i > 0 {
        let here = d[i][j];
        if j > 0 && here == d[i - 1][j - 1] + UnitCost.cost(query[i - 1], target[j - 1]) {
            i -= 1;
            j -= 1;
        } else if here == d[i - 1][j] + 1 {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    j + 1
}

/// Local distance together with the 1-based inclusive span of the target
/// substring the query aligns to.
pub fn lld_span_chars(query: &[char], target: &[char]) -> Result<LldResult, InvalidArgument> {
    check_operands(query, target)?;
    let d = local_matrix(query, target, &UnitCost);
    let (distance, end_index) = row_min(&d[query.len()]);
    let start = traceback(&d, query, target, end_index);
    Ok(LldResult {
        distance,
        end_index,
        span: Some((start, end_index)),
    })
}

/// `(start, end)` of the best local alignment, 1-based and inclusive.
///
/// ```
/// use namefuzz_core::lld::lld_span;
/// assert_eq!(lld_span("mike", "hi mcke!").unwrap(), (4, 7));
/// ```
pub fn lld_span(query: &str, target: &str) -> Result<(usize, usize), InvalidArgument> {
    let q: Vec<char> = query.chars().collect();
    let t: Vec<char> = target.chars().collect();
    let r = lld_span_chars(&q, &t)?;
    Ok(r.span.expect("span requested"))
}

/// Classical (global) Levenshtein distance.
pub fn global_levenshtein(a: &str, b: &str) -> usize {
    let m = global_matrix(a, b);
    *m.last()
        .and_then(|r| r.last())
        .expect("matrix is never empty")
}

/// The full global DP matrix, first row `0..=m` and first column `0..=n`.
pub fn global_matrix(a: &str, b: &str) -> Vec<Vec<usize>> {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut rows = Vec::with_capacity(a.len() + 1);
    rows.push((0..=b.len()).collect::<Vec<_>>());
    for (i, &ac) in a.iter().enumerate() {
        let mut cur = vec![0usize; b.len() + 1];
        next_row(&rows[i], &mut cur, i + 1, ac, &b, &UnitCost);
        rows.push(cur);
    }
    rows
}

/// Per-keystroke local distance against a fixed target: each typed scalar
/// appends one DP row, and backspace drops it again.
#[derive(Debug, Clone)]
pub struct IncrementalSession {
    target: Vec<char>,
    query: Vec<char>,
    // rows[0] is the all-zero row; rows[i] corresponds to query[..i].
    rows: Vec<Vec<usize>>,
}

impl IncrementalSession {
    pub fn new(target: &str) -> Result<Self, InvalidArgument> {
        Self::from_chars(target.chars().collect())
    }

    pub fn from_chars(target: Vec<char>) -> Result<Self, InvalidArgument> {
        if target.is_empty() {
            return Err(InvalidArgument::new("target must not be empty"));
        }
        let rows = vec![vec![0usize; target.len() + 1]];
        Ok(Self {
            target,
            query: Vec::new(),
            rows,
        })
    }

    pub fn target(&self) -> &[char] {
        &self.target
    }

    pub fn query(&self) -> &[char] {
        &self.query
    }

    pub fn push(&mut self, c: char) -> LldResult {
        let mut cur = vec![0usize; self.target.len() + 1];
        let prev = self.rows.last().expect("row 0 is always present");
        next_row(
            prev,
            &mut cur,
            self.query.len() + 1,
            c,
            &self.target,
            &UnitCost,
        );
        self.rows.push(cur);
        self.query.push(c);
        self.current().expect("query is non-empty after push")
    }

    /// Removes the last scalar. Returns the new current result, or `None` when
    /// the query is empty afterwards (or already was).
    pub fn pop(&mut self) -> Option<LldResult> {
        if self.query.pop().is_some() {
            self.rows.pop();
        }
        self.current()
    }

    /// Pops back to the first `len` scalars of the query.
    pub fn truncate(&mut self, len: usize) {
        while self.query.len() > len {
            self.pop();
        }
    }

    pub fn current(&self) -> Option<LldResult> {
        if self.query.is_empty() {
            return None;
        }
        let (distance, end_index) = row_min(self.rows.last()?);
        Some(LldResult {
            distance,
            end_index,
            span: None,
        })
    }
}
