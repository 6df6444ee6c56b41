//! Skip-bigram profiles and the bigram distance used as the retrieval filter.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::InvalidArgument;

/// An ordered pair of scalars taken from a string with some number of
/// scalars skipped between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkipBigram(pub char, pub char);

impl fmt::Display for SkipBigram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

impl SkipBigram {
    /// Parses a string of exactly two scalars.
    pub fn parse(s: &str) -> Option<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => Some(SkipBigram(a, b)),
            _ => None,
        }
    }
}

/// Maximum skip order and weight decay shared by an index and its queries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BigramParams {
    /// Maximum number of scalars skipped between the two halves of a bigram.
    pub k: u32,
    /// A bigram of skip order `j` weighs `lambda^j`.
    pub lambda: f64,
}

impl Default for BigramParams {
    fn default() -> Self {
        Self { k: 1, lambda: 1.0 }
    }
}

impl BigramParams {
    pub fn new(k: u32, lambda: f64) -> Result<Self, InvalidArgument> {
        let params = Self { k, lambda };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), InvalidArgument> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(InvalidArgument::new(format!(
                "lambda must be in (0, 1], got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn weight(&self, order: u32) -> f64 {
        self.lambda.powi(order as i32)
    }
}

/// Picks the skip order kept when a bigram shows up at more than one order.
/// The highest order wins.
#[inline]
fn resolve_collision(existing: u32, incoming: u32) -> u32 {
    existing.max(incoming)
}

/// Every skip-bigram of `s` up to order `k`, duplicates included, grouped by
/// order (all adjacent pairs first, then the 1-skip pairs, and so on).
pub fn skip_bigrams(s: &str, k: u32) -> Vec<(SkipBigram, u32)> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    for order in 0..=k as usize {
        let gap = order + 1;
        if gap >= chars.len() {
            break;
        }
        out.extend(
            chars
                .iter()
                .zip(&chars[gap..])
                .map(|(&a, &b)| (SkipBigram(a, b), order as u32)),
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Slot {
    order: u32,
    weight: f64,
}

/// Skip-bigram → weight map for one string.
#[derive(Debug, Clone, PartialEq)]
pub struct BigramProfile {
    params: BigramParams,
    slots: HashMap<SkipBigram, Slot>,
}

impl BigramProfile {
    /// Builds the profile of an augmented string.
    pub fn generate(augmented: &str, params: BigramParams) -> Self {
        let mut orders: HashMap<SkipBigram, u32> = HashMap::new();
        for (bigram, order) in skip_bigrams(augmented, params.k) {
            orders
                .entry(bigram)
                .and_modify(|o| *o = resolve_collision(*o, order))
                .or_insert(order);
        }
        Self::from_orders(orders, params)
    }

    /// Rebuilds a profile from stored `(bigram, skip order)` pairs.
    pub fn from_orders(
        orders: impl IntoIterator<Item = (SkipBigram, u32)>,
        params: BigramParams,
    ) -> Self {
        let slots = orders
            .into_iter()
            .map(|(b, order)| {
                let slot = Slot {
                    order,
                    weight: params.weight(order),
                };
                (b, slot)
            })
            .collect();
        Self { params, slots }
    }

    pub fn params(&self) -> BigramParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn weight(&self, bigram: SkipBigram) -> Option<f64> {
        self.slots.get(&bigram).map(|s| s.weight)
    }

    pub fn order(&self, bigram: SkipBigram) -> Option<u32> {
        self.slots.get(&bigram).map(|s| s.order)
    }

    /// `(bigram, skip order)` pairs sorted by bigram, for stable output.
    pub fn orders(&self) -> Vec<(SkipBigram, u32)> {
        let mut v: Vec<_> = self.slots.iter().map(|(b, s)| (*b, s.order)).collect();
        v.sort_unstable();
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = (SkipBigram, f64)> + '_ {
        self.slots.iter().map(|(b, s)| (*b, s.weight))
    }

    /// Bigram distance from this (query) profile to `target`; see [`bd`].
    pub fn distance_to(&self, target: &BigramProfile) -> Result<f64, InvalidArgument> {
        bd(self, target)
    }

    /// [`bd`] without the parameter check, for callers that have already
    /// validated both sides.
    pub(crate) fn distance_unchecked(&self, target: &BigramProfile) -> f64 {
        self.slots
            .iter()
            .map(|(b, q)| {
                let s = target.slots.get(b).map_or(0.0, |s| s.weight);
                let diff = q.weight - s;
                if q.weight == s {
                    diff * diff - q.weight * q.weight
                } else {
                    diff * diff
                }
            })
            .sum()
    }
}

/// Bigram distance: summed over the query's bigrams only, each term is
/// `(q - s)^2`, minus `q^2` when the weights are exactly equal. Bigrams
/// missing from the target count with weight 0. More negative is closer.
pub fn bd(query: &BigramProfile, target: &BigramProfile) -> Result<f64, InvalidArgument> {
    if query.params != target.params {
        return Err(InvalidArgument::new(format!(
            "profiles built with different parameters: {:?} vs {:?}",
            query.params, target.params
        )));
    }
    Ok(query.distance_unchecked(target))
}
