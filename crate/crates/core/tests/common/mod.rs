//! Reference implementations and fixtures shared by the integration tests.
//! Nothing here calls into the DP code it is used to check.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

/// Edit distance by memoized recursion over suffix pairs.
pub fn edit_distance(a: &[char], b: &[char]) -> usize {
    fn go(a: &[char], b: &[char], memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if a.is_empty() {
            return b.len();
        }
        if b.is_empty() {
            return a.len();
        }
        let key = (a.len(), b.len());
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let sub = go(&a[1..], &b[1..], memo) + usize::from(a[0] != b[0]);
        let del = go(&a[1..], b, memo) + 1;
        let ins = go(a, &b[1..], memo) + 1;
        let v = sub.min(del).min(ins);
        memo.insert(key, v);
        v
    }
    go(a, b, &mut HashMap::new())
}

/// Minimum edit distance from `query` to any contiguous substring of
/// `target`, the empty substring included.
pub fn brute_substring_distance(query: &str, target: &str) -> usize {
    let q: Vec<char> = query.chars().collect();
    let t: Vec<char> = target.chars().collect();
    let mut best = q.len();
    for i in 0..=t.len() {
        for j in i..=t.len() {
            best = best.min(edit_distance(&q, &t[i..j]));
        }
    }
    best
}

pub fn is_substring(query: &str, target: &str) -> bool {
    let q: Vec<char> = query.chars().collect();
    let t: Vec<char> = target.chars().collect();
    q.is_empty() || t.windows(q.len()).any(|w| w == q.as_slice())
}

/// Skip-bigram orders by enumerating every position pair `(i, j)` with
/// `1 <= j - i <= k + 1`; repeated bigrams keep their largest order.
pub fn brute_bigram_orders(s: &str, k: u32) -> BTreeMap<(char, char), u32> {
    let c: Vec<char> = s.chars().collect();
    let mut out = BTreeMap::new();
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            let order = (j - i - 1) as u32;
            if order > k {
                continue;
            }
            let slot = out.entry((c[i], c[j])).or_insert(order);
            if order > *slot {
                *slot = order;
            }
        }
    }
    out
}

pub fn random_string<R: Rng>(rng: &mut R, alphabet: &[char], min: usize, max: usize) -> String {
    let len = rng.gen_range(min..=max);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

const FIRST_SYLLABLES: &[&str] = &[
    "ma", "mi", "jo", "an", "el", "li", "sa", "ka", "da", "ro", "be", "ni", "to", "lu", "al", "ra",
    "em", "ja", "so", "vi", "pe", "ch", "ol", "ta",
];
const MID_SYLLABLES: &[&str] = &[
    "ri", "na", "le", "ko", "sa", "th", "en", "la", "mo", "ck", "ra", "di", "ne", "vi", "to", "an",
    "ise", "el", "or", "us",
];
const LAST_SYLLABLES: &[&str] = &[
    "son", "berg", "ski", "ez", "ton", "man", "ova", "ley", "ford", "ini", "es", "ard", "well",
    "sen", "ic", "lan", "ier", "ston",
];

fn word<R: Rng>(rng: &mut R, syllables: usize) -> String {
    let mut w = FIRST_SYLLABLES.choose(rng).unwrap().to_string();
    for _ in 1..syllables {
        w.push_str(MID_SYLLABLES.choose(rng).unwrap());
    }
    w.push_str(LAST_SYLLABLES.choose(rng).unwrap());
    let mut chars = w.chars();
    let first = chars.next().unwrap().to_uppercase().collect::<String>();
    first + chars.as_str()
}

/// Display names shaped like "First Last", occasionally one or three tokens.
pub fn synthetic_names<R: Rng>(rng: &mut R, count: usize) -> Vec<String> {
    (0..count)
        .map(|_| {
            let tokens = match rng.gen_range(0..10) {
                0 => 1,
                1 => 3,
                _ => 2,
            };
            (0..tokens)
                .map(|_| {
                    let n = rng.gen_range(1..=3);
                    word(rng, n)
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// Applies one random insertion, deletion or substitution.
pub fn inject_edit<R: Rng>(rng: &mut R, s: &str) -> String {
    let mut c: Vec<char> = s.chars().collect();
    let letters: Vec<char> = ('a'..='z').collect();
    let pos = rng.gen_range(0..c.len().max(1));
    match rng.gen_range(0..3) {
        0 => c.insert(pos, *letters.choose(rng).unwrap()),
        1 if c.len() > 1 => {
            c.remove(pos);
        }
        _ => {
            let old = c[pos];
            let mut new = old;
            while new == old {
                new = *letters.choose(rng).unwrap();
            }
            c[pos] = new;
        }
    }
    c.into_iter().collect()
}

/// A `len`-scalar slice of a random name's folded form with one edit
/// injected, as a typo-ridden partial query.
pub fn typo_queries<R: Rng>(
    rng: &mut R,
    names: &[String],
    count: usize,
    len: usize,
) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let name = names.choose(rng).unwrap().to_lowercase();
        let chars: Vec<char> = name.chars().collect();
        if chars.len() < len {
            continue;
        }
        let start = rng.gen_range(0..=chars.len() - len);
        let piece: String = chars[start..start + len].iter().collect();
        if piece.trim().chars().count() != len {
            continue;
        }
        // Keep the query at `len` scalars: substitutions only.
        let mut q: Vec<char> = piece.chars().collect();
        let pos = rng.gen_range(0..len);
        let mut c = q[pos];
        while c == q[pos] || c == ' ' {
            c = rng.gen_range(b'a'..=b'z') as char;
        }
        q[pos] = c;
        out.push(q.into_iter().collect());
    }
    out
}

#[test]
fn oracle_sanity() {
    assert_eq!(edit_distance(&['a', 'b'], &['b']), 1);
    assert_eq!(brute_substring_distance("mike", "hi mcke!"), 1);
    assert_eq!(brute_substring_distance("mik", "mark"), 2);
    assert_eq!(brute_substring_distance("abc", "abc"), 0);
    let m: Vec<char> = "mike".chars().collect();
    let t: Vec<char> = "hi mcke!".chars().collect();
    assert_eq!(edit_distance(&m, &t), 5);
}
