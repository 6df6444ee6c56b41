//! Offline phase: one skip-bigram profile per corpus name, plus persistence.
//!
//! A [`SearchIndex`] is immutable. Adding or removing names produces a new
//! snapshot that shares the untouched entries with the old one.

use std::collections::HashSet;
use std::fs;
use std::io::{self, BufRead};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigram::{BigramParams, BigramProfile, SkipBigram};
use crate::error::InvalidArgument;
use crate::normalize::AugmentedTarget;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("unsupported index format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("malformed index document: {0}")]
    Malformed(String),
    #[error("duplicate entry id {0}")]
    DuplicateId(u64),
}

#[derive(Debug, Error)]
#[error("no entry with id {0}")]
pub struct NotFound(pub u64);

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub id: u64,
    pub name: AugmentedTarget,
    pub profile: BigramProfile,
    chars: Box<[char]>,
}

impl CorpusEntry {
    fn new(id: u64, name: AugmentedTarget, params: BigramParams) -> Self {
        let profile = BigramProfile::generate(&name.augmented, params);
        let chars = name.augmented.chars().collect();
        Self {
            id,
            name,
            profile,
            chars,
        }
    }

    /// Scalars of the augmented name, the target every distance runs against.
    pub fn target_chars(&self) -> &[char] {
        &self.chars
    }
}

/// What happened to the input names during a build or an add.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    pub kept: usize,
    /// Input positions (0-based) of names that were empty after folding.
    pub skipped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchIndex {
    params: BigramParams,
    entries: Vec<Arc<CorpusEntry>>,
    next_id: u64,
}

impl SearchIndex {
    pub fn empty(params: BigramParams) -> Result<Self, InvalidArgument> {
        params.validate()?;
        Ok(Self {
            params,
            entries: Vec::new(),
            next_id: 0,
        })
    }

    /// Folds, augments and profiles every name. Names that fold to nothing
    /// are skipped and listed in the report.
    pub fn build<S: AsRef<str>>(
        names: &[S],
        params: BigramParams,
    ) -> Result<(Self, BuildReport), InvalidArgument> {
        let mut index = Self::empty(params)?;
        let mut report = BuildReport::default();
        for (pos, raw) in names.iter().enumerate() {
            let name = AugmentedTarget::new(raw.as_ref());
            if name.is_empty() {
                report.skipped.push(pos);
                continue;
            }
            index
                .entries
                .push(Arc::new(CorpusEntry::new(index.next_id, name, params)));
            index.next_id += 1;
        }
        report.kept = index.entries.len();
        Ok((index, report))
    }

    pub fn params(&self) -> BigramParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl ExactSizeIterator<Item = &CorpusEntry> + '_ {
        self.entries.iter().map(|e| e.as_ref())
    }

    pub fn get(&self, id: u64) -> Option<&CorpusEntry> {
        self.position(id).map(|i| self.entries[i].as_ref())
    }

    fn position(&self, id: u64) -> Option<usize> {
        // ids increase with position
        self.entries.binary_search_by_key(&id, |e| e.id).ok()
    }

    /// Sum of all per-entry profile sizes.
    pub fn total_bigrams(&self) -> usize {
        self.entries.iter().map(|e| e.profile.len()).sum()
    }

    /// New snapshot with `name` appended. Returns the snapshot unchanged (and
    /// `None` for the id) when the name folds to nothing.
    pub fn add_entry(&self, name: &str) -> (Self, Option<u64>) {
        let target = AugmentedTarget::new(name);
        let mut next = self.clone();
        if target.is_empty() {
            return (next, None);
        }
        let id = next.next_id;
        next.entries
            .push(Arc::new(CorpusEntry::new(id, target, self.params)));
        next.next_id += 1;
        (next, Some(id))
    }

    pub fn remove_entry(&self, id: u64) -> Result<Self, NotFound> {
        let pos = self.position(id).ok_or(NotFound(id))?;
        let mut next = self.clone();
        next.entries.remove(pos);
        Ok(next)
    }

    /// Rebuilds every profile under new parameters, keeping ids and order.
    pub fn with_params(&self, params: BigramParams) -> Result<Self, InvalidArgument> {
        params.validate()?;
        if params == self.params {
            return Ok(self.clone());
        }
        let entries = self
            .entries
            .iter()
            .map(|e| Arc::new(CorpusEntry::new(e.id, e.name.clone(), params)))
            .collect();
        Ok(Self {
            params,
            entries,
            next_id: self.next_id,
        })
    }

    pub fn to_json(&self) -> String {
        let doc = IndexDocument {
            format_version: FORMAT_VERSION,
            k: self.params.k,
            lambda: self.params.lambda,
            entries: self
                .entries
                .iter()
                .map(|e| EntryDocument {
                    id: e.id,
                    original: e.name.original.clone(),
                    bigrams: e
                        .profile
                        .orders()
                        .into_iter()
                        .map(|(b, order)| (b.to_string(), order))
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("index document is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        // Check the version before the full schema so a future layout reports
        // as a version error rather than a parse failure.
        let probe: VersionProbe =
            serde_json::from_str(text).map_err(|e| LoadError::Malformed(e.to_string()))?;
        if probe.format_version != FORMAT_VERSION {
            return Err(LoadError::Version {
                found: probe.format_version,
                expected: FORMAT_VERSION,
            });
        }
        let doc: IndexDocument =
            serde_json::from_str(text).map_err(|e| LoadError::Malformed(e.to_string()))?;
        let params = BigramParams {
            k: doc.k,
            lambda: doc.lambda,
        };
        params
            .validate()
            .map_err(|e| LoadError::Malformed(e.to_string()))?;

        let mut seen = HashSet::with_capacity(doc.entries.len());
        let mut entries = Vec::with_capacity(doc.entries.len());
        let mut last_id = None;
        for e in doc.entries {
            if !seen.insert(e.id) {
                return Err(LoadError::DuplicateId(e.id));
            }
            if last_id.is_some_and(|last| e.id < last) {
                return Err(LoadError::Malformed(format!(
                    "entry ids must be increasing, found {} after {}",
                    e.id,
                    last_id.unwrap()
                )));
            }
            last_id = Some(e.id);
            let name = AugmentedTarget::new(&e.original);
            if name.is_empty() {
                return Err(LoadError::Malformed(format!(
                    "entry {} has an empty name",
                    e.id
                )));
            }
            let mut orders = Vec::with_capacity(e.bigrams.len());
            for (s, order) in &e.bigrams {
                let b = SkipBigram::parse(s).ok_or_else(|| {
                    LoadError::Malformed(format!("entry {}: bad bigram {s:?}", e.id))
                })?;
                if *order > params.k {
                    return Err(LoadError::Malformed(format!(
                        "entry {}: skip order {order} exceeds k = {}",
                        e.id, params.k
                    )));
                }
                orders.push((b, *order));
            }
            let stored = BigramProfile::from_orders(orders, params);
            let entry = CorpusEntry::new(e.id, name, params);
            if entry.profile != stored {
                return Err(LoadError::Malformed(format!(
                    "entry {}: stored bigrams do not match its name",
                    e.id
                )));
            }
            entries.push(Arc::new(entry));
        }
        let next_id = last_id.map_or(0, |id| id + 1);
        Ok(Self {
            params,
            entries,
            next_id,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> io::Result<()> {
        fs::write(path, self.to_json())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LoadError> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

#[derive(Serialize, Deserialize)]
struct IndexDocument {
    format_version: u32,
    k: u32,
    lambda: f64,
    entries: Vec<EntryDocument>,
}

#[derive(Serialize, Deserialize)]
struct EntryDocument {
    id: u64,
    original: String,
    bigrams: Vec<(String, u32)>,
}

/// Reads a corpus file: one name per line, blank lines ignored.
pub fn read_corpus(path: impl AsRef<Path>) -> io::Result<Vec<String>> {
    let file = fs::File::open(path)?;
    let mut names = Vec::new();
    for line in io::BufReader::new(file).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            names.push(line);
        }
    }
    Ok(names)
}
