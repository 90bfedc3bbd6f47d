//! Count-based sentence completion: windowed co-occurrence statistics,
//! pointwise mutual information, and greedy left-to-right OOV selection.
//!
//! PMI(x,y) = ln( P(x,y) / (P(x) P(y)) ) with probabilities estimated as
//! count/N over context windows. A candidate is scored by the mean PMI
//! against the content words in scope; slots are filled left to right and
//! each chosen word joins the context for the next slot.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{Document, Sentence};
use crate::lattice::{LatticePath, TranslationLattice};
use crate::math;

/// Which sentences contribute context words when scoring a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextScope {
    Sentence,
    Document { k_prev: usize, k_next: usize },
}

impl ContextScope {
    /// Document scope with the previous four sentences.
    pub fn document_default() -> Self {
        ContextScope::Document { k_prev: 4, k_next: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct PmiConfig {
    /// Sliding-window width; 0 means the whole sentence is one window.
    pub window_size: usize,
    /// Score for unseen pairs (and empty contexts); keeps averages finite.
    pub floor_logprob: f64,
    pub stopwords: BTreeSet<String>,
    pub context_scope: ContextScope,
}

impl Default for PmiConfig {
    fn default() -> Self {
        PmiConfig {
            window_size: 0,
            floor_logprob: -20.0,
            stopwords: BTreeSet::new(),
            context_scope: ContextScope::Sentence,
        }
    }
}

impl PmiConfig {
    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }
}

/// Windowed joint/marginal counts with distinct-membership (boolean)
/// counting: each window contributes at most 1 to any token or pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CooccurrenceTable {
    pub window_count: u64,
    pub window_size: usize,
    unigram_counts: BTreeMap<String, u64>,
    pair_counts: BTreeMap<(String, String), u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PmiError {
    WindowSizeMismatch { left: usize, right: usize },
}

impl fmt::Display for PmiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PmiError::WindowSizeMismatch { left, right } => {
                write!(f, "cannot merge tables with window sizes {left} and {right}")
            }
        }
    }
}

impl core::error::Error for PmiError {}

impl CooccurrenceTable {
    /// Empty table with the given header fields (deserialization entry).
    pub fn with_header(window_count: u64, window_size: usize) -> Self {
        CooccurrenceTable {
            window_count,
            window_size,
            ..CooccurrenceTable::default()
        }
    }

    pub fn unigram(&self, token: &str) -> u64 {
        self.unigram_counts.get(token).copied().unwrap_or(0)
    }

    pub fn pair(&self, x: &str, y: &str) -> u64 {
        let key = pair_key(x, y);
        self.pair_counts.get(&key).copied().unwrap_or(0)
    }

    /// Unigram entries in lexicographic token order.
    pub fn unigrams(&self) -> impl Iterator<Item = (&str, u64)> {
        self.unigram_counts.iter().map(|(t, &c)| (t.as_str(), c))
    }

    /// Pair entries with tok1 < tok2, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.pair_counts
            .iter()
            .map(|((a, b), &c)| (a.as_str(), b.as_str(), c))
    }

    pub fn insert_unigram(&mut self, token: String, count: u64) {
        *self.unigram_counts.entry(token).or_insert(0) += count;
    }

    pub fn insert_pair(&mut self, x: String, y: String, count: u64) {
        let key = if x <= y { (x, y) } else { (y, x) };
        *self.pair_counts.entry(key).or_insert(0) += count;
    }

    /// Elementwise count addition, for sharded counting.
    pub fn merge(&mut self, other: &CooccurrenceTable) -> Result<(), PmiError> {
        if self.window_size != other.window_size {
            return Err(PmiError::WindowSizeMismatch {
                left: self.window_size,
                right: other.window_size,
            });
        }
        self.window_count += other.window_count;
        for (t, &c) in &other.unigram_counts {
            *self.unigram_counts.entry(t.clone()).or_insert(0) += c;
        }
        for (k, &c) in &other.pair_counts {
            *self.pair_counts.entry(k.clone()).or_insert(0) += c;
        }
        Ok(())
    }

    /// Multiplies every count by `k` (testing hook for scale invariance).
    pub fn scale(&self, k: u64) -> CooccurrenceTable {
        CooccurrenceTable {
            window_count: self.window_count * k,
            window_size: self.window_size,
            unigram_counts: self
                .unigram_counts
                .iter()
                .map(|(t, &c)| (t.clone(), c * k))
                .collect(),
            pair_counts: self
                .pair_counts
                .iter()
                .map(|(p, &c)| (p.clone(), c * k))
                .collect(),
        }
    }
}

fn pair_key(x: &str, y: &str) -> (String, String) {
    if x <= y {
        (x.to_string(), y.to_string())
    } else {
        (y.to_string(), x.to_string())
    }
}

/// Counts co-occurrences over a corpus. Stopwords are removed first; each
/// window then contributes 1 to N, 1 per distinct member token, and 1 per
/// distinct unordered pair. With `window_size` 0 (or a sentence shorter
/// than the window) the whole sentence is a single window; otherwise
/// windows slide one token at a time. Windows never cross sentences.
pub fn count_cooccurrences(corpus: &[Document], config: &PmiConfig) -> CooccurrenceTable {
    let mut table = CooccurrenceTable {
        window_size: config.window_size,
        ..CooccurrenceTable::default()
    };
    for doc in corpus {
        for sentence in &doc.sentences {
            let content: Vec<&str> = sentence
                .tokens
                .iter()
                .map(String::as_str)
                .filter(|t| !config.is_stopword(t))
                .collect();
            if content.is_empty() {
                continue;
            }
            if config.window_size == 0 || content.len() <= config.window_size {
                count_window(&mut table, &content);
            } else {
                for start in 0..=content.len() - config.window_size {
                    count_window(&mut table, &content[start..start + config.window_size]);
                }
            }
        }
    }
    table
}

fn count_window(table: &mut CooccurrenceTable, window: &[&str]) {
    table.window_count += 1;
    let distinct: BTreeSet<&str> = window.iter().copied().collect();
    for &t in &distinct {
        table.insert_unigram(t.to_string(), 1);
    }
    let members: Vec<&str> = distinct.into_iter().collect();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            table.insert_pair(members[i].to_string(), members[j].to_string(), 1);
        }
    }
}

/// Natural-log PMI; returns the configured floor when the pair or either
/// unigram is unseen.
pub fn pmi(table: &CooccurrenceTable, x: &str, y: &str, config: &PmiConfig) -> f64 {
    let cxy = table.pair(x, y);
    let cx = table.unigram(x);
    let cy = table.unigram(y);
    if cxy == 0 || cx == 0 || cy == 0 || table.window_count == 0 {
        return config.floor_logprob;
    }
    math::ln(cxy as f64 * table.window_count as f64 / (cx as f64 * cy as f64))
}

/// Mean PMI of `candidate` against the multiset of context words; the
/// floor when the context is empty.
pub fn avg_pmi(
    candidate: &str,
    context_words: &[&str],
    table: &CooccurrenceTable,
    config: &PmiConfig,
) -> f64 {
    if context_words.is_empty() {
        return config.floor_logprob;
    }
    let sum: f64 = context_words
        .iter()
        .map(|w| pmi(table, candidate, w, config))
        .sum();
    sum / context_words.len() as f64
}

/// Greedy left-to-right sentence completion: for each OOV slot pick the
/// candidate with the highest average PMI against the current content-word
/// context (ties go to the lowest candidate index), then append the choice
/// to the context. `prev` holds earlier sentences (already disambiguated),
/// `next` upcoming ones; both are consulted only under document scope.
pub fn complete_sentence(
    lattice: &TranslationLattice,
    prev: &[Sentence],
    next: &[Sentence],
    table: &CooccurrenceTable,
    config: &PmiConfig,
) -> LatticePath {
    let mut context: Vec<String> = Vec::new();
    if let ContextScope::Document { k_prev, k_next } = config.context_scope {
        let start = prev.len().saturating_sub(k_prev);
        for s in &prev[start..] {
            context.extend(content_words(s.tokens.iter().map(String::as_str), config));
        }
        for s in next.iter().take(k_next) {
            context.extend(content_words(s.tokens.iter().map(String::as_str), config));
        }
    }
    // Fixed words of this hypothesis: every position with a single arc.
    for arcs in &lattice.arcs {
        if arcs.len() == 1 && !config.is_stopword(&arcs[0].label) {
            context.push(arcs[0].label.clone());
        }
    }

    let mut path = lattice.default_path();
    for pos in 0..lattice.arcs.len() {
        let arcs = &lattice.arcs[pos];
        if arcs.len() < 2 {
            continue;
        }
        let ctx_refs: Vec<&str> = context.iter().map(String::as_str).collect();
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (i, arc) in arcs.iter().enumerate() {
            let score = avg_pmi(&arc.label, &ctx_refs, table, config);
            if score > best_score {
                best = i;
                best_score = score;
            }
        }
        path.arc_indices[pos] = best;
        let chosen = &arcs[best].label;
        if !config.is_stopword(chosen) {
            context.push(chosen.clone());
        }
    }
    path
}

fn content_words<'a>(
    tokens: impl Iterator<Item = &'a str>,
    config: &PmiConfig,
) -> Vec<String> {
    tokens
        .filter(|t| !config.is_stopword(t))
        .map(ToString::to_string)
        .collect()
}
