//! Documents, lexicons, MT hypotheses, translation-candidate retrieval, and
//! Jaccard-based training-data selection.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// One tokenized sentence. Tokens are lowercased and whitespace-free;
/// the `<s>`/`</s>` boundary markers are implicit and never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<String>,
}

impl Sentence {
    pub fn new(tokens: Vec<String>) -> Self {
        Sentence { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// A document: the unit of context for the document-level models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn new(id: String, sentences: Vec<Sentence>) -> Self {
        Document { id, sentences }
    }

    /// Checks the structural invariants: nonempty id, at least one sentence,
    /// no empty sentences, no whitespace inside tokens.
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.id.is_empty() {
            return Err(CorpusError::EmptyDocumentId);
        }
        if self.sentences.is_empty() {
            return Err(CorpusError::EmptyDocument {
                doc_id: self.id.clone(),
            });
        }
        for (i, s) in self.sentences.iter().enumerate() {
            if s.is_empty() {
                return Err(CorpusError::EmptySentence {
                    doc_id: self.id.clone(),
                    sent_index: i,
                });
            }
            for t in &s.tokens {
                if t.is_empty() || t.chars().any(char::is_whitespace) {
                    return Err(CorpusError::BadToken {
                        doc_id: self.id.clone(),
                        token: t.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Distinct tokens of the document.
    pub fn vocab(&self) -> BTreeSet<&str> {
        self.sentences
            .iter()
            .flat_map(|s| s.tokens.iter().map(String::as_str))
            .collect()
    }
}

/// Bilingual lexicon: source word -> ordered target entries.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<(String, Option<f64>)>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    /// Adds a (source, target) pair, keeping the first occurrence on
    /// duplicates. Non-finite weights are rejected.
    pub fn insert(
        &mut self,
        source: String,
        target: String,
        weight: Option<f64>,
    ) -> Result<(), CorpusError> {
        if let Some(w) = weight {
            if !w.is_finite() {
                return Err(CorpusError::BadWeight { source, target });
            }
        }
        let targets = self.entries.entry(source).or_default();
        if !targets.iter().any(|(t, _)| t == &target) {
            targets.push((target, weight));
        }
        Ok(())
    }

    pub fn targets(&self, source: &str) -> Option<&[(String, Option<f64>)]> {
        self.entries.get(source).map(Vec::as_slice)
    }

    /// Source words in lexicographic order.
    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All target tokens, in (source, entry-order) iteration order.
    pub fn all_targets(&self) -> impl Iterator<Item = &str> {
        self.entries
            .values()
            .flat_map(|ts| ts.iter().map(|(t, _)| t.as_str()))
    }
}

/// Ordered, deduplicated translation candidates for one OOV source word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub source_word: String,
    pub candidates: Vec<String>,
}

impl CandidateSet {
    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// An OOV slot in an MT hypothesis: the token at `pos` is the untranslated
/// source word to be replaced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OovSlot {
    pub pos: usize,
    pub source_word: String,
}

/// One-best MT hypothesis for one sentence, with annotated OOV slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisRecord {
    pub doc_id: String,
    pub sent_index: usize,
    pub tokens: Vec<String>,
    pub oov_slots: Vec<OovSlot>,
}

impl HypothesisRecord {
    /// Slot positions must be strictly increasing and in range.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let mut prev: Option<usize> = None;
        for slot in &self.oov_slots {
            if slot.pos >= self.tokens.len() {
                return Err(CorpusError::SlotOutOfRange {
                    doc_id: self.doc_id.clone(),
                    sent_index: self.sent_index,
                    pos: slot.pos,
                    len: self.tokens.len(),
                });
            }
            if let Some(p) = prev {
                if slot.pos <= p {
                    return Err(CorpusError::SlotsNotIncreasing {
                        doc_id: self.doc_id.clone(),
                        sent_index: self.sent_index,
                    });
                }
            }
            prev = Some(slot.pos);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorpusError {
    EmptyDocumentId,
    EmptyDocument { doc_id: String },
    EmptySentence { doc_id: String, sent_index: usize },
    BadToken { doc_id: String, token: String },
    BadWeight { source: String, target: String },
    SlotOutOfRange { doc_id: String, sent_index: usize, pos: usize, len: usize },
    SlotsNotIncreasing { doc_id: String, sent_index: usize },
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::EmptyDocumentId => write!(f, "document id is empty"),
            CorpusError::EmptyDocument { doc_id } => {
                write!(f, "document {doc_id:?} has no sentences")
            }
            CorpusError::EmptySentence { doc_id, sent_index } => {
                write!(f, "document {doc_id:?} sentence {sent_index} is empty")
            }
            CorpusError::BadToken { doc_id, token } => {
                write!(f, "document {doc_id:?} has malformed token {token:?}")
            }
            CorpusError::BadWeight { source, target } => {
                write!(f, "lexicon pair {source:?} -> {target:?} has non-finite weight")
            }
            CorpusError::SlotOutOfRange { doc_id, sent_index, pos, len } => write!(
                f,
                "hypothesis {doc_id:?}:{sent_index}: slot position {pos} out of range (length {len})"
            ),
            CorpusError::SlotsNotIncreasing { doc_id, sent_index } => write!(
                f,
                "hypothesis {doc_id:?}:{sent_index}: slot positions not strictly increasing"
            ),
        }
    }
}

impl core::error::Error for CorpusError {}

/// Whitespace-split, lowercased tokens. Punctuation stays attached; no
/// further normalization.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| t.to_lowercase())
        .collect()
}

/// Edit distance with unit insert/delete/substitute costs over Unicode
/// code points.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = alloc::vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Collects translation candidates for an OOV word: exact lexicon matches
/// first, then targets of related-language source words within
/// `max_distance` edits, ordered by (distance, source word), truncated to
/// `top_k` total. Duplicates keep their first occurrence. An empty result
/// signals no coverage (the caller passes the OOV through unchanged).
pub fn retrieve_candidates(
    oov: &str,
    lexicon: &Lexicon,
    related_lexicon: &Lexicon,
    max_distance: usize,
    top_k: usize,
) -> CandidateSet {
    debug_assert!(top_k >= 1);
    let mut candidates: Vec<String> = Vec::new();
    let push = |candidates: &mut Vec<String>, t: &str| {
        if candidates.len() < top_k && !candidates.iter().any(|c| c == t) {
            candidates.push(t.to_string());
        }
    };

    if let Some(targets) = lexicon.targets(oov) {
        for (t, _) in targets {
            push(&mut candidates, t);
        }
    }

    // BTreeMap iteration is already source-lexicographic, so a stable sort
    // on distance alone yields (distance, source) order.
    let mut related: Vec<(usize, &str)> = related_lexicon
        .sources()
        .filter_map(|s| {
            let d = levenshtein(oov, s);
            (d <= max_distance).then_some((d, s))
        })
        .collect();
    related.sort_by_key(|&(d, _)| d);
    for (_, source) in related {
        if let Some(targets) = related_lexicon.targets(source) {
            for (t, _) in targets {
                push(&mut candidates, t);
            }
        }
    }

    CandidateSet {
        source_word: oov.to_string(),
        candidates,
    }
}

/// |A intersect B| / |A union B|; 0 when both sets are empty.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Keeps exactly the articles whose vocabulary has a Jaccard index with
/// `target_vocab` strictly above `threshold`, preserving input order.
pub fn select_articles<'a>(
    articles: &'a [Document],
    target_vocab: &BTreeSet<&str>,
    threshold: f64,
) -> Vec<&'a Document> {
    articles
        .iter()
        .filter(|doc| jaccard(&doc.vocab(), target_vocab) > threshold)
        .collect()
}
