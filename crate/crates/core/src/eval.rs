//! Corpus-level BLEU-4 and unigram precision, plus the reference-enriched
//! (diagnostic) and reference-substituted (topline) experiment
//! constructions.
//!
//! BLEU is computed case-insensitively against a single reference:
//! geometric mean of modified n-gram precisions for n = 1..4, add-one
//! smoothing applied to any order with zero matches, times the brevity
//! penalty exp(min(0, 1 - ref_len/hyp_len)), scaled to [0, 100].

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{CandidateSet, HypothesisRecord, Sentence};
use crate::math;

const MAX_ORDER: usize = 4;

/// Corpus evaluation summary.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub bleu: f64,
    pub unigram_precision: f64,
    pub sentence_count: usize,
    pub token_count: usize,
}

/// Keys a slot: which hypothesis token position inside which sentence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SlotKey {
    pub doc_id: String,
    pub sent_index: usize,
    pub pos: usize,
}

/// Reference token judged correct for each OOV slot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SlotAlignment {
    entries: BTreeMap<SlotKey, String>,
}

impl SlotAlignment {
    pub fn new() -> Self {
        SlotAlignment::default()
    }

    pub fn insert(&mut self, key: SlotKey, reference_token: String) {
        self.entries.insert(key, reference_token);
    }

    pub fn get(&self, key: &SlotKey) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SlotKey, &str)> {
        self.entries.iter().map(|(k, v)| (k, v.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    LengthMismatch { hypotheses: usize, references: usize },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::LengthMismatch { hypotheses, references } => write!(
                f,
                "corpus length mismatch: {hypotheses} hypotheses vs {references} references"
            ),
        }
    }
}

impl core::error::Error for EvalError {}

fn fold_case(tokens: &[String]) -> Vec<String> {
    tokens.iter().map(|t| t.to_lowercase()).collect()
}

fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], u64> {
    let mut counts: BTreeMap<&[String], u64> = BTreeMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus BLEU-4 in [0, 100]; see the module docs for the exact variant.
pub fn bleu(hypotheses: &[Sentence], references: &[Sentence]) -> Result<f64, EvalError> {
    if hypotheses.len() != references.len() {
        return Err(EvalError::LengthMismatch {
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    let mut matches = [0u64; MAX_ORDER];
    let mut totals = [0u64; MAX_ORDER];
    let mut hyp_len = 0u64;
    let mut ref_len = 0u64;
    for (hyp, reference) in hypotheses.iter().zip(references) {
        let hyp_tokens = fold_case(&hyp.tokens);
        let ref_tokens = fold_case(&reference.tokens);
        hyp_len += hyp_tokens.len() as u64;
        ref_len += ref_tokens.len() as u64;
        for n in 1..=MAX_ORDER {
            let hyp_ngrams = ngram_counts(&hyp_tokens, n);
            let ref_ngrams = ngram_counts(&ref_tokens, n);
            for (gram, &count) in &hyp_ngrams {
                totals[n - 1] += count;
                let clip = ref_ngrams.get(gram).copied().unwrap_or(0);
                matches[n - 1] += count.min(clip);
            }
        }
    }
    if hyp_len == 0 {
        return Ok(0.0);
    }
    let mut log_precision_sum = 0.0;
    for n in 1..=MAX_ORDER {
        let (mut m, mut t) = (matches[n - 1], totals[n - 1]);
        if m == 0 {
            m += 1;
            t += 1;
        }
        log_precision_sum += math::ln(m as f64 / t as f64);
    }
    let brevity = if hyp_len < ref_len {
        math::exp(1.0 - ref_len as f64 / hyp_len as f64)
    } else {
        1.0
    };
    Ok(100.0 * brevity * math::exp(log_precision_sum / MAX_ORDER as f64))
}

/// Corpus-level clipped unigram matches over hypothesis tokens, in
/// [0, 100], case-insensitive. No smoothing.
pub fn unigram_precision(
    hypotheses: &[Sentence],
    references: &[Sentence],
) -> Result<f64, EvalError> {
    if hypotheses.len() != references.len() {
        return Err(EvalError::LengthMismatch {
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    let mut matched = 0u64;
    let mut total = 0u64;
    for (hyp, reference) in hypotheses.iter().zip(references) {
        let hyp_tokens = fold_case(&hyp.tokens);
        let ref_tokens = fold_case(&reference.tokens);
        total += hyp_tokens.len() as u64;
        let mut ref_counts: BTreeMap<&str, u64> = BTreeMap::new();
        for t in &ref_tokens {
            *ref_counts.entry(t).or_insert(0) += 1;
        }
        let mut hyp_counts: BTreeMap<&str, u64> = BTreeMap::new();
        for t in &hyp_tokens {
            *hyp_counts.entry(t).or_insert(0) += 1;
        }
        for (t, &c) in &hyp_counts {
            matched += c.min(ref_counts.get(t).copied().unwrap_or(0));
        }
    }
    if total == 0 {
        return Ok(0.0);
    }
    Ok(100.0 * matched as f64 / total as f64)
}

/// Builds the full report for aligned corpora.
pub fn evaluate(hypotheses: &[Sentence], references: &[Sentence]) -> Result<EvalReport, EvalError> {
    Ok(EvalReport {
        bleu: bleu(hypotheses, references)?,
        unigram_precision: unigram_precision(hypotheses, references)?,
        sentence_count: hypotheses.len(),
        token_count: hypotheses.iter().map(Sentence::len).sum(),
    })
}

/// Appends the aligned reference token to a candidate set (diagnostic
/// experiment). Returns the possibly-extended set and whether the slot was
/// found in the alignment; a missing slot leaves the set unchanged and the
/// caller counts the warning.
pub fn enrich_with_reference(
    candidates: &CandidateSet,
    alignment: &SlotAlignment,
    slot: &SlotKey,
) -> (CandidateSet, bool) {
    match alignment.get(slot) {
        None => (candidates.clone(), false),
        Some(reference) => {
            let mut enriched = candidates.clone();
            if !enriched.candidates.iter().any(|c| c == reference) {
                enriched.candidates.push(reference.to_string());
            }
            (enriched, true)
        }
    }
}

/// Substitutes the aligned reference token at every OOV slot (topline
/// experiment). Unaligned slots pass the source word through; the count of
/// such slots is returned alongside the sentence.
pub fn topline_substitute(
    hyp: &HypothesisRecord,
    alignment: &SlotAlignment,
) -> (Sentence, usize) {
    let mut tokens = hyp.tokens.clone();
    let mut unaligned = 0usize;
    for slot in &hyp.oov_slots {
        let key = SlotKey {
            doc_id: hyp.doc_id.clone(),
            sent_index: hyp.sent_index,
            pos: slot.pos,
        };
        match alignment.get(&key) {
            Some(reference) => tokens[slot.pos] = reference.to_string(),
            None => {
                tokens[slot.pos] = slot.source_word.clone();
                unaligned += 1;
            }
        }
    }
    (Sentence::new(tokens), unaligned)
}
