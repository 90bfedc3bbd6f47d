//! Position-aligned translation lattices over MT hypotheses.
//!
//! Each hypothesis of length L becomes a chain of L+1 nodes where node i
//! sits between token i-1 and token i. Non-OOV positions carry a single
//! arc; OOV slots fan out into one arc per candidate translation. The
//! lattice is a "sausage": every arc at position i runs from node i to
//! node i+1, so a path is one arc index per position.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{CandidateSet, HypothesisRecord, Sentence};

/// Sentinel returned by [`path_count`] when the product of arc counts
/// would overflow.
pub const PATH_COUNT_SATURATED: u64 = u64::MAX;

/// One labeled arc between adjacent lattice nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub label: String,
    pub is_oov_candidate: bool,
    /// Original source word when this arc belongs to an OOV slot.
    pub source_word: Option<String>,
    /// Full candidate phrase when a multi-word translation was collapsed to
    /// its first token. In-memory metadata only; not serialized.
    pub phrase: Option<String>,
}

impl Arc {
    pub fn plain(label: String) -> Self {
        Arc { label, is_oov_candidate: false, source_word: None, phrase: None }
    }
}

/// A compressed/expanded lattice over one hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationLattice {
    pub doc_id: String,
    pub sent_index: usize,
    /// Outgoing arcs per position; `arcs[i]` connects node i to node i+1.
    pub arcs: Vec<Vec<Arc>>,
}

/// One arc index per position, selecting a concrete hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LatticePath {
    pub arc_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LatticeError {
    SlotOutOfRange { doc_id: String, sent_index: usize, pos: usize, len: usize },
    EmptyPosition { pos: usize },
    BadPathLength { expected: usize, got: usize },
    BadArcIndex { pos: usize, index: usize, arcs: usize },
    TooManyPaths { count: u64, limit: u64 },
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::SlotOutOfRange { doc_id, sent_index, pos, len } => write!(
                f,
                "lattice {doc_id:?}:{sent_index}: OOV slot position {pos} out of range (length {len})"
            ),
            LatticeError::EmptyPosition { pos } => {
                write!(f, "lattice position {pos} has no arcs")
            }
            LatticeError::BadPathLength { expected, got } => {
                write!(f, "path selects {got} arcs but the lattice has {expected} positions")
            }
            LatticeError::BadArcIndex { pos, index, arcs } => {
                write!(f, "path arc index {index} at position {pos} exceeds {arcs} arcs")
            }
            LatticeError::TooManyPaths { count, limit } => {
                write!(f, "lattice has {count} paths, above the enumeration limit {limit}")
            }
        }
    }
}

impl core::error::Error for LatticeError {}

impl TranslationLattice {
    /// Hypothesis length L (number of positions).
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Positions that carry more than one arc, i.e. unresolved choices.
    pub fn slot_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.len() > 1)
            .map(|(i, _)| i)
    }

    /// The path picking the first arc everywhere.
    pub fn default_path(&self) -> LatticePath {
        LatticePath {
            arc_indices: alloc::vec![0; self.arcs.len()],
        }
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        for (pos, arcs) in self.arcs.iter().enumerate() {
            if arcs.is_empty() {
                return Err(LatticeError::EmptyPosition { pos });
            }
        }
        Ok(())
    }
}

/// Expands a hypothesis into a lattice: non-OOV tokens become single arcs,
/// each OOV slot becomes one arc per candidate. An OOV whose candidate set
/// is empty (or absent) keeps the source word as a single pass-through arc.
/// Multi-word candidates collapse to their first token, with the full
/// phrase kept as arc metadata.
pub fn build_lattice(
    hyp: &HypothesisRecord,
    candidates: &BTreeMap<String, CandidateSet>,
) -> Result<TranslationLattice, LatticeError> {
    let mut slots = hyp.oov_slots.iter().peekable();
    let mut arcs: Vec<Vec<Arc>> = Vec::with_capacity(hyp.tokens.len());
    for (pos, token) in hyp.tokens.iter().enumerate() {
        let slot = match slots.peek() {
            Some(s) if s.pos == pos => slots.next(),
            _ => None,
        };
        match slot {
            Some(slot) => {
                let set = candidates.get(&slot.source_word);
                let position = match set {
                    Some(set) if !set.is_empty() => set
                        .candidates
                        .iter()
                        .map(|c| {
                            let label = first_token(c);
                            let phrase = (label != *c).then(|| c.clone());
                            Arc {
                                label,
                                is_oov_candidate: true,
                                source_word: Some(slot.source_word.clone()),
                                phrase,
                            }
                        })
                        .collect::<Vec<_>>(),
                    _ => alloc::vec![Arc {
                        label: slot.source_word.clone(),
                        is_oov_candidate: true,
                        source_word: Some(slot.source_word.clone()),
                        phrase: None,
                    }],
                };
                arcs.push(dedup_arcs(position));
            }
            None => arcs.push(alloc::vec![Arc::plain(token.clone())]),
        }
    }
    // Any slot left unconsumed points past the token sequence.
    if let Some(s) = slots.next() {
        return Err(LatticeError::SlotOutOfRange {
            doc_id: hyp.doc_id.clone(),
            sent_index: hyp.sent_index,
            pos: s.pos,
            len: hyp.tokens.len(),
        });
    }
    Ok(TranslationLattice {
        doc_id: hyp.doc_id.clone(),
        sent_index: hyp.sent_index,
        arcs,
    })
}

fn first_token(candidate: &str) -> String {
    candidate
        .split_whitespace()
        .next()
        .unwrap_or(candidate)
        .to_string()
}

fn dedup_arcs(arcs: Vec<Arc>) -> Vec<Arc> {
    let mut out: Vec<Arc> = Vec::with_capacity(arcs.len());
    for a in arcs {
        if !out.iter().any(|b| b.label == a.label) {
            out.push(a);
        }
    }
    out
}

/// Product of per-position arc counts, saturating at
/// [`PATH_COUNT_SATURATED`].
pub fn path_count(lattice: &TranslationLattice) -> u64 {
    let mut count: u64 = 1;
    for arcs in &lattice.arcs {
        count = count.saturating_mul(arcs.len() as u64);
    }
    count
}

/// All paths in lexicographic order of arc indices. Refuses lattices whose
/// path count exceeds `limit`.
pub fn enumerate_paths(
    lattice: &TranslationLattice,
    limit: u64,
) -> Result<Vec<LatticePath>, LatticeError> {
    let count = path_count(lattice);
    if count > limit {
        return Err(LatticeError::TooManyPaths { count, limit });
    }
    let mut paths = Vec::with_capacity(count as usize);
    let mut indices = alloc::vec![0usize; lattice.arcs.len()];
    loop {
        paths.push(LatticePath {
            arc_indices: indices.clone(),
        });
        // Odometer increment, rightmost position fastest.
        let mut pos = lattice.arcs.len();
        loop {
            if pos == 0 {
                return Ok(paths);
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < lattice.arcs[pos].len() {
                break;
            }
            indices[pos] = 0;
        }
    }
}

/// Tokens of the selected arcs, in position order.
pub fn realize(lattice: &TranslationLattice, path: &LatticePath) -> Result<Sentence, LatticeError> {
    if path.arc_indices.len() != lattice.arcs.len() {
        return Err(LatticeError::BadPathLength {
            expected: lattice.arcs.len(),
            got: path.arc_indices.len(),
        });
    }
    let mut tokens = Vec::with_capacity(lattice.arcs.len());
    for (pos, (&idx, arcs)) in path.arc_indices.iter().zip(&lattice.arcs).enumerate() {
        let arc = arcs.get(idx).ok_or(LatticeError::BadArcIndex {
            pos,
            index: idx,
            arcs: arcs.len(),
        })?;
        tokens.push(arc.label.clone());
    }
    Ok(Sentence::new(tokens))
}
