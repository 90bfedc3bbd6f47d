//! Graph-based reranking: an undirected graph over OOV translation
//! candidates and content words, edges weighted by PMI, scored with
//! PageRank votes R(v) = (1-d) + d * sum over neighbors j of
//! R(j) * w_vj / W_j, where W_j is j's total incident weight.
//!
//! The unweighted variant divides by plain degree instead, recovering the
//! textbook formula; the weighted form reduces to it when all weights are
//! equal.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::lattice::{LatticePath, TranslationLattice};
use crate::pmi::{pmi, CooccurrenceTable, PmiConfig};

/// Vertex roles: candidates are keyed by slot so the same token may appear
/// once per slot and again as a context word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum VertexKind {
    ContextWord,
    Candidate { slot: usize, index: usize },
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub token: String,
    pub kind: VertexKind,
}

/// Undirected weighted graph in adjacency-list form.
#[derive(Debug, Clone, Default)]
pub struct RankGraph {
    pub vertices: Vec<Vertex>,
    /// Per-vertex list of (neighbor index, weight); weights are > 0.
    pub adjacency: Vec<Vec<(usize, f64)>>,
}

impl RankGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn add_edge(&mut self, a: usize, b: usize, w: f64) {
        if a == b || w <= 0.0 {
            return;
        }
        self.adjacency[a].push((b, w));
        self.adjacency[b].push((a, w));
    }
}

#[derive(Debug, Clone)]
pub struct PageRankConfig {
    pub damping: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Divide neighbor votes by degree instead of incident weight,
    /// recovering the literal unweighted formula.
    pub unweighted: bool,
    /// Which sentences contribute context words (the caller assembles
    /// them; document scope with k_prev = 0 reproduces sentence scope).
    pub scope: crate::pmi::ContextScope,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: 0.85,
            max_iterations: 200,
            tolerance: 1e-10,
            unweighted: false,
            scope: crate::pmi::ContextScope::Sentence,
        }
    }
}

/// PageRank fixed point, found by synchronous iteration from all-ones.
#[derive(Debug, Clone)]
pub struct PageRankResult {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Builds the rank graph for one lattice: one vertex per candidate of every
/// slot plus one per distinct content word in scope. Candidates connect to
/// every content word; content words connect to each other; candidates are
/// never adjacent to candidates. Edge weight is PMI clipped at zero
/// (nonpositive PMI drops the edge).
pub fn build_graph(
    lattice: &TranslationLattice,
    context_words: &[&str],
    table: &CooccurrenceTable,
    config: &PmiConfig,
) -> RankGraph {
    let mut graph = RankGraph::default();

    let mut context_index: BTreeMap<&str, usize> = BTreeMap::new();
    for &w in context_words {
        if config.is_stopword(w) {
            continue;
        }
        if !context_index.contains_key(w) {
            let id = graph.vertices.len();
            graph.vertices.push(Vertex { token: w.to_string(), kind: VertexKind::ContextWord });
            context_index.insert(w, id);
        }
    }

    let mut candidate_ids: Vec<usize> = Vec::new();
    for (slot, arcs) in lattice.arcs.iter().enumerate() {
        if arcs.len() < 2 {
            continue;
        }
        for (index, arc) in arcs.iter().enumerate() {
            let id = graph.vertices.len();
            graph.vertices.push(Vertex {
                token: arc.label.clone(),
                kind: VertexKind::Candidate { slot, index },
            });
            candidate_ids.push(id);
        }
    }

    graph.adjacency = alloc::vec![Vec::new(); graph.vertices.len()];

    let context_ids: Vec<usize> = context_index.values().copied().collect();
    for (k, &a) in context_ids.iter().enumerate() {
        for &b in &context_ids[k + 1..] {
            let w = pmi(table, &graph.vertices[a].token, &graph.vertices[b].token, config);
            graph.add_edge(a, b, w.max(0.0));
        }
    }
    for &c in &candidate_ids {
        for &ctx in &context_ids {
            let w = pmi(table, &graph.vertices[c].token, &graph.vertices[ctx].token, config);
            graph.add_edge(c, ctx, w.max(0.0));
        }
    }
    graph
}

/// Synchronous (Jacobi) iteration from all-ones until the max absolute
/// score change drops below the tolerance. Scores are not normalized to a
/// distribution; an isolated vertex sits at exactly 1-d.
pub fn pagerank(graph: &RankGraph, config: &PageRankConfig) -> PageRankResult {
    let n = graph.vertex_count();
    let mut scores = alloc::vec![1.0f64; n];
    if n == 0 {
        return PageRankResult { scores, iterations: 0, converged: true };
    }
    // Outgoing mass per vertex: total incident weight, or degree when
    // running the unweighted formula.
    let out_mass: Vec<f64> = graph
        .adjacency
        .iter()
        .map(|adj| {
            if config.unweighted {
                adj.len() as f64
            } else {
                adj.iter().map(|&(_, w)| w).sum()
            }
        })
        .collect();

    let mut next = alloc::vec![0.0f64; n];
    for iteration in 1..=config.max_iterations {
        let mut max_delta: f64 = 0.0;
        for i in 0..n {
            let mut vote = 0.0;
            for &(j, w) in &graph.adjacency[i] {
                let share = if config.unweighted { 1.0 } else { w };
                vote += scores[j] * share / out_mass[j];
            }
            next[i] = (1.0 - config.damping) + config.damping * vote;
            max_delta = max_delta.max((next[i] - scores[i]).abs());
        }
        core::mem::swap(&mut scores, &mut next);
        if max_delta < config.tolerance {
            return PageRankResult { scores, iterations: iteration, converged: true };
        }
    }
    PageRankResult { scores, iterations: config.max_iterations, converged: false }
}

/// Per slot, the candidate with the highest score; ties go to the lowest
/// candidate index.
pub fn rank_select(
    lattice: &TranslationLattice,
    graph: &RankGraph,
    scores: &[f64],
) -> LatticePath {
    let mut path = lattice.default_path();
    let mut best: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    for (v, vertex) in graph.vertices.iter().enumerate() {
        if let VertexKind::Candidate { slot, index } = vertex.kind {
            let score = scores[v];
            let entry = best.entry(slot).or_insert((index, score));
            if score > entry.1 || (score == entry.1 && index < entry.0) {
                *entry = (index, score);
            }
        }
    }
    for (slot, (index, _)) in best {
        path.arc_indices[slot] = index;
    }
    path
}
