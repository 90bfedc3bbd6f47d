//! Orchestration: candidate assembly, lattice construction, per-document
//! rescoring under any of the context models, data selection, and the
//! evaluation pairing logic.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use oovctx_core::corpus::{
    retrieve_candidates, CandidateSet, Document, HypothesisRecord, Lexicon, Sentence,
};
use oovctx_core::eval::{enrich_with_reference, topline_substitute, SlotAlignment, SlotKey};
use oovctx_core::graphrank::{build_graph, pagerank, rank_select, PageRankConfig};
use oovctx_core::lattice::{build_lattice, realize, LatticeError, LatticePath, TranslationLattice};
use oovctx_core::lm::{ModelParams, TrainError};
use oovctx_core::pmi::{complete_sentence, ContextScope, CooccurrenceTable, PmiConfig};
use oovctx_core::rescore::{
    rescore_document, RescoreConfig, RescoreError, RescoreStats,
};
use oovctx_core::rng::Rng;

use crate::formats::{ChosenSlot, FormatError, OutputRecord};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Rescore(#[from] RescoreError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Eval(#[from] oovctx_core::eval::EvalError),
    #[error("{0}")]
    Data(String),
}

impl PipelineError {
    /// CLI exit code: 2 for data/validation problems, 3 for numeric
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Train(TrainError::NonFiniteLoss { .. }) => 3,
            _ => 2,
        }
    }
}

/// The context model driving path selection.
pub enum ContextModel {
    Pmi { table: CooccurrenceTable, config: PmiConfig },
    PageRank { table: CooccurrenceTable, pmi_config: PmiConfig, config: PageRankConfig },
    Neural { params: ModelParams, config: RescoreConfig },
    /// Uniform random candidate choice, the floor baseline.
    Random { seed: u64 },
}

/// Groups hypotheses by document (first-appearance order) and sorts each
/// group by sentence index.
pub fn group_by_document(records: Vec<HypothesisRecord>) -> Vec<(String, Vec<HypothesisRecord>)> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<HypothesisRecord>> = BTreeMap::new();
    for record in records {
        if !groups.contains_key(&record.doc_id) {
            order.push(record.doc_id.clone());
        }
        groups.entry(record.doc_id.clone()).or_default().push(record);
    }
    order
        .into_iter()
        .map(|id| {
            let mut group = groups.remove(&id).unwrap();
            group.sort_by_key(|h| h.sent_index);
            (id, group)
        })
        .collect()
}

/// Retrieves a candidate set for every distinct OOV source word.
pub fn build_candidates(
    hypotheses: &[HypothesisRecord],
    lexicon: &Lexicon,
    related: &Lexicon,
    max_distance: usize,
    top_k: usize,
) -> BTreeMap<String, CandidateSet> {
    let mut sources: BTreeSet<&str> = BTreeSet::new();
    for hyp in hypotheses {
        for slot in &hyp.oov_slots {
            sources.insert(&slot.source_word);
        }
    }
    sources
        .into_iter()
        .map(|s| (s.to_string(), retrieve_candidates(s, lexicon, related, max_distance, top_k)))
        .collect()
}

/// Builds one lattice per hypothesis. Under the diagnostic setting each
/// slot's candidate set is enriched with its aligned reference token;
/// slots missing from the alignment increment the warning counter.
pub fn build_document_lattices(
    hypotheses: &[HypothesisRecord],
    candidates: &BTreeMap<String, CandidateSet>,
    diagnostic: Option<&SlotAlignment>,
    missing_alignments: &mut u64,
) -> Result<Vec<TranslationLattice>, LatticeError> {
    let mut lattices = Vec::with_capacity(hypotheses.len());
    for hyp in hypotheses {
        let lattice = match diagnostic {
            None => build_lattice(hyp, candidates)?,
            Some(alignment) => {
                let mut enriched = BTreeMap::new();
                for slot in &hyp.oov_slots {
                    let base = candidates
                        .get(&slot.source_word)
                        .cloned()
                        .unwrap_or_else(|| CandidateSet {
                            source_word: slot.source_word.clone(),
                            candidates: Vec::new(),
                        });
                    let seed = enriched.remove(&slot.source_word).unwrap_or(base);
                    let key = SlotKey {
                        doc_id: hyp.doc_id.clone(),
                        sent_index: hyp.sent_index,
                        pos: slot.pos,
                    };
                    let (set, found) = enrich_with_reference(&seed, alignment, &key);
                    if !found {
                        *missing_alignments += 1;
                    }
                    enriched.insert(slot.source_word.clone(), set);
                }
                build_lattice(hyp, &enriched)?
            }
        };
        lattices.push(lattice);
    }
    Ok(lattices)
}

fn output_record(
    lattice: &TranslationLattice,
    path: &LatticePath,
    logprob: Option<f64>,
) -> Result<OutputRecord, LatticeError> {
    let sentence = realize(lattice, path)?;
    let mut chosen = Vec::new();
    for (pos, arcs) in lattice.arcs.iter().enumerate() {
        let arc = &arcs[path.arc_indices[pos]];
        if arc.is_oov_candidate {
            chosen.push(ChosenSlot {
                pos,
                source_word: arc.source_word.clone().unwrap_or_default(),
                chosen: arc.label.clone(),
            });
        }
    }
    Ok(OutputRecord {
        doc_id: lattice.doc_id.clone(),
        sent_index: lattice.sent_index,
        tokens: sentence.tokens,
        logprob,
        chosen,
    })
}

/// Pseudo-sentence of a lattice's fixed (single-arc) tokens, the context
/// contribution of not-yet-disambiguated neighbors.
fn fixed_words(lattice: &TranslationLattice) -> Sentence {
    Sentence::new(
        lattice
            .arcs
            .iter()
            .filter(|arcs| arcs.len() == 1)
            .map(|arcs| arcs[0].label.clone())
            .collect(),
    )
}

fn stable_hash(s: &str) -> u64 {
    // FNV-1a, for per-document random seeds.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Rescoring statistics aggregated over one run.
#[derive(Debug, Default, Clone)]
pub struct RunStats {
    pub sentences: usize,
    pub slots: usize,
    pub step_evals: u64,
    pub merges: u64,
    pub max_frontier: usize,
}

impl RunStats {
    fn absorb(&mut self, stats: &RescoreStats) {
        self.step_evals += stats.step_evals;
        self.merges += stats.merges;
        self.max_frontier = self
            .max_frontier
            .max(stats.frontier_sizes.iter().copied().max().unwrap_or(0));
    }
}

/// Rescores one document's lattices under the chosen model, threading
/// whatever per-document context the model defines.
pub fn rescore_doc(
    lattices: &[TranslationLattice],
    model: &ContextModel,
    stats: &mut RunStats,
) -> Result<Vec<OutputRecord>, PipelineError> {
    let mut records = Vec::with_capacity(lattices.len());
    match model {
        ContextModel::Pmi { table, config } => {
            let fixed: Vec<Sentence> = lattices.iter().map(fixed_words).collect();
            let mut realized: Vec<Sentence> = Vec::with_capacity(lattices.len());
            for (i, lattice) in lattices.iter().enumerate() {
                let path =
                    complete_sentence(lattice, &realized, &fixed[i + 1..], table, config);
                records.push(output_record(lattice, &path, None)?);
                realized.push(Sentence::new(records[i].tokens.clone()));
            }
        }
        ContextModel::PageRank { table, pmi_config, config } => {
            let mut realized: Vec<Sentence> = Vec::with_capacity(lattices.len());
            for lattice in lattices {
                let own = fixed_words(lattice);
                let mut context: Vec<&str> = Vec::new();
                if let ContextScope::Document { k_prev, .. } = config.scope {
                    let start = realized.len().saturating_sub(k_prev);
                    for s in &realized[start..] {
                        context.extend(s.tokens.iter().map(String::as_str));
                    }
                }
                context.extend(own.tokens.iter().map(String::as_str));
                let graph = build_graph(lattice, &context, table, pmi_config);
                let result = pagerank(&graph, config);
                if !result.converged {
                    log_kv(&[
                        ("event", "pagerank_not_converged".to_string()),
                        ("doc_id", lattice.doc_id.clone()),
                        ("sent_index", lattice.sent_index.to_string()),
                    ]);
                }
                let path = rank_select(lattice, &graph, &result.scores);
                let record = output_record(lattice, &path, None)?;
                realized.push(Sentence::new(record.tokens.clone()));
                records.push(record);
            }
        }
        ContextModel::Neural { params, config } => {
            let results = rescore_document(lattices, params, config)?;
            for (lattice, result) in lattices.iter().zip(&results) {
                stats.absorb(&result.stats);
                records.push(output_record(lattice, &result.path, Some(result.logprob))?);
            }
        }
        ContextModel::Random { seed } => {
            for lattice in lattices {
                let mut rng =
                    Rng::new(seed ^ stable_hash(&format!("{}#{}", lattice.doc_id, lattice.sent_index)));
                let mut path = lattice.default_path();
                for (pos, arcs) in lattice.arcs.iter().enumerate() {
                    if arcs.len() > 1 {
                        path.arc_indices[pos] = rng.below(arcs.len());
                    }
                }
                records.push(output_record(lattice, &path, None)?);
            }
        }
    }
    for record in &records {
        stats.sentences += 1;
        stats.slots += record.chosen.len();
    }
    Ok(records)
}

/// Rescores every document, optionally across worker threads (documents
/// are independent; output order never depends on the worker count).
pub fn rescore_all(
    documents: &[(String, Vec<TranslationLattice>)],
    model: &ContextModel,
    workers: usize,
) -> Result<(Vec<OutputRecord>, RunStats), PipelineError> {
    let workers = workers.max(1).min(documents.len().max(1));
    if workers <= 1 {
        let mut stats = RunStats::default();
        let mut all = Vec::new();
        for (_, lattices) in documents {
            all.extend(rescore_doc(lattices, model, &mut stats)?);
        }
        return Ok((all, stats));
    }

    let mut results: Vec<Option<Result<(Vec<OutputRecord>, RunStats), PipelineError>>> =
        (0..documents.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunk = documents.len().div_ceil(workers);
        for (docs, slots) in documents.chunks(chunk).zip(results.chunks_mut(chunk)) {
            scope.spawn(move || {
                for ((_, lattices), slot) in docs.iter().zip(slots.iter_mut()) {
                    let mut stats = RunStats::default();
                    *slot = Some(rescore_doc(lattices, model, &mut stats).map(|r| (r, stats)));
                }
            });
        }
    });
    let mut all = Vec::new();
    let mut total = RunStats::default();
    for slot in results {
        let (records, stats) = slot.expect("every document processed")?;
        all.extend(records);
        total.sentences += stats.sentences;
        total.slots += stats.slots;
        total.step_evals += stats.step_evals;
        total.merges += stats.merges;
        total.max_frontier = total.max_frontier.max(stats.max_frontier);
    }
    Ok((all, total))
}

/// Topline construction: substitute the aligned reference at every slot.
pub fn topline_records(
    hypotheses: &[HypothesisRecord],
    alignment: &SlotAlignment,
) -> (Vec<OutputRecord>, u64) {
    let mut unaligned_total = 0u64;
    let mut records = Vec::with_capacity(hypotheses.len());
    for hyp in hypotheses {
        let (sentence, unaligned) = topline_substitute(hyp, alignment);
        unaligned_total += unaligned as u64;
        let chosen = hyp
            .oov_slots
            .iter()
            .map(|slot| ChosenSlot {
                pos: slot.pos,
                source_word: slot.source_word.clone(),
                chosen: sentence.tokens[slot.pos].clone(),
            })
            .collect();
        records.push(OutputRecord {
            doc_id: hyp.doc_id.clone(),
            sent_index: hyp.sent_index,
            tokens: sentence.tokens,
            logprob: None,
            chosen,
        });
    }
    (records, unaligned_total)
}

/// Pairs hypothesis sentences with reference sentences by
/// (doc_id, sent_index); the reference for sentence i of document d is the
/// i-th sentence of the reference document with id d.
pub fn pair_for_eval(
    hypotheses: &[(String, usize, Vec<String>)],
    references: &[Document],
) -> Result<(Vec<Sentence>, Vec<Sentence>), PipelineError> {
    let mut by_id: BTreeMap<&str, &Document> = BTreeMap::new();
    for doc in references {
        by_id.insert(&doc.id, doc);
    }
    let mut hyp_sentences = Vec::with_capacity(hypotheses.len());
    let mut ref_sentences = Vec::with_capacity(hypotheses.len());
    for (doc_id, sent_index, tokens) in hypotheses {
        let doc = by_id.get(doc_id.as_str()).ok_or_else(|| {
            PipelineError::Data(format!("no reference document with id {doc_id:?}"))
        })?;
        let reference = doc.sentences.get(*sent_index).ok_or_else(|| {
            PipelineError::Data(format!(
                "reference document {doc_id:?} has no sentence {sent_index}"
            ))
        })?;
        hyp_sentences.push(Sentence::new(tokens.clone()));
        ref_sentences.push(reference.clone());
    }
    Ok((hyp_sentences, ref_sentences))
}

/// Data selection: keeps articles whose vocabulary Jaccard index against
/// the target vocabulary exceeds the threshold; reports the per-article
/// indices of the kept ones.
pub fn select_with_report(
    articles: &[Document],
    target_vocab: &BTreeSet<&str>,
    threshold: f64,
) -> (Vec<Document>, Vec<f64>) {
    let mut kept = Vec::new();
    let mut indices = Vec::new();
    for doc in articles {
        let index = oovctx_core::corpus::jaccard(&doc.vocab(), target_vocab);
        if index > threshold {
            kept.push(doc.clone());
            indices.push(index);
        }
    }
    (kept, indices)
}

/// One sweep point of the gamma calibration helper.
#[derive(Debug, Clone)]
pub struct GammaPoint {
    pub gamma: f64,
    pub mean_logprob: f64,
    pub step_evals: u64,
    pub merges: u64,
    pub max_frontier: usize,
}

/// Sweeps gamma over a document set and reports the score/effort trade-off
/// at each point.
pub fn calibrate_gamma(
    documents: &[(String, Vec<TranslationLattice>)],
    params: &ModelParams,
    base: &RescoreConfig,
    gammas: &[f64],
) -> Result<Vec<GammaPoint>, PipelineError> {
    let mut points = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let config = RescoreConfig { gamma, ..base.clone() };
        let mut stats = RunStats::default();
        let mut total_logprob = 0.0;
        let mut sentences = 0usize;
        for (_, lattices) in documents {
            let results = rescore_document(lattices, params, &config)?;
            for r in &results {
                stats.absorb(&r.stats);
                total_logprob += r.logprob;
                sentences += 1;
            }
        }
        points.push(GammaPoint {
            gamma,
            mean_logprob: total_logprob / sentences.max(1) as f64,
            step_evals: stats.step_evals,
            merges: stats.merges,
            max_frontier: stats.max_frontier,
        });
    }
    Ok(points)
}

/// Line-oriented key=value log record on standard error.
pub fn log_kv(fields: &[(&str, String)]) {
    let mut line = String::new();
    for (i, (k, v)) in fields.iter().enumerate() {
        if i > 0 {
            line.push(' ');
        }
        line.push_str(k);
        line.push('=');
        line.push_str(v);
    }
    eprintln!("{line}");
}
