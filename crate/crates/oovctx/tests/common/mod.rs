//! Synthetic corpus generators shared by the integration and acceptance
//! tests: a topic-threaded document corpus where the topic word is only
//! predictable from the previous sentence, and a planted MT corpus whose
//! OOV slots are cued by an in-sentence context word.

use std::collections::BTreeMap;

use oovctx_core::corpus::{CandidateSet, Document, HypothesisRecord, OovSlot, Sentence};
use oovctx_core::eval::{SlotAlignment, SlotKey};
use oovctx_core::rng::Rng;

pub fn sentence(tokens: &[String]) -> Sentence {
    Sentence::new(tokens.to_vec())
}

/// Documents in which every sentence ends with the document's topic word.
/// Within a sentence the prefix carries no information about the topic, so
/// a sentence-level model faces a uniform choice while a document-context
/// model can read the topic off the previous sentence.
pub fn topic_corpus(
    n_docs: usize,
    topics: usize,
    fillers: usize,
    sentences_per_doc: usize,
    seed: u64,
) -> Vec<Document> {
    let mut rng = Rng::new(seed);
    let topic_words: Vec<String> = (0..topics).map(|i| format!("topic{i}")).collect();
    let filler_words: Vec<String> = (0..fillers).map(|i| format!("story{i}")).collect();
    (0..n_docs)
        .map(|d| {
            let topic = &topic_words[rng.below(topics)];
            let sentences = (0..sentences_per_doc)
                .map(|s| {
                    let marker = if s == 0 { "report" } else { "again" };
                    let filler = &filler_words[rng.below(fillers)];
                    sentence(&[
                        marker.to_string(),
                        filler.clone(),
                        "about".to_string(),
                        topic.clone(),
                    ])
                })
                .collect();
            Document::new(format!("doc{d}"), sentences)
        })
        .collect()
}

/// Everything the diagnostic experiment needs: an LM training corpus whose
/// cue words determine a target word, reference documents, one-best
/// hypotheses whose slots hide those target words behind OOV source
/// tokens, distractor-only candidate sets, and the slot alignment mapping
/// each slot to its reference token.
pub struct PlantedMt {
    pub lm_corpus: Vec<Document>,
    pub references: Vec<Document>,
    pub hypotheses: Vec<HypothesisRecord>,
    pub candidates: BTreeMap<String, CandidateSet>,
    pub alignment: SlotAlignment,
}

/// Cue pair i is the pattern "the cue<i> brings word<i>". Each hypothesis
/// replaces `word<i>` by an opaque source token whose candidate set holds
/// three distractor words (the reference arrives only through diagnostic
/// enrichment).
pub fn planted_mt(
    pairs: usize,
    lm_docs: usize,
    test_docs: usize,
    sentences_per_doc: usize,
    seed: u64,
) -> PlantedMt {
    let mut rng = Rng::new(seed);
    let cue = |i: usize| format!("cue{i}");
    let word = |i: usize| format!("word{i}");

    let make_doc = |id: String, rng: &mut Rng| {
        let mut pair_ids = Vec::new();
        let sentences = (0..sentences_per_doc)
            .map(|_| {
                let i = rng.below(pairs);
                pair_ids.push(i);
                sentence(&[
                    "the".to_string(),
                    cue(i),
                    "brings".to_string(),
                    word(i),
                ])
            })
            .collect();
        (Document::new(id, sentences), pair_ids)
    };

    let lm_corpus: Vec<Document> = (0..lm_docs)
        .map(|d| make_doc(format!("lm{d}"), &mut rng).0)
        .collect();

    let mut references = Vec::new();
    let mut hypotheses = Vec::new();
    let mut candidates = BTreeMap::new();
    let mut alignment = SlotAlignment::new();
    for d in 0..test_docs {
        let (doc, pair_ids) = make_doc(format!("test{d}"), &mut rng);
        for (s, (reference, &pair)) in doc.sentences.iter().zip(&pair_ids).enumerate() {
            let source = format!("src{d}x{s}");
            let mut tokens = reference.tokens.clone();
            tokens[3] = source.clone();
            // Three distractor words, never the correct one.
            let mut distractors = Vec::new();
            while distractors.len() < 3 {
                let j = rng.below(pairs);
                let w = word(j);
                if j != pair && !distractors.contains(&w) {
                    distractors.push(w);
                }
            }
            candidates.insert(
                source.clone(),
                CandidateSet { source_word: source.clone(), candidates: distractors },
            );
            alignment.insert(
                SlotKey { doc_id: doc.id.clone(), sent_index: s, pos: 3 },
                word(pair),
            );
            hypotheses.push(HypothesisRecord {
                doc_id: doc.id.clone(),
                sent_index: s,
                tokens,
                oov_slots: vec![OovSlot { pos: 3, source_word: source }],
            });
        }
        references.push(doc);
    }
    PlantedMt { lm_corpus, references, hypotheses, candidates, alignment }
}

/// Vocabulary built the way the pipeline builds it: corpus tokens, then
/// hypothesis tokens, then candidate tokens.
pub fn vocab_for(
    corpus: &[Document],
    hypotheses: &[HypothesisRecord],
    candidates: &BTreeMap<String, CandidateSet>,
) -> oovctx_core::lm::LmVocab {
    let corpus_tokens = corpus
        .iter()
        .flat_map(|d| d.sentences.iter())
        .flat_map(|s| s.tokens.iter().map(String::as_str));
    let hyp_tokens = hypotheses
        .iter()
        .flat_map(|h| h.tokens.iter().map(String::as_str));
    let cand_tokens = hypotheses
        .iter()
        .flat_map(|h| h.oov_slots.iter())
        .filter_map(|s| candidates.get(&s.source_word))
        .flat_map(|set| set.candidates.iter().map(String::as_str));
    oovctx_core::lm::LmVocab::build(corpus_tokens.chain(hyp_tokens).chain(cand_tokens))
}
