//! Training: SGD with momentum and global-norm gradient clipping, one
//! update per document chunk, backpropagation through time within each
//! sentence. Documents are split into fixed-size sentence chunks; the DCLM
//! threads the previous sentence's hidden states (detached) through each
//! chunk and starts every chunk from the zero context.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::backward::{dclm_sentence_gradients, lstm_sentence_gradients, GradBuffer};
use super::forward::{dclm_score_sentence, lstm_score_sentence, SentenceContext};
use super::params::{DclmParams, LstmParams, ModelParams};
use super::{LmVocab, ModelKind};
use crate::corpus::Document;
use crate::math;
use crate::rng::Rng;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub hidden: usize,
    pub embed: usize,
    pub layers: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub clip_norm: f64,
    pub epochs: usize,
    pub chunk_sentences: usize,
    pub init_scale: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden: 48,
            embed: 48,
            layers: 2,
            learning_rate: 0.1,
            momentum: 0.9,
            clip_norm: 5.0,
            epochs: 10,
            chunk_sentences: 4,
            init_scale: 0.08,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainError {
    EmptyCorpus,
    /// Loss became non-finite; the learning rate or clip norm is too large.
    NonFiniteLoss { epoch: usize, doc_id: String },
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::EmptyCorpus => write!(f, "training corpus is empty"),
            TrainError::NonFiniteLoss { epoch, doc_id } => write!(
                f,
                "non-finite loss at epoch {epoch} in document {doc_id:?}; \
                 lower the learning rate or tighten the gradient clip"
            ),
        }
    }
}

impl core::error::Error for TrainError {}

/// Trained parameters plus the per-epoch mean loss (nats per token event).
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub params: ModelParams,
    pub losses: Vec<f64>,
}

/// Trains a model of the requested kind from scratch.
pub fn train(
    kind: ModelKind,
    corpus: &[Document],
    vocab: LmVocab,
    config: &TrainConfig,
) -> Result<TrainedModel, TrainError> {
    if corpus.is_empty() || corpus.iter().all(|d| d.sentences.is_empty()) {
        return Err(TrainError::EmptyCorpus);
    }
    let mut rng = Rng::new(config.seed);
    let mut params = match kind {
        ModelKind::Lstm => ModelParams::Lstm(LstmParams::init(
            vocab,
            config.embed,
            config.hidden,
            config.layers,
            0,
            config.init_scale,
            &mut rng,
        )),
        ModelKind::Dclm => ModelParams::Dclm(DclmParams::init(
            vocab,
            config.embed,
            config.hidden,
            config.layers,
            config.init_scale,
            &mut rng,
        )),
    };

    let mut grads = GradBuffer::zeros_like(&params.tensors());
    let mut velocity = GradBuffer::zeros_like(&params.tensors());
    let mut losses = Vec::with_capacity(config.epochs);
    let chunk_len = config.chunk_sentences.max(1);

    for epoch in 0..config.epochs {
        let mut epoch_nll = 0.0;
        let mut epoch_events = 0usize;
        for doc in corpus {
            for chunk in doc.sentences.chunks(chunk_len) {
                grads.zero();
                let mut ctx = SentenceContext::zero(config.hidden);
                let mut chunk_nll = 0.0;
                let mut chunk_events = 0usize;
                for sentence in chunk {
                    let nll = match &params {
                        ModelParams::Lstm(p) => {
                            lstm_sentence_gradients(p, &sentence.tokens, &mut grads)
                        }
                        ModelParams::Dclm(p) => {
                            let (nll, next_ctx) =
                                dclm_sentence_gradients(p, &sentence.tokens, &ctx, &mut grads);
                            ctx = next_ctx;
                            nll
                        }
                    };
                    chunk_nll += nll;
                    chunk_events += sentence.tokens.len() + 1;
                }
                if !chunk_nll.is_finite() {
                    return Err(TrainError::NonFiniteLoss {
                        epoch,
                        doc_id: doc.id.clone(),
                    });
                }
                if chunk_events == 0 {
                    continue;
                }
                grads.scale(1.0 / chunk_events as f64);
                grads.clip_global_norm(config.clip_norm);
                for ((p, g), v) in params
                    .tensors_mut()
                    .into_iter()
                    .zip(&grads.tensors)
                    .zip(&mut velocity.tensors)
                {
                    for k in 0..p.len() {
                        v[k] = config.momentum * v[k] - config.learning_rate * g[k];
                        p[k] += v[k];
                    }
                }
                epoch_nll += chunk_nll;
                epoch_events += chunk_events;
            }
        }
        losses.push(epoch_nll / epoch_events.max(1) as f64);
    }
    Ok(TrainedModel { params, losses })
}

/// exp(mean negative log-likelihood per token event), `</s>` included.
/// The DCLM threads sentence contexts document by document, starting each
/// document from the zero context.
pub fn perplexity(model: &ModelParams, corpus: &[Document]) -> f64 {
    let mut nll = 0.0;
    let mut events = 0usize;
    for doc in corpus {
        match model {
            ModelParams::Lstm(p) => {
                for sentence in &doc.sentences {
                    let (lp, _) = lstm_score_sentence(p, &sentence.tokens);
                    nll -= lp;
                    events += sentence.tokens.len() + 1;
                }
            }
            ModelParams::Dclm(p) => {
                let mut ctx = SentenceContext::zero(p.hidden());
                for sentence in &doc.sentences {
                    let (lp, states) = dclm_score_sentence(p, &sentence.tokens, &ctx);
                    nll -= lp;
                    events += sentence.tokens.len() + 1;
                    ctx = SentenceContext { states };
                }
            }
        }
    }
    math::exp(nll / events.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentence;
    use alloc::string::ToString;
    use alloc::vec;

    fn doc_corpus(docs: &[&[&str]]) -> Vec<Document> {
        docs.iter()
            .enumerate()
            .map(|(i, sents)| {
                Document::new(
                    alloc::format!("doc{i}"),
                    sents
                        .iter()
                        .map(|s| Sentence::new(s.split(' ').map(str::to_string).collect()))
                        .collect(),
                )
            })
            .collect()
    }

    fn vocab_of(corpus: &[Document]) -> LmVocab {
        LmVocab::build(
            corpus
                .iter()
                .flat_map(|d| d.sentences.iter())
                .flat_map(|s| s.tokens.iter().map(String::as_str)),
        )
    }

    #[test]
    fn memorizes_single_sentence() {
        let corpus = doc_corpus(&[&["the cat sat on the mat"]]);
        let vocab = vocab_of(&corpus);
        let config = TrainConfig {
            hidden: 16,
            embed: 16,
            epochs: 200,
            learning_rate: 0.5,
            ..TrainConfig::default()
        };
        for kind in [ModelKind::Lstm, ModelKind::Dclm] {
            let trained = train(kind, &corpus, vocab.clone(), &config).unwrap();
            let ppl = perplexity(&trained.params, &corpus);
            assert!(ppl < 1.1, "{kind:?} perplexity {ppl}");
        }
    }

    #[test]
    fn initial_loss_near_uniform() {
        let corpus = doc_corpus(&[&["a b c d e f g h", "b c d a e h g f"]]);
        let vocab = vocab_of(&corpus);
        let v = vocab.len() as f64;
        let config = TrainConfig {
            hidden: 8,
            embed: 8,
            epochs: 1,
            learning_rate: 0.0,
            ..TrainConfig::default()
        };
        for kind in [ModelKind::Lstm, ModelKind::Dclm] {
            let trained = train(kind, &corpus, vocab.clone(), &config).unwrap();
            let expected = math::ln(v);
            let got = trained.losses[0];
            assert!(
                (got - expected).abs() / expected < 0.2,
                "{kind:?}: {got} vs ln V = {expected}"
            );
        }
    }

    #[test]
    fn training_is_deterministic() {
        let corpus = doc_corpus(&[&["a b c", "c b a"], &["b b a", "a c c"]]);
        let vocab = vocab_of(&corpus);
        let config = TrainConfig { hidden: 6, embed: 5, epochs: 3, ..TrainConfig::default() };
        for kind in [ModelKind::Lstm, ModelKind::Dclm] {
            let a = train(kind, &corpus, vocab.clone(), &config).unwrap();
            let b = train(kind, &corpus, vocab.clone(), &config).unwrap();
            assert_eq!(a.params, b.params, "{kind:?}");
            assert_eq!(a.losses, b.losses);
        }
    }

    #[test]
    fn loss_decreases_on_memorizable_corpus() {
        let corpus = doc_corpus(&[&["x y z w", "x y z w", "x y z w", "x y z w"]]);
        let vocab = vocab_of(&corpus);
        let config = TrainConfig {
            hidden: 8,
            embed: 8,
            epochs: 6,
            learning_rate: 0.3,
            ..TrainConfig::default()
        };
        let trained = train(ModelKind::Dclm, &corpus, vocab, &config).unwrap();
        for w in trained.losses.windows(2) {
            assert!(w[1] < w[0], "losses not strictly improving: {:?}", trained.losses);
        }
    }

    #[test]
    fn empty_corpus_rejected() {
        let vocab = LmVocab::build(core::iter::empty());
        let err = train(ModelKind::Lstm, &[], vocab, &TrainConfig::default()).unwrap_err();
        assert_eq!(err, TrainError::EmptyCorpus);
    }

    #[test]
    fn untrained_uniform_model_perplexity_near_vocab_size() {
        // With zero init scale all logits are equal: the distribution is
        // uniform and perplexity is exactly V.
        let corpus = doc_corpus(&[&["a b c d", "d c b a"]]);
        let vocab = vocab_of(&corpus);
        let v = vocab.len() as f64;
        let config = TrainConfig {
            hidden: 4,
            embed: 4,
            epochs: 1,
            learning_rate: 0.0,
            init_scale: 0.0,
            ..TrainConfig::default()
        };
        for kind in [ModelKind::Lstm, ModelKind::Dclm] {
            let trained = train(kind, &corpus, vocab.clone(), &config).unwrap();
            let ppl = perplexity(&trained.params, &corpus);
            assert!((ppl - v).abs() < 1e-9, "{kind:?}: {ppl} vs {v}");
        }
    }
}
