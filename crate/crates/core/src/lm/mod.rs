//! Neural language models: a two-layer LSTM and an attentional
//! document-context LM (DCLM), trained from scratch in f64.
//!
//! The LSTM scores y = softmax(W_o h + b) over a two-layer recurrence.
//! The DCLM augments it with a context vector c attending over the
//! previous sentence's hidden states: the layer-1 input becomes
//! [embedding; c] and the output becomes
//! y = softmax(W_o tanh(W_h h + W_c c) + b).

mod backward;
mod forward;
mod params;
mod train;

pub use backward::{dclm_sentence_gradients, lstm_sentence_gradients, GradBuffer};
pub use forward::{
    attention, dclm_score_sentence, dclm_step, lstm_score_sentence, DclmStepOutput, NetState,
    SentenceContext, StepScorer,
};
pub use params::{DclmParams, LstmLayer, LstmParams, ModelParams, TensorSpec};
pub use train::{perplexity, train, TrainConfig, TrainError, TrainedModel};

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

pub const UNK_TOKEN: &str = "<unk>";
pub const BOS_TOKEN: &str = "<s>";
pub const EOS_TOKEN: &str = "</s>";

/// Which model a parameter file or training run refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Lstm,
    Dclm,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Lstm => "lstm",
            ModelKind::Dclm => "dclm",
        }
    }
}

/// Token-to-id mapping with dense ids and the three special tokens fixed
/// at the front: `<unk>` 0, `<s>` 1, `</s>` 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LmVocab {
    tokens: Vec<String>,
    index: BTreeMap<String, u32>,
}

impl LmVocab {
    pub const UNK: u32 = 0;
    pub const BOS: u32 = 1;
    pub const EOS: u32 = 2;

    /// Builds a vocabulary from tokens in first-occurrence order.
    pub fn build<'a>(tokens: impl Iterator<Item = &'a str>) -> Self {
        let mut vocab = LmVocab { tokens: Vec::new(), index: BTreeMap::new() };
        for special in [UNK_TOKEN, BOS_TOKEN, EOS_TOKEN] {
            vocab.push(special);
        }
        for t in tokens {
            vocab.push(t);
        }
        vocab
    }

    fn push(&mut self, token: &str) {
        if !self.index.contains_key(token) {
            let id = self.tokens.len() as u32;
            self.tokens.push(token.to_string());
            self.index.insert(token.to_string(), id);
        }
    }

    /// Id for a token, falling back to `<unk>`.
    pub fn id(&self, token: &str) -> u32 {
        self.index.get(token).copied().unwrap_or(Self::UNK)
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens in id order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocab_specials_and_order() {
        let v = LmVocab::build(["the", "cat", "the", "sat"].into_iter());
        assert_eq!(v.id(UNK_TOKEN), 0);
        assert_eq!(v.id(BOS_TOKEN), 1);
        assert_eq!(v.id(EOS_TOKEN), 2);
        assert_eq!(v.id("the"), 3);
        assert_eq!(v.id("cat"), 4);
        assert_eq!(v.id("sat"), 5);
        assert_eq!(v.len(), 6);
        assert_eq!(v.id("missing"), LmVocab::UNK);
        assert_eq!(v.token(4), "cat");
    }
}
