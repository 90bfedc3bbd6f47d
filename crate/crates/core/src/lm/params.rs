//! Parameter containers and initialization.
//!
//! Tensors are flat row-major `Vec<f64>`s. `tensor_specs` / `tensors` /
//! `tensors_mut` expose every tensor in one canonical order so the
//! optimizer, serializer, and finite-difference checks can walk the whole
//! parameter set generically.

use alloc::string::String;
use alloc::vec::Vec;

use super::LmVocab;
use crate::rng::Rng;

/// Gate order inside fused LSTM tensors: input, forget, cell, output.
pub(crate) const GATES: usize = 4;

/// One LSTM layer: fused gate weights over the input (`w_x`: 4H x D),
/// the previous hidden state (`w_h`: 4H x H), and bias (4H).
#[derive(Debug, Clone, PartialEq)]
pub struct LstmLayer {
    pub input_dim: usize,
    pub hidden: usize,
    pub w_x: Vec<f64>,
    pub w_h: Vec<f64>,
    pub bias: Vec<f64>,
}

impl LstmLayer {
    fn zeros(input_dim: usize, hidden: usize) -> Self {
        LstmLayer {
            input_dim,
            hidden,
            w_x: alloc::vec![0.0; GATES * hidden * input_dim],
            w_h: alloc::vec![0.0; GATES * hidden * hidden],
            bias: alloc::vec![0.0; GATES * hidden],
        }
    }
}

/// Sentence-level LSTM language model parameters, including learned
/// initial hidden/cell states.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub vocab: LmVocab,
    pub embed_dim: usize,
    pub hidden: usize,
    /// V x E token embeddings.
    pub embedding: Vec<f64>,
    pub layers: Vec<LstmLayer>,
    /// V x H output projection.
    pub w_out: Vec<f64>,
    /// V output bias.
    pub b_out: Vec<f64>,
    /// layers x H learned initial hidden states.
    pub h0: Vec<f64>,
    /// layers x H learned initial cell states.
    pub c0: Vec<f64>,
}

/// DCLM parameters: the LSTM stack (whose layer-1 input is widened to
/// E + H for the context concatenation) plus the context output projection
/// and the attention parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DclmParams {
    pub lstm: LstmParams,
    /// H x H hidden projection in the output pre-activation.
    pub w_h: Vec<f64>,
    /// H x H context projection in the output pre-activation.
    pub w_c: Vec<f64>,
    /// H x H attention projection of the query state.
    pub w_a1: Vec<f64>,
    /// H x H attention projection of previous-sentence states.
    pub w_a2: Vec<f64>,
    /// H attention scoring vector.
    pub w_a: Vec<f64>,
}

/// Shape metadata for serialization and diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpec {
    pub name: String,
    pub shape: Vec<usize>,
}

impl LstmParams {
    /// Fresh parameters with entries uniform in [-scale, scale].
    pub fn init(
        vocab: LmVocab,
        embed_dim: usize,
        hidden: usize,
        n_layers: usize,
        extra_input: usize,
        scale: f64,
        rng: &mut Rng,
    ) -> Self {
        let v = vocab.len();
        let mut params = LstmParams {
            vocab,
            embed_dim,
            hidden,
            embedding: alloc::vec![0.0; v * embed_dim],
            layers: (0..n_layers)
                .map(|l| {
                    let input = if l == 0 { embed_dim + extra_input } else { hidden };
                    LstmLayer::zeros(input, hidden)
                })
                .collect(),
            w_out: alloc::vec![0.0; v * hidden],
            b_out: alloc::vec![0.0; v],
            h0: alloc::vec![0.0; n_layers * hidden],
            c0: alloc::vec![0.0; n_layers * hidden],
        };
        for t in params.tensors_mut() {
            for x in t.iter_mut() {
                *x = rng.uniform(-scale, scale);
            }
        }
        params
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn tensor_specs(&self) -> Vec<TensorSpec> {
        let v = self.vocab_size();
        let h = self.hidden;
        let mut specs = alloc::vec![TensorSpec {
            name: "embedding".into(),
            shape: alloc::vec![v, self.embed_dim],
        }];
        for (l, layer) in self.layers.iter().enumerate() {
            specs.push(TensorSpec {
                name: alloc::format!("lstm{l}.w_x"),
                shape: alloc::vec![GATES * h, layer.input_dim],
            });
            specs.push(TensorSpec {
                name: alloc::format!("lstm{l}.w_h"),
                shape: alloc::vec![GATES * h, h],
            });
            specs.push(TensorSpec {
                name: alloc::format!("lstm{l}.bias"),
                shape: alloc::vec![GATES * h],
            });
        }
        specs.push(TensorSpec { name: "w_out".into(), shape: alloc::vec![v, h] });
        specs.push(TensorSpec { name: "b_out".into(), shape: alloc::vec![v] });
        specs.push(TensorSpec { name: "h0".into(), shape: alloc::vec![self.n_layers(), h] });
        specs.push(TensorSpec { name: "c0".into(), shape: alloc::vec![self.n_layers(), h] });
        specs
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = alloc::vec![&self.embedding];
        for layer in &self.layers {
            out.push(&layer.w_x);
            out.push(&layer.w_h);
            out.push(&layer.bias);
        }
        out.push(&self.w_out);
        out.push(&self.b_out);
        out.push(&self.h0);
        out.push(&self.c0);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        let mut out: Vec<&mut Vec<f64>> = alloc::vec![&mut self.embedding];
        for layer in &mut self.layers {
            out.push(&mut layer.w_x);
            out.push(&mut layer.w_h);
            out.push(&mut layer.bias);
        }
        out.push(&mut self.w_out);
        out.push(&mut self.b_out);
        out.push(&mut self.h0);
        out.push(&mut self.c0);
        out
    }
}

impl DclmParams {
    pub fn init(
        vocab: LmVocab,
        embed_dim: usize,
        hidden: usize,
        n_layers: usize,
        scale: f64,
        rng: &mut Rng,
    ) -> Self {
        // Layer 1 consumes [embedding; context], hence the extra H inputs.
        let lstm = LstmParams::init(vocab, embed_dim, hidden, n_layers, hidden, scale, rng);
        let mut params = DclmParams {
            lstm,
            w_h: alloc::vec![0.0; hidden * hidden],
            w_c: alloc::vec![0.0; hidden * hidden],
            w_a1: alloc::vec![0.0; hidden * hidden],
            w_a2: alloc::vec![0.0; hidden * hidden],
            w_a: alloc::vec![0.0; hidden],
        };
        for t in [
            &mut params.w_h,
            &mut params.w_c,
            &mut params.w_a1,
            &mut params.w_a2,
            &mut params.w_a,
        ] {
            for x in t.iter_mut() {
                *x = rng.uniform(-scale, scale);
            }
        }
        params
    }

    pub fn hidden(&self) -> usize {
        self.lstm.hidden
    }

    pub fn vocab(&self) -> &LmVocab {
        &self.lstm.vocab
    }

    pub fn tensor_specs(&self) -> Vec<TensorSpec> {
        let h = self.hidden();
        let mut specs = self.lstm.tensor_specs();
        specs.push(TensorSpec { name: "w_h".into(), shape: alloc::vec![h, h] });
        specs.push(TensorSpec { name: "w_c".into(), shape: alloc::vec![h, h] });
        specs.push(TensorSpec { name: "w_a1".into(), shape: alloc::vec![h, h] });
        specs.push(TensorSpec { name: "w_a2".into(), shape: alloc::vec![h, h] });
        specs.push(TensorSpec { name: "w_a".into(), shape: alloc::vec![h] });
        specs
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out = self.lstm.tensors();
        out.push(&self.w_h);
        out.push(&self.w_c);
        out.push(&self.w_a1);
        out.push(&self.w_a2);
        out.push(&self.w_a);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        let mut out = self.lstm.tensors_mut();
        out.push(&mut self.w_h);
        out.push(&mut self.w_c);
        out.push(&mut self.w_a1);
        out.push(&mut self.w_a2);
        out.push(&mut self.w_a);
        out
    }
}

/// A trained model of either kind, as stored in model files.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Lstm(LstmParams),
    Dclm(DclmParams),
}

impl ModelParams {
    pub fn kind(&self) -> super::ModelKind {
        match self {
            ModelParams::Lstm(_) => super::ModelKind::Lstm,
            ModelParams::Dclm(_) => super::ModelKind::Dclm,
        }
    }

    pub fn vocab(&self) -> &LmVocab {
        match self {
            ModelParams::Lstm(p) => &p.vocab,
            ModelParams::Dclm(p) => p.vocab(),
        }
    }

    pub fn hidden(&self) -> usize {
        match self {
            ModelParams::Lstm(p) => p.hidden,
            ModelParams::Dclm(p) => p.hidden(),
        }
    }

    pub fn embed_dim(&self) -> usize {
        match self {
            ModelParams::Lstm(p) => p.embed_dim,
            ModelParams::Dclm(p) => p.lstm.embed_dim,
        }
    }

    pub fn n_layers(&self) -> usize {
        match self {
            ModelParams::Lstm(p) => p.n_layers(),
            ModelParams::Dclm(p) => p.lstm.n_layers(),
        }
    }

    pub fn tensor_specs(&self) -> Vec<TensorSpec> {
        match self {
            ModelParams::Lstm(p) => p.tensor_specs(),
            ModelParams::Dclm(p) => p.tensor_specs(),
        }
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        match self {
            ModelParams::Lstm(p) => p.tensors(),
            ModelParams::Dclm(p) => p.tensors(),
        }
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        match self {
            ModelParams::Lstm(p) => p.tensors_mut(),
            ModelParams::Dclm(p) => p.tensors_mut(),
        }
    }
}
