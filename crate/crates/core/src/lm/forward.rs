//! Forward passes: LSTM stack steps, attention over the previous sentence,
//! output heads, and sentence scoring.

use alloc::vec::Vec;

use super::params::{DclmParams, LstmLayer, LstmParams};
use super::LmVocab;
use crate::math;

/// Hidden states of the previous sentence (M rows of H), the attention
/// memory for the DCLM. A document's first sentence sees a single zero row.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceContext {
    pub states: Vec<Vec<f64>>,
}

impl SentenceContext {
    pub fn zero(hidden: usize) -> Self {
        SentenceContext { states: alloc::vec![alloc::vec![0.0; hidden]] }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Recurrent state after consuming some prefix: per-layer hidden and cell
/// vectors, plus the context vector used at the last step (zeros for the
/// plain LSTM, and before the first step).
#[derive(Debug, Clone, PartialEq)]
pub struct NetState {
    pub h: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub ctx: Vec<f64>,
}

impl NetState {
    fn from_initial(params: &LstmParams, ctx_dim: usize) -> Self {
        let h = params
            .layers
            .iter()
            .enumerate()
            .map(|(l, _)| params.h0[l * params.hidden..(l + 1) * params.hidden].to_vec())
            .collect();
        let c = params
            .layers
            .iter()
            .enumerate()
            .map(|(l, _)| params.c0[l * params.hidden..(l + 1) * params.hidden].to_vec())
            .collect();
        NetState { h, c, ctx: alloc::vec![0.0; ctx_dim] }
    }

    pub fn top_hidden(&self) -> &[f64] {
        self.h.last().expect("at least one layer")
    }
}

/// Cached gate activations of one layer step, for backpropagation.
#[derive(Debug, Clone)]
pub(crate) struct GateCache {
    pub i: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub o: Vec<f64>,
}

/// One fused LSTM layer step; returns (h, c) and optionally the gates.
pub(crate) fn layer_step(
    layer: &LstmLayer,
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    want_gates: bool,
) -> (Vec<f64>, Vec<f64>, Option<GateCache>) {
    let h = layer.hidden;
    let mut z = alloc::vec![0.0; 4 * h];
    math::matvec(&layer.w_x, 4 * h, layer.input_dim, x, &mut z);
    let mut zh = alloc::vec![0.0; 4 * h];
    math::matvec(&layer.w_h, 4 * h, h, h_prev, &mut zh);
    for (zi, (zhi, bi)) in z.iter_mut().zip(zh.iter().zip(&layer.bias)) {
        *zi += zhi + bi;
    }
    let mut i = alloc::vec![0.0; h];
    let mut f = alloc::vec![0.0; h];
    let mut g = alloc::vec![0.0; h];
    let mut o = alloc::vec![0.0; h];
    for k in 0..h {
        i[k] = math::sigmoid(z[k]);
        f[k] = math::sigmoid(z[h + k]);
        g[k] = math::tanh(z[2 * h + k]);
        o[k] = math::sigmoid(z[3 * h + k]);
    }
    let mut c = alloc::vec![0.0; h];
    let mut h_out = alloc::vec![0.0; h];
    for k in 0..h {
        c[k] = f[k] * c_prev[k] + i[k] * g[k];
        h_out[k] = o[k] * math::tanh(c[k]);
    }
    let gates = want_gates.then_some(GateCache { i, f, g, o });
    (h_out, c, gates)
}

/// Attention over the previous sentence's hidden states (Eqs. 7-9):
/// a_m = w_a . tanh(W_a1 q + W_a2 s_m), alpha = softmax(a),
/// context = sum alpha_m s_m. Returns (context vector, weights).
pub fn attention(
    query: &[f64],
    prev_states: &SentenceContext,
    params: &DclmParams,
) -> (Vec<f64>, Vec<f64>) {
    let (ctx, alpha, _) = attention_traced(query, prev_states, params);
    (ctx, alpha)
}

/// Attention that also returns the per-position tanh activations needed by
/// the backward pass.
pub(crate) fn attention_traced(
    query: &[f64],
    prev_states: &SentenceContext,
    params: &DclmParams,
) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let h = params.hidden();
    let m_count = prev_states.len();
    let mut projected_query = alloc::vec![0.0; h];
    math::matvec(&params.w_a1, h, h, query, &mut projected_query);

    let mut scores = alloc::vec![0.0; m_count];
    let mut tanhs: Vec<Vec<f64>> = Vec::with_capacity(m_count);
    for (m, state) in prev_states.states.iter().enumerate() {
        let mut pre = alloc::vec![0.0; h];
        math::matvec(&params.w_a2, h, h, state, &mut pre);
        for k in 0..h {
            pre[k] = math::tanh(pre[k] + projected_query[k]);
        }
        scores[m] = pre.iter().zip(&params.w_a).map(|(t, w)| t * w).sum();
        tanhs.push(pre);
    }
    math::softmax_inplace(&mut scores);
    let mut ctx = alloc::vec![0.0; h];
    for (m, state) in prev_states.states.iter().enumerate() {
        for k in 0..h {
            ctx[k] += scores[m] * state[k];
        }
    }
    (ctx, scores, tanhs)
}

/// Output logits of the plain LSTM head: W_o h + b.
pub(crate) fn lstm_logits(params: &LstmParams, h_top: &[f64]) -> Vec<f64> {
    let v = params.vocab_size();
    let mut logits = alloc::vec![0.0; v];
    math::matvec(&params.w_out, v, params.hidden, h_top, &mut logits);
    for (l, b) in logits.iter_mut().zip(&params.b_out) {
        *l += b;
    }
    logits
}

/// Output logits of the DCLM head: W_o tanh(W_h h + W_c c) + b.
/// Also returns the tanh activation for backpropagation.
pub(crate) fn dclm_logits(params: &DclmParams, h_top: &[f64], ctx: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let h = params.hidden();
    let mut pre = alloc::vec![0.0; h];
    math::matvec(&params.w_h, h, h, h_top, &mut pre);
    let mut from_ctx = alloc::vec![0.0; h];
    math::matvec(&params.w_c, h, h, ctx, &mut from_ctx);
    for k in 0..h {
        pre[k] = math::tanh(pre[k] + from_ctx[k]);
    }
    let lstm = &params.lstm;
    let v = lstm.vocab_size();
    let mut logits = alloc::vec![0.0; v];
    math::matvec(&lstm.w_out, v, lstm.hidden, &pre, &mut logits);
    for (l, b) in logits.iter_mut().zip(&lstm.b_out) {
        *l += b;
    }
    (logits, pre)
}

fn log_softmax(mut logits: Vec<f64>) -> Vec<f64> {
    let max = logits.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let lse = max + math::ln(logits.iter().map(|&l| math::exp(l - max)).sum::<f64>());
    for l in logits.iter_mut() {
        *l -= lse;
    }
    logits
}

/// Advances the plain LSTM stack by one token.
pub(crate) fn lstm_advance(params: &LstmParams, state: &NetState, token: u32) -> NetState {
    let e = params.embed_dim;
    let x = &params.embedding[token as usize * e..(token as usize + 1) * e];
    advance_stack(params, state, x)
}

/// Advances the DCLM stack by one token: attention is queried with the
/// pre-step top hidden state, and [embedding; context] feeds layer 1.
pub(crate) fn dclm_advance(
    params: &DclmParams,
    state: &NetState,
    token: u32,
    prev_ctx: &SentenceContext,
) -> (NetState, Vec<f64>) {
    let (ctx, alpha) = attention(state.top_hidden(), prev_ctx, params);
    let lstm = &params.lstm;
    let e = lstm.embed_dim;
    let mut x = Vec::with_capacity(e + params.hidden());
    x.extend_from_slice(&lstm.embedding[token as usize * e..(token as usize + 1) * e]);
    x.extend_from_slice(&ctx);
    let mut next = advance_stack(lstm, state, &x);
    next.ctx = ctx;
    (next, alpha)
}

fn advance_stack(params: &LstmParams, state: &NetState, input: &[f64]) -> NetState {
    let mut h = Vec::with_capacity(params.n_layers());
    let mut c = Vec::with_capacity(params.n_layers());
    let mut x: Vec<f64> = input.to_vec();
    for (l, layer) in params.layers.iter().enumerate() {
        let (hl, cl, _) = layer_step(layer, &x, &state.h[l], &state.c[l], false);
        x = hl.clone();
        h.push(hl);
        c.push(cl);
    }
    NetState { h, c, ctx: Vec::new() }
}

/// Result of one DCLM step.
#[derive(Debug, Clone)]
pub struct DclmStepOutput {
    pub state: NetState,
    /// Probability distribution over the next token.
    pub distribution: Vec<f64>,
    /// The context vector used by this step.
    pub context_vector: Vec<f64>,
    /// Attention weights over the previous sentence's states.
    pub attention_weights: Vec<f64>,
}

/// One DCLM step: consumes `token`, attends over `prev_ctx`, and returns
/// the new state plus the next-token distribution (Eqs. 5-9).
pub fn dclm_step(
    params: &DclmParams,
    state: &NetState,
    token: u32,
    prev_ctx: &SentenceContext,
) -> DclmStepOutput {
    let (next, alpha) = dclm_advance(params, state, token, prev_ctx);
    let (logits, _) = dclm_logits(params, next.top_hidden(), &next.ctx);
    let mut distribution = logits;
    math::softmax_inplace(&mut distribution);
    DclmStepOutput {
        context_vector: next.ctx.clone(),
        state: next,
        distribution,
        attention_weights: alpha,
    }
}

/// Maps tokens to ids with `<unk>` fallback.
pub(crate) fn token_ids(vocab: &LmVocab, tokens: &[impl AsRef<str>]) -> Vec<u32> {
    tokens.iter().map(|t| vocab.id(t.as_ref())).collect()
}

/// Scores a sentence under the LSTM: sum of log P(token | prefix) with the
/// sentence framed as `<s> ... </s>`. Also returns the top-layer hidden
/// state after each consumed input (N+1 states), which form the
/// [`SentenceContext`] for a following sentence.
pub fn lstm_score_sentence(
    params: &LstmParams,
    tokens: &[impl AsRef<str>],
) -> (f64, Vec<Vec<f64>>) {
    let ids = token_ids(&params.vocab, tokens);
    let mut state = NetState::from_initial(params, 0);
    let mut states = Vec::with_capacity(ids.len() + 1);
    let mut logprob = 0.0;
    let mut consumed = LmVocab::BOS;
    for target in ids.iter().copied().chain([LmVocab::EOS]) {
        state = lstm_advance(params, &state, consumed);
        let logdist = log_softmax(lstm_logits(params, state.top_hidden()));
        logprob += logdist[target as usize];
        states.push(state.top_hidden().to_vec());
        consumed = target;
    }
    (logprob, states)
}

/// DCLM counterpart of [`lstm_score_sentence`], threading the previous
/// sentence's hidden states through attention.
pub fn dclm_score_sentence(
    params: &DclmParams,
    tokens: &[impl AsRef<str>],
    prev_ctx: &SentenceContext,
) -> (f64, Vec<Vec<f64>>) {
    let ids = token_ids(params.vocab(), tokens);
    let mut state = NetState::from_initial(&params.lstm, params.hidden());
    let mut states = Vec::with_capacity(ids.len() + 1);
    let mut logprob = 0.0;
    let mut consumed = LmVocab::BOS;
    for target in ids.iter().copied().chain([LmVocab::EOS]) {
        let (next, _) = dclm_advance(params, &state, consumed, prev_ctx);
        state = next;
        let (logits, _) = dclm_logits(params, state.top_hidden(), &state.ctx);
        let logdist = log_softmax(logits);
        logprob += logdist[target as usize];
        states.push(state.top_hidden().to_vec());
        consumed = target;
    }
    (logprob, states)
}

/// Uniform stepping interface for lattice rescoring: both model kinds
/// expose a start state, a token-consuming step, and the log distribution
/// over the next token.
pub trait StepScorer {
    fn vocab(&self) -> &LmVocab;
    fn hidden(&self) -> usize;
    /// State before consuming anything (use [`LmVocab::BOS`] first).
    fn start(&self, prev_ctx: &SentenceContext) -> NetState;
    fn step(&self, state: &NetState, token: u32, prev_ctx: &SentenceContext) -> NetState;
    /// Log probabilities over the next token given the current state.
    fn log_dist(&self, state: &NetState) -> Vec<f64>;
}

impl StepScorer for LstmParams {
    fn vocab(&self) -> &LmVocab {
        &self.vocab
    }

    fn hidden(&self) -> usize {
        self.hidden
    }

    fn start(&self, _prev_ctx: &SentenceContext) -> NetState {
        NetState::from_initial(self, 0)
    }

    fn step(&self, state: &NetState, token: u32, _prev_ctx: &SentenceContext) -> NetState {
        lstm_advance(self, state, token)
    }

    fn log_dist(&self, state: &NetState) -> Vec<f64> {
        log_softmax(lstm_logits(self, state.top_hidden()))
    }
}

impl StepScorer for DclmParams {
    fn vocab(&self) -> &LmVocab {
        self.vocab()
    }

    fn hidden(&self) -> usize {
        self.hidden()
    }

    fn start(&self, _prev_ctx: &SentenceContext) -> NetState {
        NetState::from_initial(&self.lstm, self.hidden())
    }

    fn step(&self, state: &NetState, token: u32, prev_ctx: &SentenceContext) -> NetState {
        dclm_advance(self, state, token, prev_ctx).0
    }

    fn log_dist(&self, state: &NetState) -> Vec<f64> {
        log_softmax(dclm_logits(self, state.top_hidden(), &state.ctx).0)
    }
}

impl StepScorer for super::ModelParams {
    fn vocab(&self) -> &LmVocab {
        match self {
            super::ModelParams::Lstm(p) => &p.vocab,
            super::ModelParams::Dclm(p) => p.vocab(),
        }
    }

    fn hidden(&self) -> usize {
        match self {
            super::ModelParams::Lstm(p) => p.hidden,
            super::ModelParams::Dclm(p) => p.hidden(),
        }
    }

    fn start(&self, prev_ctx: &SentenceContext) -> NetState {
        match self {
            super::ModelParams::Lstm(p) => p.start(prev_ctx),
            super::ModelParams::Dclm(p) => p.start(prev_ctx),
        }
    }

    fn step(&self, state: &NetState, token: u32, prev_ctx: &SentenceContext) -> NetState {
        match self {
            super::ModelParams::Lstm(p) => p.step(state, token, prev_ctx),
            super::ModelParams::Dclm(p) => p.step(state, token, prev_ctx),
        }
    }

    fn log_dist(&self, state: &NetState) -> Vec<f64> {
        match self {
            super::ModelParams::Lstm(p) => p.log_dist(state),
            super::ModelParams::Dclm(p) => p.log_dist(state),
        }
    }
}
