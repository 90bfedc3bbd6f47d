//! Backpropagation through time for both model kinds.
//!
//! Gradients are of the summed negative log-likelihood of a sentence
//! framed as `<s> ... </s>`. For the DCLM, the previous sentence's hidden
//! states are constants: gradients flow through the attention parameters
//! and the query state, never across the sentence boundary.

use alloc::vec::Vec;

use super::forward::{
    attention_traced, dclm_logits, layer_step, lstm_logits, GateCache, SentenceContext,
};
use super::params::{DclmParams, LstmLayer, LstmParams};
use super::LmVocab;
use crate::math;

/// Gradient tensors aligned one-to-one with `tensors()` of the owning
/// parameter struct.
#[derive(Debug, Clone, PartialEq)]
pub struct GradBuffer {
    pub tensors: Vec<Vec<f64>>,
}

impl GradBuffer {
    pub fn zeros_like(tensors: &[&[f64]]) -> Self {
        GradBuffer {
            tensors: tensors.iter().map(|t| alloc::vec![0.0; t.len()]).collect(),
        }
    }

    pub fn zero(&mut self) {
        for t in &mut self.tensors {
            t.iter_mut().for_each(|x| *x = 0.0);
        }
    }

    pub fn scale(&mut self, k: f64) {
        for t in &mut self.tensors {
            t.iter_mut().for_each(|x| *x *= k);
        }
    }

    pub fn global_norm(&self) -> f64 {
        let sq: f64 = self
            .tensors
            .iter()
            .flat_map(|t| t.iter())
            .map(|&x| x * x)
            .sum();
        math::sqrt(sq)
    }

    /// Rescales so the global norm does not exceed `max_norm`.
    pub fn clip_global_norm(&mut self, max_norm: f64) {
        let norm = self.global_norm();
        if norm > max_norm && norm > 0.0 {
            self.scale(max_norm / norm);
        }
    }
}

// Tensor indices within the canonical ordering: embedding first, then
// (w_x, w_h, bias) per layer, then w_out, b_out, h0, c0, then the DCLM
// extras (w_h, w_c, w_a1, w_a2, w_a).
fn ix_w_x(layer: usize) -> usize {
    1 + 3 * layer
}
fn ix_w_out(n_layers: usize) -> usize {
    1 + 3 * n_layers
}

struct LayerTrace {
    gates: GateCache,
    h: Vec<f64>,
    c: Vec<f64>,
}

struct StepTrace {
    input_id: u32,
    x0: Vec<f64>,
    layers: Vec<LayerTrace>,
    probs: Vec<f64>,
    target: u32,
    // DCLM extras; empty for the LSTM.
    ctx: Vec<f64>,
    alpha: Vec<f64>,
    att_tanh: Vec<Vec<f64>>,
    head_tanh: Vec<f64>,
}

fn framed_ids(vocab: &LmVocab, tokens: &[impl AsRef<str>]) -> (Vec<u32>, Vec<u32>) {
    let ids = super::forward::token_ids(vocab, tokens);
    let mut inputs = Vec::with_capacity(ids.len() + 1);
    inputs.push(LmVocab::BOS);
    inputs.extend_from_slice(&ids);
    let mut targets = ids;
    targets.push(LmVocab::EOS);
    (inputs, targets)
}

fn init_rows(flat: &[f64], hidden: usize, layer: usize) -> &[f64] {
    &flat[layer * hidden..(layer + 1) * hidden]
}

/// Backward through one LSTM layer step. Returns (dx, dh_prev, dc_prev)
/// and accumulates parameter gradients.
#[allow(clippy::too_many_arguments)]
fn layer_backward(
    layer: &LstmLayer,
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    trace: &LayerTrace,
    dh: &[f64],
    dc_carry: &[f64],
    gw_x: &mut [f64],
    gw_h: &mut [f64],
    gb: &mut [f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let hdim = layer.hidden;
    let GateCache { i, f, g, o } = &trace.gates;
    let mut dz = alloc::vec![0.0; 4 * hdim];
    let mut dc_prev = alloc::vec![0.0; hdim];
    for k in 0..hdim {
        let tc = math::tanh(trace.c[k]);
        let do_ = dh[k] * tc;
        let dc = dc_carry[k] + dh[k] * o[k] * (1.0 - tc * tc);
        let di = dc * g[k];
        let df = dc * c_prev[k];
        let dg = dc * i[k];
        dc_prev[k] = dc * f[k];
        dz[k] = di * i[k] * (1.0 - i[k]);
        dz[hdim + k] = df * f[k] * (1.0 - f[k]);
        dz[2 * hdim + k] = dg * (1.0 - g[k] * g[k]);
        dz[3 * hdim + k] = do_ * o[k] * (1.0 - o[k]);
    }
    math::outer_acc(gw_x, &dz, x);
    math::outer_acc(gw_h, &dz, h_prev);
    math::add_acc(gb, &dz);
    let mut dx = alloc::vec![0.0; layer.input_dim];
    math::matvec_t_acc(&layer.w_x, 4 * hdim, layer.input_dim, &dz, &mut dx);
    let mut dh_prev = alloc::vec![0.0; hdim];
    math::matvec_t_acc(&layer.w_h, 4 * hdim, hdim, &dz, &mut dh_prev);
    (dx, dh_prev, dc_prev)
}

/// Loss and gradients of one sentence under the plain LSTM. Returns the
/// summed NLL; gradients accumulate into `grads`.
pub fn lstm_sentence_gradients(
    params: &LstmParams,
    tokens: &[impl AsRef<str>],
    grads: &mut GradBuffer,
) -> f64 {
    let (inputs, targets) = framed_ids(&params.vocab, tokens);
    let n_layers = params.n_layers();
    let hidden = params.hidden;
    let e = params.embed_dim;

    // Forward with traces.
    let mut steps: Vec<StepTrace> = Vec::with_capacity(inputs.len());
    let mut nll = 0.0;
    for (t, (&input_id, &target)) in inputs.iter().zip(&targets).enumerate() {
        let x0 = params.embedding[input_id as usize * e..(input_id as usize + 1) * e].to_vec();
        let mut layers = Vec::with_capacity(n_layers);
        let mut x = x0.clone();
        for (l, layer) in params.layers.iter().enumerate() {
            let (h_prev, c_prev) = prev_state(&steps, t, l, params);
            let (h, c, gates) = layer_step(layer, &x, h_prev, c_prev, true);
            x = h.clone();
            layers.push(LayerTrace { gates: gates.unwrap(), h, c });
        }
        let mut probs = lstm_logits(params, &layers[n_layers - 1].h);
        math::softmax_inplace(&mut probs);
        nll -= math::ln(probs[target as usize]);
        steps.push(StepTrace {
            input_id,
            x0,
            layers,
            probs,
            target,
            ctx: Vec::new(),
            alpha: Vec::new(),
            att_tanh: Vec::new(),
            head_tanh: Vec::new(),
        });
    }

    // Backward.
    let v = params.vocab_size();
    let w_out_ix = ix_w_out(n_layers);
    let mut dh_carry = alloc::vec![alloc::vec![0.0; hidden]; n_layers];
    let mut dc_carry = alloc::vec![alloc::vec![0.0; hidden]; n_layers];
    for t in (0..steps.len()).rev() {
        let step = &steps[t];
        let mut dlogits = step.probs.clone();
        dlogits[step.target as usize] -= 1.0;
        let h_top = &step.layers[n_layers - 1].h;
        math::outer_acc(&mut grads.tensors[w_out_ix], &dlogits, h_top);
        math::add_acc(&mut grads.tensors[w_out_ix + 1], &dlogits);
        let mut dh_top = dh_carry[n_layers - 1].clone();
        math::matvec_t_acc(&params.w_out, v, hidden, &dlogits, &mut dh_top);

        let mut dx_above: Vec<f64> = Vec::new();
        for l in (0..n_layers).rev() {
            let dh = if l == n_layers - 1 {
                dh_top.clone()
            } else {
                let mut dh = dh_carry[l].clone();
                math::add_acc(&mut dh, &dx_above);
                dh
            };
            let x = if l == 0 { &step.x0 } else { &step.layers[l - 1].h };
            let (h_prev, c_prev) = prev_state(&steps[..t], t, l, params);
            let (gw_x, rest) = grads.tensors[ix_w_x(l)..].split_at_mut(1);
            let (gw_h, gb) = rest.split_at_mut(1);
            let (dx, dh_prev, dc_prev) = layer_backward(
                &params.layers[l],
                x,
                h_prev,
                c_prev,
                &step.layers[l],
                &dh,
                &dc_carry[l],
                &mut gw_x[0],
                &mut gw_h[0],
                &mut gb[0][..4 * hidden],
            );
            dh_carry[l] = dh_prev;
            dc_carry[l] = dc_prev;
            dx_above = dx;
        }
        let row = step.input_id as usize * e;
        math::add_acc(&mut grads.tensors[0][row..row + e], &dx_above);
    }
    for l in 0..n_layers {
        math::add_acc(
            &mut grads.tensors[w_out_ix + 2][l * hidden..(l + 1) * hidden],
            &dh_carry[l],
        );
        math::add_acc(
            &mut grads.tensors[w_out_ix + 3][l * hidden..(l + 1) * hidden],
            &dc_carry[l],
        );
    }
    nll
}

fn prev_state<'a>(
    steps: &'a [StepTrace],
    t: usize,
    layer: usize,
    params: &'a LstmParams,
) -> (&'a [f64], &'a [f64]) {
    if t == 0 {
        (
            init_rows(&params.h0, params.hidden, layer),
            init_rows(&params.c0, params.hidden, layer),
        )
    } else {
        (&steps[t - 1].layers[layer].h, &steps[t - 1].layers[layer].c)
    }
}

/// Loss and gradients of one sentence under the DCLM, attending over
/// `prev_ctx` (held constant). Returns the summed NLL and the top-layer
/// hidden states that form the next sentence's context.
pub fn dclm_sentence_gradients(
    params: &DclmParams,
    tokens: &[impl AsRef<str>],
    prev_ctx: &SentenceContext,
    grads: &mut GradBuffer,
) -> (f64, SentenceContext) {
    let lstm = &params.lstm;
    let (inputs, targets) = framed_ids(&lstm.vocab, tokens);
    let n_layers = lstm.n_layers();
    let hidden = lstm.hidden;
    let e = lstm.embed_dim;
    let m_count = prev_ctx.len();

    // Forward with traces.
    let mut steps: Vec<StepTrace> = Vec::with_capacity(inputs.len());
    let mut nll = 0.0;
    for (t, (&input_id, &target)) in inputs.iter().zip(&targets).enumerate() {
        let query: &[f64] = if t == 0 {
            init_rows(&lstm.h0, hidden, n_layers - 1)
        } else {
            &steps[t - 1].layers[n_layers - 1].h
        };
        let (ctx, alpha, att_tanh) = attention_traced(query, prev_ctx, params);
        let mut x0 = Vec::with_capacity(e + hidden);
        x0.extend_from_slice(&lstm.embedding[input_id as usize * e..(input_id as usize + 1) * e]);
        x0.extend_from_slice(&ctx);
        let mut layers = Vec::with_capacity(n_layers);
        let mut x = x0.clone();
        for (l, layer) in lstm.layers.iter().enumerate() {
            let (h_prev, c_prev) = prev_state(&steps, t, l, lstm);
            let (h, c, gates) = layer_step(layer, &x, h_prev, c_prev, true);
            x = h.clone();
            layers.push(LayerTrace { gates: gates.unwrap(), h, c });
        }
        let (logits, head_tanh) = dclm_logits(params, &layers[n_layers - 1].h, &ctx);
        let mut probs = logits;
        math::softmax_inplace(&mut probs);
        nll -= math::ln(probs[target as usize]);
        steps.push(StepTrace {
            input_id,
            x0,
            layers,
            probs,
            target,
            ctx,
            alpha,
            att_tanh,
            head_tanh,
        });
    }
    let next_ctx = SentenceContext {
        states: steps.iter().map(|s| s.layers[n_layers - 1].h.clone()).collect(),
    };

    // Backward.
    let v = lstm.vocab_size();
    let w_out_ix = ix_w_out(n_layers);
    let dw_h_ix = w_out_ix + 4;
    let mut dh_carry = alloc::vec![alloc::vec![0.0; hidden]; n_layers];
    let mut dc_carry = alloc::vec![alloc::vec![0.0; hidden]; n_layers];
    for t in (0..steps.len()).rev() {
        let step = &steps[t];
        let h_top = &step.layers[n_layers - 1].h;

        // Head: logits = W_o tanh(W_h h + W_c c) + b.
        let mut dlogits = step.probs.clone();
        dlogits[step.target as usize] -= 1.0;
        math::outer_acc(&mut grads.tensors[w_out_ix], &dlogits, &step.head_tanh);
        math::add_acc(&mut grads.tensors[w_out_ix + 1], &dlogits);
        let mut dth = alloc::vec![0.0; hidden];
        math::matvec_t_acc(&lstm.w_out, v, hidden, &dlogits, &mut dth);
        let mut du = alloc::vec![0.0; hidden];
        for k in 0..hidden {
            du[k] = dth[k] * (1.0 - step.head_tanh[k] * step.head_tanh[k]);
        }
        math::outer_acc(&mut grads.tensors[dw_h_ix], &du, h_top);
        math::outer_acc(&mut grads.tensors[dw_h_ix + 1], &du, &step.ctx);
        let mut dh_top = dh_carry[n_layers - 1].clone();
        math::matvec_t_acc(&params.w_h, hidden, hidden, &du, &mut dh_top);
        let mut dctx = alloc::vec![0.0; hidden];
        math::matvec_t_acc(&params.w_c, hidden, hidden, &du, &mut dctx);

        // LSTM stack.
        let mut dx_above: Vec<f64> = Vec::new();
        for l in (0..n_layers).rev() {
            let dh = if l == n_layers - 1 {
                dh_top.clone()
            } else {
                let mut dh = dh_carry[l].clone();
                math::add_acc(&mut dh, &dx_above);
                dh
            };
            let x = if l == 0 { &step.x0 } else { &step.layers[l - 1].h };
            let (h_prev, c_prev) = prev_state(&steps[..t], t, l, lstm);
            let (gw_x, rest) = grads.tensors[ix_w_x(l)..].split_at_mut(1);
            let (gw_h, gb) = rest.split_at_mut(1);
            let (dx, dh_prev, dc_prev) = layer_backward(
                &lstm.layers[l],
                x,
                h_prev,
                c_prev,
                &step.layers[l],
                &dh,
                &dc_carry[l],
                &mut gw_x[0],
                &mut gw_h[0],
                &mut gb[0][..4 * hidden],
            );
            dh_carry[l] = dh_prev;
            dc_carry[l] = dc_prev;
            dx_above = dx;
        }
        // Split the layer-0 input gradient into embedding and context parts.
        let row = step.input_id as usize * e;
        math::add_acc(&mut grads.tensors[0][row..row + e], &dx_above[..e]);
        math::add_acc(&mut dctx, &dx_above[e..]);

        // Attention backward: context is alpha-weighted sum of constant
        // previous states; gradients reach w_a, W_a1, W_a2 and the query.
        let mut dalpha = alloc::vec![0.0; m_count];
        for (m, state) in prev_ctx.states.iter().enumerate() {
            dalpha[m] = dctx.iter().zip(state).map(|(d, s)| d * s).sum();
        }
        let weighted: f64 = step.alpha.iter().zip(&dalpha).map(|(a, d)| a * d).sum();
        let mut dp = alloc::vec![0.0; hidden];
        for m in 0..m_count {
            let da = step.alpha[m] * (dalpha[m] - weighted);
            let tanh_m = &step.att_tanh[m];
            for k in 0..hidden {
                grads.tensors[dw_h_ix + 4][k] += da * tanh_m[k];
            }
            let mut dpre = alloc::vec![0.0; hidden];
            for k in 0..hidden {
                dpre[k] = da * params.w_a[k] * (1.0 - tanh_m[k] * tanh_m[k]);
            }
            math::outer_acc(&mut grads.tensors[dw_h_ix + 3], &dpre, &prev_ctx.states[m]);
            math::add_acc(&mut dp, &dpre);
        }
        let query: &[f64] = if t == 0 {
            init_rows(&lstm.h0, hidden, n_layers - 1)
        } else {
            &steps[t - 1].layers[n_layers - 1].h
        };
        math::outer_acc(&mut grads.tensors[dw_h_ix + 2], &dp, query);
        let mut dq = alloc::vec![0.0; hidden];
        math::matvec_t_acc(&params.w_a1, hidden, hidden, &dp, &mut dq);
        // The query is the previous step's top hidden state.
        math::add_acc(&mut dh_carry[n_layers - 1], &dq);
    }
    for l in 0..n_layers {
        math::add_acc(
            &mut grads.tensors[w_out_ix + 2][l * hidden..(l + 1) * hidden],
            &dh_carry[l],
        );
        math::add_acc(
            &mut grads.tensors[w_out_ix + 3][l * hidden..(l + 1) * hidden],
            &dc_carry[l],
        );
    }
    (nll, next_ctx)
}
