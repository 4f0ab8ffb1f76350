use crate::arch::Encoder;
use crate::lstm::{dot, step_backward, LstmStep, LstmWeights};
use crate::params::{Gradients, NetworkParams};
use crate::{NeuralError, Result};

/// Activations cached by [`forward`] for one input sequence.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    generation: u64,
    input: Vec<f64>,
    lstm_steps: Vec<LstmStep>,
    encoder_out: Vec<f64>,
    /// Input activation of every dense layer after the encoder (hidden and output).
    layer_inputs: Vec<Vec<f64>>,
    /// Pre-activation of every dense layer after the encoder.
    layer_pre: Vec<Vec<f64>>,
}

impl ForwardTrace {
    pub fn seq_len(&self) -> usize {
        self.lstm_steps.len()
    }

    pub fn encoder_output(&self) -> &[f64] {
        &self.encoder_out
    }

    /// Post-activation LSTM gates for step `t`, gate order `[i, f, g, o]`.
    pub fn lstm_gates(&self, t: usize) -> Option<&[f64]> {
        self.lstm_steps.get(t).map(|s| s.gates.as_slice())
    }

    pub fn lstm_hidden(&self, t: usize) -> Option<&[f64]> {
        self.lstm_steps.get(t).map(|s| s.h.as_slice())
    }
}

fn encoder_block_count(enc: Encoder) -> usize {
    match enc {
        Encoder::Lstm { .. } => 3,
        Encoder::Dense { .. } => 2,
    }
}

fn affine(w: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let cols = x.len();
    b.iter()
        .enumerate()
        .map(|(r, &br)| br + dot(&w[r * cols..(r + 1) * cols], x))
        .collect()
}

impl NetworkParams {
    fn lstm_weights(&self) -> LstmWeights<'_> {
        let arch = self.architecture();
        LstmWeights {
            units: arch.encoder.units(),
            input_dim: arch.input_dim,
            w_in: &self.blocks[0].data,
            w_rec: &self.blocks[1].data,
            bias: &self.blocks[2].data,
        }
    }

    /// Q-values only, discarding the trace.
    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        forward(self, input).map(|(q, _)| q)
    }
}

/// Run the network on a flattened `seq_len x input_dim` sequence (oldest
/// step first). Returns the linear output head and the cached trace.
pub fn forward(params: &NetworkParams, input: &[f64]) -> Result<(Vec<f64>, ForwardTrace)> {
    let arch = params.architecture();
    if input.len() != arch.input_len() {
        return Err(NeuralError::Shape {
            expected: arch.input_len(),
            actual: input.len(),
        });
    }
    let mut lstm_steps = Vec::new();
    let encoder_out = match arch.encoder {
        Encoder::Lstm { units } => {
            let w = params.lstm_weights();
            let mut h = vec![0.0; units];
            let mut c = vec![0.0; units];
            for x in input.chunks(arch.input_dim) {
                let step = w.step(x, &h, &c);
                h.clone_from(&step.h);
                c.clone_from(&step.c);
                lstm_steps.push(step);
            }
            h
        }
        Encoder::Dense { .. } => {
            let z = affine(&params.blocks[0].data, &params.blocks[1].data, input);
            z.into_iter().map(f64::tanh).collect()
        }
    };

    let first = encoder_block_count(arch.encoder);
    let n_layers = arch.hidden.len() + 1;
    let mut layer_inputs = Vec::with_capacity(n_layers);
    let mut layer_pre = Vec::with_capacity(n_layers);
    let mut act = encoder_out.clone();
    for layer in 0..n_layers {
        let w = &params.blocks[first + 2 * layer].data;
        let b = &params.blocks[first + 2 * layer + 1].data;
        let z = affine(w, b, &act);
        let is_output = layer + 1 == n_layers;
        let next = if is_output {
            z.clone()
        } else {
            z.iter().map(|v| v.max(0.0)).collect()
        };
        layer_inputs.push(std::mem::replace(&mut act, next));
        layer_pre.push(z);
    }

    let trace = ForwardTrace {
        generation: params.generation(),
        input: input.to_vec(),
        lstm_steps,
        encoder_out,
        layer_inputs,
        layer_pre,
    };
    Ok((act, trace))
}

/// Parameter gradients of `sum_k out_grad[k] * q_k`.
pub fn backward(
    params: &NetworkParams,
    trace: &ForwardTrace,
    out_grad: &[f64],
) -> Result<Gradients> {
    let mut grads = Gradients::zeros_like(params);
    backward_into(params, trace, out_grad, &mut grads)?;
    Ok(grads)
}

/// Like [`backward`] but accumulates into an existing gradient buffer, which
/// is how minibatch gradients are summed.
pub fn backward_into(
    params: &NetworkParams,
    trace: &ForwardTrace,
    out_grad: &[f64],
    grads: &mut Gradients,
) -> Result<()> {
    if trace.generation != params.generation() {
        return Err(NeuralError::StaleTrace {
            trace: trace.generation,
            params: params.generation(),
        });
    }
    let arch = params.architecture();
    if out_grad.len() != arch.output_dim {
        return Err(NeuralError::Shape {
            expected: arch.output_dim,
            actual: out_grad.len(),
        });
    }
    if grads.blocks.len() != params.blocks.len() {
        return Err(NeuralError::Shape {
            expected: params.blocks.len(),
            actual: grads.blocks.len(),
        });
    }

    let first = encoder_block_count(arch.encoder);
    let n_layers = arch.hidden.len() + 1;
    let mut delta = out_grad.to_vec();
    for layer in (0..n_layers).rev() {
        let wi = first + 2 * layer;
        let x = &trace.layer_inputs[layer];
        if layer + 1 != n_layers {
            for (d, z) in delta.iter_mut().zip(&trace.layer_pre[layer]) {
                if *z <= 0.0 {
                    *d = 0.0;
                }
            }
        }
        let cols = x.len();
        let w = &params.blocks[wi].data;
        let mut dx = vec![0.0; cols];
        {
            let (dw_part, db_part) = grads.blocks.split_at_mut(wi + 1);
            let dw = &mut dw_part[wi];
            let db = &mut db_part[0];
            for (r, &dr) in delta.iter().enumerate() {
                if dr == 0.0 {
                    continue;
                }
                db[r] += dr;
                let row = r * cols;
                for k in 0..cols {
                    dw[row + k] += dr * x[k];
                    dx[k] += w[row + k] * dr;
                }
            }
        }
        delta = dx;
    }

    match arch.encoder {
        Encoder::Lstm { units } => {
            let w = params.lstm_weights();
            let mut dh = delta;
            let mut dc = vec![0.0; units];
            let (g_in, rest) = grads.blocks.split_at_mut(1);
            let (g_rec, rest) = rest.split_at_mut(1);
            let g_bias = &mut rest[0];
            for (t, step) in trace.lstm_steps.iter().enumerate().rev() {
                let x = &trace.input[t * arch.input_dim..(t + 1) * arch.input_dim];
                step_backward(
                    &w,
                    step,
                    x,
                    &mut dh,
                    &mut dc,
                    &mut g_in[0],
                    &mut g_rec[0],
                    g_bias,
                );
            }
        }
        Encoder::Dense { .. } => {
            let cols = trace.input.len();
            let (dw_part, db_part) = grads.blocks.split_at_mut(1);
            for (r, (&d, &a)) in delta.iter().zip(&trace.encoder_out).enumerate() {
                let dz = d * (1.0 - a * a);
                if dz == 0.0 {
                    continue;
                }
                db_part[0][r] += dz;
                let row = r * cols;
                for (k, &xk) in trace.input.iter().enumerate() {
                    dw_part[0][row + k] += dz * xk;
                }
            }
        }
    }
    Ok(())
}
