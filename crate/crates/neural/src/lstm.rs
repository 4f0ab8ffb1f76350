//! Four-gate LSTM cell, gate order `[input, forget, cell, output]`.
//!
//! ```text
//! z   = W_in x_t + W_rec h_{t-1} + b
//! i   = sigmoid(z_i)   f = sigmoid(z_f)   g = tanh(z_g)   o = sigmoid(z_o)
//! c_t = f * c_{t-1} + i * g
//! h_t = o * tanh(c_t)
//! ```

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Cached values of one unrolled step.
#[derive(Debug, Clone)]
pub(crate) struct LstmStep {
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    /// Post-activation gates, `4 * units` long in gate order.
    pub gates: Vec<f64>,
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
    pub h: Vec<f64>,
}

pub(crate) struct LstmWeights<'a> {
    pub units: usize,
    pub input_dim: usize,
    pub w_in: &'a [f64],
    pub w_rec: &'a [f64],
    pub bias: &'a [f64],
}

impl LstmWeights<'_> {
    pub fn step(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> LstmStep {
        let n = self.units;
        let mut z = self.bias.to_vec();
        for (row, zr) in z.iter_mut().enumerate() {
            let wi = &self.w_in[row * self.input_dim..(row + 1) * self.input_dim];
            let wr = &self.w_rec[row * n..(row + 1) * n];
            *zr += dot(wi, x) + dot(wr, h_prev);
        }
        let mut gates = z;
        for (k, v) in gates.iter_mut().enumerate() {
            *v = if (2 * n..3 * n).contains(&k) {
                v.tanh()
            } else {
                sigmoid(*v)
            };
        }
        let mut c = vec![0.0; n];
        let mut tanh_c = vec![0.0; n];
        let mut h = vec![0.0; n];
        for j in 0..n {
            let (i, f, g, o) = (gates[j], gates[n + j], gates[2 * n + j], gates[3 * n + j]);
            c[j] = f * c_prev[j] + i * g;
            tanh_c[j] = c[j].tanh();
            h[j] = o * tanh_c[j];
        }
        LstmStep {
            h_prev: h_prev.to_vec(),
            c_prev: c_prev.to_vec(),
            gates,
            c,
            tanh_c,
            h,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Backpropagate through one step.
///
/// `dh` and `dc` are the gradients flowing into `h_t` and `c_t`; on return
/// they hold the gradients for `h_{t-1}` and `c_{t-1}`. Parameter gradients
/// are accumulated into the three output slices.
#[allow(clippy::too_many_arguments)]
pub(crate) fn step_backward(
    w: &LstmWeights<'_>,
    step: &LstmStep,
    x: &[f64],
    dh: &mut Vec<f64>,
    dc: &mut Vec<f64>,
    d_w_in: &mut [f64],
    d_w_rec: &mut [f64],
    d_bias: &mut [f64],
) {
    let n = w.units;
    let mut dz = vec![0.0; 4 * n];
    let mut dc_prev = vec![0.0; n];
    for j in 0..n {
        let (i, f, g, o) = (
            step.gates[j],
            step.gates[n + j],
            step.gates[2 * n + j],
            step.gates[3 * n + j],
        );
        let tc = step.tanh_c[j];
        let d_o = dh[j] * tc;
        let dcj = dc[j] + dh[j] * o * (1.0 - tc * tc);
        let d_i = dcj * g;
        let d_g = dcj * i;
        let d_f = dcj * step.c_prev[j];
        dc_prev[j] = dcj * f;
        dz[j] = d_i * i * (1.0 - i);
        dz[n + j] = d_f * f * (1.0 - f);
        dz[2 * n + j] = d_g * (1.0 - g * g);
        dz[3 * n + j] = d_o * o * (1.0 - o);
    }
    let mut dh_prev = vec![0.0; n];
    for (row, &dzr) in dz.iter().enumerate() {
        if dzr == 0.0 {
            continue;
        }
        d_bias[row] += dzr;
        let wi = row * w.input_dim;
        for (k, &xk) in x.iter().enumerate() {
            d_w_in[wi + k] += dzr * xk;
        }
        let wr = row * n;
        for k in 0..n {
            d_w_rec[wr + k] += dzr * step.h_prev[k];
            dh_prev[k] += w.w_rec[wr + k] * dzr;
        }
    }
    *dh = dh_prev;
    *dc = dc_prev;
}
