use std::fmt;

use crate::{NeuralError, Result};

/// How the input sequence is summarised before the fully connected stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoder {
    /// Four-gate LSTM cell unrolled over the sequence; the final hidden state
    /// is passed on.
    Lstm { units: usize },
    /// One tanh dense layer over the flattened `seq_len * input_dim` vector.
    Dense { units: usize },
}

impl Encoder {
    pub fn units(&self) -> usize {
        match *self {
            Encoder::Lstm { units } | Encoder::Dense { units } => units,
        }
    }
}

impl fmt::Display for Encoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Encoder::Lstm { units } => write!(f, "lstm {units}"),
            Encoder::Dense { units } => write!(f, "dense {units}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    pub input_dim: usize,
    pub seq_len: usize,
    pub encoder: Encoder,
    /// Widths of the ReLU hidden layers between the encoder and the output.
    pub hidden: Vec<usize>,
    pub output_dim: usize,
}

impl Architecture {
    pub fn lstm(
        input_dim: usize,
        seq_len: usize,
        units: usize,
        hidden: &[usize],
        output_dim: usize,
    ) -> Self {
        Architecture {
            input_dim,
            seq_len,
            encoder: Encoder::Lstm { units },
            hidden: hidden.to_vec(),
            output_dim,
        }
    }

    pub fn dense(
        input_dim: usize,
        seq_len: usize,
        units: usize,
        hidden: &[usize],
        output_dim: usize,
    ) -> Self {
        Architecture {
            input_dim,
            seq_len,
            encoder: Encoder::Dense { units },
            hidden: hidden.to_vec(),
            output_dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.seq_len == 0 || self.output_dim == 0 {
            return Err(NeuralError::Config(format!(
                "input_dim={}, seq_len={}, output_dim={} must all be positive",
                self.input_dim, self.seq_len, self.output_dim
            )));
        }
        if self.encoder.units() == 0 {
            return Err(NeuralError::Config("encoder has zero units".into()));
        }
        if let Some(i) = self.hidden.iter().position(|&w| w == 0) {
            return Err(NeuralError::Config(format!(
                "hidden layer {i} has zero width"
            )));
        }
        Ok(())
    }

    /// Flattened input length expected by `forward`.
    pub fn input_len(&self) -> usize {
        self.input_dim * self.seq_len
    }

    /// `(rows, cols)` of every parameter block, in storage order, with names.
    pub(crate) fn block_shapes(&self) -> Vec<(String, usize, usize)> {
        let mut shapes = Vec::new();
        let units = self.encoder.units();
        match self.encoder {
            Encoder::Lstm { .. } => {
                shapes.push(("lstm.w_in".to_string(), 4 * units, self.input_dim));
                shapes.push(("lstm.w_rec".to_string(), 4 * units, units));
                shapes.push(("lstm.bias".to_string(), 4 * units, 1));
            }
            Encoder::Dense { .. } => {
                shapes.push(("enc.w".to_string(), units, self.input_len()));
                shapes.push(("enc.b".to_string(), units, 1));
            }
        }
        let mut fan_in = units;
        for (k, &width) in self.hidden.iter().enumerate() {
            shapes.push((format!("fc{k}.w"), width, fan_in));
            shapes.push((format!("fc{k}.b"), width, 1));
            fan_in = width;
        }
        shapes.push(("out.w".to_string(), self.output_dim, fan_in));
        shapes.push(("out.b".to_string(), self.output_dim, 1));
        shapes
    }

    pub fn param_count(&self) -> usize {
        self.block_shapes().iter().map(|(_, r, c)| r * c).sum()
    }
}
