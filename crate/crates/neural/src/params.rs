use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arch::{Architecture, Encoder};
use crate::{NeuralError, Result};

/// One named weight matrix or bias vector, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBlock {
    name: String,
    rows: usize,
    cols: usize,
    pub(crate) data: Vec<f64>,
}

impl ParamBlock {
    pub(crate) fn zeros(name: String, rows: usize, cols: usize) -> Self {
        ParamBlock {
            name,
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Weights of one network. Block shapes are fixed by the architecture and
/// never change after construction.
///
/// `generation` counts in-place updates so that a [`crate::ForwardTrace`]
/// recorded before an update can be rejected by `backward`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    arch: Architecture,
    pub(crate) blocks: Vec<ParamBlock>,
    generation: u64,
}

impl NetworkParams {
    pub fn zeros(arch: &Architecture) -> Result<Self> {
        arch.validate()?;
        let blocks = arch
            .block_shapes()
            .into_iter()
            .map(|(name, r, c)| ParamBlock::zeros(name, r, c))
            .collect();
        Ok(NetworkParams {
            arch: arch.clone(),
            blocks,
            generation: 0,
        })
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn blocks(&self) -> &[ParamBlock] {
        &self.blocks
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub(crate) fn bump_generation(&mut self) {
        self.generation += 1;
    }

    pub fn param_count(&self) -> usize {
        self.blocks.iter().map(ParamBlock::len).sum()
    }

    /// Snapshot for a target network. The copy owns its storage.
    pub fn copy_params(&self) -> NetworkParams {
        self.clone()
    }

    /// Overwrite the values of this network with `source`, keeping shapes.
    pub fn assign_from(&mut self, source: &NetworkParams) -> Result<()> {
        if source.arch != self.arch {
            return Err(NeuralError::Config(
                "cannot assign parameters across architectures".into(),
            ));
        }
        for (dst, src) in self.blocks.iter_mut().zip(&source.blocks) {
            dst.data.copy_from_slice(&src.data);
        }
        self.bump_generation();
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.data.iter().all(|v| v.is_finite()))
    }

    /// Read one scalar by flat index across all blocks.
    pub fn get_flat(&self, mut index: usize) -> f64 {
        for b in &self.blocks {
            if index < b.data.len() {
                return b.data[index];
            }
            index -= b.data.len();
        }
        panic!("flat parameter index out of range");
    }

    /// Write one scalar by flat index across all blocks.
    pub fn set_flat(&mut self, mut index: usize, value: f64) {
        for b in &mut self.blocks {
            if index < b.data.len() {
                b.data[index] = value;
                self.generation += 1;
                return;
            }
            index -= b.data.len();
        }
        panic!("flat parameter index out of range");
    }

    /// Mutable access to a block's values by name. Counts as an update.
    pub fn block_mut(&mut self, name: &str) -> Option<&mut [f64]> {
        self.generation += 1;
        self.blocks
            .iter_mut()
            .find(|b| b.name == name)
            .map(|b| b.data.as_mut_slice())
    }

    pub fn block(&self, name: &str) -> Option<&[f64]> {
        self.blocks
            .iter()
            .find(|b| b.name == name)
            .map(|b| b.data.as_slice())
    }

    pub(crate) fn from_blocks(arch: Architecture, blocks: Vec<ParamBlock>) -> Result<Self> {
        let expected = arch.block_shapes();
        if expected.len() != blocks.len() {
            return Err(NeuralError::Shape {
                expected: expected.len(),
                actual: blocks.len(),
            });
        }
        for ((name, r, c), b) in expected.iter().zip(&blocks) {
            if name != &b.name || *r != b.rows || *c != b.cols || b.data.len() != r * c {
                return Err(NeuralError::Config(format!(
                    "block {} has shape {}x{}, architecture expects {name} {r}x{c}",
                    b.name, b.rows, b.cols
                )));
            }
        }
        Ok(NetworkParams {
            arch,
            blocks,
            generation: 0,
        })
    }
}

/// Gradients, laid out exactly like the parameter blocks they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub(crate) blocks: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(params: &NetworkParams) -> Self {
        Gradients {
            blocks: params
                .blocks
                .iter()
                .map(|b| vec![0.0; b.data.len()])
                .collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub fn get_flat(&self, mut index: usize) -> f64 {
        for b in &self.blocks {
            if index < b.len() {
                return b[index];
            }
            index -= b.len();
        }
        panic!("flat gradient index out of range");
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.blocks.iter().flat_map(|b| b.iter().copied())
    }

    pub fn fill_zero(&mut self) {
        for b in &mut self.blocks {
            b.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for b in &mut self.blocks {
            b.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Rescale so the global L2 norm is at most `max_norm`. Returns the norm
    /// before clipping.
    pub fn clip_global_norm(&mut self, max_norm: f64) -> f64 {
        let norm = self.l2_norm();
        if norm > max_norm && norm > 0.0 {
            self.scale(max_norm / norm);
        }
        norm
    }
}

/// Uniform fan-in initialisation: weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
/// all biases zero except the LSTM forget gate, which starts at +1.
pub fn init_params(arch: &Architecture, seed: u64) -> Result<NetworkParams> {
    let mut params = NetworkParams::zeros(arch)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let units = arch.encoder.units();
    for block in &mut params.blocks {
        let is_bias = block.cols == 1 && (block.name.ends_with(".b") || block.name == "lstm.bias");
        if is_bias {
            continue;
        }
        let scale = 1.0 / (block.cols as f64).sqrt();
        for v in &mut block.data {
            *v = rng.random_range(-scale..scale);
        }
    }
    if let Encoder::Lstm { .. } = arch.encoder {
        let bias = params.block_mut("lstm.bias").expect("lstm bias block");
        bias[units..2 * units].iter_mut().for_each(|b| *b = 1.0);
    }
    params.generation = 0;
    Ok(params)
}
