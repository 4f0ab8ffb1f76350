//! A deliberately small neural-network engine for recurrent Q-networks.
//!
//! Networks are a fixed pipeline: a sequence encoder (an LSTM cell unrolled
//! over the input sequence, or a single tanh dense layer over the flattened
//! sequence), a stack of ReLU fully connected layers, and a linear output
//! head. Everything is `f64` and single threaded; gradients are computed by
//! hand-written backpropagation through time and checked against finite
//! differences in the test suite.

mod arch;
mod error;
pub mod io;
mod lstm;
mod network;
mod optim;
mod params;

pub use arch::{Architecture, Encoder};
pub use error::NeuralError;
pub use network::{backward, backward_into, forward, ForwardTrace};
pub use optim::Sgd;
pub use params::{init_params, Gradients, NetworkParams, ParamBlock};

pub type Result<T> = std::result::Result<T, NeuralError>;
