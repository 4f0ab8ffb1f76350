use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("checkpoint is for method `{checkpoint}` but the config asks for `{config}`")]
    CheckpointMismatch { checkpoint: String, config: String },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("replay buffer is empty")]
    EmptyBuffer,

    #[error("empty value list")]
    EmptyValues,

    #[error(transparent)]
    Neural(#[from] hrl_neural::NeuralError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}
