//! Text checkpoints: a short header followed by the networks in the
//! neural engine's own format.
//!
//! ```text
//! hrl-checkpoint 1
//! method hddqn-pid-lstm
//! noise false
//! config_hash 3f1c...
//! kind learned
//! networks 2
//! hrl-neural-params 1
//! ...
//! ```

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use hrl_neural::{io as nio, NetworkParams};

use crate::baselines::Method;
use crate::{Error, Result};

const MAGIC: &str = "hrl-checkpoint 1";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub method: Method,
    pub noise: bool,
    pub config_hash: String,
    /// Empty for the rule-based method.
    pub networks: Vec<NetworkParams>,
}

impl Checkpoint {
    pub fn kind(&self) -> &'static str {
        if self.method.is_learned() {
            "learned"
        } else {
            "rule-based"
        }
    }

    pub fn write<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "{MAGIC}")?;
        writeln!(out, "method {}", self.method.cli_name())?;
        writeln!(out, "noise {}", self.noise)?;
        writeln!(out, "config_hash {}", self.config_hash)?;
        writeln!(out, "kind {}", self.kind())?;
        writeln!(out, "networks {}", self.networks.len())?;
        for net in &self.networks {
            nio::write_params(net, out)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("checkpoint text is ascii")
    }

    pub fn read<R: BufRead>(mut input: R) -> Result<Self> {
        let mut field = |key: &str| -> Result<String> {
            let mut line = String::new();
            input.read_line(&mut line)?;
            let line = line.trim_end();
            if key.is_empty() {
                return Ok(line.to_string());
            }
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| Error::Checkpoint(format!("expected `{key}`, found `{line}`")))
        };
        if field("")? != MAGIC {
            return Err(Error::Checkpoint("missing header".into()));
        }
        let method = Method::parse(&field("method")?)?;
        let noise = field("noise")?
            .parse()
            .map_err(|_| Error::Checkpoint("bad noise flag".into()))?;
        let config_hash = field("config_hash")?;
        let kind = field("kind")?;
        let count: usize = field("networks")?
            .parse()
            .map_err(|_| Error::Checkpoint("bad network count".into()))?;
        let cp = Checkpoint {
            method,
            noise,
            config_hash,
            networks: nio::read_many(&mut input, count)?,
        };
        if kind != cp.kind() {
            return Err(Error::Checkpoint(format!(
                "kind `{kind}` does not fit method `{method}`"
            )));
        }
        Ok(cp)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(BufReader::new(std::fs::File::open(path)?))
    }
}
