//! Plain-text checkpoint format.
//!
//! ```text
//! hrl-neural-params 1
//! input_dim 16
//! seq_len 3
//! encoder lstm 32
//! hidden 64
//! output_dim 3
//! block lstm.w_in 128 16
//! <128 lines of 16 space-separated values>
//! block lstm.w_rec 128 32
//! ...
//! end
//! ```
//!
//! `hidden` lists the ReLU layer widths (empty list allowed). Values use
//! Rust's shortest round-trip float formatting, so a save/load cycle is
//! bit-exact.

use std::io::{BufRead, Write};

use crate::arch::{Architecture, Encoder};
use crate::params::{NetworkParams, ParamBlock};
use crate::{NeuralError, Result};

const MAGIC: &str = "hrl-neural-params 1";

pub fn write_params<W: Write>(params: &NetworkParams, out: &mut W) -> Result<()> {
    let arch = params.architecture();
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "input_dim {}", arch.input_dim)?;
    writeln!(out, "seq_len {}", arch.seq_len)?;
    writeln!(out, "encoder {}", arch.encoder)?;
    let hidden: Vec<String> = arch.hidden.iter().map(|h| h.to_string()).collect();
    writeln!(out, "hidden {}", hidden.join(" ").trim())?;
    writeln!(out, "output_dim {}", arch.output_dim)?;
    for block in params.blocks() {
        let (rows, cols) = block.shape();
        writeln!(out, "block {} {rows} {cols}", block.name())?;
        for row in block.values().chunks(cols) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
    }
    writeln!(out, "end")?;
    Ok(())
}

pub fn to_string(params: &NetworkParams) -> String {
    let mut buf = Vec::new();
    write_params(params, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("checkpoint text is ascii")
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<String> {
        self.number += 1;
        match self.inner.next() {
            Some(line) => Ok(line?),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn err(&self, msg: impl Into<String>) -> NeuralError {
        NeuralError::Parse {
            line: self.number,
            msg: msg.into(),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<Vec<String>> {
        let line = self.next_line()?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        Ok(parts.map(str::to_string).collect())
    }

    fn usize_field(&mut self, key: &str) -> Result<usize> {
        let parts = self.keyed(key)?;
        match parts.as_slice() {
            [v] => v
                .parse()
                .map_err(|_| self.err(format!("bad integer for `{key}`"))),
            _ => Err(self.err(format!("`{key}` takes one value"))),
        }
    }
}

/// Parse one network from `input`, consuming lines up to and including `end`.
pub fn read_params<R: BufRead>(input: R) -> Result<NetworkParams> {
    let mut lines = Lines {
        inner: input.lines(),
        number: 0,
    };
    read_from_lines(&mut lines)
}

fn read_from_lines<R: BufRead>(lines: &mut Lines<R>) -> Result<NetworkParams> {
    if lines.next_line()?.trim() != MAGIC {
        return Err(lines.err("missing header"));
    }
    let input_dim = lines.usize_field("input_dim")?;
    let seq_len = lines.usize_field("seq_len")?;
    let enc = lines.keyed("encoder")?;
    let encoder = match enc.as_slice() {
        [kind, units] => {
            let units = units.parse().map_err(|_| lines.err("bad encoder width"))?;
            match kind.as_str() {
                "lstm" => Encoder::Lstm { units },
                "dense" => Encoder::Dense { units },
                other => return Err(lines.err(format!("unknown encoder `{other}`"))),
            }
        }
        _ => return Err(lines.err("encoder takes a kind and a width")),
    };
    let hidden = lines
        .keyed("hidden")?
        .iter()
        .map(|h| h.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| lines.err("bad hidden width"))?;
    let output_dim = lines.usize_field("output_dim")?;
    let arch = Architecture {
        input_dim,
        seq_len,
        encoder,
        hidden,
        output_dim,
    };
    arch.validate()?;

    let mut blocks = Vec::new();
    for (name, rows, cols) in arch.block_shapes() {
        let header = lines.keyed("block")?;
        if header != [name.clone(), rows.to_string(), cols.to_string()] {
            return Err(lines.err(format!("expected block {name} {rows} {cols}")));
        }
        let mut block = ParamBlock::zeros(name, rows, cols);
        for r in 0..rows {
            let line = lines.next_line()?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| lines.err("bad float"))?;
            if row.len() != cols {
                return Err(lines.err(format!("expected {cols} values, found {}", row.len())));
            }
            block.data[r * cols..(r + 1) * cols].copy_from_slice(&row);
        }
        blocks.push(block);
    }
    if lines.next_line()?.trim() != "end" {
        return Err(lines.err("expected `end`"));
    }
    NetworkParams::from_blocks(arch, blocks)
}

/// Parse several consecutive networks from one reader.
pub fn read_many<R: BufRead>(input: R, count: usize) -> Result<Vec<NetworkParams>> {
    let mut lines = Lines {
        inner: input.lines(),
        number: 0,
    };
    (0..count).map(|_| read_from_lines(&mut lines)).collect()
}

pub fn from_str(text: &str) -> Result<NetworkParams> {
    read_params(text.as_bytes())
}
