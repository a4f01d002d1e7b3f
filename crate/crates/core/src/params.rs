//! Named parameter storage shared by all learnable layers, plus the text
//! checkpoint format (`name rows cols` header line followed by row-major
//! values, one row per line).

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::diff::{Mat, Tape, Var};
use crate::error::{Error, Result};

/// Flat list of named parameter matrices. Layers keep indices into this.
#[derive(Debug, Clone, Default)]
pub struct ParamSet {
    names: Vec<String>,
    values: Vec<Mat>,
}

impl ParamSet {
    pub fn new() -> ParamSet {
        ParamSet::default()
    }

    /// Register a parameter; names must be unique (`module.layer.param`).
    pub fn add(&mut self, name: impl Into<String>, value: Mat) -> usize {
        let name = name.into();
        debug_assert!(
            !self.names.contains(&name),
            "duplicate parameter name {name}"
        );
        self.names.push(name);
        self.values.push(value);
        self.values.len() - 1
    }

    /// Glorot-uniform initialized matrix.
    pub fn add_glorot(
        &mut self,
        name: impl Into<String>,
        rows: usize,
        cols: usize,
        rng: &mut ChaCha20Rng,
    ) -> usize {
        let bound = (6.0 / (rows + cols) as f64).sqrt();
        let value = Mat::from_shape_fn((rows, cols), |_| rng.gen_range(-bound..bound));
        self.add(name, value)
    }

    pub fn add_zeros(&mut self, name: impl Into<String>, rows: usize, cols: usize) -> usize {
        self.add(name, Mat::zeros((rows, cols)))
    }

    pub fn add_value(&mut self, name: impl Into<String>, value: Mat) -> usize {
        self.add(name, value)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[Mat] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Mat] {
        &mut self.values
    }

    pub fn get(&self, index: usize) -> &Mat {
        &self.values[index]
    }

    /// Create one differentiable leaf per parameter, in registration order.
    pub fn leaves(&self, tape: &Tape) -> Vec<Var> {
        self.values.iter().map(|m| tape.leaf(m.clone())).collect()
    }

    /// Constant variables for inference passes (no tape growth).
    pub fn constants(&self) -> Vec<Var> {
        self.values.iter().map(|m| Var::constant(m.clone())).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = String::new();
        for (name, value) in self.names.iter().zip(&self.values) {
            writeln!(text, "{name} {} {}", value.nrows(), value.ncols()).expect("write");
            for row in value.rows() {
                let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
                text.push_str(&line.join(" "));
                text.push('\n');
            }
        }
        std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Load values into an existing set; names and shapes must match exactly.
    pub fn load(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut lines = text.lines().enumerate();
        for (name, value) in self.names.iter().zip(&mut self.values) {
            let (lineno, header) = lines
                .next()
                .ok_or_else(|| Error::invalid(format!("checkpoint truncated before {name}")))?;
            let parts: Vec<&str> = header.split_whitespace().collect();
            let parse_err = |detail: String| Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                detail,
            };
            if parts.len() != 3 || parts[0] != name {
                return Err(parse_err(format!("expected header for {name}, got {header:?}")));
            }
            let rows: usize = parts[1].parse().map_err(|_| parse_err("bad row count".into()))?;
            let cols: usize = parts[2].parse().map_err(|_| parse_err("bad col count".into()))?;
            if (rows, cols) != (value.nrows(), value.ncols()) {
                return Err(parse_err(format!(
                    "shape {rows}x{cols} does not match expected {}x{}",
                    value.nrows(),
                    value.ncols()
                )));
            }
            for r in 0..rows {
                let (lineno, line) = lines
                    .next()
                    .ok_or_else(|| Error::invalid(format!("checkpoint truncated in {name}")))?;
                let row: std::result::Result<Vec<f64>, _> =
                    line.split_whitespace().map(str::parse).collect();
                let row = row.map_err(|e| Error::Parse {
                    path: path.display().to_string(),
                    line: lineno + 1,
                    detail: e.to_string(),
                })?;
                if row.len() != cols {
                    return Err(Error::Parse {
                        path: path.display().to_string(),
                        line: lineno + 1,
                        detail: format!("{} values, expected {cols}", row.len()),
                    });
                }
                for (c, v) in row.into_iter().enumerate() {
                    value[[r, c]] = v;
                }
            }
        }
        Ok(())
    }
}
