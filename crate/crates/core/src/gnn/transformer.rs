//! Single graph-transformer layer: multi-head scaled dot-product attention
//! over each node's neighborhood plus self, then output projection,
//! GraphNorm, and ReLU.

use rand_chacha::ChaCha20Rng;

use super::{EdgeList, GraphNorm, Neighborhood};
use crate::diff::{Mat, Tape, Var};
use crate::error::{Error, Result};
use crate::params::ParamSet;

/// Whether a forward pass is training (dropout active) or evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Train,
    Eval,
}

#[derive(Debug, Clone)]
pub struct GraphTransformerLayer {
    hidden: usize,
    heads: usize,
    dropout: f64,
    wq: usize,
    wk: usize,
    wv: usize,
    wo: usize,
    norm: GraphNorm,
}

impl GraphTransformerLayer {
    pub fn init(
        ps: &mut ParamSet,
        prefix: &str,
        in_dim: usize,
        hidden: usize,
        heads: usize,
        dropout: f64,
        rng: &mut ChaCha20Rng,
    ) -> Result<GraphTransformerLayer> {
        if heads == 0 || hidden % heads != 0 {
            return Err(Error::invalid(format!(
                "head count {heads} must divide hidden dim {hidden}"
            )));
        }
        let wq = ps.add_glorot(format!("{prefix}.query"), in_dim, hidden, rng);
        let wk = ps.add_glorot(format!("{prefix}.key"), in_dim, hidden, rng);
        let wv = ps.add_glorot(format!("{prefix}.value"), in_dim, hidden, rng);
        let wo = ps.add_glorot(format!("{prefix}.out"), hidden, hidden, rng);
        let norm = GraphNorm::init(ps, &format!("{prefix}.norm"), hidden, rng);
        Ok(GraphTransformerLayer {
            hidden,
            heads,
            dropout,
            wq,
            wk,
            wv,
            wo,
            norm,
        })
    }

    pub fn out_dim(&self) -> usize {
        self.hidden
    }

    /// Forward pass. Edge weights in `nb` multiply the attention coefficient
    /// of the corresponding neighbor; the implicit self-loop has weight 1.
    pub fn forward(
        &self,
        tape: &Tape,
        params: &[Var],
        x: &Var,
        nb: &Neighborhood,
        phase: Phase,
        rng: &mut ChaCha20Rng,
    ) -> Result<Var> {
        self.forward_with_edge_weights(tape, params, x, nb, None, phase, rng)
    }

    /// Forward pass with a differentiable edge-weight column replacing the
    /// fixed weights in `nb`. The column must be aligned with the edge list
    /// built from `nb` including self-loops (self-loop first per node).
    pub fn forward_with_edge_weights(
        &self,
        tape: &Tape,
        params: &[Var],
        x: &Var,
        nb: &Neighborhood,
        edge_weights: Option<&Var>,
        phase: Phase,
        rng: &mut ChaCha20Rng,
    ) -> Result<Var> {
        let n = x.shape().0;
        nb.validate(n)?;
        let edges = EdgeList::build(nb, true);
        let head_dim = self.hidden / self.heads;
        let scale = 1.0 / (head_dim as f64).sqrt();

        let q = tape.matmul(x, &params[self.wq])?;
        let k = tape.matmul(x, &params[self.wk])?;
        let v = tape.matmul(x, &params[self.wv])?;

        let edge_w = match edge_weights {
            Some(w) => {
                if w.shape() != (edges.weight.len(), 1) {
                    return Err(Error::shape(
                        "graph_transformer",
                        format!(
                            "edge weight column {:?}, expected {}x1",
                            w.shape(),
                            edges.weight.len()
                        ),
                    ));
                }
                w.clone()
            }
            None => Var::constant(
                Mat::from_shape_vec((edges.weight.len(), 1), edges.weight.clone())
                    .expect("weight column"),
            ),
        };

        let mut head_outputs = Vec::with_capacity(self.heads);
        for h in 0..self.heads {
            let (lo, hi) = (h * head_dim, (h + 1) * head_dim);
            let qh = tape.slice_cols(&q, lo, hi)?;
            let kh = tape.slice_cols(&k, lo, hi)?;
            let vh = tape.slice_cols(&v, lo, hi)?;

            let q_dst = tape.gather_rows(&qh, &edges.dst)?;
            let k_src = tape.gather_rows(&kh, &edges.src)?;
            let logits = tape.scale(&tape.row_sum(&tape.mul(&q_dst, &k_src)?)?, scale)?;
            let alpha = tape.segment_softmax(&logits, &edges.offsets)?;
            let alpha = tape.dropout(&alpha, self.dropout, phase == Phase::Train, rng)?;
            let alpha = tape.mul(&alpha, &edge_w)?;

            let v_src = tape.gather_rows(&vh, &edges.src)?;
            let messages = tape.scale_rows(&v_src, &alpha)?;
            head_outputs.push(tape.scatter_add_rows(&messages, &edges.dst, n)?);
        }

        let mut concat = head_outputs[0].clone();
        for h in &head_outputs[1..] {
            concat = tape.concat_cols(&concat, h)?;
        }
        let projected = tape.matmul(&concat, &params[self.wo])?;
        let normed = self.norm.forward(tape, params, &projected)?;
        tape.relu(&normed)
    }

    /// Attention coefficients per head, before dropout and edge weighting.
    /// Returned as `(offsets, per-head columns)`; used by tests.
    pub fn attention(
        &self,
        params: &[Var],
        x: &Var,
        nb: &Neighborhood,
    ) -> Result<(Vec<usize>, Vec<Mat>)> {
        let tape = Tape::new();
        let edges = EdgeList::build(nb, true);
        let head_dim = self.hidden / self.heads;
        let scale = 1.0 / (head_dim as f64).sqrt();
        let q = tape.matmul(x, &params[self.wq])?;
        let k = tape.matmul(x, &params[self.wk])?;
        let mut out = Vec::with_capacity(self.heads);
        for h in 0..self.heads {
            let (lo, hi) = (h * head_dim, (h + 1) * head_dim);
            let qh = tape.slice_cols(&q, lo, hi)?;
            let kh = tape.slice_cols(&k, lo, hi)?;
            let q_dst = tape.gather_rows(&qh, &edges.dst)?;
            let k_src = tape.gather_rows(&kh, &edges.src)?;
            let logits = tape.scale(&tape.row_sum(&tape.mul(&q_dst, &k_src)?)?, scale)?;
            let alpha = tape.segment_softmax(&logits, &edges.offsets)?;
            out.push(alpha.value().clone());
        }
        Ok((edges.offsets, out))
    }
}
