//! Layer zoo: the MPNN subclass, graph-transformer attention, GraphNorm,
//! feed-forward blocks, edge initialization, and output normalization.

mod edges;
mod mpnn;
mod norm;
mod transformer;

pub use edges::{dot_edge_init, dot_edge_init_var, learned_domain, minmax_normalize, minmax_normalize_var};
pub use mpnn::{mpnn_forward, MpnnLayer, WeightRule};
pub use norm::GraphNorm;
pub use transformer::{GraphTransformerLayer, Phase};

use ndarray::Array2;
use rand_chacha::ChaCha20Rng;

use crate::diff::{Tape, Var};
use crate::error::{Error, Result};
use crate::params::ParamSet;

/// Neighbor lists with optional aligned edge weights.
#[derive(Debug, Clone)]
pub struct Neighborhood {
    lists: Vec<Vec<usize>>,
    weights: Option<Vec<Vec<f64>>>,
}

impl Neighborhood {
    pub fn unweighted(lists: Vec<Vec<usize>>) -> Neighborhood {
        Neighborhood {
            lists,
            weights: None,
        }
    }

    pub fn weighted(lists: Vec<Vec<usize>>, weights: Vec<Vec<f64>>) -> Result<Neighborhood> {
        if lists.len() != weights.len()
            || lists.iter().zip(&weights).any(|(l, w)| l.len() != w.len())
        {
            return Err(Error::invalid(
                "neighbor lists and weights are not aligned".to_string(),
            ));
        }
        Ok(Neighborhood {
            lists,
            weights: Some(weights),
        })
    }

    /// Off-diagonal entries above the edge threshold become weighted edges.
    pub fn from_dense(adjacency: &Array2<f64>) -> Neighborhood {
        let n = adjacency.nrows();
        let mut lists = vec![Vec::new(); n];
        let mut weights = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i != j && adjacency[[i, j]] > 1e-12 {
                    lists[i].push(j);
                    weights[i].push(adjacency[[i, j]]);
                }
            }
        }
        Neighborhood {
            lists,
            weights: Some(weights),
        }
    }

    pub fn node_count(&self) -> usize {
        self.lists.len()
    }

    pub fn lists(&self) -> &[Vec<usize>] {
        &self.lists
    }

    pub fn weight(&self, node: usize, pos: usize) -> f64 {
        match &self.weights {
            Some(w) => w[node][pos],
            None => 1.0,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.lists.len() != n {
            return Err(Error::shape(
                "Neighborhood",
                format!("{} lists for {} nodes", self.lists.len(), n),
            ));
        }
        for (i, l) in self.lists.iter().enumerate() {
            if let Some(&bad) = l.iter().find(|&&j| j >= n) {
                return Err(Error::invalid(format!(
                    "neighbor {bad} of node {i} out of range for {n} nodes"
                )));
            }
        }
        Ok(())
    }
}

/// Stack of affine maps with ReLU between them (linear output).
#[derive(Debug, Clone)]
pub struct FeedForward {
    layers: Vec<(usize, usize)>, // (weight, bias) parameter indices
}

impl FeedForward {
    /// `dims = [in, h1, ..., out]` builds `dims.len() - 1` affine maps.
    pub fn init(
        ps: &mut ParamSet,
        prefix: &str,
        dims: &[usize],
        rng: &mut ChaCha20Rng,
    ) -> FeedForward {
        assert!(dims.len() >= 2, "feed-forward needs at least one affine map");
        let mut layers = Vec::new();
        for (l, w) in dims.windows(2).enumerate() {
            let weight = ps.add_glorot(format!("{prefix}.affine{l}.weight"), w[0], w[1], rng);
            let bias = ps.add_zeros(format!("{prefix}.affine{l}.bias"), 1, w[1]);
            layers.push((weight, bias));
        }
        FeedForward { layers }
    }

    pub fn forward(&self, tape: &Tape, params: &[Var], x: &Var) -> Result<Var> {
        let mut h = x.clone();
        for (l, &(w, b)) in self.layers.iter().enumerate() {
            h = tape.matmul(&h, &params[w])?;
            h = tape.add_rowbcast(&h, &params[b])?;
            if l + 1 < self.layers.len() {
                h = tape.relu(&h)?;
            }
        }
        Ok(h)
    }
}

/// Flattened edge list grouped by destination node, with self-loops optional.
/// Used by attention and message passing to drive gather/scatter ops.
pub(crate) struct EdgeList {
    pub src: Vec<usize>,
    pub dst: Vec<usize>,
    pub weight: Vec<f64>,
    /// CSR offsets into the edge arrays, one segment per destination node.
    pub offsets: Vec<usize>,
}

impl EdgeList {
    pub fn build(nb: &Neighborhood, include_self: bool) -> EdgeList {
        let n = nb.node_count();
        let mut src = Vec::new();
        let mut dst = Vec::new();
        let mut weight = Vec::new();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for i in 0..n {
            if include_self {
                src.push(i);
                dst.push(i);
                weight.push(1.0);
            }
            for (pos, &j) in nb.lists()[i].iter().enumerate() {
                src.push(j);
                dst.push(i);
                weight.push(nb.weight(i, pos));
            }
            offsets.push(src.len());
        }
        EdgeList {
            src,
            dst,
            weight,
            offsets,
        }
    }
}
