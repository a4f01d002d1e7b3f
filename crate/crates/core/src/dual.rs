//! Dual (line) graph of the complete primal graph.
//!
//! Every unordered primal pair `{i, j}` becomes a dual node; two dual nodes
//! are adjacent iff their pairs share an endpoint. The pair -> index map is a
//! bijection, so edge features round-trip exactly between representations.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Dual graph of `K_{n_h}` with per-dual-node scalar features.
///
/// Dual nodes are ordered lexicographically over `(i, j)` with `i < j`. The
/// adjacency is kept as neighbor lists; at `n_h = 39` the dense form would
/// already be over 90% zeros.
#[derive(Debug, Clone)]
pub struct DualGraph {
    primal_n: usize,
    pairs: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    features: Array2<f64>,
}

impl DualGraph {
    pub fn primal_n(&self) -> usize {
        self.primal_n
    }

    /// Number of dual nodes, `n_h (n_h - 1) / 2`.
    pub fn node_count(&self) -> usize {
        self.pairs.len()
    }

    /// Number of dual edges, `n_h (n_h - 1) (n_h - 2) / 2`.
    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn neighbor_lists(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    /// Dual node features, `|V_d| x 1`.
    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    /// Lexicographic index of the pair `{i, j}`, `i != j`.
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        pair_index(self.primal_n, i, j)
    }

    /// Fraction of zero entries in the dense dual adjacency:
    /// `1 - 4 (n_h - 2) / (n_h (n_h - 1))`.
    pub fn sparsity(&self) -> f64 {
        let n = self.primal_n as f64;
        1.0 - 4.0 * (n - 2.0) / (n * (n - 1.0))
    }
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    // offset of row i in the lexicographic enumeration of pairs
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Build the dual of the complete primal graph on `n_h` nodes.
///
/// Dual node `{i, j}` carries the scalar feature `edge_features[i][j]`.
pub fn build_dual(n_h: usize, edge_features: &Array2<f64>) -> Result<DualGraph> {
    if n_h < 2 {
        return Err(Error::invalid(format!("dual graph requires n_h >= 2, got {n_h}")));
    }
    if edge_features.nrows() != n_h || edge_features.ncols() != n_h {
        return Err(Error::shape(
            "build_dual",
            format!(
                "edge features are {}x{}, expected {n_h}x{n_h}",
                edge_features.nrows(),
                edge_features.ncols()
            ),
        ));
    }
    for i in 0..n_h {
        for j in (i + 1)..n_h {
            if (edge_features[[i, j]] - edge_features[[j, i]]).abs() > 1e-9 {
                return Err(Error::Asymmetric {
                    row: i,
                    col: j,
                    lhs: edge_features[[i, j]],
                    rhs: edge_features[[j, i]],
                });
            }
        }
    }

    let v_d = n_h * (n_h - 1) / 2;
    let mut pairs = Vec::with_capacity(v_d);
    let mut features = Array2::zeros((v_d, 1));
    for i in 0..n_h {
        for j in (i + 1)..n_h {
            features[[pairs.len(), 0]] = edge_features[[i, j]];
            pairs.push((i, j));
        }
    }

    // Each dual node {i, j} neighbors every pair sharing i or j.
    let mut neighbors = vec![Vec::with_capacity(2 * n_h.saturating_sub(2)); v_d];
    for (u, &(i, j)) in pairs.iter().enumerate() {
        for k in 0..n_h {
            if k != i && k != j {
                neighbors[u].push(pair_index(n_h, i, k));
                neighbors[u].push(pair_index(n_h, j, k));
            }
        }
        neighbors[u].sort_unstable();
    }

    Ok(DualGraph {
        primal_n: n_h,
        pairs,
        neighbors,
        features,
    })
}

/// Map learned dual node features back to a symmetric primal edge matrix
/// with zero diagonal.
pub fn dual_to_primal(dual: &DualGraph, learned_features: &Array2<f64>) -> Result<Array2<f64>> {
    if learned_features.nrows() != dual.node_count() || learned_features.ncols() != 1 {
        return Err(Error::shape(
            "dual_to_primal",
            format!(
                "features are {}x{}, expected {}x1",
                learned_features.nrows(),
                learned_features.ncols(),
                dual.node_count()
            ),
        ));
    }
    let n = dual.primal_n();
    let mut out = Array2::zeros((n, n));
    for (u, &(i, j)) in dual.pairs().iter().enumerate() {
        out[[i, j]] = learned_features[[u, 0]];
        out[[j, i]] = learned_features[[u, 0]];
    }
    Ok(out)
}
