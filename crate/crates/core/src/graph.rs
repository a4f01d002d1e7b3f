//! Graph containers: weighted graphs, bipartite LR/HR graphs, permutations,
//! TopK pooling, and the plain-text matrix file format.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array2, Axis};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-9;
const DIAG_TOL: f64 = 1e-12;

/// Dense symmetric weighted graph with entries in `[0, 1]` and zero diagonal.
///
/// Optional node features are an `n x d` matrix; `d = 0` is allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    adjacency: Array2<f64>,
    features: Array2<f64>,
}

impl WeightedGraph {
    /// Build from an adjacency matrix, enforcing the invariants.
    ///
    /// The matrix must be square, symmetric within `1e-9`, with entries in
    /// `[0, 1]` and diagonal magnitude below `1e-12`. The stored adjacency is
    /// exactly symmetric (lower triangle copied from upper) with a zero diagonal.
    pub fn new(adjacency: Array2<f64>, features: Option<Array2<f64>>) -> Result<Self> {
        let n = adjacency.nrows();
        if adjacency.ncols() != n {
            return Err(Error::shape(
                "WeightedGraph::new",
                format!("adjacency is {}x{}, expected square", n, adjacency.ncols()),
            ));
        }
        let mut a = adjacency;
        for i in 0..n {
            if a[[i, i]].abs() > DIAG_TOL {
                return Err(Error::invalid(format!(
                    "nonzero diagonal at ({i}, {i}): {}",
                    a[[i, i]]
                )));
            }
            a[[i, i]] = 0.0;
            for j in (i + 1)..n {
                let (u, l) = (a[[i, j]], a[[j, i]]);
                if (u - l).abs() > SYMMETRY_TOL {
                    return Err(Error::Asymmetric {
                        row: i,
                        col: j,
                        lhs: u,
                        rhs: l,
                    });
                }
                if !(0.0..=1.0).contains(&u) || !u.is_finite() {
                    return Err(Error::invalid(format!(
                        "adjacency entry ({i}, {j}) = {u} outside [0, 1]"
                    )));
                }
                a[[j, i]] = u;
            }
        }
        let features = match features {
            Some(x) => {
                if x.nrows() != n {
                    return Err(Error::shape(
                        "WeightedGraph::new",
                        format!("features have {} rows for {} nodes", x.nrows(), n),
                    ));
                }
                x
            }
            None => Array2::zeros((n, 0)),
        };
        Ok(WeightedGraph {
            n,
            adjacency: a,
            features,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &Array2<f64> {
        &self.adjacency
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn feature_dim(&self) -> usize {
        self.features.ncols()
    }

    /// Neighbor lists under the edge-presence threshold `1e-12`.
    pub fn neighbor_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.adjacency[[i, j]] > 1e-12 {
                    out[i].push(j);
                }
            }
        }
        out
    }

    /// Replace node features (row count must match).
    pub fn with_features(mut self, features: Array2<f64>) -> Result<Self> {
        if features.nrows() != self.n {
            return Err(Error::shape(
                "WeightedGraph::with_features",
                format!("{} rows for {} nodes", features.nrows(), self.n),
            ));
        }
        self.features = features;
        Ok(self)
    }
}

/// Fully connected bipartite graph between `n_l` LR nodes and `n_h` HR nodes.
///
/// The adjacency is implicit: zero diagonal blocks, all-ones off-diagonal
/// blocks. Stacked features are `[features_l; features_h]`.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    pub n_l: usize,
    pub n_h: usize,
    pub features_l: Array2<f64>,
    pub features_h: Array2<f64>,
}

impl BipartiteGraph {
    pub fn cross_edge_count(&self) -> usize {
        self.n_l * self.n_h
    }

    /// Stacked feature matrix, LR rows first.
    pub fn stacked_features(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.n_l + self.n_h, self.features_l.ncols()));
        out.slice_mut(ndarray::s![..self.n_l, ..])
            .assign(&self.features_l);
        out.slice_mut(ndarray::s![self.n_l.., ..])
            .assign(&self.features_h);
        out
    }

    /// Dense block adjacency (used by test oracles; message passing works on
    /// neighbor lists).
    pub fn dense_adjacency(&self) -> Array2<f64> {
        let n = self.n_l + self.n_h;
        let mut a = Array2::zeros((n, n));
        for i in 0..self.n_l {
            for j in 0..self.n_h {
                a[[i, self.n_l + j]] = 1.0;
                a[[self.n_l + j, i]] = 1.0;
            }
        }
        a
    }

    /// Neighbor lists: each LR node is adjacent to every HR node and vice versa.
    pub fn neighbor_lists(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.n_l + self.n_h);
        for _ in 0..self.n_l {
            out.push((self.n_l..self.n_l + self.n_h).collect());
        }
        for _ in 0..self.n_h {
            out.push((0..self.n_l).collect());
        }
        out
    }
}

/// Build the fully connected bipartite graph between LR and HR node sets.
pub fn build_bipartite(
    lr_features: &Array2<f64>,
    hr_features: &Array2<f64>,
) -> Result<BipartiteGraph> {
    if lr_features.ncols() != hr_features.ncols() {
        return Err(Error::shape(
            "build_bipartite",
            format!(
                "LR feature width {} != HR feature width {}",
                lr_features.ncols(),
                hr_features.ncols()
            ),
        ));
    }
    Ok(BipartiteGraph {
        n_l: lr_features.nrows(),
        n_h: hr_features.nrows(),
        features_l: lr_features.clone(),
        features_h: hr_features.clone(),
    })
}

/// A bijection on `{0..n-1}`. `mapping[i]` is the new position of node `i`,
/// i.e. applying the permutation sends row `i` to row `mapping[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || seen[m] {
                return Err(Error::invalid(format!(
                    "mapping of length {n} is not a permutation"
                )));
            }
            seen[m] = true;
        }
        Ok(Permutation { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            mapping: (0..n).collect(),
        }
    }

    /// Uniformly random permutation (Fisher-Yates).
    pub fn random(n: usize, rng: &mut impl rand::Rng) -> Self {
        let mut mapping: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            mapping.swap(i, j);
        }
        Permutation { mapping }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Permutation { mapping: inv }
    }

    /// `P X`: row `i` of the input lands at row `mapping[i]` of the output.
    pub fn apply_rows(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.nrows() != self.mapping.len() {
            return Err(Error::shape(
                "Permutation::apply_rows",
                format!("{} rows vs permutation length {}", x.nrows(), self.mapping.len()),
            ));
        }
        let mut out = Array2::zeros(x.raw_dim());
        for (i, &m) in self.mapping.iter().enumerate() {
            out.row_mut(m).assign(&x.row(i));
        }
        Ok(out)
    }

    /// `P A P^T`.
    pub fn conjugate(&self, a: &Array2<f64>) -> Result<Array2<f64>> {
        let n = self.mapping.len();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::shape(
                "Permutation::conjugate",
                format!("{}x{} matrix vs permutation length {}", a.nrows(), a.ncols(), n),
            ));
        }
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                out[[self.mapping[i], self.mapping[j]]] = a[[i, j]];
            }
        }
        Ok(out)
    }
}

/// Relabel the nodes of a graph: adjacency becomes `P A P^T`, features `P X`.
pub fn permute_graph(g: &WeightedGraph, p: &Permutation) -> Result<WeightedGraph> {
    if p.len() != g.n() {
        return Err(Error::shape(
            "permute_graph",
            format!("permutation length {} vs {} nodes", p.len(), g.n()),
        ));
    }
    let adjacency = p.conjugate(g.adjacency())?;
    let features = if g.feature_dim() > 0 {
        Some(p.apply_rows(g.features())?)
    } else {
        None
    };
    WeightedGraph::new(adjacency, features)
}

/// Keep the `k` highest-scoring nodes and their induced subgraph.
///
/// Ties break toward the lower node index. Returns the induced subgraph and
/// the retained original indices in descending-score order; subgraph node `r`
/// corresponds to original node `indices[r]`.
pub fn topk_pool(
    g: &WeightedGraph,
    score: &[f64],
    k: usize,
) -> Result<(WeightedGraph, Vec<usize>)> {
    let n = g.n();
    if score.len() != n {
        return Err(Error::shape(
            "topk_pool",
            format!("score length {} vs {} nodes", score.len(), n),
        ));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} out of range 1..={n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        score[b]
            .partial_cmp(&score[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let indices: Vec<usize> = order[..k].to_vec();

    let mut adj = Array2::zeros((k, k));
    for (r, &i) in indices.iter().enumerate() {
        for (c, &j) in indices.iter().enumerate() {
            adj[[r, c]] = g.adjacency()[[i, j]];
        }
    }
    let features = if g.feature_dim() > 0 {
        let rows: Vec<_> = indices.iter().map(|&i| g.features().row(i)).collect();
        Some(ndarray::stack(Axis(0), &rows).expect("row stack"))
    } else {
        None
    };
    Ok((WeightedGraph::new(adj, features)?, indices))
}

/// Write a matrix as plain text: one row per line, space-separated decimals.
pub fn write_matrix(path: &Path, m: &Array2<f64>) -> Result<()> {
    let mut text = String::new();
    for row in m.rows() {
        let mut first = true;
        for v in row {
            if !first {
                text.push(' ');
            }
            write!(text, "{v:.17e}").expect("string write");
            first = false;
        }
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Read a plain-text matrix file.
pub fn read_matrix(path: &Path) -> Result<Array2<f64>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split_whitespace().map(str::parse::<f64>).collect();
        let row = row.map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            detail: e.to_string(),
        })?;
        if let Some(prev) = rows.first() {
            if row.len() != prev.len() {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: lineno + 1,
                    detail: format!("row has {} entries, expected {}", row.len(), prev.len()),
                });
            }
        }
        rows.push(row);
    }
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((nrows, ncols), flat)
        .map_err(|e| Error::invalid(format!("bad matrix shape in {}: {e}", path.display())))
}

/// Load a graph adjacency file, validating symmetry within `1e-9` and
/// clamping diagonal entries with magnitude below `1e-12` to zero.
pub fn load_graph_matrix(path: &Path) -> Result<WeightedGraph> {
    let m = read_matrix(path)?;
    WeightedGraph::new(m, None)
}
