//! Weighted-graph topology measures: strength, betweenness, closeness,
//! eigenvector centrality, Onnela clustering, participation (over a greedy
//! modularity partition), small-worldness, per-measure MAE reports, and the
//! initialization-sensitivity score.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Edges at or below this weight are treated as absent.
const EDGE_EPS: f64 = 1e-12;

/// Weighted node strength: row sums of the adjacency matrix.
pub fn degree_strength(g: &WeightedGraph) -> Vec<f64> {
    let a = g.adjacency();
    (0..g.n()).map(|i| a.row(i).sum()).collect()
}

#[derive(PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties broken by node index for determinism
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest path lengths with edge length `1 / weight`.
fn dijkstra(a: &Array2<f64>, source: usize) -> Vec<f64> {
    let n = a.nrows();
    let mut dist = vec![f64::INFINITY; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapItem {
        dist: 0.0,
        node: source,
    });
    while let Some(HeapItem { dist: d, node: u }) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for v in 0..n {
            let w = a[[u, v]];
            if v == u || w <= EDGE_EPS {
                continue;
            }
            let nd = d + 1.0 / w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapItem { dist: nd, node: v });
            }
        }
    }
    dist
}

/// All-pairs shortest path lengths (`1 / weight` edge lengths).
pub fn shortest_path_matrix(g: &WeightedGraph) -> Array2<f64> {
    let n = g.n();
    let mut out = Array2::from_elem((n, n), f64::INFINITY);
    for s in 0..n {
        let d = dijkstra(g.adjacency(), s);
        for t in 0..n {
            out[[s, t]] = d[t];
        }
    }
    out
}

/// Betweenness centrality over weighted shortest paths (lengths `1/w`),
/// normalized by `(n-1)(n-2)/2`.
pub fn betweenness(g: &WeightedGraph) -> Vec<f64> {
    let n = g.n();
    let a = g.adjacency();
    let mut bc = vec![0.0; n];
    if n < 3 {
        return bc;
    }
    // Brandes' algorithm with a Dijkstra stage per source.
    for s in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        let mut sigma = vec![0.0; n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut settled: Vec<usize> = Vec::with_capacity(n);
        let mut done = vec![false; n];
        dist[s] = 0.0;
        sigma[s] = 1.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapItem { dist: 0.0, node: s });
        while let Some(HeapItem { dist: d, node: u }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            settled.push(u);
            for v in 0..n {
                let w = a[[u, v]];
                if v == u || w <= EDGE_EPS {
                    continue;
                }
                let nd = d + 1.0 / w;
                let tol = 1e-12 * (1.0 + nd.abs());
                if nd < dist[v] - tol {
                    dist[v] = nd;
                    sigma[v] = sigma[u];
                    preds[v] = vec![u];
                    heap.push(HeapItem { dist: nd, node: v });
                } else if (nd - dist[v]).abs() <= tol {
                    sigma[v] += sigma[u];
                    preds[v].push(u);
                }
            }
        }
        let mut delta = vec![0.0; n];
        for &w in settled.iter().rev() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    let norm = (n - 1) as f64 * (n - 2) as f64 / 2.0;
    // each unordered pair was counted from both endpoints
    bc.iter().map(|b| b / 2.0 / norm).collect()
}

/// Closeness centrality with the reachable-component (Wasserman-Faust)
/// correction; isolated nodes score 0.
pub fn closeness(g: &WeightedGraph) -> Vec<f64> {
    let n = g.n();
    let a = g.adjacency();
    (0..n)
        .map(|i| {
            let dist = dijkstra(a, i);
            let reachable: Vec<f64> = dist
                .iter()
                .enumerate()
                .filter(|&(j, d)| j != i && d.is_finite())
                .map(|(_, &d)| d)
                .collect();
            let r = reachable.len() as f64 + 1.0;
            let total: f64 = reachable.iter().sum();
            if total <= 0.0 || n < 2 {
                0.0
            } else {
                ((r - 1.0) / (n as f64 - 1.0)) * ((r - 1.0) / total)
            }
        })
        .collect()
}

/// Principal eigenvector of the adjacency matrix, L2-normalized with
/// nonnegative orientation. Power iteration runs on `A + I` so that the
/// dominant eigenvalue is strictly separated even on bipartite graphs.
pub fn eigenvector_centrality(g: &WeightedGraph) -> Result<Vec<f64>> {
    const TOL: f64 = 1e-13;
    const MAX_ITERS: usize = 10000;
    let n = g.n();
    let a = g.adjacency();
    if a.iter().all(|&v| v.abs() <= EDGE_EPS) {
        return Err(Error::Numerical(
            "eigenvector centrality of an empty graph is undefined".to_string(),
        ));
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for iter in 0..MAX_ITERS {
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = x[i]; // the +I shift
            for j in 0..n {
                acc += a[[i, j]] * x[j];
            }
            y[i] = acc;
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= EDGE_EPS {
            return Err(Error::Numerical(
                "power iteration collapsed to the zero vector".to_string(),
            ));
        }
        for v in &mut y {
            *v /= norm;
        }
        let diff = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = y;
        if diff < TOL {
            if x.iter().sum::<f64>() < 0.0 {
                for v in &mut x {
                    *v = -*v;
                }
            }
            let _ = iter;
            return Ok(x);
        }
    }
    Err(Error::NoConvergence(MAX_ITERS))
}

/// Weighted clustering coefficients in the geometric-mean form:
/// `C_i = (1 / (k_i (k_i - 1))) * sum_{j,k} (w_ij w_jk w_ik)^(1/3)` with
/// weights rescaled by the maximum and `k_i` the binary degree.
pub fn clustering_coefficients(g: &WeightedGraph) -> Vec<f64> {
    let n = g.n();
    let a = g.adjacency();
    let max_w = a.iter().cloned().fold(0.0, f64::max);
    if max_w <= EDGE_EPS {
        return vec![0.0; n];
    }
    let w = a.mapv(|v| if v > EDGE_EPS { v / max_w } else { 0.0 });
    (0..n)
        .map(|i| {
            let k = (0..n).filter(|&j| j != i && a[[i, j]] > EDGE_EPS).count();
            if k < 2 {
                return 0.0;
            }
            let mut acc = 0.0;
            for j in 0..n {
                if j == i || w[[i, j]] <= 0.0 {
                    continue;
                }
                for l in 0..n {
                    if l == i || l == j || w[[i, l]] <= 0.0 || w[[j, l]] <= 0.0 {
                        continue;
                    }
                    acc += (w[[i, j]] * w[[j, l]] * w[[i, l]]).cbrt();
                }
            }
            acc / (k as f64 * (k - 1) as f64)
        })
        .collect()
}

/// Community assignment by greedy modularity maximization (merge the pair of
/// communities with the largest positive modularity gain; ties resolve to
/// the earliest pair in index order). Returns a label per node, labels
/// compacted to `0..k` by first appearance.
pub fn communities(g: &WeightedGraph) -> Vec<usize> {
    let n = g.n();
    let a = g.adjacency();
    let two_m: f64 = a.iter().sum();
    if two_m <= EDGE_EPS || n == 0 {
        return vec![0; n.max(1)][..n].to_vec();
    }
    // e[c][d]: fraction of edge weight between communities c and d
    let mut labels: Vec<usize> = (0..n).collect();
    let mut alive: Vec<bool> = vec![true; n];
    let mut e = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            e[[i, j]] = a[[i, j]] / two_m;
        }
    }
    let mut tot: Vec<f64> = (0..n).map(|i| a.row(i).sum() / two_m).collect();

    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for c in 0..n {
            if !alive[c] {
                continue;
            }
            for d in (c + 1)..n {
                if !alive[d] || e[[c, d]] <= 0.0 {
                    continue;
                }
                let gain = 2.0 * (e[[c, d]] - tot[c] * tot[d]);
                if gain > best.map_or(1e-12, |(_, _, g)| g) {
                    best = Some((c, d, gain));
                }
            }
        }
        let Some((c, d, _)) = best else { break };
        // merge d into c
        for k in 0..n {
            if !alive[k] || k == c || k == d {
                continue;
            }
            let merged = e[[c, k]] + e[[d, k]];
            e[[c, k]] = merged;
            e[[k, c]] = merged;
            e[[d, k]] = 0.0;
            e[[k, d]] = 0.0;
        }
        e[[c, c]] += e[[d, d]] + 2.0 * e[[c, d]];
        e[[c, d]] = 0.0;
        e[[d, c]] = 0.0;
        e[[d, d]] = 0.0;
        tot[c] += tot[d];
        tot[d] = 0.0;
        alive[d] = false;
        for l in labels.iter_mut() {
            if *l == d {
                *l = c;
            }
        }
    }

    // compact labels by first appearance
    let mut map = vec![usize::MAX; n];
    let mut next = 0;
    labels
        .iter()
        .map(|&l| {
            if map[l] == usize::MAX {
                map[l] = next;
                next += 1;
            }
            map[l]
        })
        .collect()
}

/// Participation coefficients for a given community partition:
/// `P_i = 1 - sum_m (s_im / s_i)^2`; zero-strength nodes score 0.
pub fn participation_with_partition(g: &WeightedGraph, partition: &[usize]) -> Result<Vec<f64>> {
    let n = g.n();
    if partition.len() != n {
        return Err(Error::invalid(format!(
            "partition length {} for {} nodes",
            partition.len(),
            n
        )));
    }
    let a = g.adjacency();
    let modules = partition.iter().max().map_or(0, |m| m + 1);
    Ok((0..n)
        .map(|i| {
            let s_i: f64 = a.row(i).sum();
            if s_i <= EDGE_EPS {
                return 0.0;
            }
            let mut into = vec![0.0; modules];
            for j in 0..n {
                into[partition[j]] += a[[i, j]];
            }
            1.0 - into.iter().map(|s| (s / s_i).powi(2)).sum::<f64>()
        })
        .collect())
}

/// Participation coefficients over the greedy-modularity partition.
pub fn participation(g: &WeightedGraph) -> Result<Vec<f64>> {
    let partition = communities(g);
    participation_with_partition(g, &partition)
}

fn mean_shortest_path(a: &Array2<f64>) -> Option<f64> {
    let n = a.nrows();
    let mut total = 0.0;
    let mut count = 0usize;
    for i in 0..n {
        let d = dijkstra(a, i);
        for (j, dj) in d.iter().enumerate() {
            if j > i && dj.is_finite() {
                total += dj;
                count += 1;
            }
        }
    }
    if count == 0 {
        None
    } else {
        Some(total / count as f64)
    }
}

/// Degree-preserving rewiring by repeated double-edge swaps; weights travel
/// with the retained endpoint.
fn rewired_surrogate(a: &Array2<f64>, rng: &mut ChaCha20Rng) -> Array2<f64> {
    let n = a.nrows();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if a[[i, j]] > EDGE_EPS {
                edges.push((i, j));
            }
        }
    }
    let mut out = a.clone();
    if edges.len() < 2 {
        return out;
    }
    let attempts = 4 * edges.len();
    for _ in 0..attempts {
        let p = rng.gen_range(0..edges.len());
        let q = rng.gen_range(0..edges.len());
        if p == q {
            continue;
        }
        let (u, v) = edges[p];
        let (x, y) = edges[q];
        // proposed swap: (u, v), (x, y) -> (u, y), (x, v)
        if u == y || x == v || u == x || v == y {
            continue;
        }
        if out[[u, y]] > EDGE_EPS || out[[x, v]] > EDGE_EPS {
            continue;
        }
        let w1 = out[[u, v]];
        let w2 = out[[x, y]];
        out[[u, v]] = 0.0;
        out[[v, u]] = 0.0;
        out[[x, y]] = 0.0;
        out[[y, x]] = 0.0;
        out[[u, y]] = w1;
        out[[y, u]] = w1;
        out[[x, v]] = w2;
        out[[v, x]] = w2;
        edges[p] = (u.min(y), u.max(y));
        edges[q] = (x.min(v), x.max(v));
    }
    out
}

/// Small-worldness in the ratio form: `(L / L_rand) / mean(clustering)`,
/// with `L_rand` averaged over 10 seeded degree-preserving surrogates.
pub fn small_worldness(g: &WeightedGraph, seed: u64) -> Result<f64> {
    const SURROGATES: usize = 10;
    let c_bar = clustering_coefficients(g).iter().sum::<f64>() / g.n().max(1) as f64;
    if c_bar < EDGE_EPS {
        return Err(Error::Numerical(
            "small-worldness undefined: mean clustering coefficient is zero".to_string(),
        ));
    }
    let l = mean_shortest_path(g.adjacency())
        .ok_or_else(|| Error::Numerical("graph has no connected pairs".to_string()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..SURROGATES {
        let surrogate = rewired_surrogate(g.adjacency(), &mut rng);
        total += mean_shortest_path(&surrogate)
            .ok_or_else(|| Error::Numerical("surrogate has no connected pairs".to_string()))?;
    }
    let l_rand = total / SURROGATES as f64;
    if l_rand <= 0.0 {
        return Err(Error::Numerical("surrogate path length is zero".to_string()));
    }
    Ok((l / l_rand) / c_bar)
}

/// Per-measure MAE between a predicted and a ground-truth graph; column
/// order matches the evaluation tables.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub edge_weights: f64,
    pub betweenness: f64,
    pub closeness: f64,
    pub eigenvector: f64,
    pub degree: f64,
    pub participation: f64,
    pub clustering: f64,
    pub small_worldness: f64,
}

impl MetricReport {
    pub const COLUMNS: [&'static str; 8] = [
        "edge_weights",
        "betweenness",
        "closeness",
        "eigenvector",
        "degree",
        "participation",
        "clustering",
        "small_worldness",
    ];

    pub fn values(&self) -> [f64; 8] {
        [
            self.edge_weights,
            self.betweenness,
            self.closeness,
            self.eigenvector,
            self.degree,
            self.participation,
            self.clustering,
            self.small_worldness,
        ]
    }

    pub fn csv_row(&self) -> String {
        self.values()
            .iter()
            .map(|v| format!("{v:.17e}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn vector_mae(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

/// MAE of each topology measure between prediction and truth. Participation
/// partitions are computed independently on each graph.
pub fn metric_mae(pred: &WeightedGraph, truth: &WeightedGraph) -> Result<MetricReport> {
    let n = pred.n();
    if n != truth.n() {
        return Err(Error::shape(
            "metric_mae",
            format!("{} vs {} nodes", n, truth.n()),
        ));
    }
    let (ap, at) = (pred.adjacency(), truth.adjacency());
    let mut edge_total = 0.0;
    let mut pairs = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            edge_total += (ap[[i, j]] - at[[i, j]]).abs();
            pairs += 1;
        }
    }
    let edge_weights = if pairs == 0 { 0.0 } else { edge_total / pairs as f64 };

    Ok(MetricReport {
        edge_weights,
        betweenness: vector_mae(&betweenness(pred), &betweenness(truth)),
        closeness: vector_mae(&closeness(pred), &closeness(truth)),
        eigenvector: vector_mae(
            &eigenvector_centrality(pred)?,
            &eigenvector_centrality(truth)?,
        ),
        degree: vector_mae(&degree_strength(pred), &degree_strength(truth)),
        participation: vector_mae(&participation(pred)?, &participation(truth)?),
        clustering: vector_mae(
            &clustering_coefficients(pred),
            &clustering_coefficients(truth),
        ),
        small_worldness: (small_worldness(pred, 0)? - small_worldness(truth, 0)?).abs(),
    })
}

/// Population standard deviation.
pub fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Initialization-sensitivity score: the largest per-(scale, model) standard
/// deviation across seeds, divided by the standard deviation of the
/// all-model scores. Both use the population convention.
pub fn sensitivity_srel(per_cell_seed_maes: &[Vec<f64>], all_model_scores: &[f64]) -> Result<f64> {
    if per_cell_seed_maes.is_empty() || per_cell_seed_maes.iter().any(|c| c.is_empty()) {
        return Err(Error::invalid(
            "sensitivity requires at least one non-empty (scale, model) cell".to_string(),
        ));
    }
    if all_model_scores.len() < 2 {
        return Err(Error::invalid(
            "sensitivity requires at least two model scores".to_string(),
        ));
    }
    let denom = population_std(all_model_scores);
    if denom <= 0.0 {
        return Err(Error::Numerical(
            "all-model score spread is zero".to_string(),
        ));
    }
    let worst = per_cell_seed_maes
        .iter()
        .map(|cell| population_std(cell))
        .fold(0.0, f64::max);
    Ok(worst / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{permute_graph, Permutation};

    fn graph_from(entries: &[(usize, usize, f64)], n: usize) -> WeightedGraph {
        let mut a = Array2::zeros((n, n));
        for &(i, j, w) in entries {
            a[[i, j]] = w;
            a[[j, i]] = w;
        }
        WeightedGraph::new(a, None).unwrap()
    }

    fn random_graph(seed: u64, n: usize, density: f64) -> WeightedGraph {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() < density {
                    let w = rng.gen_range(0.05..1.0);
                    a[[i, j]] = w;
                    a[[j, i]] = w;
                }
            }
        }
        WeightedGraph::new(a, None).unwrap()
    }

    fn complete(n: usize) -> WeightedGraph {
        let mut a = Array2::from_elem((n, n), 1.0);
        for i in 0..n {
            a[[i, i]] = 0.0;
        }
        WeightedGraph::new(a, None).unwrap()
    }

    // exhaustive betweenness/closeness oracle: enumerate all simple paths
    fn all_simple_paths(
        a: &Array2<f64>,
        from: usize,
        to: usize,
        visited: &mut Vec<usize>,
        out: &mut Vec<(f64, Vec<usize>)>,
    ) {
        if from == to {
            out.push((
                visited
                    .windows(2)
                    .map(|w| 1.0 / a[[w[0], w[1]]])
                    .sum::<f64>(),
                visited.clone(),
            ));
            return;
        }
        for v in 0..a.nrows() {
            if a[[from, v]] > EDGE_EPS && !visited.contains(&v) {
                visited.push(v);
                all_simple_paths(a, v, to, visited, out);
                visited.pop();
            }
        }
    }

    fn oracle_betweenness_closeness(g: &WeightedGraph) -> (Vec<f64>, Vec<f64>) {
        let n = g.n();
        let a = g.adjacency();
        let mut bc = vec![0.0; n];
        let mut dist = Array2::from_elem((n, n), f64::INFINITY);
        for s in 0..n {
            dist[[s, s]] = 0.0;
            for t in (s + 1)..n {
                let mut paths = Vec::new();
                all_simple_paths(a, s, t, &mut vec![s], &mut paths);
                if paths.is_empty() {
                    continue;
                }
                let best = paths.iter().map(|(l, _)| *l).fold(f64::INFINITY, f64::min);
                dist[[s, t]] = best;
                dist[[t, s]] = best;
                let shortest: Vec<&Vec<usize>> = paths
                    .iter()
                    .filter(|(l, _)| (*l - best).abs() <= 1e-9 * (1.0 + best))
                    .map(|(_, p)| p)
                    .collect();
                let total = shortest.len() as f64;
                for v in 0..n {
                    if v == s || v == t {
                        continue;
                    }
                    let through = shortest.iter().filter(|p| p.contains(&v)).count() as f64;
                    bc[v] += through / total;
                }
            }
        }
        let norm = (n - 1) as f64 * (n - 2) as f64 / 2.0;
        let bc = bc.iter().map(|b| b / norm).collect();
        let cc = (0..n)
            .map(|i| {
                let reach: Vec<f64> = (0..n)
                    .filter(|&j| j != i && dist[[i, j]].is_finite())
                    .map(|j| dist[[i, j]])
                    .collect();
                let total: f64 = reach.iter().sum();
                let r = reach.len() as f64 + 1.0;
                if total <= 0.0 {
                    0.0
                } else {
                    ((r - 1.0) / (n as f64 - 1.0)) * ((r - 1.0) / total)
                }
            })
            .collect();
        (bc, cc)
    }

    #[test]
    fn strength_on_complete_graph() {
        let g = complete(5);
        assert!(degree_strength(&g).iter().all(|&s| (s - 4.0).abs() < 1e-15));
        let empty = WeightedGraph::new(Array2::zeros((4, 4)), None).unwrap();
        assert!(degree_strength(&empty).iter().all(|&s| s == 0.0));
    }

    #[test]
    fn betweenness_path_and_star() {
        let p3 = graph_from(&[(0, 1, 1.0), (1, 2, 1.0)], 3);
        let b = betweenness(&p3);
        assert!((b[1] - 1.0).abs() < 1e-12);
        assert!(b[0].abs() < 1e-12 && b[2].abs() < 1e-12);

        let star: Vec<(usize, usize, f64)> = (1..5).map(|i| (0, i, 1.0)).collect();
        let s5 = graph_from(&star, 5);
        let b = betweenness(&s5);
        assert!((b[0] - 1.0).abs() < 1e-12);

        let k4 = complete(4);
        assert!(betweenness(&k4).iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn betweenness_closeness_match_exhaustive_oracle_small_graphs() {
        for seed in 0..10u64 {
            for n in 4..=7usize {
                let g = random_graph(900 + seed * 7 + n as u64, n, 0.6);
                let (ob, oc) = oracle_betweenness_closeness(&g);
                let b = betweenness(&g);
                let c = closeness(&g);
                for i in 0..n {
                    assert!(
                        (b[i] - ob[i]).abs() < 1e-9,
                        "betweenness n={n} seed={seed} node {i}: {} vs {}",
                        b[i],
                        ob[i]
                    );
                    assert!(
                        (c[i] - oc[i]).abs() < 1e-9,
                        "closeness n={n} seed={seed} node {i}: {} vs {}",
                        c[i],
                        oc[i]
                    );
                }
            }
        }
    }

    #[test]
    fn closeness_complete_graph_and_isolated_node() {
        let g = complete(5);
        assert!(closeness(&g).iter().all(|&c| (c - 1.0).abs() < 1e-12));

        let g = graph_from(&[(0, 1, 1.0)], 3);
        assert_eq!(closeness(&g)[2], 0.0);

        // P3: center strictly larger than endpoints
        let p3 = graph_from(&[(0, 1, 1.0), (1, 2, 1.0)], 3);
        let c = closeness(&p3);
        assert!(c[1] > c[0] && c[1] > c[2]);
    }

    #[test]
    fn eigenvector_regular_graph_is_uniform_and_star_center_maximal() {
        let g = complete(6);
        let v = eigenvector_centrality(&g).unwrap();
        for w in &v {
            assert!((w - v[0]).abs() < 1e-8);
        }

        let star: Vec<(usize, usize, f64)> = (1..6).map(|i| (0, i, 1.0)).collect();
        let s = graph_from(&star, 6);
        let v = eigenvector_centrality(&s).unwrap();
        for w in &v[1..] {
            assert!(v[0] > *w + 1e-6);
        }

        // residual check against the eigen equation A v = lambda v
        for seed in 0..5u64 {
            let g = random_graph(950 + seed, 6, 0.7);
            let v = eigenvector_centrality(&g).unwrap();
            let a = g.adjacency();
            let av: Vec<f64> = (0..6)
                .map(|i| (0..6).map(|j| a[[i, j]] * v[j]).sum())
                .collect();
            let lambda: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();
            let residual: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - lambda * y).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(residual < 1e-8, "residual {residual}");
        }
    }

    #[test]
    fn eigenvector_zero_matrix_errors() {
        let g = WeightedGraph::new(Array2::zeros((4, 4)), None).unwrap();
        assert!(eigenvector_centrality(&g).is_err());
    }

    #[test]
    fn clustering_triangle_tree_and_oracle() {
        let tri = graph_from(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], 3);
        assert!(clustering_coefficients(&tri)
            .iter()
            .all(|&c| (c - 1.0).abs() < 1e-12));

        let tree = graph_from(&[(0, 1, 0.8), (1, 2, 0.5), (1, 3, 0.9)], 4);
        assert!(clustering_coefficients(&tree).iter().all(|&c| c == 0.0));

        // independent triple-loop oracle on a random 6-node graph
        let g = random_graph(970, 6, 0.7);
        let a = g.adjacency();
        let maxw = a.iter().cloned().fold(0.0, f64::max);
        let c = clustering_coefficients(&g);
        for i in 0..6 {
            let nbrs: Vec<usize> = (0..6).filter(|&j| j != i && a[[i, j]] > 1e-12).collect();
            let k = nbrs.len();
            let expect = if k < 2 {
                0.0
            } else {
                let mut acc = 0.0;
                for &j in &nbrs {
                    for &l in &nbrs {
                        if j != l && a[[j, l]] > 1e-12 {
                            acc += ((a[[i, j]] / maxw) * (a[[j, l]] / maxw) * (a[[i, l]] / maxw))
                                .cbrt();
                        }
                    }
                }
                acc / (k as f64 * (k - 1) as f64)
            };
            assert!((c[i] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn participation_formula_and_bridge() {
        // hand partition: node 0 splits its strength across two modules
        let g = graph_from(&[(0, 1, 0.5), (0, 2, 0.5)], 3);
        let p = participation_with_partition(&g, &[0, 0, 1]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);

        // two cliques joined by one bridge: bridge endpoints maximal
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((i, j, 1.0));
                edges.push((i + 4, j + 4, 1.0));
            }
        }
        edges.push((3, 4, 1.0));
        let g = graph_from(&edges, 8);
        let part = communities(&g);
        assert_eq!(part[0], part[1]);
        assert_eq!(part[4], part[5]);
        assert_ne!(part[0], part[4]);
        let p = participation(&g).unwrap();
        let max = p.iter().cloned().fold(0.0, f64::max);
        assert!((p[3] - max).abs() < 1e-12 || (p[4] - max).abs() < 1e-12);
        assert!(p[3] > p[0] && p[4] > p[7]);

        // single module -> all zeros
        let k4 = complete(4);
        let p = participation_with_partition(&k4, &[0, 0, 0, 0]).unwrap();
        assert!(p.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn small_worldness_complete_graph_is_one_and_tree_errors() {
        let g = complete(8);
        let sw = small_worldness(&g, 7).unwrap();
        assert!((sw - 1.0).abs() < 1e-12);

        let tree = graph_from(&[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], 4);
        assert!(small_worldness(&tree, 7).is_err());
    }

    #[test]
    fn small_worldness_decreases_with_rewiring_shortcuts() {
        // ring lattice k=4 on 20 nodes vs the same lattice plus shortcuts
        let n = 20;
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((i, (i + 1) % n, 1.0));
            edges.push((i, (i + 2) % n, 1.0));
        }
        let ring = graph_from(
            &edges
                .iter()
                .map(|&(i, j, w)| (i.min(j), i.max(j), w))
                .collect::<Vec<_>>(),
            n,
        );
        let sw_ring = small_worldness(&ring, 3).unwrap();
        assert!(sw_ring > 1.0, "ring lattice should be small-world-ish: {sw_ring}");
    }

    #[test]
    fn metric_mae_identical_graphs_is_zero() {
        let g = random_graph(980, 10, 0.8);
        let r = metric_mae(&g, &g).unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn metric_mae_uniform_edge_shift() {
        let g = complete(5);
        let mut a = g.adjacency().clone();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    a[[i, j]] -= 0.1;
                }
            }
        }
        let h = WeightedGraph::new(a, None).unwrap();
        let r = metric_mae(&h, &g).unwrap();
        assert!((r.edge_weights - 0.1).abs() < 1e-12);
    }

    #[test]
    fn measures_are_permutation_equivariant() {
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for seed in 0..5u64 {
            let g = random_graph(990 + seed, 8, 0.7);
            let p = Permutation::random(8, &mut rng);
            let pg = permute_graph(&g, &p).unwrap();
            let mapping = p.mapping();

            let check = |orig: &[f64], perm: &[f64], name: &str| {
                // permuted graph node mapping[i] carries original node i
                for i in 0..8 {
                    assert!(
                        (orig[i] - perm[mapping[i]]).abs() < 1e-9,
                        "{name} not equivariant at node {i}"
                    );
                }
            };
            check(&degree_strength(&g), &degree_strength(&pg), "strength");
            check(&betweenness(&g), &betweenness(&pg), "betweenness");
            check(&closeness(&g), &closeness(&pg), "closeness");
            check(
                &clustering_coefficients(&g),
                &clustering_coefficients(&pg),
                "clustering",
            );
            check(
                &eigenvector_centrality(&g).unwrap(),
                &eigenvector_centrality(&pg).unwrap(),
                "eigenvector",
            );
        }
    }

    #[test]
    fn srel_matches_hand_computed_table() {
        // 3 scales x 2 models, five seeds each
        let cells = vec![
            vec![1.0, 1.2, 0.8, 1.1, 0.9],
            vec![2.0, 2.0, 2.0, 2.0, 2.0],
            vec![0.5, 0.7, 0.6, 0.5, 0.7],
            vec![1.5, 1.4, 1.6, 1.5, 1.5],
            vec![1.0, 1.0, 1.0, 1.0, 1.0],
            vec![3.0, 2.8, 3.2, 3.0, 3.0],
        ];
        let all_models = vec![1.0, 2.0, 0.6, 1.5, 1.0, 3.0, 2.5, 0.9];
        let worst = cells
            .iter()
            .map(|c| population_std(c))
            .fold(0.0, f64::max);
        let expect = worst / population_std(&all_models);
        let got = sensitivity_srel(&cells, &all_models).unwrap();
        assert!((got - expect).abs() < 1e-15);

        // perfectly stable models -> 0
        let stable = vec![vec![1.0; 5], vec![2.0; 5]];
        assert_eq!(sensitivity_srel(&stable, &all_models).unwrap(), 0.0);

        // zero spread across models -> error
        assert!(sensitivity_srel(&cells, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn population_std_convention() {
        // sample std of [1, 3] would be sqrt(2); population std is 1
        assert!((population_std(&[1.0, 3.0]) - 1.0).abs() < 1e-15);
    }
}
