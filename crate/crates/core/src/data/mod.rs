//! Dataset factories: SBM/BA/WS topologies, node2vec embeddings, Pearson
//! edge weighting, TopK super-resolution scenarios, interacting-particle
//! systems, connectome-shaped loaders, and the on-disk dataset layout.

use std::path::Path;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{read_matrix, topk_pool, write_matrix, WeightedGraph};
use crate::metrics;

/// Derive a per-sample seed from the run seed (splitmix64 of the pair).
pub fn sample_seed(run_seed: u64, index: usize) -> u64 {
    let mut z = run_seed
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(index as u64 + 1);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("{name} = {p} not a probability")));
    }
    Ok(())
}

/// Stochastic block model on contiguous, (nearly) equal blocks.
pub fn gen_sbm(
    n: usize,
    clusters: usize,
    p_in: f64,
    p_out: f64,
    rng: &mut ChaCha20Rng,
) -> Result<Array2<f64>> {
    if clusters == 0 || clusters > n {
        return Err(Error::invalid(format!(
            "{clusters} clusters out of range for {n} nodes"
        )));
    }
    check_prob("intra-cluster probability", p_in)?;
    check_prob("inter-cluster probability", p_out)?;
    let base = n / clusters;
    let extra = n % clusters;
    let mut block = vec![0usize; n];
    let mut node = 0;
    for c in 0..clusters {
        let size = base + usize::from(c < extra);
        for _ in 0..size {
            block[node] = c;
            node += 1;
        }
    }
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if block[i] == block[j] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                a[[i, j]] = 1.0;
                a[[j, i]] = 1.0;
            }
        }
    }
    Ok(a)
}

/// Barabási-Albert preferential attachment starting from an `m`-clique.
pub fn gen_ba(n: usize, m: usize, rng: &mut ChaCha20Rng) -> Result<Array2<f64>> {
    if m == 0 || m >= n {
        return Err(Error::invalid(format!(
            "edges per node m = {m} out of range for {n} nodes"
        )));
    }
    let mut a: Array2<f64> = Array2::zeros((n, n));
    // repeated-node list: sampling uniformly from it is degree-proportional
    let mut stubs: Vec<usize> = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            a[[i, j]] = 1.0;
            a[[j, i]] = 1.0;
            stubs.push(i);
            stubs.push(j);
        }
    }
    for v in m..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        while chosen.len() < m {
            let u = stubs[rng.gen_range(0..stubs.len())];
            if !chosen.contains(&u) {
                chosen.push(u);
            }
        }
        for &u in &chosen {
            a[[v, u]] = 1.0;
            a[[u, v]] = 1.0;
            stubs.push(v);
            stubs.push(u);
        }
    }
    Ok(a)
}

/// Watts-Strogatz: ring lattice with `k` nearest neighbors (k even),
/// each lattice edge rewired with probability `rewire`.
pub fn gen_ws(n: usize, k: usize, rewire: f64, rng: &mut ChaCha20Rng) -> Result<Array2<f64>> {
    if k == 0 || k % 2 != 0 || k >= n {
        return Err(Error::invalid(format!(
            "neighbor count k = {k} must be even and < n = {n}"
        )));
    }
    check_prob("rewiring probability", rewire)?;
    let mut a: Array2<f64> = Array2::zeros((n, n));
    for i in 0..n {
        for d in 1..=(k / 2) {
            let j = (i + d) % n;
            a[[i, j]] = 1.0;
            a[[j, i]] = 1.0;
        }
    }
    for i in 0..n {
        for d in 1..=(k / 2) {
            let j = (i + d) % n;
            if a[[i, j]] == 0.0 {
                continue; // already rewired away
            }
            if rng.gen::<f64>() < rewire {
                // rewire (i, j) to (i, w) for a uniform non-neighbor w
                let candidates: Vec<usize> = (0..n)
                    .filter(|&w| w != i && a[[i, w]] == 0.0)
                    .collect();
                if let Some(&w) = candidates.as_slice().choose(rng) {
                    a[[i, j]] = 0.0;
                    a[[j, i]] = 0.0;
                    a[[i, w]] = 1.0;
                    a[[w, i]] = 1.0;
                }
            }
        }
    }
    Ok(a)
}

/// Node2vec hyperparameters. `p`/`q` are the return and in-out biases.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Node2VecConfig {
    pub dim: usize,
    pub walk_length: usize,
    pub walks_per_node: usize,
    pub p: f64,
    pub q: f64,
    pub window: usize,
    pub negatives: usize,
    pub lr: f64,
}

impl Node2VecConfig {
    /// Defaults for HR graphs (walk length 51).
    pub fn hr() -> Node2VecConfig {
        Node2VecConfig {
            dim: 8,
            walk_length: 51,
            walks_per_node: 100,
            p: 1.0,
            q: 1.0,
            window: 10,
            negatives: 5,
            lr: 0.025,
        }
    }

    /// Defaults for LR graphs (walk length 26).
    pub fn lr_graph() -> Node2VecConfig {
        Node2VecConfig {
            walk_length: 26,
            ..Node2VecConfig::hr()
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Skip-gram-with-negative-sampling embeddings over biased random walks.
/// Isolated nodes walk in place. One training pass over all walks.
pub fn node2vec_embed(topology: &Array2<f64>, cfg: &Node2VecConfig, seed: u64) -> Array2<f64> {
    let n = topology.nrows();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && topology[[i, j]] > 1e-12)
                .collect()
        })
        .collect();

    let bound = 0.5 / cfg.dim as f64;
    let mut w_in = Array2::from_shape_fn((n, cfg.dim), |_| rng.gen_range(-bound..bound));
    let mut w_out: Array2<f64> = Array2::zeros((n, cfg.dim));

    let mut walk = Vec::with_capacity(cfg.walk_length);
    for start in 0..n {
        for _ in 0..cfg.walks_per_node {
            walk.clear();
            walk.push(start);
            let mut prev: Option<usize> = None;
            while walk.len() < cfg.walk_length {
                let cur = *walk.last().unwrap();
                let nbrs = &neighbors[cur];
                if nbrs.is_empty() {
                    walk.push(cur); // isolated: self-only context
                    continue;
                }
                let next = if (cfg.p - 1.0).abs() < 1e-12 && (cfg.q - 1.0).abs() < 1e-12 {
                    nbrs[rng.gen_range(0..nbrs.len())]
                } else {
                    // biased second-order walk: weight 1/p back to the
                    // previous node, 1 to its neighbors, 1/q elsewhere
                    let weights: Vec<f64> = nbrs
                        .iter()
                        .map(|&x| match prev {
                            Some(pv) if x == pv => 1.0 / cfg.p,
                            Some(pv) if topology[[pv, x]] > 1e-12 => 1.0,
                            Some(_) => 1.0 / cfg.q,
                            None => 1.0,
                        })
                        .collect();
                    let total: f64 = weights.iter().sum();
                    let mut draw = rng.gen::<f64>() * total;
                    let mut pick = nbrs[nbrs.len() - 1];
                    for (x, w) in nbrs.iter().zip(&weights) {
                        if draw < *w {
                            pick = *x;
                            break;
                        }
                        draw -= w;
                    }
                    pick
                };
                prev = Some(cur);
                walk.push(next);
            }

            // skip-gram with negative sampling over the window
            for c in 0..walk.len() {
                let center = walk[c];
                let lo = c.saturating_sub(cfg.window);
                let hi = (c + cfg.window + 1).min(walk.len());
                for t in lo..hi {
                    if t == c {
                        continue;
                    }
                    let context = walk[t];
                    let mut grad_in = vec![0.0; cfg.dim];
                    {
                        let score = (0..cfg.dim)
                            .map(|d| w_in[[center, d]] * w_out[[context, d]])
                            .sum::<f64>();
                        let g = cfg.lr * (sigmoid(score) - 1.0);
                        for d in 0..cfg.dim {
                            grad_in[d] += g * w_out[[context, d]];
                            w_out[[context, d]] -= g * w_in[[center, d]];
                        }
                    }
                    for _ in 0..cfg.negatives {
                        let neg = rng.gen_range(0..n);
                        if neg == context {
                            continue;
                        }
                        let score = (0..cfg.dim)
                            .map(|d| w_in[[center, d]] * w_out[[neg, d]])
                            .sum::<f64>();
                        let g = cfg.lr * sigmoid(score);
                        for d in 0..cfg.dim {
                            grad_in[d] += g * w_out[[neg, d]];
                            w_out[[neg, d]] -= g * w_in[[center, d]];
                        }
                    }
                    for d in 0..cfg.dim {
                        w_in[[center, d]] -= grad_in[d];
                    }
                }
            }
        }
    }
    w_in
}

/// Pearson correlation of node feature rows, mapped to [0, 1] via
/// `(r + 1) / 2`; zero diagonal.
pub fn weight_edges_pearson(features: &Array2<f64>) -> Result<Array2<f64>> {
    let n = features.nrows();
    let d = features.ncols() as f64;
    let means: Vec<f64> = (0..n).map(|i| features.row(i).sum() / d).collect();
    let stds: Vec<f64> = (0..n)
        .map(|i| {
            (features
                .row(i)
                .iter()
                .map(|v| (v - means[i]).powi(2))
                .sum::<f64>()
                / d)
                .sqrt()
        })
        .collect();
    if let Some(i) = stds.iter().position(|&s| s <= 1e-15) {
        return Err(Error::Numerical(format!(
            "node {i} has zero feature variance; Pearson weight undefined"
        )));
    }
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let cov = features
                .row(i)
                .iter()
                .zip(features.row(j).iter())
                .map(|(x, y)| (x - means[i]) * (y - means[j]))
                .sum::<f64>()
                / d;
            let r = (cov / (stds[i] * stds[j])).clamp(-1.0, 1.0);
            let w = (r + 1.0) / 2.0;
            a[[i, j]] = w;
            a[[j, i]] = w;
        }
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SrFamily {
    Sbm,
    Ba,
    Ws,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoolMetric {
    Degree,
    Betweenness,
    Clustering,
    Participation,
}

/// One of the twelve scenario configurations: a topology family paired with
/// the centrality used for TopK pooling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SrScenario {
    pub family: SrFamily,
    pub pool: PoolMetric,
    pub n_h: usize,
    pub n_l: usize,
    pub samples: usize,
}

impl SrScenario {
    /// Parse names like `sbm-degree` or `ws-participation`; sizes default to
    /// 64 / 32 nodes and 128 samples.
    pub fn from_name(name: &str) -> Result<SrScenario> {
        let (fam, pool) = name
            .split_once('-')
            .ok_or_else(|| Error::invalid(format!("scenario {name:?}: expected family-metric")))?;
        let family = match fam {
            "sbm" => SrFamily::Sbm,
            "ba" => SrFamily::Ba,
            "ws" => SrFamily::Ws,
            _ => return Err(Error::invalid(format!("unknown topology family {fam:?}"))),
        };
        let pool = match pool {
            "degree" => PoolMetric::Degree,
            "betweenness" => PoolMetric::Betweenness,
            "clustering" => PoolMetric::Clustering,
            "participation" => PoolMetric::Participation,
            _ => return Err(Error::invalid(format!("unknown pooling metric {pool:?}"))),
        };
        Ok(SrScenario {
            family,
            pool,
            n_h: 64,
            n_l: 32,
            samples: 128,
        })
    }

    pub fn name(&self) -> String {
        let fam = match self.family {
            SrFamily::Sbm => "sbm",
            SrFamily::Ba => "ba",
            SrFamily::Ws => "ws",
        };
        let pool = match self.pool {
            PoolMetric::Degree => "degree",
            PoolMetric::Betweenness => "betweenness",
            PoolMetric::Clustering => "clustering",
            PoolMetric::Participation => "participation",
        };
        format!("{fam}-{pool}")
    }

    /// All twelve family x metric combinations.
    pub fn all_names() -> Vec<String> {
        let mut names = Vec::new();
        for fam in ["sbm", "ba", "ws"] {
            for pool in ["degree", "betweenness", "clustering", "participation"] {
                names.push(format!("{fam}-{pool}"));
            }
        }
        names
    }
}

/// Generator parameters drawn for one sample (recorded in the manifest).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleParams {
    pub index: usize,
    pub seed: u64,
    pub clusters: Option<usize>,
    pub p_in: Option<f64>,
    pub p_out: Option<f64>,
    pub ba_m: Option<usize>,
    pub ws_k: Option<usize>,
    pub ws_rewire: Option<f64>,
}

/// One LR/HR training pair: LR adjacency is the TopK-induced submatrix of
/// the weighted HR adjacency, LR features are re-embedded on the induced
/// topology.
pub fn make_sr_sample(
    scenario: &SrScenario,
    seed: u64,
) -> Result<(WeightedGraph, WeightedGraph, SampleParams)> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut params = SampleParams {
        index: 0,
        seed,
        clusters: None,
        p_in: None,
        p_out: None,
        ba_m: None,
        ws_k: None,
        ws_rewire: None,
    };
    let topo = match scenario.family {
        SrFamily::Sbm => {
            let clusters = rng.gen_range(2..=5);
            let p_in = rng.gen_range(0.50..=0.60);
            let p_out = rng.gen_range(0.01..=0.10);
            params.clusters = Some(clusters);
            params.p_in = Some(p_in);
            params.p_out = Some(p_out);
            gen_sbm(scenario.n_h, clusters, p_in, p_out, &mut rng)?
        }
        SrFamily::Ba => {
            let m = rng.gen_range(4..=8);
            params.ba_m = Some(m);
            gen_ba(scenario.n_h, m, &mut rng)?
        }
        SrFamily::Ws => {
            let k = 2 * rng.gen_range(2..=4); // even in 4..=8
            let rewire = rng.gen_range(0.2..=0.5);
            params.ws_k = Some(k);
            params.ws_rewire = Some(rewire);
            gen_ws(scenario.n_h, k, rewire, &mut rng)?
        }
    };

    let hr_feats = node2vec_embed(&topo, &Node2VecConfig::hr(), rng.gen());
    let hr_adj = weight_edges_pearson(&hr_feats)?;
    let hr = WeightedGraph::new(hr_adj, Some(hr_feats))?;

    let score = match scenario.pool {
        PoolMetric::Degree => metrics::degree_strength(&hr),
        PoolMetric::Betweenness => metrics::betweenness(&hr),
        PoolMetric::Clustering => metrics::clustering_coefficients(&hr),
        PoolMetric::Participation => metrics::participation(&hr)?,
    };
    let (pooled, retained) = topk_pool(&hr, &score, scenario.n_l)?;

    // induced binary topology for the LR embedding walks
    let k = retained.len();
    let mut lr_topo = Array2::zeros((k, k));
    for (r, &i) in retained.iter().enumerate() {
        for (c, &j) in retained.iter().enumerate() {
            lr_topo[[r, c]] = topo[[i, j]];
        }
    }
    let lr_feats = node2vec_embed(&lr_topo, &Node2VecConfig::lr_graph(), rng.gen());
    let lr = pooled.with_features(lr_feats)?;
    Ok((lr, hr, params))
}

/// Manifest written next to the samples of one generated dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub scenario: String,
    pub n_h: usize,
    pub n_l: usize,
    pub run_seed: u64,
    pub samples: Vec<SampleParams>,
}

/// Generate and store a scenario dataset: `sample_<k>_lr.txt` /
/// `sample_<k>_hr.txt` adjacency matrices, `sample_<k>_lrx.txt` LR feature
/// matrices, and `manifest.json`.
pub fn save_dataset(dir: &Path, scenario: &SrScenario, run_seed: u64) -> Result<DatasetManifest> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut manifest = DatasetManifest {
        scenario: scenario.name(),
        n_h: scenario.n_h,
        n_l: scenario.n_l,
        run_seed,
        samples: Vec::with_capacity(scenario.samples),
    };
    for k in 0..scenario.samples {
        let seed = sample_seed(run_seed, k);
        let (lr, hr, mut params) = make_sr_sample(scenario, seed)?;
        params.index = k;
        write_matrix(&dir.join(format!("sample_{k}_lr.txt")), lr.adjacency())?;
        write_matrix(&dir.join(format!("sample_{k}_lrx.txt")), lr.features())?;
        write_matrix(&dir.join(format!("sample_{k}_hr.txt")), hr.adjacency())?;
        manifest.samples.push(params);
    }
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::invalid(format!("manifest serialization failed: {e}")))?;
    std::fs::write(dir.join("manifest.json"), text).map_err(|source| Error::Io {
        path: dir.join("manifest.json").display().to_string(),
        source,
    })?;
    Ok(manifest)
}

/// Load a stored dataset back into (LR, HR) pairs.
pub fn load_dataset(dir: &Path) -> Result<(DatasetManifest, Vec<(WeightedGraph, WeightedGraph)>)> {
    let manifest_path = dir.join("manifest.json");
    let text = std::fs::read_to_string(&manifest_path).map_err(|source| Error::Io {
        path: manifest_path.display().to_string(),
        source,
    })?;
    let manifest: DatasetManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: manifest_path.display().to_string(),
        line: 0,
        detail: e.to_string(),
    })?;
    let mut pairs = Vec::with_capacity(manifest.samples.len());
    for k in 0..manifest.samples.len() {
        let lr_adj = read_matrix(&dir.join(format!("sample_{k}_lr.txt")))?;
        let lr_x = read_matrix(&dir.join(format!("sample_{k}_lrx.txt")))?;
        let hr_adj = read_matrix(&dir.join(format!("sample_{k}_hr.txt")))?;
        pairs.push((
            WeightedGraph::new(lr_adj, Some(lr_x))?,
            WeightedGraph::new(hr_adj, None)?,
        ));
    }
    Ok((manifest, pairs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParticleDataset {
    /// Fixed 4x4 grid topology, random masses.
    D1,
    /// Random geometric topology, uniform mass.
    D2,
    /// Random geometric topology, random masses.
    D3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeFn {
    E1,
    E2,
    E3,
    E4,
    E5,
}

impl ParticleDataset {
    pub fn parse(s: &str) -> Result<ParticleDataset> {
        match s {
            "d1" | "D1" => Ok(ParticleDataset::D1),
            "d2" | "D2" => Ok(ParticleDataset::D2),
            "d3" | "D3" => Ok(ParticleDataset::D3),
            _ => Err(Error::invalid(format!("unknown particle dataset {s:?}"))),
        }
    }
}

impl EdgeFn {
    pub fn parse(s: &str) -> Result<EdgeFn> {
        match s {
            "e1" | "E1" => Ok(EdgeFn::E1),
            "e2" | "E2" => Ok(EdgeFn::E2),
            "e3" | "E3" => Ok(EdgeFn::E3),
            "e4" | "E4" => Ok(EdgeFn::E4),
            "e5" | "E5" => Ok(EdgeFn::E5),
            _ => Err(Error::invalid(format!("unknown edge function {s:?}"))),
        }
    }
}

/// A 16-particle system: 2D positions, masses, symmetric edge set, and the
/// edge value for each (i < j) pair under the chosen function.
#[derive(Debug, Clone)]
pub struct ParticleSystem {
    pub positions: Array2<f64>,
    pub masses: Vec<f64>,
    pub edges: Vec<(usize, usize)>,
    pub values: Vec<f64>,
}

impl ParticleSystem {
    /// Node features as (x, y, m) rows.
    pub fn features(&self) -> Array2<f64> {
        let n = self.masses.len();
        Array2::from_shape_fn((n, 3), |(i, c)| match c {
            0 => self.positions[[i, 0]],
            1 => self.positions[[i, 1]],
            _ => self.masses[i],
        })
    }
}

/// Evaluate an edge function for the ordered pair (i, j).
pub fn edge_value(
    f: EdgeFn,
    xi: f64,
    yi: f64,
    mi: f64,
    xj: f64,
    yj: f64,
    mj: f64,
    g_const: f64,
) -> f64 {
    match f {
        EdgeFn::E1 => g_const * mi * mj / ((xi - xj).powi(2) + (yi - yj).powi(2)),
        EdgeFn::E2 => (10.0 * mi - 7.0 * mj) / (xi * xi + yj * yj),
        EdgeFn::E3 => (xi - xj).powi(2) + (yi - yj).powi(2) + (mi - mj).powi(2),
        EdgeFn::E4 => xi * yi * mi + xj * yj * mj + xi * yj + xj * yi,
        EdgeFn::E5 => xi * xi + yi * yi + mj * mj,
    }
}

/// Generate one particle system. The gravitational constant is 100 on D1
/// and 1 on D2/D3.
pub fn gen_particles(
    dataset: ParticleDataset,
    edge_fn: EdgeFn,
    seed: u64,
) -> Result<ParticleSystem> {
    const N: usize = 16;
    const T: f64 = 0.3;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (positions, edges): (Array2<f64>, Vec<(usize, usize)>) = match dataset {
        ParticleDataset::D1 => {
            // 4x4 grid in the unit square, lattice neighbors connected
            let positions =
                Array2::from_shape_fn((N, 2), |(i, c)| {
                    if c == 0 {
                        (i % 4) as f64 / 3.0
                    } else {
                        (i / 4) as f64 / 3.0
                    }
                });
            let mut edges = Vec::new();
            for r in 0..4 {
                for c in 0..4 {
                    let i = r * 4 + c;
                    if c + 1 < 4 {
                        edges.push((i, i + 1));
                    }
                    if r + 1 < 4 {
                        edges.push((i, i + 4));
                    }
                }
            }
            (positions, edges)
        }
        _ => {
            let positions: Array2<f64> =
                Array2::from_shape_fn((N, 2), |_| rng.gen_range(0.0..1.0));
            let mut edges = Vec::new();
            for i in 0..N {
                for j in (i + 1)..N {
                    let dx = positions[[i, 0]] - positions[[j, 0]];
                    let dy = positions[[i, 1]] - positions[[j, 1]];
                    if (dx * dx + dy * dy).sqrt() <= T {
                        edges.push((i, j));
                    }
                }
            }
            (positions, edges)
        }
    };
    let masses: Vec<f64> = match dataset {
        ParticleDataset::D2 => vec![1.0; N],
        _ => (0..N).map(|_| rng.gen_range(0.0..1.0)).collect(),
    };
    let g_const = if dataset == ParticleDataset::D1 {
        100.0
    } else {
        1.0
    };
    let values = edges
        .iter()
        .map(|&(i, j)| {
            edge_value(
                edge_fn,
                positions[[i, 0]],
                positions[[i, 1]],
                masses[i],
                positions[[j, 0]],
                positions[[j, 1]],
                masses[j],
                g_const,
            )
        })
        .collect();
    Ok(ParticleSystem {
        positions,
        masses,
        edges,
        values,
    })
}

fn check_connectome(path: &Path, a: &Array2<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::shape(
            "load_connectome_pair",
            format!("{} is {}x{}", path.display(), a.nrows(), a.ncols()),
        ));
    }
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if a[[i, j]].is_nan() {
                return Err(Error::Numerical(format!(
                    "NaN at ({i}, {j}) in {}",
                    path.display()
                )));
            }
            if j > i && (a[[i, j]] - a[[j, i]]).abs() > 1e-6 {
                return Err(Error::Asymmetric {
                    row: i,
                    col: j,
                    lhs: a[[i, j]],
                    rhs: a[[j, i]],
                });
            }
        }
    }
    Ok(())
}

fn finish_connectome(mut a: Array2<f64>, rescale: bool) -> Result<WeightedGraph> {
    let n = a.nrows();
    // exact symmetrization and zero diagonal after the tolerance check
    for i in 0..n {
        a[[i, i]] = 0.0;
        for j in (i + 1)..n {
            let v = (a[[i, j]] + a[[j, i]]) / 2.0;
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
    if rescale {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    lo = lo.min(a[[i, j]]);
                    hi = hi.max(a[[i, j]]);
                }
            }
        }
        if hi > lo {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        a[[i, j]] = (a[[i, j]] - lo) / (hi - lo);
                    }
                }
            }
        }
    }
    // node features are the adjacency rows (X = A)
    let features = a.clone();
    WeightedGraph::new(a, Some(features))
}

/// Load an LR/HR connectome matrix pair; node features are set to the
/// adjacency rows. `rescale` min-max maps off-diagonal weights into [0, 1].
pub fn load_connectome_pair(
    lr_path: &Path,
    hr_path: &Path,
    rescale: bool,
) -> Result<(WeightedGraph, WeightedGraph)> {
    let lr_raw = read_matrix(lr_path)?;
    let hr_raw = read_matrix(hr_path)?;
    check_connectome(lr_path, &lr_raw)?;
    check_connectome(hr_path, &hr_raw)?;
    Ok((
        finish_connectome(lr_raw, rescale)?,
        finish_connectome(hr_raw, rescale)?,
    ))
}

/// Synthetic connectome-shaped stand-in: HR weights from Pearson correlation
/// of random node features, LR as the degree-TopK induced subgraph, features
/// set to adjacency rows on both resolutions.
pub fn gen_connectome_standin(
    n_l: usize,
    n_h: usize,
    seed: u64,
) -> Result<(WeightedGraph, WeightedGraph)> {
    if n_l == 0 || n_l > n_h {
        return Err(Error::invalid(format!(
            "stand-in sizes {n_l}/{n_h} invalid"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let feats = Array2::from_shape_fn((n_h, 8), |_| rng.gen_range(-1.0..1.0));
    let hr_adj = weight_edges_pearson(&feats)?;
    let hr = WeightedGraph::new(hr_adj.clone(), Some(hr_adj.clone()))?;
    let score = metrics::degree_strength(&hr);
    let (pooled, _) = topk_pool(&hr, &score, n_l)?;
    let lr_adj = pooled.adjacency().clone();
    let lr = WeightedGraph::new(lr_adj.clone(), Some(lr_adj))?;
    Ok((lr, hr))
}
