//! Node-function vs edge-function comparison on the particle toy datasets:
//! two sweeps (datasets under the inverse-square law, then edge functions on
//! the random geometric dataset) across four small models and many seeds.

use graphsr_core::data::{gen_particles, sample_seed, EdgeFn, ParticleDataset, ParticleSystem};
use graphsr_core::diff::{Mat, Tape, Var};
use graphsr_core::models::{ToyKind, ToyModel};
use graphsr_core::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::{fmt, mean, mix_seed, std_dev, write_outputs};
use crate::config::Config;
use crate::train::{train_model, TrainConfig};

/// The seven distinct (dataset, edge function) settings: the inverse-square
/// sweep over D1-D3, then the edge-function sweep on D3. The D3/E1 cell
/// belongs to both sweeps and appears twice in the emitted table.
pub const SETTINGS: [(ParticleDataset, EdgeFn); 7] = [
    (ParticleDataset::D1, EdgeFn::E1),
    (ParticleDataset::D2, EdgeFn::E1),
    (ParticleDataset::D3, EdgeFn::E1),
    (ParticleDataset::D3, EdgeFn::E2),
    (ParticleDataset::D3, EdgeFn::E3),
    (ParticleDataset::D3, EdgeFn::E4),
    (ParticleDataset::D3, EdgeFn::E5),
];

/// Row order of the emitted table: `(label, settings index)`.
pub const TABLE_ROWS: [(&str, usize); 8] = [
    ("D1", 0),
    ("D2", 1),
    ("D3", 2),
    ("E1", 2),
    ("E2", 3),
    ("E3", 4),
    ("E4", 5),
    ("E5", 6),
];

pub const TOY_KINDS: [ToyKind; 4] = [
    ToyKind::Node,
    ToyKind::NodeLarge,
    ToyKind::Edge,
    ToyKind::DualEdge,
];

fn setting_label(d: ParticleDataset, f: EdgeFn) -> String {
    format!("{d:?}/{f:?}")
}

fn kind_label(k: ToyKind) -> &'static str {
    match k {
        ToyKind::Node => "node",
        ToyKind::NodeLarge => "node_large",
        ToyKind::Edge => "edge",
        ToyKind::DualEdge => "dual_edge",
    }
}

pub struct ToyResults {
    pub settings: Vec<String>,
    /// `[setting][kind][seed]` test MAE
    pub seed_maes: Vec<Vec<Vec<f64>>>,
}

fn make_split(
    dataset: ParticleDataset,
    edge_fn: EdgeFn,
    base: u64,
    offset: usize,
    count: usize,
) -> Result<Vec<ParticleSystem>> {
    (0..count)
        .map(|k| gen_particles(dataset, edge_fn, sample_seed(base, offset + k)))
        .collect()
}

/// Train one toy model on one seeded dataset; returns the test edge MAE.
pub fn run_toy_once(
    dataset: ParticleDataset,
    edge_fn: EdgeFn,
    kind: ToyKind,
    cfg: &Config,
    data_seed: u64,
    model_seed: u64,
) -> Result<f64> {
    let train = make_split(dataset, edge_fn, data_seed, 0, cfg.toy_train)?;
    let val = make_split(dataset, edge_fn, data_seed, 100_000, cfg.toy_val)?;
    let test = make_split(dataset, edge_fn, data_seed, 200_000, cfg.toy_test)?;

    let mut rng = ChaCha20Rng::seed_from_u64(model_seed);
    let model = ToyModel::init(kind, &mut rng);
    let mut params = model.params.clone();
    let tcfg = TrainConfig {
        batch_size: cfg.batch_size,
        lr: cfg.lr.unwrap_or(0.001),
        max_epochs: cfg.max_epochs.unwrap_or(300),
        warmup: cfg.warmup.unwrap_or(10),
        patience: cfg.patience.unwrap_or(15),
        seed: sample_seed(model_seed, 1),
    };
    let all: Vec<&ParticleSystem> = train.iter().chain(&val).collect();
    let n_train = train.len();
    train_model(
        &mut params,
        &tcfg,
        &(0..n_train).collect::<Vec<_>>(),
        &(n_train..all.len()).collect::<Vec<_>>(),
        |tape, leaves, sample, _phase, _rng| {
            let sys = all[sample];
            model.loss(tape, leaves, &sys.features(), &sys.edges, &sys.values)
        },
    )?;

    // test metric: mean absolute error on edge values
    let tape = Tape::new();
    let leaves = params.constants();
    let mut maes = Vec::with_capacity(test.len());
    for sys in &test {
        let pred = model.forward(&tape, &leaves, &sys.features(), &sys.edges)?;
        let target = Var::constant(
            Mat::from_shape_vec((sys.values.len(), 1), sys.values.clone()).expect("column"),
        );
        maes.push(tape.mae_loss(&pred, &target)?.scalar());
    }
    Ok(mean(&maes))
}

pub fn run_node_vs_edge(cfg: &Config) -> Result<ToyResults> {
    let n_seeds = cfg.seeds.unwrap_or(15);
    let mut results = ToyResults {
        settings: Vec::new(),
        seed_maes: Vec::new(),
    };
    for (si, &(dataset, edge_fn)) in SETTINGS.iter().enumerate() {
        results.settings.push(setting_label(dataset, edge_fn));
        let mut per_kind = Vec::new();
        for (ki, &kind) in TOY_KINDS.iter().enumerate() {
            let mut maes = Vec::with_capacity(n_seeds);
            for seed in 0..n_seeds {
                let data_seed = mix_seed(cfg.seed, &[10, si, seed]);
                let model_seed = mix_seed(cfg.seed, &[20, si, ki, seed]);
                maes.push(run_toy_once(
                    dataset, edge_fn, kind, cfg, data_seed, model_seed,
                )?);
            }
            per_kind.push(maes);
        }
        results.seed_maes.push(per_kind);
    }

    let mut csv = String::from("setting");
    for kind in TOY_KINDS {
        csv.push_str(&format!(",{0}_mean,{0}_std", kind_label(kind)));
    }
    csv.push('\n');
    for (label, si) in TABLE_ROWS {
        csv.push_str(label);
        for maes in &results.seed_maes[si] {
            csv.push_str(&format!(",{},{}", fmt(mean(maes)), fmt(std_dev(maes))));
        }
        csv.push('\n');
    }
    write_outputs(&cfg.out_dir, cfg, "node_vs_edge.csv", &csv)?;
    Ok(results)
}
