//! Experiment runners behind the `experiment` subcommand. Each writes
//! byte-deterministic CSVs plus a config echo into the output directory.

mod connectome;
mod node_vs_edge;
mod sensitivity;
mod simulated;

pub use connectome::{run_connectome_sr, subject_pairs as subject_pairs_for, ConnectomeResults};
pub use node_vs_edge::{run_node_vs_edge, run_toy_once, ToyResults, SETTINGS, TOY_KINDS};
pub use sensitivity::{run_sensitivity, SensitivityResults, SENSITIVITY_MODELS};
pub use simulated::{run_simulated_sr, scenario_pairs, SimResults};

use std::path::Path;

use graphsr_core::data::sample_seed;
use graphsr_core::diff::{Tape, Var};
use graphsr_core::gnn::Phase;
use graphsr_core::graph::WeightedGraph;
use graphsr_core::models::{edge_mae, Autoencoder, ModelSpec, SrModel, ABLATION_NAMES};
use graphsr_core::params::ParamSet;
use graphsr_core::{Error, Result};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::config::Config;
use crate::train::{train_model, Split, TrainConfig, TrainReport};

pub fn fmt(v: f64) -> String {
    format!("{v:.6e}")
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, content).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_outputs(out_dir: &Path, cfg: &Config, csv_name: &str, csv: &str) -> Result<()> {
    write_text(&out_dir.join(csv_name), csv)?;
    write_text(&out_dir.join("config_echo.txt"), &cfg.echo())
}

/// Population standard deviation, re-exported for result aggregation.
pub fn std_dev(values: &[f64]) -> f64 {
    graphsr_core::metrics::population_std(values)
}

pub fn mean(values: &[f64]) -> f64 {
    crate::train::mean(values)
}

/// Deterministic seed for a nested experiment coordinate.
pub fn mix_seed(root: u64, coords: &[usize]) -> u64 {
    coords.iter().fold(root, |acc, &c| sample_seed(acc, c))
}

/// Resolve a model selector against the ablation grid plus `extra` names.
pub fn resolve_models(selector: &str, extra: &[&str]) -> Result<Vec<String>> {
    if selector == "all" {
        let mut names: Vec<String> = ABLATION_NAMES.iter().map(|s| s.to_string()).collect();
        names.extend(extra.iter().map(|s| s.to_string()));
        return Ok(names);
    }
    let mut names = Vec::new();
    for raw in selector.split(',') {
        let name = raw.trim();
        if name == "iman_adapted" {
            return Err(Error::NotImplemented(
                "the iman_adapted baseline is a reserved slot",
            ));
        }
        if !ABLATION_NAMES.contains(&name) && !extra.contains(&name) {
            return Err(Error::invalid(format!("unknown model {name:?}")));
        }
        names.push(name.to_string());
    }
    if names.is_empty() {
        return Err(Error::invalid("empty model list".to_string()));
    }
    Ok(names)
}

/// Super-resolution hyperparameters resolved for one experiment family.
#[derive(Debug, Clone)]
pub struct SrHyper {
    pub hidden: usize,
    pub heads: usize,
    pub dropout: f64,
    pub batch_size: usize,
    pub lr: f64,
    pub max_epochs: usize,
    pub warmup: usize,
    pub patience: usize,
    pub hr_scale: f64,
}

impl SrHyper {
    /// Simulated-scenario defaults, overridden by explicit config keys.
    pub fn simulated(cfg: &Config) -> SrHyper {
        SrHyper {
            hidden: cfg.hidden.unwrap_or(16),
            heads: cfg.heads,
            dropout: cfg.dropout,
            batch_size: cfg.batch_size,
            lr: cfg.lr.unwrap_or(0.001),
            max_epochs: cfg.max_epochs.unwrap_or(150),
            warmup: cfg.warmup.unwrap_or(15),
            patience: cfg.patience.unwrap_or(5),
            hr_scale: cfg.hr_scale,
        }
    }

    /// Connectome defaults: wider hidden layer, longer warmup and patience.
    pub fn connectome(cfg: &Config) -> SrHyper {
        SrHyper {
            hidden: cfg.hidden.unwrap_or(32),
            heads: cfg.heads,
            dropout: cfg.dropout,
            batch_size: cfg.batch_size,
            lr: cfg.lr.unwrap_or(0.001),
            max_epochs: cfg.max_epochs.unwrap_or(150),
            warmup: cfg.warmup.unwrap_or(30),
            patience: cfg.patience.unwrap_or(7),
            hr_scale: cfg.hr_scale,
        }
    }
}

/// One trainable super-resolution model: an ablation-grid model or the
/// autoencoder baseline.
pub enum AnySr {
    Ablation(SrModel),
    Autoencoder(Autoencoder),
}

impl AnySr {
    pub fn init(
        name: &str,
        n_l: usize,
        n_h: usize,
        in_dim: usize,
        hp: &SrHyper,
        rng: &mut ChaCha20Rng,
    ) -> Result<AnySr> {
        if name == "iman_adapted" {
            return Err(Error::NotImplemented(
                "the iman_adapted baseline is a reserved slot",
            ));
        }
        if name == "autoencoder" {
            let mut spec = ModelSpec::from_name(
                "bi_mp", n_l, n_h, in_dim, hp.hidden, hp.heads, hp.dropout,
            )?;
            spec.hr_scale = hp.hr_scale;
            return Ok(AnySr::Autoencoder(Autoencoder::init(spec, rng)?));
        }
        let mut spec =
            ModelSpec::from_name(name, n_l, n_h, in_dim, hp.hidden, hp.heads, hp.dropout)?;
        spec.hr_scale = hp.hr_scale;
        Ok(AnySr::Ablation(SrModel::init(spec, rng)?))
    }

    pub fn params_mut(&mut self) -> &mut ParamSet {
        match self {
            AnySr::Ablation(m) => &mut m.params,
            AnySr::Autoencoder(m) => &mut m.params,
        }
    }

    pub fn params(&self) -> &ParamSet {
        match self {
            AnySr::Ablation(m) => &m.params,
            AnySr::Autoencoder(m) => &m.params,
        }
    }

    pub fn loss(
        &self,
        tape: &Tape,
        leaves: &[Var],
        x_l: &Array2<f64>,
        a_l: &Array2<f64>,
        a_h: &Array2<f64>,
        phase: Phase,
        rng: &mut ChaCha20Rng,
    ) -> Result<Var> {
        match self {
            AnySr::Ablation(m) => m.loss(tape, leaves, x_l, a_l, a_h, phase, rng),
            AnySr::Autoencoder(m) => m.loss(tape, leaves, x_l, a_l, a_h, phase, rng),
        }
    }

    /// Predicted HR adjacency with dropout disabled.
    pub fn predict(&self, x_l: &Array2<f64>, a_l: &Array2<f64>) -> Result<Array2<f64>> {
        let tape = Tape::new();
        let leaves = self.params().constants();
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let pred = match self {
            AnySr::Ablation(m) => m.forward(&tape, &leaves, x_l, a_l, Phase::Eval, &mut rng)?,
            AnySr::Autoencoder(m) => {
                m.forward(&tape, &leaves, x_l, a_l, Phase::Eval, &mut rng)?.0
            }
        };
        Ok(pred.value().clone())
    }
}

/// Result of training one model on one fold.
pub struct FoldRun {
    pub model: AnySr,
    pub report: TrainReport,
    /// mean upper-triangle MAE over the fold's test samples
    pub test_mae: f64,
    /// per-test-sample predicted HR adjacencies
    pub predictions: Vec<Array2<f64>>,
}

/// Train `name` on one fold of `pairs` and evaluate the edge MAE on the
/// held-out test samples.
pub fn run_sr_fold(
    name: &str,
    pairs: &[(WeightedGraph, WeightedGraph)],
    split: &Split,
    hp: &SrHyper,
    seed: u64,
) -> Result<FoldRun> {
    let (lr0, _) = &pairs[0];
    let n_l = lr0.n();
    let n_h = pairs[0].1.n();
    let in_dim = lr0.feature_dim();
    let mut init_rng = ChaCha20Rng::seed_from_u64(sample_seed(seed, 1));
    let mut model = AnySr::init(name, n_l, n_h, in_dim, hp, &mut init_rng)?;

    let cfg = TrainConfig {
        batch_size: hp.batch_size,
        lr: hp.lr,
        max_epochs: hp.max_epochs,
        warmup: hp.warmup,
        patience: hp.patience,
        seed: sample_seed(seed, 2),
    };
    // the trainer owns the parameters while the model is borrowed immutably
    // by the loss closure; restore them afterwards
    let mut params = std::mem::replace(model.params_mut(), ParamSet::new());
    let report = train_model(
        &mut params,
        &cfg,
        &split.train,
        &split.val,
        |tape, leaves, sample, phase, rng| {
            let (lr, hr) = &pairs[sample];
            model.loss(
                tape,
                leaves,
                lr.features(),
                lr.adjacency(),
                hr.adjacency(),
                phase,
                rng,
            )
        },
    )?;
    *model.params_mut() = params;

    let mut predictions = Vec::with_capacity(split.test.len());
    let mut maes = Vec::with_capacity(split.test.len());
    for &t in &split.test {
        let (lr, hr) = &pairs[t];
        let pred = model.predict(lr.features(), lr.adjacency())?;
        let tape = Tape::new();
        let mae = edge_mae(&tape, &Var::constant(pred.clone()), hr.adjacency())?;
        maes.push(mae.scalar());
        predictions.push(pred);
    }
    Ok(FoldRun {
        model,
        report,
        test_mae: mean(&maes),
        predictions,
    })
}

/// Edge MAE of predicting the mean training edge weight everywhere.
pub fn mean_baseline_mae(
    pairs: &[(WeightedGraph, WeightedGraph)],
    split: &Split,
) -> Result<f64> {
    let n_h = pairs[0].1.n();
    let mut total = 0.0;
    let mut count = 0.0;
    for &s in &split.train {
        let a = pairs[s].1.adjacency();
        for i in 0..n_h {
            for j in i + 1..n_h {
                total += a[[i, j]];
                count += 1.0;
            }
        }
    }
    if count == 0.0 {
        return Err(Error::invalid("empty training split".to_string()));
    }
    let mu = total / count;
    let constant = Array2::from_elem((n_h, n_h), mu);
    let mut maes = Vec::with_capacity(split.test.len());
    let tape = Tape::new();
    for &t in &split.test {
        let mae = edge_mae(&tape, &Var::constant(constant.clone()), pairs[t].1.adjacency())?;
        maes.push(mae.scalar());
    }
    Ok(mean(&maes))
}
