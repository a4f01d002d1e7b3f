//! Sensitivity of the bipartite message-passing family to the scale of the
//! HR initialization: seed spread per (model, scale) cell, normalized by the
//! score spread across all implemented models.

use graphsr_core::graph::WeightedGraph;
use graphsr_core::metrics::{metric_mae, sensitivity_srel, MetricReport};
use graphsr_core::{Error, Result};

use super::{
    connectome::subject_pairs, fmt, mean, mix_seed, run_sr_fold, std_dev, write_outputs, SrHyper,
};
use crate::config::Config;
use crate::train::{kfold_splits, Split};
use graphsr_core::models::ABLATION_NAMES;

/// The six models whose HR feature stage starts from a random
/// initialization.
pub const SENSITIVITY_MODELS: [&str; 6] = [
    "bi_mp",
    "bi_mp_fixed",
    "bi_mp_learned",
    "dual_bi_mp",
    "dual_bi_mp_fixed",
    "dual_bi_mp_learned",
];

pub struct SensitivityResults {
    pub models: Vec<String>,
    pub scales: Vec<f64>,
    /// `[model][scale][seed][measure]` mean metric MAE over test subjects
    pub scores: Vec<Vec<Vec<[f64; 8]>>>,
    /// `[model][measure]` single-seed scores for every implemented model,
    /// used as the normalization spread
    pub all_model_scores: Vec<[f64; 8]>,
    pub all_model_names: Vec<String>,
    pub s_rel: [f64; 8],
}

/// Train one model once on the fixed split and return its per-measure mean
/// metric MAE over the test subjects.
fn run_cell(
    name: &str,
    pairs: &[(WeightedGraph, WeightedGraph)],
    split: &Split,
    hp: &SrHyper,
    seed: u64,
) -> Result<[f64; 8]> {
    let run = run_sr_fold(name, pairs, split, hp, seed)?;
    let mut reports = Vec::with_capacity(split.test.len());
    for (&t, pred) in split.test.iter().zip(&run.predictions) {
        let pred_graph = WeightedGraph::new(pred.clone(), None)?;
        reports.push(metric_mae(&pred_graph, &pairs[t].1)?);
    }
    let mut out = [0.0; 8];
    for m in 0..8 {
        out[m] = mean(&reports.iter().map(|r| r.values()[m]).collect::<Vec<_>>());
    }
    Ok(out)
}

pub fn run_sensitivity(cfg: &Config) -> Result<SensitivityResults> {
    let pairs = subject_pairs(cfg)?;
    if pairs.len() < 2 * cfg.folds {
        return Err(Error::invalid(format!(
            "{} subjects are too few for the sensitivity protocol",
            pairs.len()
        )));
    }
    let hp_base = SrHyper::connectome(cfg);
    let n_seeds = cfg.seeds.unwrap_or(5);
    // single fixed split: the protocol varies initialization, not folds
    let split = kfold_splits(pairs.len(), cfg.folds, mix_seed(cfg.seed, &[7]))?
        .into_iter()
        .next()
        .expect("at least one fold");

    let mut results = SensitivityResults {
        models: SENSITIVITY_MODELS.iter().map(|s| s.to_string()).collect(),
        scales: cfg.scales.clone(),
        scores: Vec::new(),
        all_model_scores: Vec::new(),
        all_model_names: Vec::new(),
        s_rel: [0.0; 8],
    };

    for (mi, name) in SENSITIVITY_MODELS.iter().enumerate() {
        let mut per_scale = Vec::with_capacity(cfg.scales.len());
        for (ci, &scale) in cfg.scales.iter().enumerate() {
            let hp = SrHyper { hr_scale: scale, ..hp_base.clone() };
            let mut per_seed = Vec::with_capacity(n_seeds);
            for seed in 0..n_seeds {
                let cell_seed = mix_seed(cfg.seed, &[8, mi, ci, seed]);
                per_seed.push(run_cell(name, &pairs, &split, &hp, cell_seed)?);
            }
            per_scale.push(per_seed);
        }
        results.scores.push(per_scale);
    }

    // normalization spread: every implemented model once at the default scale
    let mut all_names: Vec<String> = ABLATION_NAMES.iter().map(|s| s.to_string()).collect();
    all_names.push("autoencoder".to_string());
    for (mi, name) in all_names.iter().enumerate() {
        let seed = mix_seed(cfg.seed, &[9, mi]);
        results
            .all_model_scores
            .push(run_cell(name, &pairs, &split, &hp_base, seed)?);
    }
    results.all_model_names = all_names;

    for m in 0..8 {
        let cells: Vec<Vec<f64>> = results
            .scores
            .iter()
            .flat_map(|per_scale| {
                per_scale
                    .iter()
                    .map(|per_seed| per_seed.iter().map(|v| v[m]).collect::<Vec<f64>>())
            })
            .collect();
        let all: Vec<f64> = results.all_model_scores.iter().map(|v| v[m]).collect();
        results.s_rel[m] = sensitivity_srel(&cells, &all)?;
    }

    let mut csv = String::from("model,scale,stat");
    for name in MetricReport::COLUMNS {
        csv.push_str(&format!(",{name}"));
    }
    csv.push('\n');
    for (mi, name) in results.models.iter().enumerate() {
        for (ci, scale) in results.scales.iter().enumerate() {
            let per_seed = &results.scores[mi][ci];
            for stat in ["seed_mean", "seed_std"] {
                csv.push_str(&format!("{name},{scale},{stat}"));
                for m in 0..8 {
                    let col: Vec<f64> = per_seed.iter().map(|v| v[m]).collect();
                    let v = if stat == "seed_mean" { mean(&col) } else { std_dev(&col) };
                    csv.push_str(&format!(",{}", fmt(v)));
                }
                csv.push('\n');
            }
        }
    }
    csv.push_str("all_models,,sigma");
    for m in 0..8 {
        let all: Vec<f64> = results.all_model_scores.iter().map(|v| v[m]).collect();
        csv.push_str(&format!(",{}", fmt(std_dev(&all))));
    }
    csv.push('\n');
    csv.push_str("s_rel,,ratio");
    for m in 0..8 {
        csv.push_str(&format!(",{}", fmt(results.s_rel[m])));
    }
    csv.push('\n');
    write_outputs(&cfg.out_dir, cfg, "sensitivity.csv", &csv)?;
    Ok(results)
}
