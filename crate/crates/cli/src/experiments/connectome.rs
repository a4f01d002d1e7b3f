//! Connectome super-resolution evaluation: learning-rate search over k-fold
//! validation MAE, then topology-metric MAEs on held-out subjects.

use std::path::Path;

use graphsr_core::data::{gen_connectome_standin, load_connectome_pair, sample_seed};
use graphsr_core::graph::WeightedGraph;
use graphsr_core::metrics::{metric_mae, MetricReport};
use graphsr_core::{Error, Result};

use super::{fmt, mean, mix_seed, resolve_models, run_sr_fold, std_dev, write_outputs, SrHyper};
use crate::config::Config;
use crate::train::kfold_splits;

pub const LR_CANDIDATES: [f64; 3] = [0.01, 0.005, 0.001];

pub struct ConnectomeResults {
    pub models: Vec<String>,
    pub chosen_lr: Vec<f64>,
    /// `[model][measure]` mean over pooled test subjects
    pub metric_means: Vec<[f64; 8]>,
    pub metric_stds: Vec<[f64; 8]>,
}

/// Subject pairs: `subject_<k>_lr.txt` / `subject_<k>_hr.txt` under the data
/// directory when one is configured, synthetic stand-ins otherwise.
pub fn subject_pairs(cfg: &Config) -> Result<Vec<(WeightedGraph, WeightedGraph)>> {
    if let Some(dir) = &cfg.data_dir {
        return load_subjects(dir, cfg.subjects, cfg.rescale);
    }
    if let (Some(lr), Some(hr)) = (&cfg.lr_matrix, &cfg.hr_matrix) {
        return Ok(vec![load_connectome_pair(lr, hr, cfg.rescale)?]);
    }
    (0..cfg.subjects)
        .map(|k| gen_connectome_standin(cfg.n_l, cfg.n_h, sample_seed(cfg.seed, 40_000 + k)))
        .collect()
}

fn load_subjects(
    dir: &Path,
    count: usize,
    rescale: bool,
) -> Result<Vec<(WeightedGraph, WeightedGraph)>> {
    (0..count)
        .map(|k| {
            load_connectome_pair(
                &dir.join(format!("subject_{k}_lr.txt")),
                &dir.join(format!("subject_{k}_hr.txt")),
                rescale,
            )
        })
        .collect()
}

/// Measure topology-metric MAEs for one model's pooled test predictions.
fn pooled_metrics(reports: &[MetricReport]) -> ([f64; 8], [f64; 8]) {
    let mut means = [0.0; 8];
    let mut stds = [0.0; 8];
    for m in 0..8 {
        let col: Vec<f64> = reports.iter().map(|r| r.values()[m]).collect();
        means[m] = mean(&col);
        stds[m] = std_dev(&col);
    }
    (means, stds)
}

pub fn run_connectome_sr(cfg: &Config) -> Result<ConnectomeResults> {
    let pairs = subject_pairs(cfg)?;
    if pairs.is_empty() {
        return Err(Error::invalid("no connectome subjects available".to_string()));
    }
    let models = resolve_models(&cfg.models, &["autoencoder"])?;
    let hp_base = SrHyper::connectome(cfg);
    let splits = kfold_splits(pairs.len(), cfg.folds, mix_seed(cfg.seed, &[5]))?;

    let candidates: Vec<f64> = match cfg.lr {
        Some(lr) if !cfg.lr_search => vec![lr],
        _ => LR_CANDIDATES.to_vec(),
    };

    let mut results = ConnectomeResults {
        models: models.clone(),
        chosen_lr: Vec::new(),
        metric_means: Vec::new(),
        metric_stds: Vec::new(),
    };

    for (mi, name) in models.iter().enumerate() {
        // learning-rate search: lowest mean validation edge MAE across folds
        let mut best: Option<(f64, f64, Vec<MetricReport>)> = None;
        for (ci, &lr) in candidates.iter().enumerate() {
            let hp = SrHyper { lr, ..hp_base.clone() };
            let mut val_maes = Vec::with_capacity(splits.len());
            let mut reports = Vec::new();
            for (fi, split) in splits.iter().enumerate() {
                let seed = mix_seed(cfg.seed, &[6, mi, ci, fi]);
                let run = run_sr_fold(name, &pairs, split, &hp, seed)?;
                val_maes.push(run.report.best_val);
                for (&t, pred) in split.test.iter().zip(&run.predictions) {
                    let pred_graph = WeightedGraph::new(pred.clone(), None)?;
                    reports.push(metric_mae(&pred_graph, &pairs[t].1)?);
                }
            }
            let score = mean(&val_maes);
            if best.as_ref().map_or(true, |(s, _, _)| score < *s) {
                best = Some((score, lr, reports));
            }
        }
        let (_, lr, reports) = best.expect("at least one learning rate");
        let (means, stds) = pooled_metrics(&reports);
        results.chosen_lr.push(lr);
        results.metric_means.push(means);
        results.metric_stds.push(stds);
    }

    let mut csv = String::from("model,lr");
    for name in MetricReport::COLUMNS {
        csv.push_str(&format!(",{name}_mean,{name}_std"));
    }
    csv.push('\n');
    for (mi, name) in results.models.iter().enumerate() {
        csv.push_str(&format!("{name},{}", results.chosen_lr[mi]));
        for m in 0..8 {
            csv.push_str(&format!(
                ",{},{}",
                fmt(results.metric_means[mi][m]),
                fmt(results.metric_stds[mi][m])
            ));
        }
        csv.push('\n');
    }
    // reserved comparison slot: the adapted inter-modality baseline is out
    // of scope, so its row carries no numbers
    csv.push_str("iman_adapted,not_implemented");
    for _ in 0..16 {
        csv.push_str(",not_implemented");
    }
    csv.push('\n');
    write_outputs(&cfg.out_dir, cfg, "connectome_sr.csv", &csv)?;
    Ok(results)
}
