//! Mini-batch Adam training loop with warmup/patience early stopping, plus
//! k-fold split construction shared by the experiment runners.

use graphsr_core::data::sample_seed;
use graphsr_core::diff::{adam_step, AdamState, Tape, Var};
use graphsr_core::gnn::Phase;
use graphsr_core::params::ParamSet;
use graphsr_core::{Error, Result};
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub lr: f64,
    pub max_epochs: usize,
    pub warmup: usize,
    pub patience: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    /// 1-based epoch whose parameters were kept.
    pub best_epoch: usize,
    pub best_val: f64,
    pub epochs_run: usize,
}

/// Train parameters in place over `train` sample indices, validating on
/// `val` each epoch.
///
/// `loss_fn(tape, leaves, sample, phase, rng)` returns the scalar loss for
/// one sample; batch gradients are averaged. The best post-warmup checkpoint
/// is tracked and restored: no improvement for `patience` epochs after the
/// warmup stops training, and a model from an epoch at or below the warmup
/// is only returned when `max_epochs` never leaves the warmup. A non-finite
/// loss aborts with the failing epoch and batch.
pub fn train_model<F>(
    params: &mut ParamSet,
    cfg: &TrainConfig,
    train: &[usize],
    val: &[usize],
    mut loss_fn: F,
) -> Result<TrainReport>
where
    F: FnMut(&Tape, &[Var], usize, Phase, &mut ChaCha20Rng) -> Result<Var>,
{
    if train.is_empty() || val.is_empty() {
        return Err(Error::invalid(
            "training requires non-empty train and validation splits".to_string(),
        ));
    }
    if cfg.batch_size == 0 || cfg.max_epochs == 0 || cfg.patience == 0 {
        return Err(Error::invalid(
            "batch_size, max_epochs and patience must be positive".to_string(),
        ));
    }
    let mut adam = AdamState::new(params.values());
    let mut order: Vec<usize> = train.to_vec();
    let mut report = TrainReport {
        train_loss: Vec::new(),
        val_loss: Vec::new(),
        best_epoch: 0,
        best_val: f64::INFINITY,
        epochs_run: 0,
    };
    let mut best_params: Option<Vec<Array2<f64>>> = None;

    for epoch in 1..=cfg.max_epochs {
        let mut rng = ChaCha20Rng::seed_from_u64(sample_seed(cfg.seed, epoch));
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (batch_no, batch) in order.chunks(cfg.batch_size).enumerate() {
            let tape = Tape::new();
            let leaves = params.leaves(&tape);
            let mut total: Option<Var> = None;
            for &sample in batch {
                let loss = loss_fn(&tape, &leaves, sample, Phase::Train, &mut rng)?;
                total = Some(match total {
                    Some(t) => tape.add(&t, &loss)?,
                    None => loss,
                });
            }
            let mean = tape.scale(&total.expect("non-empty batch"), 1.0 / batch.len() as f64)?;
            let value = mean.scalar();
            if !value.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite training loss at epoch {epoch}, batch {}",
                    batch_no + 1
                )));
            }
            epoch_loss += value * batch.len() as f64;
            let grads = tape.backward(&mean)?;
            let grad_mats: Vec<Array2<f64>> =
                leaves.iter().map(|v| grads.get_or_zeros(v)).collect();
            adam_step(params.values_mut(), &grad_mats, &mut adam, cfg.lr)?;
        }
        report.train_loss.push(epoch_loss / order.len() as f64);

        let val_loss = evaluate(params, val, &mut loss_fn)?;
        if !val_loss.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite validation loss at epoch {epoch}"
            )));
        }
        report.val_loss.push(val_loss);
        report.epochs_run = epoch;

        if epoch > cfg.warmup {
            if val_loss < report.best_val {
                report.best_val = val_loss;
                report.best_epoch = epoch;
                best_params = Some(params.values().to_vec());
            } else if epoch - report.best_epoch >= cfg.patience {
                break;
            }
        }
    }

    if let Some(best) = best_params {
        params.values_mut().clone_from_slice(&best);
    } else {
        // max_epochs never left the warmup: keep the final parameters
        report.best_epoch = report.epochs_run;
        report.best_val = *report.val_loss.last().expect("at least one epoch");
    }
    Ok(report)
}

/// Mean loss over `indices` with dropout disabled.
pub fn evaluate<F>(params: &ParamSet, indices: &[usize], loss_fn: &mut F) -> Result<f64>
where
    F: FnMut(&Tape, &[Var], usize, Phase, &mut ChaCha20Rng) -> Result<Var>,
{
    let mut rng = ChaCha20Rng::seed_from_u64(0);
    let mut total = 0.0;
    for &sample in indices {
        let tape = Tape::new();
        let leaves = params.constants();
        let loss = loss_fn(&tape, &leaves, sample, Phase::Eval, &mut rng)?;
        total += loss.scalar();
    }
    Ok(total / indices.len() as f64)
}

#[derive(Debug, Clone)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded k-fold splits: each fold serves once as the test set, and 20% of
/// the remainder (reshuffled per fold) is held out for validation. Fold
/// sizes differ by at most one, the larger folds first.
pub fn kfold_splits(n: usize, k: usize, seed: u64) -> Result<Vec<Split>> {
    if k < 2 || n < 2 * k {
        return Err(Error::invalid(format!(
            "cannot build {k} folds from {n} samples"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha20Rng::seed_from_u64(seed));

    let base = n / k;
    let extra = n % k;
    let mut splits = Vec::with_capacity(k);
    let mut start = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        let test: Vec<usize> = order[start..start + size].to_vec();
        let mut rest: Vec<usize> = order[..start]
            .iter()
            .chain(&order[start + size..])
            .copied()
            .collect();
        rest.shuffle(&mut ChaCha20Rng::seed_from_u64(sample_seed(seed, fold)));
        let n_val = (rest.len() / 5).max(1);
        let val = rest.split_off(rest.len() - n_val);
        splits.push(Split {
            train: rest,
            val,
            test,
        });
        start += size;
    }
    Ok(splits)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
