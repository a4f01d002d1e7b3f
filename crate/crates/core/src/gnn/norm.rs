//! Per-graph feature normalization with a learnable mean scale.

use rand_chacha::ChaCha20Rng;

use crate::diff::{Mat, Tape, Var};
use crate::error::Result;
use crate::params::ParamSet;

const EPS: f64 = 1e-8;

/// GraphNorm: `y = gamma * (x - alpha * mean(x)) / sqrt(var + eps) + beta`
/// with mean and variance taken per channel across the graph's nodes.
#[derive(Debug, Clone)]
pub struct GraphNorm {
    gamma: usize,
    beta: usize,
    alpha: usize,
}

impl GraphNorm {
    pub fn init(ps: &mut ParamSet, prefix: &str, dim: usize, _rng: &mut ChaCha20Rng) -> GraphNorm {
        let gamma = ps.add_value(format!("{prefix}.scale"), Mat::ones((1, dim)));
        let beta = ps.add_zeros(format!("{prefix}.shift"), 1, dim);
        let alpha = ps.add_value(format!("{prefix}.mean_scale"), Mat::ones((1, dim)));
        GraphNorm { gamma, beta, alpha }
    }

    pub fn forward(&self, tape: &Tape, params: &[Var], x: &Var) -> Result<Var> {
        let mu = tape.col_mean(x)?;
        let mu_scaled = tape.mul(&mu, &params[self.alpha])?;
        let centered = tape.sub_rowbcast(x, &mu_scaled)?;
        let sq = tape.mul(&centered, &centered)?;
        let var = tape.col_mean(&sq)?;
        let denom = tape.sqrt(&tape.add_scalar(&var, EPS)?)?;
        let normed = tape.div_rowbcast(&centered, &denom)?;
        let scaled = tape.mul_rowbcast(&normed, &params[self.gamma])?;
        tape.add_rowbcast(&scaled, &params[self.beta])
    }
}
