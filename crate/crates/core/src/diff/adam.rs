//! First-order optimizer (Adam).

use super::Mat;
use crate::error::{Error, Result};

/// Adam hyperparameters. The defaults are the usual ones.
#[derive(Debug, Clone, Copy)]
pub struct AdamParams {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Per-parameter first/second moment estimates plus the step counter.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Mat>,
    v: Vec<Mat>,
    t: u64,
    hyper: AdamParams,
}

impl AdamState {
    pub fn new(params: &[Mat]) -> AdamState {
        AdamState {
            m: params.iter().map(|p| Mat::zeros(p.raw_dim())).collect(),
            v: params.iter().map(|p| Mat::zeros(p.raw_dim())).collect(),
            t: 0,
            hyper: AdamParams::default(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One Adam update over a flat parameter list, in place.
pub fn adam_step(
    params: &mut [Mat],
    grads: &[Mat],
    state: &mut AdamState,
    lr: f64,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::shape(
            "adam_step",
            format!(
                "{} params, {} grads, {} state slots",
                params.len(),
                grads.len(),
                state.m.len()
            ),
        ));
    }
    state.t += 1;
    let AdamParams { beta1, beta2, eps } = state.hyper;
    let bc1 = 1.0 - beta1.powi(state.t as i32);
    let bc2 = 1.0 - beta2.powi(state.t as i32);
    for ((p, g), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        if p.shape() != g.shape() {
            return Err(Error::shape(
                "adam_step",
                format!("param {:?} vs grad {:?}", p.shape(), g.shape()),
            ));
        }
        azip(m, g, |m, g| *m = beta1 * *m + (1.0 - beta1) * g);
        azip(v, g, |v, g| *v = beta2 * *v + (1.0 - beta2) * g * g);
        for ((p, m), v) in p.iter_mut().zip(m.iter()).zip(v.iter()) {
            let mhat = m / bc1;
            let vhat = v / bc2;
            *p -= lr * mhat / (vhat.sqrt() + eps);
        }
    }
    Ok(())
}

fn azip(dst: &mut Mat, src: &Mat, f: impl Fn(&mut f64, f64)) {
    for (d, &s) in dst.iter_mut().zip(src.iter()) {
        f(d, s);
    }
}
