//! Wall-clock measurement of the model stages whose scaling in the HR node
//! count matters: dual-graph edge inference (cubic) and bipartite message
//! passing (quadratic).

use std::time::Instant;

use graphsr_core::diff::{Mat, Tape, Var};
use graphsr_core::gnn::Phase;
use graphsr_core::models::{ModelSpec, SrModel};
use graphsr_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn random_features(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> Mat {
    Mat::from_shape_fn((rows, cols), |_| rng.gen_range(-1.0..1.0))
}

fn random_adjacency(n: usize, rng: &mut ChaCha20Rng) -> Mat {
    let mut a = Mat::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.gen_range(0.1..1.0);
            a[[i, j]] = w;
            a[[j, i]] = w;
        }
    }
    a
}

fn median(mut times: Vec<f64>) -> f64 {
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    times[times.len() / 2]
}

/// Median seconds for one dual-graph edge-inference pass at `n_h` HR nodes.
pub fn time_se_dual(n_h: usize, reps: usize) -> Result<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let spec = ModelSpec::from_name("dual_bi_mp", n_h / 2, n_h, 8, 16, 4, 0.0)?;
    let model = SrModel::init(spec, &mut rng)?;
    let x_h = random_features(n_h, 16, &mut rng);
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let tape = Tape::new();
        let leaves = model.params.constants();
        let x = Var::constant(x_h.clone());
        let start = Instant::now();
        let out = model.se_forward(&tape, &leaves, &x, Phase::Eval, &mut rng)?;
        std::hint::black_box(out.value()[[0, 0]]);
        times.push(start.elapsed().as_secs_f64());
    }
    Ok(median(times))
}

/// Median seconds for one bipartite message-passing pass at `n_h` HR nodes.
pub fn time_bi_mp(n_h: usize, reps: usize) -> Result<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    let n_l = n_h / 2;
    let spec = ModelSpec::from_name("bi_mp", n_l, n_h, 8, 16, 4, 0.0)?;
    let model = SrModel::init(spec, &mut rng)?;
    let x_l = random_features(n_l, 8, &mut rng);
    let a_l = random_adjacency(n_l, &mut rng);
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let tape = Tape::new();
        let leaves = model.params.constants();
        let start = Instant::now();
        let out = model.sv_forward(&tape, &leaves, &x_l, &a_l, Phase::Eval, &mut rng)?;
        std::hint::black_box(out.value()[[0, 0]]);
        times.push(start.elapsed().as_secs_f64());
    }
    Ok(median(times))
}

/// Least-squares slope of `ln(time)` against `ln(n)`.
pub fn log_log_slope(sizes: &[usize], times: &[f64]) -> f64 {
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = times.iter().map(|&t| t.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}
