//! Central finite-difference gradient oracle.
//!
//! Works purely through repeated forward evaluation, independent of the tape's
//! backward rules, so it can be used to validate them.

use super::Mat;

/// Central-difference gradient of a scalar function of several matrices.
///
/// `f` must be deterministic. Returns one gradient matrix per input.
pub fn central_difference<F>(f: F, inputs: &[Mat], h: f64) -> Vec<Mat>
where
    F: Fn(&[Mat]) -> f64,
{
    let mut work: Vec<Mat> = inputs.to_vec();
    let mut grads = Vec::with_capacity(inputs.len());
    for p in 0..inputs.len() {
        let mut g = Mat::zeros(inputs[p].raw_dim());
        for idx in 0..inputs[p].len() {
            let (i, j) = (idx / inputs[p].ncols(), idx % inputs[p].ncols());
            let orig = work[p][[i, j]];
            work[p][[i, j]] = orig + h;
            let up = f(&work);
            work[p][[i, j]] = orig - h;
            let down = f(&work);
            work[p][[i, j]] = orig;
            g[[i, j]] = (up - down) / (2.0 * h);
        }
        grads.push(g);
    }
    grads
}

/// Maximum relative error between analytic and numeric gradients, ignoring
/// entries whose magnitudes are both below `floor`.
pub fn max_relative_error(analytic: &[Mat], numeric: &[Mat], floor: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, n) in analytic.iter().zip(numeric) {
        for (&av, &nv) in a.iter().zip(n.iter()) {
            let denom = av.abs().max(nv.abs());
            if denom <= floor {
                continue;
            }
            worst = worst.max((av - nv).abs() / denom);
        }
    }
    worst
}
