//! Edge initialization and output normalization.

use ndarray::Array2;

use crate::diff::{Mat, Tape, Var};
use crate::error::Result;

/// `E[i][j] = x_i . x_j`, symmetric, zero diagonal.
pub fn dot_edge_init(x: &Array2<f64>) -> Array2<f64> {
    let mut e = x.dot(&x.t());
    for i in 0..e.nrows() {
        e[[i, i]] = 0.0;
    }
    e
}

/// Differentiable [`dot_edge_init`]: the Gram matrix with the diagonal
/// masked out.
pub fn dot_edge_init_var(tape: &Tape, x: &Var) -> Result<Var> {
    let gram = tape.matmul(x, &tape.transpose(x)?)?;
    let n = gram.shape().0;
    let mask = Var::constant(Mat::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            0.0
        } else {
            1.0
        }
    }));
    tape.mul(&gram, &mask)
}

/// Min-max normalization over off-diagonal entries; a constant matrix maps
/// to all zeros, and the diagonal stays zero.
pub fn minmax_normalize(e: &Array2<f64>) -> Array2<f64> {
    let n = e.nrows();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                lo = lo.min(e[[i, j]]);
                hi = hi.max(e[[i, j]]);
            }
        }
    }
    let mut out = Array2::zeros((n, n));
    if !lo.is_finite() || hi - lo <= 0.0 {
        return out;
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out[[i, j]] = (e[[i, j]] - lo) / (hi - lo);
            }
        }
    }
    out
}

/// Differentiable min-max normalization. The extreme entries are located on
/// the forward values; the gradient then flows through both the shifted
/// matrix and the selected min/max entries.
pub fn minmax_normalize_var(tape: &Tape, e: &Var) -> Result<Var> {
    let n = e.shape().0;
    let mut lo = (f64::INFINITY, 0, 0);
    let mut hi = (f64::NEG_INFINITY, 0, 0);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let v = e.value()[[i, j]];
            if v < lo.0 {
                lo = (v, i, j);
            }
            if v > hi.0 {
                hi = (v, i, j);
            }
        }
    }
    if !lo.0.is_finite() || hi.0 - lo.0 <= 0.0 {
        return Ok(Var::constant(Mat::zeros((n, n))));
    }
    let min_entry = tape.entry(e, lo.1, lo.2)?;
    let max_entry = tape.entry(e, hi.1, hi.2)?;
    let range = tape.sub(&max_entry, &min_entry)?;
    let shifted = tape.sub_scalarvar(e, &min_entry)?;
    let scaled = tape.div_scalarvar(&shifted, &range)?;
    let mask = Var::constant(Mat::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            0.0
        } else {
            1.0
        }
    }));
    tape.mul(&scaled, &mask)
}

/// Learned computation domain: `A_hat = sigmoid(X X^T)`, then entries below
/// 0.5 are zeroed by a Heaviside mask. The mask is constant in the backward
/// pass; the gradient flows only through the sigmoid factor.
pub fn learned_domain(tape: &Tape, x_ref: &Var) -> Result<Var> {
    let gram = tape.matmul(x_ref, &tape.transpose(x_ref)?)?;
    let a_hat = tape.sigmoid(&gram)?;
    let n = a_hat.shape().0;
    let mask = Var::constant(Mat::from_shape_fn((n, n), |(i, j)| {
        if a_hat.value()[[i, j]] - 0.5 >= 0.0 {
            1.0
        } else {
            0.0
        }
    }));
    tape.mul(&a_hat, &mask)
}
