//! Message-passing layer: `z_i = beta * x_i + (1 - beta) * sum_j w_ij x_j`,
//! followed by a two-layer feed-forward block.

use rand_chacha::ChaCha20Rng;

use super::{EdgeList, FeedForward, Neighborhood};
use crate::diff::{Mat, Tape, Var};
use crate::error::Result;
use crate::params::ParamSet;

/// How the aggregation weight `w_ij` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightRule {
    /// `w_ij = 1` for every neighbor.
    Uniform,
    /// `w_ij` read from the neighborhood's edge weights.
    EdgeWeight,
}

/// One layer of the MPNN subclass. `beta` trades self information against
/// the neighborhood sum; with `beta = 1` the neighbor term vanishes.
#[derive(Debug, Clone)]
pub struct MpnnLayer {
    beta: f64,
    weight_rule: WeightRule,
    f_n: FeedForward,
}

impl MpnnLayer {
    /// `f_n` is two affine maps with ReLU between; hidden width = output width.
    pub fn init(
        ps: &mut ParamSet,
        prefix: &str,
        in_dim: usize,
        out_dim: usize,
        beta: f64,
        weight_rule: WeightRule,
        rng: &mut ChaCha20Rng,
    ) -> MpnnLayer {
        assert!((0.0..=1.0).contains(&beta), "beta must be in [0, 1]");
        let f_n = FeedForward::init(ps, &format!("{prefix}.fn"), &[in_dim, out_dim, out_dim], rng);
        MpnnLayer {
            beta,
            weight_rule,
            f_n,
        }
    }

    pub fn forward(
        &self,
        tape: &Tape,
        params: &[Var],
        x: &Var,
        nb: &Neighborhood,
    ) -> Result<Var> {
        mpnn_forward(tape, params, self, x, nb)
    }
}

/// Forward pass of [`MpnnLayer`]; kept as a free function so the weighting
/// rule is visible at the call site in tests.
pub fn mpnn_forward(
    tape: &Tape,
    params: &[Var],
    layer: &MpnnLayer,
    x: &Var,
    nb: &Neighborhood,
) -> Result<Var> {
    nb.validate(x.shape().0)?;
    let edges = EdgeList::build(nb, false);
    let z = if edges.src.is_empty() {
        tape.scale(x, layer.beta)?
    } else {
        let gathered = tape.gather_rows(x, &edges.src)?;
        let weighted = match layer.weight_rule {
            WeightRule::Uniform => gathered,
            WeightRule::EdgeWeight => {
                let w = Var::constant(Mat::from_shape_vec(
                    (edges.weight.len(), 1),
                    edges.weight.clone(),
                )
                .expect("weight column"));
                tape.scale_rows(&gathered, &w)?
            }
        };
        let agg = tape.scatter_add_rows(&weighted, &edges.dst, x.shape().0)?;
        tape.add(
            &tape.scale(x, layer.beta)?,
            &tape.scale(&agg, 1.0 - layer.beta)?,
        )?
    };
    layer.f_n.forward(tape, params, &z)
}
