//! Toy models for the interacting-particle study: small networks that
//! predict per-edge values from (x, y, m) node features, differing in where
//! the learnable function sits (nodes, edges, or dual nodes).

use rand_chacha::ChaCha20Rng;

use crate::diff::{Mat, Tape, Var};
use crate::error::{Error, Result};
use crate::gnn::FeedForward;
use crate::params::ParamSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyKind {
    /// GIN-style node model: `x_hat = f(x_i + sum_j x_j)`, edge value by dot
    /// product of 16-dim node embeddings.
    Node,
    /// Same aggregation with a deeper scalar head; edge value is the product
    /// of the two node scalars.
    NodeLarge,
    /// Edge model: head applied to the concatenation `[x_i || x_j]`.
    Edge,
    /// Dual-edge model: edge init features aggregated over dual neighbors
    /// (edges sharing an endpoint) before the head.
    DualEdge,
}

#[derive(Debug, Clone)]
pub struct ToyModel {
    kind: ToyKind,
    head: FeedForward,
    pub params: ParamSet,
}

impl ToyModel {
    pub fn init(kind: ToyKind, rng: &mut ChaCha20Rng) -> ToyModel {
        let mut params = ParamSet::new();
        let dims: &[usize] = match kind {
            ToyKind::Node => &[3, 16, 16],
            ToyKind::NodeLarge => &[3, 16, 16, 1],
            ToyKind::Edge | ToyKind::DualEdge => &[6, 16, 16, 1],
        };
        let head = FeedForward::init(&mut params, "toy", dims, rng);
        ToyModel { kind, head, params }
    }

    pub fn kind(&self) -> ToyKind {
        self.kind
    }

    fn check(&self, features: &Mat, edges: &[(usize, usize)]) -> Result<()> {
        if features.ncols() != 3 {
            return Err(Error::shape(
                "toy_forward",
                format!("features are {:?}, expected (x, y, m) triples", features.dim()),
            ));
        }
        let n = features.nrows();
        for &(i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::invalid(format!(
                    "edge ({i}, {j}) invalid for {n} nodes"
                )));
            }
        }
        Ok(())
    }

    /// Predicted values for `edges`, one row per edge.
    pub fn forward(
        &self,
        tape: &Tape,
        params: &[Var],
        features: &Mat,
        edges: &[(usize, usize)],
    ) -> Result<Var> {
        self.check(features, edges)?;
        let n = features.nrows();
        let x = Var::constant(features.clone());
        let src: Vec<usize> = edges.iter().map(|&(i, _)| i).collect();
        let dst: Vec<usize> = edges.iter().map(|&(_, j)| j).collect();

        match self.kind {
            ToyKind::Node | ToyKind::NodeLarge => {
                // aggregate self + neighbors over the undirected edge set
                let mut from = Vec::with_capacity(2 * edges.len());
                let mut to = Vec::with_capacity(2 * edges.len());
                for &(i, j) in edges {
                    from.push(j);
                    to.push(i);
                    from.push(i);
                    to.push(j);
                }
                let gathered = tape.gather_rows(&x, &from)?;
                let neigh = tape.scatter_add_rows(&gathered, &to, n)?;
                let agg = tape.add(&x, &neigh)?;
                let h = self.head.forward(tape, params, &agg)?;
                let hi = tape.gather_rows(&h, &src)?;
                let hj = tape.gather_rows(&h, &dst)?;
                tape.row_sum(&tape.mul(&hi, &hj)?)
            }
            ToyKind::Edge => {
                let xi = tape.gather_rows(&x, &src)?;
                let xj = tape.gather_rows(&x, &dst)?;
                let pair = tape.concat_cols(&xi, &xj)?;
                self.head.forward(tape, params, &pair)
            }
            ToyKind::DualEdge => {
                let xi = tape.gather_rows(&x, &src)?;
                let xj = tape.gather_rows(&x, &dst)?;
                let init = tape.concat_cols(&xi, &xj)?;
                // dual adjacency: edges sharing an endpoint
                let m = edges.len();
                let mut from = Vec::new();
                let mut to = Vec::new();
                for p in 0..m {
                    for q in 0..m {
                        if p == q {
                            continue;
                        }
                        let (a, b) = edges[p];
                        let (c, d) = edges[q];
                        if a == c || a == d || b == c || b == d {
                            from.push(q);
                            to.push(p);
                        }
                    }
                }
                let gathered = tape.gather_rows(&init, &from)?;
                let neigh = tape.scatter_add_rows(&gathered, &to, m)?;
                let agg = tape.add(&init, &neigh)?;
                self.head.forward(tape, params, &agg)
            }
        }
    }

    /// MSE against target edge values.
    pub fn loss(
        &self,
        tape: &Tape,
        params: &[Var],
        features: &Mat,
        edges: &[(usize, usize)],
        targets: &[f64],
    ) -> Result<Var> {
        if targets.len() != edges.len() {
            return Err(Error::invalid(format!(
                "{} targets for {} edges",
                targets.len(),
                edges.len()
            )));
        }
        let pred = self.forward(tape, params, features, edges)?;
        let t = Var::constant(
            Mat::from_shape_vec((targets.len(), 1), targets.to_vec()).expect("target column"),
        );
        tape.mse_loss(&pred, &t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn ffn_eval(model: &ToyModel, params: &[Var], input: &Mat) -> Mat {
        let tape = Tape::new();
        model
            .head
            .forward(&tape, params, &Var::constant(input.clone()))
            .unwrap()
            .value()
            .clone()
    }

    #[test]
    fn isolated_pair_node_model_is_product_of_heads() {
        let mut rng = ChaCha20Rng::seed_from_u64(30);
        let model = ToyModel::init(ToyKind::Node, &mut rng);
        let params = model.params.constants();
        // two connected nodes plus two isolated ones; check the pair (2, 3)
        // is impossible (no edge), so instead use a single-edge graph where
        // each endpoint's aggregate includes the other
        let features = Mat::from_shape_fn((2, 3), |(i, j)| (i * 3 + j) as f64 * 0.1);
        let edges = vec![(0, 1)];
        let tape = Tape::new();
        let out = model.forward(&tape, &params, &features, &edges).unwrap();

        // oracle: both nodes aggregate x_0 + x_1
        let summed = Mat::from_shape_fn((2, 3), |(_, j)| features[[0, j]] + features[[1, j]]);
        let h = ffn_eval(&model, &params, &summed);
        let expect: f64 = (0..16).map(|c| h[[0, c]] * h[[1, c]]).sum();
        assert!((out.value()[[0, 0]] - expect).abs() < 1e-12);
    }

    #[test]
    fn node_model_empty_neighborhood_uses_raw_features() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let model = ToyModel::init(ToyKind::Node, &mut rng);
        let params = model.params.constants();
        // three nodes, single edge between 0 and 1; node 2 stays isolated --
        // aggregation for nodes 0/1 must not involve node 2
        let features = Mat::from_shape_fn((3, 3), |(i, j)| ((i + j) as f64).sin());
        let edges = vec![(0, 1)];
        let tape = Tape::new();
        let out = model.forward(&tape, &params, &features, &edges).unwrap();
        let summed = Mat::from_shape_fn((2, 3), |(_, j)| features[[0, j]] + features[[1, j]]);
        let h = ffn_eval(&model, &params, &summed);
        let expect: f64 = (0..16).map(|c| h[[0, c]] * h[[1, c]]).sum();
        assert!((out.value()[[0, 0]] - expect).abs() < 1e-12);
    }

    #[test]
    fn edge_model_sees_concatenated_features() {
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        let model = ToyModel::init(ToyKind::Edge, &mut rng);
        let params = model.params.constants();
        let features =
            Mat::from_shape_vec((2, 3), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let edges = vec![(0, 1)];
        let tape = Tape::new();
        let out = model.forward(&tape, &params, &features, &edges).unwrap();
        let cat = Mat::from_shape_vec((1, 6), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let h = ffn_eval(&model, &params, &cat);
        assert!((out.value()[[0, 0]] - h[[0, 0]]).abs() < 1e-12);
    }

    #[test]
    fn dual_edge_triangle_sums_other_two_edges() {
        let mut rng = ChaCha20Rng::seed_from_u64(33);
        let model = ToyModel::init(ToyKind::DualEdge, &mut rng);
        let params = model.params.constants();
        let features = Mat::from_shape_fn((3, 3), |(i, j)| 0.3 * i as f64 - 0.1 * j as f64);
        let edges = vec![(0, 1), (0, 2), (1, 2)];
        let tape = Tape::new();
        let out = model.forward(&tape, &params, &features, &edges).unwrap();

        // oracle: each edge's aggregate is its own init plus both others'
        let init = |&(i, j): &(usize, usize)| -> Vec<f64> {
            (0..3)
                .map(|c| features[[i, c]])
                .chain((0..3).map(|c| features[[j, c]]))
                .collect()
        };
        let inits: Vec<Vec<f64>> = edges.iter().map(init).collect();
        for p in 0..3 {
            let agg: Vec<f64> = (0..6)
                .map(|c| inits[0][c] + inits[1][c] + inits[2][c])
                .collect();
            let _ = agg; // every edge sums all three inits on a triangle
            let row = Mat::from_shape_vec(
                (1, 6),
                (0..6).map(|c| inits.iter().map(|v| v[c]).sum()).collect(),
            )
            .unwrap();
            let h = ffn_eval(&model, &params, &row);
            assert!((out.value()[[p, 0]] - h[[0, 0]]).abs() < 1e-10);
        }
    }

    #[test]
    fn malformed_features_error() {
        let mut rng = ChaCha20Rng::seed_from_u64(34);
        let model = ToyModel::init(ToyKind::Edge, &mut rng);
        let params = model.params.constants();
        let tape = Tape::new();
        let bad = Mat::zeros((2, 2));
        assert!(model.forward(&tape, &params, &bad, &[(0, 1)]).is_err());
        let ok = Mat::zeros((2, 3));
        assert!(model.forward(&tape, &params, &ok, &[(0, 2)]).is_err());
    }

    #[test]
    fn training_loss_decreases_on_tiny_problem() {
        use crate::diff::{adam_step, AdamState};
        let mut rng = ChaCha20Rng::seed_from_u64(35);
        let mut model = ToyModel::init(ToyKind::Edge, &mut rng);
        let features = Mat::from_shape_fn((4, 3), |_| rng.gen_range(0.0..1.0));
        let edges = vec![(0, 1), (1, 2), (2, 3), (0, 3)];
        let targets = vec![0.5, -0.2, 0.8, 0.1];
        let mut state = AdamState::new(model.params.values());
        let mut first = None;
        let mut last = 0.0;
        for _ in 0..50 {
            let tape = Tape::new();
            let leaves = model.params.leaves(&tape);
            let loss = model
                .loss(&tape, &leaves, &features, &edges, &targets)
                .unwrap();
            let grads = tape.backward(&loss).unwrap();
            let gmats: Vec<Mat> = leaves.iter().map(|l| grads.get_or_zeros(l)).collect();
            adam_step(model.params.values_mut(), &gmats, &mut state, 0.01).unwrap();
            last = loss.scalar();
            first.get_or_insert(last);
        }
        assert!(last < first.unwrap() * 0.5, "{last} vs {first:?}");
    }
}
