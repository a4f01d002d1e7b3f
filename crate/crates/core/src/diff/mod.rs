//! Dense 2-D reverse-mode automatic differentiation.
//!
//! A [`Tape`] records operations on [`Var`]s (dense `f64` matrices). Calling
//! [`Tape::backward`] on a scalar output walks the recorded nodes in reverse
//! and accumulates gradients into every variable created with [`Tape::leaf`].
//! Constants never touch the tape, so inference-only passes record nothing.

mod adam;
pub mod check;
mod ops;

pub use adam::{adam_step, AdamParams, AdamState};

use std::cell::RefCell;
use std::rc::Rc;

use ndarray::Array2;

use crate::error::{Error, Result};

pub type Mat = Array2<f64>;

type BackwardFn = Box<dyn Fn(&Mat, &mut dyn FnMut(usize, Mat))>;

struct Node {
    backward: BackwardFn,
}

/// A matrix value, optionally attached to a tape node.
#[derive(Clone)]
pub struct Var {
    value: Rc<Mat>,
    node: Option<usize>,
}

impl Var {
    /// A constant: participates in forward computation, receives no gradient.
    pub fn constant(value: Mat) -> Var {
        Var {
            value: Rc::new(value),
            node: None,
        }
    }

    pub fn value(&self) -> &Mat {
        &self.value
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.value.nrows(), self.value.ncols())
    }

    pub fn requires_grad(&self) -> bool {
        self.node.is_some()
    }

    /// Scalar payload of a 1x1 variable.
    pub fn scalar(&self) -> f64 {
        debug_assert_eq!(self.shape(), (1, 1));
        self.value[[0, 0]]
    }
}

/// Gradient tape. Single-threaded; independent tapes may run in parallel.
#[derive(Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

impl Tape {
    pub fn new() -> Tape {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.borrow().is_empty()
    }

    /// A differentiable leaf (parameter or input requiring gradients).
    pub fn leaf(&self, value: Mat) -> Var {
        let id = self.push_node(Box::new(|_, _| {}));
        Var {
            value: Rc::new(value),
            node: Some(id),
        }
    }

    fn push_node(&self, backward: BackwardFn) -> usize {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(Node { backward });
        nodes.len() - 1
    }

    /// Record a result. If no input carries a node the result is a constant.
    fn record(&self, any_parent: bool, value: Mat, backward: BackwardFn) -> Var {
        if !any_parent {
            return Var::constant(value);
        }
        let id = self.push_node(backward);
        Var {
            value: Rc::new(value),
            node: Some(id),
        }
    }

    /// Reverse pass from a 1x1 scalar output.
    pub fn backward(&self, out: &Var) -> Result<Grads> {
        if out.shape() != (1, 1) {
            return Err(Error::shape(
                "backward",
                format!("output must be 1x1, got {:?}", out.shape()),
            ));
        }
        let out_node = out
            .node
            .ok_or_else(|| Error::invalid("backward on a constant output".to_string()))?;
        let nodes = self.nodes.borrow();
        let mut grads: Vec<Option<Mat>> = vec![None; nodes.len()];
        grads[out_node] = Some(Mat::ones((1, 1)));
        for id in (0..=out_node).rev() {
            let Some(grad) = grads[id].take() else {
                continue;
            };
            let (before, _) = grads.split_at_mut(id);
            (nodes[id].backward)(&grad, &mut |pid, g| {
                debug_assert!(pid < id, "backward edge must point to an earlier node");
                match &mut before[pid] {
                    Some(acc) => *acc += &g,
                    slot @ None => *slot = Some(g),
                }
            });
            grads[id] = Some(grad);
        }
        Ok(Grads { by_node: grads })
    }
}

/// Gradients produced by a backward pass, indexed by tape node.
pub struct Grads {
    by_node: Vec<Option<Mat>>,
}

impl Grads {
    /// Gradient of the output with respect to `v`. Zero-shaped `None` means
    /// the variable did not influence the output (or was a constant).
    pub fn get(&self, v: &Var) -> Option<&Mat> {
        v.node.and_then(|id| self.by_node.get(id)?.as_ref())
    }

    /// Gradient for `v`, or zeros of its shape if it had no influence.
    pub fn get_or_zeros(&self, v: &Var) -> Mat {
        match self.get(v) {
            Some(g) => g.clone(),
            None => Mat::zeros(v.shape()),
        }
    }
}
