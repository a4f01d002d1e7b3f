//! Model zoo: node super-resolution variants (matrix transpose, bipartite
//! linear combination, bipartite message passing), optional HR refinement
//! over a fixed or learned computation domain, edge inference via dot
//! product or the dual-graph pipeline, the autoencoder baseline, and the
//! particle-system toy models.

mod toy;

pub use toy::{ToyKind, ToyModel};

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::diff::{Mat, Tape, Var};
use crate::dual::build_dual;
use crate::error::{Error, Result};
use crate::gnn::{
    dot_edge_init_var, learned_domain, minmax_normalize_var, GraphTransformerLayer, Neighborhood,
    Phase,
};
use crate::params::ParamSet;

/// Node super-resolution variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvKind {
    /// Transpose of an LR GNN with output width `n_h`.
    MatrixTranspose,
    /// Learnable linear combination `W_b X_l`.
    BipartiteLc,
    /// Message passing on the fully connected LR-HR bipartite graph.
    BipartiteMp,
}

/// HR node refinement after node super-resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    None,
    /// Message passing over full connectivity (1 - I).
    Fixed,
    /// Message passing over a learned computation domain.
    Learned,
}

/// Edge inference variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeKind {
    /// Min-max normalized Gram matrix of HR features.
    Dot,
    /// Edge representation learning on the dual graph of the complete HR graph.
    Dual,
}

/// Hyperparameters and composition choices for one super-resolution model.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub sv_kind: SvKind,
    pub refinement: Refinement,
    pub se_kind: SeKind,
    pub n_l: usize,
    pub n_h: usize,
    pub in_dim: usize,
    pub hidden: usize,
    pub heads: usize,
    pub dropout: f64,
    /// Scale of the uniform HR initialization.
    pub hr_scale: f64,
}

/// The fourteen ablation names, dot-product variants first.
pub const ABLATION_NAMES: [&str; 14] = [
    "mt",
    "bi_mp",
    "bi_lc",
    "bi_mp_fixed",
    "bi_mp_learned",
    "bi_lc_fixed",
    "bi_lc_learned",
    "dual_mt",
    "dual_bi_mp",
    "dual_bi_lc",
    "dual_bi_mp_fixed",
    "dual_bi_mp_learned",
    "dual_bi_lc_fixed",
    "dual_bi_lc_learned",
];

impl ModelSpec {
    pub fn new(
        sv_kind: SvKind,
        refinement: Refinement,
        se_kind: SeKind,
        n_l: usize,
        n_h: usize,
        in_dim: usize,
        hidden: usize,
        heads: usize,
        dropout: f64,
    ) -> Result<ModelSpec> {
        if n_l == 0 || n_h < 2 || in_dim == 0 || hidden == 0 || heads == 0 {
            return Err(Error::invalid(
                "model dimensions must be positive and n_h >= 2".to_string(),
            ));
        }
        // Refinement only applies to the bipartite variants; the transpose
        // model has no separate HR stage, so it collapses to plain MT.
        let refinement = if sv_kind == SvKind::MatrixTranspose {
            Refinement::None
        } else {
            refinement
        };
        Ok(ModelSpec {
            sv_kind,
            refinement,
            se_kind,
            n_l,
            n_h,
            in_dim,
            hidden,
            heads,
            dropout,
            hr_scale: 1.0,
        })
    }

    /// Resolve one of [`ABLATION_NAMES`] into a spec.
    pub fn from_name(
        name: &str,
        n_l: usize,
        n_h: usize,
        in_dim: usize,
        hidden: usize,
        heads: usize,
        dropout: f64,
    ) -> Result<ModelSpec> {
        let (se_kind, base) = match name.strip_prefix("dual_") {
            Some(rest) => (SeKind::Dual, rest),
            None => (SeKind::Dot, name),
        };
        let (sv_kind, refinement) = match base {
            "mt" => (SvKind::MatrixTranspose, Refinement::None),
            "bi_mp" => (SvKind::BipartiteMp, Refinement::None),
            "bi_lc" => (SvKind::BipartiteLc, Refinement::None),
            "bi_mp_fixed" => (SvKind::BipartiteMp, Refinement::Fixed),
            "bi_mp_learned" => (SvKind::BipartiteMp, Refinement::Learned),
            "bi_lc_fixed" => (SvKind::BipartiteLc, Refinement::Fixed),
            "bi_lc_learned" => (SvKind::BipartiteLc, Refinement::Learned),
            _ => {
                return Err(Error::invalid(format!("unknown model name {name:?}")));
            }
        };
        ModelSpec::new(
            sv_kind, refinement, se_kind, n_l, n_h, in_dim, hidden, heads, dropout,
        )
    }

    /// Width of the HR features entering edge inference.
    pub fn sv_out_dim(&self) -> usize {
        let raw = match self.sv_kind {
            SvKind::MatrixTranspose => self.n_l,
            SvKind::BipartiteLc => self.in_dim,
            SvKind::BipartiteMp => self.hidden,
        };
        match self.refinement {
            Refinement::None => raw,
            _ => self.hidden,
        }
    }

    /// Largest configured head count that divides `width` (attention heads
    /// must split the hidden dimension evenly).
    fn heads_for(&self, width: usize) -> usize {
        if width % self.heads == 0 {
            self.heads
        } else {
            1
        }
    }
}

/// Frozen random HR node initialization: i.i.d. uniform(0, scale) entries,
/// drawn once per run seed and shared across every sample.
#[derive(Debug, Clone)]
pub struct HrInit {
    x_h0: Mat,
}

impl HrInit {
    pub fn new(n_h: usize, dim: usize, scale: f64, rng: &mut ChaCha20Rng) -> Result<HrInit> {
        if scale <= 0.0 {
            return Err(Error::invalid(format!(
                "HR initialization scale must be positive, got {scale}"
            )));
        }
        Ok(HrInit {
            x_h0: Mat::from_shape_fn((n_h, dim), |_| rng.gen_range(0.0..scale)),
        })
    }

    pub fn matrix(&self) -> &Mat {
        &self.x_h0
    }
}

/// Neighbor lists of the fully connected LR-HR bipartite graph; LR nodes
/// occupy indices `0..n_l`, HR nodes `n_l..n_l + n_h`.
pub fn bipartite_neighborhood(n_l: usize, n_h: usize) -> Neighborhood {
    let hr: Vec<usize> = (n_l..n_l + n_h).collect();
    let lr: Vec<usize> = (0..n_l).collect();
    let mut lists = Vec::with_capacity(n_l + n_h);
    for _ in 0..n_l {
        lists.push(hr.clone());
    }
    for _ in 0..n_h {
        lists.push(lr.clone());
    }
    Neighborhood::unweighted(lists)
}

/// Stack `top` over `bottom` along rows (both differentiable).
fn concat_rows(tape: &Tape, top: &Var, bottom: &Var) -> Result<Var> {
    let t = tape.concat_cols(&tape.transpose(top)?, &tape.transpose(bottom)?)?;
    tape.transpose(&t)
}

/// Extract the strict upper triangle of an `n x n` matrix as a column.
pub fn upper_triangle(tape: &Tape, m: &Var) -> Result<Var> {
    let n = m.shape().0;
    if m.shape().1 != n {
        return Err(Error::shape(
            "upper_triangle",
            format!("matrix {:?} is not square", m.shape()),
        ));
    }
    let flat = tape.reshape(m, n * n, 1)?;
    let idx: Vec<usize> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| i * n + j))
        .collect();
    tape.gather_rows(&flat, &idx)
}

/// MAE between two symmetric adjacency predictions over the strict upper
/// triangle (the convention used for all edge losses and reports).
pub fn edge_mae(tape: &Tape, pred: &Var, target: &Mat) -> Result<Var> {
    let p = upper_triangle(tape, pred)?;
    let t = upper_triangle(tape, &Var::constant(target.clone()))?;
    tape.mae_loss(&p, &t)
}

/// One composed super-resolution model `S_E . S_V` plus its parameters.
#[derive(Debug, Clone)]
pub struct SrModel {
    spec: ModelSpec,
    pub params: ParamSet,
    hr_init: Option<HrInit>,
    gnn_l: Option<GraphTransformerLayer>,
    w_b: Option<usize>,
    gnn_b: Option<GraphTransformerLayer>,
    refine: Option<GraphTransformerLayer>,
    ref_gnn_l: Option<GraphTransformerLayer>,
    ref_gnn_b: Option<GraphTransformerLayer>,
    dual_gnn: Option<GraphTransformerLayer>,
    dual_head: Option<(usize, usize)>,
}

impl SrModel {
    pub fn init(spec: ModelSpec, rng: &mut ChaCha20Rng) -> Result<SrModel> {
        let mut ps = ParamSet::new();
        let mut hr_init = None;
        let mut gnn_l = None;
        let mut w_b = None;
        let mut gnn_b = None;

        match spec.sv_kind {
            SvKind::MatrixTranspose => {
                gnn_l = Some(GraphTransformerLayer::init(
                    &mut ps,
                    "sv.lr",
                    spec.in_dim,
                    spec.n_h,
                    spec.heads_for(spec.n_h),
                    spec.dropout,
                    rng,
                )?);
            }
            SvKind::BipartiteLc => {
                w_b = Some(ps.add_glorot("sv.combiner", spec.n_h, spec.n_l, rng));
            }
            SvKind::BipartiteMp => {
                gnn_l = Some(GraphTransformerLayer::init(
                    &mut ps,
                    "sv.lr",
                    spec.in_dim,
                    spec.hidden,
                    spec.heads_for(spec.hidden),
                    spec.dropout,
                    rng,
                )?);
                gnn_b = Some(GraphTransformerLayer::init(
                    &mut ps,
                    "sv.bipartite",
                    spec.hidden,
                    spec.hidden,
                    spec.heads_for(spec.hidden),
                    spec.dropout,
                    rng,
                )?);
                hr_init = Some(HrInit::new(spec.n_h, spec.hidden, spec.hr_scale, rng)?);
            }
        }

        let raw_width = match spec.sv_kind {
            SvKind::MatrixTranspose => spec.n_l,
            SvKind::BipartiteLc => spec.in_dim,
            SvKind::BipartiteMp => spec.hidden,
        };
        let mut refine = None;
        let mut ref_gnn_l = None;
        let mut ref_gnn_b = None;
        match spec.refinement {
            Refinement::None => {}
            Refinement::Fixed => {
                refine = Some(GraphTransformerLayer::init(
                    &mut ps,
                    "sv.refine",
                    raw_width,
                    spec.hidden,
                    spec.heads_for(spec.hidden),
                    spec.dropout,
                    rng,
                )?);
            }
            Refinement::Learned => {
                refine = Some(GraphTransformerLayer::init(
                    &mut ps,
                    "sv.refine",
                    raw_width,
                    spec.hidden,
                    spec.heads_for(spec.hidden),
                    spec.dropout,
                    rng,
                )?);
                // Independent bipartite pass producing the reference features
                // that define the learned computation domain.
                ref_gnn_l = Some(GraphTransformerLayer::init(
                    &mut ps,
                    "sv.ref.lr",
                    spec.in_dim,
                    spec.hidden,
                    spec.heads_for(spec.hidden),
                    spec.dropout,
                    rng,
                )?);
                ref_gnn_b = Some(GraphTransformerLayer::init(
                    &mut ps,
                    "sv.ref.bipartite",
                    spec.hidden,
                    spec.hidden,
                    spec.heads_for(spec.hidden),
                    spec.dropout,
                    rng,
                )?);
                if hr_init.is_none() {
                    hr_init = Some(HrInit::new(spec.n_h, spec.hidden, spec.hr_scale, rng)?);
                }
            }
        }

        let mut dual_gnn = None;
        let mut dual_head = None;
        if spec.se_kind == SeKind::Dual {
            dual_gnn = Some(GraphTransformerLayer::init(
                &mut ps,
                "se.dual",
                1,
                spec.hidden,
                spec.heads_for(spec.hidden),
                spec.dropout,
                rng,
            )?);
            let w = ps.add_glorot("se.head.weight", spec.hidden, 1, rng);
            let b = ps.add_zeros("se.head.bias", 1, 1);
            dual_head = Some((w, b));
        }

        Ok(SrModel {
            spec,
            params: ps,
            hr_init,
            gnn_l,
            w_b,
            gnn_b,
            refine,
            ref_gnn_l,
            ref_gnn_b,
            dual_gnn,
            dual_head,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    fn check_input(&self, x_l: &Mat, a_l: &Mat) -> Result<()> {
        if x_l.nrows() != self.spec.n_l || x_l.ncols() != self.spec.in_dim {
            return Err(Error::shape(
                "sr_forward",
                format!(
                    "LR features {:?}, expected {}x{}",
                    x_l.dim(),
                    self.spec.n_l,
                    self.spec.in_dim
                ),
            ));
        }
        if a_l.dim() != (self.spec.n_l, self.spec.n_l) {
            return Err(Error::shape(
                "sr_forward",
                format!("LR adjacency {:?}, expected square n_l", a_l.dim()),
            ));
        }
        Ok(())
    }

    /// Message passing on the bipartite graph: refine LR features, stack the
    /// frozen HR initialization below them, run the bipartite layer, and keep
    /// the HR rows.
    fn bipartite_pass(
        &self,
        tape: &Tape,
        params: &[Var],
        lr_layer: &GraphTransformerLayer,
        b_layer: &GraphTransformerLayer,
        x_l: &Var,
        lr_nb: &Neighborhood,
        phase: Phase,
        rng: &mut ChaCha20Rng,
    ) -> Result<Var> {
        let (n_l, n_h) = (self.spec.n_l, self.spec.n_h);
        let x_l_ref = lr_layer.forward(tape, params, x_l, lr_nb, phase, rng)?;
        let x_h0 = Var::constant(self.hr_init.as_ref().expect("bipartite hr init").matrix().clone());
        let x_b = concat_rows(tape, &x_l_ref, &x_h0)?;
        let nb = bipartite_neighborhood(n_l, n_h);
        let out = b_layer.forward(tape, params, &x_b, &nb, phase, rng)?;
        // keep HR rows, discard the updated LR block
        let hr_rows: Vec<usize> = (n_l..n_l + n_h).collect();
        tape.gather_rows(&out, &hr_rows)
    }

    /// Node super-resolution `S_V`: HR node features before edge inference.
    pub fn sv_forward(
        &self,
        tape: &Tape,
        params: &[Var],
        x_l: &Mat,
        a_l: &Mat,
        phase: Phase,
        rng: &mut ChaCha20Rng,
    ) -> Result<Var> {
        self.check_input(x_l, a_l)?;
        let lr_nb = Neighborhood::from_dense(a_l);
        let x_l_var = Var::constant(x_l.clone());

        let x_h = match self.spec.sv_kind {
            SvKind::MatrixTranspose => {
                let layer = self.gnn_l.as_ref().expect("MT lr layer");
                let out = layer.forward(tape, params, &x_l_var, &lr_nb, phase, rng)?;
                if out.shape().1 != self.spec.n_h {
                    return Err(Error::shape(
                        "sv_matrix_transpose",
                        format!("LR GNN width {} != n_h {}", out.shape().1, self.spec.n_h),
                    ));
                }
                tape.transpose(&out)?
            }
            SvKind::BipartiteLc => {
                let w = &params[self.w_b.expect("combiner")];
                tape.matmul(w, &x_l_var)?
            }
            SvKind::BipartiteMp => self.bipartite_pass(
                tape,
                params,
                self.gnn_l.as_ref().expect("lr layer"),
                self.gnn_b.as_ref().expect("bipartite layer"),
                &x_l_var,
                &lr_nb,
                phase,
                rng,
            )?,
        };

        match self.spec.refinement {
            Refinement::None => Ok(x_h),
            Refinement::Fixed => {
                let n_h = self.spec.n_h;
                let lists: Vec<Vec<usize>> = (0..n_h)
                    .map(|i| (0..n_h).filter(|&j| j != i).collect())
                    .collect();
                let nb = Neighborhood::unweighted(lists);
                self.refine
                    .as_ref()
                    .expect("refine layer")
                    .forward(tape, params, &x_h, &nb, phase, rng)
            }
            Refinement::Learned => {
                let x_ref = self.bipartite_pass(
                    tape,
                    params,
                    self.ref_gnn_l.as_ref().ok_or_else(|| {
                        Error::invalid("learned refinement requires a reference head".to_string())
                    })?,
                    self.ref_gnn_b.as_ref().expect("reference bipartite layer"),
                    &x_l_var,
                    &lr_nb,
                    phase,
                    rng,
                )?;
                let domain = learned_domain(tape, &x_ref)?;
                // neighborhood from the thresholded domain; attention
                // coefficients are scaled by the (differentiable) domain
                // weights, self-loops keep weight 1
                let n_h = self.spec.n_h;
                let mut lists = vec![Vec::new(); n_h];
                for i in 0..n_h {
                    for j in 0..n_h {
                        if i != j && domain.value()[[i, j]] > 0.0 {
                            lists[i].push(j);
                        }
                    }
                }
                let nb = Neighborhood::unweighted(lists);
                let edges = crate::gnn::EdgeList::build(&nb, true);
                let flat = tape.reshape(&domain, n_h * n_h, 1)?;
                let idx: Vec<usize> = edges
                    .src
                    .iter()
                    .zip(&edges.dst)
                    .map(|(&s, &d)| d * n_h + s)
                    .collect();
                let gathered = tape.gather_rows(&flat, &idx)?;
                let m = idx.len();
                let self_mask = Mat::from_shape_fn((m, 1), |(r, _)| {
                    if edges.src[r] == edges.dst[r] {
                        0.0
                    } else {
                        1.0
                    }
                });
                let self_base = self_mask.mapv(|v| 1.0 - v);
                let w = tape.add(
                    &tape.mul(&gathered, &Var::constant(self_mask))?,
                    &Var::constant(self_base),
                )?;
                self.refine.as_ref().expect("refine layer").forward_with_edge_weights(
                    tape,
                    params,
                    &x_h,
                    &nb,
                    Some(&w),
                    phase,
                    rng,
                )
            }
        }
    }

    /// Edge inference `S_E` on HR node features.
    pub fn se_forward(
        &self,
        tape: &Tape,
        params: &[Var],
        x_h: &Var,
        phase: Phase,
        rng: &mut ChaCha20Rng,
    ) -> Result<Var> {
        match self.spec.se_kind {
            SeKind::Dot => {
                let e = dot_edge_init_var(tape, x_h)?;
                minmax_normalize_var(tape, &e)
            }
            SeKind::Dual => {
                let n = x_h.shape().0;
                let e0 = dot_edge_init_var(tape, x_h)?;
                let dual = build_dual(n, e0.value())?;
                // dual node features = the initialized edge values
                let flat = tape.reshape(&e0, n * n, 1)?;
                let idx: Vec<usize> = dual.pairs().iter().map(|&(i, j)| i * n + j).collect();
                let x_d = tape.gather_rows(&flat, &idx)?;
                let nb = Neighborhood::unweighted(dual.neighbor_lists().to_vec());
                let h_d = self
                    .dual_gnn
                    .as_ref()
                    .expect("dual layer")
                    .forward(tape, params, &x_d, &nb, phase, rng)?;
                let (w, b) = self.dual_head.expect("dual head");
                let s = tape.add_rowbcast(&tape.matmul(&h_d, &params[w])?, &params[b])?;
                // back to the primal matrix: each dual node writes its pair
                // (i, j) and its mirror (j, i)
                let upper: Vec<usize> = dual.pairs().iter().map(|&(i, j)| i * n + j).collect();
                let lower: Vec<usize> = dual.pairs().iter().map(|&(i, j)| j * n + i).collect();
                let half = tape.scatter_add_rows(&s, &upper, n * n)?;
                let full = tape.add(&half, &tape.scatter_add_rows(&s, &lower, n * n)?)?;
                let e = tape.reshape(&full, n, n)?;
                minmax_normalize_var(tape, &e)
            }
        }
    }

    /// Full forward pass: predicted HR adjacency in [0, 1].
    pub fn forward(
        &self,
        tape: &Tape,
        params: &[Var],
        x_l: &Mat,
        a_l: &Mat,
        phase: Phase,
        rng: &mut ChaCha20Rng,
    ) -> Result<Var> {
        let x_h = self.sv_forward(tape, params, x_l, a_l, phase, rng)?;
        self.se_forward(tape, params, &x_h, phase, rng)
    }

    /// Training loss: MAE to the target HR adjacency over the strict upper
    /// triangle.
    pub fn loss(
        &self,
        tape: &Tape,
        params: &[Var],
        x_l: &Mat,
        a_l: &Mat,
        a_h: &Mat,
        phase: Phase,
        rng: &mut ChaCha20Rng,
    ) -> Result<Var> {
        if a_h.dim() != (self.spec.n_h, self.spec.n_h) {
            return Err(Error::shape(
                "sr_loss",
                format!("HR adjacency {:?}, expected square n_h", a_h.dim()),
            ));
        }
        let pred = self.forward(tape, params, x_l, a_l, phase, rng)?;
        edge_mae(tape, &pred, a_h)
    }
}

/// Autoencoder baseline: bipartite encoder predicts the HR graph, a mirrored
/// bipartite decoder reconstructs the LR graph from the predicted HR node
/// features; trained on the sum of both reconstruction MAEs.
#[derive(Debug, Clone)]
pub struct Autoencoder {
    spec: ModelSpec,
    pub params: ParamSet,
    hr_init: HrInit,
    lr_init: Mat,
    enc_l: GraphTransformerLayer,
    enc_b: GraphTransformerLayer,
    dec_b: GraphTransformerLayer,
}

impl Autoencoder {
    pub fn init(spec: ModelSpec, rng: &mut ChaCha20Rng) -> Result<Autoencoder> {
        let mut ps = ParamSet::new();
        let enc_l = GraphTransformerLayer::init(
            &mut ps,
            "enc.lr",
            spec.in_dim,
            spec.hidden,
            spec.heads_for(spec.hidden),
            spec.dropout,
            rng,
        )?;
        let enc_b = GraphTransformerLayer::init(
            &mut ps,
            "enc.bipartite",
            spec.hidden,
            spec.hidden,
            spec.heads_for(spec.hidden),
            spec.dropout,
            rng,
        )?;
        let dec_b = GraphTransformerLayer::init(
            &mut ps,
            "dec.bipartite",
            spec.hidden,
            spec.hidden,
            spec.heads_for(spec.hidden),
            spec.dropout,
            rng,
        )?;
        let hr_init = HrInit::new(spec.n_h, spec.hidden, spec.hr_scale, rng)?;
        let lr_init = Mat::from_shape_fn((spec.n_l, spec.hidden), |_| {
            rng.gen_range(0.0..spec.hr_scale)
        });
        Ok(Autoencoder {
            spec,
            params: ps,
            hr_init,
            lr_init,
            enc_l,
            enc_b,
            dec_b,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// Returns `(A_h_hat, A_l_hat)`.
    pub fn forward(
        &self,
        tape: &Tape,
        params: &[Var],
        x_l: &Mat,
        a_l: &Mat,
        phase: Phase,
        rng: &mut ChaCha20Rng,
    ) -> Result<(Var, Var)> {
        let (n_l, n_h) = (self.spec.n_l, self.spec.n_h);
        let lr_nb = Neighborhood::from_dense(a_l);
        let x_l_var = Var::constant(x_l.clone());

        // encoder: LR refinement, bipartite pass, keep HR rows
        let x_l_ref = self.enc_l.forward(tape, params, &x_l_var, &lr_nb, phase, rng)?;
        let x_b = concat_rows(tape, &x_l_ref, &Var::constant(self.hr_init.matrix().clone()))?;
        let nb = bipartite_neighborhood(n_l, n_h);
        let enc_out = self.enc_b.forward(tape, params, &x_b, &nb, phase, rng)?;
        let hr_rows: Vec<usize> = (n_l..n_l + n_h).collect();
        let x_h = tape.gather_rows(&enc_out, &hr_rows)?;
        let a_h_hat = minmax_normalize_var(tape, &dot_edge_init_var(tape, &x_h)?)?;

        // decoder mirrors the encoder: frozen LR initialization on top of the
        // predicted HR features, bipartite pass, keep LR rows
        let x_b2 = concat_rows(tape, &Var::constant(self.lr_init.clone()), &x_h)?;
        let dec_out = self.dec_b.forward(tape, params, &x_b2, &nb, phase, rng)?;
        let lr_rows: Vec<usize> = (0..n_l).collect();
        let x_l_rec = tape.gather_rows(&dec_out, &lr_rows)?;
        let a_l_hat = minmax_normalize_var(tape, &dot_edge_init_var(tape, &x_l_rec)?)?;
        Ok((a_h_hat, a_l_hat))
    }

    /// Sum of HR prediction MAE and LR reconstruction MAE.
    pub fn loss(
        &self,
        tape: &Tape,
        params: &[Var],
        x_l: &Mat,
        a_l: &Mat,
        a_h: &Mat,
        phase: Phase,
        rng: &mut ChaCha20Rng,
    ) -> Result<Var> {
        let (a_h_hat, a_l_hat) = self.forward(tape, params, x_l, a_l, phase, rng)?;
        let hr_term = edge_mae(tape, &a_h_hat, a_h)?;
        let lr_term = edge_mae(tape, &a_l_hat, a_l)?;
        tape.add(&hr_term, &lr_term)
    }
}
