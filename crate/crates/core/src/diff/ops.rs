//! Forward/backward rules for every tape operation.

use ndarray::{s, Axis};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use super::{Mat, Tape, Var};
use crate::error::{Error, Result};

fn shape_err(op: &'static str, detail: String) -> Error {
    Error::shape(op, detail)
}

macro_rules! check_same_shape {
    ($op:literal, $a:expr, $b:expr) => {
        if $a.shape() != $b.shape() {
            return Err(shape_err(
                $op,
                format!("{:?} vs {:?}", $a.shape(), $b.shape()),
            ));
        }
    };
}

impl Tape {
    pub fn matmul(&self, a: &Var, b: &Var) -> Result<Var> {
        if a.shape().1 != b.shape().0 {
            return Err(shape_err(
                "matmul",
                format!("{:?} x {:?}", a.shape(), b.shape()),
            ));
        }
        let value = a.value().dot(b.value());
        let (av, bv) = (a.value.clone(), b.value.clone());
        let (an, bn) = (a.node, b.node);
        Ok(self.record(
            an.is_some() || bn.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g.dot(&bv.t()));
                }
                if let Some(id) = bn {
                    sink(id, av.t().dot(g));
                }
            }),
        ))
    }

    pub fn add(&self, a: &Var, b: &Var) -> Result<Var> {
        check_same_shape!("add", a, b);
        let value = a.value() + b.value();
        let (an, bn) = (a.node, b.node);
        Ok(self.record(
            an.is_some() || bn.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g.clone());
                }
                if let Some(id) = bn {
                    sink(id, g.clone());
                }
            }),
        ))
    }

    pub fn sub(&self, a: &Var, b: &Var) -> Result<Var> {
        check_same_shape!("sub", a, b);
        let value = a.value() - b.value();
        let (an, bn) = (a.node, b.node);
        Ok(self.record(
            an.is_some() || bn.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g.clone());
                }
                if let Some(id) = bn {
                    sink(id, -g);
                }
            }),
        ))
    }

    /// Elementwise (Hadamard) product.
    pub fn mul(&self, a: &Var, b: &Var) -> Result<Var> {
        check_same_shape!("mul", a, b);
        let value = a.value() * b.value();
        let (av, bv) = (a.value.clone(), b.value.clone());
        let (an, bn) = (a.node, b.node);
        Ok(self.record(
            an.is_some() || bn.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g * &*bv);
                }
                if let Some(id) = bn {
                    sink(id, g * &*av);
                }
            }),
        ))
    }

    pub fn scale(&self, a: &Var, c: f64) -> Result<Var> {
        let value = a.value() * c;
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g * c);
                }
            }),
        ))
    }

    pub fn add_scalar(&self, a: &Var, c: f64) -> Result<Var> {
        let value = a.value() + c;
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g.clone());
                }
            }),
        ))
    }

    pub fn transpose(&self, a: &Var) -> Result<Var> {
        let value = a.value().t().to_owned();
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g.t().to_owned());
                }
            }),
        ))
    }

    /// Row-major reshape; element count must be preserved.
    pub fn reshape(&self, a: &Var, rows: usize, cols: usize) -> Result<Var> {
        let (r0, c0) = a.shape();
        if r0 * c0 != rows * cols {
            return Err(shape_err(
                "reshape",
                format!("{:?} into {rows}x{cols}", a.shape()),
            ));
        }
        let value = Mat::from_shape_vec((rows, cols), a.value().iter().cloned().collect())
            .expect("element count checked");
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    let back = Mat::from_shape_vec((r0, c0), g.iter().cloned().collect())
                        .expect("element count checked");
                    sink(id, back);
                }
            }),
        ))
    }

    pub fn concat_cols(&self, a: &Var, b: &Var) -> Result<Var> {
        if a.shape().0 != b.shape().0 {
            return Err(shape_err(
                "concat_cols",
                format!("{:?} vs {:?}", a.shape(), b.shape()),
            ));
        }
        let pa = a.shape().1;
        let value = ndarray::concatenate(Axis(1), &[a.value().view(), b.value().view()])
            .expect("concat shapes already checked");
        let (an, bn) = (a.node, b.node);
        Ok(self.record(
            an.is_some() || bn.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g.slice(s![.., ..pa]).to_owned());
                }
                if let Some(id) = bn {
                    sink(id, g.slice(s![.., pa..]).to_owned());
                }
            }),
        ))
    }

    /// Select rows of `a` by index; duplicate indices are allowed.
    pub fn gather_rows(&self, a: &Var, indices: &[usize]) -> Result<Var> {
        let (rows, cols) = a.shape();
        if let Some(&bad) = indices.iter().find(|&&i| i >= rows) {
            return Err(shape_err(
                "gather_rows",
                format!("index {bad} out of range for {rows} rows"),
            ));
        }
        let mut value = Mat::zeros((indices.len(), cols));
        for (r, &i) in indices.iter().enumerate() {
            value.row_mut(r).assign(&a.value().row(i));
        }
        let idx = indices.to_vec();
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    let mut da = Mat::zeros((rows, cols));
                    for (r, &i) in idx.iter().enumerate() {
                        let mut row = da.row_mut(i);
                        row += &g.row(r);
                    }
                    sink(id, da);
                }
            }),
        ))
    }

    /// `out[indices[r]] += a[r]` into a fresh `out_rows x cols` matrix.
    pub fn scatter_add_rows(&self, a: &Var, indices: &[usize], out_rows: usize) -> Result<Var> {
        let (rows, cols) = a.shape();
        if indices.len() != rows {
            return Err(shape_err(
                "scatter_add_rows",
                format!("{} indices for {} rows", indices.len(), rows),
            ));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= out_rows) {
            return Err(shape_err(
                "scatter_add_rows",
                format!("target index {bad} out of range for {out_rows} rows"),
            ));
        }
        let mut value = Mat::zeros((out_rows, cols));
        for (r, &i) in indices.iter().enumerate() {
            let mut row = value.row_mut(i);
            row += &a.value().row(r);
        }
        let idx = indices.to_vec();
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    let mut da = Mat::zeros((rows, cols));
                    for (r, &i) in idx.iter().enumerate() {
                        da.row_mut(r).assign(&g.row(i));
                    }
                    sink(id, da);
                }
            }),
        ))
    }

    pub fn relu(&self, a: &Var) -> Result<Var> {
        let value = a.value().mapv(|v| v.max(0.0));
        let av = a.value.clone();
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    let mask = av.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
                    sink(id, g * &mask);
                }
            }),
        ))
    }

    pub fn sigmoid(&self, a: &Var) -> Result<Var> {
        let value = a.value().mapv(|v| 1.0 / (1.0 + (-v).exp()));
        let out = value.clone();
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g * &(&out * &out.mapv(|s| 1.0 - s)));
                }
            }),
        ))
    }

    pub fn sqrt(&self, a: &Var) -> Result<Var> {
        let value = a.value().mapv(f64::sqrt);
        let out = value.clone();
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g * &out.mapv(|s| 0.5 / s));
                }
            }),
        ))
    }

    /// Softmax over each contiguous segment of a `m x 1` column.
    ///
    /// `offsets` is CSR-style: segment `s` covers rows `offsets[s]..offsets[s+1]`.
    pub fn segment_softmax(&self, a: &Var, offsets: &[usize]) -> Result<Var> {
        let (rows, cols) = a.shape();
        if cols != 1 {
            return Err(shape_err(
                "segment_softmax",
                format!("expected m x 1, got {:?}", a.shape()),
            ));
        }
        if offsets.first() != Some(&0)
            || offsets.last() != Some(&rows)
            || offsets.windows(2).any(|w| w[0] > w[1])
        {
            return Err(shape_err(
                "segment_softmax",
                format!("offsets do not partition 0..{rows}"),
            ));
        }
        let mut value = Mat::zeros((rows, 1));
        for w in offsets.windows(2) {
            let (st, en) = (w[0], w[1]);
            if st == en {
                continue;
            }
            let max = (st..en).map(|r| a.value()[[r, 0]]).fold(f64::MIN, f64::max);
            let mut sum = 0.0;
            for r in st..en {
                let e = (a.value()[[r, 0]] - max).exp();
                value[[r, 0]] = e;
                sum += e;
            }
            for r in st..en {
                value[[r, 0]] /= sum;
            }
        }
        let out = value.clone();
        let segs = offsets.to_vec();
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    let mut da = Mat::zeros((rows, 1));
                    for w in segs.windows(2) {
                        let (st, en) = (w[0], w[1]);
                        let dot: f64 = (st..en).map(|r| out[[r, 0]] * g[[r, 0]]).sum();
                        for r in st..en {
                            da[[r, 0]] = out[[r, 0]] * (g[[r, 0]] - dot);
                        }
                    }
                    sink(id, da);
                }
            }),
        ))
    }

    /// Inverted dropout. Identity when `train` is false or `rate == 0`.
    pub fn dropout(&self, a: &Var, rate: f64, train: bool, rng: &mut ChaCha20Rng) -> Result<Var> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::invalid(format!("dropout rate {rate} outside [0, 1)")));
        }
        if !train || rate == 0.0 {
            return Ok(a.clone());
        }
        let keep = 1.0 - rate;
        let mask = Mat::from_shape_fn(a.value().raw_dim(), |_| {
            if rng.gen::<f64>() < keep {
                1.0 / keep
            } else {
                0.0
            }
        });
        let value = a.value() * &mask;
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g * &mask);
                }
            }),
        ))
    }

    pub fn reduce_sum(&self, a: &Var) -> Result<Var> {
        let value = Mat::from_elem((1, 1), a.value().sum());
        let shape = a.value().raw_dim();
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, Mat::from_elem(shape, g[[0, 0]]));
                }
            }),
        ))
    }

    pub fn reduce_mean(&self, a: &Var) -> Result<Var> {
        let count = (a.shape().0 * a.shape().1) as f64;
        let value = Mat::from_elem((1, 1), a.value().sum() / count);
        let shape = a.value().raw_dim();
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, Mat::from_elem(shape, g[[0, 0]] / count));
                }
            }),
        ))
    }

    /// Sum across columns: `m x d -> m x 1`.
    pub fn row_sum(&self, a: &Var) -> Result<Var> {
        let value = a
            .value()
            .sum_axis(Axis(1))
            .insert_axis(Axis(1));
        let cols = a.shape().1;
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    let mut da = Mat::zeros((g.nrows(), cols));
                    for r in 0..g.nrows() {
                        da.row_mut(r).fill(g[[r, 0]]);
                    }
                    sink(id, da);
                }
            }),
        ))
    }

    /// Mean across rows: `n x d -> 1 x d`.
    pub fn col_mean(&self, a: &Var) -> Result<Var> {
        let n = a.shape().0 as f64;
        let value = a
            .value()
            .mean_axis(Axis(0))
            .expect("non-empty matrix")
            .insert_axis(Axis(0));
        let rows = a.shape().0;
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    let mut da = Mat::zeros((rows, g.ncols()));
                    for r in 0..rows {
                        da.row_mut(r).assign(&(&g.row(0) / n));
                    }
                    sink(id, da);
                }
            }),
        ))
    }

    /// Columns `start..end` of `a`.
    pub fn slice_cols(&self, a: &Var, start: usize, end: usize) -> Result<Var> {
        let (rows, cols) = a.shape();
        if start >= end || end > cols {
            return Err(shape_err(
                "slice_cols",
                format!("range {start}..{end} for {cols} columns"),
            ));
        }
        let value = a.value().slice(s![.., start..end]).to_owned();
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    let mut da = Mat::zeros((rows, cols));
                    da.slice_mut(s![.., start..end]).assign(g);
                    sink(id, da);
                }
            }),
        ))
    }

    /// Single entry `a[i][j]` as a `1 x 1` variable.
    pub fn entry(&self, a: &Var, i: usize, j: usize) -> Result<Var> {
        let (rows, cols) = a.shape();
        if i >= rows || j >= cols {
            return Err(shape_err(
                "entry",
                format!("({i}, {j}) out of range for {rows}x{cols}"),
            ));
        }
        let value = Mat::from_elem((1, 1), a.value()[[i, j]]);
        let an = a.node;
        Ok(self.record(
            an.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    let mut da = Mat::zeros((rows, cols));
                    da[[i, j]] = g[[0, 0]];
                    sink(id, da);
                }
            }),
        ))
    }

    /// `a - s` with `s` a `1 x 1` scalar broadcast over every entry.
    pub fn sub_scalarvar(&self, a: &Var, s: &Var) -> Result<Var> {
        if s.shape() != (1, 1) {
            return Err(shape_err("sub_scalarvar", format!("scalar is {:?}", s.shape())));
        }
        let value = a.value() - s.scalar();
        let (an, sn) = (a.node, s.node);
        Ok(self.record(
            an.is_some() || sn.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g.clone());
                }
                if let Some(id) = sn {
                    sink(id, Mat::from_elem((1, 1), -g.sum()));
                }
            }),
        ))
    }

    /// `a / s` with `s` a `1 x 1` scalar broadcast over every entry.
    pub fn div_scalarvar(&self, a: &Var, s: &Var) -> Result<Var> {
        if s.shape() != (1, 1) {
            return Err(shape_err("div_scalarvar", format!("scalar is {:?}", s.shape())));
        }
        let sval = s.scalar();
        let value = a.value() / sval;
        let av = a.value.clone();
        let (an, sn) = (a.node, s.node);
        Ok(self.record(
            an.is_some() || sn.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(id, g / sval);
                }
                if let Some(id) = sn {
                    let ds = -(g * &*av).sum() / (sval * sval);
                    sink(id, Mat::from_elem((1, 1), ds));
                }
            }),
        ))
    }

    /// `a + r` with `r` a `1 x d` row broadcast over the rows of `a`.
    pub fn add_rowbcast(&self, a: &Var, r: &Var) -> Result<Var> {
        self.rowbcast("add_rowbcast", a, r, |a, r| a + r)
    }

    /// `a - r` with `r` a `1 x d` row broadcast over the rows of `a`.
    pub fn sub_rowbcast(&self, a: &Var, r: &Var) -> Result<Var> {
        self.rowbcast("sub_rowbcast", a, r, |a, r| a - r)
    }

    /// `a * r` row broadcast.
    pub fn mul_rowbcast(&self, a: &Var, r: &Var) -> Result<Var> {
        self.rowbcast("mul_rowbcast", a, r, |a, r| a * r)
    }

    /// `a / r` row broadcast.
    pub fn div_rowbcast(&self, a: &Var, r: &Var) -> Result<Var> {
        self.rowbcast("div_rowbcast", a, r, |a, r| a / r)
    }

    fn rowbcast(
        &self,
        op: &'static str,
        a: &Var,
        r: &Var,
        f: fn(f64, f64) -> f64,
    ) -> Result<Var> {
        if r.shape().0 != 1 || r.shape().1 != a.shape().1 {
            return Err(shape_err(op, format!("{:?} with row {:?}", a.shape(), r.shape())));
        }
        let value = Mat::from_shape_fn(a.value().raw_dim(), |(i, j)| {
            f(a.value()[[i, j]], r.value()[[0, j]])
        });
        let (av, rv) = (a.value.clone(), r.value.clone());
        let (an, rn) = (a.node, r.node);
        Ok(self.record(
            an.is_some() || rn.is_some(),
            value,
            Box::new(move |g, sink| {
                match op {
                    "add_rowbcast" => {
                        if let Some(id) = an {
                            sink(id, g.clone());
                        }
                        if let Some(id) = rn {
                            sink(id, g.sum_axis(Axis(0)).insert_axis(Axis(0)));
                        }
                    }
                    "sub_rowbcast" => {
                        if let Some(id) = an {
                            sink(id, g.clone());
                        }
                        if let Some(id) = rn {
                            sink(id, -g.sum_axis(Axis(0)).insert_axis(Axis(0)));
                        }
                    }
                    "mul_rowbcast" => {
                        if let Some(id) = an {
                            sink(id, g * &rv.broadcast(g.raw_dim()).expect("bcast"));
                        }
                        if let Some(id) = rn {
                            sink(id, (g * &*av).sum_axis(Axis(0)).insert_axis(Axis(0)));
                        }
                    }
                    "div_rowbcast" => {
                        if let Some(id) = an {
                            sink(id, g / &rv.broadcast(g.raw_dim()).expect("bcast"));
                        }
                        if let Some(id) = rn {
                            let mut dr = Mat::zeros((1, g.ncols()));
                            for j in 0..g.ncols() {
                                let mut acc = 0.0;
                                for i in 0..g.nrows() {
                                    acc -= g[[i, j]] * av[[i, j]] / (rv[[0, j]] * rv[[0, j]]);
                                }
                                dr[[0, j]] = acc;
                            }
                            sink(id, dr);
                        }
                    }
                    _ => unreachable!(),
                }
            }),
        ))
    }

    /// Scale each row of `a` (`n x d`) by the matching entry of `s` (`n x 1`).
    pub fn scale_rows(&self, a: &Var, scales: &Var) -> Result<Var> {
        if scales.shape() != (a.shape().0, 1) {
            return Err(shape_err(
                "scale_rows",
                format!("{:?} with scales {:?}", a.shape(), scales.shape()),
            ));
        }
        let value = Mat::from_shape_fn(a.value().raw_dim(), |(i, j)| {
            a.value()[[i, j]] * scales.value()[[i, 0]]
        });
        let (av, sv) = (a.value.clone(), scales.value.clone());
        let (an, sn) = (a.node, scales.node);
        Ok(self.record(
            an.is_some() || sn.is_some(),
            value,
            Box::new(move |g, sink| {
                if let Some(id) = an {
                    sink(
                        id,
                        Mat::from_shape_fn(g.raw_dim(), |(i, j)| g[[i, j]] * sv[[i, 0]]),
                    );
                }
                if let Some(id) = sn {
                    let mut ds = Mat::zeros((g.nrows(), 1));
                    for i in 0..g.nrows() {
                        ds[[i, 0]] = (0..g.ncols()).map(|j| g[[i, j]] * av[[i, j]]).sum();
                    }
                    sink(id, ds);
                }
            }),
        ))
    }

    /// Mean squared error, `1 x 1`.
    pub fn mse_loss(&self, pred: &Var, target: &Var) -> Result<Var> {
        check_same_shape!("mse_loss", pred, target);
        let diff = self.sub(pred, target)?;
        let sq = self.mul(&diff, &diff)?;
        self.reduce_mean(&sq)
    }

    /// Mean absolute error, `1 x 1`.
    pub fn mae_loss(&self, pred: &Var, target: &Var) -> Result<Var> {
        check_same_shape!("mae_loss", pred, target);
        let count = (pred.shape().0 * pred.shape().1) as f64;
        let value = Mat::from_elem(
            (1, 1),
            (pred.value() - target.value()).mapv(f64::abs).sum() / count,
        );
        let (pv, tv) = (pred.value.clone(), target.value.clone());
        let (pn, tn) = (pred.node, target.node);
        Ok(self.record(
            pn.is_some() || tn.is_some(),
            value,
            Box::new(move |g, sink| {
                let sign = Mat::from_shape_fn(pv.raw_dim(), |(i, j)| {
                    let d = pv[[i, j]] - tv[[i, j]];
                    // subgradient 0 at the kink
                    let s = if d > 0.0 {
                        1.0
                    } else if d < 0.0 {
                        -1.0
                    } else {
                        0.0
                    };
                    s * g[[0, 0]] / count
                });
                if let Some(id) = pn {
                    sink(id, sign.clone());
                }
                if let Some(id) = tn {
                    sink(id, -sign);
                }
            }),
        ))
    }
}
