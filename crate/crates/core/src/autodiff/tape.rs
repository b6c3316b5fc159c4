use std::collections::HashMap;

use rand::Rng;

use super::tensor::Tensor;
use crate::error::{Error, Result};

/// One recorded node: the tensor an operation produced plus the backward
/// rule that distributes its adjoint to the operation's inputs.
struct Node {
    tensor: Tensor,
    op: Op,
}

enum Op {
    Leaf,
    /// `A @ B` with `A` 2-D and `B` 1-D or 2-D.
    MatMul(usize, usize),
    Add(usize, usize),
    Sub(usize, usize),
    /// Elementwise product; either side may be scalar.
    Mul(usize, usize),
    /// 1-D concatenation, split point = len of the left input.
    Concat(usize, usize),
    Tanh(usize),
    Sigmoid(usize),
    /// Inverted dropout; `mask` holds 0 or 1/(1-rate) per element.
    Dropout { input: usize, mask: Vec<f64> },
    /// Fused stable softmax + negative log likelihood of `gold`.
    SoftmaxCrossEntropy {
        logits: usize,
        gold: usize,
        probs: Vec<f64>,
    },
    /// Row extraction from a 2-D table (embedding lookup).
    Row { table: usize, row: usize },
    Sum(usize),
}

/// Define-by-run recording tape for reverse-mode differentiation.
///
/// Every forward op validates shapes, computes its output eagerly, and
/// records a backward rule. A tape is meant to live for one forward pass
/// (one sentence); build a fresh one per pass instead of clearing.
///
/// [`Tape::backward`] seeds the loss adjoint with 1 and walks the records
/// in reverse. Adjoints are scratch state local to the call; they are added
/// into each `requires_grad` tensor's grad accumulator at the end, so
/// calling backward twice accumulates twice.
pub struct Tape {
    nodes: Vec<Node>,
    index: HashMap<usize, usize>,
}

impl Tape {
    pub fn new() -> Tape {
        Tape {
            nodes: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Node id of `t` on this tape, interning it as a leaf if unseen.
    fn intern(&mut self, t: &Tensor) -> usize {
        let key = t.storage_id();
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            tensor: t.clone(),
            op: Op::Leaf,
        });
        self.index.insert(key, id);
        id
    }

    fn push(&mut self, out: Tensor, op: Op) -> Tensor {
        let id = self.nodes.len();
        self.index.insert(out.storage_id(), id);
        self.nodes.push(Node {
            tensor: out.clone(),
            op,
        });
        out
    }

    fn shape_err(op: &'static str, detail: String) -> Error {
        Error::ShapeMismatch { op, detail }
    }

    /// `A @ B`: `A` is `[m, n]`; `B` is `[n]` (giving `[m]`) or `[n, p]`
    /// (giving `[m, p]`).
    pub fn matmul(&mut self, a: &Tensor, b: &Tensor) -> Result<Tensor> {
        let sa = a.shape();
        let sb = b.shape();
        if sa.len() != 2 {
            return Err(Self::shape_err("matmul", format!("lhs must be 2-D, got {sa:?}")));
        }
        let (m, n) = (sa[0], sa[1]);
        let out = match sb.len() {
            1 => {
                if sb[0] != n {
                    return Err(Self::shape_err(
                        "matmul",
                        format!("inner dimensions differ: {sa:?} vs {sb:?}"),
                    ));
                }
                let mut y = vec![0.0; m];
                a.with_values(|av| {
                    b.with_values(|bv| {
                        for (yi, row) in y.iter_mut().zip(av.chunks_exact(n)) {
                            *yi = dot(row, bv);
                        }
                    })
                });
                Tensor::from_vec(&[m], y)
            }
            2 => {
                if sb[0] != n {
                    return Err(Self::shape_err(
                        "matmul",
                        format!("inner dimensions differ: {sa:?} vs {sb:?}"),
                    ));
                }
                let p = sb[1];
                let mut y = vec![0.0; m * p];
                a.with_values(|av| {
                    b.with_values(|bv| {
                        for i in 0..m {
                            for k in 0..n {
                                let aik = av[i * n + k];
                                if aik == 0.0 {
                                    continue;
                                }
                                let brow = &bv[k * p..(k + 1) * p];
                                let yrow = &mut y[i * p..(i + 1) * p];
                                for (yj, bj) in yrow.iter_mut().zip(brow) {
                                    *yj += aik * bj;
                                }
                            }
                        }
                    })
                });
                Tensor::from_vec(&[m, p], y)
            }
            _ => {
                return Err(Self::shape_err(
                    "matmul",
                    format!("rhs must be 1-D or 2-D, got {sb:?}"),
                ))
            }
        };
        let (ia, ib) = (self.intern(a), self.intern(b));
        Ok(self.push(out, Op::MatMul(ia, ib)))
    }

    pub fn add(&mut self, a: &Tensor, b: &Tensor) -> Result<Tensor> {
        self.zip_op("add", a, b, |x, y| x + y, false)
    }

    pub fn sub(&mut self, a: &Tensor, b: &Tensor) -> Result<Tensor> {
        self.zip_op("sub", a, b, |x, y| x - y, true)
    }

    pub fn elementwise_mul(&mut self, a: &Tensor, b: &Tensor) -> Result<Tensor> {
        let out = broadcast_zip("mul", a, b, |x, y| x * y)?;
        let (ia, ib) = (self.intern(a), self.intern(b));
        Ok(self.push(out, Op::Mul(ia, ib)))
    }

    fn zip_op(
        &mut self,
        name: &'static str,
        a: &Tensor,
        b: &Tensor,
        f: impl Fn(f64, f64) -> f64,
        is_sub: bool,
    ) -> Result<Tensor> {
        let out = broadcast_zip(name, a, b, f)?;
        let (ia, ib) = (self.intern(a), self.intern(b));
        let op = if is_sub { Op::Sub(ia, ib) } else { Op::Add(ia, ib) };
        Ok(self.push(out, op))
    }

    /// 1-D concatenation `a ++ b`.
    pub fn concat(&mut self, a: &Tensor, b: &Tensor) -> Result<Tensor> {
        if a.ndim() != 1 || b.ndim() != 1 {
            return Err(Self::shape_err(
                "concat",
                format!("1-D inputs required, got {:?} and {:?}", a.shape(), b.shape()),
            ));
        }
        let mut v = a.values();
        v.extend(b.values());
        let out = Tensor::from_vec(&[v.len()], v);
        let (ia, ib) = (self.intern(a), self.intern(b));
        Ok(self.push(out, Op::Concat(ia, ib)))
    }

    pub fn tanh(&mut self, a: &Tensor) -> Result<Tensor> {
        let v: Vec<f64> = a.with_values(|av| av.iter().map(|x| x.tanh()).collect());
        let out = Tensor::from_vec(&a.shape(), v);
        let ia = self.intern(a);
        Ok(self.push(out, Op::Tanh(ia)))
    }

    pub fn sigmoid(&mut self, a: &Tensor) -> Result<Tensor> {
        let v: Vec<f64> = a.with_values(|av| av.iter().map(|x| sigmoid(*x)).collect());
        let out = Tensor::from_vec(&a.shape(), v);
        let ia = self.intern(a);
        Ok(self.push(out, Op::Sigmoid(ia)))
    }

    /// Inverted dropout: each element is zeroed independently with
    /// probability `rate` and survivors are scaled by `1/(1-rate)`, so eval
    /// mode is the identity (the input tensor is returned unchanged).
    pub fn dropout<R: Rng>(
        &mut self,
        a: &Tensor,
        rate: f64,
        rng: &mut R,
        train_mode: bool,
    ) -> Result<Tensor> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::InvalidRate(rate));
        }
        if !train_mode || rate == 0.0 {
            return Ok(a.clone());
        }
        let scale = 1.0 / (1.0 - rate);
        let mask: Vec<f64> = (0..a.len())
            .map(|_| if rng.random::<f64>() < rate { 0.0 } else { scale })
            .collect();
        let v: Vec<f64> =
            a.with_values(|av| av.iter().zip(&mask).map(|(x, m)| x * m).collect());
        let out = Tensor::from_vec(&a.shape(), v);
        let ia = self.intern(a);
        Ok(self.push(out, Op::Dropout { input: ia, mask }))
    }

    /// Scalar loss `-ln softmax(logits)[gold]` with max-subtraction
    /// stabilization, fused so the backward rule is `p - onehot(gold)`.
    pub fn softmax_cross_entropy(&mut self, logits: &Tensor, gold: usize) -> Result<Tensor> {
        if logits.ndim() != 1 {
            return Err(Self::shape_err(
                "softmax_cross_entropy",
                format!("1-D logits required, got {:?}", logits.shape()),
            ));
        }
        let n = logits.len();
        if gold >= n {
            return Err(Error::IndexOutOfRange {
                what: "gold label",
                index: gold,
                size: n,
            });
        }
        let (probs, loss) = logits.with_values(|lv| {
            let probs = softmax(lv);
            let m = lv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let z: f64 = lv.iter().map(|x| (x - m).exp()).sum();
            (probs, z.ln() - (lv[gold] - m))
        });
        let out = Tensor::scalar(loss);
        let il = self.intern(logits);
        Ok(self.push(
            out,
            Op::SoftmaxCrossEntropy {
                logits: il,
                gold,
                probs,
            },
        ))
    }

    /// Differentiable row lookup into a 2-D table.
    pub fn row(&mut self, table: &Tensor, row: usize) -> Result<Tensor> {
        let s = table.shape();
        if s.len() != 2 {
            return Err(Self::shape_err(
                "row",
                format!("2-D table required, got {s:?}"),
            ));
        }
        let (r, c) = (s[0], s[1]);
        if row >= r {
            return Err(Error::IndexOutOfRange {
                what: "table row",
                index: row,
                size: r,
            });
        }
        let v = table.with_values(|tv| tv[row * c..(row + 1) * c].to_vec());
        let out = Tensor::from_vec(&[c], v);
        let it = self.intern(table);
        Ok(self.push(out, Op::Row { table: it, row }))
    }

    /// Sum of all elements, as a scalar.
    pub fn sum(&mut self, a: &Tensor) -> Result<Tensor> {
        let s = a.with_values(|av| av.iter().sum::<f64>());
        let out = Tensor::scalar(s);
        let ia = self.intern(a);
        Ok(self.push(out, Op::Sum(ia)))
    }

    /// Convenience: mean of all elements.
    pub fn mean(&mut self, a: &Tensor) -> Result<Tensor> {
        let n = a.len();
        let s = self.sum(a)?;
        self.elementwise_mul(&s, &Tensor::scalar(1.0 / n as f64))
    }

    /// Reverse pass from a scalar `loss` recorded on this tape.
    ///
    /// Adds `dLoss/dT` into the grad accumulator of every tensor on the
    /// tape with `requires_grad` set. Gradients are not zeroed first:
    /// calling backward twice accumulates twice.
    pub fn backward(&self, loss: &Tensor) -> Result<()> {
        let lid = *self
            .index
            .get(&loss.storage_id())
            .ok_or(Error::LossNotOnTape)?;
        if !loss.is_scalar() {
            return Err(Error::NotScalarLoss(loss.shape()));
        }

        let mut adjoints: Vec<Option<Vec<f64>>> = (0..=lid).map(|_| None).collect();
        adjoints[lid] = Some(vec![1.0]);

        for i in (0..=lid).rev() {
            let Some(g) = adjoints[i].take() else { continue };
            self.propagate(i, &g, &mut adjoints);
            let node = &self.nodes[i];
            if node.tensor.requires_grad() {
                node.tensor.accumulate_grad(&g);
            }
        }
        Ok(())
    }

    /// Distributes the adjoint `g` of node `i` to the node's inputs.
    fn propagate(&self, i: usize, g: &[f64], adjoints: &mut [Option<Vec<f64>>]) {
        let touch = |adjoints: &mut [Option<Vec<f64>>], id: usize, len: usize| {
            adjoints[id].get_or_insert_with(|| vec![0.0; len]);
        };
        match &self.nodes[i].op {
            Op::Leaf => {}
            Op::MatMul(ia, ib) => {
                let a = &self.nodes[*ia].tensor;
                let b = &self.nodes[*ib].tensor;
                let sa = a.shape();
                let (m, n) = (sa[0], sa[1]);
                touch(adjoints, *ia, a.len());
                touch(adjoints, *ib, b.len());
                if b.ndim() == 1 {
                    // dA += g ⊗ bᵀ ;  db += Aᵀ g
                    b.with_values(|bv| {
                        let da = adjoints[*ia].as_mut().unwrap();
                        for i in 0..m {
                            let gi = g[i];
                            if gi == 0.0 {
                                continue;
                            }
                            let row = &mut da[i * n..(i + 1) * n];
                            for (dj, bj) in row.iter_mut().zip(bv) {
                                *dj += gi * bj;
                            }
                        }
                    });
                    a.with_values(|av| {
                        let db = adjoints[*ib].as_mut().unwrap();
                        for i in 0..m {
                            let gi = g[i];
                            if gi == 0.0 {
                                continue;
                            }
                            let row = &av[i * n..(i + 1) * n];
                            for (dj, aj) in db.iter_mut().zip(row) {
                                *dj += gi * aj;
                            }
                        }
                    });
                } else {
                    let p = b.shape()[1];
                    // dA += g Bᵀ ; dB += Aᵀ g
                    b.with_values(|bv| {
                        let da = adjoints[*ia].as_mut().unwrap();
                        for i in 0..m {
                            for k in 0..n {
                                let mut acc = 0.0;
                                for j in 0..p {
                                    acc += g[i * p + j] * bv[k * p + j];
                                }
                                da[i * n + k] += acc;
                            }
                        }
                    });
                    a.with_values(|av| {
                        let db = adjoints[*ib].as_mut().unwrap();
                        for k in 0..n {
                            for i in 0..m {
                                let aik = av[i * n + k];
                                if aik == 0.0 {
                                    continue;
                                }
                                for j in 0..p {
                                    db[k * p + j] += aik * g[i * p + j];
                                }
                            }
                        }
                    });
                }
            }
            Op::Add(ia, ib) => {
                self.spread(*ia, g, 1.0, adjoints);
                self.spread(*ib, g, 1.0, adjoints);
            }
            Op::Sub(ia, ib) => {
                self.spread(*ia, g, 1.0, adjoints);
                self.spread(*ib, g, -1.0, adjoints);
            }
            Op::Mul(ia, ib) => {
                let a = &self.nodes[*ia].tensor;
                let b = &self.nodes[*ib].tensor;
                touch(adjoints, *ia, a.len());
                touch(adjoints, *ib, b.len());
                let (la, lb) = (a.len(), b.len());
                a.with_values(|av| {
                    b.with_values(|bv| {
                        let da = adjoints[*ia].as_mut().unwrap();
                        if la == lb {
                            for k in 0..la {
                                da[k] += g[k] * bv[k];
                            }
                        } else if la == 1 {
                            da[0] += g.iter().zip(bv).map(|(gk, bk)| gk * bk).sum::<f64>();
                        } else {
                            for k in 0..la {
                                da[k] += g[k] * bv[0];
                            }
                        }
                        let db = adjoints[*ib].as_mut().unwrap();
                        if la == lb {
                            for k in 0..lb {
                                db[k] += g[k] * av[k];
                            }
                        } else if lb == 1 {
                            db[0] += g.iter().zip(av).map(|(gk, ak)| gk * ak).sum::<f64>();
                        } else {
                            for k in 0..lb {
                                db[k] += g[k] * av[0];
                            }
                        }
                    })
                });
            }
            Op::Concat(ia, ib) => {
                let la = self.nodes[*ia].tensor.len();
                let lb = self.nodes[*ib].tensor.len();
                touch(adjoints, *ia, la);
                touch(adjoints, *ib, lb);
                let da = adjoints[*ia].as_mut().unwrap();
                for k in 0..la {
                    da[k] += g[k];
                }
                let db = adjoints[*ib].as_mut().unwrap();
                for k in 0..lb {
                    db[k] += g[k + la];
                }
            }
            Op::Tanh(ia) => {
                let y = &self.nodes[i].tensor;
                touch(adjoints, *ia, y.len());
                y.with_values(|yv| {
                    let da = adjoints[*ia].as_mut().unwrap();
                    for k in 0..yv.len() {
                        da[k] += g[k] * (1.0 - yv[k] * yv[k]);
                    }
                });
            }
            Op::Sigmoid(ia) => {
                let y = &self.nodes[i].tensor;
                touch(adjoints, *ia, y.len());
                y.with_values(|yv| {
                    let da = adjoints[*ia].as_mut().unwrap();
                    for k in 0..yv.len() {
                        da[k] += g[k] * yv[k] * (1.0 - yv[k]);
                    }
                });
            }
            Op::Dropout { input, mask } => {
                touch(adjoints, *input, mask.len());
                let da = adjoints[*input].as_mut().unwrap();
                for k in 0..mask.len() {
                    da[k] += g[k] * mask[k];
                }
            }
            Op::SoftmaxCrossEntropy { logits, gold, probs } => {
                touch(adjoints, *logits, probs.len());
                let da = adjoints[*logits].as_mut().unwrap();
                let g0 = g[0];
                for (k, p) in probs.iter().enumerate() {
                    let ind = if k == *gold { 1.0 } else { 0.0 };
                    da[k] += g0 * (p - ind);
                }
            }
            Op::Row { table, row } => {
                let t = &self.nodes[*table].tensor;
                let c = t.shape()[1];
                touch(adjoints, *table, t.len());
                let dt = adjoints[*table].as_mut().unwrap();
                for k in 0..c {
                    dt[row * c + k] += g[k];
                }
            }
            Op::Sum(ia) => {
                let la = self.nodes[*ia].tensor.len();
                touch(adjoints, *ia, la);
                let da = adjoints[*ia].as_mut().unwrap();
                for dk in da.iter_mut() {
                    *dk += g[0];
                }
            }
        }
    }

    /// Adds `sign * g` into the adjoint of node `id`, reducing by sum when
    /// the node is a broadcast scalar.
    fn spread(&self, id: usize, g: &[f64], sign: f64, adjoints: &mut [Option<Vec<f64>>]) {
        let len = self.nodes[id].tensor.len();
        let da = adjoints[id].get_or_insert_with(|| vec![0.0; len]);
        if len == g.len() {
            for k in 0..len {
                da[k] += sign * g[k];
            }
        } else {
            debug_assert_eq!(len, 1);
            da[0] += sign * g.iter().sum::<f64>();
        }
    }
}

impl Default for Tape {
    fn default() -> Self {
        Tape::new()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable softmax over a slice (max-subtraction form). This is
/// the value-level helper the fused loss op and the classifier trace share.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|x| (x - m).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / z).collect()
}

fn broadcast_zip(
    name: &'static str,
    a: &Tensor,
    b: &Tensor,
    f: impl Fn(f64, f64) -> f64,
) -> Result<Tensor> {
    let (sa, sb) = (a.shape(), b.shape());
    let (la, lb) = (a.len(), b.len());
    if sa == sb {
        let v = a.with_values(|av| {
            b.with_values(|bv| av.iter().zip(bv).map(|(x, y)| f(*x, *y)).collect::<Vec<_>>())
        });
        Ok(Tensor::from_vec(&sa, v))
    } else if la == 1 {
        let x = a.get(0);
        let v = b.with_values(|bv| bv.iter().map(|y| f(x, *y)).collect::<Vec<_>>());
        Ok(Tensor::from_vec(&sb, v))
    } else if lb == 1 {
        let y = b.get(0);
        let v = a.with_values(|av| av.iter().map(|x| f(*x, y)).collect::<Vec<_>>());
        Ok(Tensor::from_vec(&sa, v))
    } else {
        Err(Error::ShapeMismatch {
            op: name,
            detail: format!("shapes {sa:?} and {sb:?} (only scalar broadcast is supported)"),
        })
    }
}
