//! Tape-based reverse-mode automatic differentiation over scalars and dense
//! matrices.
//!
//! Every operation appends a node to a [`Tape`]; [`Tape::backward`] walks the
//! nodes in strictly decreasing id order and accumulates adjoints, so a tape
//! replay is deterministic and gradients are bit-identical across runs.
//!
//! Conventions:
//! - `min`/`max` route the gradient to the *first* argument at exact ties.
//! - `relu` has zero gradient at 0; `clamp` has zero gradient at its bounds.
//! - `powv(base, exp)` is recorded as `exp(exp * ln(max(base, 1e-8)))` so
//!   state-dependent bases may reach zero without poisoning the tape.
//! - Contract violations (cross-tape operands, shape mismatches, domain
//!   errors such as `ln` of a non-positive value) panic with a message naming
//!   the operation and node id. Computed values are additionally checked for
//!   NaN/Inf in debug builds.

mod gradcheck;
mod matrix;
mod special;

pub use gradcheck::{check_gradients, check_scalar_gradients, GradCheckEntry, GradCheckReport};
pub use matrix::Mat;
pub use special::{digamma, lgamma};

use std::cell::RefCell;
use std::sync::atomic::{AtomicU64, Ordering};

static NEXT_TAPE_ID: AtomicU64 = AtomicU64::new(1);

/// A value carried by a tape node: a scalar or a dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(f64),
    Matrix(Mat),
}

impl Value {
    pub fn shape(&self) -> Shape {
        match self {
            Value::Scalar(_) => Shape::Scalar,
            Value::Matrix(m) => Shape::Matrix(m.rows(), m.cols()),
        }
    }

    pub fn as_scalar(&self) -> f64 {
        match self {
            Value::Scalar(v) => *v,
            Value::Matrix(m) => panic!("expected scalar value, found {}x{} matrix", m.rows(), m.cols()),
        }
    }

    pub fn as_matrix(&self) -> &Mat {
        match self {
            Value::Matrix(m) => m,
            Value::Scalar(_) => panic!("expected matrix value, found scalar"),
        }
    }

    pub fn all_finite(&self) -> bool {
        match self {
            Value::Scalar(v) => v.is_finite(),
            Value::Matrix(m) => m.all_finite(),
        }
    }

}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Scalar,
    Matrix(usize, usize),
}

/// Handle to a tape node. Cheap to copy; all arithmetic goes through the tape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var {
    tape: u64,
    index: u32,
}

impl Var {
    pub fn index(&self) -> usize {
        self.index as usize
    }
}

#[derive(Clone, Copy, Debug)]
enum UnaryKind {
    Neg,
    Exp,
    Ln,
    Log10,
    Sqrt,
    Abs,
    Sigmoid,
    Tanh,
    Relu,
    Lgamma,
    PowConst(f64),
    Clamp { lo: f64, hi: f64 },
    /// Affine map `a * x + b` with constant coefficients.
    Axpb { a: f64, b: f64 },
}

impl UnaryKind {
    fn name(&self) -> &'static str {
        match self {
            UnaryKind::Neg => "neg",
            UnaryKind::Exp => "exp",
            UnaryKind::Ln => "ln",
            UnaryKind::Log10 => "log10",
            UnaryKind::Sqrt => "sqrt",
            UnaryKind::Abs => "abs",
            UnaryKind::Sigmoid => "sigmoid",
            UnaryKind::Tanh => "tanh",
            UnaryKind::Relu => "relu",
            UnaryKind::Lgamma => "lgamma",
            UnaryKind::PowConst(_) => "pow_const",
            UnaryKind::Clamp { .. } => "clamp",
            UnaryKind::Axpb { .. } => "axpb",
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum BinaryKind {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
    /// 1.0 where lhs < rhs, else 0.0. Zero gradient to both sides.
    IndicatorLt,
}

impl BinaryKind {
    fn name(&self) -> &'static str {
        match self {
            BinaryKind::Add => "add",
            BinaryKind::Sub => "sub",
            BinaryKind::Mul => "mul",
            BinaryKind::Div => "div",
            BinaryKind::Min => "min",
            BinaryKind::Max => "max",
            BinaryKind::IndicatorLt => "indicator_lt",
        }
    }
}

#[derive(Clone, Debug)]
enum Op {
    Leaf,
    Unary { kind: UnaryKind, input: u32 },
    Binary { kind: BinaryKind, lhs: u32, rhs: u32 },
    MatMul { lhs: u32, rhs: u32 },
    Transpose { input: u32 },
    SliceCols { input: u32, start: usize, len: usize },
    ConcatCols { parts: Vec<u32> },
    Sum { input: u32 },
    Mean { input: u32 },
}

#[derive(Clone, Debug)]
struct Node {
    op: Op,
    value: Value,
    needs_grad: bool,
}

/// Records operations for reverse-mode differentiation. One tape per thread
/// of simulation; tapes are not shared across threads.
pub struct Tape {
    id: u64,
    nodes: RefCell<Vec<Node>>,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Tape {
        Tape {
            id: NEXT_TAPE_ID.fetch_add(1, Ordering::Relaxed),
            nodes: RefCell::new(Vec::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push(&self, op: Op, value: Value, needs_grad: bool) -> Var {
        #[cfg(debug_assertions)]
        if !matches!(op, Op::Leaf) && !value.all_finite() {
            panic!(
                "non-finite value produced by op at node {}",
                self.nodes.borrow().len()
            );
        }
        let mut nodes = self.nodes.borrow_mut();
        let index = nodes.len();
        assert!(index <= u32::MAX as usize, "tape overflow");
        nodes.push(Node {
            op,
            value,
            needs_grad,
        });
        Var {
            tape: self.id,
            index: index as u32,
        }
    }

    fn check_owned(&self, v: Var, op: &str) {
        assert_eq!(
            v.tape, self.id,
            "{op}: operand node {} belongs to a different tape",
            v.index
        );
    }

    /// Differentiable scalar leaf.
    pub fn scalar_var(&self, value: f64) -> Var {
        self.push(Op::Leaf, Value::Scalar(value), true)
    }

    /// Non-differentiated scalar leaf.
    pub fn scalar(&self, value: f64) -> Var {
        self.push(Op::Leaf, Value::Scalar(value), false)
    }

    /// Differentiable matrix leaf.
    pub fn matrix_var(&self, value: Mat) -> Var {
        self.push(Op::Leaf, Value::Matrix(value), true)
    }

    /// Non-differentiated matrix leaf.
    pub fn matrix(&self, value: Mat) -> Var {
        self.push(Op::Leaf, Value::Matrix(value), false)
    }

    pub fn value(&self, v: Var) -> Value {
        self.check_owned(v, "value");
        self.nodes.borrow()[v.index()].value.clone()
    }

    pub fn scalar_value(&self, v: Var) -> f64 {
        self.check_owned(v, "scalar_value");
        self.nodes.borrow()[v.index()].value.as_scalar()
    }

    pub fn matrix_value(&self, v: Var) -> Mat {
        self.check_owned(v, "matrix_value");
        self.nodes.borrow()[v.index()].value.as_matrix().clone()
    }

    pub fn shape(&self, v: Var) -> Shape {
        self.check_owned(v, "shape");
        self.nodes.borrow()[v.index()].value.shape()
    }

    /// Whether gradients are tracked through this node.
    pub fn needs_grad(&self, v: Var) -> bool {
        self.nodes.borrow()[v.index()].needs_grad
    }

    // ── elementwise binary ops ──────────────────────────────────────────

    fn binary(&self, kind: BinaryKind, lhs: Var, rhs: Var) -> Var {
        self.check_owned(lhs, kind.name());
        self.check_owned(rhs, kind.name());
        let (value, needs) = {
            let nodes = self.nodes.borrow();
            let a = &nodes[lhs.index()].value;
            let b = &nodes[rhs.index()].value;
            let value = match kind {
                BinaryKind::Add => broadcast_zip(a, b, kind.name(), |x, y| x + y),
                BinaryKind::Sub => broadcast_zip(a, b, kind.name(), |x, y| x - y),
                BinaryKind::Mul => broadcast_zip(a, b, kind.name(), |x, y| x * y),
                BinaryKind::Div => {
                    let v = broadcast_zip(a, b, kind.name(), |x, y| x / y);
                    if !v.all_finite() {
                        let bad = match b {
                            Value::Scalar(y) => *y == 0.0,
                            Value::Matrix(m) => m.data().contains(&0.0),
                        };
                        if bad {
                            panic!(
                                "div: division by zero at node {} (op div)",
                                nodes.len()
                            );
                        }
                    }
                    v
                }
                BinaryKind::Min => broadcast_zip(a, b, kind.name(), f64::min),
                BinaryKind::Max => broadcast_zip(a, b, kind.name(), f64::max),
                BinaryKind::IndicatorLt => {
                    broadcast_zip(a, b, kind.name(), |x, y| if x < y { 1.0 } else { 0.0 })
                }
            };
            let needs = match kind {
                BinaryKind::IndicatorLt => false,
                _ => nodes[lhs.index()].needs_grad || nodes[rhs.index()].needs_grad,
            };
            (value, needs)
        };
        self.push(
            Op::Binary {
                kind,
                lhs: lhs.index,
                rhs: rhs.index,
            },
            value,
            needs,
        )
    }

    pub fn add(&self, a: Var, b: Var) -> Var {
        self.binary(BinaryKind::Add, a, b)
    }

    pub fn sub(&self, a: Var, b: Var) -> Var {
        self.binary(BinaryKind::Sub, a, b)
    }

    pub fn mul(&self, a: Var, b: Var) -> Var {
        self.binary(BinaryKind::Mul, a, b)
    }

    pub fn div(&self, a: Var, b: Var) -> Var {
        self.binary(BinaryKind::Div, a, b)
    }

    /// Elementwise minimum; ties send the gradient to the first argument.
    pub fn min(&self, a: Var, b: Var) -> Var {
        self.binary(BinaryKind::Min, a, b)
    }

    /// Elementwise maximum; ties send the gradient to the first argument.
    pub fn max(&self, a: Var, b: Var) -> Var {
        self.binary(BinaryKind::Max, a, b)
    }

    /// 1.0 where `a < b`, else 0.0. Piecewise constant, so no gradient flows
    /// through either argument.
    pub fn indicator_lt(&self, a: Var, b: Var) -> Var {
        self.binary(BinaryKind::IndicatorLt, a, b)
    }

    // ── elementwise unary ops ───────────────────────────────────────────

    fn unary(&self, kind: UnaryKind, input: Var) -> Var {
        self.check_owned(input, kind.name());
        let (value, needs) = {
            let nodes = self.nodes.borrow();
            let node_id = nodes.len();
            let x = &nodes[input.index()].value;
            let apply = |f: &dyn Fn(f64) -> f64| match x {
                Value::Scalar(v) => Value::Scalar(f(*v)),
                Value::Matrix(m) => Value::Matrix(m.map(f)),
            };
            let check_domain = |ok: &dyn Fn(f64) -> bool, what: &str| {
                let bad = match x {
                    Value::Scalar(v) => (!ok(*v)).then_some(*v),
                    Value::Matrix(m) => m.data().iter().copied().find(|&v| !ok(v)),
                };
                if let Some(v) = bad {
                    panic!(
                        "{}: domain violation ({what}, got {v}) at node {node_id} (op {})",
                        kind.name(),
                        kind.name()
                    );
                }
            };
            let value = match kind {
                UnaryKind::Neg => apply(&|v| -v),
                UnaryKind::Exp => apply(&f64::exp),
                UnaryKind::Ln => {
                    check_domain(&|v| v > 0.0, "argument must be positive");
                    apply(&f64::ln)
                }
                UnaryKind::Log10 => {
                    check_domain(&|v| v > 0.0, "argument must be positive");
                    apply(&f64::log10)
                }
                UnaryKind::Sqrt => {
                    check_domain(&|v| v >= 0.0, "argument must be non-negative");
                    apply(&f64::sqrt)
                }
                UnaryKind::Abs => apply(&f64::abs),
                UnaryKind::Sigmoid => apply(&sigmoid_f64),
                UnaryKind::Tanh => apply(&f64::tanh),
                UnaryKind::Relu => apply(&|v| v.max(0.0)),
                UnaryKind::Lgamma => {
                    check_domain(&|v| v > 0.0, "argument must be positive");
                    apply(&lgamma)
                }
                UnaryKind::PowConst(e) => apply(&|v| v.powf(e)),
                UnaryKind::Clamp { lo, hi } => apply(&|v| v.clamp(lo, hi)),
                UnaryKind::Axpb { a, b } => apply(&|v| a * v + b),
            };
            (value, nodes[input.index()].needs_grad)
        };
        self.push(
            Op::Unary {
                kind,
                input: input.index,
            },
            value,
            needs,
        )
    }

    pub fn neg(&self, x: Var) -> Var {
        self.unary(UnaryKind::Neg, x)
    }

    pub fn exp(&self, x: Var) -> Var {
        self.unary(UnaryKind::Exp, x)
    }

    pub fn ln(&self, x: Var) -> Var {
        self.unary(UnaryKind::Ln, x)
    }

    pub fn log10(&self, x: Var) -> Var {
        self.unary(UnaryKind::Log10, x)
    }

    pub fn sqrt(&self, x: Var) -> Var {
        self.unary(UnaryKind::Sqrt, x)
    }

    pub fn abs(&self, x: Var) -> Var {
        self.unary(UnaryKind::Abs, x)
    }

    pub fn sigmoid(&self, x: Var) -> Var {
        self.unary(UnaryKind::Sigmoid, x)
    }

    pub fn tanh(&self, x: Var) -> Var {
        self.unary(UnaryKind::Tanh, x)
    }

    pub fn relu(&self, x: Var) -> Var {
        self.unary(UnaryKind::Relu, x)
    }

    pub fn lgamma(&self, x: Var) -> Var {
        self.unary(UnaryKind::Lgamma, x)
    }

    /// `x` raised to a constant exponent.
    pub fn powc(&self, x: Var, exponent: f64) -> Var {
        self.unary(UnaryKind::PowConst(exponent), x)
    }

    pub fn clamp(&self, x: Var, lo: f64, hi: f64) -> Var {
        self.unary(UnaryKind::Clamp { lo, hi }, x)
    }

    pub fn clamp_min(&self, x: Var, lo: f64) -> Var {
        self.clamp(x, lo, f64::INFINITY)
    }

    /// Constant affine map `a * x + b`.
    pub fn axpb(&self, x: Var, a: f64, b: f64) -> Var {
        self.unary(UnaryKind::Axpb { a, b }, x)
    }

    pub fn add_const(&self, x: Var, c: f64) -> Var {
        self.axpb(x, 1.0, c)
    }

    pub fn mul_const(&self, x: Var, c: f64) -> Var {
        self.axpb(x, c, 0.0)
    }

    /// `base ^ exponent` with a variable exponent, recorded as
    /// `exp(exponent * ln(max(base, 1e-8)))`.
    pub fn powv(&self, base: Var, exponent: Var) -> Var {
        let safe = self.clamp_min(base, 1e-8);
        let log = self.ln(safe);
        let scaled = self.mul(exponent, log);
        self.exp(scaled)
    }

    // ── matrix structure ops ────────────────────────────────────────────

    pub fn matmul(&self, a: Var, b: Var) -> Var {
        self.check_owned(a, "matmul");
        self.check_owned(b, "matmul");
        let (value, needs) = {
            let nodes = self.nodes.borrow();
            let lhs = nodes[a.index()].value.as_matrix();
            let rhs = nodes[b.index()].value.as_matrix();
            (
                Value::Matrix(lhs.matmul(rhs)),
                nodes[a.index()].needs_grad || nodes[b.index()].needs_grad,
            )
        };
        self.push(
            Op::MatMul {
                lhs: a.index,
                rhs: b.index,
            },
            value,
            needs,
        )
    }

    pub fn transpose(&self, x: Var) -> Var {
        self.check_owned(x, "transpose");
        let (value, needs) = {
            let nodes = self.nodes.borrow();
            (
                Value::Matrix(nodes[x.index()].value.as_matrix().transposed()),
                nodes[x.index()].needs_grad,
            )
        };
        self.push(Op::Transpose { input: x.index }, value, needs)
    }

    /// Columns `[start, start + len)` of a matrix.
    pub fn slice_cols(&self, x: Var, start: usize, len: usize) -> Var {
        self.check_owned(x, "slice_cols");
        let (value, needs) = {
            let nodes = self.nodes.borrow();
            let m = nodes[x.index()].value.as_matrix();
            assert!(
                start + len <= m.cols(),
                "slice_cols: columns {}..{} out of bounds for {}x{}",
                start,
                start + len,
                m.rows(),
                m.cols()
            );
            let out = Mat::from_fn(m.rows(), len, |r, c| m.get(r, start + c));
            (Value::Matrix(out), nodes[x.index()].needs_grad)
        };
        self.push(
            Op::SliceCols {
                input: x.index,
                start,
                len,
            },
            value,
            needs,
        )
    }

    /// Horizontal concatenation of matrices with equal row counts.
    pub fn concat_cols(&self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty(), "concat_cols: no inputs");
        for p in parts {
            self.check_owned(*p, "concat_cols");
        }
        let (value, needs) = {
            let nodes = self.nodes.borrow();
            let mats: Vec<&Mat> = parts
                .iter()
                .map(|p| nodes[p.index()].value.as_matrix())
                .collect();
            let rows = mats[0].rows();
            assert!(
                mats.iter().all(|m| m.rows() == rows),
                "concat_cols: row counts differ"
            );
            let total_cols: usize = mats.iter().map(|m| m.cols()).sum();
            let mut out = Mat::zeros(rows, total_cols);
            let mut offset = 0;
            for m in &mats {
                for r in 0..rows {
                    for c in 0..m.cols() {
                        out.set(r, offset + c, m.get(r, c));
                    }
                }
                offset += m.cols();
            }
            let needs = parts.iter().any(|p| nodes[p.index()].needs_grad);
            (Value::Matrix(out), needs)
        };
        self.push(
            Op::ConcatCols {
                parts: parts.iter().map(|p| p.index).collect(),
            },
            value,
            needs,
        )
    }

    /// Sum of all elements, as a scalar.
    pub fn sum(&self, x: Var) -> Var {
        self.check_owned(x, "sum");
        let (value, needs) = {
            let nodes = self.nodes.borrow();
            let v = match &nodes[x.index()].value {
                Value::Scalar(s) => *s,
                Value::Matrix(m) => m.sum(),
            };
            (Value::Scalar(v), nodes[x.index()].needs_grad)
        };
        self.push(Op::Sum { input: x.index }, value, needs)
    }

    /// Mean of all elements, as a scalar.
    pub fn mean(&self, x: Var) -> Var {
        self.check_owned(x, "mean");
        let (value, needs) = {
            let nodes = self.nodes.borrow();
            let v = match &nodes[x.index()].value {
                Value::Scalar(s) => *s,
                Value::Matrix(m) => m.sum() / m.len() as f64,
            };
            (Value::Scalar(v), nodes[x.index()].needs_grad)
        };
        self.push(Op::Mean { input: x.index }, value, needs)
    }

    // ── reverse pass ────────────────────────────────────────────────────

    /// Reverse-accumulate gradients of a scalar `output` with respect to
    /// every differentiable node at or below it. Panics if `output` is not
    /// scalar-valued or lives on another tape.
    pub fn backward(&self, output: Var) -> GradientMap {
        self.check_owned(output, "backward");
        let nodes = self.nodes.borrow();
        let out_idx = output.index();
        assert!(
            matches!(nodes[out_idx].value, Value::Scalar(_)),
            "backward: output node {out_idx} is not scalar-valued"
        );
        let mut adjoints: Vec<Option<Value>> = vec![None; out_idx + 1];
        adjoints[out_idx] = Some(Value::Scalar(1.0));

        for i in (0..=out_idx).rev() {
            if adjoints[i].is_none() || !nodes[i].needs_grad {
                continue;
            }
            // Parents always have smaller ids, so the split keeps the
            // current adjoint readable while parents are written.
            let (parents, rest) = adjoints.split_at_mut(i);
            let grad = rest[0].as_ref().unwrap();
            let node = &nodes[i];
            match &node.op {
                Op::Leaf => {}
                Op::Unary { kind, input } => {
                    let x = &nodes[*input as usize].value;
                    let y = &node.value;
                    let contrib = unary_backward(*kind, grad, x, y);
                    if nodes[*input as usize].needs_grad {
                        accumulate(&mut parents[*input as usize], contrib, x.shape());
                    }
                }
                Op::Binary { kind, lhs, rhs } => {
                    let a = &nodes[*lhs as usize].value;
                    let b = &nodes[*rhs as usize].value;
                    if let Some((da, db)) = binary_backward(*kind, grad, a, b) {
                        if nodes[*lhs as usize].needs_grad {
                            accumulate(&mut parents[*lhs as usize], da, a.shape());
                        }
                        if nodes[*rhs as usize].needs_grad {
                            accumulate(&mut parents[*rhs as usize], db, b.shape());
                        }
                    }
                }
                Op::MatMul { lhs, rhs } => {
                    let a = nodes[*lhs as usize].value.as_matrix();
                    let b = nodes[*rhs as usize].value.as_matrix();
                    let g = grad.as_matrix();
                    if nodes[*lhs as usize].needs_grad {
                        let da = g.matmul(&b.transposed());
                        accumulate(
                            &mut parents[*lhs as usize],
                            Value::Matrix(da),
                            Shape::Matrix(a.rows(), a.cols()),
                        );
                    }
                    if nodes[*rhs as usize].needs_grad {
                        let db = a.transposed().matmul(g);
                        accumulate(
                            &mut parents[*rhs as usize],
                            Value::Matrix(db),
                            Shape::Matrix(b.rows(), b.cols()),
                        );
                    }
                }
                Op::Transpose { input } => {
                    if nodes[*input as usize].needs_grad {
                        let g = grad.as_matrix().transposed();
                        let shape = nodes[*input as usize].value.shape();
                        accumulate(&mut parents[*input as usize], Value::Matrix(g), shape);
                    }
                }
                Op::SliceCols { input, start, len } => {
                    if nodes[*input as usize].needs_grad {
                        let parent = nodes[*input as usize].value.as_matrix();
                        let g = grad.as_matrix();
                        let mut padded = Mat::zeros(parent.rows(), parent.cols());
                        for r in 0..parent.rows() {
                            for c in 0..*len {
                                padded.set(r, start + c, g.get(r, c));
                            }
                        }
                        accumulate(
                            &mut parents[*input as usize],
                            Value::Matrix(padded),
                            Shape::Matrix(parent.rows(), parent.cols()),
                        );
                    }
                }
                Op::ConcatCols { parts } => {
                    let g = grad.as_matrix();
                    let mut offset = 0;
                    for p in parts {
                        let part = nodes[*p as usize].value.as_matrix();
                        let cols = part.cols();
                        if nodes[*p as usize].needs_grad {
                            let block =
                                Mat::from_fn(part.rows(), cols, |r, c| g.get(r, offset + c));
                            accumulate(
                                &mut parents[*p as usize],
                                Value::Matrix(block),
                                Shape::Matrix(part.rows(), cols),
                            );
                        }
                        offset += cols;
                    }
                }
                Op::Sum { input } => {
                    if nodes[*input as usize].needs_grad {
                        let g = grad.as_scalar();
                        let shape = nodes[*input as usize].value.shape();
                        let contrib = match shape {
                            Shape::Scalar => Value::Scalar(g),
                            Shape::Matrix(r, c) => Value::Matrix(Mat::filled(r, c, g)),
                        };
                        accumulate(&mut parents[*input as usize], contrib, shape);
                    }
                }
                Op::Mean { input } => {
                    if nodes[*input as usize].needs_grad {
                        let g = grad.as_scalar();
                        let shape = nodes[*input as usize].value.shape();
                        let contrib = match shape {
                            Shape::Scalar => Value::Scalar(g),
                            Shape::Matrix(r, c) => {
                                Value::Matrix(Mat::filled(r, c, g / (r * c) as f64))
                            }
                        };
                        accumulate(&mut parents[*input as usize], contrib, shape);
                    }
                }
            }
        }

        GradientMap {
            tape: self.id,
            adjoints,
        }
    }
}

fn sigmoid_f64(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Gradients of a scalar output, indexed by tape node.
pub struct GradientMap {
    tape: u64,
    adjoints: Vec<Option<Value>>,
}

impl GradientMap {
    pub fn grad(&self, v: Var) -> Option<&Value> {
        assert_eq!(v.tape, self.tape, "gradient lookup from a different tape");
        self.adjoints.get(v.index()).and_then(|a| a.as_ref())
    }

    /// Scalar gradient; zero if no gradient reached the node.
    pub fn grad_scalar(&self, v: Var) -> f64 {
        match self.grad(v) {
            Some(val) => val.as_scalar(),
            None => 0.0,
        }
    }

    /// Matrix gradient with the given shape; zeros if none reached the node.
    pub fn grad_matrix(&self, v: Var, rows: usize, cols: usize) -> Mat {
        match self.grad(v) {
            Some(Value::Matrix(m)) => {
                assert_eq!(m.shape(), (rows, cols), "gradient shape mismatch");
                m.clone()
            }
            Some(Value::Scalar(_)) => panic!("scalar gradient where matrix expected"),
            None => Mat::zeros(rows, cols),
        }
    }
}

// ── broadcasting helpers ───────────────────────────────────────────────

fn broadcast_shape(a: Shape, b: Shape, op: &str) -> Shape {
    match (a, b) {
        (Shape::Scalar, s) | (s, Shape::Scalar) => s,
        (Shape::Matrix(ar, ac), Shape::Matrix(br, bc)) => {
            if ar == br && ac == bc {
                Shape::Matrix(ar, ac)
            } else if ar == 1 && ac == bc {
                Shape::Matrix(br, bc)
            } else if br == 1 && bc == ac {
                Shape::Matrix(ar, ac)
            } else if ac == 1 && ar == br {
                Shape::Matrix(ar, bc)
            } else if bc == 1 && br == ar {
                Shape::Matrix(ar, ac)
            } else {
                panic!("{op}: incompatible shapes {ar}x{ac} and {br}x{bc}")
            }
        }
    }
}

#[inline]
fn fetch(v: &Value, r: usize, c: usize) -> f64 {
    match v {
        Value::Scalar(s) => *s,
        Value::Matrix(m) => {
            let rr = if m.rows() == 1 { 0 } else { r };
            let cc = if m.cols() == 1 { 0 } else { c };
            m.get(rr, cc)
        }
    }
}

fn broadcast_zip(a: &Value, b: &Value, op: &str, f: impl Fn(f64, f64) -> f64) -> Value {
    match broadcast_shape(a.shape(), b.shape(), op) {
        Shape::Scalar => Value::Scalar(f(a.as_scalar(), b.as_scalar())),
        Shape::Matrix(rows, cols) => {
            // Fast path: both operands already have the output shape.
            if let (Value::Matrix(ma), Value::Matrix(mb)) = (a, b) {
                if ma.shape() == (rows, cols) && mb.shape() == (rows, cols) {
                    return Value::Matrix(ma.zip(mb, f));
                }
            }
            Value::Matrix(Mat::from_fn(rows, cols, |r, c| {
                f(fetch(a, r, c), fetch(b, r, c))
            }))
        }
    }
}

fn broadcast_zip3(
    a: &Value,
    b: &Value,
    c: &Value,
    op: &str,
    f: impl Fn(f64, f64, f64) -> f64,
) -> Value {
    let s = broadcast_shape(broadcast_shape(a.shape(), b.shape(), op), c.shape(), op);
    match s {
        Shape::Scalar => Value::Scalar(f(a.as_scalar(), b.as_scalar(), c.as_scalar())),
        Shape::Matrix(rows, cols) => Value::Matrix(Mat::from_fn(rows, cols, |r, cc| {
            f(fetch(a, r, cc), fetch(b, r, cc), fetch(c, r, cc))
        })),
    }
}

/// Reduce a full-shape adjoint down to the shape of a broadcast operand by
/// summing over the broadcast dimensions.
fn reduce_to_shape(full: Value, target: Shape) -> Value {
    match (full, target) {
        (v, t) if v.shape() == t => v,
        (Value::Matrix(m), Shape::Scalar) => Value::Scalar(m.sum()),
        (Value::Scalar(s), Shape::Matrix(r, c)) => Value::Matrix(Mat::filled(r, c, s)),
        (Value::Matrix(m), Shape::Matrix(tr, tc)) => {
            let mut out = Mat::zeros(tr, tc);
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    let rr = if tr == 1 { 0 } else { r };
                    let cc = if tc == 1 { 0 } else { c };
                    out.set(rr, cc, out.get(rr, cc) + m.get(r, c));
                }
            }
            Value::Matrix(out)
        }
        (v, t) => panic!("cannot reduce adjoint {:?} to {:?}", v.shape(), t),
    }
}

fn accumulate(slot: &mut Option<Value>, contribution: Value, target: Shape) {
    let reduced = reduce_to_shape(contribution, target);
    match slot {
        None => *slot = Some(reduced),
        Some(Value::Scalar(s)) => *s += reduced.as_scalar(),
        Some(Value::Matrix(m)) => m.add_assign(reduced.as_matrix()),
    }
}

fn unary_backward(kind: UnaryKind, grad: &Value, x: &Value, y: &Value) -> Value {
    let op = kind.name();
    match kind {
        UnaryKind::Neg => broadcast_zip(grad, x, op, |g, _| -g),
        UnaryKind::Exp => broadcast_zip(grad, y, op, |g, yv| g * yv),
        UnaryKind::Ln => broadcast_zip(grad, x, op, |g, xv| g / xv),
        UnaryKind::Log10 => {
            broadcast_zip(grad, x, op, |g, xv| g / (xv * std::f64::consts::LN_10))
        }
        UnaryKind::Sqrt => broadcast_zip(grad, y, op, |g, yv| g / (2.0 * yv)),
        UnaryKind::Abs => broadcast_zip(grad, x, op, |g, xv| {
            if xv > 0.0 {
                g
            } else if xv < 0.0 {
                -g
            } else {
                0.0
            }
        }),
        UnaryKind::Sigmoid => broadcast_zip(grad, y, op, |g, yv| g * yv * (1.0 - yv)),
        UnaryKind::Tanh => broadcast_zip(grad, y, op, |g, yv| g * (1.0 - yv * yv)),
        UnaryKind::Relu => broadcast_zip(grad, x, op, |g, xv| if xv > 0.0 { g } else { 0.0 }),
        UnaryKind::Lgamma => broadcast_zip(grad, x, op, |g, xv| g * digamma(xv)),
        UnaryKind::PowConst(e) => {
            broadcast_zip(grad, x, op, move |g, xv| g * e * xv.powf(e - 1.0))
        }
        UnaryKind::Clamp { lo, hi } => broadcast_zip(grad, x, op, move |g, xv| {
            if xv > lo && xv < hi {
                g
            } else {
                0.0
            }
        }),
        UnaryKind::Axpb { a, .. } => broadcast_zip(grad, x, op, move |g, _| g * a),
    }
}

fn binary_backward(
    kind: BinaryKind,
    grad: &Value,
    a: &Value,
    b: &Value,
) -> Option<(Value, Value)> {
    let op = kind.name();
    match kind {
        BinaryKind::Add => Some((grad.clone(), grad.clone())),
        BinaryKind::Sub => {
            let db = broadcast_zip(grad, a, op, |g, _| -g);
            Some((grad.clone(), db))
        }
        BinaryKind::Mul => {
            let da = broadcast_zip(grad, b, op, |g, bv| g * bv);
            let db = broadcast_zip(grad, a, op, |g, av| g * av);
            Some((da, db))
        }
        BinaryKind::Div => {
            let da = broadcast_zip(grad, b, op, |g, bv| g / bv);
            let db = broadcast_zip3(grad, a, b, op, |g, av, bv| -g * av / (bv * bv));
            Some((da, db))
        }
        BinaryKind::Min => {
            let da = broadcast_zip3(grad, a, b, op, |g, av, bv| if av <= bv { g } else { 0.0 });
            let db = broadcast_zip3(grad, a, b, op, |g, av, bv| if av <= bv { 0.0 } else { g });
            Some((da, db))
        }
        BinaryKind::Max => {
            let da = broadcast_zip3(grad, a, b, op, |g, av, bv| if av >= bv { g } else { 0.0 });
            let db = broadcast_zip3(grad, a, b, op, |g, av, bv| if av >= bv { 0.0 } else { g });
            Some((da, db))
        }
        BinaryKind::IndicatorLt => None,
    }
}
