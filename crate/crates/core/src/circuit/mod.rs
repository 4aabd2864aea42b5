//! Arithmetic circuits with ordered product gates.
//!
//! A [`Circuit`] is a DAG of binary gates stored in topological order. The
//! child order of every `Mul` gate is significant: reading the same gates over
//! noncommuting variables gives the noncommutative version of the circuit.

mod homog;
mod linear;
mod parse;
mod poly;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, Integers, MatrixRing, PrimeField, Ring, RingSpec, RingValue};

pub use homog::homogenize;
pub use linear::{parse_sps, LinearForm, PiSigma, Sps};
pub use parse::parse_circuit;
pub use poly::{brute_expand, expand_words, Monomial, SparsePoly, WordPoly, DEFAULT_TERM_CAP};

pub type GateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    /// Variable `x_i`, 0-based.
    Input(usize),
    Const(BigInt),
    Add(GateId, GateId),
    Mul(GateId, GateId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: undefined gate `{name}`")]
    Undefined { line: usize, name: String },
    #[error("line {line}: gate `{name}` defined twice")]
    Duplicate { line: usize, name: String },
    #[error("cycle through gate `{name}`")]
    Cycle { name: String },
    #[error("missing `output` line")]
    MissingOutput,
    #[error("variable index {index} outside 1..={nvars}")]
    BadVariable { index: usize, nvars: usize },
    #[error("gate {gate}: {msg}")]
    Malformed { gate: GateId, msg: String },
    #[error("expansion exceeds {cap} terms")]
    TermCap { cap: usize },
    #[error("expected {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("degree {k} exceeds number of variables {n}")]
    DegreeTooLarge { k: usize, n: usize },
    #[error("form {index} is not homogeneous")]
    NotHomogeneous { index: usize },
    #[error("{0}")]
    Value(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    nvars: usize,
    gates: Vec<Gate>,
    output: GateId,
}

impl Circuit {
    /// Validates that children precede parents and variables are in range.
    pub fn new(nvars: usize, gates: Vec<Gate>, output: GateId) -> Result<Self, CircuitError> {
        if output >= gates.len() {
            return Err(CircuitError::MissingOutput);
        }
        for (id, g) in gates.iter().enumerate() {
            match *g {
                Gate::Input(i) if i >= nvars => {
                    return Err(CircuitError::BadVariable { index: i + 1, nvars });
                }
                Gate::Add(a, b) | Gate::Mul(a, b) if a >= id || b >= id => {
                    return Err(CircuitError::Malformed { gate: id, msg: "child does not precede parent".into() });
                }
                _ => {}
            }
        }
        Ok(Circuit { nvars, gates, output })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> GateId {
        self.output
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Syntactic degree of every gate (saturating).
    pub fn degrees(&self) -> Vec<u64> {
        let mut d: Vec<u64> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            d.push(match *g {
                Gate::Input(_) => 1,
                Gate::Const(_) => 0,
                Gate::Add(a, b) => d[a].max(d[b]),
                Gate::Mul(a, b) => d[a].saturating_add(d[b]),
            });
        }
        d
    }

    pub fn degree(&self) -> u64 {
        self.degrees()[self.output]
    }

    /// Evaluates gate by gate in `ring`, multiplying children in order.
    pub fn eval<R: Ring>(&self, ring: &R, point: &[R::Elem]) -> Result<R::Elem, CircuitError> {
        if point.len() != self.nvars {
            return Err(CircuitError::Arity { expected: self.nvars, got: point.len() });
        }
        for p in point {
            ring.check(p)?;
        }
        Ok(self.eval_unchecked(ring, point))
    }

    pub(crate) fn eval_unchecked<R: Ring>(&self, ring: &R, point: &[R::Elem]) -> R::Elem {
        let mut vals: Vec<R::Elem> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match g {
                Gate::Input(i) => point[*i].clone(),
                Gate::Const(c) => ring.from_bigint(c),
                Gate::Add(a, b) => ring.add(&vals[*a], &vals[*b]),
                Gate::Mul(a, b) => ring.mul(&vals[*a], &vals[*b]),
            };
            vals.push(v);
        }
        vals.swap_remove(self.output)
    }

    /// Evaluation at dynamically typed values; constants become scalar multiples of the identity.
    pub fn eval_value(&self, point: &[RingValue]) -> Result<RingValue, CircuitError> {
        if point.len() != self.nvars {
            return Err(CircuitError::Arity { expected: self.nvars, got: point.len() });
        }
        let (spec, dim) = match point.first() {
            Some(v) => (v.spec(), v.dim()),
            None => {
                let v = self.eval_unchecked(&Integers, &[]);
                return Ok(RingValue::Scalar { spec: RingSpec::Integer, value: v });
            }
        };
        for v in point {
            if v.spec() != spec {
                return Err(AlgebraError::RingMismatch { left: spec, right: v.spec() }.into());
            }
            if v.dim() != dim {
                return Err(AlgebraError::DimensionMismatch {
                    left: format!("{:?}", dim),
                    right: format!("{:?}", v.dim()),
                }
                .into());
            }
        }
        let field = spec.field()?;
        match dim {
            None => {
                let xs: Vec<BigInt> = point
                    .iter()
                    .map(|v| match v {
                        RingValue::Scalar { value, .. } => value.clone(),
                        RingValue::Matrix { .. } => unreachable!(),
                    })
                    .collect();
                let value = match field {
                    Some(f) => {
                        let ys: Vec<u64> = xs.iter().map(|x| f.from_bigint(x)).collect();
                        BigInt::from(self.eval_unchecked(&f, &ys))
                    }
                    None => self.eval_unchecked(&Integers, &xs),
                };
                Ok(RingValue::Scalar { spec, value })
            }
            Some(d) => {
                let ms: Vec<_> = point
                    .iter()
                    .map(|v| match v {
                        RingValue::Matrix { value, .. } => value.clone(),
                        RingValue::Scalar { .. } => unreachable!(),
                    })
                    .collect();
                let value = match field {
                    Some(f) => {
                        let ring = MatrixRing::new(f, d);
                        let ys: Vec<_> = ms.iter().map(|m| m.map(|x| f.from_bigint(x))).collect();
                        self.eval_unchecked(&ring, &ys).map(|&x| BigInt::from(x))
                    }
                    None => self.eval_unchecked(&MatrixRing::new(Integers, d), &ms),
                };
                Ok(RingValue::Matrix { spec, value })
            }
        }
    }

    /// Evaluation over a prime field at a point given by integers.
    pub fn eval_mod(&self, p: u64, point: &[i64]) -> Result<u64, CircuitError> {
        let f = PrimeField::new(p)?;
        let xs: Vec<u64> = point.iter().map(|&v| f.reduce_i64(v)).collect();
        self.eval(&f, &xs)
    }

    /// Drops gates the output does not depend on, keeping relative order.
    pub fn prune(&self) -> Circuit {
        let mut live = vec![false; self.gates.len()];
        live[self.output] = true;
        for id in (0..self.gates.len()).rev() {
            if !live[id] {
                continue;
            }
            if let Gate::Add(a, b) | Gate::Mul(a, b) = self.gates[id] {
                live[a] = true;
                live[b] = true;
            }
        }
        let mut remap = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        for (id, g) in self.gates.iter().enumerate() {
            if !live[id] {
                continue;
            }
            remap[id] = gates.len();
            gates.push(match g {
                Gate::Add(a, b) => Gate::Add(remap[*a], remap[*b]),
                Gate::Mul(a, b) => Gate::Mul(remap[*a], remap[*b]),
                other => other.clone(),
            });
        }
        Circuit { nvars: self.nvars, gates, output: remap[self.output] }
    }

    /// Same gates over a larger variable set.
    pub fn with_nvars(&self, nvars: usize) -> Result<Circuit, CircuitError> {
        Circuit::new(nvars, self.gates.clone(), self.output)
    }
}

/// Incremental circuit construction with shared input and constant gates.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    nvars: usize,
    gates: Vec<Gate>,
    inputs: HashMap<usize, GateId>,
    consts: HashMap<BigInt, GateId>,
}

impl CircuitBuilder {
    pub fn new(nvars: usize) -> Self {
        CircuitBuilder { nvars, gates: Vec::new(), inputs: HashMap::new(), consts: HashMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    fn push(&mut self, g: Gate) -> GateId {
        self.gates.push(g);
        self.gates.len() - 1
    }

    pub fn input(&mut self, i: usize) -> GateId {
        assert!(i < self.nvars, "variable {i} out of range");
        if let Some(&id) = self.inputs.get(&i) {
            return id;
        }
        let id = self.push(Gate::Input(i));
        self.inputs.insert(i, id);
        id
    }

    pub fn constant(&mut self, c: impl Into<BigInt>) -> GateId {
        let c = c.into();
        if let Some(&id) = self.consts.get(&c) {
            return id;
        }
        let id = self.push(Gate::Const(c.clone()));
        self.consts.insert(c, id);
        id
    }

    pub fn add(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Add(a, b))
    }

    pub fn mul(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Mul(a, b))
    }

    pub fn sub(&mut self, a: GateId, b: GateId) -> GateId {
        let m = self.constant(-1);
        let nb = self.mul(m, b);
        self.add(a, nb)
    }

    pub fn scale(&mut self, c: impl Into<BigInt>, a: GateId) -> GateId {
        let c = c.into();
        if c.is_one() {
            return a;
        }
        let k = self.constant(c);
        self.mul(k, a)
    }

    /// Left-associated sum; the empty sum is the constant 0.
    pub fn sum<I: IntoIterator<Item = GateId>>(&mut self, items: I) -> GateId {
        let mut it = items.into_iter();
        match it.next() {
            None => self.constant(0),
            Some(first) => it.fold(first, |acc, g| self.add(acc, g)),
        }
    }

    /// Left-associated product in the given order; the empty product is 1.
    pub fn product<I: IntoIterator<Item = GateId>>(&mut self, items: I) -> GateId {
        let mut it = items.into_iter();
        match it.next() {
            None => self.constant(1),
            Some(first) => it.fold(first, |acc, g| self.mul(acc, g)),
        }
    }

    pub fn linear_form(&mut self, f: &LinearForm) -> GateId {
        let mut parts = Vec::new();
        if !f.constant().is_zero() {
            parts.push(self.constant(f.constant().clone()));
        }
        for (v, c) in f.terms() {
            let x = self.input(v);
            parts.push(self.scale(c.clone(), x));
        }
        self.sum(parts)
    }

    /// `S_{|vars|,k}` over the given variables by the prefix dynamic program.
    pub fn elementary_symmetric(&mut self, vars: &[usize], k: usize) -> Result<GateId, CircuitError> {
        let n = vars.len();
        if k > n {
            return Err(CircuitError::DegreeTooLarge { k, n });
        }
        // e[j] = S_{i,j}(first i vars); only j that can still reach k are kept.
        let mut e: Vec<Option<GateId>> = vec![None; k + 1];
        e[0] = Some(self.constant(1));
        for (i, &v) in vars.iter().enumerate() {
            let x = self.input(v);
            let lo = k.saturating_sub(n - i - 1).max(1);
            let hi = (i + 1).min(k);
            for j in (lo..=hi).rev() {
                let with = e[j - 1].map(|p| if j == 1 { x } else { self.mul(p, x) });
                e[j] = match (e[j], with) {
                    (Some(a), Some(b)) => Some(self.add(a, b)),
                    (a, b) => a.or(b),
                };
            }
        }
        Ok(e[k].expect("k <= n"))
    }

    /// Copies the gates of `c`, renaming variable `i` to `var_map(i)`; returns the copied output.
    pub fn import(&mut self, c: &Circuit, var_map: impl Fn(usize) -> usize) -> GateId {
        let mut ids = Vec::with_capacity(c.len());
        for g in c.gates() {
            let id = match g {
                Gate::Input(i) => self.input(var_map(*i)),
                Gate::Const(v) => self.constant(v.clone()),
                Gate::Add(a, b) => self.add(ids[*a], ids[*b]),
                Gate::Mul(a, b) => self.mul(ids[*a], ids[*b]),
            };
            ids.push(id);
        }
        ids[c.output()]
    }

    pub fn finish(self, output: GateId) -> Result<Circuit, CircuitError> {
        Circuit::new(self.nvars, self.gates, output)
    }
}

/// `S_{n,k}` as a circuit with O(nk) gates.
pub fn elementary_symmetric(n: usize, k: usize) -> Result<Circuit, CircuitError> {
    let mut cb = CircuitBuilder::new(n);
    let vars: Vec<usize> = (0..n).collect();
    let out = cb.elementary_symmetric(&vars, k)?;
    Ok(cb.finish(out)?.prune())
}

/// The circuit computing `x_{i_1} x_{i_2} ... ` in the given order.
pub fn monomial_circuit(nvars: usize, vars: &[usize]) -> Circuit {
    let mut cb = CircuitBuilder::new(nvars);
    let xs: Vec<_> = vars.iter().map(|&v| cb.input(v)).collect();
    let out = cb.product(xs);
    cb.finish(out).expect("valid monomial")
}
