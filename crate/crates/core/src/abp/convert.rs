//! Circuit to branching program conversion.
//!
//! The structural route follows the classical depth-reduction argument: the
//! degree-`k` part of the circuit is put in a normal form of linear leaves,
//! binary products (heavier child first) and weighted sums of products, and
//! every node is split at the unique product on its heavy path whose degree
//! crosses half of the target. The programs are built from those splittings by
//! series and parallel composition, with memoization on nodes and node pairs.
//! The result computes the commutative polynomial; word order is not kept.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Abp, AbpError, Layer};
use crate::circuit::{brute_expand, homogenize, Circuit, CircuitError, Gate, LinearForm, SparsePoly};

pub const DEFAULT_WIDTH_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ConvertStrategy {
    /// Expansion when the polynomial is small, the structural route otherwise.
    #[default]
    Auto,
    Structural,
    Expansion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbpOptions {
    pub strategy: ConvertStrategy,
    pub width_cap: usize,
    /// Term budget for the expansion route.
    pub term_cap: usize,
}

impl Default for AbpOptions {
    fn default() -> Self {
        AbpOptions { strategy: ConvertStrategy::Auto, width_cap: DEFAULT_WIDTH_CAP, term_cap: 20_000 }
    }
}

/// A homogeneous program with `k` layers computing the degree-`k` part of `c`.
pub fn circuit_to_abp(c: &Circuit, k: usize, opts: &AbpOptions) -> Result<Abp, AbpError> {
    if k == 0 {
        let p = brute_expand(c, Some(0), opts.term_cap.max(1))?;
        return Err(AbpError::DegreeZero { constant: p.coeff(&crate::circuit::Monomial::one()) });
    }
    match opts.strategy {
        ConvertStrategy::Expansion => expansion(c, k, opts),
        ConvertStrategy::Structural => structural(c, k, opts.width_cap),
        ConvertStrategy::Auto => match expansion(c, k, opts) {
            Ok(a) => Ok(a),
            Err(AbpError::WidthCap { .. }) | Err(AbpError::Circuit(CircuitError::TermCap { .. })) => {
                structural(c, k, opts.width_cap)
            }
            Err(e) => Err(e),
        },
    }
}

fn expansion(c: &Circuit, k: usize, opts: &AbpOptions) -> Result<Abp, AbpError> {
    let p = brute_expand(c, Some(k as u32), opts.term_cap)?.homogeneous_part(k as u32);
    poly_to_abp(c.nvars(), k, &p, opts.width_cap)
}

/// A prefix trie over the sorted variable lists of the monomials of `p`.
///
/// Layer `j < k` moves from a prefix of length `j-1` to its extensions; the last
/// layer carries the coefficients. `p` must be homogeneous of degree `k`.
pub(crate) fn poly_to_abp(nvars: usize, k: usize, p: &SparsePoly, width_cap: usize) -> Result<Abp, AbpError> {
    if p.is_empty() {
        return Ok(Abp::zero(nvars, k));
    }
    let mons: Vec<(Vec<usize>, &BigInt)> = p
        .terms()
        .map(|(m, c)| {
            let mut vars = Vec::with_capacity(k);
            for &(v, e) in m.pairs() {
                vars.extend(std::iter::repeat_n(v, e as usize));
            }
            assert_eq!(vars.len(), k, "poly_to_abp needs a homogeneous polynomial");
            (vars, c)
        })
        .collect();
    let mut levels: Vec<BTreeMap<&[usize], usize>> = vec![BTreeMap::new(); k];
    for (vars, _) in &mons {
        for (j, level) in levels.iter_mut().enumerate() {
            let n = level.len();
            level.entry(&vars[..j]).or_insert(n);
        }
    }
    let width = levels.iter().map(BTreeMap::len).max().unwrap_or(1);
    if width > width_cap {
        return Err(AbpError::WidthCap { width, cap: width_cap });
    }
    let mut layers = Vec::with_capacity(k);
    for j in 1..k {
        let mut l = Layer::zeros(levels[j - 1].len(), levels[j].len());
        for (prefix, &col) in &levels[j] {
            let row = levels[j - 1][&prefix[..j - 1]];
            l.set(row, col, LinearForm::var(prefix[j - 1]));
        }
        layers.push(l);
    }
    let mut last = Layer::zeros(levels[k - 1].len(), 1);
    for (vars, c) in &mons {
        let row = levels[k - 1][&vars[..k - 1]];
        let mut f = last.get(row, 0).clone();
        f.add_term(vars[k - 1], (*c).clone());
        last.set(row, 0, f);
    }
    layers.push(last);
    Abp::new(nvars, layers)
}

type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Linear(LinearForm),
    /// Products with their coefficients, sorted by id.
    Sum(Vec<(BigInt, NodeId)>),
    /// Heavier child first.
    Prod(NodeId, NodeId),
}

#[derive(Clone, Debug)]
enum Rep {
    Zero,
    Scalar(BigInt),
    Node(NodeId),
}

#[derive(Clone, Debug)]
enum Piece {
    Zero,
    Scalar(BigInt),
    Abp(Abp),
}

struct Builder {
    nvars: usize,
    width_cap: usize,
    nodes: Vec<Node>,
    deg: Vec<usize>,
    intern: HashMap<Node, NodeId>,
    reach: Vec<Vec<u64>>,
    prods: Vec<NodeId>,
    gate_memo: HashMap<NodeId, Piece>,
    part_memo: HashMap<(NodeId, NodeId), Piece>,
}

impl Builder {
    fn node(&mut self, n: Node) -> NodeId {
        if let Some(&id) = self.intern.get(&n) {
            return id;
        }
        let d = match &n {
            Node::Linear(_) => 1,
            Node::Sum(t) => self.deg[t[0].1],
            Node::Prod(a, b) => self.deg[*a] + self.deg[*b],
        };
        let id = self.nodes.len();
        self.nodes.push(n.clone());
        self.deg.push(d);
        self.intern.insert(n, id);
        id
    }

    fn lin(&mut self, f: LinearForm) -> Rep {
        if f.is_zero() {
            Rep::Zero
        } else {
            Rep::Node(self.node(Node::Linear(f)))
        }
    }

    fn sum(&mut self, terms: BTreeMap<NodeId, BigInt>) -> Rep {
        let t: Vec<(BigInt, NodeId)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).map(|(p, c)| (c, p)).collect();
        if t.is_empty() {
            Rep::Zero
        } else {
            Rep::Node(self.node(Node::Sum(t)))
        }
    }

    fn sum_terms(&self, u: NodeId) -> BTreeMap<NodeId, BigInt> {
        match &self.nodes[u] {
            Node::Sum(t) => t.iter().map(|(c, p)| (*p, c.clone())).collect(),
            _ => unreachable!("gate values are linear forms or sums"),
        }
    }

    fn scale(&mut self, r: &Rep, c: &BigInt) -> Rep {
        if c.is_zero() {
            return Rep::Zero;
        }
        match r {
            Rep::Zero => Rep::Zero,
            Rep::Scalar(s) => Rep::Scalar(s * c),
            Rep::Node(u) => match self.nodes[*u].clone() {
                Node::Linear(f) => self.lin(f.scale(c)),
                _ => {
                    let t = self.sum_terms(*u).into_iter().map(|(p, x)| (p, x * c)).collect();
                    self.sum(t)
                }
            },
        }
    }

    fn add(&mut self, a: &Rep, b: &Rep) -> Result<Rep, AbpError> {
        Ok(match (a, b) {
            (Rep::Zero, x) | (x, Rep::Zero) => x.clone(),
            (Rep::Scalar(x), Rep::Scalar(y)) => {
                let s = x + y;
                if s.is_zero() {
                    Rep::Zero
                } else {
                    Rep::Scalar(s)
                }
            }
            (Rep::Node(u), Rep::Node(v)) if self.deg[*u] == self.deg[*v] => {
                match (self.nodes[*u].clone(), self.nodes[*v].clone()) {
                    (Node::Linear(f), Node::Linear(g)) => self.lin(f.add(&g)),
                    _ => {
                        let mut t = self.sum_terms(*u);
                        for (p, c) in self.sum_terms(*v) {
                            *t.entry(p).or_insert_with(BigInt::zero) += c;
                        }
                        self.sum(t)
                    }
                }
            }
            _ => return Err(AbpError::Mismatch("sum of parts of different degrees".into())),
        })
    }

    fn mul(&mut self, a: &Rep, b: &Rep) -> Rep {
        match (a, b) {
            (Rep::Zero, _) | (_, Rep::Zero) => Rep::Zero,
            (Rep::Scalar(c), x) | (x, Rep::Scalar(c)) => {
                let x = x.clone();
                self.scale(&x, c)
            }
            (Rep::Node(u), Rep::Node(v)) => {
                let (h, l) = if self.deg[*u] >= self.deg[*v] { (*u, *v) } else { (*v, *u) };
                let p = self.node(Node::Prod(h, l));
                self.sum(BTreeMap::from([(p, BigInt::one())]))
            }
        }
    }

    /// Heavy-path reachability: sums reach their products, products their heavier child.
    fn compute_reach(&mut self) {
        let n = self.nodes.len();
        let words = n.div_ceil(64);
        let mut reach: Vec<Vec<u64>> = Vec::with_capacity(n);
        for u in 0..n {
            let mut r = vec![0u64; words];
            r[u / 64] |= 1 << (u % 64);
            let kids: Vec<NodeId> = match &self.nodes[u] {
                Node::Linear(_) => vec![],
                Node::Sum(t) => t.iter().map(|x| x.1).collect(),
                Node::Prod(h, _) => vec![*h],
            };
            for kid in kids {
                for (w, x) in r.iter_mut().zip(&reach[kid]) {
                    *w |= x;
                }
            }
            reach.push(r);
        }
        self.reach = reach;
        self.prods = (0..n).filter(|&u| matches!(self.nodes[u], Node::Prod(..))).collect();
    }

    fn reaches(&self, u: NodeId, v: NodeId) -> bool {
        self.reach[u][v / 64] >> (v % 64) & 1 == 1
    }

    fn check(&self, a: Abp) -> Result<Abp, AbpError> {
        let width = a.max_width();
        if width > self.width_cap {
            return Err(AbpError::WidthCap { width, cap: self.width_cap });
        }
        Ok(a)
    }

    fn piece_mul(&self, a: Piece, b: Piece) -> Result<Piece, AbpError> {
        Ok(match (a, b) {
            (Piece::Zero, _) | (_, Piece::Zero) => Piece::Zero,
            (Piece::Scalar(x), Piece::Scalar(y)) => Piece::Scalar(x * y),
            (Piece::Scalar(c), Piece::Abp(a)) | (Piece::Abp(a), Piece::Scalar(c)) => Piece::Abp(a.scale(&c)),
            (Piece::Abp(a), Piece::Abp(b)) => Piece::Abp(a.series(&b)?),
        })
    }

    fn piece_add(&self, a: Piece, b: Piece) -> Result<Piece, AbpError> {
        Ok(match (a, b) {
            (Piece::Zero, x) | (x, Piece::Zero) => x,
            (Piece::Scalar(x), Piece::Scalar(y)) => Piece::Scalar(x + y),
            (Piece::Abp(a), Piece::Abp(b)) => Piece::Abp(self.check(a.parallel(&b)?.trim())?),
            _ => return Err(AbpError::Mismatch("sum of parts of different degrees".into())),
        })
    }

    fn children(&self, t: NodeId) -> (NodeId, NodeId) {
        match self.nodes[t] {
            Node::Prod(a, b) => (a, b),
            _ => unreachable!("not a product"),
        }
    }

    /// The polynomial of node `u` as a program.
    fn gate(&mut self, u: NodeId) -> Result<Piece, AbpError> {
        if let Some(p) = self.gate_memo.get(&u) {
            return Ok(p.clone());
        }
        let out = match self.nodes[u].clone() {
            Node::Linear(f) => Piece::Abp(Abp::from_forms(self.nvars, &[f])?),
            Node::Prod(a, b) => {
                let (x, y) = (self.gate(a)?, self.gate(b)?);
                self.piece_mul(x, y)?
            }
            Node::Sum(_) => {
                let m = self.deg[u] / 2;
                let mut acc = Piece::Zero;
                for t in self.prods.clone() {
                    let (t1, t2) = self.children(t);
                    if self.deg[t] <= m || self.deg[t1] > m || !self.reaches(u, t) {
                        continue;
                    }
                    let head = self.part(u, t)?;
                    let (g1, g2) = (self.gate(t1)?, self.gate(t2)?);
                    let term = self.piece_mul(self.piece_mul(head, g1)?, g2)?;
                    acc = self.piece_add(acc, term)?;
                }
                acc
            }
        };
        self.gate_memo.insert(u, out.clone());
        Ok(out)
    }

    /// `[u : v]`: the cofactor of `v` along heavy paths from `u`, of degree `deg u - deg v`.
    fn part(&mut self, u: NodeId, v: NodeId) -> Result<Piece, AbpError> {
        if !self.reaches(u, v) {
            return Ok(Piece::Zero);
        }
        if let Some(p) = self.part_memo.get(&(u, v)) {
            return Ok(p.clone());
        }
        let e = self.deg[u] - self.deg[v];
        let out = if e == 0 {
            if u == v {
                Piece::Scalar(BigInt::one())
            } else {
                match &self.nodes[u] {
                    Node::Sum(t) => t.iter().find(|x| x.1 == v).map_or(Piece::Zero, |x| Piece::Scalar(x.0.clone())),
                    _ => Piece::Zero,
                }
            }
        } else {
            let m = self.deg[v] + e / 2;
            let mut acc = Piece::Zero;
            for t in self.prods.clone() {
                let (t1, t2) = self.children(t);
                if self.deg[t] <= m || self.deg[t1] > m || !self.reaches(u, t) || !self.reaches(t1, v) {
                    continue;
                }
                let head = self.part(u, t)?;
                let tail = self.part(t1, v)?;
                let g2 = self.gate(t2)?;
                let term = self.piece_mul(self.piece_mul(head, tail)?, g2)?;
                acc = self.piece_add(acc, term)?;
            }
            acc
        };
        self.part_memo.insert((u, v), out.clone());
        Ok(out)
    }
}

fn structural(c: &Circuit, k: usize, width_cap: usize) -> Result<Abp, AbpError> {
    let h = homogenize(c, k);
    let mut b = Builder {
        nvars: c.nvars(),
        width_cap,
        nodes: Vec::new(),
        deg: Vec::new(),
        intern: HashMap::new(),
        reach: Vec::new(),
        prods: Vec::new(),
        gate_memo: HashMap::new(),
        part_memo: HashMap::new(),
    };
    let mut reps: Vec<Rep> = Vec::with_capacity(h.len());
    for g in h.gates() {
        let r = match g {
            Gate::Input(i) => b.lin(LinearForm::var(*i)),
            Gate::Const(v) if v.is_zero() => Rep::Zero,
            Gate::Const(v) => Rep::Scalar(v.clone()),
            Gate::Add(x, y) => b.add(&reps[*x], &reps[*y])?,
            Gate::Mul(x, y) => b.mul(&reps[*x], &reps[*y]),
        };
        reps.push(r);
    }
    let out = match &reps[h.output()] {
        Rep::Zero => return Ok(Abp::zero(c.nvars(), k)),
        Rep::Scalar(_) => unreachable!("degree-k part with k > 0 is not a nonzero constant"),
        Rep::Node(u) => *u,
    };
    b.compute_reach();
    match b.gate(out)? {
        Piece::Abp(a) => b.check(a.trim()),
        Piece::Zero => Ok(Abp::zero(c.nvars(), k)),
        Piece::Scalar(_) => unreachable!("positive degree"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{elementary_symmetric, DEFAULT_TERM_CAP};

    fn opts(strategy: ConvertStrategy) -> AbpOptions {
        AbpOptions { strategy, ..AbpOptions::default() }
    }

    #[test]
    fn product_of_forms_gives_width_one() {
        let mut rng = crate::gen::rng(5);
        for k in 1..=5 {
            let ps = crate::gen::random_pisigma(&mut rng, 4, k, -2, 2);
            let a = circuit_to_abp(&ps.to_circuit(), k, &opts(ConvertStrategy::Structural)).unwrap();
            assert_eq!(a.max_width(), 1, "k {k}");
            assert!(a.is_homogeneous());
            assert_eq!(a.expand(DEFAULT_TERM_CAP).unwrap(), ps.expand());
        }
    }

    #[test]
    fn elementary_symmetric_both_routes() {
        for n in 1..=6 {
            for k in 1..=n {
                let c = elementary_symmetric(n, k).unwrap();
                let want = brute_expand(&c, None, DEFAULT_TERM_CAP).unwrap();
                for s in [ConvertStrategy::Structural, ConvertStrategy::Expansion, ConvertStrategy::Auto] {
                    let a = circuit_to_abp(&c, k, &opts(s)).unwrap();
                    assert_eq!(a.len(), k);
                    assert!(a.is_homogeneous());
                    assert_eq!(a.expand(DEFAULT_TERM_CAP).unwrap(), want, "n {n} k {k} {s:?}");
                }
            }
        }
    }

    #[test]
    fn random_circuits_match_expansion() {
        for seed in 0..80 {
            let mut rng = crate::gen::rng(seed);
            let c = crate::gen::random_circuit(&mut rng, 5, 8 + seed as usize % 16, 5);
            let full = brute_expand(&c, None, DEFAULT_TERM_CAP).unwrap();
            for k in 1..=5u32 {
                let want = full.homogeneous_part(k);
                for s in [ConvertStrategy::Structural, ConvertStrategy::Expansion] {
                    let a = circuit_to_abp(&c, k as usize, &opts(s)).unwrap();
                    assert_eq!(a.len(), k as usize);
                    assert_eq!(a.expand(DEFAULT_TERM_CAP).unwrap(), want, "seed {seed} k {k} {s:?}");
                }
            }
        }
    }

    #[test]
    fn degree_zero_and_caps() {
        let c = crate::circuit::parse_circuit("ninputs 1\nc = const 4\nx = input 1\ns = add c x\noutput s\n").unwrap();
        assert_eq!(
            circuit_to_abp(&c, 0, &AbpOptions::default()).unwrap_err(),
            AbpError::DegreeZero { constant: BigInt::from(4) }
        );
        let s = elementary_symmetric(8, 4).unwrap();
        let tight = AbpOptions { strategy: ConvertStrategy::Expansion, width_cap: 3, ..AbpOptions::default() };
        assert!(matches!(circuit_to_abp(&s, 4, &tight), Err(AbpError::WidthCap { cap: 3, .. })));
        let few = AbpOptions { strategy: ConvertStrategy::Expansion, term_cap: 5, ..AbpOptions::default() };
        assert!(matches!(circuit_to_abp(&s, 4, &few), Err(AbpError::Circuit(CircuitError::TermCap { .. }))));
        let auto = AbpOptions { term_cap: 5, ..AbpOptions::default() };
        let a = circuit_to_abp(&s, 4, &auto).unwrap();
        assert_eq!(a.expand(DEFAULT_TERM_CAP).unwrap(), brute_expand(&s, None, DEFAULT_TERM_CAP).unwrap());
    }
}
