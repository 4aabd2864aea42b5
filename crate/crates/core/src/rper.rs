//! Rectangular permanents over noncommutative rings.
//!
//! `rper(A) = Σ_σ a_{1,σ(1)} a_{2,σ(2)} ... a_{k,σ(k)}` over injections
//! `σ: [k] -> [n]`, with the product taken in row order. [`s_star_eval`]
//! evaluates the symmetrized elementary symmetric polynomial on matrices as
//! the permanent of the matrix with identical rows.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{
    reduce_bigint, AlgebraError, Counted, Integers, MatrixRing, Ring, RingSpec, RingValue,
};

/// Bitmask subsets limit the halves scheme to this many columns.
pub const MAX_HALVES_COLUMNS: usize = 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RperError {
    #[error("{k} rows exceed {n} columns")]
    Shape { k: usize, n: usize },
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("the halves scheme supports at most {max} columns, got {n}")]
    TooManyColumns { n: usize, max: usize },
    #[error("brute force needs {needed} injections, budget is {limit}")]
    BruteBudget { needed: u128, limit: u64 },
    #[error("rectangular Ryser needs {needed} subsets, budget is {limit}")]
    RyserBudget { needed: u128, limit: u64 },
    #[error("halves needs {needed} table entries, budget is {limit}; the ryser algorithm needs no tables")]
    HalvesMemory { needed: u128, limit: u64 },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RperAlgo {
    /// The defining sum over injections.
    Brute,
    RectRyser,
    #[default]
    Halves,
}

impl fmt::Display for RperAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RperAlgo::Brute => "oracle",
            RperAlgo::RectRyser => "ryser",
            RperAlgo::Halves => "halves",
        })
    }
}

impl FromStr for RperAlgo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "oracle" | "brute" => Ok(RperAlgo::Brute),
            "ryser" | "rect-ryser" => Ok(RperAlgo::RectRyser),
            "halves" => Ok(RperAlgo::Halves),
            _ => Err(format!("unknown algorithm `{s}` (expected halves, ryser or oracle)")),
        }
    }
}

/// Work limits; exceeding one is an error rather than a long run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RperBudget {
    pub brute_injections: u64,
    pub ryser_subsets: u64,
    pub halves_entries: u64,
}

impl Default for RperBudget {
    fn default() -> Self {
        RperBudget { brute_injections: 20_000_000, ryser_subsets: 200_000_000, halves_entries: 20_000_000 }
    }
}

/// A `k × n` matrix over some ring, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectMatrix<E> {
    k: usize,
    n: usize,
    entries: Vec<E>,
}

impl<E: Clone> RectMatrix<E> {
    pub fn new(k: usize, n: usize, entries: Vec<E>) -> Result<Self, RperError> {
        if k > n {
            return Err(RperError::Shape { k, n });
        }
        if entries.len() != k * n {
            return Err(RperError::EntryCount { expected: k * n, found: entries.len() });
        }
        Ok(RectMatrix { k, n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Result<Self, RperError> {
        let k = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(RperError::EntryCount { expected: n, found: r.len() });
        }
        RectMatrix::new(k, n, rows.into_iter().flatten().collect())
    }

    /// `k` copies of `row`.
    pub fn identical_rows(k: usize, row: &[E]) -> Result<Self, RperError> {
        RectMatrix::new(k, row.len(), (0..k).flat_map(|_| row.iter().cloned()).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[E] {
        &self.entries
    }

    pub fn map<T: Clone>(&self, f: impl FnMut(&E) -> T) -> RectMatrix<T> {
        RectMatrix { k: self.k, n: self.n, entries: self.entries.iter().map(f).collect() }
    }

    pub fn swap_rows(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        for j in 0..self.n {
            out.entries.swap(a * self.n + j, b * self.n + j);
        }
        out
    }
}

/// `C(n, k)` as a `u128`, saturating.
pub fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// `Σ_{j ≤ k} C(n, j)`.
pub fn binom_down(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).map(|j| binom(n, j)).fold(0u128, u128::saturating_add)
}

/// The coefficient `(-1)^{k-u} C(n-u, k-u)` of a column set of size `u`.
pub fn rect_ryser_coefficient(n: usize, k: usize, u: usize) -> BigInt {
    let c = num_integer::binomial(BigInt::from(n - u), BigInt::from(k - u));
    if (k - u) % 2 == 1 {
        -c
    } else {
        c
    }
}

pub fn rper<R: Ring>(ring: &R, a: &RectMatrix<R::Elem>, algo: RperAlgo, budget: &RperBudget) -> Result<R::Elem, RperError> {
    match algo {
        RperAlgo::Brute => rper_brute(ring, a, budget),
        RperAlgo::RectRyser => rper_rect_ryser(ring, a, budget),
        RperAlgo::Halves => rper_halves(ring, a, budget),
    }
}

/// Depth-first enumeration of injections, keeping the row-order prefix product.
pub fn rper_brute<R: Ring>(ring: &R, a: &RectMatrix<R::Elem>, budget: &RperBudget) -> Result<R::Elem, RperError> {
    let needed = (0..a.k).fold(1u128, |acc, i| acc.saturating_mul((a.n - i) as u128));
    if needed > budget.brute_injections as u128 {
        return Err(RperError::BruteBudget { needed, limit: budget.brute_injections });
    }
    fn go<R: Ring>(ring: &R, a: &RectMatrix<R::Elem>, row: usize, used: &mut [bool], prefix: &R::Elem, acc: &mut R::Elem) {
        if row == a.k {
            ring.add_assign(acc, prefix);
            return;
        }
        for j in 0..a.n {
            if used[j] {
                continue;
            }
            used[j] = true;
            let next = if row == 0 { a.get(0, j).clone() } else { ring.mul(prefix, a.get(row, j)) };
            go(ring, a, row + 1, used, &next, acc);
            used[j] = false;
        }
    }
    let mut acc = ring.zero();
    go(ring, a, 0, &mut vec![false; a.n], &ring.one(), &mut acc);
    Ok(acc)
}

/// `Σ_{|U| ≤ k} (-1)^{k-|U|} C(n-|U|, k-|U|) Π_i (Σ_{j∈U} a_ij)`.
///
/// Column sets are visited depth-first so each row sum costs one addition per
/// step; products are bucketed by `|U|` and scaled once per bucket.
pub fn rper_rect_ryser<R: Ring>(ring: &R, a: &RectMatrix<R::Elem>, budget: &RperBudget) -> Result<R::Elem, RperError> {
    let (k, n) = (a.k, a.n);
    let needed = binom_down(n, k);
    if needed > budget.ryser_subsets as u128 {
        return Err(RperError::RyserBudget { needed, limit: budget.ryser_subsets });
    }
    if k == 0 {
        return Ok(ring.one());
    }
    let mut buckets: Vec<R::Elem> = vec![ring.zero(); k + 1];
    // sums[d] holds the row sums for the current set of size d.
    let mut sums: Vec<Vec<R::Elem>> = vec![vec![ring.zero(); k]; k + 1];
    fn go<R: Ring>(
        ring: &R,
        a: &RectMatrix<R::Elem>,
        start: usize,
        depth: usize,
        sums: &mut Vec<Vec<R::Elem>>,
        buckets: &mut [R::Elem],
    ) {
        for j in start..a.n {
            let (lo, hi) = sums.split_at_mut(depth + 1);
            for i in 0..a.k {
                hi[0][i] = if depth == 0 { a.get(i, j).clone() } else { ring.add(&lo[depth][i], a.get(i, j)) };
            }
            let s = &hi[0];
            let mut p = s[0].clone();
            for x in &s[1..] {
                p = ring.mul(&p, x);
            }
            ring.add_assign(&mut buckets[depth + 1], &p);
            if depth + 1 < a.k {
                go(ring, a, j + 1, depth + 1, sums, buckets);
            }
        }
    }
    go(ring, a, 0, 0, &mut sums, &mut buckets);
    let mut acc = ring.zero();
    for (u, b) in buckets.iter().enumerate().skip(1) {
        if !ring.is_zero(b) {
            ring.add_assign(&mut acc, &ring.scale_int(b, &rect_ryser_coefficient(n, k, u)));
        }
    }
    Ok(acc)
}

/// Binomial table for colex ranks of subsets of `[0, 64)`.
struct Ranker {
    c: Vec<Vec<u64>>,
}

impl Ranker {
    fn new(n: usize) -> Self {
        let mut c = vec![vec![0u64; n + 2]; n + 2];
        for i in 0..n + 2 {
            c[i][0] = 1;
            for j in 1..=i {
                c[i][j] = c[i - 1][j - 1].saturating_add(if j < i { c[i - 1][j] } else { 0 });
            }
        }
        Ranker { c }
    }

    /// Colex rank of `mask` among sets of its size.
    fn rank(&self, mut mask: u64) -> usize {
        let mut r = 0u64;
        let mut i = 1;
        while mask != 0 {
            let e = mask.trailing_zeros() as usize;
            r += self.c[e][i];
            i += 1;
            mask &= mask - 1;
        }
        r as usize
    }
}

/// Subsets of `[0, n)` of size `s` in colex order (Gosper's hack).
fn combinations(n: usize, s: usize) -> impl Iterator<Item = u64> {
    let first: u64 = if s == 0 { 0 } else { (1u64 << s) - 1 };
    let limit: u64 = 1u64 << n;
    let mut cur = Some(first);
    std::iter::from_fn(move || {
        let x = cur?;
        if s > n {
            cur = None;
            return None;
        }
        cur = if x == 0 {
            None
        } else {
            let c = x & x.wrapping_neg();
            let r = x + c;
            let nx = (((r ^ x) >> 2) / c) | r;
            (nx < limit).then_some(nx)
        };
        Some(x)
    })
}

/// `F(U) = Σ_{V⊆U} (-1)^{|U|-|V|} Π_{i∈rows} (Σ_{j∈V} a_ij)`: the sum over
/// row-order words on `rows` that use every column of `U` exactly once.
///
/// `|U|` must equal the number of rows. Subsets `V` are visited in Gray-code order.
pub fn exact_cover_sum<R: Ring>(ring: &R, a: &RectMatrix<R::Elem>, rows: std::ops::Range<usize>, u: u64) -> R::Elem {
    let h = rows.len();
    if h == 0 {
        return ring.one();
    }
    let cols: Vec<usize> = (0..64).filter(|&j| u >> j & 1 == 1).collect();
    debug_assert_eq!(cols.len(), h);
    let mut sums: Vec<R::Elem> = vec![ring.zero(); h];
    let mut acc = ring.zero();
    let mut gray = 0u64;
    for step in 1u64..(1 << h) {
        let bit = step.trailing_zeros() as usize;
        gray ^= 1 << bit;
        let j = cols[bit];
        let adding = gray >> bit & 1 == 1;
        for (s, i) in sums.iter_mut().zip(rows.clone()) {
            if adding {
                ring.add_assign(s, a.get(i, j));
            } else {
                ring.sub_assign(s, a.get(i, j));
            }
        }
        let mut p = sums[0].clone();
        for x in &sums[1..] {
            p = ring.mul(&p, x);
        }
        if (h - gray.count_ones() as usize).is_multiple_of(2) {
            ring.add_assign(&mut acc, &p);
        } else {
            ring.sub_assign(&mut acc, &p);
        }
    }
    acc
}

/// Superset sums of the exact-cover values, by size and colex rank.
#[derive(Clone, Debug)]
pub struct HalvesTables<E> {
    pub h1: usize,
    pub h2: usize,
    /// `g1[s][rank(W)] = Σ_{U⊇W, |U|=h1} F_1(U)` for `|W| = s ≤ h2`.
    pub g1: Vec<Vec<E>>,
    pub g2: Vec<Vec<E>>,
}

/// Number of ring values held by the halves tables.
pub fn halves_table_size(n: usize, k: usize) -> u128 {
    2 * binom_down(n, k / 2)
}

pub fn halves_tables<R: Ring>(ring: &R, a: &RectMatrix<R::Elem>, budget: &RperBudget) -> Result<HalvesTables<R::Elem>, RperError> {
    let (k, n) = (a.k, a.n);
    if n > MAX_HALVES_COLUMNS {
        return Err(RperError::TooManyColumns { n, max: MAX_HALVES_COLUMNS });
    }
    let needed = halves_table_size(n, k);
    if needed > budget.halves_entries as u128 {
        return Err(RperError::HalvesMemory { needed, limit: budget.halves_entries });
    }
    let (h1, h2) = (k.div_ceil(2), k / 2);
    let ranker = Ranker::new(n);
    let table = |rows: std::ops::Range<usize>| -> Vec<Vec<R::Elem>> {
        let h = rows.len();
        let mut g: Vec<Vec<R::Elem>> = (0..=h2).map(|s| vec![ring.zero(); binom(n, s) as usize]).collect();
        let all: Vec<u64> = combinations(n, h).collect();
        for chunk in all.chunks(1 << 12) {
            let fs: Vec<R::Elem> = chunk.par_iter().map(|&u| exact_cover_sum(ring, a, rows.clone(), u)).collect();
            for (&u, f) in chunk.iter().zip(&fs) {
                if ring.is_zero(f) {
                    continue;
                }
                // Every subset W of U with |W| ≤ h2.
                let mut w = u;
                loop {
                    let s = w.count_ones() as usize;
                    if s <= h2 {
                        ring.add_assign(&mut g[s][ranker.rank(w)], f);
                    }
                    if w == 0 {
                        break;
                    }
                    w = (w - 1) & u;
                }
            }
        }
        g
    };
    let g1 = table(0..h1);
    let g2 = table(h1..k);
    Ok(HalvesTables { h1, h2, g1, g2 })
}

/// `Σ_{|W| ≤ h2} (-1)^{|W|} G_1(W) G_2(W)` with rows split into halves of sizes `⌈k/2⌉` and `⌊k/2⌋`.
///
/// Inclusion-exclusion over `W` removes pairs of column sets that overlap.
pub fn rper_halves<R: Ring>(ring: &R, a: &RectMatrix<R::Elem>, budget: &RperBudget) -> Result<R::Elem, RperError> {
    let t = halves_tables(ring, a, budget)?;
    let mut acc = ring.zero();
    for s in 0..=t.h2 {
        for (x, y) in t.g1[s].iter().zip(&t.g2[s]) {
            if ring.is_zero(x) || ring.is_zero(y) {
                continue;
            }
            let p = ring.mul(x, y);
            if s % 2 == 0 {
                ring.add_assign(&mut acc, &p);
            } else {
                ring.sub_assign(&mut acc, &p);
            }
        }
    }
    Ok(acc)
}

/// `S*_{n,k}(M_1, ..., M_n)`: the permanent of the `k × n` matrix whose rows are all `(M_1, ..., M_n)`.
pub fn s_star_eval<R: Ring>(ring: &R, mats: &[R::Elem], k: usize, algo: RperAlgo, budget: &RperBudget) -> Result<R::Elem, RperError> {
    rper(ring, &RectMatrix::identical_rows(k, mats)?, algo, budget)
}

/// Value and ring-operation count of a permanent over checked values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RperRun {
    pub value: RingValue,
    pub ops: u64,
}

/// [`rper`] over [`RingValue`] entries: all entries must share a ring and a shape.
pub fn rper_values(a: &RectMatrix<RingValue>, algo: RperAlgo, budget: &RperBudget) -> Result<RperRun, RperError> {
    let Some(first) = a.entries.first() else {
        return Ok(RperRun { value: RingValue::scalar(RingSpec::Integer, 1)?, ops: 0 });
    };
    let (spec, dim) = (first.spec(), first.dim());
    for v in &a.entries {
        if v.spec() != spec {
            return Err(AlgebraError::RingMismatch { left: spec, right: v.spec() }.into());
        }
        if v.dim() != dim {
            return Err(AlgebraError::DimensionMismatch { left: format!("{dim:?}"), right: format!("{:?}", v.dim()) }.into());
        }
    }
    fn run<R: Ring>(ring: R, a: RectMatrix<R::Elem>, algo: RperAlgo, budget: &RperBudget) -> Result<(R::Elem, u64), RperError> {
        let counted = Counted::new(ring);
        let v = rper(&counted, &a, algo, budget)?;
        Ok((v, counted.ops()))
    }
    let scalar = |v: &RingValue| match v {
        RingValue::Scalar { value, .. } => value.clone(),
        RingValue::Matrix { .. } => unreachable!("checked shape"),
    };
    let matrix = |v: &RingValue| match v {
        RingValue::Matrix { value, .. } => value.clone(),
        RingValue::Scalar { .. } => unreachable!("checked shape"),
    };
    let (value, ops) = match (spec.field()?, dim) {
        (Some(f), None) => {
            let p = f.modulus();
            let (v, ops) = run(f, a.map(|x| reduce_bigint(&scalar(x), p)), algo, budget)?;
            (RingValue::scalar(spec, v)?, ops)
        }
        (None, None) => {
            let (v, ops) = run(Integers, a.map(scalar), algo, budget)?;
            (RingValue::scalar(spec, v)?, ops)
        }
        (Some(f), Some(d)) => {
            let p = f.modulus();
            let (v, ops) = run(MatrixRing::new(f, d), a.map(|x| matrix(x).map(|y| reduce_bigint(y, p))), algo, budget)?;
            (RingValue::Matrix { spec, value: v.map(|&y| BigInt::from(y)) }, ops)
        }
        (None, Some(d)) => {
            let (v, ops) = run(MatrixRing::new(Integers, d), a.map(matrix), algo, budget)?;
            (RingValue::Matrix { spec, value: v }, ops)
        }
    };
    Ok(RperRun { value, ops })
}

/// Parses
///
/// ```text
/// rect <k> <n> [<d>]
/// <k·n entry lines, row-major: one integer, or d·d integers row-major>
/// ```
///
/// Without `d` the entries are scalars. Blank lines and `#` comments are skipped.
pub fn parse_rect(text: &str, spec: RingSpec) -> Result<RectMatrix<RingValue>, RperError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or(RperError::Syntax { line: 0, msg: "empty input".into() })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| RperError::Syntax { line: hl, msg: format!("bad number `{s}`") });
    let (k, n, d) = match toks[..] {
        ["rect", k, n] => (num(k)?, num(n)?, None),
        ["rect", k, n, d] => (num(k)?, num(n)?, Some(num(d)?)),
        _ => return Err(RperError::Syntax { line: hl, msg: "expected `rect <k> <n> [<d>]`".into() }),
    };
    if d == Some(0) {
        return Err(RperError::Syntax { line: hl, msg: "matrix dimension must be positive".into() });
    }
    let mut entries = Vec::with_capacity(k * n);
    for _ in 0..k * n {
        let (l, body) = lines.next().ok_or(RperError::EntryCount { expected: k * n, found: entries.len() })?;
        let vals = body
            .split_whitespace()
            .map(|t| t.parse::<BigInt>().map_err(|_| RperError::Syntax { line: l, msg: format!("bad integer `{t}`") }))
            .collect::<Result<Vec<_>, _>>()?;
        let want = d.map_or(1, |d| d * d);
        if vals.len() != want {
            return Err(RperError::Syntax { line: l, msg: format!("expected {want} integers, found {}", vals.len()) });
        }
        entries.push(match d {
            None => RingValue::scalar(spec, vals[0].clone())?,
            Some(d) => RingValue::matrix(spec, vals.chunks(d).map(<[BigInt]>::to_vec).collect())?,
        });
    }
    if let Some((l, _)) = lines.next() {
        return Err(RperError::Syntax { line: l, msg: "trailing input".into() });
    }
    RectMatrix::new(k, n, entries)
}

/// Checks `Σ_{V⊆U⊆[n], |U|≤k} (-1)^{k-|U|} C(n-|U|, k-|U|) = [|V| = k]` by
/// summing over explicit subsets; returns the first failing `(n, k, V)`.
pub fn check_rect_ryser_identity(max_n: usize) -> Option<(usize, usize, u64)> {
    for n in 0..=max_n {
        for k in 0..=n {
            for v in 0u64..(1 << n) {
                if v.count_ones() as usize > k {
                    continue;
                }
                let mut total = BigInt::zero();
                for u in 0u64..(1 << n) {
                    let s = u.count_ones() as usize;
                    if u & v == v && s <= k {
                        total += rect_ryser_coefficient(n, k, s);
                    }
                }
                let want = if v.count_ones() as usize == k { BigInt::one() } else { BigInt::zero() };
                if total != want {
                    return Some((n, k, v));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Matrix, OpCounter, PrimeField};
    use proptest::prelude::*;
    use rand::Rng;

    fn ints(rows: Vec<Vec<i64>>) -> RectMatrix<BigInt> {
        RectMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()).unwrap()
    }

    fn all_algos<R: Ring>(ring: &R, a: &RectMatrix<R::Elem>) -> [R::Elem; 3] {
        let b = RperBudget::default();
        [
            rper_brute(ring, a, &b).unwrap(),
            rper_rect_ryser(ring, a, &b).unwrap(),
            rper_halves(ring, a, &b).unwrap(),
        ]
    }

    #[test]
    fn two_by_two_permanent() {
        let a = ints(vec![vec![2, 3], vec![5, 7]]);
        for v in all_algos(&Integers, &a) {
            assert_eq!(v, BigInt::from(2 * 7 + 3 * 5));
        }
    }

    #[test]
    fn single_row_is_row_sum() {
        let a = ints(vec![vec![4, -1, 9]]);
        for v in all_algos(&Integers, &a) {
            assert_eq!(v, BigInt::from(12));
        }
    }

    #[test]
    fn zero_rows_give_one() {
        let a: RectMatrix<BigInt> = RectMatrix::new(0, 3, vec![]).unwrap();
        for v in all_algos(&Integers, &a) {
            assert_eq!(v, BigInt::from(1));
        }
    }

    #[test]
    fn shape_errors() {
        assert_eq!(RectMatrix::new(3, 2, vec![0; 6]).unwrap_err(), RperError::Shape { k: 3, n: 2 });
        assert!(matches!(RectMatrix::new(1, 2, vec![0; 3]), Err(RperError::EntryCount { .. })));
    }

    #[test]
    fn coefficient_identity_holds() {
        assert_eq!(check_rect_ryser_identity(8), None);
    }

    #[test]
    fn colex_ranks_are_dense() {
        let r = Ranker::new(7);
        for s in 0..=7 {
            let ranks: Vec<usize> = combinations(7, s).map(|m| r.rank(m)).collect();
            assert_eq!(ranks, (0..binom(7, s) as usize).collect::<Vec<_>>());
        }
    }

    #[test]
    fn halves_empty_set_entry_is_total_exact_cover() {
        let mut rng = crate::gen::rng(9);
        let f = PrimeField::new(101).unwrap();
        for k in 1..=5 {
            let n = k + 2;
            let a = RectMatrix::new(k, n, (0..k * n).map(|_| rng.gen_range(0..101u64)).collect()).unwrap();
            let t = halves_tables(&f, &a, &RperBudget::default()).unwrap();
            for (g, rows) in [(&t.g1, 0..t.h1), (&t.g2, t.h1..k)] {
                let direct = f.sum(combinations(n, rows.len()).map(|u| exact_cover_sum(&f, &a, rows.clone(), u)).collect::<Vec<_>>().iter());
                assert_eq!(g[0][0], direct, "k {k}");
            }
        }
    }

    #[test]
    fn matrix_entries_respect_row_order() {
        let ring = MatrixRing::new(Integers, 2);
        let m = |a: i64, b: i64, c: i64, d: i64| Matrix::from_rows(vec![vec![a.into(), b.into()], vec![c.into(), d.into()]]);
        let a = RectMatrix::from_rows(vec![
            vec![m(1, 1, 0, 1), m(0, 1, 1, 0), m(2, 0, 0, 1)],
            vec![m(1, 0, 1, 1), m(0, 0, 1, 0), m(1, 2, 3, 4)],
        ])
        .unwrap();
        let v = all_algos(&ring, &a);
        assert_eq!(v[0], v[1]);
        assert_eq!(v[0], v[2]);
        let swapped = rper_brute(&ring, &a.swap_rows(0, 1), &RperBudget::default()).unwrap();
        assert_ne!(v[0], swapped);
    }

    #[test]
    fn s_star_on_two_matrices() {
        let ring = MatrixRing::new(Integers, 2);
        let m1 = Matrix::from_rows(vec![vec![1.into(), 2.into()], vec![0.into(), 1.into()]]);
        let m2 = Matrix::from_rows(vec![vec![0.into(), 1.into()], vec![3.into(), 0.into()]]);
        let want = ring.add(&ring.mul(&m1, &m2), &ring.mul(&m2, &m1));
        for algo in [RperAlgo::Brute, RperAlgo::RectRyser, RperAlgo::Halves] {
            let got = s_star_eval(&ring, &[m1.clone(), m2.clone()], 2, algo, &RperBudget::default()).unwrap();
            assert_eq!(got, want);
            let one = s_star_eval(&ring, &[m1.clone(), m2.clone()], 1, algo, &RperBudget::default()).unwrap();
            assert_eq!(one, ring.add(&m1, &m2));
        }
    }

    #[test]
    fn s_star_of_equal_matrices() {
        let f = PrimeField::new(7).unwrap();
        let ring = MatrixRing::new(f, 2);
        let m = Matrix::from_rows(vec![vec![3, 1], vec![5, 2]]);
        for n in 1..=5usize {
            for k in 0..=n {
                let want = ring.scale_int(&ring.pow(&m, k as u64), &(num_integer::binomial(BigInt::from(n), BigInt::from(k)) * (1..=k).product::<usize>()));
                for algo in [RperAlgo::Brute, RperAlgo::RectRyser, RperAlgo::Halves] {
                    assert_eq!(s_star_eval(&ring, &vec![m.clone(); n], k, algo, &RperBudget::default()).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn s_star_against_double_sum() {
        let ring = MatrixRing::new(Integers, 3);
        let mut rng = crate::gen::rng(4);
        let mats: Vec<Matrix<BigInt>> =
            (0..4).map(|_| Matrix::from_vec(3, 3, (0..9).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect())).collect();
        let mut want = ring.zero();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    ring.add_assign(&mut want, &ring.mul(&mats[i], &mats[j]));
                }
            }
        }
        for algo in [RperAlgo::Brute, RperAlgo::RectRyser, RperAlgo::Halves] {
            assert_eq!(s_star_eval(&ring, &mats, 2, algo, &RperBudget::default()).unwrap(), want);
        }
    }

    #[test]
    fn budgets_are_enforced() {
        let a = RectMatrix::new(4, 9, vec![BigInt::from(1); 36]).unwrap();
        let tiny = RperBudget { brute_injections: 10, ryser_subsets: 10, halves_entries: 10 };
        assert!(matches!(rper_brute(&Integers, &a, &tiny), Err(RperError::BruteBudget { needed: 3024, .. })));
        assert!(matches!(rper_rect_ryser(&Integers, &a, &tiny), Err(RperError::RyserBudget { .. })));
        assert!(matches!(rper_halves(&Integers, &a, &tiny), Err(RperError::HalvesMemory { .. })));
    }

    #[test]
    fn values_dispatch() {
        let f7 = RingSpec::PrimeField(7);
        let a = parse_rect("rect 2 2\n2\n3\n5\n7\n", f7).unwrap();
        let r = rper_values(&a, RperAlgo::Halves, &RperBudget::default()).unwrap();
        assert_eq!(r.value, RingValue::scalar(f7, 29).unwrap());
        assert!(r.ops > 0);
        let m = parse_rect("rect 1 2 2\n1 0 0 1\n0 1 1 0\n", RingSpec::Integer).unwrap();
        let r = rper_values(&m, RperAlgo::RectRyser, &RperBudget::default()).unwrap();
        assert_eq!(r.value.to_string(), "[1 1; 1 1]");
        assert!(matches!(parse_rect("rect 1 2\n1\n", f7), Err(RperError::EntryCount { .. })));
        assert!(matches!(parse_rect("rect 1 1 2\n1 2 3\n", f7), Err(RperError::Syntax { line: 2, .. })));
    }

    #[test]
    fn op_counts_stay_in_regime() {
        let f = PrimeField::new(1_000_003).unwrap();
        let mut rng = crate::gen::rng(1);
        for (k, n) in [(4, 12), (6, 14), (5, 16)] {
            let a = RectMatrix::new(k, n, (0..k * n).map(|_| rng.gen_range(1..1_000_003u64)).collect()).unwrap();
            let c = Counted::with_counter(f, OpCounter::new());
            rper_rect_ryser(&c, &a, &RperBudget::default()).unwrap();
            assert!((c.ops() as u128) <= 4 * binom_down(n, k) * (k * n) as u128);
            c.counter().reset();
            rper_halves(&c, &a, &RperBudget::default()).unwrap();
            let h = k.div_ceil(2);
            assert!((c.ops() as u128) <= 4 * binom(n, h) * (1 << h) * (k * n) as u128);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn three_algorithms_agree_over_f7(k in 0usize..=4, extra in 0usize..=3, seed in any::<u64>()) {
            let n = k + extra;
            let f = PrimeField::new(7).unwrap();
            let mut rng = crate::gen::rng(seed);
            let a = RectMatrix::new(k, n, (0..k * n).map(|_| rng.gen_range(0..7u64)).collect()).unwrap();
            let [x, y, z] = all_algos(&f, &a);
            prop_assert_eq!(x, y);
            prop_assert_eq!(x, z);
        }
    }
}
