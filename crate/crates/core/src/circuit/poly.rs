use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Circuit, CircuitError, Gate};
use crate::algebra::Ring;

/// Default cap on the number of terms an explicit expansion may hold.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// A commutative monomial: sorted `(variable, exponent)` pairs, exponents ≥ 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Monomial(vec![(i, 1)])
    }

    /// Builds a monomial from a multiset of variables.
    pub fn from_vars(vars: &[usize]) -> Self {
        let mut m = Monomial::one();
        for &v in vars {
            m = m.mul(&Monomial::var(v));
        }
        m
    }

    /// Drops zero exponents and merges repeated variables.
    pub fn from_pairs(pairs: &[(usize, u32)]) -> Self {
        let mut map: BTreeMap<usize, u32> = BTreeMap::new();
        for &(v, e) in pairs {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn pairs(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_multilinear(&self) -> bool {
        self.0.iter().all(|&(_, e)| e == 1)
    }

    /// `m! = e_1! e_2! ... e_r!`.
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &(_, e) in &self.0 {
            for i in 2..=e {
                acc *= i;
            }
        }
        acc
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// The variables with multiplicity, in increasing order.
    pub fn vars(&self) -> Vec<usize> {
        self.0.iter().flat_map(|&(v, e)| std::iter::repeat_n(v, e as usize)).collect()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(v, _)| v)
    }

    pub fn eval<R: Ring>(&self, ring: &R, point: &[R::Elem]) -> R::Elem {
        let mut acc = ring.one();
        for &(v, e) in &self.0 {
            acc = ring.mul(&acc, &ring.pow(&point[v], e as u64));
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, &(v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "x{}", v + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Explicit polynomial with integer coefficients; zero coefficients are never stored.
///
/// Field-valued questions are answered by reducing the coefficients, which is
/// valid because every circuit here has integer constants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparsePoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(i), BigInt::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> SparsePoly {
        SparsePoly::from_terms(self.terms.iter().map(|(m, v)| (m.clone(), v * c)))
    }

    /// Product, dropping monomials above `degree_cap` and failing past `term_cap` terms.
    pub fn mul_capped(
        &self,
        other: &SparsePoly,
        degree_cap: Option<u32>,
        term_cap: usize,
    ) -> Result<SparsePoly, CircuitError> {
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(d) = degree_cap {
                    if ma.degree() + mb.degree() > d {
                        continue;
                    }
                }
                *acc.entry(ma.mul(mb)).or_default() += ca * cb;
                if acc.len() > term_cap {
                    return Err(CircuitError::TermCap { cap: term_cap });
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(SparsePoly { terms: acc })
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        self.mul_capped(other, None, usize::MAX).expect("uncapped product")
    }

    pub fn homogeneous_part(&self, k: u32) -> SparsePoly {
        SparsePoly::from_terms(self.terms.iter().filter(|(m, _)| m.degree() == k).map(|(m, c)| (m.clone(), c.clone())))
    }

    /// Sum of the coefficients of the multilinear monomials of degree `k`.
    pub fn multilinear_sum(&self, k: u32) -> BigInt {
        self.terms
            .iter()
            .filter(|(m, _)| m.degree() == k && m.is_multilinear())
            .map(|(_, c)| c.clone())
            .sum()
    }

    /// `Σ ([m]f)^2` over multilinear monomials of degree `k`.
    pub fn multilinear_square_sum(&self, k: u32) -> BigInt {
        self.terms
            .iter()
            .filter(|(m, _)| m.degree() == k && m.is_multilinear())
            .map(|(_, c)| c * c)
            .sum()
    }

    pub fn has_multilinear_of_degree(&self, k: u32) -> bool {
        self.terms.keys().any(|m| m.degree() == k && m.is_multilinear())
    }

    /// Coefficients reduced modulo `p` into `[0, p)`, zeros dropped.
    pub fn reduce_mod(&self, p: u64) -> SparsePoly {
        let p = BigInt::from(p);
        SparsePoly::from_terms(self.terms.iter().map(|(m, c)| {
            let mut r = c % &p;
            if r.is_negative() {
                r += &p;
            }
            (m.clone(), r)
        }))
    }

    /// Scaled Hadamard product `Σ m!·[m]f·[m]g·m`.
    pub fn scaled_hadamard(&self, other: &SparsePoly) -> SparsePoly {
        SparsePoly::from_terms(
            self.terms
                .iter()
                .filter_map(|(m, c)| other.terms.get(m).map(|d| (m.clone(), m.factorial() * c * d))),
        )
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn eval<R: Ring>(&self, ring: &R, point: &[R::Elem]) -> R::Elem {
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let v = ring.mul(&ring.from_bigint(c), &m.eval(ring, point));
            ring.add_assign(&mut acc, &v);
        }
        acc
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{m}")?;
        }
        Ok(())
    }
}

/// Noncommutative polynomial: words over the variables with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordPoly {
    terms: BTreeMap<Vec<usize>, BigInt>,
}

impl WordPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![i], BigInt::one());
        p
    }

    pub fn add_term(&mut self, w: Vec<usize>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[usize]) -> BigInt {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &WordPoly) -> WordPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> WordPoly {
        let mut out = WordPoly::zero();
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    pub fn mul_capped(
        &self,
        other: &WordPoly,
        length_cap: Option<usize>,
        term_cap: usize,
    ) -> Result<WordPoly, CircuitError> {
        let mut out = WordPoly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if length_cap.is_some_and(|l| a.len() + b.len() > l) {
                    continue;
                }
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, ca * cb);
                if out.len() > term_cap {
                    return Err(CircuitError::TermCap { cap: term_cap });
                }
            }
        }
        Ok(out)
    }

    /// The commutative image.
    pub fn commutative(&self) -> SparsePoly {
        SparsePoly::from_terms(self.terms.iter().map(|(w, c)| (Monomial::from_vars(w), c.clone())))
    }
}

/// Expands the polynomial computed by `c`.
///
/// With `degree_cap` set, monomials of larger degree are dropped along the way
/// (valid since degrees never decrease under multiplication).
pub fn brute_expand(c: &Circuit, degree_cap: Option<u32>, term_cap: usize) -> Result<SparsePoly, CircuitError> {
    let mut vals: Vec<SparsePoly> = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let v = match g {
            Gate::Input(i) => {
                if degree_cap == Some(0) {
                    SparsePoly::zero()
                } else {
                    SparsePoly::var(*i)
                }
            }
            Gate::Const(v) => SparsePoly::constant(v.clone()),
            Gate::Add(a, b) => vals[*a].add(&vals[*b]),
            Gate::Mul(a, b) => vals[*a].mul_capped(&vals[*b], degree_cap, term_cap)?,
        };
        if v.len() > term_cap {
            return Err(CircuitError::TermCap { cap: term_cap });
        }
        vals.push(v);
    }
    Ok(vals.swap_remove(c.output()))
}

/// Expands the noncommutative version of `c`: product gates keep their child order.
pub fn expand_words(c: &Circuit, length_cap: Option<usize>, term_cap: usize) -> Result<WordPoly, CircuitError> {
    let mut vals: Vec<WordPoly> = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let v = match g {
            Gate::Input(i) => {
                if length_cap == Some(0) {
                    WordPoly::zero()
                } else {
                    WordPoly::var(*i)
                }
            }
            Gate::Const(v) => WordPoly::constant(v.clone()),
            Gate::Add(a, b) => vals[*a].add(&vals[*b]),
            Gate::Mul(a, b) => vals[*a].mul_capped(&vals[*b], length_cap, term_cap)?,
        };
        if v.len() > term_cap {
            return Err(CircuitError::TermCap { cap: term_cap });
        }
        vals.push(v);
    }
    Ok(vals.swap_remove(c.output()))
}
