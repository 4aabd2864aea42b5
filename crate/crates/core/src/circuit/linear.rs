use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Circuit, CircuitBuilder, CircuitError, Monomial, SparsePoly};
use crate::algebra::Ring;

/// `c + Σ a_v x_v` with integer coefficients; zero coefficients are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinearForm {
    coeffs: BTreeMap<usize, BigInt>,
    constant: BigInt,
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn var(v: usize) -> Self {
        Self::term(v, BigInt::one())
    }

    pub fn term(v: usize, c: BigInt) -> Self {
        let mut f = Self::zero();
        f.add_term(v, c);
        f
    }

    pub fn constant_form(c: BigInt) -> Self {
        LinearForm { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, BigInt)>>(terms: I) -> Self {
        let mut f = Self::zero();
        for (v, c) in terms {
            f.add_term(v, c);
        }
        f
    }

    pub fn add_term(&mut self, v: usize, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(v).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn set_constant(&mut self, c: BigInt) {
        self.constant = c;
    }

    pub fn constant(&self) -> &BigInt {
        &self.constant
    }

    pub fn coeff(&self, v: usize) -> BigInt {
        self.coeffs.get(&v).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs.iter().map(|(&v, c)| (v, c))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constant.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    /// The linear part only.
    pub fn linear_part(&self) -> LinearForm {
        LinearForm { coeffs: self.coeffs.clone(), constant: BigInt::zero() }
    }

    pub fn max_var(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        for (v, c) in other.terms() {
            out.add_term(v, c.clone());
        }
        out.constant += &other.constant;
        out
    }

    pub fn sub(&self, other: &LinearForm) -> LinearForm {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> LinearForm {
        if c.is_zero() {
            return LinearForm::zero();
        }
        LinearForm {
            coeffs: self.coeffs.iter().map(|(&v, a)| (v, a * c)).collect(),
            constant: &self.constant * c,
        }
    }

    /// Coordinate-wise product of the coefficient vectors (constants multiply too).
    pub fn hadamard(&self, other: &LinearForm) -> LinearForm {
        let mut out = LinearForm::constant_form(&self.constant * &other.constant);
        for (v, c) in self.terms() {
            if let Some(d) = other.coeffs.get(&v) {
                out.add_term(v, c * d);
            }
        }
        out
    }

    /// Renames variables.
    pub fn map_vars(&self, f: impl Fn(usize) -> usize) -> LinearForm {
        let mut out = LinearForm::constant_form(self.constant.clone());
        for (v, c) in self.terms() {
            out.add_term(f(v), c.clone());
        }
        out
    }

    pub fn eval<R: Ring>(&self, ring: &R, point: &[R::Elem]) -> R::Elem {
        let mut acc = ring.from_bigint(&self.constant);
        for (v, c) in self.terms() {
            ring.add_assign(&mut acc, &ring.scale_int(&point[v], c));
        }
        acc
    }

    pub fn to_poly(&self) -> SparsePoly {
        let mut p = SparsePoly::constant(self.constant.clone());
        for (v, c) in self.terms() {
            p.add_term(Monomial::var(v), c.clone());
        }
        p
    }

    /// Space-separated `v:c` pairs with 1-based variables, preceded by the constant when nonzero.
    pub fn to_line(&self) -> String {
        let mut s = String::new();
        if !self.constant.is_zero() {
            write!(s, "{}", self.constant).unwrap();
        }
        for (v, c) in self.terms() {
            if !s.is_empty() {
                s.push(' ');
            }
            write!(s, "{}:{}", v + 1, c).unwrap();
        }
        s
    }

    /// Parses the output of [`LinearForm::to_line`].
    pub fn parse_line(line: &str, nvars: usize, lineno: usize) -> Result<LinearForm, CircuitError> {
        let mut f = LinearForm::zero();
        for tok in line.split_whitespace() {
            match tok.split_once(':') {
                Some((v, c)) => {
                    let v: usize = v.parse().map_err(|_| syntax(lineno, format!("bad variable `{v}`")))?;
                    if v == 0 || v > nvars {
                        return Err(CircuitError::BadVariable { index: v, nvars });
                    }
                    let c: BigInt = c.parse().map_err(|_| syntax(lineno, format!("bad coefficient `{c}`")))?;
                    f.add_term(v - 1, c);
                }
                None => {
                    let c: BigInt = tok.parse().map_err(|_| syntax(lineno, format!("bad constant `{tok}`")))?;
                    f.constant += c;
                }
            }
        }
        Ok(f)
    }
}

fn syntax(line: usize, msg: String) -> CircuitError {
    CircuitError::Syntax { line, msg }
}

/// An ordered product of linear forms `L_1 ... L_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiSigma {
    nvars: usize,
    forms: Vec<LinearForm>,
}

impl PiSigma {
    pub fn new(nvars: usize, forms: Vec<LinearForm>) -> Result<Self, CircuitError> {
        for f in &forms {
            if let Some(v) = f.max_var() {
                if v >= nvars {
                    return Err(CircuitError::BadVariable { index: v + 1, nvars });
                }
            }
        }
        Ok(PiSigma { nvars, forms })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    pub fn degree(&self) -> usize {
        self.forms.len()
    }

    pub fn check_homogeneous(&self) -> Result<(), CircuitError> {
        match self.forms.iter().position(|f| !f.is_homogeneous()) {
            Some(index) => Err(CircuitError::NotHomogeneous { index }),
            None => Ok(()),
        }
    }

    pub fn to_circuit(&self) -> Circuit {
        let mut cb = CircuitBuilder::new(self.nvars);
        let out = self.build(&mut cb);
        cb.finish(out).expect("valid product")
    }

    pub(crate) fn build(&self, cb: &mut CircuitBuilder) -> usize {
        let parts: Vec<_> = self.forms.iter().map(|f| cb.linear_form(f)).collect();
        cb.product(parts)
    }

    pub fn expand(&self) -> SparsePoly {
        self.forms.iter().fold(SparsePoly::constant(BigInt::one()), |acc, f| acc.mul(&f.to_poly()))
    }

    pub fn eval<R: Ring>(&self, ring: &R, point: &[R::Elem]) -> R::Elem {
        let mut acc = ring.one();
        for f in &self.forms {
            acc = ring.mul(&acc, &f.eval(ring, point));
        }
        acc
    }
}

/// A depth-three `ΣΠΣ` circuit `Σ_i c_i T_i` whose terms are products of `k` forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sps {
    nvars: usize,
    k: usize,
    terms: Vec<(BigInt, PiSigma)>,
}

impl Sps {
    pub fn new(nvars: usize, k: usize, terms: Vec<(BigInt, PiSigma)>) -> Result<Self, CircuitError> {
        for (_, t) in &terms {
            if t.degree() != k {
                return Err(CircuitError::Malformed {
                    gate: 0,
                    msg: format!("term of degree {} in a degree-{k} sum", t.degree()),
                });
            }
            if t.nvars() != nvars {
                return Err(CircuitError::Arity { expected: nvars, got: t.nvars() });
            }
        }
        Ok(Sps { nvars, k, terms })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[(BigInt, PiSigma)] {
        &self.terms
    }

    pub fn to_circuit(&self) -> Circuit {
        let mut cb = CircuitBuilder::new(self.nvars);
        let parts: Vec<_> = self
            .terms
            .iter()
            .map(|(c, t)| {
                let g = t.build(&mut cb);
                cb.scale(c.clone(), g)
            })
            .collect();
        let out = cb.sum(parts);
        cb.finish(out).expect("valid sum")
    }

    pub fn expand(&self) -> SparsePoly {
        self.terms.iter().fold(SparsePoly::zero(), |acc, (c, t)| acc.add(&t.expand().scale(c)))
    }

    /// Text form: `sps <n> <k>`, then per term `term <coef>` and `k` form lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("sps {} {}\n", self.nvars, self.k);
        for (c, t) in &self.terms {
            writeln!(s, "term {c}").unwrap();
            for f in t.forms() {
                writeln!(s, "{}", f.to_line()).unwrap();
            }
        }
        s
    }
}

/// Parses the `sps` text format. Form lines may be empty (zero form); `#` starts a comment.
pub fn parse_sps(text: &str) -> Result<Sps, CircuitError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()));
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| syntax(1, "empty input".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 || h[0] != "sps" {
        return Err(syntax(hline, "expected `sps <n> <k>`".into()));
    }
    let n: usize = h[1].parse().map_err(|_| syntax(hline, "bad variable count".into()))?;
    let k: usize = h[2].parse().map_err(|_| syntax(hline, "bad degree".into()))?;
    let mut terms = Vec::new();
    let mut pending: Option<(BigInt, Vec<LinearForm>)> = None;
    for (no, l) in lines {
        if let Some(rest) = l.strip_prefix("term") {
            if let Some((c, forms)) = pending.take() {
                if forms.len() != k {
                    return Err(syntax(no, format!("previous term has {} forms, expected {k}", forms.len())));
                }
                terms.push((c, PiSigma::new(n, forms)?));
            }
            let c: BigInt = rest.trim().parse().map_err(|_| syntax(no, "bad term coefficient".into()))?;
            pending = Some((c, Vec::new()));
            continue;
        }
        match pending.as_mut() {
            Some((_, forms)) if forms.len() < k => forms.push(LinearForm::parse_line(l, n, no)?),
            Some(_) if l.is_empty() => {}
            Some(_) => return Err(syntax(no, format!("more than {k} forms in term"))),
            None if l.is_empty() => {}
            None => return Err(syntax(no, "form outside a term".into())),
        }
    }
    if let Some((c, forms)) = pending {
        if forms.len() != k {
            return Err(syntax(0, format!("last term has {} forms, expected {k}", forms.len())));
        }
        terms.push((c, PiSigma::new(n, forms)?));
    }
    Sps::new(n, k, terms)
}
