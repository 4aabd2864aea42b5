//! Algebraic branching programs.
//!
//! An [`Abp`] is a list of layers; layer `i` is a `w_{i-1} × w_i` matrix of
//! linear forms. The program computes entry `(0, w_L - 1)` of the product of
//! its layers: the first row of the first layer is the source and the last
//! column of the last layer is the sink. Entries may be affine, so constant
//! edges (as in the elementary symmetric program) are allowed; a program is
//! homogeneous when every entry is a linear form without constant.

mod convert;
mod homog;
mod io;
mod transfer;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, Ring};
use crate::circuit::{CircuitError, LinearForm, SparsePoly, WordPoly};

pub use convert::{circuit_to_abp, AbpOptions, ConvertStrategy, DEFAULT_WIDTH_CAP};
pub use homog::zcoeff_abp;
pub use io::parse_abp;
pub use transfer::{transfer_matrices, TransferMatrices};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbpError {
    #[error("layer {layer}: expected {expected} rows, found {found}")]
    Shape { layer: usize, expected: usize, found: usize },
    #[error("layer {layer} has an empty side")]
    EmptyLayer { layer: usize },
    #[error("program has no layers")]
    NoLayers,
    #[error("layer {layer} entry ({row},{col}) is not homogeneous")]
    NotHomogeneous { layer: usize, row: usize, col: usize },
    #[error("layer {layer} uses variable {index} but the program has {nvars}")]
    BadVariable { layer: usize, index: usize, nvars: usize },
    #[error("degree 0: the polynomial is the constant {constant}")]
    DegreeZero { constant: BigInt },
    #[error("width {width} exceeds the cap {cap}")]
    WidthCap { width: usize, cap: usize },
    #[error("programs differ: {0}")]
    Mismatch(String),
    #[error("requested z-degree {t} exceeds the bound {bound}")]
    ZDegree { t: usize, bound: usize },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A matrix of linear forms, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    rows: usize,
    cols: usize,
    entries: Vec<LinearForm>,
}

impl Layer {
    pub fn new(rows: usize, cols: usize, entries: Vec<LinearForm>) -> Self {
        assert_eq!(entries.len(), rows * cols, "layer entry count");
        Layer { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Layer { rows, cols, entries: vec![LinearForm::zero(); rows * cols] }
    }

    pub fn single(f: LinearForm) -> Self {
        Layer::new(1, 1, vec![f])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &LinearForm {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, f: LinearForm) {
        self.entries[r * self.cols + c] = f;
    }

    pub fn entries(&self) -> &[LinearForm] {
        &self.entries
    }

    fn select(&self, rows: &[usize], cols: &[usize]) -> Layer {
        let mut out = Layer::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    fn scale(&self, c: &BigInt) -> Layer {
        Layer { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|f| f.scale(c)).collect() }
    }

    /// Coefficient matrix of variable `v` (or the constant part when `v` is `None`).
    pub fn coefficient_matrix(&self, v: Option<usize>) -> Vec<BigInt> {
        self.entries
            .iter()
            .map(|f| match v {
                Some(v) => f.coeff(v),
                None => f.constant().clone(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abp {
    nvars: usize,
    layers: Vec<Layer>,
    homogeneous: bool,
}

impl Abp {
    /// Checks the shape chain and variable range; the homogeneity flag is computed.
    pub fn new(nvars: usize, layers: Vec<Layer>) -> Result<Self, AbpError> {
        let homogeneous = layers.iter().all(|l| l.entries.iter().all(LinearForm::is_homogeneous));
        validate_abp(nvars, layers, homogeneous)
    }

    /// A width-one program `L_1 L_2 ... L_k`.
    pub fn from_forms(nvars: usize, forms: &[LinearForm]) -> Result<Self, AbpError> {
        Abp::new(nvars, forms.iter().cloned().map(Layer::single).collect())
    }

    /// The zero polynomial as a homogeneous program with `k` layers.
    pub fn zero(nvars: usize, k: usize) -> Self {
        Abp { nvars, layers: (0..k.max(1)).map(|_| Layer::zeros(1, 1)).collect(), homogeneous: true }
    }

    /// `S_{n,k}` with `n` layers of width `k+1`: the state counts the variables picked so far.
    pub fn elementary_symmetric(n: usize, k: usize) -> Result<Self, AbpError> {
        if k > n {
            return Err(CircuitError::DegreeTooLarge { k, n }.into());
        }
        if n == 0 {
            return Abp::new(0, vec![Layer::single(LinearForm::constant_form(BigInt::one()))]);
        }
        let w = k + 1;
        let layers = (0..n)
            .map(|i| {
                let mut l = Layer::zeros(w, w);
                for s in 0..w {
                    l.set(s, s, LinearForm::constant_form(BigInt::one()));
                    if s + 1 < w {
                        l.set(s, s + 1, LinearForm::var(i));
                    }
                }
                l
            })
            .collect();
        Abp::new(n, layers)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    /// For a homogeneous program, the degree of every path.
    pub fn degree(&self) -> usize {
        self.layers.len()
    }

    /// Boundary sizes `w_0, ..., w_L`.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.layers[0].rows];
        w.extend(self.layers.iter().map(|l| l.cols));
        w
    }

    pub fn max_width(&self) -> usize {
        self.widths().into_iter().max().unwrap_or(0)
    }

    /// Total number of edges with a nonzero label.
    pub fn edge_count(&self) -> usize {
        self.layers.iter().map(|l| l.entries.iter().filter(|f| !f.is_zero()).count()).sum()
    }

    /// Same program over more variables.
    pub fn with_nvars(&self, nvars: usize) -> Result<Abp, AbpError> {
        validate_abp(nvars, self.layers.clone(), self.homogeneous)
    }

    /// Evaluates the iterated product row by row: only the source row is kept.
    pub fn eval<R: Ring>(&self, ring: &R, point: &[R::Elem]) -> Result<R::Elem, AbpError> {
        if point.len() != self.nvars {
            return Err(CircuitError::Arity { expected: self.nvars, got: point.len() }.into());
        }
        for p in point {
            ring.check(p)?;
        }
        let first = &self.layers[0];
        let mut v: Vec<R::Elem> = (0..first.cols).map(|c| first.get(0, c).eval(ring, point)).collect();
        for layer in &self.layers[1..] {
            let mut next = vec![ring.zero(); layer.cols];
            for (r, vr) in v.iter().enumerate() {
                if ring.is_zero(vr) {
                    continue;
                }
                for (c, slot) in next.iter_mut().enumerate() {
                    let f = layer.get(r, c);
                    if !f.is_zero() {
                        ring.add_assign(slot, &ring.mul(vr, &f.eval(ring, point)));
                    }
                }
            }
            v = next;
        }
        Ok(v.pop().expect("nonempty boundary"))
    }

    /// The commutative polynomial, by dynamic programming over boundaries.
    pub fn expand(&self, term_cap: usize) -> Result<SparsePoly, AbpError> {
        let first = &self.layers[0];
        let mut v: Vec<SparsePoly> = (0..first.cols).map(|c| first.get(0, c).to_poly()).collect();
        for layer in &self.layers[1..] {
            let mut next = vec![SparsePoly::zero(); layer.cols];
            for (r, vr) in v.iter().enumerate() {
                if vr.is_empty() {
                    continue;
                }
                for (c, slot) in next.iter_mut().enumerate() {
                    let f = layer.get(r, c);
                    if !f.is_zero() {
                        *slot = slot.add(&vr.mul_capped(&f.to_poly(), None, term_cap)?);
                    }
                }
            }
            if next.iter().map(SparsePoly::len).sum::<usize>() > term_cap {
                return Err(CircuitError::TermCap { cap: term_cap }.into());
            }
            v = next;
        }
        Ok(v.pop().expect("nonempty boundary"))
    }

    /// The noncommutative polynomial: the sum over paths of the words read along them.
    pub fn expand_words(&self, term_cap: usize) -> Result<WordPoly, AbpError> {
        let to_words = |f: &LinearForm| {
            let mut w = WordPoly::constant(f.constant().clone());
            for (v, c) in f.terms() {
                w.add_term(vec![v], c.clone());
            }
            w
        };
        let first = &self.layers[0];
        let mut v: Vec<WordPoly> = (0..first.cols).map(|c| to_words(first.get(0, c))).collect();
        for layer in &self.layers[1..] {
            let mut next = vec![WordPoly::zero(); layer.cols];
            for (r, vr) in v.iter().enumerate() {
                if vr.is_empty() {
                    continue;
                }
                for (c, slot) in next.iter_mut().enumerate() {
                    let f = layer.get(r, c);
                    if !f.is_zero() {
                        *slot = slot.add(&vr.mul_capped(&to_words(f), None, term_cap)?);
                    }
                }
            }
            v = next;
        }
        Ok(v.pop().expect("nonempty boundary"))
    }

    /// Keeps only the source row of the first layer and the sink column of the last.
    pub fn normalized(&self) -> Abp {
        let mut layers = self.layers.clone();
        let first = &layers[0];
        let cols: Vec<usize> = (0..first.cols).collect();
        layers[0] = first.select(&[0], &cols);
        let last = layers.len() - 1;
        let l = &layers[last];
        let rows: Vec<usize> = (0..l.rows).collect();
        layers[last] = l.select(&rows, &[l.cols - 1]);
        Abp { nvars: self.nvars, layers, homogeneous: self.homogeneous }
    }

    /// Removes nodes that lie on no source-to-sink path of nonzero edges.
    pub fn trim(&self) -> Abp {
        let a = self.normalized();
        let widths = a.widths();
        let l = a.layers.len();
        let mut fwd: Vec<Vec<bool>> = widths.iter().map(|&w| vec![false; w]).collect();
        fwd[0][0] = true;
        for (i, layer) in a.layers.iter().enumerate() {
            for r in 0..layer.rows {
                if !fwd[i][r] {
                    continue;
                }
                for (c, reach) in fwd[i + 1].iter_mut().enumerate().take(layer.cols) {
                    if !layer.get(r, c).is_zero() {
                        *reach = true;
                    }
                }
            }
        }
        let mut bwd: Vec<Vec<bool>> = widths.iter().map(|&w| vec![false; w]).collect();
        bwd[l][0] = true;
        for i in (0..l).rev() {
            let layer = &a.layers[i];
            for r in 0..layer.rows {
                for c in 0..layer.cols {
                    if bwd[i + 1][c] && !layer.get(r, c).is_zero() {
                        bwd[i][r] = true;
                    }
                }
            }
        }
        let keep: Vec<Vec<usize>> = (0..=l)
            .map(|b| {
                if b == 0 || b == l {
                    return vec![0];
                }
                let k: Vec<usize> = (0..widths[b]).filter(|&x| fwd[b][x] && bwd[b][x]).collect();
                if k.is_empty() {
                    vec![0]
                } else {
                    k
                }
            })
            .collect();
        let layers = (0..l).map(|i| a.layers[i].select(&keep[i], &keep[i + 1])).collect();
        Abp { nvars: a.nvars, layers, homogeneous: a.homogeneous }
    }

    /// `self · other`.
    pub fn series(&self, other: &Abp) -> Result<Abp, AbpError> {
        if self.nvars != other.nvars {
            return Err(AbpError::Mismatch(format!("{} vs {} variables", self.nvars, other.nvars)));
        }
        let a = self.normalized();
        let b = other.normalized();
        let mut layers = a.layers;
        layers.extend(b.layers);
        Ok(Abp { nvars: self.nvars, layers, homogeneous: self.homogeneous && other.homogeneous })
    }

    /// `self + other`; both must have the same number of layers.
    pub fn parallel(&self, other: &Abp) -> Result<Abp, AbpError> {
        if self.nvars != other.nvars || self.len() != other.len() {
            return Err(AbpError::Mismatch(format!(
                "{}x{} vs {}x{} (variables x layers)",
                self.nvars,
                self.len(),
                other.nvars,
                other.len()
            )));
        }
        let a = self.normalized();
        let b = other.normalized();
        let l = a.len();
        let homogeneous = a.homogeneous && b.homogeneous;
        if l == 1 {
            let f = a.layers[0].get(0, 0).add(b.layers[0].get(0, 0));
            return Ok(Abp { nvars: a.nvars, layers: vec![Layer::single(f)], homogeneous });
        }
        let mut layers = Vec::with_capacity(l);
        for i in 0..l {
            let (x, y) = (&a.layers[i], &b.layers[i]);
            let (rows, r_off) = if i == 0 { (1, 0) } else { (x.rows + y.rows, x.rows) };
            let (cols, c_off) = if i == l - 1 { (1, 0) } else { (x.cols + y.cols, x.cols) };
            let mut m = Layer::zeros(rows, cols);
            for r in 0..x.rows {
                for c in 0..x.cols {
                    m.set(r, c, x.get(r, c).clone());
                }
            }
            for r in 0..y.rows {
                for c in 0..y.cols {
                    let f = y.get(r, c).clone();
                    m.set(r + r_off, c + c_off, f);
                }
            }
            layers.push(m);
        }
        Ok(Abp { nvars: a.nvars, layers, homogeneous })
    }

    pub fn scale(&self, c: &BigInt) -> Abp {
        let mut a = self.normalized();
        a.layers[0] = a.layers[0].scale(c);
        a
    }

    /// Adds `count` constant-one layers at the end (same polynomial, more layers).
    pub fn pad(&self, count: usize) -> Abp {
        let mut a = self.normalized();
        for _ in 0..count {
            a.layers.push(Layer::single(LinearForm::constant_form(BigInt::one())));
        }
        if count > 0 {
            a.homogeneous = false;
        }
        a
    }

    /// Renames variables and changes the variable count.
    pub fn map_vars(&self, nvars: usize, f: impl Fn(usize) -> usize) -> Result<Abp, AbpError> {
        let layers = self
            .layers
            .iter()
            .map(|l| Layer { rows: l.rows, cols: l.cols, entries: l.entries.iter().map(|e| e.map_vars(&f)).collect() })
            .collect();
        Abp::new(nvars, layers)
    }

    /// Sum of every layer's constant-part product along paths: the value at the origin.
    pub fn constant_term(&self) -> BigInt {
        let first = &self.layers[0];
        let mut v: Vec<BigInt> = (0..first.cols).map(|c| first.get(0, c).constant().clone()).collect();
        for layer in &self.layers[1..] {
            let mut next = vec![BigInt::zero(); layer.cols];
            for (r, vr) in v.iter().enumerate() {
                for (c, slot) in next.iter_mut().enumerate() {
                    *slot += vr * layer.get(r, c).constant();
                }
            }
            v = next;
        }
        v.pop().expect("nonempty boundary")
    }
}

/// Checks that layer shapes chain and variables are in range; with `homogeneous`
/// set, rejects any entry that has a constant part.
pub fn validate_abp(nvars: usize, layers: Vec<Layer>, homogeneous: bool) -> Result<Abp, AbpError> {
    if layers.is_empty() {
        return Err(AbpError::NoLayers);
    }
    for (i, l) in layers.iter().enumerate() {
        if l.rows == 0 || l.cols == 0 {
            return Err(AbpError::EmptyLayer { layer: i + 1 });
        }
        if i > 0 && layers[i - 1].cols != l.rows {
            return Err(AbpError::Shape { layer: i + 1, expected: layers[i - 1].cols, found: l.rows });
        }
        for (e, f) in l.entries.iter().enumerate() {
            if let Some(v) = f.max_var() {
                if v >= nvars {
                    return Err(AbpError::BadVariable { layer: i + 1, index: v + 1, nvars });
                }
            }
            if homogeneous && !f.is_homogeneous() {
                return Err(AbpError::NotHomogeneous { layer: i + 1, row: e / l.cols, col: e % l.cols });
            }
        }
    }
    Ok(Abp { nvars, layers, homogeneous })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Integers, PrimeField};
    use crate::circuit::{brute_expand, elementary_symmetric, Monomial, DEFAULT_TERM_CAP};

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn two_layer() -> Abp {
        let l1 = Layer::new(1, 2, vec![LinearForm::var(0), LinearForm::var(1)]);
        let l2 = Layer::new(2, 1, vec![LinearForm::var(2), LinearForm::var(3)]);
        Abp::new(4, vec![l1, l2]).unwrap()
    }

    #[test]
    fn inner_product_program() {
        let a = two_layer();
        assert!(a.is_homogeneous());
        let p = a.expand(DEFAULT_TERM_CAP).unwrap();
        let want = SparsePoly::from_terms([(Monomial::from_vars(&[0, 2]), b(1)), (Monomial::from_vars(&[1, 3]), b(1))]);
        assert_eq!(p, want);
    }

    #[test]
    fn shape_errors() {
        let l1 = Layer::zeros(1, 2);
        let l2 = Layer::zeros(3, 1);
        assert_eq!(Abp::new(2, vec![l1, l2]).unwrap_err(), AbpError::Shape { layer: 2, expected: 2, found: 3 });
        let affine = Layer::single(LinearForm::constant_form(b(1)));
        assert!(matches!(validate_abp(1, vec![affine], true), Err(AbpError::NotHomogeneous { .. })));
        assert!(matches!(Abp::new(1, vec![Layer::single(LinearForm::var(3))]), Err(AbpError::BadVariable { .. })));
    }

    #[test]
    fn evaluation() {
        let l1 = Layer::single(LinearForm::var(0));
        let l2 = Layer::single(LinearForm::var(1));
        let a = Abp::new(2, vec![l1, l2]).unwrap();
        assert_eq!(a.eval(&Integers, &[b(3), b(5)]).unwrap(), b(15));
        assert_eq!(two_layer().eval(&Integers, &vec![b(0); 4]).unwrap(), b(0));
    }

    #[test]
    fn elementary_symmetric_program_matches_circuit() {
        for n in 1..=6 {
            for k in 0..=n {
                let a = Abp::elementary_symmetric(n, k).unwrap();
                assert_eq!(a.len(), n);
                assert_eq!(a.max_width(), k + 1);
                let want = brute_expand(&elementary_symmetric(n, k).unwrap(), None, DEFAULT_TERM_CAP).unwrap();
                assert_eq!(a.expand(DEFAULT_TERM_CAP).unwrap(), want);
            }
        }
    }

    #[test]
    fn composition_operations() {
        let a = two_layer();
        let sq = a.series(&a).unwrap();
        let pa = a.expand(DEFAULT_TERM_CAP).unwrap();
        assert_eq!(sq.expand(DEFAULT_TERM_CAP).unwrap(), pa.mul(&pa));
        let sum = a.parallel(&a.scale(&b(-3))).unwrap();
        assert_eq!(sum.expand(DEFAULT_TERM_CAP).unwrap(), pa.scale(&b(-2)));
        let padded = a.pad(2);
        assert_eq!(padded.len(), 4);
        assert_eq!(padded.expand(DEFAULT_TERM_CAP).unwrap(), pa);
    }

    #[test]
    fn trim_removes_dead_nodes() {
        let l1 = Layer::new(1, 3, vec![LinearForm::var(0), LinearForm::zero(), LinearForm::var(1)]);
        let l2 = Layer::new(3, 1, vec![LinearForm::var(0), LinearForm::var(1), LinearForm::zero()]);
        let a = Abp::new(2, vec![l1, l2]).unwrap();
        let t = a.trim();
        assert_eq!(t.widths(), vec![1, 1, 1]);
        assert_eq!(t.expand(DEFAULT_TERM_CAP).unwrap(), a.expand(DEFAULT_TERM_CAP).unwrap());
    }

    #[test]
    fn random_programs_evaluate_like_their_expansion() {
        let f = PrimeField::new(1_000_003).unwrap();
        for seed in 0..20 {
            let mut rng = crate::gen::rng(seed);
            let a = random_abp(&mut rng, 4, 3, 3);
            let p = a.expand(DEFAULT_TERM_CAP).unwrap();
            for _ in 0..20 {
                let pt: Vec<u64> = (0..4).map(|_| rand::Rng::gen_range(&mut rng, 0..1_000_003)).collect();
                assert_eq!(a.eval(&f, &pt).unwrap(), p.eval(&f, &pt));
            }
        }
    }

    pub(crate) fn random_abp<R: rand::Rng>(rng: &mut R, n: usize, k: usize, w: usize) -> Abp {
        let widths: Vec<usize> = (0..=k).map(|i| if i == 0 || i == k { 1 } else { rng.gen_range(1..=w) }).collect();
        let layers = (0..k)
            .map(|i| {
                let entries = (0..widths[i] * widths[i + 1]).map(|_| crate::gen::random_form(rng, n, -2, 2, 0.5)).collect();
                Layer::new(widths[i], widths[i + 1], entries)
            })
            .collect();
        Abp::new(n, layers).unwrap()
    }
}
