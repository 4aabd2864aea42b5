use std::sync::Arc;

use num_bigint::BigInt;

use super::{Algebra, AlgebraError, Matrix, Ring, ScalarRing};

/// Block upper-triangular matrices over a fixed partition into layers.
///
/// With layer sizes `s_0, ..., s_L` an element is a square matrix of order
/// `s_0 + ... + s_L` whose block `(a, b)` (of shape `s_a × s_b`) vanishes for
/// `a > b`. Transfer matrices of a layered branching program live here: the
/// block superdiagonal holds the layer coefficient matrices and a product of
/// `r` of them only touches blocks `(a, a + r)`. Blocks that are entirely zero
/// are not stored.
#[derive(Clone, Debug)]
pub struct LayeredRing<R> {
    base: R,
    sizes: Arc<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockUpper<E> {
    blocks: Vec<Option<Matrix<E>>>,
}

#[inline]
fn slot(a: usize, b: usize) -> usize {
    debug_assert!(a <= b);
    b * (b + 1) / 2 + a
}

impl<E> BlockUpper<E> {
    pub fn block(&self, a: usize, b: usize) -> Option<&Matrix<E>> {
        if a > b {
            return None;
        }
        self.blocks.get(slot(a, b)).and_then(Option::as_ref)
    }

    /// Number of stored (nonzero) blocks.
    pub fn stored_blocks(&self) -> usize {
        self.blocks.iter().filter(|b| b.is_some()).count()
    }
}

impl<R: Ring> LayeredRing<R> {
    pub fn new(base: R, sizes: Vec<usize>) -> Self {
        assert!(!sizes.is_empty(), "at least one layer");
        assert!(sizes.iter().all(|&s| s > 0), "layer sizes must be positive");
        LayeredRing { base, sizes: Arc::new(sizes) }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn layers(&self) -> usize {
        self.sizes.len()
    }

    /// Order of the full matrix.
    pub fn order(&self) -> usize {
        self.sizes.iter().sum()
    }

    fn empty(&self) -> BlockUpper<R::Elem> {
        let l = self.sizes.len();
        BlockUpper { blocks: vec![None; l * (l + 1) / 2] }
    }

    /// Element with the single block `(a, b)`.
    pub fn from_block(&self, a: usize, b: usize, m: Matrix<R::Elem>) -> BlockUpper<R::Elem> {
        assert!(a <= b && b < self.sizes.len(), "block index out of range");
        assert_eq!(m.shape(), (self.sizes[a], self.sizes[b]), "block shape");
        let mut e = self.empty();
        if !m.is_zero_in(&self.base) {
            e.blocks[slot(a, b)] = Some(m);
        }
        e
    }

    /// Entry `(row, col)` of block `(a, b)`.
    pub fn entry(&self, x: &BlockUpper<R::Elem>, a: usize, b: usize, row: usize, col: usize) -> R::Elem {
        match x.block(a, b) {
            Some(m) => m.get(row, col).clone(),
            None => self.base.zero(),
        }
    }

    /// Entry `(0, s_L - 1)` of block `(0, L)`: the top-right corner of the full matrix.
    pub fn corner(&self, x: &BlockUpper<R::Elem>) -> R::Elem {
        let last = self.sizes.len() - 1;
        self.entry(x, 0, last, 0, self.sizes[last] - 1)
    }

    /// The full dense matrix.
    pub fn to_dense(&self, x: &BlockUpper<R::Elem>) -> Matrix<R::Elem> {
        let n = self.order();
        let mut out = Matrix::zeros(&self.base, n, n);
        let offsets: Vec<usize> = self
            .sizes
            .iter()
            .scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        for b in 0..self.sizes.len() {
            for a in 0..=b {
                if let Some(m) = x.block(a, b) {
                    for r in 0..m.rows() {
                        for c in 0..m.cols() {
                            out.set(offsets[a] + r, offsets[b] + c, m.get(r, c).clone());
                        }
                    }
                }
            }
        }
        out
    }

    fn combine<F>(&self, x: &BlockUpper<R::Elem>, y: &BlockUpper<R::Elem>, f: F) -> BlockUpper<R::Elem>
    where
        F: Fn(Option<&Matrix<R::Elem>>, Option<&Matrix<R::Elem>>) -> Option<Matrix<R::Elem>>,
    {
        let blocks = x
            .blocks
            .iter()
            .zip(&y.blocks)
            .map(|(a, b)| match (a, b) {
                (None, None) => None,
                _ => f(a.as_ref(), b.as_ref()).filter(|m| !m.is_zero_in(&self.base)),
            })
            .collect();
        BlockUpper { blocks }
    }
}

impl<R: Ring> Ring for LayeredRing<R> {
    type Elem = BlockUpper<R::Elem>;

    fn zero(&self) -> Self::Elem {
        self.empty()
    }

    fn one(&self) -> Self::Elem {
        self.from_bigint(&BigInt::from(1))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.blocks.iter().all(Option::is_none)
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.combine(a, b, |x, y| match (x, y) {
            (Some(x), Some(y)) => Some(x.add_in(&self.base, y)),
            (Some(x), None) => Some(x.clone()),
            (None, Some(y)) => Some(y.clone()),
            (None, None) => None,
        })
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.combine(a, b, |x, y| match (x, y) {
            (Some(x), Some(y)) => Some(x.sub_in(&self.base, y)),
            (Some(x), None) => Some(x.clone()),
            (None, Some(y)) => Some(y.neg_in(&self.base)),
            (None, None) => None,
        })
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        BlockUpper { blocks: a.blocks.iter().map(|b| b.as_ref().map(|m| m.neg_in(&self.base))).collect() }
    }

    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let l = self.sizes.len();
        let mut out = self.empty();
        for a in 0..l {
            for p in a..l {
                let Some(xa) = x.block(a, p) else { continue };
                for b in p..l {
                    let Some(yb) = y.block(p, b) else { continue };
                    let target = &mut out.blocks[slot(a, b)];
                    let acc = target.get_or_insert_with(|| Matrix::zeros(&self.base, self.sizes[a], self.sizes[b]));
                    xa.mul_acc_in(&self.base, yb, acc);
                }
            }
        }
        for blk in out.blocks.iter_mut() {
            if blk.as_ref().is_some_and(|m| m.is_zero_in(&self.base)) {
                *blk = None;
            }
        }
        out
    }

    fn from_bigint(&self, v: &BigInt) -> Self::Elem {
        let c = self.base.from_bigint(v);
        let mut e = self.empty();
        if self.base.is_zero(&c) {
            return e;
        }
        for (a, &s) in self.sizes.iter().enumerate() {
            let mut m = Matrix::zeros(&self.base, s, s);
            for i in 0..s {
                m.set(i, i, c.clone());
            }
            e.blocks[slot(a, a)] = Some(m);
        }
        e
    }

    fn scale_int(&self, a: &Self::Elem, c: &BigInt) -> Self::Elem {
        let blocks = a
            .blocks
            .iter()
            .map(|b| {
                b.as_ref()
                    .map(|m| m.map(|x| self.base.scale_int(x, c)))
                    .filter(|m| !m.is_zero_in(&self.base))
            })
            .collect();
        BlockUpper { blocks }
    }

    fn check(&self, a: &Self::Elem) -> Result<(), AlgebraError> {
        let l = self.sizes.len();
        if a.blocks.len() != l * (l + 1) / 2 {
            return Err(AlgebraError::DimensionMismatch {
                left: format!("{} block slots", a.blocks.len()),
                right: format!("{} block slots", l * (l + 1) / 2),
            });
        }
        for b in 0..l {
            for x in 0..=b {
                if let Some(m) = a.block(x, b) {
                    if m.shape() != (self.sizes[x], self.sizes[b]) {
                        return Err(AlgebraError::DimensionMismatch {
                            left: format!("block ({x},{b}) {}x{}", m.rows(), m.cols()),
                            right: format!("{}x{}", self.sizes[x], self.sizes[b]),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn is_commutative(&self) -> bool {
        false
    }
}

impl<R: ScalarRing + Algebra<Scalars = R>> Algebra for LayeredRing<R> {
    type Scalars = R;

    fn scalars(&self) -> &R {
        &self.base
    }

    fn lift(&self, c: &R::Elem) -> Self::Elem {
        let mut e = self.empty();
        if self.base.is_zero(c) {
            return e;
        }
        for (a, &s) in self.sizes.iter().enumerate() {
            let mut m = Matrix::zeros(&self.base, s, s);
            for i in 0..s {
                m.set(i, i, c.clone());
            }
            e.blocks[slot(a, a)] = Some(m);
        }
        e
    }

    fn scale(&self, c: &R::Elem, a: &Self::Elem) -> Self::Elem {
        if self.base.is_zero(c) {
            return self.empty();
        }
        BlockUpper { blocks: a.blocks.iter().map(|b| b.as_ref().map(|m| m.scale_in(&self.base, c))).collect() }
    }
}
