use num_bigint::BigInt;

use super::{Algebra, AlgebraError, Ring, ScalarRing};

/// Dense row-major matrix. Arithmetic takes the coefficient ring explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn zeros<R: Ring<Elem = E>>(ring: &R, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, ring.zero())
    }

    pub fn identity<R: Ring<Elem = E>>(ring: &R, dim: usize) -> Self {
        let mut m = Self::zeros(ring, dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ring.one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut E {
        &mut self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn map<F, T>(&self, f: F) -> Matrix<T>
    where
        F: FnMut(&E) -> T,
    {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn is_zero_in<R: Ring<Elem = E>>(&self, ring: &R) -> bool {
        self.data.iter().all(|x| ring.is_zero(x))
    }

    pub fn add_in<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "matrix add shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.add(a, b)).collect(),
        }
    }

    pub fn add_assign_in<R: Ring<Elem = E>>(&mut self, ring: &R, other: &Self) {
        assert_eq!(self.shape(), other.shape(), "matrix add shape");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            ring.add_assign(a, b);
        }
    }

    pub fn sub_in<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "matrix sub shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.sub(a, b)).collect(),
        }
    }

    pub fn neg_in<R: Ring<Elem = E>>(&self, ring: &R) -> Self {
        self.map(|a| ring.neg(a))
    }

    /// Left scaling `c · self` (entries multiplied as `c * a`).
    pub fn scale_in<R: Ring<Elem = E>>(&self, ring: &R, c: &E) -> Self {
        self.map(|a| ring.mul(c, a))
    }

    pub fn mul_in<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Matrix::zeros(ring, self.rows, other.cols);
        self.mul_acc_in(ring, other, &mut out);
        out
    }

    /// `out += self · other`.
    pub fn mul_acc_in<R: Ring<Elem = E>>(&self, ring: &R, other: &Self, out: &mut Self) {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        assert_eq!(out.shape(), (self.rows, other.cols), "matrix product output shape");
        let n = other.cols;
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self.data[i * self.cols + l];
                if ring.is_zero(a) {
                    continue;
                }
                let brow = &other.data[l * n..(l + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    if !ring.is_zero(b) {
                        ring.add_assign(o, &ring.mul(a, b));
                    }
                }
            }
        }
    }

    /// Row vector times matrix.
    pub fn vec_mul_in<R: Ring<Elem = E>>(ring: &R, v: &[E], m: &Self) -> Vec<E> {
        assert_eq!(v.len(), m.rows, "vector-matrix shape");
        let mut out = vec![ring.zero(); m.cols];
        for (l, a) in v.iter().enumerate() {
            if ring.is_zero(a) {
                continue;
            }
            for (o, b) in out.iter_mut().zip(m.row(l)) {
                if !ring.is_zero(b) {
                    ring.add_assign(o, &ring.mul(a, b));
                }
            }
        }
        out
    }
}

/// Square `dim × dim` matrices over a base ring; noncommutative for `dim ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixRing<R> {
    base: R,
    dim: usize,
}

impl<R: Ring> MatrixRing<R> {
    pub fn new(base: R, dim: usize) -> Self {
        assert!(dim >= 1, "matrix ring dimension must be positive");
        MatrixRing { base, dim }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn from_rows(&self, rows: Vec<Vec<R::Elem>>) -> Result<Matrix<R::Elem>, AlgebraError> {
        let m = Matrix::from_rows(rows);
        self.check(&m)?;
        Ok(m)
    }

    fn assert_shape(&self, m: &Matrix<R::Elem>) {
        assert_eq!(m.shape(), (self.dim, self.dim), "element of wrong dimension");
    }
}

impl<R: Ring> Ring for MatrixRing<R> {
    type Elem = Matrix<R::Elem>;

    fn zero(&self) -> Self::Elem {
        Matrix::zeros(&self.base, self.dim, self.dim)
    }

    fn one(&self) -> Self::Elem {
        Matrix::identity(&self.base, self.dim)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero_in(&self.base)
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.assert_shape(a);
        a.add_in(&self.base, b)
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.assert_shape(a);
        a.sub_in(&self.base, b)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.neg_in(&self.base)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.assert_shape(a);
        self.assert_shape(b);
        a.mul_in(&self.base, b)
    }

    fn from_bigint(&self, v: &BigInt) -> Self::Elem {
        let c = self.base.from_bigint(v);
        let mut m = self.zero();
        for i in 0..self.dim {
            m.set(i, i, c.clone());
        }
        m
    }

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        a.add_assign_in(&self.base, b);
    }

    fn scale_int(&self, a: &Self::Elem, c: &BigInt) -> Self::Elem {
        a.map(|x| self.base.scale_int(x, c))
    }

    fn check(&self, a: &Self::Elem) -> Result<(), AlgebraError> {
        if a.shape() != (self.dim, self.dim) {
            return Err(AlgebraError::DimensionMismatch {
                left: format!("{}x{}", a.rows(), a.cols()),
                right: format!("{}x{}", self.dim, self.dim),
            });
        }
        a.entries().iter().try_for_each(|x| self.base.check(x))
    }

    fn is_commutative(&self) -> bool {
        self.dim == 1 && self.base.is_commutative()
    }
}

impl<R: ScalarRing + Algebra<Scalars = R>> Algebra for MatrixRing<R> {
    type Scalars = R;

    fn scalars(&self) -> &R {
        &self.base
    }

    fn lift(&self, c: &R::Elem) -> Self::Elem {
        let mut m = self.zero();
        for i in 0..self.dim {
            m.set(i, i, c.clone());
        }
        m
    }

    fn scale(&self, c: &R::Elem, a: &Self::Elem) -> Self::Elem {
        a.scale_in(&self.base, c)
    }
}
