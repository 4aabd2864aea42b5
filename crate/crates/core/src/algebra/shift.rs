use num_bigint::BigInt;

use super::{Algebra, Ring, ScalarRing};

/// `F[t] / (t^len)`, stored as coefficient vectors of length `len`.
///
/// This is the commutative subalgebra of `len × len` matrices generated by
/// the nilpotent shift matrix `N` (ones on the superdiagonal): the element
/// `Σ c_i t^i` is the upper-triangular Toeplitz matrix `Σ c_i N^i`, and its
/// top-right corner is the coefficient of `t^(len-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftAlgebra<R> {
    base: R,
    len: usize,
}

impl<R: Ring> ShiftAlgebra<R> {
    pub fn new(base: R, len: usize) -> Self {
        assert!(len >= 1);
        ShiftAlgebra { base, len }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `c · t`.
    pub fn shift(&self, c: R::Elem) -> Vec<R::Elem> {
        let mut v = self.zero();
        if self.len > 1 {
            v[1] = c;
        }
        v
    }

    /// Coefficient of `t^(len-1)`: the corner entry of the matrix form.
    pub fn corner(&self, a: &[R::Elem]) -> R::Elem {
        a[self.len - 1].clone()
    }
}

impl<R: Ring> Ring for ShiftAlgebra<R> {
    type Elem = Vec<R::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.len]
    }

    fn one(&self) -> Self::Elem {
        let mut v = self.zero();
        v[0] = self.base.one();
        v
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|x| self.base.is_zero(x))
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().take(self.len - i).enumerate() {
                if !self.base.is_zero(y) {
                    self.base.add_assign(&mut out[i + j], &self.base.mul(x, y));
                }
            }
        }
        out
    }

    fn from_bigint(&self, v: &BigInt) -> Self::Elem {
        let mut out = self.zero();
        out[0] = self.base.from_bigint(v);
        out
    }

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        for (x, y) in a.iter_mut().zip(b) {
            self.base.add_assign(x, y);
        }
    }

    fn scale_int(&self, a: &Self::Elem, c: &BigInt) -> Self::Elem {
        a.iter().map(|x| self.base.scale_int(x, c)).collect()
    }

    fn is_commutative(&self) -> bool {
        self.base.is_commutative()
    }
}

impl<R: ScalarRing + Algebra<Scalars = R>> Algebra for ShiftAlgebra<R> {
    type Scalars = R;

    fn scalars(&self) -> &R {
        &self.base
    }

    fn lift(&self, c: &R::Elem) -> Self::Elem {
        let mut v = self.zero();
        v[0] = c.clone();
        v
    }

    fn scale(&self, c: &R::Elem, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.mul(c, x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Matrix, MatrixRing, PrimeField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toeplitz(f: &PrimeField, v: &[u64]) -> Matrix<u64> {
        let n = v.len();
        let mut m = Matrix::zeros(f, n, n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, v[j - i]);
            }
        }
        m
    }

    #[test]
    fn matches_upper_toeplitz_matrices() {
        let f = PrimeField::new(101).unwrap();
        let alg = ShiftAlgebra::new(f, 5);
        let mats = MatrixRing::new(f, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let a: Vec<u64> = (0..5).map(|_| rng.gen_range(0..101)).collect();
            let b: Vec<u64> = (0..5).map(|_| rng.gen_range(0..101)).collect();
            let prod = alg.mul(&a, &b);
            assert_eq!(toeplitz(&f, &prod), mats.mul(&toeplitz(&f, &a), &toeplitz(&f, &b)));
            assert_eq!(alg.corner(&prod), *toeplitz(&f, &prod).get(0, 4));
        }
    }

    #[test]
    fn shift_is_nilpotent() {
        let f = PrimeField::new(7).unwrap();
        let alg = ShiftAlgebra::new(f, 4);
        let t = alg.shift(1);
        assert_eq!(alg.corner(&alg.pow(&t, 3)), 1);
        assert!(alg.is_zero(&alg.pow(&t, 4)));
    }
}
