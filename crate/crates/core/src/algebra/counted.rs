use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;

use super::{Algebra, AlgebraError, Ring};

/// Shared counter of ring operations.
#[derive(Clone, Debug, Default)]
pub struct OpCounter(Arc<AtomicU64>);

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }

    #[inline]
    fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }
}

/// Wraps a ring and counts every add, sub, neg, mul and integer scaling.
/// Constructing constants (`zero`, `one`, `from_bigint`) is free.
#[derive(Clone, Debug)]
pub struct Counted<R> {
    inner: R,
    counter: OpCounter,
}

impl<R: Ring> Counted<R> {
    pub fn new(inner: R) -> Self {
        Counted { inner, counter: OpCounter::new() }
    }

    pub fn with_counter(inner: R, counter: OpCounter) -> Self {
        Counted { inner, counter }
    }

    pub fn inner(&self) -> &R {
        &self.inner
    }

    pub fn counter(&self) -> &OpCounter {
        &self.counter
    }

    pub fn ops(&self) -> u64 {
        self.counter.get()
    }
}

impl<R: Ring> Ring for Counted<R> {
    type Elem = R::Elem;

    fn zero(&self) -> R::Elem {
        self.inner.zero()
    }

    fn one(&self) -> R::Elem {
        self.inner.one()
    }

    fn is_zero(&self, a: &R::Elem) -> bool {
        self.inner.is_zero(a)
    }

    fn add(&self, a: &R::Elem, b: &R::Elem) -> R::Elem {
        self.counter.bump();
        self.inner.add(a, b)
    }

    fn sub(&self, a: &R::Elem, b: &R::Elem) -> R::Elem {
        self.counter.bump();
        self.inner.sub(a, b)
    }

    fn neg(&self, a: &R::Elem) -> R::Elem {
        self.counter.bump();
        self.inner.neg(a)
    }

    fn mul(&self, a: &R::Elem, b: &R::Elem) -> R::Elem {
        self.counter.bump();
        self.inner.mul(a, b)
    }

    fn from_bigint(&self, v: &BigInt) -> R::Elem {
        self.inner.from_bigint(v)
    }

    fn from_i64(&self, v: i64) -> R::Elem {
        self.inner.from_i64(v)
    }

    fn add_assign(&self, a: &mut R::Elem, b: &R::Elem) {
        self.counter.bump();
        self.inner.add_assign(a, b)
    }

    fn sub_assign(&self, a: &mut R::Elem, b: &R::Elem) {
        self.counter.bump();
        self.inner.sub_assign(a, b)
    }

    fn scale_int(&self, a: &R::Elem, c: &BigInt) -> R::Elem {
        self.counter.bump();
        self.inner.scale_int(a, c)
    }

    fn check(&self, a: &R::Elem) -> Result<(), AlgebraError> {
        self.inner.check(a)
    }

    fn is_commutative(&self) -> bool {
        self.inner.is_commutative()
    }
}

impl<R: Algebra> Algebra for Counted<R> {
    type Scalars = R::Scalars;

    fn scalars(&self) -> &R::Scalars {
        self.inner.scalars()
    }

    fn lift(&self, c: &<R::Scalars as Ring>::Elem) -> R::Elem {
        self.inner.lift(c)
    }

    fn scale(&self, c: &<R::Scalars as Ring>::Elem, a: &R::Elem) -> R::Elem {
        self.counter.bump();
        self.inner.scale(c, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeField;

    #[test]
    fn counts_operations_not_constants() {
        let ring = Counted::new(PrimeField::new(7).unwrap());
        let a = ring.from_i64(3);
        let b = ring.one();
        let c = ring.mul(&ring.add(&a, &b), &a);
        let _ = ring.zero();
        assert_eq!(c, 5);
        assert_eq!(ring.ops(), 2);
        let clone = ring.clone();
        clone.neg(&a);
        assert_eq!(ring.ops(), 3, "clones share the counter");
    }
}
