//! Exact ring arithmetic.
//!
//! Every algorithm in this crate is generic over [`Ring`]. Scalars come from
//! a [`PrimeField`] or from arbitrary-precision [`Integers`]; on top of a
//! scalar ring sit the noncommutative [`MatrixRing`], the block upper
//! triangular [`LayeredRing`] used for transfer matrices, and the truncated
//! [`ShiftAlgebra`]. [`Counted`] wraps any ring and counts operations.

mod counted;
mod integer;
mod layered;
mod matrix;
mod prime;
mod shift;
mod value;

use std::fmt;

use num_bigint::BigInt;
use rand::RngCore;
use thiserror::Error;

pub use counted::{Counted, OpCounter};
pub use integer::Integers;
pub use layered::{BlockUpper, LayeredRing};
pub use matrix::{Matrix, MatrixRing};
pub use prime::{is_prime_u64, random_prime, PrimeField, MAX_MODULUS_BITS};
pub(crate) use prime::{random_prime_with, reduce_bigint};
pub use shift::ShiftAlgebra;
pub use value::{ring_arithmetic, RingOp, RingSpec, RingValue};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("modulus {0} is not a prime below 2^62")]
    BadModulus(u64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: RingSpec, right: RingSpec },
    #[error("prime bit size {0} outside 16..=62")]
    PrimeBits(u32),
    #[error("no {bits}-bit prime found after {tries} rejections")]
    PrimeSearchExhausted { bits: u32, tries: u32 },
    #[error("cannot parse ring specification `{0}`")]
    BadSpec(String),
}

/// A ring with identity. Elements are plain values; the ring object carries
/// whatever context (modulus, dimension) the operations need.
///
/// Operations panic on elements of the wrong shape; use [`Ring::check`] at
/// API boundaries where the shape comes from user input.
pub trait Ring: Clone + Send + Sync + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// The image of an integer under the unique ring map `Z -> R`.
    #[allow(clippy::wrong_self_convention)]
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;

    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, v: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(v))
    }

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }

    fn sub_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.sub(a, b);
    }

    /// `c · a` for an integer `c`.
    fn scale_int(&self, a: &Self::Elem, c: &BigInt) -> Self::Elem {
        self.mul(&self.from_bigint(c), a)
    }

    /// Verifies that `a` has the shape this ring expects.
    fn check(&self, _a: &Self::Elem) -> Result<(), AlgebraError> {
        Ok(())
    }

    fn is_commutative(&self) -> bool;

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        let mut acc = self.zero();
        for x in items {
            self.add_assign(&mut acc, x);
        }
        acc
    }
}

/// A commutative ring of coefficients: a prime field or the integers.
pub trait ScalarRing: Ring {
    /// Canonical integer representative (`[0, p)` for a prime field).
    fn to_bigint(&self, a: &Self::Elem) -> BigInt;

    /// A uniformly random element (for the integers, a bounded random value).
    fn random(&self, rng: &mut dyn RngCore) -> Self::Elem;

    fn spec(&self) -> RingSpec;
}

/// A ring that is an algebra over a scalar ring: scalars embed centrally.
pub trait Algebra: Ring {
    type Scalars: ScalarRing;

    fn scalars(&self) -> &Self::Scalars;

    fn lift(&self, c: &<Self::Scalars as Ring>::Elem) -> Self::Elem;

    fn scale(&self, c: &<Self::Scalars as Ring>::Elem, a: &Self::Elem) -> Self::Elem {
        self.mul(&self.lift(c), a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_matches_repeated_multiplication() {
        let f = PrimeField::new(101).unwrap();
        let mut acc = f.one();
        for e in 0..20u64 {
            assert_eq!(f.pow(&7, e), acc);
            acc = f.mul(&acc, &7);
        }
    }
}
