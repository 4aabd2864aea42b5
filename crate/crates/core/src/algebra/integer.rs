use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, RngCore};

use super::{Algebra, Ring, RingSpec, ScalarRing};

/// The integers with arbitrary precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

/// Random integers are drawn from `[-RANDOM_RANGE, RANDOM_RANGE]`.
const RANDOM_RANGE: i64 = 1 << 20;

impl Ring for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn one(&self) -> BigInt {
        BigInt::one()
    }

    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn from_bigint(&self, v: &BigInt) -> BigInt {
        v.clone()
    }

    fn add_assign(&self, a: &mut BigInt, b: &BigInt) {
        *a += b;
    }

    fn sub_assign(&self, a: &mut BigInt, b: &BigInt) {
        *a -= b;
    }

    fn scale_int(&self, a: &BigInt, c: &BigInt) -> BigInt {
        a * c
    }

    fn is_commutative(&self) -> bool {
        true
    }
}

impl ScalarRing for Integers {
    fn to_bigint(&self, a: &BigInt) -> BigInt {
        a.clone()
    }

    fn random(&self, rng: &mut dyn RngCore) -> BigInt {
        BigInt::from(rng.gen_range(-RANDOM_RANGE..=RANDOM_RANGE))
    }

    fn spec(&self) -> RingSpec {
        RingSpec::Integer
    }
}

impl Algebra for Integers {
    type Scalars = Integers;

    fn scalars(&self) -> &Integers {
        self
    }

    fn lift(&self, c: &BigInt) -> BigInt {
        c.clone()
    }

    fn scale(&self, c: &BigInt, a: &BigInt) -> BigInt {
        c * a
    }
}
