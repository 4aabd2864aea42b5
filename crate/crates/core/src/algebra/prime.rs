use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Algebra, AlgebraError, Ring, RingSpec, ScalarRing};

/// Moduli are kept below 2^62 so every product fits a u128 intermediate.
pub const MAX_MODULUS_BITS: u32 = 62;

const MAX_PRIME_REJECTIONS: u32 = 10_000;

/// The prime field `F_p`, elements canonical in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, AlgebraError> {
        if p >= 1 << MAX_MODULUS_BITS || !is_prime_u64(p) {
            return Err(AlgebraError::BadModulus(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(pow_mod(a, self.p - 2, self.p))
        }
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }

    #[inline]
    fn one(&self) -> u64 {
        1 % self.p
    }

    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }

    fn from_bigint(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.p)).to_u64().expect("reduced value fits u64")
    }

    fn from_i64(&self, v: i64) -> u64 {
        self.reduce_i64(v)
    }

    fn is_commutative(&self) -> bool {
        true
    }
}

impl ScalarRing for PrimeField {
    fn to_bigint(&self, a: &u64) -> BigInt {
        BigInt::from(*a)
    }

    fn random(&self, rng: &mut dyn RngCore) -> u64 {
        rng.gen_range(0..self.p)
    }

    fn spec(&self) -> RingSpec {
        RingSpec::PrimeField(self.p)
    }
}

impl Algebra for PrimeField {
    type Scalars = PrimeField;

    fn scalars(&self) -> &PrimeField {
        self
    }

    fn lift(&self, c: &u64) -> u64 {
        *c
    }

    fn scale(&self, c: &u64, a: &u64) -> u64 {
        self.mul(c, a)
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A uniformly random prime with exactly `bits` bits, reproducible from
/// `seed`. Candidates are drawn uniformly among odd `bits`-bit integers and
/// rejected until one is prime.
pub fn random_prime(bits: u32, seed: u64) -> Result<u64, AlgebraError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_prime_with(bits, &mut rng)
}

pub(crate) fn random_prime_with(bits: u32, rng: &mut dyn RngCore) -> Result<u64, AlgebraError> {
    if !(16..=MAX_MODULUS_BITS).contains(&bits) {
        return Err(AlgebraError::PrimeBits(bits));
    }
    let lo = 1u64 << (bits - 1);
    let hi = 1u64 << bits;
    for _ in 0..MAX_PRIME_REJECTIONS {
        let candidate = rng.gen_range(lo..hi) | 1;
        if is_prime_u64(candidate) {
            return Ok(candidate);
        }
    }
    Err(AlgebraError::PrimeSearchExhausted { bits, tries: MAX_PRIME_REJECTIONS })
}

/// Reduction of a possibly negative big integer into `[0, p)`.
pub(crate) fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    let r = v.abs() % p;
    let r = r.to_u64().unwrap();
    if v.is_negative() && r != 0 {
        p - r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn addition_wraps() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.add(&5, &4), 2);
        assert_eq!(f.sub(&2, &5), 4);
        assert_eq!(f.neg(&0), 0);
        assert_eq!(f.from_i64(-1), 6);
    }

    #[test]
    fn rejects_composites_and_large_moduli() {
        assert!(PrimeField::new(15).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new((1u64 << 62) + 135).is_err());
        assert!(PrimeField::new(4_611_686_018_427_387_847).is_ok()); // largest prime < 2^62
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        fn trial(n: u64) -> bool {
            n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
        }
        for n in 0..5000 {
            assert_eq!(is_prime_u64(n), trial(n), "n = {n}");
        }
        // strong pseudoprimes to several small bases
        assert!(!is_prime_u64(3_215_031_751));
        assert!(!is_prime_u64(3_825_123_056_546_413_051));
    }

    #[test]
    fn random_prime_contract() {
        let p = random_prime(16, 1).unwrap();
        assert!(is_prime_u64(p));
        assert_eq!(64 - p.leading_zeros(), 16);
        assert_eq!(random_prime(16, 1).unwrap(), p);

        let v = random_prime(31, 7).unwrap();
        assert!((1u64 << 30..1u64 << 31).contains(&v));
        assert!(is_prime_u64(v));

        let big = random_prime(62, 3).unwrap();
        assert!(PrimeField::new(big).is_ok());
    }

    #[test]
    fn random_prime_rejects_bad_bit_sizes() {
        assert_eq!(random_prime(15, 0), Err(AlgebraError::PrimeBits(15)));
        assert_eq!(random_prime(63, 0), Err(AlgebraError::PrimeBits(63)));
    }

    proptest! {
        #[test]
        fn field_agrees_with_integer_reduction(
            a in -1_000_000_000i64..1_000_000_000,
            b in -1_000_000_000i64..1_000_000_000,
            c in -1_000_000_000i64..1_000_000_000,
        ) {
            let p = 1_000_003u64;
            let f = PrimeField::new(p).unwrap();
            let (fa, fb, fc) = (f.from_i64(a), f.from_i64(b), f.from_i64(c));
            let expr = f.sub(&f.mul(&f.add(&fa, &fb), &fc), &f.mul(&fa, &fa));
            let exact = (BigInt::from(a) + b) * c - BigInt::from(a) * a;
            prop_assert_eq!(expr, reduce_bigint(&exact, p));
            prop_assert_eq!(f.from_bigint(&exact), reduce_bigint(&exact, p));
        }

        #[test]
        fn field_axioms(a in 0u64..97, b in 0u64..97, c in 0u64..97) {
            let f = PrimeField::new(97).unwrap();
            prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            if a != 0 {
                prop_assert_eq!(f.mul(&a, &f.inv(a).unwrap()), 1);
            }
        }
    }
}
