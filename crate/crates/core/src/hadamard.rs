//! Scaled Hadamard products with a product of linear forms.
//!
//! For `f = L_1 ⋯ L_k`, the symmetrization `f*` is the permanent of the
//! `k × k` matrix with identical rows `(L_1, ..., L_k)`, so by Ryser
//! `f* = Σ_{S⊆[k]} (-1)^{k-|S|} (L_S)^k` with `L_S = Σ_{j∈S} L_j`. Each power
//! `(L_S)^k` is a width-one program; substituting its transfer matrices into
//! `g` and reading the corner gives the Hadamard contribution of that term.
//! The transfer matrices of a width-one program are multiples of the shift
//! matrix `N`, so the evaluation runs in `F[t]/t^{k+1}` with `x_i ↦ c_i t`.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::abp::{circuit_to_abp, transfer_matrices, Abp, AbpOptions};
use crate::algebra::{Counted, MatrixRing, OpCounter, Ring, ScalarRing, ShiftAlgebra};
use crate::circuit::{Circuit, CircuitError, LinearForm, PiSigma};
use crate::rper::{s_star_eval, RperAlgo, RperBudget};

/// One term `sign · (L_S)^k` of the Ryser expansion of `f*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RyserTerm {
    /// `+1` or `-1`.
    pub sign: i8,
    /// Bitmask of `S ⊆ [k]`.
    pub subset: u64,
    /// `L_S`.
    pub form: LinearForm,
    pub k: usize,
}

impl RyserTerm {
    /// The width-one program `L_S ⋯ L_S` with `k` layers.
    pub fn to_abp(&self, nvars: usize) -> Abp {
        Abp::from_forms(nvars, &vec![self.form.clone(); self.k.max(1)]).expect("forms fit the variable count")
    }
}

/// Largest degree for which the subset masks fit.
pub const MAX_PISIGMA_DEGREE: usize = 63;

/// The `2^k` Ryser terms of `f*`, in Gray-code order; `L_S` is updated by one form per step.
pub fn symmetrize_pisigma_terms(f: &PiSigma) -> Result<impl Iterator<Item = RyserTerm> + '_, CircuitError> {
    f.check_homogeneous()?;
    let k = f.degree();
    if k > MAX_PISIGMA_DEGREE {
        return Err(CircuitError::DegreeTooLarge { k, n: MAX_PISIGMA_DEGREE });
    }
    Ok(GrayTerms::new(f.forms(), 0, 1u64 << k))
}

/// Terms with Gray-code index in `[start, end)`.
struct GrayTerms<'a> {
    forms: &'a [LinearForm],
    next: u64,
    end: u64,
    mask: u64,
    form: LinearForm,
}

fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

impl<'a> GrayTerms<'a> {
    fn new(forms: &'a [LinearForm], start: u64, end: u64) -> Self {
        let mask = gray(start);
        let mut form = LinearForm::zero();
        for (j, l) in forms.iter().enumerate() {
            if mask >> j & 1 == 1 {
                form = form.add(l);
            }
        }
        GrayTerms { forms, next: start, end, mask, form }
    }
}

impl Iterator for GrayTerms<'_> {
    type Item = RyserTerm;

    fn next(&mut self) -> Option<RyserTerm> {
        if self.next >= self.end {
            return None;
        }
        if self.next > 0 && gray(self.next) != self.mask {
            let bit = self.next.trailing_zeros() as usize;
            self.mask ^= 1 << bit;
            self.form = if self.mask >> bit & 1 == 1 {
                self.form.add(&self.forms[bit])
            } else {
                self.form.sub(&self.forms[bit])
            };
        }
        self.next += 1;
        let k = self.forms.len();
        let sign = if (k - self.mask.count_ones() as usize).is_multiple_of(2) { 1 } else { -1 };
        Some(RyserTerm { sign, subset: self.mask, form: self.form.clone(), k })
    }
}

fn check_arity(g: &Circuit, f: &PiSigma, point_len: usize) -> Result<(), CircuitError> {
    if f.nvars() != g.nvars() {
        return Err(CircuitError::Arity { expected: g.nvars(), got: f.nvars() });
    }
    if point_len != g.nvars() {
        return Err(CircuitError::Arity { expected: g.nvars(), got: point_len });
    }
    Ok(())
}

fn term_value<R: ScalarRing>(alg: &Counted<ShiftAlgebra<R>>, g: &Circuit, t: &RyserTerm, point: &[R::Elem]) -> R::Elem {
    let shift = alg.inner();
    let base = shift.base();
    let xs: Vec<Vec<R::Elem>> = point
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let c = t.form.coeff(i);
            if c.is_zero() {
                alg.zero()
            } else {
                shift.shift(base.mul(&base.from_bigint(&c), a))
            }
        })
        .collect();
    shift.corner(&g.eval_unchecked(alg, &xs))
}

fn accumulate<R: ScalarRing>(base: &R, acc: &mut R::Elem, t: &RyserTerm, v: &R::Elem) {
    if t.sign > 0 {
        base.add_assign(acc, v);
    } else {
        base.sub_assign(acc, v);
    }
}

/// `(f ∘ˢ g)(a) = Σ_m m!·[m]f·[m]g·m(a)`, streaming over the Ryser terms of `f*`.
///
/// `g` is not homogenized: terms of other degrees vanish at the `t^k` coefficient.
pub fn hadamard_pisigma_eval<R: ScalarRing>(ring: &R, g: &Circuit, f: &PiSigma, point: &[R::Elem]) -> Result<R::Elem, CircuitError> {
    hadamard_pisigma_eval_counted(ring, g, f, point, &OpCounter::new())
}

/// As [`hadamard_pisigma_eval`], counting operations in `F[t]/t^{k+1}` on `counter`.
pub fn hadamard_pisigma_eval_counted<R: ScalarRing>(
    ring: &R,
    g: &Circuit,
    f: &PiSigma,
    point: &[R::Elem],
    counter: &OpCounter,
) -> Result<R::Elem, CircuitError> {
    check_arity(g, f, point.len())?;
    let alg = Counted::with_counter(ShiftAlgebra::new(ring.clone(), f.degree() + 1), counter.clone());
    let mut acc = ring.zero();
    for t in symmetrize_pisigma_terms(f)? {
        let v = term_value(&alg, g, &t, point);
        accumulate(ring, &mut acc, &t, &v);
    }
    Ok(acc)
}

/// Parallel version over `chunks` contiguous Gray-code ranges; the result is identical.
pub fn hadamard_pisigma_eval_par<R: ScalarRing>(
    ring: &R,
    g: &Circuit,
    f: &PiSigma,
    point: &[R::Elem],
    chunks: usize,
    counter: &OpCounter,
) -> Result<R::Elem, CircuitError> {
    check_arity(g, f, point.len())?;
    f.check_homogeneous()?;
    let k = f.degree();
    if k > MAX_PISIGMA_DEGREE {
        return Err(CircuitError::DegreeTooLarge { k, n: MAX_PISIGMA_DEGREE });
    }
    let total = 1u64 << k;
    let chunks = (chunks.max(1) as u64).min(total);
    let alg = Counted::with_counter(ShiftAlgebra::new(ring.clone(), k + 1), counter.clone());
    let parts: Vec<R::Elem> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let (lo, hi) = (total * c / chunks, total * (c + 1) / chunks);
            let mut acc = ring.zero();
            for t in GrayTerms::new(f.forms(), lo, hi) {
                let v = term_value(&alg, g, &t, point);
                accumulate(ring, &mut acc, &t, &v);
            }
            acc
        })
        .collect();
    Ok(ring.sum(parts.iter()))
}

/// The literal route: `g` evaluated on the `(k+1) × (k+1)` transfer matrices of each `(L_S)^k`.
pub fn hadamard_pisigma_eval_matrix<R: ScalarRing>(ring: &R, g: &Circuit, f: &PiSigma, point: &[R::Elem]) -> Result<R::Elem, CircuitError> {
    check_arity(g, f, point.len())?;
    let k = f.degree();
    let mats = MatrixRing::new(ring.clone(), k + 1);
    let mut acc = ring.zero();
    for t in symmetrize_pisigma_terms(f)? {
        let v = if k == 0 {
            g.eval_unchecked(ring, &vec![ring.zero(); g.nvars()])
        } else {
            let tm = transfer_matrices(ring, &t.to_abp(g.nvars()), Some(point)).expect("width-one program is homogeneous");
            let xs: Vec<_> = (0..g.nvars()).map(|v| tm.padded(v)).collect();
            g.eval_unchecked(&mats, &xs).get(0, k).clone()
        };
        accumulate(ring, &mut acc, &t, &v);
    }
    Ok(acc)
}

/// `Σ` of the coefficients of the degree-`k` multilinear monomials of the program,
/// as the corner of `S*_{n,k}(A_1, ..., A_n)` over its transfer matrices.
///
/// Affine programs are homogenized to degree `k` first.
pub fn multilinear_part_sum_abp<R: Ring>(ring: &R, abp: &Abp, k: usize, algo: RperAlgo, budget: &RperBudget) -> crate::Result<R::Elem> {
    if k > abp.nvars() {
        return Ok(ring.zero());
    }
    let h;
    let abp = if abp.is_homogeneous() && abp.degree() == k {
        abp
    } else if abp.is_homogeneous() {
        return Ok(ring.zero());
    } else if k == 0 {
        return Ok(ring.from_bigint(&abp.constant_term()));
    } else {
        h = abp.homogenize(k)?;
        &h
    };
    let tm = transfer_matrices(ring, abp, None)?;
    let v = s_star_eval(tm.ring(), tm.mats(), k, algo, budget)?;
    Ok(tm.corner(&v))
}

/// [`multilinear_part_sum_abp`] after converting `g` to a program.
pub fn multilinear_part_sum<R: Ring>(
    ring: &R,
    g: &Circuit,
    k: usize,
    algo: RperAlgo,
    budget: &RperBudget,
    opts: &AbpOptions,
) -> crate::Result<R::Elem> {
    if k > g.nvars() {
        return Ok(ring.zero());
    }
    if k == 0 {
        let c = crate::circuit::brute_expand(g, Some(0), 1)?;
        return Ok(ring.from_bigint(&c.coeff(&crate::circuit::Monomial::one())));
    }
    let abp = circuit_to_abp(g, k, opts)?;
    multilinear_part_sum_abp(ring, &abp, k, algo, budget)
}

/// The oracle `Σ_m m!·[m]f·[m]g·m(a)` from expanded polynomials, as an integer.
pub fn hadamard_oracle(g: &Circuit, f: &PiSigma, point: &[BigInt], term_cap: usize) -> Result<BigInt, CircuitError> {
    let pg = crate::circuit::brute_expand(g, Some(f.degree() as u32), term_cap)?;
    let pf = f.expand();
    let h = pf.scaled_hadamard(&pg);
    Ok(h.eval(&crate::algebra::Integers, point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Integers, PrimeField};
    use crate::circuit::{brute_expand, elementary_symmetric, parse_circuit, Monomial, WordPoly, DEFAULT_TERM_CAP};
    use rand::Rng;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn signed_sum(f: &PiSigma) -> WordPoly {
        let mut acc = WordPoly::zero();
        for t in symmetrize_pisigma_terms(f).unwrap() {
            let w = t.to_abp(f.nvars()).expand_words(DEFAULT_TERM_CAP).unwrap();
            acc = acc.add(&w.scale(&b(t.sign as i64)));
        }
        acc
    }

    #[test]
    fn term_count_and_signs() {
        let f = PiSigma::new(2, vec![LinearForm::var(0), LinearForm::var(1), LinearForm::var(0)]).unwrap();
        let terms: Vec<_> = symmetrize_pisigma_terms(&f).unwrap().collect();
        assert_eq!(terms.len(), 8);
        let mut masks: Vec<u64> = terms.iter().map(|t| t.subset).collect();
        masks.sort();
        assert_eq!(masks, (0..8).collect::<Vec<_>>());
        for t in &terms {
            let want = (0..3).filter(|j| t.subset >> j & 1 == 1).fold(LinearForm::zero(), |a, j| a.add(&f.forms()[j]));
            assert_eq!(t.form, want);
            assert_eq!(t.sign, if (3 - t.subset.count_ones()) % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn symmetrization_of_small_products() {
        let xy = PiSigma::new(2, vec![LinearForm::var(0), LinearForm::var(1)]).unwrap();
        let s = signed_sum(&xy);
        assert_eq!(s.coeff(&[0, 1]), b(1));
        assert_eq!(s.coeff(&[1, 0]), b(1));
        assert_eq!(s.coeff(&[0, 0]), b(0));
        let xx = PiSigma::new(1, vec![LinearForm::var(0), LinearForm::var(0)]).unwrap();
        assert_eq!(signed_sum(&xx).coeff(&[0, 0]), b(2));
        let single = PiSigma::new(1, vec![LinearForm::term(0, b(3))]).unwrap();
        assert_eq!(signed_sum(&single).coeff(&[0]), b(3));
    }

    #[test]
    fn word_coefficients_are_scaled_monomial_coefficients() {
        let mut rng = crate::gen::rng(8);
        for _ in 0..30 {
            let n = rng.gen_range(1..=3);
            let k = rng.gen_range(1..=3);
            let f = crate::gen::random_pisigma(&mut rng, n, k, -3, 3);
            let pf = f.expand();
            for (w, c) in signed_sum(&f).terms() {
                let m = Monomial::from_vars(w);
                assert_eq!(c, &(m.factorial() * pf.coeff(&m)));
            }
        }
    }

    #[test]
    fn hadamard_examples() {
        let g = parse_circuit("ninputs 3\na = input 1\nb = input 2\nc = input 3\nab = mul a b\nbc = mul b c\ns = add ab bc\noutput s\n").unwrap();
        let f = PiSigma::new(3, vec![LinearForm::var(0), LinearForm::var(1)]).unwrap();
        assert_eq!(hadamard_pisigma_eval(&Integers, &g, &f, &[b(1), b(1), b(1)]).unwrap(), b(1));
        let sq = parse_circuit("ninputs 1\na = input 1\ns = mul a a\noutput s\n").unwrap();
        let ff = PiSigma::new(1, vec![LinearForm::var(0), LinearForm::var(0)]).unwrap();
        assert_eq!(hadamard_pisigma_eval(&Integers, &sq, &ff, &[b(1)]).unwrap(), b(2));
    }

    #[test]
    fn random_instances_against_oracle_and_matrix_route() {
        let f = PrimeField::new(1_000_003).unwrap();
        for seed in 0..40 {
            let mut rng = crate::gen::rng(seed);
            let n = rng.gen_range(1..=5);
            let k = rng.gen_range(1..=4);
            let size = rng.gen_range(4..=20);
            let g = crate::gen::random_circuit(&mut rng, n, size, 6);
            let ps = crate::gen::random_pisigma(&mut rng, n, k, -3, 3);
            let pt: Vec<BigInt> = (0..n).map(|_| b(rng.gen_range(-5..=5))).collect();
            let want = hadamard_oracle(&g, &ps, &pt, DEFAULT_TERM_CAP).unwrap();
            assert_eq!(hadamard_pisigma_eval(&Integers, &g, &ps, &pt).unwrap(), want, "seed {seed}");
            assert_eq!(hadamard_pisigma_eval_matrix(&Integers, &g, &ps, &pt).unwrap(), want);
            let ptf: Vec<u64> = pt.iter().map(|x| crate::algebra::reduce_bigint(x, 1_000_003)).collect();
            let seq = hadamard_pisigma_eval(&f, &g, &ps, &ptf).unwrap();
            assert_eq!(BigInt::from(seq), crate::algebra::RingSpec::PrimeField(1_000_003).reduce(&want));
            for chunks in [1, 3, 64] {
                assert_eq!(hadamard_pisigma_eval_par(&f, &g, &ps, &ptf, chunks, &OpCounter::new()).unwrap(), seq);
            }
        }
    }

    #[test]
    fn grading_makes_homogenization_unnecessary() {
        for seed in 0..20 {
            let mut rng = crate::gen::rng(50 + seed);
            let g = crate::gen::random_circuit(&mut rng, 4, 16, 5);
            let ps = crate::gen::random_pisigma(&mut rng, 4, 3, -2, 2);
            let pt: Vec<BigInt> = (0..4).map(|_| b(rng.gen_range(-4..=4))).collect();
            let h = crate::circuit::homogenize(&g, 3);
            assert_eq!(
                hadamard_pisigma_eval(&Integers, &g, &ps, &pt).unwrap(),
                hadamard_pisigma_eval(&Integers, &h, &ps, &pt).unwrap()
            );
        }
    }

    #[test]
    fn arity_mismatch() {
        let g = elementary_symmetric(3, 2).unwrap();
        let f = PiSigma::new(2, vec![LinearForm::var(0), LinearForm::var(1)]).unwrap();
        assert!(matches!(hadamard_pisigma_eval(&Integers, &g, &f, &vec![b(1); 3]), Err(CircuitError::Arity { .. })));
    }

    #[test]
    fn multilinear_part_sums() {
        let s52 = elementary_symmetric(5, 2).unwrap();
        let opts = AbpOptions::default();
        let budget = RperBudget::default();
        for algo in [RperAlgo::Brute, RperAlgo::RectRyser, RperAlgo::Halves] {
            assert_eq!(multilinear_part_sum(&Integers, &s52, 2, algo, &budget, &opts).unwrap(), b(10));
        }
        let sq = parse_circuit("ninputs 1\na = input 1\ns = mul a a\noutput s\n").unwrap();
        assert_eq!(multilinear_part_sum(&Integers, &sq, 2, RperAlgo::Halves, &budget, &opts).unwrap(), b(0));
        for seed in 0..40 {
            let mut rng = crate::gen::rng(200 + seed);
            let n = rng.gen_range(1..=7);
            let k = rng.gen_range(1..=3.min(n));
            let size = rng.gen_range(3..=20);
            let g = crate::gen::random_circuit(&mut rng, n, size, 5);
            let want = brute_expand(&g, None, DEFAULT_TERM_CAP).unwrap().multilinear_sum(k as u32);
            for algo in [RperAlgo::Brute, RperAlgo::RectRyser, RperAlgo::Halves] {
                assert_eq!(multilinear_part_sum(&Integers, &g, k, algo, &budget, &opts).unwrap(), want, "seed {seed}");
            }
        }
    }

    #[test]
    fn affine_programs_are_homogenized() {
        let a = Abp::elementary_symmetric(6, 3).unwrap();
        assert_eq!(multilinear_part_sum_abp(&Integers, &a, 3, RperAlgo::Halves, &RperBudget::default()).unwrap(), b(20));
    }
}
