//! Counting and detection of degree-k multilinear monomials.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::abp::{circuit_to_abp, Abp, AbpOptions};
use crate::algebra::{random_prime_with, Counted, Integers, OpCounter, PrimeField, Ring, RingSpec, ScalarRing};
use crate::circuit::{brute_expand, elementary_symmetric, Circuit, CircuitBuilder, LinearForm, PiSigma, Sps};
use crate::hadamard::{hadamard_pisigma_eval_counted, multilinear_part_sum_abp, symmetrize_pisigma_terms};
use crate::rper::{RperAlgo, RperBudget};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("field of size {p} is too small for error {delta}: need p > {needed}")]
    FieldTooSmall { p: u64, needed: u64, delta: f64 },
    #[error("error budget {0} must lie strictly between 0 and 1")]
    BadErrorBudget(f64),
    #[error("{0} requires integer mode")]
    NeedsIntegers(&'static str),
    #[error("k = {0} is out of range for detection")]
    BadDegree(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MlcOptions {
    pub algo: RperAlgo,
    pub abp: AbpOptions,
    pub budget: RperBudget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MlcReport<E> {
    pub value: E,
    /// Base-ring operations spent in the permanent.
    pub ops: u64,
    pub abp_width: usize,
    pub abp_edges: usize,
}

/// The sum of the coefficients of all degree-`k` multilinear monomials of `g`.
pub fn mlc_count<R: Ring>(ring: &R, g: &Circuit, k: usize, opts: &MlcOptions) -> crate::Result<MlcReport<R::Elem>> {
    if k == 0 || k > g.nvars() {
        let value = crate::hadamard::multilinear_part_sum(ring, g, k, opts.algo, &opts.budget, &opts.abp)?;
        return Ok(MlcReport { value, ops: 0, abp_width: 0, abp_edges: 0 });
    }
    let abp = circuit_to_abp(g, k, &opts.abp)?;
    mlc_count_abp(ring, &abp, k, opts)
}

/// [`mlc_count`] for a program; affine programs are homogenized first.
pub fn mlc_count_abp<R: Ring>(ring: &R, abp: &Abp, k: usize, opts: &MlcOptions) -> crate::Result<MlcReport<R::Elem>> {
    let counted = Counted::new(ring.clone());
    let value = multilinear_part_sum_abp(&counted, abp, k, opts.algo, &opts.budget)?;
    Ok(MlcReport { value, ops: counted.ops(), abp_width: abp.max_width(), abp_edges: abp.edge_count() })
}

/// The same sum from the expanded polynomial.
pub fn mlc_oracle(g: &Circuit, k: usize, term_cap: usize) -> crate::Result<BigInt> {
    Ok(brute_expand(g, Some(k as u32), term_cap)?.multilinear_sum(k as u32))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MmdScheme {
    /// `k` colors, about `e^k` colorings.
    #[default]
    Basic,
    /// `⌈1.3k⌉` colors padded by an elementary symmetric polynomial in new variables.
    Fast,
}

impl fmt::Display for MmdScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MmdScheme::Basic => "basic",
            MmdScheme::Fast => "fast",
        })
    }
}

impl FromStr for MmdScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "basic" => Ok(MmdScheme::Basic),
            "fast" => Ok(MmdScheme::Fast),
            _ => Err(format!("unknown scheme `{s}` (expected basic or fast)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MmdConfig {
    pub scheme: MmdScheme,
    /// Overall miss probability `δ`, split evenly between coloring coverage,
    /// the random evaluation point and (in integer mode) the random prime.
    pub error: f64,
    pub seed: u64,
    /// `PrimeField(p)` evaluates over `F_p`; `Integer` uses a fresh random prime per coloring.
    pub ring: RingSpec,
    pub prime_bits: u32,
}

impl Default for MmdConfig {
    fn default() -> Self {
        MmdConfig { scheme: MmdScheme::Basic, error: 0.1, seed: 0, ring: RingSpec::Integer, prime_bits: 62 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmdReport {
    pub found: bool,
    /// Colorings the error budget calls for.
    pub trials: u64,
    /// Index of the first coloring with a nonzero value.
    pub found_at: Option<u64>,
    /// Colors per coloring.
    pub colors: usize,
    /// Operations in the truncated polynomial ring, over the colorings up to `found_at` (or all).
    pub ops: u64,
}

/// Number of colors: `k` for the basic scheme, `⌈1.3k⌉` for the fast one.
pub fn mmd_colors(k: usize, scheme: MmdScheme) -> usize {
    match scheme {
        MmdScheme::Basic => k,
        MmdScheme::Fast => (13 * k).div_ceil(10),
    }
}

/// `⌈r^k ln(3/δ)⌉` with `r = e` (basic) or `1.752` (fast).
pub fn mmd_trials(k: usize, delta: f64, scheme: MmdScheme) -> u64 {
    let rate: f64 = match scheme {
        MmdScheme::Basic => std::f64::consts::E,
        MmdScheme::Fast => 1.752,
    };
    (rate.powi(k as i32) * (3.0 / delta).ln()).ceil().max(1.0) as u64
}

/// Probability that `k` fixed variables get distinct colors out of `c`.
pub fn colorful_probability(k: usize, c: usize) -> f64 {
    (0..k).map(|i| (c - i) as f64 / c as f64).product()
}

/// A map from variables to colors, reproducible from `(seed, trial)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub classes: usize,
    pub seed: u64,
    pub trial: u64,
}

impl Coloring {
    pub fn random<R: Rng>(rng: &mut R, n: usize, classes: usize, seed: u64, trial: u64) -> Self {
        Coloring { colors: (0..n).map(|_| rng.gen_range(0..classes)).collect(), classes, seed, trial }
    }

    /// `Σ_{ζ(ℓ)=j} x_ℓ` for every color `j`.
    pub fn class_forms(&self) -> Vec<LinearForm> {
        let mut forms = vec![LinearForm::zero(); self.classes];
        for (v, &c) in self.colors.iter().enumerate() {
            forms[c].add_term(v, BigInt::from(1));
        }
        forms
    }
}

/// Per-trial generator: the seeded stream number `trial`.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Detection of a degree-`k` multilinear monomial by color coding; never reports a false positive.
pub fn mmd(g: &Circuit, k: usize, cfg: &MmdConfig) -> crate::Result<MmdReport> {
    match cfg.scheme {
        MmdScheme::Basic => mmd_basic(g, k, cfg),
        MmdScheme::Fast => mmd_fast(g, k, cfg),
    }
}

/// `k` colors: `P = Π_j Σ_{ζ(ℓ)=j} x_ℓ` keeps exactly the colorful multilinear monomials.
pub fn mmd_basic(g: &Circuit, k: usize, cfg: &MmdConfig) -> crate::Result<MmdReport> {
    let cfg = MmdConfig { scheme: MmdScheme::Basic, ..*cfg };
    run_mmd(g, k, &cfg)
}

/// `c = ⌈1.3k⌉` colors: `g` is multiplied by `S_{c,c-k}(z)` and each color class
/// gets its own `z_j`, so classes missed by the monomial are filled by `z`'s;
/// the `z`'s are then set to one.
pub fn mmd_fast(g: &Circuit, k: usize, cfg: &MmdConfig) -> crate::Result<MmdReport> {
    let cfg = MmdConfig { scheme: MmdScheme::Fast, ..*cfg };
    run_mmd(g, k, &cfg)
}

/// `g · S_{c,d}(z_1..z_c)` over `n + c` variables.
pub fn pad_with_symmetric(g: &Circuit, c: usize, d: usize) -> crate::Result<Circuit> {
    let n = g.nvars();
    let mut cb = CircuitBuilder::new(n + c);
    let base = cb.import(g, |v| v);
    let z: Vec<usize> = (n..n + c).collect();
    let s = cb.elementary_symmetric(&z, d)?;
    let out = cb.mul(base, s);
    Ok(cb.finish(out)?)
}

fn run_mmd(g: &Circuit, k: usize, cfg: &MmdConfig) -> crate::Result<MmdReport> {
    if !(cfg.error > 0.0 && cfg.error < 1.0) {
        return Err(SolverError::BadErrorBudget(cfg.error).into());
    }
    let n = g.nvars();
    if k == 0 || k > 60 {
        return Err(SolverError::BadDegree(k).into());
    }
    let c = mmd_colors(k, cfg.scheme);
    let trials = mmd_trials(k, cfg.error, cfg.scheme);
    let field = cfg.ring.field()?;
    if let Some(f) = &field {
        let needed = (10.0 * k as f64 / cfg.error).ceil() as u64;
        if f.modulus() <= needed {
            return Err(SolverError::FieldTooSmall { p: f.modulus(), needed, delta: cfg.error }.into());
        }
    }
    if k > n {
        return Ok(MmdReport { found: false, trials, found_at: None, colors: c, ops: 0 });
    }
    let target = match cfg.scheme {
        MmdScheme::Basic => g.clone(),
        MmdScheme::Fast => pad_with_symmetric(g, c, c - k)?,
    };
    let trial = |t: u64| -> crate::Result<(bool, u64)> {
        let mut rng = trial_rng(cfg.seed, t);
        let coloring = Coloring::random(&mut rng, n, c, cfg.seed, t);
        let mut forms = coloring.class_forms();
        if cfg.scheme == MmdScheme::Basic && forms.iter().any(LinearForm::is_zero) {
            return Ok((false, 0));
        }
        if cfg.scheme == MmdScheme::Fast {
            for (j, f) in forms.iter_mut().enumerate() {
                f.add_term(n + j, BigInt::from(1));
            }
        }
        let p = PiSigma::new(target.nvars(), forms)?;
        let f = match &field {
            Some(f) => *f,
            None => PrimeField::new(random_prime_with(cfg.prime_bits, &mut rng)?)?,
        };
        let mut point: Vec<u64> = (0..n).map(|_| f.random(&mut rng)).collect();
        point.resize(target.nvars(), 1);
        let counter = OpCounter::new();
        let v = hadamard_pisigma_eval_counted(&f, &target, &p, &point, &counter)?;
        Ok((!f.is_zero(&v), counter.get()))
    };
    // Fixed-size batches keep the report independent of the thread count.
    const BATCH: u64 = 64;
    let mut ops = 0u64;
    let mut start = 0u64;
    while start < trials {
        let end = (start + BATCH).min(trials);
        let results: Vec<crate::Result<(bool, u64)>> = (start..end).into_par_iter().map(trial).collect();
        for (t, r) in (start..end).zip(results) {
            let (hit, o) = r?;
            ops += o;
            if hit {
                return Ok(MmdReport { found: true, trials, found_at: Some(t), colors: c, ops });
            }
        }
        start = end;
    }
    Ok(MmdReport { found: false, trials, found_at: None, colors: c, ops })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Depth3Report<E> {
    pub value: E,
    /// Operations in the truncated polynomial ring.
    pub ops: u64,
}

/// `Σ_i c_i (T_i ∘ˢ S_{n,k})(1)`: one Hadamard evaluation with `2^k` terms per product.
pub fn depth3_mlc<R: ScalarRing>(ring: &R, f: &Sps) -> crate::Result<Depth3Report<R::Elem>> {
    let (n, k) = (f.nvars(), f.degree());
    if k > n {
        return Ok(Depth3Report { value: ring.zero(), ops: 0 });
    }
    let s = elementary_symmetric(n, k)?;
    let ones = vec![ring.one(); n];
    let counter = OpCounter::new();
    let mut acc = ring.zero();
    for (c, t) in f.terms() {
        let v = hadamard_pisigma_eval_counted(ring, &s, t, &ones, &counter)?;
        ring.add_assign(&mut acc, &ring.scale_int(&v, c));
    }
    Ok(Depth3Report { value: acc, ops: counter.get() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Depth3MmdReport {
    pub found: bool,
    /// `Σ_m ([m]f)²` over degree-`k` multilinear `m`.
    pub value: BigInt,
    pub ops: u64,
}

/// Deterministic detection over the integers through `V = Σ_m ([m]f)^2`.
///
/// For every ordered pair of products `(T_i, T_i')` and every Ryser term
/// `(L_S)^k` of `T_i*`, the coordinatewise products `L'_j ⊙ L_S` form a product
/// whose multilinear coefficient sum is the pairing of `T_i*` and `T_i'` on
/// multilinear words. `V > 0` exactly when some coefficient is nonzero.
pub fn depth3_mmd_int(f: &Sps) -> crate::Result<Depth3MmdReport> {
    let (n, k) = (f.nvars(), f.degree());
    if k > n {
        return Ok(Depth3MmdReport { found: false, value: BigInt::zero(), ops: 0 });
    }
    let s = elementary_symmetric(n, k)?;
    let ones = vec![BigInt::from(1); n];
    let counter = OpCounter::new();
    let mut acc = BigInt::zero();
    for (ci, ti) in f.terms() {
        for term in symmetrize_pisigma_terms(ti)? {
            for (cj, tj) in f.terms() {
                let forms: Vec<LinearForm> = tj.forms().iter().map(|l| l.hadamard(&term.form)).collect();
                if forms.iter().any(LinearForm::is_zero) {
                    continue;
                }
                let q = PiSigma::new(n, forms)?;
                let v = hadamard_pisigma_eval_counted(&Integers, &s, &q, &ones, &counter)?;
                let w = v * ci * cj;
                if term.sign > 0 {
                    acc += w;
                } else {
                    acc -= w;
                }
            }
        }
    }
    debug_assert!(!acc.is_negative(), "a sum of squares");
    Ok(Depth3MmdReport { found: acc.is_positive(), value: acc, ops: counter.get() })
}

/// Rejects field mode for [`depth3_mmd_int`].
pub fn depth3_mmd(f: &Sps, ring: RingSpec) -> crate::Result<Depth3MmdReport> {
    match ring {
        RingSpec::Integer => depth3_mmd_int(f),
        RingSpec::PrimeField(_) => Err(SolverError::NeedsIntegers("the deterministic depth-3 detector").into()),
    }
}
