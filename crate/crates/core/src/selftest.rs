//! Quick oracle-equivalence suites, run by `mlsieve selftest`.

use std::time::Instant;

use num_bigint::BigInt;
use rand::Rng;

use crate::algebra::{Integers, PrimeField, RingSpec, ScalarRing};
use crate::apps::{self, Graph, MatchInstance};
use crate::circuit::{brute_expand, DEFAULT_TERM_CAP};
use crate::gen;
use crate::hadamard::{hadamard_oracle, hadamard_pisigma_eval};
use crate::rper::{check_rect_ryser_identity, rper, RectMatrix, RperAlgo, RperBudget};
use crate::solvers::{depth3_mmd_int, mlc_count, mmd, MlcOptions, MmdConfig, MmdScheme};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    /// First failing case, if any.
    pub failure: Option<String>,
    pub millis: u128,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

type Suite = fn(u64) -> Result<usize, String>;

const SUITES: &[(&str, Suite)] = &[
    ("mlc", mlc_suite),
    ("rper", rper_suite),
    ("hadamard", hadamard_suite),
    ("mmd", mmd_suite),
    ("depth3", depth3_suite),
    ("apps", apps_suite),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

/// Runs every suite (or only `only`) with the given seed.
pub fn run(seed: u64, only: Option<&str>) -> Vec<SuiteResult> {
    SUITES
        .iter()
        .filter(|(name, _)| only.is_none_or(|o| o == *name))
        .map(|(name, suite)| {
            let start = Instant::now();
            let r = suite(seed);
            let millis = start.elapsed().as_millis();
            match r {
                Ok(cases) => SuiteResult { name, cases, failure: None, millis },
                Err(e) => SuiteResult { name, cases: 0, failure: Some(e), millis },
            }
        })
        .collect()
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn mlc_suite(seed: u64) -> Result<usize, String> {
    let mut rng = gen::rng(seed);
    let f7 = PrimeField::new(7).map_err(err)?;
    for case in 0..30 {
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=3usize.min(n));
        let size = rng.gen_range(2..=16);
        let g = gen::random_circuit(&mut rng, n, size, 5);
        let want = brute_expand(&g, Some(k as u32), DEFAULT_TERM_CAP).map_err(err)?.multilinear_sum(k as u32);
        for algo in [RperAlgo::Brute, RperAlgo::RectRyser, RperAlgo::Halves] {
            let opts = MlcOptions { algo, ..Default::default() };
            let z = mlc_count(&Integers, &g, k, &opts).map_err(err)?.value;
            check(z == want, || format!("case {case} {algo} over Z: {z} != {want}"))?;
            let p = mlc_count(&f7, &g, k, &opts).map_err(err)?.value;
            let w = RingSpec::PrimeField(7).reduce(&want);
            check(BigInt::from(p) == w, || format!("case {case} {algo} over F7: {p} != {w}"))?;
        }
    }
    Ok(30)
}

fn rper_suite(seed: u64) -> Result<usize, String> {
    check(check_rect_ryser_identity(6).is_none(), || "coefficient identity".into())?;
    let mut rng = gen::rng(seed);
    let ring = PrimeField::new(7).map_err(err)?;
    let budget = RperBudget::default();
    for case in 0..40 {
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(0..=4usize.min(n));
        let entries = (0..k * n).map(|_| ring.random(&mut rng)).collect();
        let a = RectMatrix::new(k, n, entries).map_err(err)?;
        let b = rper(&ring, &a, RperAlgo::Brute, &budget).map_err(err)?;
        let r = rper(&ring, &a, RperAlgo::RectRyser, &budget).map_err(err)?;
        let h = rper(&ring, &a, RperAlgo::Halves, &budget).map_err(err)?;
        check(b == r && r == h, || format!("case {case}: brute {b}, ryser {r}, halves {h}"))?;
    }
    Ok(41)
}

fn hadamard_suite(seed: u64) -> Result<usize, String> {
    let mut rng = gen::rng(seed);
    for case in 0..30 {
        let n = rng.gen_range(1..=5);
        let k = rng.gen_range(1..=3);
        let size = rng.gen_range(2..=14);
        let g = gen::random_circuit(&mut rng, n, size, 5);
        let f = gen::random_pisigma(&mut rng, n, k, -3, 3);
        let point: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-4i64..=4))).collect();
        let got = hadamard_pisigma_eval(&Integers, &g, &f, &point).map_err(err)?;
        let want = hadamard_oracle(&g, &f, &point, DEFAULT_TERM_CAP).map_err(err)?;
        check(got == want, || format!("case {case}: {got} != {want}"))?;
    }
    Ok(30)
}

fn mmd_suite(seed: u64) -> Result<usize, String> {
    let mut rng = gen::rng(seed);
    for case in 0..10 {
        let n = rng.gen_range(3..=6);
        let k = rng.gen_range(2..=3);
        let size = rng.gen_range(4..=14);
        let g = gen::random_circuit(&mut rng, n, size, 5);
        let truth = brute_expand(&g, Some(k as u32), DEFAULT_TERM_CAP).map_err(err)?.has_multilinear_of_degree(k as u32);
        let neg = gen::random_non_multilinear(&mut rng, n, k, 3);
        for scheme in [MmdScheme::Basic, MmdScheme::Fast] {
            let cfg = MmdConfig { scheme, seed: seed + case, error: 0.01, ..Default::default() };
            let r = mmd(&g, k, &cfg).map_err(err)?;
            // A positive verdict is always correct; a miss has probability at most the error budget.
            check(!r.found || truth, || format!("case {case} {scheme}: false positive"))?;
            check(!mmd(&neg, k, &cfg).map_err(err)?.found, || format!("case {case} {scheme}: false positive"))?;
        }
    }
    Ok(10)
}

fn depth3_suite(seed: u64) -> Result<usize, String> {
    let mut rng = gen::rng(seed);
    for case in 0..20 {
        let n = rng.gen_range(1..=5);
        let k = rng.gen_range(1..=3);
        let size = rng.gen_range(1..=3);
        let f = gen::random_sps(&mut rng, n, k, size);
        let v = depth3_mmd_int(&f).map_err(err)?.value;
        let want = f.expand().multilinear_square_sum(k as u32);
        check(v == want, || format!("case {case}: {v} != {want}"))?;
    }
    Ok(20)
}

fn apps_suite(seed: u64) -> Result<usize, String> {
    let mut rng = gen::rng(seed);
    let opts = MlcOptions::default();
    let k4 = apps::count_kpaths(&Graph::complete(4), 3, &opts).map_err(err)?;
    check(k4.ordered == BigInt::from(24), || format!("K4 paths: {}", k4.ordered))?;
    for case in 0..10 {
        let n = rng.gen_range(2..=6);
        let g = Graph::new(n, &gen::random_edges(&mut rng, n, 0.5, false), false).map_err(err)?;
        let k = rng.gen_range(1..=3.min(n));
        let got = apps::count_kpaths(&g, k, &opts).map_err(err)?.ordered;
        let want = apps::kpath_oracle(&g, k);
        check(got == want, || format!("paths case {case}: {got} != {want}"))?;
        let sizes = vec![3, 3];
        let inst = MatchInstance::new(sizes.clone(), gen::random_tuples(&mut rng, &sizes, 5)).map_err(err)?;
        let got = apps::count_mdmatchings(&inst, 2, &opts).map_err(err)?.count;
        let want = apps::mdmatch_oracle(&inst, 2);
        check(got == want, || format!("matching case {case}: {got} != {want}"))?;
    }
    Ok(21)
}
