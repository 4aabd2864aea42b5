use mlsieve::abp::{circuit_to_abp, parse_abp, transfer_matrices, AbpOptions};
use mlsieve::apps::{parse_graph, parse_match, Graph, MatchInstance};
use mlsieve::circuit::{brute_expand, homogenize, parse_circuit, CircuitBuilder, DEFAULT_TERM_CAP};
use mlsieve::gen;
use mlsieve::hadamard::hadamard_pisigma_eval;
use mlsieve::rper::{rper, RperBudget};
use mlsieve::solvers::{mlc_count, mmd, MlcOptions, MmdConfig, MmdScheme};
use mlsieve::{Integers, PrimeField, Ring, RingSpec, RperAlgo, ScalarRing};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

fn small_circuit(seed: u64) -> (mlsieve::Circuit, usize, impl Rng) {
    let mut rng = gen::rng(seed);
    let n = rng.gen_range(1..=5);
    let k = rng.gen_range(1..=3usize.min(n));
    let gates = rng.gen_range(2..=14);
    (gen::random_circuit(&mut rng, n, gates, 5), k, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_count_is_reduced_integer_count(seed in any::<u64>()) {
        let (g, k, _) = small_circuit(seed);
        let f = PrimeField::new(13).unwrap();
        let opts = MlcOptions::default();
        let z = mlc_count(&Integers, &g, k, &opts).unwrap().value;
        let p = mlc_count(&f, &g, k, &opts).unwrap().value;
        prop_assert_eq!(BigInt::from(p), RingSpec::PrimeField(13).reduce(&z));
    }

    #[test]
    fn transfer_words_read_word_coefficients(seed in any::<u64>()) {
        let (g, k, mut rng) = small_circuit(seed);
        let abp = circuit_to_abp(&g, k, &AbpOptions::default()).unwrap();
        let words = abp.expand_words(DEFAULT_TERM_CAP).unwrap();
        let tm = transfer_matrices(&Integers, &abp, None).unwrap();
        for len in 0..=k + 1 {
            let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..g.nvars())).collect();
            let want = if len == k { words.coeff(&word) } else { BigInt::zero() };
            prop_assert_eq!(tm.word_corner(&word), want);
        }
    }

    #[test]
    fn homogenized_circuit_keeps_degree_k_part(seed in any::<u64>()) {
        let (g, k, _) = small_circuit(seed);
        let h = brute_expand(&homogenize(&g, k), None, DEFAULT_TERM_CAP).unwrap();
        let full = brute_expand(&g, None, DEFAULT_TERM_CAP).unwrap();
        for (m, c) in full.terms() {
            let want = if m.degree() as usize == k { c.clone() } else { BigInt::zero() };
            prop_assert_eq!(h.coeff(m), want);
        }
        prop_assert!(h.terms().all(|(m, _)| m.degree() as usize == k));
    }

    #[test]
    fn text_formats_round_trip(seed in any::<u64>()) {
        let (g, k, mut rng) = small_circuit(seed);
        let point: Vec<BigInt> = (0..g.nvars()).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect();
        let back = parse_circuit(&g.to_string()).unwrap();
        prop_assert_eq!(back.eval(&Integers, &point).unwrap(), g.eval(&Integers, &point).unwrap());
        let abp = circuit_to_abp(&g, k, &AbpOptions::default()).unwrap();
        prop_assert_eq!(parse_abp(&abp.to_text()).unwrap(), abp);

        let n = rng.gen_range(1..=7);
        let directed = rng.gen_bool(0.5);
        let gr = Graph::new(n, &gen::random_edges(&mut rng, n, 0.4, directed), directed).unwrap();
        prop_assert_eq!(parse_graph(&gr.to_text()).unwrap(), gr);
        let sizes: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=4)).collect();
        let count = rng.gen_range(0..=6);
        let inst = MatchInstance::new(sizes.clone(), gen::random_tuples(&mut rng, &sizes, count)).unwrap();
        prop_assert_eq!(parse_match(&inst.to_text()).unwrap(), inst);
    }

    #[test]
    fn hadamard_is_linear_in_the_circuit(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=5);
        let k = rng.gen_range(1..=3);
        let g1 = gen::random_circuit(&mut rng, n, 8, 4);
        let g2 = gen::random_circuit(&mut rng, n, 8, 4);
        let mut cb = CircuitBuilder::new(n);
        let a = cb.import(&g1, |v| v);
        let b = cb.import(&g2, |v| v);
        let out = cb.add(a, b);
        let sum = cb.finish(out).unwrap();
        let f = gen::random_pisigma(&mut rng, n, k, -3, 3);
        let field = PrimeField::new(1_000_003).unwrap();
        let point: Vec<u64> = (0..n).map(|_| field.random(&mut rng)).collect();
        let h = |g: &mlsieve::Circuit| hadamard_pisigma_eval(&field, g, &f, &point).unwrap();
        prop_assert_eq!(h(&sum), field.add(&h(&g1), &h(&g2)));
    }

    #[test]
    fn permanent_ignores_row_order(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let field = PrimeField::new(101).unwrap();
        let n = rng.gen_range(2..=6);
        let k = rng.gen_range(2..=4usize.min(n));
        let a = mlsieve::RectMatrix::new(k, n, (0..k * n).map(|_| field.random(&mut rng)).collect()).unwrap();
        let b = a.swap_rows(0, k - 1);
        let budget = RperBudget::default();
        for algo in [RperAlgo::RectRyser, RperAlgo::Halves] {
            prop_assert_eq!(rper(&field, &a, algo, &budget).unwrap(), rper(&field, &b, algo, &budget).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn detection_has_no_false_positives(seed in any::<u64>(), fast in any::<bool>(), field in any::<bool>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(3..=7);
        let k = rng.gen_range(2..=3);
        let g = gen::random_non_multilinear(&mut rng, n, k, 4);
        let cfg = MmdConfig {
            scheme: if fast { MmdScheme::Fast } else { MmdScheme::Basic },
            seed,
            ring: if field { RingSpec::PrimeField(1_000_003) } else { RingSpec::Integer },
            ..Default::default()
        };
        prop_assert!(!mmd(&g, k, &cfg).unwrap().found);
    }
}
