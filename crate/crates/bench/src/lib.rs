//! Seeded inputs shared by the benches.

use mlsieve::apps::Graph;
use mlsieve::circuit::Sps;
use mlsieve::rper::RectMatrix;
use mlsieve::{gen, Circuit, PrimeField, ScalarRing};
use rand::Rng;

pub const BENCH_PRIME: u64 = 1_000_003;

pub fn field() -> PrimeField {
    PrimeField::new(BENCH_PRIME).expect("prime")
}

/// A dense `k × n` matrix over [`field`].
pub fn rect(k: usize, n: usize, seed: u64) -> RectMatrix<u64> {
    let f = field();
    let mut rng = gen::rng(seed);
    RectMatrix::new(k, n, (0..k * n).map(|_| f.random(&mut rng)).collect()).expect("shape")
}

pub fn circuit(n: usize, gates: usize, seed: u64) -> Circuit {
    gen::random_circuit(&mut gen::rng(seed), n, gates, 12)
}

pub fn sps(n: usize, k: usize, terms: usize, seed: u64) -> Sps {
    gen::random_sps(&mut gen::rng(seed), n, k, terms)
}

/// `G(n, p)` without self-loops.
pub fn graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = gen::rng(seed);
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    Graph::new(n, &edges, false).expect("valid edges")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_are_seeded() {
        assert_eq!(rect(3, 5, 1).entries(), rect(3, 5, 1).entries());
        assert_eq!(graph(8, 0.5, 2).edges(), graph(8, 0.5, 2).edges());
        assert!(graph(8, 0.5, 2).has_self_loop().is_none());
        assert_eq!(sps(6, 3, 2, 0).nvars(), 6);
    }
}
