//! Seeded random instances for tests, benchmarks and the self-test.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CircuitBuilder, Gate, LinearForm, PiSigma, Sps};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random circuit on `nvars` variables with about `ngates` gates and syntactic degree ≤ `max_degree`.
///
/// Constants lie in `-3..=3`. The last gate is the output.
pub fn random_circuit<R: Rng>(rng: &mut R, nvars: usize, ngates: usize, max_degree: u64) -> Circuit {
    assert!(nvars >= 1 && ngates >= 1);
    let mut gates: Vec<Gate> = Vec::new();
    let mut deg: Vec<u64> = Vec::new();
    let leaves = (nvars.min(ngates / 2)).max(1);
    let mut vars: Vec<usize> = (0..nvars).collect();
    vars.shuffle(rng);
    for &v in vars.iter().take(leaves) {
        gates.push(Gate::Input(v));
        deg.push(1);
    }
    while gates.len() < ngates {
        let r: f64 = rng.gen();
        let id = gates.len();
        if r < 0.1 {
            gates.push(Gate::Const(BigInt::from(rng.gen_range(-3i64..=3))));
            deg.push(0);
        } else if r < 0.2 {
            gates.push(Gate::Input(rng.gen_range(0..nvars)));
            deg.push(1);
        } else {
            // Bias towards recent gates so the output depends on most of the circuit.
            let pick = |rng: &mut R| {
                let lo = id.saturating_sub(6);
                if rng.gen_bool(0.7) {
                    rng.gen_range(lo..id)
                } else {
                    rng.gen_range(0..id)
                }
            };
            let a = pick(rng);
            let b = pick(rng);
            if r < 0.6 && deg[a] + deg[b] <= max_degree {
                gates.push(Gate::Mul(a, b));
                deg.push(deg[a] + deg[b]);
            } else {
                gates.push(Gate::Add(a, b));
                deg.push(deg[a].max(deg[b]));
            }
        }
    }
    let out = gates.len() - 1;
    Circuit::new(nvars, gates, out).expect("generated circuit is well formed")
}

/// A random linear form with coefficients in `lo..=hi`; each variable is present with probability `density`.
pub fn random_form<R: Rng>(rng: &mut R, nvars: usize, lo: i64, hi: i64, density: f64) -> LinearForm {
    let mut f = LinearForm::zero();
    for v in 0..nvars {
        if rng.gen_bool(density) {
            f.add_term(v, BigInt::from(rng.gen_range(lo..=hi)));
        }
    }
    f
}

/// A product of `k` random homogeneous forms.
pub fn random_pisigma<R: Rng>(rng: &mut R, nvars: usize, k: usize, lo: i64, hi: i64) -> PiSigma {
    let forms = (0..k).map(|_| random_form(rng, nvars, lo, hi, 0.6)).collect();
    PiSigma::new(nvars, forms).expect("variables in range")
}

/// A random `ΣΠΣ` circuit with `s` terms of degree `k`.
pub fn random_sps<R: Rng>(rng: &mut R, nvars: usize, k: usize, s: usize) -> Sps {
    let terms = (0..s)
        .map(|_| {
            let c = BigInt::from(rng.gen_range(-3i64..=3));
            (c, random_pisigma(rng, nvars, k, -2, 2))
        })
        .collect();
    Sps::new(nvars, k, terms).expect("uniform degree")
}

/// A circuit all of whose monomials repeat a variable: each product
/// `x_a^2 · m` for random monomials `m`.
pub fn random_non_multilinear<R: Rng>(rng: &mut R, nvars: usize, k: usize, terms: usize) -> Circuit {
    assert!(k >= 2);
    let mut cb = CircuitBuilder::new(nvars);
    let mut parts = Vec::new();
    for _ in 0..terms {
        let a = rng.gen_range(0..nvars);
        let mut vars = vec![a, a];
        while vars.len() < k {
            vars.push(rng.gen_range(0..nvars));
        }
        vars.shuffle(rng);
        let xs: Vec<_> = vars.iter().map(|&v| cb.input(v)).collect();
        let p = cb.product(xs);
        let c = rng.gen_range(1i64..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
        parts.push(cb.scale(c, p));
    }
    let out = cb.sum(parts);
    cb.finish(out).expect("valid circuit")
}

/// Random edge set on `n` nodes, each pair present with probability `p`; 0-based pairs.
pub fn random_edges<R: Rng>(rng: &mut R, n: usize, p: f64, directed: bool) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v || (!directed && v < u) {
                continue;
            }
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// A uniformly random labelled tree on `k` nodes (random Prüfer sequence); 0-based edges.
pub fn random_tree<R: Rng>(rng: &mut R, k: usize) -> Vec<(usize, usize)> {
    if k <= 1 {
        return Vec::new();
    }
    if k == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..k - 2).map(|_| rng.gen_range(0..k)).collect();
    let mut degree = vec![1usize; k];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(k - 1);
    for &s in &seq {
        let leaf = (0..k).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..k).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Random `m`-tuples over universes of the given sizes; elements are 0-based per universe.
pub fn random_tuples<R: Rng>(rng: &mut R, sizes: &[usize], count: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for _ in 0..count * 4 {
        if out.len() == count {
            break;
        }
        let t: Vec<usize> = sizes.iter().map(|&s| rng.gen_range(0..s)).collect();
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circuits_respect_degree_bound() {
        for seed in 0..50 {
            let c = random_circuit(&mut rng(seed), 6, 20, 3);
            assert!(c.degree() <= 3);
            assert_eq!(c.len(), 20);
        }
    }

    #[test]
    fn trees_are_trees() {
        for k in 1..9 {
            let e = random_tree(&mut rng(k as u64), k);
            assert_eq!(e.len(), k.saturating_sub(1));
            let mut parent: Vec<usize> = (0..k).collect();
            fn find(p: &mut Vec<usize>, x: usize) -> usize {
                if p[x] != x {
                    let r = find(p, p[x]);
                    p[x] = r;
                }
                p[x]
            }
            for &(a, b) in &e {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                assert_ne!(ra, rb, "cycle");
                parent[ra] = rb;
            }
        }
    }

    #[test]
    fn non_multilinear_instances_have_no_multilinear_terms() {
        for seed in 0..30 {
            let c = random_non_multilinear(&mut rng(seed), 6, 3, 4);
            let p = crate::circuit::brute_expand(&c, None, 10_000).unwrap();
            assert!(!p.has_multilinear_of_degree(3));
        }
    }
}
