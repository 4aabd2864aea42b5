use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{exact_mlc, AppError, Graph};
use crate::abp::{Abp, Layer};
use crate::circuit::LinearForm;
use crate::solvers::MlcOptions;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KpathCount {
    /// Vertex sequences `v_1 → ... → v_k` with distinct vertices.
    pub ordered: BigInt,
    /// `ordered / 2` for undirected graphs and `k ≥ 2`.
    pub undirected: Option<BigInt>,
    pub ops: u64,
    pub abp_width: usize,
}

/// The walk polynomial `1ᵀ B^{k-1} y` with `B[i][j] = A[i][j] y_i`, as a `k`-layer program of width `n`.
pub fn kpath_abp(g: &Graph, k: usize) -> Result<Abp, AppError> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(AppError::TooLarge { k, n });
    }
    if k == 1 {
        let all = LinearForm::from_terms((0..n).map(|v| (v, BigInt::one())));
        return Ok(Abp::from_forms(n, &[all]).expect("variables in range"));
    }
    let mut first = Layer::zeros(1, n);
    let mut middle = Layer::zeros(n, n);
    let mut last = Layer::zeros(n, 1);
    for &(i, j) in g.arcs() {
        let mut f = first.get(0, j).clone();
        f.add_term(i, BigInt::one());
        first.set(0, j, f);
        middle.set(i, j, LinearForm::var(i));
    }
    for j in 0..n {
        last.set(j, 0, LinearForm::var(j));
    }
    let mut layers = vec![first];
    layers.extend(std::iter::repeat_n(middle, k - 2));
    layers.push(last);
    Ok(Abp::new(n, layers).expect("shapes chain"))
}

pub fn count_kpaths(g: &Graph, k: usize, opts: &MlcOptions) -> crate::Result<KpathCount> {
    if let Some(v) = g.has_self_loop() {
        return Err(AppError::SelfLoop(v + 1).into());
    }
    let abp = kpath_abp(g, k)?.trim();
    let r = exact_mlc(&abp, k, opts)?;
    let undirected = (!g.is_directed() && k >= 2).then(|| &r.value / 2);
    Ok(KpathCount { ordered: r.value, undirected, ops: r.ops, abp_width: r.abp_width })
}

/// Ordered `k`-vertex paths by depth-first enumeration.
pub fn kpath_oracle(g: &Graph, k: usize) -> BigInt {
    fn extend(g: &Graph, path: &mut Vec<usize>, k: usize) -> u64 {
        if path.len() == k {
            return 1;
        }
        let last = *path.last().expect("nonempty");
        let mut total = 0;
        for &v in g.out(last) {
            if !path.contains(&v) {
                path.push(v);
                total += extend(g, path, k);
                path.pop();
            }
        }
        total
    }
    if k == 0 {
        return BigInt::zero();
    }
    let mut total = 0u64;
    for s in 0..g.n() {
        total += extend(g, &mut vec![s], k);
    }
    BigInt::from(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::DEFAULT_TERM_CAP;
    use crate::gen;
    use rand::Rng;

    #[test]
    fn k4_fixture() {
        let r = count_kpaths(&Graph::complete(4), 3, &MlcOptions::default()).unwrap();
        assert_eq!(r.ordered, BigInt::from(24));
        assert_eq!(r.undirected, Some(BigInt::from(12)));
        let e = Graph::new(2, &[(0, 1)], true).unwrap();
        let r = count_kpaths(&e, 2, &MlcOptions::default()).unwrap();
        assert_eq!((r.ordered, r.undirected), (BigInt::one(), None));
    }

    #[test]
    fn rejects_loops_and_large_k() {
        let g = Graph::new(2, &[(0, 0)], true).unwrap();
        assert!(matches!(count_kpaths(&g, 1, &MlcOptions::default()), Err(crate::Error::App(AppError::SelfLoop(1)))));
        assert!(matches!(kpath_abp(&Graph::complete(2), 3), Err(AppError::TooLarge { .. })));
    }

    #[test]
    fn walk_coefficients() {
        // Every multilinear coefficient counts the walks through that vertex set.
        for seed in 0..10 {
            let mut rng = gen::rng(seed);
            let n = rng.gen_range(2..=4);
            let g = Graph::new(n, &gen::random_edges(&mut rng, n, 0.5, true), true).unwrap();
            for k in 1..=3.min(n) {
                let p = kpath_abp(&g, k).unwrap().expand(DEFAULT_TERM_CAP).unwrap();
                assert_eq!(p.multilinear_sum(k as u32), kpath_oracle(&g, k));
            }
        }
    }

    #[test]
    fn matches_enumeration() {
        for seed in 0..20 {
            let mut rng = gen::rng(40 + seed);
            let n = rng.gen_range(2..=6);
            let directed = rng.gen_bool(0.5);
            let g = Graph::new(n, &gen::random_edges(&mut rng, n, 0.5, directed), directed).unwrap();
            let k = rng.gen_range(1..=4.min(n));
            let r = count_kpaths(&g, k, &MlcOptions::default()).unwrap();
            assert_eq!(r.ordered, kpath_oracle(&g, k), "seed {seed}");
            if !directed && k >= 2 {
                assert_eq!(&r.ordered % 2, BigInt::zero());
            }
        }
    }
}
