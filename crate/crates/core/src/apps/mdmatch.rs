use num_bigint::BigInt;
use num_traits::One;

use super::{exact_mlc, AppError, MatchInstance};
use crate::abp::{zcoeff_abp, Abp, Layer};
use crate::circuit::LinearForm;
use crate::solvers::MlcOptions;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchCount {
    pub count: BigInt,
    pub ops: u64,
    pub abp_width: usize,
}

/// Variable of element `e` of universe `i ≥ 1` (0-based), after the earlier universes `2..i`.
fn offsets(inst: &MatchInstance) -> Vec<usize> {
    let mut off = vec![0; inst.m()];
    for i in 2..inst.m() {
        off[i] = off[i - 1] + inst.sizes()[i - 1];
    }
    off
}

/// `[z^k] Π_j (1 + Σ_{t ∈ T_j} z M_t)`, `M_t = Π_{i ≥ 2} x_{t_i}`, over the elements of `U_2, ..., U_m`.
pub fn mdmatch_polynomial(inst: &MatchInstance, k: usize) -> crate::Result<Abp> {
    let m = inst.m();
    if m == 0 {
        return Err(AppError::Arity { index: 0, expected: 1, found: 0 }.into());
    }
    if k > inst.sizes()[0] {
        return Err(AppError::TooLarge { k, n: inst.sizes()[0] }.into());
    }
    let off = offsets(inst);
    let nx: usize = inst.sizes()[1..].iter().sum();
    let z = nx;
    let var = |t: &[usize], i: usize| LinearForm::var(off[i] + t[i]);
    let one = || LinearForm::constant_form(BigInt::one());
    let mut p: Option<Abp> = None;
    for group in inst.groups().into_iter().filter(|g| !g.is_empty()) {
        let tuples: Vec<&[usize]> = group.iter().map(|&i| inst.tuples()[i].as_slice()).collect();
        let w = tuples.len() + 1;
        let factor = if m == 1 {
            let mut f = one();
            f.add_term(z, BigInt::from(tuples.len()));
            Abp::from_forms(nx + 1, &[f])?
        } else {
            let mut layers = Vec::with_capacity(m);
            let mut first = Layer::zeros(1, w);
            first.set(0, 0, one());
            for r in 1..w {
                first.set(0, r, LinearForm::var(z));
            }
            layers.push(first);
            for i in 1..m - 1 {
                let mut l = Layer::zeros(w, w);
                l.set(0, 0, one());
                for (r, t) in tuples.iter().enumerate() {
                    l.set(r + 1, r + 1, var(t, i));
                }
                layers.push(l);
            }
            let mut last = Layer::zeros(w, 1);
            last.set(0, 0, one());
            for (r, t) in tuples.iter().enumerate() {
                last.set(r + 1, 0, var(t, m - 1));
            }
            layers.push(last);
            Abp::new(nx + 1, layers)?
        };
        p = Some(match p {
            None => factor,
            Some(p) => p.series(&factor)?,
        });
    }
    let p = match p {
        Some(p) => p,
        None => Abp::from_forms(nx + 1, &[LinearForm::constant_form(BigInt::one())])?,
    };
    if k > p.len() {
        return Ok(Abp::zero(nx, (m - 1) * k));
    }
    Ok(zcoeff_abp(&p, z, k)?)
}

/// Sub-collections of `k` pairwise disjoint tuples; every one has coefficient one.
pub fn count_mdmatchings(inst: &MatchInstance, k: usize, opts: &MlcOptions) -> crate::Result<MatchCount> {
    let q = mdmatch_polynomial(inst, k)?;
    let r = exact_mlc(&q, (inst.m() - 1) * k, opts)?;
    Ok(MatchCount { count: r.value, ops: r.ops, abp_width: r.abp_width })
}

/// `k`-subsets of tuples that are disjoint in every coordinate, by enumeration.
pub fn mdmatch_oracle(inst: &MatchInstance, k: usize) -> BigInt {
    fn go(inst: &MatchInstance, start: usize, k: usize, chosen: &mut Vec<usize>) -> u64 {
        if chosen.len() == k {
            return 1;
        }
        let mut total = 0;
        for i in start..inst.tuples().len() {
            let t = &inst.tuples()[i];
            if chosen.iter().all(|&c| inst.tuples()[c].iter().zip(t).all(|(a, b)| a != b)) {
                chosen.push(i);
                total += go(inst, i + 1, k, chosen);
                chosen.pop();
            }
        }
        total
    }
    if k == 0 {
        return BigInt::one();
    }
    BigInt::from(go(inst, 0, k, &mut Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use num_traits::Zero;
    use rand::Rng;

    #[test]
    fn tiny_instances() {
        let disjoint = MatchInstance::new(vec![2, 2], vec![vec![0, 0], vec![1, 1]]).unwrap();
        assert_eq!(count_mdmatchings(&disjoint, 2, &MlcOptions::default()).unwrap().count, BigInt::one());
        let shared = MatchInstance::new(vec![2, 2], vec![vec![0, 0], vec![1, 0]]).unwrap();
        assert_eq!(count_mdmatchings(&shared, 2, &MlcOptions::default()).unwrap().count, BigInt::zero());
        assert_eq!(count_mdmatchings(&shared, 1, &MlcOptions::default()).unwrap().count, BigInt::from(2));
        assert!(count_mdmatchings(&shared, 3, &MlcOptions::default()).is_err());
    }

    #[test]
    fn matches_enumeration() {
        for seed in 0..15 {
            let mut rng = gen::rng(200 + seed);
            let m = rng.gen_range(1..=3);
            let sizes: Vec<usize> = (0..m).map(|_| rng.gen_range(2..=4)).collect();
            let count = rng.gen_range(1..=8);
            let inst = MatchInstance::new(sizes.clone(), gen::random_tuples(&mut rng, &sizes, count)).unwrap();
            for k in 1..=2.min(sizes[0]) {
                let r = count_mdmatchings(&inst, k, &MlcOptions::default()).unwrap();
                assert_eq!(r.count, mdmatch_oracle(&inst, k), "seed {seed} k {k}");
            }
        }
    }
}
