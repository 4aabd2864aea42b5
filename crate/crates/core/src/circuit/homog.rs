use super::{Circuit, CircuitBuilder, Gate, GateId};

/// The degree-`k` homogeneous part of `c`.
///
/// Every gate is split into components of degree `0..=k`; components of
/// higher degree are dropped. Product components keep their child order.
pub fn homogenize(c: &Circuit, k: usize) -> Circuit {
    let mut cb = CircuitBuilder::new(c.nvars());
    let mut comps: Vec<Vec<Option<GateId>>> = Vec::with_capacity(c.len());
    for g in c.gates() {
        let mut row: Vec<Option<GateId>> = vec![None; k + 1];
        match g {
            Gate::Input(i) => {
                if k >= 1 {
                    row[1] = Some(cb.input(*i));
                }
            }
            Gate::Const(v) => {
                if !num_traits::Zero::is_zero(v) {
                    row[0] = Some(cb.constant(v.clone()));
                }
            }
            Gate::Add(a, b) => {
                for d in 0..=k {
                    row[d] = match (comps[*a][d], comps[*b][d]) {
                        (Some(x), Some(y)) => Some(cb.add(x, y)),
                        (x, y) => x.or(y),
                    };
                }
            }
            Gate::Mul(a, b) => {
                for d in 0..=k {
                    let mut acc: Option<GateId> = None;
                    for i in 0..=d {
                        if let (Some(x), Some(y)) = (comps[*a][i], comps[*b][d - i]) {
                            let p = cb.mul(x, y);
                            acc = Some(match acc {
                                Some(s) => cb.add(s, p),
                                None => p,
                            });
                        }
                    }
                    row[d] = acc;
                }
            }
        }
        comps.push(row);
    }
    let out = match comps[c.output()][k] {
        Some(g) => g,
        None => cb.constant(0),
    };
    cb.finish(out).expect("homogenized circuit is well formed").prune()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{brute_expand, parse_circuit, Monomial, SparsePoly, DEFAULT_TERM_CAP};
    use num_bigint::BigInt;

    #[test]
    fn product_of_affine_factors() {
        let c = parse_circuit(
            "ninputs 2\none = const 1\nx1 = input 1\nx2 = input 2\na = add one x1\nb = add one x2\np = mul a b\noutput p\n",
        )
        .unwrap();
        let h = homogenize(&c, 2);
        let p = brute_expand(&h, None, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(p, SparsePoly::from_terms([(Monomial::from_vars(&[0, 1]), BigInt::from(1))]));
        let h0 = homogenize(&c, 0);
        assert_eq!(brute_expand(&h0, None, DEFAULT_TERM_CAP).unwrap(), SparsePoly::constant(1.into()));
        let h3 = homogenize(&c, 3);
        assert!(brute_expand(&h3, None, DEFAULT_TERM_CAP).unwrap().is_empty());
    }

    #[test]
    fn homogeneous_input_is_unchanged() {
        let c = crate::circuit::elementary_symmetric(5, 3).unwrap();
        let before = brute_expand(&c, None, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(brute_expand(&homogenize(&c, 3), None, DEFAULT_TERM_CAP).unwrap(), before);
    }

    #[test]
    fn random_circuits_keep_exactly_degree_k() {
        for seed in 0..60 {
            let c = crate::gen::random_circuit(&mut crate::gen::rng(seed), 5, 18, 4);
            let full = brute_expand(&c, None, DEFAULT_TERM_CAP).unwrap();
            for k in 0..=4u32 {
                let h = brute_expand(&homogenize(&c, k as usize), None, DEFAULT_TERM_CAP).unwrap();
                assert_eq!(h, full.homogeneous_part(k), "seed {seed} k {k}");
                assert!(h.terms().all(|(m, _)| m.degree() == k));
            }
        }
    }
}
