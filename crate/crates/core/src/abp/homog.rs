use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Abp, AbpError, Layer};
use crate::circuit::LinearForm;

/// `v · M` for an integer row vector and an integer matrix (row-major).
fn vec_mat(v: &[BigInt], m: &[BigInt], cols: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); cols];
    for (r, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (c, slot) in out.iter_mut().enumerate() {
            let y = &m[r * cols + c];
            if !y.is_zero() {
                *slot += x * y;
            }
        }
    }
    out
}

impl Abp {
    /// A homogeneous program with `k` layers for the degree-`k` part.
    ///
    /// Level-`j` nodes are the original nodes entered by the `j`-th linear
    /// edge of a path; an edge between levels absorbs the run of constant
    /// edges in front of the linear one, and the last layer also absorbs the
    /// constant run into the sink. Word order along paths is preserved.
    pub fn homogenize(&self, k: usize) -> Result<Abp, AbpError> {
        let a = self.normalized();
        if k == 0 {
            return Err(AbpError::DegreeZero { constant: a.constant_term() });
        }
        let l = a.len();
        if k > l {
            return Ok(Abp::zero(a.nvars, k));
        }
        let widths = a.widths();
        let consts: Vec<Vec<BigInt>> = a.layers.iter().map(|x| x.coefficient_matrix(None)).collect();
        let linear: Vec<Layer> = a
            .layers
            .iter()
            .map(|x| Layer::new(x.rows, x.cols, x.entries.iter().map(LinearForm::linear_part).collect()))
            .collect();

        // to_sink[b][i]: sum over constant paths from node (b, i) to the sink.
        let mut to_sink: Vec<Vec<BigInt>> = vec![Vec::new(); l + 1];
        to_sink[l] = vec![BigInt::one()];
        for b in (0..l).rev() {
            let (rows, cols) = (widths[b], widths[b + 1]);
            to_sink[b] = (0..rows)
                .map(|r| (0..cols).map(|c| &consts[b][r * cols + c] * &to_sink[b + 1][c]).sum())
                .collect();
        }

        // Nodes that a linear edge can enter.
        let entered: Vec<Vec<bool>> = (0..=l)
            .map(|b| {
                if b == 0 {
                    return vec![false];
                }
                let lay = &linear[b - 1];
                (0..lay.cols).map(|c| (0..lay.rows).any(|r| !lay.get(r, c).is_zero())).collect()
            })
            .collect();

        let level_states = |j: usize| -> Vec<(usize, usize)> {
            if j == 0 {
                return vec![(0, 0)];
            }
            let mut s = Vec::new();
            for b in j..=(l - (k - j)) {
                s.extend((0..widths[b]).filter(|&i| entered[b][i]).map(|i| (b, i)));
            }
            s
        };

        // Forms on edges from (b, i) to every later entered node, as (b', i', form).
        let successors = |b: usize, i: usize| -> Vec<(usize, usize, LinearForm)> {
            let mut out = Vec::new();
            let mut row: Vec<BigInt> = (0..widths[b]).map(|x| if x == i { BigInt::one() } else { BigInt::zero() }).collect();
            for bp in (b + 1)..=l {
                let lay = &linear[bp - 1];
                for c in 0..lay.cols {
                    let mut f = LinearForm::zero();
                    for (r, x) in row.iter().enumerate() {
                        if !x.is_zero() {
                            f = f.add(&lay.get(r, c).scale(x));
                        }
                    }
                    if !f.is_zero() {
                        out.push((bp, c, f));
                    }
                }
                row = vec_mat(&row, &consts[bp - 1], widths[bp]);
                if row.iter().all(Zero::is_zero) {
                    break;
                }
            }
            out
        };

        let mut layers = Vec::with_capacity(k);
        let mut prev = level_states(0);
        for j in 1..=k {
            let last = j == k;
            let next = if last { vec![(l, 0)] } else { level_states(j) };
            if next.is_empty() {
                return Ok(Abp::zero(a.nvars, k));
            }
            let index: std::collections::HashMap<(usize, usize), usize> =
                next.iter().enumerate().map(|(x, &s)| (s, x)).collect();
            let mut layer = Layer::zeros(prev.len(), next.len());
            for (r, &(b, i)) in prev.iter().enumerate() {
                for (bp, ip, f) in successors(b, i) {
                    if last {
                        let w = &to_sink[bp][ip];
                        if !w.is_zero() {
                            let cur = layer.get(r, 0).add(&f.scale(w));
                            layer.set(r, 0, cur);
                        }
                    } else if let Some(&c) = index.get(&(bp, ip)) {
                        layer.set(r, c, f);
                    }
                }
            }
            layers.push(layer);
            prev = next;
        }
        Ok(super::validate_abp(a.nvars, layers, true)?.trim())
    }
}

/// `[z^t]` of a program, where `z` is variable `z`, by tracking the z-degree.
///
/// Node `(v, d)` means "at `v` having used `d` factors of `z`"; states with
/// `d > t` are dropped. The result is over the remaining variables, renumbered
/// so that variables after `z` shift down by one.
pub fn zcoeff_abp(a: &Abp, z: usize, t: usize) -> Result<Abp, AbpError> {
    let a = a.normalized();
    if z >= a.nvars {
        return Err(AbpError::BadVariable { layer: 0, index: z + 1, nvars: a.nvars });
    }
    if t > a.len() {
        return Err(AbpError::ZDegree { t, bound: a.len() });
    }
    let s = t + 1;
    let rename = |v: usize| if v > z { v - 1 } else { v };
    let layers = a
        .layers
        .iter()
        .map(|lay| {
            let mut out = Layer::zeros(lay.rows * s, lay.cols * s);
            for r in 0..lay.rows {
                for c in 0..lay.cols {
                    let f = lay.get(r, c);
                    if f.is_zero() {
                        continue;
                    }
                    let zc = f.coeff(z);
                    let mut rest = LinearForm::constant_form(f.constant().clone());
                    for (v, x) in f.terms() {
                        if v != z {
                            rest.add_term(rename(v), x.clone());
                        }
                    }
                    for d in 0..s {
                        if !rest.is_zero() {
                            out.set(r * s + d, c * s + d, rest.clone());
                        }
                        if d + 1 < s && !zc.is_zero() {
                            out.set(r * s + d, c * s + d + 1, LinearForm::constant_form(zc.clone()));
                        }
                    }
                }
            }
            out
        })
        .collect();
    Ok(Abp::new(a.nvars - 1, layers)?.trim())
}
