use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{exact_mlc, AppError, Graph};
use crate::abp::{zcoeff_abp, Abp, Layer};
use crate::circuit::LinearForm;
use crate::rper::binom;
use crate::solvers::MlcOptions;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomsetCount {
    /// Multilinear sum of `[z^t] (Σ_i D_i)^k`.
    pub raw: BigInt,
    /// `raw / oracle` on the complete graph with `max(k, t)` nodes.
    pub constant: BigRational,
    pub normalized: BigRational,
    pub ops: u64,
}

/// `D_i = Π_{v ∈ N[i]} (1 + z x_v)` with `z = x_n`, padded to `layers` layers.
fn neighbourhood_factor(g: &Graph, i: usize, layers: usize) -> Abp {
    let n = g.n();
    let z = LinearForm::var(n);
    let one = LinearForm::constant_form(BigInt::one());
    let mut closed: Vec<usize> = g.out(i).to_vec();
    if !closed.contains(&i) {
        closed.push(i);
    }
    let mut ls = Vec::with_capacity(layers);
    for v in closed {
        ls.push(Layer::new(1, 2, vec![one.clone(), z.clone()]));
        ls.push(Layer::new(2, 1, vec![one.clone(), LinearForm::var(v)]));
    }
    let pad = layers - ls.len();
    Abp::new(n + 1, ls).expect("shapes chain").pad(pad)
}

/// `Q = [z^t] (Σ_i D_i)^k` over the node variables.
pub fn domset_polynomial(g: &Graph, k: usize, t: usize) -> crate::Result<Abp> {
    let n = g.n();
    if k == 0 || k > n || t > n {
        return Err(AppError::TooLarge { k: k.max(t), n }.into());
    }
    let width = (0..n).map(|i| g.out(i).len() + usize::from(!g.has_arc(i, i))).max().unwrap_or(0);
    let layers = 2 * width;
    let mut sum = neighbourhood_factor(g, 0, layers);
    for i in 1..n {
        sum = sum.parallel(&neighbourhood_factor(g, i, layers))?.trim();
    }
    let mut p = sum.clone();
    for _ in 1..k {
        p = p.series(&sum)?;
    }
    if t > p.len() {
        return Ok(Abp::zero(n, t));
    }
    Ok(zcoeff_abp(&p, n, t)?)
}

fn raw_count(g: &Graph, k: usize, t: usize, opts: &MlcOptions) -> crate::Result<(BigInt, u64)> {
    let q = domset_polynomial(g, k, t)?;
    let r = exact_mlc(&q, t, opts)?;
    Ok((r.value, r.ops))
}

/// `k`-sets dominating at least `t` nodes, through a constant calibrated per `(k, t)`.
///
/// The raw sum is positive exactly when such a set exists. It is not a fixed
/// multiple of the count in general, so `normalized` can differ from the true count.
pub fn count_tdomsets(g: &Graph, k: usize, t: usize, opts: &MlcOptions) -> crate::Result<DomsetCount> {
    let cal = Graph::complete(k.max(t));
    let (cal_raw, _) = raw_count(&cal, k, t, opts)?;
    let cal_count = tdomset_oracle(&cal, k, t);
    if cal_count.is_zero() {
        return Err(AppError::Calibration.into());
    }
    let constant = BigRational::new(cal_raw, cal_count);
    let (raw, ops) = raw_count(g, k, t, opts)?;
    let normalized = if constant.is_zero() { BigRational::zero() } else { BigRational::from_integer(raw.clone()) / &constant };
    Ok(DomsetCount { raw, constant, normalized, ops })
}

/// `k`-subsets `S` with `|N[S]| ≥ t` by enumeration.
pub fn tdomset_oracle(g: &Graph, k: usize, t: usize) -> BigInt {
    let n = g.n();
    if k > n || n >= 64 {
        return BigInt::zero();
    }
    let closed: Vec<u64> = (0..n).map(|i| g.out(i).iter().fold(1u64 << i, |m, &v| m | (1 << v))).collect();
    let mut count = 0u64;
    for s in 0u64..(1 << n) {
        if s.count_ones() as usize != k {
            continue;
        }
        let dom = (0..n).filter(|&i| s >> i & 1 == 1).fold(0u64, |m, i| m | closed[i]);
        if dom.count_ones() as usize >= t {
            count += 1;
        }
    }
    debug_assert!(u128::from(count) <= binom(n, k));
    BigInt::from(count)
}
