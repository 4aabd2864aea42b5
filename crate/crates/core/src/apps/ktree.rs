use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{exact_mlc, AppError, Graph};
use crate::abp::{Abp, Layer};
use crate::circuit::LinearForm;
use crate::solvers::MlcOptions;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KtreeCount {
    /// `Σ_{roots i} Σ_j` of the multilinear sums of `C_{T,i,j}`.
    pub raw: BigInt,
    /// `raw / copies` on the complete graph with `k` nodes.
    pub constant: BigRational,
    /// `raw / constant`.
    pub normalized: BigRational,
    pub ops: u64,
}

fn check_tree(tree: &Graph) -> Result<(), AppError> {
    let k = tree.n();
    if tree.is_directed() {
        return Err(AppError::NotATree("directed".into()));
    }
    if k == 0 {
        return Err(AppError::NotATree("no nodes".into()));
    }
    if tree.has_self_loop().is_some() {
        return Err(AppError::NotATree("self-loop".into()));
    }
    if tree.edges().len() != k - 1 {
        return Err(AppError::NotATree(format!("{} edges on {k} nodes", tree.edges().len())));
    }
    let mut seen = vec![false; k];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in tree.out(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    if seen.contains(&false) {
        return Err(AppError::NotATree("disconnected".into()));
    }
    Ok(())
}

/// Preorder from `root` with smaller subtrees first, and each node's parent position.
fn preorder(tree: &Graph, root: usize) -> (Vec<usize>, Vec<Option<usize>>) {
    let k = tree.n();
    let mut parent = vec![usize::MAX; k];
    let mut order = vec![root];
    parent[root] = root;
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        for &v in tree.out(u) {
            if parent[v] == usize::MAX {
                parent[v] = u;
                order.push(v);
            }
        }
        i += 1;
    }
    let mut size = vec![1usize; k];
    for &u in order.iter().rev() {
        if u != root {
            size[parent[u]] += size[u];
        }
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &u in &order[1..] {
        children[parent[u]].push(u);
    }
    for c in &mut children {
        c.sort_by_key(|&v| (size[v], v));
    }
    let mut seq = Vec::with_capacity(k);
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        seq.push(u);
        stack.extend(children[u].iter().rev());
    }
    let pos: HashMap<usize, usize> = seq.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let parents = seq.iter().map(|&v| (v != root).then(|| pos[&parent[v]])).collect();
    (seq, parents)
}

/// `Σ_j C_{T,root,j}`: the sum over homomorphisms `φ: T → G` of `Π_v x_{φ(v)}`.
///
/// Tree nodes are placed in preorder; a state holds the images of the placed
/// nodes that still have children to place.
pub fn ktree_abp(g: &Graph, tree: &Graph, root: usize) -> Result<Abp, AppError> {
    check_tree(tree)?;
    if g.is_directed() {
        return Err(AppError::Directed);
    }
    let (n, k) = (g.n(), tree.n());
    let (_, parent) = preorder(tree, root);
    let mut last_child = vec![None; k];
    for (t, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            last_child[*p] = Some(t);
        }
    }
    // Positions open after step t.
    let open: Vec<Vec<usize>> = (0..k).map(|t| (0..=t).filter(|&s| last_child[s].is_some_and(|c| c > t)).collect()).collect();
    let mut states: HashMap<Vec<usize>, usize> = HashMap::from([(Vec::new(), 0)]);
    let mut layers = Vec::with_capacity(k);
    for t in 0..k {
        let prev_open: &[usize] = if t == 0 { &[] } else { &open[t - 1] };
        let mut next: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut edges: HashMap<(usize, usize), LinearForm> = HashMap::new();
        let mut sorted: Vec<(&Vec<usize>, &usize)> = states.iter().collect();
        sorted.sort_by_key(|(_, &i)| i);
        for (s, &si) in sorted {
            let image = |pos: usize| s[prev_open.iter().position(|&q| q == pos).expect("parent is open")];
            let candidates: Vec<usize> = match parent[t] {
                None => (0..n).collect(),
                Some(p) => g.out(image(p)).to_vec(),
            };
            for u in candidates {
                let s2: Vec<usize> = open[t].iter().map(|&q| if q == t { u } else { image(q) }).collect();
                let len = next.len();
                let ni = *next.entry(s2).or_insert(len);
                edges.entry((si, ni)).or_insert_with(LinearForm::zero).add_term(u, BigInt::one());
            }
        }
        if next.is_empty() {
            return Ok(Abp::zero(n, k));
        }
        let mut layer = Layer::zeros(states.len(), next.len());
        for ((r, c), f) in edges {
            layer.set(r, c, f);
        }
        layers.push(layer);
        states = next;
    }
    Ok(Abp::new(n, layers).expect("shapes chain").trim())
}

fn raw_count(g: &Graph, tree: &Graph, opts: &MlcOptions) -> crate::Result<(BigInt, u64)> {
    let k = tree.n();
    let mut raw = BigInt::zero();
    let mut ops = 0;
    for root in 0..k {
        let abp = ktree_abp(g, tree, root)?;
        let r = exact_mlc(&abp, k, opts)?;
        raw += r.value;
        ops += r.ops;
    }
    Ok((raw, ops))
}

/// Copies of `tree` in `g`, normalized by a constant calibrated on the complete graph `K_k`.
pub fn count_ktrees(g: &Graph, tree: &Graph, opts: &MlcOptions) -> crate::Result<KtreeCount> {
    check_tree(tree)?;
    if g.is_directed() {
        return Err(AppError::Directed.into());
    }
    let k = tree.n();
    let cal = Graph::complete(k);
    let (cal_raw, _) = raw_count(&cal, tree, opts)?;
    let cal_copies = ktree_oracle(&cal, tree)?;
    if cal_copies.is_zero() {
        return Err(AppError::Calibration.into());
    }
    let constant = BigRational::new(cal_raw, cal_copies);
    let (raw, ops) = raw_count(g, tree, opts)?;
    let normalized = if constant.is_zero() { BigRational::zero() } else { BigRational::from_integer(raw.clone()) / &constant };
    Ok(KtreeCount { raw, constant, normalized, ops })
}

/// Injective homomorphisms `tree → g`.
fn embeddings(g: &Graph, tree: &Graph) -> u64 {
    let (seq, parent) = preorder(tree, 0);
    fn go(g: &Graph, seq: &[usize], parent: &[Option<usize>], img: &mut Vec<usize>) -> u64 {
        let t = img.len();
        if t == seq.len() {
            return 1;
        }
        let cands: Vec<usize> = match parent[t] {
            None => (0..g.n()).collect(),
            Some(p) => g.out(img[p]).to_vec(),
        };
        let mut total = 0;
        for u in cands {
            if !img.contains(&u) {
                img.push(u);
                total += go(g, seq, parent, img);
                img.pop();
            }
        }
        total
    }
    go(g, &seq, &parent, &mut Vec::new())
}

pub fn tree_automorphisms(tree: &Graph) -> Result<u64, AppError> {
    check_tree(tree)?;
    Ok(embeddings(tree, tree))
}

/// Subgraphs of `g` isomorphic to `tree`: embeddings over automorphisms.
pub fn ktree_oracle(g: &Graph, tree: &Graph) -> Result<BigInt, AppError> {
    let aut = tree_automorphisms(tree)?;
    if g.is_directed() {
        return Err(AppError::Directed);
    }
    Ok(BigInt::from(embeddings(g, tree) / aut))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::DEFAULT_TERM_CAP;
    use crate::gen;
    use rand::Rng;

    fn tree(edges: &[(usize, usize)], k: usize) -> Graph {
        Graph::new(k, edges, false).unwrap()
    }

    #[test]
    fn single_node_counts_vertices() {
        let t = tree(&[], 1);
        let g = Graph::new(5, &[(0, 1)], false).unwrap();
        let r = count_ktrees(&g, &t, &MlcOptions::default()).unwrap();
        assert_eq!(r.raw, BigInt::from(5));
        assert_eq!(r.normalized, BigRational::from_integer(5.into()));
    }

    #[test]
    fn edge_in_triangle() {
        let r = count_ktrees(&Graph::complete(3), &tree(&[(0, 1)], 2), &MlcOptions::default()).unwrap();
        // Two roots times two orientations per copy.
        assert_eq!(r.raw, BigInt::from(12));
        assert_eq!(r.constant, BigRational::from_integer(4.into()));
        assert_eq!(r.normalized, BigRational::from_integer(3.into()));
    }

    #[test]
    fn rejects_non_trees() {
        let cycle = tree(&[(0, 1), (1, 2), (2, 0)], 3);
        assert!(matches!(tree_automorphisms(&cycle), Err(AppError::NotATree(_))));
        let forest = tree(&[(0, 1)], 3);
        assert!(matches!(tree_automorphisms(&forest), Err(AppError::NotATree(_))));
        let d = Graph::new(2, &[(0, 1)], true).unwrap();
        assert!(count_ktrees(&d, &tree(&[(0, 1)], 2), &MlcOptions::default()).is_err());
    }

    #[test]
    fn automorphisms() {
        assert_eq!(tree_automorphisms(&tree(&[(0, 1), (0, 2), (0, 3)], 4)).unwrap(), 6);
        assert_eq!(tree_automorphisms(&tree(&[(0, 1), (1, 2), (2, 3)], 4)).unwrap(), 2);
    }

    #[test]
    fn program_is_the_homomorphism_polynomial() {
        let mut rng = gen::rng(9);
        for _ in 0..8 {
            let n = rng.gen_range(2..=4);
            let k = rng.gen_range(1..=3);
            let g = Graph::new(n, &gen::random_edges(&mut rng, n, 0.6, false), false).unwrap();
            let t = tree(&gen::random_tree(&mut rng, k), k);
            for root in 0..k {
                let p = ktree_abp(&g, &t, root).unwrap().expand(DEFAULT_TERM_CAP).unwrap();
                assert_eq!(p.multilinear_sum(k as u32), BigInt::from(embeddings(&g, &t)));
            }
        }
    }

    #[test]
    fn normalized_matches_oracle() {
        for seed in 0..12 {
            let mut rng = gen::rng(300 + seed);
            let n = rng.gen_range(2..=6);
            let k = rng.gen_range(1..=4);
            let g = Graph::new(n, &gen::random_edges(&mut rng, n, 0.5, false), false).unwrap();
            let t = tree(&gen::random_tree(&mut rng, k), k);
            let r = count_ktrees(&g, &t, &MlcOptions::default()).unwrap();
            assert_eq!(r.normalized, BigRational::from_integer(ktree_oracle(&g, &t).unwrap()), "seed {seed}");
            let aut = tree_automorphisms(&t).unwrap();
            assert_eq!(r.constant, BigRational::from_integer(BigInt::from(k as u64 * aut)));
        }
    }
}
