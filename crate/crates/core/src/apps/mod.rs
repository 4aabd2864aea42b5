//! Counting problems reduced to sums of multilinear coefficients.
//!
//! Graph file:
//!
//! ```text
//! graph <n> <m> <directed|undirected>
//! <m lines "u v", 1-based>
//! ```
//!
//! Matching file:
//!
//! ```text
//! mdm <m>
//! universe <i> <size>      (one per i = 1..m)
//! tuple e_1 ... e_m         (1-based within each universe)
//! ```

mod domset;
mod kpath;
mod ktree;
mod mdmatch;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::abp::Abp;
use crate::algebra::{Integers, PrimeField, ScalarRing};
use crate::solvers::{mlc_count_abp, MlcOptions, MlcReport};

pub use domset::{count_tdomsets, domset_polynomial, tdomset_oracle, DomsetCount};
pub use kpath::{count_kpaths, kpath_abp, kpath_oracle, KpathCount};
pub use ktree::{count_ktrees, ktree_abp, ktree_oracle, tree_automorphisms, KtreeCount};
pub use mdmatch::{count_mdmatchings, mdmatch_oracle, mdmatch_polynomial, MatchCount};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AppError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("k = {k} exceeds {n}")]
    TooLarge { k: usize, n: usize },
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("tree counting needs an undirected graph")]
    Directed,
    #[error("tuple {index} has arity {found}, expected {expected}")]
    Arity { index: usize, expected: usize, found: usize },
    #[error("calibration instance has no solutions")]
    Calibration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    directed: bool,
    arcs: Vec<(usize, usize)>,
    out: Vec<Vec<usize>>,
}

impl Graph {
    /// Nodes are `0..n`. Undirected edges become two arcs; duplicates are dropped.
    pub fn new(n: usize, edges: &[(usize, usize)], directed: bool) -> Result<Self, AppError> {
        let mut out = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(AppError::Syntax { line: 0, msg: format!("edge ({u}, {v}) out of range for {n} nodes") });
            }
            out[u].push(v);
            if !directed {
                out[v].push(u);
            }
        }
        let mut arcs = Vec::new();
        for (u, o) in out.iter_mut().enumerate() {
            o.sort_unstable();
            o.dedup();
            arcs.extend(o.iter().map(|&v| (u, v)));
        }
        Ok(Graph { n, directed, arcs, out })
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::new(n, &edges, false).expect("edges in range")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn out(&self, u: usize) -> &[usize] {
        &self.out[u]
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    pub fn has_self_loop(&self) -> Option<usize> {
        (0..self.n).find(|&u| self.has_arc(u, u))
    }

    /// Edges as written back to a file: each undirected edge once.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.arcs.iter().copied().filter(|&(u, v)| self.directed || u <= v).collect()
    }

    pub fn to_text(&self) -> String {
        let edges = self.edges();
        let kind = if self.directed { "directed" } else { "undirected" };
        let mut s = format!("graph {} {} {}\n", self.n, edges.len(), kind);
        for (u, v) in edges {
            s.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        s
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn num(s: &str, line: usize) -> Result<usize, AppError> {
    s.parse().map_err(|_| AppError::Syntax { line, msg: format!("bad number `{s}`") })
}

pub fn parse_graph(text: &str) -> Result<Graph, AppError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(AppError::Syntax { line: 0, msg: "empty input".into() })?;
    let (n, m, directed) = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["graph", n, m, kind] => {
            let directed = match kind {
                "directed" => true,
                "undirected" => false,
                _ => return Err(AppError::Syntax { line: hl, msg: format!("unknown graph kind `{kind}`") }),
            };
            (num(n, hl)?, num(m, hl)?, directed)
        }
        _ => return Err(AppError::Syntax { line: hl, msg: "expected `graph <n> <m> <directed|undirected>`".into() }),
    };
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let (u, v) = match l.split_whitespace().collect::<Vec<_>>()[..] {
            [u, v] => (num(u, line)?, num(v, line)?),
            _ => return Err(AppError::Syntax { line, msg: "expected `u v`".into() }),
        };
        if u == 0 || v == 0 || u > n || v > n {
            return Err(AppError::Syntax { line, msg: format!("node out of range 1..={n}") });
        }
        edges.push((u - 1, v - 1));
    }
    if edges.len() != m {
        return Err(AppError::Syntax { line: hl, msg: format!("header declares {m} edges, found {}", edges.len()) });
    }
    Graph::new(n, &edges, directed)
}

/// Tuples over `m` disjoint universes; elements are 0-based within their universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchInstance {
    sizes: Vec<usize>,
    tuples: Vec<Vec<usize>>,
}

impl MatchInstance {
    pub fn new(sizes: Vec<usize>, tuples: Vec<Vec<usize>>) -> Result<Self, AppError> {
        let m = sizes.len();
        for (index, t) in tuples.iter().enumerate() {
            if t.len() != m {
                return Err(AppError::Arity { index, expected: m, found: t.len() });
            }
            if let Some(i) = (0..m).find(|&i| t[i] >= sizes[i]) {
                return Err(AppError::Syntax { line: 0, msg: format!("tuple {index}: element out of universe {}", i + 1) });
            }
        }
        Ok(MatchInstance { sizes, tuples })
    }

    pub fn m(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    /// Tuple indices grouped by first coordinate.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut g = vec![Vec::new(); self.sizes.first().copied().unwrap_or(0)];
        for (i, t) in self.tuples.iter().enumerate() {
            g[t[0]].push(i);
        }
        g
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("mdm {}\n", self.m());
        for (i, n) in self.sizes.iter().enumerate() {
            s.push_str(&format!("universe {} {}\n", i + 1, n));
        }
        for t in &self.tuples {
            let items: Vec<String> = t.iter().map(|e| (e + 1).to_string()).collect();
            s.push_str(&format!("tuple {}\n", items.join(" ")));
        }
        s
    }
}

pub fn parse_match(text: &str) -> Result<MatchInstance, AppError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(AppError::Syntax { line: 0, msg: "empty input".into() })?;
    let m = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["mdm", m] => num(m, hl)?,
        _ => return Err(AppError::Syntax { line: hl, msg: "expected `mdm <m>`".into() }),
    };
    let mut sizes: Vec<Option<usize>> = vec![None; m];
    let mut tuples = Vec::new();
    for (line, l) in lines {
        let words: Vec<&str> = l.split_whitespace().collect();
        match words[0] {
            "universe" => {
                let [_, i, size] = words[..] else {
                    return Err(AppError::Syntax { line, msg: "expected `universe <i> <size>`".into() });
                };
                let i = num(i, line)?;
                if i == 0 || i > m || sizes[i - 1].is_some() {
                    return Err(AppError::Syntax { line, msg: format!("bad or repeated universe {i}") });
                }
                sizes[i - 1] = Some(num(size, line)?);
            }
            "tuple" => {
                let t = words[1..].iter().map(|w| num(w, line)).collect::<Result<Vec<_>, _>>()?;
                if t.len() != m {
                    return Err(AppError::Arity { index: tuples.len(), expected: m, found: t.len() });
                }
                let mut z = Vec::with_capacity(m);
                for (i, e) in t.into_iter().enumerate() {
                    let size = sizes[i].ok_or(AppError::Syntax { line, msg: format!("universe {} not declared", i + 1) })?;
                    if e == 0 || e > size {
                        return Err(AppError::Syntax { line, msg: format!("element {e} out of universe {}", i + 1) });
                    }
                    z.push(e - 1);
                }
                tuples.push(z);
            }
            w => return Err(AppError::Syntax { line, msg: format!("unknown directive `{w}`") }),
        }
    }
    let sizes = sizes
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or(AppError::Syntax { line: hl, msg: format!("universe {} not declared", i + 1) }))
        .collect::<Result<Vec<_>, _>>()?;
    MatchInstance::new(sizes, tuples)
}

/// `2^61 - 1`.
const WORK_PRIME: u64 = (1 << 61) - 1;

/// The multilinear sum of a program with nonnegative coefficients.
///
/// The value at the all-ones point bounds the answer, so when it is below
/// `2^61 - 1` the work runs in that field and the residue is the integer.
pub(crate) fn exact_mlc(abp: &Abp, k: usize, opts: &MlcOptions) -> crate::Result<MlcReport<BigInt>> {
    let ones = vec![BigInt::one(); abp.nvars()];
    let bound = abp.eval(&Integers, &ones)?;
    if bound < BigInt::from(WORK_PRIME) {
        let f = PrimeField::new(WORK_PRIME)?;
        let r = mlc_count_abp(&f, abp, k, opts)?;
        Ok(MlcReport { value: f.to_bigint(&r.value), ops: r.ops, abp_width: r.abp_width, abp_edges: r.abp_edges })
    } else {
        mlc_count_abp(&Integers, abp, k, opts)
    }
}
