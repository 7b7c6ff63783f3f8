//! Max filtering of weighted graphs under vertex relabeling, using weighted
//! tree templates, color coding, and a dynamic program over the tree.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng;
use rand::RngExt;

#[derive(Serialize, Deserialize)]
struct EdgeListJson {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

fn upper_edges(n: usize, adj: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if adj[u * n + v] != 0.0 {
                out.push((u, v, adj[u * n + v]));
            }
        }
    }
    out
}

fn adjacency_from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Vec<f64>> {
    let mut adj = vec![0.0; n * n];
    for &(u, v, w) in edges {
        if u >= n || v >= n {
            return Err(Error::InvalidInput(format!("edge ({u}, {v}) outside {n} vertices")));
        }
        if u == v {
            return Err(Error::InvalidInput(format!("self loop at {u}")));
        }
        if !w.is_finite() {
            return Err(Error::NonFinite("edge weight"));
        }
        adj[u * n + v] = w;
        adj[v * n + u] = w;
    }
    Ok(adj)
}

/// A real symmetric adjacency matrix with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    adj: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(n: usize, adj: Vec<f64>) -> Result<Self> {
        if adj.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: adj.len() });
        }
        if adj.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("adjacency"));
        }
        for u in 0..n {
            if adj[u * n + u] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal at {u}")));
            }
            for v in 0..u {
                if adj[u * n + v] != adj[v * n + u] {
                    return Err(Error::InvalidInput(format!("asymmetric entry ({u}, {v})")));
                }
            }
        }
        Ok(WeightedGraph { n, adj })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        Ok(WeightedGraph { n, adj: adjacency_from_edges(n, edges)? })
    }

    /// Unit-weight cycle on `n` vertices.
    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Self::from_edges(n, &edges).expect("valid cycle")
    }

    /// Vertex-disjoint union, with `other` relabeled after `self`.
    pub fn disjoint_union(&self, other: &WeightedGraph) -> Self {
        let n = self.n + other.n;
        let mut edges = upper_edges(self.n, &self.adj);
        edges.extend(
            upper_edges(other.n, &other.adj)
                .into_iter()
                .map(|(u, v, w)| (u + self.n, v + self.n, w)),
        );
        Self::from_edges(n, &edges).expect("valid union")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adj[u * self.n + v]
    }

    pub fn adjacency(&self) -> &[f64] {
        &self.adj
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.adj.iter().map(|w| w * w).sum()
    }

    /// `P B P^T` with `(P B P^T)[i][j] = B[perm[i]][perm[j]]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        check_perm(perm, self.n)?;
        let n = self.n;
        let adj = (0..n * n).map(|ij| self.adj[perm[ij / n] * n + perm[ij % n]]).collect();
        Ok(WeightedGraph { n, adj })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Serialize for WeightedGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EdgeListJson { n: self.n, edges: upper_edges(self.n, &self.adj) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let e = EdgeListJson::deserialize(d)?;
        WeightedGraph::from_edges(e.n, &e.edges).map_err(serde::de::Error::custom)
    }
}

fn check_perm(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidInput("not a permutation".into()));
    }
    Ok(())
}

/// A weighted tree on `k` vertices. Tree edges are listed explicitly so that
/// zero-weight edges still count toward the tree structure.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeTemplate {
    k: usize,
    adj: Vec<f64>,
    edges: Vec<(usize, usize)>,
}

impl TreeTemplate {
    pub fn from_edges(k: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("empty tree".into()));
        }
        if edges.len() != k - 1 {
            return Err(Error::InvalidInput(format!(
                "a tree on {k} vertices has {} edges, got {}",
                k - 1,
                edges.len()
            )));
        }
        let adj = adjacency_from_edges(k, edges)?;
        // union-find connectivity check
        let mut parent: Vec<usize> = (0..k).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v, _) in edges {
            let (a, b) = (root(&mut parent, u), root(&mut parent, v));
            if a == b {
                return Err(Error::InvalidInput("edges contain a cycle".into()));
            }
            parent[a] = b;
        }
        let edges = edges.iter().map(|&(u, v, _)| (u.min(v), u.max(v))).collect();
        Ok(TreeTemplate { k, adj, edges })
    }

    /// Unit-weight path `0 - 1 - ... - (k-1)`.
    pub fn path(k: usize) -> Self {
        let edges: Vec<_> = (1..k).map(|i| (i - 1, i, 1.0)).collect();
        Self::from_edges(k, &edges).expect("valid path")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adj[u * self.k + v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .filter_map(move |&(a, b)| if a == u { Some(b) } else if b == u { Some(a) } else { None })
    }

    /// The same tree scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        TreeTemplate {
            k: self.k,
            adj: self.adj.iter().map(|w| w * s).collect(),
            edges: self.edges.clone(),
        }
    }

    /// Relabels vertices so that `new label i` = `perm[i]` in the old labels.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        check_perm(perm, self.k)?;
        let mut inv = vec![0; self.k];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v)| (inv[u], inv[v], self.weight(u, v)))
            .collect();
        Self::from_edges(self.k, &edges)
    }

    /// A relabeled copy in post-order (children before parents, root last),
    /// and the permutation used.
    pub fn post_ordered(&self) -> (Self, Vec<usize>) {
        let root = self.k - 1;
        let mut order = Vec::with_capacity(self.k);
        let mut stack = vec![(root, usize::MAX, false)];
        while let Some((u, parent, expanded)) = stack.pop() {
            if expanded {
                order.push(u);
                continue;
            }
            stack.push((u, parent, true));
            let mut kids: Vec<usize> = self.neighbors(u).filter(|&c| c != parent).collect();
            kids.sort_unstable_by(|a, b| b.cmp(a));
            stack.extend(kids.into_iter().map(|c| (c, u, false)));
        }
        let t = self.relabel(&order).expect("post-order is a permutation");
        (t, order)
    }

    /// 2 x the sum over tree edges of squared weights, i.e. `|A|_F^2`.
    pub fn frobenius_sq(&self) -> f64 {
        self.adj.iter().map(|w| w * w).sum()
    }

    /// The zero-padded template as a graph on `n >= k` vertices.
    pub fn padded(&self, n: usize) -> Result<WeightedGraph> {
        if n < self.k {
            return Err(Error::InvalidInput("padding below tree size".into()));
        }
        let edges: Vec<_> = self.edges.iter().map(|&(u, v)| (u, v, self.weight(u, v))).collect();
        WeightedGraph::from_edges(n, &edges)
    }
}

impl Serialize for TreeTemplate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let edges = self.edges.iter().map(|&(u, v)| (u, v, self.weight(u, v))).collect();
        EdgeListJson { n: self.k, edges }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TreeTemplate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let e = EdgeListJson::deserialize(d)?;
        TreeTemplate::from_edges(e.n, &e.edges).map_err(serde::de::Error::custom)
    }
}

/// For each `u < k - 1`, its unique neighbor `u' > u`. Fails unless the
/// labeling is a post-order.
pub fn validate_post_order(tree: &TreeTemplate) -> Result<Vec<(usize, usize)>> {
    (0..tree.k.saturating_sub(1))
        .map(|u| {
            let later: Vec<usize> = tree.neighbors(u).filter(|&v| v > u).collect();
            if later.len() == 1 {
                Ok((u, later[0]))
            } else {
                Err(Error::NotPostOrder { vertex: u, later_neighbors: later.len() })
            }
        })
        .collect()
}

/// A family of colorings `[n] -> [k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorCoding {
    pub n: usize,
    pub k: usize,
    pub colorings: Vec<Vec<u8>>,
    /// Set when the rainbow property was checked exhaustively.
    pub verified: bool,
}

/// `max(1, ceil(k e^k ln n))`.
pub fn coding_size(n: usize, k: usize) -> usize {
    let kf = k as f64;
    ((kf * kf.exp() * (n as f64).ln()).ceil() as usize).max(1)
}

const VERIFY_MAX_N: usize = 12;
const VERIFY_MAX_K: usize = 4;
const MAX_ATTEMPTS: u64 = 16;

pub fn make_color_coding(n: usize, k: usize, seed: u64) -> Result<ColorCoding> {
    make_color_coding_scaled(n, k, seed, 1.0)
}

/// Like [`make_color_coding`] with the family size multiplied by `multiplier`.
pub fn make_color_coding_scaled(n: usize, k: usize, seed: u64, multiplier: f64) -> Result<ColorCoding> {
    if k == 0 || n < k {
        return Err(Error::InvalidInput(format!("need n >= k >= 1, got n = {n}, k = {k}")));
    }
    if k > u8::MAX as usize {
        return Err(Error::InvalidInput("k too large".into()));
    }
    if !(multiplier > 0.0) {
        return Err(Error::InvalidInput("multiplier must be positive".into()));
    }
    let size = ((coding_size(n, k) as f64 * multiplier).ceil() as usize).max(1);
    let verify = n <= VERIFY_MAX_N && k <= VERIFY_MAX_K;
    for attempt in 0..MAX_ATTEMPTS {
        let mut r = rng::substream(seed, attempt);
        let colorings: Vec<Vec<u8>> = (0..size)
            .map(|_| (0..n).map(|_| r.random_range(0..k) as u8).collect())
            .collect();
        let coding = ColorCoding { n, k, colorings, verified: false };
        if !verify {
            return Ok(coding);
        }
        if coding.is_complete() {
            return Ok(ColorCoding { verified: true, ..coding });
        }
    }
    Err(Error::Numeric(format!(
        "no ({n}, {k}) color coding found in {MAX_ATTEMPTS} attempts"
    )))
}

impl ColorCoding {
    /// Whether every `k`-subset of `[n]` receives `k` distinct colors under
    /// some coloring.
    pub fn is_complete(&self) -> bool {
        (0..self.n).combinations(self.k).all(|subset| {
            self.colorings.iter().any(|c| {
                let mut seen = 0u64;
                subset.iter().all(|&v| {
                    let bit = 1u64 << c[v];
                    let fresh = seen & bit == 0;
                    seen |= bit;
                    fresh
                })
            })
        })
    }
}

/// Value and operation count of the tree dynamic program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeFilterResult {
    pub value: f64,
    /// Number of (coloring, color assignment) pairs visited.
    pub pairs: u64,
    /// Inner-loop updates `l(v) + A[u][u'] B[v][v']` evaluated.
    pub ops: u64,
}

/// `<<[A~],[B]>>` for the zero-padded tree `A~` under relabeling of `B`,
/// exact whenever the coding has the rainbow property for `k`-subsets.
pub fn mf_tree_dp(tree: &TreeTemplate, graph: &WeightedGraph, coding: &ColorCoding) -> Result<TreeFilterResult> {
    let k = tree.k;
    let n = graph.n;
    if coding.n != n || coding.k != k {
        return Err(Error::InvalidInput(format!(
            "coding is for (n, k) = ({}, {}), need ({n}, {k})",
            coding.n, coding.k
        )));
    }
    if n < k {
        return Err(Error::InvalidInput("graph smaller than tree".into()));
    }
    let parents = validate_post_order(tree)?;
    if k == 1 {
        return Ok(TreeFilterResult { value: 0.0, pairs: 0, ops: 0 });
    }
    let perms: Vec<Vec<usize>> = (0..k).permutations(k).collect();
    let (best, ops) = coding
        .colorings
        .par_iter()
        .map(|coloring| {
            let mut classes = vec![Vec::new(); k];
            for (v, &c) in coloring.iter().enumerate() {
                classes[c as usize].push(v);
            }
            let mut ell = vec![0.0; n];
            let mut best = f64::NEG_INFINITY;
            let mut ops = 0u64;
            'perm: for pi in &perms {
                if pi.iter().any(|&c| classes[c].is_empty()) {
                    continue 'perm;
                }
                for &v in pi.iter().flat_map(|&c| classes[c].iter()) {
                    ell[v] = 0.0;
                }
                for &(u, up) in &parents {
                    let w = tree.weight(u, up);
                    let (cu, cup) = (&classes[pi[u]], &classes[pi[up]]);
                    for &vp in cup {
                        let m = cu
                            .iter()
                            .map(|&v| ell[v] + w * graph.weight(v, vp))
                            .fold(f64::NEG_INFINITY, f64::max);
                        ell[vp] += m;
                    }
                    ops += (cu.len() * cup.len()) as u64;
                }
                let s = classes[pi[k - 1]].iter().map(|&v| ell[v]).fold(f64::NEG_INFINITY, f64::max);
                best = best.max(s);
            }
            (best, ops)
        })
        .reduce(|| (f64::NEG_INFINITY, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
    Ok(TreeFilterResult {
        value: 2.0 * best,
        pairs: (coding.colorings.len() * perms.len()) as u64,
        ops,
    })
}

pub const BRUTE_FORCE_MAX_N: usize = 8;

/// `max over injections s: [k] -> [n]` of `2 sum_{tree edges} A[u][u'] B[s(u)][s(u')]`.
pub fn brute_force_tree_filter(tree: &TreeTemplate, graph: &WeightedGraph) -> Result<f64> {
    let (k, n) = (tree.k, graph.n);
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::EnumerationTooLarge { size: n as u128, cap: BRUTE_FORCE_MAX_N as u128 });
    }
    if n < k {
        return Err(Error::InvalidInput("graph smaller than tree".into()));
    }
    Ok((0..n)
        .permutations(k)
        .map(|s| {
            2.0 * tree
                .edges
                .iter()
                .map(|&(u, v)| tree.weight(u, v) * graph.weight(s[u], s[v]))
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IsomorphismVerdict {
    /// `perm` satisfies `A2[perm[i]][perm[j]] = A1[i][j]`.
    Isomorphic { perm: Vec<usize> },
    NonIsomorphic { max_filter: f64, norm_sq_1: f64, norm_sq_2: f64 },
}

/// Decides isomorphism by checking `|A1|^2 = <<[A1],[A2]>> = |A2|^2`, with
/// the max filter computed by enumerating all relabelings.
pub fn graph_isomorphism_certificate(a1: &WeightedGraph, a2: &WeightedGraph) -> Result<IsomorphismVerdict> {
    let n = a1.n.max(a2.n);
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::EnumerationTooLarge { size: n as u128, cap: BRUTE_FORCE_MAX_N as u128 });
    }
    let (f1, f2) = (a1.frobenius_sq(), a2.frobenius_sq());
    if a1.n != a2.n {
        return Ok(IsomorphismVerdict::NonIsomorphic { max_filter: f64::NAN, norm_sq_1: f1, norm_sq_2: f2 });
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for perm in (0..n).permutations(n) {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += a1.weight(i, j) * a2.weight(perm[i], perm[j]);
            }
        }
        if s > best.0 {
            best = (s, perm);
        }
    }
    let tol = 1e-9 * (1.0 + f1.max(f2));
    if (f1 - best.0).abs() <= tol && (f2 - best.0).abs() <= tol {
        Ok(IsomorphismVerdict::Isomorphic { perm: best.1 })
    } else {
        Ok(IsomorphismVerdict::NonIsomorphic { max_filter: best.0, norm_sq_1: f1, norm_sq_2: f2 })
    }
}
