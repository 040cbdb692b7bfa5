//! Containers for `H`-free subgraphs: a fingerprint engine over the copy
//! hypergraph of a balanced collection, and the iterated container tree.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::balanced::{self, BuildMode, CopyCollection};
use crate::bitset::BitSet;
use crate::combinatorics::{binom, binom_f64, factorial, floor_tol};
use crate::embed;
use crate::hypertree::{self, HypertreeCert};
use crate::oracle::{log2_big, CopyMasks};
use crate::{Error, Hypergraph, Result};

/// One run of the engine: the fingerprint and the container it determines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintStep {
    pub fingerprint: Vec<usize>,
    pub container: BitSet,
}

/// Degree-order fingerprint procedure on a t-uniform copy hypergraph.
///
/// Starting from `S = ∅` and `A` = all live vertices, each step looks at the
/// vertex `v` of `A` lying in the most live copies (copies inside `S ∪ A`
/// that still meet `A`). If `v` belongs to the independent set it joins `S`,
/// and every `u` completing a copy with `S` leaves `A`; otherwise `v` leaves
/// `A`. The run stops when `|S|` reaches the budget, when no live copy is
/// left, or when `|S ∪ A|` drops to the optional size target. The container
/// is `S ∪ A`, and the fingerprint `S` alone replays the run.
#[derive(Clone, Debug)]
pub struct Engine {
    universe: usize,
    copies: Vec<Vec<usize>>,
    by_vertex: Vec<Vec<usize>>,
    budget: usize,
    stop_size: Option<usize>,
}

#[derive(Clone)]
struct RunState {
    s: Vec<usize>,
    in_s: BitSet,
    a: BitSet,
}

impl Engine {
    pub fn new(universe: usize, copies: Vec<Vec<usize>>, budget: usize, stop_size: Option<usize>) -> Self {
        let mut by_vertex = vec![Vec::new(); universe];
        for (i, c) in copies.iter().enumerate() {
            for &v in c {
                by_vertex[v].push(i);
            }
        }
        Engine { universe, copies, by_vertex, budget, stop_size }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    fn start(&self, alive: &BitSet) -> RunState {
        RunState { s: Vec::new(), in_s: BitSet::new(self.universe), a: alive.clone() }
    }

    fn in_play(st: &RunState, v: usize) -> bool {
        st.in_s.contains(v) || st.a.contains(v)
    }

    /// Next vertex to decide, or `None` if the run has stopped.
    fn next(&self, st: &RunState) -> Option<usize> {
        if st.s.len() >= self.budget {
            return None;
        }
        if let Some(stop) = self.stop_size {
            if st.s.len() + st.a.count() <= stop {
                return None;
            }
        }
        let mut deg: HashMap<usize, usize> = HashMap::new();
        for c in &self.copies {
            if c.iter().all(|&v| Self::in_play(st, v)) {
                for &v in c {
                    if st.a.contains(v) {
                        *deg.entry(v).or_insert(0) += 1;
                    }
                }
            }
        }
        deg.into_iter().max_by_key(|&(v, d)| (d, std::cmp::Reverse(v))).map(|(v, _)| v)
    }

    fn take(&self, st: &mut RunState, v: usize) {
        st.a.remove(v);
        st.in_s.insert(v);
        st.s.push(v);
        for &ci in &self.by_vertex[v] {
            let c = &self.copies[ci];
            let mut missing = c.iter().filter(|&&u| !st.in_s.contains(u));
            if let (Some(&u), None) = (missing.next(), missing.next()) {
                st.a.remove(u);
            }
        }
    }

    fn finish(st: &RunState) -> FingerprintStep {
        let mut container = st.a.clone();
        container.union_with(&st.in_s);
        FingerprintStep { fingerprint: st.s.clone(), container }
    }

    /// The run for independent set `i`, starting from `alive`.
    pub fn locate(&self, alive: &BitSet, i: &BitSet) -> FingerprintStep {
        let mut st = self.start(alive);
        while let Some(v) = self.next(&st) {
            if i.contains(v) {
                self.take(&mut st, v);
            } else {
                st.a.remove(v);
            }
        }
        Self::finish(&st)
    }

    /// Every container reachable by some fingerprint; `allow(S, v)` may veto
    /// taking `v` after `S`. Containers are deduplicated, keeping the first
    /// fingerprint found in take-first depth-first order.
    pub fn enumerate(&self, alive: &BitSet, allow: &mut dyn FnMut(&BitSet, usize) -> bool, max: usize) -> Result<Vec<FingerprintStep>> {
        let mut out: Vec<FingerprintStep> = Vec::new();
        let mut seen: HashMap<BitSet, ()> = HashMap::new();
        let mut stack = vec![self.start(alive)];
        while let Some(mut st) = stack.pop() {
            match self.next(&st) {
                None => {
                    let f = Self::finish(&st);
                    if seen.insert(f.container.clone(), ()).is_none() {
                        if out.len() >= max {
                            return Err(Error::TooLarge(format!("more than {max} containers in one split")));
                        }
                        out.push(f);
                    }
                }
                Some(v) => {
                    let take_ok = allow(&st.in_s, v);
                    let mut skip = st.clone();
                    skip.a.remove(v);
                    stack.push(skip);
                    if take_ok {
                        self.take(&mut st, v);
                        stack.push(st);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `log2 Σ_{j <= m} binom(N, j)`.
pub fn log2_binom_sum(n: usize, m: usize) -> f64 {
    let mut total = num_bigint::BigUint::from(0u32);
    for j in 0..=m.min(n) {
        total += crate::combinatorics::binom_big(n as u64, j as u64);
    }
    log2_big(&total)
}

/// Result of one application of the engine to a balanced collection.
#[derive(Clone, Debug)]
pub struct EngineOutput {
    pub containers: Vec<FingerprintStep>,
    pub budget: usize,
    /// Measured `min_C (1 - |C|/N)`.
    pub delta: f64,
    pub count_bound_log2: f64,
    pub max_fingerprint: usize,
}

/// Runs the engine on the copies of `kc` after checking the codegree
/// hypotheses for `(c, τ)`; `alive` is the host edge set as a bit set over
/// `universe` and `index` maps host edge indices into it.
pub fn container_engine(kc: &CopyCollection, c: f64, tau: f64, universe: usize, index: &[usize], allow: &mut dyn FnMut(&BitSet, usize) -> bool, max: usize) -> Result<EngineOutput> {
    let contract = balanced::verify_delta_contract(kc, c);
    if !contract.holds {
        return Err(Error::Precondition(format!("codegree hypothesis fails: minimal c is {}", contract.minimal_c)));
    }
    let n = kc.host().len();
    let budget = floor_tol(kc.t() as f64 * tau * n as f64) as usize;
    let copies: Vec<Vec<usize>> = kc.edge_lists().into_iter().map(|c| c.into_iter().map(|e| index[e]).collect()).collect();
    let engine = Engine::new(universe, copies, budget, None);
    let alive = BitSet::from_indices(universe, index.iter().copied());
    let containers = engine.enumerate(&alive, allow, max)?;
    let count_bound_log2 = log2_binom_sum(n, budget);
    if (containers.len() as f64).log2() > count_bound_log2 + 1e-9 {
        return Err(Error::Verification("more containers than fingerprints".into()));
    }
    let max_fingerprint = containers.iter().map(|f| f.fingerprint.len()).max().unwrap_or(0);
    if max_fingerprint as f64 > kc.t() as f64 * tau * n as f64 + 1e-9 {
        return Err(Error::Verification("fingerprint exceeds t τ N".into()));
    }
    let delta = containers.iter().map(|f| 1.0 - f.container.count() as f64 / n as f64).fold(1.0, f64::min);
    Ok(EngineOutput { containers, budget, delta, count_bound_log2, max_fingerprint })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Internal,
    /// At most `(σ-1+ε) binom(n,k-1)` edges.
    Sparse,
    /// Dense but containing no copy of `H`; only happens at small `n`.
    HFreeDense,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitInfo {
    pub mode: BuildMode,
    pub d: f64,
    pub copies: usize,
    pub tau: f64,
    pub min_c: f64,
    pub budget: usize,
    pub delta: f64,
    pub containers: usize,
    pub max_fingerprint: usize,
    pub count_bound_log2: f64,
    /// Copy lists in root edge indices, kept for replay.
    #[serde(skip)]
    pub copy_lists: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub edges: BitSet,
    pub kind: NodeKind,
    pub children: Vec<usize>,
    pub split: Option<SplitInfo>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.kind != NodeKind::Internal
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeOptions {
    /// Cap on containers per split.
    pub max_containers: usize,
    /// Cap on tree nodes.
    pub max_nodes: usize,
}

impl Default for TreeOptions {
    fn default() -> Self {
        TreeOptions { max_containers: 200_000, max_nodes: 2_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct ContainerTree {
    pub n: usize,
    pub k: usize,
    pub h: Hypergraph,
    pub sigma: usize,
    pub ell: usize,
    pub eps: f64,
    pub beta: f64,
    pub root: Hypergraph,
    pub nodes: Vec<TreeNode>,
    /// `(σ-1+ε) binom(n,k-1)` as a float, for reports.
    pub threshold: f64,
    replay: Vec<Option<Engine>>,
    child_index: HashMap<usize, HashMap<BitSet, usize>>,
}

/// Exact test `|F| > (σ-1+ε) binom(n,k-1)`.
pub fn is_dense(size: usize, n: usize, k: usize, sigma: usize, eps: f64) -> Result<bool> {
    let e = BigRational::from_float(eps).ok_or_else(|| Error::Parameter("eps must be finite".into()))?;
    let b = BigInt::from(crate::combinatorics::binom_big(n as u64, k as u64 - 1));
    let rhs = (e + BigRational::from_integer(BigInt::from(sigma as i64 - 1))) * BigRational::from_integer(b);
    Ok(BigRational::from_integer(BigInt::from(size)) > rhs)
}

/// Splits dense leaves of `K_n^(k)` until every leaf is sparse or `H`-free.
pub fn build_container_tree(n: usize, k: usize, cert: &HypertreeCert, eps: f64, beta: f64, opts: &TreeOptions) -> Result<ContainerTree> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter("eps must lie in (0,1)".into()));
    }
    let h = cert.host.clone();
    if h.k() != k || k < 2 || n < k {
        return Err(Error::Parameter(format!("need 2 <= k = k(H) <= n, got k={k}, n={n}")));
    }
    if !hypertree::is_t_contractible(&h, 2)?.0 {
        return Err(Error::Precondition("H must be 2-contractible".into()));
    }
    let sigma = hypertree::cross_cut(&h)?.sigma;
    let ell = hypertree::overlap(&h);
    let root = Hypergraph::complete(n, k);
    let u = root.len();
    let masks = CopyMasks::new(&root, &h).ok();
    let s = embed::pipeline_s(cert);
    let gate = 8.0 * s as f64 * factorial(k as u64) as f64;
    let norm = binom(n as u64, k as u64 - 1) as f64;
    let mut nodes = vec![TreeNode { id: 0, parent: None, depth: 0, edges: BitSet::full(u), kind: NodeKind::Sparse, children: Vec::new(), split: None }];
    let mut replay: Vec<Option<Engine>> = vec![None];
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let edges: Vec<usize> = nodes[id].edges.iter().collect();
        if !is_dense(edges.len(), n, k, sigma, eps)? {
            nodes[id].kind = NodeKind::Sparse;
            continue;
        }
        let f = root.subfamily(edges.iter().copied());
        let free = match &masks {
            Some(m) => m.is_free(edges.iter().fold(0u128, |a, &e| a | 1 << e)),
            None => embed::find_embedding(&f, &h)?.is_none(),
        };
        if free {
            nodes[id].kind = NodeKind::HFreeDense;
            continue;
        }
        let a = f.len() as f64 / norm;
        let mode = if a >= gate { BuildMode::Dense { a } } else { BuildMode::NearThreshold { gamma: eps } };
        let rep = balanced::build_balanced_collection(&f, cert, beta, mode)?;
        let kc = rep.collection;
        if kc.is_empty() {
            return Err(Error::NoProgress { edges: f.len() });
        }
        let tau = kc.tau();
        let min_c = balanced::verify_delta_contract(&kc, f64::INFINITY).minimal_c;
        let mut allow = |s: &BitSet, v: usize| match &masks {
            Some(m) => !m.completes(s.iter().fold(0u128, |a, e| a | 1 << e), v),
            None => {
                let mut idx: Vec<usize> = s.iter().collect();
                idx.push(v);
                embed::find_embedding(&root.subfamily(idx), &h).map_or(true, |e| e.is_none())
            }
        };
        let out = container_engine(&kc, min_c, tau, u, &edges, &mut allow, opts.max_containers)?;
        if out.containers.iter().any(|c| c.container.count() >= edges.len()) {
            return Err(Error::NoProgress { edges: edges.len() });
        }
        let depth = nodes[id].depth + 1;
        let mut children = Vec::with_capacity(out.containers.len());
        for c in &out.containers {
            let cid = nodes.len();
            if cid >= opts.max_nodes {
                return Err(Error::TooLarge(format!("container tree exceeds {} nodes", opts.max_nodes)));
            }
            nodes.push(TreeNode { id: cid, parent: Some(id), depth, edges: c.container.clone(), kind: NodeKind::Sparse, children: Vec::new(), split: None });
            replay.push(None);
            children.push(cid);
            queue.push_back(cid);
        }
        let copy_lists: Vec<Vec<usize>> = kc.edge_lists().into_iter().map(|c| c.into_iter().map(|e| edges[e]).collect()).collect();
        replay[id] = Some(Engine::new(u, copy_lists.clone(), out.budget, None));
        let node = &mut nodes[id];
        node.kind = NodeKind::Internal;
        node.children = children;
        node.split = Some(SplitInfo {
            mode,
            d: kc.d(),
            copies: kc.len(),
            tau,
            min_c,
            budget: out.budget,
            delta: out.delta,
            containers: out.containers.len(),
            max_fingerprint: out.max_fingerprint,
            count_bound_log2: out.count_bound_log2,
            copy_lists,
        });
    }
    let child_index = nodes
        .iter()
        .filter(|p| !p.children.is_empty())
        .map(|p| (p.id, p.children.iter().map(|&c| (nodes[c].edges.clone(), c)).collect()))
        .collect();
    let tree = ContainerTree { n, k, h, sigma, ell, eps, beta, root, nodes, threshold: (sigma as f64 - 1.0 + eps) * norm, replay, child_index };
    tree.check_invariants()?;
    Ok(tree)
}

impl ContainerTree {
    pub fn leaves(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Smallest measured δ over all splits.
    pub fn delta_min(&self) -> Option<f64> {
        self.nodes.iter().filter_map(|n| n.split.as_ref().map(|s| s.delta)).reduce(f64::min)
    }

    fn check_invariants(&self) -> Result<()> {
        for node in &self.nodes {
            if let Some(p) = node.parent {
                let parent = &self.nodes[p];
                if !node.edges.is_subset(&parent.edges) {
                    return Err(Error::Verification(format!("node {} is not inside its parent", node.id)));
                }
                let delta = parent.split.as_ref().map_or(0.0, |s| s.delta);
                if node.edges.count() as f64 > (1.0 - delta) * parent.edges.count() as f64 + 1e-9 {
                    return Err(Error::Verification(format!("node {} shrinks less than the recorded δ", node.id)));
                }
            }
            if node.kind == NodeKind::Sparse && is_dense(node.edges.count(), self.n, self.k, self.sigma, self.eps)? {
                return Err(Error::Verification(format!("leaf {} is dense", node.id)));
            }
        }
        if let Some(d) = self.delta_min() {
            let bound = (binom(self.n as u64, self.k as u64) as f64).ln() / -(1.0 - d).ln() + 1.0;
            if self.depth() as f64 > bound + 1e-9 {
                return Err(Error::Verification(format!("depth {} exceeds {bound}", self.depth())));
            }
        }
        Ok(())
    }

    /// Follows the fingerprint runs of `i` (root edge indices, `H`-free) from
    /// the root to the leaf that contains it.
    pub fn locate(&self, i: &BitSet) -> Result<usize> {
        let mut id = 0;
        loop {
            let node = &self.nodes[id];
            if !i.is_subset(&node.edges) {
                return Err(Error::Verification(format!("set escapes node {id}")));
            }
            if node.is_leaf() {
                return Ok(id);
            }
            let engine = self.replay[id].as_ref().expect("internal nodes keep their engine");
            let run = engine.locate(&node.edges, i);
            id = *self.child_index[&id]
                .get(&run.container)
                .ok_or_else(|| Error::Verification(format!("fingerprint of node {id} has no child")))?;
        }
    }

    /// Some leaf containing `i`: the located leaf, else any leaf.
    pub fn covering_leaf(&self, i: &BitSet) -> Option<usize> {
        match self.locate(i) {
            Ok(id) => Some(id),
            Err(_) => self.leaves().find(|l| i.is_subset(&l.edges)).map(|l| l.id),
        }
    }

    /// `log2(#leaves) + max((σ-1+ε) binom(n,k-1), largest leaf)`.
    pub fn forb_upper(&self) -> f64 {
        let biggest = self.leaves().map(|l| l.edges.count()).max().unwrap_or(0) as f64;
        (self.leaf_count() as f64).log2() + self.threshold.max(biggest)
    }

    /// `log2` of the leaf-count expression with unit constant, reported only.
    pub fn leaf_formula_log2(&self) -> f64 {
        let n = self.n as f64;
        let e = n.ln().powi(2) / n.powi((self.k - self.ell - 1) as i32) * binom_f64(n, self.k as u32 - 1);
        e / std::f64::consts::LN_2
    }

    /// `log2 Σ_{j <= t binom(n,k-1)/n^(k-ℓ-1)} binom(binom(n,k), j)`, reported only.
    pub fn container_formula_log2(&self) -> f64 {
        let n = self.n as f64;
        let m = self.h.len() as f64 * binom_f64(n, self.k as u32 - 1) / n.powi((self.k - self.ell - 1) as i32);
        log2_binom_sum(self.root.len(), floor_tol(m) as usize)
    }

    /// One JSON object per node.
    pub fn json_lines(&self) -> Vec<serde_json::Value> {
        self.nodes
            .iter()
            .map(|n| {
                serde_json::json!({
                    "id": n.id,
                    "parent": n.parent,
                    "edges": n.edges.count(),
                    "leaf": n.is_leaf(),
                    "kind": n.kind,
                    "depth": n.depth,
                    "delta": n.split.as_ref().map(|s| s.delta),
                    "copies": n.split.as_ref().map(|s| s.copies),
                })
            })
            .collect()
    }
}

/// Outcome of a coverage check.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub checked: u64,
    pub located: u64,
    pub misses: u64,
}

/// Checks every `H`-free subgraph of the root (needs at most 32 root edges).
pub fn verify_exhaustive(tree: &ContainerTree) -> Result<Coverage> {
    let u = tree.root.len();
    if u > 32 {
        return Err(Error::TooLarge(format!("{u} root edges is too many for exhaustive coverage")));
    }
    let masks = CopyMasks::new(&tree.root, &tree.h)?;
    let mut cov = Coverage::default();
    // depth-first over H-free sets, adding edges in increasing order
    let mut stack: Vec<(u128, usize)> = vec![(0, 0)];
    while let Some((set, next)) = stack.pop() {
        record(tree, &BitSet::from_indices(u, (0..u).filter(|&e| set >> e & 1 == 1)), &mut cov);
        for e in next..u {
            if !masks.completes(set, e) {
                stack.push((set | 1 << e, e + 1));
            }
        }
    }
    Ok(cov)
}

fn record(tree: &ContainerTree, i: &BitSet, cov: &mut Coverage) {
    cov.checked += 1;
    if tree.locate(i).is_ok() {
        cov.located += 1;
    } else if tree.covering_leaf(i).is_none() {
        cov.misses += 1;
    }
}

/// Random `H`-free subgraph: keep each edge with a random density, then
/// delete a random edge of some copy until none is left.
pub fn random_free_subgraph(masks: &CopyMasks, rng: &mut impl rand::Rng) -> u128 {
    let u = masks.universe();
    let p: f64 = rng.gen();
    let mut set: u128 = (0..u).filter(|_| rng.gen_bool(p)).fold(0, |a, e| a | 1 << e);
    loop {
        let hit: Vec<u128> = masks.masks().iter().copied().filter(|&c| c & !set == 0).collect();
        if hit.is_empty() {
            return set;
        }
        let c = hit[rng.gen_range(0..hit.len())];
        let members: Vec<usize> = (0..u).filter(|&e| c >> e & 1 == 1).collect();
        set &= !(1u128 << members[rng.gen_range(0..members.len())]);
    }
}

/// Checks `samples` random `H`-free subgraphs.
pub fn verify_sampled(tree: &ContainerTree, samples: u64, seed: u64) -> Result<Coverage> {
    use rand::SeedableRng;
    let masks = CopyMasks::new(&tree.root, &tree.h)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let u = tree.root.len();
    let mut cov = Coverage::default();
    for _ in 0..samples {
        let set = random_free_subgraph(&masks, &mut rng);
        record(tree, &BitSet::from_indices(u, (0..u).filter(|&e| set >> e & 1 == 1)), &mut cov);
    }
    Ok(cov)
}

/// `log2 forb` bound from the tree, with `ε` converted for reports.
pub fn forb_upper_from_tree(tree: &ContainerTree) -> f64 {
    tree.forb_upper()
}

/// Exact threshold as a float, for callers that print it.
pub fn threshold_value(n: usize, k: usize, sigma: usize, eps: f64) -> f64 {
    let b = BigRational::from_integer(BigInt::from(crate::combinatorics::binom_big(n as u64, k as u64 - 1)));
    let e = BigRational::from_f64(eps).unwrap_or_default();
    ((e + BigRational::from_integer(BigInt::from(sigma as i64 - 1))) * b).to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypertree::tree_cert;

    fn shared_pair() -> Hypergraph {
        Hypergraph::new(4, 6, vec![vec![0, 1, 2, 3], vec![0, 1, 4, 5]]).unwrap()
    }

    #[test]
    fn no_copies_single_container() {
        let e = Engine::new(5, Vec::new(), 3, None);
        let alive = BitSet::full(5);
        let out = e.enumerate(&alive, &mut |_, _| true, 10).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].container, alive);
    }

    #[test]
    fn one_copy_containers_omit_an_edge() {
        let e = Engine::new(4, vec![vec![0, 1, 2]], 3, None);
        let alive = BitSet::full(4);
        let out = e.enumerate(&alive, &mut |_, _| true, 100).unwrap();
        for c in &out {
            assert!((0..3).any(|v| !c.container.contains(v)));
        }
        // every independent set sits in its located container
        for m in 0u32..16 {
            if m & 7 == 7 {
                continue;
            }
            let i = BitSet::from_indices(4, (0..4).filter(|&v| m >> v & 1 == 1));
            let run = e.locate(&alive, &i);
            assert!(i.is_subset(&run.container));
            assert!(out.iter().any(|c| c.container == run.container));
        }
    }

    #[test]
    fn tiny_root_is_one_leaf() {
        let cert = tree_cert(&shared_pair()).unwrap();
        // K_4^(4) has one edge, never dense
        let t = build_container_tree(4, 4, &cert, 0.5, 1.0, &TreeOptions::default()).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert!((t.forb_upper() - t.threshold).abs() < 1e-12);
    }

    #[test]
    fn exact_threshold() {
        assert!(!is_dense(10, 6, 4, 1, 0.5).unwrap());
        assert!(is_dense(11, 6, 4, 1, 0.5).unwrap());
    }

    #[test]
    fn six_vertex_tree_covers() {
        let cert = tree_cert(&shared_pair()).unwrap();
        let t = build_container_tree(6, 4, &cert, 0.5, 1.0, &TreeOptions::default()).unwrap();
        let cov = verify_exhaustive(&t).unwrap();
        assert_eq!(cov.misses, 0);
        assert_eq!(cov.located, cov.checked);
    }
}
