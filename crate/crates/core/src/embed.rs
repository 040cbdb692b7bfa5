//! Embedding search and copy counting, minimum-degree cleaning, and the
//! constructive lower bounds on the number of copies of a hypertree.
//!
//! Two independent counters exist: an edge-by-edge search along a
//! tree-defining order ([`TreeSearch`]) and a vertex-by-vertex search with
//! shadow pruning that works for any pattern.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binom, factorial, for_each_permutation};
use crate::delta::{self, DichotomyOutcome, PartitionedFamily};
use crate::hypertree::{self, HypertreeCert};
use crate::{Error, Hypergraph, Result, Vertex, VertexSet};

/// Default cap on search nodes for exact counting.
pub const DEFAULT_BUDGET: u64 = 400_000_000;

/// An injective vertex map `V(H) -> V(F)` with the host edge hit by every
/// edge of `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    /// `(h_vertex, host_vertex)` pairs sorted by `h_vertex`.
    pub map: Vec<(Vertex, Vertex)>,
    /// Host edge index of `φ(E)` for every edge `E` of `H` in canonical order.
    pub host_edges: Vec<usize>,
}

impl Embedding {
    pub fn image(&self, v: Vertex) -> Option<Vertex> {
        self.map.binary_search_by_key(&v, |p| p.0).ok().map(|i| self.map[i].1)
    }

    /// Re-checks injectivity and that every edge maps onto its host edge.
    pub fn verify(&self, host: &Hypergraph, h: &Hypergraph) -> bool {
        let mut imgs: Vec<Vertex> = self.map.iter().map(|p| p.1).collect();
        imgs.sort_unstable();
        imgs.dedup();
        if imgs.len() != self.map.len() || self.host_edges.len() != h.len() {
            return false;
        }
        h.edges().iter().zip(&self.host_edges).all(|(e, &he)| {
            let img: Option<VertexSet> = e.iter().map(|v| self.image(v)).collect::<Option<Vec<_>>>().map(VertexSet::new);
            he < host.len() && img.as_ref() == Some(host.edge(he))
        })
    }
}

struct Step {
    attach: Vec<usize>,
    fresh: Vec<usize>,
}

/// Edge-by-edge embedding search along a tree-defining order.
pub struct TreeSearch<'a> {
    host: &'a Hypergraph,
    cert: &'a HypertreeCert,
    inc: Vec<Vec<usize>>,
    hverts: Vec<Vertex>,
    steps: Vec<Step>,
}

/// Hooks steering a [`TreeSearch`].
pub trait SearchControl {
    /// May H vertex `hv` (compact index) map to host vertex `v`?
    fn vertex_ok(&self, _hv: usize, _v: Vertex) -> bool {
        true
    }
    /// May position `step` use host edge `edge`, given the edges chosen so far?
    fn edge_ok(&mut self, _step: usize, _edge: usize, _chosen: &[usize]) -> bool {
        true
    }
    /// Called on each complete embedding.
    fn leaf(&mut self, map: &[Vertex], chosen: &[usize]) -> ControlFlow<()>;
}

struct Counter(u128);

impl SearchControl for Counter {
    fn leaf(&mut self, _: &[Vertex], _: &[usize]) -> ControlFlow<()> {
        self.0 += 1;
        ControlFlow::Continue(())
    }
}

impl<'a> TreeSearch<'a> {
    pub fn new(host: &'a Hypergraph, cert: &'a HypertreeCert) -> Self {
        let hverts: Vec<Vertex> = cert.host.vertices().into_vec();
        let idx: HashMap<Vertex, usize> = hverts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let steps = (0..cert.len())
            .map(|i| {
                let a = cert.attach(i);
                Step {
                    attach: a.iter().map(|v| idx[&v]).collect(),
                    fresh: cert.edge(i).difference(&a).iter().map(|v| idx[&v]).collect(),
                }
            })
            .collect();
        TreeSearch { host, cert, inc: host.incidence(), hverts, steps }
    }

    /// H vertex ids in compact order.
    pub fn h_vertices(&self) -> &[Vertex] {
        &self.hverts
    }

    pub fn to_embedding(&self, map: &[Vertex], chosen: &[usize]) -> Embedding {
        let mut host_edges = vec![0; chosen.len()];
        for (pos, &e) in chosen.iter().enumerate() {
            host_edges[self.cert.order[pos]] = e;
        }
        Embedding { map: self.hverts.iter().copied().zip(map.iter().copied()).collect(), host_edges }
    }

    /// Runs the search; `first` restricts the host edge of the first step.
    pub fn run(&self, ctl: &mut dyn SearchControl, first: Option<usize>, budget: u64) -> Result<()> {
        let mut st = State {
            map: vec![Vertex::MAX; self.hverts.len()],
            used: vec![false; self.host.n()],
            chosen: Vec::with_capacity(self.steps.len()),
            nodes: 0,
            budget,
        };
        self.rec(0, &mut st, ctl, first).map(|_| ())
    }

    fn rec(&self, i: usize, st: &mut State, ctl: &mut dyn SearchControl, first: Option<usize>) -> Result<ControlFlow<()>> {
        if i == self.steps.len() {
            return Ok(ctl.leaf(&st.map, &st.chosen));
        }
        st.nodes += 1;
        if st.nodes > st.budget {
            return Err(Error::TooLarge(format!("embedding search exceeded {} nodes", st.budget)));
        }
        let step = &self.steps[i];
        let a_img: Vec<Vertex> = step.attach.iter().map(|&h| st.map[h]).collect();
        let a_set = VertexSet::new(a_img.clone());
        let cands: Vec<usize> = match (i, first) {
            (0, Some(f)) => vec![f],
            _ => match a_img.iter().min_by_key(|&&v| self.inc[v as usize].len()) {
                Some(&v) => self.inc[v as usize].iter().copied().filter(|&e| a_set.is_subset(self.host.edge(e))).collect(),
                None => (0..self.host.len()).collect(),
            },
        };
        for e in cands {
            let rest = self.host.edge(e).difference(&a_set);
            if rest.iter().any(|v| st.used[v as usize]) || !ctl.edge_ok(i, e, &st.chosen) {
                continue;
            }
            let rest = rest.into_vec();
            for &v in &rest {
                st.used[v as usize] = true;
            }
            st.chosen.push(e);
            let mut out = Ok(ControlFlow::Continue(()));
            let mut stop = false;
            for_each_permutation(&rest, |perm| {
                if stop {
                    return;
                }
                if step.fresh.iter().zip(perm).any(|(&h, &v)| !ctl.vertex_ok(h, v)) {
                    return;
                }
                for (&h, &v) in step.fresh.iter().zip(perm) {
                    st.map[h] = v;
                }
                match self.rec(i + 1, st, ctl, None) {
                    Ok(ControlFlow::Continue(())) => {}
                    r => {
                        out = r;
                        stop = true;
                    }
                }
                for &h in &step.fresh {
                    st.map[h] = Vertex::MAX;
                }
            });
            st.chosen.pop();
            for &v in &rest {
                st.used[v as usize] = false;
            }
            if stop {
                return out;
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Number of labelled embeddings, parallel over the first host edge.
    /// The node budget is shared by all branches.
    pub fn count(&self, budget: u64) -> Result<u128> {
        let spent = AtomicU64::new(0);
        let parts: Vec<Result<u128>> = (0..self.host.len())
            .into_par_iter()
            .map(|e| {
                let left = budget.saturating_sub(spent.load(Ordering::Relaxed)).max(1);
                let mut c = Counter(0);
                let mut st = State {
                    map: vec![Vertex::MAX; self.hverts.len()],
                    used: vec![false; self.host.n()],
                    chosen: Vec::new(),
                    nodes: 0,
                    budget: left,
                };
                let r = self.rec(0, &mut st, &mut c, Some(e));
                spent.fetch_add(st.nodes, Ordering::Relaxed);
                r.map(|_| c.0)
            })
            .collect();
        parts.into_iter().sum()
    }
}

struct State {
    map: Vec<Vertex>,
    used: Vec<bool>,
    chosen: Vec<usize>,
    nodes: u64,
    budget: u64,
}

/// Vertex-by-vertex embedding search with shadow pruning; works for any `H`.
pub struct GenericSearch<'a> {
    host: &'a Hypergraph,
    order: Vec<Vertex>,
    /// For each position, the H edges containing that vertex.
    edges_at: Vec<Vec<usize>>,
    h: &'a Hypergraph,
    shadow: HashSet<VertexSet>,
    neighbours: Vec<Vec<Vertex>>,
    host_vertices: Vec<Vertex>,
}

impl<'a> GenericSearch<'a> {
    pub fn new(host: &'a Hypergraph, h: &'a Hypergraph) -> Self {
        let hv = h.vertices().into_vec();
        let mut order: Vec<Vertex> = Vec::new();
        let mut placed: HashSet<Vertex> = HashSet::new();
        let deg = hypertree::vertex_degrees(h);
        while order.len() < hv.len() {
            // most edges shared with placed vertices, then highest degree, then smallest id
            let next = *hv
                .iter()
                .filter(|v| !placed.contains(v))
                .max_by_key(|&&v| {
                    let touch = h.edges().iter().filter(|e| e.contains(v) && e.iter().any(|u| placed.contains(&u))).count();
                    (touch, deg[&v], std::cmp::Reverse(v))
                })
                .unwrap();
            placed.insert(next);
            order.push(next);
        }
        let edges_at = order
            .iter()
            .map(|&v| (0..h.len()).filter(|&e| h.edge(e).contains(v)).collect())
            .collect();
        let mut shadow = HashSet::new();
        for e in host.edges() {
            for r in 1..=e.len() {
                for s in e.subsets_of_size(r) {
                    shadow.insert(s);
                }
            }
        }
        let mut nb: Vec<HashSet<Vertex>> = vec![HashSet::new(); host.n()];
        for e in host.edges() {
            for a in e.iter() {
                for b in e.iter() {
                    if a != b {
                        nb[a as usize].insert(b);
                    }
                }
            }
        }
        let neighbours = nb
            .into_iter()
            .map(|s| {
                let mut v: Vec<Vertex> = s.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        GenericSearch { host, order, edges_at, h, shadow, neighbours, host_vertices: host.vertices().into_vec() }
    }

    /// Visits every embedding; the callback gets the map in `order` positions.
    fn rec(&self, pos: usize, map: &mut HashMap<Vertex, Vertex>, used: &mut HashSet<Vertex>, nodes: &mut u64, budget: u64, f: &mut dyn FnMut(&HashMap<Vertex, Vertex>) -> ControlFlow<()>) -> Result<ControlFlow<()>> {
        if pos == self.order.len() {
            return Ok(f(map));
        }
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::TooLarge(format!("generic search exceeded {budget} nodes")));
        }
        let u = self.order[pos];
        let anchor = self.edges_at[pos]
            .iter()
            .flat_map(|&e| self.h.edge(e).iter())
            .find_map(|w| map.get(&w).copied());
        let cands: &[Vertex] = match anchor {
            Some(a) => &self.neighbours[a as usize],
            None => &self.host_vertices,
        };
        for &v in cands {
            if used.contains(&v) {
                continue;
            }
            map.insert(u, v);
            let ok = self.edges_at[pos].iter().all(|&e| {
                let img: VertexSet = self.h.edge(e).iter().filter_map(|w| map.get(&w).copied()).collect();
                self.shadow.contains(&img) && (img.len() < self.h.k() || self.host.contains_edge(&img))
            });
            if ok {
                used.insert(v);
                let r = self.rec(pos + 1, map, used, nodes, budget, f)?;
                used.remove(&v);
                if r.is_break() {
                    map.remove(&u);
                    return Ok(r);
                }
            }
            map.remove(&u);
        }
        Ok(ControlFlow::Continue(()))
    }

    pub fn count(&self, budget: u64) -> Result<u128> {
        let mut c = 0u128;
        let mut nodes = 0;
        let _ = self.rec(0, &mut HashMap::new(), &mut HashSet::new(), &mut nodes, budget, &mut |_| {
            c += 1;
            ControlFlow::Continue(())
        })?;
        Ok(c)
    }

    pub fn first(&self, budget: u64) -> Result<Option<Embedding>> {
        let mut found = None;
        let mut nodes = 0;
        let _ = self.rec(0, &mut HashMap::new(), &mut HashSet::new(), &mut nodes, budget, &mut |m| {
            let mut map: Vec<(Vertex, Vertex)> = m.iter().map(|(&a, &b)| (a, b)).collect();
            map.sort_unstable();
            let host_edges = self
                .h
                .edges()
                .iter()
                .map(|e| {
                    let img: VertexSet = e.iter().map(|v| m[&v]).collect();
                    self.host.index_of(&img).expect("edge images are host edges")
                })
                .collect();
            found = Some(Embedding { map, host_edges });
            ControlFlow::Break(())
        })?;
        Ok(found)
    }
}

/// |Aut(H)| by permutation search over V(H) with edge-set pruning.
pub fn automorphism_count(h: &Hypergraph) -> Result<u128> {
    let relabel = h.with_universe(h.n())?;
    GenericSearch::new(&relabel, h).count(DEFAULT_BUDGET)
}

/// Some embedding of `H` into `F`, if one exists.
pub fn find_embedding(f: &Hypergraph, h: &Hypergraph) -> Result<Option<Embedding>> {
    if h.k() != f.k() {
        return Ok(None);
    }
    GenericSearch::new(f, h).first(DEFAULT_BUDGET)
}

/// Every copy of `H` in `F` as a sorted list of host edge indices, each copy
/// once, in sorted order.
pub fn copy_edge_sets(f: &Hypergraph, h: &Hypergraph, budget: u64) -> Result<Vec<Vec<usize>>> {
    if h.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    if h.k() != f.k() {
        return Ok(Vec::new());
    }
    match hypertree::find_tree_order(h)? {
        Some(cert) => {
            struct Collect<'s>(&'s mut HashSet<Vec<usize>>);
            impl SearchControl for Collect<'_> {
                fn leaf(&mut self, _: &[Vertex], chosen: &[usize]) -> ControlFlow<()> {
                    let mut c = chosen.to_vec();
                    c.sort_unstable();
                    self.0.insert(c);
                    ControlFlow::Continue(())
                }
            }
            TreeSearch::new(f, &cert).run(&mut Collect(&mut seen), None, budget)?;
        }
        None => {
            let g = GenericSearch::new(f, h);
            let mut nodes = 0;
            let _ = g.rec(0, &mut HashMap::new(), &mut HashSet::new(), &mut nodes, budget, &mut |m| {
                let mut c: Vec<usize> = h
                    .edges()
                    .iter()
                    .map(|e| f.index_of(&e.iter().map(|v| m[&v]).collect()).expect("edge images are host edges"))
                    .collect();
                c.sort_unstable();
                seen.insert(c);
                ControlFlow::Continue(())
            })?;
        }
    }
    let mut out: Vec<Vec<usize>> = seen.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyTally {
    pub embeddings: u128,
    pub automorphisms: u128,
    pub copies: u128,
}

/// Labelled embeddings counted by the tree-order search.
pub fn count_embeddings_tree(f: &Hypergraph, cert: &HypertreeCert, budget: u64) -> Result<u128> {
    if cert.host.k() != f.k() {
        return Ok(0);
    }
    TreeSearch::new(f, cert).count(budget)
}

/// Labelled embeddings counted by the generic vertex search.
pub fn count_embeddings_generic(f: &Hypergraph, h: &Hypergraph, budget: u64) -> Result<u128> {
    if h.k() != f.k() {
        return Ok(0);
    }
    GenericSearch::new(f, h).count(budget)
}

/// Number of subgraphs of `F` isomorphic to `H`.
pub fn count_copies_exact(f: &Hypergraph, h: &Hypergraph) -> Result<CopyTally> {
    count_copies_budget(f, h, DEFAULT_BUDGET)
}

pub fn count_copies_budget(f: &Hypergraph, h: &Hypergraph, budget: u64) -> Result<CopyTally> {
    if h.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let embeddings = match hypertree::find_tree_order(h)? {
        Some(cert) => count_embeddings_tree(f, &cert, budget)?,
        None => count_embeddings_generic(f, h, budget)?,
    };
    let automorphisms = automorphism_count(h)?;
    Ok(CopyTally { embeddings, automorphisms, copies: embeddings / automorphisms })
}

/// Repeatedly deletes all edges through a set `B` (`1 <= |B| <= k-1`) whose
/// degree is positive but below `|F| / (2k binom(n,|B|))`.
pub fn clean_min_degree(f: &Hypergraph) -> Result<Hypergraph> {
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let k = f.k();
    let n = f.n() as u64;
    let m = f.len() as u128;
    // degree of D is below the bar iff deg * 2k binom(n,|D|) < |F|
    let below = |deg: usize, i: usize| deg > 0 && (deg as u128) * 2 * k as u128 * binom(n, i as u64) < m;
    let mut alive = vec![true; f.len()];
    let mut deg: HashMap<VertexSet, usize> = HashMap::new();
    let mut through: HashMap<VertexSet, Vec<usize>> = HashMap::new();
    for (ei, e) in f.edges().iter().enumerate() {
        for i in 1..k {
            for d in e.subsets_of_size(i) {
                *deg.entry(d.clone()).or_insert(0) += 1;
                through.entry(d).or_default().push(ei);
            }
        }
    }
    let mut keys: Vec<VertexSet> = deg.keys().cloned().collect();
    keys.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    loop {
        let mut changed = false;
        for d in &keys {
            if below(deg[d], d.len()) {
                for &ei in &through[d] {
                    if alive[ei] {
                        alive[ei] = false;
                        for i in 1..k {
                            for s in f.edge(ei).subsets_of_size(i) {
                                *deg.get_mut(&s).unwrap() -= 1;
                            }
                        }
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let out = f.subfamily((0..f.len()).filter(|&i| alive[i]));
    if out.is_empty() || out.len() * 2 < f.len() {
        return Err(Error::Verification(format!("cleaning kept {} of {} edges", out.len(), f.len())));
    }
    for i in 1..k {
        let d = out.proper_min_degree(i)?;
        if below(d, i) {
            return Err(Error::Verification(format!("cleaned family has δ_{i} = {d} below the bar")));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundSource {
    /// Inductive greedy extension on a min-degree cleaned family.
    Greedy,
    /// Extension inside a type-1 super-homogeneous family.
    Type1,
    /// Cross-cut extension through a set met exactly once.
    CrossCut,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountUnit {
    /// Unlabelled subgraphs.
    Copies,
    /// Labelled embeddings sending expansion vertices outside the base parts.
    RestrictedEmbeddings,
}

/// Constants and intermediate values behind a lower bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub source: BoundSource,
    /// `|F| / binom(n, k-1)`.
    pub a: f64,
    /// Vertex count of H.
    pub s: usize,
    /// Edge count of H.
    pub t: usize,
    pub gamma: Option<f64>,
    pub eps: Option<f64>,
    /// Whether the asymptotic formula's hypothesis holds.
    pub hypothesis_met: bool,
    /// Value of the closed-form bound in embeddings (0 when gated off).
    pub formula: f64,
    /// Finite-n bound in embeddings from exact degrees.
    pub constructive: f64,
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CopyCount {
    pub exact: Option<u128>,
    pub lower_bound: u128,
    pub unit: CountUnit,
    pub provenance: Provenance,
}

fn ceil_div(a: u128, b: u128) -> u128 {
    a.div_ceil(b)
}

fn to_u128(x: f64) -> u128 {
    if x <= 0.0 || x.is_nan() {
        0
    } else if x >= u128::MAX as f64 {
        u128::MAX
    } else {
        x.floor() as u128
    }
}

/// Embedding lower bounds for a tree in `F`: `(formula, constructive, gate)`.
fn greedy_embedding_bounds(f: &Hypergraph, cert: &HypertreeCert) -> Result<(f64, u128, bool, f64)> {
    let k = f.k();
    let n = f.n();
    let s = cert.vertex_count();
    let t = cert.len();
    let a = f.len() as f64 / binom(n as u64, k as u64 - 1) as f64;
    let kf = factorial(k as u64) as f64;
    let gate = a >= 8.0 * s as f64 * kf;
    let formula = if gate { (a / (8.0 * kf)).powi(t as i32) * (n as f64).powi(s as i32 - t as i32) } else { 0.0 };
    if f.is_empty() {
        return Ok((formula, 0, gate, a));
    }
    let g = clean_min_degree(f)?;
    let mut lo = vec![g.len() as u128; k + 1];
    let mut hi = vec![1u128; k + 1];
    for i in 1..k {
        lo[i] = g.proper_min_degree(i)? as u128;
        hi[i] = g.max_degree(i)? as u128;
    }
    let mut total = g.len() as u128 * factorial(k as u64);
    let mut placed = k;
    for i in 1..t {
        let l = cert.attach(i).len();
        let blocked = (placed - l) as u128 * hi[l + 1];
        let good = lo[l].saturating_sub(blocked);
        total = total.saturating_mul(good).saturating_mul(factorial((k - l) as u64));
        placed += k - l;
    }
    Ok((formula, total, gate, a))
}

/// Lower bound on copies of a hypertree via greedy extension, with the
/// exact count when the oracle finishes.
pub fn greedy_embed_count(f: &Hypergraph, cert: &HypertreeCert) -> Result<CopyCount> {
    let (formula, constructive, gate, a) = greedy_embedding_bounds(f, cert)?;
    let aut = automorphism_count(&cert.host)?;
    let emb = to_u128(formula).max(constructive);
    let exact = count_embeddings_tree(f, cert, DEFAULT_BUDGET).ok().map(|e| e / aut);
    Ok(CopyCount {
        exact,
        lower_bound: ceil_div(emb, aut),
        unit: CountUnit::Copies,
        provenance: Provenance {
            source: BoundSource::Greedy,
            a,
            s: cert.vertex_count(),
            t: cert.len(),
            gamma: None,
            eps: None,
            hypothesis_met: gate,
            formula,
            constructive: constructive as f64,
            note: format!("|Aut(H)| = {aut}"),
        },
    })
}

/// Restricted embeddings of a 2-contractible tree into a type-1
/// super-homogeneous family: expansion vertices land outside the base parts.
pub fn type1_embed_count(p: &PartitionedFamily, cert: &HypertreeCert, s: usize) -> Result<CopyCount> {
    let cert = match cert.expansion {
        Some(_) => cert.clone(),
        None => cert.clone().with_expansion()?,
    };
    cert.validate()?;
    let v_h = cert.vertex_count();
    if s < v_h {
        return Err(Error::Precondition(format!("s = {s} is below v(H) = {v_h}")));
    }
    if p.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mi = delta::verify_super_homogeneous(p, s).map_err(|e| Error::Precondition(e.to_string()))?;
    let k = p.k();
    let base = delta::type1_base(&mi, k)
        .ok_or_else(|| Error::Precondition(format!("MI {} contains no 2^B with |B| = k-2", mi.display())))?;
    let exact = restricted_count(p, &cert, base, DEFAULT_BUDGET).ok();
    let n = p.family.n() as f64;
    let m = p.len() as f64;
    let t = cert.len();
    let mut product = m;
    for i in 1..t {
        let l = cert.attach(i).len() as i32;
        product *= m / (2.0 * k as f64 * s as f64 * n.powi(l));
    }
    let eps = m / n.powi(k as i32 - 1);
    let formula = (eps / (2.0 * (k * s) as f64)).powi(t as i32) * n.powi(v_h as i32 - t as i32);
    Ok(CopyCount {
        exact,
        lower_bound: to_u128(product),
        unit: CountUnit::RestrictedEmbeddings,
        provenance: Provenance {
            source: BoundSource::Type1,
            a: p.len() as f64 / binom(p.family.n() as u64, k as u64 - 1) as f64,
            s: v_h,
            t,
            gamma: None,
            eps: Some(eps),
            hypothesis_met: true,
            formula,
            constructive: product,
            note: format!("base parts {}, diversity s = {s}", delta::pattern_string(base)),
        },
    })
}

struct PartRule<'a> {
    p: &'a PartitionedFamily,
    expansion: Vec<bool>,
    base: delta::Pattern,
    count: u128,
}

impl SearchControl for PartRule<'_> {
    fn vertex_ok(&self, hv: usize, v: Vertex) -> bool {
        !self.expansion[hv] || self.p.part_of(v).is_some_and(|q| self.base >> q & 1 == 0)
    }
    fn leaf(&mut self, _: &[Vertex], _: &[usize]) -> ControlFlow<()> {
        self.count += 1;
        ControlFlow::Continue(())
    }
}

fn expansion_mask(search: &TreeSearch, cert: &HypertreeCert) -> Vec<bool> {
    let exp: HashSet<Vertex> = cert.expansion.iter().flatten().flatten().copied().collect();
    search.h_vertices().iter().map(|v| exp.contains(v)).collect()
}

fn restricted_count(p: &PartitionedFamily, cert: &HypertreeCert, base: delta::Pattern, budget: u64) -> Result<u128> {
    let search = TreeSearch::new(&p.family, cert);
    let mut rule = PartRule { p, expansion: expansion_mask(&search, cert), base, count: 0 };
    search.run(&mut rule, None, budget)?;
    Ok(rule.count)
}

/// `H - R` for the least minimum cross-cut `R`, with the inherited order.
pub fn contract_cross_cut(cert: &HypertreeCert) -> Result<(HypertreeCert, VertexSet)> {
    let cut = hypertree::cross_cut(&cert.host)?;
    let h = &cert.host;
    let residues = h.remove_vertices_multiset(&cut.witness)?;
    let hp = Hypergraph::from_sets(h.k() - 1, h.n(), residues.clone());
    if hp.len() != h.len() {
        return Err(Error::Precondition("contracting the cross-cut merges edges".into()));
    }
    let order = cert.order.iter().map(|&e| hp.index_of(&residues[e]).unwrap()).collect();
    let c = HypertreeCert { host: hp, order, parent: cert.parent.clone(), expansion: None };
    c.validate()?;
    Ok((c, cut.witness))
}

/// Intersection of the links of the vertices of `S` in `F`, as a
/// `(k-1)`-graph.
pub fn common_link(f: &Hypergraph, s: &[Vertex]) -> Hypergraph {
    let mut acc: Option<HashSet<VertexSet>> = None;
    for &v in s {
        let l: HashSet<VertexSet> = f.link(&VertexSet::from([v])).into_iter().collect();
        acc = Some(match acc {
            None => l,
            Some(a) => a.intersection(&l).cloned().collect(),
        });
    }
    Hypergraph::from_sets(f.k() - 1, f.n(), acc.unwrap_or_default().into_iter().collect())
}

/// `max(v(H), 2k)`: the diversity parameter used by the pipelines.
pub fn pipeline_s(cert: &HypertreeCert) -> usize {
    cert.vertex_count().max(2 * cert.host.k())
}

/// Supersaturation lower bound for a 2-contractible tree in a family of
/// density `a >= sigma - 1 + gamma`.
pub fn supersaturation_count(f: &Hypergraph, cert: &HypertreeCert, gamma: f64) -> Result<CopyCount> {
    let k = f.k();
    let n = f.n();
    let h = &cert.host;
    let sigma = hypertree::cross_cut(h)?.sigma;
    let bk = binom(n as u64, k as u64 - 1) as f64;
    let a = f.len() as f64 / bk;
    if gamma <= 0.0 || a < sigma as f64 - 1.0 + gamma {
        return Err(Error::Precondition(format!("density {a:.4} below sigma - 1 + gamma = {:.4}", sigma as f64 - 1.0 + gamma)));
    }
    let v_h = cert.vertex_count();
    if a >= 8.0 * v_h as f64 * factorial(k as u64) as f64 {
        let mut c = greedy_embed_count(f, cert)?;
        c.provenance.gamma = Some(gamma);
        return Ok(c);
    }
    let cert = match cert.expansion {
        Some(_) => cert.clone(),
        None => cert.clone().with_expansion()?,
    };
    let aut = automorphism_count(h)?;
    let eps = gamma / (4.0 * sigma as f64);
    let s = pipeline_s(&cert);
    let exact = count_embeddings_tree(f, &cert, DEFAULT_BUDGET).ok().map(|e| e / aut);
    let rep = delta::dichotomy(f, s, eps)?;
    let base_prov = |source, formula: f64, constructive: f64, note: String| Provenance {
        source,
        a,
        s: v_h,
        t: cert.len(),
        gamma: Some(gamma),
        eps: Some(eps),
        hypothesis_met: false,
        formula,
        constructive,
        note,
    };
    match rep.outcome {
        DichotomyOutcome::Type1 { family, .. } => {
            let c = type1_embed_count(&family, &cert, s)?;
            let lb = c.lower_bound;
            Ok(CopyCount {
                exact,
                lower_bound: ceil_div(lb, aut),
                unit: CountUnit::Copies,
                provenance: base_prov(BoundSource::Type1, c.provenance.formula, lb as f64, format!("type-1 piece of {} edges", family.len())),
            })
        }
        DichotomyOutcome::Type2 { w, fpp, .. } => {
            let (hp, _r) = contract_cross_cut(&cert)?;
            let sp = hp.vertex_count();
            let good_bar = 8.0 * sp as f64 * factorial(k as u64 - 1) as f64 * binom(n as u64, k as u64 - 2) as f64;
            let wv = w.as_slice();
            let mut total: u128 = 0;
            let mut formula = 0.0;
            let mut good = 0;
            for sidx in crate::combinatorics::combinations(wv.len(), sigma) {
                let sv: Vec<Vertex> = sidx.iter().map(|&i| wv[i]).collect();
                let l = common_link(&fpp, &sv);
                if l.is_empty() {
                    continue;
                }
                if l.len() as f64 >= good_bar {
                    good += 1;
                }
                let (fm, cons, _, _) = greedy_embedding_bounds(&l, &hp)?;
                formula += fm * factorial(sigma as u64) as f64;
                total = total.saturating_add(cons.saturating_mul(factorial(sigma as u64)));
            }
            let emb = total.max(to_u128(formula));
            Ok(CopyCount {
                exact,
                lower_bound: ceil_div(emb, aut),
                unit: CountUnit::Copies,
                provenance: base_prov(BoundSource::CrossCut, formula, total as f64, format!("|W| = {}, good S = {good}, |F''| = {}", w.len(), fpp.len())),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypertree::tree_cert;

    fn h(k: usize, n: usize, edges: &[&[u32]]) -> Hypergraph {
        Hypergraph::new(k, n, edges.iter().map(|e| e.to_vec())).unwrap()
    }

    fn copies(f: &Hypergraph, hh: &Hypergraph) -> u128 {
        count_copies_exact(f, hh).unwrap().copies
    }

    #[test]
    fn single_edge_counts_edges() {
        let f = Hypergraph::complete(6, 3);
        assert_eq!(copies(&f, &h(3, 3, &[&[0, 1, 2]])), 20);
    }

    #[test]
    fn disjoint_pairs() {
        let f = Hypergraph::complete(6, 3);
        let m = h(3, 6, &[&[0, 1, 2], &[3, 4, 5]]);
        // complementary pairs of triples
        assert_eq!(copies(&f, &m), 10);
    }

    #[test]
    fn shared_pair_in_k5() {
        let f = Hypergraph::complete(5, 3);
        let hh = h(3, 4, &[&[0, 1, 2], &[0, 1, 3]]);
        let expect: usize = f.degree_map(2).values().map(|&d| d * (d - 1) / 2).sum();
        assert_eq!(copies(&f, &hh), expect as u128);
        assert_eq!(expect, 30);
    }

    #[test]
    fn tree_and_generic_agree() {
        let f = Hypergraph::complete(7, 3);
        let hh = h(3, 7, &[&[0, 1, 2], &[2, 3, 4], &[4, 5, 6]]);
        let cert = tree_cert(&hh).unwrap();
        let a = count_embeddings_tree(&f, &cert, DEFAULT_BUDGET).unwrap();
        let b = count_embeddings_generic(&f, &hh, DEFAULT_BUDGET).unwrap();
        assert_eq!(a, b);
        assert_eq!(automorphism_count(&hh).unwrap(), 8);
    }

    #[test]
    fn budget_is_reported() {
        let f = Hypergraph::complete(8, 3);
        let hh = h(3, 7, &[&[0, 1, 2], &[2, 3, 4], &[4, 5, 6]]);
        assert!(matches!(count_copies_budget(&f, &hh, 10), Err(Error::TooLarge(_))));
    }

    #[test]
    fn cleaning_complete_is_identity() {
        let f = Hypergraph::complete(7, 3);
        assert_eq!(clean_min_degree(&f).unwrap(), f);
    }

    #[test]
    fn cleaning_drops_pendant() {
        let mut edges: Vec<Vec<u32>> = crate::combinatorics::combinations(10, 3)
            .map(|c| c.into_iter().map(|x| x as u32).collect())
            .collect();
        edges.push(vec![10, 11, 12]);
        let f = Hypergraph::new(3, 13, edges).unwrap();
        let g = clean_min_degree(&f).unwrap();
        assert!(!g.contains_edge(&VertexSet::from([10, 11, 12])));
        assert_eq!(g.len(), 120);
    }

    #[test]
    fn greedy_bound_below_exact() {
        let f = Hypergraph::complete(10, 4);
        let hh = h(4, 6, &[&[0, 1, 2, 3], &[0, 1, 4, 5]]);
        let c = greedy_embed_count(&f, &tree_cert(&hh).unwrap()).unwrap();
        assert!(!c.provenance.hypothesis_met);
        assert!(c.lower_bound <= c.exact.unwrap());
        assert!(c.lower_bound > 0);
    }

    #[test]
    fn covering_tree_contains_cycle() {
        let t = hypertree::covering_tree(5, 4).unwrap();
        let c = hypertree::linear_cycle(5, 4).unwrap();
        let e = find_embedding(&t, &c).unwrap().unwrap();
        assert!(e.verify(&t, &c));
    }

    #[test]
    fn cross_cut_contraction() {
        let t = hypertree::covering_tree(5, 3).unwrap();
        let (hp, r) = contract_cross_cut(&tree_cert(&t).unwrap()).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(hp.host.k(), 4);
    }
}
