//! Hypertree recognition and construction: tree-defining orders,
//! contractibility, overlap, cross-cuts, linear cycles and a covering tree.
//!
//! Recognition peels leaf edges greedily. An edge is a leaf when its trace on
//! the other remaining edges lies inside one of them; this is the classical
//! ear-removal procedure for acyclic hypergraphs, whose reductions are
//! confluent (removing one ear never destroys another ear), so a greedy
//! failure is a genuine negative. Families of at most eight edges are
//! re-checked by exhaustive ordering search anyway.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Hypergraph, Result, Vertex, VertexSet};

/// Families up to this many edges get an exhaustive re-check of negatives.
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// A tree-defining order of a hypertree with parent pointers.
///
/// `order[i]` is an edge index of `host`; `parent[i]` is a position `j < i`
/// with `E_i ∩ (E_0 ∪ … ∪ E_{i-1}) = E_i ∩ E_j` (positions are 0-based).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypertreeCert {
    pub host: Hypergraph,
    pub order: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    /// Per position, designated degree-1 vertices (at least two each).
    pub expansion: Option<Vec<Vec<Vertex>>>,
}

impl HypertreeCert {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Edge at position `i` of the order.
    pub fn edge(&self, i: usize) -> &VertexSet {
        self.host.edge(self.order[i])
    }

    /// `E_i ∩ E_parent(i)`, empty for the first edge.
    pub fn attach(&self, i: usize) -> VertexSet {
        match self.parent[i] {
            Some(p) => self.edge(i).intersection(self.edge(p)),
            None => VertexSet::empty(),
        }
    }

    /// Checks both certificate invariants by direct set computation.
    pub fn validate(&self) -> Result<()> {
        let t = self.host.len();
        let mut seen = self.order.clone();
        seen.sort_unstable();
        if seen != (0..t).collect::<Vec<_>>() || self.parent.len() != t {
            return Err(Error::Verification("order is not a permutation of the edges".into()));
        }
        let mut covered = VertexSet::empty();
        for i in 0..t {
            let e = self.edge(i);
            let trace = e.intersection(&covered);
            match self.parent[i] {
                None if i == 0 => {}
                Some(p) if p < i => {
                    if trace != e.intersection(self.edge(p)) {
                        return Err(Error::Verification(format!(
                            "edge at position {i} meets earlier edges outside its parent"
                        )));
                    }
                }
                _ => return Err(Error::Verification(format!("bad parent at position {i}"))),
            }
            covered = covered.union(e);
        }
        if let Some(exp) = &self.expansion {
            let deg = vertex_degrees(&self.host);
            if exp.len() != t {
                return Err(Error::Verification("expansion list count".into()));
            }
            for (i, lst) in exp.iter().enumerate() {
                if lst.len() < 2 || lst.iter().any(|v| !self.edge(i).contains(*v) || deg[v] != 1) {
                    return Err(Error::Verification(format!(
                        "expansion vertices of position {i} are not degree-1 vertices of the edge"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Designates the two smallest degree-1 vertices of every edge.
    pub fn with_expansion(mut self) -> Result<Self> {
        let deg = vertex_degrees(&self.host);
        let mut exp = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let ones: Vec<Vertex> = self.edge(i).iter().filter(|v| deg[v] == 1).take(2).collect();
            if ones.len() < 2 {
                return Err(Error::Precondition("hypertree is not 2-contractible".into()));
            }
            exp.push(ones);
        }
        self.expansion = Some(exp);
        Ok(self)
    }

    /// Number of vertices of `H` derived from the certificate.
    pub fn vertex_count(&self) -> usize {
        (0..self.len()).map(|i| self.edge(i).len() - self.attach(i).len()).sum()
    }

    /// A k-partition of V(H) obtained by propagating labels along the order.
    pub fn k_partition(&self) -> Result<HashMap<Vertex, usize>> {
        let k = self.host.k();
        let mut part: HashMap<Vertex, usize> = HashMap::new();
        for i in 0..self.len() {
            let e = self.edge(i);
            let used: Vec<usize> = e.iter().filter_map(|v| part.get(&v).copied()).collect();
            let mut free = (0..k).filter(|p| !used.contains(p));
            for v in e.iter() {
                if !part.contains_key(&v) {
                    let p = free.next().ok_or_else(|| Error::Verification("labels exhausted".into()))?;
                    part.insert(v, p);
                }
            }
        }
        for e in self.host.edges() {
            let mut ps: Vec<usize> = e.iter().map(|v| part[&v]).collect();
            ps.sort_unstable();
            ps.dedup();
            if ps.len() != k {
                return Err(Error::Verification(format!("edge {e:?} repeats a part")));
            }
        }
        Ok(part)
    }
}

/// Summary numbers of a hypertree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeProfile {
    pub s: usize,
    pub t: usize,
    pub ell: usize,
    pub sigma: usize,
}

pub fn profile(cert: &HypertreeCert) -> Result<TreeProfile> {
    Ok(TreeProfile {
        s: cert.vertex_count(),
        t: cert.len(),
        ell: overlap(&cert.host),
        sigma: cross_cut(&cert.host)?.sigma,
    })
}

pub(crate) fn vertex_degrees(h: &Hypergraph) -> HashMap<Vertex, usize> {
    let mut deg = HashMap::new();
    for e in h.edges() {
        for v in e.iter() {
            *deg.entry(v).or_insert(0) += 1;
        }
    }
    deg
}

/// A tree-defining order, or `None` when `H` is not a hypertree.
pub fn find_tree_order(h: &Hypergraph) -> Result<Option<HypertreeCert>> {
    if h.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if let Some(c) = greedy_peel(h) {
        c.validate()?;
        return Ok(Some(c));
    }
    if h.len() <= EXHAUSTIVE_LIMIT {
        if let Some(c) = exhaustive_order(h) {
            c.validate()?;
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Like [`find_tree_order`] but a negative is an error.
pub fn tree_cert(h: &Hypergraph) -> Result<HypertreeCert> {
    find_tree_order(h)?.ok_or(Error::NotHypertree)
}

fn greedy_peel(h: &Hypergraph) -> Option<HypertreeCert> {
    let t = h.len();
    let mut alive = vec![true; t];
    let mut peeled: Vec<(usize, usize)> = Vec::new();
    for _ in 1..t {
        let mut found = None;
        'edges: for e in (0..t).filter(|&e| alive[e]) {
            let edge = h.edge(e);
            let mut trace = VertexSet::empty();
            for f in (0..t).filter(|&f| alive[f] && f != e) {
                trace = trace.union(&edge.intersection(h.edge(f)));
            }
            for f in (0..t).filter(|&f| alive[f] && f != e) {
                if trace.is_subset(h.edge(f)) {
                    found = Some((e, f));
                    break 'edges;
                }
            }
        }
        let (e, f) = found?;
        alive[e] = false;
        peeled.push((e, f));
    }
    let root = (0..t).find(|&e| alive[e])?;
    let mut order = vec![root];
    order.extend(peeled.iter().rev().map(|&(e, _)| e));
    let pos: HashMap<usize, usize> = order.iter().enumerate().map(|(p, &e)| (e, p)).collect();
    let mut parent = vec![None; t];
    for &(e, f) in &peeled {
        parent[pos[&e]] = Some(pos[&f]);
    }
    Some(HypertreeCert { host: h.clone(), order, parent, expansion: None })
}

fn exhaustive_order(h: &Hypergraph) -> Option<HypertreeCert> {
    fn rec(h: &Hypergraph, order: &mut Vec<usize>, parent: &mut Vec<Option<usize>>, used: &mut [bool]) -> bool {
        if order.len() == h.len() {
            return true;
        }
        let covered: VertexSet = order.iter().flat_map(|&e| h.edge(e).iter()).collect();
        for e in 0..h.len() {
            if used[e] {
                continue;
            }
            let trace = h.edge(e).intersection(&covered);
            let par = if order.is_empty() {
                Some(None)
            } else {
                order.iter().position(|&f| trace.is_subset(h.edge(f))).map(Some)
            };
            if let Some(p) = par {
                used[e] = true;
                order.push(e);
                parent.push(p);
                if rec(h, order, parent, used) {
                    return true;
                }
                used[e] = false;
                order.pop();
                parent.pop();
            }
        }
        false
    }
    let mut order = Vec::new();
    let mut parent = Vec::new();
    let mut used = vec![false; h.len()];
    rec(h, &mut order, &mut parent, &mut used)
        .then(|| HypertreeCert { host: h.clone(), order, parent, expansion: None })
}

/// Degree-1 vertices of every edge, by edge index.
pub fn degree_one_vertices(h: &Hypergraph) -> Vec<Vec<Vertex>> {
    let deg = vertex_degrees(h);
    h.edges().iter().map(|e| e.iter().filter(|v| deg[v] == 1).collect()).collect()
}

/// Whether every edge has at least `t` degree-1 vertices, with the lists.
pub fn is_t_contractible(h: &Hypergraph, t: usize) -> Result<(bool, Vec<Vec<Vertex>>)> {
    if t == 0 || t >= h.k() {
        return Err(Error::Parameter(format!("t={t} outside 1..={}", h.k() - 1)));
    }
    let w = degree_one_vertices(h);
    Ok((w.iter().all(|l| l.len() >= t), w))
}

/// Largest pairwise intersection; 0 for a single edge.
pub fn overlap(h: &Hypergraph) -> usize {
    let e = h.edges();
    let mut best = 0;
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            best = best.max(e[i].intersection_len(&e[j]));
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCut {
    pub sigma: usize,
    /// Lexicographically least optimal cross-cut.
    pub witness: VertexSet,
}

/// Minimum set meeting every edge in exactly one vertex.
pub fn cross_cut(h: &Hypergraph) -> Result<CrossCut> {
    if h.is_empty() {
        return Ok(CrossCut { sigma: 0, witness: VertexSet::empty() });
    }
    let inc = {
        let mut m: HashMap<Vertex, Vec<usize>> = HashMap::new();
        for (i, e) in h.edges().iter().enumerate() {
            for v in e.iter() {
                m.entry(v).or_default().push(i);
            }
        }
        m
    };
    for target in 1..=h.len() {
        let mut hits = vec![0u8; h.len()];
        let mut chosen = Vec::new();
        let mut best: Option<Vec<Vertex>> = None;
        search_cut(h, &inc, target, 0, &mut hits, &mut chosen, &mut best);
        if let Some(b) = best {
            return Ok(CrossCut { sigma: target, witness: VertexSet::new(b) });
        }
    }
    Err(Error::NoCrossCut)
}

fn search_cut(
    h: &Hypergraph,
    inc: &HashMap<Vertex, Vec<usize>>,
    target: usize,
    from: usize,
    hits: &mut Vec<u8>,
    chosen: &mut Vec<Vertex>,
    best: &mut Option<Vec<Vertex>>,
) {
    let Some(i) = (from..h.len()).find(|&i| hits[i] == 0) else {
        let mut s = chosen.clone();
        s.sort_unstable();
        if best.as_ref().map_or(true, |b| s < *b) {
            *best = Some(s);
        }
        return;
    };
    if chosen.len() == target {
        return;
    }
    for v in h.edge(i).iter() {
        let es = &inc[&v];
        if es.iter().any(|&e| hits[e] != 0) {
            continue;
        }
        for &e in es {
            hits[e] += 1;
        }
        chosen.push(v);
        search_cut(h, inc, target, i + 1, hits, chosen, best);
        chosen.pop();
        for &e in es {
            hits[e] -= 1;
        }
    }
}

/// The k-uniform linear cycle of length `ell`: cycle vertex `c_i = i(k-1)`,
/// edge `i` is `{c_i, …, c_i + k - 2, c_{i+1}}`.
pub fn linear_cycle(k: usize, ell: usize) -> Result<Hypergraph> {
    if k < 3 || ell < 3 {
        return Err(Error::Parameter(format!("linear cycle needs k >= 3 and ell >= 3, got k={k}, ell={ell}")));
    }
    let n = ell * (k - 1);
    let edges = (0..ell).map(|i| {
        let base = (i * (k - 1)) as Vertex;
        let mut e: Vec<Vertex> = (0..(k - 1) as Vertex).map(|j| base + j).collect();
        e.push((((i + 1) * (k - 1)) % n) as Vertex);
        e
    });
    Hypergraph::new(k, n, edges)
}

/// A 2-contractible k-tree containing the linear cycle `C_ell` with the same
/// cross-cut number. The cycle is triangulated by a fan from `c_0`: fan edge
/// `j` holds `c_0, c_j, c_{j+1}` plus `k - 3` fresh vertices.
pub fn covering_tree(k: usize, ell: usize) -> Result<Hypergraph> {
    if k < 5 || ell < 3 {
        return Err(Error::Parameter(format!("covering tree needs k >= 5 and ell >= 3, got k={k}, ell={ell}")));
    }
    let cycle = linear_cycle(k, ell)?;
    let c = |i: usize| (i * (k - 1)) as Vertex;
    let mut next = (ell * (k - 1)) as Vertex;
    let mut edges: Vec<Vec<Vertex>> = cycle.edges().iter().map(|e| e.as_slice().to_vec()).collect();
    for j in 1..ell - 1 {
        let mut e = vec![c(0), c(j), c(j + 1)];
        for _ in 0..k - 3 {
            e.push(next);
            next += 1;
        }
        edges.push(e);
    }
    Hypergraph::new(k, next as usize, edges)
}
