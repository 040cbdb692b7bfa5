//! Canonical k-uniform hypergraphs and the basic shadow, link and degree
//! primitives.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Vertex = u32;

/// A sorted, duplicate-free set of vertex ids.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new(mut v: Vec<Vertex>) -> Self {
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    /// Wraps a vector the caller guarantees is strictly increasing.
    pub fn from_sorted(v: Vec<Vertex>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        VertexSet(v)
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        is_sorted_subset(&self.0, &other.0)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.iter().copied().filter(|v| other.contains(*v)).collect())
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        let (mut i, mut j, mut c) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    c += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        c
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.iter().copied().filter(|v| !other.contains(*v)).collect())
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        VertexSet::new(v)
    }

    pub fn with(&self, x: Vertex) -> VertexSet {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&x) {
            v.insert(pos, x);
        }
        VertexSet(v)
    }

    /// All subsets of the given size, lexicographic.
    pub fn subsets_of_size(&self, r: usize) -> impl Iterator<Item = VertexSet> + '_ {
        crate::combinatorics::combinations(self.len(), r)
            .map(move |idx| VertexSet(idx.into_iter().map(|i| self.0[i]).collect()))
    }
}

pub(crate) fn is_sorted_subset(a: &[Vertex], b: &[Vertex]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl From<Vec<Vertex>> for VertexSet {
    fn from(v: Vec<Vertex>) -> Self {
        VertexSet::new(v)
    }
}

impl<const N: usize> From<[Vertex; N]> for VertexSet {
    fn from(v: [Vertex; N]) -> Self {
        VertexSet::new(v.to_vec())
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(it: I) -> Self {
        VertexSet::new(it.into_iter().collect())
    }
}

/// A k-uniform hypergraph on the universe `0..n` with canonically ordered
/// edges. Equality ignores `n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Hypergraph {
    k: usize,
    n: usize,
    edges: Vec<VertexSet>,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.edges == other.edges
    }
}

impl Eq for Hypergraph {}

impl Hypergraph {
    /// Builds a hypergraph, validating every edge. Duplicate edges collapse.
    pub fn new<E, I>(k: usize, n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: Into<Vec<Vertex>>,
    {
        let mut out = Vec::new();
        for e in edges {
            out.push(check_edge(k, n, e.into())?);
        }
        out.sort();
        out.dedup();
        Ok(Hypergraph { k, n, edges: out })
    }

    /// Like [`Hypergraph::new`] but a repeated edge is an error.
    pub fn new_strict<E, I>(k: usize, n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: Into<Vec<Vertex>>,
    {
        let mut out = Vec::new();
        for e in edges {
            out.push(check_edge(k, n, e.into())?);
        }
        out.sort();
        if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].as_slice().to_vec()));
        }
        Ok(Hypergraph { k, n, edges: out })
    }

    pub(crate) fn from_canonical(k: usize, n: usize, edges: Vec<VertexSet>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|e| e.len() == k));
        Hypergraph { k, n, edges }
    }

    /// Builds from already validated sets in any order, collapsing repeats.
    pub(crate) fn from_sets(k: usize, n: usize, mut edges: Vec<VertexSet>) -> Self {
        edges.sort();
        edges.dedup();
        Hypergraph::from_canonical(k, n, edges)
    }

    pub fn empty(k: usize, n: usize) -> Self {
        Hypergraph { k, n, edges: Vec::new() }
    }

    /// The complete k-graph on `0..n`.
    pub fn complete(n: usize, k: usize) -> Self {
        let edges = crate::combinatorics::combinations(n, k)
            .map(|c| VertexSet(c.into_iter().map(|v| v as Vertex).collect()))
            .collect();
        Hypergraph { k, n, edges }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[VertexSet] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &VertexSet {
        &self.edges[i]
    }

    pub fn index_of(&self, e: &VertexSet) -> Option<usize> {
        self.edges.binary_search(e).ok()
    }

    pub fn contains_edge(&self, e: &VertexSet) -> bool {
        self.index_of(e).is_some()
    }

    /// Same edges on a larger (or smaller) universe.
    pub fn with_universe(&self, n: usize) -> Result<Self> {
        if let Some(v) = self.edges.iter().flat_map(|e| e.iter()).find(|&v| v as usize >= n) {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        Ok(Hypergraph { n, ..self.clone() })
    }

    /// Subfamily given by edge indices.
    pub fn subfamily(&self, idx: impl IntoIterator<Item = usize>) -> Hypergraph {
        Hypergraph::from_sets(self.k, self.n, idx.into_iter().map(|i| self.edges[i].clone()).collect())
    }

    /// Edges of `self` not in `other`.
    pub fn minus(&self, other: &Hypergraph) -> Hypergraph {
        let edges = self
            .edges
            .iter()
            .filter(|e| !other.contains_edge(e))
            .cloned()
            .collect();
        Hypergraph::from_canonical(self.k, self.n, edges)
    }

    /// V(F): vertices covered by at least one edge.
    pub fn vertices(&self) -> VertexSet {
        self.edges.iter().flat_map(|e| e.iter()).collect()
    }

    /// The i-shadow: all i-sets inside some edge.
    pub fn shadow(&self, i: usize) -> Result<Vec<VertexSet>> {
        if i > self.k {
            return Err(Error::ShadowRange { i, k: self.k });
        }
        let mut out = BTreeSet::new();
        for e in &self.edges {
            for s in e.subsets_of_size(i) {
                out.insert(s);
            }
        }
        Ok(out.into_iter().collect())
    }

    /// `{E \ D : D ⊆ E ∈ F}`; contains the empty set when `D` is an edge.
    pub fn link(&self, d: &VertexSet) -> Vec<VertexSet> {
        let mut out: Vec<VertexSet> = self
            .edges
            .iter()
            .filter(|e| d.is_subset(e))
            .map(|e| e.difference(d))
            .collect();
        out.sort();
        out
    }

    pub fn degree(&self, d: &VertexSet) -> usize {
        self.edges.iter().filter(|e| d.is_subset(e)).count()
    }

    /// Degrees of every member of the i-shadow.
    pub fn degree_map(&self, i: usize) -> HashMap<VertexSet, usize> {
        let mut m = HashMap::new();
        for e in &self.edges {
            for s in e.subsets_of_size(i) {
                *m.entry(s).or_insert(0) += 1;
            }
        }
        m
    }

    /// Δ_i: maximum degree of an i-set (0 for an empty family).
    pub fn max_degree(&self, i: usize) -> Result<usize> {
        self.check_degree_index(i)?;
        Ok(self.degree_map(i).into_values().max().unwrap_or(0))
    }

    /// δ_i: minimum degree over i-sets that lie in some edge.
    pub fn proper_min_degree(&self, i: usize) -> Result<usize> {
        self.check_degree_index(i)?;
        self.degree_map(i).into_values().min().ok_or(Error::EmptyFamily)
    }

    fn check_degree_index(&self, i: usize) -> Result<()> {
        if i == 0 || i >= self.k {
            return Err(Error::DegreeRange { i, max: self.k.saturating_sub(1) });
        }
        Ok(())
    }

    /// `F - S` with duplicate residues collapsed. Every edge must lose the
    /// same number of vertices.
    pub fn remove_vertices(&self, s: &VertexSet) -> Result<Hypergraph> {
        let (k, edges) = self.contract(s)?;
        Ok(Hypergraph::from_sets(k, self.n, edges))
    }

    /// `F - S` keeping one residue per edge, in edge order.
    pub fn remove_vertices_multiset(&self, s: &VertexSet) -> Result<Vec<VertexSet>> {
        Ok(self.contract(s)?.1)
    }

    fn contract(&self, s: &VertexSet) -> Result<(usize, Vec<VertexSet>)> {
        let mut lost = None;
        let mut out = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let r = e.difference(s);
            let l = e.len() - r.len();
            match lost {
                None => lost = Some(l),
                Some(x) if x != l => return Err(Error::NonUniformContraction),
                _ => {}
            }
            out.push(r);
        }
        Ok((self.k - lost.unwrap_or(0), out))
    }

    /// Vertex to incident edge indices, indexed by vertex id.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            for v in e.iter() {
                inc[v as usize].push(i);
            }
        }
        inc
    }
}

fn check_edge(k: usize, n: usize, mut e: Vec<Vertex>) -> Result<VertexSet> {
    if let Some(&v) = e.iter().find(|&&v| v as usize >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    let raw = e.clone();
    e.sort_unstable();
    let before = e.len();
    e.dedup();
    if e.len() != before {
        return Err(Error::RepeatedVertex(raw));
    }
    if e.len() != k {
        return Err(Error::EdgeSize { got: e.len(), edge: raw, k });
    }
    Ok(VertexSet(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs<const N: usize>(v: [u32; N]) -> VertexSet {
        VertexSet::from(v)
    }

    fn h(k: usize, n: usize, edges: &[&[u32]]) -> Hypergraph {
        Hypergraph::new(k, n, edges.iter().map(|e| e.to_vec())).unwrap()
    }

    #[test]
    fn shadow_of_single_edge() {
        let f = h(3, 3, &[&[0, 1, 2]]);
        assert_eq!(f.shadow(2).unwrap(), vec![vs([0, 1]), vs([0, 2]), vs([1, 2])]);
        assert_eq!(f.shadow(0).unwrap(), vec![VertexSet::empty()]);
        assert!(Hypergraph::empty(3, 3).shadow(0).unwrap().is_empty());
        assert!(f.shadow(4).is_err());
    }

    #[test]
    fn shadow_of_k4_graph() {
        let f = Hypergraph::complete(4, 2);
        assert_eq!(f.len(), 6);
        assert_eq!(f.shadow(1).unwrap().len(), 4);
    }

    #[test]
    fn links() {
        let f = h(3, 4, &[&[0, 1, 2]]);
        assert_eq!(f.link(&vs([0, 1])), vec![vs([2])]);
        assert_eq!(f.link(&vs([0, 1, 2])), vec![VertexSet::empty()]);
        let g = h(3, 4, &[&[0, 1, 2], &[0, 1, 3]]);
        assert_eq!(g.link(&vs([0, 1])), vec![vs([2]), vs([3])]);
    }

    #[test]
    fn degrees() {
        let g = h(3, 4, &[&[0, 1, 2], &[0, 1, 3]]);
        assert_eq!(g.degree(&vs([0])), 2);
        assert_eq!(g.degree(&vs([2, 3])), 0);
        assert_eq!(Hypergraph::complete(5, 3).degree(&vs([0, 1])), 3);
    }

    #[test]
    fn max_and_min_degree() {
        let f = h(3, 3, &[&[0, 1, 2]]);
        assert_eq!(f.max_degree(1).unwrap(), 1);
        assert_eq!(f.proper_min_degree(1).unwrap(), 1);
        let g = h(3, 5, &[&[0, 1, 2], &[0, 3, 4]]);
        assert_eq!(g.max_degree(1).unwrap(), 2);
        assert_eq!(g.proper_min_degree(1).unwrap(), 1);
        assert_eq!(Hypergraph::complete(6, 4).proper_min_degree(2).unwrap(), 6);
        assert_eq!(Hypergraph::empty(3, 4).proper_min_degree(1), Err(Error::EmptyFamily));
        assert!(f.max_degree(3).is_err());
    }

    #[test]
    fn contraction() {
        let f = h(3, 3, &[&[0, 1, 2]]);
        assert_eq!(f.remove_vertices(&vs([0])).unwrap(), h(2, 3, &[&[1, 2]]));
        let g = h(3, 7, &[&[0, 5, 6], &[1, 5, 6]]);
        let r = g.remove_vertices(&vs([0, 1])).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.edges()[0], vs([5, 6]));
        assert_eq!(g.remove_vertices_multiset(&vs([0, 1])).unwrap().len(), 2);
        let bad = h(3, 6, &[&[0, 1, 2], &[3, 4, 5]]);
        assert_eq!(bad.remove_vertices(&vs([0])), Err(Error::NonUniformContraction));
    }

    #[test]
    fn validation() {
        assert!(matches!(Hypergraph::new(3, 4, vec![vec![0, 1]]), Err(Error::EdgeSize { .. })));
        assert!(matches!(Hypergraph::new(2, 4, vec![vec![1, 1]]), Err(Error::RepeatedVertex(_))));
        assert!(matches!(Hypergraph::new(2, 4, vec![vec![1, 9]]), Err(Error::VertexOutOfRange { .. })));
        assert!(matches!(
            Hypergraph::new_strict(2, 4, vec![vec![1, 2], vec![2, 1]]),
            Err(Error::DuplicateEdge(_))
        ));
    }

    #[test]
    fn equality_ignores_universe() {
        let a = h(2, 4, &[&[0, 1]]);
        let b = h(2, 9, &[&[1, 0]]);
        assert_eq!(a, b);
    }
}
