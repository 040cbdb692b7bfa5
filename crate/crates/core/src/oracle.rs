//! Brute-force ground truth: maximum and number of `H`-free subgraphs, and
//! the extremal construction `L`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::binom;
use crate::embed::{copy_edge_sets, DEFAULT_BUDGET};
use crate::{Error, Hypergraph, Result};

/// Hosts up to this many edges are handled with `u128` masks.
pub const MASK_LIMIT: usize = 128;

/// Every copy of `H` in a host, as bit masks over the host's edge indices.
#[derive(Clone, Debug)]
pub struct CopyMasks {
    universe: usize,
    copies: Vec<u128>,
    by_edge: Vec<Vec<usize>>,
}

fn bit(i: usize) -> u128 {
    1u128 << i
}

fn bits(m: u128) -> impl Iterator<Item = usize> {
    (0..128).filter(move |&i| m >> i & 1 == 1)
}

impl CopyMasks {
    pub fn new(host: &Hypergraph, h: &Hypergraph) -> Result<Self> {
        if host.len() > MASK_LIMIT {
            return Err(Error::TooLarge(format!("{} host edges exceed the mask limit {MASK_LIMIT}", host.len())));
        }
        let sets = copy_edge_sets(host, h, DEFAULT_BUDGET)?;
        Ok(Self::from_sets(host.len(), &sets))
    }

    pub fn from_sets(universe: usize, sets: &[Vec<usize>]) -> Self {
        let copies: Vec<u128> = sets.iter().map(|c| c.iter().fold(0, |m, &e| m | bit(e))).collect();
        let mut by_edge = vec![Vec::new(); universe];
        for (i, c) in sets.iter().enumerate() {
            for &e in c {
                by_edge[e].push(i);
            }
        }
        CopyMasks { universe, copies, by_edge }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    pub fn masks(&self) -> &[u128] {
        &self.copies
    }

    pub fn copies_through(&self, e: usize) -> impl Iterator<Item = u128> + '_ {
        self.by_edge[e].iter().map(|&i| self.copies[i])
    }

    /// No copy lies inside `set`.
    pub fn is_free(&self, set: u128) -> bool {
        self.copies.iter().all(|&c| c & !set != 0)
    }

    /// `set ∪ {e}` contains a copy through `e`.
    pub fn completes(&self, set: u128, e: usize) -> bool {
        let s = set | bit(e);
        self.copies_through(e).any(|c| c & !s == 0)
    }
}

/// A largest `H`-free subgraph of a host.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeMax {
    pub size: usize,
    /// Host edge indices of the witness.
    pub witness: Vec<usize>,
    /// Set only when the search finished within its node budget.
    pub optimal: bool,
    pub nodes: u64,
}

struct MaxSearch<'a> {
    m: &'a CopyMasks,
    order: Vec<usize>,
    best: u128,
    best_size: usize,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl MaxSearch<'_> {
    /// Copies that still constrain `und` and are pairwise disjoint there.
    fn packing(&self, inc: u128, und: u128) -> usize {
        let mut used = 0u128;
        let mut p = 0;
        for &c in &self.m.copies {
            let rest = c & und;
            if rest != 0 && c & !(inc | und) == 0 && rest & used == 0 {
                used |= rest;
                p += 1;
            }
        }
        p
    }

    fn rec(&mut self, inc: u128, und: u128) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let have = inc.count_ones() as usize;
        if have > self.best_size {
            self.best = inc;
            self.best_size = have;
        }
        if und == 0 {
            return;
        }
        if have + und.count_ones() as usize - self.packing(inc, und) <= self.best_size {
            return;
        }
        let v = *self.order.iter().find(|&&v| und >> v & 1 == 1).unwrap();
        let und2 = und & !bit(v);
        if !self.m.completes(inc, v) {
            let inc2 = inc | bit(v);
            let mut forced = und2;
            for c in self.m.copies_through(v) {
                let missing = c & !inc2;
                if missing.count_ones() == 1 && missing & forced != 0 {
                    forced &= !missing;
                }
            }
            self.rec(inc2, forced);
        }
        self.rec(inc, und2);
    }
}

/// Maximum `H`-free subgraph of `host` by branch and bound.
pub fn max_free(host: &Hypergraph, h: &Hypergraph, budget: u64) -> Result<FreeMax> {
    let m = CopyMasks::new(host, h)?;
    Ok(max_free_masks(&m, budget))
}

pub fn max_free_masks(m: &CopyMasks, budget: u64) -> FreeMax {
    let n = m.universe;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&e| (m.by_edge[e].len(), e));
    // greedy start: fewest copies first
    let mut greedy = 0u128;
    for &e in &order {
        if !m.completes(greedy, e) {
            greedy |= bit(e);
        }
    }
    let all = if n == 128 { u128::MAX } else { bit(n) - 1 };
    let mut s = MaxSearch { m, order, best: greedy, best_size: greedy.count_ones() as usize, nodes: 0, budget, exhausted: false };
    s.rec(0, all);
    FreeMax { size: s.best_size, witness: bits(s.best).collect(), optimal: !s.exhausted, nodes: s.nodes }
}

/// Number of `H`-free subgraphs of `host` (including the empty one).
pub fn count_free(host: &Hypergraph, h: &Hypergraph) -> Result<BigUint> {
    let m = CopyMasks::new(host, h)?;
    Ok(count_free_masks(&m))
}

pub fn count_free_masks(m: &CopyMasks) -> BigUint {
    let n = m.universe;
    let all = if n == 128 { u128::MAX } else { bit(n) - 1 };
    count_rec(all, m.copies.clone())
}

/// Subsets `X` of `und` avoiding every constraint (a constraint is the part
/// of a copy still undecided; the rest is already included).
fn count_rec(und: u128, cons: Vec<u128>) -> BigUint {
    if cons.iter().any(|&c| c == 0) {
        return BigUint::zero();
    }
    let cons = minimal(cons);
    let touched = cons.iter().fold(0u128, |a, &c| a | c);
    let free = (und & !touched).count_ones();
    let mut total = BigUint::one() << free as usize;
    for (verts, group) in components(touched, &cons) {
        total *= count_component(verts, group);
        if total.is_zero() {
            break;
        }
    }
    total
}

fn count_component(und: u128, cons: Vec<u128>) -> BigUint {
    // branch on the vertex in most constraints
    let v = bits(und).max_by_key(|&v| (cons.iter().filter(|&&c| c >> v & 1 == 1).count(), std::cmp::Reverse(v))).unwrap();
    let rest = und & !bit(v);
    let without: Vec<u128> = cons.iter().copied().filter(|&c| c >> v & 1 == 0).collect();
    let with: Vec<u128> = cons.iter().map(|&c| c & !bit(v)).collect();
    count_rec(rest, without) + count_rec(rest, with)
}

/// Drops constraints that contain another one.
fn minimal(mut cons: Vec<u128>) -> Vec<u128> {
    cons.sort_by_key(|c| (c.count_ones(), *c));
    cons.dedup();
    let mut out: Vec<u128> = Vec::with_capacity(cons.len());
    for c in cons {
        if !out.iter().any(|&d| d & !c == 0) {
            out.push(c);
        }
    }
    out
}

fn components(touched: u128, cons: &[u128]) -> Vec<(u128, Vec<u128>)> {
    let mut left = touched;
    let mut out = Vec::new();
    while left != 0 {
        let mut comp = left & left.wrapping_neg();
        loop {
            let grown = cons.iter().filter(|&&c| c & comp != 0).fold(comp, |a, &c| a | c);
            if grown == comp {
                break;
            }
            comp = grown;
        }
        left &= !comp;
        out.push((comp, cons.iter().copied().filter(|&c| c & comp != 0).collect()));
    }
    out
}

/// `log2` of a big integer; `-inf` for zero.
pub fn log2_big(x: &BigUint) -> f64 {
    let b = x.bits();
    if b == 0 {
        return f64::NEG_INFINITY;
    }
    if b <= 53 {
        return (x.iter_u64_digits().next().unwrap_or(0) as f64).log2();
    }
    let shift = b - 53;
    let top: BigUint = x >> shift as usize;
    (top.iter_u64_digits().next().unwrap() as f64).log2() + shift as f64
}

/// The `H`-free construction: k-sets meeting `{0,…,σ-2}` in exactly one vertex.
pub fn lower_construction(n: usize, k: usize, sigma: usize) -> Result<Hypergraph> {
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let head = sigma.saturating_sub(1).min(n) as u32;
    let rest: Vec<u32> = (head..n as u32).collect();
    let mut edges = Vec::new();
    for i in 0..head {
        for c in crate::combinatorics::combinations(rest.len(), k - 1) {
            let mut e: Vec<u32> = c.iter().map(|&j| rest[j]).collect();
            e.push(i);
            edges.push(e);
        }
    }
    let l = Hypergraph::new(k, n, edges)?;
    debug_assert_eq!(l.len() as u128, head as u128 * binom((n - head as usize) as u64, k as u64 - 1));
    Ok(l)
}

/// Exact values for `K_n^(k)` and `H`.
#[derive(Clone, Debug)]
pub struct ExtremalReport {
    pub n: usize,
    pub k: usize,
    pub h_id: String,
    pub ex: usize,
    pub optimal: bool,
    pub witness: Hypergraph,
    pub forb: Option<BigUint>,
    pub normalized_ex: f64,
    pub forb_log2: Option<f64>,
}

/// Largest `H`-free k-graph on `n` vertices.
pub fn ex_exact(n: usize, k: usize, h: &Hypergraph, budget: u64) -> Result<(usize, Hypergraph, bool)> {
    let full = Hypergraph::complete(n, k);
    let r = max_free(&full, h, budget)?;
    let witness = full.subfamily(r.witness.iter().copied());
    Ok((r.size, witness, r.optimal))
}

/// Number of labelled `H`-free k-graphs on `n` vertices.
pub fn forb_exact(n: usize, k: usize, h: &Hypergraph) -> Result<BigUint> {
    count_free(&Hypergraph::complete(n, k), h)
}

/// Hosts with at most this many edges get an exact `forb`.
pub const FORB_LIMIT: usize = 40;

pub fn extremal_report(n: usize, k: usize, h: &Hypergraph, h_id: &str, with_forb: bool) -> Result<ExtremalReport> {
    let (ex, witness, optimal) = ex_exact(n, k, h, DEFAULT_BUDGET)?;
    let forb = if with_forb { Some(forb_exact(n, k, h)?) } else { None };
    let norm = binom(n as u64, k as u64 - 1) as f64;
    let forb_log2 = forb.as_ref().map(|f| log2_big(f) / norm);
    Ok(ExtremalReport { n, k, h_id: h_id.to_string(), ex, optimal, witness, forb, normalized_ex: ex as f64 / norm, forb_log2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::count_copies_exact;

    fn shared_pair() -> Hypergraph {
        Hypergraph::new(4, 6, vec![vec![0, 1, 2, 3], vec![0, 1, 4, 5]]).unwrap()
    }

    fn disjoint(k: usize) -> Hypergraph {
        let a: Vec<u32> = (0..k as u32).collect();
        let b: Vec<u32> = (k as u32..2 * k as u32).collect();
        Hypergraph::new(k, 2 * k, vec![a, b]).unwrap()
    }

    /// Plain enumeration of all subsets, for cross-checking.
    fn brute(host: &Hypergraph, h: &Hypergraph) -> (usize, u64) {
        let m = CopyMasks::new(host, h).unwrap();
        let mut best = 0;
        let mut count = 0;
        for s in 0u128..(1 << host.len()) {
            if m.is_free(s) {
                count += 1;
                best = best.max(s.count_ones() as usize);
            }
        }
        (best, count)
    }

    #[test]
    fn matching_of_two_edges_in_k4() {
        let (ex, w, opt) = ex_exact(4, 2, &disjoint(2), 1 << 30).unwrap();
        assert_eq!(ex, 3);
        assert!(opt);
        assert_eq!(count_copies_exact(&w, &disjoint(2)).unwrap().copies, 0);
    }

    #[test]
    fn too_big_pattern_leaves_everything() {
        let (ex, _, _) = ex_exact(6, 4, &disjoint(4), 1 << 30).unwrap();
        assert_eq!(ex, 15);
        assert_eq!(forb_exact(6, 4, &disjoint(4)).unwrap(), BigUint::one() << 15usize);
    }

    #[test]
    fn agrees_with_enumeration() {
        let full = Hypergraph::complete(6, 4);
        let (b, c) = brute(&full, &shared_pair());
        assert_eq!(max_free(&full, &shared_pair(), 1 << 30).unwrap().size, b);
        assert_eq!(count_free(&full, &shared_pair()).unwrap(), BigUint::from(c));
        let full = Hypergraph::complete(5, 3);
        let h = Hypergraph::new(3, 5, vec![vec![0, 1, 2], vec![0, 3, 4]]).unwrap();
        let (b, c) = brute(&full, &h);
        assert_eq!(max_free(&full, &h, 1 << 30).unwrap().size, b);
        assert_eq!(count_free(&full, &h).unwrap(), BigUint::from(c));
    }

    #[test]
    fn shared_pair_values_on_six() {
        // complements of the edges form an intersecting graph on 6 vertices
        assert_eq!(ex_exact(6, 4, &shared_pair(), 1 << 30).unwrap().0, 5);
        assert_eq!(forb_exact(6, 4, &shared_pair()).unwrap(), BigUint::from(SHARED_PAIR_FORB_6));
    }

    /// Intersecting graphs on 6 labelled vertices: empty, 15 single edges,
    /// stars and triangles.
    const SHARED_PAIR_FORB_6: u64 = 1 + 15 + 6 * (binom_u(5, 2) + binom_u(5, 3) + binom_u(5, 4) + binom_u(5, 5)) + 20;

    const fn binom_u(n: u64, k: u64) -> u64 {
        let mut r = 1;
        let mut i = 0;
        while i < k {
            r = r * (n - i) / (i + 1);
            i += 1;
        }
        r
    }

    #[test]
    fn construction_sizes() {
        assert!(lower_construction(8, 4, 1).unwrap().is_empty());
        let l = lower_construction(8, 4, 2).unwrap();
        assert_eq!(l.len(), 35);
        assert_eq!(count_copies_exact(&l, &disjoint(4)).unwrap().copies, 0);
    }

    #[test]
    fn forb_at_least_two_to_ex() {
        let h = shared_pair();
        let (ex, _, _) = ex_exact(6, 4, &h, 1 << 30).unwrap();
        assert!(forb_exact(6, 4, &h).unwrap() >= BigUint::one() << ex);
    }

    #[test]
    fn big_log2() {
        let x = BigUint::one() << 200usize;
        assert!((log2_big(&x) - 200.0).abs() < 1e-12);
        assert!((log2_big(&BigUint::from(8u32)) - 3.0).abs() < 1e-12);
    }
}
