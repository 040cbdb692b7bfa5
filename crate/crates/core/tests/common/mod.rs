//! Seeded instances shared by the integration tests.
#![allow(dead_code)]

use hx_core::combinatorics::binom;
use hx_core::Hypergraph;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 200 random 4-graphs: `n` cycles through 8..=14 and the size sweeps
/// `0.05..=0.8` times `binom(n,3)`.
pub fn corpus() -> Vec<Hypergraph> {
    (0..200)
        .map(|i| {
            let mut r = rng(1000 + i as u64);
            let n = 8 + (i % 7);
            let rho = 0.05 + 0.75 * (i as f64 / 199.0);
            let full = Hypergraph::complete(n, 4);
            let m = ((rho * binom(n as u64, 3) as f64).round() as usize).clamp(1, full.len());
            full.subfamily(sample(&mut r, full.len(), m).into_vec())
        })
        .collect()
}

/// Two k-sets sharing two vertices.
pub fn shared_pair(k: usize) -> Hypergraph {
    let a: Vec<u32> = (0..k as u32).collect();
    let b: Vec<u32> = [0, 1].into_iter().chain(k as u32..2 * k as u32 - 2).collect();
    Hypergraph::new(k, 2 * k - 2, vec![a, b]).unwrap()
}

/// Two disjoint k-sets.
pub fn disjoint_pair(k: usize) -> Hypergraph {
    let a: Vec<u32> = (0..k as u32).collect();
    let b: Vec<u32> = (k as u32..2 * k as u32).collect();
    Hypergraph::new(k, 2 * k, vec![a, b]).unwrap()
}

/// Random hypertree with at most `max_v` vertices, grown by attaching each
/// new edge to a subset of one earlier edge.
pub fn random_tree(k: usize, max_v: usize, r: &mut impl Rng) -> Hypergraph {
    let mut edges: Vec<Vec<u32>> = vec![(0..k as u32).collect()];
    let mut next = k as u32;
    let target = r.gen_range(1..=4);
    while edges.len() < target {
        let l = r.gen_range(0..k);
        if next as usize + (k - l) > max_v {
            break;
        }
        let parent = edges[r.gen_range(0..edges.len())].clone();
        let keep = sample(r, k, l).into_vec();
        let mut e: Vec<u32> = keep.into_iter().map(|i| parent[i]).collect();
        for _ in l..k {
            e.push(next);
            next += 1;
        }
        e.sort_unstable();
        if edges.contains(&e) {
            break;
        }
        edges.push(e);
    }
    Hypergraph::new(k, next as usize, edges).unwrap()
}

/// Random family on `n` vertices with each k-set kept with probability `p`.
pub fn random_family(n: usize, k: usize, p: f64, r: &mut impl Rng) -> Hypergraph {
    let full = Hypergraph::complete(n, k);
    let keep: Vec<usize> = (0..full.len()).filter(|_| r.gen_bool(p)).collect();
    full.subfamily(keep)
}

/// All k-sets of `[n]` meeting `w` in exactly one vertex.
pub fn exactly_once(n: usize, k: usize, w: &[u32]) -> Hypergraph {
    let full = Hypergraph::complete(n, k);
    let keep: Vec<usize> = (0..full.len()).filter(|&i| full.edge(i).iter().filter(|v| w.contains(v)).count() == 1).collect();
    full.subfamily(keep)
}
