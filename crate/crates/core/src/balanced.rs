//! Graded collections of copies of `H`: saturation, admissibility, the
//! forbidden extension sets `Z_K(S)`, and the builders that grow a maximal
//! admissible collection.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binom, floor_tol};
use crate::delta::{self, DichotomyOutcome, PartitionedFamily};
use crate::embed::{self, Embedding, SearchControl, TreeSearch, DEFAULT_BUDGET};
use crate::hypertree::{self, HypertreeCert};
use crate::{Error, Hypergraph, Result, Vertex, VertexSet};

/// A copy of `H`: its host edge indices (sorted) and the embedding found.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Copy {
    pub edges: Vec<usize>,
    pub embedding: Embedding,
}

/// A t-uniform hypergraph on the edge indices of a host `F` whose edges are
/// copies of `H`.
#[derive(Clone, Debug)]
pub struct CopyCollection {
    host: Hypergraph,
    h: Hypergraph,
    t: usize,
    d: f64,
    ell: usize,
    copies: Vec<Copy>,
    deg: HashMap<Vec<usize>, u64>,
    by_edge: HashMap<usize, Vec<usize>>,
}

/// Result of [`CopyCollection::admissibility`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub s: Vec<usize>,
    pub saturated_subsets: Vec<Vec<usize>>,
    pub admissible: bool,
    /// `Z_K(S)`; left empty when `S` is not admissible.
    pub z: Vec<usize>,
}

fn nonempty_subsets(s: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << s.len()) {
        if mask.count_ones() as usize <= max {
            out.push((0..s.len()).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect());
        }
    }
    out
}

impl CopyCollection {
    pub fn new(host: Hypergraph, h: Hypergraph, d: f64, ell: usize) -> Self {
        let t = h.len();
        CopyCollection { host, h, t, d, ell, copies: Vec::new(), deg: HashMap::new(), by_edge: HashMap::new() }
    }

    pub fn host(&self) -> &Hypergraph {
        &self.host
    }

    pub fn pattern(&self) -> &Hypergraph {
        &self.h
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    pub fn copies(&self) -> &[Copy] {
        &self.copies
    }

    /// `floor(d^j)`, saturating.
    pub fn threshold(&self, j: usize) -> u64 {
        let x = floor_tol(self.d.powi(j as i32));
        if x >= u64::MAX as f64 {
            u64::MAX
        } else {
            x as u64
        }
    }

    /// `d_K(S)` for a set of edge indices.
    pub fn degree(&self, s: &[usize]) -> u64 {
        let mut key = s.to_vec();
        key.sort_unstable();
        self.deg.get(&key).copied().unwrap_or(0)
    }

    pub fn contains_copy(&self, edges: &[usize]) -> bool {
        edges.len() == self.t && self.degree(edges) > 0
    }

    /// Adds a copy, updating all subset degrees.
    pub fn insert(&mut self, mut copy: Copy) -> Result<()> {
        copy.edges.sort_unstable();
        copy.edges.dedup();
        if copy.edges.len() != self.t {
            return Err(Error::Precondition(format!("copy has {} distinct edges, expected {}", copy.edges.len(), self.t)));
        }
        if self.contains_copy(&copy.edges) {
            return Err(Error::Precondition("copy already present".into()));
        }
        for sub in nonempty_subsets(&copy.edges, self.t) {
            *self.deg.entry(sub).or_insert(0) += 1;
        }
        let idx = self.copies.len();
        for &e in &copy.edges {
            self.by_edge.entry(e).or_default().push(idx);
        }
        self.copies.push(copy);
        Ok(())
    }

    /// `S` (with `1 <= |S| <= t`) has degree equal to `floor(d^(t-|S|))`.
    pub fn is_saturated(&self, s: &[usize]) -> bool {
        !s.is_empty() && s.len() <= self.t && self.degree(s) == self.threshold(self.t - s.len())
    }

    pub fn is_admissible(&self, s: &[usize]) -> bool {
        nonempty_subsets(s, self.t).iter().all(|d| !self.is_saturated(d))
    }

    /// Checks `d_K(S) <= d^(t-|S|)` for every `S` inside some copy, returning
    /// the first violation in sorted order.
    pub fn is_d_graded(&self) -> (bool, Option<Vec<usize>>) {
        let mut keys: Vec<&Vec<usize>> = self.deg.keys().collect();
        keys.sort();
        for s in keys {
            let bound = self.d.powi((self.t - s.len()) as i32);
            if self.deg[s] as f64 > bound + 1e-9 {
                return (false, Some(s.clone()));
            }
        }
        (true, None)
    }

    /// Saturated subsets of `S`, admissibility and `Z_K(S)`.
    pub fn admissibility(&self, s: &[usize]) -> AdmissibilityReport {
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        let saturated_subsets: Vec<Vec<usize>> =
            nonempty_subsets(&s, self.t).into_iter().filter(|d| self.is_saturated(d)).collect();
        let admissible = saturated_subsets.is_empty();
        let z = if admissible { self.z_set(&s) } else { Vec::new() };
        AdmissibilityReport { s, saturated_subsets, admissible, z }
    }

    /// `{v ∉ S : S ∪ {v} inadmissible, {v} not saturated}` for admissible `S`.
    pub fn z_set(&self, s: &[usize]) -> Vec<usize> {
        let mut out: HashSet<usize> = HashSet::new();
        for d in nonempty_subsets(s, self.t.saturating_sub(1)) {
            let thr = self.threshold(self.t - d.len() - 1);
            if thr == 0 {
                // every v with d_K(D ∪ {v}) = 0 saturates D ∪ {v}
                for v in 0..self.host.len() {
                    if !s.contains(&v) && self.degree(&with(&d, v)) == 0 {
                        out.insert(v);
                    }
                }
                continue;
            }
            let pivot = *d.iter().min_by_key(|e| self.by_edge.get(e).map_or(0, |v| v.len())).unwrap();
            let mut cand: HashSet<usize> = HashSet::new();
            for &ci in self.by_edge.get(&pivot).map(|v| v.as_slice()).unwrap_or(&[]) {
                let c = &self.copies[ci].edges;
                if d.iter().all(|x| c.contains(x)) {
                    cand.extend(c.iter().copied().filter(|v| !s.contains(v)));
                }
            }
            for v in cand {
                if self.degree(&with(&d, v)) == thr {
                    out.insert(v);
                }
            }
        }
        let mut z: Vec<usize> = out.into_iter().filter(|&v| !self.is_saturated(&[v])).collect();
        z.sort_unstable();
        z
    }

    /// Edges whose singleton is saturated.
    pub fn heavy_edges(&self) -> Result<Vec<usize>> {
        let thr = self.threshold(self.t - 1);
        let heavy: Vec<usize> = (0..self.host.len()).filter(|&e| self.degree(&[e]) == thr).collect();
        if (heavy.len() as u128) * thr as u128 > (self.t * self.len()) as u128 {
            return Err(Error::Verification("more heavy edges than the copy count allows".into()));
        }
        Ok(heavy)
    }

    /// Δ_b(K): largest degree of a b-set of host edges.
    pub fn max_codegree(&self, b: usize) -> u64 {
        self.deg.iter().filter(|(k, _)| k.len() == b).map(|(_, &v)| v).max().unwrap_or(0)
    }

    /// `τ(F) = binom(n,k-1) / (|F| n^(k-ℓ-1))`.
    pub fn tau(&self) -> f64 {
        tau(&self.host, self.ell)
    }

    /// Copies as edge-index lists, the t-graph handed to the container engine.
    pub fn edge_lists(&self) -> Vec<Vec<usize>> {
        self.copies.iter().map(|c| c.edges.clone()).collect()
    }
}

fn sorted(x: &[usize]) -> Vec<usize> {
    let mut v = x.to_vec();
    v.sort_unstable();
    v
}

fn with(d: &[usize], v: usize) -> Vec<usize> {
    let mut x = d.to_vec();
    x.push(v);
    x.sort_unstable();
    x
}

pub fn tau(host: &Hypergraph, ell: usize) -> f64 {
    let k = host.k();
    let n = host.n() as f64;
    binom(host.n() as u64, k as u64 - 1) as f64 / (host.len() as f64 * n.powi((k - ell - 1) as i32))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaContract {
    pub holds: bool,
    pub minimal_c: f64,
    pub tau: f64,
    /// `(b, Δ_b, Δ_b |F| / (τ^(b-1) |K|))` per `b`.
    pub per_b: Vec<(usize, u64, f64)>,
}

/// Checks `Δ_b(K) <= c τ^(b-1) |K| / |F|` for `1 <= b <= t`.
pub fn verify_delta_contract(k: &CopyCollection, c: f64) -> DeltaContract {
    let tau = k.tau();
    if k.is_empty() {
        return DeltaContract { holds: true, minimal_c: 0.0, tau, per_b: Vec::new() };
    }
    let f = k.host.len() as f64;
    let per_b: Vec<(usize, u64, f64)> = (1..=k.t)
        .map(|b| {
            let db = k.max_codegree(b);
            (b, db, db as f64 * f / (tau.powi(b as i32 - 1) * k.len() as f64))
        })
        .collect();
    let minimal_c = per_b.iter().map(|x| x.2).fold(0.0, f64::max);
    DeltaContract { holds: minimal_c <= c * (1.0 + 1e-12), minimal_c, tau, per_b }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BuildMode {
    /// Grading `d = β a n^(k-ℓ-1)`.
    Dense { a: f64 },
    /// Grading `d = β n^(k-ℓ-1)`, copies found through the dichotomy.
    NearThreshold { gamma: f64 },
}

#[derive(Clone, Debug)]
pub struct BalancedReport {
    pub collection: CopyCollection,
    pub mode: BuildMode,
    pub d: f64,
    /// Size the construction aims for, reported only.
    pub target: f64,
    /// Copies found by the constructive step.
    pub mechanism_copies: usize,
    /// Copies added by the final completion sweep.
    pub sweep_copies: usize,
    /// Number of `Z_K(S)` computations checked against `t 2^(t+1) d`.
    pub z_checks: usize,
    /// Largest observed `|Z_K(S)| / (t 2^(t+1) d)`.
    pub max_z_ratio: f64,
    pub dichotomy_runs: usize,
}

/// Builds a maximal admissible collection of copies of the 2-contractible
/// tree `H` in `F`.
///
/// Copies are first produced by the constructive step (Dense: cleaning and
/// greedy extension avoiding `Z_K`; NearThreshold: heavy-edge removal, then
/// the dichotomy and a type-1 or cross-cut extension). When that step fails,
/// one depth-first sweep over all embeddings in tree order adds every copy
/// still admissible, which makes the collection maximal outright.
pub fn build_balanced_collection(f: &Hypergraph, cert: &HypertreeCert, beta: f64, mode: BuildMode) -> Result<BalancedReport> {
    if beta <= 0.0 {
        return Err(Error::Parameter("beta must be positive".into()));
    }
    let h = &cert.host;
    if h.k() != f.k() {
        return Err(Error::Parameter("H and F have different uniformity".into()));
    }
    let cert = cert.clone().with_expansion()?;
    let k = f.k();
    let n = f.n() as f64;
    let ell = hypertree::overlap(h);
    let t = h.len();
    let base = n.powi((k - ell - 1) as i32);
    let (d, target) = match mode {
        BuildMode::Dense { a } => {
            if a <= 0.0 {
                return Err(Error::Parameter("a must be positive".into()));
            }
            let d = beta * a * base;
            (d, beta * a * n.powi(k as i32 - 1) * d.powi(t as i32 - 1))
        }
        BuildMode::NearThreshold { gamma } => {
            if !(gamma > 0.0 && gamma < 1.0) {
                return Err(Error::Parameter("gamma must lie in (0,1)".into()));
            }
            let d = beta * base;
            (d, beta * n.powi(k as i32 - 1) * d.powi(t as i32 - 1))
        }
    };
    let mut kc = CopyCollection::new(f.clone(), h.clone(), d, ell);
    let mut b = Builder { z_checks: 0, max_z_ratio: 0.0, dichotomy_runs: 0, cache: HashMap::new() };
    let mut mechanism_copies = 0;
    if !f.is_empty() {
        loop {
            let found = match mode {
                BuildMode::Dense { .. } => b.dense_step(&kc, &cert)?,
                BuildMode::NearThreshold { gamma } => b.near_step(&kc, &cert, gamma)?,
            };
            match found {
                Some(c) => {
                    kc.insert(c)?;
                    mechanism_copies += 1;
                }
                None => break,
            }
        }
    }
    let before = kc.len();
    sweep(&mut kc, &cert, true)?;
    let sweep_copies = kc.len() - before;
    if sweep(&mut kc, &cert, false)? > 0 {
        return Err(Error::Verification("an admissible copy survived the completion sweep".into()));
    }
    if let (false, Some(s)) = kc.is_d_graded() {
        return Err(Error::Verification(format!("collection is not d-graded at {s:?}")));
    }
    for c in kc.copies() {
        if !c.embedding.verify(f, h) {
            return Err(Error::Verification("a stored copy does not re-verify".into()));
        }
    }
    Ok(BalancedReport {
        collection: kc,
        mode,
        d,
        target,
        mechanism_copies,
        sweep_copies,
        z_checks: b.z_checks,
        max_z_ratio: b.max_z_ratio,
        dichotomy_runs: b.dichotomy_runs,
    })
}

type CachedOutcome = Option<(DichotomyOutcome, usize)>;

struct Builder {
    z_checks: usize,
    max_z_ratio: f64,
    dichotomy_runs: usize,
    cache: HashMap<Vec<usize>, CachedOutcome>,
}

impl Builder {
    fn check_z(&mut self, kc: &CopyCollection, s: &[usize]) -> Result<Vec<usize>> {
        let z = kc.z_set(s);
        if kc.d >= 1.0 {
            let bound = kc.t as f64 * 2f64.powi(kc.t as i32 + 1) * kc.d;
            self.z_checks += 1;
            self.max_z_ratio = self.max_z_ratio.max(z.len() as f64 / bound);
            if z.len() as f64 > bound {
                return Err(Error::Verification(format!("|Z_K(S)| = {} exceeds t 2^(t+1) d = {bound}", z.len())));
            }
        }
        Ok(z)
    }

    /// Host minus heavy edges, with the index map back into the host.
    fn light_part(kc: &CopyCollection) -> Result<(Hypergraph, Vec<usize>)> {
        let heavy: HashSet<usize> = kc.heavy_edges()?.into_iter().collect();
        let keep: Vec<usize> = (0..kc.host.len()).filter(|e| !heavy.contains(e)).collect();
        Ok((kc.host.subfamily(keep.iter().copied()), keep))
    }

    fn dense_step(&mut self, kc: &CopyCollection, cert: &HypertreeCert) -> Result<Option<Copy>> {
        let (light, _) = Self::light_part(kc)?;
        if light.is_empty() {
            return Ok(None);
        }
        let clean = embed::clean_min_degree(&light)?;
        let to_host: Vec<usize> = clean.edges().iter().map(|e| kc.host.index_of(e).unwrap()).collect();
        let search = TreeSearch::new(&clean, cert);
        let mut ctl = Avoid { kc, builder: self, to_host: &to_host, vertex_rule: None, found: None, err: None, z_cache: HashMap::new() };
        search.run(&mut ctl, None, DEFAULT_BUDGET)?;
        if let Some(e) = ctl.err.take() {
            return Err(e);
        }
        Ok(ctl.found.take().map(|(map, chosen)| make_copy(&search, &map, &chosen, &to_host)))
    }

    fn near_step(&mut self, kc: &CopyCollection, cert: &HypertreeCert, gamma: f64) -> Result<Option<Copy>> {
        let (light, keep) = Self::light_part(kc)?;
        if light.is_empty() {
            return Ok(None);
        }
        let heavy_key: Vec<usize> = (0..kc.host.len()).filter(|e| keep.binary_search(e).is_err()).collect();
        if !self.cache.contains_key(&heavy_key) {
            let sigma = hypertree::cross_cut(&cert.host)?.sigma;
            let s = embed::pipeline_s(cert);
            self.dichotomy_runs += 1;
            let out = match delta::dichotomy(&light, s, gamma / (4.0 * sigma as f64)) {
                Ok(r) => Some((r.outcome, sigma)),
                Err(Error::DichotomyInconclusive { .. }) => None,
                Err(e) => return Err(e),
            };
            self.cache.insert(heavy_key.clone(), out);
        }
        let Some((outcome, sigma)) = self.cache[&heavy_key].clone() else {
            return Ok(None);
        };
        match outcome {
            DichotomyOutcome::Type1 { family, base, .. } => self.type1_step(kc, cert, &family, base),
            DichotomyOutcome::Type2 { w, fpp, .. } => self.cross_cut_step(kc, cert, &w, &fpp, sigma),
        }
    }

    fn type1_step(&mut self, kc: &CopyCollection, cert: &HypertreeCert, p: &PartitionedFamily, base: delta::Pattern) -> Result<Option<Copy>> {
        let to_host: Vec<usize> = p.family.edges().iter().map(|e| kc.host.index_of(e).unwrap()).collect();
        let search = TreeSearch::new(&p.family, cert);
        let exp: HashSet<Vertex> = cert.expansion.iter().flatten().flatten().copied().collect();
        let rule: Vec<bool> = search.h_vertices().iter().map(|v| exp.contains(v)).collect();
        let vertex_rule = move |hv: usize, v: Vertex| !rule[hv] || p.part_of(v).is_some_and(|q| base >> q & 1 == 0);
        let mut ctl = Avoid { kc, builder: self, to_host: &to_host, vertex_rule: Some(&vertex_rule), found: None, err: None, z_cache: HashMap::new() };
        search.run(&mut ctl, None, DEFAULT_BUDGET)?;
        if let Some(e) = ctl.err.take() {
            return Err(e);
        }
        Ok(ctl.found.take().map(|(map, chosen)| make_copy(&search, &map, &chosen, &to_host)))
    }

    fn cross_cut_step(&mut self, kc: &CopyCollection, cert: &HypertreeCert, w: &VertexSet, fpp: &Hypergraph, sigma: usize) -> Result<Option<Copy>> {
        let (hp, r) = embed::contract_cross_cut(cert)?;
        let wv = w.as_slice();
        let mut cands: Vec<(usize, Vec<Vertex>, Hypergraph)> = crate::combinatorics::combinations(wv.len(), sigma)
            .map(|idx| {
                let s: Vec<Vertex> = idx.iter().map(|&i| wv[i]).collect();
                let l = embed::common_link(fpp, &s);
                (l.len(), s, l)
            })
            .filter(|c| c.0 > 0)
            .collect();
        cands.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        let rv: Vec<Vertex> = r.into_vec();
        // which H' edge (by position) came from which cut vertex
        let cut_of_pos: Vec<usize> = (0..cert.len())
            .map(|i| rv.iter().position(|&x| cert.edge(i).contains(x)).unwrap())
            .collect();
        for (_, s, l) in cands {
            let clean = embed::clean_min_degree(&l)?;
            // host index of D ∪ {g(r)} for each (edge of L', position)
            let full_edge = |e: usize, pos: usize| -> usize {
                let full = clean.edge(e).with(s[cut_of_pos[pos]]);
                kc.host.index_of(&full).expect("common-link edges extend to host edges")
            };
            let search = TreeSearch::new(&clean, &hp);
            let mut ctl = CrossAvoid { kc, builder: self, full_edge: &full_edge, found: None, err: None };
            search.run(&mut ctl, None, DEFAULT_BUDGET)?;
            if let Some(e) = ctl.err.take() {
                return Err(e);
            }
            if let Some((map, chosen)) = ctl.found.take() {
                let mut pairs: Vec<(Vertex, Vertex)> = search.h_vertices().iter().copied().zip(map).collect();
                pairs.extend(rv.iter().copied().zip(s.iter().copied()));
                pairs.sort_unstable();
                let mut host_edges = vec![0; cert.len()];
                for (pos, &e) in chosen.iter().enumerate() {
                    host_edges[cert.order[pos]] = full_edge(e, pos);
                }
                let mut edges = host_edges.clone();
                edges.sort_unstable();
                return Ok(Some(Copy { edges, embedding: Embedding { map: pairs, host_edges } }));
            }
        }
        Ok(None)
    }
}

fn make_copy(search: &TreeSearch, map: &[Vertex], chosen: &[usize], to_host: &[usize]) -> Copy {
    let host_chosen: Vec<usize> = chosen.iter().map(|&e| to_host[e]).collect();
    let embedding = search.to_embedding(map, &host_chosen);
    let mut edges = host_chosen;
    edges.sort_unstable();
    Copy { edges, embedding }
}

/// Extension that keeps the image admissible by avoiding `Z_K`.
struct Avoid<'a, 'b> {
    kc: &'a CopyCollection,
    builder: &'b mut Builder,
    to_host: &'a [usize],
    vertex_rule: Option<&'a dyn Fn(usize, Vertex) -> bool>,
    found: Option<(Vec<Vertex>, Vec<usize>)>,
    err: Option<Error>,
    z_cache: HashMap<Vec<usize>, Vec<usize>>,
}

fn admissible_extension(kc: &CopyCollection, builder: &mut Builder, cache: &mut HashMap<Vec<usize>, Vec<usize>>, err: &mut Option<Error>, s: Vec<usize>, e: usize) -> bool {
    if err.is_some() || s.contains(&e) || kc.is_saturated(&[e]) {
        return false;
    }
    let mut key = s;
    key.sort_unstable();
    if !cache.contains_key(&key) {
        match builder.check_z(kc, &key) {
            Ok(z) => {
                cache.insert(key.clone(), z);
            }
            Err(x) => {
                *err = Some(x);
                return false;
            }
        }
    }
    cache[&key].binary_search(&e).is_err()
}

impl SearchControl for Avoid<'_, '_> {
    fn vertex_ok(&self, hv: usize, v: Vertex) -> bool {
        self.vertex_rule.map_or(true, |r| r(hv, v))
    }
    fn edge_ok(&mut self, _step: usize, edge: usize, chosen: &[usize]) -> bool {
        let s: Vec<usize> = chosen.iter().map(|&c| self.to_host[c]).collect();
        admissible_extension(self.kc, self.builder, &mut self.z_cache, &mut self.err, s, self.to_host[edge])
    }
    fn leaf(&mut self, map: &[Vertex], chosen: &[usize]) -> ControlFlow<()> {
        self.found = Some((map.to_vec(), chosen.to_vec()));
        ControlFlow::Break(())
    }
}

struct CrossAvoid<'a, 'b> {
    kc: &'a CopyCollection,
    builder: &'b mut Builder,
    full_edge: &'a dyn Fn(usize, usize) -> usize,
    found: Option<(Vec<Vertex>, Vec<usize>)>,
    err: Option<Error>,
}

impl SearchControl for CrossAvoid<'_, '_> {
    fn edge_ok(&mut self, step: usize, edge: usize, chosen: &[usize]) -> bool {
        let s: Vec<usize> = chosen.iter().enumerate().map(|(p, &c)| (self.full_edge)(c, p)).collect();
        let mut cache = HashMap::new();
        admissible_extension(self.kc, self.builder, &mut cache, &mut self.err, s, (self.full_edge)(edge, step))
    }
    fn leaf(&mut self, map: &[Vertex], chosen: &[usize]) -> ControlFlow<()> {
        self.found = Some((map.to_vec(), chosen.to_vec()));
        ControlFlow::Break(())
    }
}

/// Walks every embedding in tree order, keeping partial images admissible.
/// With `insert`, each admissible copy reached is added at once; otherwise
/// the walk only counts them.
fn sweep(kc: &mut CopyCollection, cert: &HypertreeCert, insert: bool) -> Result<usize> {
    struct Sweep<'a> {
        kc: &'a mut CopyCollection,
        search: &'a TreeSearch<'a>,
        insert: bool,
        hits: usize,
        err: Option<Error>,
    }
    impl SearchControl for Sweep<'_> {
        fn edge_ok(&mut self, _step: usize, edge: usize, chosen: &[usize]) -> bool {
            if chosen.contains(&edge) || self.kc.is_saturated(&[edge]) {
                return false;
            }
            let mut s = chosen.to_vec();
            s.push(edge);
            s.sort_unstable();
            self.kc.is_admissible(&s)
        }
        fn leaf(&mut self, map: &[Vertex], chosen: &[usize]) -> ControlFlow<()> {
            if self.insert && self.kc.contains_copy(&sorted(chosen)) {
                return ControlFlow::Continue(());
            }
            self.hits += 1;
            if !self.insert {
                return ControlFlow::Break(());
            }
            let mut edges = chosen.to_vec();
            edges.sort_unstable();
            // fresh-vertex permutations revisit the same edge set
            if self.kc.contains_copy(&edges) {
                return ControlFlow::Continue(());
            }
            let embedding = self.search.to_embedding(map, chosen);
            if let Err(e) = self.kc.insert(Copy { edges, embedding }) {
                self.err = Some(e);
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        }
    }
    let host = kc.host.clone();
    let search = TreeSearch::new(&host, cert);
    let mut sw = Sweep { kc, search: &search, insert, hits: 0, err: None };
    search.run(&mut sw, None, DEFAULT_BUDGET)?;
    if let Some(e) = sw.err {
        return Err(e);
    }
    Ok(sw.hits)
}

/// Counts of copies per size of shared edge set, for reports.
pub fn overlap_histogram(kc: &CopyCollection) -> BTreeMap<usize, u64> {
    let mut m = BTreeMap::new();
    for (s, &d) in &kc.deg {
        *m.entry(s.len()).or_insert(0) += d;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypertree::tree_cert;

    fn pair4() -> Hypergraph {
        Hypergraph::new(4, 6, vec![vec![0, 1, 2, 3], vec![0, 1, 4, 5]]).unwrap()
    }

    fn dummy_copy(edges: Vec<usize>) -> Copy {
        Copy { edges, embedding: Embedding { map: Vec::new(), host_edges: Vec::new() } }
    }

    #[test]
    fn empty_collection_is_graded() {
        let kc = CopyCollection::new(Hypergraph::complete(6, 4), pair4(), 0.5, 2);
        assert_eq!(kc.is_d_graded(), (true, None));
        assert!(!kc.is_admissible(&[0, 1]));
        assert!(kc.heavy_edges().unwrap().len() == 15);
        let kc = CopyCollection::new(Hypergraph::complete(6, 4), pair4(), 2.0, 2);
        assert!(kc.heavy_edges().unwrap().is_empty());
        assert_eq!(verify_delta_contract(&kc, 1.0).minimal_c, 0.0);
    }

    #[test]
    fn single_copy_saturates_itself() {
        let mut kc = CopyCollection::new(Hypergraph::complete(6, 4), pair4(), 2.0, 2);
        kc.insert(dummy_copy(vec![0, 1])).unwrap();
        assert!(kc.is_saturated(&[0, 1]));
        assert!(kc.is_d_graded().0);
        assert!(kc.heavy_edges().unwrap().is_empty());
        let rep = kc.admissibility(&[0]);
        assert!(rep.admissible);
        assert_eq!(rep.z, vec![1]);
        let c = verify_delta_contract(&kc, 1e9);
        assert_eq!(c.per_b[0].1, 1);
    }

    #[test]
    fn shared_subset_breaks_grading() {
        let h3 = Hypergraph::new(3, 7, vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 6]]).unwrap();
        let mut kc = CopyCollection::new(Hypergraph::complete(7, 3), h3, 1.0, 1);
        kc.insert(dummy_copy(vec![0, 1, 2])).unwrap();
        kc.insert(dummy_copy(vec![0, 1, 3])).unwrap();
        assert_eq!(kc.is_d_graded(), (false, Some(vec![0])));
    }

    #[test]
    fn builder_on_k9() {
        let f = Hypergraph::complete(9, 4);
        let cert = tree_cert(&pair4()).unwrap();
        let rep = build_balanced_collection(&f, &cert, 0.2, BuildMode::Dense { a: 1.0 }).unwrap();
        assert!(!rep.collection.is_empty());
        assert!(rep.collection.is_d_graded().0);
        assert!(rep.max_z_ratio <= 1.0);
    }

    #[test]
    fn no_copies_no_collection() {
        let f = Hypergraph::new(4, 8, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]).unwrap();
        let cert = tree_cert(&pair4()).unwrap();
        let rep = build_balanced_collection(&f, &cert, 1.0, BuildMode::NearThreshold { gamma: 0.5 }).unwrap();
        assert!(rep.collection.is_empty());
    }
}
