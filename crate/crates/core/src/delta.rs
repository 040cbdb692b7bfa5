//! Patterns, projections and the filtering process that extracts
//! s-super-homogeneous k-partite subfamilies, plus the type dichotomy.
//!
//! Parts are 0-based internally and a pattern is a bitmask over parts.
//! [`pattern_string`] renders patterns 1-based for people.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binom, factorial};
use crate::{Error, Hypergraph, Result, Vertex, VertexSet};

pub type Pattern = u32;

pub fn pattern_elems(p: Pattern) -> Vec<usize> {
    (0..32).filter(|i| p >> i & 1 == 1).collect()
}

/// `{1,3}`-style rendering with 1-based parts.
pub fn pattern_string(p: Pattern) -> String {
    let v: Vec<String> = pattern_elems(p).iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", v.join(","))
}

pub fn pattern_from_parts(parts: &[usize]) -> Pattern {
    parts.iter().fold(0, |m, &i| m | 1 << i)
}

fn full(k: usize) -> Pattern {
    (1u32 << k) - 1
}

/// Orders patterns by size, then lexicographically as sorted part lists.
pub fn canonical_cmp(a: &Pattern, b: &Pattern) -> std::cmp::Ordering {
    a.count_ones()
        .cmp(&b.count_ones())
        .then_with(|| pattern_elems(*a).cmp(&pattern_elems(*b)))
}

/// A k-partite family together with its fixed k-partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionedFamily {
    pub family: Hypergraph,
    /// Part of each vertex id, `None` for vertices outside every edge.
    pub parts: Vec<Option<u8>>,
}

impl PartitionedFamily {
    pub fn new(family: Hypergraph, parts: Vec<Option<u8>>) -> Result<Self> {
        let pf = PartitionedFamily { family, parts };
        let k = pf.k();
        for e in pf.family.edges() {
            if pf.pattern(e) != full(k) || e.iter().any(|v| pf.part_of(v).is_none()) {
                return Err(Error::Precondition(format!("edge {e:?} is not transversal to the partition")));
            }
        }
        Ok(pf)
    }

    pub fn k(&self) -> usize {
        self.family.k()
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    pub fn part_of(&self, v: Vertex) -> Option<usize> {
        self.parts.get(v as usize).copied().flatten().map(usize::from)
    }

    /// π(D): the parts that `D` meets.
    pub fn pattern(&self, d: &VertexSet) -> Pattern {
        d.iter().filter_map(|v| self.part_of(v)).fold(0, |m, p| m | 1 << p)
    }

    /// `E_J`: the vertices of `E` lying in parts of `J`.
    pub fn projection(&self, e: &VertexSet, j: Pattern) -> VertexSet {
        VertexSet::from_sorted(
            e.iter()
                .filter(|&v| self.part_of(v).is_some_and(|p| j >> p & 1 == 1))
                .collect(),
        )
    }

    pub fn with_family(&self, family: Hypergraph) -> PartitionedFamily {
        PartitionedFamily { family, parts: self.parts.clone() }
    }
}

/// MI(F) as a set of patterns.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionPatterns(pub BTreeSet<Pattern>);

impl IntersectionPatterns {
    pub fn contains(&self, p: Pattern) -> bool {
        self.0.contains(&p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Members in canonical order.
    pub fn canonical(&self) -> Vec<Pattern> {
        let mut v: Vec<Pattern> = self.0.iter().copied().collect();
        v.sort_by(canonical_cmp);
        v
    }

    pub fn display(&self) -> String {
        let v: Vec<String> = self.canonical().into_iter().map(pattern_string).collect();
        format!("[{}]", v.join(", "))
    }
}

impl FromIterator<Pattern> for IntersectionPatterns {
    fn from_iter<I: IntoIterator<Item = Pattern>>(it: I) -> Self {
        IntersectionPatterns(it.into_iter().collect())
    }
}

/// Every vertex lies in fewer than `|L|/s` members, and `|L| >= s`.
pub fn is_s_diverse(l: &[VertexSet], s: usize) -> bool {
    if l.len() < s {
        return false;
    }
    let mut count: HashMap<Vertex, usize> = HashMap::new();
    for m in l {
        for v in m.iter() {
            *count.entry(v).or_insert(0) += 1;
        }
    }
    count.values().all(|&c| c * s < l.len())
}

/// Patterns of pairwise intersections of distinct edges.
pub fn mutual_patterns(p: &PartitionedFamily) -> IntersectionPatterns {
    let e = p.family.edges();
    let pats: Vec<Vec<u8>> = e
        .iter()
        .map(|x| x.iter().map(|v| p.part_of(v).unwrap_or(0) as u8).collect())
        .collect();
    let mut out = BTreeSet::new();
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let (a, b) = (e[i].as_slice(), e[j].as_slice());
            let (mut x, mut y, mut m) = (0, 0, 0u32);
            while x < a.len() && y < b.len() {
                match a[x].cmp(&b[y]) {
                    std::cmp::Ordering::Less => x += 1,
                    std::cmp::Ordering::Greater => y += 1,
                    std::cmp::Ordering::Equal => {
                        m |= 1 << pats[i][x];
                        x += 1;
                        y += 1;
                    }
                }
            }
            out.insert(m);
        }
    }
    IntersectionPatterns(out)
}

/// Smallest `|D|`, `D ⊆ [k]`, contained in no member; 0 for an empty family.
pub fn rank(j: &IntersectionPatterns, k: usize) -> usize {
    if j.is_empty() {
        return 0;
    }
    (0..=full(k))
        .filter(|&d| j.0.iter().all(|&m| d & !m != 0))
        .map(|d| d.count_ones() as usize)
        .min()
        .unwrap_or(k + 1)
}

pub fn closed_under_intersection(j: &IntersectionPatterns) -> bool {
    j.0.iter().all(|&a| j.0.iter().all(|&b| j.0.contains(&(a & b))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatternType {
    /// `2^B ⊆ J` with `|B| = k - 2`.
    Type1 { base: Pattern },
    /// The unique central index.
    Type2 { central: usize },
}

/// Lexicographically least `B` of size `k - 2` with `2^B ⊆ J`.
pub fn type1_base(j: &IntersectionPatterns, k: usize) -> Option<Pattern> {
    crate::combinatorics::combinations(k, k - 2)
        .map(|b| pattern_from_parts(&b))
        .find(|&b| subsets_of(b).all(|d| j.contains(d)))
}

fn subsets_of(b: Pattern) -> impl Iterator<Item = Pattern> {
    // standard submask walk, including 0
    let mut cur = Some(b);
    std::iter::from_fn(move || {
        let c = cur?;
        cur = if c == 0 { None } else { Some((c - 1) & b) };
        Some(c)
    })
}

/// Second clause of type 2 only: no member avoiding `i` has size `>= k-2`.
fn avoids_central(j: &IntersectionPatterns, k: usize, i: usize) -> bool {
    j.0.iter().all(|&d| d >> i & 1 == 1 || (d.count_ones() as usize) < k - 2)
}

fn is_central(j: &IntersectionPatterns, k: usize, i: usize) -> bool {
    let all_with_i = (0..full(k)).filter(|d| d >> i & 1 == 1).all(|d| j.contains(d));
    all_with_i && avoids_central(j, k, i)
}

/// Classifies an intersection-closed family of rank at least `k - 1`.
/// Type 1 wins when both descriptions apply.
pub fn classify_type(j: &IntersectionPatterns, k: usize) -> Result<PatternType> {
    if k < 3 {
        return Err(Error::Precondition("classification needs k >= 3".into()));
    }
    if !closed_under_intersection(j) {
        return Err(Error::Precondition("pattern family is not closed under intersection".into()));
    }
    let r = rank(j, k);
    if r < k - 1 {
        return Err(Error::Precondition(format!("rank {r} is below k-1 = {}", k - 1)));
    }
    if let Some(base) = type1_base(j, k) {
        return Ok(PatternType::Type1 { base });
    }
    let centrals: Vec<usize> = (0..k).filter(|&i| is_central(j, k, i)).collect();
    match centrals[..] {
        [i] => Ok(PatternType::Type2 { central: i }),
        _ => Err(Error::Verification(format!(
            "pattern family {} is neither type 1 nor has a unique central index",
            j.display()
        ))),
    }
}

/// `c(k,s) = (k!/k^k) (2s(1+2^k))^{-2^k}` as a natural logarithm.
pub fn ln_c(k: usize, s: usize) -> f64 {
    let kf = k as f64;
    (factorial(k as u64) as f64).ln() - kf * kf.ln()
        - (1u64 << k) as f64 * (2.0 * s as f64 * (1.0 + (1u64 << k) as f64)).ln()
}

/// Output of the filtering process.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FilterReport {
    pub family: PartitionedFamily,
    pub mi: IntersectionPatterns,
    pub rank: usize,
    /// Size of the k-partite subfamily found by the partition step.
    pub partite_size: usize,
    pub rounds: usize,
    pub input_size: usize,
}

/// Derandomized k-partition keeping at least `k!/k^k` of the edges: vertices
/// are assigned in increasing order to the part maximizing the conditional
/// expectation of transversal edges.
pub fn erdos_kleitman_partition(f: &Hypergraph) -> (Vec<Option<u8>>, Vec<usize>) {
    let k = f.k();
    let inc = f.incidence();
    let mut part: Vec<Option<u8>> = vec![None; f.n()];
    let fact: Vec<u128> = (0..=k as u64).map(factorial).collect();
    let weight = |e: &VertexSet, part: &[Option<u8>]| -> u128 {
        let mut seen = 0u32;
        let mut j = 0;
        for v in e.iter() {
            if let Some(p) = part[v as usize] {
                if seen >> p & 1 == 1 {
                    return 0;
                }
                seen |= 1 << p;
                j += 1;
            }
        }
        fact[k - j] * (k as u128).pow(j as u32)
    };
    for v in f.vertices().iter() {
        let mut best = (0u128, 0u8);
        for p in 0..k as u8 {
            part[v as usize] = Some(p);
            let w: u128 = inc[v as usize].iter().map(|&i| weight(f.edge(i), &part)).sum();
            if p == 0 || w > best.0 {
                best = (w, p);
            }
        }
        part[v as usize] = Some(best.1);
    }
    let keep = (0..f.len())
        .filter(|&i| {
            let m = f.edge(i).iter().fold(0u32, |m, v| m | 1 << part[v as usize].unwrap());
            m == full(k)
        })
        .collect();
    (part, keep)
}

struct Batch {
    proj: VertexSet,
    edges: Vec<usize>,
}

/// The filtering process. Returns an s-super-homogeneous k-partite
/// subfamily, verified before returning.
pub fn filter_super_homogeneous(f: &Hypergraph, s: usize) -> Result<FilterReport> {
    let k = f.k();
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if s < 2 * k {
        return Err(Error::Precondition(format!("s = {s} must be at least 2k = {}", 2 * k)));
    }
    let n = f.n() as u128;
    let (parts, keep) = erdos_kleitman_partition(f);
    let kk = (k as u128).pow(k as u32);
    if (keep.len() as u128) * kk < factorial(k as u64) * f.len() as u128 {
        return Err(Error::Verification("partition step lost more than the guaranteed fraction".into()));
    }
    let base = PartitionedFamily::new(f.subfamily(keep.iter().copied()), parts)?;
    let partite_size = base.len();
    let mut cur: Vec<VertexSet> = base.family.edges().to_vec();
    let mut rounds = 0;
    let accepted = loop {
        rounds += 1;
        let fi = cur.len() as u128;
        let pf = base.with_family(Hypergraph::from_canonical(k, f.n(), cur.clone()));
        let mi = mutual_patterns(&pf).canonical();
        let mut live = vec![true; cur.len()];
        let mut buckets: BTreeMap<Pattern, Vec<Batch>> = BTreeMap::new();
        let mut w_count = 0usize;
        'restart: loop {
            for &j in &mi {
                let mut groups: BTreeMap<VertexSet, Vec<usize>> = BTreeMap::new();
                for (i, e) in cur.iter().enumerate().filter(|(i, _)| live[*i]) {
                    groups.entry(pf.projection(e, j)).or_default().push(i);
                }
                for (d, idx) in groups {
                    let link: Vec<VertexSet> = idx.iter().map(|&i| cur[i].difference(&d)).collect();
                    let bar = 2 * k as u128 * n.pow(j.count_ones());
                    let moved = if !is_s_diverse(&link, s) {
                        buckets.entry(j).or_default().push(Batch { proj: d, edges: idx.clone() });
                        true
                    } else if (idx.len() as u128) * bar < fi {
                        w_count += idx.len();
                        true
                    } else {
                        false
                    };
                    if moved {
                        for &i in &idx {
                            live[i] = false;
                        }
                        continue 'restart;
                    }
                }
            }
            break;
        }
        let survivors: Vec<VertexSet> =
            cur.iter().zip(&live).filter(|(_, &l)| l).map(|(e, _)| e.clone()).collect();
        let rest = cur.len() - w_count;
        if !survivors.is_empty() && (survivors.len() as u128) * (1 + (1u128 << k)) >= rest as u128 {
            break survivors;
        }
        // Recurse into the largest bucket, keeping in each batch the edges
        // through its most popular link vertex.
        let (&j, _) = buckets
            .iter()
            .max_by(|a, b| {
                let sa: usize = a.1.iter().map(|b| b.edges.len()).sum();
                let sb: usize = b.1.iter().map(|b| b.edges.len()).sum();
                sa.cmp(&sb).then_with(|| canonical_cmp(b.0, a.0))
            })
            .ok_or_else(|| Error::Verification("no survivors and no bucket to refine".into()))?;
        let mut next = Vec::new();
        for batch in &buckets[&j] {
            let mut count: BTreeMap<Vertex, usize> = BTreeMap::new();
            for &i in &batch.edges {
                for v in cur[i].difference(&batch.proj).iter() {
                    *count.entry(v).or_insert(0) += 1;
                }
            }
            let v = count
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
                .map(|(&v, _)| v)
                .ok_or_else(|| Error::Verification("empty link in a refined batch".into()))?;
            next.extend(batch.edges.iter().filter(|&&i| cur[i].contains(v)).map(|&i| cur[i].clone()));
        }
        next.sort();
        let before = mi.len();
        let after = mutual_patterns(&base.with_family(Hypergraph::from_canonical(k, f.n(), next.clone())));
        if after.contains(j) || after.len() >= before {
            return Err(Error::Verification("refinement did not drop its pattern".into()));
        }
        cur = next;
    };
    let family = base.with_family(Hypergraph::from_canonical(k, f.n(), accepted));
    let mi = verify_super_homogeneous(&family, s)?;
    let r = rank(&mi, k);
    if !closed_under_intersection(&mi) {
        return Err(Error::Verification("MI of the output is not closed under intersection".into()));
    }
    if family.len() as u128 > binom(f.n() as u64, r as u64) {
        return Err(Error::Verification(format!("|F'| exceeds binom(n, rank) with rank {r}")));
    }
    let lc = ln_c(k, s) + (f.len() as f64).ln();
    if lc >= 0.0 && (family.len() as f64).ln() < lc - 1e-9 {
        return Err(Error::Verification("output smaller than c(k,s)|F|".into()));
    }
    Ok(FilterReport { family, mi, rank: r, partite_size, rounds, input_size: f.len() })
}

/// Checks diversity and the degree floor for every `J ∈ MI(F')` and every
/// edge, returning MI.
pub fn verify_super_homogeneous(p: &PartitionedFamily, s: usize) -> Result<IntersectionPatterns> {
    if p.is_empty() {
        return Err(Error::Verification("empty family".into()));
    }
    let k = p.k();
    let n = p.family.n() as u128;
    let mi = mutual_patterns(p);
    for &j in &mi.0 {
        let mut groups: BTreeMap<VertexSet, Vec<VertexSet>> = BTreeMap::new();
        for e in p.family.edges() {
            let d = p.projection(e, j);
            let res = e.difference(&d);
            groups.entry(d).or_default().push(res);
        }
        for (d, link) in groups {
            if !is_s_diverse(&link, s) {
                return Err(Error::Verification(format!(
                    "link of {d:?} (pattern {}) is not {s}-diverse",
                    pattern_string(j)
                )));
            }
            let deg = link.len() as u128;
            if deg < s as u128 || deg * 2 * k as u128 * n.pow(j.count_ones()) < p.len() as u128 {
                return Err(Error::Verification(format!("degree of {d:?} below the floor")));
            }
        }
    }
    Ok(mi)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Type2Route {
    /// Top vertices by shadow size of their central classes.
    Centers,
    /// Exhaustive search over vertex subsets.
    Exhaustive,
    /// Single-flip local search from the center choice.
    LocalSearch,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum DichotomyOutcome {
    Type1 {
        family: PartitionedFamily,
        base: Pattern,
        mi: IntersectionPatterns,
    },
    Type2 {
        w: VertexSet,
        fpp: Hypergraph,
        route: Type2Route,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PieceSummary {
    pub size: usize,
    pub rank: usize,
    pub mi: String,
    pub kind: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub outcome: DichotomyOutcome,
    pub pieces: Vec<PieceSummary>,
    pub residue: usize,
    /// `floor((5m/eps)^(k-1))`, saturated.
    pub h: u128,
}

/// Vertex-subset search is exhaustive up to this many vertices.
pub const EXHAUSTIVE_W_LIMIT: usize = 16;

/// The structural dichotomy: a type-1 super-homogeneous piece, or a small
/// set `W` met exactly once by all but an `eps` fraction of the edges.
pub fn dichotomy(f: &Hypergraph, s: usize, eps: f64) -> Result<DichotomyReport> {
    let k = f.k();
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!("eps = {eps} outside (0,1)")));
    }
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if k < 3 {
        return Err(Error::Precondition("dichotomy needs k >= 3".into()));
    }
    let total = f.len();
    let mut residue = f.clone();
    let mut pieces: Vec<FilterReport> = Vec::new();
    while (residue.len() as f64) > eps * total as f64 / 2.0 {
        let rep = filter_super_homogeneous(&residue, s)?;
        residue = residue.minus(&rep.family.family);
        pieces.push(rep);
    }
    let m = pieces.len();
    let hf = (5.0 * m as f64 / eps).powi(k as i32 - 1).floor();
    let h = if hf >= u128::MAX as f64 { u128::MAX } else { hf as u128 };
    let mut summaries = Vec::new();
    let mut type1 = None;
    let mut centers: Vec<Option<usize>> = Vec::new();
    for p in &pieces {
        let base = type1_base(&p.mi, k);
        let central = (0..k)
            .find(|&i| rank_ok(p, k) && is_central(&p.mi, k, i))
            .or_else(|| (0..k).find(|&i| avoids_central(&p.mi, k, i)));
        let kind = match (base, central) {
            (Some(b), _) => format!("type1 base {}", pattern_string(b)),
            (None, Some(i)) if rank_ok(p, k) => format!("type2 central {}", i + 1),
            (None, Some(i)) => format!("degenerate, weak central {}", i + 1),
            (None, None) => "unclassified".to_string(),
        };
        summaries.push(PieceSummary { size: p.family.len(), rank: p.rank, mi: p.mi.display(), kind });
        if type1.is_none() {
            if let Some(b) = base {
                type1 = Some((p.clone(), b));
            }
        }
        centers.push(central);
    }
    if let Some((p, base)) = type1 {
        return Ok(DichotomyReport {
            outcome: DichotomyOutcome::Type1 { family: p.family, base, mi: p.mi },
            pieces: summaries,
            residue: residue.len(),
            h,
        });
    }
    let need = ((1.0 - eps) * total as f64).ceil() as usize;
    let mut best: Option<(VertexSet, Hypergraph, Type2Route)> = None;
    if centers.iter().all(|c| c.is_some()) {
        let (w, fpp) = center_route(&pieces, &centers, h, k)?;
        best = Some((w, fpp, Type2Route::Centers));
    }
    if best.as_ref().map_or(true, |b| b.1.len() < need) {
        let seed = best.as_ref().map(|b| b.0.clone()).unwrap_or_default();
        let (w, fpp, route) = exactly_once_search(f, &seed);
        if best.as_ref().map_or(true, |b| fpp.len() > b.1.len()) {
            best = Some((w, fpp, route));
        }
    }
    let (w, fpp, route) = best.expect("a route always runs");
    if fpp.len() < need {
        return Err(Error::DichotomyInconclusive {
            best_fraction: fpp.len() as f64 / total as f64,
            required: 1.0 - eps,
            max_pair_codegree: max_pair_codegree(f),
        });
    }
    // every edge meeting W once qualifies, not only those the route kept
    let fpp = exactly_once(f, &w);
    verify_type2(f, &w, &fpp, eps)?;
    let lw = (w.len().max(1) as f64).ln();
    let cap = (k as f64 - 1.0) * ((10.0f64).ln() - ln_c(k, s) - 2.0 * eps.ln());
    if lw > cap {
        return Err(Error::Verification("W exceeds its size bound".into()));
    }
    Ok(DichotomyReport { outcome: DichotomyOutcome::Type2 { w, fpp, route }, pieces: summaries, residue: residue.len(), h })
}

fn rank_ok(p: &FilterReport, k: usize) -> bool {
    p.rank + 1 >= k && closed_under_intersection(&p.mi)
}

/// Central vertices per piece, W = the top vertices by the (k-2)-shadow of
/// their classes, then drop edges with an outside center or two W vertices.
fn center_route(
    pieces: &[FilterReport],
    centers: &[Option<usize>],
    h: u128,
    k: usize,
) -> Result<(VertexSet, Hypergraph)> {
    let n = pieces[0].family.family.n();
    let mut class: BTreeMap<Vertex, Vec<VertexSet>> = BTreeMap::new();
    let mut star: Vec<(Vertex, VertexSet)> = Vec::new();
    for (p, c) in pieces.iter().zip(centers) {
        let ci = c.expect("checked by caller");
        let mut per_piece: BTreeMap<Vertex, BTreeSet<VertexSet>> = BTreeMap::new();
        let mut whole: BTreeSet<VertexSet> = BTreeSet::new();
        for e in p.family.family.edges() {
            let cv = p.family.projection(e, 1 << ci).as_slice()[0];
            let rest = e.difference(&VertexSet::from([cv]));
            for d in rest.subsets_of_size(k - 2) {
                per_piece.entry(cv).or_default().insert(d.clone());
                whole.insert(d);
            }
            class.entry(cv).or_default().push(rest);
            star.push((cv, e.clone()));
        }
        // distinct centers have disjoint shadows inside one piece
        let sum: usize = per_piece.values().map(|s| s.len()).sum();
        if sum != whole.len() {
            return Err(Error::Verification("central classes share a (k-2)-shadow".into()));
        }
    }
    let mut sizes: Vec<(usize, Vertex)> = class
        .iter()
        .map(|(&v, a)| {
            let sh: BTreeSet<VertexSet> = a.iter().flat_map(|r| r.subsets_of_size(k - 2)).collect();
            (sh.len(), v)
        })
        .collect();
    sizes.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let take = (h.min(sizes.len() as u128)) as usize;
    let w: VertexSet = sizes[..take].iter().map(|&(_, v)| v).collect();
    let fpp: Vec<VertexSet> = star
        .into_iter()
        .filter(|(c, e)| w.contains(*c) && e.intersection_len(&w) == 1)
        .map(|(_, e)| e)
        .collect();
    Ok((w, Hypergraph::from_sets(k, n, fpp)))
}

/// Maximizes the number of edges meeting `W` exactly once: exhaustively over
/// subsets of V(F) when it is small, otherwise by single-flip local search.
fn exactly_once_search(f: &Hypergraph, seed: &VertexSet) -> (VertexSet, Hypergraph, Type2Route) {
    let verts: Vec<Vertex> = f.vertices().into_vec();
    let pos: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let masks: Vec<u64> = if verts.len() <= 64 {
        f.edges().iter().map(|e| e.iter().fold(0u64, |m, v| m | 1 << pos[&v])).collect()
    } else {
        Vec::new()
    };
    let score = |w: &VertexSet| f.edges().iter().filter(|e| e.intersection_len(w) == 1).count();
    let (w, route) = if verts.len() <= EXHAUSTIVE_W_LIMIT {
        let mut best = (0usize, 0u64);
        for wm in 1u64..(1 << verts.len()) {
            let c = masks.iter().filter(|&&e| (e & wm).count_ones() == 1).count();
            if c > best.0 {
                best = (c, wm);
            }
        }
        let w: VertexSet = (0..verts.len()).filter(|i| best.1 >> i & 1 == 1).map(|i| verts[i]).collect();
        (w, Type2Route::Exhaustive)
    } else {
        let mut w = seed.clone();
        let mut cur = score(&w);
        loop {
            let mut improved = false;
            for &v in &verts {
                let cand = if w.contains(v) { w.difference(&VertexSet::from([v])) } else { w.with(v) };
                let c = score(&cand);
                if c > cur {
                    w = cand;
                    cur = c;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        (w, Type2Route::LocalSearch)
    };
    let fpp = exactly_once(f, &w);
    (w, fpp, route)
}

fn exactly_once(f: &Hypergraph, w: &VertexSet) -> Hypergraph {
    let fpp = f.edges().iter().filter(|e| e.intersection_len(w) == 1).cloned().collect();
    Hypergraph::from_canonical(f.k(), f.n(), fpp)
}

fn verify_type2(f: &Hypergraph, w: &VertexSet, fpp: &Hypergraph, eps: f64) -> Result<()> {
    if fpp.edges().iter().any(|e| e.intersection_len(w) != 1 || !f.contains_edge(e)) {
        return Err(Error::Verification("an edge of F'' does not meet W exactly once".into()));
    }
    if (fpp.len() as f64) < (1.0 - eps) * f.len() as f64 {
        return Err(Error::Verification("F'' too small".into()));
    }
    Ok(())
}

/// Largest number of edges through a pair of vertices.
pub fn max_pair_codegree(f: &Hypergraph) -> usize {
    f.degree_map(2).into_values().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs<const N: usize>(v: [u32; N]) -> VertexSet {
        VertexSet::from(v)
    }

    fn pats(ps: &[&[usize]]) -> IntersectionPatterns {
        ps.iter().map(|p| pattern_from_parts(&p.iter().map(|x| x - 1).collect::<Vec<_>>())).collect()
    }

    /// k=3 family with a1,b1,c1 = 0,1,2 and a2,b2,c2 = 3,4,5.
    fn three_edges() -> PartitionedFamily {
        let f = Hypergraph::new(3, 6, vec![vec![0, 1, 2], vec![0, 1, 5], vec![3, 4, 5]]).unwrap();
        let parts = vec![Some(0), Some(1), Some(2), Some(0), Some(1), Some(2)];
        PartitionedFamily::new(f, parts).unwrap()
    }

    #[test]
    fn patterns_and_projections() {
        let p = three_edges();
        assert_eq!(p.pattern(&VertexSet::empty()), 0);
        assert_eq!(p.pattern(&vs([0, 1, 2])), 0b111);
        assert_eq!(p.projection(&vs([0, 1, 2]), 0), VertexSet::empty());
        assert_eq!(p.projection(&vs([0, 1, 2]), 0b111), vs([0, 1, 2]));
        assert_eq!(p.projection(&vs([0, 1, 2]), 0b010), vs([1]));
        assert_eq!(p.pattern(&vs([0, 2])), 0b101);
    }

    #[test]
    fn mutual_patterns_examples() {
        let p = three_edges();
        assert_eq!(mutual_patterns(&p), pats(&[&[1, 2], &[3], &[]]));
        let single = p.with_family(Hypergraph::new(3, 6, vec![vec![0, 1, 2]]).unwrap());
        assert!(mutual_patterns(&single).is_empty());
        let two = p.with_family(Hypergraph::new(3, 6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap());
        assert_eq!(mutual_patterns(&two), pats(&[&[]]));
    }

    #[test]
    fn diversity() {
        let disjoint: Vec<VertexSet> = (0..10).map(|i| vs([i])).collect();
        assert!(is_s_diverse(&disjoint, 2));
        assert!(!is_s_diverse(&[VertexSet::empty()], 2));
        let star: Vec<VertexSet> = (1..5).map(|i| vs([0, i])).collect();
        assert!(!is_s_diverse(&star, 2));
    }

    #[test]
    fn rank_and_closure() {
        assert_eq!(rank(&IntersectionPatterns::default(), 4), 0);
        let proper: IntersectionPatterns = (0..15u32).collect();
        assert_eq!(rank(&proper, 4), 4);
        assert!(closed_under_intersection(&pats(&[&[]])));
        assert!(!closed_under_intersection(&pats(&[&[1, 2], &[2, 3]])));
    }

    #[test]
    fn classification_examples() {
        let proper: IntersectionPatterns = (0..15u32).collect();
        assert!(matches!(classify_type(&proper, 4).unwrap(), PatternType::Type1 { .. }));
        let through1: IntersectionPatterns = (0..15u32).filter(|d| d & 1 == 1).chain([0]).collect();
        // {1} alone and sets through 1 plus the empty intersection of disjoint ones
        let through1 = IntersectionPatterns(through1.0.into_iter().collect());
        assert_eq!(classify_type(&through1, 4).unwrap(), PatternType::Type2 { central: 0 });
        let j = pats(&[&[], &[1], &[2], &[1, 2], &[1, 3], &[1, 4], &[1, 3, 4], &[1, 2, 3], &[1, 2, 4]]);
        assert_eq!(classify_type(&j, 4).unwrap(), PatternType::Type1 { base: 0b0011 });
        assert!(classify_type(&pats(&[&[1, 2], &[2, 3]]), 4).is_err());
    }

    #[test]
    fn filter_on_complete_partite() {
        // complete 4-partite family with parts {0,1},{2,3},{4,5},{6,7}
        let mut edges = Vec::new();
        for a in 0..2 {
            for b in 2..4 {
                for c in 4..6 {
                    for d in 6..8 {
                        edges.push(vec![a, b, c, d]);
                    }
                }
            }
        }
        let f = Hypergraph::new(4, 8, edges).unwrap();
        let rep = filter_super_homogeneous(&f, 8).unwrap();
        assert!(!rep.family.is_empty());
        verify_super_homogeneous(&rep.family, 8).unwrap();
    }

    #[test]
    fn filter_single_edge() {
        let f = Hypergraph::new(4, 4, vec![vec![0, 1, 2, 3]]).unwrap();
        let rep = filter_super_homogeneous(&f, 8).unwrap();
        assert_eq!(rep.family.len(), 1);
        assert!(rep.mi.is_empty());
        assert!(filter_super_homogeneous(&f, 7).is_err());
    }

    #[test]
    fn star_is_type2() {
        let edges: Vec<Vec<u32>> = crate::combinatorics::combinations(11, 3)
            .map(|c| {
                let mut e: Vec<u32> = c.iter().map(|&x| x as u32 + 1).collect();
                e.push(0);
                e
            })
            .collect();
        let f = Hypergraph::new(4, 12, edges).unwrap();
        let rep = dichotomy(&f, 8, 0.5).unwrap();
        match rep.outcome {
            DichotomyOutcome::Type2 { w, fpp, .. } => {
                assert!(w.contains(0));
                assert_eq!(fpp, f);
            }
            other => panic!("expected type 2, got {other:?}"),
        }
    }

    #[test]
    fn two_stars_type2() {
        let mut edges = Vec::new();
        for c in crate::combinatorics::combinations(6, 3) {
            let e: Vec<u32> = c.iter().map(|&x| x as u32 + 2).collect();
            edges.push([vec![0], e.clone()].concat());
            let e2: Vec<u32> = c.iter().map(|&x| x as u32 + 8).collect();
            edges.push([vec![1], e2].concat());
        }
        let f = Hypergraph::new(4, 14, edges).unwrap();
        let rep = dichotomy(&f, 8, 0.5).unwrap();
        match rep.outcome {
            DichotomyOutcome::Type2 { w, fpp, .. } => {
                assert!(w.contains(0) && w.contains(1));
                assert!(fpp.len() * 2 >= f.len());
            }
            other => panic!("expected type 2, got {other:?}"),
        }
    }

    #[test]
    fn blow_up_is_type1() {
        // parts of size s + 1 make every link of a (k-1)-set s-diverse
        let mut edges = Vec::new();
        for a in 0..9 {
            for b in 9..18 {
                for c in 18..27 {
                    for d in 27..36 {
                        edges.push(vec![a, b, c, d]);
                    }
                }
            }
        }
        let f = Hypergraph::new(4, 36, edges).unwrap();
        let rep = dichotomy(&f, 8, 0.5).unwrap();
        assert!(matches!(rep.outcome, DichotomyOutcome::Type1 { .. }), "{:?}", rep.pieces);
    }
}
