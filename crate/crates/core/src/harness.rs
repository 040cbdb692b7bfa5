//! Seeded experiments: random Turán numbers, `forb` trends, filter and
//! container sweeps, with CSV output and a JSON run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::binom;
use crate::container::{self, TreeOptions};
use crate::embed::{copy_edge_sets, DEFAULT_BUDGET};
use crate::hypertree::{self, tree_cert};
use crate::oracle::{self, MASK_LIMIT};
use crate::{delta, textio, Error, Hypergraph, Result};

/// Keeps each k-set of `[n]` independently with probability `p`.
pub fn sample_gnp(n: usize, k: usize, p: f64, rng: &mut impl Rng) -> Result<Hypergraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("p = {p} is not a probability")));
    }
    let full = Hypergraph::complete(n, k);
    let keep: Vec<usize> = (0..full.len()).filter(|_| rng.gen_bool(p)).collect();
    Ok(full.subfamily(keep))
}

/// Generator for one `(n, grid point, trial)` cell: the seed picks the key,
/// the cell picks the stream.
pub fn cell_rng(seed: u64, n: usize, point: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 48) ^ ((point as u64) << 32) ^ trial as u64);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    RandomTuran,
    ForbTrend,
    FilterBench,
    Containers,
}

/// Experiment description, read from TOML.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub k: usize,
    pub n_min: usize,
    pub n_max: usize,
    /// `file PATH`, `cycle K ELL`, `covering-tree K ELL` or `shared-pair K`.
    pub h: String,
    #[serde(default)]
    pub p: Vec<f64>,
    pub seed: u64,
    #[serde(default = "one")]
    pub trials: usize,
    pub output: PathBuf,
    #[serde(default = "half")]
    pub eps: f64,
    #[serde(default = "unit")]
    pub beta: f64,
    /// Diversity parameter for the filter bench.
    #[serde(default = "two")]
    pub s: usize,
    /// Node budget for each exact branch and bound.
    #[serde(default = "bb_budget")]
    pub budget: u64,
}

fn one() -> usize {
    1
}
fn two() -> usize {
    2
}
fn half() -> f64 {
    0.5
}
fn unit() -> f64 {
    1.0
}
fn bb_budget() -> u64 {
    50_000_000
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml(&std::fs::read_to_string(path)?)?;
        if let Some(dir) = path.parent() {
            if cfg.output.is_relative() {
                cfg.output = dir.join(&cfg.output);
            }
            if let Some(rest) = cfg.h.strip_prefix("file ") {
                let p = Path::new(rest.trim());
                if p.is_relative() {
                    cfg.h = format!("file {}", dir.join(p).display());
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min > self.n_max || self.n_min < self.k {
            return Err(Error::Config(format!("bad n range {}..={}", self.n_min, self.n_max)));
        }
        if self.p.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Config("every p must lie in [0,1]".into()));
        }
        if self.mode == Mode::RandomTuran || self.mode == Mode::FilterBench {
            if self.p.is_empty() {
                return Err(Error::Config("p grid is empty".into()));
            }
            if self.trials == 0 {
                return Err(Error::Config("trials must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Parses an `H` spec into the pattern and a short id.
pub fn parse_h_spec(spec: &str) -> Result<(Hypergraph, String)> {
    let words: Vec<&str> = spec.split_whitespace().collect();
    let num = |i: usize| -> Result<usize> {
        words.get(i).and_then(|w| w.parse().ok()).ok_or_else(|| Error::Config(format!("bad H spec {spec:?}")))
    };
    match words.first().copied() {
        Some("file") => {
            let path = words.get(1).ok_or_else(|| Error::Config("missing H file".into()))?;
            let h = textio::read_file(Path::new(path), false)?;
            let id = Path::new(path).file_stem().map_or("h".into(), |s| s.to_string_lossy().into_owned());
            Ok((h, id))
        }
        Some("cycle") => Ok((hypertree::linear_cycle(num(1)?, num(2)?)?, format!("C{}^{}", num(2)?, num(1)?))),
        Some("covering-tree") => Ok((hypertree::covering_tree(num(1)?, num(2)?)?, format!("T{}^{}", num(2)?, num(1)?))),
        Some("shared-pair") => {
            let k = num(1)?;
            if k < 3 {
                return Err(Error::Config("shared-pair needs k >= 3".into()));
            }
            let a: Vec<u32> = (0..k as u32).collect();
            let b: Vec<u32> = [0, 1].into_iter().chain(k as u32..2 * k as u32 - 2).collect();
            Ok((Hypergraph::new(k, 2 * k - 2, vec![a, b])?, format!("P2^{k}")))
        }
        _ => Err(Error::Config(format!("unknown H spec {spec:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomTuranRow {
    pub n: usize,
    pub p: f64,
    pub trial: usize,
    pub sampled: usize,
    pub best: usize,
    pub exact: bool,
    pub normalized: f64,
    pub construction: usize,
}

/// Largest `H`-free subgraph found by greedy copy breaking and swaps.
pub fn heuristic_free(host: &Hypergraph, h: &Hypergraph) -> Result<Vec<usize>> {
    let copies = copy_edge_sets(host, h, DEFAULT_BUDGET)?;
    let mut by_edge = vec![Vec::new(); host.len()];
    for (i, c) in copies.iter().enumerate() {
        for &e in c {
            by_edge[e].push(i);
        }
    }
    let mut keep = vec![true; host.len()];
    let mut alive: Vec<bool> = vec![true; copies.len()];
    // drop the edge in most live copies until none is left
    loop {
        let mut load = vec![0usize; host.len()];
        for (i, c) in copies.iter().enumerate() {
            if alive[i] {
                for &e in c {
                    load[e] += 1;
                }
            }
        }
        let Some((e, &l)) = load.iter().enumerate().max_by_key(|&(e, &l)| (l, std::cmp::Reverse(e))) else { break };
        if l == 0 {
            break;
        }
        keep[e] = false;
        for &ci in &by_edge[e] {
            alive[ci] = false;
        }
    }
    let blocked = |keep: &[bool], e: usize| by_edge[e].iter().any(|&ci| copies[ci].iter().all(|&x| x == e || keep[x]));
    // re-add whatever fits, then try one-out two-in swaps
    let mut improved = true;
    while improved {
        improved = false;
        for e in 0..host.len() {
            if !keep[e] && !blocked(&keep, e) {
                keep[e] = true;
                improved = true;
            }
        }
        'swap: for out in 0..host.len() {
            if !keep[out] {
                continue;
            }
            keep[out] = false;
            let free: Vec<usize> = (0..host.len()).filter(|&e| e != out && !keep[e] && !blocked(&keep, e)).collect();
            for (i, &a) in free.iter().enumerate() {
                keep[a] = true;
                if let Some(&b) = free[i + 1..].iter().find(|&&b| !blocked(&keep, b)) {
                    keep[b] = true;
                    improved = true;
                    break 'swap;
                }
                keep[a] = false;
            }
            keep[out] = true;
        }
    }
    Ok((0..host.len()).filter(|&e| keep[e]).collect())
}

pub fn random_turan(cfg: &ExperimentConfig) -> Result<Vec<RandomTuranRow>> {
    let (h, _) = parse_h_spec(&cfg.h)?;
    let sigma = hypertree::cross_cut(&h)?.sigma;
    let mut cells = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        for (pi, &p) in cfg.p.iter().enumerate() {
            for trial in 0..cfg.trials {
                cells.push((n, pi, p, trial));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(n, pi, p, trial)| {
            let mut rng = cell_rng(cfg.seed, n, pi, trial);
            let g = sample_gnp(n, cfg.k, p, &mut rng)?;
            let (best, exact) = if g.len() <= MASK_LIMIT {
                let r = oracle::max_free(&g, &h, cfg.budget)?;
                (r.size, r.optimal)
            } else {
                (heuristic_free(&g, &h)?.len(), false)
            };
            let l = oracle::lower_construction(n, cfg.k, sigma)?;
            let construction = l.edges().iter().filter(|e| g.contains_edge(e)).count();
            if exact && best < construction {
                return Err(Error::Verification(format!("n={n} p={p} trial={trial}: best {best} below the construction {construction}")));
            }
            let norm = p * binom(n as u64, cfg.k as u64 - 1) as f64;
            Ok(RandomTuranRow { n, p, trial, sampled: g.len(), best, exact, normalized: if norm > 0.0 { best as f64 / norm } else { 0.0 }, construction })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForbTrendRow {
    pub n: usize,
    pub k: usize,
    pub h_id: String,
    pub sigma: usize,
    pub construction: usize,
    pub ex: usize,
    pub ex_exact: bool,
    /// `log2 forb`, empty when not computed.
    pub forb_log2: Option<f64>,
    pub forb_upper_log2: Option<f64>,
    pub normalized_ex: f64,
    pub normalized_forb: Option<f64>,
    pub sigma_minus_one: usize,
}

pub fn forb_trend(cfg: &ExperimentConfig) -> Result<Vec<ForbTrendRow>> {
    let (h, h_id) = parse_h_spec(&cfg.h)?;
    let sigma = hypertree::cross_cut(&h)?.sigma;
    let cert = tree_cert(&h).and_then(|c| c.with_expansion()).ok();
    (cfg.n_min..=cfg.n_max)
        .into_par_iter()
        .map(|n| {
            let k = cfg.k;
            let full = Hypergraph::complete(n, k);
            let r = oracle::max_free(&full, &h, cfg.budget)?;
            let construction = oracle::lower_construction(n, k, sigma)?.len();
            let forb = if full.len() <= oracle::FORB_LIMIT { Some(oracle::forb_exact(n, k, &h)?) } else { None };
            let forb_log2 = forb.as_ref().map(oracle::log2_big);
            let upper = cert.as_ref().and_then(|c| container::build_container_tree(n, k, c, cfg.eps, cfg.beta, &TreeOptions::default()).ok()).map(|t| t.forb_upper());
            let norm = binom(n as u64, k as u64 - 1) as f64;
            if r.optimal && r.size < construction {
                return Err(Error::Verification(format!("n={n}: ex {} below the construction {construction}", r.size)));
            }
            if let (Some(f), true) = (forb_log2, r.optimal) {
                if f + 1e-9 < r.size as f64 {
                    return Err(Error::Verification(format!("n={n}: forb below 2^ex")));
                }
            }
            if let (Some(f), Some(u)) = (forb_log2, upper) {
                if f > u + 1e-9 {
                    return Err(Error::Verification(format!("n={n}: forb above the container bound")));
                }
            }
            Ok(ForbTrendRow {
                n,
                k,
                h_id: h_id.clone(),
                sigma,
                construction,
                ex: r.size,
                ex_exact: r.optimal,
                forb_log2,
                forb_upper_log2: upper,
                normalized_ex: r.size as f64 / norm,
                normalized_forb: forb_log2.map(|f| f / norm),
                sigma_minus_one: sigma - 1,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterBenchRow {
    pub n: usize,
    pub p: f64,
    pub trial: usize,
    pub input: usize,
    pub output: usize,
    pub rank: usize,
    pub mi: String,
    pub rounds: usize,
    pub verified: bool,
}

pub fn filter_bench(cfg: &ExperimentConfig) -> Result<Vec<FilterBenchRow>> {
    let mut cells = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        for (pi, &p) in cfg.p.iter().enumerate() {
            for trial in 0..cfg.trials {
                cells.push((n, pi, p, trial));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(n, pi, p, trial)| {
            let mut rng = cell_rng(cfg.seed, n, pi, trial);
            let g = sample_gnp(n, cfg.k, p, &mut rng)?;
            if g.is_empty() {
                return Ok(FilterBenchRow { n, p, trial, input: 0, output: 0, rank: 0, mi: "{}".into(), rounds: 0, verified: true });
            }
            let r = delta::filter_super_homogeneous(&g, cfg.s)?;
            let part = delta::PartitionedFamily::new(r.family.family.clone(), r.family.parts.clone())?;
            let verified = delta::verify_super_homogeneous(&part, cfg.s).is_ok();
            Ok(FilterBenchRow { n, p, trial, input: g.len(), output: r.family.len(), rank: r.rank, mi: r.mi.display(), rounds: r.rounds, verified })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainersRow {
    pub n: usize,
    pub k: usize,
    pub h_id: String,
    pub nodes: usize,
    pub leaves: usize,
    pub depth: usize,
    pub delta_min: Option<f64>,
    pub forb_upper_log2: f64,
    pub threshold: f64,
    pub leaf_formula_log2: f64,
    pub container_formula_log2: f64,
}

pub fn containers_sweep(cfg: &ExperimentConfig) -> Result<Vec<ContainersRow>> {
    let (h, h_id) = parse_h_spec(&cfg.h)?;
    let cert = tree_cert(&h)?.with_expansion()?;
    (cfg.n_min..=cfg.n_max)
        .map(|n| {
            let t = container::build_container_tree(n, cfg.k, &cert, cfg.eps, cfg.beta, &TreeOptions::default())?;
            Ok(ContainersRow {
                n,
                k: cfg.k,
                h_id: h_id.clone(),
                nodes: t.nodes.len(),
                leaves: t.leaf_count(),
                depth: t.depth(),
                delta_min: t.delta_min(),
                forb_upper_log2: t.forb_upper(),
                threshold: t.threshold,
                leaf_formula_log2: t.leaf_formula_log2(),
                container_formula_log2: t.container_formula_log2(),
            })
        })
        .collect()
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// CSV text plus the run manifest.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub csv: String,
    pub manifest: serde_json::Value,
}

/// Runs an experiment in memory. The CSV depends only on the config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let start = Instant::now();
    let (csv, rows) = match cfg.mode {
        Mode::RandomTuran => {
            let r = random_turan(cfg)?;
            (to_csv(&r)?, r.len())
        }
        Mode::ForbTrend => {
            let r = forb_trend(cfg)?;
            (to_csv(&r)?, r.len())
        }
        Mode::FilterBench => {
            let r = filter_bench(cfg)?;
            (to_csv(&r)?, r.len())
        }
        Mode::Containers => {
            let r = containers_sweep(cfg)?;
            (to_csv(&r)?, r.len())
        }
    };
    let manifest = serde_json::json!({
        "seed": cfg.seed,
        "mode": cfg.mode,
        "rows": rows,
        "versions": {
            "hx-core": env!("CARGO_PKG_VERSION"),
            "rand_chacha": "0.3",
        },
        "wall_time_s": start.elapsed().as_secs_f64(),
        "config": cfg,
    });
    Ok(RunOutput { csv, manifest })
}

/// Manifest path next to the CSV: `out.csv` gives `out.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    output.with_extension("manifest.json")
}

/// Runs and writes both files.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let out = run_experiment(cfg)?;
    std::fs::write(&cfg.output, &out.csv)?;
    let m = serde_json::to_string_pretty(&out.manifest).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(manifest_path(&cfg.output), m)?;
    Ok(out)
}

/// Mean of `|G(n,p)|` over `trials` seeded samples with its standard error.
pub fn gnp_size_stats(n: usize, k: usize, p: f64, trials: usize, seed: u64) -> Result<(f64, f64, f64)> {
    let sizes: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| sample_gnp(n, k, p, &mut cell_rng(seed, n, 0, t)).map(|g| g.len() as f64))
        .collect::<Result<_>>()?;
    let m = sizes.iter().sum::<f64>() / trials as f64;
    let var = sizes.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (trials as f64 - 1.0).max(1.0);
    Ok((m, (var / trials as f64).sqrt(), p * binom(n as u64, k as u64) as f64))
}
