use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hx_core::balanced::{self, BuildMode};
use hx_core::container::{self, TreeOptions};
use hx_core::delta::{self, DichotomyOutcome, PatternType};
use hx_core::harness::{self, ExperimentConfig};
use hx_core::hypertree::{self, tree_cert};
use hx_core::{embed, oracle, textio, Error, Hypergraph};

/// Counting tools for hypergraphs that avoid a fixed hypertree.
#[derive(Parser)]
#[command(name = "hx", version)]
struct Cli {
    /// Collapse repeated edges in input files instead of rejecting them.
    #[arg(long, global = true)]
    multiset: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a tree-defining edge order, or report that none exists.
    TreeOrder { file: PathBuf },
    /// Print the cross-cut number and a smallest witness.
    Sigma { file: PathBuf },
    /// Emit a standard hypertree in the text format.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run the filtering process and print the surviving family's patterns.
    Filter {
        file: PathBuf,
        #[arg(long)]
        s: usize,
    },
    /// Run the type-1 / type-2 dichotomy.
    Dichotomy {
        file: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Count copies of H in F exactly, or print the supersaturation bound.
    Count {
        file: PathBuf,
        hfile: PathBuf,
        #[arg(long, conflicts_with = "bound")]
        exact: bool,
        #[arg(long, requires = "gamma")]
        bound: bool,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Build a maximal admissible collection of copies of H in F.
    Balanced {
        file: PathBuf,
        hfile: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long, conflicts_with = "dense")]
        gamma: Option<f64>,
        /// Use the dense grading with `a = |F| / binom(n, k-1)`.
        #[arg(long)]
        dense: bool,
    },
    /// Build the container tree of K_n^(k) for H.
    Containers {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        verify: Option<Verify>,
        /// Samples for `--verify sampled`.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact ex(n, H) as CSV.
    Ex {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: PathBuf,
    },
    /// Exact forb(n, H) as CSV.
    Forb {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: PathBuf,
    },
    /// Run an experiment described by a TOML file.
    Experiment { config: PathBuf },
}

#[derive(Subcommand)]
enum GenKind {
    /// Linear cycle.
    Cycle {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
    },
    /// 2-contractible hypertree containing the linear cycle.
    CoveringTree {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Verify {
    Exhaustive,
    Sampled,
}

fn read(path: &Path, multiset: bool) -> Result<Hypergraph> {
    textio::read_file(path, multiset).with_context(|| format!("reading {}", path.display()))
}

fn set(v: &[u32]) -> String {
    let inner: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let ms = cli.multiset;
    match cli.cmd {
        Cmd::TreeOrder { file } => {
            let h = read(&file, ms)?;
            match hypertree::find_tree_order(&h)? {
                None => println!("hypertree: no"),
                Some(c) => {
                    println!("hypertree: yes");
                    println!("position edge parent attach");
                    for i in 0..c.len() {
                        let parent = c.parent[i].map_or("-".to_string(), |p| p.to_string());
                        println!("{i} {} {parent} {}", set(c.edge(i).as_slice()), set(c.attach(i).as_slice()));
                    }
                }
            }
        }
        Cmd::Sigma { file } => {
            let h = read(&file, ms)?;
            let c = hypertree::cross_cut(&h)?;
            println!("sigma: {}", c.sigma);
            println!("witness: {}", set(c.witness.as_slice()));
        }
        Cmd::Gen { kind } => {
            let h = match kind {
                GenKind::Cycle { k, ell } => hypertree::linear_cycle(k, ell)?,
                GenKind::CoveringTree { k, ell } => hypertree::covering_tree(k, ell)?,
            };
            print!("{}", textio::write(&h));
        }
        Cmd::Filter { file, s } => {
            let f = read(&file, ms)?;
            let r = delta::filter_super_homogeneous(&f, s)?;
            println!("input: {}", r.input_size);
            println!("partite: {}", r.partite_size);
            println!("output: {}", r.family.len());
            println!("rounds: {}", r.rounds);
            println!("mi: {}", r.mi.display());
            println!("rank: {}", r.rank);
            let ty = match delta::classify_type(&r.mi, f.k()) {
                Ok(PatternType::Type1 { base }) => format!("type1 base {}", delta::pattern_string(base)),
                Ok(PatternType::Type2 { central }) => format!("type2 central {}", central + 1),
                Err(_) => "none".into(),
            };
            println!("type: {ty}");
        }
        Cmd::Dichotomy { file, s, eps } => {
            let f = read(&file, ms)?;
            let r = match delta::dichotomy(&f, s, eps) {
                Err(e @ Error::DichotomyInconclusive { .. }) => {
                    println!("outcome: inconclusive");
                    bail!(e);
                }
                r => r?,
            };
            match &r.outcome {
                DichotomyOutcome::Type1 { family, base, mi } => {
                    println!("outcome: type1");
                    println!("mi: {}", mi.display());
                    println!("rank: {}", delta::rank(mi, f.k()));
                    println!("type: type1 base {}", delta::pattern_string(*base));
                    println!("family: {}", family.len());
                    println!("w: -");
                }
                DichotomyOutcome::Type2 { w, fpp, route } => {
                    println!("outcome: type2");
                    let piece = r.pieces.iter().max_by_key(|p| p.size);
                    println!("mi: {}", piece.map_or("-".into(), |p| p.mi.clone()));
                    println!("rank: {}", piece.map_or("-".into(), |p| p.rank.to_string()));
                    println!("type: type2 route {route:?}");
                    println!("w: {}", set(w.as_slice()));
                    println!("fpp: {} of {} ({:.4})", fpp.len(), f.len(), fpp.len() as f64 / f.len().max(1) as f64);
                }
            }
            println!("pieces: {}", r.pieces.len());
            println!("residue: {}", r.residue);
        }
        Cmd::Count { file, hfile, exact: _, bound, gamma } => {
            let f = read(&file, ms)?;
            let h = read(&hfile, ms)?;
            if bound {
                let cert = tree_cert(&h)?;
                let c = embed::supersaturation_count(&f, &cert, gamma.expect("clap requires gamma"))?;
                println!("lower_bound: {}", c.lower_bound);
                println!("unit: {:?}", c.unit);
                println!("source: {:?}", c.provenance.source);
                println!("formula: {}", c.provenance.formula);
                println!("exact: {}", c.exact.map_or("-".into(), |e| e.to_string()));
                println!("note: {}", c.provenance.note);
            } else {
                let t = embed::count_copies_exact(&f, &h)?;
                println!("embeddings: {}", t.embeddings);
                println!("automorphisms: {}", t.automorphisms);
                println!("copies: {}", t.copies);
            }
        }
        Cmd::Balanced { file, hfile, beta, gamma, dense } => {
            let f = read(&file, ms)?;
            let h = read(&hfile, ms)?;
            let cert = tree_cert(&h)?;
            let mode = if dense {
                BuildMode::Dense { a: f.len() as f64 / hx_core::combinatorics::binom(f.n() as u64, f.k() as u64 - 1) as f64 }
            } else {
                BuildMode::NearThreshold { gamma: gamma.unwrap_or(0.5) }
            };
            let rep = balanced::build_balanced_collection(&f, &cert, beta, mode)?;
            let kc = &rep.collection;
            for c in kc.copies() {
                let line: Vec<String> = c.edges.iter().map(usize::to_string).collect();
                println!("{}", line.join(" "));
            }
            let contract = balanced::verify_delta_contract(kc, f64::INFINITY);
            let (graded, _) = kc.is_d_graded();
            let report = json!({
                "d": rep.d,
                "copies": kc.len(),
                "minimal_c": contract.minimal_c,
                "tau": contract.tau,
                "target": rep.target,
                "mechanism_copies": rep.mechanism_copies,
                "sweep_copies": rep.sweep_copies,
                "z_checks": rep.z_checks,
                "max_z_ratio": rep.max_z_ratio,
                "violations": if graded { "none" } else { "not-graded" },
            });
            println!("{report}");
        }
        Cmd::Containers { n, k, h, eps, beta, verify, samples, seed } => {
            let h = read(&h, ms)?;
            let cert = tree_cert(&h)?.with_expansion()?;
            let tree = container::build_container_tree(n, k, &cert, eps, beta, &TreeOptions::default())?;
            for line in tree.json_lines() {
                println!("{line}");
            }
            let mut summary = json!({
                "summary": true,
                "nodes": tree.nodes.len(),
                "leaves": tree.leaf_count(),
                "depth": tree.depth(),
                "delta_min": tree.delta_min(),
                "threshold": tree.threshold,
                "forb_upper_log2": tree.forb_upper(),
                "leaf_formula_log2": tree.leaf_formula_log2(),
                "container_formula_log2": tree.container_formula_log2(),
            });
            if let Some(v) = verify {
                let (name, cov) = match v {
                    Verify::Exhaustive => ("exhaustive", container::verify_exhaustive(&tree)?),
                    Verify::Sampled => ("sampled", container::verify_sampled(&tree, samples, seed)?),
                };
                summary["verify"] = json!(name);
                summary["checked"] = json!(cov.checked);
                summary["misses"] = json!(cov.misses);
                println!("{summary}");
                if cov.misses > 0 {
                    bail!("{} H-free subgraphs escaped every leaf", cov.misses);
                }
            } else {
                println!("{summary}");
            }
        }
        Cmd::Ex { n, k, h } => extremal_csv(n, k, &h, ms, false)?,
        Cmd::Forb { n, k, h } => extremal_csv(n, k, &h, ms, true)?,
        Cmd::Experiment { config } => {
            let cfg = ExperimentConfig::read(&config)?;
            let out = harness::run_and_write(&cfg)?;
            println!("csv: {}", cfg.output.display());
            println!("manifest: {}", harness::manifest_path(&cfg.output).display());
            println!("rows: {}", out.manifest["rows"]);
        }
    }
    Ok(())
}

fn extremal_csv(n: usize, k: usize, hfile: &Path, ms: bool, with_forb: bool) -> Result<()> {
    let h = read(hfile, ms)?;
    let id = hfile.file_stem().map_or("h".into(), |s| s.to_string_lossy().into_owned());
    let r = oracle::extremal_report(n, k, &h, &id, with_forb)?;
    if !r.optimal {
        eprintln!("warning: branch and bound stopped early; ex is a lower bound");
    }
    println!("n,k,h_id,ex,forb_log2,normalized_ex");
    let forb = r.forb.as_ref().map_or(String::new(), |f| oracle::log2_big(f).to_string());
    println!("{},{},{},{},{},{}", r.n, r.k, r.h_id, r.ex, forb, r.normalized_ex);
    Ok(())
}
