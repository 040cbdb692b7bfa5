use std::path::Path;
use std::process::{Command, Output};

fn hx(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hx")).args(args).current_dir(dir).output().expect("hx runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "hx failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn shared_pair(dir: &Path) {
    std::fs::write(dir.join("sp.txt"), "4 6 2\n0 1 2 3\n0 1 4 5\n").unwrap();
}

fn complete(dir: &Path, name: &str, n: u32) {
    let mut lines = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    lines.push(format!("{a} {b} {c} {d}"));
                }
            }
        }
    }
    std::fs::write(dir.join(name), format!("4 {n} {}\n{}\n", lines.len(), lines.join("\n"))).unwrap();
}

#[test]
fn generated_cycle_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&hx(&["gen", "cycle", "--k", "4", "--ell", "5"], dir.path()));
    assert!(text.starts_with("4 15 5\n"));
    std::fs::write(dir.path().join("c5.txt"), &text).unwrap();
    let s = stdout(&hx(&["sigma", "c5.txt"], dir.path()));
    assert!(s.contains("sigma: 3"));
    assert!(stdout(&hx(&["tree-order", "c5.txt"], dir.path())).contains("hypertree: no"));
}

#[test]
fn covering_tree_is_a_tree() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&hx(&["gen", "covering-tree", "--k", "5", "--ell", "4"], dir.path()));
    std::fs::write(dir.path().join("t.txt"), text).unwrap();
    let out = stdout(&hx(&["tree-order", "t.txt"], dir.path()));
    assert!(out.starts_with("hypertree: yes"));
    assert!(stdout(&hx(&["sigma", "t.txt"], dir.path())).contains("sigma: 2"));
}

#[test]
fn ex_and_forb_csv() {
    let dir = tempfile::tempdir().unwrap();
    shared_pair(dir.path());
    let ex = stdout(&hx(&["ex", "--n", "6", "--k", "4", "--h", "sp.txt"], dir.path()));
    assert_eq!(ex, "n,k,h_id,ex,forb_log2,normalized_ex\n6,4,sp,5,,0.25\n");
    let forb = stdout(&hx(&["forb", "--n", "6", "--k", "4", "--h", "sp.txt"], dir.path()));
    let row: Vec<&str> = forb.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], "5");
    assert!((row[4].parse::<f64>().unwrap() - 192f64.log2()).abs() < 1e-9);
}

#[test]
fn count_exact() {
    let dir = tempfile::tempdir().unwrap();
    shared_pair(dir.path());
    complete(dir.path(), "k6.txt", 6);
    let out = stdout(&hx(&["count", "k6.txt", "sp.txt", "--exact"], dir.path()));
    // pairs of 4-sets in [6] sharing two vertices: complements are disjoint pairs
    assert!(out.contains("copies: 45"));
}

#[test]
fn filter_and_dichotomy() {
    let dir = tempfile::tempdir().unwrap();
    complete(dir.path(), "k8.txt", 8);
    let f = stdout(&hx(&["filter", "k8.txt", "--s", "8"], dir.path()));
    assert!(f.contains("rank:"));
    let d = stdout(&hx(&["dichotomy", "k8.txt", "--s", "8", "--eps", "0.5"], dir.path()));
    assert!(d.contains("outcome: type"));
    assert!(d.contains("w:"));
}

#[test]
fn balanced_report() {
    let dir = tempfile::tempdir().unwrap();
    shared_pair(dir.path());
    complete(dir.path(), "k8.txt", 8);
    let out = stdout(&hx(&["balanced", "k8.txt", "sp.txt", "--beta", "0.5", "--dense"], dir.path()));
    let last = out.lines().last().unwrap();
    let v: serde_json::Value = serde_json::from_str(last).unwrap();
    assert_eq!(v["violations"], "none");
    let copies = v["copies"].as_u64().unwrap();
    assert_eq!(out.lines().count() as u64, copies + 1);
    assert!(v["minimal_c"].as_f64().unwrap() > 0.0);
}

#[test]
fn containers_exhaustive() {
    let dir = tempfile::tempdir().unwrap();
    shared_pair(dir.path());
    let out = stdout(&hx(&["containers", "--n", "6", "--k", "4", "--h", "sp.txt", "--eps", "0.5", "--beta", "1", "--verify", "exhaustive"], dir.path()));
    let lines: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let root = &lines[0];
    assert_eq!(root["id"], 0);
    assert!(root["parent"].is_null());
    assert_eq!(root["edges"], 15);
    assert_eq!(root["leaf"], false);
    let summary = lines.last().unwrap();
    assert_eq!(summary["misses"], 0);
    assert_eq!(summary["verify"], "exhaustive");
}

#[test]
fn experiment_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "mode = \"random-turan\"\nk = 4\nn_min = 6\nn_max = 7\nh = \"shared-pair 4\"\np = [0.5, 1.0]\nseed = 11\ntrials = 2\noutput = \"rt.csv\"\n";
    std::fs::write(dir.path().join("exp.toml"), cfg).unwrap();
    stdout(&hx(&["experiment", "exp.toml"], dir.path()));
    let csv = std::fs::read_to_string(dir.path().join("rt.csv")).unwrap();
    assert!(csv.starts_with("n,p,trial,sampled,best,exact,normalized,construction\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("rt.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 11);
    assert!(m["wall_time_s"].as_f64().is_some());
    assert!(m["versions"]["hx-core"].is_string());
    stdout(&hx(&["experiment", "exp.toml"], dir.path()));
    assert_eq!(std::fs::read_to_string(dir.path().join("rt.csv")).unwrap(), csv);
}

#[test]
fn duplicate_edges_need_multiset() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("d.txt"), "4 6 2\n0 1 2 3\n3 2 1 0\n").unwrap();
    assert!(!hx(&["sigma", "d.txt"], dir.path()).status.success());
    assert!(stdout(&hx(&["--multiset", "sigma", "d.txt"], dir.path())).contains("sigma: 1"));
}
