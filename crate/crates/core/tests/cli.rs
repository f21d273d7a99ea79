use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn tangency(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tangency"))
        .args(args)
        .current_dir(dir)
        .env_remove("TANGENCY_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data_rows(text: &str) -> usize {
    text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).count()
}

fn strip_runtime(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn generate_echoes_parameters() {
    let dir = TempDir::new().unwrap();
    let o = tangency(
        &["generate", "--kind", "wellspaced", "--R", "4096", "--rho", "64", "--eps", "0.1", "--seed", "1", "-o", "fam.txt"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("fam.txt")).unwrap();
    let header = text.lines().next().unwrap();
    for f in ["generator=wellspaced", "R=4096", "rho=64", "eps=0.1", "seed=1"] {
        assert!(header.contains(f), "{header}");
    }
    let again = tangency(
        &["generate", "--kind", "wellspaced", "--R", "4096", "--rho", "64", "--eps", "0.1", "--seed", "1"],
        dir.path(),
    );
    assert_eq!(stdout(&again), text);
}

#[test]
fn generate_clamshell_rows() {
    let dir = TempDir::new().unwrap();
    let o = tangency(&["generate", "--kind", "clamshell", "--N", "100"], dir.path());
    assert!(o.status.success());
    assert_eq!(data_rows(&stdout(&o)), 100);
}

#[test]
fn generate_rejects_large_rho() {
    let dir = TempDir::new().unwrap();
    let o = tangency(&["generate", "--kind", "wellspaced", "--R", "4096", "--rho", "100", "--eps", "0.1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rho"));
    assert_eq!(stderr(&o).trim().lines().count(), 1);
}

#[test]
fn count_clamshell_and_oracle() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert!(tangency(&["generate", "--kind", "clamshell", "--N", "10", "-o", "c.txt"], d).status.success());
    for delta in ["0.1", "1e-6"] {
        let o = tangency(&["count", "c.txt", "--delta", delta, "-o", "fast.txt"], d);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("|X|=10 |CT_delta|=45"), "{}", stdout(&o));
    }
    let o = tangency(&["count", "c.txt", "--delta", "0.01", "--oracle", "-o", "slow.txt"], d);
    assert!(o.status.success());
    assert!(tangency(&["count", "c.txt", "--delta", "0.01", "-o", "fast.txt"], d).status.success());
    assert_eq!(fs::read(d.join("slow.txt")).unwrap(), fs::read(d.join("fast.txt")).unwrap());
}

#[test]
fn count_exact_lattice_with_buckets() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert!(tangency(&["generate", "--kind", "lattice", "--N", "4", "-o", "l.txt"], d).status.success());
    let o = tangency(&["count", "l.txt", "--exact", "--bin", "-o", "p.txt"], d);
    assert!(o.status.success());
    assert!(stdout(&o).contains("|CT_delta|=600"), "{}", stdout(&o));
    let pairs = fs::read_to_string(d.join("p.txt")).unwrap();
    assert!(pairs.lines().nth(1).unwrap().starts_with("# buckets=0:320,1:180,2:100"));
    let oracle = tangency(&["count", "l.txt", "--exact", "--bin", "--oracle", "-o", "q.txt"], d);
    assert!(oracle.status.success());
    assert_eq!(pairs, fs::read_to_string(d.join("q.txt")).unwrap());
}

#[test]
fn count_rejects_bad_files() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("empty.txt"), "").unwrap();
    assert_eq!(tangency(&["count", "empty.txt", "--delta", "0.1"], d).status.code(), Some(2));
    fs::write(d.join("bad.txt"), "0 0 1\n1 x 2\n").unwrap();
    let o = tangency(&["count", "bad.txt", "--delta", "0.1"], d);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    assert_eq!(tangency(&["count", "missing.txt", "--delta", "0.1"], d).status.code(), Some(2));
}

#[test]
fn planks_summary_and_richness() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let o = tangency(&["planks", "--R", "16", "--verify"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("|P|="));
    assert!(tangency(&["generate", "--kind", "grid", "--R", "16", "--rho", "4", "-o", "g.txt"], d).status.success());
    let o = tangency(&["planks", "--R", "16", "--family", "g.txt", "-o", "rich.txt"], d);
    assert!(o.status.success());
    let rich = fs::read_to_string(d.join("rich.txt")).unwrap();
    assert!(rich.starts_with("# family_hash="));
    assert!(data_rows(&rich) > 0);
}

const CHERNOFF: &str = "[chernoff]\nn = [100, 1000]\np = [0.05, 0.1]\ntrials = 20000\n";

#[test]
fn experiment_chernoff_passes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("c.toml"), CHERNOFF).unwrap();
    let o = tangency(&["experiment", "--config", "c.toml", "-o", "rep"], d);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let csv = fs::read_to_string(d.join("rep.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("experiment,R,rho,delta,eps,K,seed,lhs"));
    let js: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("rep.json")).unwrap()).unwrap();
    assert_eq!(js["passed"], true);
}

#[test]
fn experiment_is_deterministic_and_seedable() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("c.toml"), CHERNOFF).unwrap();
    assert!(tangency(&["experiment", "--config", "c.toml", "-o", "a"], d).status.success());
    assert!(tangency(&["experiment", "--config", "c.toml", "--workers", "1", "-o", "b"], d).status.success());
    let a = fs::read_to_string(d.join("a.csv")).unwrap();
    let b = fs::read_to_string(d.join("b.csv")).unwrap();
    assert_eq!(strip_runtime(&a), strip_runtime(&b));

    let o = Command::new(env!("CARGO_BIN_EXE_tangency"))
        .args(["experiment", "--config", "c.toml", "-o", "s"])
        .current_dir(d)
        .env("TANGENCY_SEED", "99")
        .output()
        .unwrap();
    assert!(o.status.success());
    let s = fs::read_to_string(d.join("s.csv")).unwrap();
    assert!(s.lines().nth(2).unwrap().contains(",99,"), "{s}");
    assert_ne!(strip_runtime(&a), strip_runtime(&s));
}

#[test]
fn experiment_rejects_malformed_configs() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    for (i, bad) in ["[rectangle_bound]\nR = []\n", "[chernoff]\np = [2.0]\n", "not toml ["].iter().enumerate() {
        let name = format!("bad{i}.toml");
        fs::write(d.join(&name), bad).unwrap();
        assert_eq!(tangency(&["experiment", "--config", &name], d).status.code(), Some(2), "{bad}");
    }
    fs::write(d.join("c.toml"), CHERNOFF).unwrap();
    assert_eq!(tangency(&["experiment", "--config", "c.toml", "--only", "nope"], d).status.code(), Some(2));
}

#[test]
fn experiment_gate_failure_exits_one() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("l.toml"), "[plank_sum]\nfamilies = 1\nsize = 200\ndelta = 0.02\nratio_max = 1e-9\n").unwrap();
    let o = tangency(&["experiment", "--config", "l.toml", "-o", "l"], d);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn plotdata_series_and_checks() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(
        d.join("r.toml"),
        "[rectangle_bound]\nR = [16, 32, 64]\nK = [2, 4]\ncontrol_n = 0\n",
    )
    .unwrap();
    let o = tangency(&["experiment", "--config", "r.toml", "-o", "rect"], d);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = tangency(&["plotdata", "rect.csv", "-o", "plots"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let files: Vec<_> = fs::read_dir(d.join("plots")).unwrap().collect();
    assert_eq!(files.len(), 2);
    let series = fs::read_to_string(d.join("plots/rectangle_bound_rho=R^0.50_K=2.dat")).unwrap();
    assert_eq!(data_rows(&series), 3);

    let csv = fs::read_to_string(d.join("rect.csv")).unwrap();
    fs::write(d.join("edited.csv"), csv.replace(",2,", ",3,")).unwrap();
    fs::copy(d.join("rect.json"), d.join("edited.json")).unwrap();
    assert_eq!(tangency(&["plotdata", "edited.csv", "-o", "p2"], d).status.code(), Some(2));

    fs::write(d.join("empty.csv"), "experiment,R,rho,delta,eps,K,seed,lhs,rhs,ratio,mu_hat,pass,runtime_ms\n").unwrap();
    let o = tangency(&["plotdata", "empty.csv", "-o", "p3"], d);
    assert_eq!(o.status.code(), Some(0));
    assert!(!d.join("p3").exists());

    fs::write(d.join("cols.csv"), "experiment,R,ratio\nx,1,1\n").unwrap();
    assert_eq!(tangency(&["plotdata", "cols.csv"], d).status.code(), Some(2));
}
