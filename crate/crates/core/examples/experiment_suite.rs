//! Runs every experiment at its default parameters and prints the gates.

use tangency::experiments::{run_all, ExperimentConfig};

fn main() {
    let cfg = ExperimentConfig::all_defaults();
    let reports = run_all(&cfg).expect("default config is valid");
    for rep in &reports {
        println!("[{}] rows={} pass_rate={:?}", rep.experiment, rep.rows.len(), rep.pass_rate());
        for g in &rep.gates {
            println!("  {} {}: {}", if g.passed { "ok  " } else { "FAIL" }, g.name, g.detail);
        }
        for (k, v) in &rep.values {
            println!("  {k} = {v}");
        }
        for n in rep.notes.iter().take(6) {
            println!("  note: {n}");
        }
    }
}
