//! Family, pair and report files, and their provenance hashes.

use tangency::experiments::report::{read_csv, to_csv};
use tangency::experiments::{run_exact_ct, ExperimentConfig};
use tangency::families::gen_clamshell;
use tangency::incidence::{bin_dyadic, count_ct_delta_hashed};
use tangency::io::{family_hash, read_family, read_pairs, write_family, write_pairs};

fn main() {
    let x = gen_clamshell(5).unwrap();
    let text = write_family(&x);
    print!("{text}");
    let back = read_family(&text).unwrap();
    assert_eq!(back.points(), x.points());

    let pairs = bin_dyadic(&count_ct_delta_hashed(&x, 1e-6).unwrap(), &x).unwrap();
    let ptext = write_pairs(&pairs, &x);
    print!("{ptext}");
    let (hash, read) = read_pairs(&ptext).unwrap();
    println!("pairs file refers to family {} ({} pairs)", hash.unwrap(), read.len());
    assert_eq!(family_hash(&back), family_hash(&x));

    let cfg = ExperimentConfig::from_toml("[exact_ct]\nn = [2, 3, 4]\ncontrol_n = 0\n").unwrap();
    let rep = run_exact_ct(cfg.exact_ct.as_ref().unwrap()).unwrap();
    let csv = to_csv(&[rep], &cfg.hash());
    print!("{csv}");
    println!("{} rows parsed back", read_csv(&csv).unwrap().1.len());
}
