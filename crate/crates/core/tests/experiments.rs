use tangency::experiments::config::{CtBoundConfig, PlankSumConfig};
use tangency::experiments::{run_ct_bound, run_plank_sum, ExperimentReport, ReportRow};
use tangency::families::{gen_maximal_separated, gen_uniform, GridBox};
use tangency::incidence::{count_ct_delta_bruteforce, dyadic_exponent};
use tangency::io::{family_hash, read_family, write_family};

fn rows_without_runtime(r: &ExperimentReport) -> Vec<ReportRow> {
    r.rows.iter().map(|row| ReportRow { runtime_ms: 0, ..row.clone() }).collect()
}

#[test]
fn ct_rows_are_recomputable_from_serialized_families() {
    let cfg = CtBoundConfig {
        delta: vec![1.0 / 8.0, 1.0 / 16.0],
        rho: vec![4.0],
        oracle_max: 0,
    };
    let rep = run_ct_bound(&cfg).unwrap();
    assert_eq!(rows_without_runtime(&rep), rows_without_runtime(&run_ct_bound(&cfg).unwrap()));
    for (row, hash) in rep.rows.iter().zip(&rep.row_families) {
        let delta = row.delta.unwrap();
        let x = gen_maximal_separated(1.0 / delta, row.rho.unwrap(), GridBox::Annular)
            .unwrap()
            .scaled(delta);
        let back = read_family(&write_family(&x)).unwrap();
        assert_eq!(&family_hash(&back), hash);
        assert!(back.len() <= 2000);
        let brute = count_ct_delta_bruteforce(&back, delta).unwrap();
        assert_eq!(row.lhs, 2.0 * brute.len() as f64);
    }
}

#[test]
fn plank_sum_rows_are_recomputable() {
    let cfg = PlankSumConfig {
        families: 2,
        size: 300,
        delta: 0.02,
        ..PlankSumConfig::default()
    };
    let rep = run_plank_sum(&cfg, 11).unwrap();
    assert_eq!(rows_without_runtime(&rep), rows_without_runtime(&run_plank_sum(&cfg, 11).unwrap()));
    for (row, hash) in rep.rows.iter().zip(&rep.row_families) {
        let x = read_family(&write_family(&gen_uniform(cfg.size, row.seed.unwrap()).unwrap())).unwrap();
        assert_eq!(&family_hash(&x), hash);
        let d = dyadic_exponent(row.r.unwrap());
        let pts = x.points();
        let in_bucket = count_ct_delta_bruteforce(&x, cfg.delta)
            .unwrap()
            .pairs
            .iter()
            .filter(|&&(i, j)| dyadic_exponent(pts[i as usize].distance(&pts[j as usize])) == d)
            .count();
        assert_eq!(row.lhs, in_bucket as f64);
    }
}
