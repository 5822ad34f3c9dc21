use omnicorr_sim::{run, ExperimentConfig};

const CONFIG: &str = include_str!("golden/corr_sweep_m3.toml");
const EXPECTED: &str = include_str!("golden/corr_sweep_m3.csv");

#[test]
fn corr_sweep_matches_frozen_output() {
    let cfg = ExperimentConfig::from_toml(CONFIG).unwrap();
    let report = run(&cfg).unwrap();
    assert_eq!(report.rows.len(), 3);
    assert_eq!(report.to_csv().unwrap(), EXPECTED);
}

#[test]
fn frozen_values_agree_with_the_classical_closed_form() {
    // 3/4 + R/4 with R = (0.6, 0.18, 0.3) for pairs (0,1), (0,2), (1,2).
    let rows: Vec<Vec<f64>> = EXPECTED
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    for (row, r) in rows.iter().zip([0.6, 0.18, 0.3]) {
        assert!((row[2] - (0.75 + r / 4.0)).abs() < 1e-12);
        assert!((row[7] - r).abs() < 1e-12);
    }
}
