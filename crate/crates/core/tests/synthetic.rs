use skillscape_core::econometrics::{generate_synthetic, scaling_summary, SynthConfig};
use skillscape_core::stats::{pearson, slope};
use skillscape_core::{binarize, compute_rca};

fn tree(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn same_seed_writes_identical_files() {
    let cfg = SynthConfig::default();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    generate_synthetic(&cfg).unwrap().write_to(a.path()).unwrap();
    generate_synthetic(&cfg).unwrap().write_to(b.path()).unwrap();
    let (ta, tb) = (tree(a.path()), tree(b.path()));
    assert!(!ta.is_empty());
    assert_eq!(ta, tb);

    let other = SynthConfig {
        seed: cfg.seed + 1,
        ..cfg
    };
    let c = tempfile::tempdir().unwrap();
    generate_synthetic(&other).unwrap().write_to(c.path()).unwrap();
    assert_ne!(tree(c.path()), ta);
}

#[test]
fn invalid_configs_are_rejected() {
    for cfg in [
        SynthConfig {
            nesting: 1.5,
            ..SynthConfig::default()
        },
        SynthConfig {
            cities: 0,
            ..SynthConfig::default()
        },
    ] {
        assert!(generate_synthetic(&cfg).is_err(), "{cfg:?}");
    }
}

#[test]
fn diversity_and_top_decile_rates_grow_with_size() {
    let b = generate_synthetic(&SynthConfig::scaling(3)).unwrap();
    let year = b.city_employment.years()[0];
    let m = binarize(&compute_rca(&b.city_employment, year).unwrap(), 1.0).unwrap();
    let s = scaling_summary(&b.city_employment, &b.city_population, &b.planted_ci, &m, year).unwrap();
    assert!(s.diversity_log_wap.unwrap() > 0.5, "{:?}", s.diversity_log_wap);
    assert!(s.mean_ci_log_wap.unwrap() > 0.5, "{:?}", s.mean_ci_log_wap);

    let log_wap: Vec<f64> = s.cities.iter().map(|c| c.wap.ln()).collect();
    let observed: Vec<f64> = s.cities.iter().map(|c| c.diversity as f64).collect();
    let planted: Vec<f64> = s.cities.iter().map(|c| b.planted_diversity[&c.city] as f64).collect();
    assert!(pearson(&observed, &planted).unwrap() > 0.8);
    let (so, sp) = (slope(&log_wap, &observed).unwrap(), slope(&log_wap, &planted).unwrap());
    assert!((so - sp).abs() <= 0.25 * sp.abs(), "observed {so} vs planted {sp}");

    let top: Vec<f64> = s.cities.iter().map(|c| c.decile_rates[9]).collect();
    let low: Vec<f64> = s.cities.iter().map(|c| c.decile_rates[0]).collect();
    let (st, sl) = (slope(&log_wap, &top).unwrap(), slope(&log_wap, &low).unwrap());
    assert!(st > 0.0 && st > sl, "top {st} vs bottom {sl}");
}
