use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use skillscape_core::econometrics::{generate_synthetic, ols, Design, SeMode, SynthConfig};
use skillscape_core::{
    binarize, build_relatedness, complexity_potential, compute_complexity, compute_rca, density, skill_proximity,
    ComplexityMethod, ComplexityOptions,
};

fn bundle(cities: usize, industries: usize) -> skillscape_core::econometrics::SyntheticBundle {
    generate_synthetic(&SynthConfig {
        cities,
        industries,
        years: 2,
        firms_per_city: 0,
        ..SynthConfig::default()
    })
    .unwrap()
}

fn complexity(c: &mut Criterion) {
    let mut g = c.benchmark_group("complexity");
    for (nc, ni) in [(60, 60), (200, 300)] {
        let b = bundle(nc, ni);
        let year = b.city_employment.years()[0];
        let label = format!("{nc}x{ni}");
        g.bench_with_input(BenchmarkId::new("rca_presence", &label), &b, |bch, b| {
            bch.iter(|| binarize(&compute_rca(black_box(&b.city_employment), year).unwrap(), 1.0).unwrap())
        });
        let m = binarize(&compute_rca(&b.city_employment, year).unwrap(), 1.0).unwrap();
        for method in [ComplexityMethod::Eigenvector, ComplexityMethod::Reflections] {
            let opts = ComplexityOptions {
                method,
                ..ComplexityOptions::default()
            };
            g.bench_with_input(BenchmarkId::new(format!("{method:?}"), &label), &m, |bch, m| {
                bch.iter(|| compute_complexity(black_box(m), &opts))
            });
        }
    }
    g.finish();
}

fn relatedness(c: &mut Criterion) {
    let mut g = c.benchmark_group("relatedness");
    let b = bundle(200, 300);
    let year = b.city_employment.years()[0];
    let m = binarize(&compute_rca(&b.city_employment, year).unwrap(), 1.0).unwrap();
    let flows = b.flows.align_to(&m.industries);
    g.bench_function("proximity_and_e", |bch| {
        bch.iter(|| build_relatedness(&skill_proximity(black_box(&flows)).unwrap()))
    });
    let e = build_relatedness(&skill_proximity(&flows).unwrap());
    let ci = compute_complexity(&m, &ComplexityOptions::default());
    g.bench_function("density_and_cp", |bch| {
        bch.iter(|| {
            let d = density(black_box(&e), &m, true).unwrap();
            complexity_potential(&d, &ci).unwrap()
        })
    });
    g.finish();
}

fn regression(c: &mut Criterion) {
    let mut g = c.benchmark_group("ols");
    for n in [500usize, 5000] {
        let cols: Vec<Vec<f64>> = (0..6)
            .map(|j| (0..n).map(|k| ((k * (j + 3) * 7919) % 1009) as f64 / 1009.0).collect())
            .collect();
        let y: Vec<f64> = (0..n)
            .map(|k| cols.iter().map(|c| c[k]).sum::<f64>() + (k % 13) as f64 * 0.01)
            .collect();
        let mut d = Design::with_intercept(n);
        for (j, col) in cols.into_iter().enumerate() {
            d.add(format!("x{j}"), col);
        }
        g.bench_with_input(BenchmarkId::new("hc1", n), &(y, d), |bch, (y, d)| {
            bch.iter(|| ols(black_box(y), d, SeMode::Robust).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, complexity, relatedness, regression);
criterion_main!(benches);
