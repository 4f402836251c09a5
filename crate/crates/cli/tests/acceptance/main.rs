//! Acceptance checks. Each criterion prints one PASS or FAIL line; the
//! process exits non-zero if any of them fails.

mod oracles;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use skillscape_core::complexity::{binarize, compute_complexity, compute_rca, rca_from_matrix};
use skillscape_core::delineation::is_fixed_point;
use skillscape_core::econometrics::{
    build_growth_frame, decile_slopes, elasticity_regression, generate_synthetic, growth_regression, ols,
    theil_entropy, Design, GrowthOptions, GrowthSpec, SeMode, SynthConfig,
};
use skillscape_core::relatedness::{build_relatedness, complexity_potential, density, skill_proximity};
use skillscape_core::stats::spearman;
use skillscape_core::yearly::StackOptions;
use skillscape_core::{
    delineate_metros, CommutingTable, ComplexityMethod, ComplexityOptions, ComplexityScores, DelineationParams,
    EmploymentPanel, FlowMatrix, MetroAssignment, PresenceMatrix, Registry,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

fn codes(prefix: &str, n: usize) -> Registry {
    Registry::from_codes((0..n).map(|k| format!("{prefix}{k:03}")))
}

fn random_employment(rng: &mut ChaCha8Rng, nc: usize, ni: usize) -> DMatrix<f64> {
    loop {
        let f = DMatrix::from_fn(nc, ni, |_, _| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(1.0..1000.0_f64).round()
            }
        });
        let rows_ok = (0..nc).all(|c| f.row(c).sum() > 0.0);
        let cols_ok = (0..ni).all(|i| f.column(i).sum() > 0.0);
        if rows_ok && cols_ok {
            return f;
        }
    }
}

fn panel_of(f: &DMatrix<f64>) -> EmploymentPanel {
    let (cities, inds) = (codes("c", f.nrows()), codes("i", f.ncols()));
    let mut rows = Vec::new();
    for c in 0..f.nrows() {
        for i in 0..f.ncols() {
            if f[(c, i)] > 0.0 {
                rows.push((cities.code(c).to_string(), inds.code(i).to_string(), 2000, f[(c, i)]));
            }
        }
    }
    EmploymentPanel::from_rows(rows).expect("valid fixture")
}

fn random_flows(rng: &mut ChaCha8Rng, n: usize) -> FlowMatrix {
    loop {
        let counts = DMatrix::from_fn(n, n, |i, j| {
            if i == j || rng.random_bool(0.3) {
                0.0
            } else {
                rng.random_range(0..60) as f64
            }
        });
        if counts.sum() > 0.0 {
            return FlowMatrix::new(codes("i", n), counts).expect("valid flows");
        }
    }
}

fn rca_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut cells = 0;
    for _ in 0..20 {
        let f = random_employment(&mut rng, 10, 15);
        let lib = compute_rca(&panel_of(&f), 2000).map_err(|e| e.to_string())?;
        let m = binarize(&lib, 1.0).map_err(|e| e.to_string())?;
        let want = oracles::rca(&f);
        for c in 0..10 {
            for i in 0..15 {
                let (a, b) = (lib.values[(c, i)], want[(c, i)]);
                ensure(close(a, b, 1e-12), || format!("RCA[{c},{i}] {a} vs {b}"))?;
                let present = if b > 1.0 { 1.0 } else { 0.0 };
                ensure(m.m[(c, i)] == present, || format!("M[{c},{i}] disagrees with RCA {b}"))?;
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells match"))
}

fn random_presence(rng: &mut ChaCha8Rng, nc: usize, ni: usize) -> PresenceMatrix {
    loop {
        let p = rng.random_range(0.2..0.5);
        let m = DMatrix::from_fn(nc, ni, |_, _| if rng.random_bool(p) { 1.0 } else { 0.0 });
        let rows_ok = (0..nc).all(|c| m.row(c).sum() > 0.0);
        let cols_ok = (0..ni).all(|i| m.column(i).sum() > 0.0);
        if rows_ok && cols_ok {
            return PresenceMatrix::from_binary(codes("c", nc), codes("i", ni), m);
        }
    }
}

fn complexity_cross_validation() -> Check {
    let eig = ComplexityOptions::default();
    let refl = ComplexityOptions {
        method: ComplexityMethod::Reflections,
        iterations: 50,
        ..ComplexityOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut low = Vec::new();
    for k in 0..20 {
        let m = random_presence(&mut rng, 15, 25);
        let a = compute_complexity(&m, &eig);
        let b = compute_complexity(&m, &refl);
        ensure(a.diagnostics.method_used == ComplexityMethod::Eigenvector, || {
            format!("fixture {k}: eigenvector route fell back to reflections")
        })?;
        let rho = spearman(&a.raw, &b.raw).ok_or("constant scores")?;
        if rho < 0.99 {
            low.push(format!("fixture {k} at {rho:.4}"));
        }
    }
    ensure(low.is_empty(), || {
        format!("{}/20 fixtures below 0.99: {}", low.len(), low.join(", "))
    })?;

    // City c holds the first 25 - round(24c/14) industries.
    let nested = DMatrix::from_fn(15, 25, |c, i| {
        let keep = 25 - (24.0 * c as f64 / 14.0).round() as usize;
        if i < keep {
            1.0
        } else {
            0.0
        }
    });
    let m = PresenceMatrix::from_binary(codes("c", 15), codes("i", 25), nested);
    let s = compute_complexity(&m, &eig);
    for a in 0..25 {
        for b in 0..25 {
            let (ua, ub) = (m.ubiquity[a], m.ubiquity[b]);
            let (ca, cb) = (s.ci[a], s.ci[b]);
            if ua < ub {
                ensure(ca > cb, || format!("nested: ubiquity {ua} < {ub} but ci {ca} <= {cb}"))?;
            } else if ua == ub {
                ensure((ca - cb).abs() < 1e-9, || {
                    format!("nested: equal ubiquity {ua} but ci {ca} vs {cb}")
                })?;
            }
        }
    }
    Ok("20 fixtures at or above 0.99; nested order exact".into())
}

fn relatedness_algebra() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pairs = 0;
    for k in 0..1000 {
        let n = rng.random_range(4..14);
        let flows = random_flows(&mut rng, n);
        let sp = skill_proximity(&flows).map_err(|e| e.to_string())?;
        let e = build_relatedness(&sp);
        for i in 0..n {
            for j in 0..n {
                let v = e.e[(i, j)];
                ensure(v == e.e[(j, i)], || format!("matrix {k}: E not symmetric at ({i},{j})"))?;
                ensure((-1.0..=1.0).contains(&v), || format!("matrix {k}: E[{i},{j}] = {v}"))?;
                if i != j && sp.defined[(i, j)] && sp.defined[(j, i)] {
                    let s = (sp.values[(i, j)] + sp.values[(j, i)]) / 2.0;
                    ensure((v > 0.0) == (s > 1.0), || {
                        format!("matrix {k}: E {v} vs averaged SP {s}")
                    })?;
                    pairs += 1;
                }
            }
        }

        let scale = rng.random_range(0.01..100.0);
        let scaled = FlowMatrix::new(flows.industries().clone(), flows.counts() * scale).expect("valid flows");
        let sp2 = skill_proximity(&scaled).map_err(|e| e.to_string())?;
        let e2 = build_relatedness(&sp2);
        for (a, b) in sp
            .values
            .iter()
            .zip(sp2.values.iter())
            .chain(e.e.iter().zip(e2.e.iter()))
        {
            ensure(close(*a, *b, 1e-12), || {
                format!("matrix {k}: scaling by {scale} moved {a} to {b}")
            })?;
        }
        let m = random_presence(&mut rng, 6, n);
        let ci = ComplexityScores::from_ci(flows.industries().clone(), (0..n).map(|_| rng.random()).collect());
        let d1 = density(&e, &m, true).map_err(|e| e.to_string())?;
        let d2 = density(&e2, &m, true).map_err(|e| e.to_string())?;
        let p1 = complexity_potential(&d1, &ci).map_err(|e| e.to_string())?;
        let p2 = complexity_potential(&d2, &ci).map_err(|e| e.to_string())?;
        for (a, b) in d1.density.iter().zip(d2.density.iter()).chain(p1.cp.iter().zip(&p2.cp)) {
            ensure(close(*a, *b, 1e-12), || {
                format!("matrix {k}: density/CP moved {a} to {b}")
            })?;
        }
    }
    Ok(format!("1000 matrices, {pairs} defined pairs"))
}

fn density_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..10 {
        let f = random_employment(&mut rng, 8, 12);
        let rca = rca_from_matrix(codes("c", 8), codes("i", 12), &f).map_err(|e| e.to_string())?;
        let m = binarize(&rca, 1.0).map_err(|e| e.to_string())?;
        let e = build_relatedness(&skill_proximity(&random_flows(&mut rng, 12)).map_err(|e| e.to_string())?);
        let ci: Vec<f64> = (0..12).map(|_| rng.random()).collect();
        let scores = ComplexityScores::from_ci(codes("i", 12), ci.clone());
        let d = density(&e, &m, true).map_err(|e| e.to_string())?;
        let cp = complexity_potential(&d, &scores).map_err(|e| e.to_string())?;
        let (want_d, want_cp) = oracles::density_and_cp(&oracles::rca(&f), &e.e, &ci);
        for c in 0..8 {
            for i in 0..12 {
                let (a, b) = (d.density[(c, i)], want_d[(c, i)]);
                ensure(close(a, b, 1e-12), || {
                    format!("fixture {k}: density[{c},{i}] {a} vs {b}")
                })?;
            }
            let (a, b) = (cp.cp[c], want_cp[c]);
            ensure(close(a, b, 1e-12), || format!("fixture {k}: CP[{c}] {a} vs {b}"))?;
        }
    }
    Ok("10 fixtures match".into())
}

fn ols_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let std = Normal::new(0.0, 1.0).unwrap();
    let n = 200;
    for k in 0..20 {
        let p = rng.random_range(1..=5);
        let z: Vec<Vec<f64>> = (0..=p)
            .map(|_| (0..n).map(|_| std.sample(&mut rng)).collect())
            .collect();
        let cols: Vec<Vec<f64>> = (1..=p)
            .map(|j| (0..n).map(|r| z[j][r] + 0.6 * z[0][r] + j as f64).collect())
            .collect();
        let y: Vec<f64> = (0..n)
            .map(|r| {
                let signal: f64 = cols.iter().enumerate().map(|(j, c)| (j as f64 - 1.5) * c[r]).sum();
                signal + 2.0 + (1.0 + cols[0][r].abs()) * std.sample(&mut rng)
            })
            .collect();
        let mut design = Design::with_intercept(n);
        for (j, c) in cols.iter().enumerate() {
            design.add(format!("x{j}"), c.clone());
        }
        let lib = ols(&y, &design, SeMode::Robust).map_err(|e| e.to_string())?;
        let x = DMatrix::from_fn(n, p + 1, |r, j| if j == 0 { 1.0 } else { cols[j - 1][r] });
        let want = oracles::ols(&x, &DVector::from_vec(y));
        let tol = 1e-8;
        for j in 0..=p {
            ensure(close(lib.coef[j], want.coef[j], tol), || {
                format!("design {k}: coef {j}")
            })?;
            ensure(close(lib.se[j], want.se_hc1[j], tol), || {
                format!("design {k}: robust se {j}")
            })?;
        }
        for j in 1..=p {
            let v = lib.vif[j].ok_or("missing VIF")?;
            ensure(close(v, want.vif[j - 1], tol), || {
                format!("design {k}: VIF {j} {v} vs {}", want.vif[j - 1])
            })?;
        }
        ensure(close(lib.r2, want.r2, tol), || format!("design {k}: R2"))?;
        ensure(close(lib.aic, want.aic, tol), || {
            format!("design {k}: AIC {} vs {}", lib.aic, want.aic)
        })?;
        ensure(close(lib.bic, want.bic, tol), || {
            format!("design {k}: BIC {} vs {}", lib.bic, want.bic)
        })?;
    }

    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let p = 5;
        let raw = DMatrix::from_fn(n, p + 1, |_, j| if j == 0 { 1.0 } else { std.sample(&mut rng) });
        let q = raw.qr().q();
        let mut design = Design::with_intercept(n);
        for j in 1..=p {
            design.add(format!("q{j}"), q.column(j).iter().map(|v| v * 10.0).collect());
        }
        let y: Vec<f64> = (0..n).map(|_| std.sample(&mut rng)).collect();
        let r = ols(&y, &design, SeMode::Robust).map_err(|e| e.to_string())?;
        for v in r.vif.iter().flatten() {
            worst = worst.max((v - 1.0).abs());
        }
    }
    ensure(worst <= 1e-10, || format!("orthogonal design VIF off by {worst:e}"))?;
    Ok(format!("20 designs match; orthogonal |VIF-1| <= {worst:.1e}"))
}

fn elasticity_recovery() -> Check {
    let (mut covered, mut signed) = (0, 0);
    for seed in 0..100 {
        let b = generate_synthetic(&SynthConfig::elasticity(seed)).map_err(|e| e.to_string())?;
        let (beta, gamma) = (b.config.beta, b.config.gamma);
        let e = elasticity_regression(
            &b.city_employment,
            &b.city_population,
            &b.planted_ci,
            true,
            SeMode::Robust,
        )
        .map_err(|e| e.to_string())?;
        if (e.beta - beta).abs() <= 3.0 * e.beta_se && (e.gamma - gamma).abs() <= 3.0 * e.gamma_se {
            covered += 1;
        }
        let d = decile_slopes(&b.city_employment, &b.city_population, &b.planted_ci, SeMode::Robust)
            .map_err(|e| e.to_string())?;
        if d.gap().signum() == gamma.signum() {
            signed += 1;
        }
    }
    let msg = format!("both within 3 SE in {covered}/100; decile gap sign in {signed}/100");
    ensure(covered >= 95 && signed >= 95, || msg.clone())?;
    Ok(msg)
}

fn growth_recovery() -> Check {
    let count = |coupling: f64| -> Result<(usize, usize), String> {
        let (mut sig, mut pos_sig) = (0, 0);
        for seed in 0..100 {
            let b = generate_synthetic(&SynthConfig::growth(seed, coupling)).map_err(|e| e.to_string())?;
            let e = build_relatedness(&skill_proximity(&b.flows).map_err(|e| e.to_string())?);
            let (frame, _) = build_growth_frame(
                &b.city_employment,
                &b.city_population,
                &e,
                Some(&b.aux),
                &StackOptions::default(),
            )
            .map_err(|e| e.to_string())?;
            let g = growth_regression(&frame, &GrowthSpec::Table5(3), &GrowthOptions::default())
                .map_err(|e| e.to_string())?;
            let coef = g.result.coef_of("cp_lag").ok_or("cp_lag dropped")?;
            let p = g.result.p_of("cp_lag").ok_or("cp_lag dropped")?;
            if p < 0.05 {
                sig += 1;
                if coef > 0.0 {
                    pos_sig += 1;
                }
            }
        }
        Ok((sig, pos_sig))
    };
    let (_, power) = count(0.05)?;
    let (size, _) = count(0.0)?;
    let msg = format!("positive and significant {power}/100 with coupling; significant {size}/100 without");
    ensure(power >= 90 && size <= 10, || msg.clone())?;
    Ok(msg)
}

fn commuting_table(links: &[(String, String, f64)], pops: &[(String, f64)]) -> CommutingTable {
    CommutingTable::new(links, pops).expect("valid commuting fixture")
}

fn random_commuting(rng: &mut ChaCha8Rng, n: usize) -> CommutingTable {
    let names: Vec<String> = (0..n).map(|k| format!("m{k:03}")).collect();
    let pops: Vec<(String, f64)> = names
        .iter()
        .map(|m| (m.clone(), rng.random_range(8.0..13.5_f64).exp()))
        .collect();
    let mut links = Vec::new();
    for (o, name) in names.iter().enumerate() {
        let mut budget = rng.random_range(0.02..0.3);
        let mut targets: Vec<usize> = (0..n).filter(|&d| d != o).collect();
        for _ in 0..rng.random_range(1..4) {
            let d = targets.swap_remove(rng.random_range(0..targets.len()));
            let s: f64 = rng.random_range(0.0..budget);
            budget -= s;
            links.push((name.clone(), names[d].clone(), s));
        }
    }
    commuting_table(&links, &pops)
}

fn delineation_checks() -> Check {
    let s = |v: &str| v.to_string();
    let hand = commuting_table(
        &[
            (s("A"), s("B"), 0.15),
            (s("C"), s("B"), 0.05),
            (s("C"), s("A"), 0.02),
            (s("B"), s("C"), 0.01),
            (s("A"), s("C"), 0.03),
        ],
        &[(s("A"), 20_000.0), (s("B"), 80_000.0), (s("C"), 10_000.0)],
    );
    let params = DelineationParams::default();
    let a = delineate_metros(&hand, &params).map_err(|e| e.to_string())?;
    let metros: Vec<_> = a.metros().map(|c| c.members.clone()).collect();
    ensure(metros == vec![vec![s("B"), s("A")]], || {
        format!("hand case produced {metros:?}")
    })?;
    ensure(a.unassigned == vec![s("C")], || {
        format!("hand case left {:?} unassigned", a.unassigned)
    })?;
    ensure(is_fixed_point(&hand, &a, 0.10), || {
        "hand case is not a fixed point".into()
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let big = random_commuting(&mut rng, 50);
    let a = delineate_metros(&big, &params).map_err(|e| e.to_string())?;
    ensure(is_fixed_point(&big, &a, 0.10), || {
        "50-municipality fixture is not a fixed point".into()
    })?;
    ensure(delineate_metros(&big, &params).map_err(|e| e.to_string())? == a, || {
        "re-run differs".into()
    })?;
    let merged_big = a.merged_count();

    let thresholds = [0.05, 0.10, 0.15, 0.20, 0.30];
    for k in 0..20 {
        let t = random_commuting(&mut rng, 40);
        let runs: Vec<MetroAssignment> = thresholds
            .iter()
            .map(|&threshold| {
                delineate_metros(&t, &DelineationParams { threshold, ..params }).map_err(|e| e.to_string())
            })
            .collect::<Result<_, _>>()?;
        for w in runs.windows(2) {
            ensure(w[0].merged_count() >= w[1].merged_count(), || {
                format!("fixture {k}: merged count rises with the threshold")
            })?;
        }
    }
    Ok(format!(
        "fixed points hold ({merged_big} of 50 merged); monotone over 20 sweeps"
    ))
}

fn theil_checks() -> Check {
    let eq = theil_entropy(&[3.0, 3.0, 3.0]).map_err(|e| e.to_string())?;
    ensure(eq.abs() <= 1e-12, || format!("equal wages give {eq}"))?;
    let t = theil_entropy(&[1.0, 1.0, 4.0]).map_err(|e| e.to_string())?;
    let want = 2f64.ln() / 3.0;
    ensure((t - want).abs() <= 1e-12, || {
        format!("{{1,1,4}} gives {t}, want {want}")
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let wage = Normal::new(7.0_f64, 0.8).unwrap();
    for k in 0..1000 {
        let n = rng.random_range(2..60);
        let w: Vec<f64> = (0..n).map(|_| wage.sample(&mut rng).exp()).collect();
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let scaled: Vec<f64> = w.iter().map(|v| v * scale).collect();
        let a = theil_entropy(&w).map_err(|e| e.to_string())?;
        let b = theil_entropy(&scaled).map_err(|e| e.to_string())?;
        ensure((a - b).abs() <= 1e-12, || {
            format!("vector {k}: scaling by {scale} moved {a} to {b}")
        })?;
        let o = oracles::theil(&w);
        ensure((a - o).abs() <= 1e-12, || format!("vector {k}: {a} vs direct {o}"))?;
    }
    Ok("closed forms exact; 1000 vectors scale-invariant".into())
}

fn tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).expect("readable output") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_path_buf();
                out.insert(rel, std::fs::read(&path).expect("readable file"));
            }
        }
    }
    out
}

fn end_to_end() -> Check {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/synthetic.toml");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    let mut slowest = Duration::ZERO;
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let t0 = Instant::now();
        let status = Command::new(env!("CARGO_BIN_EXE_skillscape"))
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .arg("run")
            .output()
            .map_err(|e| e.to_string())?;
        slowest = slowest.max(t0.elapsed());
        ensure(status.status.success(), || {
            format!("run {run} failed: {}", String::from_utf8_lossy(&status.stderr))
        })?;
        trees.push(tree(&out));
    }
    ensure(!trees[0].is_empty(), || "no outputs written".into())?;
    let differing: Vec<_> = trees[0]
        .iter()
        .filter(|(p, bytes)| trees[1].get(*p) != Some(bytes))
        .map(|(p, _)| p.display().to_string())
        .collect();
    ensure(differing.is_empty() && trees[0].len() == trees[1].len(), || {
        format!("trees differ: {differing:?}")
    })?;
    ensure(slowest < Duration::from_secs(300), || format!("run took {slowest:?}"))?;
    Ok(format!(
        "{} files identical; slowest run {:.2}s",
        trees[0].len(),
        slowest.as_secs_f64()
    ))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Check); 10] = [
        ("RCA and presence match a per-cell oracle", 1, rca_oracle),
        (
            "eigenvector and reflections complexity agree",
            5,
            complexity_cross_validation,
        ),
        (
            "relatedness symmetry, bounds, sign and scale invariance",
            60,
            relatedness_algebra,
        ),
        ("density and CP match a triple-loop oracle", 60, density_oracle),
        ("OLS matches normal equations and auxiliary regressions", 60, ols_oracle),
        (
            "elasticity parameters and decile gap recovered",
            60,
            elasticity_recovery,
        ),
        ("growth coupling detected with size control", 120, growth_recovery),
        (
            "delineation fixed points and threshold monotonicity",
            60,
            delineation_checks,
        ),
        ("Theil closed forms and scale invariance", 60, theil_checks),
        ("pipeline output is byte-identical across runs", 300, end_to_end),
    ];
    let mut failed = 0;
    for (k, (name, limit, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let result = check();
        let elapsed = t0.elapsed();
        let result = result.and_then(|m| {
            if elapsed > Duration::from_secs(*limit) {
                Err(format!("{m}; took {:.2}s, limit {limit}s", elapsed.as_secs_f64()))
            } else {
                Ok(m)
            }
        });
        match result {
            Ok(m) => println!(
                "PASS criterion {:>2}: {name} ({m}) [{:.2}s]",
                k + 1,
                elapsed.as_secs_f64()
            ),
            Err(m) => {
                failed += 1;
                println!(
                    "FAIL criterion {:>2}: {name} ({m}) [{:.2}s]",
                    k + 1,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!("acceptance: {}/10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
