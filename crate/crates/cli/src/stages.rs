//! The work done by each pipeline stage. Every stage reads its inputs from
//! disk and writes its outputs under the output directory.

use rayon::prelude::*;
use serde_json::json;
use skillscape_core::complexity::rca_from_matrix;
use skillscape_core::econometrics::{
    decile_slopes, elasticity_regression, firm_regressions, generate_synthetic, growth_regression, long_difference,
    CityYearFrame, FirmSpec, GrowthOptions, GrowthSpec, SeMode,
};
use skillscape_core::ingest::{Crosswalk, Year};
use skillscape_core::yearly::{all_years, potential_by_city_year, StackOptions};
use skillscape_core::{
    aggregate_complexity, binarize, build_relatedness, city_complexity_summary, compute_complexity, compute_rca,
    delineate_metros, skill_proximity, AuxCityPanel, CommutingTable, ComplexityMethod, ComplexityOptions,
    DelineationParams, EmploymentPanel, FirmYearTable, FlowMatrix, LoadOptions, PopulationPanel,
};

use crate::pipeline::{Pipeline, Stage, StageOutput};
use crate::tables::{self, coefficient_rows, diagnostics_row, opt, write_csv, Rows, COEF_HEADER, DIAG_HEADER};
use crate::PipelineError;

pub fn execute(p: &Pipeline, stage: Stage) -> Result<StageOutput, PipelineError> {
    match stage {
        Stage::Synth => synth(p),
        Stage::Delineate => delineate(p),
        Stage::Panel => panel(p),
        Stage::Relatedness => relatedness(p),
        Stage::Complexity => complexity(p),
        Stage::Potential => potential(p),
        Stage::Frame => frame(p),
        Stage::Table5 => growth_table(p, 5),
        Stage::Table6 => growth_table(p, 6),
        Stage::Elasticity => elasticity(p),
        Stage::Firmstats => firmstats(p),
        Stage::Scaling => scaling(p),
        Stage::Report => crate::report::report(p),
    }
}

fn load_opts(p: &Pipeline) -> LoadOptions {
    LoadOptions {
        permissive: p.cfg.inputs.permissive,
        ..LoadOptions::default()
    }
}

fn required(p: &Pipeline, name: &str) -> Result<std::path::PathBuf, PipelineError> {
    p.raw_input(name)
        .ok_or_else(|| PipelineError::Config(format!("input `{name}` is not configured")))
}

pub fn stack_options(p: &Pipeline) -> Result<StackOptions, PipelineError> {
    let c = &p.cfg.complexity;
    let method: ComplexityMethod = c.method.parse().map_err(PipelineError::Config)?;
    Ok(StackOptions {
        complexity: ComplexityOptions {
            method,
            iterations: c.iterations,
            ..ComplexityOptions::default()
        },
        rca_cutoff: c.rca_cutoff,
        clip_negative: p.cfg.relatedness.clip_negative,
    })
}

pub fn se_mode(p: &Pipeline) -> SeMode {
    if p.cfg.regressions.se == "classical" {
        SeMode::Classical
    } else {
        SeMode::Robust
    }
}

fn city_panels(p: &Pipeline) -> Result<(EmploymentPanel, PopulationPanel), PipelineError> {
    let opts = LoadOptions::default();
    let emp = EmploymentPanel::load(&p.path("city_employment.csv"), &opts)?.data;
    let pop = PopulationPanel::load(&p.path("city_population.csv"), &opts)?.data;
    Ok((emp, pop))
}

fn synth(p: &Pipeline) -> Result<StageOutput, PipelineError> {
    let cfg = p
        .cfg
        .synthetic
        .as_ref()
        .expect("synth stage only runs with a synthetic section");
    let bundle = generate_synthetic(cfg)?;
    bundle.write_to(&p.path("inputs"))?;
    let mut out = StageOutput::default();
    for f in [
        "employment",
        "population",
        "commuting",
        "flows",
        "firms",
        "aux",
        "planted_ci",
    ] {
        out.file(&format!("inputs/{f}.csv"));
    }
    out.diag("seed", cfg.seed);
    Ok(out)
}

fn delineate(p: &Pipeline) -> Result<StageOutput, PipelineError> {
    let mut out = StageOutput::default();
    let path = p.path("crosswalk.csv");
    match p.raw_input("commuting") {
        Some(c) => {
            let table = CommutingTable::load(&c, &load_opts(p))?.data;
            let params = DelineationParams {
                threshold: p.cfg.delineation.threshold,
                pop_floor: p.cfg.delineation.pop_floor,
                max_steps: None,
            };
            let a = delineate_metros(&table, &params)?;
            a.save_crosswalk(&path)?;
            out.diag("metros", a.metros().count())
                .diag("standalone", a.standalone().count())
                .diag("merged_municipalities", a.merged_count())
                .diag("dropped_municipalities", a.unassigned.len());
        }
        None => {
            // Without commuting data every municipality is its own city.
            let emp = EmploymentPanel::load(&required(p, "employment")?, &load_opts(p))?.data;
            let rows: Rows = emp
                .cities()
                .codes()
                .iter()
                .map(|c| vec![c.clone(), c.clone(), "standalone".to_string()])
                .collect();
            write_csv(&path, &["municipality", "city", "kind"], &rows)?;
            out.diag("standalone", rows.len());
        }
    }
    out.file("crosswalk.csv");
    Ok(out)
}

fn panel(p: &Pipeline) -> Result<StageOutput, PipelineError> {
    let opts = load_opts(p);
    let emp = EmploymentPanel::load(&required(p, "employment")?, &opts)?;
    let pop = PopulationPanel::load(&required(p, "population")?, &opts)?;
    let cw = Crosswalk::load(&p.path("crosswalk.csv"))?;
    let filtered = emp.data.filter_sectors(&p.cfg.filter.exclude);
    let cities = filtered.aggregate_to_cities(&cw, false)?;
    let years: Vec<Year> = cities
        .years()
        .into_iter()
        .filter(|y| p.cfg.years.start.is_none_or(|s| *y >= s) && p.cfg.years.end.is_none_or(|e| *y <= e))
        .collect();
    if years.is_empty() {
        return Err(PipelineError::Config(
            "no panel years inside the configured range".into(),
        ));
    }
    let cities = cities.select_years(&years);
    let city_pop = cw.aggregate_population(&pop.data, false)?;
    cities.save(&p.path("city_employment.csv"))?;
    city_pop.save(&p.path("city_population.csv"))?;
    let mut out = StageOutput::default();
    out.file("city_employment.csv")
        .file("city_population.csv")
        .diag("employment_rows_read", emp.report.rows_read)
        .diag("employment_rows_dropped", emp.report.dropped.len())
        .diag("cities", cities.cities().len())
        .diag("industries", cities.industries().len())
        .diag("years", json!(years));
    Ok(out)
}

fn relatedness(p: &Pipeline) -> Result<StageOutput, PipelineError> {
    let flows = FlowMatrix::load(&required(p, "flows")?, &load_opts(p))?.data;
    let sp = skill_proximity(&flows)?;
    let e = build_relatedness(&sp);
    tables::write_relatedness(&p.path("relatedness.csv"), &e)?;
    let mut out = StageOutput::default();
    out.file("relatedness.csv")
        .diag("industries", e.industries.len())
        .diag("undefined_pairs", e.undefined_pairs)
        .diag("isolated_industries", sp.isolated.len());
    Ok(out)
}

fn complexity(p: &Pipeline) -> Result<StageOutput, PipelineError> {
    let (emp, _) = city_panels(p)?;
    let stack = stack_options(p)?;
    let rca = match p.cfg.complexity.year {
        Some(y) => compute_rca(&emp, y)?,
        None => rca_from_matrix(emp.cities().clone(), emp.industries().clone(), &emp.pooled_matrix())?,
    };
    let m = binarize(&rca, stack.rca_cutoff)?;
    let scores = compute_complexity(&m, &stack.complexity);
    tables::write_scores(&p.path("complexity.csv"), &scores, &m.ubiquity)?;

    let (mut rca_rows, mut m_rows) = (Rows::new(), Rows::new());
    for (c, city) in rca.cities.codes().iter().enumerate() {
        for (i, ind) in rca.industries.codes().iter().enumerate() {
            rca_rows.push(vec![city.clone(), ind.clone(), rca.values[(c, i)].to_string()]);
            m_rows.push(vec![city.clone(), ind.clone(), m.m[(c, i)].to_string()]);
        }
    }
    write_csv(&p.path("rca.csv"), &["city", "industry", "rca"], &rca_rows)?;
    write_csv(&p.path("presence.csv"), &["city", "industry", "m"], &m_rows)?;

    let summary = city_complexity_summary(&m, &scores)?;
    let rows: Rows = summary
        .iter()
        .enumerate()
        .map(|(c, s)| {
            vec![
                s.city.clone(),
                s.diversity.to_string(),
                opt(s.mean_ci),
                scores.city.get(c).map(|v| v.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv(
        &p.path("city_summary.csv"),
        &["city", "diversity", "mean_ci", "complexity"],
        &rows,
    )?;

    let groups: Rows = aggregate_complexity(&scores, &emp, 2)
        .into_iter()
        .map(|g| {
            vec![
                g.group,
                g.complexity.to_string(),
                g.employment.to_string(),
                g.members.to_string(),
            ]
        })
        .collect();
    write_csv(
        &p.path("complexity_2digit.csv"),
        &["division", "complexity", "employment", "industries"],
        &groups,
    )?;

    let d = &scores.diagnostics;
    let mut out = StageOutput::default();
    out.file("rca.csv")
        .file("presence.csv")
        .file("complexity.csv")
        .file("city_summary.csv")
        .file("complexity_2digit.csv")
        .diag("method_used", format!("{:?}", d.method_used))
        .diag("singular_structure", json!(d.singular_structure))
        .diag("pruned_industries", d.pruned_industries.len())
        .diag("pruned_cities", d.pruned_cities.len())
        .diag("rank_agreement", json!(d.rank_agreement))
        .diag("degenerate", d.degenerate);
    Ok(out)
}

fn potential(p: &Pipeline) -> Result<StageOutput, PipelineError> {
    let (emp, _) = city_panels(p)?;
    let e = tables::read_relatedness(&p.path("relatedness.csv"))?;
    let metrics = all_years(&emp, &e, &stack_options(p)?)?;
    let cp = potential_by_city_year(&metrics);
    let rows: Rows = cp
        .iter()
        .map(|((c, y), v)| vec![c.clone(), y.to_string(), v.to_string()])
        .collect();
    write_csv(&p.path("potential.csv"), &["city", "year", "cp"], &rows)?;

    let mut dens = Vec::new();
    let mut zero = 0;
    let mut no_missing = 0;
    for m in &metrics {
        zero += m.density.zero_denominators;
        no_missing += m.potential.no_missing.len();
        if p.cfg.relatedness.density_year.is_some_and(|y| y != m.year) {
            continue;
        }
        let d = &m.density;
        for (c, city) in d.cities.codes().iter().enumerate() {
            if m.rca.empty_cities.contains(&c) {
                continue;
            }
            for (i, ind) in d.industries.codes().iter().enumerate() {
                if let Some(v) = d.get(c, i) {
                    dens.push(vec![m.year.to_string(), city.clone(), ind.clone(), v.to_string()]);
                }
            }
        }
    }
    write_csv(&p.path("density.csv"), &["year", "city", "industry", "dens"], &dens)?;
    let mut out = StageOutput::default();
    out.file("potential.csv")
        .file("density.csv")
        .diag("zero_denominators", zero)
        .diag("cities_without_missing", no_missing);
    Ok(out)
}

fn frame(p: &Pipeline) -> Result<StageOutput, PipelineError> {
    let (emp, pop) = city_panels(p)?;
    let cp = tables::read_potential(&p.path("potential.csv"))?;
    let aux = match p.raw_input("aux") {
        Some(a) => Some(AuxCityPanel::load(&a, &load_opts(p))?.data),
        None => None,
    };
    let rates = skillscape_core::econometrics::formal_rate(&emp, &pop)?;
    let shocks = skillscape_core::econometrics::bartik(&emp)?;
    let frame = skillscape_core::econometrics::assemble_frame(&rates, &cp, &shocks, aux.as_ref());
    tables::write_rates(&p.path("formal_rate.csv"), &rates)?;
    let fp = p.path("frame.csv");
    let file = std::fs::File::create(&fp).map_err(|source| PipelineError::Io {
        path: fp.clone(),
        source,
    })?;
    frame.write(file)?;

    let years = emp.years();
    let (start, end) = (years[0], *years.last().expect("non-empty panel"));
    let ld = long_difference(&rates, &cp, start, end);
    let rows: Rows = ld
        .iter()
        .map(|r| {
            vec![
                r.city.clone(),
                r.cp_start.to_string(),
                r.f_start.to_string(),
                r.f_end.to_string(),
                (r.f_end - r.f_start).to_string(),
            ]
        })
        .collect();
    write_csv(
        &p.path("fig6_growth.csv"),
        &["city", "cp_start", "f_start", "f_end", "df"],
        &rows,
    )?;

    let mut out = StageOutput::default();
    out.file("formal_rate.csv")
        .file("frame.csv")
        .file("fig6_growth.csv")
        .diag("rows", frame.rows.len())
        .diag("missing_lag", frame.missing_lag)
        .diag("bartik_undefined_terms", shocks.undefined_terms);
    Ok(out)
}

fn read_frame(p: &Pipeline) -> Result<CityYearFrame, PipelineError> {
    let fp = p.path("frame.csv");
    let file = std::fs::File::open(&fp).map_err(|source| PipelineError::Io {
        path: fp.clone(),
        source,
    })?;
    CityYearFrame::read(file).map_err(PipelineError::Artifact)
}

fn growth_table(p: &Pipeline, table: u8) -> Result<StageOutput, PipelineError> {
    let frame = read_frame(p)?;
    let r = &p.cfg.regressions;
    let cols = if table == 5 { &r.table5 } else { &r.table6 };
    let opts = GrowthOptions {
        year_fe: r.year_fe,
        city_fe: r.city_fe,
        se_mode: se_mode(p),
        vif_threshold: r.vif_threshold,
    };
    let results: Vec<_> = cols
        .par_iter()
        .map(|&c| {
            let spec = if table == 5 {
                GrowthSpec::table5(c)
            } else {
                GrowthSpec::table6(c)
            }?;
            growth_regression(&frame, &spec, &opts).map(|g| (c, g))
        })
        .collect::<Result<_, _>>()?;
    let mut out = StageOutput::default();
    let mut diag = Vec::new();
    for (c, g) in &results {
        let name = format!("table{table}_col{c}.csv");
        write_csv(&p.path(&name), &COEF_HEADER, &coefficient_rows(&g.result))?;
        out.file(&name);
        diag.push(diagnostics_row(&g.spec, &g.result, &g.high_vif));
        if let (Some(coef), Some(pv)) = (g.result.coef_of("cp_lag"), g.result.p_of("cp_lag")) {
            out.diag(&format!("col{c}_cp_coef"), coef)
                .diag(&format!("col{c}_cp_p"), pv);
        }
        if !g.high_vif.is_empty() {
            out.diag(&format!("col{c}_high_vif"), json!(g.high_vif));
        }
    }
    let dname = format!("table{table}_diagnostics.csv");
    write_csv(&p.path(&dname), &DIAG_HEADER, &diag)?;
    out.file(&dname);
    Ok(out)
}

fn elasticity(p: &Pipeline) -> Result<StageOutput, PipelineError> {
    let (emp, pop) = city_panels(p)?;
    let ci = tables::read_scores(&p.path("complexity.csv"))?;
    let mode = se_mode(p);
    let e = elasticity_regression(&emp, &pop, &ci, p.cfg.regressions.year_fe, mode)?;
    write_csv(&p.path("elasticity.csv"), &COEF_HEADER, &coefficient_rows(&e.result))?;
    let curve: Rows = e
        .curve
        .iter()
        .map(|c| {
            vec![
                c.ci.to_string(),
                c.elasticity.to_string(),
                c.lower.to_string(),
                c.upper.to_string(),
            ]
        })
        .collect();
    write_csv(
        &p.path("fig4_curve.csv"),
        &["ci", "elasticity", "lower", "upper"],
        &curve,
    )?;
    let d = decile_slopes(&emp, &pop, &ci, mode)?;
    let groups: Rows = d
        .points
        .iter()
        .map(|(c, y, lp, b, t)| vec![c.clone(), y.to_string(), lp.to_string(), opt(*b), opt(*t)])
        .collect();
    write_csv(
        &p.path("fig4_groups.csv"),
        &["city", "year", "log_wap", "log_f_bottom", "log_f_top"],
        &groups,
    )?;
    write_csv(
        &p.path("elasticity_diagnostics.csv"),
        &DIAG_HEADER,
        &vec![diagnostics_row("elasticity", &e.result, &[])],
    )?;
    let mut out = StageOutput::default();
    out.file("elasticity.csv")
        .file("fig4_curve.csv")
        .file("fig4_groups.csv")
        .file("elasticity_diagnostics.csv")
        .diag("beta", e.beta)
        .diag("beta_se", e.beta_se)
        .diag("gamma", e.gamma)
        .diag("gamma_se", e.gamma_se)
        .diag("bottom_decile_slope", d.bottom)
        .diag("top_decile_slope", d.top);
    Ok(out)
}

fn firmstats(p: &Pipeline) -> Result<StageOutput, PipelineError> {
    let firms = FirmYearTable::load(&required(p, "firms")?, &load_opts(p))?.data;
    let ci = tables::read_scores(&p.path("complexity.csv"))?;
    let r = &p.cfg.regressions;
    let specs = [
        (
            "table3",
            FirmSpec::Entropy {
                min_employees: r.min_firm_employees,
                year: None,
                hr_covariates: r.hr_covariates,
            },
        ),
        ("table4", FirmSpec::Wage),
    ];
    let mut out = StageOutput::default();
    let mut diag = Vec::new();
    for (name, spec) in specs {
        let res = firm_regressions(&firms, &ci, &spec, se_mode(p))?;
        let f = format!("{name}.csv");
        write_csv(&p.path(&f), &COEF_HEADER, &coefficient_rows(&res))?;
        out.file(&f);
        diag.push(diagnostics_row(name, &res, &[]));
        if let Some(c) = res.coef_of("ci") {
            out.diag(&format!("{name}_ci_coef"), c);
            out.diag(&format!("{name}_ci_p"), json!(res.p_of("ci")));
        }
    }
    write_csv(&p.path("firm_diagnostics.csv"), &DIAG_HEADER, &diag)?;
    out.file("firm_diagnostics.csv");
    Ok(out)
}

fn scaling(p: &Pipeline) -> Result<StageOutput, PipelineError> {
    let (emp, pop) = city_panels(p)?;
    let ci = tables::read_scores(&p.path("complexity.csv"))?;
    let years = emp.years();
    let year = p.cfg.scaling.year.unwrap_or(*years.last().expect("non-empty panel"));
    if !years.contains(&year) {
        return Err(PipelineError::Config(format!(
            "scaling year {year} is not in the panel"
        )));
    }
    let m = binarize(&compute_rca(&emp, year)?, p.cfg.complexity.rca_cutoff)?;
    let s = skillscape_core::econometrics::scaling_summary(&emp, &pop, &ci, &m, year)?;
    let rows: Rows = s
        .cities
        .iter()
        .map(|c| {
            vec![
                c.city.clone(),
                c.wap.to_string(),
                c.wap.ln().to_string(),
                c.diversity.to_string(),
                opt(c.mean_ci),
                c.formal_rate.to_string(),
            ]
        })
        .collect();
    write_csv(
        &p.path("fig3_scaling.csv"),
        &["city", "wap", "log_wap", "diversity", "mean_ci", "formal_rate"],
        &rows,
    )?;
    let header: Vec<String> = ["city".to_string(), "wap".to_string()]
        .into_iter()
        .chain((1..=10).map(|d| format!("decile_{d}")))
        .collect();
    let header_ref: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Rows = s
        .cities
        .iter()
        .map(|c| {
            [c.city.clone(), c.wap.to_string()]
                .into_iter()
                .chain(c.decile_rates.iter().map(|v| v.to_string()))
                .collect()
        })
        .collect();
    write_csv(&p.path("fig5_deciles.csv"), &header_ref, &rows)?;
    let summary = vec![
        vec!["year".to_string(), year.to_string()],
        vec!["corr_diversity_log_wap".to_string(), opt(s.diversity_log_wap)],
        vec!["corr_mean_ci_log_wap".to_string(), opt(s.mean_ci_log_wap)],
    ];
    write_csv(&p.path("scaling_summary.csv"), &["metric", "value"], &summary)?;
    let mut out = StageOutput::default();
    out.file("fig3_scaling.csv")
        .file("fig5_deciles.csv")
        .file("scaling_summary.csv")
        .diag("year", year)
        .diag("corr_diversity_log_wap", json!(s.diversity_log_wap))
        .diag("corr_mean_ci_log_wap", json!(s.mean_ci_log_wap))
        .diag("degenerate", s.degenerate());
    Ok(out)
}

/// Per-model diagnostics files, in the order they are merged into
/// `diagnostics.csv`.
pub const DIAGNOSTIC_FILES: [&str; 4] = [
    "table5_diagnostics.csv",
    "table6_diagnostics.csv",
    "elasticity_diagnostics.csv",
    "firm_diagnostics.csv",
];

pub fn merge_diagnostics(p: &Pipeline) -> Result<Rows, PipelineError> {
    let mut rows = Vec::new();
    for f in DIAGNOSTIC_FILES {
        let path = p.path(f);
        if !path.exists() {
            continue;
        }
        for r in tables::read_csv(&path)? {
            rows.push(
                DIAG_HEADER
                    .iter()
                    .map(|h| r.get(*h).cloned().unwrap_or_default())
                    .collect(),
            );
        }
    }
    Ok(rows)
}
