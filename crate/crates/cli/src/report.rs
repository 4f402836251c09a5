//! The final summary: merged diagnostics plus a short markdown report.

use std::fmt::Write as _;

use serde_json::Value;
use skillscape_core::econometrics::ols::stars;

use crate::pipeline::{Pipeline, Stage, StageOutput};
use crate::stages::merge_diagnostics;
use crate::tables::{write_csv, DIAG_HEADER};
use crate::PipelineError;

fn num(v: Option<&Value>) -> Option<f64> {
    v.and_then(Value::as_f64)
}

fn fmt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "n/a".into())
}

/// One line per growth model with the sign and significance of lagged CP.
pub fn cp_lines(p: &Pipeline) -> Vec<String> {
    let mut lines = Vec::new();
    for (stage, cols) in [
        (Stage::Table5, &p.cfg.regressions.table5),
        (Stage::Table6, &p.cfg.regressions.table6),
    ] {
        let Some(rec) = p.record(stage) else { continue };
        for c in cols {
            let coef = num(rec.diagnostics.get(&format!("col{c}_cp_coef")));
            let pv = num(rec.diagnostics.get(&format!("col{c}_cp_p")));
            let (Some(coef), Some(pv)) = (coef, pv) else { continue };
            let sign = if coef > 0.0 { "positive" } else { "negative" };
            let sig = if pv < 0.05 {
                "significant at 5%"
            } else {
                "not significant at 5%"
            };
            lines.push(format!(
                "{} column {c}: CP coefficient {coef:.4}{} ({sign}, {sig}, p = {pv:.4})",
                stage.name(),
                stars(pv)
            ));
        }
    }
    lines
}

pub fn report(p: &Pipeline) -> Result<StageOutput, PipelineError> {
    let rows = merge_diagnostics(p)?;
    write_csv(&p.path("diagnostics.csv"), &DIAG_HEADER, &rows)?;

    let mut md = String::from("# skillscape run summary\n\n");
    if let Some(rec) = p.record(Stage::Panel) {
        let d = &rec.diagnostics;
        let _ = writeln!(
            md,
            "Panel: {} cities, {} industries, years {}.\n",
            d.get("cities").cloned().unwrap_or_default(),
            d.get("industries").cloned().unwrap_or_default(),
            d.get("years").cloned().unwrap_or_default()
        );
    }
    md.push_str("## Growth regressions\n\n");
    let lines = cp_lines(p);
    if lines.is_empty() {
        md.push_str("No model includes lagged CP.\n");
    }
    for l in &lines {
        let _ = writeln!(md, "- {l}");
    }
    if let Some(rec) = p.record(Stage::Elasticity) {
        let d = &rec.diagnostics;
        let _ = write!(
            md,
            "\n## Elasticity\n\n- beta = {} (se {})\n- gamma = {} (se {})\n- decile slopes: bottom {}, top {}\n",
            fmt(num(d.get("beta"))),
            fmt(num(d.get("beta_se"))),
            fmt(num(d.get("gamma"))),
            fmt(num(d.get("gamma_se"))),
            fmt(num(d.get("bottom_decile_slope"))),
            fmt(num(d.get("top_decile_slope")))
        );
    }
    if let Some(rec) = p.record(Stage::Scaling) {
        let d = &rec.diagnostics;
        let _ = write!(
            md,
            "\n## Scaling\n\n- corr(diversity, log WAP) = {}\n- corr(mean CI, log WAP) = {}\n",
            fmt(num(d.get("corr_diversity_log_wap"))),
            fmt(num(d.get("corr_mean_ci_log_wap")))
        );
    }
    if let Some(rec) = p.record(Stage::Firmstats) {
        let d = &rec.diagnostics;
        let _ = write!(
            md,
            "\n## Firms\n\n- wage entropy on CI: {} (p {})\n- log wage on CI: {} (p {})\n",
            fmt(num(d.get("table3_ci_coef"))),
            fmt(num(d.get("table3_ci_p"))),
            fmt(num(d.get("table4_ci_coef"))),
            fmt(num(d.get("table4_ci_p")))
        );
    }
    let path = p.path("report.md");
    std::fs::write(&path, &md).map_err(|source| PipelineError::Io { path, source })?;
    let mut out = StageOutput::default();
    out.file("diagnostics.csv").file("report.md");
    Ok(out)
}
