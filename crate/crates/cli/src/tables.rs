//! CSV layouts of the pipeline's intermediate and final artifacts.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use nalgebra::DMatrix;
use skillscape_core::econometrics::{ols::stars, FormalRate, RegressionResult};
use skillscape_core::ingest::{Registry, Year};
use skillscape_core::{ComplexityScores, RelatednessMatrix};

use crate::PipelineError;

pub type Rows = Vec<Vec<String>>;

fn io_err(path: &Path, source: std::io::Error) -> PipelineError {
    PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: &Rows) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Reads a CSV into header-keyed string maps.
pub fn read_csv(path: &Path) -> Result<Vec<BTreeMap<String, String>>, PipelineError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr.headers()?.clone();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        out.push(
            headers
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect(),
        );
    }
    Ok(out)
}

pub fn field<'a>(row: &'a BTreeMap<String, String>, key: &str, path: &Path) -> Result<&'a str, PipelineError> {
    row.get(key)
        .map(String::as_str)
        .ok_or_else(|| PipelineError::Artifact(format!("{}: missing column `{key}`", path.display())))
}

pub fn number(row: &BTreeMap<String, String>, key: &str, path: &Path) -> Result<f64, PipelineError> {
    let v = field(row, key, path)?;
    v.parse()
        .map_err(|_| PipelineError::Artifact(format!("{}: `{key}` is not a number: `{v}`", path.display())))
}

pub fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const COEF_HEADER: [&str; 5] = ["term", "coef", "se", "t", "stars"];

pub fn coefficient_rows(r: &RegressionResult) -> Rows {
    (0..r.terms.len())
        .map(|k| {
            vec![
                r.terms[k].clone(),
                r.coef[k].to_string(),
                r.se[k].to_string(),
                r.t[k].to_string(),
                stars(r.p[k]).to_string(),
            ]
        })
        .collect()
}

pub const DIAG_HEADER: [&str; 9] = [
    "model", "n", "r2", "adj_r2", "aic", "bic", "max_vif", "high_vif", "dropped",
];

pub fn diagnostics_row(model: &str, r: &RegressionResult, high_vif: &[String]) -> Vec<String> {
    vec![
        model.to_string(),
        r.n.to_string(),
        r.r2.to_string(),
        r.adj_r2.to_string(),
        r.aic.to_string(),
        r.bic.to_string(),
        opt(r.max_vif),
        high_vif.join(";"),
        r.dropped.join(";"),
    ]
}

pub fn write_scores(path: &Path, scores: &ComplexityScores, ubiquity: &[usize]) -> Result<(), PipelineError> {
    let rows = scores
        .industries
        .codes()
        .iter()
        .enumerate()
        .map(|(i, code)| {
            vec![
                code.clone(),
                ubiquity[i].to_string(),
                scores.raw[i].to_string(),
                scores.ci[i].to_string(),
            ]
        })
        .collect();
    write_csv(path, &["industry", "ubiquity", "raw", "ci"], &rows)
}

pub fn read_scores(path: &Path) -> Result<ComplexityScores, PipelineError> {
    let rows = read_csv(path)?;
    let mut pairs = Vec::with_capacity(rows.len());
    for r in &rows {
        pairs.push((field(r, "industry", path)?.to_string(), number(r, "ci", path)?));
    }
    let reg = Registry::from_codes(pairs.iter().map(|p| p.0.clone()));
    let mut ci = vec![0.0; reg.len()];
    for (code, v) in pairs {
        ci[reg.id(&code).expect("registered")] = v;
    }
    Ok(ComplexityScores::from_ci(reg, ci))
}

pub fn write_relatedness(path: &Path, e: &RelatednessMatrix) -> Result<(), PipelineError> {
    let codes = e.industries.codes();
    let mut rows = Vec::with_capacity(codes.len() * codes.len());
    for (i, a) in codes.iter().enumerate() {
        for (j, b) in codes.iter().enumerate() {
            rows.push(vec![a.clone(), b.clone(), e.e[(i, j)].to_string()]);
        }
    }
    write_csv(path, &["i", "j", "E"], &rows)
}

pub fn read_relatedness(path: &Path) -> Result<RelatednessMatrix, PipelineError> {
    let rows = read_csv(path)?;
    let mut cells = Vec::with_capacity(rows.len());
    for r in &rows {
        cells.push((
            field(r, "i", path)?.to_string(),
            field(r, "j", path)?.to_string(),
            number(r, "E", path)?,
        ));
    }
    let reg = Registry::from_codes(cells.iter().flat_map(|c| [c.0.clone(), c.1.clone()]));
    let mut e = DMatrix::zeros(reg.len(), reg.len());
    for (a, b, v) in cells {
        e[(reg.id(&a).expect("registered"), reg.id(&b).expect("registered"))] = v;
    }
    Ok(RelatednessMatrix {
        industries: reg,
        e,
        undefined_pairs: 0,
    })
}

pub fn read_potential(path: &Path) -> Result<BTreeMap<(String, Year), f64>, PipelineError> {
    let mut out = BTreeMap::new();
    for r in read_csv(path)? {
        let year = number(&r, "year", path)? as Year;
        out.insert((field(&r, "city", path)?.to_string(), year), number(&r, "cp", path)?);
    }
    Ok(out)
}

pub fn write_rates(path: &Path, rates: &[FormalRate]) -> Result<(), PipelineError> {
    let rows = rates
        .iter()
        .map(|r| {
            vec![
                r.city.clone(),
                r.year.to_string(),
                r.employment.to_string(),
                r.wap.to_string(),
                r.rate.to_string(),
            ]
        })
        .collect();
    write_csv(path, &["city", "year", "employment", "wap", "rate"], &rows)
}
