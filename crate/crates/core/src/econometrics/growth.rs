//! Regressions of the annual change in the formal rate on lagged complexity
//! potential and controls.

use std::fmt;

use super::ols::{ols, Design, RegressionResult, SeMode};
use super::panel::{CityYearFrame, FrameRow};
use super::{EconError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Term {
    FLag,
    CpLag,
    Bartik,
    DGovexp,
    CpBartik,
    CpDGovexp,
    Inst,
    Edu,
}

impl Term {
    pub fn name(self) -> &'static str {
        match self {
            Term::FLag => "f_lag",
            Term::CpLag => "cp_lag",
            Term::Bartik => "bartik",
            Term::DGovexp => "dgovexp",
            Term::CpBartik => "cp_lag:bartik",
            Term::CpDGovexp => "cp_lag:dgovexp",
            Term::Inst => "inst_quality",
            Term::Edu => "edu_quality",
        }
    }

    fn value(self, r: &FrameRow) -> Option<f64> {
        match self {
            Term::FLag => Some(r.f_lag),
            Term::CpLag => Some(r.cp_lag),
            Term::Bartik => r.bartik,
            Term::DGovexp => r.dgovexp,
            Term::CpBartik => r.bartik.map(|b| b * r.cp_lag),
            Term::CpDGovexp => r.dgovexp.map(|g| g * r.cp_lag),
            Term::Inst => r.inst_quality,
            Term::Edu => r.edu_quality,
        }
    }
}

/// Column layouts of the two growth tables.
///
/// Table 5: (1) lagged rate; (2) adds lagged CP; (3) adds the supply and
/// demand shocks; (4) adds their interactions with CP.
/// Table 6: (1) lagged rate with institutional and education quality;
/// (2) adds lagged CP; (3) is Table 5 column 3 plus both quality controls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrowthSpec {
    Table5(u8),
    Table6(u8),
    Custom(Vec<Term>),
}

impl GrowthSpec {
    pub fn table5(col: u8) -> Result<Self> {
        if (1..=4).contains(&col) {
            Ok(GrowthSpec::Table5(col))
        } else {
            Err(EconError::UnknownSpec(format!("table5 column {col}")))
        }
    }

    pub fn table6(col: u8) -> Result<Self> {
        if (1..=3).contains(&col) {
            Ok(GrowthSpec::Table6(col))
        } else {
            Err(EconError::UnknownSpec(format!("table6 column {col}")))
        }
    }

    pub fn terms(&self) -> Vec<Term> {
        use Term::*;
        match self {
            GrowthSpec::Table5(1) => vec![FLag],
            GrowthSpec::Table5(2) => vec![FLag, CpLag],
            GrowthSpec::Table5(3) => vec![FLag, CpLag, Bartik, DGovexp],
            GrowthSpec::Table5(_) => vec![FLag, CpLag, Bartik, DGovexp, CpBartik, CpDGovexp],
            GrowthSpec::Table6(1) => vec![FLag, Inst, Edu],
            GrowthSpec::Table6(2) => vec![FLag, CpLag, Inst, Edu],
            GrowthSpec::Table6(_) => vec![FLag, CpLag, Bartik, DGovexp, Inst, Edu],
            GrowthSpec::Custom(t) => t.clone(),
        }
    }
}

impl fmt::Display for GrowthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthSpec::Table5(c) => write!(f, "table5_col{c}"),
            GrowthSpec::Table6(c) => write!(f, "table6_col{c}"),
            GrowthSpec::Custom(t) => {
                let names: Vec<&str> = t.iter().map(|t| t.name()).collect();
                write!(f, "custom[{}]", names.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthOptions {
    pub year_fe: bool,
    pub city_fe: bool,
    pub se_mode: SeMode,
    pub vif_threshold: f64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            year_fe: true,
            city_fe: false,
            se_mode: SeMode::Robust,
            vif_threshold: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthResult {
    pub spec: String,
    pub result: RegressionResult,
    /// Regressors whose VIF exceeds the threshold.
    pub high_vif: Vec<String>,
    /// Frame rows skipped for lacking a control the spec needs.
    pub skipped_rows: usize,
}

pub fn growth_regression(frame: &CityYearFrame, spec: &GrowthSpec, opts: &GrowthOptions) -> Result<GrowthResult> {
    let terms = spec.terms();
    let mut ys = Vec::new();
    let mut xs: Vec<Vec<f64>> = vec![Vec::new(); terms.len()];
    let mut years = Vec::new();
    let mut cities = Vec::new();
    let mut skipped = 0;
    for r in &frame.rows {
        let vals: Option<Vec<f64>> = terms.iter().map(|t| t.value(r)).collect();
        let Some(vals) = vals else {
            skipped += 1;
            continue;
        };
        ys.push(r.df);
        for (col, v) in xs.iter_mut().zip(vals) {
            col.push(v);
        }
        years.push(r.year.to_string());
        cities.push(r.city.clone());
    }
    if ys.is_empty() {
        return Err(EconError::NoObservations);
    }
    let mut design = Design::with_intercept(ys.len());
    for (t, col) in terms.iter().zip(xs) {
        design.add(t.name(), col);
    }
    if opts.year_fe {
        design.add_dummies("year", &years);
    }
    if opts.city_fe {
        design.add_dummies("city", &cities);
    }
    let result = ols(&ys, &design, opts.se_mode)?;
    let high_vif = result
        .terms
        .iter()
        .zip(&result.vif)
        .filter_map(|(t, v)| v.filter(|v| *v > opts.vif_threshold).map(|_| t.clone()))
        .collect();
    Ok(GrowthResult {
        spec: spec.to_string(),
        result,
        high_vif,
        skipped_rows: skipped,
    })
}
