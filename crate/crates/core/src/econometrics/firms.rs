//! Firm-level validation regressions: wage entropy and wage levels against
//! industry complexity.

use crate::complexity::ComplexityScores;
use crate::ingest::{FirmRecord, FirmYearTable, Year, HR_COLUMNS};

use super::ols::{ols, Design, RegressionResult, SeMode};
use super::theil::theil_entropy;
use super::{EconError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum FirmSpec {
    /// Theil entropy of the firm's wage sample on CI and log size.
    Entropy {
        min_employees: f64,
        year: Option<Year>,
        hr_covariates: bool,
    },
    /// Log average wage on CI and log size with city and year dummies.
    Wage,
}

impl Default for FirmSpec {
    fn default() -> Self {
        FirmSpec::Entropy {
            min_employees: 50.0,
            year: None,
            hr_covariates: false,
        }
    }
}

pub fn firm_regressions(
    firms: &FirmYearTable,
    ci: &ComplexityScores,
    spec: &FirmSpec,
    se_mode: SeMode,
) -> Result<RegressionResult> {
    let with_ci = |r: &FirmRecord| ci.ci_of(&r.industry).map(|c| (c, r.employees.max(1.0).ln()));
    match spec {
        FirmSpec::Entropy {
            min_employees,
            year,
            hr_covariates,
        } => {
            let rows: Vec<(&FirmRecord, f64, f64)> = firms
                .records
                .iter()
                .filter(|r| r.employees >= *min_employees && !r.wages.is_empty())
                .filter(|r| year.is_none_or(|y| r.year == y))
                .filter_map(|r| with_ci(r).map(|(c, s)| (r, c, s)))
                .collect();
            if rows.is_empty() {
                return Err(EconError::NoObservations);
            }
            let y = rows
                .iter()
                .map(|(r, _, _)| theil_entropy(&r.wages))
                .collect::<Result<Vec<f64>>>()?;
            let mut d = Design::with_intercept(rows.len());
            d.add("ci", rows.iter().map(|r| r.1).collect());
            d.add("log_employees", rows.iter().map(|r| r.2).collect());
            if *hr_covariates {
                for name in HR_COLUMNS {
                    let col: Option<Vec<f64>> = rows.iter().map(|(r, _, _)| r.covariates.get(name).copied()).collect();
                    if let Some(col) = col {
                        d.add(name, col);
                    }
                }
            }
            Ok(ols(&y, &d, se_mode)?)
        }
        FirmSpec::Wage => {
            let mut y = Vec::new();
            let mut rows = Vec::new();
            for r in &firms.records {
                if r.avg_wage <= 0.0 {
                    return Err(EconError::NonPositiveWage(r.avg_wage));
                }
                if let Some((c, s)) = with_ci(r) {
                    y.push(r.avg_wage.ln());
                    rows.push((r, c, s));
                }
            }
            if rows.is_empty() {
                return Err(EconError::NoObservations);
            }
            let mut d = Design::with_intercept(rows.len());
            d.add("ci", rows.iter().map(|r| r.1).collect());
            d.add("log_employees", rows.iter().map(|r| r.2).collect());
            let cities: Vec<&str> = rows.iter().map(|r| r.0.city.as_str()).collect();
            let years: Vec<String> = rows.iter().map(|r| r.0.year.to_string()).collect();
            d.add_dummies("city", &cities);
            d.add_dummies("year", &years);
            Ok(ols(&y, &d, se_mode)?)
        }
    }
}
