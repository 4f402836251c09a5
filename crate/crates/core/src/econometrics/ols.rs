//! Least squares with automatic removal of collinear columns,
//! classical and HC1 standard errors, information criteria and VIFs.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, StudentsT};
use std::collections::BTreeSet;
use thiserror::Error;

/// Relative residual norm below which a column counts as collinear.
const COLLINEAR_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum OlsError {
    #[error("response has {y} rows but the design has {x}")]
    DimensionMismatch { y: usize, x: usize },
    #[error("{n} observations cannot identify {p} parameters")]
    InsufficientObservations { n: usize, p: usize },
    #[error("response has zero variance")]
    DegenerateResponse,
    #[error("design is rank deficient: {0}")]
    RankDeficient(String),
    #[error("non-finite value in column `{0}`")]
    NonFinite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnRole {
    Intercept,
    Regressor,
    Dummy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub role: ColumnRole,
    pub values: Vec<f64>,
}

/// Named regressors plus optional intercept and categorical dummy blocks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Design {
    n: usize,
    columns: Vec<Column>,
}

impl Design {
    pub fn new(n: usize) -> Self {
        Design { n, columns: Vec::new() }
    }

    pub fn with_intercept(n: usize) -> Self {
        let mut d = Design::new(n);
        d.columns.push(Column {
            name: "const".into(),
            role: ColumnRole::Intercept,
            values: vec![1.0; n],
        });
        d
    }

    pub fn add(&mut self, name: impl Into<String>, values: Vec<f64>) -> &mut Self {
        assert_eq!(values.len(), self.n, "column length");
        self.columns.push(Column {
            name: name.into(),
            role: ColumnRole::Regressor,
            values,
        });
        self
    }

    /// One dummy per category except the first in sorted order.
    pub fn add_dummies<S: AsRef<str>>(&mut self, prefix: &str, labels: &[S]) -> &mut Self {
        assert_eq!(labels.len(), self.n, "column length");
        let cats: BTreeSet<&str> = labels.iter().map(|l| l.as_ref()).collect();
        for cat in cats.into_iter().skip(1) {
            self.columns.push(Column {
                name: format!("{prefix}={cat}"),
                role: ColumnRole::Dummy,
                values: labels
                    .iter()
                    .map(|l| if l.as_ref() == cat { 1.0 } else { 0.0 })
                    .collect(),
            });
        }
        self
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    fn has_intercept(&self) -> bool {
        self.columns.iter().any(|c| c.role == ColumnRole::Intercept)
    }

    /// Intercept first, then regressors, then dummies, so redundancy is
    /// resolved by dropping the later (less substantive) column.
    fn ordered(&self) -> Vec<&Column> {
        let rank = |r: ColumnRole| match r {
            ColumnRole::Intercept => 0,
            ColumnRole::Regressor => 1,
            ColumnRole::Dummy => 2,
        };
        let mut cols: Vec<&Column> = self.columns.iter().collect();
        cols.sort_by_key(|c| rank(c.role));
        cols
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeMode {
    Classical,
    #[default]
    Robust,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    pub terms: Vec<String>,
    pub roles: Vec<ColumnRole>,
    pub coef: Vec<f64>,
    /// Standard errors of the selected mode.
    pub se: Vec<f64>,
    pub se_classical: Vec<f64>,
    pub se_robust: Vec<f64>,
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    /// Coefficient covariance of the selected mode.
    pub covariance: DMatrix<f64>,
    pub se_mode: SeMode,
    pub n: usize,
    /// Number of estimated parameters.
    pub k: usize,
    pub rss: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub aic: f64,
    pub bic: f64,
    /// VIF per retained term; `None` for the intercept and dummies.
    pub vif: Vec<Option<f64>>,
    pub max_vif: Option<f64>,
    pub dropped: Vec<String>,
    pub residuals: Vec<f64>,
}

impl RegressionResult {
    pub fn index(&self, term: &str) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }

    pub fn coef_of(&self, term: &str) -> Option<f64> {
        self.index(term).map(|i| self.coef[i])
    }

    pub fn se_of(&self, term: &str) -> Option<f64> {
        self.index(term).map(|i| self.se[i])
    }

    pub fn p_of(&self, term: &str) -> Option<f64> {
        self.index(term).map(|i| self.p[i])
    }
}

pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

pub fn aic(n: usize, rss: f64, k: usize) -> f64 {
    n as f64 * (rss / n as f64).ln() + 2.0 * k as f64
}

pub fn bic(n: usize, rss: f64, k: usize) -> f64 {
    let n = n as f64;
    n * (rss / n).ln() + k as f64 * n.ln()
}

/// Greedy column selection by modified Gram–Schmidt: a column is kept when
/// its component orthogonal to the already kept columns is non-negligible.
fn independent_columns(cols: &[&Column], n: usize) -> Vec<bool> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    cols.iter()
        .map(|c| {
            let x = DVector::from_column_slice(&c.values);
            let norm = x.norm();
            if norm == 0.0 || n == 0 {
                return false;
            }
            let mut r = x.clone();
            for _ in 0..2 {
                for q in &basis {
                    let proj = q.dot(&r);
                    r.axpy(-proj, q, 1.0);
                }
            }
            let rn = r.norm();
            if rn <= COLLINEAR_TOL * norm {
                false
            } else {
                basis.push(r / rn);
                true
            }
        })
        .collect()
}

struct Fit {
    beta: DVector<f64>,
    xtx_inv: DMatrix<f64>,
    resid: DVector<f64>,
}

fn fit(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<Fit, OlsError> {
    let k = x.ncols();
    let qr = x.clone().qr();
    let r = qr.r();
    let mut qty = y.clone();
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, k).into_owned();
    let beta = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| OlsError::RankDeficient("triangular factor is singular".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| OlsError::RankDeficient("triangular factor is singular".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let resid = y - x * &beta;
    Ok(Fit { beta, xtx_inv, resid })
}

fn centered_tss(y: &DVector<f64>) -> f64 {
    let m = y.mean();
    y.iter().map(|v| (v - m).powi(2)).sum()
}

pub fn ols(y: &[f64], design: &Design, se_mode: SeMode) -> Result<RegressionResult, OlsError> {
    let n = y.len();
    if design.nrows() != n {
        return Err(OlsError::DimensionMismatch {
            y: n,
            x: design.nrows(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(OlsError::NonFinite("response".into()));
    }
    for c in design.columns() {
        if c.values.iter().any(|v| !v.is_finite()) {
            return Err(OlsError::NonFinite(c.name.clone()));
        }
    }
    let yv = DVector::from_column_slice(y);
    let tss = centered_tss(&yv);
    if !(tss > 0.0) {
        return Err(OlsError::DegenerateResponse);
    }

    let ordered = design.ordered();
    let keep = independent_columns(&ordered, n);
    let kept: Vec<&Column> = ordered
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(c, _)| *c)
        .collect();
    let dropped: Vec<String> = ordered
        .iter()
        .zip(&keep)
        .filter(|(_, k)| !**k)
        .map(|(c, _)| c.name.clone())
        .collect();
    let k = kept.len();
    if k == 0 {
        return Err(OlsError::RankDeficient("no usable columns".into()));
    }
    if n <= k {
        return Err(OlsError::InsufficientObservations { n, p: k });
    }

    let x = DMatrix::from_fn(n, k, |i, j| kept[j].values[i]);
    let Fit { beta, xtx_inv, resid } = fit(&x, &yv)?;
    let rss = resid.norm_squared();
    let df = (n - k) as f64;

    let cov_classical = &xtx_inv * (rss / df);
    let xe = DMatrix::from_fn(n, k, |i, j| x[(i, j)] * resid[i]);
    let meat = xe.transpose() * &xe;
    let cov_robust = &xtx_inv * meat * &xtx_inv * (n as f64 / df);

    let se_classical: Vec<f64> = (0..k).map(|j| cov_classical[(j, j)].max(0.0).sqrt()).collect();
    let se_robust: Vec<f64> = (0..k).map(|j| cov_robust[(j, j)].max(0.0).sqrt()).collect();
    let (se, covariance) = match se_mode {
        SeMode::Classical => (se_classical.clone(), cov_classical),
        SeMode::Robust => (se_robust.clone(), cov_robust),
    };
    let tdist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    let t: Vec<f64> = (0..k).map(|j| beta[j] / se[j]).collect();
    let p: Vec<f64> = t
        .iter()
        .map(|tv| {
            if tv.is_finite() {
                2.0 * (1.0 - tdist.cdf(tv.abs()))
            } else if tv.is_nan() {
                f64::NAN
            } else {
                0.0
            }
        })
        .collect();

    let r2 = 1.0 - rss / tss;
    let adj_r2 = if design.has_intercept() {
        1.0 - (1.0 - r2) * (n as f64 - 1.0) / df
    } else {
        1.0 - (1.0 - r2) * n as f64 / df
    };

    let vif: Vec<Option<f64>> = (0..k)
        .map(|j| (kept[j].role == ColumnRole::Regressor).then(|| vif_for(&x, j)))
        .collect();
    let max_vif = vif
        .iter()
        .flatten()
        .copied()
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));

    Ok(RegressionResult {
        terms: kept.iter().map(|c| c.name.clone()).collect(),
        roles: kept.iter().map(|c| c.role).collect(),
        coef: beta.iter().copied().collect(),
        se,
        se_classical,
        se_robust,
        t,
        p,
        covariance,
        se_mode,
        n,
        k,
        rss,
        r2,
        adj_r2,
        aic: aic(n, rss, k),
        bic: bic(n, rss, k),
        vif,
        max_vif,
        dropped,
        residuals: resid.iter().copied().collect(),
    })
}

/// 1 / (1 − R²) of column `j` regressed on the other retained columns.
fn vif_for(x: &DMatrix<f64>, j: usize) -> f64 {
    let target = x.column(j).into_owned();
    let tss = centered_tss(&target);
    if x.ncols() == 1 || !(tss > 0.0) {
        return 1.0;
    }
    let others = x.clone().remove_column(j);
    let rss = match fit(&others, &target) {
        Ok(f) => f.resid.norm_squared(),
        Err(_) => return f64::INFINITY,
    };
    let r2 = 1.0 - rss / tss;
    if r2 >= 1.0 {
        f64::INFINITY
    } else {
        1.0 / (1.0 - r2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_linear_fit() {
        let x1: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let x2: Vec<f64> = (0..10).map(|i| ((i * 7) % 5) as f64).collect();
        let y: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| 1.5 + 2.0 * a - 0.5 * b).collect();
        let mut d = Design::with_intercept(10);
        d.add("x1", x1).add("x2", x2);
        let r = ols(&y, &d, SeMode::Robust).unwrap();
        assert_abs_diff_eq!(r.coef[0], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.coef[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.coef[2], -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.r2, 1.0, epsilon = 1e-12);
        assert!(r.rss < 1e-20);
    }

    #[test]
    fn orthogonal_regressors_have_unit_vif() {
        // Columns of a 2^2 factorial design are mutually orthogonal and centered.
        let a = vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let b = vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
        let y = vec![0.3, 1.0, -0.2, 0.5, 0.9, 0.1, 0.4, -0.7];
        let mut d = Design::with_intercept(8);
        d.add("a", a).add("b", b);
        let r = ols(&y, &d, SeMode::Classical).unwrap();
        for v in r.vif.iter().flatten() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-12);
        }
        assert_eq!(r.vif[0], None);
    }

    #[test]
    fn constant_regressor_is_dropped() {
        let y = vec![1.0, 2.0, 4.0, 3.0];
        let mut d = Design::with_intercept(4);
        d.add("ci", vec![0.5; 4]).add("x", vec![1.0, 2.0, 3.0, 5.0]);
        let r = ols(&y, &d, SeMode::Robust).unwrap();
        assert_eq!(r.dropped, vec!["ci".to_string()]);
        assert_eq!(r.terms, vec!["const", "x"]);
    }

    #[test]
    fn intercept_only_gives_mean() {
        let y = vec![1.0, 2.0, 6.0];
        let r = ols(&y, &Design::with_intercept(3), SeMode::Robust).unwrap();
        assert_abs_diff_eq!(r.coef[0], 3.0, epsilon = 1e-14);
        assert_eq!(r.max_vif, None);
    }

    #[test]
    fn dummies_skip_first_category() {
        let mut d = Design::with_intercept(4);
        d.add_dummies("year", &["2010", "2011", "2010", "2012"]);
        let names: Vec<&str> = d.columns().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["const", "year=2011", "year=2012"]);
    }

    #[test]
    fn error_paths() {
        let d = Design::with_intercept(3);
        assert_eq!(
            ols(&[1.0, 1.0, 1.0], &d, SeMode::Robust),
            Err(OlsError::DegenerateResponse)
        );
        assert!(matches!(
            ols(&[1.0, 2.0], &d, SeMode::Robust),
            Err(OlsError::DimensionMismatch { .. })
        ));
        let mut d = Design::with_intercept(2);
        d.add("x", vec![0.0, 1.0]);
        assert!(matches!(
            ols(&[1.0, 2.0], &d, SeMode::Robust),
            Err(OlsError::InsufficientObservations { n: 2, p: 2 })
        ));
        assert_eq!(
            ols(&[1.0, 2.0], &Design::new(2), SeMode::Robust).unwrap_err(),
            OlsError::RankDeficient("no usable columns".into())
        );
    }

    #[test]
    fn information_criteria_closed_form() {
        assert_abs_diff_eq!(aic(100, 50.0, 3), 100.0 * 0.5f64.ln() + 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            bic(100, 50.0, 3),
            100.0 * 0.5f64.ln() + 3.0 * 100f64.ln(),
            epsilon = 1e-12
        );
        assert_eq!(stars(0.001), "***");
        assert_eq!(stars(0.03), "**");
        assert_eq!(stars(0.07), "*");
        assert_eq!(stars(0.2), "");
    }
}
