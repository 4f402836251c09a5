//! Employment–population elasticities that vary with industry complexity.

use std::collections::BTreeMap;

use crate::complexity::ComplexityScores;
use crate::ingest::{EmploymentPanel, PopulationPanel, Year};

use super::ols::{ols, Design, RegressionResult, SeMode};
use super::scaling::complexity_deciles;
use super::{EconError, Result};

const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub ci: f64,
    pub elasticity: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityCurve {
    pub beta: f64,
    pub beta_se: f64,
    pub gamma: f64,
    pub gamma_se: f64,
    /// Covariance of the β and γ estimates.
    pub cov_beta_gamma: f64,
    pub curve: Vec<CurvePoint>,
    pub result: RegressionResult,
}

impl ElasticityCurve {
    pub fn at(&self, ci: f64) -> f64 {
        self.beta + self.gamma * ci
    }

    pub fn se_at(&self, ci: f64) -> f64 {
        let var = self.beta_se.powi(2) + ci * ci * self.gamma_se.powi(2) + 2.0 * ci * self.cov_beta_gamma;
        var.max(0.0).sqrt()
    }
}

struct Obs {
    log_f: f64,
    log_p: f64,
    industry: usize,
    year: Year,
}

fn observations(panel: &EmploymentPanel, population: &PopulationPanel) -> Result<Vec<Obs>> {
    let mut out = Vec::new();
    for rec in panel.records() {
        if rec.employment <= 0.0 {
            continue;
        }
        let city = panel.cities().code(rec.city);
        let p = population
            .get(city, rec.year)
            .ok_or_else(|| EconError::MissingPopulation {
                city: city.to_string(),
                year: rec.year,
            })?;
        out.push(Obs {
            log_f: rec.employment.ln(),
            log_p: p.ln(),
            industry: rec.industry,
            year: rec.year,
        });
    }
    Ok(out)
}

/// Fits `ln F[c,i,t] = α + β ln P[c,t] + ξ CI[i] + γ ln P[c,t]·CI[i] + year effects`
/// over positive cells of industries with a complexity score.
pub fn elasticity_regression(
    panel: &EmploymentPanel,
    population: &PopulationPanel,
    ci: &ComplexityScores,
    year_fe: bool,
    se_mode: SeMode,
) -> Result<ElasticityCurve> {
    let aligned = ci.aligned_ci(panel.industries());
    let obs: Vec<(Obs, f64)> = observations(panel, population)?
        .into_iter()
        .filter_map(|o| aligned[o.industry].map(|c| (o, c)))
        .collect();
    if obs.is_empty() {
        return Err(EconError::NoObservations);
    }
    let n = obs.len();
    let y: Vec<f64> = obs.iter().map(|(o, _)| o.log_f).collect();
    let mut design = Design::with_intercept(n);
    design.add("log_pop", obs.iter().map(|(o, _)| o.log_p).collect());
    design.add("ci", obs.iter().map(|(_, c)| *c).collect());
    design.add("log_pop:ci", obs.iter().map(|(o, c)| o.log_p * c).collect());
    if year_fe {
        let years: Vec<String> = obs.iter().map(|(o, _)| o.year.to_string()).collect();
        design.add_dummies("year", &years);
    }
    let result = ols(&y, &design, se_mode)?;
    let (Some(b), Some(g)) = (result.index("log_pop"), result.index("log_pop:ci")) else {
        return Err(EconError::Ols(super::OlsError::RankDeficient(
            "population or interaction term dropped".into(),
        )));
    };
    let mut curve = ElasticityCurve {
        beta: result.coef[b],
        beta_se: result.se[b],
        gamma: result.coef[g],
        gamma_se: result.se[g],
        cov_beta_gamma: result.covariance[(b, g)],
        curve: Vec::new(),
        result,
    };
    curve.curve = (0..=20)
        .map(|k| {
            let c = k as f64 / 20.0;
            let e = curve.at(c);
            let h = Z95 * curve.se_at(c);
            CurvePoint {
                ci: c,
                elasticity: e,
                lower: e - h,
                upper: e + h,
            }
        })
        .collect();
    Ok(curve)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoGroupSlopes {
    pub bottom: f64,
    pub bottom_se: f64,
    pub top: f64,
    pub top_se: f64,
    /// Per city-year employment of each group, for plotting:
    /// (city, year, ln P, ln F bottom, ln F top).
    pub points: Vec<(String, Year, f64, Option<f64>, Option<f64>)>,
}

impl TwoGroupSlopes {
    pub fn gap(&self) -> f64 {
        self.top - self.bottom
    }
}

/// Scaling of employment in the bottom and top complexity deciles with
/// population. Each group's city-year employment is summed and its log
/// regressed on log population, both groups in one pooled fit with
/// group-specific intercepts, slopes and year effects.
pub fn decile_slopes(
    panel: &EmploymentPanel,
    population: &PopulationPanel,
    ci: &ComplexityScores,
    se_mode: SeMode,
) -> Result<TwoGroupSlopes> {
    let deciles = complexity_deciles(&ci.aligned_ci(panel.industries()));
    let mut sums: BTreeMap<(String, Year), [f64; 2]> = BTreeMap::new();
    for rec in panel.records() {
        let g = match deciles[rec.industry] {
            Some(0) => 0,
            Some(9) => 1,
            _ => continue,
        };
        let key = (panel.cities().code(rec.city).to_string(), rec.year);
        sums.entry(key).or_insert([0.0; 2])[g] += rec.employment;
    }
    let mut points = Vec::new();
    let (mut y, mut top, mut lp_bottom, mut lp_top, mut years) = (vec![], vec![], vec![], vec![], vec![]);
    for ((city, year), s) in &sums {
        let p = population
            .get(city, *year)
            .ok_or_else(|| EconError::MissingPopulation {
                city: city.clone(),
                year: *year,
            })?;
        let lp = p.ln();
        let logs = s.map(|v| (v > 0.0).then(|| v.ln()));
        for (g, l) in logs.iter().enumerate() {
            if let Some(l) = l {
                y.push(*l);
                let is_top = g as f64;
                top.push(is_top);
                lp_bottom.push(lp * (1.0 - is_top));
                lp_top.push(lp * is_top);
                years.push(year.to_string());
            }
        }
        points.push((city.clone(), *year, lp, logs[0], logs[1]));
    }
    if y.is_empty() {
        return Err(EconError::NoObservations);
    }
    let mut design = Design::with_intercept(y.len());
    design.add("top", top);
    design.add("log_pop:bottom", lp_bottom);
    design.add("log_pop:top", lp_top);
    design.add_dummies("year", &years);
    let r = ols(&y, &design, se_mode)?;
    let get = |t: &str| -> Result<(f64, f64)> {
        match (r.coef_of(t), r.se_of(t)) {
            (Some(c), Some(s)) => Ok((c, s)),
            _ => Err(EconError::Ols(super::OlsError::RankDeficient(format!("{t} dropped")))),
        }
    };
    let (bottom, bottom_se) = get("log_pop:bottom")?;
    let (top, top_se) = get("log_pop:top")?;
    Ok(TwoGroupSlopes {
        bottom,
        bottom_se,
        top,
        top_se,
        points,
    })
}
