//! City-size scaling of diversity and complexity, and the formal-rate
//! decomposition by industry complexity decile.

use crate::complexity::{ComplexityScores, PresenceMatrix};
use crate::ingest::{EmploymentPanel, PopulationPanel, Year};
use crate::stats::pearson;

use super::{EconError, Result};

/// Rank-based deciles of the defined values; ties are broken by position.
pub fn complexity_deciles(values: &[Option<f64>]) -> Vec<Option<u8>> {
    let mut idx: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_some()).collect();
    idx.sort_by(|&a, &b| values[a].unwrap().total_cmp(&values[b].unwrap()).then(a.cmp(&b)));
    let n = idx.len();
    let mut out = vec![None; values.len()];
    for (rank, i) in idx.into_iter().enumerate() {
        out[i] = Some((rank * 10 / n) as u8);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CityScaling {
    pub city: String,
    pub wap: f64,
    pub diversity: usize,
    pub mean_ci: Option<f64>,
    pub formal_rate: f64,
    /// Formal rate contributed by each complexity decile; sums to the rate
    /// up to employment in industries without a decile.
    pub decile_rates: [f64; 10],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSummary {
    pub year: Year,
    pub diversity_log_wap: Option<f64>,
    pub mean_ci_log_wap: Option<f64>,
    pub cities: Vec<CityScaling>,
}

impl ScalingSummary {
    /// Correlations are undefined with fewer than two cities or no spread.
    pub fn degenerate(&self) -> bool {
        self.diversity_log_wap.is_none() || self.mean_ci_log_wap.is_none()
    }
}

pub fn scaling_summary(
    panel: &EmploymentPanel,
    population: &PopulationPanel,
    ci: &ComplexityScores,
    m: &PresenceMatrix,
    year: Year,
) -> Result<ScalingSummary> {
    let f = panel.matrix(year);
    let ci_m: Vec<Option<f64>> = ci
        .aligned_ci(&m.industries)
        .into_iter()
        .zip(&m.ubiquity)
        .map(|(c, &u)| c.filter(|_| u > 0))
        .collect();
    let deciles = complexity_deciles(&ci_m);
    let mut cities = Vec::new();
    for (c, code) in m.cities.codes().iter().enumerate() {
        let Some(pc) = panel.cities().id(code) else { continue };
        let total: f64 = f.row(pc).sum();
        if total <= 0.0 {
            continue;
        }
        let wap = population.get(code, year).ok_or_else(|| EconError::MissingPopulation {
            city: code.clone(),
            year,
        })?;
        let mut decile_rates = [0.0; 10];
        for (i, icode) in m.industries.codes().iter().enumerate() {
            if let (Some(d), Some(pi)) = (deciles[i], panel.industries().id(icode)) {
                decile_rates[d as usize] += f[(pc, pi)] / wap;
            }
        }
        let present: Vec<f64> = (0..m.industries.len())
            .filter(|&i| m.is_present(c, i))
            .filter_map(|i| ci_m[i])
            .collect();
        cities.push(CityScaling {
            city: code.clone(),
            wap,
            diversity: m.diversity[c],
            mean_ci: (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64),
            formal_rate: total / wap,
            decile_rates,
        });
    }
    let log_wap: Vec<f64> = cities.iter().map(|c| c.wap.ln()).collect();
    let div: Vec<f64> = cities.iter().map(|c| c.diversity as f64).collect();
    let (lw_ci, mci): (Vec<f64>, Vec<f64>) = cities.iter().filter_map(|c| c.mean_ci.map(|m| (c.wap.ln(), m))).unzip();
    Ok(ScalingSummary {
        year,
        diversity_log_wap: pearson(&div, &log_wap),
        mean_ci_log_wap: pearson(&mci, &lw_ci),
        cities,
    })
}
