//! The full metric stack for one panel year: RCA → presence → complexity →
//! density → complexity potential.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::complexity::{
    binarize, compute_complexity, compute_rca, ComplexityError, ComplexityOptions, ComplexityScores, PresenceMatrix,
    RcaMatrix,
};
use crate::ingest::{EmploymentPanel, Year};
use crate::relatedness::{
    complexity_potential, density, ComplexityPotential, DensityTable, RelatednessError, RelatednessMatrix,
};

#[derive(Debug, Error, PartialEq)]
pub enum StackError {
    #[error(transparent)]
    Complexity(#[from] ComplexityError),
    #[error(transparent)]
    Relatedness(#[from] RelatednessError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackOptions {
    pub complexity: ComplexityOptions,
    pub rca_cutoff: f64,
    pub clip_negative: bool,
}

impl Default for StackOptions {
    fn default() -> Self {
        StackOptions {
            complexity: ComplexityOptions::default(),
            rca_cutoff: 1.0,
            clip_negative: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct YearMetrics {
    pub year: Year,
    pub rca: RcaMatrix,
    pub presence: PresenceMatrix,
    pub scores: ComplexityScores,
    pub density: DensityTable,
    pub potential: ComplexityPotential,
}

/// `relatedness` may cover a different industry universe; it is aligned to
/// the panel's industries first.
pub fn year_metrics(
    panel: &EmploymentPanel,
    year: Year,
    relatedness: &RelatednessMatrix,
    opts: &StackOptions,
) -> Result<YearMetrics, StackError> {
    let rca = compute_rca(panel, year)?;
    let presence = binarize(&rca, opts.rca_cutoff)?;
    let scores = compute_complexity(&presence, &opts.complexity);
    let e = if relatedness.industries == *panel.industries() {
        relatedness.clone()
    } else {
        relatedness.align_to(panel.industries())
    };
    let density = density(&e, &presence, opts.clip_negative)?;
    let potential = complexity_potential(&density, &scores)?;
    Ok(YearMetrics {
        year,
        rca,
        presence,
        scores,
        density,
        potential,
    })
}

/// Metrics for every year of the panel, computed in parallel.
pub fn all_years(
    panel: &EmploymentPanel,
    relatedness: &RelatednessMatrix,
    opts: &StackOptions,
) -> Result<Vec<YearMetrics>, StackError> {
    let aligned = relatedness.align_to(panel.industries());
    panel
        .years()
        .into_par_iter()
        .map(|y| year_metrics(panel, y, &aligned, opts))
        .collect()
}

/// Complexity potential keyed by (city code, year).
pub fn potential_by_city_year(metrics: &[YearMetrics]) -> BTreeMap<(String, Year), f64> {
    let mut out = BTreeMap::new();
    for m in metrics {
        for (c, cp) in m.potential.cp.iter().enumerate() {
            // Cities absent in this year have an all-zero RCA row.
            if m.rca.empty_cities.contains(&c) {
                continue;
            }
            out.insert((m.potential.cities.code(c).to_string(), m.year), *cp);
        }
    }
    out
}

/// Complexity of the panel pooled over all years. Used wherever a single,
/// time-invariant industry score is needed.
pub fn pooled_complexity(
    panel: &EmploymentPanel,
    opts: &StackOptions,
) -> Result<(PresenceMatrix, ComplexityScores), StackError> {
    let rca = crate::complexity::rca_from_matrix(
        panel.cities().clone(),
        panel.industries().clone(),
        &panel.pooled_matrix(),
    )?;
    let presence = binarize(&rca, opts.rca_cutoff)?;
    let scores = compute_complexity(&presence, &opts.complexity);
    Ok((presence, scores))
}
