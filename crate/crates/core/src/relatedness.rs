//! Skill relatedness from labour flows, density and complexity potential.

use log::warn;
use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

use crate::complexity::{ComplexityScores, PresenceMatrix};
use crate::ingest::{FlowMatrix, Registry};

#[derive(Debug, Error, PartialEq)]
pub enum RelatednessError {
    #[error("flow matrix has no between-industry switches")]
    EmptyFlows,
    #[error("industry universes differ between {0} and {1}")]
    MismatchedIndustries(&'static str, &'static str),
    #[error("industry `{0}` has no complexity score")]
    UnknownIndustry(String),
}

pub type Result<T> = std::result::Result<T, RelatednessError>;

/// Observed over expected job switches between industries.
#[derive(Debug, Clone, PartialEq)]
pub struct SkillProximity {
    pub industries: Registry,
    /// Zero wherever `defined` is false.
    pub values: DMatrix<f64>,
    pub defined: DMatrix<bool>,
    /// Off-diagonal outflow per industry.
    pub outflow: Vec<f64>,
    /// Off-diagonal inflow per industry.
    pub inflow: Vec<f64>,
    pub total: f64,
    /// Industries with zero in- or out-flow.
    pub isolated: Vec<usize>,
}

/// Diagonal (within-industry) switches are ignored in every margin and the
/// diagonal itself is left undefined.
pub fn skill_proximity(flows: &FlowMatrix) -> Result<SkillProximity> {
    let phi = flows.counts();
    let n = phi.nrows();
    let mut outflow = vec![0.0; n];
    let mut inflow = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                outflow[i] += phi[(i, j)];
                inflow[j] += phi[(i, j)];
            }
        }
    }
    let total: f64 = outflow.iter().sum();
    if !(total > 0.0) {
        return Err(RelatednessError::EmptyFlows);
    }
    let mut values = DMatrix::zeros(n, n);
    let mut defined = DMatrix::from_element(n, n, false);
    for i in 0..n {
        for j in 0..n {
            if i == j || outflow[i] <= 0.0 || inflow[j] <= 0.0 {
                continue;
            }
            values[(i, j)] = (phi[(i, j)] / outflow[i]) / (inflow[j] / total);
            defined[(i, j)] = true;
        }
    }
    let isolated: Vec<usize> = (0..n).filter(|&i| outflow[i] <= 0.0 || inflow[i] <= 0.0).collect();
    if !isolated.is_empty() {
        warn!("skill proximity: {} isolated industries", isolated.len());
    }
    Ok(SkillProximity {
        industries: flows.industries().clone(),
        values,
        defined,
        outflow,
        inflow,
        total,
        isolated,
    })
}

/// Symmetric relatedness in [-1, 1] with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct RelatednessMatrix {
    pub industries: Registry,
    pub e: DMatrix<f64>,
    /// Off-diagonal pairs (counted once) left at zero because proximity was
    /// undefined in either direction.
    pub undefined_pairs: usize,
}

/// Maps a symmetrized proximity to [-1, 1]; 1 maps to 0.
pub fn rescale(s: f64) -> f64 {
    (s - 1.0) / (s + 1.0)
}

pub fn build_relatedness(sp: &SkillProximity) -> RelatednessMatrix {
    let n = sp.values.nrows();
    let mut e = DMatrix::zeros(n, n);
    let mut undefined_pairs = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if !(sp.defined[(i, j)] && sp.defined[(j, i)]) {
                undefined_pairs += 1;
                continue;
            }
            let s = (sp.values[(i, j)] + sp.values[(j, i)]) / 2.0;
            let v = rescale(s);
            e[(i, j)] = v;
            e[(j, i)] = v;
        }
    }
    if undefined_pairs > 0 {
        warn!("relatedness: {undefined_pairs} industry pairs undefined, set to 0");
    }
    RelatednessMatrix {
        industries: sp.industries.clone(),
        e,
        undefined_pairs,
    }
}

impl RelatednessMatrix {
    /// Re-indexes onto another industry universe; unknown industries get
    /// zero rows and columns.
    pub fn align_to(&self, industries: &Registry) -> RelatednessMatrix {
        let map: Vec<Option<usize>> = industries.codes().iter().map(|c| self.industries.id(c)).collect();
        let n = industries.len();
        let e = DMatrix::from_fn(n, n, |a, b| match (map[a], map[b]) {
            (Some(x), Some(y)) => self.e[(x, y)],
            _ => 0.0,
        });
        RelatednessMatrix {
            industries: industries.clone(),
            e,
            undefined_pairs: self.undefined_pairs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub cities: Registry,
    pub industries: Registry,
    /// Meaningful only where `missing` is true; zero elsewhere.
    pub density: DMatrix<f64>,
    pub missing: DMatrix<bool>,
    pub present: DMatrix<bool>,
    /// Missing cells whose relatedness denominator was zero.
    pub zero_denominators: usize,
}

impl DensityTable {
    pub fn get(&self, city: usize, industry: usize) -> Option<f64> {
        self.missing[(city, industry)].then(|| self.density[(city, industry)])
    }
}

/// Density of every missing industry with respect to a city's present
/// industries. With `clip_negative`, negative relatedness is treated as zero.
pub fn density(e: &RelatednessMatrix, m: &PresenceMatrix, clip_negative: bool) -> Result<DensityTable> {
    if e.industries != m.industries {
        return Err(RelatednessError::MismatchedIndustries("relatedness", "presence"));
    }
    let weights = if clip_negative {
        e.e.map(|v| v.max(0.0))
    } else {
        e.e.clone()
    };
    let (nc, ni) = m.m.shape();
    let denominators: Vec<f64> = (0..ni).map(|i| weights.row(i).sum()).collect();
    let rows: Vec<(Vec<f64>, usize)> = (0..nc)
        .into_par_iter()
        .map(|c| {
            let mut out = vec![0.0; ni];
            let mut zero = 0;
            for (i, slot) in out.iter_mut().enumerate() {
                if !m.missing[(c, i)] {
                    continue;
                }
                if denominators[i] == 0.0 {
                    zero += 1;
                    continue;
                }
                let num: f64 = (0..ni).filter(|&j| m.is_present(c, j)).map(|j| weights[(i, j)]).sum();
                *slot = num / denominators[i];
            }
            (out, zero)
        })
        .collect();
    let zero_denominators = rows.iter().map(|r| r.1).sum();
    if zero_denominators > 0 {
        warn!("density: {zero_denominators} cells with zero denominator set to 0");
    }
    let density = DMatrix::from_fn(nc, ni, |c, i| rows[c].0[i]);
    Ok(DensityTable {
        cities: m.cities.clone(),
        industries: m.industries.clone(),
        density,
        missing: m.missing.clone(),
        present: m.m.map(|v| v != 0.0),
        zero_denominators,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contribution {
    pub industry: usize,
    pub density: f64,
    pub ci: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityPotential {
    pub cities: Registry,
    pub industries: Registry,
    pub cp: Vec<f64>,
    /// Cities without any missing industry (CP reported as 0).
    pub no_missing: Vec<usize>,
    pub contributions: Vec<Vec<Contribution>>,
}

pub fn complexity_potential(d: &DensityTable, ci: &ComplexityScores) -> Result<ComplexityPotential> {
    let aligned: Vec<f64> = d
        .industries
        .codes()
        .iter()
        .map(|c| ci.ci_of(c).ok_or_else(|| RelatednessError::UnknownIndustry(c.clone())))
        .collect::<Result<_>>()?;
    let (nc, ni) = d.density.shape();
    let mut cp = vec![0.0; nc];
    let mut no_missing = Vec::new();
    let mut contributions = Vec::with_capacity(nc);
    for c in 0..nc {
        let parts: Vec<Contribution> = (0..ni)
            .filter(|&i| d.missing[(c, i)])
            .map(|i| Contribution {
                industry: i,
                density: d.density[(c, i)],
                ci: aligned[i],
            })
            .collect();
        if parts.is_empty() {
            no_missing.push(c);
        } else {
            cp[c] = parts.iter().map(|p| p.density * p.ci).sum::<f64>() / parts.len() as f64;
        }
        contributions.push(parts);
    }
    if !no_missing.is_empty() {
        warn!(
            "complexity potential: {} cities without missing industries",
            no_missing.len()
        );
    }
    Ok(ComplexityPotential {
        cities: d.cities.clone(),
        industries: d.industries.clone(),
        cp,
        no_missing,
        contributions,
    })
}
