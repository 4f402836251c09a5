//! Revealed comparative advantage, presence, and industry/city complexity.
//!
//! Industry complexity is the eigenvector belonging to the second-largest
//! eigenvalue of the row-stochastic industry transition matrix
//! `D_u⁻¹ Mᵀ D_c⁻¹ M`. That matrix is similar to the symmetric
//! `S = D_u^{-1/2} Mᵀ D_c⁻¹ M D_u^{-1/2}`, whose top eigenvector is known in
//! closed form (`sqrt(ubiquity)`, eigenvalue 1). We deflate it and take the
//! leading eigenvector of the remainder, which is also well defined when the
//! bipartite graph splits into exactly two components.
//!
//! The method of reflections is kept as an independent cross-check. Shifts by
//! a constant commute with the transition matrix, so each reflection is
//! re-standardized without changing the ranking it converges to.

use std::collections::BTreeMap;

use log::warn;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::ingest::{EmploymentPanel, Registry, Year};
use crate::stats::{mean, pearson, spearman, std_dev};

#[derive(Debug, Error, PartialEq)]
pub enum ComplexityError {
    #[error("year {0} not present in the panel")]
    YearNotFound(Year),
    #[error("total employment in {0} is zero")]
    DegenerateYear(Year),
    #[error("RCA cutoff must be positive, got {0}")]
    InvalidCutoff(f64),
    #[error("industry `{0}` has no complexity score")]
    UnknownIndustry(String),
}

pub type Result<T> = std::result::Result<T, ComplexityError>;

/// City × industry RCA values for one year.
#[derive(Debug, Clone, PartialEq)]
pub struct RcaMatrix {
    pub cities: Registry,
    pub industries: Registry,
    pub values: DMatrix<f64>,
    /// Cities with zero total employment (rows left at zero).
    pub empty_cities: Vec<usize>,
    /// Industries with zero national employment (columns left at zero).
    pub empty_industries: Vec<usize>,
}

pub fn compute_rca(panel: &EmploymentPanel, year: Year) -> Result<RcaMatrix> {
    if !panel.records().iter().any(|r| r.year == year) {
        return Err(ComplexityError::YearNotFound(year));
    }
    rca_from_matrix(panel.cities().clone(), panel.industries().clone(), &panel.matrix(year))
        .map_err(|_| ComplexityError::DegenerateYear(year))
}

/// RCA from a raw employment matrix. Errors only when total employment is zero.
pub fn rca_from_matrix(cities: Registry, industries: Registry, employment: &DMatrix<f64>) -> Result<RcaMatrix> {
    let total: f64 = employment.iter().sum();
    if !(total > 0.0) {
        return Err(ComplexityError::DegenerateYear(0));
    }
    let (nc, ni) = employment.shape();
    let city_tot: Vec<f64> = (0..nc).map(|c| employment.row(c).sum()).collect();
    let ind_tot: Vec<f64> = (0..ni).map(|i| employment.column(i).sum()).collect();
    let mut values = DMatrix::zeros(nc, ni);
    for c in 0..nc {
        if city_tot[c] <= 0.0 {
            continue;
        }
        for i in 0..ni {
            let f = employment[(c, i)];
            if f == 0.0 || ind_tot[i] <= 0.0 {
                continue;
            }
            values[(c, i)] = (f / city_tot[c]) / (ind_tot[i] / total);
        }
    }
    let empty_cities: Vec<usize> = (0..nc).filter(|&c| city_tot[c] <= 0.0).collect();
    let empty_industries: Vec<usize> = (0..ni).filter(|&i| ind_tot[i] <= 0.0).collect();
    if !empty_cities.is_empty() || !empty_industries.is_empty() {
        warn!(
            "RCA: {} empty cities and {} empty industries set to zero",
            empty_cities.len(),
            empty_industries.len()
        );
    }
    Ok(RcaMatrix {
        cities,
        industries,
        values,
        empty_cities,
        empty_industries,
    })
}

/// Binary city × industry presence with its margins.
#[derive(Debug, Clone, PartialEq)]
pub struct PresenceMatrix {
    pub cities: Registry,
    pub industries: Registry,
    /// 0/1 entries.
    pub m: DMatrix<f64>,
    /// Industries counted as missing for density (RCA below the cutoff).
    pub missing: DMatrix<bool>,
    pub diversity: Vec<usize>,
    pub ubiquity: Vec<usize>,
}

impl PresenceMatrix {
    /// Builds from a 0/1 matrix; every absent cell counts as missing.
    pub fn from_binary(cities: Registry, industries: Registry, m: DMatrix<f64>) -> Self {
        let missing = m.map(|v| v == 0.0);
        Self::with_missing(cities, industries, m, missing)
    }

    fn with_missing(cities: Registry, industries: Registry, m: DMatrix<f64>, missing: DMatrix<bool>) -> Self {
        let diversity = (0..m.nrows())
            .map(|c| m.row(c).iter().filter(|v| **v != 0.0).count())
            .collect();
        let ubiquity = (0..m.ncols())
            .map(|i| m.column(i).iter().filter(|v| **v != 0.0).count())
            .collect();
        PresenceMatrix {
            cities,
            industries,
            m,
            missing,
            diversity,
            ubiquity,
        }
    }

    pub fn is_present(&self, city: usize, industry: usize) -> bool {
        self.m[(city, industry)] != 0.0
    }

    /// Same matrix with rows and columns reordered: `rows[k]` is the source
    /// row placed at position k.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| self.m[(rows[r], cols[c])])
    }
}

/// `M = 1` where RCA is strictly above the cutoff. Cells strictly below the
/// cutoff are marked missing; cells exactly at the cutoff are neither.
pub fn binarize(rca: &RcaMatrix, cutoff: f64) -> Result<PresenceMatrix> {
    if !(cutoff > 0.0) {
        return Err(ComplexityError::InvalidCutoff(cutoff));
    }
    let m = rca.values.map(|v| if v > cutoff { 1.0 } else { 0.0 });
    let missing = rca.values.map(|v| v < cutoff);
    Ok(PresenceMatrix::with_missing(
        rca.cities.clone(),
        rca.industries.clone(),
        m,
        missing,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComplexityMethod {
    #[default]
    Eigenvector,
    Reflections,
}

impl std::str::FromStr for ComplexityMethod {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "eig" | "eigen" | "eigenvector" => Ok(ComplexityMethod::Eigenvector),
            "ref" | "reflections" => Ok(ComplexityMethod::Reflections),
            _ => Err(format!("unknown complexity method `{s}` (use eig or reflections)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityOptions {
    pub method: ComplexityMethod,
    /// Maximum number of reflection rounds (industry → city → industry).
    pub iterations: usize,
    /// Reflections stop early once the ranking is stable and no score moves
    /// by more than this.
    pub tolerance: f64,
}

impl Default for ComplexityOptions {
    fn default() -> Self {
        ComplexityOptions {
            method: ComplexityMethod::Eigenvector,
            iterations: 50,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexityDiagnostics {
    pub method_used: ComplexityMethod,
    /// Why the eigenvector route fell back to reflections, if it did.
    pub singular_structure: Option<String>,
    pub pruned_industries: Vec<usize>,
    pub pruned_cities: Vec<usize>,
    pub reflection_rounds: usize,
    pub reflections_converged: bool,
    /// Spearman correlation between eigenvector and reflections scores.
    pub rank_agreement: Option<f64>,
    /// Fewer than two industries could be ranked; all scores are zero.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityScores {
    pub industries: Registry,
    pub cities: Registry,
    /// Standardized industry complexity (mean 0, SD 1).
    pub raw: Vec<f64>,
    /// Industry complexity min-max normalized to [0, 1].
    pub ci: Vec<f64>,
    /// Standardized city complexity.
    pub city: Vec<f64>,
    pub diagnostics: ComplexityDiagnostics,
}

impl ComplexityScores {
    /// Scores taken as given, e.g. planted values in synthetic data. `ci`
    /// must already lie in [0, 1].
    pub fn from_ci(industries: Registry, ci: Vec<f64>) -> Self {
        assert_eq!(industries.len(), ci.len());
        let raw = standardize(&ci);
        ComplexityScores {
            industries,
            cities: Registry::default(),
            raw,
            ci,
            city: Vec::new(),
            diagnostics: ComplexityDiagnostics::default(),
        }
    }

    pub fn ci_of(&self, industry: &str) -> Option<f64> {
        self.industries.id(industry).map(|i| self.ci[i])
    }

    /// CI aligned to another registry; `None` for industries without a score.
    pub fn aligned_ci(&self, industries: &Registry) -> Vec<Option<f64>> {
        industries.codes().iter().map(|c| self.ci_of(c)).collect()
    }
}

fn standardize(xs: &[f64]) -> Vec<f64> {
    let m = mean(xs);
    let sd = std_dev(xs);
    if !(sd > 0.0) {
        return vec![0.0; xs.len()];
    }
    xs.iter().map(|x| (x - m) / sd).collect()
}

struct Core {
    rows: Vec<usize>,
    cols: Vec<usize>,
    m: DMatrix<f64>,
    kc: DVector<f64>,
    ku: DVector<f64>,
}

impl Core {
    fn new(p: &PresenceMatrix) -> Self {
        let rows: Vec<usize> = (0..p.m.nrows()).filter(|&c| p.diversity[c] > 0).collect();
        let cols: Vec<usize> = (0..p.m.ncols()).filter(|&i| p.ubiquity[i] > 0).collect();
        let m = DMatrix::from_fn(rows.len(), cols.len(), |r, c| {
            if p.m[(rows[r], cols[c])] != 0.0 {
                1.0
            } else {
                0.0
            }
        });
        let kc = DVector::from_iterator(rows.len(), rows.iter().map(|&c| p.diversity[c] as f64));
        let ku = DVector::from_iterator(cols.len(), cols.iter().map(|&i| p.ubiquity[i] as f64));
        Core { rows, cols, m, kc, ku }
    }

    /// One round: industries → cities (average) → industries (average).
    fn reflect(&self, x: &DVector<f64>) -> DVector<f64> {
        let city = (&self.m * x).component_div(&self.kc);
        (self.m.transpose() * city).component_div(&self.ku)
    }

    /// Mean diversity of the cities hosting each industry.
    fn host_diversity(&self) -> DVector<f64> {
        (self.m.transpose() * &self.kc).component_div(&self.ku)
    }

    fn orient(&self, mut x: DVector<f64>) -> DVector<f64> {
        let xs: Vec<f64> = x.iter().copied().collect();
        let neg_u: Vec<f64> = self.ku.iter().map(|u| -u).collect();
        let r = pearson(&xs, &neg_u).unwrap_or(0.0);
        let flip = if r.abs() > 1e-12 {
            r < 0.0
        } else {
            let hd: Vec<f64> = self.host_diversity().iter().copied().collect();
            pearson(&xs, &hd).unwrap_or(0.0) < 0.0
        };
        if flip {
            x.neg_mut();
        }
        x
    }

    fn eigenvector(&self) -> std::result::Result<DVector<f64>, String> {
        let n = self.cols.len();
        let inv_sqrt_c = self.kc.map(|k| 1.0 / k.sqrt());
        let inv_sqrt_u = self.ku.map(|k| 1.0 / k.sqrt());
        let a = DMatrix::from_fn(self.rows.len(), n, |r, c| {
            self.m[(r, c)] * inv_sqrt_c[r] * inv_sqrt_u[c]
        });
        let s = a.transpose() * &a;
        let w0 = self.ku.map(f64::sqrt).normalize();
        let deflated = s - &w0 * w0.transpose();
        let eig = SymmetricEigen::new(deflated);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let top = eig.eigenvalues[order[0]];
        let next = if n > 1 { eig.eigenvalues[order[1]] } else { 0.0 };
        if top < 1e-10 {
            return Err(format!(
                "second eigenvalue {top:.3e} vanishes (complete bipartite structure)"
            ));
        }
        if top - next < 1e-9 * top.max(1.0) {
            return Err(format!(
                "second eigenvalue {top:.6} is repeated; the complexity vector is not unique"
            ));
        }
        let v = eig.eigenvectors.column(order[0]).into_owned();
        Ok(v.component_mul(&inv_sqrt_u))
    }

    fn reflections(&self, opts: &ComplexityOptions) -> (DVector<f64>, usize, bool) {
        let mut x = standardize_vec(&self.ku);
        let mut rounds = 0;
        let mut converged = false;
        while rounds < opts.iterations {
            let next = standardize_vec(&self.reflect(&x));
            rounds += 1;
            let delta = (&next - &x).amax();
            let stable = spearman(next.as_slice(), x.as_slice()).is_some_and(|r| r >= 1.0);
            x = next;
            if stable && delta < opts.tolerance {
                converged = true;
                break;
            }
        }
        (x, rounds, converged)
    }
}

fn standardize_vec(x: &DVector<f64>) -> DVector<f64> {
    DVector::from_vec(standardize(x.as_slice()))
}

pub fn compute_complexity(p: &PresenceMatrix, opts: &ComplexityOptions) -> ComplexityScores {
    let ni = p.m.ncols();
    let nc = p.m.nrows();
    let core = Core::new(p);
    let mut diag = ComplexityDiagnostics {
        method_used: opts.method,
        pruned_industries: (0..ni).filter(|&i| p.ubiquity[i] == 0).collect(),
        pruned_cities: (0..nc).filter(|&c| p.diversity[c] == 0).collect(),
        ..ComplexityDiagnostics::default()
    };

    if core.cols.len() < 2 || core.rows.is_empty() {
        diag.degenerate = true;
        warn!("complexity: fewer than two industries present anywhere, scores set to zero");
        return ComplexityScores {
            industries: p.industries.clone(),
            cities: p.cities.clone(),
            raw: vec![0.0; ni],
            ci: vec![0.0; ni],
            city: vec![0.0; nc],
            diagnostics: diag,
        };
    }

    let (refl, rounds, converged) = core.reflections(opts);
    let refl = core.orient(refl);
    diag.reflection_rounds = rounds;
    diag.reflections_converged = converged;

    let eig = match core.eigenvector() {
        Ok(v) => Some(core.orient(v)),
        Err(why) => {
            warn!("complexity: {why}; using reflections");
            diag.singular_structure = Some(why);
            None
        }
    };
    if let Some(e) = &eig {
        diag.rank_agreement = spearman(e.as_slice(), refl.as_slice());
    }
    let active = match (opts.method, eig) {
        (ComplexityMethod::Eigenvector, Some(e)) => e,
        _ => {
            diag.method_used = ComplexityMethod::Reflections;
            refl
        }
    };
    let active = standardize_vec(&active);
    if active.iter().all(|v| *v == 0.0) {
        diag.degenerate = true;
    }

    let floor = active.min();
    let mut full = vec![floor; ni];
    for (k, &i) in core.cols.iter().enumerate() {
        full[i] = active[k];
    }
    let raw = standardize(&full);
    let (lo, hi) = raw
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    let ci = if hi > lo {
        raw.iter().map(|v| (v - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; ni]
    };

    let raw_core = DVector::from_iterator(core.cols.len(), core.cols.iter().map(|&i| raw[i]));
    let city_core = (&core.m * raw_core).component_div(&core.kc);
    let city_floor = city_core.min();
    let mut city = vec![city_floor; nc];
    for (k, &c) in core.rows.iter().enumerate() {
        city[c] = city_core[k];
    }
    let city = standardize(&city);

    ComplexityScores {
        industries: p.industries.clone(),
        cities: p.cities.clone(),
        raw,
        ci,
        city,
        diagnostics: diag,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupComplexity {
    pub group: String,
    pub complexity: f64,
    pub employment: f64,
    pub members: usize,
}

/// Employment-weighted mean CI within industry-code prefixes of length
/// `digits`, using employment pooled over the panel's years.
pub fn aggregate_complexity(ci: &ComplexityScores, panel: &EmploymentPanel, digits: usize) -> Vec<GroupComplexity> {
    let pooled = panel.pooled_matrix();
    let mut groups: BTreeMap<String, (f64, f64, usize)> = BTreeMap::new();
    for (i, code) in panel.industries().codes().iter().enumerate() {
        let Some(score) = ci.ci_of(code) else { continue };
        let emp = pooled.column(i).sum();
        let key = code.get(..digits).unwrap_or(code).to_string();
        let g = groups.entry(key).or_default();
        g.0 += emp * score;
        g.1 += emp;
        g.2 += 1;
    }
    groups
        .into_iter()
        .filter_map(|(group, (num, den, members))| {
            if den > 0.0 {
                Some(GroupComplexity {
                    group,
                    complexity: num / den,
                    employment: den,
                    members,
                })
            } else {
                warn!("complexity group {group} has no employment, skipped");
                None
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CitySummary {
    pub city: String,
    pub diversity: usize,
    /// Mean CI of present industries; `None` when diversity is zero.
    pub mean_ci: Option<f64>,
}

pub fn city_complexity_summary(m: &PresenceMatrix, ci: &ComplexityScores) -> Result<Vec<CitySummary>> {
    let aligned: Vec<f64> = m
        .industries
        .codes()
        .iter()
        .map(|c| ci.ci_of(c).ok_or_else(|| ComplexityError::UnknownIndustry(c.clone())))
        .collect::<Result<_>>()?;
    Ok((0..m.m.nrows())
        .map(|c| {
            let present: Vec<f64> = (0..m.m.ncols())
                .filter(|&i| m.is_present(c, i))
                .map(|i| aligned[i])
                .collect();
            CitySummary {
                city: m.cities.code(c).to_string(),
                diversity: present.len(),
                mean_ci: (!present.is_empty()).then(|| mean(&present)),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reg(prefix: &str, n: usize) -> Registry {
        Registry::from_codes((0..n).map(|k| format!("{prefix}{k:02}")))
    }

    fn presence(rows: &[&[u8]]) -> PresenceMatrix {
        let nc = rows.len();
        let ni = rows[0].len();
        let m = DMatrix::from_fn(nc, ni, |r, c| rows[r][c] as f64);
        PresenceMatrix::from_binary(reg("c", nc), reg("i", ni), m)
    }

    #[test]
    fn rca_identical_shares_is_one() {
        let f = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let r = rca_from_matrix(reg("c", 2), reg("i", 3), &f).unwrap();
        for v in r.values.iter() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn rca_diagonal_example() {
        let f = DMatrix::from_row_slice(2, 2, &[10.0, 0.0, 0.0, 10.0]);
        let r = rca_from_matrix(reg("c", 2), reg("i", 2), &f).unwrap();
        assert_eq!(r.values, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]));
        let p = binarize(&r, 1.0).unwrap();
        assert_eq!(p.m, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]));
        assert_eq!(p.diversity, vec![1, 1]);
        assert_eq!(p.ubiquity, vec![1, 1]);
    }

    #[test]
    fn rca_single_city_is_one() {
        let f = DMatrix::from_row_slice(1, 3, &[5.0, 0.0, 7.0]);
        let r = rca_from_matrix(reg("c", 1), reg("i", 3), &f).unwrap();
        assert_eq!(r.values.as_slice(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn rca_zero_total_is_degenerate() {
        let panel = EmploymentPanel::from_rows(vec![("a", "1511", 2010, 1.0)]).unwrap();
        assert_eq!(compute_rca(&panel, 2011), Err(ComplexityError::YearNotFound(2011)));
        let f = DMatrix::zeros(2, 2);
        assert!(rca_from_matrix(reg("c", 2), reg("i", 2), &f).is_err());
    }

    #[test]
    fn binarize_is_strict() {
        let r = rca_from_matrix(
            reg("c", 2),
            reg("i", 2),
            &DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
        )
        .unwrap();
        let p = binarize(&r, 1.0).unwrap();
        assert!(p.m.iter().all(|v| *v == 0.0));
        assert!(p.missing.iter().all(|v| !*v));
        assert!(binarize(&r, 0.0).is_err());
    }

    #[test]
    fn nested_matrix_ranks_inverse_to_ubiquity() {
        let p = presence(&[&[1, 1, 1, 1], &[1, 1, 1, 0], &[1, 1, 0, 0], &[1, 0, 0, 0]]);
        for method in [ComplexityMethod::Eigenvector, ComplexityMethod::Reflections] {
            let s = compute_complexity(
                &p,
                &ComplexityOptions {
                    method,
                    ..ComplexityOptions::default()
                },
            );
            assert_eq!(s.diagnostics.method_used, method);
            assert!(s.raw[0] < s.raw[1] && s.raw[1] < s.raw[2] && s.raw[2] < s.raw[3]);
            assert_eq!(s.ci[0], 0.0);
            assert_eq!(s.ci[3], 1.0);
            assert!(s.city[0] > s.city[3]);
        }
    }

    #[test]
    fn complete_bipartite_falls_back() {
        let p = presence(&[&[1, 1, 1], &[1, 1, 1]]);
        let s = compute_complexity(&p, &ComplexityOptions::default());
        assert!(s.diagnostics.singular_structure.is_some());
        assert_eq!(s.diagnostics.method_used, ComplexityMethod::Reflections);
        assert!(s.diagnostics.degenerate);
        assert!(s.ci.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn pruned_industries_get_the_minimum() {
        let p = presence(&[&[1, 1, 1, 0], &[1, 1, 0, 0], &[1, 0, 0, 0]]);
        let s = compute_complexity(&p, &ComplexityOptions::default());
        assert_eq!(s.diagnostics.pruned_industries, vec![3]);
        assert_eq!(s.ci[3], 0.0);
        assert_abs_diff_eq!(mean(&s.raw), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(std_dev(&s.raw), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn aggregation_is_employment_weighted() {
        let panel = EmploymentPanel::from_rows(vec![
            ("a", "1511", 2010, 3.0),
            ("a", "1512", 2010, 1.0),
            ("a", "2101", 2010, 4.0),
            ("a", "2102", 2010, 4.0),
            ("a", "3000", 2010, 2.0),
        ])
        .unwrap();
        let ci = ComplexityScores::from_ci(
            Registry::from_codes(["1511", "1512", "2101", "2102", "3000"]),
            vec![0.0, 1.0, 0.2, 0.8, 0.7],
        );
        let g = aggregate_complexity(&ci, &panel, 2);
        assert_abs_diff_eq!(g[0].complexity, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1].complexity, 0.5, epsilon = 1e-15);
        assert_eq!(g[2].complexity, 0.7);
        assert_eq!(g[2].members, 1);
    }

    #[test]
    fn city_summary_means_present_ci() {
        let p = presence(&[&[1, 1, 0], &[0, 0, 0]]);
        let ci = ComplexityScores::from_ci(p.industries.clone(), vec![0.4, 0.6, 1.0]);
        let s = city_complexity_summary(&p, &ci).unwrap();
        assert_eq!(s[0].diversity, 2);
        assert_abs_diff_eq!(s[0].mean_ci.unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(s[1].diversity, 0);
        assert_eq!(s[1].mean_ci, None);
    }
}
