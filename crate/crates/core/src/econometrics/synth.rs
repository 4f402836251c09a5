//! Synthetic datasets with known parameters, used as test oracles and for
//! the bundled demonstration pipeline.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as StdNormal};

use crate::complexity::ComplexityScores;
use crate::ingest::{
    AuxCityPanel, AuxRecord, CommutingTable, EmploymentPanel, FirmRecord, FirmYearTable, FlowMatrix, IngestError,
    PopulationPanel, Registry, Year,
};
use crate::relatedness::{build_relatedness, skill_proximity, RelatednessMatrix};
use crate::stats::{mean, std_dev};
use crate::yearly::{year_metrics, StackOptions};

use super::{EconError, Result};

/// Two-digit divisions used for generated industry codes.
const DIVISIONS: [&str; 36] = [
    "15", "17", "18", "19", "20", "21", "22", "24", "25", "26", "27", "28", "29", "31", "33", "34", "35", "36", "40",
    "45", "50", "51", "52", "55", "60", "63", "64", "65", "67", "70", "71", "72", "73", "74", "85", "92",
];

/// Industries in excluded divisions, present only in the municipal file.
const EXCLUDED_CODES: [&str; 4] = ["1010", "1110", "7511", "9500"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub cities: usize,
    pub industries: usize,
    pub start_year: Year,
    pub years: usize,
    /// Population elasticity of employment at zero complexity.
    pub beta: f64,
    /// Change of that elasticity per unit of complexity.
    pub gamma: f64,
    /// Population at which complexity has no level effect.
    pub pop_ref: f64,
    /// Median formal rate in the first year.
    pub target_rate: f64,
    /// SD of the city-industry-year employment shock.
    pub noise_sd: f64,
    /// SD of the persistent city-industry effect.
    pub cell_effect_sd: f64,
    /// Growth of log employment per SD of lagged complexity potential.
    pub coupling: f64,
    /// Growth of log employment per SD of the government spending change.
    pub govexp_effect: f64,
    /// SD of the city-year growth shock.
    pub growth_noise_sd: f64,
    pub min_city_pop: f64,
    pub max_city_pop: f64,
    /// Number of complexity bands in the labor-flow blocks.
    pub flow_blocks: usize,
    /// Expected switches between two average industries in the same block.
    pub flow_scale: f64,
    pub firms_per_city: usize,
    /// Increase in the log-wage SD of a firm per unit of complexity.
    pub wage_dispersion_slope: f64,
    /// Municipalities below the population floor that belong to no city.
    pub rural_municipalities: usize,
    /// An industry of complexity q exists only in cities whose log
    /// population is at least this fraction q of the way from the smallest
    /// to the largest city. Zero lets every city host every industry.
    pub nesting: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            cities: 62,
            industries: 60,
            start_year: 2008,
            years: 9,
            beta: 1.0,
            gamma: 0.4,
            pop_ref: 500_000.0,
            target_rate: 0.3,
            noise_sd: 0.05,
            cell_effect_sd: 0.5,
            coupling: 0.05,
            govexp_effect: 0.01,
            growth_noise_sd: 0.02,
            min_city_pop: 60_000.0,
            max_city_pop: 8_000_000.0,
            flow_blocks: 6,
            flow_scale: 40.0,
            firms_per_city: 8,
            wage_dispersion_slope: 0.5,
            rural_municipalities: 12,
            nesting: 0.9,
        }
    }
}

impl SynthConfig {
    /// Settings for recovering the elasticity parameters: no persistent cell
    /// effects and no growth dynamics.
    pub fn elasticity(seed: u64) -> Self {
        SynthConfig {
            seed,
            beta: 0.8,
            gamma: 0.3,
            noise_sd: 0.2,
            cell_effect_sd: 0.0,
            coupling: 0.0,
            govexp_effect: 0.0,
            growth_noise_sd: 0.0,
            firms_per_city: 0,
            ..Default::default()
        }
    }

    /// Settings for recovering the growth coupling. Nesting is off: with it,
    /// complexity potential is close to a function of city size alone.
    pub fn growth(seed: u64, coupling: f64) -> Self {
        SynthConfig {
            seed,
            coupling,
            nesting: 0.0,
            firms_per_city: 0,
            ..Default::default()
        }
    }

    /// Settings for the diversity scaling check: no persistent cell effects,
    /// so observed diversity tracks the planted expectation.
    pub fn scaling(seed: u64) -> Self {
        SynthConfig {
            seed,
            cell_effect_sd: 0.0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(EconError::InvalidConfig(m.to_string()));
        if self.cities < 2 {
            return bad("need at least two cities");
        }
        if self.industries < 10 || self.industries > DIVISIONS.len() * 9 {
            return bad("industries must be between 10 and 324");
        }
        if self.years < 2 {
            return bad("need at least two years");
        }
        if !(self.target_rate > 0.0 && self.target_rate < 1.0) {
            return bad("target_rate must lie in (0, 1)");
        }
        if !(self.pop_ref > 0.0) || !(self.min_city_pop >= 1.0) || !(self.max_city_pop > self.min_city_pop) {
            return bad("populations must be positive with min < max");
        }
        let sds = [
            self.noise_sd,
            self.cell_effect_sd,
            self.growth_noise_sd,
            self.wage_dispersion_slope,
        ];
        if sds.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return bad("noise levels must be finite and non-negative");
        }
        if self.flow_blocks == 0 || self.flow_blocks > self.industries || !(self.flow_scale > 0.0) {
            return bad("flow blocks must be in 1..=industries with positive scale");
        }
        if !(0.0..=1.0).contains(&self.nesting) {
            return bad("nesting must lie in [0, 1]");
        }
        let params = [self.beta, self.gamma, self.coupling, self.govexp_effect];
        if params.iter().any(|p| !p.is_finite()) {
            return bad("planted parameters must be finite");
        }
        Ok(())
    }
}

/// Generated inputs plus the city-level truth they were built from.
#[derive(Debug, Clone)]
pub struct SyntheticBundle {
    pub config: SynthConfig,
    /// Municipality-level employment, including excluded divisions.
    pub employment: EmploymentPanel,
    /// Municipality-level working-age population.
    pub population: PopulationPanel,
    pub commuting: CommutingTable,
    pub flows: FlowMatrix,
    pub firms: FirmYearTable,
    /// City-level controls keyed by city id.
    pub aux: AuxCityPanel,
    /// City-level employment over the included industries.
    pub city_employment: EmploymentPanel,
    pub city_population: PopulationPanel,
    /// Planted industry complexity in [0, 1].
    pub planted_ci: ComplexityScores,
    /// City id of every municipality that belongs to a city.
    pub membership: BTreeMap<String, String>,
    /// Number of industries with RCA above one in each city, computed from
    /// first-year expected employment without any noise or cell effects.
    pub planted_diversity: BTreeMap<String, usize>,
}

struct CityPlan {
    id: String,
    pop0: f64,
    growth: f64,
    members: Vec<(String, f64)>,
}

fn normal(mean: f64, sd: f64) -> Normal<f64> {
    Normal::new(mean, sd).expect("finite normal parameters")
}

fn industry_codes(n: usize) -> Vec<String> {
    let per = n.div_ceil(DIVISIONS.len());
    (0..n)
        .map(|k| format!("{}{}{}", DIVISIONS[k / per], k % per + 1, 1))
        .collect()
}

fn plan_cities(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> (Vec<CityPlan>, Vec<(String, f64)>) {
    let (lo, hi) = (cfg.min_city_pop.ln(), cfg.max_city_pop.ln());
    let mut next = 0usize;
    let mut code = || {
        next += 1;
        format!("{:05}", 5000 + 3 * next)
    };
    let mut cities = Vec::with_capacity(cfg.cities);
    for _ in 0..cfg.cities {
        let pop0 = rng.random_range(lo..hi).exp();
        let growth = normal(0.01, 0.005).sample(rng);
        let mut n_sat = rng.random_range(0..=3usize);
        let core_share = rng.random_range(0.6..0.85);
        if pop0 * core_share < 50_000.0 {
            n_sat = 0;
        }
        let core = code();
        let mut members = Vec::new();
        if n_sat == 0 {
            members.push((core.clone(), 1.0));
        } else {
            members.push((core.clone(), core_share));
            let w: Vec<f64> = (0..n_sat).map(|_| rng.random_range(0.5..1.5)).collect();
            let ws: f64 = w.iter().sum();
            for wi in w {
                members.push((code(), (1.0 - core_share) * wi / ws));
            }
        }
        cities.push(CityPlan {
            id: core,
            pop0,
            growth,
            members,
        });
    }
    let rural = (0..cfg.rural_municipalities)
        .map(|_| (code(), rng.random_range(5_000.0..40_000.0)))
        .collect();
    (cities, rural)
}

fn commuting(cities: &[CityPlan], rural: &[(String, f64)], rng: &mut ChaCha8Rng) -> Result<CommutingTable> {
    let mut links: Vec<(String, String, f64)> = Vec::new();
    let mut pops: Vec<(String, f64)> = Vec::new();
    for (c, city) in cities.iter().enumerate() {
        for (m, share) in &city.members {
            pops.push((m.clone(), city.pop0 * share));
            if *m != city.id {
                links.push((m.clone(), city.id.clone(), rng.random_range(0.15..0.4)));
            }
        }
        // Weak cross-city commuting between cores.
        let other = (c + 1 + rng.random_range(0..cities.len() - 1)) % cities.len();
        links.push((city.id.clone(), cities[other].id.clone(), rng.random_range(0.0..0.03)));
    }
    for (m, p) in rural {
        pops.push((m.clone(), *p));
        let target = &cities[rng.random_range(0..cities.len())].id;
        links.push((m.clone(), target.clone(), rng.random_range(0.0..0.05)));
    }
    CommutingTable::new(&links, &pops).map_err(|e| EconError::InvalidConfig(e.to_string()))
}

/// Block-structured switching counts: industries exchange far more workers
/// within their complexity band than across bands.
fn flows(cfg: &SynthConfig, industries: &Registry, q: &[f64], rng: &mut ChaCha8Rng) -> Result<FlowMatrix> {
    let n = q.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| q[a].total_cmp(&q[b]));
    let mut block = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        block[i] = rank * cfg.flow_blocks / n;
    }
    let size: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let mut counts = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let affinity = if block[i] == block[j] { 1.0 } else { 0.08 };
            let lambda = cfg.flow_scale * size[i] * size[j] * affinity;
            counts[(i, j)] = Poisson::new(lambda).expect("positive rate").sample(rng);
        }
    }
    FlowMatrix::new(industries.clone(), counts).map_err(|e| EconError::InvalidConfig(e.to_string()))
}

fn standardized(values: &[f64]) -> Vec<f64> {
    let m = mean(values);
    let s = std_dev(values);
    values.iter().map(|v| if s > 0.0 { (v - m) / s } else { 0.0 }).collect()
}

pub fn generate_synthetic(cfg: &SynthConfig) -> Result<SyntheticBundle> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let nc = cfg.cities;
    let ni = cfg.industries;
    let years: Vec<Year> = (0..cfg.years).map(|k| cfg.start_year + k as Year).collect();

    let codes = industry_codes(ni);
    let industries = Registry::from_codes(codes.clone());
    // Registry order is sorted, which matches generation order.
    let mut q: Vec<f64> = (0..ni).map(|k| k as f64 / (ni - 1) as f64).collect();
    q.shuffle(&mut rng);

    let (cities, rural) = plan_cities(cfg, &mut rng);
    let commuting = commuting(&cities, &rural, &mut rng)?;
    let flows = flows(cfg, &industries, &q, &mut rng)?;
    let relatedness: RelatednessMatrix =
        build_relatedness(&skill_proximity(&flows).map_err(|e| EconError::Stack(e.into()))?);

    let cell = normal(0.0, cfg.cell_effect_sd.max(f64::MIN_POSITIVE));
    let eta: Vec<Vec<f64>> = (0..nc)
        .map(|_| {
            (0..ni)
                .map(|_| {
                    if cfg.cell_effect_sd > 0.0 {
                        cell.sample(&mut rng)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let year_effect: Vec<f64> = years.iter().map(|_| normal(0.0, 0.02).sample(&mut rng)).collect();
    let mut govexp: Vec<Vec<f64>> = vec![Vec::with_capacity(years.len()); nc];
    for g in govexp.iter_mut() {
        let mut level = normal(100.0, 20.0).sample(&mut rng).max(10.0);
        for _ in &years {
            g.push(level);
            level = (level + normal(0.0, 5.0).sample(&mut rng)).max(1.0);
        }
    }
    let inst: Vec<f64> = (0..nc).map(|_| normal(0.0, 1.0).sample(&mut rng)).collect();
    let edu: Vec<f64> = (0..nc).map(|_| normal(0.0, 1.0).sample(&mut rng)).collect();

    let (lo, hi) = (cfg.min_city_pop.ln(), cfg.max_city_pop.ln());
    let hosts: Vec<Vec<bool>> = cities
        .iter()
        .map(|city| {
            let lp = city.pop0.ln();
            q.iter().map(|qi| lp >= lo + cfg.nesting * qi * (hi - lo)).collect()
        })
        .collect();

    let xi = -cfg.gamma * cfg.pop_ref.ln();
    let pop = |c: usize, t: usize| cities[c].pop0 * (cities[c].growth * t as f64).exp();
    let shape = |c: usize, i: usize, t: usize| {
        let lp = pop(c, t).ln();
        cfg.beta * lp + xi * q[i] + cfg.gamma * lp * q[i] + year_effect[t] + eta[c][i]
    };
    // Intercept putting the median first-year formal rate at the target.
    let mut base_rates: Vec<f64> = (0..nc)
        .map(|c| {
            (0..ni)
                .filter(|&i| hosts[c][i])
                .map(|i| shape(c, i, 0).exp())
                .sum::<f64>()
                / pop(c, 0)
        })
        .collect();
    base_rates.sort_by(f64::total_cmp);
    let alpha = cfg.target_rate.ln() - base_rates[nc / 2].ln();

    let noise = normal(0.0, cfg.noise_sd.max(f64::MIN_POSITIVE));
    let growth_noise = normal(0.0, cfg.growth_noise_sd.max(f64::MIN_POSITIVE));
    let stack = StackOptions::default();
    let city_ids = Registry::from_codes(cities.iter().map(|c| c.id.clone()));
    let mut lambda = vec![0.0; nc];
    let mut city_rows: Vec<(String, String, Year, f64)> = Vec::new();
    for (t, &year) in years.iter().enumerate() {
        if t > 0 {
            let prev: Vec<(String, String, Year, f64)> =
                city_rows.iter().filter(|r| r.2 == year - 1).cloned().collect();
            let panel = EmploymentPanel::from_rows(prev).map_err(|e| EconError::InvalidConfig(e.to_string()))?;
            let cp_prev = if cfg.coupling != 0.0 {
                let metrics = year_metrics(&panel, year - 1, &relatedness, &stack)?;
                let by_id: Vec<f64> = cities
                    .iter()
                    .map(|c| {
                        let k = metrics.potential.cities.id(&c.id).expect("city present");
                        metrics.potential.cp[k]
                    })
                    .collect();
                standardized(&by_id)
            } else {
                vec![0.0; nc]
            };
            let dgov: Vec<f64> = (0..nc).map(|c| govexp[c][t] - govexp[c][t - 1]).collect();
            let dgov = standardized(&dgov);
            for c in 0..nc {
                let shock = if cfg.growth_noise_sd > 0.0 {
                    growth_noise.sample(&mut rng)
                } else {
                    0.0
                };
                lambda[c] += cfg.coupling * cp_prev[c] + cfg.govexp_effect * dgov[c] + shock;
            }
        }
        for c in 0..nc {
            for i in (0..ni).filter(|&i| hosts[c][i]) {
                let e = if cfg.noise_sd > 0.0 {
                    noise.sample(&mut rng)
                } else {
                    0.0
                };
                let f = (alpha + shape(c, i, t) + lambda[c] + e).exp();
                city_rows.push((cities[c].id.clone(), codes[i].clone(), year, f));
            }
        }
    }
    debug_assert_eq!(city_ids.len(), nc);

    // Municipal employment splits each city cell by population share.
    let mut muni_rows: Vec<(String, String, Year, f64)> = Vec::new();
    let plan_of: BTreeMap<&str, &CityPlan> = cities.iter().map(|c| (c.id.as_str(), c)).collect();
    for (city, ind, year, f) in &city_rows {
        for (m, share) in &plan_of[city.as_str()].members {
            muni_rows.push((m.clone(), ind.clone(), *year, f * share));
        }
    }
    for (c, city) in cities.iter().enumerate() {
        for (t, &year) in years.iter().enumerate() {
            for code in EXCLUDED_CODES {
                let f = pop(c, t) * 0.002 * rng.random_range(0.5..1.5);
                muni_rows.push((city.id.clone(), code.to_string(), year, f));
            }
        }
    }
    for (m, p) in &rural {
        for &year in &years {
            for code in codes.iter().step_by(7) {
                muni_rows.push((m.clone(), code.clone(), year, p * 0.01 * rng.random_range(0.5..1.5)));
            }
        }
    }

    let mut city_pop_rows = Vec::new();
    let mut muni_pop_rows = Vec::new();
    for (c, city) in cities.iter().enumerate() {
        for (t, &year) in years.iter().enumerate() {
            let p = pop(c, t);
            city_pop_rows.push((city.id.clone(), year, p));
            for (m, share) in &city.members {
                muni_pop_rows.push((m.clone(), year, p * share));
            }
        }
    }
    for (m, p) in &rural {
        for &year in &years {
            muni_pop_rows.push((m.clone(), year, *p));
        }
    }

    let aux_records = cities
        .iter()
        .enumerate()
        .flat_map(|(c, city)| {
            let (gov, inst, edu) = (&govexp[c], inst[c], edu[c]);
            years.iter().enumerate().map(move |(t, &year)| AuxRecord {
                city: city.id.clone(),
                year,
                govexp_pc: gov[t],
                inst_quality: Some(inst),
                edu_quality: Some(edu),
            })
        })
        .collect();

    let firms = firms(cfg, &cities, &hosts, &codes, &q, &years, &mut rng);

    let planted_diversity = {
        let expected: Vec<Vec<f64>> = (0..nc)
            .map(|c| {
                let lp = pop(c, 0).ln();
                (0..ni)
                    .map(|i| {
                        if hosts[c][i] {
                            (cfg.beta * lp + xi * q[i] + cfg.gamma * lp * q[i]).exp()
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let city_tot: Vec<f64> = expected.iter().map(|r| r.iter().sum()).collect();
        let ind_tot: Vec<f64> = (0..ni).map(|i| expected.iter().map(|r| r[i]).sum()).collect();
        let total: f64 = city_tot.iter().sum();
        cities
            .iter()
            .enumerate()
            .map(|(c, city)| {
                let n = (0..ni)
                    .filter(|&i| expected[c][i] * total / (city_tot[c] * ind_tot[i]) > 1.0)
                    .count();
                (city.id.clone(), n)
            })
            .collect()
    };

    let wrap = |e: IngestError| EconError::InvalidConfig(e.to_string());
    let membership = cities
        .iter()
        .flat_map(|c| c.members.iter().map(move |(m, _)| (m.clone(), c.id.clone())))
        .collect();
    Ok(SyntheticBundle {
        config: cfg.clone(),
        employment: EmploymentPanel::from_rows(muni_rows).map_err(wrap)?,
        population: PopulationPanel::from_rows(muni_pop_rows).map_err(wrap)?,
        commuting,
        flows,
        firms: FirmYearTable::new(firms).map_err(wrap)?,
        aux: AuxCityPanel::new(aux_records).map_err(wrap)?,
        city_employment: EmploymentPanel::from_rows(city_rows).map_err(wrap)?,
        city_population: PopulationPanel::from_rows(city_pop_rows).map_err(wrap)?,
        planted_ci: ComplexityScores::from_ci(industries, q),
        membership,
        planted_diversity,
    })
}

/// Firms with ten wage quantiles whose dispersion grows with complexity.
fn firms(
    cfg: &SynthConfig,
    cities: &[CityPlan],
    hosts: &[Vec<bool>],
    codes: &[String],
    q: &[f64],
    years: &[Year],
    rng: &mut ChaCha8Rng,
) -> Vec<FirmRecord> {
    let z: Vec<f64> = {
        let sn = StdNormal::new(0.0, 1.0).expect("standard normal");
        (0..10).map(|k| sn.inverse_cdf((k as f64 + 0.5) / 10.0)).collect()
    };
    let mut out = Vec::new();
    let mut id = 0;
    for (c, city) in cities.iter().enumerate() {
        let hosted: Vec<usize> = (0..codes.len()).filter(|&i| hosts[c][i]).collect();
        let city_effect = normal(0.0, 0.1).sample(rng);
        for _ in 0..cfg.firms_per_city {
            id += 1;
            let i = hosted[rng.random_range(0..hosted.len())];
            let base_emp = normal(4.3, 1.0).sample(rng).exp().max(1.0);
            let sigma = 0.25 + cfg.wage_dispersion_slope * q[i];
            let age = rng.random_range(28.0..48.0);
            let women = rng.random_range(0.1..0.7);
            for (t, &year) in years.iter().enumerate() {
                let employees = (base_emp * normal(0.0, 0.1).sample(rng).exp()).round().max(1.0);
                let s = (sigma + normal(0.0, 0.03).sample(rng)).max(0.01);
                let mu = 7.0 + 0.5 * q[i] + city_effect + 0.02 * t as f64;
                let avg = (mu + 0.03 * employees.ln() + normal(0.0, 0.1).sample(rng)).exp();
                let mut covariates = BTreeMap::new();
                covariates.insert("avg_age".to_string(), age);
                covariates.insert("share_women".to_string(), women);
                out.push(FirmRecord {
                    firm: format!("F{id:05}"),
                    city: city.id.clone(),
                    industry: codes[i].clone(),
                    year,
                    employees,
                    avg_wage: avg,
                    wages: z.iter().map(|zk| (mu + s * zk).exp()).collect(),
                    covariates,
                });
            }
        }
    }
    out
}

impl SyntheticBundle {
    /// Writes the raw inputs (`employment.csv`, `population.csv`,
    /// `commuting.csv`, `flows.csv`, `firms.csv`, `aux.csv`) and the
    /// planted complexity (`planted_ci.csv`).
    pub fn write_to(&self, dir: &Path) -> std::result::Result<(), IngestError> {
        std::fs::create_dir_all(dir).map_err(|source| IngestError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        self.employment.save(&dir.join("employment.csv"))?;
        self.population.save(&dir.join("population.csv"))?;
        self.commuting.save(&dir.join("commuting.csv"))?;
        self.flows.save(&dir.join("flows.csv"))?;
        self.firms.save(&dir.join("firms.csv"))?;
        self.aux.save(&dir.join("aux.csv"))?;
        let mut w = csv::Writer::from_path(dir.join("planted_ci.csv"))?;
        w.write_record(["industry", "ci"])?;
        for (code, ci) in self.planted_ci.industries.codes().iter().zip(&self.planted_ci.ci) {
            w.write_record([code.clone(), ci.to_string()])?;
        }
        w.flush().map_err(|e| IngestError::Csv(e.into()))?;
        Ok(())
    }
}
