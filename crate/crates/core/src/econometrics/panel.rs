//! Formal employment rates, the shift-share supply shock and the city-year
//! regression frame.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use crate::ingest::{AuxCityPanel, EmploymentPanel, PopulationPanel, Year};
use crate::relatedness::RelatednessMatrix;
use crate::yearly::{all_years, potential_by_city_year, StackOptions};

use super::{EconError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FormalRate {
    pub city: String,
    pub year: Year,
    pub employment: f64,
    pub wap: f64,
    pub rate: f64,
}

/// Formal employment over working-age population for every city-year with
/// population data in a panel year. City-years without employment get 0.
pub fn formal_rate(employment: &EmploymentPanel, population: &PopulationPanel) -> Result<Vec<FormalRate>> {
    let totals = employment.city_totals();
    let years: BTreeSet<Year> = employment.years().into_iter().collect();
    for (city, year) in totals.keys() {
        if population.get(city, *year).is_none() {
            return Err(EconError::MissingPopulation {
                city: city.clone(),
                year: *year,
            });
        }
    }
    Ok(population
        .rows()
        .filter(|(_, y, _)| years.contains(y))
        .map(|(c, y, wap)| {
            let f = totals.get(&(c.to_string(), y)).copied().unwrap_or(0.0);
            FormalRate {
                city: c.to_string(),
                year: y,
                employment: f,
                wap,
                rate: f / wap,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BartikShocks {
    pub values: BTreeMap<(String, Year), f64>,
    /// City-industry terms skipped because leave-one-out growth was undefined.
    pub undefined_terms: usize,
}

/// `B[c,t] = Σ_i s[c,i,t−1] · g[−c,i,t]` where `s` is the city's lagged
/// industry share and `g` the log growth of national employment in `i`
/// excluding city `c`.
pub fn bartik(panel: &EmploymentPanel) -> Result<BartikShocks> {
    let years = panel.years();
    let pairs: Vec<(Year, Year)> = years
        .windows(2)
        .filter(|w| w[1] == w[0] + 1)
        .map(|w| (w[0], w[1]))
        .collect();
    if pairs.is_empty() {
        return Err(EconError::InsufficientYears);
    }
    let mut out = BartikShocks::default();
    for (t0, t1) in pairs {
        let f0 = panel.matrix(t0);
        let f1 = panel.matrix(t1);
        let (nc, ni) = f0.shape();
        let nat0: Vec<f64> = (0..ni).map(|i| f0.column(i).sum()).collect();
        let nat1: Vec<f64> = (0..ni).map(|i| f1.column(i).sum()).collect();
        for c in 0..nc {
            let total0: f64 = f0.row(c).sum();
            if total0 <= 0.0 {
                continue;
            }
            let mut b = 0.0;
            for i in 0..ni {
                if f0[(c, i)] <= 0.0 {
                    continue;
                }
                let share = f0[(c, i)] / total0;
                let loo0 = nat0[i] - f0[(c, i)];
                let loo1 = nat1[i] - f1[(c, i)];
                if loo0 <= 1e-12 * nat0[i] || loo1 <= 1e-12 * nat1[i].max(nat0[i]) {
                    out.undefined_terms += 1;
                    continue;
                }
                b += share * (loo1.ln() - loo0.ln());
            }
            out.values.insert((panel.cities().code(c).to_string(), t1), b);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRow {
    pub city: String,
    pub year: Year,
    pub f: f64,
    pub df: f64,
    pub f_lag: f64,
    pub cp_lag: f64,
    pub bartik: Option<f64>,
    pub dgovexp: Option<f64>,
    pub inst_quality: Option<f64>,
    pub edu_quality: Option<f64>,
    pub log_wap: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CityYearFrame {
    pub rows: Vec<FrameRow>,
    /// City-years dropped because the lagged rate or potential was missing.
    pub missing_lag: usize,
}

const FRAME_HEADER: [&str; 11] = [
    "city",
    "year",
    "f",
    "df",
    "f_lag",
    "cp_lag",
    "bartik",
    "dgovexp",
    "inst_quality",
    "edu_quality",
    "log_wap",
];

pub fn assemble_frame(
    rates: &[FormalRate],
    potential: &BTreeMap<(String, Year), f64>,
    shocks: &BartikShocks,
    aux: Option<&AuxCityPanel>,
) -> CityYearFrame {
    let by_key: BTreeMap<(&str, Year), &FormalRate> = rates.iter().map(|r| ((r.city.as_str(), r.year), r)).collect();
    let mut frame = CityYearFrame::default();
    for (&(city, year), r) in &by_key {
        let lag = by_key.get(&(city, year - 1));
        let cp = potential.get(&(city.to_string(), year - 1));
        let (Some(lag), Some(cp)) = (lag, cp) else {
            frame.missing_lag += 1;
            continue;
        };
        let a = aux.and_then(|a| a.get(city, year));
        let a_lag = aux.and_then(|a| a.get(city, year - 1));
        frame.rows.push(FrameRow {
            city: city.to_string(),
            year,
            f: r.rate,
            df: r.rate - lag.rate,
            f_lag: lag.rate,
            cp_lag: *cp,
            bartik: shocks.values.get(&(city.to_string(), year)).copied(),
            dgovexp: match (a, a_lag) {
                (Some(a), Some(b)) => Some(a.govexp_pc - b.govexp_pc),
                _ => None,
            },
            inst_quality: a.and_then(|a| a.inst_quality),
            edu_quality: a.and_then(|a| a.edu_quality),
            log_wap: r.wap.ln(),
        });
    }
    frame
}

impl CityYearFrame {
    pub fn write<W: Write>(&self, writer: W) -> csv::Result<()> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(FRAME_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.city.clone(),
                r.year.to_string(),
                r.f.to_string(),
                r.df.to_string(),
                r.f_lag.to_string(),
                r.cp_lag.to_string(),
                opt(r.bartik),
                opt(r.dgovexp),
                opt(r.inst_quality),
                opt(r.edu_quality),
                r.log_wap.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(reader: R) -> std::result::Result<Self, String> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
        if headers.iter().collect::<Vec<_>>() != FRAME_HEADER {
            return Err(format!("unexpected frame header {headers:?}"));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let num = |k: usize| -> std::result::Result<f64, String> {
                rec[k].parse::<f64>().map_err(|_| format!("bad number `{}`", &rec[k]))
            };
            let opt = |k: usize| -> std::result::Result<Option<f64>, String> {
                if rec[k].is_empty() {
                    Ok(None)
                } else {
                    num(k).map(Some)
                }
            };
            rows.push(FrameRow {
                city: rec[0].to_string(),
                year: rec[1].parse().map_err(|_| format!("bad year `{}`", &rec[1]))?,
                f: num(2)?,
                df: num(3)?,
                f_lag: num(4)?,
                cp_lag: num(5)?,
                bartik: opt(6)?,
                dgovexp: opt(7)?,
                inst_quality: opt(8)?,
                edu_quality: opt(9)?,
                log_wap: num(10)?,
            });
        }
        Ok(CityYearFrame { rows, missing_lag: 0 })
    }
}

/// Runs the yearly metric stack and assembles the growth frame in one go.
pub fn build_growth_frame(
    employment: &EmploymentPanel,
    population: &PopulationPanel,
    relatedness: &RelatednessMatrix,
    aux: Option<&AuxCityPanel>,
    opts: &StackOptions,
) -> Result<(CityYearFrame, BTreeMap<(String, Year), f64>)> {
    let rates = formal_rate(employment, population)?;
    let metrics = all_years(employment, relatedness, opts)?;
    let cp = potential_by_city_year(&metrics);
    let shocks = bartik(employment)?;
    Ok((assemble_frame(&rates, &cp, &shocks, aux), cp))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongDifference {
    pub city: String,
    pub cp_start: f64,
    pub f_start: f64,
    pub f_end: f64,
}

/// Initial complexity potential against the change in the formal rate over
/// the whole window, one row per city observed at both ends.
pub fn long_difference(
    rates: &[FormalRate],
    potential: &BTreeMap<(String, Year), f64>,
    start: Year,
    end: Year,
) -> Vec<LongDifference> {
    let by_key: BTreeMap<(&str, Year), f64> = rates.iter().map(|r| ((r.city.as_str(), r.year), r.rate)).collect();
    let cities: BTreeSet<&str> = rates.iter().map(|r| r.city.as_str()).collect();
    cities
        .into_iter()
        .filter_map(|c| {
            Some(LongDifference {
                city: c.to_string(),
                cp_start: *potential.get(&(c.to_string(), start))?,
                f_start: *by_key.get(&(c, start))?,
                f_end: *by_key.get(&(c, end))?,
            })
        })
        .collect()
}
