//! Commuting-based delineation of municipalities into cities.
//!
//! Every municipality starts as its own cluster. A municipality's cluster is
//! merged with another cluster whenever the municipality sends at least the
//! threshold share of its workers to that cluster's members combined; this
//! repeats until nothing changes. Merging only raises those sums, so the
//! result does not depend on the visiting order and a lower threshold never
//! separates municipalities that a higher one joins. Clusters of two or more
//! form metros named after their most populous member. Singletons become
//! standalone cities if their population reaches the floor.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::ingest::{CommutingTable, Crosswalk};

#[derive(Debug, Error, PartialEq)]
pub enum DelineationError {
    #[error("threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),
    #[error("population floor must be positive, got {0}")]
    InvalidFloor(f64),
    #[error("delineation did not converge within {0} merges")]
    NonConvergence(usize),
    #[error("writing crosswalk: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelineationParams {
    pub threshold: f64,
    pub pop_floor: f64,
    /// Cap on cluster merges; `None` means one per municipality.
    pub max_steps: Option<usize>,
}

impl Default for DelineationParams {
    fn default() -> Self {
        DelineationParams {
            threshold: 0.10,
            pop_floor: 50_000.0,
            max_steps: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CityKind {
    Metro,
    Standalone,
}

impl CityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CityKind::Metro => "metro",
            CityKind::Standalone => "standalone",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct City {
    /// Named after the core municipality.
    pub id: String,
    pub kind: CityKind,
    /// Most populous member first, then the rest by descending population.
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetroAssignment {
    pub cities: Vec<City>,
    /// Municipalities that belong to no city, sorted.
    pub unassigned: Vec<String>,
}

impl MetroAssignment {
    pub fn metros(&self) -> impl Iterator<Item = &City> {
        self.cities.iter().filter(|c| c.kind == CityKind::Metro)
    }

    pub fn standalone(&self) -> impl Iterator<Item = &City> {
        self.cities.iter().filter(|c| c.kind == CityKind::Standalone)
    }

    /// Number of municipalities that belong to a multi-municipality metro.
    pub fn merged_count(&self) -> usize {
        self.metros().map(|c| c.members.len()).sum()
    }

    pub fn city_of(&self, municipality: &str) -> Option<&City> {
        self.cities.iter().find(|c| c.members.iter().any(|m| m == municipality))
    }

    pub fn crosswalk(&self) -> Crosswalk {
        let mut cw = Crosswalk::default();
        for c in &self.cities {
            for m in &c.members {
                cw.map.insert(m.clone(), c.id.clone());
            }
        }
        cw.dropped.extend(self.unassigned.iter().cloned());
        cw
    }

    /// Writes `municipality,city,kind`, with kind `dropped` for unassigned
    /// municipalities.
    pub fn write_crosswalk<W: Write>(&self, writer: W) -> Result<(), DelineationError> {
        let io = |e: csv::Error| DelineationError::Io(e.to_string());
        let mut rows: BTreeMap<&str, (&str, &str)> = BTreeMap::new();
        for c in &self.cities {
            for m in &c.members {
                rows.insert(m, (&c.id, c.kind.as_str()));
            }
        }
        for m in &self.unassigned {
            rows.insert(m, ("", "dropped"));
        }
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["municipality", "city", "kind"]).map_err(io)?;
        for (m, (c, k)) in rows {
            w.write_record([m, c, k]).map_err(io)?;
        }
        w.flush().map_err(|e| DelineationError::Io(e.to_string()))
    }

    pub fn save_crosswalk(&self, path: &Path) -> Result<(), DelineationError> {
        let f = std::fs::File::create(path).map_err(|e| DelineationError::Io(e.to_string()))?;
        self.write_crosswalk(f)
    }
}

pub fn delineate_metros(
    table: &CommutingTable,
    params: &DelineationParams,
) -> Result<MetroAssignment, DelineationError> {
    if !(params.threshold > 0.0 && params.threshold < 1.0) {
        return Err(DelineationError::InvalidThreshold(params.threshold));
    }
    if !(params.pop_floor > 0.0) {
        return Err(DelineationError::InvalidFloor(params.pop_floor));
    }
    let reg = table.municipalities();
    let n = reg.len();
    let max_steps = params.max_steps.unwrap_or(n);

    let mut outgoing: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for l in table.links() {
        outgoing[l.origin].push((l.destination, l.share));
    }

    // Cluster label per municipality: the smallest index among its members.
    let mut label: Vec<usize> = (0..n).collect();
    let mut steps = 0usize;
    loop {
        let mut changed = false;
        for m in 0..n {
            let mut to: BTreeMap<usize, f64> = BTreeMap::new();
            for &(d, s) in &outgoing[m] {
                if label[d] != label[m] {
                    *to.entry(label[d]).or_default() += s;
                }
            }
            let Some((&target, _)) = to.iter().find(|(_, s)| **s >= params.threshold) else {
                continue;
            };
            steps += 1;
            if steps > max_steps {
                return Err(DelineationError::NonConvergence(max_steps));
            }
            let (keep, gone) = (label[m].min(target), label[m].max(target));
            for l in label.iter_mut().filter(|l| **l == gone) {
                *l = keep;
            }
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for m in 0..n {
        clusters.entry(label[m]).or_default().push(m);
    }
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut metros: Vec<Vec<usize>> = Vec::new();
    for mut members in clusters.into_values().filter(|c| c.len() >= 2) {
        members.sort_by(|&a, &b| {
            table
                .population(b)
                .total_cmp(&table.population(a))
                .then_with(|| reg.code(a).cmp(reg.code(b)))
        });
        for &m in &members {
            owner[m] = Some(metros.len());
        }
        metros.push(members);
    }

    let mut cities: Vec<City> = metros
        .iter()
        .map(|members| City {
            id: reg.code(members[0]).to_string(),
            kind: CityKind::Metro,
            members: members.iter().map(|&m| reg.code(m).to_string()).collect(),
        })
        .collect();
    let mut unassigned = Vec::new();
    for m in 0..n {
        if owner[m].is_some() {
            continue;
        }
        if table.population(m) >= params.pop_floor {
            cities.push(City {
                id: reg.code(m).to_string(),
                kind: CityKind::Standalone,
                members: vec![reg.code(m).to_string()],
            });
        } else {
            unassigned.push(reg.code(m).to_string());
        }
    }
    cities.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(MetroAssignment { cities, unassigned })
}

/// True when no municipality sends at least `threshold` of its workers to
/// the members of a city or metro other than its own, counting every
/// municipality outside a metro as its own group.
pub fn is_fixed_point(table: &CommutingTable, assignment: &MetroAssignment, threshold: f64) -> bool {
    let reg = table.municipalities();
    let mut group: Vec<usize> = (0..reg.len()).collect();
    for c in assignment.metros() {
        let ids: Vec<usize> = c.members.iter().filter_map(|m| reg.id(m)).collect();
        if let Some(&first) = ids.iter().min() {
            for id in ids {
                group[id] = first;
            }
        }
    }
    let mut into: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for l in table.links() {
        if group[l.origin] != group[l.destination] {
            *into.entry((l.origin, group[l.destination])).or_default() += l.share;
        }
    }
    into.values().all(|s| *s < threshold)
}
