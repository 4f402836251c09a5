//! Loading and validation of the input datasets.
//!
//! Every dataset is a UTF-8 CSV file with a fixed header. Codes (cities,
//! municipalities, industries, firms) are kept as strings and interned into
//! sorted [`Registry`] tables so that integer IDs never depend on row order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use log::warn;
use nalgebra::DMatrix;
use thiserror::Error;

pub type Year = i32;

/// Optional firm-level human-resource covariates recognised in `firms.csv`.
pub const HR_COLUMNS: [&str; 7] = [
    "avg_age",
    "age_sd",
    "retention",
    "wage_inc_mean",
    "wage_inc_sd",
    "share_women",
    "gender_gap",
];

/// ISIC rev. 3 divisions excluded by default: oil, mining, public
/// administration and domestic service.
pub const DEFAULT_EXCLUDED_DIVISIONS: [&str; 4] = ["10", "11", "75", "95"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{column}` in header")]
    MissingColumn { column: String },
    #[error("line {line}: column `{column}` has non-numeric value `{value}`")]
    NonNumericValue { line: u64, column: String, value: String },
    #[error("line {line}: duplicate key {key}")]
    DuplicateKey { line: u64, key: String },
    #[error("line {line}: negative employment {value}")]
    NegativeEmployment { line: u64, value: f64 },
    #[error("line {line}: {message}")]
    InvalidValue { line: u64, message: String },
    #[error("line {line}: industry code `{code}` is not a {digits}-digit code")]
    InvalidIndustryCode { line: u64, code: String, digits: usize },
    #[error("city `{city}` has zero total employment in {year}")]
    EmptyCityYear { city: String, year: Year },
    #[error("municipality `{0}` is neither mapped nor listed as dropped in the crosswalk")]
    UnmappedMunicipality(String),
}

impl IngestError {
    fn is_row_level(&self) -> bool {
        matches!(
            self,
            IngestError::NonNumericValue { .. }
                | IngestError::DuplicateKey { .. }
                | IngestError::NegativeEmployment { .. }
                | IngestError::InvalidValue { .. }
                | IngestError::InvalidIndustryCode { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, IngestError>;

/// Sorted, de-duplicated code table. IDs are positions in the sorted list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    codes: Vec<String>,
    index: HashMap<String, usize>,
}

impl Registry {
    pub fn from_codes<I, S>(codes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = codes.into_iter().map(Into::into).collect();
        let codes: Vec<String> = set.into_iter().collect();
        let index = codes.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Registry { codes, index }
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn id(&self, code: &str) -> Option<usize> {
        self.index.get(code).copied()
    }

    pub fn code(&self, id: usize) -> &str {
        &self.codes[id]
    }

    pub fn codes(&self) -> &[String] {
        &self.codes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DatasetKind {
    Employment,
    Population,
    Flows,
    Commuting,
    Firms,
    Aux,
}

impl DatasetKind {
    pub fn required_columns(self) -> &'static [&'static str] {
        match self {
            DatasetKind::Employment => &["city", "industry", "year", "employment"],
            DatasetKind::Population => &["city", "year", "wap"],
            DatasetKind::Flows => &["industry_from", "industry_to", "switches"],
            DatasetKind::Commuting => &["origin", "destination", "share", "origin_population"],
            DatasetKind::Firms => &["firm", "city", "industry", "year", "employees", "avg_wage"],
            DatasetKind::Aux => &["city", "year", "govexp_pc"],
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Drop and log invalid rows instead of failing.
    pub permissive: bool,
    /// Required industry code length; `None` disables the check.
    pub industry_digits: Option<usize>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            permissive: false,
            industry_digits: Some(4),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DroppedRow {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadReport {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub dropped: Vec<DroppedRow>,
}

#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub data: T,
    pub report: LoadReport,
}

#[derive(Debug, Clone)]
pub enum Dataset {
    Employment(EmploymentPanel),
    Population(PopulationPanel),
    Flows(FlowMatrix),
    Commuting(CommutingTable),
    Firms(FirmYearTable),
    Aux(AuxCityPanel),
}

/// Loads any dataset kind from a file path.
pub fn load_dataset(path: &Path, kind: DatasetKind, opts: &LoadOptions) -> Result<Loaded<Dataset>> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(match kind {
        DatasetKind::Employment => map_loaded(EmploymentPanel::read(file, opts)?, Dataset::Employment),
        DatasetKind::Population => map_loaded(PopulationPanel::read(file, opts)?, Dataset::Population),
        DatasetKind::Flows => map_loaded(FlowMatrix::read(file, opts)?, Dataset::Flows),
        DatasetKind::Commuting => map_loaded(CommutingTable::read(file, opts)?, Dataset::Commuting),
        DatasetKind::Firms => map_loaded(FirmYearTable::read(file, opts)?, Dataset::Firms),
        DatasetKind::Aux => map_loaded(AuxCityPanel::read(file, opts)?, Dataset::Aux),
    })
}

fn map_loaded<T>(loaded: Loaded<T>, f: impl FnOnce(T) -> Dataset) -> Loaded<Dataset> {
    Loaded {
        data: f(loaded.data),
        report: loaded.report,
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct Row<'a> {
    line: u64,
    record: &'a csv::StringRecord,
    columns: &'a HashMap<String, usize>,
}

impl Row<'_> {
    fn text(&self, column: &str) -> &str {
        self.columns
            .get(column)
            .and_then(|&i| self.record.get(i))
            .map(str::trim)
            .unwrap_or("")
    }

    fn opt_text(&self, column: &str) -> Option<&str> {
        let t = self.text(column);
        (!t.is_empty()).then_some(t)
    }

    fn number(&self, column: &str) -> Result<f64> {
        let raw = self.text(column);
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(IngestError::NonNumericValue {
                line: self.line,
                column: column.to_string(),
                value: raw.to_string(),
            }),
        }
    }

    fn opt_number(&self, column: &str) -> Result<Option<f64>> {
        if self.columns.contains_key(column) && self.opt_text(column).is_some() {
            self.number(column).map(Some)
        } else {
            Ok(None)
        }
    }

    fn year(&self) -> Result<Year> {
        let raw = self.text("year");
        raw.parse::<Year>().map_err(|_| IngestError::NonNumericValue {
            line: self.line,
            column: "year".into(),
            value: raw.to_string(),
        })
    }

    fn code(&self, column: &str) -> Result<String> {
        match self.opt_text(column) {
            Some(c) => Ok(c.to_string()),
            None => Err(IngestError::InvalidValue {
                line: self.line,
                message: format!("empty `{column}`"),
            }),
        }
    }

    fn industry(&self, column: &str, digits: Option<usize>) -> Result<String> {
        let code = self.code(column)?;
        if let Some(d) = digits {
            if code.len() != d || !code.bytes().all(|b| b.is_ascii_digit()) {
                return Err(IngestError::InvalidIndustryCode {
                    line: self.line,
                    code,
                    digits: d,
                });
            }
        }
        Ok(code)
    }
}

/// Reads a CSV, checks the header and hands each row to `parse`. Row-level
/// errors either abort (strict) or are collected into the report.
fn read_rows<R: Read>(
    reader: R,
    kind: DatasetKind,
    opts: &LoadOptions,
    mut parse: impl FnMut(&Row<'_>) -> Result<()>,
) -> Result<(LoadReport, Vec<String>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    for col in kind.required_columns() {
        if !headers.iter().any(|h| h == col) {
            return Err(IngestError::MissingColumn {
                column: col.to_string(),
            });
        }
    }
    let columns: HashMap<String, usize> = headers.iter().enumerate().map(|(i, h)| (h.clone(), i)).collect();
    let mut report = LoadReport::default();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        report.rows_read += 1;
        let row = Row {
            line,
            record: &record,
            columns: &columns,
        };
        match parse(&row) {
            Ok(()) => report.rows_kept += 1,
            Err(e) if opts.permissive && e.is_row_level() => {
                warn!("dropping {kind:?} row: {e}");
                report.dropped.push(DroppedRow {
                    line,
                    reason: e.to_string(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok((report, headers))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmploymentRecord {
    pub city: usize,
    pub industry: usize,
    pub year: Year,
    pub employment: f64,
}

/// Formal full-year-equivalent employment by (city, industry, year).
///
/// Records are kept in canonical order (city, industry, year) and the
/// registries contain exactly the codes that occur in the records.
#[derive(Debug, Clone, PartialEq)]
pub struct EmploymentPanel {
    cities: Registry,
    industries: Registry,
    records: Vec<EmploymentRecord>,
}

impl EmploymentPanel {
    /// Builds a validated panel from raw `(city, industry, year, employment)`
    /// rows in any order.
    pub fn from_rows<I, S1, S2>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S1, S2, Year, f64)>,
        S1: Into<String>,
        S2: Into<String>,
    {
        let rows: Vec<(String, String, Year, f64)> = rows
            .into_iter()
            .map(|(c, i, y, e)| (c.into(), i.into(), y, e))
            .collect();
        let mut seen = BTreeSet::new();
        for (n, (c, i, y, e)) in rows.iter().enumerate() {
            let line = n as u64 + 2;
            if !e.is_finite() {
                return Err(IngestError::InvalidValue {
                    line,
                    message: format!("non-finite employment {e}"),
                });
            }
            if *e < 0.0 {
                return Err(IngestError::NegativeEmployment { line, value: *e });
            }
            if !seen.insert((c.as_str(), i.as_str(), *y)) {
                return Err(IngestError::DuplicateKey {
                    line,
                    key: format!("({c}, {i}, {y})"),
                });
            }
        }
        let panel = Self::build_unchecked(rows);
        panel.check_city_totals()?;
        Ok(panel)
    }

    fn build_unchecked(rows: Vec<(String, String, Year, f64)>) -> Self {
        let cities = Registry::from_codes(rows.iter().map(|r| r.0.clone()));
        let industries = Registry::from_codes(rows.iter().map(|r| r.1.clone()));
        let mut records: Vec<EmploymentRecord> = rows
            .iter()
            .map(|(c, i, y, e)| EmploymentRecord {
                city: cities.id(c).expect("interned"),
                industry: industries.id(i).expect("interned"),
                year: *y,
                employment: *e,
            })
            .collect();
        records.sort_by_key(|r| (r.city, r.industry, r.year));
        EmploymentPanel {
            cities,
            industries,
            records,
        }
    }

    fn check_city_totals(&self) -> Result<()> {
        let mut totals: BTreeMap<(usize, Year), f64> = BTreeMap::new();
        for r in &self.records {
            *totals.entry((r.city, r.year)).or_default() += r.employment;
        }
        match totals.into_iter().find(|(_, t)| *t <= 0.0) {
            Some(((c, y), _)) => Err(IngestError::EmptyCityYear {
                city: self.cities.code(c).to_string(),
                year: y,
            }),
            None => Ok(()),
        }
    }

    pub fn read<R: Read>(reader: R, opts: &LoadOptions) -> Result<Loaded<Self>> {
        let mut rows = Vec::new();
        let mut seen: HashMap<(String, String, Year), u64> = HashMap::new();
        let (report, _) = read_rows(reader, DatasetKind::Employment, opts, |row| {
            let city = row.code("city")?;
            let industry = row.industry("industry", opts.industry_digits)?;
            let year = row.year()?;
            let employment = row.number("employment")?;
            if employment < 0.0 {
                return Err(IngestError::NegativeEmployment {
                    line: row.line,
                    value: employment,
                });
            }
            let key = (city.clone(), industry.clone(), year);
            if let Some(first) = seen.get(&key) {
                return Err(IngestError::DuplicateKey {
                    line: row.line,
                    key: format!("({city}, {industry}, {year}) first seen on line {first}"),
                });
            }
            seen.insert(key, row.line);
            rows.push((city, industry, year, employment));
            Ok(())
        })?;
        let panel = Self::build_unchecked(rows);
        if opts.permissive {
            let (panel, dropped) = panel.drop_empty_city_years();
            let mut report = report;
            report.rows_kept -= dropped;
            return Ok(Loaded { data: panel, report });
        }
        panel.check_city_totals()?;
        Ok(Loaded { data: panel, report })
    }

    pub fn load(path: &Path, opts: &LoadOptions) -> Result<Loaded<Self>> {
        Self::read(open(path)?, opts)
    }

    fn drop_empty_city_years(self) -> (Self, usize) {
        let mut totals: HashMap<(usize, Year), f64> = HashMap::new();
        for r in &self.records {
            *totals.entry((r.city, r.year)).or_default() += r.employment;
        }
        let before = self.records.len();
        let kept: Vec<_> = self
            .rows()
            .filter(|(c, _, y, _)| totals[&(self.cities.id(c).unwrap(), *y)] > 0.0)
            .map(|(c, i, y, e)| (c.to_string(), i.to_string(), y, e))
            .collect();
        if kept.len() < before {
            warn!(
                "dropped {} rows in city-years with zero employment",
                before - kept.len()
            );
        }
        let n = kept.len();
        (Self::build_unchecked(kept), before - n)
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["city", "industry", "year", "employment"])?;
        for (c, i, y, e) in self.rows() {
            w.write_record([c, i, &y.to_string(), &e.to_string()])?;
        }
        w.flush().map_err(|e| IngestError::Csv(e.into()))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write(create(path)?)
    }

    pub fn cities(&self) -> &Registry {
        &self.cities
    }

    pub fn industries(&self) -> &Registry {
        &self.industries
    }

    pub fn records(&self) -> &[EmploymentRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records with their codes resolved, in canonical order.
    pub fn rows(&self) -> impl Iterator<Item = (&str, &str, Year, f64)> + '_ {
        self.records.iter().map(|r| {
            (
                self.cities.code(r.city),
                self.industries.code(r.industry),
                r.year,
                r.employment,
            )
        })
    }

    pub fn years(&self) -> Vec<Year> {
        let set: BTreeSet<Year> = self.records.iter().map(|r| r.year).collect();
        set.into_iter().collect()
    }

    pub fn total(&self) -> f64 {
        self.records.iter().map(|r| r.employment).sum()
    }

    /// City × industry employment for one year over the full registries.
    pub fn matrix(&self, year: Year) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.cities.len(), self.industries.len());
        for r in self.records.iter().filter(|r| r.year == year) {
            m[(r.city, r.industry)] += r.employment;
        }
        m
    }

    /// City × industry employment summed over all years.
    pub fn pooled_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.cities.len(), self.industries.len());
        for r in &self.records {
            m[(r.city, r.industry)] += r.employment;
        }
        m
    }

    /// Total employment by (city code, year).
    pub fn city_totals(&self) -> BTreeMap<(String, Year), f64> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            *out.entry((self.cities.code(r.city).to_string(), r.year)).or_insert(0.0) += r.employment;
        }
        out
    }

    /// Removes every record whose 2-digit industry prefix is in `excluded`.
    pub fn filter_sectors<S: AsRef<str>>(&self, excluded: &[S]) -> EmploymentPanel {
        let excluded: BTreeSet<&str> = excluded.iter().map(|s| s.as_ref()).collect();
        let kept: Vec<_> = self
            .rows()
            .filter(|(_, i, _, _)| !excluded.contains(division(i)))
            .map(|(c, i, y, e)| (c.to_string(), i.to_string(), y, e))
            .collect();
        if kept.is_empty() && !self.records.is_empty() {
            warn!("sector filter removed every record");
        }
        Self::build_unchecked(kept)
    }

    /// Sums municipality-level records into cities. Municipalities on the
    /// crosswalk's drop list are discarded; unknown municipalities are an
    /// error in strict mode and discarded with a warning otherwise.
    pub fn aggregate_to_cities(&self, crosswalk: &Crosswalk, strict: bool) -> Result<EmploymentPanel> {
        let mut sums: BTreeMap<(String, String, Year), f64> = BTreeMap::new();
        for (m, i, y, e) in self.rows() {
            match crosswalk.resolve(m, strict)? {
                Some(city) => {
                    *sums.entry((city.to_string(), i.to_string(), y)).or_default() += e;
                }
                None => continue,
            }
        }
        let rows = sums.into_iter().map(|((c, i, y), e)| (c, i, y, e)).collect();
        let panel = Self::build_unchecked(rows);
        panel.check_city_totals()?;
        Ok(panel)
    }

    /// Restricts the panel to the given years.
    pub fn select_years(&self, years: &[Year]) -> EmploymentPanel {
        let keep: BTreeSet<Year> = years.iter().copied().collect();
        let kept = self
            .rows()
            .filter(|(_, _, y, _)| keep.contains(y))
            .map(|(c, i, y, e)| (c.to_string(), i.to_string(), y, e))
            .collect();
        Self::build_unchecked(kept)
    }
}

/// First two characters of an industry code.
pub fn division(code: &str) -> &str {
    code.get(..2).unwrap_or(code)
}

/// Municipality → city mapping plus an explicit drop list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Crosswalk {
    pub map: BTreeMap<String, String>,
    pub dropped: BTreeSet<String>,
}

impl Crosswalk {
    pub fn identity<I: IntoIterator<Item = S>, S: Into<String>>(codes: I) -> Self {
        Crosswalk {
            map: codes
                .into_iter()
                .map(|c| {
                    let c = c.into();
                    (c.clone(), c)
                })
                .collect(),
            dropped: BTreeSet::new(),
        }
    }

    fn resolve(&self, municipality: &str, strict: bool) -> Result<Option<&str>> {
        if let Some(city) = self.map.get(municipality) {
            return Ok(Some(city));
        }
        if self.dropped.contains(municipality) {
            return Ok(None);
        }
        if strict {
            Err(IngestError::UnmappedMunicipality(municipality.to_string()))
        } else {
            warn!("municipality {municipality} not in crosswalk, dropped");
            Ok(None)
        }
    }

    /// Reads `municipality,city,kind`; rows of kind `dropped` form the drop list.
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        for col in ["municipality", "city", "kind"] {
            if !headers.iter().any(|h| h == col) {
                return Err(IngestError::MissingColumn { column: col.into() });
            }
        }
        let pos = |name: &str| headers.iter().position(|h| h == name).unwrap();
        let (mi, ci, ki) = (pos("municipality"), pos("city"), pos("kind"));
        let mut cw = Crosswalk::default();
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let m = record.get(mi).unwrap_or("").to_string();
            let c = record.get(ci).unwrap_or("").to_string();
            let k = record.get(ki).unwrap_or("");
            if cw.map.contains_key(&m) || cw.dropped.contains(&m) {
                return Err(IngestError::DuplicateKey { line, key: m });
            }
            if k == "dropped" || c.is_empty() {
                cw.dropped.insert(m);
            } else {
                cw.map.insert(m, c);
            }
        }
        Ok(cw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(open(path)?)
    }

    /// Maps a municipality population panel onto cities by summation.
    pub fn aggregate_population(&self, population: &PopulationPanel, strict: bool) -> Result<PopulationPanel> {
        let mut sums: BTreeMap<(String, Year), f64> = BTreeMap::new();
        for (m, y, p) in population.rows() {
            if let Some(city) = self.resolve(m, strict)? {
                *sums.entry((city.to_string(), y)).or_default() += p;
            }
        }
        PopulationPanel::from_rows(sums.into_iter().map(|((c, y), p)| (c, y, p)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationRecord {
    pub city: usize,
    pub year: Year,
    pub wap: f64,
}

/// Working-age (15+) population by city and year.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationPanel {
    cities: Registry,
    records: Vec<PopulationRecord>,
    lookup: HashMap<(usize, Year), f64>,
}

impl PopulationPanel {
    pub fn from_rows<I, S>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Year, f64)>,
        S: Into<String>,
    {
        let rows: Vec<(String, Year, f64)> = rows.into_iter().map(|(c, y, p)| (c.into(), y, p)).collect();
        let mut seen = BTreeSet::new();
        for (n, (c, y, p)) in rows.iter().enumerate() {
            let line = n as u64 + 2;
            if !(p.is_finite() && *p > 0.0) {
                return Err(IngestError::InvalidValue {
                    line,
                    message: format!("working-age population must be positive, got {p}"),
                });
            }
            if !seen.insert((c.as_str(), *y)) {
                return Err(IngestError::DuplicateKey {
                    line,
                    key: format!("({c}, {y})"),
                });
            }
        }
        Ok(Self::build(rows))
    }

    fn build(rows: Vec<(String, Year, f64)>) -> Self {
        let cities = Registry::from_codes(rows.iter().map(|r| r.0.clone()));
        let mut records: Vec<PopulationRecord> = rows
            .iter()
            .map(|(c, y, p)| PopulationRecord {
                city: cities.id(c).unwrap(),
                year: *y,
                wap: *p,
            })
            .collect();
        records.sort_by_key(|r| (r.city, r.year));
        let lookup = records.iter().map(|r| ((r.city, r.year), r.wap)).collect();
        PopulationPanel {
            cities,
            records,
            lookup,
        }
    }

    pub fn read<R: Read>(reader: R, opts: &LoadOptions) -> Result<Loaded<Self>> {
        let mut rows = Vec::new();
        let mut seen = HashMap::new();
        let (report, _) = read_rows(reader, DatasetKind::Population, opts, |row| {
            let city = row.code("city")?;
            let year = row.year()?;
            let wap = row.number("wap")?;
            if wap <= 0.0 {
                return Err(IngestError::InvalidValue {
                    line: row.line,
                    message: format!("working-age population must be positive, got {wap}"),
                });
            }
            if seen.insert((city.clone(), year), row.line).is_some() {
                return Err(IngestError::DuplicateKey {
                    line: row.line,
                    key: format!("({city}, {year})"),
                });
            }
            rows.push((city, year, wap));
            Ok(())
        })?;
        Ok(Loaded {
            data: Self::build(rows),
            report,
        })
    }

    pub fn load(path: &Path, opts: &LoadOptions) -> Result<Loaded<Self>> {
        Self::read(open(path)?, opts)
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["city", "year", "wap"])?;
        for (c, y, p) in self.rows() {
            w.write_record([c, &y.to_string(), &p.to_string()])?;
        }
        w.flush().map_err(|e| IngestError::Csv(e.into()))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write(create(path)?)
    }

    pub fn cities(&self) -> &Registry {
        &self.cities
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, Year, f64)> + '_ {
        self.records.iter().map(|r| (self.cities.code(r.city), r.year, r.wap))
    }

    pub fn get(&self, city: &str, year: Year) -> Option<f64> {
        let id = self.cities.id(city)?;
        self.lookup.get(&(id, year)).copied()
    }
}

/// Industry × industry job-switch counts.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMatrix {
    industries: Registry,
    counts: DMatrix<f64>,
}

impl FlowMatrix {
    pub fn new(industries: Registry, counts: DMatrix<f64>) -> Result<Self> {
        if counts.nrows() != industries.len() || counts.ncols() != industries.len() {
            return Err(IngestError::InvalidValue {
                line: 0,
                message: format!(
                    "flow matrix is {}x{} but there are {} industries",
                    counts.nrows(),
                    counts.ncols(),
                    industries.len()
                ),
            });
        }
        if let Some(v) = counts.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(IngestError::InvalidValue {
                line: 0,
                message: format!("flow count must be non-negative, got {v}"),
            });
        }
        Ok(FlowMatrix { industries, counts })
    }

    pub fn read<R: Read>(reader: R, opts: &LoadOptions) -> Result<Loaded<Self>> {
        let mut cells: BTreeMap<(String, String), f64> = BTreeMap::new();
        let (report, _) = read_rows(reader, DatasetKind::Flows, opts, |row| {
            let from = row.industry("industry_from", opts.industry_digits)?;
            let to = row.industry("industry_to", opts.industry_digits)?;
            let switches = row.number("switches")?;
            if switches < 0.0 {
                return Err(IngestError::InvalidValue {
                    line: row.line,
                    message: format!("negative switch count {switches}"),
                });
            }
            if cells.contains_key(&(from.clone(), to.clone())) {
                return Err(IngestError::DuplicateKey {
                    line: row.line,
                    key: format!("({from}, {to})"),
                });
            }
            cells.insert((from, to), switches);
            Ok(())
        })?;
        let industries = Registry::from_codes(cells.keys().flat_map(|(a, b)| [a.clone(), b.clone()]));
        let mut counts = DMatrix::zeros(industries.len(), industries.len());
        for ((a, b), v) in &cells {
            counts[(industries.id(a).unwrap(), industries.id(b).unwrap())] = *v;
        }
        Ok(Loaded {
            data: FlowMatrix { industries, counts },
            report,
        })
    }

    pub fn load(path: &Path, opts: &LoadOptions) -> Result<Loaded<Self>> {
        Self::read(open(path)?, opts)
    }

    /// Writes non-zero cells in long format.
    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["industry_from", "industry_to", "switches"])?;
        let n = self.industries.len();
        for i in 0..n {
            for j in 0..n {
                let v = self.counts[(i, j)];
                if v != 0.0 {
                    w.write_record([self.industries.code(i), self.industries.code(j), &v.to_string()])?;
                }
            }
        }
        w.flush().map_err(|e| IngestError::Csv(e.into()))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write(create(path)?)
    }

    pub fn industries(&self) -> &Registry {
        &self.industries
    }

    pub fn counts(&self) -> &DMatrix<f64> {
        &self.counts
    }

    /// Re-indexes onto another industry universe. Industries without flow
    /// data get zero rows and columns; flows involving industries outside
    /// the target universe are discarded.
    pub fn align_to(&self, industries: &Registry) -> FlowMatrix {
        let n = industries.len();
        let mut counts = DMatrix::zeros(n, n);
        let map: Vec<Option<usize>> = industries.codes().iter().map(|c| self.industries.id(c)).collect();
        for (a, sa) in map.iter().enumerate() {
            let Some(sa) = sa else { continue };
            for (b, sb) in map.iter().enumerate() {
                if let Some(sb) = sb {
                    counts[(a, b)] = self.counts[(*sa, *sb)];
                }
            }
        }
        FlowMatrix {
            industries: industries.clone(),
            counts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommuteLink {
    pub origin: usize,
    pub destination: usize,
    pub share: f64,
}

/// Municipality commuting shares and municipality populations.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingTable {
    municipalities: Registry,
    population: Vec<f64>,
    links: Vec<CommuteLink>,
}

impl CommutingTable {
    /// `links` are `(origin, destination, share)`; `populations` gives every
    /// municipality's population. Municipalities that only appear as a
    /// destination without a population entry get population 0.
    pub fn new<S: AsRef<str>>(links: &[(S, S, f64)], populations: &[(S, f64)]) -> Result<Self> {
        let municipalities = Registry::from_codes(
            links
                .iter()
                .flat_map(|(o, d, _)| [o.as_ref().to_string(), d.as_ref().to_string()])
                .chain(populations.iter().map(|(m, _)| m.as_ref().to_string())),
        );
        let mut population = vec![0.0; municipalities.len()];
        for (n, (m, p)) in populations.iter().enumerate() {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(IngestError::InvalidValue {
                    line: n as u64 + 2,
                    message: format!("population must be non-negative, got {p}"),
                });
            }
            population[municipalities.id(m.as_ref()).unwrap()] = *p;
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(links.len());
        for (n, (o, d, s)) in links.iter().enumerate() {
            let line = n as u64 + 2;
            let (o, d) = (o.as_ref(), d.as_ref());
            Self::check_link(line, o, d, *s)?;
            if !seen.insert((o, d)) {
                return Err(IngestError::DuplicateKey {
                    line,
                    key: format!("({o}, {d})"),
                });
            }
            out.push(CommuteLink {
                origin: municipalities.id(o).unwrap(),
                destination: municipalities.id(d).unwrap(),
                share: *s,
            });
        }
        out.sort_by_key(|l| (l.origin, l.destination));
        Ok(CommutingTable {
            municipalities,
            population,
            links: out,
        })
    }

    fn check_link(line: u64, origin: &str, destination: &str, share: f64) -> Result<()> {
        if origin == destination {
            return Err(IngestError::InvalidValue {
                line,
                message: format!("origin equals destination ({origin})"),
            });
        }
        if !(0.0..=1.0).contains(&share) {
            return Err(IngestError::InvalidValue {
                line,
                message: format!("commuter share {share} outside [0, 1]"),
            });
        }
        Ok(())
    }

    pub fn read<R: Read>(reader: R, opts: &LoadOptions) -> Result<Loaded<Self>> {
        let mut links: Vec<(String, String, f64)> = Vec::new();
        let mut pops: BTreeMap<String, f64> = BTreeMap::new();
        let mut seen = HashMap::new();
        let (report, _) = read_rows(reader, DatasetKind::Commuting, opts, |row| {
            let o = row.code("origin")?;
            let d = row.code("destination")?;
            let share = row.number("share")?;
            let pop = row.number("origin_population")?;
            Self::check_link(row.line, &o, &d, share)?;
            if pop < 0.0 {
                return Err(IngestError::InvalidValue {
                    line: row.line,
                    message: format!("negative population {pop}"),
                });
            }
            if let Some(prev) = pops.get(&o) {
                if *prev != pop {
                    return Err(IngestError::InvalidValue {
                        line: row.line,
                        message: format!("population of {o} is {pop}, earlier rows say {prev}"),
                    });
                }
            }
            if seen.insert((o.clone(), d.clone()), row.line).is_some() {
                return Err(IngestError::DuplicateKey {
                    line: row.line,
                    key: format!("({o}, {d})"),
                });
            }
            pops.insert(o.clone(), pop);
            links.push((o, d, share));
            Ok(())
        })?;
        let pops: Vec<(String, f64)> = pops.into_iter().collect();
        Ok(Loaded {
            data: Self::new(&links, &pops)?,
            report,
        })
    }

    pub fn load(path: &Path, opts: &LoadOptions) -> Result<Loaded<Self>> {
        Self::read(open(path)?, opts)
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["origin", "destination", "share", "origin_population"])?;
        for l in &self.links {
            w.write_record([
                self.municipalities.code(l.origin),
                self.municipalities.code(l.destination),
                &l.share.to_string(),
                &self.population[l.origin].to_string(),
            ])?;
        }
        w.flush().map_err(|e| IngestError::Csv(e.into()))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write(create(path)?)
    }

    pub fn municipalities(&self) -> &Registry {
        &self.municipalities
    }

    pub fn population(&self, id: usize) -> f64 {
        self.population[id]
    }

    pub fn links(&self) -> &[CommuteLink] {
        &self.links
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirmRecord {
    pub firm: String,
    pub city: String,
    pub industry: String,
    pub year: Year,
    pub employees: f64,
    pub avg_wage: f64,
    /// Individual wage observations (the `wage_p*` columns), possibly empty.
    pub wages: Vec<f64>,
    pub covariates: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FirmYearTable {
    pub records: Vec<FirmRecord>,
}

impl FirmYearTable {
    pub fn new(mut records: Vec<FirmRecord>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (n, r) in records.iter().enumerate() {
            Self::check(n as u64 + 2, r)?;
            if !seen.insert((r.firm.clone(), r.city.clone(), r.year)) {
                return Err(IngestError::DuplicateKey {
                    line: n as u64 + 2,
                    key: format!("({}, {}, {})", r.firm, r.city, r.year),
                });
            }
        }
        records.sort_by(|a, b| (&a.firm, &a.city, a.year).cmp(&(&b.firm, &b.city, b.year)));
        Ok(FirmYearTable { records })
    }

    fn check(line: u64, r: &FirmRecord) -> Result<()> {
        if r.employees < 1.0 {
            return Err(IngestError::InvalidValue {
                line,
                message: format!("firm {} has {} employees", r.firm, r.employees),
            });
        }
        if r.avg_wage <= 0.0 || r.wages.iter().any(|w| *w <= 0.0) {
            return Err(IngestError::InvalidValue {
                line,
                message: format!("firm {} has a non-positive wage", r.firm),
            });
        }
        Ok(())
    }

    pub fn read<R: Read>(reader: R, opts: &LoadOptions) -> Result<Loaded<Self>> {
        let mut records = Vec::new();
        let mut seen = HashMap::new();
        let mut wage_cols: Option<Vec<String>> = None;
        let (report, headers) = read_rows(reader, DatasetKind::Firms, opts, |row| {
            let wage_cols = wage_cols.get_or_insert_with(|| {
                let mut cols: Vec<(usize, String)> = row
                    .columns
                    .keys()
                    .filter_map(|h| {
                        h.strip_prefix("wage_p")
                            .and_then(|n| n.parse::<usize>().ok())
                            .map(|n| (n, h.clone()))
                    })
                    .collect();
                cols.sort();
                cols.into_iter().map(|(_, h)| h).collect()
            });
            let mut wages = Vec::with_capacity(wage_cols.len());
            for c in wage_cols.iter() {
                if let Some(w) = row.opt_number(c)? {
                    wages.push(w);
                }
            }
            let mut covariates = BTreeMap::new();
            for c in HR_COLUMNS {
                if let Some(v) = row.opt_number(c)? {
                    covariates.insert(c.to_string(), v);
                }
            }
            let r = FirmRecord {
                firm: row.code("firm")?,
                city: row.code("city")?,
                industry: row.industry("industry", opts.industry_digits)?,
                year: row.year()?,
                employees: row.number("employees")?,
                avg_wage: row.number("avg_wage")?,
                wages,
                covariates,
            };
            Self::check(row.line, &r)?;
            if seen
                .insert((r.firm.clone(), r.city.clone(), r.year), row.line)
                .is_some()
            {
                return Err(IngestError::DuplicateKey {
                    line: row.line,
                    key: format!("({}, {}, {})", r.firm, r.city, r.year),
                });
            }
            records.push(r);
            Ok(())
        })?;
        let _ = headers;
        records.sort_by(|a, b| (&a.firm, &a.city, a.year).cmp(&(&b.firm, &b.city, b.year)));
        Ok(Loaded {
            data: FirmYearTable { records },
            report,
        })
    }

    pub fn load(path: &Path, opts: &LoadOptions) -> Result<Loaded<Self>> {
        Self::read(open(path)?, opts)
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let n_wages = self.records.iter().map(|r| r.wages.len()).max().unwrap_or(0);
        let hr: Vec<&str> = HR_COLUMNS
            .iter()
            .copied()
            .filter(|c| self.records.iter().any(|r| r.covariates.contains_key(*c)))
            .collect();
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = ["firm", "city", "industry", "year", "employees", "avg_wage"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend((1..=n_wages).map(|k| format!("wage_p{k}")));
        header.extend(hr.iter().map(|s| s.to_string()));
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![
                r.firm.clone(),
                r.city.clone(),
                r.industry.clone(),
                r.year.to_string(),
                r.employees.to_string(),
                r.avg_wage.to_string(),
            ];
            row.extend((0..n_wages).map(|k| r.wages.get(k).map(f64::to_string).unwrap_or_default()));
            row.extend(
                hr.iter()
                    .map(|c| r.covariates.get(*c).map(f64::to_string).unwrap_or_default()),
            );
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| IngestError::Csv(e.into()))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write(create(path)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxRecord {
    pub city: String,
    pub year: Year,
    pub govexp_pc: f64,
    pub inst_quality: Option<f64>,
    pub edu_quality: Option<f64>,
}

/// City-year controls: government expenditure and quality indicators.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuxCityPanel {
    records: Vec<AuxRecord>,
    lookup: HashMap<(String, Year), usize>,
}

impl AuxCityPanel {
    pub fn new(mut records: Vec<AuxRecord>) -> Result<Self> {
        records.sort_by(|a, b| (&a.city, a.year).cmp(&(&b.city, b.year)));
        let mut lookup = HashMap::new();
        for (n, r) in records.iter().enumerate() {
            if lookup.insert((r.city.clone(), r.year), n).is_some() {
                return Err(IngestError::DuplicateKey {
                    line: n as u64 + 2,
                    key: format!("({}, {})", r.city, r.year),
                });
            }
        }
        Ok(AuxCityPanel { records, lookup })
    }

    pub fn read<R: Read>(reader: R, opts: &LoadOptions) -> Result<Loaded<Self>> {
        let mut records = Vec::new();
        let mut seen = HashMap::new();
        let (report, _) = read_rows(reader, DatasetKind::Aux, opts, |row| {
            let r = AuxRecord {
                city: row.code("city")?,
                year: row.year()?,
                govexp_pc: row.number("govexp_pc")?,
                inst_quality: row.opt_number("inst_quality")?,
                edu_quality: row.opt_number("edu_quality")?,
            };
            if seen.insert((r.city.clone(), r.year), row.line).is_some() {
                return Err(IngestError::DuplicateKey {
                    line: row.line,
                    key: format!("({}, {})", r.city, r.year),
                });
            }
            records.push(r);
            Ok(())
        })?;
        Ok(Loaded {
            data: Self::new(records)?,
            report,
        })
    }

    pub fn load(path: &Path, opts: &LoadOptions) -> Result<Loaded<Self>> {
        Self::read(open(path)?, opts)
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["city", "year", "govexp_pc", "inst_quality", "edu_quality"])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.city.clone(),
                r.year.to_string(),
                r.govexp_pc.to_string(),
                opt(r.inst_quality),
                opt(r.edu_quality),
            ])?;
        }
        w.flush().map_err(|e| IngestError::Csv(e.into()))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write(create(path)?)
    }

    pub fn records(&self) -> &[AuxRecord] {
        &self.records
    }

    pub fn get(&self, city: &str, year: Year) -> Option<&AuxRecord> {
        self.lookup.get(&(city.to_string(), year)).map(|&i| &self.records[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strict() -> LoadOptions {
        LoadOptions::default()
    }

    #[test]
    fn parses_small_employment_file() {
        let csv = "city,industry,year,employment\nA,1511,2010,10\nB,1511,2010,5\nA,2101,2010,2.5\n";
        let loaded = EmploymentPanel::read(csv.as_bytes(), &strict()).unwrap();
        let p = loaded.data;
        assert_eq!(p.records().len(), 3);
        assert_eq!(p.cities().len(), 2);
        assert_eq!(p.industries().len(), 2);
        assert_eq!(loaded.report.rows_kept, 3);
    }

    #[test]
    fn duplicate_key_names_the_row() {
        let csv = "city,industry,year,employment\nA,1511,2010,10\nA,1511,2010,3\n";
        match EmploymentPanel::read(csv.as_bytes(), &strict()) {
            Err(IngestError::DuplicateKey { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected DuplicateKey, got {other:?}"),
        }
    }

    #[test]
    fn negative_employment_rejected() {
        let csv = "city,industry,year,employment\nA,1511,2010,-5\n";
        match EmploymentPanel::read(csv.as_bytes(), &strict()) {
            Err(IngestError::NegativeEmployment { line, value }) => {
                assert_eq!(line, 2);
                assert_eq!(value, -5.0);
            }
            other => panic!("expected NegativeEmployment, got {other:?}"),
        }
    }

    #[test]
    fn missing_column_and_non_numeric() {
        let csv = "city,industry,employment\nA,1511,1\n";
        assert!(matches!(
            EmploymentPanel::read(csv.as_bytes(), &strict()),
            Err(IngestError::MissingColumn { column }) if column == "year"
        ));
        let csv = "city,industry,year,employment\nA,1511,2010,lots\n";
        assert!(matches!(
            EmploymentPanel::read(csv.as_bytes(), &strict()),
            Err(IngestError::NonNumericValue { line: 2, .. })
        ));
    }

    #[test]
    fn permissive_mode_drops_bad_rows() {
        let csv = "city,industry,year,employment\nA,1511,2010,10\nA,1511,2010,3\nB,1511,2010,-1\nB,2101,2010,4\nC,151,2010,1\n";
        let opts = LoadOptions {
            permissive: true,
            ..LoadOptions::default()
        };
        let loaded = EmploymentPanel::read(csv.as_bytes(), &opts).unwrap();
        assert_eq!(loaded.data.records().len(), 2);
        assert_eq!(loaded.report.dropped.len(), 3);
        assert_eq!(loaded.report.dropped[0].line, 3);
    }

    #[test]
    fn industry_depth_enforced() {
        let csv = "city,industry,year,employment\nA,15,2010,10\n";
        assert!(matches!(
            EmploymentPanel::read(csv.as_bytes(), &strict()),
            Err(IngestError::InvalidIndustryCode { digits: 4, .. })
        ));
        let opts = LoadOptions {
            industry_digits: Some(2),
            ..LoadOptions::default()
        };
        assert!(EmploymentPanel::read(csv.as_bytes(), &opts).is_ok());
    }

    #[test]
    fn zero_total_city_year_rejected() {
        let csv = "city,industry,year,employment\nA,1511,2010,0\nB,1511,2010,1\n";
        assert!(matches!(
            EmploymentPanel::read(csv.as_bytes(), &strict()),
            Err(IngestError::EmptyCityYear { .. })
        ));
    }

    #[test]
    fn filter_sectors_removes_excluded_divisions() {
        let p = EmploymentPanel::from_rows(vec![
            ("A", "1010", 2010, 3.0),
            ("A", "1110", 2010, 3.0),
            ("A", "7511", 2010, 3.0),
            ("A", "9500", 2010, 3.0),
            ("A", "1511", 2010, 7.0),
            ("B", "2101", 2010, 2.0),
        ])
        .unwrap();
        let f = p.filter_sectors(&DEFAULT_EXCLUDED_DIVISIONS);
        let codes: Vec<&str> = f.industries().codes().iter().map(String::as_str).collect();
        assert_eq!(codes, ["1511", "2101"]);
        assert_eq!(f.total(), 9.0);
        let same = p.filter_sectors::<&str>(&[]);
        assert_eq!(same, p);
        let gone = p.filter_sectors(&["10", "11", "75", "95", "15", "21"]);
        assert!(gone.is_empty());
    }

    #[test]
    fn aggregation_sums_municipalities() {
        let p = EmploymentPanel::from_rows(vec![
            ("m1", "1511", 2010, 10.0),
            ("m2", "1511", 2010, 5.0),
            ("m3", "1511", 2010, 1.0),
        ])
        .unwrap();
        let mut cw = Crosswalk::default();
        cw.map.insert("m1".into(), "c1".into());
        cw.map.insert("m2".into(), "c1".into());
        cw.dropped.insert("m3".into());
        let agg = p.aggregate_to_cities(&cw, true).unwrap();
        assert_eq!(agg.rows().collect::<Vec<_>>(), vec![("c1", "1511", 2010, 15.0)]);

        let mut partial = cw.clone();
        partial.dropped.clear();
        assert!(matches!(
            p.aggregate_to_cities(&partial, true),
            Err(IngestError::UnmappedMunicipality(m)) if m == "m3"
        ));
        assert_eq!(p.aggregate_to_cities(&partial, false).unwrap().total(), 15.0);

        let id = Crosswalk::identity(p.cities().codes().iter().cloned());
        assert_eq!(p.aggregate_to_cities(&id, true).unwrap(), p);
    }

    #[test]
    fn commuting_validation() {
        let ok = "origin,destination,share,origin_population\nA,B,0.2,100\nB,A,0.01,500\n";
        let t = CommutingTable::read(ok.as_bytes(), &strict()).unwrap().data;
        assert_eq!(t.links().len(), 2);
        assert_eq!(t.population(t.municipalities().id("B").unwrap()), 500.0);
        let bad = "origin,destination,share,origin_population\nA,A,0.2,100\n";
        assert!(CommutingTable::read(bad.as_bytes(), &strict()).is_err());
        let bad = "origin,destination,share,origin_population\nA,B,1.2,100\n";
        assert!(matches!(
            CommutingTable::read(bad.as_bytes(), &strict()),
            Err(IngestError::InvalidValue { line: 2, .. })
        ));
    }

    #[test]
    fn firm_table_reads_wage_and_hr_columns() {
        let csv = "firm,city,industry,year,employees,avg_wage,wage_p2,wage_p1,share_women\nf1,A,1511,2014,60,2.0,3.0,1.0,0.4\n";
        let t = FirmYearTable::read(csv.as_bytes(), &strict()).unwrap().data;
        assert_eq!(t.records[0].wages, vec![1.0, 3.0]);
        assert_eq!(t.records[0].covariates["share_women"], 0.4);
        let bad = "firm,city,industry,year,employees,avg_wage\nf1,A,1511,2014,0,2.0\n";
        assert!(FirmYearTable::read(bad.as_bytes(), &strict()).is_err());
    }

    #[test]
    fn aux_panel_optional_columns() {
        let csv = "city,year,govexp_pc\nA,2010,1.5\n";
        let a = AuxCityPanel::read(csv.as_bytes(), &strict()).unwrap().data;
        assert_eq!(a.get("A", 2010).unwrap().inst_quality, None);
        let dup = "city,year,govexp_pc\nA,2010,1.5\nA,2010,2\n";
        assert!(matches!(
            AuxCityPanel::read(dup.as_bytes(), &strict()),
            Err(IngestError::DuplicateKey { line: 3, .. })
        ));
    }
}
