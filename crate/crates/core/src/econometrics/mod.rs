//! Regression panels and the statistical analyses run on them.

pub mod elasticity;
pub mod firms;
pub mod growth;
pub mod ols;
pub mod panel;
pub mod scaling;
pub mod synth;
pub mod theil;

use thiserror::Error;

use crate::ingest::Year;
use crate::yearly::StackError;

pub use elasticity::{decile_slopes, elasticity_regression, ElasticityCurve, TwoGroupSlopes};
pub use firms::{firm_regressions, FirmSpec};
pub use growth::{growth_regression, GrowthOptions, GrowthResult, GrowthSpec, Term};
pub use ols::{ols, ColumnRole, Design, OlsError, RegressionResult, SeMode};
pub use panel::{
    assemble_frame, bartik, build_growth_frame, formal_rate, long_difference, BartikShocks, CityYearFrame, FormalRate,
    FrameRow, LongDifference,
};
pub use scaling::{complexity_deciles, scaling_summary, ScalingSummary};
pub use synth::{generate_synthetic, SynthConfig, SyntheticBundle};
pub use theil::theil_entropy;

#[derive(Debug, Error, PartialEq)]
pub enum EconError {
    #[error("no working-age population for city `{city}` in {year}")]
    MissingPopulation { city: String, year: Year },
    #[error("panel needs at least two consecutive years")]
    InsufficientYears,
    #[error("wage {0} is not positive")]
    NonPositiveWage(f64),
    #[error("wage list is empty")]
    EmptyWages,
    #[error("no observations left for the regression")]
    NoObservations,
    #[error("invalid synthetic configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown specification: {0}")]
    UnknownSpec(String),
    #[error(transparent)]
    Ols(#[from] OlsError),
    #[error(transparent)]
    Stack(#[from] StackError),
}

pub type Result<T> = std::result::Result<T, EconError>;
