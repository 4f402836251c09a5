//! Economic-complexity metrics for city–industry employment panels.
//!
//! The crate covers the full measurement stack (RCA, presence, complexity,
//! skill relatedness, density, complexity potential), commuting-based city
//! delineation, and the regression tooling used to relate those measures to
//! formal employment growth.

pub mod complexity;
pub mod delineation;
pub mod econometrics;
pub mod ingest;
pub mod relatedness;
pub mod stats;
pub mod yearly;

pub use complexity::{
    aggregate_complexity, binarize, city_complexity_summary, compute_complexity, compute_rca, ComplexityMethod,
    ComplexityOptions, ComplexityScores, PresenceMatrix, RcaMatrix,
};
pub use delineation::{delineate_metros, DelineationParams, MetroAssignment};
pub use ingest::{
    AuxCityPanel, CommutingTable, Crosswalk, EmploymentPanel, FirmYearTable, FlowMatrix, LoadOptions, PopulationPanel,
    Registry, Year,
};
pub use relatedness::{
    build_relatedness, complexity_potential, density, skill_proximity, ComplexityPotential, DensityTable,
    RelatednessMatrix, SkillProximity,
};
