//! The inclusion and compactness characterizations as predicates, the
//! witness scans that test them, and growth-exponent fits for evaluation
//! functionals.

mod functional;
mod region;
mod scan;

pub use functional::{
    boundary_points, delta_exponent_fit, delta_exponent_fit_cached, fejer_riesz_ratio, noncompactness_witness,
    nontangential_decay_check, DecayTrace, DeltaFamily, ExponentFit, Functional, NoncompactnessReport,
};
pub use region::{
    compactness_predicate, exponent_grid, inclusion_predicate, region_a_contains, RegionMembership, RECIPROCAL_EPS,
};
pub use scan::{
    compactness_grid_scan, compactness_witness_scan, inclusion_grid_scan, inclusion_witness_scan, is_bounded,
    is_unbounded, kernel_parameters, power_of_four_budget, scan_config, CompactnessVerdict, InclusionVerdict, NormCache, ScanRow,
    WitnessConclusion, WitnessReport, CESARO_BOUNDED_BUDGET, CESARO_BUDGET, MONOMIAL_BUDGET,
};
