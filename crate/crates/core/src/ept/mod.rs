//! Executable form of the column-partition construction that forces one
//! prime gap to dominate its neighbours.
//!
//! The construction fixes a window size `ell`, derives the schedule
//! `L = ell + 2`, `m = 62L - 33`, `J = 32L - 17`, picks `k` as a multiple of
//! `2(16m + 1)` and assigns each tuple index `i = (nu J + mu) K + lambda` the
//! exponent
//!
//! ```text
//! c_i = ((30 - nu) J + mu) / (62 J) + lambda / k
//! ```
//!
//! Gap sizes are modelled at the exponent level only: the gap spanning
//! indices `(i, j]` has the exponent of its largest increment. On top of that
//! model this module provides the peak-selection rule, the counting bounds
//! that make it succeed, claim checkers for the resulting gap inequalities,
//! and a placement simulator.
//!
//! The numeric covering that forces every number outside the tuple to be
//! composite is assumed, not simulated: all primes lie at tuple offsets.

mod claims;
mod exponent;
mod params;
mod pigeonhole;
mod selection;
mod simulate;

pub use claims::{check_claims, ClaimReport, LeftInequality, RightInequality};
pub use exponent::{
    gap_exponent, verify_monotonicity, Exponent, ExponentModel, IndexCoord, MonotonicityMode,
    MonotonicityReport, MonotonicityViolation, DEFAULT_PAIR_BUDGET,
};
pub use params::{derive_params, EptParameters, IdentityReport, PartitionShape, COLUMNS};
pub use pigeonhole::{
    generalized_failure_max, generalized_occupancy_bound, pigeonhole_bounds,
    pigeonhole_bounds_for_l, PigeonholeReport,
};
pub use selection::{select_peak, PartId, Placement, Selection, SelectionFailure};
pub use simulate::{
    simulate, SimulationConfig, SimulationMode, SimulationReport, TrialTrace, MAX_EXHAUSTIVE_PARTS,
};
