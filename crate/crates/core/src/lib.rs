//! Prime-gap combinatorics.
//!
//! * [`sieve`]: segmented sieve and the consecutive-gap stream.
//! * [`linear_forms`]: linear forms in consecutive primes, their prefix-sum
//!   classification and sign-change counting.
//! * [`gap_records`]: dominant-gap ratio records and `d_n > d_{n+1} + d_{n+2}`
//!   occurrences.
//! * [`tuples`]: admissible tuples, smooth differences and numeric
//!   realizations of the exponent schedule.
//! * [`ept`]: the column-partition construction, peak selection, claim
//!   checking and the placement simulator.

pub mod ept;
pub mod error;
mod fixed;
pub mod gap_records;
pub mod linear_forms;
pub mod sieve;
pub mod tuples;

pub use ept::{
    check_claims, derive_params, gap_exponent, pigeonhole_bounds, select_peak, simulate,
    verify_monotonicity, EptParameters, Exponent, ExponentModel, PartitionShape, Placement,
    Selection, SelectionFailure,
};
pub use error::{Error, Result};
pub use fixed::round as round_report_float;
pub use gap_records::{
    find_superdominant, peak_ratio, scan_records, GapRatio, PeakRecord, RecordNormalizer,
};
pub use linear_forms::{
    alpha_profile, classify, count_sign_changes, evaluate_direct, evaluate_gap_form, AlphaProfile,
    Classification, FormClass, LinearForm,
};
pub use sieve::{gap_stream, primes_up_to, GapAccess, GapEntry, PrimeAccess, PrimeTable, Sieve};
pub use tuples::{is_admissible, smooth_differences_ok, AdmissibleTuple};
