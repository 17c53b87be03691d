//! Mining Δ-stable closed interval patterns.
//!
//! A dataset maps objects to tuples of intervals. Closed patterns are found
//! along a chain of projections that starts from a structure where every
//! interval is widened to a coarse hull and ends at the original data; at
//! every step only patterns whose Δ measure reaches the threshold are kept,
//! and Δ never grows from one step to the next.
//!
//! ```
//! use sofia_core::{fixtures, sofia_run, ScheduleStrategy};
//!
//! let ds = fixtures::fig1a();
//! let stable = sofia_run(&ds, 2, ScheduleStrategy::RoundRobin).unwrap();
//! assert_eq!(stable.len(), 3);
//! ```

pub mod baseline;
pub mod error;
pub mod extent;
pub mod fixtures;
pub mod interval;
pub mod io;
pub mod measures;
pub mod preprocess;
pub mod projection;
pub mod sofia;
pub mod synthetic;

pub use baseline::{
    brute_force_lattice, enumerate_closed_patterns, lattice_delta, postfilter, EnumerationConfig,
    EnumerationOutcome, EnumerationStats, DEFAULT_ORACLE_CAP,
};
pub use error::{Error, Result};
pub use extent::Extent;
pub use interval::{Dataset, Interval, IntervalTuple, Span, ValueSet};
pub use io::{OutputFormat, ParseOptions, RawCell, RawTable, RunHeader};
pub use measures::{
    delta_measure, exact_stability, lower_neighbors, stability_upper_bound, support, MeasureValue,
    DEFAULT_STABILITY_CAP,
};
pub use preprocess::{drop_incomplete, simplify, CleaningReport, SimplificationReport};
pub use projection::{AttributeRestriction, ChainSchedule, ProjectionState, ScheduleStrategy};
pub use sofia::{
    best_delta_search, extend_projection, find_patterns_psi0, preimages, sofia_run, BestDelta, MinedPattern,
    Miner, PatternSet, SofiaConfig, SofiaRun, StepOutcome, StepStats,
};
