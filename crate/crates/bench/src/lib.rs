//! Workloads shared by the benchmarks and the performance smoke test.

use sofia_core::synthetic::{generate, SyntheticSpec};
use sofia_core::Dataset;

/// Shape of the performance smoke workload: 4000 objects and 8 attributes
/// with 15 to 22 distinct values each (about 20 on average), grouped around
/// a few centers. Uniform noise of the same shape is a poor workload: its
/// best pattern is the top concept alone.
pub const PERF_SPEC: SyntheticSpec =
    SyntheticSpec { objects: 4000, attributes: 8, levels: 23, interval_rate: 0.2, clusters: 8 };

pub const PERF_SEED: u64 = 2012;

pub fn perf_dataset() -> Dataset {
    generate(&PERF_SPEC, PERF_SEED)
}

/// A smaller dataset of the same kind, sized for repeated timing.
pub fn scaled_dataset(objects: usize) -> Dataset {
    generate(&SyntheticSpec { objects, ..PERF_SPEC }, PERF_SEED)
}
