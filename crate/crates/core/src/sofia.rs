//! The θ-Sofia miner: find every closed pattern with `Δ ≥ θ` by walking a
//! chain of projections from the one-pattern projection `ψ_0` to the
//! identity, keeping only patterns whose Δ in the current projected structure
//! reaches the threshold.
//!
//! Δ is anti-monotonic with respect to every projection: a preimage never has
//! a larger Δ than its image. A pattern dropped at step `i` therefore cannot
//! have a descendant that passes the threshold at a later step, which makes
//! the pruning exact.
//!
//! Patterns are identified by their extents. The extents of a projected
//! structure are extents of the original one, so a pattern keeps its identity
//! along the chain while its intent and Δ are refined.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extent::Extent;
use crate::interval::{Dataset, IntervalTuple, Span};
use crate::measures::{delta_measure, delta_of_concept, MeasureValue};
use crate::projection::{ChainSchedule, ProjectionState, ScheduleStrategy};

/// A pattern concept `(extent, intent)` of some projected structure.
#[derive(Debug, Clone, PartialEq)]
pub struct MinedPattern {
    pub extent: Extent,
    pub intent: IntervalTuple,
    pub measure: MeasureValue,
}

impl MinedPattern {
    pub fn support(&self) -> usize {
        self.extent.len()
    }

    pub fn delta(&self) -> Option<usize> {
        self.measure.delta()
    }
}

/// Patterns deduplicated by extent, valid under one projection.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSet {
    patterns: Vec<MinedPattern>,
    projection: ProjectionState,
}

impl PatternSet {
    /// Sorts by extent and drops later duplicates of an extent.
    pub fn new(mut patterns: Vec<MinedPattern>, projection: ProjectionState) -> Self {
        patterns.par_sort_unstable_by(|a, b| a.extent.cmp(&b.extent));
        patterns.dedup_by(|a, b| a.extent == b.extent);
        PatternSet { patterns, projection }
    }

    pub fn empty(projection: ProjectionState) -> Self {
        PatternSet { patterns: Vec::new(), projection }
    }

    pub fn projection(&self) -> &ProjectionState {
        &self.projection
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MinedPattern> {
        self.patterns.iter()
    }

    pub fn patterns(&self) -> &[MinedPattern] {
        &self.patterns
    }

    pub fn into_patterns(self) -> Vec<MinedPattern> {
        self.patterns
    }

    pub fn get(&self, extent: &Extent) -> Option<&MinedPattern> {
        self.patterns
            .binary_search_by(|p| p.extent.cmp(extent))
            .ok()
            .map(|i| &self.patterns[i])
    }

    pub fn contains_extent(&self, extent: &Extent) -> bool {
        self.get(extent).is_some()
    }

    /// Extents in canonical order.
    pub fn extents(&self) -> Vec<Extent> {
        self.patterns.iter().map(|p| p.extent.clone()).collect()
    }

    /// Patterns in report order: descending Δ, then descending support, then
    /// lexicographic member lists.
    pub fn sorted_for_report(&self) -> Vec<&MinedPattern> {
        let mut out: Vec<&MinedPattern> = self.patterns.iter().collect();
        out.sort_by(|a, b| {
            b.delta()
                .cmp(&a.delta())
                .then(b.support().cmp(&a.support()))
                .then(a.extent.cmp_members(&b.extent))
        });
        out
    }
}

impl<'a> IntoIterator for &'a PatternSet {
    type Item = &'a MinedPattern;
    type IntoIter = std::slice::Iter<'a, MinedPattern>;

    fn into_iter(self) -> Self::IntoIter {
        self.patterns.iter()
    }
}

#[derive(Debug, Clone)]
pub struct SofiaConfig {
    pub theta: usize,
    pub schedule: ScheduleStrategy,
    /// Worker threads for preimage generation and Δ evaluation.
    pub threads: usize,
    /// Abort when a step produces more candidate patterns than this.
    pub capacity: Option<usize>,
}

impl SofiaConfig {
    pub fn new(theta: usize) -> Self {
        SofiaConfig { theta, schedule: ScheduleStrategy::default(), threads: 1, capacity: None }
    }

    pub fn with_schedule(mut self, schedule: ScheduleStrategy) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn with_capacity(mut self, capacity: Option<usize>) -> Self {
        self.capacity = capacity;
        self
    }
}

/// Counters for one step of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct StepStats {
    pub step: usize,
    /// The attribute refined at this step; `None` for `ψ_0`.
    pub attribute: Option<usize>,
    /// Syntactic preimage candidates whose extent was evaluated.
    pub candidates: usize,
    /// Distinct patterns after deduplication, before filtering.
    pub generated: usize,
    pub kept: usize,
}

/// Everything produced by one step: survivors, the patterns filtered out and
/// the counters.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub kept: PatternSet,
    pub removed: Vec<MinedPattern>,
    pub stats: StepStats,
}

#[derive(Debug, Clone)]
pub struct SofiaRun {
    pub patterns: PatternSet,
    pub trace: Vec<StepStats>,
}

impl SofiaRun {
    /// Largest number of patterns held after any step.
    pub fn peak_patterns(&self) -> usize {
        self.trace.iter().map(|s| s.kept).max().unwrap_or(0)
    }

    /// Largest number of distinct patterns evaluated at any step.
    pub fn peak_generated(&self) -> usize {
        self.trace.iter().map(|s| s.generated).max().unwrap_or(0)
    }
}

/// Patterns of `ψ_0(PS)`: the single pattern `(G, [w_1, w_n]^|M|)`, whose Δ
/// is `|G|` because only the virtual bottom lies below it.
pub fn find_patterns_psi0(ds: &Dataset, theta: usize) -> PatternSet {
    find_patterns_psi0_detailed(ds, theta).kept
}

fn find_patterns_psi0_detailed(ds: &Dataset, theta: usize) -> StepOutcome {
    let psi0 = ProjectionState::initial(ds);
    let top = MinedPattern {
        extent: ds.all_objects(),
        intent: ds.full_tuple(),
        measure: MeasureValue::Delta(ds.num_objects()),
    };
    let (kept, removed) = if ds.num_objects() >= theta { (vec![top], vec![]) } else { (vec![], vec![top]) };
    let stats = StepStats { step: 0, attribute: None, candidates: 1, generated: 1, kept: kept.len() };
    StepOutcome { kept: PatternSet::new(kept, psi0), removed, stats }
}

/// The single attribute on which two consecutive chain states differ.
fn stepped_attribute(prev: &ProjectionState, next: &ProjectionState) -> Option<usize> {
    prev.restrictions()
        .iter()
        .zip(next.restrictions())
        .position(|(a, b)| a != b)
}

/// Closed patterns of `ψ_next(PS)` whose image under `ψ_prev` is `(extent,
/// intent)`, together with the number of syntactic candidates evaluated.
///
/// Moving to `ψ_next` adds at most one allowed lower and one allowed upper
/// value on the stepped attribute, so a preimage keeps the intent everywhere
/// else and on the stepped attribute either keeps each endpoint or moves it
/// to the newly allowed value: four candidates at most.
fn preimage_concepts(
    extent: &Extent,
    intent: &IntervalTuple,
    prev: &ProjectionState,
    next: &ProjectionState,
    ds: &Dataset,
) -> (Vec<(Extent, IntervalTuple)>, usize) {
    let mut out = Vec::with_capacity(4);
    let Some(m) = stepped_attribute(prev, next) else {
        // Same projection: the pattern is its own and only preimage.
        return (vec![(extent.clone(), intent.clone())], 0);
    };
    let s = intent.span(m);
    let new_left = (next.max_left(m) > prev.max_left(m) && s.lo == prev.max_left(m))
        .then(|| next.max_left(m));
    let new_right = (next.min_right(m) < prev.min_right(m) && s.hi == prev.min_right(m))
        .then(|| next.min_right(m));

    let mut candidates: Vec<(Span, Extent)> = Vec::with_capacity(4);
    candidates.push((s, extent.clone()));
    let raised = new_left.filter(|&l| l <= s.hi).map(|l| (Span::new(l, s.hi), ds.restrict_lo(extent, m, l)));
    if let Some(c) = &raised {
        candidates.push(c.clone());
    }
    if let Some(r) = new_right.filter(|&r| r >= s.lo) {
        candidates.push((Span::new(s.lo, r), ds.restrict_hi(extent, m, r)));
        if let Some((rs, re)) = &raised {
            if rs.lo <= r {
                candidates.push((Span::new(rs.lo, r), ds.restrict_hi(re, m, r)));
            }
        }
    }

    let evaluated = candidates.len();
    for (_, sub) in candidates {
        if sub.is_empty() {
            continue;
        }
        let closed = next.closed_intent(&sub, ds).expect("non-empty extent has an intent");
        // Closure may narrow the candidate further; keep it only if it still
        // projects back onto this pattern.
        if prev.apply(&closed) != *intent {
            continue;
        }
        if !out.iter().any(|(e, _): &(Extent, IntervalTuple)| *e == sub) {
            out.push((sub, closed));
        }
    }
    (out, evaluated)
}

/// The preimages of `p` for the chain step `prev → next`, with Δ measured in
/// `ψ_next(PS)`.
pub fn preimages(
    p: &MinedPattern,
    prev: &ProjectionState,
    next: &ProjectionState,
    ds: &Dataset,
) -> PatternSet {
    let (found, _) = preimage_concepts(&p.extent, &p.intent, prev, next, ds);
    let patterns = found
        .into_iter()
        .map(|(extent, intent)| {
            let delta = delta_of_concept(&extent, &intent, next, ds);
            MinedPattern { extent, intent, measure: MeasureValue::Delta(delta) }
        })
        .collect();
    PatternSet::new(patterns, next.clone())
}

/// One step of the chain: collect the preimages of every pattern of `prev`
/// under `next`, deduplicate by extent, measure Δ in `ψ_next(PS)` and drop
/// every pattern with `Δ < θ`.
pub fn extend_projection(
    next: &ProjectionState,
    theta: usize,
    prev: &PatternSet,
    ds: &Dataset,
) -> Result<PatternSet> {
    Ok(extend_projection_detailed(next, theta, prev, ds, None)?.kept)
}

fn extend_projection_detailed(
    next: &ProjectionState,
    theta: usize,
    prev: &PatternSet,
    ds: &Dataset,
    capacity: Option<usize>,
) -> Result<StepOutcome> {
    let prev_ps = prev.projection();
    let generated: Vec<(Vec<(Extent, IntervalTuple)>, usize)> = prev
        .patterns()
        .par_iter()
        .map(|p| preimage_concepts(&p.extent, &p.intent, prev_ps, next, ds))
        .collect();
    let candidates = generated.iter().map(|(_, n)| n).sum();
    let mut concepts: Vec<(Extent, IntervalTuple)> =
        generated.into_iter().flat_map(|(found, _)| found).collect();
    concepts.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
    concepts.dedup_by(|a, b| a.0 == b.0);

    if let Some(cap) = capacity {
        if concepts.len() > cap {
            return Err(Error::CapacityExceeded {
                step: next.step_index(),
                size: concepts.len(),
                capacity: cap,
            });
        }
    }

    let measured: Vec<MinedPattern> = concepts
        .into_par_iter()
        .map(|(extent, intent)| {
            let delta = delta_of_concept(&extent, &intent, next, ds);
            MinedPattern { extent, intent, measure: MeasureValue::Delta(delta) }
        })
        .collect();
    let generated_count = measured.len();
    let (kept, removed): (Vec<_>, Vec<_>) =
        measured.into_iter().partition(|p| p.delta().unwrap_or(0) >= theta);
    let stats = StepStats {
        step: next.step_index(),
        attribute: stepped_attribute(prev_ps, next),
        candidates,
        generated: generated_count,
        kept: kept.len(),
    };
    Ok(StepOutcome { kept: PatternSet::new(kept, next.clone()), removed, stats })
}

/// Runs θ-Sofia along a chain schedule.
pub struct Miner<'a> {
    ds: &'a Dataset,
    config: SofiaConfig,
}

impl<'a> Miner<'a> {
    pub fn new(ds: &'a Dataset, config: SofiaConfig) -> Self {
        Miner { ds, config }
    }

    pub fn config(&self) -> &SofiaConfig {
        &self.config
    }

    pub fn run(&self) -> Result<SofiaRun> {
        self.run_observed(|_| {})
    }

    /// Runs the chain and hands every step's outcome (including `ψ_0`) to
    /// `observer` before moving on.
    pub fn run_observed<F: FnMut(&StepOutcome)>(&self, mut observer: F) -> Result<SofiaRun> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.threads.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        let ds = self.ds;
        let theta = self.config.theta;
        let sched = ChainSchedule::new(ds, self.config.schedule);
        let first = find_patterns_psi0_detailed(ds, theta);
        observer(&first);
        let mut trace = vec![first.stats];
        let mut current = first.kept;
        while let Some(next) = current.projection().advance(&sched) {
            if current.is_empty() {
                // Nothing left to refine; the remaining steps are empty.
                trace.push(StepStats {
                    step: next.step_index(),
                    attribute: stepped_attribute(current.projection(), &next),
                    candidates: 0,
                    generated: 0,
                    kept: 0,
                });
                current = PatternSet::empty(next);
                continue;
            }
            let outcome = pool
                .install(|| extend_projection_detailed(&next, theta, &current, ds, self.config.capacity))?;
            observer(&outcome);
            trace.push(outcome.stats);
            current = outcome.kept;
        }
        Ok(SofiaRun { patterns: current, trace })
    }
}

/// All closed patterns with `Δ ≥ θ`.
pub fn sofia_run(ds: &Dataset, theta: usize, schedule: ScheduleStrategy) -> Result<PatternSet> {
    Ok(Miner::new(ds, SofiaConfig::new(theta).with_schedule(schedule)).run()?.patterns)
}

/// Result of the best-Δ search.
#[derive(Debug, Clone)]
pub struct BestDelta {
    /// The largest θ for which some pattern has `Δ ≥ θ`.
    pub theta: usize,
    /// The last probe, at a threshold `<= theta`, with its patterns narrowed
    /// to those reaching `theta`.
    pub run: SofiaRun,
    /// Every threshold tried, with the number of patterns found.
    pub probes: Vec<(usize, usize)>,
}

/// Finds the largest Δ reached by any closed pattern and all patterns with
/// that Δ.
///
/// Thresholds are tried in decreasing order starting from `|G|`. A non-empty
/// run at θ holds every pattern with `Δ ≥ θ`, so the best Δ is the largest Δ
/// it contains. An empty run bounds the best Δ by the largest Δ among the
/// patterns it removed, since every final pattern has an image removed at
/// some step and Δ only grows towards the images. The next threshold is that
/// bound, lowered geometrically so that low thresholds (which are expensive)
/// are approached in few steps, but never below `Δ(G)`, which always
/// qualifies.
pub fn best_delta_search(ds: &Dataset, base: &SofiaConfig) -> Result<BestDelta> {
    let floor = delta_measure(&ds.all_objects(), &ProjectionState::identity(ds), ds)?.max(1);
    let mut probes = Vec::new();
    let mut theta = ds.num_objects();
    loop {
        let mut removed_max = 0;
        let cfg = SofiaConfig { theta, ..base.clone() };
        let mut run = Miner::new(ds, cfg).run_observed(|o| {
            for p in &o.removed {
                removed_max = removed_max.max(p.delta().unwrap_or(0));
            }
        })?;
        probes.push((theta, run.patterns.len()));
        if let Some(best) = run.patterns.iter().filter_map(MinedPattern::delta).max() {
            let projection = run.patterns.projection().clone();
            let kept = std::mem::replace(&mut run.patterns, PatternSet::empty(projection.clone()))
                .into_patterns()
                .into_iter()
                .filter(|p| p.delta() == Some(best))
                .collect();
            run.patterns = PatternSet::new(kept, projection);
            return Ok(BestDelta { theta: best, run, probes });
        }
        assert!(theta > floor, "Δ(G) = {floor} always qualifies");
        theta = removed_max.min(theta - (theta / 4).max(1)).max(floor);
    }
}
