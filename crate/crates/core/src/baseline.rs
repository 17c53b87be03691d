//! The postfiltering competitor: enumerate every frequent closed interval
//! pattern, then keep those whose Δ reaches the threshold. Also holds the
//! brute-force lattice used as a test oracle.

use std::collections::HashSet;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::extent::Extent;
use crate::interval::{Dataset, IntervalTuple};
use crate::measures::{delta_measure, MeasureValue};
use crate::projection::ProjectionState;
use crate::sofia::{MinedPattern, PatternSet};

/// Default object limit for [`brute_force_lattice`].
pub const DEFAULT_ORACLE_CAP: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationConfig {
    pub min_support: usize,
    /// Stop after emitting this many patterns.
    pub max_patterns: Option<usize>,
}

impl EnumerationConfig {
    pub fn new(min_support: usize) -> Self {
        EnumerationConfig { min_support, max_patterns: None }
    }

    fn validate(&self, ds: &Dataset) -> Result<()> {
        if self.min_support == 0 || self.min_support > ds.num_objects() {
            return Err(Error::InvalidParameter(format!(
                "min support must lie in 1..={}, got {}",
                ds.num_objects(),
                self.min_support
            )));
        }
        Ok(())
    }
}

/// Counters of one enumeration; comparable between complete and interrupted
/// runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct EnumerationStats {
    pub emitted: usize,
    /// Minimal changes whose extent was computed.
    pub closures: usize,
    /// Closures rejected by the canonicity test.
    pub rejected: usize,
    pub max_depth: usize,
    pub interrupted: bool,
}

#[derive(Debug, Clone)]
pub struct EnumerationOutcome {
    pub patterns: PatternSet,
    pub stats: EnumerationStats,
}

/// Minimal changes are indexed by position: `2m` raises the lower endpoint of
/// attribute `m` by one grid value, `2m + 1` lowers its upper endpoint.
#[inline]
fn endpoint(d: &IntervalTuple, pos: usize) -> u32 {
    let s = d.span(pos / 2);
    if pos.is_multiple_of(2) {
        s.lo
    } else {
        s.hi
    }
}

/// A closure reached through the change at `pos` is canonical iff it leaves
/// every endpoint before `pos` untouched; otherwise the same concept is
/// reachable through an earlier change and is emitted there.
fn is_canonical(parent: &IntervalTuple, child: &IntervalTuple, pos: usize) -> bool {
    (0..pos).all(|q| endpoint(parent, q) == endpoint(child, q))
}

/// Depth-first enumeration of closed interval patterns by minimal changes,
/// calling `emit` once per closed pattern with support `>= min_support`.
/// `emit` may stop the search by returning `ControlFlow::Break`.
pub fn enumerate_with<F>(ds: &Dataset, cfg: &EnumerationConfig, mut emit: F) -> Result<EnumerationStats>
where
    F: FnMut(&Extent, &IntervalTuple) -> ControlFlow<()>,
{
    cfg.validate(ds)?;
    let mut stats = EnumerationStats::default();
    let top = ds.all_objects();
    let top_intent = ds.intent_of(&top)?;
    let positions = 2 * ds.num_attributes();
    let mut stack: Vec<(Extent, IntervalTuple, usize, usize)> = vec![(top, top_intent, 0, 0)];

    while let Some((extent, intent, start, depth)) = stack.pop() {
        stats.emitted += 1;
        stats.max_depth = stats.max_depth.max(depth);
        if emit(&extent, &intent).is_break() {
            stats.interrupted = true;
            break;
        }
        if cfg.max_patterns.is_some_and(|cap| stats.emitted >= cap) {
            stats.interrupted = !stack.is_empty() || has_children(ds, cfg, &extent, &intent, start);
            break;
        }
        let mut children = Vec::new();
        for pos in start..positions {
            let m = pos / 2;
            let s = intent.span(m);
            if s.lo == s.hi {
                continue;
            }
            let sub = if pos % 2 == 0 {
                ds.restrict_lo(&extent, m, s.lo + 1)
            } else {
                ds.restrict_hi(&extent, m, s.hi - 1)
            };
            stats.closures += 1;
            if sub.len() < cfg.min_support || sub.is_empty() {
                continue;
            }
            let closed = ds.intent_of(&sub)?;
            if !is_canonical(&intent, &closed, pos) {
                stats.rejected += 1;
                continue;
            }
            children.push((sub, closed, pos, depth + 1));
        }
        stack.extend(children.into_iter().rev());
    }
    Ok(stats)
}

fn has_children(ds: &Dataset, cfg: &EnumerationConfig, extent: &Extent, intent: &IntervalTuple, start: usize) -> bool {
    (start..2 * ds.num_attributes()).any(|pos| {
        let m = pos / 2;
        let s = intent.span(m);
        if s.lo == s.hi {
            return false;
        }
        let sub = if pos % 2 == 0 {
            ds.restrict_lo(extent, m, s.lo + 1)
        } else {
            ds.restrict_hi(extent, m, s.hi - 1)
        };
        sub.len() >= cfg.min_support
            && ds.intent_of(&sub).is_ok_and(|closed| is_canonical(intent, &closed, pos))
    })
}

/// All closed patterns with support `>= min_support`, each exactly once.
pub fn enumerate_closed_patterns(ds: &Dataset, cfg: &EnumerationConfig) -> Result<EnumerationOutcome> {
    let mut found = Vec::new();
    let stats = enumerate_with(ds, cfg, |extent, intent| {
        found.push(MinedPattern {
            extent: extent.clone(),
            intent: intent.clone(),
            measure: MeasureValue::Support(extent.len()),
        });
        ControlFlow::Continue(())
    })?;
    Ok(EnumerationOutcome { patterns: PatternSet::new(found, ProjectionState::identity(ds)), stats })
}

/// Keeps the patterns whose Δ in the unprojected structure is `>= θ`, with Δ
/// as their measure.
pub fn postfilter(pats: &PatternSet, theta: usize, ds: &Dataset) -> Result<PatternSet> {
    let identity = ProjectionState::identity(ds);
    let mut kept = Vec::new();
    for p in pats {
        let delta = delta_measure(&p.extent, &identity, ds)?;
        if delta >= theta {
            kept.push(MinedPattern {
                extent: p.extent.clone(),
                intent: ds.intent_of(&p.extent)?,
                measure: MeasureValue::Delta(delta),
            });
        }
    }
    Ok(PatternSet::new(kept, identity))
}

/// Every concept with a non-empty extent, found by closing every non-empty
/// subset of objects. Refuses datasets with more than `cap` objects.
pub fn brute_force_lattice(ds: &Dataset, cap: usize) -> Result<PatternSet> {
    let n = ds.num_objects();
    if n > cap.min(30) {
        return Err(Error::OracleCapExceeded { size: n, cap: cap.min(30) });
    }
    let mut seen: HashSet<Extent> = HashSet::new();
    let mut found = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let subset = Extent::from_positions(n, (0..n).filter(|g| mask & (1 << g) != 0));
        let intent = ds.intent_of(&subset)?;
        let closed = ds.extent_of(&intent)?;
        if seen.insert(closed.clone()) {
            found.push(MinedPattern {
                measure: MeasureValue::Support(closed.len()),
                extent: closed,
                intent,
            });
        }
    }
    Ok(PatternSet::new(found, ProjectionState::identity(ds)))
}

/// Δ of `e` read off a complete lattice: `|e|` minus the size of the largest
/// concept extent strictly inside `e` (the virtual bottom counts as size 0).
pub fn lattice_delta(lattice: &PatternSet, e: &Extent) -> usize {
    let largest = lattice
        .iter()
        .filter(|p| p.extent.is_strict_subset(e))
        .map(|p| p.extent.len())
        .max()
        .unwrap_or(0);
    e.len() - largest
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{digits, fig1a};
    use crate::interval::Interval;

    fn digit_set(ds: &Dataset, set: &PatternSet) -> Vec<String> {
        let mut v: Vec<String> = set.iter().map(|p| digits(ds, &p.extent)).collect();
        v.sort();
        v
    }

    #[test]
    fn enumerates_fixture_lattice() {
        let ds = fig1a();
        let out = enumerate_closed_patterns(&ds, &EnumerationConfig::new(1)).unwrap();
        assert_eq!(digit_set(&ds, &out.patterns), vec!["1", "1234", "123456", "234", "4", "56"]);
        assert_eq!(out.stats.emitted, 6);
        assert!(!out.stats.interrupted);

        let frequent = enumerate_closed_patterns(&ds, &EnumerationConfig::new(3)).unwrap();
        assert_eq!(digit_set(&ds, &frequent.patterns), vec!["1234", "123456", "234"]);

        let top = enumerate_closed_patterns(&ds, &EnumerationConfig::new(6)).unwrap();
        assert_eq!(digit_set(&ds, &top.patterns), vec!["123456"]);
    }

    #[test]
    fn rejects_bad_support() {
        let ds = fig1a();
        assert!(enumerate_closed_patterns(&ds, &EnumerationConfig::new(0)).is_err());
        assert!(enumerate_closed_patterns(&ds, &EnumerationConfig::new(7)).is_err());
    }

    #[test]
    fn cap_interrupts() {
        let ds = fig1a();
        let cfg = EnumerationConfig { min_support: 1, max_patterns: Some(2) };
        let out = enumerate_closed_patterns(&ds, &cfg).unwrap();
        assert_eq!(out.patterns.len(), 2);
        assert!(out.stats.interrupted);

        let exact = EnumerationConfig { min_support: 1, max_patterns: Some(6) };
        assert!(!enumerate_closed_patterns(&ds, &exact).unwrap().stats.interrupted);
    }

    #[test]
    fn postfilter_examples() {
        let ds = fig1a();
        let all = enumerate_closed_patterns(&ds, &EnumerationConfig::new(1)).unwrap().patterns;
        assert_eq!(digit_set(&ds, &postfilter(&all, 2, &ds).unwrap()), vec!["123456", "234", "56"]);
        assert_eq!(postfilter(&all, 0, &ds).unwrap().len(), all.len());
        assert!(postfilter(&all, 3, &ds).unwrap().is_empty());
    }

    #[test]
    fn brute_force_examples() {
        let ds = fig1a();
        let lattice = brute_force_lattice(&ds, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(digit_set(&ds, &lattice), vec!["1", "1234", "123456", "234", "4", "56"]);
        for p in &lattice {
            assert_eq!(
                lattice_delta(&lattice, &p.extent),
                delta_measure(&p.extent, &ProjectionState::identity(&ds), &ds).unwrap()
            );
        }

        let one = Dataset::build(vec![("a".into(), vec![Interval::point(1.0)])], vec!["m".into()]).unwrap();
        assert_eq!(brute_force_lattice(&one, 15).unwrap().len(), 1);
        let twins = Dataset::build(
            vec![("a".into(), vec![Interval::point(1.0)]), ("b".into(), vec![Interval::point(1.0)])],
            vec!["m".into()],
        )
        .unwrap();
        assert_eq!(brute_force_lattice(&twins, 15).unwrap().len(), 1);
        assert!(matches!(brute_force_lattice(&ds, 5), Err(Error::OracleCapExceeded { .. })));
    }
}
