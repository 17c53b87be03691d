//! Pattern quality measures inside a projected structure.
//!
//! The empty extent acts as a virtual bottom concept: it is a subconcept of
//! every concept, so a concept with no non-empty proper closed subextent has
//! `Δ = |extent|`.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::extent::Extent;
use crate::interval::{Dataset, IntervalTuple, Span};
use crate::projection::ProjectionState;

/// Default largest extent for which [`exact_stability`] enumerates subsets.
pub const DEFAULT_STABILITY_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureValue {
    Support(usize),
    Delta(usize),
    Stability(Ratio<u64>),
    StabilityBound(f64),
}

impl MeasureValue {
    pub fn delta(&self) -> Option<usize> {
        match self {
            MeasureValue::Delta(d) => Some(*d),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            MeasureValue::Support(v) | MeasureValue::Delta(v) => v as f64,
            MeasureValue::Stability(r) => *r.numer() as f64 / *r.denom() as f64,
            MeasureValue::StabilityBound(b) => b,
        }
    }
}

pub fn support(e: &Extent) -> usize {
    e.len()
}

/// Grid spans reachable from `s` on `attr` by one minimal narrowing that the
/// projection allows: raise the lower endpoint to the next allowed left value,
/// or lower the upper endpoint to the previous allowed right value.
#[inline]
pub(crate) fn narrowings(ps: &ProjectionState, attr: usize, s: Span) -> [Option<Span>; 2] {
    let raise = (s.lo < s.hi && s.lo < ps.max_left(attr)).then(|| Span::new(s.lo + 1, s.hi));
    let lower = (s.hi > s.lo && s.hi > ps.min_right(attr)).then(|| Span::new(s.lo, s.hi - 1));
    [raise, lower]
}

/// Maximal closed extents strictly inside the project-closure of `e` in the
/// structure projected by `ps`. Returns `[∅]` when only the virtual bottom
/// lies below.
pub fn lower_neighbors(e: &Extent, ps: &ProjectionState, ds: &Dataset) -> Result<Vec<Extent>> {
    if e.is_empty() {
        return Err(Error::NoNeighborsOfBottom);
    }
    let intent = ps.closed_intent(e, ds)?;
    let closed = ds.extent_of(&intent)?;
    let mut found: Vec<Extent> = Vec::new();
    for (m, &s) in intent.spans().iter().enumerate() {
        for narrowed in narrowings(ps, m, s).into_iter().flatten() {
            let sub = if narrowed.lo != s.lo {
                ds.restrict_lo(&closed, m, narrowed.lo)
            } else {
                ds.restrict_hi(&closed, m, narrowed.hi)
            };
            debug_assert!(sub.is_strict_subset(&closed));
            if !sub.is_empty() && !found.contains(&sub) {
                found.push(sub);
            }
        }
    }
    let maximal: Vec<Extent> = found
        .iter()
        .filter(|a| !found.iter().any(|b| a.is_strict_subset(b)))
        .cloned()
        .collect();
    if maximal.is_empty() {
        return Ok(vec![Extent::empty(ds.num_objects())]);
    }
    Ok(maximal)
}

/// Δ of a known pattern concept `(e, intent)` of the projected structure.
/// Only counts are needed: the largest one-step narrowing is the largest
/// lower neighbor.
pub(crate) fn delta_of_concept(
    e: &Extent,
    intent: &IntervalTuple,
    ps: &ProjectionState,
    ds: &Dataset,
) -> usize {
    let size = e.len();
    let mut largest = 0;
    for (m, &s) in intent.spans().iter().enumerate() {
        let [raise, lower] = narrowings(ps, m, s);
        if let Some(r) = raise {
            largest = largest.max(ds.count_lo_at_least(e, m, r.lo));
        }
        if let Some(l) = lower {
            largest = largest.max(ds.count_hi_at_most(e, m, l.hi));
        }
        if largest + 1 >= size {
            break;
        }
    }
    size - largest
}

/// `Δ(e) = |e| − max |n|` over the lower neighbors `n` of `e` under `ps`.
pub fn delta_measure(e: &Extent, ps: &ProjectionState, ds: &Dataset) -> Result<usize> {
    if e.is_empty() {
        return Err(Error::NoNeighborsOfBottom);
    }
    let intent = ps.closed_intent(e, ds)?;
    let closed = ds.extent_of(&intent)?;
    Ok(delta_of_concept(&closed, &intent, ps, ds))
}

/// `1 − 2^(−Δ)`, an upper bound on stability.
pub fn stability_upper_bound(e: &Extent, ps: &ProjectionState, ds: &Dataset) -> Result<f64> {
    let delta = delta_measure(e, ps, ds)?;
    Ok(1.0 - (-(delta as f64)).exp2())
}

/// Number of subsets `s ⊆ e` with `s^◇ = e^◇`. The empty subset never counts.
pub fn stability_numerator(e: &Extent, ds: &Dataset, cap: usize) -> Result<u64> {
    let size = e.len();
    if size > cap.min(62) {
        return Err(Error::OracleCapExceeded { size, cap: cap.min(62) });
    }
    let intent = ds.intent_of(e)?;
    let members: Vec<usize> = e.iter().collect();
    let mut hull: Vec<Span> = Vec::with_capacity(intent.arity());
    Ok(count_matching(ds, &members, intent.spans(), &mut hull))
}

/// Exact stability: the fraction of subsets of `e` whose common description
/// is the intent of `e`.
pub fn exact_stability(e: &Extent, ds: &Dataset, cap: usize) -> Result<Ratio<u64>> {
    let numer = stability_numerator(e, ds, cap)?;
    Ok(Ratio::new(numer, 1u64 << e.len()))
}

/// Counts the non-empty subsets of `rest` whose hull together with `hull`
/// equals `target`. An empty `hull` stands for "no object chosen yet".
fn count_matching(ds: &Dataset, rest: &[usize], target: &[Span], hull: &mut Vec<Span>) -> u64 {
    if !hull.is_empty() && hull.as_slice() == target {
        // Hull already equals the intent and can only stay there.
        return 1u64 << rest.len();
    }
    let Some((&g, tail)) = rest.split_first() else {
        return 0;
    };
    let without = count_matching(ds, tail, target, hull);
    let saved = hull.clone();
    if hull.is_empty() {
        hull.extend((0..target.len()).map(|m| Span::new(ds.lo_index(m, g), ds.hi_index(m, g))));
    } else {
        for (m, s) in hull.iter_mut().enumerate() {
            *s = s.hull(Span::new(ds.lo_index(m, g), ds.hi_index(m, g)));
        }
    }
    let with = count_matching(ds, tail, target, hull);
    *hull = saved;
    without + with
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{ext_digits, fig1a};
    use crate::interval::Interval;
    use crate::projection::{ChainSchedule, ScheduleStrategy};

    fn states(ds: &Dataset) -> Vec<ProjectionState> {
        ChainSchedule::new(ds, ScheduleStrategy::PerAttribute).states(ds)
    }

    #[test]
    fn support_examples() {
        let ds = fig1a();
        assert_eq!(support(&ext_digits(&ds, "234")), 3);
        assert_eq!(support(&Extent::empty(6)), 0);
        assert_eq!(support(&ds.all_objects()), 6);
    }

    #[test]
    fn lower_neighbor_examples() {
        let ds = fig1a();
        let id = ProjectionState::identity(&ds);
        assert_eq!(
            lower_neighbors(&ext_digits(&ds, "234"), &id, &ds).unwrap(),
            vec![ext_digits(&ds, "4")]
        );
        assert_eq!(
            lower_neighbors(&ext_digits(&ds, "56"), &id, &ds).unwrap(),
            vec![Extent::empty(6)]
        );
        let psi0 = ProjectionState::initial(&ds);
        assert_eq!(lower_neighbors(&ds.all_objects(), &psi0, &ds).unwrap(), vec![Extent::empty(6)]);
        assert_eq!(
            lower_neighbors(&Extent::empty(6), &id, &ds).unwrap_err(),
            Error::NoNeighborsOfBottom
        );
    }

    #[test]
    fn top_has_two_neighbors_under_identity() {
        let ds = fig1a();
        let id = ProjectionState::identity(&ds);
        let mut n = lower_neighbors(&ds.all_objects(), &id, &ds).unwrap();
        n.sort_by(|a, b| a.cmp_members(b));
        assert_eq!(n, vec![ext_digits(&ds, "1234"), ext_digits(&ds, "56")]);
    }

    #[test]
    fn delta_examples() {
        let ds = fig1a();
        let id = ProjectionState::identity(&ds);
        assert_eq!(delta_measure(&ext_digits(&ds, "234"), &id, &ds).unwrap(), 2);
        assert_eq!(delta_measure(&ds.all_objects(), &id, &ds).unwrap(), 2);
        let psi2 = &states(&ds)[2];
        assert_eq!(delta_measure(&ext_digits(&ds, "234"), psi2, &ds).unwrap(), 3);
        assert_eq!(delta_measure(&ds.all_objects(), &states(&ds)[0], &ds).unwrap(), 6);
    }

    #[test]
    fn stability_examples() {
        let ds = fig1a();
        assert_eq!(exact_stability(&ext_digits(&ds, "234"), &ds, 20).unwrap(), Ratio::new(3, 4));
        assert_eq!(exact_stability(&ext_digits(&ds, "1"), &ds, 20).unwrap(), Ratio::new(1, 2));
        assert!(matches!(
            exact_stability(&ds.all_objects(), &ds, 5),
            Err(Error::OracleCapExceeded { size: 6, cap: 5 })
        ));
    }

    #[test]
    fn stability_bound_examples() {
        let ds = fig1a();
        let id = ProjectionState::identity(&ds);
        assert_eq!(stability_upper_bound(&ext_digits(&ds, "234"), &id, &ds).unwrap(), 0.75);
        assert_eq!(stability_upper_bound(&ext_digits(&ds, "1"), &id, &ds).unwrap(), 0.5);
        assert_eq!(exact_stability(&ext_digits(&ds, "1"), &ds, 20).unwrap(), Ratio::new(1, 2));
    }

    #[test]
    fn identical_objects_have_full_delta() {
        let rows = (0..4)
            .map(|i| (format!("o{i}"), vec![Interval::new(1.0, 2.0).unwrap()]))
            .collect();
        let ds = Dataset::build(rows, vec!["m".into()]).unwrap();
        let id = ProjectionState::identity(&ds);
        assert_eq!(delta_measure(&ds.all_objects(), &id, &ds).unwrap(), 4);
        assert_eq!(exact_stability(&ds.all_objects(), &ds, 20).unwrap(), Ratio::new(15, 16));
    }
}
