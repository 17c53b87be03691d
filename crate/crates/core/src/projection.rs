//! Endpoint-restriction projections on interval tuples and the chain of
//! projections the miner walks along.
//!
//! A restriction on attribute `m` allows the `j_L` smallest grid values as
//! lower endpoints and the `j_R` largest as upper endpoints. Projecting an
//! interval rounds its lower endpoint down and its upper endpoint up to the
//! nearest allowed value. Since `w_1` is always an allowed lower endpoint and
//! `w_n` an allowed upper endpoint, rounding always succeeds.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::extent::Extent;
use crate::interval::{Dataset, IntervalTuple, Span};

/// Allowed endpoint counts for one attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AttributeRestriction {
    pub left_count: u32,
    pub right_count: u32,
}

/// A projection `ψ` given by one restriction per attribute, together with its
/// position in a chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjectionState {
    restrictions: Vec<AttributeRestriction>,
    grid_sizes: Vec<u32>,
    step: usize,
}

impl ProjectionState {
    /// `ψ_0`: only `[w_1, w_n]` is allowed on every attribute.
    pub fn initial(ds: &Dataset) -> Self {
        let grid_sizes = grid_sizes(ds);
        ProjectionState {
            restrictions: grid_sizes
                .iter()
                .map(|_| AttributeRestriction { left_count: 1, right_count: 1 })
                .collect(),
            grid_sizes,
            step: 0,
        }
    }

    /// The identity projection: every grid value is allowed on both ends.
    pub fn identity(ds: &Dataset) -> Self {
        let grid_sizes = grid_sizes(ds);
        let restrictions = grid_sizes
            .iter()
            .map(|&n| AttributeRestriction { left_count: n, right_count: n })
            .collect();
        let step = grid_sizes.iter().map(|&n| n as usize - 1).sum();
        ProjectionState { restrictions, grid_sizes, step }
    }

    /// An arbitrary (possibly asymmetric) projection. Its chain position is
    /// taken as the number of symmetric steps needed to cover it.
    pub fn with_restrictions(ds: &Dataset, restrictions: Vec<AttributeRestriction>) -> Result<Self> {
        let grid_sizes = grid_sizes(ds);
        if restrictions.len() != grid_sizes.len() {
            return Err(Error::ArityMismatch { expected: grid_sizes.len(), found: restrictions.len() });
        }
        for (m, (r, &n)) in restrictions.iter().zip(&grid_sizes).enumerate() {
            if r.left_count == 0 || r.right_count == 0 || r.left_count > n || r.right_count > n {
                return Err(Error::InvalidParameter(format!(
                    "restriction on `{}` must keep between 1 and {n} values per end",
                    ds.attributes()[m]
                )));
            }
        }
        let step = restrictions
            .iter()
            .map(|r| r.left_count.max(r.right_count) as usize - 1)
            .sum();
        Ok(ProjectionState { restrictions, grid_sizes, step })
    }

    pub fn restrictions(&self) -> &[AttributeRestriction] {
        &self.restrictions
    }

    pub fn restriction(&self, attr: usize) -> AttributeRestriction {
        self.restrictions[attr]
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn is_identity(&self) -> bool {
        self.restrictions
            .iter()
            .zip(&self.grid_sizes)
            .all(|(r, &n)| r.left_count == n && r.right_count == n)
    }

    /// Largest allowed lower-endpoint grid index on `attr`.
    #[inline]
    pub fn max_left(&self, attr: usize) -> u32 {
        self.restrictions[attr].left_count - 1
    }

    /// Smallest allowed upper-endpoint grid index on `attr`.
    #[inline]
    pub fn min_right(&self, attr: usize) -> u32 {
        self.grid_sizes[attr] - self.restrictions[attr].right_count
    }

    #[inline]
    pub fn apply_span(&self, attr: usize, s: Span) -> Span {
        Span { lo: s.lo.min(self.max_left(attr)), hi: s.hi.max(self.min_right(attr)) }
    }

    /// `ψ(d)`: rounds every lower endpoint down and every upper endpoint up to
    /// the nearest allowed value.
    pub fn apply(&self, d: &IntervalTuple) -> IntervalTuple {
        debug_assert_eq!(d.arity(), self.restrictions.len());
        IntervalTuple::new(
            d.spans().iter().enumerate().map(|(m, s)| self.apply_span(m, *s)).collect(),
        )
    }

    /// Whether `d` is in the fixed set of this projection.
    pub fn fixes(&self, d: &IntervalTuple) -> bool {
        d.spans()
            .iter()
            .enumerate()
            .all(|(m, s)| s.lo <= self.max_left(m) && s.hi >= self.min_right(m))
    }

    /// Definition of "simpler than": the fixed set of `self` is a strict
    /// subset of the fixed set of `other`. For endpoint restrictions this is
    /// component-wise inclusion of allowed sets with at least one strict.
    pub fn is_simpler(&self, other: &ProjectionState) -> bool {
        if self.restrictions.len() != other.restrictions.len() {
            return false;
        }
        let mut strict = false;
        for (a, b) in self.restrictions.iter().zip(&other.restrictions) {
            if a.left_count > b.left_count || a.right_count > b.right_count {
                return false;
            }
            strict |= a.left_count < b.left_count || a.right_count < b.right_count;
        }
        strict
    }

    /// Next state of the chain, or `None` once the identity is reached.
    pub fn advance(&self, sched: &ChainSchedule) -> Option<ProjectionState> {
        let attr = *sched.order().get(self.step)?;
        let n = self.grid_sizes[attr];
        let mut next = self.clone();
        let r = &mut next.restrictions[attr];
        r.left_count = (r.left_count + 1).min(n);
        r.right_count = (r.right_count + 1).min(n);
        next.step += 1;
        Some(next)
    }

    /// The closed description of `e` in the projected structure: `ψ(e^◇)`.
    pub fn closed_intent(&self, e: &Extent, ds: &Dataset) -> Result<IntervalTuple> {
        Ok(self.apply(&ds.intent_of(e)?))
    }

    /// The induced projection on extents, `ψ(e^◇)^◇`. The empty extent (the
    /// virtual bottom) maps to itself.
    pub fn project_extent(&self, e: &Extent, ds: &Dataset) -> Extent {
        match self.closed_intent(e, ds) {
            Ok(d) => ds.extent_of(&d).expect("arity checked by intent_of"),
            Err(_) => e.clone(),
        }
    }

    pub fn describe(&self, ds: &Dataset) -> String {
        let parts: Vec<String> = self
            .restrictions
            .iter()
            .enumerate()
            .map(|(m, r)| {
                let w = ds.value_set(m);
                format!(
                    "{}[{{{}}},{{{}}}]",
                    ds.attributes()[m],
                    join(w.prefix(r.left_count as usize)),
                    join(w.suffix(r.right_count as usize))
                )
            })
            .collect();
        format!("psi_{}({})", self.step, parts.join(" "))
    }
}

fn join(vals: &[f64]) -> String {
    vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn grid_sizes(ds: &Dataset) -> Vec<u32> {
    ds.value_sets().iter().map(|w| w.len() as u32).collect()
}

/// Order in which attributes are refined along the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScheduleStrategy {
    /// One step per attribute in column order, cycling until all are exhausted.
    #[default]
    RoundRobin,
    /// All steps of the first attribute, then all of the second, and so on.
    PerAttribute,
}

impl FromStr for ScheduleStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "round-robin" => Ok(ScheduleStrategy::RoundRobin),
            "per-attribute" => Ok(ScheduleStrategy::PerAttribute),
            other => Err(Error::InvalidParameter(format!(
                "unknown schedule `{other}` (expected round-robin or per-attribute)"
            ))),
        }
    }
}

impl fmt::Display for ScheduleStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleStrategy::RoundRobin => "round-robin",
            ScheduleStrategy::PerAttribute => "per-attribute",
        })
    }
}

/// Which attribute is advanced at each step. Attribute `m` appears exactly
/// `|W_m| - 1` times, so the chain has `Σ_m (|W_m| - 1)` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSchedule {
    order: Vec<usize>,
}

impl ChainSchedule {
    pub fn new(ds: &Dataset, strategy: ScheduleStrategy) -> Self {
        let steps: Vec<usize> = ds.value_sets().iter().map(|w| w.len() - 1).collect();
        let mut order = Vec::with_capacity(steps.iter().sum());
        match strategy {
            ScheduleStrategy::PerAttribute => {
                for (m, &k) in steps.iter().enumerate() {
                    order.extend(std::iter::repeat_n(m, k));
                }
            }
            ScheduleStrategy::RoundRobin => {
                let rounds = steps.iter().copied().max().unwrap_or(0);
                for round in 0..rounds {
                    order.extend(steps.iter().enumerate().filter(|(_, &k)| round < k).map(|(m, _)| m));
                }
            }
        }
        ChainSchedule { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// All states `ψ_0, ψ_1, ..., ψ_k` of the chain.
    pub fn states(&self, ds: &Dataset) -> Vec<ProjectionState> {
        let mut out = vec![ProjectionState::initial(ds)];
        while let Some(next) = out.last().and_then(|s| s.advance(self)) {
            out.push(next);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{ext_digits, fig1a, tuple};
    use crate::interval::Interval;

    fn chain(ds: &Dataset) -> Vec<ProjectionState> {
        ChainSchedule::new(ds, ScheduleStrategy::PerAttribute).states(ds)
    }

    fn restr(l: u32, r: u32) -> AttributeRestriction {
        AttributeRestriction { left_count: l, right_count: r }
    }

    #[test]
    fn initial_projection_admits_only_full_range() {
        let ds = fig1a();
        let psi0 = ProjectionState::initial(&ds);
        assert_eq!(psi0.step_index(), 0);
        let d = tuple(&ds, &[(0., 0.), (1., 2.)]);
        assert_eq!(psi0.apply(&d), tuple(&ds, &[(0., 1.), (0., 2.)]));
        assert!(psi0.fixes(&ds.full_tuple()));
        assert!(!psi0.fixes(&d));

        let single =
            Dataset::build(vec![("g".into(), vec![Interval::point(5.0)])], vec!["m".into()]).unwrap();
        let s0 = ProjectionState::initial(&single);
        assert!(s0.is_identity());
        assert!(s0.advance(&ChainSchedule::new(&single, ScheduleStrategy::RoundRobin)).is_none());
    }

    #[test]
    fn chain_matches_worked_example() {
        let ds = fig1a();
        let states = chain(&ds);
        assert_eq!(states.len(), 4);
        let expected = [
            vec![restr(1, 1), restr(1, 1)],
            vec![restr(2, 2), restr(1, 1)],
            vec![restr(2, 2), restr(2, 2)],
            vec![restr(2, 2), restr(3, 3)],
        ];
        for (s, e) in states.iter().zip(expected) {
            assert_eq!(s.restrictions(), e.as_slice());
        }
        assert!(states[3].is_identity());
        assert_eq!(
            states[1].describe(&ds),
            "psi_1(m1[{0,1},{0,1}] m2[{0},{2}])"
        );
        assert_eq!(
            states[2].describe(&ds),
            "psi_2(m1[{0,1},{0,1}] m2[{0,1},{1,2}])"
        );
        let sched = ChainSchedule::new(&ds, ScheduleStrategy::PerAttribute);
        assert!(states[3].advance(&sched).is_none());
    }

    #[test]
    fn round_robin_interleaves() {
        let rows = vec![(
            "a".to_string(),
            vec![Interval::new(0., 3.).unwrap(), Interval::new(0., 1.).unwrap(), Interval::point(7.)],
        ), (
            "b".to_string(),
            vec![Interval::new(1., 2.).unwrap(), Interval::point(0.), Interval::point(7.)],
        )];
        let ds = Dataset::build(rows, vec!["x".into(), "y".into(), "z".into()]).unwrap();
        let rr = ChainSchedule::new(&ds, ScheduleStrategy::RoundRobin);
        assert_eq!(rr.order(), &[0, 1, 0, 0]);
        let pa = ChainSchedule::new(&ds, ScheduleStrategy::PerAttribute);
        assert_eq!(pa.order(), &[0, 0, 0, 1]);
    }

    #[test]
    fn asymmetric_projection_example() {
        let ds = fig1a();
        // m1 keeps L = {0,1}, R = {1}. On m2 the sets {0,2}, {0,2} round [1,2]
        // exactly like L = {0}, R = {2}.
        let ps = ProjectionState::with_restrictions(&ds, vec![restr(2, 1), restr(1, 1)]).unwrap();
        let d = tuple(&ds, &[(0., 0.), (1., 2.)]);
        assert_eq!(ps.apply(&d), tuple(&ds, &[(0., 1.), (0., 2.)]));
        assert!(ProjectionState::with_restrictions(&ds, vec![restr(0, 1), restr(1, 1)]).is_err());
        assert!(ProjectionState::with_restrictions(&ds, vec![restr(3, 1), restr(1, 1)]).is_err());
    }

    #[test]
    fn rounding_down_to_allowed_left() {
        let ds = fig1a();
        let psi2 = &chain(&ds)[2];
        let d = tuple(&ds, &[(0., 0.), (2., 2.)]);
        assert_eq!(psi2.apply(&d), tuple(&ds, &[(0., 0.), (1., 2.)]));
        let fixed = tuple(&ds, &[(0., 0.), (1., 2.)]);
        assert_eq!(psi2.apply(&fixed), fixed);
    }

    #[test]
    fn project_extent_examples() {
        let ds = fig1a();
        let states = chain(&ds);
        let e = ext_digits(&ds, "234");
        assert_eq!(states[1].project_extent(&e, &ds), ext_digits(&ds, "1234"));
        assert_eq!(states[3].project_extent(&e, &ds), e);
        assert_eq!(states[0].project_extent(&ext_digits(&ds, "5"), &ds), ds.all_objects());
        assert!(states[0].project_extent(&Extent::empty(6), &ds).is_empty());
    }

    #[test]
    fn simplicity_order() {
        let ds = fig1a();
        let states = chain(&ds);
        assert!(states[0].is_simpler(&states[1]));
        assert!(states.windows(2).all(|w| w[0].is_simpler(&w[1])));
        assert!(!states[1].is_simpler(&states[1]));
        assert!(!states[2].is_simpler(&states[1]));
        let adv_m2 = ProjectionState::with_restrictions(&ds, vec![restr(1, 1), restr(2, 2)]).unwrap();
        assert!(!states[1].is_simpler(&adv_m2));
        assert!(!adv_m2.is_simpler(&states[1]));
    }

    #[test]
    fn schedule_tokens() {
        assert_eq!("round-robin".parse::<ScheduleStrategy>().unwrap(), ScheduleStrategy::RoundRobin);
        assert_eq!(
            "per-attribute".parse::<ScheduleStrategy>().unwrap(),
            ScheduleStrategy::PerAttribute
        );
        assert!("zigzag".parse::<ScheduleStrategy>().is_err());
    }
}
