//! Interval descriptions, datasets and the Galois operators between object
//! sets and interval tuples.
//!
//! Descriptions are interned on a per-attribute value grid: every interval is
//! stored as a pair of indices into the sorted distinct endpoint values of its
//! attribute. Meet, subsumption and projections then reduce to integer
//! arithmetic, and endpoint equality is exact.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::extent::Extent;

/// A closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo > hi {
            return Err(Error::MalformedInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// Sorted distinct values of one attribute: `w_1 < w_2 < ... < w_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSet {
    values: Vec<f64>,
}

impl ValueSet {
    /// Builds the value set from arbitrary values; duplicates are merged.
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Result<Self> {
        let mut values: Vec<f64> = values.into_iter().collect();
        if values.is_empty() {
            return Err(Error::EmptyDataset);
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(ValueSet { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index_of(&self, v: f64) -> Option<usize> {
        self.values.binary_search_by(|w| w.total_cmp(&v)).ok()
    }

    /// The `j` smallest values.
    pub fn prefix(&self, j: usize) -> &[f64] {
        &self.values[..j.min(self.len())]
    }

    /// The `j` largest values.
    pub fn suffix(&self, j: usize) -> &[f64] {
        &self.values[self.len() - j.min(self.len())..]
    }
}

/// An interval in grid coordinates: indices of its endpoints in the
/// attribute's [`ValueSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub lo: u32,
    pub hi: u32,
}

impl Span {
    pub fn new(lo: u32, hi: u32) -> Self {
        debug_assert!(lo <= hi);
        Span { lo, hi }
    }

    /// Convex hull of two spans.
    #[inline]
    pub fn hull(self, other: Span) -> Span {
        Span { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    #[inline]
    pub fn contains(self, other: Span) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

/// One interval per attribute; the description language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalTuple {
    spans: Vec<Span>,
}

impl IntervalTuple {
    pub fn new(spans: Vec<Span>) -> Self {
        IntervalTuple { spans }
    }

    pub fn arity(&self) -> usize {
        self.spans.len()
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn span(&self, attr: usize) -> Span {
        self.spans[attr]
    }

    pub fn set_span(&mut self, attr: usize, span: Span) {
        self.spans[attr] = span;
    }

    fn check_arity(&self, other: &IntervalTuple) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), found: other.arity() });
        }
        Ok(())
    }

    /// Similarity of two descriptions: the component-wise convex hull.
    pub fn meet(&self, other: &IntervalTuple) -> Result<IntervalTuple> {
        self.check_arity(other)?;
        Ok(IntervalTuple {
            spans: self.spans.iter().zip(&other.spans).map(|(a, b)| a.hull(*b)).collect(),
        })
    }

    /// `self ⊑ other`: every interval of `self` contains the matching interval
    /// of `other`, i.e. `self ⊓ other = self`.
    pub fn subsumes(&self, other: &IntervalTuple) -> Result<bool> {
        self.check_arity(other)?;
        Ok(self.spans.iter().zip(&other.spans).all(|(a, b)| a.contains(*b)))
    }
}

/// Objects with interval-tuple descriptions over a fixed attribute list.
///
/// Descriptions are kept column-major (one `lo` and one `hi` index array per
/// attribute) because every hot loop scans one attribute over many objects.
#[derive(Debug, Clone)]
pub struct Dataset {
    object_ids: Vec<String>,
    attributes: Vec<String>,
    value_sets: Vec<ValueSet>,
    lo: Vec<Vec<u32>>,
    hi: Vec<Vec<u32>>,
    index: Vec<Option<ThresholdIndex>>,
}

/// Largest `|W_m| · |G|` (in bits) for which an attribute gets a
/// [`ThresholdIndex`]; beyond it the attribute is scanned object by object.
const INDEX_BUDGET_BITS: usize = 1 << 27;

/// Per-attribute bitsets answering "lower endpoint `>= k`" and "upper
/// endpoint `<= k`" with one word-wise intersection.
#[derive(Debug, Clone)]
struct ThresholdIndex {
    lo_at_least: Vec<Extent>,
    hi_at_most: Vec<Extent>,
}

impl ThresholdIndex {
    fn build(lo: &[u32], hi: &[u32], values: usize) -> Self {
        let n = lo.len();
        let mut lo_at_least = vec![Extent::empty(n); values];
        let mut hi_at_most = vec![Extent::empty(n); values];
        for g in 0..n {
            for set in &mut lo_at_least[..=lo[g] as usize] {
                set.insert(g);
            }
            for set in &mut hi_at_most[hi[g] as usize..] {
                set.insert(g);
            }
        }
        ThresholdIndex { lo_at_least, hi_at_most }
    }
}

impl Dataset {
    /// Builds a dataset; each attribute's value set is the sorted distinct
    /// set of all lower and upper endpoints occurring in the rows.
    pub fn build(rows: Vec<(String, Vec<Interval>)>, attributes: Vec<String>) -> Result<Dataset> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let arity = attributes.len();
        let mut seen = HashSet::with_capacity(rows.len());
        for (id, ivs) in &rows {
            if ivs.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: ivs.len() });
            }
            for (m, iv) in ivs.iter().enumerate() {
                if !iv.lo.is_finite() || !iv.hi.is_finite() {
                    return Err(Error::NonFinite { attribute: attributes[m].clone() });
                }
                if iv.lo > iv.hi {
                    return Err(Error::MalformedInterval { lo: iv.lo, hi: iv.hi });
                }
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateObject(id.clone()));
            }
        }

        let mut value_sets = Vec::with_capacity(arity);
        let mut lo: Vec<Vec<u32>> = Vec::with_capacity(arity);
        let mut hi: Vec<Vec<u32>> = Vec::with_capacity(arity);
        for m in 0..arity {
            // Normalize -0.0 so that equal endpoints intern to one grid value.
            let canon = |v: f64| if v == 0.0 { 0.0 } else { v };
            let w = ValueSet::from_values(
                rows.iter().flat_map(|(_, ivs)| [canon(ivs[m].lo), canon(ivs[m].hi)]),
            )?;
            let index = |v: f64| w.index_of(canon(v)).expect("endpoint is on its own grid") as u32;
            lo.push(rows.iter().map(|(_, ivs)| index(ivs[m].lo)).collect());
            hi.push(rows.iter().map(|(_, ivs)| index(ivs[m].hi)).collect());
            value_sets.push(w);
        }

        let n = rows.len();
        let index = (0..arity)
            .map(|m| {
                let values = value_sets[m].len();
                (values.saturating_mul(n) <= INDEX_BUDGET_BITS)
                    .then(|| ThresholdIndex::build(&lo[m], &hi[m], values))
            })
            .collect();
        Ok(Dataset {
            object_ids: rows.into_iter().map(|(id, _)| id).collect(),
            attributes,
            value_sets,
            lo,
            hi,
            index,
        })
    }

    pub fn num_objects(&self) -> usize {
        self.object_ids.len()
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn object_ids(&self) -> &[String] {
        &self.object_ids
    }

    pub fn object_id(&self, g: usize) -> &str {
        &self.object_ids[g]
    }

    pub fn position_of(&self, id: &str) -> Option<usize> {
        self.object_ids.iter().position(|o| o == id)
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn value_set(&self, attr: usize) -> &ValueSet {
        &self.value_sets[attr]
    }

    pub fn value_sets(&self) -> &[ValueSet] {
        &self.value_sets
    }

    #[inline]
    pub fn lo_index(&self, attr: usize, g: usize) -> u32 {
        self.lo[attr][g]
    }

    #[inline]
    pub fn hi_index(&self, attr: usize, g: usize) -> u32 {
        self.hi[attr][g]
    }

    /// The description `δ(g)` of the object at position `g`.
    pub fn description(&self, g: usize) -> IntervalTuple {
        IntervalTuple::new(
            (0..self.num_attributes()).map(|m| Span::new(self.lo[m][g], self.hi[m][g])).collect(),
        )
    }

    /// The real interval for a grid span of `attr`.
    pub fn interval(&self, attr: usize, span: Span) -> Interval {
        let w = &self.value_sets[attr];
        Interval { lo: w.get(span.lo as usize), hi: w.get(span.hi as usize) }
    }

    pub fn to_intervals(&self, d: &IntervalTuple) -> Vec<Interval> {
        d.spans().iter().enumerate().map(|(m, s)| self.interval(m, *s)).collect()
    }

    /// Interns a real interval tuple; all endpoints must lie on the grid.
    pub fn tuple_from_intervals(&self, ivs: &[Interval]) -> Result<IntervalTuple> {
        if ivs.len() != self.num_attributes() {
            return Err(Error::ArityMismatch { expected: self.num_attributes(), found: ivs.len() });
        }
        let mut spans = Vec::with_capacity(ivs.len());
        for (m, iv) in ivs.iter().enumerate() {
            if iv.lo > iv.hi {
                return Err(Error::MalformedInterval { lo: iv.lo, hi: iv.hi });
            }
            let w = &self.value_sets[m];
            let idx = |v: f64| {
                w.index_of(v).map(|i| i as u32).ok_or_else(|| Error::OffGrid {
                    attribute: self.attributes[m].clone(),
                    value: v,
                })
            };
            spans.push(Span::new(idx(iv.lo)?, idx(iv.hi)?));
        }
        Ok(IntervalTuple::new(spans))
    }

    /// The widest description: `[w_1, w_n]` on every attribute.
    pub fn full_tuple(&self) -> IntervalTuple {
        IntervalTuple::new(
            self.value_sets.iter().map(|w| Span::new(0, w.len() as u32 - 1)).collect(),
        )
    }

    pub fn all_objects(&self) -> Extent {
        Extent::full(self.num_objects())
    }

    fn check_tuple(&self, d: &IntervalTuple) -> Result<()> {
        if d.arity() != self.num_attributes() {
            return Err(Error::ArityMismatch { expected: self.num_attributes(), found: d.arity() });
        }
        Ok(())
    }

    #[inline]
    fn admits(&self, d: &IntervalTuple, g: usize) -> bool {
        d.spans()
            .iter()
            .enumerate()
            .all(|(m, s)| s.lo <= self.lo[m][g] && self.hi[m][g] <= s.hi)
    }

    /// `d^◇`: all objects whose description is subsumed by `d`.
    pub fn extent_of(&self, d: &IntervalTuple) -> Result<Extent> {
        self.check_tuple(d)?;
        if self.index.iter().all(Option::is_some) {
            let mut e = self.all_objects();
            for (m, s) in d.spans().iter().enumerate() {
                let idx = self.index[m].as_ref().expect("checked above");
                e.intersect_with(&idx.lo_at_least[s.lo as usize]);
                e.intersect_with(&idx.hi_at_most[s.hi as usize]);
            }
            return Ok(e);
        }
        Ok(Extent::from_positions(
            self.num_objects(),
            (0..self.num_objects()).filter(|&g| self.admits(d, g)),
        ))
    }

    /// Members of `within` that `d` admits. Cheaper than [`Dataset::extent_of`]
    /// when the answer is known to lie inside `within`.
    pub fn extent_within(&self, d: &IntervalTuple, within: &Extent) -> Extent {
        within.retain(|g| self.admits(d, g))
    }

    /// `A^◇`: the meet of the descriptions of all members.
    pub fn intent_of(&self, e: &Extent) -> Result<IntervalTuple> {
        let size = e.len();
        if size == 0 {
            return Err(Error::NoIntent);
        }
        // Scanning members costs `|A|` per attribute; a bisection over the
        // index costs a few word-wise subset tests.
        let use_index = size > 4 * e.word_count();
        let spans = (0..self.num_attributes())
            .map(|m| match (&self.index[m], use_index) {
                (Some(idx), true) => self.span_by_index(idx, e),
                _ => {
                    let (lo, hi) = (&self.lo[m], &self.hi[m]);
                    let mut members = e.iter();
                    let first = members.next().expect("non-empty");
                    members.fold(Span::new(lo[first], hi[first]), |s, g| {
                        Span::new(s.lo.min(lo[g]), s.hi.max(hi[g]))
                    })
                }
            })
            .collect();
        Ok(IntervalTuple::new(spans))
    }

    /// Hull of `e` on one attribute: the largest `k` with every lower
    /// endpoint `>= k` and the smallest `k` with every upper endpoint `<= k`.
    fn span_by_index(&self, idx: &ThresholdIndex, e: &Extent) -> Span {
        let n = idx.lo_at_least.len();
        let lo = partition_point(n, |k| e.is_subset(&idx.lo_at_least[k])) - 1;
        let hi = partition_point(n, |k| !e.is_subset(&idx.hi_at_most[k]));
        Span::new(lo as u32, hi as u32)
    }

    /// `(A^◇)^◇`: the smallest closed extent containing `e`.
    pub fn close_extent(&self, e: &Extent) -> Result<Extent> {
        let d = self.intent_of(e)?;
        self.extent_of(&d)
    }

    /// Members of `e` whose lower endpoint on `attr` has grid index `>= k`.
    pub fn restrict_lo(&self, e: &Extent, attr: usize, k: u32) -> Extent {
        match (&self.index[attr], self.lo_set(attr, k)) {
            (Some(_), Some(set)) => e.intersection(set),
            (Some(_), None) => Extent::empty(self.num_objects()),
            (None, _) => {
                let col = &self.lo[attr];
                e.retain(|g| col[g] >= k)
            }
        }
    }

    /// Members of `e` whose upper endpoint on `attr` has grid index `<= k`.
    pub fn restrict_hi(&self, e: &Extent, attr: usize, k: u32) -> Extent {
        match &self.index[attr] {
            Some(idx) => e.intersection(&idx.hi_at_most[(k as usize).min(idx.hi_at_most.len() - 1)]),
            None => {
                let col = &self.hi[attr];
                e.retain(|g| col[g] <= k)
            }
        }
    }

    pub fn count_lo_at_least(&self, e: &Extent, attr: usize, k: u32) -> usize {
        match (&self.index[attr], self.lo_set(attr, k)) {
            (Some(_), Some(set)) => e.intersection_len(set),
            (Some(_), None) => 0,
            (None, _) => {
                let col = &self.lo[attr];
                e.count_where(|g| col[g] >= k)
            }
        }
    }

    pub fn count_hi_at_most(&self, e: &Extent, attr: usize, k: u32) -> usize {
        match &self.index[attr] {
            Some(idx) => e.intersection_len(&idx.hi_at_most[(k as usize).min(idx.hi_at_most.len() - 1)]),
            None => {
                let col = &self.hi[attr];
                e.count_where(|g| col[g] <= k)
            }
        }
    }

    fn lo_set(&self, attr: usize, k: u32) -> Option<&Extent> {
        self.index[attr].as_ref().and_then(|idx| idx.lo_at_least.get(k as usize))
    }

    /// Renders a description with real values, e.g. `<0, [1, 2]>`.
    pub fn render(&self, d: &IntervalTuple) -> String {
        let parts: Vec<String> =
            self.to_intervals(d).iter().map(|iv| iv.to_string()).collect();
        format!("<{}>", parts.join(", "))
    }

    /// Renders an extent as its object ids.
    pub fn extent_ids(&self, e: &Extent) -> Vec<String> {
        e.iter().map(|g| self.object_ids[g].clone()).collect()
    }
}

/// First `k` in `0..n` for which `pred` fails, given `pred` holds on a prefix.
fn partition_point(n: usize, mut pred: impl FnMut(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::fixtures::{ext, fig1a, tuple};

    #[test]
    fn builds_value_sets_of_fig1a() {
        let ds = fig1a();
        assert_eq!(ds.value_set(0).values(), &[0.0, 1.0]);
        assert_eq!(ds.value_set(1).values(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn degenerate_value_set() {
        let ds = Dataset::build(vec![("g".into(), vec![Interval::point(3.0)])], vec!["m".into()])
            .unwrap();
        assert_eq!(ds.value_set(0).values(), &[3.0]);
    }

    #[test]
    fn value_set_is_endpoint_union() {
        let ds = Dataset::build(
            vec![
                ("a".into(), vec![Interval::new(0.0, 2.0).unwrap()]),
                ("b".into(), vec![Interval::new(1.0, 3.0).unwrap()]),
            ],
            vec!["m".into()],
        )
        .unwrap();
        assert_eq!(ds.value_set(0).values(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn build_errors() {
        assert_eq!(Dataset::build(vec![], vec!["m".into()]).unwrap_err(), Error::EmptyDataset);
        let ragged = vec![
            ("a".into(), vec![Interval::point(0.0)]),
            ("b".into(), vec![Interval::point(0.0), Interval::point(1.0)]),
        ];
        assert!(matches!(
            Dataset::build(ragged, vec!["m".into()]),
            Err(Error::ArityMismatch { .. })
        ));
        let bad = vec![("a".into(), vec![Interval { lo: 2.0, hi: 1.0 }])];
        assert!(matches!(
            Dataset::build(bad, vec!["m".into()]),
            Err(Error::MalformedInterval { .. })
        ));
        assert!(Interval::new(2.0, 1.0).is_err());
    }

    #[test]
    fn meet_examples() {
        let ds = fig1a();
        let g1 = tuple(&ds, &[(0., 0.), (0., 0.)]);
        let g6 = tuple(&ds, &[(1., 1.), (0., 2.)]);
        assert_eq!(g1.meet(&g6).unwrap(), tuple(&ds, &[(0., 1.), (0., 2.)]));
        assert_eq!(g1.meet(&g1).unwrap(), g1);
        let a = IntervalTuple::new(vec![Span::new(1, 2)]);
        let b = IntervalTuple::new(vec![Span::new(0, 3)]);
        assert_eq!(a.meet(&b).unwrap(), b);
        assert!(a.meet(&g1).is_err());
    }

    #[test]
    fn subsumption_examples() {
        let ds = fig1a();
        let top = tuple(&ds, &[(0., 1.), (0., 2.)]);
        let c = tuple(&ds, &[(0., 0.), (1., 2.)]);
        assert!(top.subsumes(&c).unwrap());
        assert!(!c.subsumes(&top).unwrap());
        assert!(c.subsumes(&c).unwrap());
        let p0 = IntervalTuple::new(vec![Span::new(0, 0)]);
        let p1 = IntervalTuple::new(vec![Span::new(1, 1)]);
        assert!(!p0.subsumes(&p1).unwrap());
        assert!(p0.subsumes(&top).is_err());
    }

    #[test]
    fn extent_examples() {
        let ds = fig1a();
        assert_eq!(ds.extent_of(&tuple(&ds, &[(0., 1.), (0., 2.)])).unwrap(), ds.all_objects());
        assert_eq!(
            ds.extent_of(&tuple(&ds, &[(0., 0.), (1., 2.)])).unwrap(),
            ext(&ds, &["g2", "g3", "g4"])
        );
        assert!(ds.extent_of(&tuple(&ds, &[(0., 0.), (1., 1.)])).unwrap().is_empty());
    }

    #[test]
    fn intent_examples() {
        let ds = fig1a();
        assert_eq!(
            ds.intent_of(&ext(&ds, &["g2", "g3", "g4"])).unwrap(),
            tuple(&ds, &[(0., 0.), (1., 2.)])
        );
        assert_eq!(ds.intent_of(&ext(&ds, &["g1"])).unwrap(), tuple(&ds, &[(0., 0.), (0., 0.)]));
        assert_eq!(
            ds.intent_of(&ext(&ds, &["g1", "g6"])).unwrap(),
            tuple(&ds, &[(0., 1.), (0., 2.)])
        );
        assert_eq!(ds.intent_of(&Extent::empty(6)).unwrap_err(), Error::NoIntent);
    }

    #[test]
    fn closure_examples() {
        let ds = fig1a();
        assert_eq!(
            ds.close_extent(&ext(&ds, &["g2", "g3"])).unwrap(),
            ext(&ds, &["g2", "g3", "g4"])
        );
        assert_eq!(ds.close_extent(&ext(&ds, &["g5"])).unwrap(), ext(&ds, &["g5", "g6"]));
        let closed = ext(&ds, &["g1", "g2", "g3", "g4"]);
        assert_eq!(ds.close_extent(&closed).unwrap(), closed);
    }

    #[test]
    fn render_uses_point_shorthand() {
        let ds = fig1a();
        assert_eq!(ds.render(&tuple(&ds, &[(0., 0.), (1., 2.)])), "<0, [1, 2]>");
    }

    #[test]
    fn off_grid_values_are_rejected() {
        let ds = fig1a();
        assert!(matches!(
            ds.tuple_from_intervals(&[Interval::point(0.5), Interval::point(0.0)]),
            Err(Error::OffGrid { .. })
        ));
    }

    #[test]
    fn scanning_matches_index() {
        for seed in 0..40 {
            let indexed = crate::synthetic::small_random(seed, 150, 3, 9);
            let mut scanned = indexed.clone();
            scanned.index = vec![None; scanned.num_attributes()];
            let n = indexed.num_objects();
            let e = Extent::from_positions(n, (0..n).filter(|g| !(g * 7 + seed as usize).is_multiple_of(3)));
            if e.is_empty() {
                continue;
            }
            let d = indexed.intent_of(&e).unwrap();
            assert_eq!(d, scanned.intent_of(&e).unwrap());
            assert_eq!(indexed.extent_of(&d).unwrap(), scanned.extent_of(&d).unwrap());
            for m in 0..indexed.num_attributes() {
                for k in 0..=indexed.value_set(m).len() as u32 {
                    assert_eq!(indexed.restrict_lo(&e, m, k), scanned.restrict_lo(&e, m, k));
                    assert_eq!(indexed.restrict_hi(&e, m, k), scanned.restrict_hi(&e, m, k));
                    assert_eq!(indexed.count_lo_at_least(&e, m, k), scanned.count_lo_at_least(&e, m, k));
                    assert_eq!(indexed.count_hi_at_most(&e, m, k), scanned.count_hi_at_most(&e, m, k));
                }
            }
        }
    }
}
