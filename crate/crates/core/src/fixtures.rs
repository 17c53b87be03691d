//! Small reference datasets and helpers for building extents and
//! descriptions by name.

use crate::extent::Extent;
use crate::interval::{Dataset, Interval, IntervalTuple};

/// Six objects over two attributes:
///
/// ```text
///      m1  m2
/// g1   0   0
/// g2   0   [1,2]
/// g3   0   [1,2]
/// g4   0   2
/// g5   1   [0,2]
/// g6   1   [0,2]
/// ```
pub fn fig1a() -> Dataset {
    let p = Interval::point;
    let iv = |a, b| Interval::new(a, b).expect("valid interval");
    let rows = vec![
        ("g1".to_string(), vec![p(0.0), p(0.0)]),
        ("g2".to_string(), vec![p(0.0), iv(1.0, 2.0)]),
        ("g3".to_string(), vec![p(0.0), iv(1.0, 2.0)]),
        ("g4".to_string(), vec![p(0.0), p(2.0)]),
        ("g5".to_string(), vec![p(1.0), iv(0.0, 2.0)]),
        ("g6".to_string(), vec![p(1.0), iv(0.0, 2.0)]),
    ];
    Dataset::build(rows, vec!["m1".to_string(), "m2".to_string()]).expect("fixture is valid")
}

/// The same table in the CSV input format.
pub const FIG1A_CSV: &str = "id,m1,m2\n\
g1,0,0\n\
g2,0,1..2\n\
g3,0,1..2\n\
g4,0,2\n\
g5,1,0..2\n\
g6,1,0..2\n";

/// Extent from object ids. Panics on unknown ids.
pub fn ext(ds: &Dataset, ids: &[&str]) -> Extent {
    Extent::from_positions(
        ds.num_objects(),
        ids.iter().map(|id| ds.position_of(id).unwrap_or_else(|| panic!("unknown object {id}"))),
    )
}

/// Extent from the compact digit notation, e.g. `"234"` for `{g2, g3, g4}`.
pub fn ext_digits(ds: &Dataset, digits: &str) -> Extent {
    let ids: Vec<String> = digits.chars().map(|c| format!("g{c}")).collect();
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    ext(ds, &refs)
}

/// Description from real `(lo, hi)` pairs. Panics if a value is off-grid.
pub fn tuple(ds: &Dataset, pairs: &[(f64, f64)]) -> IntervalTuple {
    let ivs: Vec<Interval> = pairs.iter().map(|&(lo, hi)| Interval { lo, hi }).collect();
    ds.tuple_from_intervals(&ivs).expect("description on the dataset grid")
}

/// Compact digit notation of an extent over `g1..g9` style ids.
pub fn digits(ds: &Dataset, e: &Extent) -> String {
    e.iter().map(|g| ds.object_id(g).trim_start_matches('g').to_string()).collect()
}
