//! Dataset cleaning and value joining.
//!
//! Joining merges runs of close values on each attribute: with `δ_max` the
//! largest gap between consecutive distinct values and `β = γ·δ_max`,
//! consecutive values closer than `β` end up in the same run, and every value
//! is replaced by the hull `[run_min, run_max]` of its run.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{Dataset, Interval};
use crate::io::{RawCell, RawTable};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeSimplification {
    pub attribute: String,
    pub delta_max: f64,
    pub beta: f64,
    /// Hull of every run, in increasing order.
    pub groups: Vec<(f64, f64)>,
    pub values_before: usize,
    pub values_after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplificationReport {
    pub gamma: f64,
    pub attributes: Vec<AttributeSimplification>,
}

/// Splits sorted distinct values into runs whose consecutive gaps are `< beta`.
/// Returns, for each value, the index of its run, and the hull of each run.
fn runs(values: &[f64], beta: f64) -> (Vec<usize>, Vec<(f64, f64)>) {
    let mut run_of = Vec::with_capacity(values.len());
    let mut hulls: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if i > 0 && v - values[i - 1] < beta {
            hulls.last_mut().expect("run started").1 = v;
        } else {
            hulls.push((v, v));
        }
        run_of.push(hulls.len() - 1);
    }
    (run_of, hulls)
}

/// Joins close values on every attribute. `gamma` must lie in `(0, 1)`.
pub fn simplify(ds: &Dataset, gamma: f64) -> Result<(Dataset, SimplificationReport)> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let mut report = SimplificationReport { gamma, attributes: Vec::new() };
    let mut columns: Vec<Vec<Interval>> = Vec::with_capacity(ds.num_attributes());
    for m in 0..ds.num_attributes() {
        let values = ds.value_set(m).values();
        let delta_max = values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let beta = gamma * delta_max;
        let (run_of, hulls) = runs(values, beta);
        let column: Vec<Interval> = (0..ds.num_objects())
            .map(|g| Interval {
                lo: hulls[run_of[ds.lo_index(m, g) as usize]].0,
                hi: hulls[run_of[ds.hi_index(m, g) as usize]].1,
            })
            .collect();
        let mut after: Vec<f64> = column.iter().flat_map(|iv| [iv.lo, iv.hi]).collect();
        after.sort_by(f64::total_cmp);
        after.dedup();
        report.attributes.push(AttributeSimplification {
            attribute: ds.attributes()[m].clone(),
            delta_max,
            beta,
            groups: hulls,
            values_before: values.len(),
            values_after: after.len(),
        });
        columns.push(column);
    }
    let rows = (0..ds.num_objects())
        .map(|g| (ds.object_id(g).to_string(), columns.iter().map(|c| c[g]).collect()))
        .collect();
    let simplified = Dataset::build(rows, ds.attributes().to_vec())?;
    Ok((simplified, report))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CleaningReport {
    pub removed_columns: Vec<String>,
    pub removed_rows: usize,
}

/// Removes categorical columns (any non-numeric cell), then every row that
/// still has a missing cell.
pub fn drop_incomplete(table: RawTable) -> Result<(RawTable, CleaningReport)> {
    let RawTable { attributes, ids, rows } = table;
    let keep: Vec<bool> = (0..attributes.len())
        .map(|c| !rows.iter().any(|r| matches!(r[c], RawCell::Text(_))))
        .collect();
    let mut report = CleaningReport {
        removed_columns: attributes
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| !k)
            .map(|(a, _)| a.clone())
            .collect(),
        removed_rows: 0,
    };
    let attributes: Vec<String> =
        attributes.into_iter().zip(&keep).filter(|(_, &k)| k).map(|(a, _)| a).collect();

    let mut out_ids = Vec::with_capacity(ids.len());
    let mut out_rows = Vec::with_capacity(rows.len());
    for (id, row) in ids.into_iter().zip(rows) {
        let row: Vec<RawCell> = row.into_iter().zip(&keep).filter(|(_, &k)| k).map(|(c, _)| c).collect();
        if row.iter().any(|c| matches!(c, RawCell::Missing)) {
            report.removed_rows += 1;
            continue;
        }
        out_ids.push(id);
        out_rows.push(row);
    }
    if out_rows.is_empty() || attributes.is_empty() {
        return Err(Error::EmptyAfterCleaning);
    }
    Ok((RawTable { attributes, ids: out_ids, rows: out_rows }, report))
}
