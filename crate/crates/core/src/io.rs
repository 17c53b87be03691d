//! Reading interval tables and writing mined patterns.
//!
//! Input is UTF-8 delimited text (comma or semicolon, detected from the header
//! line). The header names the attributes. A cell is a number (a point
//! interval), `lo..hi` (an interval), or `?` (missing). Any other text marks
//! the column as categorical. The first column holds object ids when its
//! header is empty or one of `id`, `object`, `obj`, `name`.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{Dataset, Interval};
use crate::sofia::{MinedPattern, PatternSet};

#[derive(Debug, Clone, PartialEq)]
pub enum RawCell {
    Missing,
    Value(Interval),
    Text(String),
}

/// A parsed table before cleaning.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub attributes: Vec<String>,
    pub ids: Vec<String>,
    pub rows: Vec<Vec<RawCell>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum IdColumn {
    /// Decide from the first header cell.
    #[default]
    Auto,
    Present,
    Absent,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub id_column: IdColumn,
    /// Overrides delimiter detection.
    pub delimiter: Option<u8>,
}

const ID_HEADERS: [&str; 5] = ["", "id", "object", "obj", "name"];

fn detect_delimiter(text: &str) -> u8 {
    let header = text.lines().next().unwrap_or("");
    if header.matches(';').count() > header.matches(',').count() {
        b';'
    } else {
        b','
    }
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses one cell; `row` and `column` are 1-based coordinates for errors.
pub fn parse_cell(raw: &str, row: usize, column: usize) -> Result<RawCell> {
    let s = raw.trim();
    if s.is_empty() || s == "?" {
        return Ok(RawCell::Missing);
    }
    if let Some(v) = parse_number(s) {
        return Ok(RawCell::Value(Interval::point(v)));
    }
    if let Some((a, b)) = s.split_once("..") {
        let err = |message: String| Error::Parse { row, column, message };
        let lo = parse_number(a.trim()).ok_or_else(|| err(format!("bad lower endpoint in `{s}`")))?;
        let hi = parse_number(b.trim()).ok_or_else(|| err(format!("bad upper endpoint in `{s}`")))?;
        if lo > hi {
            return Err(err(format!("interval `{s}` has lower endpoint above upper endpoint")));
        }
        return Ok(RawCell::Value(Interval { lo, hi }));
    }
    Ok(RawCell::Text(s.to_string()))
}

pub fn parse_str(text: &str, opts: ParseOptions) -> Result<RawTable> {
    let delimiter = opts.delimiter.unwrap_or_else(|| detect_delimiter(text));
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse { row: 1, column: 1, message: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    let has_ids = match opts.id_column {
        IdColumn::Present => true,
        IdColumn::Absent => false,
        IdColumn::Auto => header
            .first()
            .is_some_and(|h| ID_HEADERS.contains(&h.to_ascii_lowercase().as_str())),
    };
    let skip = usize::from(has_ids);
    let attributes: Vec<String> = header.iter().skip(skip).cloned().collect();
    if attributes.is_empty() {
        return Err(Error::Parse { row: 1, column: 1, message: "no attribute columns".into() });
    }

    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Parse { row, column: 1, message: e.to_string() })?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        if record.len() != header.len() {
            return Err(Error::Parse {
                row,
                column: record.len().min(header.len()) + 1,
                message: format!("expected {} cells, found {}", header.len(), record.len()),
            });
        }
        ids.push(if has_ids { record[0].to_string() } else { format!("g{}", rows.len() + 1) });
        let cells = record
            .iter()
            .enumerate()
            .skip(skip)
            .map(|(c, cell)| parse_cell(cell, row, c + 1))
            .collect::<Result<Vec<_>>>()?;
        rows.push(cells);
    }
    Ok(RawTable { attributes, ids, rows })
}

pub fn parse_input<R: Read>(mut input: R, opts: ParseOptions) -> Result<RawTable> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    parse_str(&text, opts)
}

pub fn parse_path(path: &Path, opts: ParseOptions) -> Result<RawTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_input(std::io::BufReader::new(file), opts)
}

impl RawTable {
    /// Builds the dataset; every cell must hold a value.
    pub fn into_dataset(self) -> Result<Dataset> {
        let RawTable { attributes, ids, rows } = self;
        let mut out = Vec::with_capacity(rows.len());
        for (r, (id, row)) in ids.into_iter().zip(rows).enumerate() {
            let mut ivs = Vec::with_capacity(row.len());
            for (c, cell) in row.into_iter().enumerate() {
                match cell {
                    RawCell::Value(iv) => ivs.push(iv),
                    RawCell::Missing => {
                        return Err(Error::Parse { row: r + 2, column: c + 1, message: "missing value".into() })
                    }
                    RawCell::Text(t) => {
                        return Err(Error::Parse {
                            row: r + 2,
                            column: c + 1,
                            message: format!("non-numeric value `{t}`"),
                        })
                    }
                }
            }
            out.push((id, ivs));
        }
        Dataset::build(out, attributes)
    }
}

fn format_cell(iv: &Interval) -> String {
    if iv.is_point() {
        format!("{}", iv.lo)
    } else {
        format!("{}..{}", iv.lo, iv.hi)
    }
}

/// Writes a dataset in the input format, with an `id` column.
pub fn write_dataset(ds: &Dataset) -> String {
    let mut out = String::new();
    out.push_str("id");
    for a in ds.attributes() {
        out.push(',');
        out.push_str(a);
    }
    out.push('\n');
    for g in 0..ds.num_objects() {
        out.push_str(ds.object_id(g));
        for iv in ds.to_intervals(&ds.description(g)) {
            out.push(',');
            out.push_str(&format_cell(&iv));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub parse_ms: f64,
    pub preprocess_ms: f64,
    pub mine_ms: f64,
}

/// Side-by-side numbers of a Sofia best-Δ run and the postfiltered baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub delta: usize,
    pub patterns: usize,
    /// Support threshold the baseline needs to see every best pattern.
    pub min_support: usize,
    pub baseline_emitted: usize,
    pub baseline_interrupted: bool,
    pub sofia_peak_patterns: usize,
    pub agree: bool,
}

/// Run metadata written ahead of the pattern records.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunHeader {
    pub engine: String,
    pub theta: Option<usize>,
    pub best_mode: bool,
    pub gamma: Option<f64>,
    pub objects: usize,
    pub attributes: usize,
    pub schedule: Option<String>,
    pub chain_length: usize,
    pub patterns_per_step: Vec<usize>,
    pub min_support: Option<usize>,
    pub interrupted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternRecord {
    pub extent: Vec<String>,
    pub intent: Vec<Interval>,
    pub support: usize,
    pub delta: Option<usize>,
}

impl PatternRecord {
    pub fn new(p: &MinedPattern, ds: &Dataset) -> Self {
        PatternRecord {
            extent: ds.extent_ids(&p.extent),
            intent: ds.to_intervals(&p.intent),
            support: p.support(),
            delta: p.delta(),
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    header: &'a RunHeader,
    patterns: Vec<PatternRecord>,
}

fn header_lines(h: &RunHeader) -> Vec<(String, String)> {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".to_string());
    let mut lines = vec![
        ("engine".into(), h.engine.clone()),
        ("theta".into(), opt(h.theta.map(|t| t.to_string()))),
        ("best_mode".into(), h.best_mode.to_string()),
        ("gamma".into(), opt(h.gamma.map(|g| g.to_string()))),
        ("objects".into(), h.objects.to_string()),
        ("attributes".into(), h.attributes.to_string()),
        ("schedule".into(), opt(h.schedule.clone())),
        ("chain_length".into(), h.chain_length.to_string()),
        (
            "patterns_per_step".into(),
            h.patterns_per_step.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
        ),
        ("min_support".into(), opt(h.min_support.map(|s| s.to_string()))),
        ("interrupted".into(), h.interrupted.to_string()),
    ];
    if let Some(c) = &h.comparison {
        lines.push((
            "comparison".into(),
            format!(
                "delta={} patterns={} min_support={} baseline_emitted={} baseline_interrupted={} sofia_peak={} agree={}",
                c.delta, c.patterns, c.min_support, c.baseline_emitted, c.baseline_interrupted,
                c.sofia_peak_patterns, c.agree
            ),
        ));
    }
    if let Some(t) = &h.timings {
        lines.push((
            "timings_ms".into(),
            format!("parse={:.3} preprocess={:.3} mine={:.3}", t.parse_ms, t.preprocess_ms, t.mine_ms),
        ));
    }
    lines
}

/// Serializes a pattern set in report order (descending Δ, then descending
/// support, then lexicographic extent).
pub fn serialize_patterns(ds: &Dataset, set: &PatternSet, header: &RunHeader, format: OutputFormat) -> String {
    let records: Vec<PatternRecord> =
        set.sorted_for_report().into_iter().map(|p| PatternRecord::new(p, ds)).collect();
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&Report { header, patterns: records })
                .expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut s = String::new();
            for (k, v) in header_lines(header) {
                let _ = writeln!(s, "# {k}: {v}");
            }
            s.push_str("delta,support,extent,intent\n");
            for r in &records {
                let intent: Vec<String> = r.intent.iter().map(format_cell).collect();
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    r.delta.map(|d| d.to_string()).unwrap_or_default(),
                    r.support,
                    r.extent.join(" "),
                    intent.join(";")
                );
            }
            s
        }
        OutputFormat::Text => {
            let mut s = String::new();
            for (k, v) in header_lines(header) {
                let _ = writeln!(s, "{k:>18}: {v}");
            }
            let _ = writeln!(s, "{:>18}: {}", "patterns", records.len());
            for r in &records {
                let intent: Vec<String> = r.intent.iter().map(|iv| iv.to_string()).collect();
                let _ = writeln!(
                    s,
                    "delta={:<4} support={:<6} {{{}}} <{}>",
                    r.delta.map(|d| d.to_string()).unwrap_or_else(|| "-".into()),
                    r.support,
                    r.extent.join(","),
                    intent.join(", ")
                );
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig1a, FIG1A_CSV};
    use crate::projection::ScheduleStrategy;
    use crate::sofia::sofia_run;

    #[test]
    fn cell_syntax() {
        assert_eq!(parse_cell("1..2", 1, 1).unwrap(), RawCell::Value(Interval { lo: 1.0, hi: 2.0 }));
        assert_eq!(parse_cell("0", 1, 1).unwrap(), RawCell::Value(Interval::point(0.0)));
        assert_eq!(parse_cell(" -1.5 .. 2e1 ", 1, 1).unwrap(), RawCell::Value(Interval { lo: -1.5, hi: 20.0 }));
        assert_eq!(parse_cell("?", 1, 1).unwrap(), RawCell::Missing);
        assert_eq!(parse_cell("red", 1, 1).unwrap(), RawCell::Text("red".into()));
        assert!(matches!(parse_cell("3..1", 4, 2), Err(Error::Parse { row: 4, column: 2, .. })));
        assert!(matches!(parse_cell("1..x", 5, 3), Err(Error::Parse { row: 5, column: 3, .. })));
    }

    #[test]
    fn parses_fixture() {
        let ds = parse_str(FIG1A_CSV, ParseOptions::default()).unwrap().into_dataset().unwrap();
        let reference = fig1a();
        assert_eq!(ds.object_ids(), reference.object_ids());
        assert_eq!(ds.attributes(), reference.attributes());
        for g in 0..6 {
            assert_eq!(ds.description(g), reference.description(g));
        }
    }

    #[test]
    fn semicolons_and_generated_ids() {
        let t = parse_str("a;b\n1;2..3\n4;?\n", ParseOptions::default()).unwrap();
        assert_eq!(t.attributes, vec!["a", "b"]);
        assert_eq!(t.ids, vec!["g1", "g2"]);
        assert_eq!(t.rows[1][1], RawCell::Missing);
        assert!(matches!(t.into_dataset(), Err(Error::Parse { row: 3, column: 2, .. })));
    }

    #[test]
    fn ragged_rows_are_reported() {
        let err = parse_str("id,a,b\nx,1,2\ny,1\n", ParseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 3, .. }));
    }

    #[test]
    fn dataset_round_trip() {
        let ds = fig1a();
        let text = write_dataset(&ds);
        assert_eq!(text, FIG1A_CSV);
        let back = parse_str(&text, ParseOptions::default()).unwrap().into_dataset().unwrap();
        assert_eq!(write_dataset(&back), text);
    }

    #[test]
    fn serializes_in_report_order() {
        let ds = fig1a();
        let set = sofia_run(&ds, 2, ScheduleStrategy::RoundRobin).unwrap();
        let header = RunHeader { engine: "sofia".into(), theta: Some(2), ..Default::default() };
        let text = serialize_patterns(&ds, &set, &header, OutputFormat::Csv);
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(
            rows,
            vec![
                "delta,support,extent,intent",
                "2,6,g1 g2 g3 g4 g5 g6,0..1;0..2",
                "2,3,g2 g3 g4,0;1..2",
                "2,2,g5 g6,1;0..2",
            ]
        );
        let json: serde_json::Value =
            serde_json::from_str(&serialize_patterns(&ds, &set, &header, OutputFormat::Json)).unwrap();
        assert_eq!(json["patterns"].as_array().unwrap().len(), 3);
        assert_eq!(json["header"]["theta"], 2);
        let txt = serialize_patterns(&ds, &set, &header, OutputFormat::Text);
        assert!(txt.contains("{g2,g3,g4} <0, [1, 2]>"));
    }
}
