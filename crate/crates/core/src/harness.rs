//! Curve-data ingestion and the `|Ш| = (1 + rank)²` consistency report.
//!
//! CSV input has a required header `label,rank,sha_order[,torsion_order][,conductor]`
//! and may contain `#` comment lines. JSON input is an array of objects with
//! the same keys.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, RowError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveRecord {
    pub label: String,
    pub rank: u32,
    pub sha_order: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conductor: Option<u64>,
}

impl CurveRecord {
    pub fn new(label: impl Into<String>, rank: u32, sha_order: u64) -> Self {
        Self {
            label: label.into(),
            rank,
            sha_order,
            torsion_order: None,
            conductor: None,
        }
    }

    /// `(1 + rank)²`
    pub fn predicted_sha(&self) -> u64 {
        let r = u64::from(self.rank) + 1;
        r * r
    }

    pub fn is_consistent(&self) -> bool {
        self.sha_order == self.predicted_sha()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guesses from the file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CurveSet {
    pub records: Vec<CurveRecord>,
    pub warnings: Vec<String>,
}

pub fn parse_curves(path: &Path, format: Format) -> Result<CurveSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_curves_str(&text, format)
}

pub fn parse_curves_str(text: &str, format: Format) -> Result<CurveSet> {
    if text.trim().is_empty() {
        return Ok(CurveSet {
            records: vec![],
            warnings: vec!["input is empty; no curve records".into()],
        });
    }
    let rows = match format {
        Format::Csv => parse_csv(text)?,
        Format::Json => parse_json(text)?,
    };
    let mut errors = vec![];
    let mut first_seen: HashMap<String, usize> = HashMap::new();
    let mut records = Vec::with_capacity(rows.len());
    for (line, record) in rows {
        match first_seen.get(&record.label) {
            Some(&prev) => errors.push(RowError {
                line,
                column: Some("label".into()),
                message: format!("duplicate label `{}` (first seen at line {prev})", record.label),
            }),
            None => {
                first_seen.insert(record.label.clone(), line);
                records.push(record);
            }
        }
    }
    if !errors.is_empty() {
        return Err(Error::Ingest(errors));
    }
    let mut warnings = vec![];
    if records.is_empty() {
        warnings.push("input has no curve records".into());
    }
    Ok(CurveSet { records, warnings })
}

const COLUMNS: [&str; 5] = ["label", "rank", "sha_order", "torsion_order", "conductor"];

fn parse_csv(text: &str) -> Result<Vec<(usize, CurveRecord)>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header_error = |message: String| Error::Ingest(vec![RowError { line: 1, column: None, message }]);
    let headers = reader
        .headers()
        .map_err(|e| header_error(e.to_string()))?
        .clone();
    let header_line = headers.position().map_or(1, |p| p.line() as usize);
    let mut index = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        if !COLUMNS.contains(&h) {
            return Err(Error::Ingest(vec![RowError {
                line: header_line,
                column: Some(h.into()),
                message: format!("unknown column (expected {})", COLUMNS.join(",")),
            }]));
        }
        if index.insert(h.to_string(), i).is_some() {
            return Err(Error::Ingest(vec![RowError {
                line: header_line,
                column: Some(h.into()),
                message: "column appears twice".into(),
            }]));
        }
    }
    for required in &COLUMNS[..3] {
        if !index.contains_key(*required) {
            return Err(Error::Ingest(vec![RowError {
                line: header_line,
                column: Some((*required).into()),
                message: "required column missing from header".into(),
            }]));
        }
    }

    let mut rows = vec![];
    let mut errors = vec![];
    for result in reader.records() {
        let row = match result {
            Ok(row) => row,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                errors.push(RowError { line, column: None, message: e.to_string() });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() != headers.len() {
            errors.push(RowError {
                line,
                column: None,
                message: format!("expected {} fields, found {}", headers.len(), row.len()),
            });
            continue;
        }
        let get = |name: &str| index.get(name).and_then(|&i| row.get(i)).filter(|s| !s.is_empty());
        match build_record(line, &get) {
            Ok(r) => rows.push((line, r)),
            Err(mut es) => errors.append(&mut es),
        }
    }
    if errors.is_empty() {
        Ok(rows)
    } else {
        Err(Error::Ingest(errors))
    }
}

fn build_record<'a>(line: usize, get: &dyn Fn(&str) -> Option<&'a str>) -> std::result::Result<CurveRecord, Vec<RowError>> {
    let mut errors = vec![];
    let mut fail = |column: &str, message: String| {
        errors.push(RowError { line, column: Some(column.into()), message });
    };
    let label = get("label").unwrap_or_default().to_string();
    if label.is_empty() {
        fail("label", "label must be nonempty".into());
    }
    let mut int = |column: &str, min: i128| -> Option<Option<i128>> {
        let raw = get(column)?;
        match raw.parse::<i128>() {
            Ok(v) if v < min => {
                fail(column, format!("{column} must be >= {min}, got {v}"));
                Some(None)
            }
            Ok(v) => Some(Some(v)),
            Err(_) => {
                fail(column, format!("`{raw}` is not a base-10 integer"));
                Some(None)
            }
        }
    };
    let rank = int("rank", 0);
    let sha = int("sha_order", 1);
    let torsion = int("torsion_order", 1);
    let conductor = int("conductor", 1);
    let mut out_of_range = vec![];
    let rank = narrow::<u32>(rank, "rank", &mut out_of_range);
    let sha = narrow::<u64>(sha, "sha_order", &mut out_of_range);
    let torsion = narrow::<u64>(torsion, "torsion_order", &mut out_of_range);
    let conductor = narrow::<u64>(conductor, "conductor", &mut out_of_range);
    for col in out_of_range {
        fail(col, format!("{col} is out of range"));
    }
    for (col, v) in [("rank", rank.is_some()), ("sha_order", sha.is_some())] {
        if !v && get(col).is_none() {
            fail(col, format!("{col} is required"));
        }
    }
    match (rank.flatten(), sha.flatten()) {
        (Some(rank), Some(sha_order)) if errors.is_empty() => Ok(CurveRecord {
            label,
            rank,
            sha_order,
            torsion_order: torsion.flatten(),
            conductor: conductor.flatten(),
        }),
        _ => Err(errors),
    }
}

/// `None` = absent, `Some(None)` = present but rejected.
fn narrow<T: TryFrom<i128>>(v: Option<Option<i128>>, col: &'static str, bad: &mut Vec<&'static str>) -> Option<Option<T>> {
    v.map(|v| {
        v.and_then(|v| match T::try_from(v) {
            Ok(t) => Some(t),
            Err(_) => {
                bad.push(col);
                None
            }
        })
    })
}

fn parse_json(text: &str) -> Result<Vec<(usize, CurveRecord)>> {
    let values: Vec<serde_json::Map<String, serde_json::Value>> =
        serde_json::from_str(text).map_err(|e| {
            Error::Ingest(vec![RowError {
                line: e.line(),
                column: Some(format!("char {}", e.column())),
                message: format!("malformed JSON: {e}"),
            }])
        })?;
    let mut rows = vec![];
    let mut errors = vec![];
    for (i, obj) in values.iter().enumerate() {
        let idx = i + 1;
        if let Some(k) = obj.keys().find(|k| !COLUMNS.contains(&k.as_str())) {
            errors.push(RowError { line: idx, column: Some(k.clone()), message: "unknown key".into() });
            continue;
        }
        let mut texts = HashMap::new();
        let mut bad_type = false;
        for (k, v) in obj {
            let s = match v {
                serde_json::Value::String(s) if k == "label" => s.clone(),
                serde_json::Value::Number(n) if k != "label" => n.to_string(),
                serde_json::Value::Null if k != "label" => continue,
                _ => {
                    let expected = if k == "label" { "a string" } else { "an integer" };
                    errors.push(RowError { line: idx, column: Some(k.clone()), message: format!("expected {expected}") });
                    bad_type = true;
                    continue;
                }
            };
            texts.insert(k.as_str(), s);
        }
        if bad_type {
            continue;
        }
        let get = |name: &str| texts.get(name).map(String::as_str);
        match build_record(idx, &get) {
            Ok(r) => rows.push((idx, r)),
            Err(mut es) => errors.append(&mut es),
        }
    }
    if errors.is_empty() {
        Ok(rows)
    } else {
        Err(Error::Ingest(errors))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankTally {
    pub total: u64,
    pub consistent: u64,
    pub violations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationRow {
    pub label: String,
    pub rank: u32,
    pub sha_order: u64,
    pub predicted: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub total: u64,
    pub consistent: u64,
    pub violations: u64,
    /// Sorted by label.
    pub violation_rows: Vec<ViolationRow>,
    pub by_rank: BTreeMap<u32, RankTally>,
}

impl ValidationReport {
    fn add(&mut self, r: &CurveRecord) {
        let tally = self.by_rank.entry(r.rank).or_default();
        self.total += 1;
        tally.total += 1;
        if r.is_consistent() {
            self.consistent += 1;
            tally.consistent += 1;
        } else {
            self.violations += 1;
            tally.violations += 1;
            self.violation_rows.push(ViolationRow {
                label: r.label.clone(),
                rank: r.rank,
                sha_order: r.sha_order,
                predicted: r.predicted_sha(),
            });
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.total += other.total;
        self.consistent += other.consistent;
        self.violations += other.violations;
        self.violation_rows.extend(other.violation_rows);
        for (rank, t) in other.by_rank {
            let mine = self.by_rank.entry(rank).or_default();
            mine.total += t.total;
            mine.consistent += t.consistent;
            mine.violations += t.violations;
        }
        self
    }

    fn finish(mut self) -> Self {
        self.violation_rows
            .sort_by(|a, b| a.label.cmp(&b.label).then_with(|| (a.rank, a.sha_order).cmp(&(b.rank, b.sha_order))));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub fn validate(records: &[CurveRecord]) -> ValidationReport {
    let mut report = ValidationReport::default();
    for r in records {
        report.add(r);
    }
    report.finish()
}

/// [`validate`] fanned out over `jobs` worker threads; the merged report
/// equals the serial one.
pub fn validate_parallel(records: &[CurveRecord], jobs: usize) -> Result<ValidationReport> {
    let jobs = jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
    let chunk = records.len().div_ceil(jobs).max(1);
    let report = pool.install(|| {
        records
            .par_chunks(chunk)
            .map(|part| {
                let mut r = ValidationReport::default();
                part.iter().for_each(|c| r.add(c));
                r
            })
            .reduce(ValidationReport::default, ValidationReport::merge)
    });
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn csv(text: &str) -> Result<CurveSet> {
        parse_curves_str(text, Format::Csv)
    }

    fn ingest_errors(r: Result<CurveSet>) -> Vec<RowError> {
        match r {
            Err(Error::Ingest(es)) => es,
            other => panic!("expected ingest errors, got {other:?}"),
        }
    }

    #[test]
    fn minimal_csv() {
        let set = csv("label,rank,sha_order\n11a1,0,1").unwrap();
        assert_eq!(set.records, vec![CurveRecord::new("11a1", 0, 1)]);
        assert!(set.warnings.is_empty());
    }

    #[test]
    fn optional_columns_and_comments() {
        let text = "# sample\nlabel,rank,sha_order,torsion_order,conductor\n# a comment\n11a1,0,1,5,11\n37a1,1,1,,37\n";
        let set = csv(text).unwrap();
        assert_eq!(set.records[0].torsion_order, Some(5));
        assert_eq!(set.records[0].conductor, Some(11));
        assert_eq!(set.records[1].torsion_order, None);
        assert_eq!(set.records[1].conductor, Some(37));
    }

    #[test]
    fn negative_rank_reports_line() {
        let es = ingest_errors(csv("label,rank,sha_order\n11a1,0,1\n37a1,-1,1\n"));
        assert_eq!(es.len(), 1);
        assert_eq!(es[0].line, 3);
        assert_eq!(es[0].column.as_deref(), Some("rank"));
    }

    #[test]
    fn bad_sha_and_garbage() {
        let es = ingest_errors(csv("label,rank,sha_order\na,0,0\nb,x,1\nc,1\n"));
        assert_eq!(es.len(), 3);
        assert_eq!((es[0].line, es[0].column.as_deref()), (2, Some("sha_order")));
        assert_eq!((es[1].line, es[1].column.as_deref()), (3, Some("rank")));
        assert_eq!((es[2].line, es[2].column.as_deref()), (4, None));
    }

    #[test]
    fn duplicates_rejected() {
        let es = ingest_errors(csv("label,rank,sha_order\n11a1,0,1\n11a1,0,1\n"));
        assert_eq!(es[0].line, 3);
        assert!(es[0].message.contains("duplicate"));
    }

    #[test]
    fn header_required() {
        let es = ingest_errors(csv("11a1,0,1\n"));
        assert_eq!(es[0].line, 1);
        let es = ingest_errors(csv("label,rank\n11a1,0\n"));
        assert_eq!(es[0].column.as_deref(), Some("sha_order"));
    }

    #[test]
    fn empty_input_warns() {
        let set = csv("").unwrap();
        assert!(set.records.is_empty());
        assert_eq!(set.warnings.len(), 1);
        let set = parse_curves_str("[]", Format::Json).unwrap();
        assert!(set.records.is_empty());
        assert_eq!(set.warnings.len(), 1);
    }

    #[test]
    fn json_input() {
        let set = parse_curves_str(
            r#"[{"label":"11a1","rank":0,"sha_order":1,"conductor":11},{"label":"571a1","rank":0,"sha_order":4}]"#,
            Format::Json,
        )
        .unwrap();
        assert_eq!(set.records.len(), 2);
        assert_eq!(set.records[0].conductor, Some(11));
        let es = ingest_errors(parse_curves_str(r#"[{"label":"a","rank":0,"sha_order":1},{"label":"b","rank":-2,"sha_order":1}]"#, Format::Json));
        assert_eq!((es[0].line, es[0].column.as_deref()), (2, Some("rank")));
        let es = ingest_errors(parse_curves_str("[{", Format::Json));
        assert_eq!(es.len(), 1);
    }

    #[test]
    fn validation_examples() {
        let records = vec![
            CurveRecord::new("a", 0, 1),
            CurveRecord::new("b", 1, 4),
            CurveRecord::new("c", 1, 1),
        ];
        let report = validate(&records);
        assert_eq!((report.total, report.consistent, report.violations), (3, 2, 1));
        assert_eq!(
            report.violation_rows,
            vec![ViolationRow { label: "c".into(), rank: 1, sha_order: 1, predicted: 4 }]
        );
        assert_eq!(report.by_rank[&0], RankTally { total: 1, consistent: 1, violations: 0 });
        assert_eq!(report.by_rank[&1], RankTally { total: 2, consistent: 1, violations: 1 });
    }

    fn arb_records() -> impl Strategy<Value = Vec<CurveRecord>> {
        prop::collection::vec((0u32..4, 1u64..20), 0..60).prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (rank, sha))| CurveRecord::new(format!("c{i}"), rank, sha))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn aggregates_add_up(records in arb_records()) {
            let r = validate(&records);
            prop_assert_eq!(r.consistent + r.violations, r.total);
            prop_assert_eq!(r.total as usize, records.len());
            prop_assert_eq!(r.by_rank.values().map(|t| t.total).sum::<u64>(), r.total);
            prop_assert_eq!(r.violation_rows.len() as u64, r.violations);
        }

        #[test]
        fn order_independent(records in arb_records(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut shuffled = records.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(validate(&records), validate(&shuffled));
        }

        #[test]
        fn parallel_matches_serial(records in arb_records(), jobs in 1usize..6) {
            let serial = validate(&records).to_json();
            prop_assert_eq!(validate_parallel(&records, jobs).unwrap().to_json(), serial);
        }
    }
}
