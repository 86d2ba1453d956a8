//! Regression runner: every `*.json` task in a directory is executed and
//! diffed against its `*.expected.json` side file. Exact fields must match
//! exactly; floats are compared within a tolerance. Tasks run concurrently
//! when the parallel feature is on; the table is always in filename order.

use crate::report::to_report_bytes;
use crate::task::{resolve_settings, TaskFile, SCHEMA_VERSION};
use crate::run::run_task;
use serde_json::Value;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Skip,
    Fail,
}

#[derive(Clone, Debug)]
pub struct FileOutcome {
    pub name: String,
    pub status: Status,
    pub detail: Option<String>,
}

#[derive(Debug, Default)]
pub struct CorpusSummary {
    pub outcomes: Vec<FileOutcome>,
}

impl CorpusSummary {
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for o in &self.outcomes {
            match o.status {
                Status::Pass => c.0 += 1,
                Status::Skip => c.1 += 1,
                Status::Fail => c.2 += 1,
            }
        }
        c
    }

    pub fn all_ok(&self) -> bool {
        self.outcomes.iter().all(|o| o.status != Status::Fail)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let tag = match o.status {
                Status::Pass => "PASS",
                Status::Skip => "SKIP",
                Status::Fail => "FAIL",
            };
            match &o.detail {
                Some(d) => writeln!(out, "{tag}  {}  ({d})", o.name).unwrap(),
                None => writeln!(out, "{tag}  {}", o.name).unwrap(),
            }
        }
        let (p, s, f) = self.counts();
        writeln!(out, "{p} passed, {s} skipped, {f} failed").unwrap();
        out
    }
}

/// Relative difference check used for float leaves.
fn floats_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1.0_f64.max(a.abs()).max(b.abs())
}

/// First mismatch between two JSON trees, as a path plus description.
/// Integer-valued numbers on both sides compare exactly; anything float
/// compares within the tolerance.
fn first_diff(path: &str, expected: &Value, actual: &Value, tol: f64) -> Option<String> {
    match (expected, actual) {
        (Value::Number(e), Value::Number(a)) => {
            if let (Some(ei), Some(ai)) = (e.as_i64(), a.as_i64()) {
                if ei == ai {
                    return None;
                }
                return Some(format!("{path}: expected {ei}, got {ai}"));
            }
            if let (Some(eu), Some(au)) = (e.as_u64(), a.as_u64()) {
                if eu == au {
                    return None;
                }
                return Some(format!("{path}: expected {eu}, got {au}"));
            }
            let (ef, af) = (e.as_f64(), a.as_f64());
            match (ef, af) {
                (Some(ef), Some(af)) if floats_close(ef, af, tol) => None,
                _ => Some(format!("{path}: expected {e}, got {a}")),
            }
        }
        (Value::Array(e), Value::Array(a)) => {
            if e.len() != a.len() {
                return Some(format!("{path}: length {} vs {}", e.len(), a.len()));
            }
            for (i, (ev, av)) in e.iter().zip(a).enumerate() {
                if let Some(d) = first_diff(&format!("{path}[{i}]"), ev, av, tol) {
                    return Some(d);
                }
            }
            None
        }
        (Value::Object(e), Value::Object(a)) => {
            for key in e.keys() {
                if !a.contains_key(key) {
                    return Some(format!("{path}.{key}: missing in actual"));
                }
            }
            for key in a.keys() {
                if !e.contains_key(key) {
                    return Some(format!("{path}.{key}: unexpected in actual"));
                }
            }
            for (key, ev) in e {
                if let Some(d) = first_diff(&format!("{path}.{key}"), ev, &a[key], tol) {
                    return Some(d);
                }
            }
            None
        }
        _ => {
            if expected == actual {
                None
            } else {
                Some(format!("{path}: expected {expected}, got {actual}"))
            }
        }
    }
}

fn expected_path(task_path: &Path) -> PathBuf {
    task_path.with_extension("expected.json")
}

fn is_task_file(p: &Path) -> bool {
    let Some(name) = p.file_name().and_then(|n| n.to_str()) else {
        return false;
    };
    name.ends_with(".json") && !name.ends_with(".expected.json")
}

fn run_one(task_path: &Path, tol: f64) -> FileOutcome {
    let name = task_path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("<non-utf8 name>")
        .to_string();
    let fail = |detail: String| FileOutcome {
        name: name.clone(),
        status: Status::Fail,
        detail: Some(detail),
    };

    let expectation = expected_path(task_path);
    if !expectation.exists() {
        return FileOutcome {
            name,
            status: Status::Skip,
            detail: Some("no expectation file".to_string()),
        };
    }

    let raw = match fs::read_to_string(task_path) {
        Ok(r) => r,
        Err(e) => return fail(format!("read: {e}")),
    };
    let task: TaskFile = match serde_json::from_str(&raw) {
        Ok(t) => t,
        Err(e) => return fail(format!("task parse: {e}")),
    };
    if task.version != SCHEMA_VERSION {
        return fail(format!("unsupported version {:?}", task.version));
    }
    let settings = resolve_settings(None, None, &task.options);
    let report = match run_task(&task, &settings) {
        Ok(r) => r,
        Err(e) => return fail(format!("exit {}: {}", e.exit_code(), e.message())),
    };
    let expected_raw = match fs::read_to_string(&expectation) {
        Ok(r) => r,
        Err(e) => return fail(format!("expectation read: {e}")),
    };
    let expected: Value = match serde_json::from_str(&expected_raw) {
        Ok(v) => v,
        Err(e) => return fail(format!("expectation parse: {e}")),
    };
    // Reserialize through the canonical writer so the comparison sees what
    // a fresh run would have written.
    let actual: Value = serde_json::from_slice(&to_report_bytes(&report)).expect("own output");
    match first_diff("$", &expected, &actual, tol) {
        None => FileOutcome { name, status: Status::Pass, detail: None },
        Some(d) => fail(d),
    }
}

/// Run every task under `dir` and diff against expectations; outcomes come
/// back sorted by filename regardless of execution order.
pub fn run_corpus(dir: &Path, tol: f64) -> std::io::Result<CorpusSummary> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_task_file(p))
        .collect();
    files.sort();

    #[cfg(feature = "parallel")]
    let outcomes = {
        use rayon::prelude::*;
        files.par_iter().map(|p| run_one(p, tol)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes = files.iter().map(|p| run_one(p, tol)).collect();

    Ok(CorpusSummary { outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn diff_reports_first_divergent_path() {
        let e = json!({"a": [1, {"b": 2.0}]});
        let a = json!({"a": [1, {"b": 2.0000001}]});
        assert!(first_diff("$", &e, &a, 1e-9).unwrap().starts_with("$.a[1].b"));
        assert!(first_diff("$", &e, &a, 1e-3).is_none());
    }

    #[test]
    fn integer_fields_never_get_tolerance() {
        let e = json!({"count": 64});
        let a = json!({"count": 65});
        assert!(first_diff("$", &e, &a, 10.0).is_some());
    }

    #[test]
    fn shape_mismatches_are_reported() {
        let e = json!({"a": [1, 2]});
        assert!(first_diff("$", &e, &json!({"a": [1]}), 1e-9).unwrap().contains("length"));
        assert!(first_diff("$", &e, &json!({}), 1e-9).unwrap().contains("missing"));
        assert!(first_diff("$", &json!({}), &e, 1e-9).unwrap().contains("unexpected"));
    }

    #[test]
    fn empty_directory_is_empty_table() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run_corpus(dir.path(), 1e-9).unwrap();
        assert!(summary.outcomes.is_empty());
        assert!(summary.all_ok());
    }

    #[test]
    fn missing_expectation_is_skip() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("t.json"),
            serde_json::to_string(&json!({
                "version": "1",
                "command": "formulas",
                "payload": {"action": "torsion", "prym_dim": 3}
            }))
            .unwrap(),
        )
        .unwrap();
        let summary = run_corpus(dir.path(), 1e-9).unwrap();
        assert_eq!(summary.outcomes.len(), 1);
        assert_eq!(summary.outcomes[0].status, Status::Skip);
        assert!(summary.all_ok());
    }

    #[test]
    fn corrupted_expectation_is_failure_with_path() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("t.json"),
            serde_json::to_string(&json!({
                "version": "1",
                "command": "formulas",
                "payload": {"action": "torsion", "prym_dim": 3}
            }))
            .unwrap(),
        )
        .unwrap();
        fs::write(dir.path().join("t.expected.json"), "{not json").unwrap();
        let summary = run_corpus(dir.path(), 1e-9).unwrap();
        assert_eq!(summary.outcomes[0].status, Status::Fail);
        assert!(summary.outcomes[0].detail.as_ref().unwrap().contains("expectation parse"));
    }
}
