//! Every spec in `tests/data` is solved and compared with the stored report
//! in `tests/golden`. Numbers (including numbers inside strings) compare with
//! `|a - b| <= 1e-9 + 1e-6 |b|`, everything else exactly.
//! Regenerate with `UPDATE_GOLDEN=1 cargo test -p eulerring-cli --test golden`.

use std::path::{Path, PathBuf};

use eulerring_cli::pipeline::{self, Settings};
use eulerring_cli::EquationSpec;
use serde_json::Value;

const ABS: f64 = 1e-9;
const REL: f64 = 1e-6;

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= ABS + REL * b.abs()
}

/// Splits text into alternating non-numeric and numeric tokens.
fn tokens(s: &str) -> Vec<Result<f64, String>> {
    let mut out = Vec::new();
    let mut text = String::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i].is_ascii_digit() {
            let start = i;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i + 1 < b.len() && (b[i] == b'e' || b[i] == b'E') && (b[i + 1].is_ascii_digit() || b[i + 1] == b'-') {
                i += 2;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if !text.is_empty() {
                out.push(Err(std::mem::take(&mut text)));
            }
            out.push(s[start..i].parse::<f64>().map_err(|_| s[start..i].to_string()));
        } else {
            text.push(b[i] as char);
            i += 1;
        }
    }
    if !text.is_empty() {
        out.push(Err(text));
    }
    out
}

fn strings_match(a: &str, b: &str) -> bool {
    let (ta, tb) = (tokens(a), tokens(b));
    ta.len() == tb.len()
        && ta.iter().zip(&tb).all(|(x, y)| match (x, y) {
            (Ok(u), Ok(v)) => close(*u, *v),
            (Err(u), Err(v)) => u == v,
            _ => false,
        })
}

fn compare(got: &Value, want: &Value, path: &str, diffs: &mut Vec<String>) {
    match (got, want) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            if !close(a, b) {
                diffs.push(format!("{path}: {a} != {b}"));
            }
        }
        (Value::String(a), Value::String(b)) => {
            if !strings_match(a, b) {
                diffs.push(format!("{path}: {a:?} != {b:?}"));
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                diffs.push(format!("{path}: length {} != {}", a.len(), b.len()));
                return;
            }
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                compare(x, y, &format!("{path}[{i}]"), diffs);
            }
        }
        (Value::Object(a), Value::Object(b)) => {
            for k in a.keys().chain(b.keys()) {
                match (a.get(k), b.get(k)) {
                    (Some(x), Some(y)) => compare(x, y, &format!("{path}.{k}"), diffs),
                    (Some(_), None) => diffs.push(format!("{path}.{k}: unexpected field")),
                    (None, Some(_)) => diffs.push(format!("{path}.{k}: missing field")),
                    (None, None) => unreachable!(),
                }
            }
        }
        (a, b) if a == b => {}
        (a, b) => diffs.push(format!("{path}: {a} != {b}")),
    }
}

fn dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

#[test]
fn golden_reports() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut specs: Vec<PathBuf> = std::fs::read_dir(dir("data"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    specs.sort();
    assert!(!specs.is_empty());
    let settings = Settings {
        cross: true,
        ..Settings::default()
    };
    let mut failures = Vec::new();
    for spec in &specs {
        let name = spec.file_name().unwrap();
        let problem = EquationSpec::from_path(spec).unwrap().validate().unwrap();
        let report = pipeline::solve(&problem, &settings).unwrap();
        assert!(report.passed, "{}: report did not pass", spec.display());
        let got = serde_json::to_value(&report).unwrap();
        let golden = dir("golden").join(name);
        if update {
            std::fs::write(&golden, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
            continue;
        }
        let text = std::fs::read_to_string(&golden).unwrap_or_else(|_| panic!("missing {}", golden.display()));
        let want: Value = serde_json::from_str(&text).unwrap();
        let mut diffs = Vec::new();
        compare(&got, &want, "$", &mut diffs);
        if !diffs.is_empty() {
            failures.push(format!("{}:\n  {}", name.to_string_lossy(), diffs.join("\n  ")));
        }
    }
    assert!(failures.is_empty(), "golden mismatches:\n{}", failures.join("\n"));
}

#[test]
fn number_aware_string_comparison() {
    assert!(strings_match("max 1.0000000001e-3 at x=2", "max 1e-3 at x=2"));
    assert!(!strings_match("1/36", "1/37"));
    assert!(!strings_match("ln(x) - 2", "ln(x) + 2"));
}
