//! JSON syndrome tables, golden-file comparison and CSV results.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::code::{StabilizerCode, Syndrome};
use crate::error::{Error, Result};
use crate::ft::{propagated_errors, single_qubit_errors, SyndromeTable};
use crate::pauli::{parse_sparse, PauliOperator};
use crate::rates::ErrorRatePoint;
use crate::synthesis::DetectorSchedule;

/// Compact label used in tables: `X0`, `Z1X3X4`, `I`.
pub fn label(p: &PauliOperator) -> String {
    if p.is_identity() {
        return "I".to_string();
    }
    p.factors().iter().map(|(q, l)| format!("{l}{q}")).collect()
}

/// Single-qubit syndromes, the non-trivial propagated errors of `sched` and
/// the lookup table, as one JSON document with sorted keys.
pub fn tables_json(code: &StabilizerCode, sched: &DetectorSchedule, table: &SyndromeTable) -> Result<Value> {
    let single: Vec<Value> = single_qubit_errors(code.n())
        .iter()
        .map(|e| Ok(json!({ "error": label(e), "syndrome": code.syndrome_of(e)?.to_string() })))
        .collect::<Result<_>>()?;
    let mut propagated = Vec::new();
    let mut seen: Vec<(usize, PauliOperator)> = Vec::new();
    for pe in propagated_errors(code, sched) {
        if pe.is_trivial() || seen.iter().any(|(s, e)| *s == pe.stabilizer && e.eq_up_to_phase(&pe.error)) {
            continue;
        }
        seen.push((pe.stabilizer, pe.error.clone()));
        propagated.push(json!({
            "stabilizer": pe.stabilizer + 1,
            "error": label(&pe.error),
            "syndrome": code.syndrome_of(&pe.error)?.to_string(),
        }));
    }
    let mut lookup = Map::new();
    for (s, entry) in table.iter() {
        lookup.insert(
            s.to_string(),
            json!({ "correction": label(&entry.correction), "provenance": entry.provenance.as_str() }),
        );
    }
    Ok(json!({
        "code": code.name(),
        "single_qubit": single,
        "propagated": propagated,
        "lookup": Value::Object(lookup),
    }))
}

/// One `(error, syndrome)` pair per non-comment line.
pub fn parse_golden(text: &str, n: usize) -> Result<Vec<(PauliOperator, Syndrome)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [e, s] = fields[..] else {
            return Err(Error::Definition { line: idx + 1, message: format!("expected `<error> <syndrome>`, got {content:?}") });
        };
        let e = parse_sparse(e, n).map_err(|x| Error::Definition { line: idx + 1, message: x.to_string() })?;
        let s: Syndrome = s.parse().map_err(|x: Error| Error::Definition { line: idx + 1, message: x.to_string() })?;
        out.push((e, s));
    }
    Ok(out)
}

/// Compares `code`'s syndromes against golden pairs; returns one message per
/// mismatch.
pub fn compare_golden(code: &StabilizerCode, golden: &[(PauliOperator, Syndrome)]) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for (e, want) in golden {
        let got = code.syndrome_of(e)?;
        if got != *want {
            bad.push(format!("{}: expected {want}, computed {got}", label(e)));
        }
    }
    Ok(bad)
}

/// Reads `table3.txt` and `table4.txt` from `dir` and compares both.
pub fn compare_golden_dir(code: &StabilizerCode, dir: &Path) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for file in ["table3.txt", "table4.txt"] {
        let text = std::fs::read_to_string(dir.join(file))?;
        for m in compare_golden(code, &parse_golden(&text, code.n())?)? {
            bad.push(format!("{file}: {m}"));
        }
    }
    Ok(bad)
}

pub const CSV_HEADER: [&str; 12] = [
    "p",
    "noise",
    "method",
    "shots",
    "batches",
    "logical_mean",
    "logical_min",
    "logical_max",
    "total_mean",
    "total_min",
    "total_max",
    "fidelity_mean",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub p: f64,
    pub noise: String,
    pub method: String,
    pub shots: u64,
    pub batches: usize,
    pub logical_mean: f64,
    pub logical_min: f64,
    pub logical_max: f64,
    pub total_mean: f64,
    pub total_min: f64,
    pub total_max: f64,
    pub fidelity_mean: f64,
}

impl CsvRow {
    pub fn from_point(pt: &ErrorRatePoint, noise: &str, method: &str) -> Self {
        CsvRow {
            p: pt.p,
            noise: noise.to_string(),
            method: method.to_string(),
            shots: pt.shots,
            batches: pt.batches,
            logical_mean: pt.logical.mean,
            logical_min: pt.logical.min,
            logical_max: pt.logical.max,
            total_mean: pt.total.mean,
            total_min: pt.total.min,
            total_max: pt.total.max,
            fidelity_mean: pt.fidelity.mean,
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv<W: Write>(rows: &[CsvRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Io(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}
