//! Line-oriented code definition files.
//!
//! ```text
//! # comment
//! name 8-1-3
//! n 8
//! k 1
//! stabilizer ZXZIZIII
//! logical_x ZZXIIZII
//! logical_z ZIZIIZZI
//! schedule ft
//!   Z0 X1 Z2 Z4
//!   ...
//! end
//! ```
//!
//! Stabilizer and logical lines take a full-length Pauli string with an
//! optional phase prefix. Schedule rows list `<letter><qubit>` factors, one
//! row per stabilizer in order. Logicals may be omitted; they are then read
//! off the standard form.

use std::fmt::Write as _;

use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::pauli::{parse_pauli, Pauli, PauliOperator};
use crate::standard_form::with_derived_logicals;
use crate::synthesis::DetectorSchedule;

#[derive(Debug, Clone, PartialEq)]
pub struct CodeDefinition {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub stabilizers: Vec<PauliOperator>,
    pub logical_x: Vec<PauliOperator>,
    pub logical_z: Vec<PauliOperator>,
    pub schedules: Vec<(String, Vec<Vec<(usize, Pauli)>>)>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Definition { line, message: message.into() }
}

fn parse_factor(tok: &str, n: usize, line: usize) -> Result<(usize, Pauli)> {
    let mut chars = tok.chars();
    let p = chars
        .next()
        .and_then(Pauli::from_letter)
        .filter(|&p| p != Pauli::I)
        .ok_or_else(|| err(line, format!("bad schedule factor {tok:?}")))?;
    let q: usize = chars
        .as_str()
        .trim_start_matches('_')
        .parse()
        .map_err(|_| err(line, format!("bad qubit index in {tok:?}")))?;
    if q >= n {
        return Err(err(line, format!("qubit {q} out of range in {tok:?}")));
    }
    Ok((q, p))
}

impl CodeDefinition {
    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut n: Option<usize> = None;
        let mut k: Option<usize> = None;
        let mut def = CodeDefinition {
            name: String::new(),
            n: 0,
            k: 0,
            stabilizers: vec![],
            logical_x: vec![],
            logical_z: vec![],
            schedules: vec![],
        };
        let mut open: Option<(usize, String, Vec<Vec<(usize, Pauli)>>)> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some((_, _, rows)) = open.as_mut() {
                if content == "end" {
                    let (_, sname, rows) = open.take().expect("open schedule");
                    def.schedules.push((sname, rows));
                } else {
                    let nn = n.ok_or_else(|| err(line, "schedule before `n`"))?;
                    rows.push(content.split_whitespace().map(|t| parse_factor(t, nn, line)).collect::<Result<_>>()?);
                }
                continue;
            }
            let (key, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
            let rest = rest.trim();
            let need_n = || n.ok_or_else(|| err(line, format!("`{key}` before `n`")));
            match key {
                "name" => name = Some(rest.to_string()),
                "n" | "k" => {
                    let v: usize = rest.parse().map_err(|_| err(line, format!("bad value for `{key}`: {rest:?}")))?;
                    let slot = if key == "n" { &mut n } else { &mut k };
                    if slot.replace(v).is_some() {
                        return Err(err(line, format!("`{key}` given twice")));
                    }
                }
                "stabilizer" | "logical_x" | "logical_z" => {
                    let op = parse_pauli(rest, need_n()?).map_err(|e| err(line, e.to_string()))?;
                    match key {
                        "stabilizer" => def.stabilizers.push(op),
                        "logical_x" => def.logical_x.push(op),
                        _ => def.logical_z.push(op),
                    }
                }
                "schedule" => {
                    if rest.is_empty() || rest.contains(char::is_whitespace) {
                        return Err(err(line, "schedule needs a single-word name"));
                    }
                    if def.schedules.iter().any(|(s, _)| s == rest) {
                        return Err(err(line, format!("schedule {rest:?} defined twice")));
                    }
                    open = Some((line, rest.to_string(), vec![]));
                }
                "end" => return Err(err(line, "`end` without `schedule`")),
                _ => return Err(err(line, format!("unknown keyword {key:?}"))),
            }
        }
        if let Some((line, sname, _)) = open {
            return Err(err(line, format!("schedule {sname:?} is missing `end`")));
        }
        let last = text.lines().count().max(1);
        def.n = n.ok_or_else(|| err(last, "missing `n`"))?;
        def.k = k.ok_or_else(|| err(last, "missing `k`"))?;
        def.name = name.unwrap_or_default();
        if def.stabilizers.len() + def.k != def.n {
            return Err(err(
                last,
                format!("{} stabilizers for n = {}, k = {}", def.stabilizers.len(), def.n, def.k),
            ));
        }
        if def.logical_x.len() != def.logical_z.len() || !(def.logical_x.is_empty() || def.logical_x.len() == def.k) {
            return Err(err(last, "give either no logicals or exactly k of each kind"));
        }
        for (sname, rows) in &def.schedules {
            if rows.len() != def.stabilizers.len() {
                return Err(err(
                    last,
                    format!("schedule {sname:?} has {} rows for {} stabilizers", rows.len(), def.stabilizers.len()),
                ));
            }
        }
        Ok(def)
    }

    pub fn format(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            let _ = writeln!(out, "name {}", self.name);
        }
        let _ = writeln!(out, "n {}", self.n);
        let _ = writeln!(out, "k {}", self.k);
        for s in &self.stabilizers {
            let _ = writeln!(out, "stabilizer {s}");
        }
        for x in &self.logical_x {
            let _ = writeln!(out, "logical_x {x}");
        }
        for z in &self.logical_z {
            let _ = writeln!(out, "logical_z {z}");
        }
        for (name, rows) in &self.schedules {
            let _ = writeln!(out, "schedule {name}");
            for row in rows {
                let _ = writeln!(out, "  {}", format_row(row));
            }
            let _ = writeln!(out, "end");
        }
        out
    }

    /// The code, with logicals derived when the file has none.
    pub fn code(&self) -> Result<StabilizerCode> {
        let code = StabilizerCode::new(self.n, self.stabilizers.clone(), self.logical_x.clone(), self.logical_z.clone())?
            .with_name(self.name.clone());
        if self.logical_x.is_empty() && self.k > 0 {
            with_derived_logicals(&code)
        } else {
            Ok(code)
        }
    }

    pub fn schedule_names(&self) -> impl Iterator<Item = &str> {
        self.schedules.iter().map(|(s, _)| s.as_str())
    }

    /// Named schedule; `natural` means ascending qubit order unless the file
    /// defines a schedule of that name.
    pub fn schedule(&self, name: &str, code: &StabilizerCode) -> Result<DetectorSchedule> {
        match self.schedules.iter().find(|(s, _)| s == name) {
            Some((_, rows)) => DetectorSchedule::new(code, rows.clone()),
            None if name == "natural" => Ok(DetectorSchedule::natural(code)),
            None => Err(Error::ScheduleMismatch(format!("no schedule named {name:?}"))),
        }
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

pub fn format_row(row: &[(usize, Pauli)]) -> String {
    row.iter().map(|(q, p)| format!("{p}{q}")).collect::<Vec<_>>().join(" ")
}

/// A schedule block in definition-file syntax.
pub fn format_schedule(name: &str, sched: &DetectorSchedule) -> String {
    let mut out = format!("schedule {name}\n");
    for row in sched.rows() {
        let _ = writeln!(out, "  {}", format_row(row));
    }
    out.push_str("end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const BELL: &str = "# two qubits\nname bell\nn 2\nk 0\nstabilizer XX\nstabilizer -ZZ  # signed\nschedule rev\n  X1 X0\n  Z0 Z1\nend\n";

    #[test]
    fn parse_and_round_trip() {
        let d = CodeDefinition::parse(BELL).unwrap();
        assert_eq!(d.name, "bell");
        assert_eq!(d.stabilizers[1].phase_exp(), 2);
        assert_eq!(d.schedules[0].1[0], vec![(1, Pauli::X), (0, Pauli::X)]);
        let again = CodeDefinition::parse(&d.format()).unwrap();
        assert_eq!(again, d);
        let code = d.code().unwrap();
        assert!(d.schedule("rev", &code).is_ok());
        assert!(d.schedule("natural", &code).is_ok());
        assert!(d.schedule("other", &code).is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "n 2\nk 0\nstabilizer XQ\nstabilizer ZZ\n";
        assert!(matches!(CodeDefinition::parse(bad), Err(Error::Definition { line: 3, .. })));
        let unterminated = "n 1\nk 0\nstabilizer Z\nschedule s\n  Z0\n";
        assert!(matches!(CodeDefinition::parse(unterminated), Err(Error::Definition { line: 4, .. })));
        assert!(matches!(CodeDefinition::parse("n 1\nfoo 2\n"), Err(Error::Definition { line: 2, .. })));
    }

    #[test]
    fn trivial_code_without_stabilizers() {
        let d = CodeDefinition::parse("n 1\nk 1\n").unwrap();
        let code = d.code().unwrap();
        assert_eq!(code.logical_x().len(), 1);
    }
}
