//! Hook-error analysis for bare-ancilla syndrome extraction, lookup-table
//! decoding and schedule search.

use std::collections::BTreeMap;
use std::fmt;

use crate::code::{LogicalClass, StabilizerCode, StabilizerGroup, Syndrome};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};
use crate::synthesis::DetectorSchedule;

/// Data error left behind by a fault on the ancilla and data qubit of one
/// coupling gate: `P` on the gate's data qubit plus an X on the ancilla that
/// spreads through the remaining gates of the same generator.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedError {
    /// Generator index (0-based).
    pub stabilizer: usize,
    /// 1-based position of the faulty gate in the schedule row.
    pub position: usize,
    /// Data-side Pauli of the fault (`I` for a pure ancilla fault).
    pub fault: Pauli,
    /// `P_{q_j} · S_{q_{j+1}} ⋯ S_{q_w}`, phase dropped.
    pub raw: PauliOperator,
    /// The lighter-looking member of `{raw, raw·g}`: faults in the first
    /// half of a row are written through their complement, which is how
    /// hook errors are usually tabulated.
    pub error: PauliOperator,
}

impl PropagatedError {
    /// Weight ≤ 1 errors coincide with single-qubit errors (or nothing).
    pub fn is_trivial(&self) -> bool {
        self.error.weight() <= 1 || self.raw.weight() <= 1
    }
}

/// Every propagated error of every generator, in schedule order, with
/// `fault` running over `I, X, Y, Z`.
pub fn propagated_errors(code: &StabilizerCode, sched: &DetectorSchedule) -> Vec<PropagatedError> {
    (0..sched.len()).flat_map(|i| row_errors(code, sched, i)).collect()
}

fn row_errors(code: &StabilizerCode, sched: &DetectorSchedule, i: usize) -> Vec<PropagatedError> {
    let n = code.n();
    let row = sched.row(i);
    let w = row.len();
    let g = code.generators()[i].unsigned();
    let mut out = Vec::with_capacity(4 * w);
    for j in 1..=w {
        let tail = PauliOperator::from_sparse(n, &row[j..]);
        let q = row[j - 1].0;
        for fault in Pauli::ALL {
            let raw = (&PauliOperator::single(n, q, fault) * &tail).unsigned();
            let error = if j <= w / 2 { (&raw * &g).unsigned() } else { raw.clone() };
            out.push(PropagatedError { stabilizer: i, position: j, fault, raw, error });
        }
    }
    out
}

/// The 3n weight-one errors, qubit-major then X, Y, Z.
pub fn single_qubit_errors(n: usize) -> Vec<PauliOperator> {
    (0..n)
        .flat_map(|q| Pauli::NONTRIVIAL.into_iter().map(move |p| PauliOperator::single(n, q, p)))
        .collect()
}

/// Where a lookup entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Identity,
    SingleQubit,
    Propagated,
    /// A later error mapped to the same syndrome and differed from this
    /// entry by a stabilizer.
    CollisionResolved,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Identity => "identity",
            Provenance::SingleQubit => "single-qubit",
            Provenance::Propagated => "propagated",
            Provenance::CollisionResolved => "collision-resolved",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub correction: PauliOperator,
    pub provenance: Provenance,
}

/// Syndrome → correction map.
#[derive(Debug, Clone, PartialEq)]
pub struct SyndromeTable {
    n: usize,
    len: usize,
    entries: BTreeMap<Syndrome, TableEntry>,
}

impl SyndromeTable {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Syndrome length.
    pub fn syndrome_len(&self) -> usize {
        self.len
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, s: &Syndrome) -> Option<&TableEntry> {
        self.entries.get(s)
    }

    /// Entries in ascending syndrome order.
    pub fn iter(&self) -> impl Iterator<Item = (&Syndrome, &TableEntry)> {
        self.entries.iter()
    }
}

/// Two errors with the same syndrome whose product is not a stabilizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub error: PauliOperator,
    /// The earlier error sharing the syndrome.
    pub conflicts_with: PauliOperator,
    pub syndrome: Syndrome,
    pub product: PauliOperator,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}) share syndrome {}; product {} is a logical operator",
            self.error.to_sparse_string(),
            self.conflicts_with.to_sparse_string(),
            self.syndrome,
            self.product.to_sparse_string()
        )
    }
}

/// Incremental collision tracker: one representative per syndrome class.
#[derive(Clone)]
struct Classes<'a> {
    code: &'a StabilizerCode,
    group: &'a StabilizerGroup,
    reps: BTreeMap<Syndrome, Vec<PauliOperator>>,
}

impl<'a> Classes<'a> {
    fn new(code: &'a StabilizerCode, group: &'a StabilizerGroup) -> Self {
        let mut c = Classes { code, group, reps: BTreeMap::new() };
        c.reps.insert(Syndrome::zero(code.num_checks()), vec![PauliOperator::identity(code.n())]);
        c
    }

    /// Adds `e`; returns a violation against the first class it conflicts with.
    fn add(&mut self, e: &PauliOperator) -> Option<Violation> {
        let s = self.code.syndrome_of(e).expect("sizes checked");
        let reps = self.reps.entry(s).or_default();
        if reps.iter().any(|r| self.group.contains(&(r * e), true)) {
            return None;
        }
        let first = reps.first().cloned();
        reps.push(e.clone());
        first.map(|r| Violation {
            error: e.clone(),
            product: (e * &r).unsigned(),
            conflicts_with: r,
            syndrome: s,
        })
    }
}

fn check_sizes(code: &StabilizerCode, sched: &DetectorSchedule) -> Result<()> {
    DetectorSchedule::new(code, sched.rows().to_vec()).map(|_| ())
}

fn insert_all(code: &StabilizerCode, sched: &DetectorSchedule, strict: bool) -> Result<SyndromeTable> {
    check_sizes(code, sched)?;
    let group = code.group();
    let mut entries = BTreeMap::new();
    entries.insert(
        Syndrome::zero(code.num_checks()),
        TableEntry { correction: PauliOperator::identity(code.n()), provenance: Provenance::Identity },
    );
    let singles = single_qubit_errors(code.n()).into_iter().map(|e| (e, Provenance::SingleQubit));
    let hooks = propagated_errors(code, sched)
        .into_iter()
        .filter(|p| !p.is_trivial())
        .map(|p| (p.error, Provenance::Propagated));
    for (e, provenance) in singles.chain(hooks) {
        let s = code.syndrome_of(&e)?;
        match entries.get_mut(&s) {
            None => {
                entries.insert(s, TableEntry { correction: e, provenance });
            }
            Some(existing) => {
                if existing.correction.eq_up_to_phase(&e) {
                    continue;
                }
                if group.contains(&(&existing.correction * &e), true) {
                    if existing.provenance != Provenance::Identity {
                        existing.provenance = Provenance::CollisionResolved;
                    }
                } else if strict {
                    let v = Violation {
                        product: (&e * &existing.correction).unsigned(),
                        error: e,
                        conflicts_with: existing.correction.clone(),
                        syndrome: s,
                    };
                    return Err(Error::FaultTolerance(v.to_string()));
                }
            }
        }
    }
    Ok(SyndromeTable { n: code.n(), len: code.num_checks(), entries })
}

/// Lookup table from single-qubit and propagated errors. Fails when two
/// errors with one syndrome differ by a logical operator.
pub fn build_lookup_table(code: &StabilizerCode, sched: &DetectorSchedule) -> Result<SyndromeTable> {
    insert_all(code, sched, true)
}

/// Same insertion order, but on a logical collision the first error is kept
/// silently. Meant for studying schedules that are not fault tolerant.
pub fn build_lookup_table_permissive(code: &StabilizerCode, sched: &DetectorSchedule) -> Result<SyndromeTable> {
    insert_all(code, sched, false)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FtReport {
    pub violations: Vec<Violation>,
}

impl FtReport {
    pub fn is_fault_tolerant(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for FtReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_fault_tolerant() {
            return writeln!(f, "fault tolerant");
        }
        writeln!(f, "not fault tolerant: {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Checks every pair of single-qubit and propagated errors that share a
/// syndrome. Each violation is reported against the earliest conflicting
/// error; propagated errors appear as they leave the circuit (`raw`).
pub fn check_fault_tolerance(code: &StabilizerCode, sched: &DetectorSchedule) -> Result<FtReport> {
    check_sizes(code, sched)?;
    let group = code.group();
    let mut classes = Classes::new(code, &group);
    let mut violations = Vec::new();
    let errors = single_qubit_errors(code.n())
        .into_iter()
        .chain(propagated_errors(code, sched).into_iter().map(|p| p.raw));
    for e in errors {
        violations.extend(classes.add(&e));
    }
    Ok(FtReport { violations })
}

/// For `k` logical qubits, finds the logical Paulis `L` with `p·L ∈ S` (up
/// to phase), e.g. `[Y]` for the logical Y of a one-qubit code. Gives up for
/// `k > 6`.
pub fn identify_logical(code: &StabilizerCode, p: &PauliOperator) -> Option<Vec<Pauli>> {
    let k = code.k();
    if k > 6 || code.logical_x().len() != k || code.logical_z().len() != k {
        return None;
    }
    let group = code.group();
    for combo in 0..4usize.pow(k as u32) {
        let mut letters = Vec::with_capacity(k);
        let mut op = p.clone();
        for j in 0..k {
            let letter = Pauli::ALL[(combo >> (2 * j)) & 3];
            if letter.x_bit() {
                op = &op * &code.logical_x()[j];
            }
            if letter.z_bit() {
                op = &op * &code.logical_z()[j];
            }
            letters.push(letter);
        }
        if group.contains(&op, true) {
            return Some(letters);
        }
    }
    None
}

/// Lexicographic depth-first search over per-generator orderings. A prefix
/// is abandoned as soon as its hook errors collide with a logical
/// difference. Returns at most `budget` schedules.
pub fn search_schedules(code: &StabilizerCode, budget: usize) -> Vec<DetectorSchedule> {
    search_schedules_with_prefix(code, &[], budget)
}

/// As [`search_schedules`], with the first rows pinned to `prefix`.
pub fn search_schedules_with_prefix(
    code: &StabilizerCode,
    prefix: &[Vec<(usize, Pauli)>],
    budget: usize,
) -> Vec<DetectorSchedule> {
    let mut found = Vec::new();
    if budget == 0 || prefix.len() > code.num_checks() {
        return found;
    }
    let group = code.group();
    let mut classes = Classes::new(code, &group);
    for e in single_qubit_errors(code.n()) {
        if classes.add(&e).is_some() {
            return found;
        }
    }
    let mut rows: Vec<Vec<(usize, Pauli)>> = Vec::new();
    for row in prefix {
        rows.push(row.clone());
        if !extend_ok(code, &mut classes, row) {
            return found;
        }
    }
    dfs(code, &classes, &mut rows, budget, &mut found);
    found
}

fn extend_ok(code: &StabilizerCode, classes: &mut Classes<'_>, row: &[(usize, Pauli)]) -> bool {
    let n = code.n();
    let w = row.len();
    for j in 1..=w {
        let tail = PauliOperator::from_sparse(n, &row[j..]);
        let q = row[j - 1].0;
        for fault in Pauli::ALL {
            let raw = &PauliOperator::single(n, q, fault) * &tail;
            if classes.add(&raw.unsigned()).is_some() {
                return false;
            }
        }
    }
    true
}

fn dfs(
    code: &StabilizerCode,
    classes: &Classes<'_>,
    rows: &mut Vec<Vec<(usize, Pauli)>>,
    budget: usize,
    found: &mut Vec<DetectorSchedule>,
) {
    let i = rows.len();
    if i == code.num_checks() {
        found.push(DetectorSchedule::new(code, rows.clone()).expect("permutations of generator factors"));
        return;
    }
    let factors = code.generators()[i].factors();
    let mut perm: Vec<usize> = (0..factors.len()).collect();
    loop {
        let row: Vec<(usize, Pauli)> = perm.iter().map(|&t| factors[t]).collect();
        let mut next = classes.clone();
        if extend_ok(code, &mut next, &row) {
            rows.push(row);
            dfs(code, &next, rows, budget, found);
            rows.pop();
            if found.len() >= budget {
                return;
            }
        }
        if !next_permutation(&mut perm) {
            return;
        }
    }
}

/// Advances to the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).expect("p[i+1] > p[i]");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Looks up a correction. Unknown syndromes give the identity and `false`.
pub fn correct(syndrome: &Syndrome, table: &SyndromeTable) -> (PauliOperator, bool) {
    match table.get(syndrome) {
        Some(entry) => (entry.correction.clone(), true),
        None => (PauliOperator::identity(table.n), false),
    }
}

/// Classifies the residual `e·c` after correcting `e` with `table`.
pub fn residual_class(code: &StabilizerCode, table: &SyndromeTable, e: &PauliOperator) -> Result<LogicalClass> {
    let (c, _) = correct(&code.syndrome_of(e)?, table);
    code.logical_class(&(e * &c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::parse_pauli;

    fn code(n: usize, gens: &[&str]) -> StabilizerCode {
        let gens = gens.iter().map(|g| parse_pauli(g, n).unwrap()).collect();
        StabilizerCode::new(n, gens, vec![], vec![]).unwrap()
    }

    #[test]
    fn permutations_in_order() {
        let mut p = vec![0, 1, 2];
        let mut seen = vec![p.clone()];
        while next_permutation(&mut p) {
            seen.push(p.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![0, 2, 1]);
        assert_eq!(seen[5], vec![2, 1, 0]);
    }

    #[test]
    fn weight_one_generators_are_vacuously_ft() {
        let c = code(2, &["ZI", "IZ"]);
        let report = check_fault_tolerance(&c, &DetectorSchedule::natural(&c)).unwrap();
        assert!(report.is_fault_tolerant());
        assert!(propagated_errors(&c, &DetectorSchedule::natural(&c)).iter().all(PropagatedError::is_trivial));
    }

    #[test]
    fn zero_budget_finds_nothing() {
        let c = code(2, &["XX", "ZZ"]);
        assert!(search_schedules(&c, 0).is_empty());
        // weight-2 generators: every ordering is fine
        assert_eq!(search_schedules(&c, 10).len(), 4);
        assert_eq!(search_schedules(&c, 3).len(), 3);
    }

    #[test]
    fn unknown_syndrome_is_flagged() {
        let c = code(3, &["ZZI", "IZZ"]);
        let table = build_lookup_table_permissive(&c, &DetectorSchedule::natural(&c)).unwrap();
        let (corr, known) = correct(&"11".parse().unwrap(), &table);
        assert!(known);
        assert_eq!(corr.to_sparse_string(), "X_1");
        let mut t2 = table.clone();
        t2.entries.remove(&"11".parse().unwrap());
        let (corr, known) = correct(&"11".parse().unwrap(), &t2);
        assert!(!known && corr.is_identity());
    }

    #[test]
    fn table_entries_reproduce_their_keys() {
        let c = code(3, &["ZZI", "IZZ"]);
        let table = build_lookup_table_permissive(&c, &DetectorSchedule::natural(&c)).unwrap();
        for (s, e) in table.iter() {
            assert_eq!(c.syndrome_of(&e.correction).unwrap(), *s);
        }
    }
}
