//! Stabilizer code definitions: validation, syndromes, group membership and
//! exhaustive distance search.

use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::{symplectic_product, Pauli, PauliOperator};

/// Measured or computed syndrome. Bit `i` belongs to generator `g_{i+1}` and
/// is printed leftmost-first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome {
    bits: u64,
    len: u8,
}

impl Syndrome {
    pub const MAX_LEN: usize = 64;

    pub fn zero(len: usize) -> Self {
        assert!(len <= Self::MAX_LEN);
        Syndrome { bits: 0, len: len as u8 }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = Self::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len());
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len());
        self.bits ^= 1 << i;
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Syndrome({self})")
    }
}

impl std::str::FromStr for Syndrome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > Self::MAX_LEN {
            return Err(Error::InvalidCode(format!("syndrome {s:?} longer than {} bits", Self::MAX_LEN)));
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidCode(format!("bad syndrome character {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Syndrome::from_bools(&bits))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerCode {
    name: String,
    n: usize,
    generators: Vec<PauliOperator>,
    logical_x: Vec<PauliOperator>,
    logical_z: Vec<PauliOperator>,
}

impl StabilizerCode {
    /// Assembles a code. Only shapes are checked here; use [`validate`] for
    /// the algebraic invariants.
    pub fn new(
        n: usize,
        generators: Vec<PauliOperator>,
        logical_x: Vec<PauliOperator>,
        logical_z: Vec<PauliOperator>,
    ) -> Result<Self> {
        if generators.len() > n {
            return Err(Error::InvalidCode(format!("{} generators on {n} qubits", generators.len())));
        }
        if generators.len() > Syndrome::MAX_LEN {
            return Err(Error::InvalidCode(format!("at most {} generators are supported", Syndrome::MAX_LEN)));
        }
        for op in generators.iter().chain(&logical_x).chain(&logical_z) {
            if op.num_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, found: op.num_qubits() });
            }
        }
        Ok(StabilizerCode { name: String::new(), n, generators, logical_x, logical_z })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.n - self.generators.len()
    }

    /// Number of generators, i.e. syndrome length.
    pub fn num_checks(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn logical_x(&self) -> &[PauliOperator] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[PauliOperator] {
        &self.logical_z
    }

    pub fn syndrome_of(&self, e: &PauliOperator) -> Result<Syndrome> {
        let mut s = Syndrome::zero(self.num_checks());
        for (i, g) in self.generators.iter().enumerate() {
            s.set(i, symplectic_product(g, e)? == 1);
        }
        Ok(s)
    }

    pub fn group(&self) -> StabilizerGroup {
        StabilizerGroup::new(self.n, &self.generators)
    }

    pub fn contains(&self, p: &PauliOperator, up_to_phase: bool) -> bool {
        self.group().contains(p, up_to_phase)
    }

    pub fn logical_class(&self, p: &PauliOperator) -> Result<LogicalClass> {
        if !self.syndrome_of(p)?.is_zero() {
            Ok(LogicalClass::ErrorDetecting)
        } else if self.contains(p, true) {
            Ok(LogicalClass::Stabilizer)
        } else {
            Ok(LogicalClass::Logical)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicalClass {
    Stabilizer,
    Logical,
    ErrorDetecting,
}

/// Echelon basis of a Pauli group, rows kept as phase-exact products of the
/// generators.
#[derive(Debug, Clone)]
pub struct StabilizerGroup {
    n: usize,
    rows: Vec<(usize, PauliOperator)>,
    dependencies: Vec<(usize, PauliOperator)>,
}

/// Bit index in the 2n-long (x|z) vector.
fn bit(p: &PauliOperator, b: usize) -> bool {
    let n = p.num_qubits();
    if b < n {
        p.x_bit(b)
    } else {
        p.z_bit(b - n)
    }
}

fn first_bit(p: &PauliOperator) -> Option<usize> {
    let n = p.num_qubits();
    (0..2 * n).find(|&b| bit(p, b))
}

impl StabilizerGroup {
    pub fn new(n: usize, generators: &[PauliOperator]) -> Self {
        let mut group = StabilizerGroup { n, rows: Vec::new(), dependencies: Vec::new() };
        for (i, g) in generators.iter().enumerate() {
            let reduced = group.reduce(g);
            match first_bit(&reduced) {
                Some(pivot) => group.rows.push((pivot, reduced)),
                None => group.dependencies.push((i, reduced)),
            }
        }
        group
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Generators that reduced to a scalar, with the scalar reached
    /// (`phase_exp` 2 means −I lies in the group).
    pub fn dependencies(&self) -> &[(usize, PauliOperator)] {
        &self.dependencies
    }

    /// Multiplies `p` on the right by basis rows until no pivot bit is left.
    pub fn reduce(&self, p: &PauliOperator) -> PauliOperator {
        assert_eq!(p.num_qubits(), self.n);
        let mut q = p.clone();
        for (pivot, row) in &self.rows {
            if bit(&q, *pivot) {
                q = &q * row;
            }
        }
        q
    }

    pub fn contains(&self, p: &PauliOperator, up_to_phase: bool) -> bool {
        if p.num_qubits() != self.n {
            return false;
        }
        let r = self.reduce(p);
        r.has_trivial_bits() && (up_to_phase || r.phase_exp() == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "[{}] {}", if c.passed { "pass" } else { "FAIL" }, c.name)?;
            if let Some(w) = &c.witness {
                write!(f, ": {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn pair(a: &PauliOperator, b: &PauliOperator) -> String {
    format!("({}, {})", a.to_sparse_string(), b.to_sparse_string())
}

fn first_pair<'a>(
    left: &'a [PauliOperator],
    right: &'a [PauliOperator],
    same_list: bool,
    mut bad: impl FnMut(usize, usize) -> bool,
) -> Option<String> {
    for i in 0..left.len() {
        let start = if same_list { i + 1 } else { 0 };
        for j in start..right.len() {
            if bad(i, j) {
                return Some(pair(&left[i], &right[j]));
            }
        }
    }
    None
}

fn check(name: &'static str, witness: Option<String>) -> Check {
    Check { name, passed: witness.is_none(), witness }
}

pub const CHECK_COMMUTE: &str = "generators commute";
pub const CHECK_HERMITIAN: &str = "generators hermitian";
pub const CHECK_INDEPENDENT: &str = "generators independent";
pub const CHECK_NO_MINUS_I: &str = "-I not in stabilizer group";
pub const CHECK_LOGICAL_COUNT: &str = "logical operator count";
pub const CHECK_LOGICAL_COMMUTE: &str = "logicals commute with generators";
pub const CHECK_LOGICAL_PAIRS: &str = "logical pair relations";

/// Runs every structural check and reports a witness for each failure.
pub fn validate(code: &StabilizerCode) -> ValidationReport {
    let gens = code.generators();
    let (lx, lz) = (code.logical_x(), code.logical_z());
    let mut checks = Vec::new();

    checks.push(check(CHECK_COMMUTE, first_pair(gens, gens, true, |i, j| !gens[i].commutes_with(&gens[j]))));
    checks.push(check(
        CHECK_HERMITIAN,
        gens.iter().find(|g| !g.is_hermitian()).map(|g| g.to_sparse_string()),
    ));

    let group = code.group();
    checks.push(check(
        CHECK_INDEPENDENT,
        group.dependencies().first().map(|(i, _)| format!("g_{} is a product of earlier generators", i + 1)),
    ));
    let minus_i = group.dependencies().iter().find(|(_, r)| r.phase_exp() == 2);
    checks.push(check(
        CHECK_NO_MINUS_I,
        minus_i.map(|(i, _)| format!("g_{} times earlier generators gives -I", i + 1)),
    ));

    let k = code.k();
    checks.push(check(
        CHECK_LOGICAL_COUNT,
        (lx.len() != k || lz.len() != k)
            .then(|| format!("k = {k} but {} X and {} Z logicals given", lx.len(), lz.len())),
    ));

    let logicals: Vec<PauliOperator> = lx.iter().chain(lz).cloned().collect();
    checks.push(check(
        CHECK_LOGICAL_COMMUTE,
        first_pair(&logicals, gens, false, |i, j| !logicals[i].commutes_with(&gens[j])),
    ));

    let mut pair_witness = None;
    'outer: for i in 0..lx.len() {
        for j in 0..lz.len() {
            let anti = !lx[i].commutes_with(&lz[j]);
            if anti != (i == j) {
                pair_witness = Some(pair(&lx[i], &lz[j]));
                break 'outer;
            }
        }
    }
    pair_witness = pair_witness
        .or_else(|| first_pair(lx, lx, true, |i, j| !lx[i].commutes_with(&lx[j])))
        .or_else(|| first_pair(lz, lz, true, |i, j| !lz[i].commutes_with(&lz[j])));
    checks.push(check(CHECK_LOGICAL_PAIRS, pair_witness));

    ValidationReport { checks }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistanceVerdict {
    /// Smallest weight of a logical operator, with one example.
    Exactly(usize, PauliOperator),
    GreaterThan(usize),
}

/// Exhaustive search for the lightest element of N(S)\S up to weight
/// `w_max`. Codes with `k = 0` have no logical operators.
pub fn min_distance(code: &StabilizerCode, w_max: usize) -> DistanceVerdict {
    if code.k() == 0 {
        return DistanceVerdict::GreaterThan(w_max);
    }
    let group = code.group();
    let n = code.n();
    for w in 1..=w_max.min(n) {
        let mut found = None;
        for_each_weight(n, w, &mut |p| {
            if found.is_none()
                && code.generators().iter().all(|g| g.commutes_with(p))
                && !group.contains(p, true)
            {
                found = Some(p.clone());
            }
        });
        if let Some(p) = found {
            return DistanceVerdict::Exactly(w, p);
        }
    }
    DistanceVerdict::GreaterThan(w_max)
}

/// Visits every n-qubit Pauli of weight exactly `w` (phase 0).
pub fn for_each_weight(n: usize, w: usize, visit: &mut dyn FnMut(&PauliOperator)) {
    fn rec(
        n: usize,
        start: usize,
        left: usize,
        current: &mut PauliOperator,
        visit: &mut dyn FnMut(&PauliOperator),
    ) {
        if left == 0 {
            visit(current);
            return;
        }
        for q in start..=n - left {
            for p in Pauli::NONTRIVIAL {
                current.set(q, p);
                rec(n, q + 1, left - 1, current, visit);
            }
            current.set(q, Pauli::I);
        }
    }
    if w > n {
        return;
    }
    let mut current = PauliOperator::identity(n);
    rec(n, 0, w, &mut current, visit);
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
    fn syndrome_display_and_parse() {
        let s: Syndrome = "1110010".parse().unwrap();
        assert_eq!(s.to_string(), "1110010");
        assert!(s.get(0) && !s.get(3));
        assert_eq!(s.weight(), 4);
        assert!("10a".parse::<Syndrome>().is_err());
    }

    #[test]
    fn trivial_code_is_valid() {
        let c = code(1, &["Z"]);
        assert!(validate(&c).is_valid());
        assert_eq!(min_distance(&c, 3), DistanceVerdict::GreaterThan(3));
    }

    #[test]
    fn minus_identity_detected() {
        let c = code(2, &["ZZ", "-ZZ"]);
        let report = validate(&c);
        assert!(!report.check(CHECK_NO_MINUS_I).unwrap().passed);
        let c = code(2, &["ZZ", "ZZ"]);
        let report = validate(&c);
        assert!(!report.check(CHECK_INDEPENDENT).unwrap().passed);
        assert!(report.check(CHECK_NO_MINUS_I).unwrap().passed);
    }

    #[test]
    fn non_hermitian_generator_rejected() {
        let c = code(1, &["+iZ"]);
        assert!(!validate(&c).check(CHECK_HERMITIAN).unwrap().passed);
    }

    #[test]
    fn membership_tracks_phase() {
        let c = code(2, &["XX", "ZZ"]);
        let yy = parse_pauli("-YY", 2).unwrap();
        // XX·ZZ = (XZ)⊗(XZ) = (-iY)⊗(-iY) = -YY
        assert!(c.contains(&yy, false));
        assert!(!c.contains(&yy.unsigned(), false));
        assert!(c.contains(&yy.unsigned(), true));
        assert!(!c.contains(&parse_pauli("XI", 2).unwrap(), true));
    }

    #[test]
    fn weight_enumeration_counts() {
        let mut count = 0;
        for_each_weight(8, 2, &mut |_| count += 1);
        assert_eq!(count, 28 * 9);
        count = 0;
        for_each_weight(3, 4, &mut |_| count += 1);
        assert_eq!(count, 0);
    }
}
