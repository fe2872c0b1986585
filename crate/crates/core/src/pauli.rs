//! Phase-tracked n-qubit Pauli operators.
//!
//! An operator is stored as packed X and Z bit vectors plus a phase exponent
//! `phase_exp`, meaning the operator `i^phase_exp · σ_0 ⊗ σ_1 ⊗ …` where each
//! `σ_q` is the letter I, X, Y or Z read off the bits (`Y = i·XZ`). Written
//! with this convention every Hermitian Pauli has `phase_exp ∈ {0, 2}`.
//!
//! The check-matrix phase column uses the other common convention, where a
//! qubit with both bits set stands for the product `XZ` rather than `Y`. The
//! two are related by one factor of `i` per Y, see [`PauliOperator::xz_phase`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// Letter product ignoring phase.
    pub fn times(self, other: Pauli) -> Pauli {
        Pauli::from_bits(self.x_bit() ^ other.x_bit(), self.z_bit() ^ other.z_bit())
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        (self.x_bit() & other.z_bit()) == (self.z_bit() & other.x_bit())
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD).max(1)
}

fn popcount(words: impl Iterator<Item = u64>) -> u32 {
    words.map(u64::count_ones).sum()
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliOperator { n, x: vec![0; w], z: vec![0; w], phase: 0 }
    }

    /// `p` acting on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut op = Self::identity(n);
        op.set(q, p);
        op
    }

    pub fn from_sparse(n: usize, factors: &[(usize, Pauli)]) -> Self {
        let mut op = Self::identity(n);
        for &(q, p) in factors {
            op.set(q, p);
        }
        op
    }

    /// Builds an operator from X and Z bit slices, with `phase_exp` in the
    /// letter convention.
    pub fn from_bits(x: &[bool], z: &[bool], phase_exp: u8) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: z.len() });
        }
        let mut op = Self::identity(x.len());
        for q in 0..x.len() {
            op.set(q, Pauli::from_bits(x[q], z[q]));
        }
        op.phase = phase_exp % 4;
        Ok(op)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Exponent of `i` in front of the letter string.
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase_exp: u8) -> Self {
        self.phase = phase_exp % 4;
        self
    }

    /// Number of qubits carrying Y.
    pub fn y_count(&self) -> u32 {
        popcount(self.x.iter().zip(&self.z).map(|(x, z)| x & z))
    }

    /// Phase exponent when the operator is written as `i^φ · X^x Z^z`, i.e.
    /// the value of the check-matrix phase column.
    pub fn xz_phase(&self) -> u8 {
        ((self.phase as u32 + self.y_count()) % 4) as u8
    }

    /// Inverse of [`xz_phase`](Self::xz_phase): sets the phase from an
    /// `i^φ · X^x Z^z` exponent.
    pub fn set_xz_phase(&mut self, xz_phase: u8) {
        let y = (self.y_count() % 4) as u8;
        self.phase = (xz_phase + 4 - y) % 4;
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    /// Overwrites the letter on qubit `q`; `phase_exp` is left untouched.
    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (w, m) = (q / WORD, 1u64 << (q % WORD));
        if p.x_bit() {
            self.x[w] |= m;
        } else {
            self.x[w] &= !m;
        }
        if p.z_bit() {
            self.z[w] |= m;
        } else {
            self.z[w] &= !m;
        }
    }

    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / WORD] >> (q % WORD)) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / WORD] >> (q % WORD)) & 1 == 1
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn weight(&self) -> usize {
        popcount(self.x.iter().zip(&self.z).map(|(x, z)| x | z)) as usize
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x_bit(q) || self.z_bit(q)).collect()
    }

    /// Non-identity factors in ascending qubit order.
    pub fn factors(&self) -> Vec<(usize, Pauli)> {
        self.support().into_iter().map(|q| (q, self.get(q))).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.has_trivial_bits()
    }

    /// True when every tensor factor is I, whatever the phase.
    pub fn has_trivial_bits(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn eq_up_to_phase(&self, other: &Self) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// Same letters with `phase_exp` reset to zero.
    pub fn unsigned(&self) -> Self {
        self.clone().with_phase(0)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        assert_eq!(self.n, other.n, "Pauli operators act on different qubit counts");
        self.anticommutation_bit(other) == 0
    }

    fn anticommutation_bit(&self, other: &Self) -> u8 {
        let mut acc = 0u64;
        for i in 0..self.x.len() {
            acc ^= (self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i]);
        }
        (acc.count_ones() & 1) as u8
    }

    fn product(&self, other: &Self) -> Self {
        // i^(pa+ya) X^xa Z^za · i^(pb+yb) X^xb Z^zb
        //   = i^(pa+ya+pb+yb) (-1)^|za&xb| X^(xa^xb) Z^(za^zb)
        let mut out = Self::identity(self.n);
        let mut swaps = 0u32;
        for i in 0..self.x.len() {
            out.x[i] = self.x[i] ^ other.x[i];
            out.z[i] = self.z[i] ^ other.z[i];
            swaps += (self.z[i] & other.x[i]).count_ones();
        }
        let xz = self.phase as u32 + self.y_count() + other.phase as u32 + other.y_count() + 2 * swaps;
        out.set_xz_phase((xz % 4) as u8);
        out
    }

    /// Maps qubit `q` of `self` to qubit `map[q]` of the result.
    pub fn relabel(&self, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.n);
        let mut out = Self::identity(self.n);
        for q in 0..self.n {
            out.set(map[q], self.get(q));
        }
        out.phase = self.phase;
        out
    }

    /// Embeds into a larger register, qubit `q` going to `q`.
    pub fn extended(&self, n: usize) -> Self {
        assert!(n >= self.n);
        let mut out = Self::identity(n);
        for (q, p) in self.factors() {
            out.set(q, p);
        }
        out.phase = self.phase;
        out
    }

    /// Restriction to the first `n` qubits, dropping the rest.
    pub fn truncated(&self, n: usize) -> Self {
        let mut out = Self::identity(n);
        for (q, p) in self.factors().into_iter().filter(|&(q, _)| q < n) {
            out.set(q, p);
        }
        out.phase = self.phase;
        out
    }

    /// Compact form such as `Z_0X_1Z_2Z_4`; the identity prints as `I`.
    pub fn to_sparse_string(&self) -> String {
        let mut s = phase_prefix(self.phase).to_string();
        let factors = self.factors();
        if factors.is_empty() {
            s.push('I');
        }
        for (q, p) in factors {
            s.push_str(&format!("{}_{}", p.letter(), q));
        }
        s
    }
}

fn phase_prefix(phase: u8) -> &'static str {
    match phase % 4 {
        0 => "",
        1 => "+i",
        2 => "-",
        _ => "-i",
    }
}

fn split_phase(text: &str) -> (u8, &str) {
    for (prefix, phase) in [("+i", 1), ("-i", 3), ("+", 0), ("-", 2)] {
        if let Some(rest) = text.strip_prefix(prefix) {
            return (phase, rest);
        }
    }
    (0, text)
}

/// Symplectic inner product: 0 when `a` and `b` commute, 1 otherwise.
pub fn symplectic_product(a: &PauliOperator, b: &PauliOperator) -> Result<u8> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, found: b.n });
    }
    Ok(a.anticommutation_bit(b))
}

/// Operator product `a·b` with exact phase.
pub fn multiply(a: &PauliOperator, b: &PauliOperator) -> Result<PauliOperator> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, found: b.n });
    }
    Ok(a.product(b))
}

pub fn weight(a: &PauliOperator) -> usize {
    a.weight()
}

/// Parses an optional phase prefix (`+`, `-`, `+i`, `-i`) followed by
/// exactly `n` letters from `IXYZ`.
pub fn parse_pauli(text: &str, n: usize) -> Result<PauliOperator> {
    let err = |reason: String| Error::PauliParse { text: text.to_string(), reason };
    let (phase, body) = split_phase(text.trim());
    let letters: Vec<char> = body.chars().collect();
    if letters.len() != n {
        return Err(err(format!("expected {n} letters, found {}", letters.len())));
    }
    let mut op = PauliOperator::identity(n);
    for (q, c) in letters.into_iter().enumerate() {
        let p = Pauli::from_letter(c).ok_or_else(|| err(format!("bad character {c:?}")))?;
        op.set(q, p);
    }
    op.phase = phase;
    Ok(op)
}

pub fn format_pauli(p: &PauliOperator) -> String {
    p.to_string()
}

/// Parses the compact indexed form, e.g. `Z_1X_3X_4`, `Z1 X3 X4` or `-Y_5`.
/// A lone `I` is the identity.
pub fn parse_sparse(text: &str, n: usize) -> Result<PauliOperator> {
    let err = |reason: String| Error::PauliParse { text: text.to_string(), reason };
    let (phase, body) = split_phase(text.trim());
    let mut op = PauliOperator::identity(n);
    op.phase = phase;
    let cleaned: Vec<char> = body.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
    if cleaned == ['I'] {
        return Ok(op);
    }
    let mut i = 0;
    while i < cleaned.len() {
        let p = Pauli::from_letter(cleaned[i]).ok_or_else(|| err(format!("bad character {:?}", cleaned[i])))?;
        i += 1;
        let start = i;
        while i < cleaned.len() && cleaned[i].is_ascii_digit() {
            i += 1;
        }
        if start == i {
            return Err(err("missing qubit index".into()));
        }
        let q: usize = cleaned[start..i].iter().collect::<String>().parse().map_err(|_| err("bad index".into()))?;
        if q >= n {
            return Err(err(format!("qubit {q} out of range for {n} qubits")));
        }
        if op.get(q) != Pauli::I {
            return Err(err(format!("qubit {q} appears twice")));
        }
        op.set(q, p);
    }
    Ok(op)
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(phase_prefix(self.phase))?;
        for q in 0..self.n {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOperator({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (_, body) = split_phase(s.trim());
        parse_pauli(s, body.chars().count())
    }
}

impl std::ops::Mul for &PauliOperator {
    type Output = PauliOperator;

    fn mul(self, rhs: &PauliOperator) -> PauliOperator {
        assert_eq!(self.n, rhs.n, "Pauli operators act on different qubit counts");
        self.product(rhs)
    }
}
