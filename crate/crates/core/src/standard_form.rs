//! Phase-annotated check matrices and their reduction to standard form.
//!
//! Row additions are carried out as Pauli multiplications, so the phase column
//! stays exact (mod 4) through the whole elimination. Column swaps relabel
//! qubits and are recorded in [`StandardForm::qubit_permutation`].

use std::fmt;

use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::pauli::PauliOperator;

/// Dense row-major bit matrix, used for the standard-form blocks.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { rows, cols, data: vec![false; rows * cols] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&b| !b)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `[Hx | Hz]` plus a phase column. The phase column holds the exponent of
/// `i` when a row is read as `X^x Z^z` (so every Y contributes one `i`).
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedCheckMatrix {
    n: usize,
    rows: Vec<PauliOperator>,
}

impl ExtendedCheckMatrix {
    pub fn from_code(code: &StabilizerCode) -> Self {
        ExtendedCheckMatrix { n: code.n(), rows: code.generators().to_vec() }
    }

    /// Builds the matrix from raw `2n`-bit rows and phase-column values.
    pub fn from_rows(n: usize, bits: &[Vec<bool>], phase_col: &[u8]) -> Result<Self> {
        if bits.len() != phase_col.len() {
            return Err(Error::InvalidCode("phase column length differs from row count".into()));
        }
        let rows = bits
            .iter()
            .zip(phase_col)
            .map(|(row, &phase)| {
                if row.len() != 2 * n {
                    return Err(Error::DimensionMismatch { expected: 2 * n, found: row.len() });
                }
                let mut p = PauliOperator::from_bits(&row[..n], &row[n..], 0)?;
                p.set_xz_phase(phase % 4);
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtendedCheckMatrix { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row_bits(&self, i: usize) -> Vec<bool> {
        let p = &self.rows[i];
        (0..self.n).map(|q| p.x_bit(q)).chain((0..self.n).map(|q| p.z_bit(q))).collect()
    }

    pub fn phase_col(&self, i: usize) -> u8 {
        self.rows[i].xz_phase()
    }

    pub fn row_operator(&self, i: usize) -> &PauliOperator {
        &self.rows[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm {
    n: usize,
    r: usize,
    l: usize,
    /// `qubit_permutation[s]` is the original index of standard-form qubit `s`.
    qubit_permutation: Vec<usize>,
    /// Reduced generators in standard-form qubit labels.
    std_generators: Vec<PauliOperator>,
}

fn swap_qubits(rows: &mut [PauliOperator], a: usize, b: usize) {
    if a == b {
        return;
    }
    for row in rows {
        let (pa, pb) = (row.get(a), row.get(b));
        row.set(a, pb);
        row.set(b, pa);
    }
}

fn eliminate(rows: &mut [PauliOperator], pivot_row: usize, has_bit: impl Fn(&PauliOperator) -> bool) {
    let pivot = rows[pivot_row].clone();
    for (j, row) in rows.iter_mut().enumerate() {
        if j != pivot_row && has_bit(row) {
            *row = &*row * &pivot;
        }
    }
}

/// Finds the leftmost column in `cols` holding a set bit in one of `rows`,
/// returning `(row, col)` for the topmost such row.
fn find_pivot(
    rows: &[PauliOperator],
    candidate_rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
    has_bit: impl Fn(&PauliOperator, usize) -> bool,
) -> Option<(usize, usize)> {
    for c in cols {
        if let Some(i) = candidate_rows.clone().find(|&i| has_bit(&rows[i], c)) {
            return Some((i, c));
        }
    }
    None
}

/// Reduces the check matrix to standard form by Gaussian elimination with
/// column swaps.
pub fn standard_form(m: &ExtendedCheckMatrix) -> Result<StandardForm> {
    let n = m.n;
    let nk = m.rows.len();
    let mut rows = m.rows.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    let mut r = 0;
    while let Some((i, c)) = find_pivot(&rows, r..nk, r..n, |p, c| p.x_bit(c)) {
        rows.swap(r, i);
        swap_qubits(&mut rows, r, c);
        perm.swap(r, c);
        eliminate(&mut rows, r, |p| p.x_bit(r));
        r += 1;
    }

    let mut l = 0;
    while let Some((i, c)) = find_pivot(&rows, r + l..nk, r + l..n, |p, c| p.z_bit(c)) {
        let (row, col) = (r + l, r + l);
        rows.swap(row, i);
        swap_qubits(&mut rows, col, c);
        perm.swap(col, c);
        eliminate(&mut rows, row, |p| p.z_bit(col));
        l += 1;
    }

    if r + l != nk {
        return Err(Error::InvalidCode(format!(
            "check matrix has rank {} but {nk} rows; generators are dependent",
            r + l
        )));
    }
    Ok(StandardForm { n, r, l, qubit_permutation: perm, std_generators: rows })
}

impl StandardForm {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Rank of the X block.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.n - self.r - self.l
    }

    pub fn qubit_permutation(&self) -> &[usize] {
        &self.qubit_permutation
    }

    /// `M_1 … M_{n-k}` in standard-form qubit labels.
    pub fn std_generators(&self) -> &[PauliOperator] {
        &self.std_generators
    }

    /// Phase of each standard generator once its Y factors have absorbed
    /// their factor of `i`: the `i` exponent in front of the letter string.
    pub fn std_phases(&self) -> Vec<u8> {
        self.std_generators.iter().map(PauliOperator::phase_exp).collect()
    }

    /// The phase column of the reduced matrix, before Y absorption.
    pub fn phase_column(&self) -> Vec<u8> {
        self.std_generators.iter().map(PauliOperator::xz_phase).collect()
    }

    /// Maps an operator from standard-form labels back to original qubits.
    pub fn to_original(&self, p: &PauliOperator) -> PauliOperator {
        p.relabel(&self.qubit_permutation)
    }

    pub fn std_generators_original(&self) -> Vec<PauliOperator> {
        self.std_generators.iter().map(|g| self.to_original(g)).collect()
    }

    fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>, z: bool) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows.len(), cols.len());
        for (i, row) in rows.clone().enumerate() {
            for (j, col) in cols.clone().enumerate() {
                let g = &self.std_generators[row];
                m.set(i, j, if z { g.z_bit(col) } else { g.x_bit(col) });
            }
        }
        m
    }

    fn ranges(&self) -> (std::ops::Range<usize>, std::ops::Range<usize>, std::ops::Range<usize>) {
        let (r, l, n) = (self.r, self.l, self.n);
        (0..r, r..r + l, r + l..n)
    }

    pub fn a(&self) -> BitMatrix {
        let (top, mid, _) = self.ranges();
        self.block(top, mid, false)
    }

    pub fn a_prime(&self) -> BitMatrix {
        let (top, _, last) = self.ranges();
        self.block(top, last, false)
    }

    pub fn b(&self) -> BitMatrix {
        let (top, _, _) = self.ranges();
        self.block(top.clone(), top, true)
    }

    pub fn c(&self) -> BitMatrix {
        let (top, _, last) = self.ranges();
        self.block(top, last, true)
    }

    pub fn d(&self) -> BitMatrix {
        let (top, mid, _) = self.ranges();
        self.block(mid, top, true)
    }

    pub fn e(&self) -> BitMatrix {
        let (_, mid, last) = self.ranges();
        self.block(mid, last, true)
    }

    /// Checks the fixed identity and zero blocks of the standard shape.
    pub fn has_standard_shape(&self) -> bool {
        let (top, mid, last) = self.ranges();
        let r = self.r;
        self.block(top.clone(), top.clone(), false) == BitMatrix::identity(r)
            && self.block(top.clone(), mid.clone(), true).is_zero()
            && self.block(mid.clone(), top.clone(), false).is_zero()
            && self.block(mid.clone(), mid.clone(), false).is_zero()
            && self.block(mid.clone(), last, false).is_zero()
            && self.block(mid.clone(), mid, true) == BitMatrix::identity(self.l)
    }
}

/// Logical operators read off the standard form, in original qubit labels.
pub fn derive_logicals(sf: &StandardForm) -> (Vec<PauliOperator>, Vec<PauliOperator>) {
    let (r, l, n, k) = (sf.r, sf.l, sf.n, sf.k());
    let (e, c, a_prime) = (sf.e(), sf.c(), sf.a_prime());
    let mut xs = Vec::with_capacity(k);
    let mut zs = Vec::with_capacity(k);
    for j in 0..k {
        let mut x_bits = vec![false; n];
        let mut z_bits = vec![false; n];
        for t in 0..l {
            x_bits[r + t] = e.get(t, j);
        }
        x_bits[r + l + j] = true;
        for i in 0..r {
            z_bits[i] = c.get(i, j);
        }
        let x_bar = PauliOperator::from_bits(&x_bits, &z_bits, 0).expect("equal lengths");

        let mut z_bits = vec![false; n];
        for i in 0..r {
            z_bits[i] = a_prime.get(i, j);
        }
        z_bits[r + l + j] = true;
        let z_bar = PauliOperator::from_bits(&vec![false; n], &z_bits, 0).expect("equal lengths");

        xs.push(sf.to_original(&x_bar));
        zs.push(sf.to_original(&z_bar));
    }
    (xs, zs)
}

/// Fills in logical operators for a code defined by generators alone.
pub fn with_derived_logicals(code: &StabilizerCode) -> Result<StabilizerCode> {
    let sf = standard_form(&ExtendedCheckMatrix::from_code(code))?;
    let (xs, zs) = derive_logicals(&sf);
    Ok(StabilizerCode::new(code.n(), code.generators().to_vec(), xs, zs)?.with_name(code.name()))
}
