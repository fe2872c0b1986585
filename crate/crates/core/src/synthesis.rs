//! Encoder and syndrome-extraction circuits.

use crate::circuit::{CliffordCircuit, Gate};
use crate::code::{StabilizerCode, Syndrome};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};
use crate::standard_form::StandardForm;
use crate::tableau::StabilizerTableau;

/// Order in which each generator's factors are coupled to the ancilla.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DetectorSchedule {
    rows: Vec<Vec<(usize, Pauli)>>,
}

impl DetectorSchedule {
    /// Checks that row `i` is a reordering of the factors of generator `i`.
    pub fn new(code: &StabilizerCode, rows: Vec<Vec<(usize, Pauli)>>) -> Result<Self> {
        if rows.len() != code.num_checks() {
            return Err(Error::ScheduleMismatch(format!(
                "{} rows for {} generators",
                rows.len(),
                code.num_checks()
            )));
        }
        for (i, (row, g)) in rows.iter().zip(code.generators()).enumerate() {
            let mut got = row.clone();
            got.sort_by_key(|&(q, _)| q);
            if got != g.factors() {
                let shown: Vec<String> = row.iter().map(|(q, p)| format!("{p}{q}")).collect();
                return Err(Error::ScheduleMismatch(format!(
                    "row {} ({}) is not a reordering of {}",
                    i + 1,
                    shown.join(" "),
                    g.to_sparse_string()
                )));
            }
        }
        Ok(DetectorSchedule { rows })
    }

    /// Factors in ascending qubit order.
    pub fn natural(code: &StabilizerCode) -> Self {
        DetectorSchedule { rows: code.generators().iter().map(PauliOperator::factors).collect() }
    }

    /// Row `i` visits the factors of generator `i` in the order `perms[i]`,
    /// given as indices into its ascending factor list.
    pub fn from_permutations(code: &StabilizerCode, perms: &[Vec<usize>]) -> Result<Self> {
        if perms.len() != code.num_checks() {
            return Err(Error::ScheduleMismatch(format!(
                "{} permutations for {} generators",
                perms.len(),
                code.num_checks()
            )));
        }
        let rows = code
            .generators()
            .iter()
            .zip(perms)
            .map(|(g, perm)| {
                let f = g.factors();
                perm.iter()
                    .map(|&i| f.get(i).copied().ok_or_else(|| Error::ScheduleMismatch(format!("index {i}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(code, rows)
    }

    pub fn rows(&self) -> &[Vec<(usize, Pauli)>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[(usize, Pauli)] {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Row `i` as text, e.g. `Z7 X3 Z0 Z6`.
    pub fn row_string(&self, i: usize) -> String {
        let parts: Vec<String> = self.rows[i].iter().map(|(q, p)| format!("{p}{q}")).collect();
        parts.join(" ")
    }
}

/// Unitary encoder for the code in standard form.
///
/// Input layout: wires `0..n-k` start in |0⟩, wires `n-k..n` carry the
/// logical inputs. The output is on the original qubit labels. The result is
/// checked on a tableau and rejected if any generator ends up with sign −1.
pub fn build_encoder(sf: &StandardForm, k: usize) -> Result<CliffordCircuit> {
    let (n, r, l) = (sf.n(), sf.r(), sf.l());
    if sf.k() != k {
        return Err(Error::EncoderSynthesis(format!("standard form has k = {}, asked for {k}", sf.k())));
    }
    let gens = sf.std_generators();
    let e = sf.e();
    let mut c = CliffordCircuit::new(n, n);

    // Z-only rows with a minus sign need their pivot qubit flipped.
    for t in 0..l {
        match gens[r + t].phase_exp() {
            0 => {}
            2 => {
                c.push(Gate::Pauli(r + t, Pauli::X));
            }
            ph => {
                return Err(Error::EncoderSynthesis(format!("generator M{} has phase i^{ph}", r + t + 1)));
            }
        }
    }

    for j in 0..k {
        let info = r + l + j;
        for t in 0..l {
            if e.get(t, j) {
                c.push(Gate::cx(info, r + t));
            }
        }
    }

    for (i, m) in gens.iter().enumerate().take(r) {
        c.push(Gate::H(i));
        if m.get(i) == Pauli::Y {
            c.push(Gate::S(i));
        }
        match m.phase_exp() {
            0 => {}
            2 => {
                c.push(Gate::Pauli(i, Pauli::Z));
            }
            ph => {
                return Err(Error::EncoderSynthesis(format!("generator M{} has phase i^{ph}", i + 1)));
            }
        }
        for (q, p) in m.factors() {
            if q != i {
                c.push(Gate::Controlled { control: i, target: q, pauli: p });
            }
        }
    }

    // wire w holds standard label at[w]; move label s onto wire perm[s]
    let perm = sf.qubit_permutation();
    let mut at: Vec<usize> = (0..n).collect();
    let mut wire_of: Vec<usize> = (0..n).collect();
    for s in 0..n {
        let (from, to) = (wire_of[s], perm[s]);
        if from != to {
            c.push(Gate::Swap(from, to));
            let other = at[to];
            at.swap(from, to);
            wire_of[s] = to;
            wire_of[other] = from;
        }
    }

    let mut t = StabilizerTableau::new(n);
    let mut rng = rand::rngs::mock::StepRng::new(0, 0);
    t.run(&c, &[], &mut rng)?;
    for (i, g) in sf.std_generators_original().iter().enumerate() {
        let v = t.measure_observable(g)?;
        if v != 1 {
            return Err(Error::EncoderSynthesis(format!(
                "encoded state has expectation {v} for generator M{} = {g}",
                i + 1
            )));
        }
    }
    Ok(c)
}

/// Encoder for `code` computed through its standard form.
pub fn encoder_for(code: &StabilizerCode) -> Result<(CliffordCircuit, StandardForm)> {
    let sf = crate::standard_form::standard_form(&crate::standard_form::ExtendedCheckMatrix::from_code(code))?;
    let enc = build_encoder(&sf, code.k())?;
    Ok((enc, sf))
}

/// Bare-ancilla syndrome extraction: ancilla `n`, one reset/couple/measure
/// block per generator. Every instruction is a noise site.
pub fn build_detector(code: &StabilizerCode, sched: &DetectorSchedule) -> Result<CliffordCircuit> {
    let checked = DetectorSchedule::new(code, sched.rows.clone())?;
    let n = code.n();
    let a = n;
    let mut c = CliffordCircuit::new(n + 1, n);
    for (i, row) in checked.rows.iter().enumerate() {
        c.push_noisy(Gate::ResetPlus(a));
        for &(q, p) in row {
            c.push_noisy(Gate::Controlled { control: a, target: q, pauli: p });
        }
        c.push_noisy(Gate::MeasureX { qubit: a, bit: i });
    }
    Ok(c)
}

/// Converts raw detector outcomes into a syndrome. A generator written with a
/// leading minus sign reads outcome 1 on the code space, so its bit is
/// inverted.
pub fn syndrome_from_bits(code: &StabilizerCode, bits: &[bool]) -> Syndrome {
    let mut s = Syndrome::zero(code.num_checks());
    for (i, g) in code.generators().iter().enumerate() {
        s.set(i, bits[i] ^ (g.phase_exp() == 2));
    }
    s
}
