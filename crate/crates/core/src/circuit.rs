//! Clifford circuit representation.

use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    /// Single-qubit Pauli gate.
    Pauli(usize, Pauli),
    /// Controlled-P with the control listed first.
    Controlled { control: usize, target: usize, pauli: Pauli },
    Swap(usize, usize),
    PrepZero(usize),
    PrepPlus(usize),
    MeasureZ { qubit: usize, bit: usize },
    MeasureX { qubit: usize, bit: usize },
    /// Measure-and-discard followed by preparation of |+⟩.
    ResetPlus(usize),
}

impl Gate {
    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::Controlled { control, target, pauli: Pauli::X }
    }

    pub fn cy(control: usize, target: usize) -> Gate {
        Gate::Controlled { control, target, pauli: Pauli::Y }
    }

    pub fn cz(control: usize, target: usize) -> Gate {
        Gate::Controlled { control, target, pauli: Pauli::Z }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::Pauli(q, _)
            | Gate::PrepZero(q)
            | Gate::PrepPlus(q)
            | Gate::ResetPlus(q)
            | Gate::MeasureZ { qubit: q, .. }
            | Gate::MeasureX { qubit: q, .. } => vec![q],
            Gate::Controlled { control, target, .. } => vec![control, target],
            Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(
            self,
            Gate::PrepZero(_) | Gate::PrepPlus(_) | Gate::MeasureZ { .. } | Gate::MeasureX { .. } | Gate::ResetPlus(_)
        )
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Controlled { .. } | Gate::Swap(..))
    }

    pub fn is_single_qubit_unitary(&self) -> bool {
        matches!(self, Gate::H(_) | Gate::S(_) | Gate::Sdg(_) | Gate::Pauli(..))
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Gate::MeasureZ { .. } | Gate::MeasureX { .. })
    }

    pub fn is_preparation(&self) -> bool {
        matches!(self, Gate::PrepZero(_) | Gate::PrepPlus(_) | Gate::ResetPlus(_))
    }

    pub fn inverse(&self) -> Option<Gate> {
        match *self {
            Gate::S(q) => Some(Gate::Sdg(q)),
            Gate::Sdg(q) => Some(Gate::S(q)),
            g if g.is_unitary() => Some(g),
            _ => None,
        }
    }

    /// Heisenberg image `U p U†` of a Pauli under this gate. Panics on
    /// non-unitary gates.
    pub fn conjugate(&self, p: &PauliOperator) -> PauliOperator {
        let n = p.num_qubits();
        let x = |q| PauliOperator::single(n, q, Pauli::X);
        let z = |q| PauliOperator::single(n, q, Pauli::Z);
        match *self {
            Gate::H(q) => conjugate_local(p, &[(q, z(q), x(q))]),
            Gate::S(q) => conjugate_local(p, &[(q, PauliOperator::single(n, q, Pauli::Y), z(q))]),
            Gate::Sdg(q) => conjugate_local(p, &[(q, PauliOperator::single(n, q, Pauli::Y).with_phase(2), z(q))]),
            Gate::Pauli(q, g) => {
                let sign = |l: Pauli| if l.commutes_with(g) { 0 } else { 2 };
                conjugate_local(p, &[(q, x(q).with_phase(sign(Pauli::X)), z(q).with_phase(sign(Pauli::Z)))])
            }
            Gate::Controlled { control: c, target: t, pauli } => {
                let on_target = PauliOperator::single(n, t, pauli);
                let image = |letter: Pauli| {
                    let base = PauliOperator::single(n, t, letter);
                    if letter.commutes_with(pauli) {
                        base
                    } else {
                        &z(c) * &base
                    }
                };
                conjugate_local(p, &[(c, &x(c) * &on_target, z(c)), (t, image(Pauli::X), image(Pauli::Z))])
            }
            Gate::Swap(a, b) => conjugate_local(p, &[(a, x(b), z(b)), (b, x(a), z(a))]),
            g => panic!("cannot conjugate through non-unitary gate {g}"),
        }
    }
}

/// Rebuilds `p` from images of X and Z on the listed qubits, using
/// `Y = i·X·Z` for Y factors.
fn conjugate_local(p: &PauliOperator, images: &[(usize, PauliOperator, PauliOperator)]) -> PauliOperator {
    let mut rest = p.clone();
    for (q, _, _) in images {
        rest.set(*q, Pauli::I);
    }
    let mut out = rest;
    for (q, img_x, img_z) in images {
        match p.get(*q) {
            Pauli::I => {}
            Pauli::X => out = &out * img_x,
            Pauli::Z => out = &out * img_z,
            Pauli::Y => {
                let xz = img_x * img_z;
                let phase = xz.phase_exp() + 1;
                out = &out * &xz.with_phase(phase);
            }
        }
    }
    out
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Sdg(q) => write!(f, "SDG {q}"),
            Gate::Pauli(q, p) => write!(f, "{p} {q}"),
            Gate::Controlled { control, target, pauli } => write!(f, "C{pauli} {control} {target}"),
            Gate::Swap(a, b) => write!(f, "SWAP {a} {b}"),
            Gate::PrepZero(q) => write!(f, "PREP0 {q}"),
            Gate::PrepPlus(q) => write!(f, "PREP+ {q}"),
            Gate::MeasureZ { qubit, bit } => write!(f, "MZ {qubit} -> c{bit}"),
            Gate::MeasureX { qubit, bit } => write!(f, "MX {qubit} -> c{bit}"),
            Gate::ResetPlus(q) => write!(f, "RESET+ {q}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instruction {
    pub gate: Gate,
    /// Whether the noise model may attach faults after this instruction.
    pub noise_site: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordCircuit {
    n_qubits: usize,
    n_data: usize,
    n_bits: usize,
    ops: Vec<Instruction>,
}

impl CliffordCircuit {
    /// Circuit on `n_qubits`, of which the first `n_data` are data qubits and
    /// the rest ancillas (the split only affects the text dump).
    pub fn new(n_qubits: usize, n_data: usize) -> Self {
        assert!(n_data <= n_qubits);
        CliffordCircuit { n_qubits, n_data, n_bits: 0, ops: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_data(&self) -> usize {
        self.n_data
    }

    /// Number of classical bits written by measurements.
    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn ops(&self) -> &[Instruction] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.push_instruction(Instruction { gate, noise_site: false })
    }

    pub fn push_noisy(&mut self, gate: Gate) -> &mut Self {
        self.push_instruction(Instruction { gate, noise_site: true })
    }

    pub fn push_instruction(&mut self, ins: Instruction) -> &mut Self {
        let qubits = ins.gate.qubits();
        for &q in &qubits {
            assert!(q < self.n_qubits, "qubit {q} out of range in {}", ins.gate);
        }
        if qubits.len() == 2 {
            assert_ne!(qubits[0], qubits[1], "two-qubit gate on a single qubit: {}", ins.gate);
        }
        if let Gate::MeasureZ { bit, .. } | Gate::MeasureX { bit, .. } = ins.gate {
            assert!(
                !self.ops.iter().any(|o| matches!(o.gate,
                    Gate::MeasureZ { bit: b, .. } | Gate::MeasureX { bit: b, .. } if b == bit)),
                "classical bit {bit} written twice"
            );
            self.n_bits = self.n_bits.max(bit + 1);
        }
        self.ops.push(ins);
        self
    }

    pub fn extend(&mut self, other: &CliffordCircuit) -> &mut Self {
        for ins in &other.ops {
            self.push_instruction(*ins);
        }
        self
    }

    pub fn is_unitary(&self) -> bool {
        self.ops.iter().all(|o| o.gate.is_unitary())
    }

    pub fn noise_sites(&self) -> impl Iterator<Item = (usize, &Instruction)> {
        self.ops.iter().enumerate().filter(|(_, o)| o.noise_site)
    }

    /// Gates reversed and inverted. Fails on measurements and preparations.
    pub fn adjoint(&self) -> Result<CliffordCircuit> {
        let mut out = CliffordCircuit::new(self.n_qubits, self.n_data);
        for (index, ins) in self.ops.iter().enumerate().rev() {
            let gate = ins
                .gate
                .inverse()
                .ok_or_else(|| Error::NotInvertible { index, gate: ins.gate.to_string() })?;
            out.push_instruction(Instruction { gate, noise_site: ins.noise_site });
        }
        Ok(out)
    }

    /// Heisenberg image of `p` under the whole (unitary) circuit.
    pub fn conjugate(&self, p: &PauliOperator) -> PauliOperator {
        self.ops.iter().fold(p.clone(), |acc, ins| ins.gate.conjugate(&acc))
    }

    fn qubit_name(&self, q: usize) -> String {
        if q < self.n_data {
            format!("d{q}")
        } else if self.n_qubits - self.n_data == 1 {
            "a".to_string()
        } else {
            format!("a{}", q - self.n_data)
        }
    }

    /// One instruction per line, e.g. `CZ a d7`; noise sites end in ` ~`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for ins in &self.ops {
            let name = |q| self.qubit_name(q);
            let line = match ins.gate {
                Gate::H(q) => format!("H {}", name(q)),
                Gate::S(q) => format!("S {}", name(q)),
                Gate::Sdg(q) => format!("SDG {}", name(q)),
                Gate::Pauli(q, p) => format!("{p} {}", name(q)),
                Gate::Controlled { control, target, pauli } => {
                    format!("C{pauli} {} {}", name(control), name(target))
                }
                Gate::Swap(a, b) => format!("SWAP {} {}", name(a), name(b)),
                Gate::PrepZero(q) => format!("PREP0 {}", name(q)),
                Gate::PrepPlus(q) => format!("PREP+ {}", name(q)),
                Gate::MeasureZ { qubit, bit } => format!("MZ {} c{bit}", name(qubit)),
                Gate::MeasureX { qubit, bit } => format!("MX {} c{bit}", name(qubit)),
                Gate::ResetPlus(q) => format!("RESET+ {}", name(q)),
            };
            out.push_str(&line);
            if ins.noise_site {
                out.push_str(" ~");
            }
            out.push('\n');
        }
        out
    }
}
