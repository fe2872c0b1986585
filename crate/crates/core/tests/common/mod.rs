//! Dense statevector reference simulator for small circuits.
#![allow(dead_code)]

use num_complex::Complex64;
use stabilizer_lab::{Gate, Pauli, PauliOperator};

pub const TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct StateVector {
    pub n: usize,
    pub amp: Vec<Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        let mut amp = vec![c(0.0, 0.0); 1 << n];
        amp[0] = c(1.0, 0.0);
        StateVector { n, amp }
    }

    fn single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1 << q;
        for i in 0..self.amp.len() {
            if i & bit == 0 {
                let (a, b) = (self.amp[i], self.amp[i | bit]);
                self.amp[i] = m[0][0] * a + m[0][1] * b;
                self.amp[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn matrix(p: Pauli) -> [[Complex64; 2]; 2] {
        let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
        match p {
            Pauli::I => [[o, z], [z, o]],
            Pauli::X => [[z, o], [o, z]],
            Pauli::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
            Pauli::Z => [[o, z], [z, -o]],
        }
    }

    pub fn pauli(&mut self, q: usize, p: Pauli) {
        self.single(q, Self::matrix(p));
    }

    fn controlled(&mut self, control: usize, target: usize, p: Pauli) {
        let m = Self::matrix(p);
        let (cb, tb) = (1 << control, 1 << target);
        for i in 0..self.amp.len() {
            if i & cb != 0 && i & tb == 0 {
                let (a, b) = (self.amp[i], self.amp[i | tb]);
                self.amp[i] = m[0][0] * a + m[0][1] * b;
                self.amp[i | tb] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    pub fn apply_unitary(&mut self, g: &Gate) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match *g {
            Gate::H(q) => self.single(q, [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]),
            Gate::S(q) => self.single(q, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]),
            Gate::Sdg(q) => self.single(q, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]]),
            Gate::Pauli(q, p) => self.pauli(q, p),
            Gate::Controlled { control, target, pauli } => self.controlled(control, target, pauli),
            Gate::Swap(a, b) => {
                let (ab, bb) = (1 << a, 1 << b);
                for i in 0..self.amp.len() {
                    if i & ab != 0 && i & bb == 0 {
                        self.amp.swap(i, i ^ ab ^ bb);
                    }
                }
            }
            _ => panic!("not unitary: {g}"),
        }
    }

    /// `P |ψ⟩` for an n-qubit Pauli including its phase.
    pub fn apply_operator(&self, p: &PauliOperator) -> StateVector {
        let mut out = self.clone();
        for (q, l) in p.factors() {
            out.pauli(q, l);
        }
        let phase = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][p.phase_exp() as usize];
        out.amp.iter_mut().for_each(|a| *a *= phase);
        out
    }

    pub fn expectation(&self, p: &PauliOperator) -> Complex64 {
        let v = self.apply_operator(p);
        self.amp.iter().zip(&v.amp).map(|(a, b)| a.conj() * b).sum()
    }

    /// Projects onto the `outcome` eigenspace of a Hermitian Pauli and
    /// renormalises; returns the probability of that outcome.
    pub fn project(&mut self, p: &PauliOperator, minus: bool) -> f64 {
        let v = self.apply_operator(p);
        let s = if minus { -1.0 } else { 1.0 };
        for (a, b) in self.amp.iter_mut().zip(&v.amp) {
            *a = (*a + b * s) * 0.5;
        }
        let prob: f64 = self.amp.iter().map(|a| a.norm_sqr()).sum();
        if prob > TOL {
            let k = prob.sqrt();
            self.amp.iter_mut().for_each(|a| *a /= k);
        }
        prob
    }

    pub fn prob_z(&self, q: usize, one: bool) -> f64 {
        self.amp
            .iter()
            .enumerate()
            .filter(|(i, _)| ((i >> q) & 1 == 1) == one)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

pub fn data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

/// The shipped [[8,1,3]] definition and its code.
pub fn code_813() -> (stabilizer_lab::codefile::CodeDefinition, stabilizer_lab::StabilizerCode) {
    let def = stabilizer_lab::codefile::CodeDefinition::read(&data_dir().join("code_8_1_3.txt")).unwrap();
    let code = def.code().unwrap();
    (def, code)
}
