//! Circuit-level noise models.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::circuit::{CliffordCircuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::tableau::{FaultEvent, FaultKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    /// Uniform two-qubit depolarizing after coupling gates.
    StandardDepolarizing,
    /// Correlated `Z ⊗ P` after a controlled-P gate, then independent
    /// single-qubit depolarizing on both qubits.
    Anisotropic,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::StandardDepolarizing => "std-dep",
            NoiseKind::Anisotropic => "anisotropic",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "std-dep" | "standard" | "depolarizing" => Ok(NoiseKind::StandardDepolarizing),
            "anisotropic" | "aniso" => Ok(NoiseKind::Anisotropic),
            _ => Err(Error::InvalidCode(format!("unknown noise model {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    /// Single-qubit gate error probability.
    pub p_s: f64,
    /// Two-qubit gate error probability.
    pub p_t: f64,
    pub p_meas: f64,
    pub p_prep: f64,
}

impl NoiseModel {
    /// All four probabilities equal to `p`.
    pub fn uniform(kind: NoiseKind, p: f64) -> Self {
        NoiseModel { kind, p_s: p, p_t: p, p_meas: p, p_prep: p }
    }

    pub fn noiseless(kind: NoiseKind) -> Self {
        Self::uniform(kind, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p_s", self.p_s), ("p_t", self.p_t), ("p_meas", self.p_meas), ("p_prep", self.p_prep)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidCode(format!("{name} = {v} is not a probability")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_s == 0.0 && self.p_t == 0.0 && self.p_meas == 0.0 && self.p_prep == 0.0
    }
}

/// The 15 non-identity two-qubit Paulis, first factor outer.
pub fn two_qubit_paulis() -> impl Iterator<Item = (Pauli, Pauli)> {
    Pauli::ALL
        .into_iter()
        .flat_map(|a| Pauli::ALL.into_iter().map(move |b| (a, b)))
        .filter(|&(a, b)| a != Pauli::I || b != Pauli::I)
}

fn uniform_pauli<R: Rng + ?Sized>(rng: &mut R) -> Pauli {
    Pauli::NONTRIVIAL[rng.gen_range(0..3)]
}

/// Draws the faults for one execution of `circuit`.
pub fn sample_faults<R: Rng + ?Sized>(circuit: &CliffordCircuit, noise: &NoiseModel, rng: &mut R) -> Vec<FaultEvent> {
    let mut out = Vec::new();
    if noise.is_noiseless() {
        return out;
    }
    for (site, ins) in circuit.noise_sites() {
        let gate = ins.gate;
        if gate.is_measurement() {
            if rng.gen_bool(noise.p_meas) {
                out.push(FaultEvent { site, kind: FaultKind::MeasurementFlip });
            }
        } else if gate.is_preparation() {
            if rng.gen_bool(noise.p_prep) {
                out.push(FaultEvent { site, kind: FaultKind::PreparationFlip });
            }
        } else if gate.is_two_qubit() {
            let (a, b) = match gate {
                Gate::Controlled { control, target, .. } => (control, target),
                Gate::Swap(a, b) => (a, b),
                _ => unreachable!("two-qubit gate"),
            };
            match (noise.kind, gate) {
                (NoiseKind::Anisotropic, Gate::Controlled { control, target, pauli }) => {
                    let mut factors = Vec::new();
                    if rng.gen_bool(noise.p_t) {
                        factors.push((control, Pauli::Z));
                        factors.push((target, pauli));
                    }
                    for q in [control, target] {
                        if rng.gen_bool(noise.p_s) {
                            factors.push((q, uniform_pauli(rng)));
                        }
                    }
                    if !factors.is_empty() {
                        out.push(FaultEvent { site, kind: FaultKind::Pauli(factors) });
                    }
                }
                _ => {
                    if rng.gen_bool(noise.p_t) {
                        let idx = rng.gen_range(1..16);
                        let (pa, pb) = (Pauli::ALL[idx / 4], Pauli::ALL[idx % 4]);
                        let factors = [(a, pa), (b, pb)].into_iter().filter(|f| f.1 != Pauli::I).collect();
                        out.push(FaultEvent { site, kind: FaultKind::Pauli(factors) });
                    }
                }
            }
        } else if gate.is_single_qubit_unitary() && rng.gen_bool(noise.p_s) {
            let q = gate.qubits()[0];
            out.push(FaultEvent { site, kind: FaultKind::Pauli(vec![(q, uniform_pauli(rng))]) });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fifteen_pairs() {
        let all: Vec<_> = two_qubit_paulis().collect();
        assert_eq!(all.len(), 15);
        assert_eq!(all[0], (Pauli::I, Pauli::X));
    }

    #[test]
    fn zero_noise_draws_nothing() {
        let mut c = CliffordCircuit::new(2, 1);
        c.push_noisy(Gate::ResetPlus(1)).push_noisy(Gate::cz(1, 0)).push_noisy(Gate::MeasureX { qubit: 1, bit: 0 });
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for kind in [NoiseKind::StandardDepolarizing, NoiseKind::Anisotropic] {
            assert!(sample_faults(&c, &NoiseModel::noiseless(kind), &mut rng).is_empty());
        }
    }

    #[test]
    fn anisotropic_aligns_with_gate() {
        let mut c = CliffordCircuit::new(2, 1);
        c.push_noisy(Gate::cx(1, 0));
        let noise = NoiseModel { kind: NoiseKind::Anisotropic, p_s: 0.0, p_t: 1.0, p_meas: 0.0, p_prep: 0.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let f = sample_faults(&c, &noise, &mut rng);
            assert_eq!(f, vec![FaultEvent { site: 0, kind: FaultKind::Pauli(vec![(1, Pauli::Z), (0, Pauli::X)]) }]);
        }
    }

    #[test]
    fn noise_kind_names() {
        assert_eq!("std-dep".parse::<NoiseKind>().unwrap(), NoiseKind::StandardDepolarizing);
        assert_eq!(NoiseKind::Anisotropic.to_string(), "anisotropic");
        assert!("pink".parse::<NoiseKind>().is_err());
    }
}
