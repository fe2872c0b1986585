//! One error-correction trial: encode |0̄⟩, extract syndromes with
//! repeat-until-agree, correct, decode and classify.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::circuit::{CliffordCircuit, Gate};
use crate::code::{StabilizerCode, Syndrome};
use crate::error::{Error, Result};
use crate::ft::{build_lookup_table_permissive, check_fault_tolerance, correct, FtReport, SyndromeTable};
use crate::pauli::{Pauli, PauliOperator};
use crate::noise::{sample_faults, NoiseModel};
use crate::synthesis::{build_detector, encoder_for, syndrome_from_bits, DetectorSchedule};
use crate::tableau::{FaultEvent, Observable, StabilizerTableau};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Practical,
    /// Adds a noiseless detection and correction round before decoding.
    Modified,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Practical => "practical",
            Method::Modified => "modified",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "practical" => Ok(Method::Practical),
            "modified" => Ok(Method::Modified),
            _ => Err(Error::InvalidCode(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub code: StabilizerCode,
    pub schedule: DetectorSchedule,
    pub method: Method,
    pub noise: NoiseModel,
    pub max_detector_rounds: usize,
}

impl TrialConfig {
    pub fn new(code: StabilizerCode, schedule: DetectorSchedule, method: Method, noise: NoiseModel) -> Self {
        TrialConfig { code, schedule, method, noise, max_detector_rounds: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Fidelity,
    LogicalError,
    OutOfCodespace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub classification: Classification,
    pub rounds_used: usize,
    /// Syndromes of every noisy round, in order.
    pub syndromes: Vec<Syndrome>,
    /// Whether the decoder knew the syndrome it was given.
    pub known: bool,
}

/// Everything a trial needs, built once per configuration.
#[derive(Debug, Clone)]
pub struct Pipeline {
    code: StabilizerCode,
    method: Method,
    noise: NoiseModel,
    max_rounds: usize,
    detector: CliffordCircuit,
    decoder: CliffordCircuit,
    /// `E Z_q E†` for each data qubit `q`: measuring these is the same as
    /// running the decoder and reading its record.
    decoded_z: Vec<PauliOperator>,
    decoded_obs: Vec<Observable>,
    table: SyndromeTable,
    ft: FtReport,
    encoded: StabilizerTableau,
}

impl Pipeline {
    /// Builds circuits and the lookup table. A schedule that is not fault
    /// tolerant is accepted (see [`Pipeline::ft_report`]); its table keeps the
    /// first of any colliding errors.
    pub fn new(cfg: &TrialConfig) -> Result<Self> {
        cfg.noise.validate()?;
        if cfg.max_detector_rounds < 2 {
            return Err(Error::InvalidCode("at least two detector rounds are required".into()));
        }
        let code = &cfg.code;
        let n = code.n();
        let (encoder, _) = encoder_for(code)?;
        let detector = build_detector(code, &cfg.schedule)?;
        let mut decoder = CliffordCircuit::new(n + 1, n);
        decoder.extend(&encoder.adjoint()?);
        for q in 0..n {
            decoder.push(Gate::MeasureZ { qubit: q, bit: q });
        }
        let decoded_z: Vec<PauliOperator> = (0..n)
            .map(|q| encoder.conjugate(&PauliOperator::single(n, q, Pauli::Z)).extended(n + 1))
            .collect();
        let decoded_obs = decoded_z.iter().map(Observable::new).collect::<Result<_>>()?;
        let table = build_lookup_table_permissive(code, &cfg.schedule)?;
        let ft = check_fault_tolerance(code, &cfg.schedule)?;
        let mut encoded = StabilizerTableau::new(n + 1);
        encoded.run(&encoder, &[], &mut rand::rngs::mock::StepRng::new(0, 0))?;
        Ok(Pipeline {
            code: code.clone(),
            method: cfg.method,
            noise: cfg.noise,
            max_rounds: cfg.max_detector_rounds,
            detector,
            decoder,
            decoded_z,
            decoded_obs,
            table,
            ft,
            encoded,
        })
    }

    pub fn ft_report(&self) -> &FtReport {
        &self.ft
    }

    pub fn detector(&self) -> &CliffordCircuit {
        &self.detector
    }

    /// Adjoint encoder followed by Z measurements of every data qubit.
    pub fn decoder(&self) -> &CliffordCircuit {
        &self.decoder
    }

    /// Heisenberg images of the decoder's measurements.
    pub fn decoded_observables(&self) -> &[PauliOperator] {
        &self.decoded_z
    }

    pub fn table(&self) -> &SyndromeTable {
        &self.table
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    /// A sampled trial with the configured method.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TrialResult> {
        let (practical, modified) = self.run_both(rng)?;
        Ok(match self.method {
            Method::Practical => practical,
            Method::Modified => modified,
        })
    }

    /// One sampled trial, classified under both methods. The projection round
    /// is noiseless and draws no randomness, so both results are what
    /// separate runs with the same stream would give.
    pub fn run_both<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(TrialResult, TrialResult)> {
        let noise = self.noise;
        self.run_inner(&mut |_, rng: &mut R| sample_faults(&self.detector, &noise, rng), rng)
    }

    /// A trial whose round `r` receives exactly `faults[r]` (missing rounds
    /// are noiseless).
    pub fn run_with_faults<R: Rng + ?Sized>(
        &self,
        faults: &[Vec<FaultEvent>],
        rng: &mut R,
    ) -> Result<(TrialResult, TrialResult)> {
        self.run_inner(&mut |round, _: &mut R| faults.get(round).cloned().unwrap_or_default(), rng)
    }

    fn round<R: Rng + ?Sized>(&self, t: &mut StabilizerTableau, faults: &[FaultEvent], rng: &mut R) -> Result<Syndrome> {
        let bits = t.run(&self.detector, faults, rng)?;
        Ok(syndrome_from_bits(&self.code, &bits))
    }

    fn run_inner<R: Rng + ?Sized>(
        &self,
        faults_for: &mut dyn FnMut(usize, &mut R) -> Vec<FaultEvent>,
        rng: &mut R,
    ) -> Result<(TrialResult, TrialResult)> {
        let mut t = self.encoded.clone();
        let mut syndromes = Vec::with_capacity(self.max_rounds);
        for round in 0..2 {
            let f = faults_for(round, rng);
            syndromes.push(self.round(&mut t, &f, rng)?);
        }
        let mut used = syndromes[1];
        if syndromes[0] != syndromes[1] {
            for round in 2..self.max_rounds {
                let f = faults_for(round, rng);
                used = self.round(&mut t, &f, rng)?;
                syndromes.push(used);
                if used == syndromes[round - 1] {
                    break;
                }
            }
        }
        let (c, known) = correct(&used, &self.table);
        t.apply_pauli(&c.extended(self.code.n() + 1));

        let practical_class = self.classify(&mut t.clone(), rng)?;
        let rounds_used = syndromes.len();
        let practical = TrialResult { classification: practical_class, rounds_used, syndromes, known };

        let projected = self.round(&mut t, &[], rng)?;
        let (c2, _) = correct(&projected, &self.table);
        t.apply_pauli(&c2.extended(self.code.n() + 1));
        let modified = TrialResult { classification: self.classify(&mut t, rng)?, ..practical.clone() };
        Ok((practical, modified))
    }

    fn classify<R: Rng + ?Sized>(&self, t: &mut StabilizerTableau, rng: &mut R) -> Result<Classification> {
        let nk = self.code.num_checks();
        let (mut checks, mut logical) = (false, false);
        for (q, o) in self.decoded_obs.iter().enumerate() {
            let b = t.measure(o, rng)?;
            if q < nk {
                checks |= b;
            } else {
                logical |= b;
            }
        }
        Ok(if checks {
            Classification::OutOfCodespace
        } else if logical {
            Classification::LogicalError
        } else {
            Classification::Fidelity
        })
    }
}

/// Builds a [`Pipeline`] for `cfg` and runs one trial. Prefer reusing a
/// pipeline when running many trials.
pub fn run_trial<R: Rng + ?Sized>(cfg: &TrialConfig, rng: &mut R) -> Result<TrialResult> {
    Pipeline::new(cfg)?.run(rng)
}
