//! Detector, decoder and trial pipeline on the [[8,1,3]] code.

mod common;

use common::code_813;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stabilizer_lab::code::Syndrome;
use stabilizer_lab::ft::{propagated_errors, search_schedules, single_qubit_errors};
use stabilizer_lab::noise::{sample_faults, two_qubit_paulis, NoiseKind, NoiseModel};
use stabilizer_lab::pauli::parse_sparse;
use stabilizer_lab::rates::estimate_rates_both;
use stabilizer_lab::synthesis::{encoder_for, syndrome_from_bits};
use stabilizer_lab::trial::{Classification, Method, Pipeline, TrialConfig};
use stabilizer_lab::{build_detector, FaultEvent, FaultKind, Gate, Pauli, PauliOperator, StabilizerTableau};

fn no_rng() -> rand::rngs::mock::StepRng {
    rand::rngs::mock::StepRng::new(0, 0)
}

fn encoded(n: usize) -> StabilizerTableau {
    let (_, code) = code_813();
    let (enc, _) = encoder_for(&code).unwrap();
    let mut t = StabilizerTableau::new(n);
    t.run(&enc, &[], &mut no_rng()).unwrap();
    t
}

#[test]
fn encoded_zero_state() {
    let (_, code) = code_813();
    let mut t = encoded(8);
    for g in code.generators() {
        assert_eq!(t.measure_observable(g).unwrap(), 1, "{g}");
    }
    assert_eq!(t.measure_observable(&code.logical_z()[0]).unwrap(), 1);
    // encoder then adjoint returns |0…0⟩
    let (enc, _) = encoder_for(&code).unwrap();
    t.run(&enc.adjoint().unwrap(), &[], &mut no_rng()).unwrap();
    for q in 0..8 {
        assert_eq!(t.measure_observable(&PauliOperator::single(8, q, Pauli::Z)).unwrap(), 1);
    }
}

#[test]
fn one_flips_logical_z() {
    let (_, code) = code_813();
    let (enc, _) = encoder_for(&code).unwrap();
    let mut t = StabilizerTableau::new(8);
    t.pauli(7, Pauli::X);
    t.run(&enc, &[], &mut no_rng()).unwrap();
    assert_eq!(t.measure_observable(&code.logical_z()[0]).unwrap(), -1);
}

#[test]
fn detector_agrees_with_check_matrix() {
    let (def, code) = code_813();
    let sched = def.schedule("ft", &code).unwrap();
    let det = build_detector(&code, &sched).unwrap();
    for e in single_qubit_errors(8) {
        let mut t = encoded(9);
        t.apply_pauli(&e);
        let bits = t.run(&det, &[], &mut no_rng()).unwrap();
        assert_eq!(syndrome_from_bits(&code, &bits), code.syndrome_of(&e).unwrap(), "{e}");
    }
    let mut t = encoded(9);
    t.pauli(0, Pauli::X);
    let bits = t.run(&det, &[], &mut no_rng()).unwrap();
    assert_eq!(syndrome_from_bits(&code, &bits).to_string(), "1110010");
}

#[test]
fn sixth_generator_gate_order() {
    let (def, code) = code_813();
    let order = |name: &str| -> Vec<String> {
        let det = build_detector(&code, &def.schedule(name, &code).unwrap()).unwrap();
        // block of generator 6: skip five reset/coupling/measure blocks
        let mut blocks = det.ops().split(|ins| matches!(ins.gate, Gate::ResetPlus(_)));
        blocks.nth(6).unwrap().iter().filter(|ins| ins.gate.is_two_qubit()).map(|ins| ins.gate.to_string()).collect()
    };
    assert_eq!(order("table1"), ["CZ 8 0", "CX 8 3", "CZ 8 6", "CZ 8 7"]);
    assert_eq!(order("ft"), ["CZ 8 7", "CX 8 3", "CZ 8 0", "CZ 8 6"]);
}

/// An X on the ancilla right after coupling gate j leaves exactly the
/// predicted data error once the remaining gates have acted.
#[test]
fn ancilla_faults_propagate_as_predicted() {
    let (def, code) = code_813();
    let mut schedules = vec![def.schedule("ft", &code).unwrap(), def.schedule("table1", &code).unwrap()];
    schedules.extend(search_schedules(&code, 5));
    for sched in schedules {
        let det = build_detector(&code, &sched).unwrap();
        let ops = det.ops();
        let predicted = propagated_errors(&code, &sched);
        let mut checked = 0;
        for (site, ins) in ops.iter().enumerate() {
            let Gate::Controlled { target, .. } = ins.gate else { continue };
            for fault in Pauli::ALL {
                let mut e = PauliOperator::from_sparse(9, &[(8, Pauli::X), (target, fault)]);
                for later in ops[site + 1..].iter().take_while(|i| i.gate.is_two_qubit()) {
                    e = later.gate.conjugate(&e);
                }
                let data = e.truncated(8).unsigned();
                let hit = predicted.iter().any(|p| p.raw.eq_up_to_phase(&data) && p.fault == fault);
                assert!(hit, "site {site} fault {fault}: {data} not predicted");
                checked += 1;
            }
        }
        assert_eq!(checked, predicted.len());
    }
}

fn config(sched: &str, method: Method, kind: NoiseKind) -> TrialConfig {
    let (def, code) = code_813();
    let s = def.schedule(sched, &code).unwrap();
    TrialConfig::new(code, s, method, NoiseModel::noiseless(kind))
}

#[test]
fn heisenberg_decoder_matches_explicit_circuit() {
    let cfg = config("ft", Method::Practical, NoiseKind::StandardDepolarizing);
    let pipe = Pipeline::new(&cfg).unwrap();
    let det = pipe.detector().clone();
    let noise = NoiseModel::uniform(NoiseKind::StandardDepolarizing, 0.02);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..400 {
        let mut t = encoded(9);
        let faults = sample_faults(&det, &noise, &mut rng);
        t.run(&det, &faults, &mut rng).unwrap();
        // a Pauli-corrupted codeword makes every decoded outcome deterministic
        let explicit = t.clone().run(pipe.decoder(), &[], &mut no_rng()).unwrap();
        let mut heis = t.clone();
        let implicit: Vec<bool> =
            pipe.decoded_observables().iter().map(|o| heis.measure_pauli(o, &mut no_rng()).unwrap()).collect();
        assert_eq!(explicit, implicit);
    }
}

#[test]
fn noiseless_trials_are_perfect() {
    for method in [Method::Practical, Method::Modified] {
        let pipe = Pipeline::new(&config("ft", method, NoiseKind::StandardDepolarizing)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let r = pipe.run(&mut rng).unwrap();
            assert_eq!(r.classification, Classification::Fidelity);
            assert_eq!(r.rounds_used, 2);
        }
    }
}

#[test]
fn measurement_flip_triggers_third_round() {
    let pipe = Pipeline::new(&config("ft", Method::Practical, NoiseKind::StandardDepolarizing)).unwrap();
    let det = pipe.detector();
    let site = det
        .ops()
        .iter()
        .position(|ins| matches!(ins.gate, Gate::MeasureX { bit: 4, .. }))
        .unwrap();
    let flip = vec![FaultEvent { site, kind: FaultKind::MeasurementFlip }];
    let (practical, modified) = pipe.run_with_faults(&[flip], &mut no_rng()).unwrap();
    assert_eq!(practical.rounds_used, 3);
    assert_eq!(practical.syndromes[0].to_string(), "0000100");
    assert!(practical.syndromes[1].is_zero() && practical.syndromes[2].is_zero());
    assert_eq!(practical.classification, Classification::Fidelity);
    assert_eq!(modified.classification, Classification::Fidelity);
}

#[test]
fn injected_hook_error_is_corrected() {
    let (_, code) = code_813();
    let pipe = Pipeline::new(&config("ft", Method::Practical, NoiseKind::StandardDepolarizing)).unwrap();
    // Z1X3X4 and Z7 share a syndrome and differ by a stabilizer
    let a = parse_sparse("Z1X3X4", 8).unwrap();
    let b = parse_sparse("Z7", 8).unwrap();
    assert_eq!(code.syndrome_of(&a).unwrap(), code.syndrome_of(&b).unwrap());
    assert!(code.contains(&(&a * &b), true));
    let s: Syndrome = "0000101".parse().unwrap();
    assert_eq!(code.syndrome_of(&a).unwrap(), s);
    assert!(pipe.table().get(&s).is_some());
}

#[test]
fn fifteen_pairs_are_uniform() {
    let mut c = stabilizer_lab::CliffordCircuit::new(2, 1);
    c.push_noisy(Gate::cz(1, 0));
    let noise = NoiseModel { kind: NoiseKind::StandardDepolarizing, p_s: 0.0, p_t: 1.0, p_meas: 0.0, p_prep: 0.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pairs: Vec<(Pauli, Pauli)> = two_qubit_paulis().collect();
    let mut counts = [0u32; 15];
    const N: u32 = 100_000;
    for _ in 0..N {
        let f = sample_faults(&c, &noise, &mut rng);
        let FaultKind::Pauli(fs) = &f[0].kind else { panic!() };
        let get = |q| fs.iter().find(|(x, _)| *x == q).map_or(Pauli::I, |(_, p)| *p);
        let pair = (get(1), get(0));
        counts[pairs.iter().position(|p| *p == pair).unwrap()] += 1;
    }
    let mean = N as f64 / 15.0;
    let sigma = (N as f64 * (1.0 / 15.0) * (14.0 / 15.0)).sqrt();
    for k in counts {
        assert!((k as f64 - mean).abs() < 3.0 * sigma, "{counts:?}");
    }
}

#[test]
fn rates_are_thread_count_independent() {
    let cfg = config("ft", Method::Modified, NoiseKind::Anisotropic);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_rates_both(&cfg, 3e-3, 2000, 3, 42).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a, b);
    for pt in [&a.0, &a.1] {
        for c in &pt.counts {
            assert_eq!(c.fidelity + c.logical + c.out_of_codespace, c.shots);
            assert!(c.logical <= c.shots - c.fidelity);
            assert_eq!(c.total_rate() + c.fidelity_rate(), 1.0);
        }
    }
}

#[test]
fn modified_fidelity_is_higher() {
    let cfg = config("ft", Method::Modified, NoiseKind::StandardDepolarizing);
    let (practical, modified) = estimate_rates_both(&cfg, 2e-3, 50_000, 2, 3).unwrap();
    let shots = 100_000.0;
    let (fp, fm) = (practical.fidelity.mean, modified.fidelity.mean);
    let sigma = (fp * (1.0 - fp) / shots + fm * (1.0 - fm) / shots).sqrt();
    assert!(fm - fp > 3.0 * sigma, "practical {fp}, modified {fm}");
}
