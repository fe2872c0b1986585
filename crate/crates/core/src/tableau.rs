//! Stabilizer tableau simulator with destabilizer rows.
//!
//! Rows `0..n` are destabilizers, `n..2n` stabilizers and row `2n` is scratch
//! space for deterministic measurements. Storage is bit-sliced by qubit: for
//! each qubit a column of row bits, so gates are a handful of word operations
//! and row products run over all affected rows at once. A row's sign bit is
//! the sign in front of its letter string (Y read as the letter Y).

use rand::Rng;
use smallvec::{smallvec, SmallVec};

use crate::circuit::{CliffordCircuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};

/// A fault attached to the instruction at index `site`, applied right after
/// that instruction executes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultEvent {
    pub site: usize,
    pub kind: FaultKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaultKind {
    /// Pauli error on the listed qubits (global phase dropped).
    Pauli(Vec<(usize, Pauli)>),
    /// Flips the recorded outcome; the post-measurement state is untouched.
    MeasurementFlip,
    /// |0⟩ becomes |1⟩, |+⟩ becomes |−⟩.
    PreparationFlip,
}

#[derive(Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    /// Words per column.
    rw: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    sign: Vec<u64>,
}

impl std::fmt::Debug for StabilizerTableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "StabilizerTableau(n = {})", self.n)?;
        for g in self.stabilizers() {
            writeln!(f, "  {g}")?;
        }
        Ok(())
    }
}

#[inline]
fn spread(b: bool) -> u64 {
    (b as u64).wrapping_neg()
}

/// Row mask with one bit per tableau row; one word covers up to 31 qubits.
type Mask = SmallVec<[u64; 2]>;

/// A Hermitian Pauli prepared for repeated measurement: its non-identity
/// factors as `(qubit, x, z)` and its sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observable {
    n: usize,
    factors: SmallVec<[(usize, bool, bool); 4]>,
    negative: bool,
}

impl Observable {
    pub fn new(p: &PauliOperator) -> Result<Self> {
        if !p.is_hermitian() {
            return Err(Error::PauliParse { text: p.to_string(), reason: "observable is not Hermitian".into() });
        }
        let factors = p.factors().into_iter().map(|(q, l)| (q, l.x_bit(), l.z_bit())).collect();
        Ok(Observable { n: p.num_qubits(), factors, negative: p.phase_exp() == 2 })
    }

    fn single(q: usize, p: Pauli) -> Self {
        Observable { n: q + 1, factors: smallvec![(q, p.x_bit(), p.z_bit())], negative: false }
    }
}

impl StabilizerTableau {
    /// |0…0⟩ on `n` qubits.
    pub fn new(n: usize) -> Self {
        let rows = 2 * n + 1;
        let rw = rows.div_ceil(64);
        let mut t = StabilizerTableau { n, rw, x: vec![0; n * rw], z: vec![0; n * rw], sign: vec![0; rw] };
        for q in 0..n {
            t.flip_bit(true, q, q);
            t.flip_bit(false, q, n + q);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn col(&self, q: usize) -> std::ops::Range<usize> {
        q * self.rw..(q + 1) * self.rw
    }

    #[inline]
    fn bit(words: &[u64], row: usize) -> bool {
        (words[row / 64] >> (row % 64)) & 1 == 1
    }

    fn flip_bit(&mut self, is_x: bool, q: usize, row: usize) {
        let i = q * self.rw + row / 64;
        let m = 1u64 << (row % 64);
        if is_x {
            self.x[i] ^= m;
        } else {
            self.z[i] ^= m;
        }
    }

    fn xb(&self, row: usize, q: usize) -> bool {
        Self::bit(&self.x[self.col(q)], row)
    }

    fn zb(&self, row: usize, q: usize) -> bool {
        Self::bit(&self.z[self.col(q)], row)
    }

    fn sb(&self, row: usize) -> bool {
        Self::bit(&self.sign, row)
    }

    fn row_op(&self, row: usize) -> PauliOperator {
        let mut p = PauliOperator::identity(self.n);
        for q in 0..self.n {
            p.set(q, Pauli::from_bits(self.xb(row, q), self.zb(row, q)));
        }
        p.with_phase(if self.sb(row) { 2 } else { 0 })
    }

    pub fn stabilizers(&self) -> Vec<PauliOperator> {
        (self.n..2 * self.n).map(|r| self.row_op(r)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliOperator> {
        (0..self.n).map(|r| self.row_op(r)).collect()
    }

    pub fn h(&mut self, q: usize) {
        let c = self.col(q);
        for (w, i) in c.enumerate() {
            let (x, z) = (self.x[i], self.z[i]);
            self.sign[w] ^= x & z;
            self.x[i] = z;
            self.z[i] = x;
        }
    }

    pub fn s(&mut self, q: usize) {
        let c = self.col(q);
        for (w, i) in c.enumerate() {
            let (x, z) = (self.x[i], self.z[i]);
            self.sign[w] ^= x & z;
            self.z[i] = z ^ x;
        }
    }

    pub fn s_dag(&mut self, q: usize) {
        let c = self.col(q);
        for (w, i) in c.enumerate() {
            let (x, z) = (self.x[i], self.z[i]);
            self.sign[w] ^= x & !z;
            self.z[i] = z ^ x;
        }
    }

    /// Applies a Pauli gate (equivalently, injects a Pauli error) on `q`.
    pub fn pauli(&mut self, q: usize, p: Pauli) {
        let c = self.col(q);
        for (w, i) in c.enumerate() {
            self.sign[w] ^= match p {
                Pauli::I => 0,
                Pauli::X => self.z[i],
                Pauli::Z => self.x[i],
                Pauli::Y => self.x[i] ^ self.z[i],
            };
        }
    }

    pub fn apply_pauli(&mut self, p: &PauliOperator) {
        assert!(p.num_qubits() <= self.n);
        for (q, l) in p.factors() {
            self.pauli(q, l);
        }
    }

    pub fn cx(&mut self, c: usize, t: usize) {
        let (bc, bt) = (c * self.rw, t * self.rw);
        for w in 0..self.rw {
            let (xc, zc, xt, zt) = (self.x[bc + w], self.z[bc + w], self.x[bt + w], self.z[bt + w]);
            self.sign[w] ^= xc & zt & !(xt ^ zc);
            self.x[bt + w] = xt ^ xc;
            self.z[bc + w] = zc ^ zt;
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let (ba, bb) = (a * self.rw, b * self.rw);
        for w in 0..self.rw {
            let (xa, za, xb, zb) = (self.x[ba + w], self.z[ba + w], self.x[bb + w], self.z[bb + w]);
            self.sign[w] ^= xa & xb & (za ^ zb);
            self.z[ba + w] = za ^ xb;
            self.z[bb + w] = zb ^ xa;
        }
    }

    pub fn cy(&mut self, c: usize, t: usize) {
        self.s_dag(t);
        self.cx(c, t);
        self.s(t);
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        for w in 0..self.rw {
            self.x.swap(a * self.rw + w, b * self.rw + w);
            self.z.swap(a * self.rw + w, b * self.rw + w);
        }
    }

    /// Multiplies row `src` into every row selected by `mask` (one word per
    /// row block), keeping signs exact for rows that commute with `src`.
    fn rowsum_masked(&mut self, mask: &[u64], src: usize) {
        let (sw, sb) = (src / 64, src % 64);
        let src_sign = spread((self.sign[sw] >> sb) & 1 == 1);
        for w in 0..self.rw {
            let m = mask[w];
            if m == 0 {
                continue;
            }
            // phase accumulator mod 4 in two bit planes
            let (mut lo, mut hi) = (0u64, 0u64);
            let add1 = |v: u64, lo: &mut u64, hi: &mut u64| {
                *hi ^= *lo & v;
                *lo ^= v;
            };
            for q in 0..self.n {
                let i = q * self.rw;
                let xs = spread((self.x[i + sw] >> sb) & 1 == 1);
                let zs = spread((self.z[i + sw] >> sb) & 1 == 1);
                let (xh, zh) = (self.x[i + w], self.z[i + w]);
                let (xo, zo) = (xh ^ xs, zh ^ zs);
                add1(xh & zh, &mut lo, &mut hi);
                add1(xs & zs, &mut lo, &mut hi);
                hi ^= zh & xs;
                // subtract y_out: add 3
                let yo = xo & zo;
                add1(yo, &mut lo, &mut hi);
                hi ^= yo;
                self.x[i + w] = xh ^ (m & xs);
                self.z[i + w] = zh ^ (m & zs);
            }
            self.sign[w] ^= m & (src_sign ^ hi);
        }
    }

    fn copy_row(&mut self, from: usize, to: usize) {
        for q in 0..self.n {
            let c = self.col(q);
            let (xf, zf) = (Self::bit(&self.x[c.clone()], from), Self::bit(&self.z[c.clone()], from));
            self.set_row_bits(q, to, xf, zf);
        }
        let s = self.sb(from);
        self.set_sign(to, s);
    }

    fn set_row_bits(&mut self, q: usize, row: usize, xv: bool, zv: bool) {
        let i = q * self.rw + row / 64;
        let m = 1u64 << (row % 64);
        self.x[i] = (self.x[i] & !m) | (spread(xv) & m);
        self.z[i] = (self.z[i] & !m) | (spread(zv) & m);
    }

    fn set_sign(&mut self, row: usize, v: bool) {
        let m = 1u64 << (row % 64);
        self.sign[row / 64] = (self.sign[row / 64] & !m) | (spread(v) & m);
    }

    fn clear_row(&mut self, row: usize) {
        for q in 0..self.n {
            self.set_row_bits(q, row, false, false);
        }
        self.set_sign(row, false);
    }

    /// Per-row anticommutation bits with `obs`.
    fn anticommute_mask(&self, obs: &Observable) -> Mask {
        let mut mask: Mask = smallvec![0u64; self.rw];
        for &(q, ox, oz) in &obs.factors {
            let i = q * self.rw;
            for (w, m) in mask.iter_mut().enumerate() {
                if oz {
                    *m ^= self.x[i + w];
                }
                if ox {
                    *m ^= self.z[i + w];
                }
            }
        }
        mask
    }

    /// Sign of the product of the rows selected by `sel`, which must commute
    /// pairwise. Per qubit the product of letters `L_1 … L_m` picks up
    /// `i^(Σy − y_out)` and `(−1)` for every pair `i < j` with `z_i x_j`; the
    /// pair count is read off an exclusive prefix parity of the z column.
    fn product_is_negative(&self, sel: &[u64]) -> bool {
        let mut phase = 0u32;
        if let [m] = *sel {
            // single-word fast path
            for q in 0..self.n {
                let (xm, zm) = (self.x[q] & m, self.z[q] & m);
                if xm | zm == 0 {
                    continue;
                }
                let mut incl = zm;
                for sh in [1, 2, 4, 8, 16, 32] {
                    incl ^= incl << sh;
                }
                phase += (xm & zm).count_ones() + 2 * ((incl << 1) & xm).count_ones();
                phase += 3 * (xm.count_ones() & zm.count_ones() & 1);
            }
            return (phase + 2 * (m & self.sign[0]).count_ones()) % 4 == 2;
        }
        for q in 0..self.n {
            let i = q * self.rw;
            let (mut carry, mut px, mut pz) = (0u64, 0u32, 0u32);
            for (w, &m) in sel.iter().enumerate() {
                let (xm, zm) = (self.x[i + w] & m, self.z[i + w] & m);
                let mut incl = zm;
                for sh in [1, 2, 4, 8, 16, 32] {
                    incl ^= incl << sh;
                }
                let excl = (incl << 1) ^ carry;
                phase += (xm & zm).count_ones() + 2 * (excl & xm).count_ones();
                carry = spread(((incl >> 63) ^ (carry & 1)) == 1);
                px += xm.count_ones();
                pz += zm.count_ones();
            }
            if px % 2 == 1 && pz % 2 == 1 {
                phase += 3;
            }
        }
        let signs: u32 = sel.iter().zip(&self.sign).map(|(m, s)| (m & s).count_ones()).sum();
        phase += 2 * signs;
        debug_assert!(phase % 2 == 0, "selected rows do not commute");
        phase % 4 == 2
    }

    /// Measures `obs`; returns `true` for eigenvalue −1. A random outcome
    /// draws one fair coin from `rng`.
    fn measure_obs<R: Rng + ?Sized>(&mut self, obs: &Observable, rng: &mut R) -> bool {
        let n = self.n;
        let anti = self.anticommute_mask(obs);
        match (n..2 * n).find(|&row| Self::bit(&anti, row)) {
            Some(p) => {
                let mut others = anti;
                others[p / 64] &= !(1 << (p % 64));
                // the scratch row is never in use here
                others[(2 * n) / 64] &= !(1 << ((2 * n) % 64));
                self.rowsum_masked(&others, p);
                self.copy_row(p, p - n);
                self.clear_row(p);
                for &(q, ox, oz) in &obs.factors {
                    self.set_row_bits(q, p, ox, oz);
                }
                let outcome: bool = rng.gen();
                self.set_sign(p, outcome ^ obs.negative);
                outcome
            }
            None => {
                // ±obs is the product of the stabilizers paired with the
                // anticommuting destabilizers
                let mut sel: Mask = smallvec![0u64; self.rw];
                for i in (0..n).filter(|&i| Self::bit(&anti, i)) {
                    sel[(i + n) / 64] |= 1 << ((i + n) % 64);
                }
                self.product_is_negative(&sel) ^ obs.negative
            }
        }
    }

    /// Whether a Z measurement of `q` has a determined outcome.
    pub fn is_deterministic_z(&self, q: usize) -> bool {
        (self.n..2 * self.n).all(|row| !self.xb(row, q))
    }

    /// Measures Z on `q`. Returns `true` for outcome 1 (eigenvalue −1).
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        self.measure_obs(&Observable::single(q, Pauli::Z), rng)
    }

    pub fn measure_x<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        self.measure_obs(&Observable::single(q, Pauli::X), rng)
    }

    /// Projective measurement of a Hermitian Pauli; `true` for −1.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, p: &PauliOperator, rng: &mut R) -> Result<bool> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.num_qubits() });
        }
        Ok(self.measure_obs(&Observable::new(p)?, rng))
    }

    /// As [`StabilizerTableau::measure_pauli`] for a prepared observable.
    pub fn measure<R: Rng + ?Sized>(&mut self, obs: &Observable, rng: &mut R) -> Result<bool> {
        if obs.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: obs.n });
        }
        Ok(self.measure_obs(obs, rng))
    }

    pub fn prep_zero<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) {
        if self.measure_z(q, rng) {
            self.pauli(q, Pauli::X);
        }
    }

    /// Prepares |+⟩ on `q`, discarding whatever was there. The old qubit is
    /// measured in the X basis first, which leaves the other qubits in the
    /// same ensemble as any other way of discarding it.
    pub fn prep_plus<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) {
        if self.measure_x(q, rng) {
            self.pauli(q, Pauli::Z);
        }
    }

    /// Expectation of a Hermitian Pauli: ±1 when it is (up to sign) in the
    /// stabilizer group, 0 otherwise.
    pub fn measure_observable(&mut self, p: &PauliOperator) -> Result<i8> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.num_qubits() });
        }
        let obs = Observable::new(p)?;
        let anti = self.anticommute_mask(&obs);
        if (self.n..2 * self.n).any(|row| Self::bit(&anti, row)) {
            return Ok(0);
        }
        let negative = self.measure_obs(&obs, &mut rand::rngs::mock::StepRng::new(0, 0));
        Ok(if negative { -1 } else { 1 })
    }

    pub fn apply_gate<R: Rng + ?Sized>(&mut self, gate: &Gate, bits: &mut [bool], rng: &mut R) {
        match *gate {
            Gate::H(q) => self.h(q),
            Gate::S(q) => self.s(q),
            Gate::Sdg(q) => self.s_dag(q),
            Gate::Pauli(q, p) => self.pauli(q, p),
            Gate::Controlled { control, target, pauli } => match pauli {
                Pauli::X => self.cx(control, target),
                Pauli::Y => self.cy(control, target),
                Pauli::Z => self.cz(control, target),
                Pauli::I => {}
            },
            Gate::Swap(a, b) => self.swap(a, b),
            Gate::PrepZero(q) => self.prep_zero(q, rng),
            Gate::PrepPlus(q) | Gate::ResetPlus(q) => self.prep_plus(q, rng),
            Gate::MeasureZ { qubit, bit } => bits[bit] = self.measure_z(qubit, rng),
            Gate::MeasureX { qubit, bit } => bits[bit] = self.measure_x(qubit, rng),
        }
    }

    /// Executes `circuit` on this state, injecting `faults` after their sites.
    /// Returns the classical record.
    pub fn run<R: Rng + ?Sized>(
        &mut self,
        circuit: &CliffordCircuit,
        faults: &[FaultEvent],
        rng: &mut R,
    ) -> Result<Vec<bool>> {
        let mut bits = vec![false; circuit.n_bits()];
        self.run_into(circuit, faults, &mut bits, rng)?;
        Ok(bits)
    }

    /// As [`StabilizerTableau::run`], writing into a caller-provided record
    /// of at least `circuit.n_bits()` entries.
    pub fn run_into<R: Rng + ?Sized>(
        &mut self,
        circuit: &CliffordCircuit,
        faults: &[FaultEvent],
        bits: &mut [bool],
        rng: &mut R,
    ) -> Result<()> {
        if circuit.n_qubits() > self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: circuit.n_qubits() });
        }
        let ops = circuit.ops();
        for f in faults {
            let ok = ops.get(f.site).is_some_and(|ins| {
                ins.noise_site
                    && match &f.kind {
                        FaultKind::Pauli(fs) => fs.iter().all(|&(q, _)| q < self.n),
                        FaultKind::MeasurementFlip => ins.gate.is_measurement(),
                        FaultKind::PreparationFlip => ins.gate.is_preparation(),
                    }
            });
            if !ok {
                return Err(Error::InvalidFaultSite(f.site));
            }
        }
        let sorted = faults.windows(2).all(|w| w[0].site <= w[1].site);
        let mut order: Vec<&FaultEvent> = faults.iter().collect();
        if !sorted {
            order.sort_by_key(|f| f.site);
        }
        let mut pending = order.into_iter().peekable();
        for (site, ins) in ops.iter().enumerate() {
            self.apply_gate(&ins.gate, bits, rng);
            while let Some(f) = pending.next_if(|f| f.site == site) {
                self.inject(&ins.gate, &f.kind, bits);
            }
        }
        Ok(())
    }

    fn inject(&mut self, gate: &Gate, kind: &FaultKind, bits: &mut [bool]) {
        match kind {
            FaultKind::Pauli(factors) => {
                for &(q, p) in factors {
                    self.pauli(q, p);
                }
            }
            FaultKind::MeasurementFlip => {
                if let Gate::MeasureZ { bit, .. } | Gate::MeasureX { bit, .. } = *gate {
                    bits[bit] ^= true;
                }
            }
            FaultKind::PreparationFlip => match *gate {
                Gate::PrepZero(q) => self.pauli(q, Pauli::X),
                Gate::PrepPlus(q) | Gate::ResetPlus(q) => self.pauli(q, Pauli::Z),
                _ => {}
            },
        }
    }

    /// Checks pairwise commutation of the stabilizer rows and the symplectic
    /// pairing with the destabilizers.
    pub fn is_consistent(&self) -> bool {
        let stabs = self.stabilizers();
        let destabs = self.destabilizers();
        for i in 0..self.n {
            for j in 0..self.n {
                if !stabs[i].commutes_with(&stabs[j]) {
                    return false;
                }
                if stabs[i].commutes_with(&destabs[j]) != (i != j) {
                    return false;
                }
            }
        }
        stabs.iter().all(PauliOperator::is_hermitian)
    }
}

/// Runs `circuit` from |0…0⟩.
pub fn run<R: Rng + ?Sized>(
    circuit: &CliffordCircuit,
    faults: &[FaultEvent],
    rng: &mut R,
) -> Result<(StabilizerTableau, Vec<bool>)> {
    let mut t = StabilizerTableau::new(circuit.n_qubits());
    let bits = t.run(circuit, faults, rng)?;
    Ok((t, bits))
}
