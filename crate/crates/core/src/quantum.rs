//! Exact statevector simulation for registers of one to three qubits.
//!
//! Basis states are indexed row-major with qubit 0 as the most significant
//! bit, so `|q0 q1 q2>` sits at index `q0·4 + q1·2 + q2`.
//!
//! Everything the protocols need lives here: BB84 preparation and basis
//! measurement, Bell pairs, Bell measurement, teleportation, and the gate-word
//! unitaries `U_C` built from X (bit 0) and H (bit 1).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Comparison tolerance for amplitudes and probabilities.
pub const TOLERANCE: f64 = 1e-12;

const MAX_QUBITS: usize = 3;

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const FRAC_1_SQRT_2: Complex64 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);

pub const PAULI_X: Matrix2 = [[ZERO, ONE], [ONE, ZERO]];
pub const PAULI_Z: Matrix2 = [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]];
pub const HADAMARD: Matrix2 = [
    [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
    [FRAC_1_SQRT_2, Complex64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0)],
];
pub const IDENTITY: Matrix2 = [[ONE, ZERO], [ZERO, ONE]];

pub fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Measurement basis. Rectilinear is `{|0>,|1>}`, diagonal is `{|+>,|->}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Rectilinear,
    Diagonal,
}

impl Basis {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Basis::Diagonal
        } else {
            Basis::Rectilinear
        }
    }

    pub fn bit(self) -> bool {
        self == Basis::Diagonal
    }

    pub fn other(self) -> Self {
        Basis::from_bit(!self.bit())
    }
}

/// One of the four BB84 states. `|0>` and `|+>` carry value 0, `|1>` and `|->`
/// carry value 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bb84Tag {
    pub value: bool,
    pub basis: Basis,
}

impl Bb84Tag {
    pub fn new(value: bool, basis: Basis) -> Self {
        Self { value, basis }
    }

    /// `|0>, |1>, |+>, |->` in that order.
    pub fn all() -> [Bb84Tag; 4] {
        [
            Bb84Tag::new(false, Basis::Rectilinear),
            Bb84Tag::new(true, Basis::Rectilinear),
            Bb84Tag::new(false, Basis::Diagonal),
            Bb84Tag::new(true, Basis::Diagonal),
        ]
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let value = rng.random::<bool>();
        let basis = Basis::from_bit(rng.random::<bool>());
        Self { value, basis }
    }
}

impl fmt::Display for Bb84Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match (self.basis, self.value) {
            (Basis::Rectilinear, false) => "|0>",
            (Basis::Rectilinear, true) => "|1>",
            (Basis::Diagonal, false) => "|+>",
            (Basis::Diagonal, true) => "|->",
        };
        f.write_str(s)
    }
}

/// Classical result of a Bell measurement: `d0` is the phase bit (0 for the
/// `+` combinations), `d1` the parity bit (0 for `|00>/|11>` support).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BellOutcome {
    pub d0: bool,
    pub d1: bool,
}

impl BellOutcome {
    pub fn new(d0: bool, d1: bool) -> Self {
        Self { d0, d1 }
    }

    pub fn all() -> [BellOutcome; 4] {
        [
            BellOutcome::new(false, false),
            BellOutcome::new(false, true),
            BellOutcome::new(true, false),
            BellOutcome::new(true, true),
        ]
    }

    /// Index into a four-entry distribution: `d0·2 + d1`.
    pub fn index(self) -> usize {
        (self.d0 as usize) << 1 | self.d1 as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::new(i & 2 != 0, i & 1 != 0)
    }

    /// The challenge bit derived from teleportation, `d0 ⊕ d1`.
    pub fn xor(self) -> bool {
        self.d0 ^ self.d1
    }
}

/// Normalized statevector over 1–3 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from raw amplitudes; length must be 2, 4 or 8 and the
    /// vector must be normalized.
    pub fn from_amps(amps: Vec<Complex64>) -> Result<Self> {
        let qubits = match amps.len() {
            2 => 1,
            4 => 2,
            8 => 3,
            n => return Err(Error::Register(format!("{n} amplitudes"))),
        };
        let state = Self { qubits, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Register(format!("norm² {norm} is not 1")));
        }
        Ok(state)
    }

    pub fn basis_state(qubits: usize, index: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::Register(format!("{qubits} qubits")));
        }
        let dim = 1 << qubits;
        if index >= dim {
            return Err(Error::Register(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { qubits, amps })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::SizeMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `self ⊗ other`, with `self` occupying the leading qubits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let qubits = self.qubits + other.qubits;
        if qubits > MAX_QUBITS {
            return Err(Error::Register(format!("{qubits} qubits")));
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(PureState { qubits, amps })
    }

    /// Serialization form: `(re, im)` per amplitude in basis order.
    pub fn to_pairs(&self) -> Vec<(f64, f64)> {
        self.amps.iter().map(|a| (a.re, a.im)).collect()
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::from_amps(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    fn check_index(&self, qubit: usize) -> Result<()> {
        if qubit >= self.qubits {
            return Err(Error::QubitIndex { index: qubit, qubits: self.qubits });
        }
        Ok(())
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.qubits - 1 - qubit)
    }

    pub fn apply_single(&self, qubit: usize, gate: &Matrix2) -> Result<PureState> {
        self.check_index(qubit)?;
        let mut out = self.clone();
        out.apply_single_in_place(qubit, gate);
        Ok(out)
    }

    fn apply_single_in_place(&mut self, qubit: usize, gate: &Matrix2) {
        let mask = self.mask(qubit);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | mask];
                self.amps[i] = gate[0][0] * a0 + gate[0][1] * a1;
                self.amps[i | mask] = gate[1][0] * a0 + gate[1][1] * a1;
            }
        }
    }

    fn apply_cnot_in_place(&mut self, control: usize, target: usize) {
        let cm = self.mask(control);
        let tm = self.mask(target);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    fn renormalize(&mut self) -> bool {
        let norm = self.norm_sqr();
        if norm <= TOLERANCE * TOLERANCE {
            return false;
        }
        let scale = 1.0 / norm.sqrt();
        for a in &mut self.amps {
            *a *= scale;
        }
        true
    }
}

/// Prepares the tagged BB84 state.
pub fn prepare(tag: Bb84Tag) -> PureState {
    let amps = match (tag.basis, tag.value) {
        (Basis::Rectilinear, false) => vec![ONE, ZERO],
        (Basis::Rectilinear, true) => vec![ZERO, ONE],
        (Basis::Diagonal, false) => vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        (Basis::Diagonal, true) => vec![FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    };
    PureState { qubits: 1, amps }
}

/// `(|00> + |11>)/√2`.
pub fn make_bell() -> PureState {
    PureState { qubits: 2, amps: vec![FRAC_1_SQRT_2, ZERO, ZERO, FRAC_1_SQRT_2] }
}

/// Exact Born-rule probabilities of outcomes 0 and 1 when `qubit` is
/// measured in `basis`.
pub fn outcome_distribution(state: &PureState, qubit: usize, basis: Basis) -> Result<(f64, f64)> {
    state.check_index(qubit)?;
    let rotated;
    let view = match basis {
        Basis::Rectilinear => state,
        Basis::Diagonal => {
            rotated = state.apply_single(qubit, &HADAMARD)?;
            &rotated
        }
    };
    let mask = view.mask(qubit);
    let p1: f64 = view
        .amps
        .iter()
        .enumerate()
        .filter(|(i, _)| i & mask != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let total = view.norm_sqr();
    Ok(((total - p1) / total, p1 / total))
}

/// Projects `qubit` onto the `outcome` eigenstate of `basis` and renormalizes.
/// Returns `None` when that outcome has zero probability.
pub fn project(state: &PureState, qubit: usize, basis: Basis, outcome: bool) -> Result<Option<PureState>> {
    state.check_index(qubit)?;
    let mut s = state.clone();
    if basis == Basis::Diagonal {
        s.apply_single_in_place(qubit, &HADAMARD);
    }
    let mask = s.mask(qubit);
    for (i, a) in s.amps.iter_mut().enumerate() {
        if (i & mask != 0) != outcome {
            *a = ZERO;
        }
    }
    if !s.renormalize() {
        return Ok(None);
    }
    if basis == Basis::Diagonal {
        s.apply_single_in_place(qubit, &HADAMARD);
    }
    Ok(Some(s))
}

/// Measures `qubit` in `basis`, sampling the outcome by the Born rule.
/// Returns the outcome bit and the collapsed state.
pub fn measure<R: Rng + ?Sized>(
    state: &PureState,
    qubit: usize,
    basis: Basis,
    rng: &mut R,
) -> Result<(bool, PureState)> {
    let (p0, _) = outcome_distribution(state, qubit, basis)?;
    let outcome = rng.random::<f64>() >= p0;
    match project(state, qubit, basis, outcome)? {
        Some(post) => Ok((outcome, post)),
        // Only reachable through rounding when p0 is within an ulp of 0 or 1.
        None => Ok((!outcome, project(state, qubit, basis, !outcome)?.expect("one outcome has support"))),
    }
}

fn check_pair(state: &PureState, a: usize, b: usize) -> Result<()> {
    state.check_index(a)?;
    state.check_index(b)?;
    if a == b {
        return Err(Error::SameQubit(a));
    }
    Ok(())
}

/// Rotates the Bell basis on `(a, b)` onto the computational basis:
/// `Φ+ → |00>`, `Φ- → |10>`, `Ψ+ → |01>`, `Ψ- → |11>`.
fn bell_to_computational(state: &mut PureState, a: usize, b: usize) {
    state.apply_cnot_in_place(a, b);
    state.apply_single_in_place(a, &HADAMARD);
}

fn computational_to_bell(state: &mut PureState, a: usize, b: usize) {
    state.apply_single_in_place(a, &HADAMARD);
    state.apply_cnot_in_place(a, b);
}

/// Exact probabilities of the four Bell outcomes on `(a, b)`, indexed by
/// [`BellOutcome::index`].
pub fn bell_distribution(state: &PureState, a: usize, b: usize) -> Result<[f64; 4]> {
    check_pair(state, a, b)?;
    let mut s = state.clone();
    bell_to_computational(&mut s, a, b);
    let (ma, mb) = (s.mask(a), s.mask(b));
    let mut dist = [0.0; 4];
    for (i, amp) in s.amps.iter().enumerate() {
        let outcome = BellOutcome::new(i & ma != 0, i & mb != 0);
        dist[outcome.index()] += amp.norm_sqr();
    }
    Ok(dist)
}

/// Projects `(a, b)` onto the Bell state named by `outcome`. `None` when the
/// outcome has zero probability.
pub fn project_bell(state: &PureState, a: usize, b: usize, outcome: BellOutcome) -> Result<Option<PureState>> {
    check_pair(state, a, b)?;
    let mut s = state.clone();
    bell_to_computational(&mut s, a, b);
    let (ma, mb) = (s.mask(a), s.mask(b));
    for (i, amp) in s.amps.iter_mut().enumerate() {
        if (i & ma != 0) != outcome.d0 || (i & mb != 0) != outcome.d1 {
            *amp = ZERO;
        }
    }
    if !s.renormalize() {
        return Ok(None);
    }
    computational_to_bell(&mut s, a, b);
    Ok(Some(s))
}

fn sample_index<R: Rng + ?Sized>(dist: &[f64], rng: &mut R) -> usize {
    let total: f64 = dist.iter().sum();
    let mut r = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &p) in dist.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last = i;
        if r < p {
            return i;
        }
        r -= p;
    }
    last
}

/// Bell measurement on qubits `(a, b)`.
pub fn bell_measure<R: Rng + ?Sized>(
    state: &PureState,
    a: usize,
    b: usize,
    rng: &mut R,
) -> Result<(BellOutcome, PureState)> {
    let dist = bell_distribution(state, a, b)?;
    let outcome = BellOutcome::from_index(sample_index(&dist, rng));
    let post = project_bell(state, a, b, outcome)?.expect("sampled outcome has support");
    Ok((outcome, post))
}

/// Teleports `input` over a fresh Bell pair with the Bell outcome forced to
/// `outcome`. Returns the receiver qubit before any correction.
pub fn teleport_with_outcome(input: &PureState, outcome: BellOutcome) -> Result<PureState> {
    teleport_over_with_outcome(input, &make_bell(), outcome)
}

fn teleport_joint(input: &PureState, pair: &PureState) -> Result<PureState> {
    if input.qubits() != 1 {
        return Err(Error::Register(format!("teleport input has {} qubits", input.qubits())));
    }
    if pair.qubits() != 2 {
        return Err(Error::Register(format!("teleport channel has {} qubits", pair.qubits())));
    }
    input.tensor(pair)
}

/// Teleportation over a caller-supplied two-qubit channel `pair` (sender half
/// first) with a forced outcome. `None`-support outcomes are an error.
pub fn teleport_over_with_outcome(input: &PureState, pair: &PureState, outcome: BellOutcome) -> Result<PureState> {
    let mut s = teleport_joint(input, pair)?;
    bell_to_computational(&mut s, 0, 1);
    let base = outcome.index() << 1;
    let mut receiver = PureState { qubits: 1, amps: vec![s.amps[base], s.amps[base | 1]] };
    if !receiver.renormalize() {
        return Err(Error::Register("teleport outcome without support".into()));
    }
    Ok(receiver)
}

/// Teleports a single qubit over `pair`: Bell-measures the input with the
/// sender half and returns the outcome with the uncorrected receiver qubit.
pub fn teleport_over<R: Rng + ?Sized>(input: &PureState, pair: &PureState, rng: &mut R) -> Result<(BellOutcome, PureState)> {
    let joint = teleport_joint(input, pair)?;
    let dist = bell_distribution(&joint, 0, 1)?;
    let outcome = BellOutcome::from_index(sample_index(&dist, rng));
    Ok((outcome, teleport_over_with_outcome(input, pair, outcome)?))
}

/// Teleports a single qubit: builds `input ⊗ Φ+`, Bell-measures qubits
/// (0, 1) and returns the outcome with the uncorrected receiver qubit.
pub fn teleport<R: Rng + ?Sized>(input: &PureState, rng: &mut R) -> Result<(BellOutcome, PureState)> {
    teleport_over(input, &make_bell(), rng)
}

/// Receiver-side correction: `Z^{d0}` followed by `X^{d1}`.
pub fn correct(outcome: BellOutcome, receiver: &PureState) -> Result<PureState> {
    let mut s = receiver.clone();
    if outcome.d0 {
        s = s.apply_single(0, &PAULI_Z)?;
    }
    if outcome.d1 {
        s = s.apply_single(0, &PAULI_X)?;
    }
    Ok(s)
}

/// The bit sequence `C` selecting the unitary `U_C`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GateWord(Vec<bool>);

impl GateWord {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyGateWord);
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The 2×2 unitary `U_C` (gates applied left to right).
    pub fn matrix(&self) -> Matrix2 {
        self.0.iter().fold(IDENTITY, |acc, &bit| mat_mul(gate_for(bit), &acc))
    }
}

impl FromStr for GateWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Register(format!("invalid gate word character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        GateWord::new(bits)
    }
}

impl fmt::Display for GateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn gate_for(bit: bool) -> &'static Matrix2 {
    if bit {
        &HADAMARD
    } else {
        &PAULI_X
    }
}

fn require_single(state: &PureState) -> Result<()> {
    if state.qubits() != 1 {
        return Err(Error::Register(format!("expected 1 qubit, got {}", state.qubits())));
    }
    Ok(())
}

/// `U_C|θ>`: X for every 0 bit, H for every 1 bit, in order.
pub fn apply_gate_word(word: &GateWord, state: &PureState) -> Result<PureState> {
    require_single(state)?;
    let mut s = state.clone();
    for &bit in word.bits() {
        s.apply_single_in_place(0, gate_for(bit));
    }
    Ok(s)
}

/// Conjugate transpose.
pub fn adjoint(m: &Matrix2) -> Matrix2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

/// `U_C⁻¹|φ>`. X and H are self-inverse, so this is the word reversed.
pub fn invert_gate_word(word: &GateWord, state: &PureState) -> Result<PureState> {
    require_single(state)?;
    let mut s = state.clone();
    for &bit in word.bits().iter().rev() {
        s.apply_single_in_place(0, gate_for(bit));
    }
    Ok(s)
}

const SIGNATURE_SCALE: f64 = 1e9;

/// Canonical fingerprint of a single-qubit state: global phase removed by
/// rotating the first nonzero amplitude onto the positive real axis, then
/// quantized.
pub fn canonical_state_key(amps: &[Complex64]) -> [i64; 4] {
    let lead = amps.iter().find(|a| a.norm() > 1e-9).copied().unwrap_or(ONE);
    let phase = lead.conj() / lead.norm();
    let q = |x: f64| {
        let v = (x * SIGNATURE_SCALE).round() as i64;
        if v == 0 {
            0
        } else {
            v
        }
    };
    let a0 = amps[0] * phase;
    let a1 = amps[1] * phase;
    [q(a0.re), q(a0.im), q(a1.re), q(a1.im)]
}

/// The input–output set `S = {(|0>, U|0>), (|1>, U|1>), (|+>, U|+>), (|->, U|->)}`
/// with outputs reduced to canonical phase. Inputs are implicit in position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateSignature(pub [[i64; 4]; 4]);

pub fn gate_word_signature(word: &GateWord) -> GateSignature {
    let mut out = [[0; 4]; 4];
    for (slot, tag) in out.iter_mut().zip(Bb84Tag::all()) {
        let phi = apply_gate_word(word, &prepare(tag)).expect("single-qubit input");
        *slot = canonical_state_key(phi.amps());
    }
    GateSignature(out)
}
