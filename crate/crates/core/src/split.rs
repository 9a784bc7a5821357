//! Entanglement-free identification with a split secret.
//!
//! Charlie splits `S_C = S_A ⊕ S_B`, gives Alice `S_A` and a BB84 sequence
//! whose values are `S_A` and whose bases are `S_B`. Bob, holding `S_B`,
//! proves himself to Alice chunk by chunk by reading out `S_A` and returning
//! the qubits with a parity bit that only Charlie can check.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::digest::parity;
use crate::error::{Error, Result};
use crate::quantum::{measure, outcome_distribution, prepare, Basis, Bb84Tag, PureState};

/// Largest chunk the table-based `f` supports.
pub const MAX_CHUNK_LEN: usize = 20;

#[derive(Debug, Clone)]
pub struct SecretShares {
    pub s_c: Vec<bool>,
    pub s_a: Vec<bool>,
    pub s_b: Vec<bool>,
    pub qubits: Vec<PureState>,
    /// Charlie's record of what he sent.
    pub tags: Vec<Bb84Tag>,
}

impl SecretShares {
    pub fn m(&self) -> usize {
        self.s_c.len()
    }
}

/// Chunking parameters and the public bijection `f` on `chunk_len`-bit
/// strings, stored as a key-derived table with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkConfig {
    m: usize,
    k: usize,
    chunk_len: usize,
    f_key: Vec<u8>,
    table: Vec<u32>,
    inverse: Vec<u32>,
}

impl ChunkConfig {
    pub fn new(m: usize, k: usize, f_key: &[u8]) -> Result<Self> {
        if m == 0 {
            return Err(Error::Chunking("m must be at least 1".into()));
        }
        if k == 0 || !m.is_multiple_of(k) {
            return Err(Error::Chunking(format!("k = {k} does not divide m = {m}")));
        }
        let chunk_len = m / k;
        if chunk_len > MAX_CHUNK_LEN {
            return Err(Error::Chunking(format!("chunk length {chunk_len} exceeds {MAX_CHUNK_LEN}")));
        }
        let seed: [u8; 32] = Sha256::new().chain_update(b"split-f").chain_update(f_key).finalize().into();
        let mut table: Vec<u32> = (0..1u32 << chunk_len).collect();
        table.shuffle(&mut ChaCha8Rng::from_seed(seed));
        let mut inverse = vec![0u32; table.len()];
        for (x, &y) in table.iter().enumerate() {
            inverse[y as usize] = x as u32;
        }
        Ok(Self { m, k, chunk_len, f_key: f_key.to_vec(), table, inverse })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn chunk_len(&self) -> usize {
        self.chunk_len
    }

    pub fn f_key(&self) -> &[u8] {
        &self.f_key
    }

    pub fn chunk_range(&self, chunk: usize) -> std::ops::Range<usize> {
        chunk * self.chunk_len..(chunk + 1) * self.chunk_len
    }

    pub fn f(&self, bits: &[bool]) -> Result<Vec<bool>> {
        self.lookup(bits, &self.table)
    }

    pub fn f_inv(&self, bits: &[bool]) -> Result<Vec<bool>> {
        self.lookup(bits, &self.inverse)
    }

    fn lookup(&self, bits: &[bool], table: &[u32]) -> Result<Vec<bool>> {
        if bits.len() != self.chunk_len {
            return Err(Error::SizeMismatch { expected: self.chunk_len, actual: bits.len() });
        }
        let x = bits.iter().fold(0u32, |acc, &b| acc << 1 | b as u32);
        let y = table[x as usize];
        Ok((0..self.chunk_len).rev().map(|i| y >> i & 1 == 1).collect())
    }

    /// `parity(f(a ⊕ b))` for one chunk.
    pub fn chunk_parity(&self, s_a_chunk: &[bool], s_b_chunk: &[bool]) -> Result<bool> {
        if s_a_chunk.len() != s_b_chunk.len() {
            return Err(Error::SizeMismatch { expected: s_a_chunk.len(), actual: s_b_chunk.len() });
        }
        let x: Vec<bool> = s_a_chunk.iter().zip(s_b_chunk).map(|(a, b)| a ^ b).collect();
        Ok(parity(self.f(&x)?))
    }
}

#[derive(Debug, Clone)]
pub struct ChunkResponse {
    pub s_a_chunk: Vec<bool>,
    pub parity_bit: bool,
    pub returned_qubits: Vec<PureState>,
}

pub fn charlie_setup<R: Rng + ?Sized>(s_c: &[bool], rng: &mut R) -> Result<SecretShares> {
    if s_c.is_empty() {
        return Err(Error::EmptySecret);
    }
    let s_b: Vec<bool> = (0..s_c.len()).map(|_| rng.random()).collect();
    let s_a: Vec<bool> = s_c.iter().zip(&s_b).map(|(c, b)| c ^ b).collect();
    let tags: Vec<Bb84Tag> = s_a.iter().zip(&s_b).map(|(&a, &b)| Bb84Tag::new(a, Basis::from_bit(b))).collect();
    let qubits = tags.iter().map(|&t| prepare(t)).collect();
    Ok(SecretShares { s_c: s_c.to_vec(), s_a, s_b, qubits, tags })
}

/// Measure in `basis` and hand back a fresh copy of the observed eigenstate.
fn measure_reprepare<R: Rng + ?Sized>(q: &PureState, basis: Basis, rng: &mut R) -> Result<(bool, PureState)> {
    let (bit, _) = measure(q, 0, basis, rng)?;
    Ok((bit, prepare(Bb84Tag::new(bit, basis))))
}

pub fn bob_respond<R: Rng + ?Sized>(
    chunk_qubits: &[PureState],
    chunk_index: usize,
    s_b: &[bool],
    cfg: &ChunkConfig,
    rng: &mut R,
) -> Result<ChunkResponse> {
    if chunk_qubits.len() != cfg.chunk_len {
        return Err(Error::SizeMismatch { expected: cfg.chunk_len, actual: chunk_qubits.len() });
    }
    if chunk_index >= cfg.k || s_b.len() != cfg.m {
        return Err(Error::Chunking(format!("chunk {chunk_index} out of range or S_B length {}", s_b.len())));
    }
    let s_b_chunk = &s_b[cfg.chunk_range(chunk_index)];
    let mut s_a_chunk = Vec::with_capacity(cfg.chunk_len);
    let mut returned_qubits = Vec::with_capacity(cfg.chunk_len);
    for (q, &basis_bit) in chunk_qubits.iter().zip(s_b_chunk) {
        let (bit, post) = measure_reprepare(q, Basis::from_bit(basis_bit), rng)?;
        s_a_chunk.push(bit);
        returned_qubits.push(post);
    }
    let parity_bit = cfg.chunk_parity(&s_a_chunk, s_b_chunk)?;
    Ok(ChunkResponse { s_a_chunk, parity_bit, returned_qubits })
}

/// Someone without `S_B`: random bases, measure and re-prepare, random parity.
pub fn impostor_respond<R: Rng + ?Sized>(
    chunk_qubits: &[PureState],
    cfg: &ChunkConfig,
    rng: &mut R,
) -> Result<ChunkResponse> {
    if chunk_qubits.len() != cfg.chunk_len {
        return Err(Error::SizeMismatch { expected: cfg.chunk_len, actual: chunk_qubits.len() });
    }
    let mut s_a_chunk = Vec::with_capacity(cfg.chunk_len);
    let mut returned_qubits = Vec::with_capacity(cfg.chunk_len);
    for q in chunk_qubits {
        let (bit, post) = measure_reprepare(q, Basis::from_bit(rng.random()), rng)?;
        s_a_chunk.push(bit);
        returned_qubits.push(post);
    }
    Ok(ChunkResponse { s_a_chunk, parity_bit: rng.random(), returned_qubits })
}

/// Whoever answers Alice's chunk challenges.
pub trait Responder {
    fn name(&self) -> &'static str;
    fn respond(
        &self,
        chunk_qubits: &[PureState],
        chunk_index: usize,
        cfg: &ChunkConfig,
        rng: &mut dyn RngCore,
    ) -> Result<ChunkResponse>;
}

pub struct HonestBob {
    pub s_b: Vec<bool>,
}

impl Responder for HonestBob {
    fn name(&self) -> &'static str {
        "bob"
    }

    fn respond(&self, q: &[PureState], chunk: usize, cfg: &ChunkConfig, rng: &mut dyn RngCore) -> Result<ChunkResponse> {
        bob_respond(q, chunk, &self.s_b, cfg, rng)
    }
}

pub struct Impostor;

impl Responder for Impostor {
    fn name(&self) -> &'static str {
        "impostor"
    }

    fn respond(&self, q: &[PureState], _chunk: usize, cfg: &ChunkConfig, rng: &mut dyn RngCore) -> Result<ChunkResponse> {
        impostor_respond(q, cfg, rng)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChunkLog {
    pub chunk: usize,
    pub reported_s_a: String,
    #[serde(serialize_with = "crate::transcript::bit")]
    pub parity: bool,
    pub matched: bool,
}

#[derive(Debug, Clone)]
pub struct AliceOutcome {
    pub accept_bob: bool,
    pub parity_bits: Vec<bool>,
    pub returned_qubits: Vec<PureState>,
    pub chunks: Vec<ChunkLog>,
}

/// Alice challenges chunk by chunk. Every chunk is asked even after a
/// mismatch so Charlie always receives a full sequence.
pub fn alice_run(
    s_a: &[bool],
    qubits: &[PureState],
    cfg: &ChunkConfig,
    responder: &dyn Responder,
    rng: &mut dyn RngCore,
) -> Result<AliceOutcome> {
    if s_a.len() != cfg.m || qubits.len() != cfg.m {
        return Err(Error::SizeMismatch { expected: cfg.m, actual: qubits.len().min(s_a.len()) });
    }
    let mut out = AliceOutcome {
        accept_bob: true,
        parity_bits: Vec::with_capacity(cfg.k),
        returned_qubits: Vec::with_capacity(cfg.m),
        chunks: Vec::with_capacity(cfg.k),
    };
    for chunk in 0..cfg.k {
        let range = cfg.chunk_range(chunk);
        let resp = responder.respond(&qubits[range.clone()], chunk, cfg, rng)?;
        let matched = resp.s_a_chunk == s_a[range];
        out.accept_bob &= matched;
        out.chunks.push(ChunkLog {
            chunk,
            reported_s_a: crate::transcript::bits_string(&resp.s_a_chunk),
            parity: resp.parity_bit,
            matched,
        });
        out.parity_bits.push(resp.parity_bit);
        out.returned_qubits.extend(resp.returned_qubits);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CharlieVerdict {
    pub accepted: bool,
    pub parity_ok: bool,
    pub qubits_ok: bool,
}

/// Charlie recomputes every parity and remeasures every returned qubit in
/// its preparation basis. A count mismatch is a rejection.
pub fn charlie_verify<R: Rng + ?Sized>(
    shares: &SecretShares,
    cfg: &ChunkConfig,
    parity_bits: &[bool],
    returned_qubits: &[PureState],
    rng: &mut R,
) -> Result<CharlieVerdict> {
    if parity_bits.len() != cfg.k || returned_qubits.len() != cfg.m || shares.m() != cfg.m {
        return Ok(CharlieVerdict { accepted: false, parity_ok: false, qubits_ok: false });
    }
    let mut parity_ok = true;
    for (chunk, &b) in parity_bits.iter().enumerate() {
        let r = cfg.chunk_range(chunk);
        parity_ok &= cfg.chunk_parity(&shares.s_a[r.clone()], &shares.s_b[r])? == b;
    }
    let mut qubits_ok = true;
    for (q, tag) in returned_qubits.iter().zip(&shares.tags) {
        let (bit, _) = measure(q, 0, tag.basis, rng)?;
        qubits_ok &= bit == tag.value;
    }
    Ok(CharlieVerdict { accepted: parity_ok && qubits_ok, parity_ok, qubits_ok })
}

/// Alice tries to learn `S_B` from the qubits. She measures each in a random
/// basis; an outcome contradicting her `S_A` bit proves the basis wrong,
/// otherwise she bets on the basis she used. Returns her guess and the
/// re-prepared sequence she forwards.
pub fn snooping_alice<R: Rng + ?Sized>(
    s_a: &[bool],
    qubits: &[PureState],
    cfg: &ChunkConfig,
    rng: &mut R,
) -> Result<(Vec<bool>, Vec<PureState>)> {
    if s_a.len() != cfg.m || qubits.len() != cfg.m {
        return Err(Error::SizeMismatch { expected: cfg.m, actual: qubits.len().min(s_a.len()) });
    }
    let mut guess = Vec::with_capacity(cfg.m);
    let mut disturbed = Vec::with_capacity(cfg.m);
    for (q, &a) in qubits.iter().zip(s_a) {
        let basis = Basis::from_bit(rng.random());
        let (bit, post) = measure_reprepare(q, basis, rng)?;
        guess.push(if bit == a { basis.bit() } else { !basis.bit() });
        disturbed.push(post);
    }
    Ok((guess, disturbed))
}

/// Exact per-qubit figures for an adversary who measures in a uniform random
/// basis and re-prepares, enumerated over the four BB84 states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomBasisOdds {
    /// Reported value equals the encoded value.
    pub value_correct: f64,
    /// Charlie's remeasurement of the forwarded qubit disagrees.
    pub detected: f64,
    /// Snooping Alice's basis guess is right.
    pub basis_guess_correct: f64,
}

pub fn random_basis_odds() -> Result<RandomBasisOdds> {
    let mut odds = RandomBasisOdds { value_correct: 0.0, detected: 0.0, basis_guess_correct: 0.0 };
    for tag in Bb84Tag::all() {
        for guess_basis in [Basis::Rectilinear, Basis::Diagonal] {
            let (p0, p1) = outcome_distribution(&prepare(tag), 0, guess_basis)?;
            for (bit, p) in [(false, p0), (true, p1)] {
                let w = 0.25 * 0.5 * p;
                let forwarded = prepare(Bb84Tag::new(bit, guess_basis));
                let (c0, c1) = outcome_distribution(&forwarded, 0, tag.basis)?;
                let miss = if tag.value { c0 } else { c1 };
                let guessed = if bit == tag.value { guess_basis } else { guess_basis.other() };
                odds.value_correct += w * (bit == tag.value) as u8 as f64;
                odds.detected += w * miss;
                odds.basis_guess_correct += w * (guessed == tag.basis) as u8 as f64;
            }
        }
    }
    Ok(odds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use proptest::prelude::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn secret(m: usize, r: &mut ChaCha8Rng) -> Vec<bool> {
        (0..m).map(|_| r.random()).collect()
    }

    #[test]
    fn zero_secret_gives_equal_shares() {
        let mut r = rng(1);
        let sh = charlie_setup(&[false; 16], &mut r).unwrap();
        assert_eq!(sh.s_a, sh.s_b);
        for (q, t) in sh.qubits.iter().zip(&sh.tags) {
            assert!((q.fidelity(&prepare(*t)).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_secret_rejected() {
        assert_eq!(charlie_setup(&[], &mut rng(0)).unwrap_err(), Error::EmptySecret);
    }

    #[test]
    fn s_b_marginal_uniform() {
        let mut r = rng(2);
        let draws = 10_000;
        let mut ones = [0usize; 8];
        for _ in 0..draws {
            let sh = charlie_setup(&[true; 8], &mut r).unwrap();
            for (c, &b) in ones.iter_mut().zip(&sh.s_b) {
                *c += b as usize;
            }
        }
        let sd = (0.25 * draws as f64).sqrt();
        for c in ones {
            assert!((c as f64 - draws as f64 / 2.0).abs() <= 4.0 * sd);
        }
    }

    #[test]
    fn chunk_config_validation() {
        assert!(ChunkConfig::new(32, 4, b"k").is_ok());
        assert!(ChunkConfig::new(32, 5, b"k").is_err());
        assert!(ChunkConfig::new(32, 0, b"k").is_err());
        assert!(ChunkConfig::new(0, 1, b"k").is_err());
        assert!(ChunkConfig::new(64, 2, b"k").is_err());
    }

    #[test]
    fn f_is_bijection_exhaustive() {
        for len in 1..=12 {
            let cfg = ChunkConfig::new(len, 1, b"exhaustive").unwrap();
            let mut seen = vec![false; 1 << len];
            for x in 0..1u32 << len {
                let bits: Vec<bool> = (0..len).rev().map(|i| x >> i & 1 == 1).collect();
                let y = cfg.f(&bits).unwrap();
                assert_eq!(cfg.f_inv(&y).unwrap(), bits);
                let yi = y.iter().fold(0usize, |a, &b| a << 1 | b as usize);
                assert!(!seen[yi]);
                seen[yi] = true;
            }
        }
    }

    #[test]
    fn f_depends_on_key() {
        let a = ChunkConfig::new(8, 1, b"a").unwrap();
        let b = ChunkConfig::new(8, 1, b"b").unwrap();
        assert_ne!(a.table, b.table);
        assert_eq!(a, ChunkConfig::new(8, 1, b"a").unwrap());
    }

    #[test]
    fn honest_bob_reads_s_a_without_disturbance() {
        let mut r = rng(3);
        let cfg = ChunkConfig::new(16, 4, b"f").unwrap();
        let sh = charlie_setup(&secret(16, &mut r), &mut r).unwrap();
        for chunk in 0..4 {
            let range = cfg.chunk_range(chunk);
            let resp = bob_respond(&sh.qubits[range.clone()], chunk, &sh.s_b, &cfg, &mut r).unwrap();
            assert_eq!(resp.s_a_chunk, sh.s_a[range.clone()]);
            for (q, orig) in resp.returned_qubits.iter().zip(&sh.qubits[range.clone()]) {
                assert!((q.fidelity(orig).unwrap() - 1.0).abs() < 1e-12);
            }
            let expect = cfg.chunk_parity(&sh.s_a[range.clone()], &sh.s_b[range]).unwrap();
            assert_eq!(resp.parity_bit, expect);
        }
    }

    #[test]
    fn bob_rejects_wrong_chunk_size() {
        let mut r = rng(4);
        let cfg = ChunkConfig::new(8, 2, b"f").unwrap();
        let sh = charlie_setup(&[false; 8], &mut r).unwrap();
        assert!(bob_respond(&sh.qubits[..3], 0, &sh.s_b, &cfg, &mut r).is_err());
    }

    #[test]
    fn honest_end_to_end() {
        for seed in 0..200 {
            let mut r = rng(seed);
            let cfg = ChunkConfig::new(32, 4, b"f").unwrap();
            let sh = charlie_setup(&secret(32, &mut r), &mut r).unwrap();
            let bob = HonestBob { s_b: sh.s_b.clone() };
            let out = alice_run(&sh.s_a, &sh.qubits, &cfg, &bob, &mut r).unwrap();
            assert!(out.accept_bob);
            let v = charlie_verify(&sh, &cfg, &out.parity_bits, &out.returned_qubits, &mut r).unwrap();
            assert!(v.accepted);
        }
    }

    #[test]
    fn flipped_parity_always_rejected() {
        let mut r = rng(5);
        let cfg = ChunkConfig::new(16, 4, b"f").unwrap();
        let sh = charlie_setup(&secret(16, &mut r), &mut r).unwrap();
        let bob = HonestBob { s_b: sh.s_b.clone() };
        let out = alice_run(&sh.s_a, &sh.qubits, &cfg, &bob, &mut r).unwrap();
        for i in 0..4 {
            let mut bits = out.parity_bits.clone();
            bits[i] = !bits[i];
            let v = charlie_verify(&sh, &cfg, &bits, &out.returned_qubits, &mut r).unwrap();
            assert!(!v.accepted && !v.parity_ok);
        }
    }

    #[test]
    fn wrong_basis_qubit_rejected_half_the_time() {
        let mut r = rng(6);
        let cfg = ChunkConfig::new(4, 1, b"f").unwrap();
        let sh = charlie_setup(&[true, false, true, false], &mut r).unwrap();
        let bob = HonestBob { s_b: sh.s_b.clone() };
        let out = alice_run(&sh.s_a, &sh.qubits, &cfg, &bob, &mut r).unwrap();
        let mut returned = out.returned_qubits.clone();
        returned[2] = prepare(Bb84Tag::new(sh.tags[2].value, sh.tags[2].basis.other()));
        let trials = 20_000;
        let rejects = (0..trials)
            .filter(|_| !charlie_verify(&sh, &cfg, &out.parity_bits, &returned, &mut r).unwrap().accepted)
            .count();
        let sd = (0.25 / trials as f64).sqrt();
        assert!((rejects as f64 / trials as f64 - 0.5).abs() <= 4.0 * sd);
    }

    #[test]
    fn count_mismatch_rejected() {
        let mut r = rng(7);
        let cfg = ChunkConfig::new(8, 2, b"f").unwrap();
        let sh = charlie_setup(&[false; 8], &mut r).unwrap();
        let v = charlie_verify(&sh, &cfg, &[false], &sh.qubits, &mut r).unwrap();
        assert!(!v.accepted);
    }

    #[test]
    fn enumerated_odds() {
        let o = random_basis_odds().unwrap();
        assert!((o.value_correct - 0.75).abs() < 1e-12);
        assert!((o.detected - 0.25).abs() < 1e-12);
        assert!((o.basis_guess_correct - 0.75).abs() < 1e-12);
    }

    #[test]
    fn impostor_per_qubit_rates() {
        let mut r = rng(8);
        let cfg = ChunkConfig::new(1, 1, b"f").unwrap();
        let trials = 100_000;
        let (mut correct, mut detected, mut parity) = (0, 0, 0);
        for _ in 0..trials {
            let sh = charlie_setup(&[r.random()], &mut r).unwrap();
            let resp = impostor_respond(&sh.qubits, &cfg, &mut r).unwrap();
            correct += (resp.s_a_chunk[0] == sh.s_a[0]) as usize;
            let expect = cfg.chunk_parity(&sh.s_a, &sh.s_b).unwrap();
            parity += (resp.parity_bit == expect) as usize;
            let (bit, _) = measure(&resp.returned_qubits[0], 0, sh.tags[0].basis, &mut r).unwrap();
            detected += (bit != sh.tags[0].value) as usize;
        }
        let check = |hits: usize, p: f64| {
            let sd = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((hits as f64 / trials as f64 - p).abs() <= 4.0 * sd, "{hits} vs {p}");
        };
        check(correct, 0.75);
        check(detected, 0.25);
        check(parity, 0.5);
    }

    #[test]
    fn impostor_acceptance_and_degenerate_chunking() {
        let mut r = rng(9);
        let trials = 100_000;
        let p = 0.75f64.powi(4);
        for k in [1, 2, 4] {
            let cfg = ChunkConfig::new(4, k, b"f").unwrap();
            let mut accepted = 0;
            for _ in 0..trials {
                let sh = charlie_setup(&secret(4, &mut r), &mut r).unwrap();
                accepted += alice_run(&sh.s_a, &sh.qubits, &cfg, &Impostor, &mut r).unwrap().accept_bob as usize;
            }
            let sd = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((accepted as f64 / trials as f64 - p).abs() <= 4.0 * sd, "k = {k}");
        }
    }

    #[test]
    fn snoop_guess_accuracy_matches_enumeration() {
        let mut r = rng(10);
        let cfg = ChunkConfig::new(16, 4, b"f").unwrap();
        let trials = 10_000;
        let mut right = 0;
        for _ in 0..trials {
            let sh = charlie_setup(&secret(16, &mut r), &mut r).unwrap();
            let (guess, _) = snooping_alice(&sh.s_a, &sh.qubits, &cfg, &mut r).unwrap();
            right += guess.iter().zip(&sh.s_b).filter(|(g, b)| g == b).count();
        }
        let n = (trials * 16) as f64;
        let sd = (0.75 * 0.25 / n).sqrt();
        assert!((right as f64 / n - 0.75).abs() <= 4.0 * sd);
    }

    proptest! {
        #[test]
        fn shares_reconstruct(seed in any::<u64>(), m in 1usize..64) {
            let mut r = rng(seed);
            let s_c = secret(m, &mut r);
            let sh = charlie_setup(&s_c, &mut r).unwrap();
            let back: Vec<bool> = sh.s_a.iter().zip(&sh.s_b).map(|(a, b)| a ^ b).collect();
            prop_assert_eq!(back, s_c);
            for (i, t) in sh.tags.iter().enumerate() {
                prop_assert_eq!(t.value, sh.s_a[i]);
                prop_assert_eq!(t.basis.bit(), sh.s_b[i]);
            }
        }
    }
}
