//! Proof transfer: a colluding Eve becomes convinced that V talked to P.
//!
//! [`attack1`] uses shared Bell pairs measured in digest-chosen bases with
//! the parity as challenge. [`attack2`] teleports an Eve-supplied qubit
//! through the digest-selected unitary and uses `d0 ⊕ d1` as challenge.
//! Both come with the verifier's collision cheat, and [`detection`] holds the
//! exact oracle for a verifier who lies about teleportation bits.

pub mod attack1;
pub mod attack2;
pub mod detection;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation};
use crate::quantum::{make_bell, measure, Basis, PureState};

/// Bell pairs shared in advance. Qubit 0 of each pair is V's half, qubit 1
/// Eve's. Both parties consume pairs strictly in index order.
#[derive(Debug, Clone)]
pub struct SharedPairPool {
    pairs: Vec<PureState>,
    v_next: usize,
    eve_next: usize,
}

impl SharedPairPool {
    pub fn new(count: usize) -> Self {
        Self { pairs: vec![make_bell(); count], v_next: 0, eve_next: 0 }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs V has used.
    pub fn consumed_count(&self) -> usize {
        self.v_next
    }

    pub fn eve_consumed(&self) -> usize {
        self.eve_next
    }

    pub fn pair(&self, index: usize) -> Option<&PureState> {
        self.pairs.get(index)
    }

    fn reserve(next: usize, len: usize, needed: usize) -> Result<()> {
        if next + needed > len {
            return Err(Error::PoolExhausted { needed, available: len - next });
        }
        Ok(())
    }

    /// V measures his halves of the next `bases.len()` pairs. Returns the
    /// index of the first pair used and the outcome bits.
    pub fn measure_v<R: Rng + ?Sized>(&mut self, bases: &[Basis], rng: &mut R) -> Result<(usize, Vec<bool>)> {
        self.measure_half(0, bases, rng)
    }

    /// Eve measures her halves of the next `bases.len()` pairs.
    pub fn measure_eve<R: Rng + ?Sized>(&mut self, bases: &[Basis], rng: &mut R) -> Result<(usize, Vec<bool>)> {
        self.measure_half(1, bases, rng)
    }

    fn measure_half<R: Rng + ?Sized>(&mut self, qubit: usize, bases: &[Basis], rng: &mut R) -> Result<(usize, Vec<bool>)> {
        let next = if qubit == 0 { self.v_next } else { self.eve_next };
        Self::reserve(next, self.pairs.len(), bases.len())?;
        let mut bits = Vec::with_capacity(bases.len());
        for (offset, &basis) in bases.iter().enumerate() {
            let (bit, post) = measure(&self.pairs[next + offset], qubit, basis, rng)?;
            self.pairs[next + offset] = post;
            bits.push(bit);
        }
        if qubit == 0 {
            self.v_next += bases.len();
        } else {
            self.eve_next += bases.len();
        }
        Ok((next, bits))
    }

    /// Hands the next pair to a teleportation, consuming it for both parties.
    pub fn take_for_teleport(&mut self) -> Result<(usize, PureState)> {
        let next = self.v_next.max(self.eve_next);
        Self::reserve(next, self.pairs.len(), 1)?;
        self.v_next = next + 1;
        self.eve_next = next + 1;
        Ok((next, self.pairs[next].clone()))
    }
}

/// What V hands Eve per round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofTuple {
    #[serde(rename = "H")]
    pub h_graph: Graph,
    pub xi: Permutation,
    #[serde(serialize_with = "crate::transcript::bit")]
    pub b: bool,
}

/// Eve's per-round finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EveRound {
    pub round: usize,
    /// The challenge bit Eve uses for the isomorphism check.
    #[serde(serialize_with = "crate::transcript::bit")]
    pub b: bool,
    /// Outcome of Eve's state check; `None` when the construction has none.
    pub quantum_ok: Option<bool>,
    pub iso_ok: bool,
}

/// Eve's verdict. Verification stops at the first failing round, so
/// `rounds` may be shorter than the tuple list when `accepted` is false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EveVerdict {
    pub accepted: bool,
    pub rounds: Vec<EveRound>,
}

/// Result of a collision cheat by V.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheatOutcome<R> {
    pub tuples: Vec<ProofTuple>,
    /// Every round produced a consistent tuple within budget.
    pub success: bool,
    /// Digest evaluations spent on collision search.
    pub collision_calls: usize,
    /// Rounds where the measured challenge already matched V's bit.
    pub matches: usize,
    pub rounds: Vec<R>,
}
