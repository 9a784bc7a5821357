//! Transfer through teleportation.
//!
//! Eve hands V one BB84 qubit `|θ>` per round. V applies `U_C` with
//! `C = h(H)`, teleports the result to Eve over one shared pair and
//! challenges P with `d0 ⊕ d1`. Eve later corrects, undoes `U_{h(H_k)}` and
//! measures in the basis she prepared; an honest V always restores `|θ>`.

use rand::Rng;
use serde::Serialize;

use super::{CheatOutcome, EveRound, EveVerdict, ProofTuple, SharedPairPool};
use crate::digest::{find_collision, DigestParams};
use crate::error::{Error, Result};
use crate::gmw::{honest_round, prover_commit, verifier_check, GmwInstance};
use crate::graph::{apply_perm, Graph, Permutation};
use crate::quantum::{
    apply_gate_word, correct, invert_gate_word, measure, prepare, teleport_over, Bb84Tag, BellOutcome, GateWord,
    PureState,
};

/// The qubits Eve prepares and sends to V, with her private record of what
/// each one is. V only ever reads `states`.
#[derive(Debug, Clone)]
pub struct EveQubits {
    pub tags: Vec<Bb84Tag>,
    pub states: Vec<PureState>,
}

impl EveQubits {
    pub fn prepare<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Self {
        let tags: Vec<Bb84Tag> = (0..count).map(|_| Bb84Tag::random(rng)).collect();
        let states = tags.iter().map(|&t| prepare(t)).collect();
        Self { tags, states }
    }

    pub fn from_tags(tags: Vec<Bb84Tag>) -> Self {
        let states = tags.iter().map(|&t| prepare(t)).collect();
        Self { tags, states }
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

/// One teleportation round as Eve ends up holding it.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportChallenge {
    pub round: usize,
    pub theta_tag: Bb84Tag,
    pub word: GateWord,
    /// Classical bits as reported by V.
    pub outcome: BellOutcome,
    /// Eve's half after the Bell measurement, before correction.
    pub receiver_state: PureState,
    pub pool_index: usize,
}

impl TeleportChallenge {
    pub fn b(&self) -> bool {
        self.outcome.xor()
    }
}

/// V's step 2 for round `round_index`.
pub fn a2_verifier_challenge<R: Rng + ?Sized>(
    pool: &mut SharedPairPool,
    eve: &EveQubits,
    params: &DigestParams,
    h_graph: &Graph,
    round_index: usize,
    rng: &mut R,
) -> Result<TeleportChallenge> {
    let theta = eve
        .states
        .get(round_index)
        .ok_or(Error::QubitsExhausted { round: round_index, available: eve.len() })?;
    if pool.consumed_count() != round_index {
        return Err(Error::PoolMisaligned { expected: round_index, actual: pool.consumed_count() });
    }
    let word = params.digest(h_graph)?.to_gate_word()?;
    let phi = apply_gate_word(&word, theta)?;
    let (pool_index, pair) = pool.take_for_teleport()?;
    let (outcome, receiver_state) = teleport_over(&phi, &pair, rng)?;
    Ok(TeleportChallenge {
        round: round_index,
        theta_tag: eve.tags[round_index],
        word,
        outcome,
        receiver_state,
        pool_index,
    })
}

/// Eve's quantum check for one round: correct with the reported bits, undo
/// `U_{word}`, measure in the preparation basis. True when the outcome
/// matches the prepared value.
pub fn eve_state_check<R: Rng + ?Sized>(ch: &TeleportChallenge, word: &GateWord, rng: &mut R) -> Result<bool> {
    let corrected = correct(ch.outcome, &ch.receiver_state)?;
    let restored = invert_gate_word(word, &corrected)?;
    let (bit, _) = measure(&restored, 0, ch.theta_tag.basis, rng)?;
    Ok(bit == ch.theta_tag.value)
}

/// Eve's step 6. The challenge bit is `d0 ⊕ d1` from the teleportation;
/// the `b` field of each tuple is not consulted.
pub fn a2_eve_verify<R: Rng + ?Sized>(
    challenges: &[TeleportChallenge],
    params: &DigestParams,
    tuples: &[ProofTuple],
    g0: &Graph,
    g1: &Graph,
    rng: &mut R,
) -> Result<EveVerdict> {
    if challenges.len() != tuples.len() {
        return Err(Error::Alignment { challenges: challenges.len(), tuples: tuples.len() });
    }
    let mut rounds = Vec::with_capacity(tuples.len());
    for (round, (ch, t)) in challenges.iter().zip(tuples).enumerate() {
        let word = params.digest(&t.h_graph)?.to_gate_word()?;
        let quantum_ok = eve_state_check(ch, &word, rng)?;
        let b = ch.b();
        let iso_ok = verifier_check(g0, g1, &t.h_graph, b, &t.xi)?;
        rounds.push(EveRound { round, b, quantum_ok: Some(quantum_ok), iso_ok });
        if !(quantum_ok && iso_ok) {
            return Ok(EveVerdict { accepted: false, rounds });
        }
    }
    Ok(EveVerdict { accepted: true, rounds })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct A2Round {
    pub round: usize,
    #[serde(rename = "H")]
    pub h_graph: Graph,
    pub xi: Permutation,
    #[serde(serialize_with = "crate::transcript::bit")]
    pub b: bool,
    pub word: String,
    #[serde(serialize_with = "crate::transcript::bit")]
    pub d0: bool,
    #[serde(serialize_with = "crate::transcript::bit")]
    pub d1: bool,
    pub pool_index: usize,
    pub theta: String,
    pub verifier_accepted: bool,
}

#[derive(Debug, Clone)]
pub struct A2Session {
    pub rounds: Vec<A2Round>,
    pub tuples: Vec<ProofTuple>,
    pub challenges: Vec<TeleportChallenge>,
    pub verdict: EveVerdict,
    pub bell_pairs_used: usize,
    pub qubits_used: usize,
}

/// Steps 1–6 end to end with one Bell pair and one Eve qubit per round.
pub fn a2_run_honest<R: Rng + ?Sized>(inst: &GmwInstance, params: &DigestParams, rng: &mut R) -> Result<A2Session> {
    let eve = EveQubits::prepare(inst.n_rounds, rng);
    let mut pool = SharedPairPool::new(inst.n_rounds);
    let mut rounds = Vec::with_capacity(inst.n_rounds);
    let mut tuples = Vec::with_capacity(inst.n_rounds);
    let mut challenges = Vec::with_capacity(inst.n_rounds);
    for round in 0..inst.n_rounds {
        let (lambda, h) = prover_commit(inst, rng)?;
        let ch = a2_verifier_challenge(&mut pool, &eve, params, &h, round, rng)?;
        let rec = honest_round(inst, round, lambda, h, ch.b())?;
        rounds.push(A2Round {
            round,
            h_graph: rec.h_graph.clone(),
            xi: rec.xi.clone(),
            b: ch.b(),
            word: ch.word.to_string(),
            d0: ch.outcome.d0,
            d1: ch.outcome.d1,
            pool_index: ch.pool_index,
            theta: ch.theta_tag.to_string(),
            verifier_accepted: rec.accepted,
        });
        tuples.push(ProofTuple { h_graph: rec.h_graph, xi: rec.xi, b: ch.b() });
        challenges.push(ch);
    }
    let verdict = a2_eve_verify(&challenges, params, &tuples, &inst.g0, &inst.g1, rng)?;
    Ok(A2Session { rounds, tuples, challenges, verdict, bell_pairs_used: pool.consumed_count(), qubits_used: eve.len() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct A2CheatRound {
    pub round: usize,
    #[serde(serialize_with = "crate::transcript::bit")]
    pub d: bool,
    #[serde(serialize_with = "crate::transcript::bit")]
    pub b: bool,
    pub word: String,
    pub repaired: bool,
    pub failed: bool,
    pub collision_tries: usize,
}

/// V fabricates tuples without P, one round per Eve qubit. Per round: pick
/// `d`, a random `ξ: G_d → H`, apply `U_{h(H)}` and teleport truthfully,
/// giving `b`. If `b = d` send `(H, ξ, d)`; otherwise send `(H', ξ', d̄)`
/// for a collision `h(H') = h(H)` with `H'` an isomorph of `G_{d̄}`. Since
/// the word is unchanged, Eve's inversion still restores `|θ>`.
pub fn a2_cheat<R: Rng + ?Sized>(
    g0: &Graph,
    g1: &Graph,
    params: &DigestParams,
    eve: &EveQubits,
    pool: &mut SharedPairPool,
    collision_budget: usize,
    rng: &mut R,
) -> Result<(CheatOutcome<A2CheatRound>, Vec<TeleportChallenge>)> {
    let graph = |bit: bool| if bit { g1 } else { g0 };
    let mut out = CheatOutcome { tuples: Vec::new(), success: true, collision_calls: 0, matches: 0, rounds: Vec::new() };
    let mut challenges = Vec::with_capacity(eve.len());
    for round in 0..eve.len() {
        let d = rng.random::<bool>();
        let xi = Permutation::random(g0.n(), rng)?;
        let h = apply_perm(&xi, graph(d))?;
        let ch = a2_verifier_challenge(pool, eve, params, &h, round, rng)?;
        let b = ch.b();
        let mut log = A2CheatRound {
            round,
            d,
            b,
            word: ch.word.to_string(),
            repaired: false,
            failed: false,
            collision_tries: 0,
        };
        if b == d {
            out.matches += 1;
            out.tuples.push(ProofTuple { h_graph: h, xi, b: d });
        } else {
            let search = find_collision(params, graph(!d), &h, rng, collision_budget)?;
            out.collision_calls += search.tries;
            log.collision_tries = search.tries;
            match search.found {
                Some((xi2, h2)) => {
                    log.repaired = true;
                    out.tuples.push(ProofTuple { h_graph: h2, xi: xi2, b: !d });
                }
                None => {
                    log.failed = true;
                    out.success = false;
                    out.tuples.push(ProofTuple { h_graph: h, xi, b: d });
                }
            }
        }
        out.rounds.push(log);
        challenges.push(ch);
    }
    Ok((out, challenges))
}
