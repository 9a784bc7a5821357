//! Transfer through shared Bell pairs.
//!
//! V measures `w` pair halves in the bases `h(H)` and challenges P with the
//! parity of the results. Later Eve measures her halves of the same pairs in
//! the bases `h(H_k)`; same-basis correlation gives her the same parity, which
//! she uses to check `ξ_k(G_{b'}) = H_k`.

use rand::Rng;
use serde::Serialize;

use super::{CheatOutcome, EveRound, EveVerdict, ProofTuple, SharedPairPool};
use crate::digest::{find_collision, parity, BitSeq, DigestParams};
use crate::error::{Error, Result};
use crate::gmw::{honest_round, prover_commit, verifier_check, GmwInstance};
use crate::graph::{apply_perm, Graph, Permutation};
use crate::transcript::bits_string;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct A1Challenge {
    pub b: bool,
    pub bases: BitSeq,
    pub results: Vec<bool>,
    pub pool_start: usize,
}

/// V's step 2: measure the next `w` pairs in the bases `h(H)` and return the
/// parity of the outcomes as the challenge.
pub fn a1_verifier_challenge<R: Rng + ?Sized>(
    pool: &mut SharedPairPool,
    params: &DigestParams,
    h_graph: &Graph,
    rng: &mut R,
) -> Result<A1Challenge> {
    let bases = params.digest(h_graph)?;
    let basis_list: Vec<_> = bases.bases().collect();
    let (pool_start, results) = pool.measure_v(&basis_list, rng)?;
    let b = parity(results.iter().copied());
    Ok(A1Challenge { b, bases, results, pool_start })
}

/// Eve's step 6. The `b` carried in each tuple is ignored; Eve derives the
/// challenge from her own measurements.
pub fn a1_eve_verify<R: Rng + ?Sized>(
    pool: &mut SharedPairPool,
    params: &DigestParams,
    tuples: &[ProofTuple],
    g0: &Graph,
    g1: &Graph,
    rng: &mut R,
) -> Result<EveVerdict> {
    let expected = tuples.len() * params.width();
    if pool.len() != expected || pool.eve_consumed() != 0 {
        return Err(Error::PoolMisaligned { expected, actual: pool.len() - pool.eve_consumed() });
    }
    let mut rounds = Vec::with_capacity(tuples.len());
    for (round, t) in tuples.iter().enumerate() {
        let bases: Vec<_> = params.digest(&t.h_graph)?.bases().collect();
        let (_, results) = pool.measure_eve(&bases, rng)?;
        let b = parity(results);
        let iso_ok = verifier_check(g0, g1, &t.h_graph, b, &t.xi)?;
        rounds.push(EveRound { round, b, quantum_ok: None, iso_ok });
        if !iso_ok {
            return Ok(EveVerdict { accepted: false, rounds });
        }
    }
    Ok(EveVerdict { accepted: true, rounds })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct A1Round {
    pub round: usize,
    #[serde(rename = "H")]
    pub h_graph: Graph,
    pub xi: Permutation,
    #[serde(serialize_with = "crate::transcript::bit")]
    pub b: bool,
    pub bases: String,
    pub results: String,
    pub pool_start: usize,
    pub pool_end: usize,
    pub verifier_accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct A1Session {
    pub rounds: Vec<A1Round>,
    pub tuples: Vec<ProofTuple>,
    pub verdict: EveVerdict,
    pub pairs_used: usize,
}

/// Steps 1–6 end to end: P and V run GMW with pair-derived challenges, then
/// Eve verifies the handed-over tuples against her halves.
pub fn a1_run_honest<R: Rng + ?Sized>(inst: &GmwInstance, params: &DigestParams, rng: &mut R) -> Result<A1Session> {
    let w = params.width();
    let mut pool = SharedPairPool::new(inst.n_rounds * w);
    let mut rounds = Vec::with_capacity(inst.n_rounds);
    let mut tuples = Vec::with_capacity(inst.n_rounds);
    for round in 0..inst.n_rounds {
        let (lambda, h) = prover_commit(inst, rng)?;
        let ch = a1_verifier_challenge(&mut pool, params, &h, rng)?;
        let rec = honest_round(inst, round, lambda, h, ch.b)?;
        rounds.push(A1Round {
            round,
            h_graph: rec.h_graph.clone(),
            xi: rec.xi.clone(),
            b: ch.b,
            bases: ch.bases.to_string(),
            results: bits_string(&ch.results),
            pool_start: ch.pool_start,
            pool_end: ch.pool_start + w,
            verifier_accepted: rec.accepted,
        });
        tuples.push(ProofTuple { h_graph: rec.h_graph, xi: rec.xi, b: ch.b });
    }
    let pairs_used = pool.consumed_count();
    let verdict = a1_eve_verify(&mut pool, params, &tuples, &inst.g0, &inst.g1, rng)?;
    Ok(A1Session { rounds, tuples, verdict, pairs_used })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct A1CheatRound {
    pub round: usize,
    #[serde(serialize_with = "crate::transcript::bit")]
    pub c: bool,
    #[serde(serialize_with = "crate::transcript::bit")]
    pub parity: bool,
    pub bases: String,
    pub repaired: bool,
    pub failed: bool,
    pub collision_tries: usize,
}

/// V fabricates tuples without P. Per round: pick `c`, a random `ξ: G_c → H`,
/// measure per `h(H)`; if the parity equals `c` send `(H, ξ, c)`, otherwise
/// look for a collision `H'` of `G_{c̄}` with `h(H') = h(H)` and send
/// `(H', ξ', c̄)`. A round without a collision within `collision_budget`
/// still emits `(H, ξ, c)`, which Eve will reject.
///
/// The number of rounds is `pool.len() / w`.
pub fn a1_cheat<R: Rng + ?Sized>(
    g0: &Graph,
    g1: &Graph,
    params: &DigestParams,
    pool: &mut SharedPairPool,
    collision_budget: usize,
    rng: &mut R,
) -> Result<CheatOutcome<A1CheatRound>> {
    let w = params.width();
    if !pool.len().is_multiple_of(w) || pool.consumed_count() != 0 {
        return Err(Error::PoolMisaligned { expected: pool.len().div_ceil(w) * w, actual: pool.len() });
    }
    let n_rounds = pool.len() / w;
    let graph = |bit: bool| if bit { g1 } else { g0 };
    let mut out = CheatOutcome { tuples: Vec::new(), success: true, collision_calls: 0, matches: 0, rounds: Vec::new() };
    for round in 0..n_rounds {
        let c = rng.random::<bool>();
        let xi = Permutation::random(g0.n(), rng)?;
        let h = apply_perm(&xi, graph(c))?;
        let ch = a1_verifier_challenge(pool, params, &h, rng)?;
        let mut log = A1CheatRound {
            round,
            c,
            parity: ch.b,
            bases: ch.bases.to_string(),
            repaired: false,
            failed: false,
            collision_tries: 0,
        };
        if ch.b == c {
            out.matches += 1;
            out.tuples.push(ProofTuple { h_graph: h, xi, b: c });
        } else {
            let search = find_collision(params, graph(!c), &h, rng, collision_budget)?;
            out.collision_calls += search.tries;
            log.collision_tries = search.tries;
            match search.found {
                Some((xi2, h2)) => {
                    log.repaired = true;
                    out.tuples.push(ProofTuple { h_graph: h2, xi: xi2, b: !c });
                }
                None => {
                    log.failed = true;
                    out.success = false;
                    out.tuples.push(ProofTuple { h_graph: h, xi, b: c });
                }
            }
        }
        out.rounds.push(log);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_distinct_instance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const KEY: &[u8] = b"attack1-test";

    fn setup(seed: u64, n: usize, rounds: usize) -> (GmwInstance, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = GmwInstance::new(gen_distinct_instance(n, 0.5, &mut rng).unwrap(), rounds).unwrap();
        (inst, rng)
    }

    #[test]
    fn challenge_consumes_width_pairs() {
        let params = DigestParams::hash(8, KEY).unwrap();
        let (inst, mut rng) = setup(1, 6, 2);
        let mut pool = SharedPairPool::new(16);
        let (_, h) = prover_commit(&inst, &mut rng).unwrap();
        let ch = a1_verifier_challenge(&mut pool, &params, &h, &mut rng).unwrap();
        assert_eq!(pool.consumed_count(), 8);
        assert_eq!(ch.results.len(), 8);
        assert_eq!(ch.b, parity(ch.results.iter().copied()));
        a1_verifier_challenge(&mut pool, &params, &h, &mut rng).unwrap();
        let err = a1_verifier_challenge(&mut pool, &params, &h, &mut rng).unwrap_err();
        assert_eq!(err, Error::PoolExhausted { needed: 8, available: 0 });
    }

    #[test]
    fn eve_reproduces_v_results() {
        let params = DigestParams::hash(8, KEY).unwrap();
        let (inst, mut rng) = setup(2, 6, 1);
        for _ in 0..200 {
            let mut pool = SharedPairPool::new(8);
            let (_, h) = prover_commit(&inst, &mut rng).unwrap();
            let ch = a1_verifier_challenge(&mut pool, &params, &h, &mut rng).unwrap();
            let bases: Vec<_> = ch.bases.bases().collect();
            let (_, eve) = pool.measure_eve(&bases, &mut rng).unwrap();
            assert_eq!(eve, ch.results);
        }
    }

    #[test]
    fn challenge_bit_is_uniform() {
        let params = DigestParams::hash(8, KEY).unwrap();
        let (inst, mut rng) = setup(3, 8, 1);
        let trials = 100_000;
        let mut ones = 0;
        let (_, h) = prover_commit(&inst, &mut rng).unwrap();
        for _ in 0..trials {
            let mut pool = SharedPairPool::new(8);
            ones += a1_verifier_challenge(&mut pool, &params, &h, &mut rng).unwrap().b as usize;
        }
        let sd = (0.25 / trials as f64).sqrt();
        assert!((ones as f64 / trials as f64 - 0.5).abs() <= 4.0 * sd);
    }

    #[test]
    fn honest_session_accepted() {
        let params = DigestParams::hash(8, KEY).unwrap();
        for seed in 0..100 {
            let (inst, mut rng) = setup(seed, 8, 8);
            let s = a1_run_honest(&inst, &params, &mut rng).unwrap();
            assert!(s.verdict.accepted);
            assert_eq!(s.pairs_used, 64);
            assert_eq!(s.rounds.len(), 8);
            assert!(s.rounds.iter().all(|r| r.verifier_accepted));
        }
    }

    #[test]
    fn width_equal_rounds_uses_n_squared_pairs() {
        let params = DigestParams::hash(5, KEY).unwrap();
        let (inst, mut rng) = setup(4, 6, 5);
        let s = a1_run_honest(&inst, &params, &mut rng).unwrap();
        assert_eq!(s.pairs_used, 25);
        assert!(s.verdict.accepted);
    }

    #[test]
    fn eve_rejects_misaligned_pool() {
        let params = DigestParams::hash(4, KEY).unwrap();
        let (inst, mut rng) = setup(5, 5, 2);
        let s = a1_run_honest(&inst, &params, &mut rng).unwrap();
        let mut short = SharedPairPool::new(4);
        let err = a1_eve_verify(&mut short, &params, &s.tuples, &inst.g0, &inst.g1, &mut rng).unwrap_err();
        assert_eq!(err, Error::PoolMisaligned { expected: 8, actual: 4 });
    }

    #[test]
    fn swapped_rounds_accepted_a_quarter_of_the_time() {
        // Swapping two rounds makes each of their parities an independent
        // coin for Eve: acceptance 1/4.
        let params = DigestParams::hash(8, KEY).unwrap();
        let (inst, mut rng) = setup(6, 8, 2);
        let trials = 20_000;
        let mut accepted = 0;
        for _ in 0..trials {
            let mut pool = SharedPairPool::new(16);
            let mut tuples = Vec::new();
            for round in 0..2 {
                let (lambda, h) = prover_commit(&inst, &mut rng).unwrap();
                let ch = a1_verifier_challenge(&mut pool, &params, &h, &mut rng).unwrap();
                let rec = honest_round(&inst, round, lambda, h, ch.b).unwrap();
                tuples.push(ProofTuple { h_graph: rec.h_graph, xi: rec.xi, b: ch.b });
            }
            tuples.swap(0, 1);
            if a1_eve_verify(&mut pool, &params, &tuples, &inst.g0, &inst.g1, &mut rng).unwrap().accepted {
                accepted += 1;
            }
        }
        let sd = (0.25 * 0.75 / trials as f64).sqrt();
        let rate = accepted as f64 / trials as f64;
        assert!((rate - 0.25).abs() <= 4.0 * sd, "{rate}");
    }

    #[test]
    fn cheat_tuples_always_pass() {
        let params = DigestParams::hash(8, KEY).unwrap();
        for seed in 0..40 {
            let (inst, mut rng) = setup(seed, 8, 4);
            let mut pool = SharedPairPool::new(4 * 8);
            let cheat = a1_cheat(&inst.g0, &inst.g1, &params, &mut pool, 100_000, &mut rng).unwrap();
            assert!(cheat.success);
            assert_eq!(cheat.tuples.len(), 4);
            let verdict = a1_eve_verify(&mut pool, &params, &cheat.tuples, &inst.g0, &inst.g1, &mut rng).unwrap();
            assert!(verdict.accepted, "seed {seed}");
        }
    }

    #[test]
    fn cheat_without_budget_fails_on_mismatch() {
        let params = DigestParams::hash(32, KEY).unwrap();
        let (inst, mut rng) = setup(7, 8, 8);
        let mut pool = SharedPairPool::new(8 * 32);
        let cheat = a1_cheat(&inst.g0, &inst.g1, &params, &mut pool, 1, &mut rng).unwrap();
        let failed = cheat.rounds.iter().filter(|r| r.failed).count();
        assert_eq!(cheat.success, failed == 0);
        assert_eq!(cheat.matches + failed + cheat.rounds.iter().filter(|r| r.repaired).count(), 8);
    }

    #[test]
    fn bijective_cheat_never_searches() {
        let (inst, mut rng) = setup(8, 4, 3);
        let params = DigestParams::bijective(4, KEY).unwrap();
        let mut pool = SharedPairPool::new(3 * params.width());
        let cheat = a1_cheat(&inst.g0, &inst.g1, &params, &mut pool, 1000, &mut rng).unwrap();
        assert_eq!(cheat.collision_calls, 0);
        assert_eq!(cheat.success, cheat.matches == 3);
    }
}
