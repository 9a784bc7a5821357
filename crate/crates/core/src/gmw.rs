//! The GMW graph-isomorphism zero-knowledge protocol.
//!
//! Each round: the prover commits `H = λ(G0)`, the verifier sends a bit `b`,
//! the prover answers `ξ = λ ∘ σ^b`, and the verifier checks `ξ(G_b) = H`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{apply_perm, compose, Graph, Instance, Permutation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GmwInstance {
    pub g0: Graph,
    pub g1: Graph,
    /// Prover-only secret, `σ(G1) = G0`.
    pub sigma: Permutation,
    pub n_rounds: usize,
}

impl GmwInstance {
    pub fn new(instance: Instance, n_rounds: usize) -> Result<Self> {
        if apply_perm(&instance.sigma, &instance.g1)? != instance.g0 {
            return Err(Error::Config("sigma does not map G1 onto G0".into()));
        }
        Ok(Self { g0: instance.g0, g1: instance.g1, sigma: instance.sigma, n_rounds })
    }

    pub fn graph(&self, b: bool) -> &Graph {
        if b {
            &self.g1
        } else {
            &self.g0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    #[serde(rename = "H")]
    pub h_graph: Graph,
    #[serde(rename = "b", serialize_with = "crate::transcript::bit")]
    pub challenge: bool,
    pub xi: Permutation,
    pub accepted: bool,
}

/// Step 1: a uniform `λ` and the commitment `H = λ(G0)`.
pub fn prover_commit<R: Rng + ?Sized>(inst: &GmwInstance, rng: &mut R) -> Result<(Permutation, Graph)> {
    let lambda = Permutation::random(inst.g0.n(), rng)?;
    let h = apply_perm(&lambda, &inst.g0)?;
    Ok((lambda, h))
}

/// Step 3: `ξ = λ` for `b = 0`, `ξ = λ ∘ σ` for `b = 1`.
pub fn prover_respond(inst: &GmwInstance, lambda: &Permutation, b: bool) -> Result<Permutation> {
    if b {
        compose(lambda, &inst.sigma)
    } else {
        Ok(lambda.clone())
    }
}

/// Step 4: `ξ(G_b) = H`, exact labeled equality.
pub fn verifier_check(g0: &Graph, g1: &Graph, h_graph: &Graph, b: bool, xi: &Permutation) -> Result<bool> {
    let gb = if b { g1 } else { g0 };
    if gb.n() != h_graph.n() {
        return Err(Error::SizeMismatch { expected: gb.n(), actual: h_graph.n() });
    }
    Ok(&apply_perm(xi, gb)? == h_graph)
}

/// One honest round with the challenge supplied by the caller.
pub fn honest_round(inst: &GmwInstance, round: usize, lambda: Permutation, h: Graph, b: bool) -> Result<RoundRecord> {
    let xi = prover_respond(inst, &lambda, b)?;
    let accepted = verifier_check(&inst.g0, &inst.g1, &h, b, &xi)?;
    Ok(RoundRecord { round, h_graph: h, challenge: b, xi, accepted })
}

/// `n_rounds` honest rounds with uniformly random challenges.
pub fn run_honest<R: Rng + ?Sized>(inst: &GmwInstance, rng: &mut R) -> Result<Vec<RoundRecord>> {
    (0..inst.n_rounds)
        .map(|round| {
            let (lambda, h) = prover_commit(inst, rng)?;
            let b = rng.random::<bool>();
            honest_round(inst, round, lambda, h, b)
        })
        .collect()
}

/// A prover without `σ`: guesses `b'`, commits `H = π(G_{b'})` and answers
/// `π` whatever the challenge. Accepted in all rounds with probability
/// `2^-n_rounds` when `G0 ≠ G1`.
pub fn run_cheating_prover<R: Rng + ?Sized>(
    g0: &Graph,
    g1: &Graph,
    n_rounds: usize,
    rng: &mut R,
) -> Result<(Vec<RoundRecord>, bool)> {
    if g0.n() != g1.n() {
        return Err(Error::SizeMismatch { expected: g0.n(), actual: g1.n() });
    }
    let mut records = Vec::with_capacity(n_rounds);
    for round in 0..n_rounds {
        let guess = rng.random::<bool>();
        let pi = Permutation::random(g0.n(), rng)?;
        let h = apply_perm(&pi, if guess { g1 } else { g0 })?;
        let b = rng.random::<bool>();
        let accepted = verifier_check(g0, g1, &h, b, &pi)?;
        records.push(RoundRecord { round, h_graph: h, challenge: b, xi: pi, accepted });
    }
    let all = records.iter().all(|r| r.accepted);
    Ok((records, all))
}

/// Two independently sampled graphs whose degree multisets differ, hence
/// certainly non-isomorphic.
pub fn gen_non_isomorphic_pair<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Result<(Graph, Graph)> {
    if n < 3 {
        return Err(Error::TooFewNodes { n, min: 3 });
    }
    let g0 = Graph::random(n, density, rng)?;
    loop {
        let g1 = Graph::random(n, density, rng)?;
        if g1.degree_multiset() != g0.degree_multiset() {
            return Ok((g0, g1));
        }
    }
}
