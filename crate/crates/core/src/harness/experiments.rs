//! The built-in experiments.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Experiment, MetricSpec, Plan, Resources, RunConfig, TrialRecord};
use crate::digest::{DigestHeader, DigestMode, DigestParams};
use crate::error::{Error, Result};
use crate::gmw::{gen_non_isomorphic_pair, run_cheating_prover, run_honest, GmwInstance};
use crate::graph::{gen_distinct_instance, gen_instance, Graph};
use crate::split::{
    alice_run, charlie_setup, charlie_verify, random_basis_odds, snooping_alice, ChunkConfig, HonestBob, Impostor,
};
use crate::transfer::attack1::{a1_cheat, a1_eve_verify, a1_run_honest};
use crate::transfer::attack2::{a2_cheat, a2_eve_verify, a2_run_honest, EveQubits};
use crate::transfer::detection::{a2_detection_probability, detection_trial, WrongBitsModel, CLAIMED_DETECTION};
use crate::transfer::SharedPairPool;

pub fn builtin() -> Vec<Box<dyn Experiment>> {
    vec![
        Box::new(Gmw),
        Box::new(Attack1),
        Box::new(Attack1Cheat),
        Box::new(Attack2),
        Box::new(Attack2Cheat),
        Box::new(Attack2Detect),
        Box::new(SplitShare),
        Box::new(SplitImpostor),
        Box::new(SplitSnoop),
    ]
}

fn hit(ok: bool) -> (u64, u64) {
    (ok as u64, 1)
}

fn lines<T: Serialize>(want: bool, items: &[T]) -> Vec<serde_json::Value> {
    if !want {
        return Vec::new();
    }
    items.iter().map(|x| serde_json::to_value(x).expect("transcript rows serialize")).collect()
}

fn need_nodes(cfg: &RunConfig, min: usize) -> Result<()> {
    if cfg.n_nodes < min {
        return Err(Error::TooFewNodes { n: cfg.n_nodes, min });
    }
    Ok(())
}

fn need_rounds(cfg: &RunConfig) -> Result<()> {
    if cfg.n_rounds == 0 {
        return Err(Error::Config("rounds must be at least 1".into()));
    }
    Ok(())
}

fn need_budget(cfg: &RunConfig) -> Result<()> {
    if cfg.collision_budget == 0 {
        return Err(Error::Config("collision budget must be at least 1".into()));
    }
    Ok(())
}

fn digest_params(cfg: &RunConfig) -> Result<DigestParams> {
    DigestParams::for_mode(cfg.digest_mode, cfg.digest_width, cfg.n_nodes, cfg.digest_key.as_bytes())
}

/// Probability that the collision cheat survives all rounds when each try
/// hits with probability `2^-w`. No collisions exist in bijective mode.
fn cheat_model(params: &DigestParams, rounds: usize, budget: usize) -> f64 {
    let miss = match params.mode() {
        DigestMode::Bijective => 1.0,
        DigestMode::Hash => (1.0 - 0.5f64.powi(params.width() as i32)).powf(budget as f64),
    };
    (1.0 - 0.5 * miss).powi(rounds as i32)
}

const CHEAT_NOTE: &str = "cheat model assumes each collision try hits with probability 2^-w";

// ---------------------------------------------------------------------------

struct Gmw;

struct GmwPlan {
    n: usize,
    rounds: usize,
    density: f64,
}

impl Experiment for Gmw {
    fn name(&self) -> &'static str {
        "gmw"
    }

    fn description(&self) -> &'static str {
        "honest GMW sessions and a prover without the secret isomorphism"
    }

    fn plan(&self, cfg: &RunConfig) -> Result<Box<dyn Plan>> {
        need_nodes(cfg, 3)?;
        need_rounds(cfg)?;
        Ok(Box::new(GmwPlan { n: cfg.n_nodes, rounds: cfg.n_rounds, density: cfg.edge_density }))
    }
}

impl Plan for GmwPlan {
    fn metrics(&self) -> Vec<MetricSpec> {
        vec![
            MetricSpec::new("honest_acceptance", 1.0),
            MetricSpec::new("cheat_acceptance", 0.5f64.powi(self.rounds as i32)),
            MetricSpec::new("challenge_one", 0.5),
        ]
    }

    fn trial(&self, rng: &mut ChaCha8Rng, want: bool) -> Result<TrialRecord> {
        let inst = GmwInstance::new(gen_instance(self.n, self.density, rng)?, self.rounds)?;
        let records = run_honest(&inst, rng)?;
        let (g0, g1) = gen_non_isomorphic_pair(self.n, self.density, rng)?;
        let (_, cheat_ok) = run_cheating_prover(&g0, &g1, self.rounds, rng)?;
        let ones = records.iter().filter(|r| r.challenge).count() as u64;
        Ok(TrialRecord {
            counts: vec![hit(records.iter().all(|r| r.accepted)), hit(cheat_ok), (ones, records.len() as u64)],
            resources: Resources::default(),
            transcript: lines(want, &records),
        })
    }
}

// ---------------------------------------------------------------------------

struct Attack1;

struct TransferPlan {
    n: usize,
    rounds: usize,
    density: f64,
    params: DigestParams,
    budget: usize,
}

impl TransferPlan {
    fn new(cfg: &RunConfig, cheat: bool) -> Result<Self> {
        need_nodes(cfg, 3)?;
        need_rounds(cfg)?;
        if cheat {
            need_budget(cfg)?;
        }
        Ok(Self {
            n: cfg.n_nodes,
            rounds: cfg.n_rounds,
            density: cfg.edge_density,
            params: digest_params(cfg)?,
            budget: cfg.collision_budget,
        })
    }

    fn instance(&self, rng: &mut ChaCha8Rng) -> Result<GmwInstance> {
        GmwInstance::new(gen_distinct_instance(self.n, self.density, rng)?, self.rounds)
    }

    fn pairs_a1(&self) -> usize {
        self.rounds * self.params.width()
    }
}

impl Experiment for Attack1 {
    fn name(&self) -> &'static str {
        "attack1"
    }

    fn description(&self) -> &'static str {
        "honest transfer over shared Bell pairs with digest-chosen bases"
    }

    fn plan(&self, cfg: &RunConfig) -> Result<Box<dyn Plan>> {
        Ok(Box::new(A1Plan(TransferPlan::new(cfg, false)?)))
    }
}

struct A1Plan(TransferPlan);

impl Plan for A1Plan {
    fn metrics(&self) -> Vec<MetricSpec> {
        vec![
            MetricSpec::new("eve_acceptance", 1.0),
            MetricSpec::new("verifier_acceptance", 1.0),
            MetricSpec::new("pairs_exact", 1.0),
        ]
    }

    fn trial(&self, rng: &mut ChaCha8Rng, want: bool) -> Result<TrialRecord> {
        let p = &self.0;
        let s = a1_run_honest(&p.instance(rng)?, &p.params, rng)?;
        Ok(TrialRecord {
            counts: vec![
                hit(s.verdict.accepted),
                hit(s.rounds.iter().all(|r| r.verifier_accepted)),
                hit(s.pairs_used == p.pairs_a1()),
            ],
            resources: Resources { bell_pairs: s.pairs_used as u64, ..Resources::default() },
            transcript: lines(want, &s.rounds),
        })
    }

    fn digest(&self) -> Option<DigestHeader> {
        Some(self.0.params.header())
    }
}

// ---------------------------------------------------------------------------

struct Attack1Cheat;

struct A1CheatPlan(TransferPlan);

impl Experiment for Attack1Cheat {
    fn name(&self) -> &'static str {
        "attack1-cheat"
    }

    fn description(&self) -> &'static str {
        "verifier fabricates attack1 tuples using digest collisions"
    }

    fn plan(&self, cfg: &RunConfig) -> Result<Box<dyn Plan>> {
        Ok(Box::new(A1CheatPlan(TransferPlan::new(cfg, true)?)))
    }
}

fn cheat_metrics(p: &TransferPlan) -> Vec<MetricSpec> {
    let model = cheat_model(&p.params, p.rounds, p.budget);
    vec![
        MetricSpec::new("cheat_success", model),
        MetricSpec::new("eve_acceptance", model),
        MetricSpec::new("eve_accepts_successful", 1.0),
        MetricSpec::new("challenge_match", 0.5),
    ]
}

fn cheat_counts(success: bool, accepted: bool, matches: usize, rounds: usize) -> Vec<(u64, u64)> {
    vec![
        hit(success),
        hit(accepted),
        ((success && accepted) as u64, success as u64),
        (matches as u64, rounds as u64),
    ]
}

impl Plan for A1CheatPlan {
    fn metrics(&self) -> Vec<MetricSpec> {
        cheat_metrics(&self.0)
    }

    fn trial(&self, rng: &mut ChaCha8Rng, want: bool) -> Result<TrialRecord> {
        let p = &self.0;
        let inst = p.instance(rng)?;
        let mut pool = SharedPairPool::new(p.pairs_a1());
        let cheat = a1_cheat(&inst.g0, &inst.g1, &p.params, &mut pool, p.budget, rng)?;
        let mut eve_pool = pool.clone();
        let verdict = a1_eve_verify(&mut eve_pool, &p.params, &cheat.tuples, &inst.g0, &inst.g1, rng)?;
        Ok(TrialRecord {
            counts: cheat_counts(cheat.success, verdict.accepted, cheat.matches, p.rounds),
            resources: Resources {
                bell_pairs: pool.consumed_count() as u64,
                qubits: 0,
                collision_calls: cheat.collision_calls as u64,
            },
            transcript: lines(want, &cheat.rounds),
        })
    }

    fn digest(&self) -> Option<DigestHeader> {
        Some(self.0.params.header())
    }

    fn notes(&self) -> Vec<String> {
        vec![CHEAT_NOTE.into()]
    }
}

// ---------------------------------------------------------------------------

struct Attack2;

struct A2Plan(TransferPlan);

impl Experiment for Attack2 {
    fn name(&self) -> &'static str {
        "attack2"
    }

    fn description(&self) -> &'static str {
        "honest transfer by teleporting Eve's qubits through the digest-selected unitary"
    }

    fn plan(&self, cfg: &RunConfig) -> Result<Box<dyn Plan>> {
        Ok(Box::new(A2Plan(TransferPlan::new(cfg, false)?)))
    }
}

impl Plan for A2Plan {
    fn metrics(&self) -> Vec<MetricSpec> {
        vec![
            MetricSpec::new("eve_acceptance", 1.0),
            MetricSpec::new("verifier_acceptance", 1.0),
            MetricSpec::new("quantum_check_pass", 1.0),
            MetricSpec::new("pairs_exact", 1.0),
        ]
    }

    fn trial(&self, rng: &mut ChaCha8Rng, want: bool) -> Result<TrialRecord> {
        let p = &self.0;
        let s = a2_run_honest(&p.instance(rng)?, &p.params, rng)?;
        let q_ok = s.verdict.rounds.iter().filter(|r| r.quantum_ok == Some(true)).count();
        Ok(TrialRecord {
            counts: vec![
                hit(s.verdict.accepted),
                hit(s.rounds.iter().all(|r| r.verifier_accepted)),
                (q_ok as u64, s.verdict.rounds.len() as u64),
                hit(s.bell_pairs_used == p.rounds && s.qubits_used == p.rounds),
            ],
            resources: Resources {
                bell_pairs: s.bell_pairs_used as u64,
                qubits: s.qubits_used as u64,
                collision_calls: 0,
            },
            transcript: lines(want, &s.rounds),
        })
    }

    fn digest(&self) -> Option<DigestHeader> {
        Some(self.0.params.header())
    }
}

// ---------------------------------------------------------------------------

struct Attack2Cheat;

struct A2CheatPlan(TransferPlan);

impl Experiment for Attack2Cheat {
    fn name(&self) -> &'static str {
        "attack2-cheat"
    }

    fn description(&self) -> &'static str {
        "verifier fabricates attack2 tuples using digest collisions"
    }

    fn plan(&self, cfg: &RunConfig) -> Result<Box<dyn Plan>> {
        Ok(Box::new(A2CheatPlan(TransferPlan::new(cfg, true)?)))
    }
}

impl Plan for A2CheatPlan {
    fn metrics(&self) -> Vec<MetricSpec> {
        cheat_metrics(&self.0)
    }

    fn trial(&self, rng: &mut ChaCha8Rng, want: bool) -> Result<TrialRecord> {
        let p = &self.0;
        let inst = p.instance(rng)?;
        let eve = EveQubits::prepare(p.rounds, rng);
        let mut pool = SharedPairPool::new(p.rounds);
        let (cheat, challenges) = a2_cheat(&inst.g0, &inst.g1, &p.params, &eve, &mut pool, p.budget, rng)?;
        let verdict = a2_eve_verify(&challenges, &p.params, &cheat.tuples, &inst.g0, &inst.g1, rng)?;
        Ok(TrialRecord {
            counts: cheat_counts(cheat.success, verdict.accepted, cheat.matches, p.rounds),
            resources: Resources {
                bell_pairs: pool.consumed_count() as u64,
                qubits: eve.len() as u64,
                collision_calls: cheat.collision_calls as u64,
            },
            transcript: lines(want, &cheat.rounds),
        })
    }

    fn digest(&self) -> Option<DigestHeader> {
        Some(self.0.params.header())
    }

    fn notes(&self) -> Vec<String> {
        vec![CHEAT_NOTE.into()]
    }
}

// ---------------------------------------------------------------------------

struct Attack2Detect;

struct DetectPlan {
    n: usize,
    density: f64,
    params: DigestParams,
    models: Vec<(WrongBitsModel, f64)>,
}

impl Experiment for Attack2Detect {
    fn name(&self) -> &'static str {
        "attack2-detect"
    }

    fn description(&self) -> &'static str {
        "verifier misreports teleportation bits; Eve's detection rate against the exact oracle"
    }

    fn plan(&self, cfg: &RunConfig) -> Result<Box<dyn Plan>> {
        need_nodes(cfg, 3)?;
        let params = digest_params(cfg)?;
        let models = std::iter::once(WrongBitsModel::TrueBits)
            .chain(WrongBitsModel::lying_models())
            .map(|m| Ok((m, a2_detection_probability(&m, params.width())?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Box::new(DetectPlan { n: cfg.n_nodes, density: cfg.edge_density, params, models }))
    }
}

impl Plan for DetectPlan {
    fn metrics(&self) -> Vec<MetricSpec> {
        self.models
            .iter()
            .map(|(m, p)| {
                let spec = MetricSpec::new(&format!("detect_{m}"), *p);
                if *m == WrongBitsModel::UniformWrong {
                    spec.with_reference(CLAIMED_DETECTION)
                } else {
                    spec
                }
            })
            .collect()
    }

    fn trial(&self, rng: &mut ChaCha8Rng, want: bool) -> Result<TrialRecord> {
        let base = Graph::random(self.n, self.density, rng)?;
        let mut counts = Vec::with_capacity(self.models.len());
        let mut rows = Vec::new();
        for (model, _) in &self.models {
            let caught = detection_trial(model, &self.params, &base, rng)?;
            counts.push(hit(caught));
            if want {
                rows.push(serde_json::json!({ "model": model.to_string(), "detected": caught }));
            }
        }
        Ok(TrialRecord { counts, resources: Resources { bell_pairs: 1, qubits: 1, collision_calls: 0 }, transcript: rows })
    }

    fn digest(&self) -> Option<DigestHeader> {
        Some(self.params.header())
    }

    fn notes(&self) -> Vec<String> {
        vec!["model values are exact enumerations; reference_value is the published figure".into()]
    }
}

// ---------------------------------------------------------------------------

struct SplitPlan {
    cfg: ChunkConfig,
}

impl SplitPlan {
    fn new(cfg: &RunConfig) -> Result<Self> {
        Ok(Self { cfg: ChunkConfig::new(cfg.m, cfg.k, cfg.f_key.as_bytes())? })
    }

    fn secret(&self, rng: &mut ChaCha8Rng) -> Vec<bool> {
        (0..self.cfg.m()).map(|_| rng.random()).collect()
    }

    fn m(&self) -> i32 {
        self.cfg.m() as i32
    }
}

struct SplitShare;

struct SplitSharePlan(SplitPlan);

impl Experiment for SplitShare {
    fn name(&self) -> &'static str {
        "splitshare"
    }

    fn description(&self) -> &'static str {
        "honest split-secret identification: Bob to Alice, Alice to Charlie"
    }

    fn plan(&self, cfg: &RunConfig) -> Result<Box<dyn Plan>> {
        Ok(Box::new(SplitSharePlan(SplitPlan::new(cfg)?)))
    }
}

impl Plan for SplitSharePlan {
    fn metrics(&self) -> Vec<MetricSpec> {
        vec![
            MetricSpec::new("alice_accepts_bob", 1.0),
            MetricSpec::new("charlie_accepts", 1.0),
            MetricSpec::new("shares_reconstruct", 1.0),
        ]
    }

    fn trial(&self, rng: &mut ChaCha8Rng, want: bool) -> Result<TrialRecord> {
        let p = &self.0;
        let sh = charlie_setup(&p.secret(rng), rng)?;
        let bob = HonestBob { s_b: sh.s_b.clone() };
        let out = alice_run(&sh.s_a, &sh.qubits, &p.cfg, &bob, rng)?;
        let verdict = charlie_verify(&sh, &p.cfg, &out.parity_bits, &out.returned_qubits, rng)?;
        let reconstructs = sh.s_a.iter().zip(&sh.s_b).map(|(a, b)| a ^ b).eq(sh.s_c.iter().copied());
        Ok(TrialRecord {
            counts: vec![hit(out.accept_bob), hit(verdict.accepted), hit(reconstructs)],
            resources: Resources { qubits: sh.m() as u64, ..Resources::default() },
            transcript: lines(want, &out.chunks),
        })
    }

    fn f_key_hex(&self) -> Option<String> {
        Some(hex::encode(self.0.cfg.f_key()))
    }
}

struct SplitImpostor;

struct SplitImpostorPlan(SplitPlan);

impl Experiment for SplitImpostor {
    fn name(&self) -> &'static str {
        "splitshare-impostor"
    }

    fn description(&self) -> &'static str {
        "someone without S_B answers Alice's challenges"
    }

    fn plan(&self, cfg: &RunConfig) -> Result<Box<dyn Plan>> {
        Ok(Box::new(SplitImpostorPlan(SplitPlan::new(cfg)?)))
    }
}

impl Plan for SplitImpostorPlan {
    fn metrics(&self) -> Vec<MetricSpec> {
        let odds = random_basis_odds().expect("enumeration over fixed states");
        let m = self.0.m();
        let k = self.0.cfg.k() as i32;
        vec![
            MetricSpec::new("alice_accepts_impostor", odds.value_correct.powi(m)),
            MetricSpec::new("charlie_accepts", 0.5f64.powi(k) * (1.0 - odds.detected).powi(m)),
            MetricSpec::new("qubit_value_correct", odds.value_correct),
        ]
    }

    fn trial(&self, rng: &mut ChaCha8Rng, want: bool) -> Result<TrialRecord> {
        let p = &self.0;
        let sh = charlie_setup(&p.secret(rng), rng)?;
        let out = alice_run(&sh.s_a, &sh.qubits, &p.cfg, &Impostor, rng)?;
        let verdict = charlie_verify(&sh, &p.cfg, &out.parity_bits, &out.returned_qubits, rng)?;
        let reported = out.chunks.iter().flat_map(|c| c.reported_s_a.chars().map(|ch| ch == '1'));
        let correct = reported.zip(&sh.s_a).filter(|(r, a)| r == *a).count();
        Ok(TrialRecord {
            counts: vec![hit(out.accept_bob), hit(verdict.accepted), (correct as u64, sh.m() as u64)],
            resources: Resources { qubits: sh.m() as u64, ..Resources::default() },
            transcript: lines(want, &out.chunks),
        })
    }

    fn f_key_hex(&self) -> Option<String> {
        Some(hex::encode(self.0.cfg.f_key()))
    }
}

struct SplitSnoop;

struct SplitSnoopPlan(SplitPlan);

impl Experiment for SplitSnoop {
    fn name(&self) -> &'static str {
        "splitshare-snoop"
    }

    fn description(&self) -> &'static str {
        "Alice measures Bob's returned qubits to learn S_B before forwarding them to Charlie"
    }

    fn plan(&self, cfg: &RunConfig) -> Result<Box<dyn Plan>> {
        Ok(Box::new(SplitSnoopPlan(SplitPlan::new(cfg)?)))
    }
}

impl Plan for SplitSnoopPlan {
    fn metrics(&self) -> Vec<MetricSpec> {
        let odds = random_basis_odds().expect("enumeration over fixed states");
        vec![
            MetricSpec::new("charlie_detects", 1.0 - (1.0 - odds.detected).powi(self.0.m())),
            MetricSpec::new("s_b_guess_correct", odds.basis_guess_correct),
            MetricSpec::new("alice_accepts_bob", 1.0),
        ]
    }

    fn trial(&self, rng: &mut ChaCha8Rng, want: bool) -> Result<TrialRecord> {
        let p = &self.0;
        let sh = charlie_setup(&p.secret(rng), rng)?;
        let bob = HonestBob { s_b: sh.s_b.clone() };
        let out = alice_run(&sh.s_a, &sh.qubits, &p.cfg, &bob, rng)?;
        let (guess, disturbed) = snooping_alice(&sh.s_a, &out.returned_qubits, &p.cfg, rng)?;
        let verdict = charlie_verify(&sh, &p.cfg, &out.parity_bits, &disturbed, rng)?;
        let right = guess.iter().zip(&sh.s_b).filter(|(g, b)| g == b).count();
        Ok(TrialRecord {
            counts: vec![hit(!verdict.accepted), (right as u64, sh.m() as u64), hit(out.accept_bob)],
            resources: Resources { qubits: sh.m() as u64, ..Resources::default() },
            transcript: lines(want, &out.chunks),
        })
    }

    fn f_key_hex(&self) -> Option<String> {
        Some(hex::encode(self.0.cfg.f_key()))
    }
}
