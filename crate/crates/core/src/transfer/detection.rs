//! A verifier who misreports the teleportation bits, and how often Eve's
//! state check notices.
//!
//! Misreporting by a mask `(e0, e1)` leaves Eve with the Pauli error
//! `X^{e1} Z^{e0}` sandwiched inside `U_C`. The X/H gate family only permutes
//! `{X, Z}` and fixes `Y`, so over uniform BB84 inputs a single wrong bit is
//! caught half the time and both wrong bits always. The oracle below does not
//! rely on that argument: it runs the simulator over every input, true
//! outcome, reported outcome and word class and sums exact Born weights.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::attack2::{a2_verifier_challenge, eve_state_check, EveQubits};
use super::SharedPairPool;
use crate::digest::DigestParams;
use crate::error::{Error, Result};
use crate::graph::{apply_perm, Graph, Permutation};
use crate::quantum::{
    apply_gate_word, correct, gate_word_signature, invert_gate_word, outcome_distribution, prepare,
    teleport_with_outcome, Bb84Tag, BellOutcome, GateSignature, GateWord,
};

/// The value claimed for a uniformly lying verifier.
pub const CLAIMED_DETECTION: f64 = 0.75;

/// How V chooses the bits he reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WrongBitsModel {
    TrueBits,
    /// Always XOR the true outcome with this nonzero mask.
    Fixed(BellOutcome),
    /// One of the three wrong pairs, uniformly.
    UniformWrong,
}

impl WrongBitsModel {
    /// The four models exercised by the harness: the three fixed masks and
    /// the uniform one.
    pub fn lying_models() -> [WrongBitsModel; 4] {
        [
            WrongBitsModel::Fixed(BellOutcome::new(true, false)),
            WrongBitsModel::Fixed(BellOutcome::new(false, true)),
            WrongBitsModel::Fixed(BellOutcome::new(true, true)),
            WrongBitsModel::UniformWrong,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WrongBitsModel::Fixed(mask) if !mask.d0 && !mask.d1 => {
                Err(Error::AdversaryModel("fixed mask must flip at least one bit".into()))
            }
            _ => Ok(()),
        }
    }

    /// Exact distribution of reported pairs given the true one.
    pub fn reported_distribution(&self, truth: BellOutcome) -> Result<Vec<(BellOutcome, f64)>> {
        self.validate()?;
        Ok(match self {
            WrongBitsModel::TrueBits => vec![(truth, 1.0)],
            WrongBitsModel::Fixed(mask) => vec![(flip(truth, *mask), 1.0)],
            WrongBitsModel::UniformWrong => {
                BellOutcome::all().into_iter().filter(|&o| o != truth).map(|o| (o, 1.0 / 3.0)).collect()
            }
        })
    }

    pub fn report<R: Rng + ?Sized>(&self, truth: BellOutcome, rng: &mut R) -> Result<BellOutcome> {
        self.validate()?;
        Ok(match self {
            WrongBitsModel::TrueBits => truth,
            WrongBitsModel::Fixed(mask) => flip(truth, *mask),
            WrongBitsModel::UniformWrong => {
                let wrong: Vec<BellOutcome> = BellOutcome::all().into_iter().filter(|&o| o != truth).collect();
                wrong[rng.random_range(0..3)]
            }
        })
    }
}

impl fmt::Display for WrongBitsModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WrongBitsModel::TrueBits => f.write_str("true"),
            WrongBitsModel::Fixed(m) => write!(f, "flip-{}{}", m.d0 as u8, m.d1 as u8),
            WrongBitsModel::UniformWrong => f.write_str("uniform-wrong"),
        }
    }
}

impl FromStr for WrongBitsModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let model = match s {
            "true" => WrongBitsModel::TrueBits,
            "uniform-wrong" => WrongBitsModel::UniformWrong,
            "flip-10" => WrongBitsModel::Fixed(BellOutcome::new(true, false)),
            "flip-01" => WrongBitsModel::Fixed(BellOutcome::new(false, true)),
            "flip-11" => WrongBitsModel::Fixed(BellOutcome::new(true, true)),
            "flip-00" => WrongBitsModel::Fixed(BellOutcome::new(false, false)),
            other => return Err(Error::AdversaryModel(format!("unknown model {other:?}"))),
        };
        model.validate()?;
        Ok(model)
    }
}

fn flip(o: BellOutcome, mask: BellOutcome) -> BellOutcome {
    BellOutcome::new(o.d0 ^ mask.d0, o.d1 ^ mask.d1)
}

/// Distribution of `U_C` over uniform words of length `width`, grouped by
/// gate signature. Each class carries one representative word.
pub fn word_classes(width: usize) -> Result<Vec<(GateWord, f64)>> {
    if width == 0 {
        return Err(Error::EmptyGateWord);
    }
    let mut classes: BTreeMap<GateSignature, (Vec<bool>, f64)> = BTreeMap::new();
    for bit in [false, true] {
        let w = GateWord::new(vec![bit])?;
        classes.entry(gate_word_signature(&w)).or_insert((vec![bit], 0.0)).1 += 0.5;
    }
    for _ in 1..width {
        let mut next: BTreeMap<GateSignature, (Vec<bool>, f64)> = BTreeMap::new();
        for (rep, p) in classes.values() {
            for bit in [false, true] {
                let mut bits = rep.clone();
                bits.push(bit);
                let sig = gate_word_signature(&GateWord::new(bits.clone())?);
                next.entry(sig).or_insert((bits, 0.0)).1 += p / 2.0;
            }
        }
        classes = next;
    }
    classes.into_values().map(|(bits, p)| Ok((GateWord::new(bits)?, p))).collect()
}

/// Exact detection probability for uniform BB84 inputs and uniform words of
/// length `width`.
pub fn a2_detection_probability(model: &WrongBitsModel, width: usize) -> Result<f64> {
    let thetas: Vec<(Bb84Tag, f64)> = Bb84Tag::all().into_iter().map(|t| (t, 0.25)).collect();
    detection_probability_for(model, &thetas, &word_classes(width)?)
}

/// Exact detection probability restricted to weighted inputs and words.
/// Weights are normalized by their totals.
pub fn detection_probability_for(
    model: &WrongBitsModel,
    thetas: &[(Bb84Tag, f64)],
    words: &[(GateWord, f64)],
) -> Result<f64> {
    model.validate()?;
    let theta_total: f64 = thetas.iter().map(|t| t.1).sum();
    let word_total: f64 = words.iter().map(|w| w.1).sum();
    if thetas.is_empty() || words.is_empty() || theta_total <= 0.0 || word_total <= 0.0 {
        return Err(Error::AdversaryModel("empty input or word distribution".into()));
    }
    let mut detected = 0.0;
    for &(tag, pt) in thetas {
        for (word, pw) in words {
            let phi = apply_gate_word(word, &prepare(tag))?;
            // every outcome has probability 1/4 whatever the input
            for truth in BellOutcome::all() {
                let receiver = teleport_with_outcome(&phi, truth)?;
                for (reported, pr) in model.reported_distribution(truth)? {
                    let restored = invert_gate_word(word, &correct(reported, &receiver)?)?;
                    let (p0, p1) = outcome_distribution(&restored, 0, tag.basis)?;
                    let miss = if tag.value { p0 } else { p1 };
                    detected += pt * pw * 0.25 * pr * miss;
                }
            }
        }
    }
    Ok(detected / (theta_total * word_total))
}

/// One Monte Carlo detection trial through the real pipeline: Eve prepares a
/// random BB84 qubit, V digests a fresh isomorph of `base`, applies the word,
/// teleports, then reports per `model`. True when Eve's check fails.
pub fn detection_trial<R: Rng + ?Sized>(
    model: &WrongBitsModel,
    params: &DigestParams,
    base: &Graph,
    rng: &mut R,
) -> Result<bool> {
    model.validate()?;
    let eve = EveQubits::prepare(1, rng);
    let mut pool = SharedPairPool::new(1);
    let h = apply_perm(&Permutation::random(base.n(), rng)?, base)?;
    let mut ch = a2_verifier_challenge(&mut pool, &eve, params, &h, 0, rng)?;
    ch.outcome = model.report(ch.outcome, rng)?;
    let word = ch.word.clone();
    Ok(!eve_state_check(&ch, &word, rng)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::Basis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn exact_values() {
        for w in [1, 2, 3, 8] {
            assert!(close(a2_detection_probability(&WrongBitsModel::TrueBits, w).unwrap(), 0.0));
            let m = WrongBitsModel::lying_models();
            assert!(close(a2_detection_probability(&m[0], w).unwrap(), 0.5));
            assert!(close(a2_detection_probability(&m[1], w).unwrap(), 0.5));
            assert!(close(a2_detection_probability(&m[2], w).unwrap(), 1.0));
            assert!(close(a2_detection_probability(&m[3], w).unwrap(), 2.0 / 3.0));
        }
    }

    #[test]
    fn y_error_on_zero_with_identity_word() {
        let tag = Bb84Tag::new(false, Basis::Rectilinear);
        let word: GateWord = "11".parse().unwrap();
        let p = detection_probability_for(
            &WrongBitsModel::Fixed(BellOutcome::new(true, true)),
            &[(tag, 1.0)],
            &[(word, 1.0)],
        )
        .unwrap();
        assert!(close(p, 1.0));
    }

    #[test]
    fn single_flip_depends_on_input_and_word() {
        // X error: caught on |0> under identity, invisible on |+>; one H swaps that.
        let x = WrongBitsModel::Fixed(BellOutcome::new(false, true));
        let id: GateWord = "11".parse().unwrap();
        let h: GateWord = "1".parse().unwrap();
        let zero = Bb84Tag::new(false, Basis::Rectilinear);
        let plus = Bb84Tag::new(false, Basis::Diagonal);
        let p = |t, w: &GateWord| detection_probability_for(&x, &[(t, 1.0)], &[(w.clone(), 1.0)]).unwrap();
        assert!(close(p(zero, &id), 1.0));
        assert!(close(p(plus, &id), 0.0));
        assert!(close(p(zero, &h), 0.0));
        assert!(close(p(plus, &h), 1.0));
    }

    #[test]
    fn word_classes_sum_to_one() {
        for w in [1, 4, 16, 64] {
            let classes = word_classes(w).unwrap();
            let total: f64 = classes.iter().map(|c| c.1).sum();
            assert!(close(total, 1.0));
            assert!(classes.len() <= 24);
        }
        assert!(word_classes(0).is_err());
    }

    #[test]
    fn zero_mask_rejected() {
        let bad = WrongBitsModel::Fixed(BellOutcome::new(false, false));
        assert!(bad.validate().is_err());
        assert!(a2_detection_probability(&bad, 4).is_err());
        assert!("flip-00".parse::<WrongBitsModel>().is_err());
        assert!("nonsense".parse::<WrongBitsModel>().is_err());
    }

    #[test]
    fn names_round_trip() {
        for m in WrongBitsModel::lying_models().into_iter().chain([WrongBitsModel::TrueBits]) {
            assert_eq!(m.to_string().parse::<WrongBitsModel>().unwrap(), m);
        }
    }

    #[test]
    fn uniform_wrong_never_reports_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counts = [0usize; 4];
        for _ in 0..30_000 {
            let truth = BellOutcome::from_index(rng.random_range(0..4));
            let r = WrongBitsModel::UniformWrong.report(truth, &mut rng).unwrap();
            assert_ne!(r, truth);
            counts[r.index()] += 1;
        }
        assert!(counts.iter().all(|&c| c > 7000));
    }

    #[test]
    fn monte_carlo_matches_oracle() {
        let params = DigestParams::hash(8, b"detect").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base = Graph::random(8, 0.5, &mut rng).unwrap();
        let trials = 20_000;
        for model in WrongBitsModel::lying_models().into_iter().chain([WrongBitsModel::TrueBits]) {
            let p = a2_detection_probability(&model, 8).unwrap();
            let hits = (0..trials).filter(|_| detection_trial(&model, &params, &base, &mut rng).unwrap()).count();
            let rate = hits as f64 / trials as f64;
            let sd = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((rate - p).abs() <= 4.0 * sd, "{model}: {rate} vs {p}");
        }
    }
}
