//! IND-CPA games, distinguisher games, and the statistics reported with
//! them.

pub mod adversary;
pub mod distinguish;

use rand::{Rng, RngCore};
use serde::Serialize;

pub use adversary::{
    halfkey_attacker, omniscient, plaintext_reader, random_guess, Adversary, Choice, Frontend, Guess, View,
};
pub use distinguish::{
    byte_parity, first_bit, gentry_samplers, run_distinguisher, Distinguisher, Sampler, HEURISTIC_ONLY,
};

use crate::bridges::{bridge_public_view, graph_scheme, Bridge};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng;
use crate::scheme::{SchemeRef, SecurityParameter};
use crate::value::Value;

/// Confidence parameter used when none is given.
pub const DEFAULT_DELTA: f64 = 0.01;

/// Hoeffding half-width `sqrt(ln(2/δ) / (2T))` for a mean of `T` samples in
/// `[0, 1]`.
pub fn hoeffding_halfwidth(trials: u64, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * trials as f64)).sqrt()
}

/// Aggregate of one game run. `ci` is the half-width around the observed
/// win rate; the advantage is `|P(win) − P(loss)| = |2p̂ − 1|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameReport {
    pub game: String,
    pub participants: Vec<String>,
    pub trials: u64,
    pub wins: u64,
    pub advantage: f64,
    pub ci: f64,
    pub delta: f64,
    pub seed: u64,
    pub flags: Vec<String>,
    pub abstentions: u64,
}

impl GameReport {
    /// Win rate with each abstention counted as half a win, the expected
    /// score of a uniform guess.
    pub fn win_rate(&self) -> f64 {
        (self.wins as f64 + self.abstentions as f64 / 2.0) / self.trials as f64
    }

    /// Whether advantage 0 (win rate ½) is inside the confidence interval.
    pub fn consistent_with_zero_advantage(&self) -> bool {
        (self.win_rate() - 0.5).abs() <= self.ci
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Per-trial outcome of an IND-CPA game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Win,
    Loss,
    Abstain,
}

fn play(scheme: &SchemeRef, adv: &dyn Adversary, index: u64, seed: u64) -> Result<Outcome> {
    let mut rng = rng::stream(seed, index);
    let keys = scheme.keygen(SecurityParameter::default(), &mut rng)?;
    let space = scheme.plaintext_space();
    let view = View { pk: &keys.pk, sk: adv.white_box().then_some(&keys.sk), plaintexts: &space };
    let choice = adv.choose(&view, &mut rng)?;
    if choice.m0 == choice.m1 {
        return Err(Error::InvalidMessagePair(format!("{} twice", choice.m0)));
    }
    let m0 = scheme.message(choice.m0.clone()).map_err(|_| Error::InvalidMessagePair(choice.m0.to_string()))?;
    let m1 = scheme.message(choice.m1.clone()).map_err(|_| Error::InvalidMessagePair(choice.m1.to_string()))?;
    let b = rng.gen::<bool>();
    let challenge = scheme.encrypt(&keys.pk, if b { &m1 } else { &m0 }, &mut rng)?;
    Ok(match adv.guess(&view, &choice.state, challenge.value(), &mut rng)? {
        Guess::Bit(g) if g == b => Outcome::Win,
        Guess::Bit(_) => Outcome::Loss,
        Guess::Abstain => Outcome::Abstain,
    })
}

/// Per-trial outcomes; trial `i` draws everything from stream `i` of `seed`.
pub fn run_indcpa_trace(scheme: &SchemeRef, adv: &dyn Adversary, trials: u64, seed: u64) -> Result<Vec<Outcome>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    Execution::default().try_map(trials as usize, |i| play(scheme, adv, i as u64, seed))
}

pub fn summarize(
    game: &str,
    participants: Vec<String>,
    outcomes: &[Outcome],
    seed: u64,
    flags: Vec<String>,
) -> GameReport {
    let trials = outcomes.len() as u64;
    let wins = outcomes.iter().filter(|o| **o == Outcome::Win).count() as u64;
    let abstentions = outcomes.iter().filter(|o| **o == Outcome::Abstain).count() as u64;
    let score = (wins as f64 + abstentions as f64 / 2.0) / trials as f64;
    GameReport {
        game: game.to_string(),
        participants,
        trials,
        wins,
        advantage: (2.0 * score - 1.0).abs(),
        ci: hoeffding_halfwidth(trials, DEFAULT_DELTA),
        delta: DEFAULT_DELTA,
        seed,
        flags,
        abstentions,
    }
}

/// The chosen-plaintext game with a fresh key pair per trial.
pub fn run_indcpa(scheme: &SchemeRef, adv: &dyn Adversary, trials: u64, seed: u64) -> Result<GameReport> {
    let outcomes = run_indcpa_trace(scheme, adv, trials, seed)?;
    let mut flags = Vec::new();
    if adv.white_box() {
        flags.push("white_box".to_string());
    }
    Ok(summarize("indcpa", vec![scheme.name(), adv.name()], &outcomes, seed, flags))
}

/// The chosen-plaintext game against the source scheme whose public key
/// also carries the target public key and the bridge key.
pub fn run_bridge_indcpa(b: &Bridge, adv: &dyn Adversary, trials: u64, seed: u64) -> Result<GameReport> {
    let view = bridge_public_view(b);
    let outcomes = run_indcpa_trace(&view, adv, trials, seed)?;
    let mut flags = b.flags();
    if adv.white_box() {
        flags.push("white_box".to_string());
    }
    Ok(summarize("bridge-indcpa", vec![b.name().to_string(), adv.name()], &outcomes, seed, flags))
}

/// Same game on the graph scheme of the bridge.
pub fn run_graph_indcpa_trace(b: &Bridge, adv: &dyn Adversary, trials: u64, seed: u64) -> Result<Vec<Outcome>> {
    run_indcpa_trace(&graph_scheme(b, false), adv, trials, seed)
}

/// Uniformly random bit string of length `n`, used by samplers.
pub(crate) fn random_bits(n: usize, rng: &mut dyn RngCore) -> Value {
    Value::bits((0..n).map(|_| rng.gen::<bool>()))
}
