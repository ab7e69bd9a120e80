use std::sync::Arc;

use rand::{Rng, RngCore};

use super::{hoeffding_halfwidth, random_bits, GameReport, DEFAULT_DELTA};
use crate::bridges::Bridge;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gentry::zero_substituted_bridge_key;
use crate::rng;
use crate::value::Value;

/// Every distinguisher report carries this flag: a fixed distinguisher
/// says nothing about all efficient ones.
pub const HEURISTIC_ONLY: &str = "heuristic_only";

type SampleFn = dyn Fn(&mut dyn RngCore) -> Result<Value> + Send + Sync;

#[derive(Clone)]
pub struct Sampler {
    name: String,
    sample: Arc<SampleFn>,
}

impl Sampler {
    pub fn new(name: impl Into<String>, f: impl Fn(&mut dyn RngCore) -> Result<Value> + Send + Sync + 'static) -> Self {
        Sampler { name: name.into(), sample: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Result<Value> {
        (self.sample)(rng)
    }

    pub fn uniform_bits(n: usize) -> Self {
        Sampler::new("uniform-bits", move |rng| Ok(random_bits(n, rng)))
    }

    pub fn zero_bits(n: usize) -> Self {
        Sampler::new("zero-bits", move |_| Ok(Value::bits(vec![false; n])))
    }
}

type DistinguishFn = dyn Fn(&Value) -> bool + Send + Sync;

#[derive(Clone)]
pub struct Distinguisher {
    name: String,
    f: Arc<DistinguishFn>,
}

impl Distinguisher {
    pub fn new(name: impl Into<String>, f: impl Fn(&Value) -> bool + Send + Sync + 'static) -> Self {
        Distinguisher { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn decide(&self, v: &Value) -> bool {
        (self.f)(v)
    }
}

fn first_int(v: &Value) -> u64 {
    let mut ints = Vec::new();
    v.flatten_ints(&mut ints);
    ints.first().copied().unwrap_or(0)
}

/// Parity of the lowest byte of the first integer in the sample.
pub fn byte_parity() -> Distinguisher {
    Distinguisher::new("byte-parity", |v| (first_int(v) & 0xff).count_ones() % 2 == 1)
}

/// Lowest bit of the first integer in the sample.
pub fn first_bit() -> Distinguisher {
    Distinguisher::new("first-bit", |v| first_int(v) & 1 == 1)
}

/// Per trial: a fair coin picks a side, the sample comes from that side,
/// and the distinguisher answers 1 for "A". The advantage is
/// `|P(d=1 | A) − P(d=1 | B)|`; `wins` counts trials where the answer
/// names the right side.
pub fn run_distinguisher(a: &Sampler, b: &Sampler, d: &Distinguisher, trials: u64, seed: u64) -> Result<GameReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut probe = rng::stream(rng::subseed(seed, 1), 0);
    let (sa, sb) = (a.sample(&mut probe)?.shape(), b.sample(&mut probe)?.shape());
    if sa != sb {
        return Err(Error::ShapeMismatch(format!("{} gives {sa}, {} gives {sb}", a.name, b.name)));
    }
    let results = Execution::default().try_map(trials as usize, |i| -> Result<(bool, bool)> {
        let mut rng = rng::stream(seed, i as u64);
        let from_a = rng.gen::<bool>();
        let v = if from_a { a.sample(&mut rng)? } else { b.sample(&mut rng)? };
        Ok((from_a, d.decide(&v)))
    })?;
    let count = |side: bool| results.iter().filter(|(s, _)| *s == side).count() as f64;
    let ones = |side: bool| results.iter().filter(|(s, g)| *s == side && *g).count() as f64;
    let rate = |side: bool| if count(side) == 0.0 { 0.0 } else { ones(side) / count(side) };
    let wins = results.iter().filter(|(s, g)| s == g).count() as u64;
    Ok(GameReport {
        game: "distinguish".into(),
        participants: vec![a.name.clone(), b.name.clone(), d.name.clone()],
        trials,
        wins,
        advantage: (rate(true) - rate(false)).abs(),
        ci: hoeffding_halfwidth(trials, DEFAULT_DELTA),
        delta: DEFAULT_DELTA,
        seed,
        flags: vec![HEURISTIC_ONLY.to_string()],
        abstentions: 0,
    })
}

/// Real and zero-substituted bridge-key samplers of a composite ending in
/// a recryption bridge with independent keys.
pub fn gentry_samplers(composed: &Bridge) -> Result<(Sampler, Sampler)> {
    let keys = zero_substituted_bridge_key(composed)?;
    let zero = keys.clone();
    Ok((
        Sampler::new("gentry-real", move |rng| Ok(keys.real(rng)?.to_value())),
        Sampler::new("gentry-zero", move |rng| Ok(zero.zero(rng)?.to_value())),
    ))
}
