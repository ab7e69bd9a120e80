use std::fmt;
use std::io::Write;
use std::process::ExitCode;

use bridgelab_core::bridges::{
    check_bridge_correct, check_complete, halfkey_bridges, search_correctness_counterexample, violates_completeness,
    Bridge, CheckMode, KeyMode, DEFAULT_EXHAUSTIVE_BUDGET,
};
use bridgelab_core::circuits::{random_circuit, BooleanCircuit, Gate};
use bridgelab_core::fche::{
    bootstrap_after_eval, check_fche, check_fche_exhaustive, fche_transform, raw_squaring_witness, search_fche_witness,
    small_circuits,
};
use bridgelab_core::gentry::{gentry_bridge, RecryptVariant};
use bridgelab_core::harness::{halfkey_attacker, run_bridge_indcpa, run_distinguisher, run_indcpa, Frontend};
use bridgelab_core::homomorphic::{EvaluableClass, HomSchemeRef};
use bridgelab_core::params::{Preset, Presets};
use bridgelab_core::registry::{self, Registry};
use bridgelab_core::rng::stream;
use bridgelab_core::{SecurityParameter, Value};
use serde_json::{json, Map, Value as Json};

use crate::{CheckKind, Cli, Command, DemoName, Format, Game, ListKind, Mode, Variant};

#[derive(Debug)]
pub enum CliError {
    Lib(bridgelab_core::Error),
    Usage(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<bridgelab_core::Error> for CliError {
    fn from(e: bridgelab_core::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn to_json<T: serde::Serialize>(v: &T) -> Json {
    serde_json::to_value(v).expect("reports serialize")
}

fn exit(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let presets = match &cli.presets {
        Some(path) => Presets::with_file(path)?,
        None => Presets::builtin(),
    };
    let reg = Registry::new(presets);
    let seed = cli.seed.unwrap_or(0);
    let (report, pass) = match &cli.command {
        Command::Check { kind } => check(&reg, kind, seed)?,
        Command::Demo { name } => demo(&reg, name, seed)?,
        Command::Experiment { game } => {
            let seed = cli.seed.ok_or_else(|| CliError::Usage("experiments need --seed or BRIDGELAB_SEED".into()))?;
            (experiment(&reg, game, seed)?, true)
        }
        Command::List { kind } => (list(&reg, *kind), true),
        Command::Params => (to_json(reg.presets()), true),
    };
    let text = match (cli.format, &cli.command) {
        (Format::Json, _) => serde_json::to_string_pretty(&report).expect("json renders"),
        (Format::Text, Command::Params) => reg.presets().to_toml(),
        (Format::Text, _) => render_text(&report),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
        }
    }
    Ok(exit(pass))
}

fn render_text(report: &Json) -> String {
    fn line(key: &str, v: &Json, out: &mut Vec<String>) {
        match v {
            Json::String(s) => out.push(format!("{key}: {s}")),
            Json::Object(map) => {
                for (k, v) in map {
                    let nested = if key.is_empty() { k.clone() } else { format!("{key}.{k}") };
                    line(&nested, v, out);
                }
            }
            Json::Array(items) if items.iter().all(Json::is_string) && key.is_empty() => {
                out.extend(items.iter().map(|s| s.as_str().unwrap_or_default().to_string()));
            }
            other => out.push(format!("{key}: {other}")),
        }
    }
    let mut out = Vec::new();
    line("", report, &mut out);
    out.join("\n")
}

fn bridge(reg: &Registry, id: &str, preset: Option<&str>) -> Result<Bridge> {
    if preset.is_some() && (id.starts_with("gentry:") || id.starts_with("circuit:")) {
        return Err(CliError::Usage(format!("{id} does not take a preset")));
    }
    if let Some(p) = preset {
        reg.presets().get(p)?;
    }
    Ok(reg.bridge(id, preset)?)
}

fn describe(b: &Bridge) -> Json {
    let mut d = json!({
        "name": b.name(),
        "source": b.source().name(),
        "target": b.target().name(),
        "key_mode": b.key_mode(),
        "correctness": b.correctness(),
        "completeness": b.completeness(),
        "flags": b.flags(),
    });
    let meta = b.gentry_meta().or_else(|| b.parts().and_then(|(_, g)| g.gentry_meta()));
    if let Some(meta) = meta {
        d["recryption"] = json!({
            "outer": meta.outer.name(),
            "key_bits": meta.inner_key_bits,
            "variant": meta.variant,
            "circuit_depth": meta.max_circuit_depth,
            "noise_budget": meta.outer.evaluable_class(),
        });
    }
    d
}

fn with_fields(base: Json, extra: Json) -> Json {
    let mut map = match base {
        Json::Object(m) => m,
        other => Map::from_iter([("report".to_string(), other)]),
    };
    if let Json::Object(e) = extra {
        map.extend(e);
    }
    Json::Object(map)
}

fn check(reg: &Registry, kind: &CheckKind, seed: u64) -> Result<(Json, bool)> {
    match kind {
        CheckKind::Correct { target, trials } => {
            let b = bridge(reg, &target.bridge, target.preset.as_deref())?;
            let report = check_bridge_correct(&b, *trials, seed)?;
            let pass = report.failures == 0;
            let counterexample = if pass { None } else { Some(search_correctness_counterexample(&b, *trials, seed)?) };
            let out = with_fields(
                to_json(&report),
                json!({"passed": pass, "bridge": describe(&b), "counterexample": counterexample}),
            );
            Ok((out, pass))
        }
        CheckKind::Complete { target, mode, budget, ciphertext } => {
            let b = bridge(reg, &target.bridge, target.preset.as_deref())?;
            if let Some(text) = ciphertext {
                return check_one_ciphertext(&b, text, seed);
            }
            let (mode, default_budget) = match mode {
                Mode::Exhaustive => (CheckMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET),
                Mode::Sampled => (CheckMode::Sampled, 10_000),
            };
            let report = check_complete(&b, mode, budget.unwrap_or(default_budget), seed)?;
            let pass = report.complete;
            let out = with_fields(to_json(&report), json!({"details": describe(&b)}));
            Ok((out, pass))
        }
    }
}

fn check_one_ciphertext(b: &Bridge, text: &str, seed: u64) -> Result<(Json, bool)> {
    let c = Value::from_json(text).map_err(|e| CliError::Usage(format!("--ciphertext: {e}")))?;
    if !b.source().ciphertext_space().contains(&c) {
        return Err(CliError::Usage(format!("{c} is not a ciphertext of {}", b.source().name())));
    }
    let keys = b
        .source()
        .secret_keys()
        .ok_or_else(|| CliError::Usage(format!("keys of {} are not enumerable", b.source().name())))?;
    let mut checked = 0u64;
    let mut witness = None;
    for sk in &keys {
        checked += 1;
        if let Some(w) = violates_completeness(b, sk, &c, seed)? {
            witness = Some(w);
            break;
        }
    }
    let complete = witness.is_none();
    let out = json!({
        "bridge": b.name(),
        "mode": "ciphertext",
        "checked": checked,
        "complete": complete,
        "witness": witness,
        "seed": seed,
        "details": describe(b),
    });
    Ok((out, complete))
}

fn demo(reg: &Registry, name: &DemoName, seed: u64) -> Result<(Json, bool)> {
    match name {
        DemoName::HalfkeyAttack { preset, trials } => halfkey_demo(reg, preset, *trials, seed),
        DemoName::GentryComplete { inner, outer, variant, shared, samples } => {
            let variant = match variant {
                Variant::Folded => RecryptVariant::Folded,
                Variant::EncryptedBits => RecryptVariant::EncryptedBits,
            };
            let mode = if *shared { KeyMode::Shared } else { KeyMode::Independent };
            let b = gentry_bridge(&reg.scheme(inner)?, &reg.hom_scheme(outer)?, mode, variant)?;
            let pairs = b
                .source()
                .ciphertext_space()
                .size()
                .zip(b.source().secret_keys().map(|k| k.len() as u64))
                .and_then(|(c, k)| c.checked_mul(k));
            let report = match pairs {
                Some(n) if n <= DEFAULT_EXHAUSTIVE_BUDGET => {
                    check_complete(&b, CheckMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET, seed)?
                }
                _ => check_complete(&b, CheckMode::Sampled, *samples, seed)?,
            };
            let pass = report.complete;
            Ok((json!({"demo": "gentry-complete", "predicted": pass, "report": report, "bridge": describe(&b)}), pass))
        }
        DemoName::Fche { backend, trials } => fche_demo(reg, backend, *trials, seed),
        DemoName::BootstrapNotFche { backend, candidates } => bootstrap_demo(reg, backend, *candidates, seed),
    }
}

fn halfkey_demo(reg: &Registry, preset: &str, trials: u64, seed: u64) -> Result<(Json, bool)> {
    let base = reg.presets().get(preset)?.scheme()?;
    let (f, g) = halfkey_bridges(&base)?;
    let composed = bridgelab_core::bridges::compose(&f, &g)?;
    let attacker = halfkey_attacker(&base, Frontend::Augmented);
    let mut parts = Vec::new();
    let mut pass = true;
    for b in [&f, &g] {
        let correct = check_bridge_correct(b, 10_000, seed)?;
        let complete = check_complete(b, CheckMode::Exhaustive, 1 << 16, seed)?;
        let game = run_bridge_indcpa(b, attacker.as_ref(), trials, seed)?;
        pass &= correct.failures == 0 && complete.complete && game.consistent_with_zero_advantage();
        parts.push(json!({"bridge": b.name(), "correctness": correct, "completeness": complete, "game": game}));
    }
    let game = run_bridge_indcpa(&composed, attacker.as_ref(), trials, seed)?;
    pass &= game.advantage == 1.0;
    let out = json!({
        "demo": "halfkey-attack",
        "predicted": pass,
        "advantage": game.advantage,
        "halves": parts,
        "composed": {"bridge": composed.name(), "game": game},
    });
    Ok((out, pass))
}

fn depth_limit(h: &HomSchemeRef) -> usize {
    match h.evaluable_class() {
        EvaluableClass::All => 3,
        EvaluableClass::DepthAtMost(d) => d.min(3),
    }
}

fn noise_certificate(reg: &Registry, backend: &str) -> Json {
    match reg.presets().get(backend) {
        Ok(p @ Preset::Gsw { .. }) => match p.gsw_params() {
            Ok(params) => json!({
                "depth_budget": params.depth_budget,
                "log_q": params.log_q,
                "certified": params.certifies(params.depth_budget),
                "worst_case_noise": params.worst_case_noise(params.depth_budget).map(|v| v.to_string()),
            }),
            Err(e) => json!({"error": e.to_string()}),
        },
        _ => Json::Null,
    }
}

fn fche_demo(reg: &Registry, backend: &str, trials: u64, seed: u64) -> Result<(Json, bool)> {
    let trivial = fche_transform(&reg.hom_scheme("trivial")?);
    let mut circuits = small_circuits(1, 3);
    circuits.extend(small_circuits(2, 3));
    let exhaustive = check_fche_exhaustive(&trivial, &circuits, seed)?;

    let base = reg.hom_scheme(backend)?;
    let h = fche_transform(&base);
    let gates = depth_limit(&h);
    let sampled = check_fche(&h, |rng| random_circuit(2, gates, 1, rng), trials, seed)?;
    let leveled = matches!(base.evaluable_class(), EvaluableClass::DepthAtMost(_));
    let raw = if leveled { raw_squaring_witness(&base, 16, 32, seed)? } else { None };
    let certificate = noise_certificate(reg, backend);
    let certified = certificate.get("certified").and_then(Json::as_bool).unwrap_or(!leveled);
    let pass = exhaustive.holds && sampled.holds && certified && (raw.is_some() == leveled);
    let out = json!({
        "demo": "fche",
        "predicted": pass,
        "trivial_exhaustive": {"circuits": circuits.len(), "report": exhaustive},
        "transformed": {"scheme": h.name(), "class": h.evaluable_class(), "noise": certificate, "report": sampled},
        "raw_witness": raw,
    });
    Ok((out, pass))
}

/// `out_i = x_i ⊕ x_{i+1 mod 4}`.
fn rotate_xor() -> BooleanCircuit {
    let gates = (0..4).map(|i| Gate::Xor(i, (i + 1) % 4)).collect();
    BooleanCircuit::new(4, gates, vec![4, 5, 6, 7]).expect("well-formed circuit")
}

fn bootstrap_demo(reg: &Registry, backend: &str, candidates: u64, seed: u64) -> Result<(Json, bool)> {
    const STAGES: usize = 5;
    let h = bootstrap_after_eval(&reg.hom_scheme(backend)?);
    let step = rotate_xor();
    let mut rng = stream(seed, 0);
    let keys = h.keygen(SecurityParameter::default(), &mut rng)?;
    let mut wrong = Vec::new();
    for x in 0..16u64 {
        let mut plain: Vec<bool> = (0..4).map(|i| (x >> i) & 1 == 1).collect();
        let mut cts = plain
            .iter()
            .map(|&b| h.encrypt_value(&keys.pk, &Value::bit(b), &mut rng))
            .collect::<bridgelab_core::Result<Vec<_>>>()?;
        for _ in 0..STAGES {
            plain = step.eval(&plain)?;
            cts = h.eval_values(&keys.pk.evk, &step, &cts, &mut rng)?;
        }
        let got =
            cts.iter().map(|c| h.decrypt_value(&keys.sk, c)?.as_bit()).collect::<bridgelab_core::Result<Vec<_>>>()?;
        if got != plain {
            wrong.push(x);
        }
    }
    let witness = search_fche_witness(&h, &BooleanCircuit::and(), candidates, seed)?;
    let pass = wrong.is_empty() && witness.is_some();
    let out = json!({
        "demo": "bootstrap-not-fche",
        "predicted": pass,
        "scheme": h.name(),
        "fresh_chains": {"inputs": 16, "stages": STAGES, "wrong": wrong},
        "witness": witness.map(|(index, w)| json!({"candidate_index": index, "witness": w})),
    });
    Ok((out, pass))
}

fn experiment(reg: &Registry, game: &Game, seed: u64) -> Result<Json> {
    let report = match game {
        Game::Indcpa { scheme, adversary, trials } => {
            let s = reg.scheme(scheme)?;
            let adv = reg.adversary(adversary, &s)?;
            run_indcpa(&s, adv.as_ref(), *trials, seed)?
        }
        Game::BridgeIndcpa { bridge: id, preset, adversary, trials } => {
            let b = bridge(reg, id, preset.as_deref())?;
            let adv = reg.adversary(adversary, b.source())?;
            run_bridge_indcpa(&b, adv.as_ref(), *trials, seed)?
        }
        Game::Distinguish { a, b, d, trials } => {
            let (a, b, d) = (reg.sampler(a)?, reg.sampler(b)?, reg.distinguisher(d)?);
            run_distinguisher(&a, &b, &d, *trials, seed)?
        }
    };
    Ok(to_json(&report))
}

fn list(reg: &Registry, kind: Option<ListKind>) -> Json {
    let pairs = |items: &[(&str, &str)]| -> Json {
        Json::Array(items.iter().map(|(id, about)| json!({"id": id, "about": about})).collect())
    };
    let bridges = Json::Array(
        registry::BRIDGES
            .iter()
            .map(|(id, preset, about)| json!({"id": id, "preset": preset, "about": about}))
            .collect(),
    );
    let presets =
        Json::Array(reg.presets().iter().map(|(name, p)| json!({"id": name, "about": p.description()})).collect());
    let all = [
        (ListKind::Bridges, "bridges", bridges),
        (ListKind::Schemes, "schemes", pairs(registry::SCHEMES)),
        (ListKind::Presets, "presets", presets),
        (ListKind::Adversaries, "adversaries", pairs(registry::ADVERSARIES)),
        (ListKind::Samplers, "samplers", pairs(registry::SAMPLERS)),
        (ListKind::Distinguishers, "distinguishers", pairs(registry::DISTINGUISHERS)),
        (ListKind::Circuits, "circuits", json!(registry::CIRCUITS)),
    ];
    let mut map = Map::new();
    for (k, name, v) in all {
        if kind.is_none_or(|want| want == k) {
            map.insert(name.to_string(), v);
        }
    }
    Json::Object(map)
}
