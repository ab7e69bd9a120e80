//! `bridgelab`: checks, demos and games over the bridge library.
//!
//! Exit codes: 0 when a check passes or a demo reproduces the predicted
//! outcome (including attacks that succeed), 1 when a check fails or a
//! demo does not behave as predicted, 2 on usage errors and unknown ids.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bridgelab", version, about = "Bridges between encryption schemes at toy parameters")]
pub struct Cli {
    /// Seed for every random choice. Required by `experiment`; the other
    /// commands default to 0.
    #[arg(long, global = true, env = "BRIDGELAB_SEED")]
    pub seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// TOML file of extra presets, merged over the built-in ones.
    #[arg(long, global = true)]
    pub presets: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a correctness or completeness check on a bridge.
    Check {
        #[command(subcommand)]
        kind: CheckKind,
    },
    /// Reproduce one of the worked scenarios.
    Demo {
        #[command(subcommand)]
        name: DemoName,
    },
    /// Play a security game.
    Experiment {
        #[command(subcommand)]
        game: Game,
    },
    /// List registered ids.
    List {
        #[arg(value_enum)]
        kind: Option<ListKind>,
    },
    /// Print the parameter presets as TOML.
    Params,
}

#[derive(Args, Debug, Clone)]
pub struct BridgeArgs {
    /// Bridge id; see `bridgelab list bridges`.
    pub bridge: String,
    /// Parameter preset the bridge is built on.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand, Debug)]
pub enum CheckKind {
    /// Fresh encryptions convert to encryptions of the mapped message.
    Correct {
        #[command(flatten)]
        target: BridgeArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Every ciphertext converts to one decrypting to the mapped plaintext.
    Complete {
        #[command(flatten)]
        target: BridgeArgs,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        /// Cap on checked (key, ciphertext) pairs, or samples in sampled mode.
        #[arg(long)]
        budget: Option<u64>,
        /// Check only this source ciphertext (JSON), under every key.
        #[arg(long)]
        ciphertext: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Folded,
    EncryptedBits,
}

#[derive(Subcommand, Debug)]
pub enum DemoName {
    /// Two half-key bridges, harmless alone, leak the key when composed.
    HalfkeyAttack {
        #[arg(long, default_value = "lwe-toy")]
        preset: String,
        #[arg(long, default_value_t = 1_000)]
        trials: u64,
    },
    /// A recryption bridge is complete.
    GentryComplete {
        #[arg(long, default_value = "lwe-n1q4")]
        inner: String,
        #[arg(long, default_value = "trivial")]
        outer: String,
        #[arg(long, value_enum, default_value_t = Variant::Folded)]
        variant: Variant,
        /// Encrypt the key under itself (inner and outer must coincide).
        #[arg(long)]
        shared: bool,
        /// Samples when the ciphertext space is too large to enumerate.
        #[arg(long, default_value_t = 200)]
        samples: u64,
    },
    /// The composable transform holds on arbitrary inputs; the raw
    /// leveled scheme does not.
    Fche {
        #[arg(long, default_value = "gsw-fche")]
        backend: String,
        #[arg(long, default_value_t = 500)]
        trials: u64,
    },
    /// Recrypting after each evaluation keeps fresh chains correct but
    /// fails on arbitrary inputs.
    BootstrapNotFche {
        #[arg(long, default_value = "gsw-fche")]
        backend: String,
        #[arg(long, default_value_t = 100)]
        candidates: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum Game {
    /// Chosen-plaintext game against a scheme.
    Indcpa {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        adversary: String,
        #[arg(long, default_value_t = 1_000)]
        trials: u64,
    },
    /// Chosen-plaintext game against a bridge's source scheme with the
    /// bridge key published.
    BridgeIndcpa {
        #[arg(long)]
        bridge: String,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        adversary: String,
        #[arg(long, default_value_t = 1_000)]
        trials: u64,
    },
    /// Fixed distinguisher between two samplers.
    Distinguish {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        d: String,
        #[arg(long, default_value_t = 1_000)]
        trials: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ListKind {
    Bridges,
    Schemes,
    Presets,
    Adversaries,
    Samplers,
    Distinguishers,
    Circuits,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 2 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
