//! `vcalc`: one-shot commands and a REPL over virtual-number expressions.

mod commands;
mod repl;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use vcalc_core::Settings;

use crate::commands::Outcome;

#[derive(Parser, Debug)]
#[command(name = "vcalc", version, about = "Calculus with infinitesimal and infinite virtual numbers")]
pub struct Cli {
    /// Series truncation order.
    #[arg(long, global = true, default_value_t = 16, value_parser = clap::value_parser!(i32).range(1..=256))]
    pub trunc: i32,
    /// Schedule exponent for sampled sequences.
    #[arg(long, global = true, default_value_t = 14, value_parser = clap::value_parser!(u32).range(4..=48))]
    pub depth: u32,
    /// Agreement tolerance for approximate results.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = parse_tol)]
    pub tol: f64,
    /// Seed for randomized tags and property suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Normal form and standard part of a constant expression.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Finitude class and position relative to the reals.
    Classify {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Whether two values are infinitely close.
    Near {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Order of magnitude of B relative to A.
    Order {
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Derivative of f(x) at a point, with a differentiability check.
    Deriv {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Taylor coefficients of f about a point and the remainder order.
    Taylor {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
        n: u32,
    },
    /// Definite integral of f(x) from a to b.
    Integrate {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Uniform continuity of f on a domain such as "R" or "[0,10]".
    Uc {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        domain: String,
    },
    /// Area, volume, arclength or surface for f on [a, b].
    Geom {
        kind: String,
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Negligibility of ds - f(x)dx for s(x) = integral of f from a to x.
    Ftc {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Run a proposition suite, or all of them.
    Props {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Interactive session.
    Repl,
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Classify { .. } => "classify",
            Command::Near { .. } => "near",
            Command::Order { .. } => "order",
            Command::Deriv { .. } => "deriv",
            Command::Taylor { .. } => "taylor",
            Command::Integrate { .. } => "integrate",
            Command::Uc { .. } => "uc",
            Command::Geom { .. } => "geom",
            Command::Ftc { .. } => "ftc",
            Command::Props { .. } => "props",
            Command::Repl => "repl",
        }
    }
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("`{s}` is not a positive tolerance")),
    }
}

pub fn settings_from(cli: &Cli) -> Settings {
    let mut s = Settings::default()
        .with_trunc(cli.trunc)
        .with_depth(cli.depth)
        .with_seed(cli.seed);
    s.tol = cli.tol;
    s
}

pub fn meta(s: &Settings) -> Value {
    json!({ "trunc": s.trunc, "depth": s.depth, "tol": s.tol, "seed": s.seed })
}

pub fn render_json(verb: &str, out: &Outcome, s: &Settings) -> String {
    let report = json!({
        "status": if out.is_error() { "error" } else { "ok" },
        "verb": verb,
        "payload": out.payload,
        "meta": meta(s),
    });
    serde_json::to_string(&report).expect("report values are serializable")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = settings_from(&cli);
    if let Command::Repl = cli.command {
        let stdin = std::io::stdin();
        return match repl::run(stdin.lock(), std::io::stdout().lock(), settings, cli.json) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }
    let out = commands::run(&cli.command, &settings);
    let mut stdout = std::io::stdout().lock();
    let written = if cli.json {
        writeln!(stdout, "{}", render_json(cli.command.verb(), &out, &settings))
    } else if out.is_error() {
        eprintln!("error: {}", out.text);
        Ok(())
    } else {
        writeln!(stdout, "{}", out.text)
    };
    if written.is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(out.exit)
}
