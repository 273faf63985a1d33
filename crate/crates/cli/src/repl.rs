//! Line-oriented session. Plain lines are evaluated like `vcalc eval`;
//! lines starting with `:` are session commands.

use std::io::{self, BufRead, IsTerminal, Write};

use vcalc_core::Settings;

use crate::commands::{self, Outcome};
use crate::{render_json, Command};

const HELP: &str = "\
expressions: 2*inf^3 - 1, sqrt(inf^2 + 1), sin(del)/del, (+-)1, (-+)del
  :set trunc N | depth K | tol X | seed S
  :show      current settings
  :help      this text
  :quit      leave (or end of input)";

pub fn run(input: impl BufRead, mut out: impl Write, mut settings: Settings, json: bool) -> io::Result<()> {
    let prompt = io::stdin().is_terminal();
    if prompt {
        write!(out, "vcalc> ")?;
        out.flush()?;
    }
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line == ":quit" || line == ":q" {
            break;
        }
        if !line.is_empty() {
            let reply = if let Some(cmd) = line.strip_prefix(':') {
                session_command(cmd, &mut settings)
            } else {
                let out = commands::run(&Command::Eval { expr: line.to_string() }, &settings);
                if json {
                    render_json("eval", &out, &settings)
                } else {
                    show(&out)
                }
            };
            writeln!(out, "{reply}")?;
        }
        if prompt {
            write!(out, "vcalc> ")?;
            out.flush()?;
        }
    }
    if prompt {
        writeln!(out)?;
    }
    Ok(())
}

fn show(out: &Outcome) -> String {
    if out.is_error() {
        format!("error: {}", out.text)
    } else {
        out.text.clone()
    }
}

fn session_command(cmd: &str, s: &mut Settings) -> String {
    let words: Vec<&str> = cmd.split_whitespace().collect();
    match words.as_slice() {
        ["help"] => HELP.into(),
        ["show"] => format!("trunc {}  depth {}  tol {:e}  seed {}", s.trunc, s.depth, s.tol, s.seed),
        ["set", key, val] => match set(s, key, val) {
            Ok(()) => format!("{key} = {val}"),
            Err(e) => format!("error: {e}"),
        },
        _ => format!("error: unknown command `:{cmd}` (try :help)"),
    }
}

fn set(s: &mut Settings, key: &str, val: &str) -> Result<(), String> {
    let bad = || format!("invalid value `{val}` for {key}");
    match key {
        "trunc" => match val.parse::<i32>() {
            Ok(t) if (1..=256).contains(&t) => s.trunc = t,
            _ => return Err(bad()),
        },
        "depth" => match val.parse::<u32>() {
            Ok(d) if (4..=48).contains(&d) => *s = s.clone().with_depth(d),
            _ => return Err(bad()),
        },
        "tol" => match val.parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => s.tol = t,
            _ => return Err(bad()),
        },
        "seed" => s.seed = val.parse().map_err(|_| bad())?,
        _ => return Err(format!("unknown setting `{key}`")),
    }
    Ok(())
}
