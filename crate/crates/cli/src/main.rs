use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};
use subord_cli::{default_out, run, write_outputs, RunConfig, EXIT_INVALID};
use subord_core::fixtures::{fixture_path, pinned_gw_constants, seed_gw_constants};

#[derive(Parser)]
#[command(name = "subord", version, about = "Verify subordination inequalities for convolution operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Half-length of the space window.
    #[arg(long = "grid-L", global = true)]
    grid_l: Option<f64>,
    /// Number of grid nodes (a power of two).
    #[arg(long = "grid-N", global = true)]
    grid_n: Option<usize>,
    /// JSON report path; the CSV summary is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config whose fields override the flags.
    #[arg(long = "json-config", global = true)]
    json_config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Wiener-norm estimate of a registry multiplier.
    WienerNorm {
        /// Registry multiplier as JSON, e.g. '{"kind":"exp_abs","rate":1}'.
        #[arg(long)]
        multiplier: Option<String>,
    },
    /// Compare the means of orders alpha < beta.
    GwCompare {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<String>>,
    },
    /// Build h1, h2 with Q = h1 P1 + h2 P2.
    Lemma2 {
        #[arg(long = "Q")]
        q_poly: Option<String>,
        #[arg(long = "P1")]
        p1_poly: Option<String>,
        #[arg(long = "P2")]
        p2_poly: Option<String>,
    },
    /// Check |Q(D)f|_q <= C(|P1(D)f|_p1 + |P2(D)f|_p2).
    DiffopVerify {
        /// Coefficients as JSON [re, im] pairs, constant term first.
        #[arg(long = "Q")]
        q_poly: Option<String>,
        #[arg(long = "P1")]
        p1_poly: Option<String>,
        #[arg(long = "P2")]
        p2_poly: Option<String>,
        /// Exponent in [1, inf]; p1 and p2 default to q.
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        p1: Option<String>,
        #[arg(long)]
        p2: Option<String>,
    },
    /// Compare two registry multipliers m1, m2.
    Compare {
        /// Registry multiplier as JSON; m1 is the one being bounded.
        #[arg(long)]
        m1: Option<String>,
        #[arg(long)]
        m2: Option<String>,
        /// Comma-separated exponents, e.g. 1,2,inf.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<String>>,
        #[arg(long = "zero-tolerance")]
        zero_tolerance: Option<f64>,
        /// Fill policy as JSON, e.g. '{"policy":"limit_fill"}'.
        #[arg(long)]
        fill: Option<String>,
    },
    /// Run the built-in oracle battery.
    Selftest,
}

fn parse_json(flag: &str, text: &str) -> Result<Value, String> {
    serde_json::from_str(text).map_err(|e| format!("--{flag}: {e}"))
}

fn exponent_value(text: &str) -> Value {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map_or_else(|| json!(text.trim()), |v| json!(v))
}

/// The flags as a partial config document.
fn flags_value(cli: &Cli) -> Result<Value, String> {
    let mut cmd = Map::new();
    let mut put = |k: &str, v: Value| {
        cmd.insert(k.to_string(), v);
    };
    let name = match &cli.command {
        Command::WienerNorm { multiplier } => {
            if let Some(m) = multiplier {
                put("multiplier", parse_json("multiplier", m)?);
            }
            "wiener-norm"
        }
        Command::GwCompare { alpha, beta, eps, p } => {
            alpha.map(|v| put("alpha", json!(v)));
            beta.map(|v| put("beta", json!(v)));
            if let Some(e) = eps {
                put("eps", json!(e));
            }
            if let Some(p) = p {
                put("p", Value::Array(p.iter().map(|s| exponent_value(s)).collect()));
            }
            "gw-compare"
        }
        Command::Lemma2 { q_poly, p1_poly, p2_poly } => {
            for (k, v) in [("Q", q_poly), ("P1", p1_poly), ("P2", p2_poly)] {
                if let Some(text) = v {
                    put(k, parse_json(k, text)?);
                }
            }
            "lemma2"
        }
        Command::DiffopVerify {
            q_poly,
            p1_poly,
            p2_poly,
            q,
            p1,
            p2,
        } => {
            for (k, v) in [("Q", q_poly), ("P1", p1_poly), ("P2", p2_poly)] {
                if let Some(text) = v {
                    put(k, parse_json(k, text)?);
                }
            }
            for (k, v) in [("q", q), ("p1", p1), ("p2", p2)] {
                if let Some(text) = v {
                    put(k, exponent_value(text));
                }
            }
            "diffop-verify"
        }
        Command::Compare {
            m1,
            m2,
            p,
            zero_tolerance,
            fill,
        } => {
            for (k, v) in [("m1", m1), ("m2", m2), ("fill", fill)] {
                if let Some(text) = v {
                    put(k, parse_json(k, text)?);
                }
            }
            if let Some(p) = p {
                put("p", Value::Array(p.iter().map(|s| exponent_value(s)).collect()));
            }
            zero_tolerance.map(|t| put("zero_tolerance", json!(t)));
            "compare"
        }
        Command::Selftest => "selftest",
    };
    cmd.insert("name".into(), json!(name));
    let mut grid = Map::new();
    cli.grid_l.map(|l| grid.insert("L".into(), json!(l)));
    cli.grid_n.map(|n| grid.insert("N".into(), json!(n)));
    let mut doc = Map::new();
    doc.insert("grid".into(), Value::Object(grid));
    if let Some(out) = &cli.out {
        doc.insert("out".into(), json!(out));
    }
    doc.insert("command".into(), Value::Object(cmd));
    Ok(Value::Object(doc))
}

fn load_config(cli: &Cli) -> Result<RunConfig, String> {
    let flags = flags_value(cli)?;
    let file = match &cli.json_config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            Some(serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?)
        }
        None => None,
    };
    RunConfig::from_layers(flags, file).map_err(|e| e.0)
}

fn invalid(msg: &str) -> ExitCode {
    eprintln!("subord: invalid config: {msg}");
    ExitCode::from(EXIT_INVALID as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INVALID as u8);
        }
    };
    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(msg) => return invalid(&msg),
    };
    let fixtures = if std::env::var("SUBORD_SEED_FIXTURES").as_deref() == Ok("1") {
        let path = fixture_path();
        eprintln!("subord: seeding fixtures into {}", path.display());
        match seed_gw_constants(&path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("subord: seeding failed: {e}");
                return ExitCode::from(2);
            }
        }
    } else {
        pinned_gw_constants()
    };
    let outcome = run(&config, &fixtures);
    if outcome.exit_code == EXIT_INVALID {
        let msg = outcome.report["error"]["message"].as_str().unwrap_or("invalid parameters").to_string();
        return invalid(&msg);
    }
    let out = config.out.clone().unwrap_or_else(|| default_out(&config.command));
    match write_outputs(&outcome, &out) {
        Ok((json_path, csv_path)) => {
            eprintln!(
                "subord {}: {} (exit {}), report {} / {}",
                config.command.name(),
                outcome.report["status"].as_str().unwrap_or(""),
                outcome.exit_code,
                json_path.display(),
                csv_path.display()
            );
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => invalid(&format!("{e:#}")),
    }
}
