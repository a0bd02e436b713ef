use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use qkolmo::format::{parse_process, ParsedProcess, ProcessFile};
use qkolmo::report::{distribution_text, report_text, to_json, Format};
use qkolmo::scenarios::{scenario, ScenarioId};
use qkolmo_core::classicality::{analyze, AnalysisConfig};
use qkolmo_core::process::validate_process;
use qkolmo_core::stats::full_distribution;
use qkolmo_core::{Criterion, Process};

#[derive(Parser)]
#[command(
    name = "qkolmo",
    version,
    about = "Multi-time statistics and classicality checks for Markovian quantum processes"
)]
struct Cli {
    /// Verdict and validation tolerance.
    #[arg(long, global = true, env = "QKOLMO_TOL", default_value_t = 1e-9)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a process file.
    Validate { file: PathBuf },
    /// Joint outcome distribution at the given times.
    Probs {
        file: PathBuf,
        /// Times to measure, e.g. `t1,t3` or `1,3`; all times by default.
        #[arg(long, value_delimiter = ',')]
        measure_at: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run classicality checks on a process file.
    Check {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        tests: Vec<Criterion>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Built-in example processes.
    Scenario {
        #[command(subcommand)]
        command: ScenarioCommand,
    },
}

#[derive(Subcommand)]
enum ScenarioCommand {
    List,
    Run {
        name: String,
        #[arg(long, value_delimiter = ',')]
        tests: Vec<Criterion>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the scenario as a process file.
    Show {
        name: String,
    },
}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    anyhow::anyhow!(msg.into())
}

fn load(path: &PathBuf, tol: f64) -> anyhow::Result<ParsedProcess> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_process(&text, tol).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn parse_times(raw: &[String], p: &Process) -> anyhow::Result<Vec<usize>> {
    if raw.is_empty() {
        return Ok((1..=p.n_times()).collect());
    }
    raw.iter()
        .map(|s| {
            let t: usize = s
                .trim()
                .trim_start_matches('t')
                .parse()
                .map_err(|_| invalid(format!("bad time '{s}'")))?;
            if t == 0 || t > p.n_times() {
                return Err(invalid(format!("time {t} is outside 1..={}", p.n_times())));
            }
            Ok(t)
        })
        .collect()
}

fn check(parsed: ParsedProcess, tests: &[Criterion], tol: f64, format: Format) -> anyhow::Result<bool> {
    let mut cfg = AnalysisConfig::with_eps(tol);
    if !tests.is_empty() {
        cfg.criteria = tests.to_vec();
    }
    cfg.initial_set = parsed.initial_set;
    cfg.fixed_basis = parsed.fixed_basis;
    let report = analyze(&parsed.process, &cfg).map_err(|e| invalid(e.to_string()))?;
    match format {
        Format::Text => print!("{}", report_text(&report)),
        Format::Json => print!("{}", to_json(&report)),
    }
    Ok(report.all_passed())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let tol = cli.tol;
    if !(tol > 0.0 && tol.is_finite()) {
        bail!("tolerance must be positive, got {tol}");
    }
    match cli.command {
        Command::Validate { file } => {
            let parsed = load(&file, tol)?;
            let p = &parsed.process;
            let v = validate_process(p, tol);
            if !v.is_valid() {
                let lines: Vec<String> = v
                    .violations
                    .iter()
                    .map(|x| format!("  - {}: {} ({:.3e})", x.component, x.kind, x.magnitude))
                    .collect();
                bail!("invalid process:\n{}", lines.join("\n"));
            }
            let outcomes: Vec<String> = p.instruments().iter().map(|j| j.len().to_string()).collect();
            println!(
                "valid: dimension {}, {} times, outcomes per time [{}]",
                p.dim(),
                p.n_times(),
                outcomes.join(", ")
            );
            let herm: Vec<String> = v.hermitian_instruments.iter().map(|h| h.to_string()).collect();
            println!("hermitian instruments: [{}]", herm.join(", "));
            Ok(true)
        }
        Command::Probs {
            file,
            measure_at,
            format,
        } => {
            let parsed = load(&file, tol)?;
            let times = parse_times(&measure_at, &parsed.process)?;
            let dist = full_distribution(&parsed.process, &times).context("computing distribution")?;
            match format {
                Format::Text => print!("{}", distribution_text(&dist)),
                Format::Json => print!("{}", to_json(&dist)),
            }
            Ok(true)
        }
        Command::Check { file, tests, format } => check(load(&file, tol)?, &tests, tol, format),
        Command::Scenario { command } => match command {
            ScenarioCommand::List => {
                for id in ScenarioId::ALL {
                    println!("{:<14} {}", id.name(), id.summary());
                }
                Ok(true)
            }
            ScenarioCommand::Run { name, tests, format } => {
                let s = scenario(
                    name.parse()
                        .map_err(|e: qkolmo::scenarios::UnknownScenario| invalid(e.to_string()))?,
                );
                let parsed = ParsedProcess {
                    process: s.process,
                    initial_set: None,
                    fixed_basis: s.fixed_basis,
                    description: None,
                };
                check(parsed, &tests, tol, format)
            }
            ScenarioCommand::Show { name } => {
                let s = scenario(
                    name.parse()
                        .map_err(|e: qkolmo::scenarios::UnknownScenario| invalid(e.to_string()))?,
                );
                println!(
                    "{}",
                    ProcessFile::from_process(&s.process, None, s.fixed_basis.as_deref()).to_json()
                );
                Ok(true)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
