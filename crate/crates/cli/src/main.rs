use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kahlerglue::scenarios::{build_scenario, default_config, description, dump_fields, run_scenario, Overrides, VerificationReport, SCENARIO_IDS};
use kahlerglue::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "kahlerglue", version, about = "Run and verify the smoothing scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the shipped scenarios with their defaults.
    List,
    /// Run one scenario and write its report.
    Run {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long = "n-radius")]
        n_radius: Option<f64>,
        #[arg(long = "nprime-radius")]
        nprime_radius: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the potentials before and after smoothing as CSV.
        #[arg(long = "dump-fields")]
        dump_fields: Option<PathBuf>,
    },
    /// Re-check a written report.
    Verify {
        #[arg(long)]
        report: PathBuf,
    },
    /// Run one scenario for each value of a parameter.
    Sweep {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Exit status 2 with a one-line JSON record on stderr.
struct UsageError {
    kind: &'static str,
    message: String,
}

impl UsageError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }
}

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::UnknownScenario(_) => "unknown_scenario",
            Error::InvalidOverride(_) => "invalid_override",
            Error::Infeasible { .. } => "infeasible",
            _ => "config",
        };
        Self::new(kind, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail(UsageError::new("usage", e.to_string())),
    };
    let result = match cli.command {
        Command::List => list(),
        Command::Run {
            scenario,
            h,
            eps,
            eta,
            delta,
            n_radius,
            nprime_radius,
            out,
            dump_fields,
        } => {
            let overrides = Overrides {
                h,
                eps,
                eta,
                delta,
                n_radius,
                nprime_radius,
            };
            run(&scenario, &overrides, &out, dump_fields.as_deref())
        }
        Command::Verify { report } => verify(&report),
        Command::Sweep {
            scenario,
            param,
            values,
            out,
        } => sweep(&scenario, &param, &values, &out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(e),
    }
}

fn fail(e: UsageError) -> ExitCode {
    let line = json!({ "error": e.kind, "message": e.message.replace('\n', " ") });
    eprintln!("{line}");
    ExitCode::from(2)
}

fn list() -> Result<bool, UsageError> {
    for id in SCENARIO_IDS {
        let defaults = default_config(id).map_err(UsageError::from)?;
        let defaults = serde_json::to_string(&defaults).expect("config serializes");
        println!("{id}\t{}\t{defaults}", description(id));
    }
    Ok(true)
}

fn run(id: &str, overrides: &Overrides, out: &Path, dump: Option<&Path>) -> Result<bool, UsageError> {
    let scenario = build_scenario(id, overrides)?;
    let result = run_scenario(&scenario);
    if let (Some(dir), Some(outcome)) = (dump, &result.outcome) {
        dump_fields(&scenario, outcome, dir)?;
    }
    write_atomic(out, &result.report.to_json())?;
    summarize(&result.report);
    Ok(result.report.pass)
}

fn verify(path: &Path) -> Result<bool, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError::new("io", format!("{}: {e}", path.display())))?;
    let report = VerificationReport::from_json(&text).map_err(|e| UsageError::new("malformed_report", e.to_string()))?;
    let inconsistent = report.inconsistencies();
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    println!(
        "{}",
        json!({
            "scenario": report.scenario,
            "pass": report.pass && inconsistent.is_empty(),
            "failed": failed,
            "inconsistent": inconsistent,
        })
    );
    Ok(report.pass && inconsistent.is_empty())
}

fn sweep(id: &str, param: &str, values: &str, out: &Path) -> Result<bool, UsageError> {
    let mut probe = Overrides::default();
    let parsed: Vec<f64> = values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| UsageError::new("usage", format!("bad value `{v}` in --values: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if parsed.is_empty() {
        return Err(UsageError::new("usage", "--values is empty"));
    }
    probe.set(param, parsed[0])?;
    let mut runs = Vec::with_capacity(parsed.len());
    let mut all_pass = true;
    for value in parsed {
        let mut overrides = Overrides::default();
        overrides.set(param, value)?;
        let entry = match build_scenario(id, &overrides) {
            Ok(scenario) => {
                let result = run_scenario(&scenario);
                summarize(&result.report);
                all_pass &= result.report.pass;
                json!({ "value": value, "report": result.report })
            }
            Err(e @ Error::UnknownScenario(_)) => return Err(e.into()),
            Err(e) => {
                all_pass = false;
                json!({ "value": value, "error": e.to_string() })
            }
        };
        runs.push(entry);
    }
    let doc: Value = json!({ "scenario": id, "param": param, "runs": runs });
    let mut text = serde_json::to_string_pretty(&doc).expect("sweep serializes");
    text.push('\n');
    write_atomic(out, &text)?;
    Ok(all_pass)
}

fn summarize(report: &VerificationReport) {
    for c in &report.checks {
        println!(
            "{}\t{}\t{:e}\t{:e}\t{}",
            report.scenario,
            c.name,
            c.value,
            c.tol,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
}

/// Writes through a temporary file in the target directory and renames it into place.
fn write_atomic(path: &Path, text: &str) -> Result<(), UsageError> {
    let io = |e: std::io::Error| UsageError::new("io", format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
