//! `supext`: command-line front end.
//!
//! Exit status: 0 when every check passes, 1 for a mathematical failure
//! (the report carries witnesses), 2 for usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use supext_core::embed::{regular_from_usco, usco_from_regular};
use supext_core::functionals::{axiom_check_term, AxiomConfig, AxiomOutcome, ExtensionChoice, PointFunction};
use supext_core::inclusion::enumerate_ih;
use supext_core::io;
use supext_core::rational::{parse_list, to_text};
use supext_core::subbase::{BinaryVerdict, NormalVerdict};
use supext_core::superext::{count_mls, enumerate_mls};
use supext_core::verify::{run_verify_suite, RunConfig, Suite};
use supext_core::{Error, GroundSet};

#[derive(Parser)]
#[command(
    name = "supext",
    version,
    about = "Maximal linked systems, functionals and regular operators on finite spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the maximal linked systems of an n-point set.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// List the inclusion hyperspaces of an n-point set.
    Ghyper {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a term on a function given as comma-separated rationals.
    Eval {
        #[arg(long)]
        term: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// Check monotonicity, homogeneity and weak additivity of a term.
    Axioms {
        #[arg(long)]
        term: PathBuf,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ground size; defaults to the smallest the term accepts.
        #[arg(long)]
        n: Option<usize>,
        /// Check `u(1) = 1` in place of homogeneity.
        #[arg(long)]
        normalized: bool,
    },
    /// Admissible values for extending a generated subspace by one function.
    Extend {
        #[arg(long)]
        generators: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, value_enum, default_value_t = Choice::Midpoint)]
        choice: Choice,
    },
    /// Check a closed subbase for binarity or normality.
    Subbase {
        #[arg(long, value_enum)]
        check: SubbaseCheck,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Validate a regular operator.
    Regular {
        #[arg(long)]
        validate: PathBuf,
    },
    /// Build the usco map of a regular operator.
    Usco {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Operator to usco map and back, validating the result.
    Roundtrip { operator: PathBuf },
    /// Run a named verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Term file for the axioms suite.
        #[arg(long)]
        term: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Choice {
    Lower,
    Midpoint,
    Upper,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubbaseCheck {
    Binary,
    Normal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    CsvSummary,
}

/// Why a command did not succeed.
enum Failure {
    /// The output was produced; some check failed.
    Math,
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Reads and parses an input file, prefixing errors with its path.
fn load<T>(path: &Path, parse: impl Fn(&str) -> supext_core::Result<T>) -> Result<T, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(value: &Value, out: Option<&Path>) -> Outcome {
    emit(&io::to_pretty(value), out)
}

fn check(holds: bool) -> Outcome {
    if holds {
        Ok(())
    } else {
        Err(Failure::Math)
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| Failure::Input(e.to_string()))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Enumerate { n, count_only, out, workers } => {
            let ground = GroundSet::new(n)?;
            let json = pool(workers)?.install(|| -> supext_core::Result<Value> {
                if count_only {
                    Ok(json!({ "n": n, "count": count_mls(ground)? }))
                } else {
                    Ok(serde_json::to_value(io::lambda_to_json(&enumerate_mls(ground)?)).expect("serializable"))
                }
            })?;
            emit_json(&json, out.as_deref())
        }
        Command::Ghyper { n, count_only, out } => {
            let ground = GroundSet::new(n)?;
            let all = enumerate_ih(ground)?;
            let json = if count_only {
                json!({ "n": n, "count": all.len() })
            } else {
                serde_json::to_value(io::ih_to_json(ground, &all)).expect("serializable")
            };
            emit_json(&json, out.as_deref())
        }
        Command::Eval { term, f } => {
            let term = load(&term, io::term_from_str)?;
            let f = PointFunction::from_values(parse_list(&f)?)?;
            let value = term.evaluate(&f)?;
            emit_json(&json!({ "n": f.ground().len(), "value": to_text(&value) }), None)
        }
        Command::Axioms { term, trials, seed, n, normalized } => {
            let term = load(&term, io::term_from_str)?;
            let n = match n {
                Some(n) => n,
                None => term.min_ground()?,
            };
            let ground = GroundSet::new(n)?;
            let config = AxiomConfig { trials, seed, normalized };
            let outcome = axiom_check_term(&term, ground, &config)?;
            let counterexample = match &outcome {
                AxiomOutcome::Pass { .. } => Value::Null,
                AxiomOutcome::Counterexample(cx) => json!({
                    "trial": cx.trial,
                    "axiom": cx.axiom.name(),
                    "f": cx.f.iter().map(to_text).collect::<Vec<_>>(),
                    "g": cx.g.as_ref().map(|g| g.iter().map(to_text).collect::<Vec<_>>()),
                    "scalar": cx.scalar.as_ref().map(to_text),
                    "expected": cx.expected.as_ref().map(to_text),
                    "actual": cx.actual.as_ref().map(to_text),
                }),
            };
            emit_json(
                &json!({
                    "n": n,
                    "trials": trials,
                    "seed": seed,
                    "normalized": normalized,
                    "pass": outcome.is_pass(),
                    "counterexample": counterexample,
                }),
                None,
            )?;
            check(outcome.is_pass())
        }
        Command::Extend { generators, phi, choice } => {
            let space = match io::generators_from_str(&read(&generators)?) {
                Ok(space) => space,
                Err(e @ Error::Inconsistent(_)) => {
                    emit_json(&json!({ "consistent": false, "reason": e.to_string() }), None)?;
                    return Err(Failure::Math);
                }
                Err(e) => return Err(Failure::Input(format!("{}: {e}", generators.display()))),
            };
            let phi0 = PointFunction::new(space.ground(), parse_list(&phi)?)?;
            let choice = match choice {
                Choice::Lower => ExtensionChoice::Lower,
                Choice::Midpoint => ExtensionChoice::Midpoint,
                Choice::Upper => ExtensionChoice::Upper,
            };
            match space.extend_one(&phi0) {
                Ok(interval) => emit_json(
                    &json!({
                        "consistent": true,
                        "lower": to_text(&interval.lower),
                        "upper": to_text(&interval.upper),
                        "p": to_text(&interval.choose(choice)),
                    }),
                    None,
                ),
                Err(e @ Error::Inconsistent(_)) => {
                    emit_json(&json!({ "consistent": false, "reason": e.to_string() }), None)?;
                    Err(Failure::Math)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Subbase { check: which, input } => {
            let sb = load(&input, io::subbase_from_str)?;
            let (name, holds, witness) = match which {
                SubbaseCheck::Binary => match sb.is_binary()? {
                    BinaryVerdict::Binary => ("binary", true, Value::Null),
                    BinaryVerdict::NotBinary { witness } => ("binary", false, json!({ "linked_members": witness })),
                },
                SubbaseCheck::Normal => match sb.is_normal()? {
                    NormalVerdict::Normal => ("normal", true, Value::Null),
                    NormalVerdict::NotNormal { first, second } => {
                        ("normal", false, json!({ "disjoint_members": [first, second] }))
                    }
                },
            };
            emit_json(&json!({ "check": name, "holds": holds, "witness": witness }), None)?;
            check(holds)
        }
        Command::Regular { validate } => {
            let e = load(&validate, io::operator_from_str)?;
            let verdict = e.validate();
            emit_json(
                &json!({
                    "valid": verdict.is_ok(),
                    "violation": verdict.as_ref().err().map(|v| v.to_string()),
                }),
                None,
            )?;
            check(verdict.is_ok())
        }
        Command::Usco { from, out } => {
            let e = load(&from, io::operator_from_str)?;
            if let Err(v) = e.validate() {
                emit_json(&json!({ "valid": false, "violation": v.to_string() }), None)?;
                return Err(Failure::Math);
            }
            let r = usco_from_regular(&e)?;
            emit(&io::to_pretty(&io::usco_to_json(&r)), out.as_deref())?;
            check(r.check().is_ok())
        }
        Command::Roundtrip { operator } => {
            let e = load(&operator, io::operator_from_str)?;
            if let Err(v) = e.validate() {
                emit_json(&json!({ "valid": false, "violation": v.to_string() }), None)?;
                return Err(Failure::Math);
            }
            let r = usco_from_regular(&e)?;
            let usco_ok = r.check();
            let back = usco_ok.clone().and_then(|()| regular_from_usco(&r));
            let verdict = back.as_ref().map(|b| b.validate());
            let valid = matches!(verdict, Ok(Ok(())));
            emit_json(
                &json!({
                    "usco": io::usco_to_json(&r),
                    "usco_conditions": usco_ok.err().map(|e| e.to_string()),
                    "operator": back.as_ref().ok().map(io::operator_to_json),
                    "valid": valid,
                    "violation": match &verdict {
                        Ok(Err(v)) => Some(v.to_string()),
                        Err(e) => Some(e.to_string()),
                        Ok(Ok(())) => None,
                    },
                }),
                None,
            )?;
            check(valid)
        }
        Command::Verify { suite, n, seed, trials, workers, term, format, out } => {
            let suite: Suite = suite.parse()?;
            let term = term.map(|path| load(&path, io::term_from_str)).transpose()?;
            let config = RunConfig { suite, n, seed, trials, workers, term };
            let report = run_verify_suite(&config)?;
            let text = match format {
                Format::Json => report.to_json(),
                Format::CsvSummary => report.to_csv_summary(),
            };
            emit(&text, out.as_deref())?;
            check(report.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
