//! The `onto-dp` command line.
//!
//! Exit codes: 0 ok, 1 mismatch verdict, 2 parse or input error, 3 budget
//! exceeded, 4 database not saturated, 5 invalid epsilon, 6 degenerate game.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::adversary::{run_game, GameConfig, GameReport};
use crate::error::Error;
use crate::format::{parse_graph, parse_query, parse_rules, parse_schema, write_graph};
use crate::kg::{Graph, Schema};
use crate::mechanism::{release, ReleaseSpec, ALGORITHM_ID};
use crate::rules::{saturate, RuleSet, DEFAULT_ANTECEDENT_CAP};
use crate::sensitivity::{
    classical_sensitivity, onto_sensitivity, perceived_sensitivity, CountQuery, SensitivityReport,
};
use crate::spaces::{check_well_suited, Semantics, SpaceConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_UNSATURATED: i32 = 4;
pub const EXIT_EPSILON: i32 = 5;
pub const EXIT_DEGENERATE: i32 = 6;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::FixpointBudgetExceeded { .. } | Error::AntecedentBudgetExceeded { .. } => EXIT_BUDGET,
        Error::NotSaturated => EXIT_UNSATURATED,
        Error::InvalidEpsilon(_) => EXIT_EPSILON,
        Error::DegenerateGame(_) => EXIT_DEGENERATE,
        _ => EXIT_PARSE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "onto-dp", version, about = "Ontology-aware differential privacy for knowledge graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Print witnesses and flags.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SensitivityArg {
    Classical,
    Onto,
    Perceived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SemanticsArg {
    Classical,
    Onto,
}

impl From<SemanticsArg> for Semantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Classical => Semantics::Classical,
            SemanticsArg::Onto => Semantics::Onto,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the saturation of a graph in canonical order.
    Saturate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        rules: PathBuf,
    },
    /// Compute the sensitivity of a count query at a database.
    Sensitivity {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_enum, default_value_t = SensitivityArg::Classical)]
        semantics: SensitivityArg,
    },
    /// Release a Laplace-noised query answer.
    Release {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_enum, default_value_t = SemanticsArg::Classical)]
        semantics: SemanticsArg,
        #[arg(long, allow_negative_numbers = true)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include the exact answer in the record.
        #[arg(long)]
        show_true_answer: bool,
    },
    /// Compare a defense space with the union of attack spaces.
    CheckWellSuited {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_enum, default_value_t = SemanticsArg::Onto)]
        semantics: SemanticsArg,
    },
    /// Play the identification game under both semantics.
    AttackDemo {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        prior: PathBuf,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Write one CSV row per trial to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SpaceArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    rules: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ANTECEDENT_CAP)]
    antecedent_cap: usize,
    /// Do not restrict the space to valid saturated databases.
    #[arg(long)]
    unrestricted: bool,
}

/// A command-line failure: an exit code and a message for stderr.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: e.to_string(),
        }
    }
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> Result<T, Error>) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("{}: {e}", path.display()),
    })?;
    parse(&text).map_err(|e| Failure {
        code: exit_code(&e),
        message: format!("{}: {e}", path.display()),
    })
}

struct Space {
    data: Graph,
    cfg: SpaceConfig,
    cap: usize,
}

impl SpaceArgs {
    fn load(&self) -> Result<Space, Failure> {
        let data = load(&self.data, parse_graph)?;
        let rules: RuleSet = load(&self.rules, parse_rules)?;
        let schema: Schema = load(&self.schema, parse_schema)?;
        let mut cfg = SpaceConfig::new(schema, rules);
        cfg.restrict_to_valid = !self.unrestricted;
        Ok(Space {
            data,
            cfg,
            cap: self.antecedent_cap,
        })
    }
}

struct Output<'a> {
    out: &'a mut dyn Write,
    format: Format,
    verbose: bool,
}

impl Output<'_> {
    fn line(&mut self, key: &str, value: impl Display) -> std::io::Result<()> {
        writeln!(self.out, "{key}: {value}")
    }

    fn graph(&mut self, label: &str, g: &Graph) -> std::io::Result<()> {
        writeln!(self.out, "{label}:")?;
        for line in write_graph(g).lines() {
            writeln!(self.out, "  {line}")?;
        }
        Ok(())
    }

    fn json(&mut self, value: &impl Serialize) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *self.out, value).map_err(std::io::Error::other)?;
        writeln!(self.out)
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut output = Output {
        out,
        format: cli.format,
        verbose: cli.verbose,
    };
    match execute(cli.command, &mut output) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command, o: &mut Output<'_>) -> Result<i32, Failure> {
    match command {
        Command::Saturate { data, rules } => {
            let data = load(&data, parse_graph)?;
            let rules = load(&rules, parse_rules)?;
            let saturated = saturate(&data, &rules)?;
            match o.format {
                Format::Text => write!(o.out, "{}", write_graph(&saturated))?,
                Format::Json => o.json(&json!({ "triples": saturated }))?,
            }
            Ok(EXIT_OK)
        }
        Command::Sensitivity {
            space,
            query,
            semantics,
        } => {
            let s = space.load()?;
            let query = load(&query, parse_query)?;
            let report = sensitivity(&query, &s, semantics)?;
            print_sensitivity(o, &report)?;
            Ok(EXIT_OK)
        }
        Command::Release {
            space,
            query,
            semantics,
            epsilon,
            seed,
            show_true_answer,
        } => {
            let s = space.load()?;
            let query = load(&query, parse_query)?;
            if !(epsilon > 0.0 && epsilon.is_finite()) {
                return Err(Error::InvalidEpsilon(epsilon).into());
            }
            let arg = match semantics {
                SemanticsArg::Classical => SensitivityArg::Classical,
                SemanticsArg::Onto => SensitivityArg::Onto,
            };
            let sens = sensitivity(&query, &s, arg)?;
            let spec = ReleaseSpec::new(epsilon, sens.value, seed)?;
            let released = release(&query, &s.data, &spec)?;
            let warnings: Vec<String> = released.warnings.iter().map(|w| w.to_string()).collect();
            match o.format {
                Format::Text => {
                    o.line("noisy_value", released.noisy_value)?;
                    o.line("epsilon", epsilon)?;
                    o.line("sensitivity", sens.value)?;
                    o.line("sensitivity_semantics", Semantics::from(semantics))?;
                    o.line("seed", seed)?;
                    o.line("algorithm", ALGORITHM_ID)?;
                    o.line("warnings", warnings.join(","))?;
                    if show_true_answer {
                        o.line("true_answer", released.true_answer)?;
                    }
                }
                Format::Json => {
                    let mut record = json!({
                        "noisy_value": released.noisy_value,
                        "epsilon": epsilon,
                        "sensitivity": sens.value,
                        "sensitivity_semantics": Semantics::from(semantics),
                        "seed": seed,
                        "algorithm": ALGORITHM_ID,
                        "warnings": warnings,
                    });
                    if show_true_answer {
                        record["true_answer"] = json!(released.true_answer);
                    }
                    o.json(&record)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::CheckWellSuited { space, semantics } => {
            let s = space.load()?;
            let report = check_well_suited(&s.data, &s.cfg, semantics.into(), s.cap)?;
            match o.format {
                Format::Text => {
                    writeln!(o.out, "{}", if report.equal { "WELL_SUITED" } else { "MISMATCH" })?;
                    o.line("semantics", report.semantics)?;
                    o.line("defense_size", report.defense_size)?;
                    o.line("attack_union_size", report.attack_union_size)?;
                    for (i, g) in report.leakage_witnesses.iter().enumerate() {
                        o.graph(&format!("leakage_witness[{i}]"), g)?;
                    }
                    for (i, g) in report.over_protection_witnesses.iter().enumerate() {
                        o.graph(&format!("over_protection_witness[{i}]"), g)?;
                    }
                }
                Format::Json => o.json(&report)?,
            }
            Ok(if report.equal { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::AttackDemo {
            space,
            query,
            prior,
            epsilon,
            seed,
            trials,
            csv,
        } => {
            let s = space.load()?;
            let query = load(&query, parse_query)?;
            let prior = load(&prior, parse_graph)?;
            if !(epsilon > 0.0 && epsilon.is_finite()) {
                return Err(Error::InvalidEpsilon(epsilon).into());
            }
            let game = |semantics| GameConfig {
                true_db: s.data.clone(),
                prior: prior.clone(),
                space: s.cfg.clone(),
                query: query.clone(),
                epsilon,
                semantics,
                trials,
                seed,
                antecedent_cap: s.cap,
            };
            let classical = run_game(&game(Semantics::Classical))?;
            let onto = run_game(&game(Semantics::Onto))?;
            if let Some(path) = csv {
                let mut file = fs::File::create(&path)?;
                classical.write_csv(&mut file, true)?;
                onto.write_csv(&mut file, false)?;
            }
            print_games(o, &classical, &onto)?;
            Ok(EXIT_OK)
        }
    }
}

fn sensitivity(query: &CountQuery, s: &Space, kind: SensitivityArg) -> Result<SensitivityReport, Error> {
    match kind {
        SensitivityArg::Classical => classical_sensitivity(query, &s.data, &s.cfg),
        SensitivityArg::Onto => onto_sensitivity(query, &s.data, &s.cfg, s.cap),
        SensitivityArg::Perceived => perceived_sensitivity(query, &s.data, &s.cfg, s.cap),
    }
}

fn print_sensitivity(o: &mut Output<'_>, report: &SensitivityReport) -> std::io::Result<()> {
    match o.format {
        Format::Json if o.verbose => o.json(report),
        Format::Json => o.json(&json!({ "kind": report.kind, "value": report.value })),
        Format::Text => {
            o.line("semantics", report.kind)?;
            o.line("sensitivity", report.value)?;
            if o.verbose {
                if report.empty_neighborhood {
                    o.line("flag", "EMPTY_NEIGHBORHOOD")?;
                }
                if let Some((low, high)) = &report.witness {
                    o.graph("witness_a", low)?;
                    o.graph("witness_b", high)?;
                }
            }
            Ok(())
        }
    }
}

fn print_games(o: &mut Output<'_>, classical: &GameReport, onto: &GameReport) -> std::io::Result<()> {
    let bound = onto.epsilon.exp() / (1.0 + onto.epsilon.exp());
    match o.format {
        Format::Json => o.json(&json!({
            "classical": classical,
            "onto": onto,
            "two_candidate_bound": bound,
        })),
        Format::Text => {
            let answers: Vec<String> = classical.candidate_answers.iter().map(u64::to_string).collect();
            o.line("candidates", classical.candidate_answers.len())?;
            o.line("candidate_answers", answers.join(","))?;
            o.line("trials", classical.trials)?;
            o.line("epsilon", classical.epsilon)?;
            o.line("classical_sensitivity", classical.classical_sensitivity)?;
            o.line("perceived_sensitivity", classical.perceived_sensitivity)?;
            o.line("baseline", classical.baseline)?;
            o.line("two_candidate_bound", bound)?;
            for r in [classical, onto] {
                o.line(&format!("{}.sensitivity", r.semantics), r.sensitivity)?;
                o.line(&format!("{}.success_rate", r.semantics), r.success_rate)?;
            }
            Ok(())
        }
    }
}
