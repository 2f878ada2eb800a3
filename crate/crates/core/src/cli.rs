//! Command-line front end.
//!
//! Exit codes: 0 success or property holds, 1 invalid input or I/O failure,
//! 2 counterexample found, 3 enumeration budget exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::dimacs::emit_dimacs;
use crate::error::OracleError;
use crate::normal_form::{
    bound_check, built_leaf_bound, complete_leaf_bound, tree_to_cnf, tree_to_dnf, BoundReport,
};
use crate::oracle::{check_equivalence, check_implication, Budget, DEFAULT_BUDGET};
use crate::policy::{parse_policy, validate_policy, Action, FieldConfig, Policy};
use crate::tree::compile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_COUNTEREXAMPLE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Environment variable overriding the enumeration budget.
pub const BUDGET_ENV: &str = "FWBOOL_BUDGET";

#[derive(Debug, Parser)]
#[command(
    name = "fwbool",
    version,
    about = "Firewall rule lists to decision trees and Boolean normal forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a policy file against a field configuration.
    Validate {
        #[arg(long)]
        policy: PathBuf,
        /// Comma-separated field widths in bits, e.g. 4,4,4.
        #[arg(long)]
        fields: String,
    },
    /// Compile a policy into one of its derived representations.
    Compile {
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        fields: String,
        #[arg(long, value_enum)]
        emit: Emit,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide equivalence or implication between two policies.
    Check {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        fields: String,
        #[arg(long, value_enum, default_value = "equiv")]
        mode: Mode,
    },
    /// Report tree and expression sizes against their ceilings.
    Stats {
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        fields: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Tree,
    Whitelist,
    Blacklist,
    Dnf,
    Cnf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Equiv,
    Implies,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the CLI on `args` (program name first), writing reports to `out`
/// and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_INVALID;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let budget = match budget_from_env() {
        Ok(b) => b,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            return f.code;
        }
    };
    let outcome = match cli.command {
        Command::Validate { policy, fields } => cmd_validate(&policy, &fields, out),
        Command::Compile {
            policy,
            fields,
            emit,
            out: path,
        } => cmd_compile(&policy, &fields, emit, path.as_deref(), out),
        Command::Check {
            left,
            right,
            fields,
            mode,
        } => cmd_check(&left, &right, &fields, mode, budget, out),
        Command::Stats { policy, fields } => cmd_stats(&policy, &fields, out),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn budget_from_env() -> Result<Budget, Failure> {
    match std::env::var(BUDGET_ENV) {
        Ok(raw) => raw
            .trim()
            .parse::<u128>()
            .map(Budget)
            .map_err(|_| Failure::invalid(format!("{BUDGET_ENV}: not a packet count: '{raw}'"))),
        Err(_) => Ok(Budget(DEFAULT_BUDGET)),
    }
}

fn load(path: &Path, config: &FieldConfig) -> Result<Policy, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    parse_policy(&text, config).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn fields(spec: &str) -> Result<FieldConfig, Failure> {
    FieldConfig::parse(spec).map_err(|e| Failure::invalid(format!("--fields: {e}")))
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::invalid(format!("write failed: {e}"))
}

fn cmd_validate(path: &Path, spec: &str, out: &mut dyn Write) -> Outcome {
    let config = fields(spec)?;
    let policy = load(path, &config)?;
    let report = validate_policy(&policy, &config);
    if report.is_empty() {
        writeln!(out, "OK: {} rules", policy.rules.len()).map_err(io_failure)?;
        Ok(EXIT_OK)
    } else {
        for v in &report {
            writeln!(out, "{v}").map_err(io_failure)?;
        }
        Ok(EXIT_INVALID)
    }
}

/// Renders the requested representation of a policy.
pub fn render(policy: &Policy, config: &FieldConfig, emit: Emit) -> Result<String, String> {
    let compiled = compile(policy, config).map_err(|e| e.to_string())?;
    let tree = &compiled.complete;
    Ok(match emit {
        Emit::Tree => tree.dump(),
        Emit::Whitelist => tree.normal_form_policy(Action::Accept).to_text(),
        Emit::Blacklist => tree.normal_form_policy(Action::Deny).to_text(),
        Emit::Dnf => emit_dimacs(&tree_to_dnf(tree)),
        Emit::Cnf => emit_dimacs(&tree_to_cnf(tree)),
    })
}

fn cmd_compile(
    path: &Path,
    spec: &str,
    emit: Emit,
    dest: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let config = fields(spec)?;
    let policy = load(path, &config)?;
    let text = render(&policy, &config, emit).map_err(Failure::invalid)?;
    match dest {
        Some(dest) => fs::write(dest, text)
            .map_err(|e| Failure::invalid(format!("{}: {e}", dest.display())))?,
        None => out.write_all(text.as_bytes()).map_err(io_failure)?,
    }
    Ok(EXIT_OK)
}

fn cmd_check(
    left: &Path,
    right: &Path,
    spec: &str,
    mode: Mode,
    budget: Budget,
    out: &mut dyn Write,
) -> Outcome {
    let config = fields(spec)?;
    let left = load(left, &config)?;
    let right = load(right, &config)?;
    let verdict = match mode {
        Mode::Equiv => check_equivalence(&left, &right, &config, budget),
        Mode::Implies => check_implication(&left, &right, &config, budget),
    }
    .map_err(|e: OracleError| Failure {
        code: EXIT_BUDGET,
        message: e.to_string(),
    })?;
    writeln!(out, "{verdict}").map_err(io_failure)?;
    Ok(if verdict.holds() {
        EXIT_OK
    } else {
        EXIT_COUNTEREXAMPLE
    })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Line-oriented size report for one policy.
pub fn stats_report(policy: &Policy, config: &FieldConfig) -> Result<String, String> {
    let compiled = compile(policy, config).map_err(|e| e.to_string())?;
    let n = policy.rules.len();
    let d = config.d();
    let built = compiled.built.stats();
    let grouped = compiled.grouped.stats();
    let complete = compiled.complete.stats();
    let dnf = bound_check(&tree_to_dnf(&compiled.complete), n, config);
    let cnf = bound_check(&tree_to_cnf(&compiled.complete), n, config);
    let built_bound = built_leaf_bound(n, d);
    let complete_bound = complete_leaf_bound(n, d);

    let mut r = String::new();
    let mut line = |s: String| {
        r.push_str(&s);
        r.push('\n');
    };
    line(format!("rules: {n}"));
    line(format!("fields: {d}"));
    line(format!("widths: {config}"));
    line(format!("leaves_built: {}", built.leaf_count));
    line(format!("leaves_grouped: {}", grouped.leaf_count));
    line(format!("leaves_complete: {}", complete.leaf_count));
    line(format!("nodes_complete: {}", complete.node_count));
    line(format!(
        "leaf_bound_built: {} <= {built_bound} {}",
        built.leaf_count,
        pass(built.leaf_count as u128 <= built_bound)
    ));
    line(format!(
        "leaf_bound_complete: {} <= {complete_bound} {}",
        complete.leaf_count,
        pass(complete.leaf_count as u128 <= complete_bound)
    ));
    for report in [&dnf, &cnf] {
        line(bound_lines(report));
    }
    Ok(r.trim_end().to_string() + "\n")
}

fn bound_lines(b: &BoundReport) -> String {
    let f = b.form;
    format!(
        "{f}_clauses: {}\n\
         {f}_clause_bound_nominal: {} <= {} {}\n\
         {f}_clause_bound_adjusted: {} <= {} {}\n\
         {f}_max_clause_literals: {} <= {} {}",
        b.clause_count,
        b.clause_count,
        b.nominal_bound,
        pass(b.nominal_pass()),
        b.clause_count,
        b.adjusted_bound,
        pass(b.adjusted_pass()),
        b.max_clause_len,
        b.literal_ceiling,
        pass(b.literal_pass()),
    )
}

fn cmd_stats(path: &Path, spec: &str, out: &mut dyn Write) -> Outcome {
    let config = fields(spec)?;
    let policy = load(path, &config)?;
    let report = stats_report(&policy, &config).map_err(Failure::invalid)?;
    out.write_all(report.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}
