use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lagrangian_walls::report::{
    emit_chain_dot, emit_json, emit_text, emit_tsv, ReportBundle, Section,
};
use lagrangian_walls::verify::{pin_ids, run_verify, VerifyReport};
use lagrangian_walls::{Divisibility, Error, GenusContext};

/// Walls, strata and fixed loci for Lagrangian-fibered moduli spaces on a
/// Picard rank one K3 surface.
#[derive(Parser)]
#[command(name = "lagwalls", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical classes, invariant lattice and contraction relation.
    Classes(CaseArgs),
    /// Walls of the movable cone, ordered by slope.
    Walls(CaseArgs),
    /// Brill-Noether strata of the exceptional divisor.
    Strata(CaseArgs),
    /// Degree ledger of the first flop (divisibility 2 only).
    Ledger(CaseArgs),
    /// Fixed components of the involution and their linearization signs.
    Fixed(CaseArgs),
    /// Chain of birational models.
    Chain(CaseArgs),
    /// Run the invariant suite over every admissible genus up to a bound.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Tsv,
    Dot,
}

#[derive(Args)]
struct CaseArgs {
    #[arg(long)]
    genus: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
    div: u32,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 64)]
    max_genus: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Perturb one pinned value (self-test of the suite).
    #[arg(long, hide = true)]
    mutate: Option<String>,
    /// Print the pinned value ids and exit.
    #[arg(long, hide = true)]
    list_pins: bool,
}

enum Failure {
    Usage(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InadmissibleGenus { .. }
            | Error::WrongCase { .. }
            | Error::OutOfRange { .. } => Failure::Usage(e.to_string()),
            Error::Domain(_) => Failure::Invariant(e.to_string()),
        }
    }
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    let res = match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| Failure::Invariant(format!("write failed: {e}")))
}

fn run_section(section: Section, args: &CaseArgs) -> Result<(), Failure> {
    let case = Divisibility::from_value(args.div).expect("clap restricts --div");
    let ctx = GenusContext::new(args.genus, case)?;
    if args.format == FormatArg::Dot && section != Section::Chain {
        return Err(Failure::Usage(
            "--format dot is only valid for `chain`".into(),
        ));
    }
    let bundle = ReportBundle::build(&ctx, &[section])?;
    let text = match args.format {
        FormatArg::Text => emit_text(&bundle),
        FormatArg::Json => emit_json(&bundle),
        FormatArg::Tsv => {
            for d in &bundle.diagnostics {
                eprintln!("note: {d}");
            }
            emit_tsv(&bundle)
        }
        FormatArg::Dot => emit_chain_dot(bundle.chain.as_ref().expect("chain section built")),
    };
    write_output(args.out.as_ref(), &text)
}

fn verify_text(max_genus: u64, r: &VerifyReport) -> String {
    let mut out = format!(
        "verify up to g={max_genus}: {} contexts, {} checks, {} pinned values\n",
        r.contexts_checked, r.checks_run, r.pins_checked
    );
    for f in &r.failures {
        out.push_str(&format!("FAIL {f}\n"));
    }
    out.push_str(if r.passed() { "ok\n" } else { "FAILED\n" });
    out
}

fn run_verify_cmd(args: &VerifyArgs) -> Result<(), Failure> {
    if args.list_pins {
        let ids: Vec<_> = pin_ids().into_iter().map(|s| format!("{s}\n")).collect();
        return write_output(args.out.as_ref(), &ids.concat());
    }
    if args.max_genus < 2 {
        return Err(Failure::Usage("--max-genus must be at least 2".into()));
    }
    let report = run_verify(args.max_genus, args.mutate.as_deref())?;
    let text = match args.format {
        FormatArg::Text => verify_text(args.max_genus, &report),
        FormatArg::Json => {
            let v = json!({
                "max_genus": args.max_genus,
                "contexts_checked": report.contexts_checked,
                "checks_run": report.checks_run,
                "pins_checked": report.pins_checked,
                "failures": report.failures,
                "passed": report.passed(),
            });
            format!(
                "{}\n",
                serde_json::to_string_pretty(&v).expect("serializable")
            )
        }
        FormatArg::Tsv | FormatArg::Dot => {
            return Err(Failure::Usage(
                "verify supports --format text or json".into(),
            ))
        }
    };
    write_output(args.out.as_ref(), &text)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Invariant(format!(
            "{} invariant failure(s)",
            report.failures.len()
        )))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    let result = match &cli.command {
        Command::Classes(a) => run_section(Section::Classes, a),
        Command::Walls(a) => run_section(Section::Walls, a),
        Command::Strata(a) => run_section(Section::Strata, a),
        Command::Ledger(a) => run_section(Section::Ledger, a),
        Command::Fixed(a) => run_section(Section::Fixed, a),
        Command::Chain(a) => run_section(Section::Chain, a),
        Command::Verify(a) => run_verify_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
