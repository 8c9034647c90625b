//! Command-line front end.
//!
//! Forward mode reads a restricted-English contract file, translates it to
//! CL, runs the conflict analysis, and writes `Result_Cl.txt` (the CL
//! translation plus the verdict) and, when a conflict is found,
//! `Result_Eng.txt` (the counter-example rendered in restricted English).
//! Reverse mode (`-cl`) reads CL formulae, one per line, and renders them
//! in restricted English.
//!
//! Exit codes: 0 no conflict, 1 conflict found, 2 contract not analyzable,
//! 3 inconclusive within the exploration bounds, 4 I/O or parse failure.

use anacon::contract::{parse_contract_file, validate};
use anacon::engine::{
    build_and_check, report_to_english, EngineError, ExploreConfig, Outcome,
};
use anacon::english::linearize_re;
use anacon::syntax::{parse_cl, print_cl};
use anacon::xml::contract_to_xml;
use clap::Parser;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "anacon",
    about = "Conflict analysis for contracts in restricted English",
    disable_help_flag = false
)]
struct Cli {
    /// Contract file in restricted English (or CL formulae with -cl).
    input: PathBuf,

    /// Reverse mode: read CL formulae, one per line, and render each in
    /// restricted English.
    #[arg(long = "cl")]
    cl: bool,

    /// Also export the contract clauses to contract.xml.
    #[arg(long)]
    xml: bool,

    /// Abort the exploration after this many states.
    #[arg(long, default_value_t = 100_000)]
    max_states: usize,

    /// Abort the exploration beyond this many steps from the start.
    #[arg(long, default_value_t = 10)]
    max_depth: usize,

    /// Directory for the result files (default: alongside the input).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report each processing phase on stderr.
    #[arg(short, long)]
    verbose: bool,
}

const EXIT_NO_CONFLICT: u8 = 0;
const EXIT_CONFLICT: u8 = 1;
const EXIT_NOT_ANALYZABLE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_IO_OR_PARSE: u8 = 4;

fn main() -> ExitCode {
    // Accept the historical single-dash spelling of the reverse flag.
    let args = std::env::args().map(|a| if a == "-cl" { "--cl".into() } else { a });
    let cli = Cli::parse_from(args);
    ExitCode::from(run(&cli))
}

fn run(cli: &Cli) -> u8 {
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cli.input.parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    let text = match std::fs::read_to_string(&cli.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.input.display());
            return EXIT_IO_OR_PARSE;
        }
    };
    if cli.cl {
        reverse(cli, &out_dir, &text)
    } else {
        forward(cli, &out_dir, &text)
    }
}

fn phase(cli: &Cli, name: &str) {
    if cli.verbose {
        eprintln!("anacon: {name}");
    }
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<(), u8> {
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        EXIT_IO_OR_PARSE
    })
}

fn forward(cli: &Cli, out_dir: &Path, text: &str) -> u8 {
    phase(cli, "parsing the contract file");
    let doc = match parse_contract_file(text) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_IO_OR_PARSE;
        }
    };

    phase(cli, "validating clauses against the dictionary");
    let diagnostics = validate(&doc);
    if !diagnostics.is_empty() {
        for d in &diagnostics {
            eprintln!("{d}");
        }
        return EXIT_NOT_ANALYZABLE;
    }

    phase(cli, "translating the contract to CL");
    let mut cl_out = String::from("% contract in CL\n");
    for clause in &doc.clauses {
        cl_out.push_str(&print_cl(clause));
        cl_out.push('\n');
    }

    if cli.xml {
        phase(cli, "exporting the contract to XML");
        if let Err(code) = write_file(out_dir, "contract.xml", &contract_to_xml(&doc.clauses)) {
            return code;
        }
    }

    phase(cli, "building and checking the automaton");
    let cfg = ExploreConfig {
        max_states: cli.max_states,
        max_depth: cli.max_depth,
        record_automaton: false,
    };
    let exploration = match build_and_check(&doc, &cfg) {
        Ok(e) => e,
        Err(e @ (EngineError::UnsupportedStarGuard | EngineError::NegationUnsupported)) => {
            eprintln!("error: {e}");
            return EXIT_NOT_ANALYZABLE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_IO_OR_PARSE;
        }
    };
    if cli.verbose {
        eprintln!("anacon: explored {} states", exploration.states_visited);
    }

    match exploration.outcome {
        Outcome::NoConflict => {
            cl_out.push_str("% verdict NO CONFLICT\n");
            if let Err(code) = write_file(out_dir, "Result_Cl.txt", &cl_out) {
                return code;
            }
            println!("NO CONFLICT");
            EXIT_NO_CONFLICT
        }
        Outcome::Conflict(report) => {
            cl_out.push_str("% verdict CONFLICT\n");
            cl_out.push_str(&format!("% conflict {}\n", report.kind));
            cl_out.push_str(&print_cl(&report.as_formula));
            cl_out.push('\n');
            if let Err(code) = write_file(out_dir, "Result_Cl.txt", &cl_out) {
                return code;
            }
            let english = match report_to_english(&report, &doc.clause_spans) {
                Ok(text) => text,
                Err(e) => {
                    eprintln!("error: cannot render the conflict in English: {e}");
                    return EXIT_IO_OR_PARSE;
                }
            };
            if let Err(code) = write_file(out_dir, "Result_Eng.txt", &english) {
                return code;
            }
            print!("CONFLICT\n{english}");
            EXIT_CONFLICT
        }
        Outcome::Exceeded(bound) => {
            cl_out.push_str(&format!("% verdict INCONCLUSIVE ({bound} reached)\n"));
            if let Err(code) = write_file(out_dir, "Result_Cl.txt", &cl_out) {
                return code;
            }
            eprintln!("inconclusive: {bound} reached");
            EXIT_INCONCLUSIVE
        }
    }
}

fn reverse(cli: &Cli, out_dir: &Path, text: &str) -> u8 {
    phase(cli, "translating CL to restricted English");
    let mut lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let clause = match parse_cl(trimmed) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: line {}: {e}", i + 1);
                return EXIT_IO_OR_PARSE;
            }
        };
        match linearize_re(&clause) {
            Ok(english) => lines.push(english),
            Err(e) => {
                eprintln!("error: line {}: {e}", i + 1);
                return EXIT_NOT_ANALYZABLE;
            }
        }
    }
    if lines.is_empty() {
        eprintln!("error: {}: no CL clauses found", cli.input.display());
        return EXIT_IO_OR_PARSE;
    }
    let mut out = lines.join("\n");
    out.push('\n');
    if let Err(code) = write_file(out_dir, "Result_Eng.txt", &out) {
        return code;
    }
    print!("{out}");
    EXIT_NO_CONFLICT
}
