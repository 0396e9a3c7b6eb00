use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use indcount::compile::{compile_source, Compilation, CompiledType, TypeSummary};
use indcount::selftest::{run_selftest, Fault, SelfTestOptions};
use indcount::{
    decode, encode, enumerate_upto_rank, parse_term, render_term, EnumBudget, Nat, PairingScheme, Registry,
};

const EXIT_DEFINITION: u8 = 1;
const EXIT_TERM: u8 = 2;
const EXIT_NOT_A_CODE: u8 = 3;

#[derive(Parser)]
#[command(name = "indcount", version, about = "Encode, decode and enumerate inductive datatypes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate every definition; print a summary per type.
    Check { file: PathBuf },
    /// Print the code of a term.
    Encode {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        term: String,
        #[arg(long, value_enum, default_value_t = Pairing::Compact)]
        pairing: Pairing,
    },
    /// Print the term with a given code, or NOT-A-CODE.
    Decode {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        code: Nat,
        #[arg(long, value_enum, default_value_t = Pairing::Compact)]
        pairing: Pairing,
    },
    /// Print every term below a rank bound, one per line.
    Enum {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        max_rank: usize,
        #[arg(long, default_value_t = 3)]
        base_budget: usize,
    },
    /// Check the encoding laws on every type of a file.
    Selftest {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_rank: usize,
        #[arg(long, default_value_t = 3)]
        base_budget: usize,
        #[arg(long, value_enum, default_value_t = PairingChoice::Both)]
        pairing: PairingChoice,
        /// Corrupt the encoder, to check that the suite notices.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Args)]
struct Target {
    file: PathBuf,
    #[arg(long = "type")]
    type_name: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pairing {
    Paper,
    Compact,
}

impl From<Pairing> for PairingScheme {
    fn from(p: Pairing) -> Self {
        match p {
            Pairing::Paper => PairingScheme::Paper,
            Pairing::Compact => PairingScheme::Compact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingChoice {
    Paper,
    Compact,
    Both,
}

impl PairingChoice {
    fn schemes(self) -> Vec<PairingScheme> {
        match self {
            PairingChoice::Paper => vec![PairingScheme::Paper],
            PairingChoice::Compact => vec![PairingScheme::Compact],
            PairingChoice::Both => PairingScheme::ALL.to_vec(),
        }
    }
}

/// Either a compiled program or the exit code of its failure, already reported.
fn compile_file(path: &Path, scheme: PairingScheme) -> Result<Result<Compilation, ExitCode>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(compile_source(&text, Registry::builtin(), scheme).map_err(|e| {
        eprintln!("{}: syntax error: {e}", path.display());
        ExitCode::from(EXIT_DEFINITION)
    }))
}

fn report_errors(path: &Path, comp: &Compilation) {
    for (name, err) in comp.errors() {
        for line in err.to_string().lines() {
            eprintln!("{}: {name}: {line}", path.display());
        }
    }
}

fn lookup<'c>(target: &Target, comp: &'c Compilation) -> Result<&'c CompiledType, ExitCode> {
    match comp.get(&target.type_name) {
        Some(Ok(t)) => Ok(t),
        Some(Err(e)) => {
            eprintln!("{}: {}: {e}", target.file.display(), target.type_name);
            Err(ExitCode::from(EXIT_DEFINITION))
        }
        None => {
            eprintln!("{}: no type named {}", target.file.display(), target.type_name);
            Err(ExitCode::from(EXIT_DEFINITION))
        }
    }
}

fn with_type(target: &Target, scheme: PairingScheme, body: impl FnOnce(&CompiledType) -> ExitCode) -> Result<ExitCode> {
    let comp = match compile_file(&target.file, scheme)? {
        Ok(c) => c,
        Err(code) => return Ok(code),
    };
    Ok(match lookup(target, &comp) {
        Ok(t) => body(t),
        Err(code) => code,
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check { file } => {
            let comp = match compile_file(&file, PairingScheme::Compact)? {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            for (_, outcome) in &comp.outcomes {
                if let Ok(t) = outcome {
                    println!("{}", TypeSummary(t));
                }
            }
            report_errors(&file, &comp);
            Ok(if comp.is_ok() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_DEFINITION) })
        }
        Command::Encode { target, term, pairing } => with_type(&target, pairing.into(), |t| {
            let cfg = &t.config;
            let result = parse_term(&term, cfg.constrs(), cfg.registry())
                .map_err(|e| e.to_string())
                .and_then(|parsed| encode(&parsed, cfg).map_err(|e| e.to_string()));
            match result {
                Ok(code) => {
                    println!("{code}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("term error: {e}");
                    ExitCode::from(EXIT_TERM)
                }
            }
        }),
        Command::Decode { target, code, pairing } => with_type(&target, pairing.into(), |t| {
            let cfg = &t.config;
            match decode(&code, cfg).map(|term| render_term(&term, cfg.constrs(), cfg.registry())) {
                Some(Ok(text)) => {
                    println!("{text}");
                    ExitCode::SUCCESS
                }
                Some(Err(e)) => {
                    eprintln!("term error: {e}");
                    ExitCode::from(EXIT_TERM)
                }
                None => {
                    println!("NOT-A-CODE");
                    ExitCode::from(EXIT_NOT_A_CODE)
                }
            }
        }),
        Command::Enum { target, max_rank, base_budget } => with_type(&target, PairingScheme::Compact, |t| {
            let cfg = &t.config;
            for term in enumerate_upto_rank(cfg.constrs(), cfg.registry(), EnumBudget::new(max_rank, base_budget)) {
                match render_term(&term, cfg.constrs(), cfg.registry()) {
                    Ok(text) => println!("{text}"),
                    Err(e) => {
                        eprintln!("term error: {e}");
                        return ExitCode::from(EXIT_TERM);
                    }
                }
            }
            ExitCode::SUCCESS
        }),
        Command::Selftest { file, max_rank, base_budget, pairing, inject_fault } => {
            let opts = SelfTestOptions {
                budget: EnumBudget::new(max_rank, base_budget),
                fault: inject_fault.then_some(Fault::TruncateCode),
                ..SelfTestOptions::default()
            };
            let mut ok = true;
            for scheme in pairing.schemes() {
                let comp = match compile_file(&file, scheme)? {
                    Ok(c) => c,
                    Err(code) => return Ok(code),
                };
                if !comp.is_ok() {
                    report_errors(&file, &comp);
                    return Ok(ExitCode::from(EXIT_DEFINITION));
                }
                for (_, outcome) in &comp.outcomes {
                    let t = outcome.as_ref().expect("checked above");
                    let report = run_selftest(&t.config, &opts);
                    print!("{report}");
                    eprintln!("{} [{}]: {:.3?}", report.type_name, report.scheme, report.elapsed);
                    ok &= report.passed();
                }
            }
            println!("{}", if ok { "selftest: PASS" } else { "selftest: FAIL" });
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_DEFINITION) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_DEFINITION)
        }
    }
}
