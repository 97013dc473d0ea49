use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isochron_cli::grid::parse_grid;
use isochron_cli::report::Report;
use isochron_cli::run::{scan_csv, EXIT_PASS, EXIT_USAGE};
use isochron_cli::{run, Command, Field, Options, SystemSpec, Theorem};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "isochron", version, about = "Isochronicity of xy + H_{n+1}(x, y) with numerical certificates")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verdict, witness and the admissibility cross-check.
    Classify(Common),
    /// Finite critical points, saddles on L_0 and atypical values.
    CriticalPoints(Common),
    /// Points at infinity, Newton polygons and branch residues.
    Infinity(Common),
    /// The lambda index per h and per infinite point.
    Lambda(Common),
    /// Periods of the origin cycle over the h-grid.
    Periods(Common),
    /// Period shift after circling a nonzero atypical value and then 0.
    Monodromy {
        /// Monodromy case 1-5; detected from the coefficients when omitted.
        #[arg(long)]
        case: Option<u8>,
        #[command(flatten)]
        common: Common,
    },
    /// Check one theorem numerically; exit 0 pass, 2 assertion failure, 3 numerical failure, 4 hypothesis not met.
    Verify {
        #[arg(value_enum)]
        theorem: Theorem,
        /// Monodromy case for `verify monodromy`.
        #[arg(long)]
        case: Option<u8>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// A JSON system spec, or a directory of them.
    input: PathBuf,
    /// `log:R0:R1:COUNT:RAYS` or `RE,IM;RE,IM;...`.
    #[arg(long)]
    h_grid: Option<String>,
    /// Samples on freshly lifted loops.
    #[arg(long, default_value_t = isochron::cycles::DEFAULT_SAMPLES)]
    samples: usize,
    /// Seed for the random values of h drawn by lambda, no-pole and the asymptotic checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overrides the field recorded in the spec.
    #[arg(long, value_enum)]
    field: Option<Field>,
    /// Puiseux truncation order; defaults to 2 (n + 1).
    #[arg(long)]
    truncation_order: Option<usize>,
    /// Output file; stdout when omitted. A `.csv` extension selects CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    /// Period table; `periods` and `verify main` only.
    Csv,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct BatchEntry {
    file: String,
    exit_code: i32,
    report: Option<Report>,
    error: Option<String>,
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("isochron: {msg}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn spec_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn load(path: &Path) -> Result<SystemSpec, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    SystemSpec::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE as u8) } else { ExitCode::SUCCESS };
        }
    };
    let (command, case, common) = match cli.command {
        Cmd::Classify(c) => (Command::Classify, None, c),
        Cmd::CriticalPoints(c) => (Command::CriticalPoints, None, c),
        Cmd::Infinity(c) => (Command::Infinity, None, c),
        Cmd::Lambda(c) => (Command::Lambda, None, c),
        Cmd::Periods(c) => (Command::Periods, None, c),
        Cmd::Monodromy { case, common } => (Command::Monodromy, case, common),
        Cmd::Verify { theorem, case, common } => (Command::Verify(theorem), case, common),
    };
    let h_grid = match common.h_grid.as_deref().map(parse_grid).transpose() {
        Ok(g) => g,
        Err(e) => return fail(&e.to_string()),
    };
    let opts = Options {
        h_grid,
        samples: common.samples,
        seed: common.seed,
        field: common.field,
        truncation_order: common.truncation_order,
        case,
    };
    let csv = common.format == Format::Csv || common.out.as_ref().is_some_and(|p| p.extension().is_some_and(|x| x == "csv"));
    if csv && !matches!(command, Command::Periods | Command::Verify(Theorem::Main)) {
        return fail("CSV output is only available for `periods` and `verify main`");
    }

    if common.input.is_dir() {
        if csv {
            return fail("CSV output takes a single spec, not a directory");
        }
        let files = match spec_files(&common.input) {
            Ok(f) => f,
            Err(e) => return fail(&format!("{}: {e}", common.input.display())),
        };
        let mut worst = EXIT_PASS;
        let mut entries = Vec::new();
        for f in files {
            let file = f.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let entry = match load(&f) {
                Ok(spec) => {
                    let r = run(&spec, command, &opts);
                    BatchEntry { file, exit_code: r.exit_code, report: Some(r), error: None }
                }
                Err(e) => BatchEntry { file, exit_code: EXIT_USAGE, report: None, error: Some(e) },
            };
            worst = worst.max(entry.exit_code);
            entries.push(entry);
        }
        let text = serde_json::to_string_pretty(&entries).expect("report serializes") + "\n";
        if let Err(e) = emit(&text, common.out.as_deref()) {
            return fail(&e);
        }
        return ExitCode::from(worst as u8);
    }

    let spec = match load(&common.input) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let report = run(&spec, command, &opts);
    let text = if csv {
        match &report.period_scan {
            Some(scan) => scan_csv(scan),
            None => {
                let msg = report.error.as_ref().map_or("no period scan".to_string(), |e| e.message.clone());
                eprintln!("isochron: {msg}");
                return ExitCode::from(report.exit_code as u8);
            }
        }
    } else {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    };
    if let Err(e) = emit(&text, common.out.as_deref()) {
        return fail(&e);
    }
    if let Some(e) = &report.error {
        eprintln!("isochron: {}: {}", e.kind, e.message);
    }
    ExitCode::from(report.exit_code as u8)
}
