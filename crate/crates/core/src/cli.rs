//! Command-line entry point with CI-stable exit codes.
//!
//! | code | meaning |
//! |------|---------|
//! | 0    | success, no findings |
//! | 1    | analysis findings (errors, or warnings under `--strict`) |
//! | 2    | parse or validation failure (model, waiver, trace, or policy file) |
//! | 3    | I/O or usage error |
//!
//! `--strict` only ever tightens exit behavior. All output for a fixed
//! input is byte-stable: no timestamps, no nondeterministic ordering.

use clap::{Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{
    apply_waivers, coverage_metrics, parse_waivers, trace_chain, traceability_audit,
    uca_worksheet, ChainDirection,
};
use crate::dsl::parse_document;
use crate::guard::{
    decisions_to_json, format_decision_log, parse_policy, parse_trace, simulate_trace,
    GuardPolicy,
};
use crate::model::{build_model, FailureMode, Identifier, LifecycleStage, SafetyModel};
use crate::report::{build_bundle, export_graph, export_structured, render_tables};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "ustpa",
    version,
    about = "Lifecycle-wide STPA safety analysis as code",
    disable_help_subcommand = true
)]
struct Cli {
    /// Treat analysis warnings (worksheet gaps, orphans, unmitigated
    /// hazards) as failures: exit 1 instead of 0.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model file.
    Check {
        /// Path to the `.ustpa` model.
        model: PathBuf,
    },
    /// Print the control-action x failure-mode worksheet and its gaps.
    Ucas {
        model: PathBuf,
        /// Waiver file: one `ACTION_ID MODE "reason"` per line.
        #[arg(long)]
        waivers: Option<PathBuf>,
    },
    /// Audit the loss <- hazard <- UCA <- scenario <- requirement chain.
    Audit {
        model: PathBuf,
    },
    /// Print coverage metrics.
    Coverage {
        model: PathBuf,
    },
    /// Print all maximal traceability-chain paths from one element.
    Trace {
        model: PathBuf,
        /// Chain element to start from.
        #[arg(long)]
        from: String,
        /// Walk direction: `up` toward requirements, `down` toward losses.
        #[arg(long, value_enum)]
        dir: DirArg,
    },
    /// Write report artifacts to a directory.
    Report {
        model: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::All)]
        format: FormatArg,
    },
    /// Replay a monitor trace through the runtime guard.
    Simulate {
        model: PathBuf,
        /// Trace file: one `STEP SOURCE LEVEL` reading per line.
        #[arg(long)]
        trace: PathBuf,
        /// Policy file overriding the default decision table.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Also write the decision log here (`.json` selects the
        /// structured form, anything else the plain-text lines).
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DirArg {
    Up,
    Down,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Tables,
    Structured,
    Graph,
    All,
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // --help / --version land on stdout and exit 0; real usage
            // errors land on stderr and exit 3.
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = err.print();
            return code;
        }
    };
    let strict = cli.strict;
    match cli.command {
        Command::Check { model } => cmd_check(&model),
        Command::Ucas { model, waivers } => cmd_ucas(&model, waivers.as_deref(), strict),
        Command::Audit { model } => cmd_audit(&model, strict),
        Command::Coverage { model } => cmd_coverage(&model, strict),
        Command::Trace { model, from, dir } => cmd_trace(&model, &from, dir),
        Command::Report { model, out, format } => cmd_report(&model, &out, format),
        Command::Simulate { model, trace, policy, log } => {
            cmd_simulate(&model, &trace, policy.as_deref(), log.as_deref())
        }
    }
}

fn read_file(path: &Path) -> Result<String, i32> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read `{}`: {e}", path.display());
        EXIT_USAGE
    })
}

fn load_model(path: &Path) -> Result<SafetyModel, i32> {
    let text = read_file(path)?;
    let doc = parse_document(&text);
    for diagnostic in &doc.diagnostics {
        eprintln!(
            "{}:{}: {}: {}",
            path.display(),
            diagnostic.span,
            diagnostic.severity,
            diagnostic.message
        );
    }
    if doc.has_errors() {
        return Err(EXIT_INVALID);
    }
    build_model(doc.declarations).map_err(|failure| {
        for error in &failure.errors {
            eprintln!("{}: error: {error}", path.display());
        }
        EXIT_INVALID
    })
}

fn cmd_check(path: &Path) -> i32 {
    let model = match load_model(path) {
        Ok(m) => m,
        Err(code) => return code,
    };
    println!(
        "ok: {} losses, {} hazards, {} ucas, {} scenarios, {} requirements",
        model.losses().len(),
        model.hazards().len(),
        model.ucas().len(),
        model.scenarios().len(),
        model.requirements().len()
    );
    EXIT_OK
}

fn cmd_ucas(path: &Path, waivers: Option<&Path>, strict: bool) -> i32 {
    let model = match load_model(path) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let sheet = uca_worksheet(&model);
    print!("{}", worksheet_text(&sheet));

    let remaining = if let Some(waiver_path) = waivers {
        let text = match read_file(waiver_path) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let waivers = match parse_waivers(&text) {
            Ok(w) => w,
            Err(e) => {
                eprintln!("{}: error: {e}", waiver_path.display());
                return EXIT_INVALID;
            }
        };
        let outcome = apply_waivers(&sheet, &waivers);
        for w in &outcome.waived {
            println!("waived: {} {} ({})", w.action, w.mode, w.reason);
        }
        for w in &outcome.redundant {
            println!("redundant waiver: {} {} (cell is documented or already waived)", w.action, w.mode);
        }
        for w in &outcome.unknown_action {
            println!("unknown action in waiver: {} {}", w.action, w.mode);
        }
        for gap in &outcome.remaining_gaps {
            println!("gap: {} {}", gap.action, gap.mode);
        }
        println!("coverage with waivers: {}", outcome.effective_coverage(&sheet));
        outcome.remaining_gaps.len()
    } else {
        for gap in &sheet.gaps {
            println!("gap: {} {}", gap.action, gap.mode);
        }
        println!("coverage: {}", sheet.coverage());
        sheet.gaps.len()
    };

    if strict && remaining > 0 {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    }
}

/// Plain-text aligned worksheet: one row per action, one column per mode.
fn worksheet_text(sheet: &crate::analysis::UcaWorksheet) -> String {
    let headers: Vec<String> = std::iter::once("action".to_owned())
        .chain(FailureMode::ALL.iter().map(|m| m.token().to_owned()))
        .collect();
    let mut rows: Vec<Vec<String>> = vec![headers];
    for row in &sheet.rows {
        let mut cells = vec![row.action.to_string()];
        for cell in &row.cells {
            if cell.ucas.is_empty() {
                cells.push("-".to_owned());
            } else {
                cells.push(
                    cell.ucas.iter().map(|u| u.as_str()).collect::<Vec<_>>().join(","),
                );
            }
        }
        rows.push(cells);
    }
    let mut widths = vec![0usize; rows[0].len()];
    for row in &rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            let _ = write!(line, "{cell:<width$}", width = widths[i]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn cmd_audit(path: &Path, strict: bool) -> i32 {
    let model = match load_model(path) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let audit = traceability_audit(&model);
    for finding in &audit.findings {
        println!("{}: {}", finding.severity, finding.message);
    }
    if audit.findings.is_empty() {
        println!("traceability chain is fully linked");
    } else {
        println!("{} finding(s)", audit.findings.len());
    }
    if audit.has_errors() || (strict && audit.has_warnings()) {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    }
}

fn cmd_coverage(path: &Path, strict: bool) -> i32 {
    let model = match load_model(path) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let cov = coverage_metrics(&model);
    println!("uca mode coverage: {}", cov.uca_mode_coverage);
    let stages: Vec<String> = LifecycleStage::ALL
        .iter()
        .map(|s| format!("{}={}", s.tag(), cov.per_stage_uca_counts.get(s).unwrap_or(&0)))
        .collect();
    println!("per-stage ucas: {}", stages.join(" "));
    let modes: Vec<String> = FailureMode::ALL
        .iter()
        .map(|m| format!("{}={}", m.token(), cov.per_mode_uca_counts.get(m).unwrap_or(&0)))
        .collect();
    println!("per-mode ucas: {}", modes.join(" "));
    println!("hazard mitigation: {}", cov.hazard_mitigation_ratio);
    println!("loss mitigation: {}", cov.loss_mitigation_ratio);
    if !cov.unmitigated_hazards.is_empty() {
        let ids: Vec<&str> = cov.unmitigated_hazards.iter().map(|h| h.as_str()).collect();
        println!("unmitigated: {}", ids.join(", "));
    }
    if strict && !cov.unmitigated_hazards.is_empty() {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    }
}

fn cmd_trace(path: &Path, from: &str, dir: DirArg) -> i32 {
    let model = match load_model(path) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let origin = match Identifier::new(from) {
        Ok(id) => id,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let direction = match dir {
        DirArg::Up => ChainDirection::Upstream,
        DirArg::Down => ChainDirection::Downstream,
    };
    match trace_chain(&model, &origin, direction) {
        Ok(chain) => {
            if chain.paths.is_empty() {
                println!("no {direction} paths from {origin}");
            } else {
                for path in &chain.paths {
                    let ids: Vec<&str> = path.iter().map(|id| id.as_str()).collect();
                    println!("{}", ids.join(" -> "));
                }
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e} (expected a loss, hazard, uca, scenario or requirement id)");
            EXIT_USAGE
        }
    }
}

fn cmd_report(path: &Path, out_dir: &Path, format: FormatArg) -> i32 {
    let model = match load_model(path) {
        Ok(m) => m,
        Err(code) => return code,
    };
    if let Err(e) = std::fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create `{}`: {e}", out_dir.display());
        return EXIT_USAGE;
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".to_owned());
    let bundle = build_bundle(&model);

    let mut artifacts: Vec<(PathBuf, String)> = Vec::new();
    if matches!(format, FormatArg::Structured | FormatArg::All) {
        artifacts.push((out_dir.join(format!("{stem}.report.json")), export_structured(&bundle)));
    }
    if matches!(format, FormatArg::Tables | FormatArg::All) {
        artifacts.push((out_dir.join(format!("{stem}.report.md")), render_tables(&bundle)));
    }
    if matches!(format, FormatArg::Graph | FormatArg::All) {
        artifacts.push((out_dir.join(format!("{stem}.dot")), export_graph(&bundle.model)));
    }
    for (artifact_path, content) in &artifacts {
        if let Err(e) = std::fs::write(artifact_path, content) {
            eprintln!("error: cannot write `{}`: {e}", artifact_path.display());
            return EXIT_USAGE;
        }
        println!("wrote {}", artifact_path.display());
    }
    EXIT_OK
}

fn cmd_simulate(
    path: &Path,
    trace_path: &Path,
    policy_path: Option<&Path>,
    log_path: Option<&Path>,
) -> i32 {
    // The model is parsed and validated for context even though the guard
    // itself is model-independent; a broken model should not slip through
    // a simulation run unnoticed.
    if let Err(code) = load_model(path) {
        return code;
    }
    let trace_text = match read_file(trace_path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let readings = match parse_trace(&trace_text) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}: error: {e}", trace_path.display());
            return EXIT_INVALID;
        }
    };
    let policy = match policy_path {
        None => GuardPolicy::default(),
        Some(p) => {
            let text = match read_file(p) {
                Ok(t) => t,
                Err(code) => return code,
            };
            match parse_policy(&text) {
                Ok(policy) => policy,
                Err(e) => {
                    eprintln!("{}: error: {e}", p.display());
                    return EXIT_INVALID;
                }
            }
        }
    };
    let decisions = match simulate_trace(&readings, &policy) {
        Ok(d) => d,
        Err(e) => {
            // parse_trace already enforces ordering, so this is unreachable
            // from file input, but the contract is honored anyway.
            eprintln!("{}: error: {e}", trace_path.display());
            return EXIT_INVALID;
        }
    };
    print!("{}", format_decision_log(&decisions));
    if let Some(log) = log_path {
        let content = if log.extension().is_some_and(|e| e == "json") {
            decisions_to_json(&decisions)
        } else {
            format_decision_log(&decisions)
        };
        if let Err(e) = std::fs::write(log, content) {
            eprintln!("error: cannot write `{}`: {e}", log.display());
            return EXIT_USAGE;
        }
    }
    EXIT_OK
}
