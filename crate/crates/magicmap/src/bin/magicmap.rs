//! Command-line front end: map a BLIF netlist onto a MAGIC crossbar,
//! verify it, and emit the instruction stream and report. Comma lists in
//! --rows/--cols/-k/--spacing run a sweep instead of a single mapping.
//!
//! Set MAGICMAP_LOG=debug for progress output on stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use magicmap::driver::{
    format_sweep_table, map_benchmark, sweep, RunConfig, EXIT_PARSE, EXIT_VERIFY_FAIL,
};
use magicmap::placement::AlignChoice;
use magicmap::verify::VerifyMode;

#[derive(Parser, Debug)]
#[command(
    name = "magicmap",
    about = "Map combinational BLIF netlists onto MAGIC memristive crossbars"
)]
struct Args {
    /// BLIF netlist to map
    #[arg(long)]
    input: PathBuf,

    /// Crossbar row count (comma list sweeps)
    #[arg(long, default_value = "8")]
    rows: String,

    /// Crossbar column count (comma list sweeps)
    #[arg(long, default_value = "8")]
    cols: String,

    /// LUT fan-in bound, 2..=8 (comma list sweeps)
    #[arg(short = 'k', long = "k", default_value = "4")]
    k: String,

    /// Free cells kept around each footprint (comma list sweeps)
    #[arg(long, default_value = "0")]
    spacing: String,

    /// Input-column alignment strategy
    #[arg(long, default_value = "greedy", value_parser = parse_align)]
    align: AlignChoice,

    /// Equivalence check: `exhaustive` or `random:<n>:<seed>`
    #[arg(long, default_value = "exhaustive", value_parser = parse_verify)]
    verify: VerifyMode,

    /// Write the instruction stream here (single runs only)
    #[arg(long)]
    emit: Option<PathBuf>,

    /// Write the JSON report here (single runs only)
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_align(s: &str) -> Result<AlignChoice, String> {
    match s {
        "greedy" => Ok(AlignChoice::Greedy),
        "exact" => Ok(AlignChoice::Exact),
        other => Err(format!("unknown alignment `{}` (greedy|exact)", other)),
    }
}

fn parse_verify(s: &str) -> Result<VerifyMode, String> {
    if s == "exhaustive" {
        return Ok(VerifyMode::Exhaustive);
    }
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 && parts[0] == "random" {
        let n = parts[1].parse().map_err(|_| "bad sample count")?;
        let seed = parts[2].parse().map_err(|_| "bad seed")?;
        return Ok(VerifyMode::Random { n, seed });
    }
    Err(format!(
        "unknown verify mode `{}` (exhaustive|random:<n>:<seed>)",
        s
    ))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| format!("bad {} value `{}`", what, p))
        })
        .collect()
}

fn verbose() -> bool {
    std::env::var("MAGICMAP_LOG").map_or(false, |v| !v.is_empty() && v != "off")
}

fn main() -> ExitCode {
    let args = Args::parse();
    let rows = match parse_list::<u32>(&args.rows, "rows") {
        Ok(v) => v,
        Err(e) => return usage_error(&e),
    };
    let cols = match parse_list::<u32>(&args.cols, "cols") {
        Ok(v) => v,
        Err(e) => return usage_error(&e),
    };
    let ks = match parse_list::<usize>(&args.k, "k") {
        Ok(v) => v,
        Err(e) => return usage_error(&e),
    };
    let spacings = match parse_list::<u32>(&args.spacing, "spacing") {
        Ok(v) => v,
        Err(e) => return usage_error(&e),
    };

    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", args.input.display(), e);
            return ExitCode::from(EXIT_PARSE as u8);
        }
    };
    let netlist = match magicmap::parse_blif(&text) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("error: {}: {}", args.input.display(), e);
            return ExitCode::from(EXIT_PARSE as u8);
        }
    };
    let benchmark = if netlist.name.is_empty() {
        args.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "netlist".to_string())
    } else {
        netlist.name.clone()
    };
    if verbose() {
        eprintln!(
            "parsed `{}`: {} inputs, {} outputs, {} nodes",
            benchmark,
            netlist.primary_inputs.len(),
            netlist.primary_outputs.len(),
            netlist.nodes().len()
        );
    }

    let is_sweep = rows.len() * cols.len() * ks.len() * spacings.len() > 1;
    if is_sweep {
        let table = sweep(
            &netlist,
            &benchmark,
            &rows,
            &cols,
            &ks,
            &spacings,
            args.align,
            args.verify,
        );
        print!("{}", format_sweep_table(&table));
        return ExitCode::SUCCESS;
    }

    let cfg = RunConfig {
        benchmark,
        rows: rows[0],
        cols: cols[0],
        k: ks[0],
        spacing: spacings[0],
        align: args.align,
        verify: args.verify,
    };
    let outcome = match map_benchmark(&netlist, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if verbose() {
        eprintln!(
            "mapped in {} cycles ({} groups, {} resets)",
            outcome.report.cycles,
            outcome.mapping.groups.len(),
            outcome.mapping.resets
        );
    }
    if let Some(path) = &args.emit {
        if let Err(e) = std::fs::write(path, outcome.mapping.stream.to_text()) {
            eprintln!("error: cannot write {}: {}", path.display(), e);
            return ExitCode::FAILURE;
        }
    }
    let report_json = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    match &args.report {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &report_json) {
                eprintln!("error: cannot write {}: {}", path.display(), e);
                return ExitCode::FAILURE;
            }
        }
        None => println!("{}", report_json),
    }
    if outcome.report.verification.status == "PASS" {
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "error: verification failed: {:?}",
            outcome.report.verification.counterexample
        );
        ExitCode::from(EXIT_VERIFY_FAIL as u8)
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {}", msg);
    ExitCode::from(2)
}
