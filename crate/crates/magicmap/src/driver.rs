//! End-to-end pipeline: netlist -> LUT graph -> placement/routing ->
//! instruction stream -> equivalence check -> report, plus parameter
//! sweeps and the process exit-code contract.

use thiserror::Error;

use crate::lutgraph::{build_lut_graph, LutGraphError};
use crate::netlist::{Netlist, NetlistError};
use crate::placement::{map_graph, AlignChoice, MapError, MapParams, Mapping};
use crate::verify::{check_equivalence, compute_report, MappingReport, VerifyError, VerifyMode};

/// Process exit codes: 0 mapped and verified, then one distinct code per
/// failure class (2 is left to the argument parser).
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_UNMAPPABLE: i32 = 4;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub benchmark: String,
    pub rows: u32,
    pub cols: u32,
    pub k: usize,
    pub spacing: u32,
    pub align: AlignChoice,
    pub verify: VerifyMode,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub mapping: Mapping,
    /// Verification status lives in `report.verification.status`.
    pub report: MappingReport,
}

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    LutGraph(#[from] LutGraphError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

impl DriverError {
    pub fn exit_code(&self) -> i32 {
        match self {
            DriverError::Netlist(_) => EXIT_PARSE,
            DriverError::LutGraph(LutGraphError::Netlist(_)) => EXIT_PARSE,
            DriverError::LutGraph(_) => EXIT_UNMAPPABLE,
            DriverError::Map(_) => EXIT_UNMAPPABLE,
            // a verify-mode precondition failure is a usage problem, but it
            // still must not masquerade as success
            DriverError::Verify(_) => EXIT_VERIFY_FAIL,
        }
    }
}

/// Run the full pipeline for one configuration. A verification mismatch
/// is not an `Err`: it is recorded in the returned report.
pub fn map_benchmark(netlist: &Netlist, cfg: &RunConfig) -> Result<RunOutcome, DriverError> {
    let graph = build_lut_graph(netlist, cfg.k)?;
    let mapping = map_graph(
        &graph,
        &MapParams {
            rows: cfg.rows,
            cols: cfg.cols,
            spacing: cfg.spacing,
            align: cfg.align,
        },
    )?;
    let verdict = check_equivalence(netlist, &mapping.stream, cfg.verify)?;
    let report = compute_report(
        &cfg.benchmark,
        &mapping.stream,
        cfg.k,
        cfg.spacing,
        cfg.verify,
        &verdict,
    );
    Ok(RunOutcome { mapping, report })
}

/// One row of a parameter sweep; `outcome` is the reason string for
/// combinations that could not be mapped.
#[derive(Debug)]
pub struct SweepRow {
    pub rows: u32,
    pub cols: u32,
    pub k: usize,
    pub spacing: u32,
    pub outcome: Result<RunOutcome, String>,
}

/// Cross-product sweep over dimensions, k, and spacing. Unmappable
/// combinations are recorded and the sweep continues.
pub fn sweep(
    netlist: &Netlist,
    benchmark: &str,
    rows_list: &[u32],
    cols_list: &[u32],
    k_list: &[usize],
    spacing_list: &[u32],
    align: AlignChoice,
    verify: VerifyMode,
) -> Vec<SweepRow> {
    let mut out = Vec::new();
    for &rows in rows_list {
        for &cols in cols_list {
            for &k in k_list {
                for &spacing in spacing_list {
                    let cfg = RunConfig {
                        benchmark: benchmark.to_string(),
                        rows,
                        cols,
                        k,
                        spacing,
                        align,
                        verify,
                    };
                    let outcome = map_benchmark(netlist, &cfg).map_err(|e| e.to_string());
                    out.push(SweepRow {
                        rows,
                        cols,
                        k,
                        spacing,
                        outcome,
                    });
                }
            }
        }
    }
    out
}

/// Human-readable sweep summary, one line per combination.
pub fn format_sweep_table(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str("rows cols k spacing cycles adp verification\n");
    for row in rows {
        let line = match &row.outcome {
            Ok(o) => format!(
                "{} {} {} {} {} {} {}\n",
                row.rows,
                row.cols,
                row.k,
                row.spacing,
                o.report.cycles,
                o.report.adp,
                o.report.verification.status
            ),
            Err(reason) => format!(
                "{} {} {} {} - - UNMAPPABLE ({})\n",
                row.rows, row.cols, row.k, row.spacing, reason
            ),
        };
        out.push_str(&line);
    }
    out
}
