//! Functional equivalence checking between a netlist and its instruction
//! stream, plus the mapping report (cycle breakdown, overhead, ADP).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fabric::{read_outputs, run_stream, Crossbar, InstrClass, InstructionStream};
use crate::netlist::Netlist;

/// How many primary inputs an exhaustive sweep will tolerate.
pub const EXHAUSTIVE_MAX_PIS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Random { n: u64, seed: u64 },
}

impl VerifyMode {
    pub fn describe(&self) -> String {
        match self {
            VerifyMode::Exhaustive => "exhaustive".to_string(),
            VerifyMode::Random { n, seed } => format!("random:{}:{}", n, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass {
        checked: u64,
    },
    /// First mismatching assignment, with both sides' outputs; `detail`
    /// carries a simulator diagnostic when execution itself failed.
    Fail {
        counterexample: BTreeMap<String, bool>,
        expected: BTreeMap<String, bool>,
        actual: Option<BTreeMap<String, bool>>,
        detail: Option<String>,
    },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("exhaustive verification limited to {max} inputs, netlist has {got}", max = EXHAUSTIVE_MAX_PIS)]
    TooManyInputs { got: usize },
}

fn check_one(
    netlist: &Netlist,
    stream: &InstructionStream,
    assignment: &BTreeMap<String, bool>,
) -> Result<(), Verdict> {
    let expected = netlist
        .evaluate(assignment)
        .expect("assignment covers all primary inputs");
    let initial = Crossbar::pristine(stream.rows, stream.cols);
    let actual = run_stream(initial, stream, assignment)
        .and_then(|(after, _)| read_outputs(&after, stream));
    match actual {
        Ok(actual) if actual == expected => Ok(()),
        Ok(actual) => Err(Verdict::Fail {
            counterexample: assignment.clone(),
            expected,
            actual: Some(actual),
            detail: None,
        }),
        Err(e) => Err(Verdict::Fail {
            counterexample: assignment.clone(),
            expected,
            actual: None,
            detail: Some(e.to_string()),
        }),
    }
}

/// Run the stream against the netlist for every assignment of the chosen
/// mode and report the first mismatch, if any.
pub fn check_equivalence(
    netlist: &Netlist,
    stream: &InstructionStream,
    mode: VerifyMode,
) -> Result<Verdict, VerifyError> {
    let pis = &netlist.primary_inputs;
    match mode {
        VerifyMode::Exhaustive => {
            if pis.len() > EXHAUSTIVE_MAX_PIS {
                return Err(VerifyError::TooManyInputs { got: pis.len() });
            }
            let total = 1u64 << pis.len();
            for bits in 0..total {
                let assignment: BTreeMap<String, bool> = pis
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (p.clone(), bits >> i & 1 == 1))
                    .collect();
                if let Err(fail) = check_one(netlist, stream, &assignment) {
                    return Ok(fail);
                }
            }
            Ok(Verdict::Pass { checked: total })
        }
        VerifyMode::Random { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..n {
                let assignment: BTreeMap<String, bool> =
                    pis.iter().map(|p| (p.clone(), rng.gen_bool(0.5))).collect();
                if let Err(fail) = check_one(netlist, stream, &assignment) {
                    return Ok(fail);
                }
            }
            Ok(Verdict::Pass { checked: n })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleBreakdown {
    pub write: u64,
    pub copy: u64,
    pub compute: u64,
    pub reset: u64,
}

impl CycleBreakdown {
    pub fn total(&self) -> u64 {
        self.write + self.copy + self.compute + self.reset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub mode: String,
    pub status: String,
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<BTreeMap<String, bool>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// One mapping run's metrics; serialized with this exact field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingReport {
    pub benchmark: String,
    pub rows: u32,
    pub cols: u32,
    pub k: usize,
    pub spacing: u32,
    pub cycles: u64,
    pub breakdown: CycleBreakdown,
    /// (write + copy) cycles over total cycles.
    pub overhead: f64,
    pub devices: u64,
    pub adp: u64,
    pub verification: VerificationSummary,
}

pub fn adp(rows: u32, cols: u32, cycles: u64) -> u64 {
    rows as u64 * cols as u64 * cycles
}

/// ADP_other / ADP_ours as an exact reduced fraction.
pub fn improvement_ratio(adp_other: u64, adp_ours: u64) -> (u64, u64) {
    assert!(adp_ours > 0);
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(adp_other, adp_ours).max(1);
    (adp_other / g, adp_ours / g)
}

/// Tally a stream's cycle classes and assemble the report.
pub fn compute_report(
    benchmark: &str,
    stream: &InstructionStream,
    k: usize,
    spacing: u32,
    mode: VerifyMode,
    verdict: &Verdict,
) -> MappingReport {
    let mut breakdown = CycleBreakdown {
        write: 0,
        copy: 0,
        compute: 0,
        reset: 0,
    };
    for t in &stream.instructions {
        match t.class {
            InstrClass::Write => breakdown.write += 1,
            InstrClass::Copy => breakdown.copy += 1,
            InstrClass::Compute => breakdown.compute += 1,
            InstrClass::Reset => breakdown.reset += 1,
        }
    }
    let cycles = breakdown.total();
    let overhead = if cycles == 0 {
        0.0
    } else {
        (breakdown.write + breakdown.copy) as f64 / cycles as f64
    };
    let verification = match verdict {
        Verdict::Pass { checked } => VerificationSummary {
            mode: mode.describe(),
            status: "PASS".to_string(),
            checked: *checked,
            counterexample: None,
            detail: None,
        },
        Verdict::Fail {
            counterexample,
            detail,
            ..
        } => VerificationSummary {
            mode: mode.describe(),
            status: "FAIL".to_string(),
            checked: 0,
            counterexample: Some(counterexample.clone()),
            detail: detail.clone(),
        },
    };
    MappingReport {
        benchmark: benchmark.to_string(),
        rows: stream.rows,
        cols: stream.cols,
        k,
        spacing,
        cycles,
        breakdown,
        overhead,
        devices: stream.rows as u64 * stream.cols as u64,
        adp: adp(stream.rows, stream.cols, cycles),
        verification,
    }
}
