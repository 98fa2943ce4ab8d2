//! Technology mapping of combinational BLIF netlists onto MAGIC
//! (Memristor-Aided loGIC) crossbars.
//!
//! The pipeline: parse a BLIF netlist ([`netlist`]), cover it with a
//! k-bounded LUT graph ([`lutgraph`]), rewrite each LUT into NOR-of-NORs
//! form ([`non`]), stack LUT groups onto the crossbar with input-column
//! alignment ([`alignment`], [`placement`]), move values with
//! parity-aware NOT copies ([`routing`]), and emit a cycle-tagged
//! instruction stream executed by a cycle-accurate simulator ([`fabric`]).
//! [`verify`] proves functional equivalence against the source netlist
//! and computes area/delay metrics; [`driver`] ties it together behind a
//! CLI with parameter sweeps.

pub mod alignment;
pub mod driver;
pub mod fabric;
pub mod lutgraph;
pub mod netlist;
pub mod non;
pub mod occupancy;
pub mod placement;
pub mod routing;
pub mod verify;

pub use driver::{map_benchmark, sweep, DriverError, RunConfig, RunOutcome};
pub use fabric::{Crossbar, Instruction, InstructionStream};
pub use lutgraph::{build_lut_graph, LutGraph};
pub use netlist::{parse_blif, Netlist};
pub use placement::{map_graph, AlignChoice, MapParams, Mapping};
pub use verify::{check_equivalence, compute_report, MappingReport, Verdict, VerifyMode};
