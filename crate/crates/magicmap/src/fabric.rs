//! Crossbar state, the MAGIC instruction set with exact execution
//! semantics and cycle accounting, and the bit-exact stream text format.
//!
//! Coordinates are 1-based project-wide, matching the M(r,c) convention.
//!
//! NOR semantics: a destination must be a pristine (reset) cell holding 1.
//! Source cells in the pristine reset state are electrically absorbed and
//! do not contribute to the NOR; this is what lets absent NoN literals rely
//! on the reset state without ever being written.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Free,
    Input,
    Intermediate,
    Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    /// None is the unknown state; reading it is an error.
    pub value: Option<bool>,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossbar {
    rows: u32,
    cols: u32,
    cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WriteValue {
    Const(bool),
    Pi { name: String, negated: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    Write {
        r: u32,
        c: u32,
        value: WriteValue,
    },
    /// For every r in `rows`: M(r, dst_col) <- NOR of M(r, c) over src_cols.
    Hnor {
        rows: BTreeSet<u32>,
        src_cols: BTreeSet<u32>,
        dst_col: u32,
    },
    /// M(dst_row, col) <- NOR of M(r, col) over src_rows.
    Vnor {
        col: u32,
        src_rows: BTreeSet<u32>,
        dst_row: u32,
    },
    /// M(dst) <- complement of M(src); src and dst share a row or a column.
    Not {
        src: (u32, u32),
        dst: (u32, u32),
    },
    ResetRows {
        except: BTreeSet<u32>,
    },
    ResetCols {
        except: BTreeSet<u32>,
    },
}

/// Cycle class of an instruction, for the report breakdown. NOT is
/// ambiguous on its own, so the class is attached at emission time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstrClass {
    Write,
    Copy,
    Compute,
    Reset,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedInstruction {
    pub cycle: u32,
    pub class: InstrClass,
    pub instr: Instruction,
}

/// Cycle-tagged instruction stream with the crossbar header and the
/// primary-output location map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstructionStream {
    pub rows: u32,
    pub cols: u32,
    /// (PO name, row, col), in netlist output order. Cells hold the true
    /// (non-inverted) output value after execution.
    pub po_map: Vec<(String, u32, u32)>,
    pub instructions: Vec<TimedInstruction>,
}

/// Accumulates timed instructions, assigning one cycle per instruction.
#[derive(Debug, Default, Clone)]
pub struct StreamBuilder {
    instructions: Vec<TimedInstruction>,
}

impl StreamBuilder {
    pub fn new() -> Self {
        StreamBuilder::default()
    }

    /// Append an instruction at the next cycle; returns its cycle index.
    pub fn push(&mut self, class: InstrClass, instr: Instruction) -> u32 {
        let cycle = self.instructions.len() as u32;
        self.instructions.push(TimedInstruction {
            cycle,
            class,
            instr,
        });
        cycle
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn into_instructions(self) -> Vec<TimedInstruction> {
        self.instructions
    }

    pub fn finish(self, rows: u32, cols: u32, po_map: Vec<(String, u32, u32)>) -> InstructionStream {
        InstructionStream {
            rows,
            cols,
            po_map,
            instructions: self.instructions,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExecError {
    #[error("coordinate ({0},{1}) out of range")]
    OutOfRange(u32, u32),
    #[error("destination ({0},{1}) is not an initialized free cell")]
    UninitializedDestination(u32, u32),
    #[error("source ({0},{1}) holds an unknown value")]
    UnknownSource(u32, u32),
    #[error("source ({0},{1}) was never written")]
    UnwrittenSource(u32, u32),
    #[error("destination line {0} is also a source line")]
    DestinationInSources(u32),
    #[error("NOT source and destination must share a row or a column")]
    NotMisaligned,
    #[error("NOT source equals destination")]
    NotSelfCopy,
    #[error("empty source set")]
    EmptySources,
    #[error("primary input `{0}` missing from the assignment")]
    MissingPi(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StreamError {
    #[error("cycle {cycle}: {source}")]
    Exec {
        cycle: u32,
        #[source]
        source: ExecError,
    },
    #[error("cycle indices decrease at cycle {0}")]
    CycleOrder(u32),
    #[error("stream header {0}x{1} does not match crossbar {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("primary output `{0}` cell holds no defined value")]
    UndefinedOutput(String),
}

impl Crossbar {
    /// A pristine crossbar: every cell reset to 1, role Free.
    pub fn pristine(rows: u32, cols: u32) -> Self {
        assert!(rows >= 1 && cols >= 1);
        Crossbar {
            rows,
            cols,
            cells: vec![
                Cell {
                    value: Some(true),
                    role: Role::Free,
                };
                (rows * cols) as usize
            ],
        }
    }

    /// A crossbar of unknown-valued cells, for exercising error paths.
    pub fn unknown(rows: u32, cols: u32) -> Self {
        Crossbar {
            rows,
            cols,
            cells: vec![
                Cell {
                    value: None,
                    role: Role::Free,
                };
                (rows * cols) as usize
            ],
        }
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    fn idx(&self, r: u32, c: u32) -> Result<usize, ExecError> {
        if r < 1 || r > self.rows || c < 1 || c > self.cols {
            return Err(ExecError::OutOfRange(r, c));
        }
        Ok(((r - 1) * self.cols + (c - 1)) as usize)
    }

    pub fn cell(&self, r: u32, c: u32) -> Result<Cell, ExecError> {
        Ok(self.cells[self.idx(r, c)?])
    }

    fn read_source(&self, r: u32, c: u32) -> Result<Option<bool>, ExecError> {
        let cell = self.cell(r, c)?;
        match cell.value {
            None => Err(ExecError::UnknownSource(r, c)),
            // pristine cells are absorbed by NOR operations
            Some(_) if cell.role == Role::Free => Ok(None),
            Some(v) => Ok(Some(v)),
        }
    }

    fn check_destination(&self, r: u32, c: u32) -> Result<usize, ExecError> {
        let i = self.idx(r, c)?;
        let cell = self.cells[i];
        if cell.role != Role::Free || cell.value != Some(true) {
            return Err(ExecError::UninitializedDestination(r, c));
        }
        Ok(i)
    }
}

/// Execute one instruction. Source cells are never modified; symbolic
/// WRITE literals are resolved against `pi_values`.
pub fn execute(
    crossbar: &mut Crossbar,
    instr: &Instruction,
    pi_values: &BTreeMap<String, bool>,
) -> Result<(), ExecError> {
    match instr {
        Instruction::Write { r, c, value } => {
            let bit = match value {
                WriteValue::Const(b) => *b,
                WriteValue::Pi { name, negated } => {
                    let v = *pi_values
                        .get(name)
                        .ok_or_else(|| ExecError::MissingPi(name.clone()))?;
                    v ^ negated
                }
            };
            let i = crossbar.idx(*r, *c)?;
            crossbar.cells[i] = Cell {
                value: Some(bit),
                role: Role::Input,
            };
            Ok(())
        }
        Instruction::Hnor {
            rows,
            src_cols,
            dst_col,
        } => {
            if rows.is_empty() || src_cols.is_empty() {
                return Err(ExecError::EmptySources);
            }
            if src_cols.contains(dst_col) {
                return Err(ExecError::DestinationInSources(*dst_col));
            }
            let mut results = Vec::with_capacity(rows.len());
            for &r in rows {
                let mut any_one = false;
                for &c in src_cols {
                    if let Some(v) = crossbar.read_source(r, c)? {
                        any_one |= v;
                    }
                }
                let i = crossbar.check_destination(r, *dst_col)?;
                results.push((i, !any_one));
            }
            for (i, v) in results {
                crossbar.cells[i] = Cell {
                    value: Some(v),
                    role: Role::Intermediate,
                };
            }
            Ok(())
        }
        Instruction::Vnor {
            col,
            src_rows,
            dst_row,
        } => {
            if src_rows.is_empty() {
                return Err(ExecError::EmptySources);
            }
            if src_rows.contains(dst_row) {
                return Err(ExecError::DestinationInSources(*dst_row));
            }
            let mut any_one = false;
            for &r in src_rows {
                if let Some(v) = crossbar.read_source(r, *col)? {
                    any_one |= v;
                }
            }
            let i = crossbar.check_destination(*dst_row, *col)?;
            crossbar.cells[i] = Cell {
                value: Some(!any_one),
                role: Role::Intermediate,
            };
            Ok(())
        }
        Instruction::Not { src, dst } => {
            if src == dst {
                return Err(ExecError::NotSelfCopy);
            }
            if src.0 != dst.0 && src.1 != dst.1 {
                return Err(ExecError::NotMisaligned);
            }
            let v = crossbar
                .read_source(src.0, src.1)?
                .ok_or(ExecError::UnwrittenSource(src.0, src.1))?;
            let i = crossbar.check_destination(dst.0, dst.1)?;
            crossbar.cells[i] = Cell {
                value: Some(!v),
                role: Role::Intermediate,
            };
            Ok(())
        }
        Instruction::ResetRows { except } => {
            for &r in except {
                crossbar.idx(r, 1)?;
            }
            for r in 1..=crossbar.rows {
                if except.contains(&r) {
                    continue;
                }
                for c in 1..=crossbar.cols {
                    let i = crossbar.idx(r, c).unwrap();
                    crossbar.cells[i] = Cell {
                        value: Some(true),
                        role: Role::Free,
                    };
                }
            }
            Ok(())
        }
        Instruction::ResetCols { except } => {
            for &c in except {
                crossbar.idx(1, c)?;
            }
            for c in 1..=crossbar.cols {
                if except.contains(&c) {
                    continue;
                }
                for r in 1..=crossbar.rows {
                    let i = crossbar.idx(r, c).unwrap();
                    crossbar.cells[i] = Cell {
                        value: Some(true),
                        role: Role::Free,
                    };
                }
            }
            Ok(())
        }
    }
}

/// Execute a whole stream in order. Returns the final crossbar state and
/// the cycle count (last cycle index + 1; 0 for an empty stream).
pub fn run_stream(
    initial: Crossbar,
    stream: &InstructionStream,
    pi_values: &BTreeMap<String, bool>,
) -> Result<(Crossbar, u64), StreamError> {
    if initial.rows != stream.rows || initial.cols != stream.cols {
        return Err(StreamError::DimensionMismatch(
            stream.rows,
            stream.cols,
            initial.rows,
            initial.cols,
        ));
    }
    let mut crossbar = initial;
    let mut last_cycle: Option<u32> = None;
    for t in &stream.instructions {
        if let Some(prev) = last_cycle {
            if t.cycle < prev {
                return Err(StreamError::CycleOrder(t.cycle));
            }
        }
        last_cycle = Some(t.cycle);
        execute(&mut crossbar, &t.instr, pi_values).map_err(|source| StreamError::Exec {
            cycle: t.cycle,
            source,
        })?;
    }
    let cycles = last_cycle.map_or(0, |c| c as u64 + 1);
    Ok((crossbar, cycles))
}

/// Read the primary outputs of an executed stream through its PO map.
pub fn read_outputs(
    crossbar: &Crossbar,
    stream: &InstructionStream,
) -> Result<BTreeMap<String, bool>, StreamError> {
    let mut out = BTreeMap::new();
    for (name, r, c) in &stream.po_map {
        let cell = crossbar.cell(*r, *c).map_err(|source| StreamError::Exec {
            cycle: 0,
            source,
        })?;
        match cell.value {
            Some(v) => {
                out.insert(name.clone(), v);
            }
            None => return Err(StreamError::UndefinedOutput(name.clone())),
        }
    }
    Ok(out)
}

fn fmt_set(set: &BTreeSet<u32>) -> String {
    let items: Vec<String> = set.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

impl InstructionStream {
    /// Bit-exact text serialization: header lines, then one instruction
    /// per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "XBAR {} {}", self.rows, self.cols).unwrap();
        for (name, r, c) in &self.po_map {
            writeln!(out, "PO {} r={} c={}", name, r, c).unwrap();
        }
        for t in &self.instructions {
            match &t.instr {
                Instruction::Write { r, c, value } => {
                    let v = match value {
                        WriteValue::Const(false) => "0".to_string(),
                        WriteValue::Const(true) => "1".to_string(),
                        WriteValue::Pi { name, negated: false } => format!("PI:{}", name),
                        WriteValue::Pi { name, negated: true } => format!("~PI:{}", name),
                    };
                    writeln!(out, "C{} WRITE r={} c={} v={}", t.cycle, r, c, v).unwrap();
                }
                Instruction::Hnor {
                    rows,
                    src_cols,
                    dst_col,
                } => {
                    writeln!(
                        out,
                        "C{} HNOR rows={} src={} dst={}",
                        t.cycle,
                        fmt_set(rows),
                        fmt_set(src_cols),
                        dst_col
                    )
                    .unwrap();
                }
                Instruction::Vnor {
                    col,
                    src_rows,
                    dst_row,
                } => {
                    writeln!(
                        out,
                        "C{} VNOR col={} src={} dst={}",
                        t.cycle,
                        col,
                        fmt_set(src_rows),
                        dst_row
                    )
                    .unwrap();
                }
                Instruction::Not { src, dst } => {
                    writeln!(
                        out,
                        "C{} NOT {},{} -> {},{}",
                        t.cycle, src.0, src.1, dst.0, dst.1
                    )
                    .unwrap();
                }
                Instruction::ResetRows { except } => {
                    writeln!(out, "C{} RESET ROWS except={}", t.cycle, fmt_set(except)).unwrap();
                }
                Instruction::ResetCols { except } => {
                    writeln!(out, "C{} RESET COLS except={}", t.cycle, fmt_set(except)).unwrap();
                }
            }
        }
        out
    }

    /// Parse the text form back into a stream. NOT instructions are
    /// classified as copies; the class is not part of the grammar.
    pub fn parse_text(text: &str) -> Result<InstructionStream, String> {
        let mut rows_cols: Option<(u32, u32)> = None;
        let mut po_map = Vec::new();
        let mut instructions = Vec::new();

        let parse_u32 = |s: &str, what: &str| -> Result<u32, String> {
            s.parse::<u32>().map_err(|_| format!("bad {}: `{}`", what, s))
        };
        let parse_kv = |tok: &str, key: &str| -> Result<String, String> {
            tok.strip_prefix(&format!("{}=", key))
                .map(|s| s.to_string())
                .ok_or_else(|| format!("expected `{}=...`, got `{}`", key, tok))
        };
        let parse_set = |s: &str| -> Result<BTreeSet<u32>, String> {
            let inner = s
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| format!("bad set `{}`", s))?;
            let mut set = BTreeSet::new();
            if !inner.is_empty() {
                for part in inner.split(',') {
                    set.insert(parse_u32(part, "set element")?);
                }
            }
            Ok(set)
        };

        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| format!("line {}: {}", ln + 1, msg);
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens[0] {
                "XBAR" => {
                    if tokens.len() != 3 {
                        return Err(err("XBAR expects two dimensions".into()));
                    }
                    rows_cols = Some((
                        parse_u32(tokens[1], "rows").map_err(&err)?,
                        parse_u32(tokens[2], "cols").map_err(&err)?,
                    ));
                }
                "PO" => {
                    if tokens.len() != 4 {
                        return Err(err("PO expects name, r=, c=".into()));
                    }
                    let r = parse_u32(&parse_kv(tokens[2], "r").map_err(&err)?, "row")
                        .map_err(&err)?;
                    let c = parse_u32(&parse_kv(tokens[3], "c").map_err(&err)?, "col")
                        .map_err(&err)?;
                    po_map.push((tokens[1].to_string(), r, c));
                }
                tok if tok.starts_with('C') => {
                    let cycle = parse_u32(&tok[1..], "cycle").map_err(&err)?;
                    let (class, instr) = match tokens.get(1).copied() {
                        Some("WRITE") => {
                            let r = parse_u32(&parse_kv(tokens[2], "r").map_err(&err)?, "row")
                                .map_err(&err)?;
                            let c = parse_u32(&parse_kv(tokens[3], "c").map_err(&err)?, "col")
                                .map_err(&err)?;
                            let v = parse_kv(tokens[4], "v").map_err(&err)?;
                            let value = match v.as_str() {
                                "0" => WriteValue::Const(false),
                                "1" => WriteValue::Const(true),
                                s if s.starts_with("PI:") => WriteValue::Pi {
                                    name: s[3..].to_string(),
                                    negated: false,
                                },
                                s if s.starts_with("~PI:") => WriteValue::Pi {
                                    name: s[4..].to_string(),
                                    negated: true,
                                },
                                s => return Err(err(format!("bad write value `{}`", s))),
                            };
                            (InstrClass::Write, Instruction::Write { r, c, value })
                        }
                        Some("HNOR") => {
                            let rows =
                                parse_set(&parse_kv(tokens[2], "rows").map_err(&err)?).map_err(&err)?;
                            let src =
                                parse_set(&parse_kv(tokens[3], "src").map_err(&err)?).map_err(&err)?;
                            let dst = parse_u32(&parse_kv(tokens[4], "dst").map_err(&err)?, "dst")
                                .map_err(&err)?;
                            (
                                InstrClass::Compute,
                                Instruction::Hnor {
                                    rows,
                                    src_cols: src,
                                    dst_col: dst,
                                },
                            )
                        }
                        Some("VNOR") => {
                            let col = parse_u32(&parse_kv(tokens[2], "col").map_err(&err)?, "col")
                                .map_err(&err)?;
                            let src =
                                parse_set(&parse_kv(tokens[3], "src").map_err(&err)?).map_err(&err)?;
                            let dst = parse_u32(&parse_kv(tokens[4], "dst").map_err(&err)?, "dst")
                                .map_err(&err)?;
                            (
                                InstrClass::Compute,
                                Instruction::Vnor {
                                    col,
                                    src_rows: src,
                                    dst_row: dst,
                                },
                            )
                        }
                        Some("NOT") => {
                            if tokens.len() != 5 || tokens[3] != "->" {
                                return Err(err("NOT expects `r,c -> r,c`".into()));
                            }
                            let parse_pair = |s: &str| -> Result<(u32, u32), String> {
                                let (a, b) =
                                    s.split_once(',').ok_or_else(|| format!("bad cell `{}`", s))?;
                                Ok((parse_u32(a, "row")?, parse_u32(b, "col")?))
                            };
                            let src = parse_pair(tokens[2]).map_err(&err)?;
                            let dst = parse_pair(tokens[4]).map_err(&err)?;
                            (InstrClass::Copy, Instruction::Not { src, dst })
                        }
                        Some("RESET") => {
                            let except = parse_set(&parse_kv(tokens[3], "except").map_err(&err)?)
                                .map_err(&err)?;
                            let instr = match tokens[2] {
                                "ROWS" => Instruction::ResetRows { except },
                                "COLS" => Instruction::ResetCols { except },
                                s => return Err(err(format!("bad reset orientation `{}`", s))),
                            };
                            (InstrClass::Reset, instr)
                        }
                        other => return Err(err(format!("unknown opcode `{:?}`", other))),
                    };
                    instructions.push(TimedInstruction {
                        cycle,
                        class,
                        instr,
                    });
                }
                other => return Err(err(format!("unknown line `{}`", other))),
            }
        }
        let (rows, cols) = rows_cols.ok_or("missing XBAR header")?;
        Ok(InstructionStream {
            rows,
            cols,
            po_map,
            instructions,
        })
    }
}
