//! The mapper: stacks LUT groups onto the crossbar, drives alignment and
//! input delivery, emits the compute instructions, and issues selective
//! resets when space runs out.
//!
//! Groups are formed per (topological level, input count) class, levels
//! ascending and widths descending. Members stack top-to-bottom inside a
//! shared column band; each member claims a (p_i+1) x (k_eff+1) footprint
//! (p_i product rows plus the output row; k_eff literal columns plus the
//! shared NOR destination column), with `spacing` free cells kept around
//! every footprint. Footprint rows may be non-contiguous, so live cells
//! left in the middle of the array do not fragment it. One selective
//! reset is attempted per stuck placement before the mapping is declared
//! unmappable.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::alignment::{
    exact_align, greedy_align, AlignError, InputMatrix, EXACT_MAX_COLS, EXACT_MAX_ROWS,
};
use crate::fabric::{InstrClass, Instruction, InstructionStream, StreamBuilder, WriteValue};
use crate::lutgraph::{LutGraph, PoDriver};
use crate::non::{sop_to_non, NonError, NonMark, NonMatrix};
use crate::occupancy::{CellState, Coord, Occupancy};
use crate::routing::{deliver_input, DeliveryTarget, InputSource, RouteError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignChoice {
    Greedy,
    /// Exhaustive alignment where the group is small enough for the
    /// oracle limits; larger groups fall back to greedy.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapParams {
    pub rows: u32,
    pub cols: u32,
    pub spacing: u32,
    pub align: AlignChoice,
}

/// Footprint accounting for one computed group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRecord {
    pub level: u32,
    /// Node indices, in stacking order.
    pub members: Vec<usize>,
    /// Cells newly claimed by the group's footprints.
    pub claimed_cells: u64,
    /// Sum of (p_i+1)(k_eff+1) over the members.
    pub expected_cells: u64,
}

#[derive(Debug, Clone)]
pub struct Mapping {
    pub stream: InstructionStream,
    pub groups: Vec<GroupRecord>,
    pub resets: u32,
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("crossbar {rows}x{cols} is below the {min}x{min} minimum for k={k}")]
    CrossbarTooSmall { rows: u32, cols: u32, k: usize, min: u32 },
    #[error("unmappable: {0}")]
    Unmappable(String),
    #[error("unmappable: {0}")]
    Route(#[from] RouteError),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Non(#[from] NonError),
}

/// Choose the selective reset orientation: exclude every line holding a
/// live value, in the orientation whose exclusions block strictly fewer
/// cells (ties go to rows).
pub fn select_reset(occ: &Occupancy) -> Instruction {
    let live_rows: BTreeSet<u32> = occ.live_rows().into_iter().collect();
    let live_cols: BTreeSet<u32> = occ.live_cols().into_iter().collect();
    let blocked_by_rows = live_rows.len() as u64 * occ.cols() as u64;
    let blocked_by_cols = live_cols.len() as u64 * occ.rows() as u64;
    if blocked_by_cols < blocked_by_rows {
        Instruction::ResetCols { except: live_cols }
    } else {
        Instruction::ResetRows { except: live_rows }
    }
}

/// Rows usable by a footprint in the band starting at `c0`: the band
/// segment plus a `spacing`-wide ring (clipped at the edges) is entirely
/// free. Footprint rows need not be contiguous — the NOR instructions
/// take arbitrary row sets — which keeps boards with scattered live
/// intermediates placeable.
fn qualifying_rows(occ: &Occupancy, c0: u32, w: u32, spacing: u32) -> Vec<u32> {
    let clo = c0.saturating_sub(spacing).max(1);
    let chi = (c0 + w - 1 + spacing).min(occ.cols());
    (1..=occ.rows())
        .filter(|&r| {
            let rlo = r.saturating_sub(spacing).max(1);
            let rhi = (r + spacing).min(occ.rows());
            (rlo..=rhi).all(|rr| (clo..=chi).all(|cc| occ.is_free((rr, cc))))
        })
        .collect()
}

/// First-fit band search, left to right: the first band with `h` free
/// rows wins; the topmost `h` of them are used.
fn find_band(occ: &Occupancy, h: u32, w: u32, spacing: u32) -> Option<(u32, Vec<u32>)> {
    if w > occ.cols() || h > occ.rows() {
        return None;
    }
    for c0 in 1..=occ.cols() - w + 1 {
        let q = qualifying_rows(occ, c0, w, spacing);
        if q.len() >= h as usize {
            return Some((c0, q[..h as usize].to_vec()));
        }
    }
    None
}

fn claim(occ: &mut Occupancy, rows: &[u32], c0: u32, w: u32) {
    for &r in rows {
        for c in c0..c0 + w {
            occ.set((r, c), CellState::Reserved);
        }
    }
}

struct PlacedLut {
    node: usize,
    /// Claimed rows, ascending: one per product term, then the output row.
    rows: Vec<u32>,
}

impl PlacedLut {
    fn product_rows(&self) -> &[u32] {
        &self.rows[..self.rows.len() - 1]
    }

    fn output_row(&self) -> u32 {
        *self.rows.last().unwrap()
    }
}

struct Mapper<'g> {
    graph: &'g LutGraph,
    params: MapParams,
    occ: Occupancy,
    out: StreamBuilder,
    /// Authoritative cell per node, holding the inverted output.
    node_cell: Vec<Option<Coord>>,
    /// Remaining fan-out consumers per node.
    uses: Vec<usize>,
    /// Node index -> primary outputs it drives.
    pos_of_node: BTreeMap<usize, Vec<String>>,
    po_cells: BTreeMap<String, Coord>,
    groups: Vec<GroupRecord>,
    resets: u32,
}

/// Map a LUT graph onto a crossbar, producing the full instruction stream
/// and the per-group footprint accounting.
pub fn map_graph(graph: &LutGraph, params: &MapParams) -> Result<Mapping, MapError> {
    let min = graph.k as u32 + 2;
    if params.rows < min || params.cols < min {
        return Err(MapError::CrossbarTooSmall {
            rows: params.rows,
            cols: params.cols,
            k: graph.k,
            min,
        });
    }

    let mut pos_of_node: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (po, driver) in &graph.po_drivers {
        if let PoDriver::Node(i) = driver {
            pos_of_node.entry(*i).or_default().push(po.clone());
        }
    }
    let mapper = Mapper {
        graph,
        params: *params,
        occ: Occupancy::new(params.rows, params.cols),
        out: StreamBuilder::new(),
        node_cell: vec![None; graph.nodes.len()],
        uses: (0..graph.nodes.len()).map(|i| graph.fanouts(i).len()).collect(),
        pos_of_node,
        po_cells: BTreeMap::new(),
        groups: Vec::new(),
        resets: 0,
    };
    mapper.run()
}

impl<'g> Mapper<'g> {
    fn run(mut self) -> Result<Mapping, MapError> {
        // Outputs driven directly by a primary input or a constant are
        // written once and stay live for the whole run.
        for (po, driver) in &self.graph.po_drivers {
            let value = match driver {
                PoDriver::Node(_) => continue,
                PoDriver::Pi(name) => WriteValue::Pi {
                    name: name.clone(),
                    negated: false,
                },
                PoDriver::Const(b) => WriteValue::Const(*b),
            };
            let at = find_band(&self.occ, 1, 1, self.params.spacing)
                .map(|(c0, rows)| (rows[0], c0))
                .ok_or_else(|| MapError::Unmappable(format!("no cell for output `{}`", po)))?;
            self.out.push(
                InstrClass::Write,
                Instruction::Write {
                    r: at.0,
                    c: at.1,
                    value,
                },
            );
            self.occ.set(at, CellState::Live);
            self.po_cells.insert(po.clone(), at);
        }

        // Group classes: level ascending, input count descending, node
        // index ascending within a class.
        let mut classes: BTreeMap<(u32, Reverse<usize>), Vec<usize>> = BTreeMap::new();
        for (i, node) in self.graph.nodes.iter().enumerate() {
            classes
                .entry((node.level, Reverse(node.fanin_count())))
                .or_default()
                .push(i);
        }
        for ((_, Reverse(width)), members) in classes {
            self.place_class(width as u32, members)?;
        }

        let po_map = self
            .graph
            .primary_outputs
            .iter()
            .map(|po| {
                let (r, c) = self.po_cells[po];
                (po.clone(), r, c)
            })
            .collect();
        Ok(Mapping {
            stream: self
                .out
                .finish(self.params.rows, self.params.cols, po_map),
            groups: self.groups,
            resets: self.resets,
        })
    }

    fn height(&self, node: usize) -> u32 {
        self.graph.nodes[node].cover.cubes.len() as u32 + 1
    }

    fn place_class(&mut self, k_eff: u32, members: Vec<usize>) -> Result<(), MapError> {
        let w = k_eff + 1;
        let mut pending: VecDeque<usize> = members.into();
        while let Some(first) = pending.pop_front() {
            let h0 = self.height(first);
            let mut spot = find_band(&self.occ, h0, w, self.params.spacing);
            if spot.is_none() {
                if h0 > self.params.rows || w > self.params.cols {
                    return Err(MapError::Unmappable(format!(
                        "footprint {}x{} of `{}` exceeds the {}x{} crossbar",
                        h0, w, self.graph.nodes[first].name, self.params.rows, self.params.cols
                    )));
                }
                let reset = select_reset(&self.occ);
                match &reset {
                    Instruction::ResetRows { except } => self.occ.reset_rows(except),
                    Instruction::ResetCols { except } => self.occ.reset_cols(except),
                    _ => unreachable!(),
                }
                self.out.push(InstrClass::Reset, reset);
                self.resets += 1;
                spot = find_band(&self.occ, h0, w, self.params.spacing);
            }
            let (c0, rows0) = spot.ok_or_else(|| {
                MapError::Unmappable(format!(
                    "no space for `{}` even after a selective reset",
                    self.graph.nodes[first].name
                ))
            })?;
            claim(&mut self.occ, &rows0, c0, w);
            let mut claimed = (h0 * w) as u64;
            let mut placed = vec![PlacedLut { node: first, rows: rows0 }];
            // Stack as many classmates as fit in this band; leftovers
            // start a fresh group.
            while let Some(&next) = pending.front() {
                let h = self.height(next);
                let q = qualifying_rows(&self.occ, c0, w, self.params.spacing);
                if q.len() < h as usize {
                    break;
                }
                let rows_n = q[..h as usize].to_vec();
                claim(&mut self.occ, &rows_n, c0, w);
                placed.push(PlacedLut { node: next, rows: rows_n });
                claimed += (h * w) as u64;
                pending.pop_front();
            }
            let expected: u64 = placed
                .iter()
                .map(|p| self.height(p.node) as u64 * w as u64)
                .sum();
            self.compute_group(&placed, k_eff, c0)?;
            self.groups.push(GroupRecord {
                level: self.graph.nodes[first].level,
                members: placed.iter().map(|p| p.node).collect(),
                claimed_cells: claimed,
                expected_cells: expected,
            });
        }
        Ok(())
    }

    fn align_group(&self, matrix: &InputMatrix) -> Result<InputMatrix, MapError> {
        Ok(match self.params.align {
            AlignChoice::Greedy => greedy_align(matrix),
            AlignChoice::Exact => {
                if matrix.rows.len() <= EXACT_MAX_ROWS && matrix.width() <= EXACT_MAX_COLS {
                    exact_align(matrix)?
                } else {
                    greedy_align(matrix)
                }
            }
        })
    }

    fn compute_group(
        &mut self,
        placed: &[PlacedLut],
        k_eff: u32,
        c0: u32,
    ) -> Result<(), MapError> {
        let dst_col = c0 + k_eff;
        let matrix = InputMatrix::new(
            placed
                .iter()
                .map(|p| {
                    self.graph.nodes[p.node]
                        .cover
                        .variables
                        .iter()
                        .cloned()
                        .map(Some)
                        .collect()
                })
                .collect(),
        )
        .expect("class members share one width");
        let aligned = self.align_group(&matrix)?;
        let nons: Vec<NonMatrix> = placed
            .iter()
            .map(|p| sop_to_non(&self.graph.nodes[p.node].cover))
            .collect::<Result<_, _>>()?;

        // Deliver inputs column by column; within a column, variables in
        // order of first appearance (top to bottom).
        for col in 0..k_eff as usize {
            let mut vars: Vec<String> = Vec::new();
            for m in 0..placed.len() {
                if let Some(v) = &aligned.rows[m][col] {
                    if !vars.contains(v) {
                        vars.push(v.clone());
                    }
                }
            }
            for var in vars {
                let source_is_pi = self.graph.is_primary_input(&var);
                let mut targets: Vec<DeliveryTarget> = Vec::new();
                for (m, p) in placed.iter().enumerate() {
                    if aligned.rows[m][col].as_deref() != Some(var.as_str()) {
                        continue;
                    }
                    let pos = self.graph.nodes[p.node]
                        .cover
                        .variables
                        .iter()
                        .position(|v| *v == var)
                        .unwrap();
                    for (j, marks) in nons[m].rows.iter().enumerate() {
                        // POS cells need the value itself, NEG cells its
                        // complement; intermediate sources store the
                        // complement already.
                        let flip = match marks[pos] {
                            NonMark::Absent => continue,
                            NonMark::Neg => source_is_pi,
                            NonMark::Pos => !source_is_pi,
                        };
                        targets.push(DeliveryTarget {
                            at: (p.rows[j], c0 + col as u32),
                            flip,
                        });
                    }
                }
                if targets.is_empty() {
                    continue;
                }
                targets.sort_by_key(|t| t.at.0);
                let source = if source_is_pi {
                    InputSource::Pi(var.clone())
                } else {
                    let idx = self
                        .graph
                        .node_index(&var)
                        .expect("fan-in is a PI or an earlier node");
                    InputSource::Cell(self.node_cell[idx].expect("fan-in already computed"))
                };
                deliver_input(&mut self.occ, &source, &targets, &mut self.out)?;
            }
        }

        // One HNOR across every product row, then one VNOR per member.
        let mut all_rows = BTreeSet::new();
        for p in placed {
            all_rows.extend(p.product_rows().iter().copied());
        }
        self.out.push(
            InstrClass::Compute,
            Instruction::Hnor {
                rows: all_rows,
                src_cols: (c0..dst_col).collect(),
                dst_col,
            },
        );
        for p in placed {
            self.out.push(
                InstrClass::Compute,
                Instruction::Vnor {
                    col: dst_col,
                    src_rows: p.product_rows().iter().copied().collect(),
                    dst_row: p.output_row(),
                },
            );
        }

        // Retire the footprints: consumed literals and row-NOR results are
        // dead, never-written absent cells are free again, outputs live.
        for (m, p) in placed.iter().enumerate() {
            let out_row = p.output_row();
            for (j, marks) in nons[m].rows.iter().enumerate() {
                for l in 0..k_eff as usize {
                    let state = match &aligned.rows[m][l] {
                        None => CellState::Free,
                        Some(v) => {
                            let pos = self.graph.nodes[p.node]
                                .cover
                                .variables
                                .iter()
                                .position(|x| x == v)
                                .unwrap();
                            if marks[pos] == NonMark::Absent {
                                CellState::Free
                            } else {
                                CellState::Dead
                            }
                        }
                    };
                    self.occ.set((p.rows[j], c0 + l as u32), state);
                }
                self.occ.set((p.rows[j], dst_col), CellState::Dead);
            }
            for l in 0..k_eff {
                self.occ.set((out_row, c0 + l), CellState::Free);
            }
            let out_cell = (out_row, dst_col);
            self.occ.set(out_cell, CellState::Live);
            self.node_cell[p.node] = Some(out_cell);

            // True-polarity outputs for POs via one final NOT each.
            if let Some(po_names) = self.pos_of_node.get(&p.node).cloned() {
                for po in po_names {
                    let dst = (1..=self.params.cols)
                        .find(|&c| self.occ.is_free((out_row, c)))
                        .map(|c| (out_row, c))
                        .or_else(|| {
                            (1..=self.params.rows)
                                .find(|&r| self.occ.is_free((r, dst_col)))
                                .map(|r| (r, dst_col))
                        })
                        .ok_or_else(|| {
                            MapError::Unmappable(format!("no cell for output `{}`", po))
                        })?;
                    self.out.push(
                        InstrClass::Compute,
                        Instruction::Not {
                            src: out_cell,
                            dst,
                        },
                    );
                    self.occ.set(dst, CellState::Live);
                    self.po_cells.insert(po, dst);
                }
            }
            if self.uses[p.node] == 0 {
                self.occ.set(out_cell, CellState::Dead);
            }
        }

        // Fan-ins consumed by this group may now be dead.
        for p in placed {
            for var in &self.graph.nodes[p.node].cover.variables {
                if let Some(i) = self.graph.node_index(var) {
                    self.uses[i] -= 1;
                    if self.uses[i] == 0 {
                        self.occ
                            .set(self.node_cell[i].expect("consumed node was computed"), CellState::Dead);
                    }
                }
            }
        }
        Ok(())
    }
}
