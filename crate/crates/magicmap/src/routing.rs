//! Moving values across the crossbar: parity-aware A* copy paths made of
//! NOT hops, plus input delivery (direct writes for primary inputs,
//! copy-then-vertical-fanout for intermediates).

use thiserror::Error;

use crate::fabric::{InstrClass, Instruction, StreamBuilder, WriteValue};
use crate::occupancy::{CellState, Coord, Occupancy};

/// Required hop-count parity of a copy path. Each NOT hop inverts the
/// value, so parity decides the delivered polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Any,
}

impl Parity {
    fn admits(self, hops: usize) -> bool {
        match self {
            Parity::Even => hops % 2 == 0,
            Parity::Odd => hops % 2 == 1,
            Parity::Any => true,
        }
    }
}

/// A copy path from source to destination; consecutive cells share a row
/// or a column and every cell after the source was free beforehand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyPath {
    /// Source first, destination last.
    pub cells: Vec<Coord>,
}

impl CopyPath {
    pub fn hops(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn parity_is_odd(&self) -> bool {
        self.hops() % 2 == 1
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RouteError {
    #[error("no copy path from ({0},{1}) to ({2},{3})")]
    NoPath(u32, u32, u32, u32),
    #[error("no free bounce cell available in column {0}")]
    NoBounceCell(u32),
    #[error("destination ({0},{1}) is not routable")]
    BadDestination(u32, u32),
}

/// Remaining-cost estimate: 0 at the destination, 1 when sharing its row
/// or column, 2 otherwise. Admissible for the row/column hop relation.
fn estimate(at: Coord, dst: Coord) -> u32 {
    if at == dst {
        0
    } else if at.0 == dst.0 || at.1 == dst.1 {
        1
    } else {
        2
    }
}

/// Shortest parity-respecting copy path from `src` to `dst` by A* search.
/// Intermediate hops land only on free cells; the destination itself may
/// be a reserved footprint cell.
pub fn astar_copy(
    occ: &Occupancy,
    src: Coord,
    dst: Coord,
    parity: Parity,
) -> Result<CopyPath, RouteError> {
    use std::cmp::Reverse;
    use std::collections::{BinaryHeap, HashMap};

    if !occ.in_range(dst) || !occ.in_range(src) || src == dst {
        return Err(RouteError::BadDestination(dst.0, dst.1));
    }

    let hoppable = |at: Coord| at == dst || occ.is_free(at);

    // state = (cell, hop parity); cost = hops so far
    type State = (u32, u32, u8);
    let start: State = (src.0, src.1, 0);
    let mut best_g: HashMap<State, u32> = HashMap::new();
    best_g.insert(start, 0);
    let mut came_from: HashMap<State, State> = HashMap::new();
    // heap entries ordered by (f, g, state) for deterministic expansion
    let mut open: BinaryHeap<Reverse<(u32, u32, State)>> = BinaryHeap::new();
    open.push(Reverse((estimate(src, dst), 0, start)));

    while let Some(Reverse((_, g, state))) = open.pop() {
        if best_g.get(&state) != Some(&g) {
            continue; // stale entry
        }
        let (r, c, p) = state;
        if (r, c) == dst && parity.admits(g as usize) {
            let mut cells = vec![(r, c)];
            let mut cur = state;
            while let Some(&prev) = came_from.get(&cur) {
                cells.push((prev.0, prev.1));
                cur = prev;
            }
            cells.reverse();
            return Ok(CopyPath { cells });
        }
        let push_neighbor = |next: Coord,
                                 best_g: &mut HashMap<State, u32>,
                                 came_from: &mut HashMap<State, State>,
                                 open: &mut BinaryHeap<Reverse<(u32, u32, State)>>| {
            let ns: State = (next.0, next.1, 1 - p);
            let ng = g + 1;
            if best_g.get(&ns).map_or(true, |&old| ng < old) {
                best_g.insert(ns, ng);
                came_from.insert(ns, state);
                open.push(Reverse((ng + estimate(next, dst), ng, ns)));
            }
        };
        for nc in 1..=occ.cols() {
            if nc != c && hoppable((r, nc)) {
                push_neighbor((r, nc), &mut best_g, &mut came_from, &mut open);
            }
        }
        for nr in 1..=occ.rows() {
            if nr != r && hoppable((nr, c)) {
                push_neighbor((nr, c), &mut best_g, &mut came_from, &mut open);
            }
        }
    }
    Err(RouteError::NoPath(src.0, src.1, dst.0, dst.1))
}

/// Where an input value comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    /// A primary input; written directly with the needed polarity.
    Pi(String),
    /// The authoritative cell of a live intermediate.
    Cell(Coord),
}

/// One literal cell to fill. `flip` is relative to the source: for a PI it
/// requests the complemented literal (`~PI:x`); for an intermediate it
/// requests the complement of the value stored at the source cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeliveryTarget {
    pub at: Coord,
    pub flip: bool,
}

/// Deliver one input variable to all of its literal cells in a single
/// aligned column. Emits WRITE instructions for a PI, or a parity-aware
/// A* copy plus vertical NOT fanout for an intermediate, updating the
/// occupancy as cells are consumed.
pub fn deliver_input(
    occ: &mut Occupancy,
    source: &InputSource,
    targets: &[DeliveryTarget],
    out: &mut StreamBuilder,
) -> Result<(), RouteError> {
    assert!(!targets.is_empty());
    let col = targets[0].at.1;
    debug_assert!(targets.iter().all(|t| t.at.1 == col));
    debug_assert!(targets.windows(2).all(|w| w[0].at.0 < w[1].at.0));

    match source {
        InputSource::Pi(name) => {
            for t in targets {
                out.push(
                    InstrClass::Write,
                    Instruction::Write {
                        r: t.at.0,
                        c: t.at.1,
                        value: WriteValue::Pi {
                            name: name.clone(),
                            negated: t.flip,
                        },
                    },
                );
                occ.set(t.at, CellState::Live);
            }
            Ok(())
        }
        InputSource::Cell(src) => {
            let first = targets[0];
            let parity = if first.flip { Parity::Odd } else { Parity::Even };
            let path = astar_copy(occ, *src, first.at, parity)?;
            for pair in path.cells.windows(2) {
                out.push(
                    InstrClass::Copy,
                    Instruction::Not {
                        src: pair[0],
                        dst: pair[1],
                    },
                );
            }
            // interior hop cells now hold garbage; the landing cell is live
            for &cell in &path.cells[1..path.cells.len() - 1] {
                occ.set(cell, CellState::Dead);
            }
            occ.set(first.at, CellState::Live);

            for t in &targets[1..] {
                if t.flip != first.flip {
                    // one vertical NOT flips relative to the landing cell
                    out.push(
                        InstrClass::Copy,
                        Instruction::Not {
                            src: first.at,
                            dst: t.at,
                        },
                    );
                } else {
                    // same polarity as the landing cell: bounce through the
                    // nearest free cell in the column
                    let bounce = nearest_free_in_col(occ, col, t.at.0)
                        .ok_or(RouteError::NoBounceCell(col))?;
                    out.push(
                        InstrClass::Copy,
                        Instruction::Not {
                            src: first.at,
                            dst: bounce,
                        },
                    );
                    out.push(
                        InstrClass::Copy,
                        Instruction::Not {
                            src: bounce,
                            dst: t.at,
                        },
                    );
                    occ.set(bounce, CellState::Dead);
                }
                occ.set(t.at, CellState::Live);
            }
            Ok(())
        }
    }
}

/// Nearest free cell in a column, ties toward the lower row index.
fn nearest_free_in_col(occ: &Occupancy, col: u32, near_row: u32) -> Option<Coord> {
    (1..=occ.rows())
        .filter(|&r| occ.is_free((r, col)))
        .min_by_key(|&r| (r.abs_diff(near_row), r))
        .map(|r| (r, col))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fabric::{Crossbar, InstructionStream, Role};
    use std::collections::BTreeMap;

    #[test]
    fn single_hop_same_row() {
        let occ = Occupancy::new(4, 4);
        let path = astar_copy(&occ, (2, 1), (2, 4), Parity::Any).unwrap();
        assert_eq!(path.hops(), 1);
        assert!(path.parity_is_odd());
    }

    #[test]
    fn parity_constraint_lengthens_path() {
        let occ = Occupancy::new(8, 8);
        // a same-row hop is 1; an even path needs a detour
        let odd = astar_copy(&occ, (3, 4), (3, 1), Parity::Odd).unwrap();
        assert_eq!(odd.hops(), 1);
        let even = astar_copy(&occ, (3, 4), (3, 1), Parity::Even).unwrap();
        assert_eq!(even.hops(), 2);
        assert!(!even.parity_is_odd());
    }

    #[test]
    fn diagonal_needs_two_hops() {
        let occ = Occupancy::new(8, 8);
        let path = astar_copy(&occ, (3, 4), (2, 1), Parity::Even).unwrap();
        assert_eq!(path.hops(), 2);
        let odd = astar_copy(&occ, (3, 4), (2, 1), Parity::Odd).unwrap();
        assert_eq!(odd.hops(), 3);
    }

    #[test]
    fn path_avoids_blocked_cells() {
        let mut occ = Occupancy::new(3, 3);
        // wall off row 2 except the destination column
        occ.set((2, 1), CellState::Dead);
        occ.set((2, 2), CellState::Dead);
        let path = astar_copy(&occ, (1, 1), (3, 1), Parity::Any).unwrap();
        assert_eq!(path.hops(), 1);
        assert!(path.cells.iter().all(|&c| c == (1, 1) || c == (3, 1)));
    }

    #[test]
    fn no_path_is_an_error() {
        let mut occ = Occupancy::new(2, 2);
        occ.set((1, 2), CellState::Dead);
        occ.set((2, 1), CellState::Dead);
        // destination diagonal from source with both connecting cells dead
        assert_eq!(
            astar_copy(&occ, (1, 1), (2, 2), Parity::Any),
            Err(RouteError::NoPath(1, 1, 2, 2))
        );
    }

    /// BFS over the identical neighbor relation, used as the optimality
    /// oracle for the A* implementation.
    pub(crate) fn bfs_oracle(
        occ: &Occupancy,
        src: Coord,
        dst: Coord,
        parity: Parity,
    ) -> Option<usize> {
        use std::collections::VecDeque;
        let hoppable = |at: Coord| at == dst || occ.is_free(at);
        let mut seen = vec![[false; 2]; (occ.rows() * occ.cols() + occ.cols()) as usize + 1];
        let key = |(r, c): Coord| ((r - 1) * occ.cols() + (c - 1)) as usize;
        let mut queue = VecDeque::new();
        queue.push_back((src, 0usize));
        seen[key(src)][0] = true;
        while let Some((at, hops)) = queue.pop_front() {
            if at == dst && parity.admits(hops) {
                return Some(hops);
            }
            let mut visit = |next: Coord, queue: &mut VecDeque<(Coord, usize)>| {
                if hoppable(next) && !seen[key(next)][(hops + 1) % 2] {
                    seen[key(next)][(hops + 1) % 2] = true;
                    queue.push_back((next, hops + 1));
                }
            };
            for c in 1..=occ.cols() {
                if c != at.1 {
                    visit((at.0, c), &mut queue);
                }
            }
            for r in 1..=occ.rows() {
                if r != at.0 {
                    visit((r, at.1), &mut queue);
                }
            }
        }
        None
    }

    #[test]
    fn astar_matches_bfs_on_random_boards() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let size = *[8u32, 16].iter().nth(rng.gen_range(0..2)).unwrap();
            let mut occ = Occupancy::new(size, size);
            for r in 1..=size {
                for c in 1..=size {
                    if rng.gen_bool(0.3) {
                        occ.set((r, c), CellState::Dead);
                    }
                }
            }
            let src = (rng.gen_range(1..=size), rng.gen_range(1..=size));
            let mut dst = src;
            while dst == src {
                dst = (rng.gen_range(1..=size), rng.gen_range(1..=size));
            }
            occ.set(src, CellState::Live);
            occ.set(dst, CellState::Reserved);
            let parity = match rng.gen_range(0..3) {
                0 => Parity::Even,
                1 => Parity::Odd,
                _ => Parity::Any,
            };
            let expected = bfs_oracle(&occ, src, dst, parity);
            match astar_copy(&occ, src, dst, parity) {
                Ok(path) => {
                    assert_eq!(Some(path.hops()), expected);
                    assert!(parity.admits(path.hops()));
                    for pair in path.cells.windows(2) {
                        assert!(pair[0].0 == pair[1].0 || pair[0].1 == pair[1].1);
                    }
                }
                Err(_) => assert_eq!(expected, None),
            }
        }
    }

    #[test]
    fn parity_soundness_on_executed_paths() {
        // after executing a path of length L on value v, the destination
        // holds v xor (L mod 2)
        for v in [false, true] {
            for parity in [Parity::Even, Parity::Odd] {
                let mut occ = Occupancy::new(6, 6);
                occ.set((2, 2), CellState::Live);
                occ.set((5, 5), CellState::Reserved);
                let mut out = StreamBuilder::new();
                deliver_input(
                    &mut occ,
                    &InputSource::Cell((2, 2)),
                    &[DeliveryTarget {
                        at: (5, 5),
                        flip: parity == Parity::Odd,
                    }],
                    &mut out,
                )
                .unwrap();
                let stream = InstructionStream {
                    rows: 6,
                    cols: 6,
                    po_map: vec![],
                    instructions: out.into_instructions(),
                };
                let mut xbar = Crossbar::pristine(6, 6);
                crate::fabric::execute(
                    &mut xbar,
                    &crate::fabric::Instruction::Write {
                        r: 2,
                        c: 2,
                        value: WriteValue::Const(v),
                    },
                    &BTreeMap::new(),
                )
                .unwrap();
                let (after, _) = crate::fabric::run_stream(xbar, &stream, &BTreeMap::new()).unwrap();
                let hops = stream.instructions.len();
                assert_eq!(
                    after.cell(5, 5).unwrap().value,
                    Some(v ^ (hops % 2 == 1))
                );
                assert_eq!(after.cell(5, 5).unwrap().role, Role::Intermediate);
            }
        }
    }

    #[test]
    fn pi_delivery_is_direct_writes() {
        let mut occ = Occupancy::new(8, 8);
        occ.set((2, 3), CellState::Reserved);
        occ.set((5, 3), CellState::Reserved);
        let mut out = StreamBuilder::new();
        deliver_input(
            &mut occ,
            &InputSource::Pi("j".into()),
            &[
                DeliveryTarget { at: (2, 3), flip: true },
                DeliveryTarget { at: (5, 3), flip: true },
            ],
            &mut out,
        )
        .unwrap();
        let instrs = out.into_instructions();
        assert_eq!(instrs.len(), 2);
        assert_eq!(instrs[0].cycle, 0);
        assert_eq!(instrs[1].cycle, 1);
        assert_eq!(
            instrs[0].instr,
            Instruction::Write {
                r: 2,
                c: 3,
                value: WriteValue::Pi {
                    name: "j".into(),
                    negated: true
                }
            }
        );
        assert_eq!(occ.get((2, 3)), CellState::Live);
    }

    #[test]
    fn mixed_polarity_fanout_uses_bounce() {
        let mut occ = Occupancy::new(8, 8);
        occ.set((3, 1), CellState::Live); // source, sharing the first target's row
        for r in [3, 5, 7] {
            occ.set((r, 4), CellState::Reserved);
        }
        let mut out = StreamBuilder::new();
        deliver_input(
            &mut occ,
            &InputSource::Cell((3, 1)),
            &[
                DeliveryTarget { at: (3, 4), flip: true },  // odd path
                DeliveryTarget { at: (5, 4), flip: false }, // one vertical NOT
                DeliveryTarget { at: (7, 4), flip: true },  // needs a bounce
            ],
            &mut out,
        )
        .unwrap();
        let instrs = out.into_instructions();
        // 1 copy hop + 1 direct fanout NOT + 2 bounce NOTs
        assert_eq!(instrs.len(), 4);
        let stream = InstructionStream {
            rows: 8,
            cols: 8,
            po_map: vec![],
            instructions: instrs,
        };
        for v in [false, true] {
            let mut xbar = Crossbar::pristine(8, 8);
            crate::fabric::execute(
                &mut xbar,
                &crate::fabric::Instruction::Write {
                    r: 3,
                    c: 1,
                    value: WriteValue::Const(v),
                },
                &BTreeMap::new(),
            )
            .unwrap();
            let (after, _) = crate::fabric::run_stream(xbar, &stream, &BTreeMap::new()).unwrap();
            assert_eq!(after.cell(3, 4).unwrap().value, Some(!v));
            assert_eq!(after.cell(5, 4).unwrap().value, Some(v));
            assert_eq!(after.cell(7, 4).unwrap().value, Some(!v));
        }
    }
}
