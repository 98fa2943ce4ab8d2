//! Mapper-side view of the crossbar: which cells are free, reserved by a
//! placed footprint, holding a live value, or dead garbage awaiting reset.
//!
//! This mirrors the simulator state but carries the extra liveness
//! information the mapper needs; the simulator itself only sees
//! instructions.

/// 1-based coordinates, matching the crossbar convention.
pub type Coord = (u32, u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellState {
    /// Pristine reset state; usable as a NOR destination or copy hop.
    Free,
    /// Claimed by a placed footprint but not yet written (still pristine
    /// in the simulator). Absent literal cells stay in this state until
    /// their group computes.
    Reserved,
    /// Holds a value still needed (an input awaiting its group's compute,
    /// a live intermediate, or a finished primary output).
    Live,
    /// Written garbage; unusable until a reset clears it.
    Dead,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    rows: u32,
    cols: u32,
    states: Vec<CellState>,
}

impl Occupancy {
    pub fn new(rows: u32, cols: u32) -> Self {
        Occupancy {
            rows,
            cols,
            states: vec![CellState::Free; (rows * cols) as usize],
        }
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn in_range(&self, (r, c): Coord) -> bool {
        (1..=self.rows).contains(&r) && (1..=self.cols).contains(&c)
    }

    fn idx(&self, (r, c): Coord) -> usize {
        debug_assert!(self.in_range((r, c)));
        ((r - 1) * self.cols + (c - 1)) as usize
    }

    pub fn get(&self, at: Coord) -> CellState {
        self.states[self.idx(at)]
    }

    pub fn set(&mut self, at: Coord, state: CellState) {
        let i = self.idx(at);
        self.states[i] = state;
    }

    pub fn is_free(&self, at: Coord) -> bool {
        self.in_range(at) && self.get(at) == CellState::Free
    }

    pub fn count(&self, state: CellState) -> usize {
        self.states.iter().filter(|&&s| s == state).count()
    }

    /// Rows containing at least one Live cell, ascending.
    pub fn live_rows(&self) -> Vec<u32> {
        (1..=self.rows)
            .filter(|&r| (1..=self.cols).any(|c| self.get((r, c)) == CellState::Live))
            .collect()
    }

    /// Columns containing at least one Live cell, ascending.
    pub fn live_cols(&self) -> Vec<u32> {
        (1..=self.cols)
            .filter(|&c| (1..=self.rows).any(|r| self.get((r, c)) == CellState::Live))
            .collect()
    }

    /// Apply a row-wise reset: everything outside the excluded rows
    /// becomes Free.
    pub fn reset_rows(&mut self, except: &std::collections::BTreeSet<u32>) {
        for r in 1..=self.rows {
            if except.contains(&r) {
                continue;
            }
            for c in 1..=self.cols {
                self.set((r, c), CellState::Free);
            }
        }
    }

    /// Apply a column-wise reset: everything outside the excluded columns
    /// becomes Free.
    pub fn reset_cols(&mut self, except: &std::collections::BTreeSet<u32>) {
        for c in 1..=self.cols {
            if except.contains(&c) {
                continue;
            }
            for r in 1..=self.rows {
                self.set((r, c), CellState::Free);
            }
        }
    }
}
