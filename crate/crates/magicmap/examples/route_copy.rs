//! Parity-aware A* routing: move a value across a partially occupied
//! crossbar with an even or odd number of inverting NOT hops.

use magicmap::occupancy::{CellState, Occupancy};
use magicmap::routing::{astar_copy, Parity};

fn show(occ: &Occupancy, path: &[(u32, u32)]) {
    for r in 1..=occ.rows() {
        let line: String = (1..=occ.cols())
            .map(|c| {
                if path.contains(&(r, c)) {
                    '*'
                } else if occ.is_free((r, c)) {
                    '.'
                } else {
                    '#'
                }
            })
            .collect();
        println!("  {}", line);
    }
}

fn main() {
    let mut occ = Occupancy::new(8, 8);
    // a wall of dead cells with one gap
    for r in 1..=7 {
        occ.set((r, 4), CellState::Dead);
    }
    occ.set((2, 2), CellState::Live); // the source value
    let src = (2, 2);
    let dst = (6, 7);

    for (label, parity) in [("even", Parity::Even), ("odd", Parity::Odd)] {
        let path = astar_copy(&occ, src, dst, parity).expect("path exists");
        println!(
            "{} parity: {} hop(s), delivered value is {}:",
            label,
            path.hops(),
            if path.parity_is_odd() { "inverted" } else { "unchanged" }
        );
        show(&occ, &path.cells);
        println!();
    }
}
