//! Sweep one benchmark across crossbar sizes and spacing values and
//! print the cycle count and area-delay product of each combination.

use std::path::Path;

use magicmap::driver::format_sweep_table;
use magicmap::{parse_blif, sweep, AlignChoice, VerifyMode};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("benchmarks/cm151a.blif");
    let text = std::fs::read_to_string(&path).expect("benchmark file");
    let nl = parse_blif(&text).expect("valid BLIF");

    let rows = sweep(
        &nl,
        "cm151a",
        &[8, 16, 32],
        &[8, 16, 32],
        &[4],
        &[0, 2],
        AlignChoice::Greedy,
        VerifyMode::Random { n: 256, seed: 7 },
    );
    print!("{}", format_sweep_table(&rows));
}
