//! The full pipeline on the bundled 8-to-1 selector: parse, cover with
//! 4-input LUTs, map onto an 8x8 crossbar, verify exhaustively over all
//! 4096 input assignments, and print the metrics report.

use std::path::Path;

use magicmap::{map_benchmark, parse_blif, AlignChoice, RunConfig, VerifyMode};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("benchmarks/cm151a.blif");
    let text = std::fs::read_to_string(&path).expect("benchmark file");
    let nl = parse_blif(&text).expect("valid BLIF");

    let outcome = map_benchmark(
        &nl,
        &RunConfig {
            benchmark: "cm151a".to_string(),
            rows: 8,
            cols: 8,
            k: 4,
            spacing: 0,
            align: AlignChoice::Greedy,
            verify: VerifyMode::Exhaustive,
        },
    )
    .expect("maps onto 8x8");

    println!("--- instruction stream (first 12 of {} cycles) ---", outcome.report.cycles);
    for line in outcome.mapping.stream.to_text().lines().take(14) {
        println!("{}", line);
    }
    println!("...\n");
    println!("groups formed: {}", outcome.mapping.groups.len());
    println!("selective resets: {}", outcome.mapping.resets);
    println!("\n--- report ---");
    println!("{}", serde_json::to_string_pretty(&outcome.report).unwrap());
}
