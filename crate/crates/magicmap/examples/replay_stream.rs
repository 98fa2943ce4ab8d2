//! Round-trip the textual instruction format: map a benchmark, emit the
//! stream as text, parse it back, and replay it on the simulator.

use std::collections::BTreeMap;
use std::path::Path;

use magicmap::fabric::{read_outputs, run_stream};
use magicmap::{map_benchmark, parse_blif, AlignChoice, InstructionStream, RunConfig, VerifyMode};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("benchmarks/full_adder.blif");
    let blif = std::fs::read_to_string(&path).expect("benchmark file");
    let nl = parse_blif(&blif).expect("valid BLIF");

    let outcome = map_benchmark(
        &nl,
        &RunConfig {
            benchmark: "full_adder".to_string(),
            rows: 8,
            cols: 8,
            k: 4,
            spacing: 0,
            align: AlignChoice::Greedy,
            verify: VerifyMode::Exhaustive,
        },
    )
    .expect("maps onto 8x8");

    let text = outcome.mapping.stream.to_text();
    let replayed = InstructionStream::parse_text(&text).expect("round-trips");
    assert_eq!(replayed.to_text(), text);
    println!("{}", text);

    let assignment: BTreeMap<String, bool> = [("a", true), ("b", true), ("cin", true)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let initial = magicmap::Crossbar::pristine(replayed.rows, replayed.cols);
    let (after, cycles) = run_stream(initial, &replayed, &assignment).unwrap();
    let outputs = read_outputs(&after, &replayed).unwrap();
    println!("replayed 1+1+1 in {} cycles:", cycles);
    for (po, v) in outputs {
        println!("  {} = {}", po, v as u8);
    }
}
