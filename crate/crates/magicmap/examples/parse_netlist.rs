//! Parse a bundled BLIF benchmark, print its structure, and evaluate it
//! on one input assignment.

use std::collections::BTreeMap;
use std::path::Path;

use magicmap::parse_blif;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("benchmarks/full_adder.blif");
    let text = std::fs::read_to_string(&path).expect("benchmark file");
    let nl = parse_blif(&text).expect("valid BLIF");

    println!("model:   {}", nl.name);
    println!("inputs:  {}", nl.primary_inputs.join(" "));
    println!("outputs: {}", nl.primary_outputs.join(" "));
    for (name, cover) in nl.nodes() {
        println!(
            "node {:5} = SoP over ({}) with {} product term(s)",
            name,
            cover.variables.join(", "),
            cover.cubes.len()
        );
    }

    let assignment: BTreeMap<String, bool> = [("a", true), ("b", true), ("cin", false)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let outputs = nl.evaluate(&assignment).expect("complete assignment");
    println!("\n1 + 1 + 0:");
    for (po, v) in outputs {
        println!("  {} = {}", po, v as u8);
    }
}
