//! Show the NOR-of-NORs literal matrix of a small cover and check it
//! against direct SoP evaluation on every assignment.

use std::collections::BTreeMap;

use magicmap::non::{evaluate_non, sop_to_non};
use magicmap::parse_blif;

fn main() {
    // F = a & !b  |  !a & b & c
    let nl = parse_blif(
        ".model f\n.inputs a b c\n.outputs F\n.names a b c F\n10- 1\n011 1\n.end",
    )
    .unwrap();
    let cover = nl.node("F").unwrap();
    let non = sop_to_non(cover).unwrap();

    println!("F = a & !b  |  !a & b & c\n");
    println!("{}", non);

    println!("assignment  sop  non");
    for bits in 0..8u32 {
        let (a, b, c) = (bits & 4 != 0, bits & 2 != 0, bits & 1 != 0);
        let assignment: BTreeMap<String, bool> =
            [("a", a), ("b", b), ("c", c)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
        let direct = cover.eval_with(|s| assignment[s]);
        let via_non = evaluate_non(&non, &assignment).unwrap();
        assert_eq!(direct, via_non);
        println!(
            "a={} b={} c={}   {}    {}",
            a as u8, b as u8, c as u8, direct as u8, via_non as u8
        );
    }
    println!("\nNoN form agrees with the SoP on all 8 assignments.");
}
