//! Hand-build the instruction stream for one LUT — F = a&!b | !a&b&c —
//! and run it on the cycle-accurate simulator for every assignment.
//!
//! Literal cells hold the *flipped* cube: a literal that must be 1 is
//! written complemented, one that must be 0 uncomplemented, don't-cares
//! are never written. One horizontal NOR per product row into a shared
//! destination column, one vertical NOR over the row results (yielding
//! !F), and a final NOT recovers F.

use std::collections::BTreeMap;

use magicmap::fabric::{
    read_outputs, run_stream, Crossbar, InstrClass, Instruction, StreamBuilder, WriteValue,
};

fn pi(name: &str, negated: bool) -> WriteValue {
    WriteValue::Pi {
        name: name.to_string(),
        negated,
    }
}

fn main() {
    let mut b = StreamBuilder::new();
    // product row 1: a & !b  ->  cells !a, b
    b.push(InstrClass::Write, Instruction::Write { r: 1, c: 1, value: pi("a", true) });
    b.push(InstrClass::Write, Instruction::Write { r: 1, c: 2, value: pi("b", false) });
    // product row 2: !a & b & c  ->  cells a, !b, !c
    b.push(InstrClass::Write, Instruction::Write { r: 2, c: 1, value: pi("a", false) });
    b.push(InstrClass::Write, Instruction::Write { r: 2, c: 2, value: pi("b", true) });
    b.push(InstrClass::Write, Instruction::Write { r: 2, c: 3, value: pi("c", true) });
    // row NORs into column 4, column NOR of those into row 3 (!F), then F
    b.push(
        InstrClass::Compute,
        Instruction::Hnor {
            rows: [1, 2].into(),
            src_cols: [1, 2, 3].into(),
            dst_col: 4,
        },
    );
    b.push(
        InstrClass::Compute,
        Instruction::Vnor {
            col: 4,
            src_rows: [1, 2].into(),
            dst_row: 3,
        },
    );
    b.push(
        InstrClass::Compute,
        Instruction::Not { src: (3, 4), dst: (3, 2) },
    );
    let stream = b.finish(4, 4, vec![("F".to_string(), 3, 2)]);

    println!("{}", stream.to_text());

    for bits in 0..8u32 {
        let (a, bb, c) = (bits & 4 != 0, bits & 2 != 0, bits & 1 != 0);
        let assignment: BTreeMap<String, bool> =
            [("a", a), ("b", bb), ("c", c)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
        let (after, cycles) = run_stream(Crossbar::pristine(4, 4), &stream, &assignment).unwrap();
        let outputs = read_outputs(&after, &stream).unwrap();
        let expected = (a && !bb) || (!a && bb && c);
        assert_eq!(outputs["F"], expected);
        println!(
            "a={} b={} c={}  ->  F={}  ({} cycles)",
            a as u8, bb as u8, c as u8, outputs["F"] as u8, cycles
        );
    }
}
