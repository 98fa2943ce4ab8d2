//! Input-column alignment for a group of stacked LUTs: shared variables
//! pulled into common columns cut the number of input writes.

use magicmap::alignment::{alignment_score, exact_align, greedy_align, InputMatrix};

fn show(label: &str, m: &InputMatrix) {
    println!("{} (score {}):", label, alignment_score(m));
    for row in &m.rows {
        let cells: Vec<&str> = row.iter().map(|s| s.as_deref().unwrap_or("-")).collect();
        println!("  [{}]", cells.join(" "));
    }
    println!();
}

fn main() {
    let original = InputMatrix::from_names(&[
        &["a", "b", "c"],
        &["c", "a", "b"],
        &["b", "d", "a"],
    ]);
    show("original", &original);
    show("greedy", &greedy_align(&original));
    show("exact", &exact_align(&original).unwrap());
}
