//! NOR-of-NORs form: the per-LUT literal matrix written into the crossbar,
//! plus an evaluation oracle for it.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::netlist::{CubeMark, NetlistError, SopCover};

/// A literal cell of the NoN matrix. The stored mark is the *flipped*
/// literal that gets written into the crossbar: `Pos` cells hold the
/// variable's value, `Neg` cells its complement, `Absent` cells are never
/// written and stay in the reset state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonMark {
    Pos,
    Neg,
    Absent,
}

/// Product-term x literal matrix in NOR-of-NORs form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonMatrix {
    pub variables: Vec<String>,
    pub rows: Vec<Vec<NonMark>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NonError {
    #[error("constant cover has no NoN form (constants are folded upstream)")]
    ConstantCover,
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Convert an on-set SoP cover to its NoN literal matrix: a cube mark
/// requiring 1 flips to `Neg`, a mark requiring 0 flips to `Pos`, and
/// don't-cares become `Absent`.
pub fn sop_to_non(cover: &SopCover) -> Result<NonMatrix, NonError> {
    if cover.as_constant().is_some() {
        return Err(NonError::ConstantCover);
    }
    let rows = cover
        .cubes
        .iter()
        .map(|cube| {
            cube.iter()
                .map(|m| match m {
                    CubeMark::One => NonMark::Neg,
                    CubeMark::Zero => NonMark::Pos,
                    CubeMark::DontCare => NonMark::Absent,
                })
                .collect()
        })
        .collect();
    Ok(NonMatrix {
        variables: cover.variables.clone(),
        rows,
    })
}

/// Evaluate the NoN form: NOT( NOR over rows of ( NOR over the row's
/// non-absent literal values ) ). Absent cells hold the reset value and are
/// absorbed by the row NOR.
pub fn evaluate_non(
    non: &NonMatrix,
    assignment: &BTreeMap<String, bool>,
) -> Result<bool, NonError> {
    let mut values = Vec::with_capacity(non.variables.len());
    for v in &non.variables {
        match assignment.get(v) {
            Some(&b) => values.push(b),
            None => return Err(NonError::Netlist(NetlistError::MissingInput(v.clone()))),
        }
    }
    let any_row_nor = non.rows.iter().any(|row| {
        // row NOR: 1 iff every contributing literal is 0
        row.iter().zip(&values).all(|(&m, &v)| match m {
            NonMark::Pos => !v,
            NonMark::Neg => v,
            NonMark::Absent => true,
        })
    });
    // outer NOR of the row results, then the final negation
    Ok(any_row_nor)
}

impl fmt::Display for NonMatrix {
    /// The paper's tabular form: variables header, one row per product
    /// term, marks 0/1/-.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Variables: {}", self.variables.join(" "))?;
        for (i, row) in self.rows.iter().enumerate() {
            let marks: Vec<&str> = row
                .iter()
                .map(|m| match m {
                    // the tabular form shows the flipped cube: a cube
                    // requirement of 1 becomes 0 and vice versa
                    NonMark::Neg => "0",
                    NonMark::Pos => "1",
                    NonMark::Absent => "-",
                })
                .collect();
            writeln!(f, "{}. product term: {}", i + 1, marks.join(" "))?;
        }
        Ok(())
    }
}
