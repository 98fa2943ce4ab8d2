//! Input-to-column assignment for a stacked group of LUTs: a greedy
//! aligner plus an exhaustive exact search mirroring the same objective.

use std::collections::BTreeMap;

use thiserror::Error;

/// n x k matrix of variable names, one row per LUT in the group. `None`
/// marks an empty slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputMatrix {
    pub rows: Vec<Vec<Option<String>>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlignError {
    #[error("exact alignment limited to n <= {max_n} rows and k <= {max_k} columns")]
    TooLarge { max_n: usize, max_k: usize },
    #[error("rows must share one width")]
    RaggedRows,
}

pub const EXACT_MAX_ROWS: usize = 4;
pub const EXACT_MAX_COLS: usize = 5;

impl InputMatrix {
    pub fn new(rows: Vec<Vec<Option<String>>>) -> Result<Self, AlignError> {
        let k = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != k) {
            return Err(AlignError::RaggedRows);
        }
        Ok(InputMatrix { rows })
    }

    pub fn from_names(rows: &[&[&str]]) -> Self {
        InputMatrix {
            rows: rows
                .iter()
                .map(|r| r.iter().map(|s| Some(s.to_string())).collect())
                .collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Column index of `var` in row `r`, if present.
    pub fn column_of(&self, r: usize, var: &str) -> Option<usize> {
        self.rows[r].iter().position(|s| s.as_deref() == Some(var))
    }
}

/// Number of (column, LUT-pair) coincidences: for every column, every
/// unordered pair of rows holding the same variable there counts once.
pub fn alignment_score(m: &InputMatrix) -> usize {
    let mut score = 0;
    for c in 0..m.width() {
        for i in 0..m.rows.len() {
            for j in i + 1..m.rows.len() {
                if let (Some(a), Some(b)) = (&m.rows[i][c], &m.rows[j][c]) {
                    if a == b {
                        score += 1;
                    }
                }
            }
        }
    }
    score
}

/// Greedy alignment: variables in descending global frequency (ties
/// lexicographic); each variable goes to the first column free in all of
/// its rows, preferring its original column in its lowest-index row. When
/// no common column exists, it is placed per row, again preferring the
/// original column, else the lowest free one.
pub fn greedy_align(m: &InputMatrix) -> InputMatrix {
    let n = m.rows.len();
    let k = m.width();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for row in &m.rows {
        for v in row.iter().flatten() {
            *counts.entry(v.as_str()).or_default() += 1;
        }
    }
    let mut order: Vec<(&str, usize)> = counts.into_iter().map(|(v, c)| (v, c)).collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut aligned: Vec<Vec<Option<String>>> = vec![vec![None; k]; n];
    for (var, _) in order {
        let var_rows: Vec<usize> = (0..n)
            .filter(|&r| m.column_of(r, var).is_some())
            .collect();
        let free_in_all = |c: usize, aligned: &[Vec<Option<String>>]| {
            var_rows.iter().all(|&r| aligned[r][c].is_none())
        };
        let original_col = m.column_of(var_rows[0], var).unwrap();
        let target = if free_in_all(original_col, &aligned) {
            Some(original_col)
        } else {
            (0..k).find(|&c| free_in_all(c, &aligned))
        };
        match target {
            Some(c) => {
                for &r in &var_rows {
                    aligned[r][c] = Some(var.to_string());
                }
            }
            None => {
                for &r in &var_rows {
                    let orig = m.column_of(r, var).unwrap();
                    let c = if aligned[r][orig].is_none() {
                        orig
                    } else {
                        (0..k)
                            .find(|&c| aligned[r][c].is_none())
                            .expect("row cannot overflow: it is a permutation of the input row")
                    };
                    aligned[r][c] = Some(var.to_string());
                }
            }
        }
    }
    InputMatrix { rows: aligned }
}

/// Exhaustive exact alignment: the first row is kept fixed and every
/// column permutation of the remaining rows is scored. Returns a maximal
/// assignment (ties broken toward the lexicographically least matrix).
pub fn exact_align(m: &InputMatrix) -> Result<InputMatrix, AlignError> {
    let n = m.rows.len();
    let k = m.width();
    if n > EXACT_MAX_ROWS || k > EXACT_MAX_COLS {
        return Err(AlignError::TooLarge {
            max_n: EXACT_MAX_ROWS,
            max_k: EXACT_MAX_COLS,
        });
    }
    if n <= 1 {
        return Ok(m.clone());
    }

    let perms = permutations(k);
    let mut best: Option<(usize, InputMatrix)> = None;
    let mut choice = vec![0usize; n - 1];
    loop {
        let mut candidate = Vec::with_capacity(n);
        candidate.push(m.rows[0].clone());
        for (i, &p) in choice.iter().enumerate() {
            let perm = &perms[p];
            let row = &m.rows[i + 1];
            // entry at column c comes from input position perm[c]
            candidate.push((0..k).map(|c| row[perm[c]].clone()).collect());
        }
        let candidate = InputMatrix { rows: candidate };
        let score = alignment_score(&candidate);
        let better = match &best {
            None => true,
            Some((s, w)) => score > *s || (score == *s && candidate.rows < w.rows),
        };
        if better {
            best = Some((score, candidate));
        }
        // advance the mixed-radix counter over permutation choices
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(best.unwrap().1);
            }
            choice[i] += 1;
            if choice[i] < perms.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// All permutations of 0..k in lexicographic order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut result = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    let mut used = vec![false; k];
    fn rec(
        k: usize,
        depth: usize,
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        result: &mut Vec<Vec<usize>>,
    ) {
        if depth == k {
            result.push(current.clone());
            return;
        }
        for v in 0..k {
            if !used[v] {
                used[v] = true;
                current[depth] = v;
                rec(k, depth + 1, current, used, result);
                used[v] = false;
            }
        }
    }
    rec(k, 0, &mut current, &mut used, &mut result);
    result
}
