//! BLIF front-end: combinational netlists as named sum-of-products nodes,
//! plus a reference evaluator used as the equivalence oracle.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

/// One position of a cube row: the required input value, or don't-care.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CubeMark {
    Zero,
    One,
    DontCare,
}

impl CubeMark {
    pub fn to_char(self) -> char {
        match self {
            CubeMark::Zero => '0',
            CubeMark::One => '1',
            CubeMark::DontCare => '-',
        }
    }
}

/// An on-set sum-of-products cover: the function is 1 iff some cube matches.
///
/// An empty cube list denotes constant 0; a cube of all don't-cares makes the
/// cover constant 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SopCover {
    pub variables: Vec<String>,
    pub cubes: Vec<Vec<CubeMark>>,
}

impl SopCover {
    pub fn new(variables: Vec<String>, cubes: Vec<Vec<CubeMark>>) -> Self {
        let cover = SopCover { variables, cubes };
        debug_assert!(cover.is_well_formed());
        cover
    }

    pub fn is_well_formed(&self) -> bool {
        let unique: HashSet<&String> = self.variables.iter().collect();
        unique.len() == self.variables.len()
            && self.cubes.iter().all(|c| c.len() == self.variables.len())
    }

    pub fn constant(value: bool) -> Self {
        SopCover {
            variables: Vec::new(),
            cubes: if value { vec![vec![]] } else { vec![] },
        }
    }

    /// Some(b) if the cover denotes the constant b regardless of inputs.
    pub fn as_constant(&self) -> Option<bool> {
        if self.cubes.is_empty() {
            Some(false)
        } else if self
            .cubes
            .iter()
            .any(|c| c.iter().all(|&m| m == CubeMark::DontCare))
        {
            Some(true)
        } else {
            None
        }
    }

    pub fn eval_with(&self, value_of: impl Fn(&str) -> bool) -> bool {
        let values: Vec<bool> = self.variables.iter().map(|v| value_of(v)).collect();
        self.cubes.iter().any(|cube| {
            cube.iter().zip(&values).all(|(&m, &v)| match m {
                CubeMark::Zero => !v,
                CubeMark::One => v,
                CubeMark::DontCare => true,
            })
        })
    }
}

/// A combinational netlist: primary inputs/outputs plus single-output
/// SoP nodes, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    pub name: String,
    pub primary_inputs: Vec<String>,
    pub primary_outputs: Vec<String>,
    nodes: Vec<(String, SopCover)>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetlistError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unsupported directive `{directive}`")]
    Unsupported { line: usize, directive: String },
    #[error("undeclared signal `{0}`")]
    Undeclared(String),
    #[error("combinational cycle through `{0}`")]
    Cycle(String),
    #[error("duplicate definition of `{0}`")]
    Duplicate(String),
    #[error("primary input `{0}` missing from assignment")]
    MissingInput(String),
}

impl Netlist {
    pub fn new(
        name: String,
        primary_inputs: Vec<String>,
        primary_outputs: Vec<String>,
        nodes: Vec<(String, SopCover)>,
    ) -> Result<Self, NetlistError> {
        let mut index = HashMap::new();
        for (i, (n, _)) in nodes.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(NetlistError::Duplicate(n.clone()));
            }
        }
        let netlist = Netlist {
            name,
            primary_inputs,
            primary_outputs,
            nodes,
            index,
        };
        netlist.validate()?;
        Ok(netlist)
    }

    pub fn nodes(&self) -> &[(String, SopCover)] {
        &self.nodes
    }

    pub fn node(&self, name: &str) -> Option<&SopCover> {
        self.index.get(name).map(|&i| &self.nodes[i].1)
    }

    pub fn is_primary_input(&self, name: &str) -> bool {
        self.primary_inputs.iter().any(|p| p == name)
    }

    fn validate(&self) -> Result<(), NetlistError> {
        let pis: HashSet<&String> = self.primary_inputs.iter().collect();
        if pis.len() != self.primary_inputs.len() {
            return Err(NetlistError::Duplicate("primary input".into()));
        }
        for (name, _) in &self.nodes {
            if pis.contains(name) {
                return Err(NetlistError::Duplicate(name.clone()));
            }
        }
        for (_, cover) in &self.nodes {
            for v in &cover.variables {
                if !pis.contains(v) && !self.index.contains_key(v) {
                    return Err(NetlistError::Undeclared(v.clone()));
                }
            }
        }
        for po in &self.primary_outputs {
            if !pis.contains(po) && !self.index.contains_key(po) {
                return Err(NetlistError::Undeclared(po.clone()));
            }
        }
        self.check_acyclic()
    }

    fn check_acyclic(&self) -> Result<(), NetlistError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.nodes.len()];
        for start in 0..self.nodes.len() {
            if state[start] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            state[start] = 1;
            while let Some(&mut (i, ref mut vi)) = stack.last_mut() {
                let vars = &self.nodes[i].1.variables;
                if *vi < vars.len() {
                    let v = &vars[*vi];
                    *vi += 1;
                    if let Some(&j) = self.index.get(v) {
                        match state[j] {
                            0 => {
                                state[j] = 1;
                                stack.push((j, 0));
                            }
                            1 => return Err(NetlistError::Cycle(self.nodes[j].0.clone())),
                            _ => {}
                        }
                    }
                } else {
                    state[i] = 2;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    /// Evaluate every primary output for the given input assignment.
    pub fn evaluate(
        &self,
        assignment: &BTreeMap<String, bool>,
    ) -> Result<BTreeMap<String, bool>, NetlistError> {
        for pi in &self.primary_inputs {
            if !assignment.contains_key(pi) {
                return Err(NetlistError::MissingInput(pi.clone()));
            }
        }
        let mut values: HashMap<&str, bool> = HashMap::new();
        for (pi, &v) in assignment {
            values.insert(pi.as_str(), v);
        }
        // Nodes may reference nodes defined later in the file; iterate until
        // everything is resolved (acyclicity guarantees progress).
        let mut remaining: Vec<usize> = (0..self.nodes.len()).collect();
        while !remaining.is_empty() {
            let before = remaining.len();
            remaining.retain(|&i| {
                let (name, cover) = &self.nodes[i];
                if cover.variables.iter().all(|v| values.contains_key(v.as_str())) {
                    let v = cover.eval_with(|s| values[s]);
                    values.insert(name.as_str(), v);
                    false
                } else {
                    true
                }
            });
            assert!(remaining.len() < before, "evaluation stuck on acyclic netlist");
        }
        Ok(self
            .primary_outputs
            .iter()
            .map(|po| (po.clone(), values[po.as_str()]))
            .collect())
    }

    /// Serialize back to the BLIF subset accepted by [`parse_blif`].
    pub fn to_blif(&self) -> String {
        let mut out = String::new();
        writeln!(out, ".model {}", self.name).unwrap();
        writeln!(out, ".inputs {}", self.primary_inputs.join(" ")).unwrap();
        writeln!(out, ".outputs {}", self.primary_outputs.join(" ")).unwrap();
        for (name, cover) in &self.nodes {
            writeln!(out, ".names {} {}", cover.variables.join(" "), name)
                .unwrap_or_else(|_| unreachable!());
            if cover.variables.is_empty() {
                // constant node: `1` row for constant 1, nothing for constant 0
                if !cover.cubes.is_empty() {
                    writeln!(out, "1").unwrap();
                }
            } else {
                for cube in &cover.cubes {
                    let marks: String = cube.iter().map(|m| m.to_char()).collect();
                    writeln!(out, "{} 1", marks).unwrap();
                }
            }
        }
        writeln!(out, ".end").unwrap();
        out
    }
}

/// Parse the supported BLIF subset: `.model`, `.inputs`, `.outputs`,
/// `.names` with on-set rows, `.end`. `#` comments and `\` continuations
/// are handled; latches and multi-model files are rejected.
pub fn parse_blif(text: &str) -> Result<Netlist, NetlistError> {
    let mut logical: Vec<(usize, String)> = Vec::new();
    {
        let mut pending = String::new();
        let mut pending_line = 0usize;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let line = line.trim_end();
            let (content, continued) = match line.strip_suffix('\\') {
                Some(rest) => (rest, true),
                None => (line, false),
            };
            if pending.is_empty() {
                pending_line = line_no;
            }
            pending.push_str(content);
            if continued {
                pending.push(' ');
            } else {
                let trimmed = pending.trim().to_string();
                if !trimmed.is_empty() {
                    logical.push((pending_line, trimmed));
                }
                pending.clear();
            }
        }
        let trimmed = pending.trim().to_string();
        if !trimmed.is_empty() {
            logical.push((pending_line, trimmed));
        }
    }

    let mut model_name: Option<String> = None;
    let mut inputs: Vec<String> = Vec::new();
    let mut outputs: Vec<String> = Vec::new();
    let mut nodes: Vec<(String, SopCover)> = Vec::new();
    let mut current: Option<(String, Vec<String>, Vec<Vec<CubeMark>>, usize)> = None;
    let mut ended = false;

    let finish_current = |current: &mut Option<(String, Vec<String>, Vec<Vec<CubeMark>>, usize)>,
                              nodes: &mut Vec<(String, SopCover)>| {
        if let Some((name, vars, cubes, _)) = current.take() {
            nodes.push((name, SopCover { variables: vars, cubes }));
        }
    };

    for (line_no, line) in logical {
        if ended {
            return Err(NetlistError::Syntax {
                line: line_no,
                msg: "content after .end (multi-model files are unsupported)".into(),
            });
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let head = tokens[0];
        if head.starts_with('.') {
            match head {
                ".model" => {
                    finish_current(&mut current, &mut nodes);
                    if model_name.is_some() {
                        return Err(NetlistError::Syntax {
                            line: line_no,
                            msg: "second .model (multi-model files are unsupported)".into(),
                        });
                    }
                    if tokens.len() != 2 {
                        return Err(NetlistError::Syntax {
                            line: line_no,
                            msg: ".model expects exactly one name".into(),
                        });
                    }
                    model_name = Some(tokens[1].to_string());
                }
                ".inputs" => {
                    finish_current(&mut current, &mut nodes);
                    inputs.extend(tokens[1..].iter().map(|s| s.to_string()));
                }
                ".outputs" => {
                    finish_current(&mut current, &mut nodes);
                    outputs.extend(tokens[1..].iter().map(|s| s.to_string()));
                }
                ".names" => {
                    finish_current(&mut current, &mut nodes);
                    if tokens.len() < 2 {
                        return Err(NetlistError::Syntax {
                            line: line_no,
                            msg: ".names expects at least an output name".into(),
                        });
                    }
                    let output = tokens[tokens.len() - 1].to_string();
                    let vars: Vec<String> =
                        tokens[1..tokens.len() - 1].iter().map(|s| s.to_string()).collect();
                    current = Some((output, vars, Vec::new(), line_no));
                }
                ".end" => {
                    finish_current(&mut current, &mut nodes);
                    ended = true;
                }
                other => {
                    return Err(NetlistError::Unsupported {
                        line: line_no,
                        directive: other.to_string(),
                    });
                }
            }
        } else {
            // cover row
            let Some((_, vars, cubes, _)) = current.as_mut() else {
                return Err(NetlistError::Syntax {
                    line: line_no,
                    msg: format!("cover row `{}` outside a .names block", line),
                });
            };
            if vars.is_empty() {
                // constant-1 node: a single `1` row
                if tokens.len() != 1 || tokens[0] != "1" {
                    return Err(NetlistError::Syntax {
                        line: line_no,
                        msg: "constant cover row must be `1`".into(),
                    });
                }
                cubes.push(vec![]);
            } else {
                if tokens.len() != 2 {
                    return Err(NetlistError::Syntax {
                        line: line_no,
                        msg: "cover row must be `<marks> <out>`".into(),
                    });
                }
                if tokens[1] != "1" {
                    return Err(NetlistError::Syntax {
                        line: line_no,
                        msg: format!(
                            "only on-set covers are supported (got output `{}`)",
                            tokens[1]
                        ),
                    });
                }
                if tokens[0].len() != vars.len() {
                    return Err(NetlistError::Syntax {
                        line: line_no,
                        msg: format!(
                            "cube has {} marks but the cover has {} inputs",
                            tokens[0].len(),
                            vars.len()
                        ),
                    });
                }
                let mut cube = Vec::with_capacity(vars.len());
                for ch in tokens[0].chars() {
                    cube.push(match ch {
                        '0' => CubeMark::Zero,
                        '1' => CubeMark::One,
                        '-' => CubeMark::DontCare,
                        other => {
                            return Err(NetlistError::Syntax {
                                line: line_no,
                                msg: format!("invalid cube mark `{}`", other),
                            })
                        }
                    });
                }
                cubes.push(cube);
            }
        }
    }
    finish_current(&mut current, &mut nodes);

    let Some(name) = model_name else {
        return Err(NetlistError::Syntax {
            line: 1,
            msg: "missing .model".into(),
        });
    };
    Netlist::new(name, inputs, outputs, nodes)
}
