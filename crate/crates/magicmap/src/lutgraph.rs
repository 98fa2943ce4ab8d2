//! k-bounded LUT graph construction: constant propagation, naive
//! decomposition of over-wide nodes into OR-of-AND trees, and
//! longest-path topological levels.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::netlist::{CubeMark, Netlist, NetlistError, SopCover};

/// What drives a primary output after constant propagation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PoDriver {
    /// Index into [`LutGraph::nodes`].
    Node(usize),
    /// The output is a primary input passed through.
    Pi(String),
    /// The output collapsed to a constant.
    Const(bool),
}

#[derive(Debug, Clone)]
pub struct LutNode {
    pub name: String,
    /// Cover whose variables are the fan-in signal names (PIs or node names).
    pub cover: SopCover,
    /// Topological level; PIs sit at level 0.
    pub level: u32,
    /// True when some primary output reads this node.
    pub is_primary_output: bool,
}

impl LutNode {
    pub fn fanin_count(&self) -> usize {
        self.cover.variables.len()
    }
}

#[derive(Debug, Clone)]
pub struct LutGraph {
    pub primary_inputs: Vec<String>,
    pub primary_outputs: Vec<String>,
    /// Topologically ordered: every fan-in of `nodes[i]` is a PI or an
    /// earlier node.
    pub nodes: Vec<LutNode>,
    pub po_drivers: Vec<(String, PoDriver)>,
    pub k: usize,
    index: HashMap<String, usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LutGraphError {
    #[error("k must be between 2 and 8, got {0}")]
    InvalidK(usize),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

impl LutGraph {
    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn is_primary_input(&self, name: &str) -> bool {
        self.primary_inputs.iter().any(|p| p == name)
    }

    /// Indices of nodes reading `node` as a fan-in.
    pub fn fanouts(&self, node: usize) -> Vec<usize> {
        let name = &self.nodes[node].name;
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.cover.variables.iter().any(|v| v == name))
            .map(|(i, _)| i)
            .collect()
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
        for node in &self.nodes {
            let v = node.cover.eval_with(|s| values[s]);
            values.insert(node.name.as_str(), v);
        }
        Ok(self
            .po_drivers
            .iter()
            .map(|(po, driver)| {
                let v = match driver {
                    PoDriver::Node(i) => values[self.nodes[*i].name.as_str()],
                    PoDriver::Pi(pi) => values[pi.as_str()],
                    PoDriver::Const(b) => *b,
                };
                (po.clone(), v)
            })
            .collect())
    }
}

/// Build a k-bounded LUT graph from a netlist. Nodes already within the
/// fan-in bound are kept verbatim; wider nodes are decomposed into an
/// OR-tree of AND-trees. Constant nodes are propagated into their fan-outs
/// first.
pub fn build_lut_graph(netlist: &Netlist, k: usize) -> Result<LutGraph, LutGraphError> {
    if !(2..=8).contains(&k) {
        return Err(LutGraphError::InvalidK(k));
    }

    // Working copy of the node covers, with constants folded away.
    let mut covers: Vec<(String, SopCover)> = netlist.nodes().to_vec();
    propagate_constants(&mut covers);

    let mut index: HashMap<String, usize> = covers
        .iter()
        .enumerate()
        .map(|(i, (n, _))| (n.clone(), i))
        .collect();
    let constants: HashMap<String, bool> = covers
        .iter()
        .filter_map(|(n, c)| c.as_constant().map(|b| (n.clone(), b)))
        .collect();

    // Decompose over-wide nodes, appending fresh internal nodes.
    let mut fresh = 0usize;
    let mut i = 0;
    while i < covers.len() {
        if covers[i].1.variables.len() > k && !constants.contains_key(&covers[i].0) {
            let (name, cover) = covers[i].clone();
            let mut new_nodes = Vec::new();
            let root = decompose(&name, &cover, k, &mut fresh, &mut new_nodes);
            covers[i].1 = root;
            for (n, c) in new_nodes {
                index.insert(n.clone(), covers.len());
                covers.push((n, c));
            }
        }
        i += 1;
    }
    // Keep only nodes reachable from a primary output.
    let mut reachable: HashSet<String> = HashSet::new();
    let mut stack: Vec<String> = netlist
        .primary_outputs
        .iter()
        .filter(|po| index.contains_key(po.as_str()))
        .cloned()
        .collect();
    while let Some(name) = stack.pop() {
        if !reachable.insert(name.clone()) {
            continue;
        }
        let (_, cover) = &covers[index[&name]];
        if cover.as_constant().is_some() {
            continue;
        }
        for v in &cover.variables {
            if index.contains_key(v) {
                stack.push(v.clone());
            }
        }
    }

    // Topological order over reachable, non-constant nodes.
    let live: Vec<usize> = (0..covers.len())
        .filter(|&i| reachable.contains(&covers[i].0) && covers[i].1.as_constant().is_none())
        .collect();
    let live_set: HashSet<usize> = live.iter().copied().collect();
    let mut order: Vec<usize> = Vec::with_capacity(live.len());
    let mut placed: HashSet<usize> = HashSet::new();
    while order.len() < live.len() {
        let before = order.len();
        for &i in &live {
            if placed.contains(&i) {
                continue;
            }
            let ready = covers[i].1.variables.iter().all(|v| match index.get(v) {
                Some(&j) => placed.contains(&j) || !live_set.contains(&j),
                None => true,
            });
            if ready {
                order.push(i);
                placed.insert(i);
            }
        }
        assert!(order.len() > before, "topological ordering stuck");
    }

    let mut nodes: Vec<LutNode> = Vec::with_capacity(order.len());
    let mut node_index: HashMap<String, usize> = HashMap::new();
    let po_set: HashSet<&String> = netlist.primary_outputs.iter().collect();
    for &i in &order {
        let (name, cover) = &covers[i];
        let level = 1 + cover
            .variables
            .iter()
            .map(|v| node_index.get(v).map_or(0, |&j| nodes[j].level))
            .max()
            .unwrap_or(0);
        node_index.insert(name.clone(), nodes.len());
        nodes.push(LutNode {
            name: name.clone(),
            cover: cover.clone(),
            level,
            is_primary_output: po_set.contains(name),
        });
    }

    let po_drivers = netlist
        .primary_outputs
        .iter()
        .map(|po| {
            let driver = if let Some(&j) = node_index.get(po) {
                PoDriver::Node(j)
            } else if netlist.is_primary_input(po) {
                PoDriver::Pi(po.clone())
            } else {
                // the node collapsed to a constant
                let b = covers[index[po]]
                    .1
                    .as_constant()
                    .expect("missing PO driver must be constant");
                PoDriver::Const(b)
            };
            (po.clone(), driver)
        })
        .collect();

    Ok(LutGraph {
        primary_inputs: netlist.primary_inputs.clone(),
        primary_outputs: netlist.primary_outputs.clone(),
        nodes,
        po_drivers,
        k,
        index: node_index,
    })
}

/// Substitute constant nodes into their readers until a fixpoint.
fn propagate_constants(covers: &mut [(String, SopCover)]) {
    loop {
        let constants: HashMap<String, bool> = covers
            .iter()
            .filter_map(|(n, c)| c.as_constant().map(|b| (n.clone(), b)))
            .collect();
        if constants.is_empty() {
            return;
        }
        let mut changed = false;
        for (_, cover) in covers.iter_mut() {
            if cover.as_constant().is_some() {
                continue;
            }
            let const_cols: Vec<usize> = cover
                .variables
                .iter()
                .enumerate()
                .filter(|(_, v)| constants.contains_key(*v))
                .map(|(i, _)| i)
                .collect();
            if const_cols.is_empty() {
                continue;
            }
            changed = true;
            let mut new_cubes = Vec::new();
            'cube: for cube in &cover.cubes {
                let mut new_cube = Vec::new();
                for (i, &m) in cube.iter().enumerate() {
                    if let Some(&b) = constants.get(&cover.variables[i]) {
                        let ok = match m {
                            CubeMark::DontCare => true,
                            CubeMark::One => b,
                            CubeMark::Zero => !b,
                        };
                        if !ok {
                            continue 'cube;
                        }
                    } else {
                        new_cube.push(m);
                    }
                }
                new_cubes.push(new_cube);
            }
            let new_vars: Vec<String> = cover
                .variables
                .iter()
                .enumerate()
                .filter(|(i, _)| !const_cols.contains(i))
                .map(|(_, v)| v.clone())
                .collect();
            // a surviving cube with no remaining requirements is a tautology
            *cover = if new_cubes.iter().any(|c| c.iter().all(|&m| m == CubeMark::DontCare))
                && !new_vars.is_empty()
            {
                SopCover::constant(true)
            } else if new_vars.is_empty() {
                SopCover::constant(!new_cubes.is_empty())
            } else {
                SopCover::new(new_vars, new_cubes)
            };
        }
        if !changed {
            return;
        }
    }
}

/// Split a cover over more than k variables into an OR-tree of AND-trees,
/// each node with fan-in <= k. Returns the root cover (over the fresh
/// signals); fresh internal nodes are appended to `out`.
fn decompose(
    base: &str,
    cover: &SopCover,
    k: usize,
    fresh: &mut usize,
    out: &mut Vec<(String, SopCover)>,
) -> SopCover {
    let next_name = |fresh: &mut usize| {
        let n = format!("{}__d{}", base, *fresh);
        *fresh += 1;
        n
    };

    let and_cover = |inputs: &[(String, CubeMark)]| {
        let vars: Vec<String> = inputs.iter().map(|(v, _)| v.clone()).collect();
        let marks: Vec<CubeMark> = inputs.iter().map(|(_, m)| *m).collect();
        SopCover::new(vars, vec![marks])
    };
    // Fold the first k entries into a fresh node and queue its output
    // behind the remainder; repeats until at most `stop` entries are left.
    let reduce = |mut items: Vec<(String, CubeMark)>,
                      stop: usize,
                      make: &dyn Fn(&[(String, CubeMark)]) -> SopCover,
                      fresh: &mut usize,
                      out: &mut Vec<(String, SopCover)>| {
        while items.len() > stop {
            let take = items.len().min(k);
            let chunk: Vec<(String, CubeMark)> = items.drain(..take).collect();
            let name = next_name(fresh);
            out.push((name.clone(), make(&chunk)));
            items.push((name, CubeMark::One));
        }
        items
    };

    // One signal per cube: the AND of its literals.
    let mut cube_signals: Vec<(String, CubeMark)> = Vec::new();
    let single_cube = cover.cubes.len() == 1;
    for cube in &cover.cubes {
        let lits: Vec<(String, CubeMark)> = cube
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != CubeMark::DontCare)
            .map(|(i, &m)| (cover.variables[i].clone(), m))
            .collect();
        assert!(!lits.is_empty(), "tautological cube in non-constant cover");
        if single_cube {
            // the root itself is the final AND stage
            let lits = reduce(lits, k, &and_cover, fresh, out);
            return and_cover(&lits);
        }
        let mut lits = reduce(lits, 1, &and_cover, fresh, out);
        cube_signals.push(lits.pop().unwrap());
    }

    // OR tree over the cube signals.
    let or_cover = |inputs: &[(String, CubeMark)]| {
        let vars: Vec<String> = inputs.iter().map(|(v, _)| v.clone()).collect();
        let cubes: Vec<Vec<CubeMark>> = inputs
            .iter()
            .enumerate()
            .map(|(i, (_, m))| {
                (0..inputs.len())
                    .map(|j| if i == j { *m } else { CubeMark::DontCare })
                    .collect()
            })
            .collect();
        SopCover::new(vars, cubes)
    };
    let sigs = reduce(cube_signals, k, &or_cover, fresh, out);
    or_cover(&sigs)
}
