//! Best-bound branch and bound over binary variables.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::lp::{solve_lp_warm, Basis, LpProblem, LpStatus, Sense};

const INT_TOL: f64 = 1e-6;
pub const NODE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct MipProblem {
    pub lp: LpProblem,
    pub binaries: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct MipSolution {
    pub status: MipStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Default)]
pub struct MipTrace {
    /// Objective of every integral LP relaxation met during the search.
    pub integral: Vec<f64>,
    /// Bound of every node discarded by bound.
    pub pruned: Vec<f64>,
}

struct Node {
    /// Minimization-form LP bound.
    bound: f64,
    id: usize,
    fixes: Vec<(usize, f64)>,
    basis: Basis,
    x: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: invert so the smallest bound, then id, pops first.
    fn cmp(&self, o: &Self) -> Ordering {
        o.bound
            .total_cmp(&self.bound)
            .then_with(|| o.id.cmp(&self.id))
    }
}

impl MipProblem {
    pub fn validate(&self) -> Result<()> {
        self.lp.validate()?;
        for &b in &self.binaries {
            if b >= self.lp.n_vars() {
                return Err(Error::Dimension(format!("binary index {b} out of range")));
            }
            if self.lp.lower[b] < 0.0 || self.lp.upper[b] > 1.0 {
                return Err(Error::Dimension(format!(
                    "binary variable {b} must be bounded within [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

pub fn solve_milp(p: &MipProblem) -> Result<MipSolution> {
    solve_milp_traced(p, NODE_LIMIT, None)
}

/// Branch and bound with an explicit node limit and optional search trace.
pub fn solve_milp_traced(
    p: &MipProblem,
    node_limit: usize,
    mut trace: Option<&mut MipTrace>,
) -> Result<MipSolution> {
    p.validate()?;
    let sign = if p.lp.sense == Sense::Minimize {
        1.0
    } else {
        -1.0
    };
    let mut lp = p.lp.clone();
    let mut nodes = 0usize;
    let mut next_id = 0usize;

    let (root, root_basis) = solve_lp_warm(&lp, None)?;
    nodes += 1;
    match root.status {
        LpStatus::Infeasible => return Ok(empty(MipStatus::Infeasible, nodes)),
        LpStatus::Unbounded => return Ok(empty(MipStatus::Unbounded, nodes)),
        LpStatus::Optimal => {}
    }
    let mut heap = BinaryHeap::new();
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let root_node = Node {
        bound: sign * root.objective,
        id: next_id,
        fixes: Vec::new(),
        basis: root_basis,
        x: root.x,
    };
    next_id += 1;
    consider(
        root_node,
        p,
        &mut heap,
        &mut incumbent,
        trace.as_deref_mut(),
    );

    while let Some(node) = heap.pop() {
        if let Some((best, _)) = &incumbent {
            if node.bound >= *best - prune_tol(*best) {
                if let Some(t) = trace.as_deref_mut() {
                    t.pruned.push(sign * node.bound);
                }
                continue;
            }
        }
        let Some(j) = branching_variable(&node.x, &p.binaries) else {
            continue;
        };
        for val in [0.0, 1.0] {
            if nodes >= node_limit {
                return Err(Error::NodeLimit { nodes });
            }
            let mut fixes = node.fixes.clone();
            fixes.push((j, val));
            apply(&mut lp, p, &fixes);
            let (s, basis) = solve_lp_warm(&lp, Some(&node.basis))?;
            nodes += 1;
            if s.status != LpStatus::Optimal {
                continue;
            }
            let child = Node {
                bound: sign * s.objective,
                id: next_id,
                fixes,
                basis,
                x: s.x,
            };
            next_id += 1;
            consider(child, p, &mut heap, &mut incumbent, trace.as_deref_mut());
        }
    }

    let Some((_, x)) = incumbent else {
        return Ok(empty(MipStatus::Infeasible, nodes));
    };
    // Polish: fix the rounded binaries and re-solve for clean continuous values.
    let mut fixed = p.lp.clone();
    for &b in &p.binaries {
        let v = x[b].round();
        fixed.lower[b] = v;
        fixed.upper[b] = v;
    }
    let s = solve_lp_warm(&fixed, None)?.0;
    if s.status != LpStatus::Optimal {
        return Err(Error::Consistency(
            "incumbent commitment lost feasibility after rounding".into(),
        ));
    }
    Ok(MipSolution {
        status: MipStatus::Optimal,
        objective: s.objective,
        x: s.x,
        nodes,
    })
}

fn empty(status: MipStatus, nodes: usize) -> MipSolution {
    MipSolution {
        status,
        x: Vec::new(),
        objective: f64::NAN,
        nodes,
    }
}

fn prune_tol(best: f64) -> f64 {
    1e-9 * (1.0 + best.abs())
}

fn apply(lp: &mut LpProblem, p: &MipProblem, fixes: &[(usize, f64)]) {
    for &b in &p.binaries {
        lp.lower[b] = p.lp.lower[b];
        lp.upper[b] = p.lp.upper[b];
    }
    for &(j, v) in fixes {
        lp.lower[j] = v;
        lp.upper[j] = v;
    }
}

fn consider(
    node: Node,
    p: &MipProblem,
    heap: &mut BinaryHeap<Node>,
    incumbent: &mut Option<(f64, Vec<f64>)>,
    trace: Option<&mut MipTrace>,
) {
    let sign = if p.lp.sense == Sense::Minimize {
        1.0
    } else {
        -1.0
    };
    if let Some((best, _)) = incumbent {
        if node.bound >= *best - prune_tol(*best) {
            if let Some(t) = trace {
                t.pruned.push(sign * node.bound);
            }
            return;
        }
    }
    if branching_variable(&node.x, &p.binaries).is_none() {
        if let Some(t) = trace {
            t.integral.push(sign * node.bound);
        }
        *incumbent = Some((node.bound, node.x));
        return;
    }
    heap.push(node);
}

/// Most fractional binary, lowest index on ties; `None` when integral.
fn branching_variable(x: &[f64], binaries: &[usize]) -> Option<usize> {
    let mut best = None;
    let mut best_frac = INT_TOL;
    for &b in binaries {
        let f = (x[b] - x[b].floor()).min(x[b].ceil() - x[b]);
        if f > best_frac + 1e-12 {
            best_frac = f;
            best = Some(b);
        }
    }
    best
}
