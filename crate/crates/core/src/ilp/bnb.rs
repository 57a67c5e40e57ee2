//! Best-bound branch and bound over the simplex relaxation, plus a
//! round-down-and-repair heuristic for quick approximate solves.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

use super::model::{IlpSolution, LinearModel, Relation, Sense, SolveStatus};
use super::simplex::{solve_relaxation, LpOutcome};

const INTEGRALITY_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// Exact branch and bound.
    Exact,
    /// LP relaxation rounded down, then repaired greedily. No optimality claim.
    Rounding,
}

#[derive(Debug, Clone, Copy)]
pub struct IlpOptions {
    pub node_limit: usize,
    pub mode: SolveMode,
}

impl Default for IlpOptions {
    fn default() -> Self {
        Self {
            node_limit: 200_000,
            mode: SolveMode::Exact,
        }
    }
}

struct Node {
    /// Relaxation bound in minimization form.
    bound: f64,
    id: usize,
    depth: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    values: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: smallest bound first, then oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

pub fn solve_ilp(model: &LinearModel) -> Result<IlpSolution> {
    solve_ilp_with(model, &IlpOptions::default())
}

pub fn solve_ilp_with(model: &LinearModel, options: &IlpOptions) -> Result<IlpSolution> {
    model.validate()?;
    match options.mode {
        SolveMode::Exact => branch_and_bound(model, options.node_limit),
        SolveMode::Rounding => round_and_repair(model),
    }
}

/// Most fractional integral variable, lowest index on ties.
fn branching_variable(model: &LinearModel, values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in model.variables.iter().enumerate() {
        if !v.integral {
            continue;
        }
        let frac = values[i] - values[i].floor();
        if frac <= INTEGRALITY_EPS || frac >= 1.0 - INTEGRALITY_EPS {
            continue;
        }
        let score = (frac - 0.5).abs();
        if best.is_none_or(|(_, s)| score < s - 1e-12) {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i)
}

/// Spacing of attainable objective values (minus the constant) when every
/// variable with a nonzero coefficient is integral and all those coefficients
/// are integer multiples of one positive step. `None` otherwise.
fn objective_granularity(model: &LinearModel) -> Option<f64> {
    let mut g: u64 = 0;
    for (v, &c) in model.variables.iter().zip(&model.objective.coefficients) {
        if c == 0.0 {
            continue;
        }
        if !v.integral || c != c.round() || c.abs() > 1e15 {
            return None;
        }
        g = gcd(g, c.abs() as u64);
    }
    (g > 0).then_some(g as f64)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Coefficient tightening for covering rows. In a `>=` row with a positive
/// right-hand side whose variables are all nonnegative and carry nonnegative
/// coefficients, a binary's coefficient can be capped at the right-hand side
/// without changing the integer solutions, which tightens the relaxation.
fn tighten(model: &LinearModel) -> LinearModel {
    let mut out = model.clone();
    let binary: Vec<bool> = model
        .variables
        .iter()
        .map(|v| v.integral && v.lower == 0.0 && v.upper == 1.0)
        .collect();
    let nonnegative: Vec<bool> = model.variables.iter().map(|v| v.lower >= 0.0).collect();
    for row in &mut out.constraints {
        if row.relation != Relation::Ge || row.rhs <= 0.0 {
            continue;
        }
        let covering = row
            .coefficients
            .iter()
            .zip(&nonnegative)
            .all(|(&a, &nn)| a == 0.0 || (a > 0.0 && nn));
        if !covering {
            continue;
        }
        for (a, &b) in row.coefficients.iter_mut().zip(&binary) {
            if b && *a > row.rhs {
                *a = row.rhs;
            }
        }
    }
    out
}

fn branch_and_bound(original: &LinearModel, node_limit: usize) -> Result<IlpSolution> {
    let model = &tighten(original);
    let sign = match model.objective.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let granularity = objective_granularity(model);
    let constant = sign * model.objective.constant;
    // Smallest objective an integer point under this relaxation bound could reach.
    let reachable = |bound: f64| match granularity {
        Some(g) => ((bound - constant) / g - INTEGRALITY_EPS).ceil() * g + constant,
        None => bound,
    };

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0usize;
    let mut next_id = 1usize;

    let root_lower: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
    let root_upper: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
    nodes += 1;
    let root = match solve_relaxation(model, &root_lower, &root_upper)? {
        LpOutcome::Infeasible => {
            let mut s = IlpSolution::without_point(SolveStatus::Infeasible);
            s.nodes = nodes;
            return Ok(s);
        }
        LpOutcome::Unbounded => {
            let mut s = IlpSolution::without_point(SolveStatus::Unbounded);
            s.nodes = nodes;
            return Ok(s);
        }
        LpOutcome::Optimal { values, objective } => Node {
            bound: sign * objective,
            id: 0,
            depth: 0,
            lower: root_lower,
            upper: root_upper,
            values,
        },
    };

    let heuristic = round_and_repair(model)?;
    if heuristic.has_point() && original.is_feasible(&heuristic.values) {
        incumbent = Some((sign * original.objective_value(&heuristic.values), heuristic.values));
    }

    // Depth-first until an incumbent exists, best-bound afterwards.
    let mut dive: Vec<Node> = Vec::new();
    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    if incumbent.is_some() {
        heap.push(root);
    } else {
        dive.push(root);
    }

    loop {
        let node = match dive.pop() {
            Some(n) => n,
            None => match heap.pop() {
                Some(n) => n,
                None => break,
            },
        };
        if let Some((best, _)) = &incumbent {
            if reachable(node.bound) >= *best - INTEGRALITY_EPS {
                continue;
            }
        }
        match branching_variable(model, &node.values) {
            None => {
                let mut x = node.values.clone();
                for (v, var) in x.iter_mut().zip(&model.variables) {
                    if var.integral {
                        *v = v.round();
                    }
                }
                if original.is_feasible(&x) {
                    let value = sign * original.objective_value(&x);
                    if incumbent.as_ref().is_none_or(|(best, _)| value < *best) {
                        incumbent = Some((value, x));
                        heap.extend(dive.drain(..));
                    }
                }
            }
            Some(var) => {
                if nodes >= node_limit {
                    let best = incumbent.as_ref().map(|(v, _)| sign * v);
                    return Err(Error::Resource(format!(
                        "branch and bound hit the {node_limit}-node limit; best incumbent {best:?}"
                    )));
                }
                let value = node.values[var];
                let mut down_upper = node.upper.clone();
                down_upper[var] = value.floor();
                let mut up_lower = node.lower.clone();
                up_lower[var] = value.ceil();
                let mut children = Vec::with_capacity(2);
                for (lo, hi) in [(node.lower.clone(), down_upper), (up_lower, node.upper)] {
                    nodes += 1;
                    if let LpOutcome::Optimal { values, objective } = solve_relaxation(model, &lo, &hi)? {
                        children.push(Node {
                            bound: sign * objective,
                            id: next_id,
                            depth: node.depth + 1,
                            lower: lo,
                            upper: hi,
                            values,
                        });
                        next_id += 1;
                    }
                }
                // The up branch is pushed last so that diving explores it first.
                for child in children {
                    let pruned = incumbent
                        .as_ref()
                        .is_some_and(|(best, _)| reachable(child.bound) >= *best - INTEGRALITY_EPS);
                    if pruned {
                        continue;
                    }
                    if incumbent.is_some() {
                        heap.push(child);
                    } else {
                        dive.push(child);
                    }
                }
            }
        }
    }

    Ok(match incumbent {
        Some((value, x)) => IlpSolution {
            status: SolveStatus::Optimal,
            values: x,
            objective_value: sign * value,
            nodes,
        },
        None => {
            let mut s = IlpSolution::without_point(SolveStatus::Infeasible);
            s.nodes = nodes;
            s
        }
    })
}

fn total_violation(model: &LinearModel, x: &[f64]) -> f64 {
    model.constraints.iter().map(|c| c.violation(x)).sum()
}

fn round_and_repair(model: &LinearModel) -> Result<IlpSolution> {
    let lower: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
    let mut x = match solve_relaxation(model, &lower, &upper)? {
        LpOutcome::Optimal { values, .. } => values,
        LpOutcome::Infeasible => return Ok(IlpSolution::without_point(SolveStatus::Infeasible)),
        LpOutcome::Unbounded => return Ok(IlpSolution::without_point(SolveStatus::Unbounded)),
    };
    for (v, var) in x.iter_mut().zip(&model.variables) {
        if var.integral {
            *v = (*v + INTEGRALITY_EPS).floor().clamp(var.lower, var.upper);
        }
    }
    let mut violation = total_violation(model, &x);
    while !model.is_feasible(&x) {
        let mut best: Option<(usize, f64)> = None;
        for (i, var) in model.variables.iter().enumerate() {
            if !var.integral || x[i] + 1.0 > var.upper {
                continue;
            }
            x[i] += 1.0;
            let v = total_violation(model, &x);
            x[i] -= 1.0;
            if v < violation && best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
        }
        match best {
            Some((i, v)) => {
                x[i] += 1.0;
                violation = v;
            }
            None => return Ok(IlpSolution::without_point(SolveStatus::Infeasible)),
        }
    }
    Ok(IlpSolution {
        status: SolveStatus::Feasible,
        objective_value: model.objective_value(&x),
        values: x,
        nodes: 1,
    })
}
