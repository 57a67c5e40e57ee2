//! Dense two-phase primal simplex.
//!
//! Entering columns follow Dantzig's most-negative rule until a degenerate
//! pivot occurs; from then on Bland's lowest-index rule is used until the
//! objective strictly improves again, which rules out cycling. Leaving rows
//! break ratio ties by the lowest basic column index.

use crate::error::{Error, Result};

use super::model::{Constraint, IlpSolution, LinearModel, Relation, Sense, SolveStatus};

const PIVOT_EPS: f64 = 1e-9;
const PHASE_ONE_EPS: f64 = 1e-8;
const MAX_ITERATIONS: usize = 200_000;

/// How a model variable is recovered from nonnegative standard-form columns.
#[derive(Debug, Clone, Copy)]
enum Recover {
    /// `x = offset + y`
    Shift { col: usize, offset: f64 },
    /// `x = offset - y`
    Reflect { col: usize, offset: f64 },
    /// `x = y_pos - y_neg`
    Split { pos: usize, neg: usize },
    /// Lower and upper bound coincide; no column.
    Fixed { value: f64 },
}

#[derive(Debug)]
pub(crate) enum LpOutcome {
    Optimal { values: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows x (cols + 1)`, the last column holds the right-hand side.
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.width() + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.t[r * self.width() + self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize, cost: &mut [f64]) {
        let w = self.width();
        let p = self.t[r * w + c];
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                *v /= p;
            }
            row[c] = 1.0;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f != 0.0 {
                let row = &mut self.t[i * w..(i + 1) * w];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = cost[c];
        if f != 0.0 {
            for (v, pv) in cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            cost[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row (plus negated objective in the last slot) for a column cost vector.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        d.push(0.0);
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..=self.cols {
                    d[c] -= cb * self.at(r, c);
                }
            }
        }
        d
    }

    /// Runs pivots to optimality over columns where `allowed` holds.
    /// Returns false when the objective is unbounded below.
    fn optimize(&mut self, d: &mut [f64], allowed: &dyn Fn(usize) -> bool, cost_eps: f64) -> Result<bool> {
        let mut bland = false;
        for _ in 0..MAX_ITERATIONS {
            let entering = if bland {
                (0..self.cols).find(|&c| allowed(c) && d[c] < -cost_eps)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for c in 0..self.cols {
                    if allowed(c) && d[c] < -cost_eps && best.is_none_or(|(_, v)| d[c] < v) {
                        best = Some((c, d[c]));
                    }
                }
                best.map(|(c, _)| c)
            };
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, col);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r).max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-12 * (1.0 + lratio)
                                || (ratio <= lratio + 1e-12 * (1.0 + lratio) && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((row, ratio)) = leave else {
                return Ok(false);
            };
            bland = ratio <= 1e-12;
            self.pivot(row, col, d);
        }
        Err(Error::Resource(format!("simplex exceeded {MAX_ITERATIONS} iterations")))
    }
}

enum RowStatus {
    Active,
    /// Holds for every point inside the bounds.
    Redundant,
    /// Fails for every point inside the bounds.
    Impossible,
}

/// Compares the activity range over the free columns, implied by the
/// variable bounds, with the right-hand side left after fixed variables.
fn row_status(con: &Constraint, lower: &[f64], upper: &[f64], recover: &[Recover], rhs: f64) -> RowStatus {
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for (i, &a) in con.coefficients.iter().enumerate() {
        if a == 0.0 || matches!(recover[i], Recover::Fixed { .. }) {
            continue;
        }
        let (l, u) = if a > 0.0 { (lower[i], upper[i]) } else { (upper[i], lower[i]) };
        lo += a * l;
        hi += a * u;
    }
    let tol = 1e-9 * (1.0 + rhs.abs());
    match con.relation {
        Relation::Le if !(hi > rhs) => RowStatus::Redundant,
        Relation::Le if lo > rhs + tol => RowStatus::Impossible,
        Relation::Ge if !(lo < rhs) => RowStatus::Redundant,
        Relation::Ge if hi < rhs - tol => RowStatus::Impossible,
        Relation::Eq if hi <= lo && (lo - rhs).abs() <= tol => RowStatus::Redundant,
        Relation::Eq if lo > rhs + tol || hi < rhs - tol => RowStatus::Impossible,
        _ => RowStatus::Active,
    }
}

/// Solves the continuous relaxation of `model` with variable bounds overridden
/// by `lower` / `upper`. The returned objective is in the model's own sense.
pub(crate) fn solve_relaxation(model: &LinearModel, lower: &[f64], upper: &[f64]) -> Result<LpOutcome> {
    let n = model.num_variables();
    let sign = match model.objective.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };

    // Column layout for the structural part.
    let mut recover = Vec::with_capacity(n);
    let mut struct_cols = 0usize;
    for i in 0..n {
        let (l, u) = (lower[i], upper[i]);
        if l > u {
            return Ok(LpOutcome::Infeasible);
        }
        let r = if l == u {
            recover.push(Recover::Fixed { value: l });
            continue;
        } else if l.is_finite() {
            Recover::Shift { col: struct_cols, offset: l }
        } else if u.is_finite() {
            Recover::Reflect { col: struct_cols, offset: u }
        } else {
            struct_cols += 1;
            Recover::Split {
                pos: struct_cols - 1,
                neg: struct_cols,
            }
        };
        struct_cols += 1;
        recover.push(r);
    }

    // Rows in structural columns: (coefficients, relation, rhs).
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for con in &model.constraints {
        let mut a = vec![0.0; struct_cols];
        let mut rhs = con.rhs;
        for (i, &coef) in con.coefficients.iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            match recover[i] {
                Recover::Shift { col, offset } => {
                    a[col] += coef;
                    rhs -= coef * offset;
                }
                Recover::Reflect { col, offset } => {
                    a[col] -= coef;
                    rhs -= coef * offset;
                }
                Recover::Split { pos, neg } => {
                    a[pos] += coef;
                    a[neg] -= coef;
                }
                Recover::Fixed { value } => rhs -= coef * value,
            }
        }
        match row_status(con, lower, upper, &recover, rhs) {
            RowStatus::Redundant => continue,
            RowStatus::Impossible => return Ok(LpOutcome::Infeasible),
            RowStatus::Active => {}
        }
        rows.push((a, con.relation, rhs));
    }
    for (i, r) in recover.iter().enumerate() {
        if let Recover::Shift { col, offset } = *r {
            if upper[i].is_finite() {
                let mut a = vec![0.0; struct_cols];
                a[col] = 1.0;
                rows.push((a, Relation::Le, upper[i] - offset));
            }
        }
    }

    // Normalize each row, then make right-hand sides nonnegative.
    for (a, rel, rhs) in rows.iter_mut() {
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            let ok = match rel {
                Relation::Le => *rhs >= -1e-9,
                Relation::Ge => *rhs <= 1e-9,
                Relation::Eq => rhs.abs() <= 1e-9,
            };
            if !ok {
                return Ok(LpOutcome::Infeasible);
            }
            *rhs = 0.0;
            *rel = Relation::Le;
            continue;
        }
        for v in a.iter_mut() {
            *v /= scale;
        }
        *rhs /= scale;
        if *rhs < 0.0 {
            for v in a.iter_mut() {
                *v = -*v;
            }
            *rhs = -*rhs;
            *rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    rows.retain(|(a, _, _)| a.iter().any(|v| *v != 0.0));

    let m = rows.len();
    let n_slack = rows.iter().filter(|(_, rel, _)| *rel != Relation::Eq).count();
    let n_art = rows.iter().filter(|(_, rel, _)| *rel != Relation::Le).count();
    let cols = struct_cols + n_slack + n_art;
    let art_start = struct_cols + n_slack;
    let w = cols + 1;
    let mut t = vec![0.0; m * w];
    let mut basis = vec![0; m];
    let (mut next_slack, mut next_art) = (struct_cols, art_start);
    for (r, (a, rel, rhs)) in rows.iter().enumerate() {
        t[r * w..r * w + struct_cols].copy_from_slice(a);
        t[r * w + cols] = *rhs;
        match rel {
            Relation::Le => {
                t[r * w + next_slack] = 1.0;
                basis[r] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                t[r * w + next_slack] = -1.0;
                next_slack += 1;
                t[r * w + next_art] = 1.0;
                basis[r] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                t[r * w + next_art] = 1.0;
                basis[r] = next_art;
                next_art += 1;
            }
        }
    }
    let mut tab = Tableau { rows: m, cols, t, basis };

    if n_art > 0 {
        let mut phase1 = vec![0.0; cols];
        for c in art_start..cols {
            phase1[c] = 1.0;
        }
        let mut d = tab.reduced_costs(&phase1);
        tab.optimize(&mut d, &|_| true, 1e-11)?;
        let infeasibility: f64 = (0..m)
            .filter(|&r| tab.basis[r] >= art_start)
            .map(|r| tab.rhs(r))
            .sum();
        if infeasibility > PHASE_ONE_EPS {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive zero-valued artificials out where a structural or slack pivot exists.
        for r in 0..m {
            if tab.basis[r] >= art_start {
                if let Some(c) = (0..art_start).find(|&c| tab.at(r, c).abs() > PIVOT_EPS) {
                    tab.pivot(r, c, &mut d);
                }
            }
        }
    }

    let mut cost = vec![0.0; cols];
    for (i, r) in recover.iter().enumerate() {
        let c = sign * model.objective.coefficients[i];
        match *r {
            Recover::Shift { col, .. } => cost[col] += c,
            Recover::Reflect { col, .. } => cost[col] -= c,
            Recover::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
            Recover::Fixed { .. } => {}
        }
    }
    let cost_eps = 1e-9 * cost.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut d = tab.reduced_costs(&cost);
    if !tab.optimize(&mut d, &|c| c < art_start, cost_eps)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut y = vec![0.0; cols];
    for r in 0..m {
        y[tab.basis[r]] = tab.rhs(r).max(0.0);
    }
    let values: Vec<f64> = recover
        .iter()
        .map(|r| match *r {
            Recover::Shift { col, offset } => offset + y[col],
            Recover::Reflect { col, offset } => offset - y[col],
            Recover::Split { pos, neg } => y[pos] - y[neg],
            Recover::Fixed { value } => value,
        })
        .collect();
    let objective = model.objective_value(&values);
    Ok(LpOutcome::Optimal { values, objective })
}

/// Optimum of the continuous relaxation; integrality flags are ignored.
pub fn solve_lp(model: &LinearModel) -> Result<IlpSolution> {
    model.validate()?;
    let lower: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
    Ok(match solve_relaxation(model, &lower, &upper)? {
        LpOutcome::Optimal { values, objective } => IlpSolution {
            status: SolveStatus::Optimal,
            values,
            objective_value: objective,
            nodes: 1,
        },
        LpOutcome::Infeasible => IlpSolution::without_point(SolveStatus::Infeasible),
        LpOutcome::Unbounded => IlpSolution::without_point(SolveStatus::Unbounded),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn single_bounded_variable() {
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_variable("x", 0.0, 10.0, false);
        m.set_objective_coefficient(x, 1.0);
        m.add_constraint(vec![1.0], Relation::Le, 2.5);
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!(close(s.values[0], 2.5));
        assert!(close(s.objective_value, 2.5));
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut m = LinearModel::new(Sense::Minimize);
        m.add_variable("x", f64::NEG_INFINITY, f64::INFINITY, false);
        m.add_constraint(vec![1.0], Relation::Ge, 2.0);
        m.add_constraint(vec![1.0], Relation::Le, 1.0);
        assert_eq!(solve_lp(&m).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_variable("x", 0.0, f64::INFINITY, false);
        let y = m.add_variable("y", 0.0, f64::INFINITY, false);
        m.set_objective_coefficient(x, 1.0);
        m.add_constraint(vec![1.0, -1.0], Relation::Le, 1.0);
        let _ = y;
        assert_eq!(solve_lp(&m).unwrap().status, SolveStatus::Unbounded);
    }

    #[test]
    fn free_and_reflected_variables() {
        // min x + y, x free, y <= 3 only; x - y >= -5, x >= -2 via a row
        let mut m = LinearModel::new(Sense::Minimize);
        let x = m.add_variable("x", f64::NEG_INFINITY, f64::INFINITY, false);
        let y = m.add_variable("y", f64::NEG_INFINITY, 3.0, false);
        m.set_objective_coefficient(x, 1.0);
        m.set_objective_coefficient(y, 1.0);
        m.add_constraint(vec![1.0, -1.0], Relation::Ge, -5.0);
        m.add_constraint(vec![1.0, 0.0], Relation::Ge, -2.0);
        m.add_constraint(vec![1.0, 1.0], Relation::Ge, -4.0);
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!(close(s.objective_value, -4.0));
        assert!(m.is_feasible(&s.values) || !m.variables.iter().any(|v| v.integral));
    }

    #[test]
    fn equality_rows_and_objective_constant() {
        // max 3x + 2y + 7 s.t. x + y = 4, x <= 3
        let mut m = LinearModel::new(Sense::Maximize);
        m.add_variable("x", 0.0, 3.0, false);
        m.add_variable("y", 0.0, f64::INFINITY, false);
        m.objective.coefficients = vec![3.0, 2.0];
        m.objective.constant = 7.0;
        m.add_constraint(vec![1.0, 1.0], Relation::Eq, 4.0);
        let s = solve_lp(&m).unwrap();
        assert!(close(s.values[0], 3.0));
        assert!(close(s.values[1], 1.0));
        assert!(close(s.objective_value, 18.0));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the pure most-negative rule.
        let mut m = LinearModel::new(Sense::Minimize);
        for name in ["x1", "x2", "x3", "x4"] {
            m.add_variable(name, 0.0, f64::INFINITY, false);
        }
        m.objective.coefficients = vec![-0.75, 150.0, -0.02, 6.0];
        m.add_constraint(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        m.add_constraint(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        m.add_constraint(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!(close(s.objective_value, -0.05));
    }

    #[test]
    fn empty_model() {
        let m = LinearModel::new(Sense::Minimize);
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.objective_value, 0.0);
    }

    #[test]
    fn zero_variable_row_checks_sign() {
        let mut m = LinearModel::new(Sense::Minimize);
        m.add_constraint(vec![], Relation::Ge, 1.0);
        assert_eq!(solve_lp(&m).unwrap().status, SolveStatus::Infeasible);
    }
}
