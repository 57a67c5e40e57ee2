use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constraint satisfaction slack: `tau * (1 + |rhs|)`.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integral: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub sense: Sense,
    pub coefficients: Vec<f64>,
    pub constant: f64,
}

/// Dense linear row `coefficients . x  relation  rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().zip(x).map(|(a, v)| a * v).sum()
    }

    /// Amount by which `x` violates the row, zero when satisfied exactly.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }

    pub fn is_satisfied(&self, x: &[f64]) -> bool {
        self.violation(x) <= FEASIBILITY_TOLERANCE * (1.0 + self.rhs.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub variables: Vec<Variable>,
    pub objective: Objective,
    pub constraints: Vec<Constraint>,
}

impl LinearModel {
    pub fn new(sense: Sense) -> Self {
        Self {
            variables: Vec::new(),
            objective: Objective {
                sense,
                coefficients: Vec::new(),
                constant: 0.0,
            },
            constraints: Vec::new(),
        }
    }

    /// Adds a variable with a zero objective coefficient and returns its index.
    pub fn add_variable(&mut self, name: impl Into<String>, lower: f64, upper: f64, integral: bool) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
            integral,
        });
        self.objective.coefficients.push(0.0);
        for c in &mut self.constraints {
            c.coefficients.push(0.0);
        }
        self.variables.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        self.add_variable(name, 0.0, 1.0, true)
    }

    pub fn set_objective_coefficient(&mut self, var: usize, value: f64) {
        self.objective.coefficients[var] = value;
    }

    pub fn add_constraint(&mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        if self.objective.coefficients.len() != n {
            return Err(Error::Model(format!(
                "objective has {} coefficients for {n} variables",
                self.objective.coefficients.len()
            )));
        }
        if !self.objective.constant.is_finite() || self.objective.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Model("objective has a non-finite coefficient".into()));
        }
        let mut names = std::collections::HashSet::new();
        for v in &self.variables {
            if !valid_name(&v.name) {
                return Err(Error::Model(format!("invalid variable name {:?}", v.name)));
            }
            if !names.insert(v.name.as_str()) {
                return Err(Error::Model(format!("duplicate variable name {:?}", v.name)));
            }
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(Error::Model(format!("variable {} has bounds [{}, {}]", v.name, v.lower, v.upper)));
            }
            if v.lower == f64::INFINITY || v.upper == f64::NEG_INFINITY {
                return Err(Error::Model(format!("variable {} has an empty domain", v.name)));
            }
            if v.integral && !(v.lower.is_finite() && v.upper.is_finite()) {
                return Err(Error::Model(format!("integral variable {} needs finite bounds", v.name)));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return Err(Error::Model(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    c.coefficients.len()
                )));
            }
            if !c.rhs.is_finite() || c.coefficients.iter().any(|a| !a.is_finite()) {
                return Err(Error::Model(format!("constraint {i} has a non-finite entry")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective
            .coefficients
            .iter()
            .zip(x)
            .map(|(c, v)| c * v)
            .sum::<f64>()
            + self.objective.constant
    }

    /// Bounds, rows and integrality all hold within tolerance.
    pub fn is_feasible(&self, x: &[f64]) -> bool {
        x.len() == self.variables.len()
            && self.variables.iter().zip(x).all(|(v, &val)| {
                let tol = FEASIBILITY_TOLERANCE * (1.0 + val.abs());
                val >= v.lower - tol && val <= v.upper + tol && (!v.integral || (val - val.round()).abs() <= tol)
            })
            && self.constraints.iter().all(|c| c.is_satisfied(x))
    }
}

pub(crate) fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    name != "inf" && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '[' || c == ']')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// A feasible point from the rounding heuristic, with no optimality claim.
    Feasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlpSolution {
    pub status: SolveStatus,
    /// One value per variable; empty unless a point was found.
    pub values: Vec<f64>,
    pub objective_value: f64,
    /// Branch-and-bound nodes whose relaxation was solved.
    pub nodes: usize,
}

impl IlpSolution {
    pub(crate) fn without_point(status: SolveStatus) -> Self {
        Self {
            status,
            values: Vec::new(),
            objective_value: f64::NAN,
            nodes: 0,
        }
    }

    pub fn has_point(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::Feasible)
    }

    /// Indices of variables whose value rounds to a nonzero integer.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.round() != 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        assert!(valid_name("x"));
        assert!(valid_name("c_12"));
        assert!(valid_name("n[3]"));
        assert!(!valid_name("3x"));
        assert!(!valid_name("inf"));
        assert!(!valid_name("-x"));
        assert!(!valid_name(""));
    }

    #[test]
    fn validation_catches_shape_errors() {
        let mut m = LinearModel::new(Sense::Minimize);
        m.add_variable("x", 0.0, 1.0, true);
        m.add_constraint(vec![1.0, 2.0], Relation::Le, 1.0);
        assert!(m.validate().is_err());

        let mut m = LinearModel::new(Sense::Minimize);
        m.add_variable("x", 0.0, f64::INFINITY, true);
        assert!(m.validate().is_err());

        let mut m = LinearModel::new(Sense::Minimize);
        m.add_variable("x", 0.0, 1.0, false);
        m.add_variable("x", 0.0, 1.0, false);
        assert!(m.validate().is_err());
    }

    #[test]
    fn adding_a_variable_widens_existing_rows() {
        let mut m = LinearModel::new(Sense::Minimize);
        m.add_variable("x", 0.0, 1.0, false);
        m.add_constraint(vec![1.0], Relation::Ge, 0.5);
        m.add_variable("y", 0.0, 1.0, false);
        assert_eq!(m.constraints[0].coefficients, vec![1.0, 0.0]);
        m.validate().unwrap();
    }
}
