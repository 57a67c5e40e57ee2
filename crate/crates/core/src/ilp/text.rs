//! Plain-text algebraic model format.
//!
//! ```text
//! model      := sense obj [rows] bounds [general] "end"
//! sense      := "minimize" | "maximize"
//! obj        := "obj:" terms
//! rows       := "subject to" { NAME ":" terms REL NUMBER }
//! bounds     := "bounds" { BOUND "<=" NAME "<=" BOUND }     one line per variable, in index order
//! general    := "general" { NAME }                         one integral variable per line
//! terms      := { ("+" | "-") NUMBER [NAME] } | "0"       a term without NAME is the objective constant
//! REL        := "<=" | ">=" | "="
//! BOUND      := NUMBER | "inf" | "-inf"
//! ```
//!
//! Tokens are separated by whitespace. Numbers are printed with the shortest
//! representation that parses back to the same `f64`, so export, parse and
//! export again is byte-identical. Zero coefficients are omitted.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::model::{valid_name, Constraint, LinearModel, Objective, Relation, Sense, Variable};

fn number(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

fn write_terms(out: &mut String, coefficients: &[f64], names: &[&str], constant: Option<f64>) {
    let mut any = false;
    for (c, name) in coefficients.iter().zip(names) {
        if *c == 0.0 {
            continue;
        }
        let sign = if *c < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {name}", number(c.abs()));
        any = true;
    }
    if let Some(k) = constant.filter(|k| *k != 0.0) {
        let sign = if k < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {}", number(k.abs()));
        any = true;
    }
    if !any {
        out.push_str(" 0");
    }
}

pub fn export_model(model: &LinearModel) -> String {
    let names: Vec<&str> = model.variables.iter().map(|v| v.name.as_str()).collect();
    let mut out = String::new();
    out.push_str(match model.objective.sense {
        Sense::Minimize => "minimize\n",
        Sense::Maximize => "maximize\n",
    });
    out.push_str("  obj:");
    write_terms(&mut out, &model.objective.coefficients, &names, Some(model.objective.constant));
    out.push('\n');
    if !model.constraints.is_empty() {
        out.push_str("subject to\n");
        for (i, c) in model.constraints.iter().enumerate() {
            let _ = write!(out, "  r{}:", i + 1);
            write_terms(&mut out, &c.coefficients, &names, None);
            let _ = writeln!(out, " {} {}", c.relation.symbol(), number(c.rhs));
        }
    }
    out.push_str("bounds\n");
    for v in &model.variables {
        let _ = writeln!(out, "  {} <= {} <= {}", number(v.lower), v.name, number(v.upper));
    }
    if model.variables.iter().any(|v| v.integral) {
        out.push_str("general\n");
        for v in model.variables.iter().filter(|v| v.integral) {
            let _ = writeln!(out, "  {}", v.name);
        }
    }
    out.push_str("end\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Start,
    Objective,
    Rows,
    Bounds,
    General,
    End,
}

fn parse_number(tok: &str, line: usize) -> Result<f64> {
    let v = match tok {
        "inf" | "+inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => tok
            .parse::<f64>()
            .map_err(|_| Error::Model(format!("line {line}: expected a number, found {tok:?}")))?,
    };
    if v.is_nan() {
        return Err(Error::Model(format!("line {line}: NaN is not allowed")));
    }
    Ok(v)
}

/// Parses signed terms; returns `(coefficient, Some(name))` pairs and constants as `(k, None)`.
fn parse_terms<'a>(tokens: &[&'a str], line: usize) -> Result<Vec<(f64, Option<&'a str>)>> {
    if tokens == ["0"] {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let sign = match tokens[i] {
            "+" => 1.0,
            "-" => -1.0,
            t => return Err(Error::Model(format!("line {line}: expected '+' or '-', found {t:?}"))),
        };
        let value = parse_number(
            tokens
                .get(i + 1)
                .ok_or_else(|| Error::Model(format!("line {line}: dangling sign")))?,
            line,
        )?;
        i += 2;
        let name = match tokens.get(i) {
            Some(t) if *t != "+" && *t != "-" => {
                i += 1;
                Some(*t)
            }
            _ => None,
        };
        out.push((sign * value, name));
    }
    Ok(out)
}

pub fn parse_model(text: &str) -> Result<LinearModel> {
    let mut section = Section::Start;
    let mut sense = None;
    let mut objective_terms = Vec::new();
    let mut rows: Vec<(Vec<(f64, Option<String>)>, Relation, f64, usize)> = Vec::new();
    let mut variables: Vec<Variable> = Vec::new();
    let mut general: Vec<(String, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        match trimmed {
            "minimize" | "maximize" if section == Section::Start => {
                sense = Some(if trimmed == "minimize" { Sense::Minimize } else { Sense::Maximize });
                section = Section::Objective;
                continue;
            }
            "subject to" if section == Section::Objective => {
                section = Section::Rows;
                continue;
            }
            "bounds" if matches!(section, Section::Objective | Section::Rows) => {
                section = Section::Bounds;
                continue;
            }
            "general" if section == Section::Bounds => {
                section = Section::General;
                continue;
            }
            "end" if matches!(section, Section::Bounds | Section::General) => {
                section = Section::End;
                continue;
            }
            _ => {}
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match section {
            Section::Objective => {
                if tokens.first() != Some(&"obj:") || !objective_terms.is_empty() {
                    return Err(Error::Model(format!("line {line}: expected a single 'obj:' line")));
                }
                objective_terms = parse_terms(&tokens[1..], line)?
                    .into_iter()
                    .map(|(c, n)| (c, n.map(str::to_owned)))
                    .collect();
                if objective_terms.is_empty() {
                    objective_terms.push((0.0, None));
                }
            }
            Section::Rows => {
                if tokens.len() < 3 || !tokens[0].ends_with(':') {
                    return Err(Error::Model(format!("line {line}: malformed constraint")));
                }
                let rel_at = tokens
                    .iter()
                    .position(|t| matches!(*t, "<=" | ">=" | "="))
                    .ok_or_else(|| Error::Model(format!("line {line}: constraint has no relation")))?;
                let relation = match tokens[rel_at] {
                    "<=" => Relation::Le,
                    ">=" => Relation::Ge,
                    _ => Relation::Eq,
                };
                if rel_at + 2 != tokens.len() {
                    return Err(Error::Model(format!("line {line}: expected a single right-hand side")));
                }
                let rhs = parse_number(tokens[rel_at + 1], line)?;
                let terms = parse_terms(&tokens[1..rel_at], line)?;
                if terms.iter().any(|(_, n)| n.is_none()) {
                    return Err(Error::Model(format!("line {line}: constants belong on the right-hand side")));
                }
                rows.push((
                    terms.into_iter().map(|(c, n)| (c, n.map(str::to_owned))).collect(),
                    relation,
                    rhs,
                    line,
                ));
            }
            Section::Bounds => {
                if tokens.len() != 5 || tokens[1] != "<=" || tokens[3] != "<=" {
                    return Err(Error::Model(format!("line {line}: expected 'lo <= name <= hi'")));
                }
                if !valid_name(tokens[2]) {
                    return Err(Error::Model(format!("line {line}: invalid variable name {:?}", tokens[2])));
                }
                variables.push(Variable {
                    name: tokens[2].to_owned(),
                    lower: parse_number(tokens[0], line)?,
                    upper: parse_number(tokens[4], line)?,
                    integral: false,
                });
            }
            Section::General => {
                for t in tokens {
                    general.push((t.to_owned(), line));
                }
            }
            Section::Start | Section::End => {
                return Err(Error::Model(format!("line {line}: unexpected {trimmed:?}")));
            }
        }
    }
    if section != Section::End {
        return Err(Error::Model("model text must finish with 'end'".into()));
    }

    let index: HashMap<String, usize> = variables.iter().enumerate().map(|(i, v)| (v.name.clone(), i)).collect();
    let lookup = |name: &str, line: usize| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Model(format!("line {line}: undeclared variable {name:?}")))
    };
    let n = variables.len();
    let mut objective = Objective {
        sense: sense.ok_or_else(|| Error::Model("missing objective sense".into()))?,
        coefficients: vec![0.0; n],
        constant: 0.0,
    };
    for (c, name) in &objective_terms {
        match name {
            Some(name) => objective.coefficients[lookup(name, 0)?] += c,
            None => objective.constant += c,
        }
    }
    let mut constraints = Vec::with_capacity(rows.len());
    for (terms, relation, rhs, line) in rows {
        let mut coefficients = vec![0.0; n];
        for (c, name) in terms {
            coefficients[lookup(name.as_deref().unwrap_or_default(), line)?] += c;
        }
        constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
    }
    let mut integral = vec![false; n];
    for (name, line) in general {
        integral[lookup(&name, line)?] = true;
    }
    for (v, flag) in variables.iter_mut().zip(integral) {
        v.integral = flag;
    }
    let model = LinearModel {
        variables,
        objective,
        constraints,
    };
    model.validate()?;
    Ok(model)
}
