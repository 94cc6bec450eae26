use serde::{Deserialize, Serialize};

use super::model::{MilpModel, Relation, VarKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CheckViolation {
    WrongLength { expected: usize, got: usize },
    Bound { var: String, value: f64 },
    Integrality { var: String, value: f64 },
    Row { constraint: String, activity: f64, relation: String, rhs: f64 },
}

/// Re-evaluates every bound, integrality requirement and row of `model` at
/// `values`. Shares no code with the solver.
pub fn check_solution(model: &MilpModel, values: &[f64], tol: f64) -> Vec<CheckViolation> {
    let mut out = Vec::new();
    if values.len() != model.variables.len() {
        out.push(CheckViolation::WrongLength { expected: model.variables.len(), got: values.len() });
        return out;
    }
    for (v, &x) in model.variables.iter().zip(values) {
        if !x.is_finite() || x < v.lower - tol || x > v.upper + tol {
            out.push(CheckViolation::Bound { var: v.name.clone(), value: x });
        }
        if v.kind == VarKind::Binary && (x - x.round()).abs() > tol {
            out.push(CheckViolation::Integrality { var: v.name.clone(), value: x });
        }
    }
    for c in &model.constraints {
        let mut activity = 0.0;
        for &(v, a) in &c.terms {
            activity += a * values[v];
        }
        let ok = match c.relation {
            Relation::Le => activity <= c.rhs + tol,
            Relation::Ge => activity >= c.rhs - tol,
            Relation::Eq => (activity - c.rhs).abs() <= tol,
        };
        if !ok {
            out.push(CheckViolation::Row {
                constraint: c.name.clone(),
                activity,
                relation: c.relation.to_string(),
                rhs: c.rhs,
            });
        }
    }
    out
}
