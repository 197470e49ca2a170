use std::collections::BTreeMap;
use std::fmt;

use crate::error::MilpError;

/// Index of a variable inside a [`MilpProblem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Continuous,
    Integer,
}

/// A decision variable. Lower bounds default to zero; upper bounds are optional.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub domain: Domain,
    pub lower: f64,
    pub upper: Option<f64>,
}

impl Variable {
    pub fn continuous(name: impl Into<String>) -> Self {
        Variable { name: name.into(), domain: Domain::Continuous, lower: 0.0, upper: None }
    }

    pub fn integer(name: impl Into<String>) -> Self {
        Variable { name: name.into(), domain: Domain::Integer, lower: 0.0, upper: None }
    }

    pub fn with_upper(mut self, upper: f64) -> Self {
        self.upper = Some(upper);
        self
    }

    pub fn with_lower(mut self, lower: f64) -> Self {
        self.lower = lower;
        self
    }

    pub fn is_integer(&self) -> bool {
        self.domain == Domain::Integer
    }

    pub fn upper_or_inf(&self) -> f64 {
        self.upper.unwrap_or(f64::INFINITY)
    }
}

/// Sparse linear expression `sum(coef * var) + constant`.
///
/// Repeated variables are allowed while building; they are merged by
/// [`LinearExpr::compact`] and when the expression is added to a problem.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearExpr {
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl LinearExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        LinearExpr { terms: Vec::new(), constant: value }
    }

    pub fn term(var: VarId, coef: f64) -> Self {
        LinearExpr { terms: vec![(var, coef)], constant: 0.0 }
    }

    pub fn add_term(&mut self, var: VarId, coef: f64) -> &mut Self {
        self.terms.push((var, coef));
        self
    }

    pub fn add_constant(&mut self, value: f64) -> &mut Self {
        self.constant += value;
        self
    }

    pub fn with(mut self, var: VarId, coef: f64) -> Self {
        self.terms.push((var, coef));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merges duplicate variables and drops zero coefficients, sorted by id.
    pub fn compact(&mut self) {
        let mut merged: BTreeMap<VarId, f64> = BTreeMap::new();
        for &(v, c) in &self.terms {
            *merged.entry(v).or_insert(0.0) += c;
        }
        self.terms = merged.into_iter().filter(|&(_, c)| c != 0.0).collect();
    }

    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum::<f64>() + self.constant
    }
}

impl From<Vec<(VarId, f64)>> for LinearExpr {
    fn from(terms: Vec<(VarId, f64)>) -> Self {
        LinearExpr { terms, constant: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// `expr (relation) rhs`. The expression constant is moved to the right-hand
/// side when the problem is solved.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub expr: LinearExpr,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    /// Signed amount by which `values` violates the constraint (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.expr.evaluate(values);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// +1 for minimisation, -1 for maximisation.
    pub fn sign(self) -> f64 {
        match self {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        }
    }
}

/// A mixed-integer linear program.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpProblem {
    pub name: String,
    pub sense: Sense,
    pub objective: LinearExpr,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
}

impl Default for MilpProblem {
    fn default() -> Self {
        MilpProblem::new(Sense::Minimize)
    }
}

impl MilpProblem {
    pub fn new(sense: Sense) -> Self {
        MilpProblem {
            name: "problem".to_string(),
            sense,
            objective: LinearExpr::new(),
            variables: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn add_var(&mut self, var: Variable) -> VarId {
        self.variables.push(var);
        VarId(self.variables.len() - 1)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, upper: Option<f64>) -> VarId {
        let mut v = Variable::continuous(name);
        v.upper = upper;
        self.add_var(v)
    }

    pub fn add_integer(&mut self, name: impl Into<String>, upper: Option<f64>) -> VarId {
        let mut v = Variable::integer(name);
        v.upper = upper;
        self.add_var(v)
    }

    pub fn set_objective(&mut self, sense: Sense, expr: LinearExpr) {
        self.sense = sense;
        self.objective = expr;
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        expr: LinearExpr,
        relation: Relation,
        rhs: f64,
    ) -> usize {
        self.constraints.push(Constraint { name: name.into(), expr, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_integers(&self) -> usize {
        self.variables.iter().filter(|v| v.is_integer()).count()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name).map(VarId)
    }

    /// Copy of the problem with every integrality requirement dropped.
    pub fn relax(&self) -> MilpProblem {
        let mut p = self.clone();
        for v in &mut p.variables {
            v.domain = Domain::Continuous;
        }
        p
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.evaluate(values)
    }

    /// Checks that every referenced variable exists and every number is usable.
    pub fn validate(&self) -> Result<(), MilpError> {
        let n = self.variables.len();
        for v in &self.variables {
            if !v.lower.is_finite() {
                return Err(MilpError::Malformed(format!("variable {} has a non-finite lower bound", v.name)));
            }
            if let Some(u) = v.upper {
                if u.is_nan() || u == f64::NEG_INFINITY {
                    return Err(MilpError::Malformed(format!("variable {} has an invalid upper bound", v.name)));
                }
            }
        }
        let check_expr = |what: &str, e: &LinearExpr| -> Result<(), MilpError> {
            for &(var, c) in &e.terms {
                if var.0 >= n {
                    return Err(MilpError::UndeclaredVariable { id: var.0, context: what.to_string() });
                }
                if !c.is_finite() {
                    return Err(MilpError::Malformed(format!(
                        "non-finite coefficient on {} in {}",
                        self.variables[var.0].name, what
                    )));
                }
            }
            if !e.constant.is_finite() {
                return Err(MilpError::Malformed(format!("non-finite constant in {what}")));
            }
            Ok(())
        };
        check_expr("objective", &self.objective)?;
        for c in &self.constraints {
            check_expr(&c.name, &c.expr)?;
            if !c.rhs.is_finite() {
                return Err(MilpError::Malformed(format!("non-finite right-hand side in {}", c.name)));
            }
        }
        Ok(())
    }
}
