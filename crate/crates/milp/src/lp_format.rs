//! Writer for the CPLEX-style LP text format.
//!
//! Layout:
//!
//! ```text
//! \ Problem: <name>
//! Maximize | Minimize
//!  obj: <terms> [+ constant]
//! Subject To
//!  <row name>: <terms> <= | = | >= <rhs>
//! Bounds
//!  <lower> <= <var> <= <upper>      (or `<var> >= <lower>` when unbounded above)
//! General
//!  <integer variable names>
//! End
//! ```
//!
//! Names are reduced to the characters the format accepts, anything else is
//! replaced by `_`, and a numeric suffix keeps them unique. Long expressions
//! wrap every eight terms. Expression constants are moved to the right-hand
//! side.

use std::collections::HashSet;
use std::fmt::Write;

use crate::problem::{LinearExpr, MilpProblem, Sense};

fn legal_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "!\"#$%&()/,.;?@_`'{}|~".contains(c)
}

fn sanitize(raw: &str, fallback: &str, used: &mut HashSet<String>) -> String {
    let mut s: String = raw.chars().map(|c| if legal_char(c) { c } else { '_' }).collect();
    if s.is_empty() {
        s = fallback.to_string();
    }
    let first = s.chars().next().unwrap();
    if first.is_ascii_digit() || first == '.' || first == 'e' || first == 'E' {
        s.insert(0, '_');
    }
    s.truncate(250);
    let mut candidate = s.clone();
    let mut k = 1;
    while !used.insert(candidate.clone()) {
        candidate = format!("{s}~{k}");
        k += 1;
    }
    candidate
}

fn num(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

fn write_terms(out: &mut String, expr: &LinearExpr, names: &[String]) {
    let mut e = expr.clone();
    e.compact();
    if e.terms.is_empty() {
        out.push_str(" 0 ");
        out.push_str(names.first().map(String::as_str).unwrap_or("__zero"));
        return;
    }
    for (k, &(v, c)) in e.terms.iter().enumerate() {
        if k > 0 && k % 8 == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", num(c.abs()), names[v.0]);
    }
}

/// Renders the problem as LP text.
pub fn to_lp_string(problem: &MilpProblem) -> String {
    let mut used = HashSet::new();
    used.insert("obj".to_string());
    let var_names: Vec<String> =
        problem.variables.iter().enumerate().map(|(j, v)| sanitize(&v.name, &format!("x{j}"), &mut used)).collect();
    let row_names: Vec<String> =
        problem.constraints.iter().enumerate().map(|(i, c)| sanitize(&c.name, &format!("c{i}"), &mut used)).collect();

    let mut out = String::new();
    let _ = writeln!(out, "\\ Problem: {}", problem.name);
    out.push_str(match problem.sense {
        Sense::Maximize => "Maximize\n",
        Sense::Minimize => "Minimize\n",
    });
    out.push_str(" obj:");
    let mut obj = problem.objective.clone();
    obj.constant = 0.0;
    write_terms(&mut out, &obj, &var_names);
    if problem.objective.constant != 0.0 {
        let c = problem.objective.constant;
        let _ = write!(out, " {} {}", if c < 0.0 { '-' } else { '+' }, num(c.abs()));
    }
    out.push('\n');

    out.push_str("Subject To\n");
    for (c, name) in problem.constraints.iter().zip(&row_names) {
        let _ = write!(out, " {name}:");
        let mut lhs = c.expr.clone();
        let rhs = c.rhs - lhs.constant;
        lhs.constant = 0.0;
        write_terms(&mut out, &lhs, &var_names);
        let _ = writeln!(out, " {} {}", c.relation.symbol(), num(rhs));
    }

    out.push_str("Bounds\n");
    for (v, name) in problem.variables.iter().zip(&var_names) {
        match v.upper {
            Some(u) if u.is_finite() => {
                let _ = writeln!(out, " {} <= {name} <= {}", num(v.lower), num(u));
            }
            _ => {
                let _ = writeln!(out, " {name} >= {}", num(v.lower));
            }
        }
    }

    let ints: Vec<&String> =
        problem.variables.iter().zip(&var_names).filter(|(v, _)| v.is_integer()).map(|(_, n)| n).collect();
    if !ints.is_empty() {
        out.push_str("General\n");
        for chunk in ints.chunks(8) {
            out.push(' ');
            out.push_str(&chunk.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" "));
            out.push('\n');
        }
    }
    out.push_str("End\n");
    out
}

pub fn write_lp(problem: &MilpProblem, path: impl AsRef<std::path::Path>) -> std::io::Result<()> {
    std::fs::write(path, to_lp_string(problem))
}
