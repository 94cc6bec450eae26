//! LP text format export and import.
//!
//! A model whose objective has no nonzero term is written as `obj: 0 x_dummy`
//! with `x_dummy = 0` in the bounds; the parser drops that variable again.
//! The objective constant is carried in a `\ offset:` comment.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::model::{MilpModel, Relation, VarKind, Variable};
use crate::error::{Error, Result};

pub const DUMMY_VAR: &str = "x_dummy";

const TERMS_PER_LINE: usize = 8;

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

fn write_terms(out: &mut String, terms: impl Iterator<Item = (f64, String)>) {
    let mut k = 0;
    for (coef, name) in terms {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if coef < 0.0 { '-' } else { '+' };
        if k == 0 && sign == '+' {
            let _ = write!(out, " {} {}", fmt_num(coef), name);
        } else {
            let _ = write!(out, " {} {} {}", sign, fmt_num(coef.abs()), name);
        }
        k += 1;
    }
}

pub fn emit_lp_file(model: &MilpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ Model: {}", model.name);
    if model.objective_offset != 0.0 {
        let _ = writeln!(out, "\\ offset: {}", fmt_num(model.objective_offset));
    }
    out.push_str("Minimize\n obj:");
    let obj: Vec<(f64, String)> = model
        .variables
        .iter()
        .filter(|v| v.objective != 0.0)
        .map(|v| (v.objective, v.name.clone()))
        .collect();
    let dummy = obj.is_empty();
    if dummy {
        let _ = write!(out, " 0 {DUMMY_VAR}");
    } else {
        write_terms(&mut out, obj.into_iter());
    }
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        if c.terms.is_empty() {
            let _ = write!(out, " 0 {DUMMY_VAR}");
        } else {
            write_terms(&mut out, c.terms.iter().map(|&(j, a)| (a, model.variables[j].name.clone())));
        }
        let _ = writeln!(out, " {} {}", c.relation, fmt_num(c.rhs));
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        match v.kind {
            VarKind::Binary => {
                let _ = writeln!(out, " 0 <= {} <= 1", v.name);
            }
            VarKind::Continuous => {
                if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
                    let _ = writeln!(out, " {} free", v.name);
                } else if v.lower == v.upper {
                    let _ = writeln!(out, " {} = {}", v.name, fmt_num(v.lower));
                } else {
                    let _ = writeln!(out, " {} <= {} <= {}", fmt_num(v.lower), v.name, fmt_num(v.upper));
                }
            }
        }
    }
    if dummy || model.constraints.iter().any(|c| c.terms.is_empty()) {
        let _ = writeln!(out, " {DUMMY_VAR} = 0");
    }
    let binaries: Vec<&Variable> = model.variables.iter().filter(|v| v.kind == VarKind::Binary).collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for chunk in binaries.chunks(TERMS_PER_LINE) {
            out.push(' ');
            out.push_str(&chunk.iter().map(|v| v.name.as_str()).collect::<Vec<_>>().join(" "));
            out.push('\n');
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Head,
    Objective,
    Constraints,
    Bounds,
    Binary,
    General,
    Done,
}

fn section_of(line: &str) -> Option<Section> {
    let l = line.trim().to_ascii_lowercase();
    Some(match l.as_str() {
        "minimize" | "minimise" | "minimum" | "min" => Section::Objective,
        "subject to" | "such that" | "st" | "s.t." | "st." => Section::Constraints,
        "bounds" | "bound" => Section::Bounds,
        "binary" | "binaries" | "bin" => Section::Binary,
        "general" | "generals" | "gen" => Section::General,
        "end" => Section::Done,
        _ => return None,
    })
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => tok
            .parse::<f64>()
            .map_err(|_| Error::LpFormat { line, message: format!("expected a number, found `{tok}`") }),
    }
}

fn is_number(tok: &str) -> bool {
    tok.parse::<f64>().is_ok() || matches!(tok.to_ascii_lowercase().as_str(), "inf" | "-inf" | "+inf")
}

/// Splits operators from names so `2x+3y>=1` and `2 x + 3 y >= 1` read alike.
fn tokenize(s: &str) -> Vec<String> {
    let mut toks = Vec::new();
    let mut cur = String::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let flush = |cur: &mut String, toks: &mut Vec<String>| {
        if !cur.is_empty() {
            toks.push(std::mem::take(cur));
        }
    };
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => flush(&mut cur, &mut toks),
            '<' | '>' | '=' => {
                flush(&mut cur, &mut toks);
                let mut op = c.to_string();
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    op.push('=');
                    i += 1;
                }
                if op == "=" && i + 1 < chars.len() && (chars[i + 1] == '<' || chars[i + 1] == '>') {
                    op = format!("{}=", chars[i + 1]);
                    i += 1;
                }
                toks.push(op);
            }
            '+' | '-' => {
                // exponent sign stays inside the number
                let in_exp = cur.ends_with(['e', 'E']) && cur[..cur.len() - 1].parse::<f64>().is_ok();
                if in_exp {
                    cur.push(c);
                } else {
                    flush(&mut cur, &mut toks);
                    toks.push(c.to_string());
                }
            }
            _ => cur.push(c),
        }
        i += 1;
    }
    flush(&mut cur, &mut toks);
    // split `2x` into `2 x`, rejoin signed constants after a relation
    let mut out: Vec<String> = Vec::with_capacity(toks.len());
    for t in toks {
        let t = match split_coefficient(&t) {
            Some((num, name)) => {
                out.push(num.to_string());
                name.to_string()
            }
            None => t,
        };
        if let Some(prev) = out.last() {
            if (prev == "-" || prev == "+") && is_number(&t) && {
                let before = out.len().checked_sub(2).map(|k| out[k].as_str());
                matches!(before, None | Some("<=" | ">=" | "=" | "<" | ">"))
            } {
                let sign = out.pop().unwrap();
                out.push(format!("{sign}{t}"));
                continue;
            }
        }
        out.push(t);
    }
    out
}

fn split_coefficient(tok: &str) -> Option<(&str, &str)> {
    if is_number(tok) || !tok.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return None;
    }
    let cut = (1..tok.len()).rev().find(|&k| {
        tok.is_char_boundary(k) && !tok[..k].ends_with(['e', 'E']) && tok[..k].parse::<f64>().is_ok()
    })?;
    Some((&tok[..cut], &tok[cut..]))
}

/// Parses `[+|-] [coef] name ...` into terms.
fn parse_linear(toks: &[String], line: usize) -> Result<Vec<(f64, String)>> {
    let mut terms = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let mut sign = 1.0;
        while i < toks.len() && (toks[i] == "+" || toks[i] == "-") {
            if toks[i] == "-" {
                sign = -sign;
            }
            i += 1;
        }
        if i >= toks.len() {
            return Err(Error::LpFormat { line, message: "dangling sign".into() });
        }
        let mut coef = 1.0;
        if is_number(&toks[i]) {
            coef = parse_num(&toks[i], line)?;
            i += 1;
            if i >= toks.len() {
                return Err(Error::LpFormat { line, message: "constant terms are not supported".into() });
            }
        }
        let name = &toks[i];
        if name == "+" || name == "-" || is_number(name) {
            return Err(Error::LpFormat { line, message: format!("expected a variable name, found `{name}`") });
        }
        terms.push((sign * coef, name.clone()));
        i += 1;
    }
    Ok(terms)
}

fn relation_of(tok: &str) -> Option<Relation> {
    match tok {
        "<=" | "<" | "=<" => Some(Relation::Le),
        ">=" | ">" | "=>" => Some(Relation::Ge),
        "=" => Some(Relation::Eq),
        _ => None,
    }
}

struct RawRow {
    name: String,
    terms: Vec<(f64, String)>,
    relation: Relation,
    rhs: f64,
}

/// Reads LP text back into a model. Variables are ordered by their first
/// appearance in the bounds section, then elsewhere.
pub fn parse_lp_file(text: &str) -> Result<MilpModel> {
    let mut section = Section::Head;
    let mut name = String::new();
    let mut offset = 0.0;
    // logical statements may span several physical lines
    let mut stmts: Vec<(Section, usize, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix('\\') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("Model:") {
                name = v.trim().to_string();
            } else if let Some(v) = rest.strip_prefix("offset:") {
                offset = parse_num(v.trim(), lineno)?;
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        if let Some(s) = section_of(trimmed) {
            section = s;
            continue;
        }
        match section {
            Section::Head => {
                return Err(Error::LpFormat { line: lineno, message: "content before the objective section".into() })
            }
            Section::Done => {
                return Err(Error::LpFormat { line: lineno, message: "content after End".into() });
            }
            Section::Objective | Section::Constraints => {
                let starts_new = trimmed.contains(':') || stmts.last().map_or(true, |(s, _, _)| *s != section);
                if starts_new {
                    stmts.push((section, lineno, trimmed.to_string()));
                } else {
                    let last = stmts.last_mut().unwrap();
                    last.2.push(' ');
                    last.2.push_str(trimmed);
                }
            }
            _ => stmts.push((section, lineno, trimmed.to_string())),
        }
    }
    if section != Section::Done {
        return Err(Error::LpFormat { line: text.lines().count(), message: "missing End".into() });
    }

    let mut objective: Vec<(f64, String)> = Vec::new();
    let mut rows: Vec<RawRow> = Vec::new();
    let mut bounds: Vec<(String, f64, f64)> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();
    for (sec, line, stmt) in &stmts {
        let line = *line;
        match sec {
            Section::Objective => {
                let body = stmt.split_once(':').map_or(stmt.as_str(), |(_, b)| b);
                objective.extend(parse_linear(&tokenize(body), line)?);
            }
            Section::Constraints => {
                let (label, body) = match stmt.split_once(':') {
                    Some((l, b)) => (l.trim().to_string(), b),
                    None => (format!("R{}", rows.len() + 1), stmt.as_str()),
                };
                let toks = tokenize(body);
                let pos = toks
                    .iter()
                    .position(|t| relation_of(t).is_some())
                    .ok_or_else(|| Error::LpFormat { line, message: "constraint without relation".into() })?;
                if pos + 2 != toks.len() {
                    return Err(Error::LpFormat { line, message: "expected a single right-hand side".into() });
                }
                rows.push(RawRow {
                    name: label,
                    terms: parse_linear(&toks[..pos], line)?,
                    relation: relation_of(&toks[pos]).unwrap(),
                    rhs: parse_num(&toks[pos + 1], line)?,
                });
            }
            Section::Bounds => {
                let toks = tokenize(stmt);
                let t: Vec<&str> = toks.iter().map(String::as_str).collect();
                let b = match t.as_slice() {
                    [v, f] if f.eq_ignore_ascii_case("free") => (v.to_string(), f64::NEG_INFINITY, f64::INFINITY),
                    [l, "<=", v, "<=", u] => (v.to_string(), parse_num(l, line)?, parse_num(u, line)?),
                    [v, "=", x] => {
                        let x = parse_num(x, line)?;
                        (v.to_string(), x, x)
                    }
                    [v, "<=", u] if !is_number(v) => (v.to_string(), 0.0, parse_num(u, line)?),
                    [v, ">=", l] if !is_number(v) => (v.to_string(), parse_num(l, line)?, f64::INFINITY),
                    [l, "<=", v] => (v.to_string(), parse_num(l, line)?, f64::INFINITY),
                    _ => return Err(Error::LpFormat { line, message: format!("unrecognised bound `{stmt}`") }),
                };
                bounds.push(b);
            }
            Section::Binary => binaries.extend(stmt.split_whitespace().map(str::to_string)),
            Section::General => {
                return Err(Error::LpFormat { line, message: "general integer variables are not supported".into() })
            }
            Section::Head | Section::Done => unreachable!(),
        }
    }

    let mut order: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut see = |n: &str| {
        if !index.contains_key(n) {
            index.insert(n.to_string(), order.len());
            order.push(n.to_string());
        }
    };
    for (v, _, _) in &bounds {
        see(v);
    }
    for (_, v) in &objective {
        see(v);
    }
    for r in &rows {
        for (_, v) in &r.terms {
            see(v);
        }
    }
    for v in &binaries {
        see(v);
    }

    let mut vars: Vec<Variable> = order
        .iter()
        .map(|n| Variable { name: n.clone(), kind: VarKind::Continuous, lower: 0.0, upper: f64::INFINITY, objective: 0.0 })
        .collect();
    for (v, l, u) in &bounds {
        let var = &mut vars[index[v]];
        var.lower = *l;
        var.upper = *u;
    }
    for (c, v) in &objective {
        vars[index[v]].objective += c;
    }
    for v in &binaries {
        let var = &mut vars[index[v]];
        var.kind = VarKind::Binary;
        var.lower = var.lower.max(0.0);
        var.upper = var.upper.min(1.0);
    }

    // drop the placeholder variable and renumber
    let dummy = index.get(DUMMY_VAR).copied();
    let remap: Vec<Option<usize>> = {
        let mut next = 0;
        (0..vars.len())
            .map(|j| {
                if Some(j) == dummy {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    let mut model = MilpModel::new(name);
    model.objective_offset = offset;
    model.variables = vars.into_iter().enumerate().filter(|(j, _)| Some(*j) != dummy).map(|(_, v)| v).collect();
    for r in rows {
        let terms = r.terms.iter().filter_map(|(a, v)| remap[index[v]].map(|j| (j, *a))).collect();
        model.add_constraint(r.name, "", terms, r.relation, r.rhs);
    }
    Ok(model)
}

/// Reads an external solver's `name value` listing into a value vector for
/// `model`. Names missing from the listing are taken as zero.
pub fn parse_solution_listing(text: &str, model: &MilpModel) -> Result<Vec<f64>> {
    let index: HashMap<&str, usize> = model.variables.iter().enumerate().map(|(j, v)| (v.name.as_str(), j)).collect();
    let mut values = vec![0.0; model.variables.len()];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('\\') {
            continue;
        }
        let parts: Vec<&str> = t.split(|c: char| c.is_whitespace() || c == '=' || c == ',').filter(|s| !s.is_empty()).collect();
        let [name, value] = parts.as_slice() else {
            return Err(Error::LpFormat { line, message: format!("expected `name value`, found `{t}`") });
        };
        if *name == DUMMY_VAR {
            continue;
        }
        let j = *index
            .get(name)
            .ok_or_else(|| Error::LpFormat { line, message: format!("unknown variable `{name}`") })?;
        values[j] = parse_num(value, line)?;
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{solve_milp, Relation};

    #[test]
    fn smoke_sections() {
        let mut m = MilpModel::new("smoke");
        let x = m.add_binary("x", 1.0);
        m.add_constraint("c1", "C", vec![(x, 1.0)], Relation::Ge, 1.0);
        let text = emit_lp_file(&m);
        for s in ["Minimize", "Subject To", "Binary", "End"] {
            assert!(text.contains(s), "{text}");
        }
        assert!(text.contains(" obj: 1 x"));
        assert!(text.contains(" c1: 1 x >= 1"));
    }

    #[test]
    fn empty_objective_uses_dummy() {
        let mut m = MilpModel::new("feas");
        let x = m.add_binary("x", 0.0);
        m.add_constraint("c1", "C", vec![(x, 1.0)], Relation::Le, 1.0);
        let text = emit_lp_file(&m);
        assert!(text.contains("obj: 0 x_dummy"));
        let back = parse_lp_file(&text).unwrap();
        assert_eq!(back.variables.len(), 1);
        assert_eq!(back.variables[0].name, "x");
        assert_eq!(back.constraints[0].terms, vec![(0, 1.0)]);
    }

    #[test]
    fn round_trip_preserves_model() {
        let mut m = MilpModel::new("rt");
        m.objective_offset = -2.5;
        let mut ids = Vec::new();
        for k in 0..20 {
            ids.push(m.add_binary(format!("wbeta_{k}_1_1"), 0.1 * k as f64 - 0.7));
        }
        let y = m.add_continuous("y", -3.0, 4.25, 1e-3);
        let z = m.add_continuous("z", f64::NEG_INFINITY, f64::INFINITY, 0.0);
        let terms: Vec<_> = ids.iter().map(|&j| (j, 1.5)).chain([(y, -2.0), (z, 1.0)]).collect();
        m.add_constraint("big", "F", terms, Relation::Le, 17.0);
        m.add_constraint("e", "F", vec![(z, 1.0), (ids[3], -1e-7)], Relation::Eq, 0.0);
        m.add_constraint("g", "F", vec![(y, 1.0)], Relation::Ge, -1.0);
        let back = parse_lp_file(&emit_lp_file(&m)).unwrap();
        assert_eq!(back.variables, m.variables);
        assert_eq!(back.objective_offset, m.objective_offset);
        for (a, b) in back.constraints.iter().zip(&m.constraints) {
            assert_eq!((a.name.as_str(), &a.terms, a.relation, a.rhs), (b.name.as_str(), &b.terms, b.relation, b.rhs));
        }
        let s1 = solve_milp(&m, 0.0, 30.0).unwrap();
        let s2 = solve_milp(&back, 0.0, 30.0).unwrap();
        assert!((s1.objective - s2.objective).abs() < 1e-9);
    }

    #[test]
    fn compact_syntax_parses() {
        let text = "Minimize\n obj: 2x + 3y\nSubject To\n c: x+y>=1\n d: x - y <= 0.5\nBinary\n x y\nEnd\n";
        let m = parse_lp_file(text).unwrap();
        assert_eq!(m.variables.len(), 2);
        let s = solve_milp(&m, 0.0, 10.0).unwrap();
        assert!((s.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn bad_input_reports_line() {
        let text = "Minimize\n obj: x\nSubject To\n c: x 1\nEnd\n";
        match parse_lp_file(text) {
            Err(Error::LpFormat { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn solution_listing() {
        let mut m = MilpModel::new("s");
        m.add_binary("a", 1.0);
        m.add_binary("b", 1.0);
        let v = parse_solution_listing("# comment\na 1\nb = 0\nx_dummy 0\n", &m).unwrap();
        assert_eq!(v, vec![1.0, 0.0]);
        assert!(parse_solution_listing("c 1\n", &m).is_err());
    }
}
