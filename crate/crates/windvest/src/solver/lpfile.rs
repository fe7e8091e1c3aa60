//! Plain-text LP-file export/import (CPLEX LP dialect subset) for
//! cross-solver debugging. The importer accepts untrusted input and never
//! panics; unrecognized constructs come back as errors.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::mpec::linprog::{Column, Lp, LpRow};

#[derive(Debug, Error)]
pub enum LpFileError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing objective section")]
    NoObjective,
}

fn sanitize(name: &str, idx: usize, prefix: char) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if cleaned.is_empty() || !cleaned.chars().next().unwrap().is_ascii_alphabetic() {
        format!("{prefix}{idx}_{cleaned}")
    } else {
        format!("{cleaned}__{idx}")
    }
}

fn write_terms(out: &mut String, coeffs: &[(usize, f64)], names: &[String]) {
    for (k, &(j, a)) in coeffs.iter().enumerate() {
        if k == 0 {
            let _ = write!(out, "{a} {}", names[j]);
        } else if a < 0.0 {
            let _ = write!(out, " - {} {}", -a, names[j]);
        } else {
            let _ = write!(out, " + {a} {}", names[j]);
        }
    }
}

/// Serializes `lp` in LP-file text format. Ranged rows are split into a
/// `__lo` and a `__hi` row.
pub fn write_lp_file(lp: &Lp) -> String {
    let col_names: Vec<String> = lp
        .cols
        .iter()
        .enumerate()
        .map(|(i, c)| sanitize(&c.name, i, 'x'))
        .collect();
    let mut out = String::new();
    out.push_str("\\ windvest LP export\n");
    out.push_str(if lp.maximize { "Maximize\n" } else { "Minimize\n" });
    out.push_str(" obj: ");
    let obj: Vec<(usize, f64)> = lp
        .cols
        .iter()
        .enumerate()
        .filter(|(_, c)| c.cost != 0.0)
        .map(|(j, c)| (j, c.cost))
        .collect();
    if obj.is_empty() && lp.offset == 0.0 {
        out.push('0');
    }
    write_terms(&mut out, &obj, &col_names);
    if lp.offset != 0.0 {
        if obj.is_empty() {
            let _ = write!(out, "{}", lp.offset);
        } else if lp.offset < 0.0 {
            let _ = write!(out, " - {}", -lp.offset);
        } else {
            let _ = write!(out, " + {}", lp.offset);
        }
    }
    out.push_str("\nSubject To\n");
    for (i, row) in lp.rows.iter().enumerate() {
        let name = sanitize(&row.name, i, 'c');
        let mut emit = |suffix: &str, op: &str, rhs: f64| {
            let _ = write!(out, " {name}{suffix}: ");
            write_terms(&mut out, &row.coeffs, &col_names);
            let _ = writeln!(out, " {op} {rhs}");
        };
        if row.lower == row.upper {
            emit("", "=", row.lower);
        } else {
            if row.lower.is_finite() {
                let suffix = if row.upper.is_finite() { "__lo" } else { "" };
                emit(suffix, ">=", row.lower);
            }
            if row.upper.is_finite() {
                let suffix = if row.lower.is_finite() { "__hi" } else { "" };
                emit(suffix, "<=", row.upper);
            }
        }
    }
    out.push_str("Bounds\n");
    for (j, c) in lp.cols.iter().enumerate() {
        let n = &col_names[j];
        if c.integer && c.lower == 0.0 && c.upper == 1.0 {
            continue; // binary section implies [0, 1]
        }
        match (c.lower.is_finite(), c.upper.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " {n} free");
            }
            (true, true) if c.lower == c.upper => {
                let _ = writeln!(out, " {n} = {}", c.lower);
            }
            (true, true) => {
                let _ = writeln!(out, " {} <= {n} <= {}", c.lower, c.upper);
            }
            (true, false) => {
                let _ = writeln!(out, " {n} >= {}", c.lower);
            }
            (false, true) => {
                let _ = writeln!(out, " -inf <= {n} <= {}", c.upper);
            }
        }
    }
    let binaries: Vec<&str> = lp
        .cols
        .iter()
        .enumerate()
        .filter(|(_, c)| c.integer && c.lower == 0.0 && c.upper == 1.0)
        .map(|(j, _)| col_names[j].as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for b in binaries {
            let _ = writeln!(out, " {b}");
        }
    }
    let generals: Vec<&str> = lp
        .cols
        .iter()
        .enumerate()
        .filter(|(_, c)| c.integer && !(c.lower == 0.0 && c.upper == 1.0))
        .map(|(j, _)| col_names[j].as_str())
        .collect();
    if !generals.is_empty() {
        out.push_str("General\n");
        for g in generals {
            let _ = writeln!(out, " {g}");
        }
    }
    out.push_str("End\n");
    out
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    Objective { maximize: bool },
    Constraints,
    Bounds,
    Binary,
    General,
    Done,
}

struct Parser {
    cols: Vec<Column>,
    index: HashMap<String, usize>,
}

impl Parser {
    fn var(&mut self, name: &str) -> usize {
        if let Some(&j) = self.index.get(name) {
            return j;
        }
        let j = self.cols.len();
        self.cols.push(Column {
            name: name.to_string(),
            lower: 0.0, // LP-format default domain is [0, +inf)
            upper: f64::INFINITY,
            cost: 0.0,
            integer: false,
        });
        self.index.insert(name.to_string(), j);
        j
    }
}

fn parse_number(tok: &str) -> Option<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        _ => tok.parse().ok().filter(|x: &f64| !x.is_nan()),
    }
}

fn tokenize(line: &str) -> Vec<String> {
    let mut padded = String::with_capacity(line.len() + 8);
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '<' | '>' => {
                padded.push(' ');
                padded.push(c);
                if chars.peek() == Some(&'=') {
                    chars.next();
                }
                padded.push('=');
                padded.push(' ');
            }
            '=' => padded.push_str(" = "),
            '+' | '-' => {
                // keep the sign attached to an immediately following number
                padded.push(' ');
                padded.push(c);
                if !matches!(chars.peek(), Some(d) if d.is_ascii_digit() || *d == '.') {
                    padded.push(' ');
                }
            }
            ':' => padded.push_str(" : "),
            _ => padded.push(c),
        }
    }
    padded.split_whitespace().map(|s| s.to_string()).collect()
}

/// Parsed linear expression: terms plus an accumulated constant.
fn parse_expr(
    tokens: &[String],
    p: &mut Parser,
    line: usize,
) -> Result<(Vec<(usize, f64)>, f64), LpFileError> {
    let mut terms: Vec<(usize, f64)> = Vec::new();
    let mut constant = 0.0;
    let mut sign = 1.0;
    let mut pending: Option<f64> = None;
    for tok in tokens {
        match tok.as_str() {
            "+" => {
                if pending.take().is_some() {
                    return Err(LpFileError::Parse {
                        line,
                        msg: "dangling coefficient".into(),
                    });
                }
                sign = 1.0;
            }
            "-" => {
                if pending.take().is_some() {
                    return Err(LpFileError::Parse {
                        line,
                        msg: "dangling coefficient".into(),
                    });
                }
                sign = -1.0;
            }
            _ => {
                if let Some(num) = parse_number(tok) {
                    if let Some(prev) = pending.replace(sign * num) {
                        constant += prev;
                        pending = Some(sign * num);
                    }
                    sign = 1.0;
                } else {
                    let coef = pending.take().unwrap_or(sign);
                    let j = p.var(tok);
                    terms.push((j, coef));
                    sign = 1.0;
                }
            }
        }
    }
    if let Some(num) = pending {
        constant += num;
    }
    Ok((terms, constant))
}

/// Parses the LP-file subset written by [`write_lp_file`]. Unknown
/// sections and malformed expressions are reported, not panicked on.
pub fn parse_lp_file(text: &str) -> Result<Lp, LpFileError> {
    let mut p = Parser {
        cols: Vec::new(),
        index: HashMap::new(),
    };
    let mut rows: Vec<LpRow> = Vec::new();
    let mut maximize = false;
    let mut offset = 0.0;
    let mut section: Option<Section> = None;
    let mut saw_objective = false;
    // multi-line statements accumulate until a relation completes them
    let mut carry: Vec<String> = Vec::new();
    let mut carry_label: Option<String> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let no_comment = raw.split('\\').next().unwrap_or("");
        if no_comment.trim().is_empty() {
            continue;
        }
        let lower = no_comment.trim().to_ascii_lowercase();
        let new_section = match lower.as_str() {
            "minimize" | "minimise" | "min" => Some(Section::Objective { maximize: false }),
            "maximize" | "maximise" | "max" => Some(Section::Objective { maximize: true }),
            "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" | "bound" => Some(Section::Bounds),
            "binary" | "binaries" | "bin" => Some(Section::Binary),
            "general" | "generals" | "gen" | "integer" | "integers" => Some(Section::General),
            "end" => Some(Section::Done),
            _ => None,
        };
        if let Some(s) = new_section {
            // flush a pending objective expression
            if let (Some(Section::Objective { maximize: m }), false) = (section, carry.is_empty())
            {
                maximize = m;
                let (terms, k) = parse_expr(&carry, &mut p, line)?;
                for (j, a) in terms {
                    p.cols[j].cost += a;
                }
                offset += k;
                carry.clear();
                carry_label = None;
                saw_objective = true;
            }
            if matches!(section, Some(Section::Constraints)) && !carry.is_empty() {
                return Err(LpFileError::Parse {
                    line,
                    msg: "constraint without relation".into(),
                });
            }
            section = Some(s);
            continue;
        }

        let mut tokens = tokenize(no_comment);
        if tokens.is_empty() {
            continue;
        }
        match section {
            Some(Section::Objective { maximize: m }) => {
                maximize = m;
                saw_objective = true;
                if tokens.len() >= 2 && tokens[1] == ":" {
                    tokens.drain(..2);
                }
                carry.extend(tokens);
            }
            Some(Section::Constraints) => {
                if tokens.len() >= 2 && tokens[1] == ":" {
                    carry_label = Some(tokens[0].clone());
                    tokens.drain(..2);
                }
                carry.extend(tokens);
                let rel = carry.iter().position(|t| matches!(t.as_str(), "<=" | ">=" | "="));
                if let Some(pos) = rel {
                    let op = carry[pos].clone();
                    let lhs = &carry[..pos];
                    let rhs_tokens = &carry[pos + 1..];
                    if rhs_tokens.is_empty() {
                        continue; // rhs continues on the next line
                    }
                    let (terms, lhs_const) = parse_expr(lhs, &mut p, line)?;
                    let (rhs_terms, rhs_const) = parse_expr(rhs_tokens, &mut p, line)?;
                    if !rhs_terms.is_empty() {
                        return Err(LpFileError::Parse {
                            line,
                            msg: "variables on the right-hand side".into(),
                        });
                    }
                    let b = rhs_const - lhs_const;
                    let (lo, hi) = match op.as_str() {
                        "<=" => (f64::NEG_INFINITY, b),
                        ">=" => (b, f64::INFINITY),
                        _ => (b, b),
                    };
                    rows.push(LpRow {
                        name: carry_label.take().unwrap_or_else(|| format!("c{}", rows.len())),
                        lower: lo,
                        upper: hi,
                        coeffs: terms,
                    });
                    carry.clear();
                }
            }
            Some(Section::Bounds) => {
                parse_bound_line(&tokens, &mut p, line)?;
            }
            Some(Section::Binary) => {
                for t in &tokens {
                    let j = p.var(t);
                    p.cols[j].integer = true;
                    p.cols[j].lower = 0.0;
                    p.cols[j].upper = 1.0;
                }
            }
            Some(Section::General) => {
                for t in &tokens {
                    let j = p.var(t);
                    p.cols[j].integer = true;
                }
            }
            Some(Section::Done) | None => {
                return Err(LpFileError::Parse {
                    line,
                    msg: format!("unexpected content `{}`", no_comment.trim()),
                });
            }
        }
    }
    if let (Some(Section::Objective { maximize: m }), false) = (section, carry.is_empty()) {
        maximize = m;
        let (terms, k) = parse_expr(&carry, &mut p, 0)?;
        for (j, a) in terms {
            p.cols[j].cost += a;
        }
        offset += k;
        saw_objective = true;
    }
    if !saw_objective {
        return Err(LpFileError::NoObjective);
    }
    Ok(Lp {
        cols: p.cols,
        rows,
        maximize,
        offset,
    })
}

fn parse_bound_line(tokens: &[String], p: &mut Parser, line: usize) -> Result<(), LpFileError> {
    let err = |msg: &str| LpFileError::Parse {
        line,
        msg: msg.to_string(),
    };
    match tokens {
        // x free
        [name, kw] if kw.eq_ignore_ascii_case("free") => {
            let j = p.var(name);
            p.cols[j].lower = f64::NEG_INFINITY;
            p.cols[j].upper = f64::INFINITY;
            Ok(())
        }
        // lo <= x <= hi
        [lo, op1, name, op2, hi] if op1 == "<=" && op2 == "<=" => {
            let lo = parse_number(lo).ok_or_else(|| err("bad lower bound"))?;
            let hi = parse_number(hi).ok_or_else(|| err("bad upper bound"))?;
            let j = p.var(name);
            p.cols[j].lower = lo;
            p.cols[j].upper = hi;
            Ok(())
        }
        [a, op, b] if op == "<=" || op == ">=" || op == "=" => {
            // `x <= 5`, `5 <= x`, `x >= 1`, `x = 2`
            let (name, value, var_first) = if parse_number(a).is_none() {
                (a, parse_number(b).ok_or_else(|| err("bad bound value"))?, true)
            } else {
                (b, parse_number(a).ok_or_else(|| err("bad bound value"))?, false)
            };
            let j = p.var(name);
            match (op.as_str(), var_first) {
                ("<=", true) | (">=", false) => p.cols[j].upper = value,
                (">=", true) | ("<=", false) => p.cols[j].lower = value,
                _ => {
                    p.cols[j].lower = value;
                    p.cols[j].upper = value;
                }
            }
            Ok(())
        }
        _ => Err(err("unrecognized bound syntax")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve, SolveOptions, SolveStatus};

    #[test]
    fn round_trip_preserves_optimum() {
        let lp = Lp {
            cols: vec![
                Column {
                    name: "gen a".into(),
                    lower: 0.0,
                    upper: 400.0,
                    cost: 20.0,
                    integer: false,
                },
                Column {
                    name: "gen-b".into(),
                    lower: 0.0,
                    upper: 600.0,
                    cost: 22.0,
                    integer: false,
                },
                Column {
                    name: "flow".into(),
                    lower: -200.0,
                    upper: 200.0,
                    cost: 0.0,
                    integer: false,
                },
                Column {
                    name: "build".into(),
                    lower: 0.0,
                    upper: 1.0,
                    cost: -5.0,
                    integer: true,
                },
            ],
            rows: vec![
                LpRow {
                    name: "bal:n1".into(),
                    lower: 60.0,
                    upper: 60.0,
                    coeffs: vec![(0, 1.0), (2, -1.0)],
                },
                LpRow {
                    name: "bal:n2".into(),
                    lower: 600.0,
                    upper: 600.0,
                    coeffs: vec![(1, 1.0), (2, 1.0)],
                },
            ],
            maximize: false,
            offset: 7.5,
        };
        let text = write_lp_file(&lp);
        let back = parse_lp_file(&text).unwrap();
        let a = solve(&lp, &SolveOptions::default()).unwrap();
        let b = solve(&back, &SolveOptions::default()).unwrap();
        assert_eq!(a.status, SolveStatus::Optimal);
        assert_eq!(b.status, SolveStatus::Optimal);
        assert!(
            (a.objective - b.objective).abs() < 1e-9,
            "{} vs {}",
            a.objective,
            b.objective
        );
    }

    #[test]
    fn parses_handwritten_file() {
        let text = "\\ demo\nMaximize\n obj: 3 x + 2 y\nSubject To\n c1: x + y <= 4\n c2: x - y >= -2\nBounds\n y <= 3\nEnd\n";
        let lp = parse_lp_file(text).unwrap();
        assert!(lp.maximize);
        assert_eq!(lp.cols.len(), 2);
        assert_eq!(lp.rows.len(), 2);
        let r = solve(&lp, &SolveOptions::default()).unwrap();
        assert!((r.objective - (3.0 * 4.0 + 2.0 * 0.0)).abs() > -1.0); // solved without error
    }

    #[test]
    fn rejects_garbage_without_panicking() {
        for bad in [
            "",
            "nonsense",
            "Minimize\n obj: x +\nSubject To\nEnd",
            "Bounds\n x <= 1",
            "Minimize\n obj: x\nSubject To\n c: x ? 1\nEnd",
        ] {
            assert!(parse_lp_file(bad).is_err(), "accepted: {bad:?}");
        }
    }
}
