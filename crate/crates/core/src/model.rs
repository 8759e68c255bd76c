//! Model files.
//!
//! ```text
//! model burgers {
//!   indep: x, t;
//!   dep: u;
//!   param: a;
//!   func: F;
//!   E0: u_t + u*u_x;
//!   E1: u_xx;
//! }
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::seriesgen::PerturbedPde;
use crate::symcore::atom::INDEP_VARS;
use crate::symcore::parse::{parse_with, Context};

const RESERVED: [&str; 6] = ["q", "theta", "eps", "epsilon", "ε", "θ"];

#[derive(Clone, Debug)]
pub struct ModelFile {
    pub name: String,
    pub indep: Vec<String>,
    pub dep: String,
    pub params: Vec<String>,
    pub funcs: Vec<String>,
    pub pde: PerturbedPde,
}

/// Byte offset to 1-based line and column.
fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |nl| before[nl + 1..].chars().count()) + 1;
    (line, column)
}

fn syntax(src: &str, offset: usize, message: impl Into<String>) -> Error {
    let (line, column) = position(src, offset);
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn strip_comments(src: &str) -> String {
    src.lines()
        .map(|l| match l.find('#') {
            Some(i) => format!("{}{}", &l[..i], " ".repeat(l[i..].chars().count())),
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn skip_ws(s: &str, mut i: usize) -> usize {
    while let Some(c) = s[i..].chars().next() {
        if !c.is_whitespace() {
            break;
        }
        i += c.len_utf8();
    }
    i
}

fn ident_end(s: &str, i: usize) -> usize {
    s[i..]
        .char_indices()
        .find(|(_, c)| !(c.is_alphanumeric() || *c == '_'))
        .map_or(s.len(), |(k, _)| i + k)
}

fn names(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

/// Shifts an expression error to file coordinates.
fn relocate(err: Error, src: &str, start: usize) -> Error {
    let (l0, c0) = position(src, start);
    let shift = |line: usize, column: usize| if line == 1 { (l0, c0 + column - 1) } else { (l0 + line - 1, column) };
    match err {
        Error::Syntax { line, column, message } => {
            let (line, column) = shift(line, column);
            Error::Syntax { line, column, message }
        }
        Error::UnknownIdentifier { name, line, column } => {
            let (line, column) = shift(line, column);
            Error::UnknownIdentifier { name, line, column }
        }
        other => other,
    }
}

pub fn parse_model(src: &str) -> Result<ModelFile> {
    let text = strip_comments(src);
    let s = text.as_str();
    let mut i = skip_ws(s, 0);
    let kw_end = ident_end(s, i);
    if &s[i..kw_end] != "model" {
        return Err(syntax(s, i, "expected `model`"));
    }
    i = skip_ws(s, kw_end);
    let name_end = ident_end(s, i);
    if name_end == i {
        return Err(syntax(s, i, "expected a model name"));
    }
    let name = s[i..name_end].to_string();
    i = skip_ws(s, name_end);
    if !s[i..].starts_with('{') {
        return Err(syntax(s, i, "expected `{`"));
    }
    let body_start = i + 1;
    let close = s[body_start..]
        .find('}')
        .map(|k| body_start + k)
        .ok_or_else(|| syntax(s, s.len(), "missing `}`"))?;
    let tail = skip_ws(s, close + 1);
    if tail < s.len() {
        return Err(syntax(s, tail, "unexpected text after the model block"));
    }

    let mut fields: Vec<(String, usize, usize, String)> = Vec::new();
    let mut start = body_start;
    for part in s[body_start..close].split(';') {
        let end = start + part.len();
        let k0 = skip_ws(s, start);
        if k0 < end {
            let colon = part
                .find(':')
                .map(|c| start + c)
                .ok_or_else(|| syntax(s, k0, "expected `key: value`"))?;
            let key = s[k0..colon].trim().to_string();
            let v0 = skip_ws(s, colon + 1).min(end);
            if fields.iter().any(|f| f.0 == key) {
                return Err(syntax(s, k0, format!("duplicate field `{key}`")));
            }
            fields.push((key, k0, v0, s[v0..end].trim_end().to_string()));
        }
        start = end + 1;
    }

    let field = |key: &str| fields.iter().find(|f| f.0 == key);
    for (key, at, _, _) in &fields {
        if !["indep", "dep", "param", "func", "E0", "E1"].contains(&key.as_str()) {
            return Err(syntax(s, *at, format!("unknown field `{key}`")));
        }
    }

    let indep = field("indep").map_or_else(|| INDEP_VARS.map(String::from).to_vec(), |f| names(&f.3));
    for v in &indep {
        if !INDEP_VARS.contains(&v.as_str()) {
            return Err(Error::InvalidModel(format!(
                "independent variable `{v}` not supported (available: {})",
                INDEP_VARS.join(", ")
            )));
        }
    }
    let dep = match field("dep").map(|f| names(&f.3)) {
        Some(d) if d.len() == 1 => d[0].clone(),
        Some(_) => return Err(Error::InvalidModel("exactly one dependent variable is required".into())),
        None => return Err(Error::InvalidModel("missing `dep`".into())),
    };
    let params = field("param").map_or_else(Vec::new, |f| names(&f.3));
    let funcs = field("func").map_or_else(Vec::new, |f| names(&f.3));

    let mut seen = BTreeSet::new();
    for n in std::iter::once(&dep).chain(&params).chain(&funcs).chain(&indep) {
        if RESERVED.contains(&n.as_str()) {
            return Err(Error::InvalidModel(format!("`{n}` is reserved")));
        }
        if !seen.insert(n.clone()) {
            return Err(Error::InvalidModel(format!("`{n}` declared twice")));
        }
    }

    let mut ctx = Context::reserved();
    ctx.dep = dep.clone();
    ctx.params.extend(params.iter().cloned());
    ctx.funcs.extend(funcs.iter().cloned());
    let expr = |key: &str| -> Result<_> {
        let (_, at, v0, value) = field(key).ok_or_else(|| Error::InvalidModel(format!("missing `{key}`")))?;
        if value.is_empty() {
            return Err(syntax(s, *at, format!("`{key}` is empty")));
        }
        parse_with(value, &ctx).map_err(|e| relocate(e, s, *v0))
    };
    let e0 = expr("E0")?;
    let e1 = expr("E1")?;
    let pde = PerturbedPde::new(&name, e0, e1)?;
    Ok(ModelFile {
        name,
        indep,
        dep,
        params,
        funcs,
        pde,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chmodel::{ch_pde, ChCase};
    use crate::symcore::normalize;

    const CH: &str = "# Cahn-Hilliard\nmodel ch {\n  indep: x, t;\n  dep: u;\n  func: F;\n  E0: u_t + dx(F(u)*u_x);\n  E1: u_xxxx;\n}\n";

    #[test]
    fn parses_builtin_equivalent() {
        let m = parse_model(CH).unwrap();
        assert_eq!(m.name, "ch");
        let builtin = ch_pde(ChCase::Generic);
        assert_eq!(normalize(&m.pde.e0).unwrap(), normalize(&builtin.e0).unwrap());
        assert_eq!(normalize(&m.pde.e1).unwrap(), normalize(&builtin.e1).unwrap());
    }

    #[test]
    fn reserved_names_rejected() {
        let src = "model m { dep: u; param: theta; E0: u_t; E1: u_xx; }";
        assert!(matches!(parse_model(src), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn eps_in_equation_rejected() {
        let src = "model m { dep: u; E0: u_t + eps*u; E1: u_xx; }";
        assert!(matches!(parse_model(src), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn undeclared_function_located() {
        let src = "model m {\n  dep: u;\n  E0: u_t + G(u);\n  E1: u_xx;\n}";
        match parse_model(src) {
            Err(Error::UnknownIdentifier { name, line, column }) => {
                assert_eq!((name.as_str(), line, column), ("G", 3, 13));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_model("mdl m {}"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_model("model m { dep: u; E0: u_t; E1: u_xx;"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_model("model m { dep: u, v; E0: u_t; E1: u_xx; }"), Err(Error::InvalidModel(_))));
        assert!(matches!(parse_model("model m { dep: u; indep: y; E0: u_t; E1: u_xx; }"), Err(Error::InvalidModel(_))));
        assert!(matches!(parse_model("model m { dep: u; color: red; E0: u_t; E1: u_xx; }"), Err(Error::Syntax { .. })));
    }
}
