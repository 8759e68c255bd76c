//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (("+"|"-") term)* ;
//! term   := factor (("*"|"/") factor)* ;
//! factor := base ("^" INT)? | "-" factor ;
//! base   := NUMBER | IDENT | IDENT "(" expr ")"
//!         | "d" "(" expr "," IDENT ("," INT)? ")"
//!         | "dx" "(" expr ")" | "dt" "(" expr ")" | "(" expr ")" ;
//! ```
//!
//! Derivative operators are applied while parsing. Identifiers resolve to,
//! in order: independent variables, the dependent variable and its
//! `u_xt`-style derivatives, parameters (with aliases), series coefficient
//! atoms (`u1`, `uhat2_x`, `utilde0_xxxx`). A call `F''(e)` needs `F` to be a
//! declared function.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::symcore::atom::{Atom, Deriv, Family, IndepVar, INDEP_VARS};
use crate::symcore::diff::diff_total;
use crate::symcore::expr::Expr;
use crate::symcore::rational::parse_rational;
use crate::Rational;

/// Names visible to the parser.
#[derive(Clone, Debug)]
pub struct Context {
    pub dep: String,
    pub params: BTreeSet<String>,
    pub funcs: BTreeSet<String>,
    pub aliases: BTreeMap<String, String>,
}

impl Default for Context {
    fn default() -> Self {
        let params = ["a", "eps", "theta", "q"].map(String::from).into();
        let funcs = ["F".to_string()].into();
        let aliases = [("epsilon", "eps"), ("ε", "eps"), ("θ", "theta")]
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .into();
        Context {
            dep: "u".into(),
            params,
            funcs,
            aliases,
        }
    }
}

impl Context {
    /// Context with only the reserved parameters and no functions.
    pub fn reserved() -> Context {
        Context {
            params: ["eps", "theta", "q"].map(String::from).into(),
            funcs: BTreeSet::new(),
            ..Context::default()
        }
    }

    fn resolve(&self, name: &str) -> Option<Expr> {
        if INDEP_VARS.contains(&name) {
            return Some(Expr::var(name));
        }
        if name == self.dep {
            return Some(Expr::dep());
        }
        if let Some(suffix) = name.strip_prefix(self.dep.as_str()).and_then(|s| s.strip_prefix('_')) {
            if let Some(d) = Deriv::from_suffix(suffix).filter(|d| d.order() > 0) {
                return Some(Expr::atom(Atom::Dep(d)));
            }
        }
        let canonical = self.aliases.get(name).map(String::as_str).unwrap_or(name);
        if self.params.contains(canonical) {
            return Some(Expr::param(canonical));
        }
        coefficient_atom(name).map(Expr::atom)
    }
}

/// `u3`, `uhat1_x`, `utilde0_xxxx`.
fn coefficient_atom(name: &str) -> Option<Atom> {
    // longest prefix first so `uhat` is not read as `u` + garbage
    for family in [Family::Tilde, Family::Hat, Family::Plain] {
        let Some(rest) = name.strip_prefix(family.prefix()) else {
            continue;
        };
        let (digits, suffix) = match rest.split_once('_') {
            Some((d, s)) => (d, Some(s)),
            None => (rest, None),
        };
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            continue;
        }
        let order: u32 = digits.parse().ok()?;
        let deriv = match suffix {
            Some(s) => Deriv::from_suffix(s).filter(|d| d.order() > 0)?,
            None => Deriv::NONE,
        };
        return Some(Atom::coeff(family, order, deriv));
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational, String),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let push = |out: &mut Vec<Token>, tok| {
            out.push(Token {
                tok,
                line: tl,
                column: tc,
            })
        };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = parse_rational(&text).map_err(|_| Error::Syntax {
                line: tl,
                column: tc,
                message: format!("malformed number `{text}`"),
            })?;
            push(&mut out, Tok::Num(value, text));
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            while i < chars.len() && chars[i] == '\'' {
                i += 1;
            }
            push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            i += 1;
            push(&mut out, Tok::Sym(c));
        } else {
            return Err(Error::Syntax {
                line,
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
        col += i - start;
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    ctx: &'a Context,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, t: &Token, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Num(_, s) => format!("`{s}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(self.error(&t, format!("expected `{c}`, found {}", Self::describe(&t.tok))))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        let t = self.next();
        match &t.tok {
            Tok::Num(r, _) if r.is_integer() => {
                let v: i64 = r
                    .to_integer()
                    .try_into()
                    .map_err(|_| self.error(&t, "integer out of range"))?;
                Ok(if neg { -v } else { v })
            }
            other => Err(self.error(&t, format!("expected integer, found {}", Self::describe(other)))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::add(terms) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc * self.factor()?;
            } else if self.eat('/') {
                acc = acc.div(&self.factor()?);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(-self.factor()?);
        }
        let base = self.base()?;
        if self.eat('^') {
            let t = self.peek().clone();
            let k = self.int()?;
            let k = i32::try_from(k).map_err(|_| self.error(&t, "exponent out of range"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn derivative(&mut self, e: Expr, var: &Token, n: i64) -> Result<Expr> {
        let Tok::Ident(name) = &var.tok else {
            return Err(self.error(var, "expected a variable name"));
        };
        let v = IndepVar::from_name(name)?;
        let n = u32::try_from(n).map_err(|_| self.error(var, "derivative order must be non-negative"))?;
        Ok(diff_total(&e, v, n))
    }

    fn base(&mut self) -> Result<Expr> {
        let t = self.next();
        match &t.tok {
            Tok::Num(r, _) => Ok(Expr::num(r.clone())),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) if self.peek().tok == Tok::Sym('(') => {
                self.next();
                if name == "d" {
                    let e = self.expr()?;
                    self.expect(',')?;
                    let var = self.next();
                    let n = if self.eat(',') { self.int()? } else { 1 };
                    self.expect(')')?;
                    return self.derivative(e, &var, n);
                }
                if let Some(v) = name.strip_prefix('d').filter(|v| INDEP_VARS.contains(v)) {
                    let e = self.expr()?;
                    self.expect(')')?;
                    let var = Token {
                        tok: Tok::Ident(v.to_string()),
                        ..t.clone()
                    };
                    return self.derivative(e, &var, 1);
                }
                let base = name.trim_end_matches('\'');
                let order = (name.len() - base.len()) as u32;
                if !self.ctx.funcs.contains(base) {
                    return Err(Error::UnknownIdentifier {
                        name: base.to_string(),
                        line: t.line,
                        column: t.column,
                    });
                }
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Expr::atom(Atom::func(base, order, &arg)?))
            }
            Tok::Ident(name) => self.ctx.resolve(name).ok_or_else(|| Error::UnknownIdentifier {
                name: name.clone(),
                line: t.line,
                column: t.column,
            }),
            other => Err(self.error(&t, format!("unexpected {}", Self::describe(other)))),
        }
    }
}

/// Parses with an explicit name context.
pub fn parse_with(src: &str, ctx: &Context) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        ctx,
    };
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return Err(p.error(&t, format!("unexpected {}", Parser::describe(&t.tok))));
    }
    Ok(e)
}

/// Parses with the default context: `x, t`, `u`, parameters
/// `a, eps, theta, q` and function `F`.
pub fn parse(src: &str) -> Result<Expr> {
    parse_with(src, &Context::default())
}
