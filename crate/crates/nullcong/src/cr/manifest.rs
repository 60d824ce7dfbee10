//! Text manifests describing user-supplied almost-CR bases.
//!
//! A manifest declares the holomorphic rank, the chart coordinate names, and
//! each coframe component as a closed-form expression:
//!
//! ```text
//! # comments run to the end of the line
//! m = 1
//! coords = t x1 y1
//!
//! theta0 t  = 1
//! theta0 x1 = -y1
//! theta0 y1 = x1
//!
//! theta1 x1 = 1
//! theta1 y1 = i
//!
//! # optional; defaults to the identity
//! levi 1 1 = 1
//! ```
//!
//! Expressions may use `+ - * /`, parentheses, the imaginary unit `i`, the
//! functions `sin cos tan exp log atan sqrt`, and `powi(expr, n)` with an
//! integer literal exponent.  Unspecified components vanish; when any `levi`
//! line is present, unspecified Levi entries default to the identity pattern
//! and missing conjugate partners are filled in by conjugation.  Parse errors
//! report line and column.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::{CRBase, RawCoframe};
use crate::error::{Error, Result};
use crate::jet::CJet;

const RESERVED: &[&str] =
    &["i", "sin", "cos", "tan", "exp", "log", "atan", "sqrt", "powi"];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A closed-form expression over the chart coordinates.
#[derive(Debug, Clone)]
pub enum Expr {
    Num(f64),
    Imag,
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Tan(Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Atan(Box<Expr>),
    Sqrt(Box<Expr>),
    Powi(Box<Expr>, i32),
}

impl Expr {
    /// Evaluates on coordinate jets.
    pub fn eval(&self, coords: &[CJet]) -> Result<CJet> {
        let (dim, order) = (coords[0].dim(), coords[0].order());
        Ok(match self {
            Expr::Num(v) => CJet::constant(dim, order, c(*v)),
            Expr::Imag => CJet::constant(dim, order, Complex64::new(0.0, 1.0)),
            Expr::Var(k) => coords[*k].clone(),
            Expr::Neg(e) => -&e.eval(coords)?,
            Expr::Add(a, b) => &a.eval(coords)? + &b.eval(coords)?,
            Expr::Sub(a, b) => &a.eval(coords)? - &b.eval(coords)?,
            Expr::Mul(a, b) => &a.eval(coords)? * &b.eval(coords)?,
            Expr::Div(a, b) => a.eval(coords)?.try_div(&b.eval(coords)?)?,
            Expr::Sin(e) => e.eval(coords)?.sin(),
            Expr::Cos(e) => e.eval(coords)?.cos(),
            Expr::Tan(e) => e.eval(coords)?.try_tan()?,
            Expr::Exp(e) => e.eval(coords)?.exp(),
            Expr::Log(e) => e.eval(coords)?.try_ln()?,
            Expr::Atan(e) => e.eval(coords)?.try_atan()?,
            Expr::Sqrt(e) => e.eval(coords)?.try_sqrt()?,
            Expr::Powi(e, n) => e.eval(coords)?.try_powi(*n)?,
        })
    }

    /// Structural complex conjugate: flips the sign of the imaginary unit.
    /// Valid because the coordinates are real and every supported function
    /// commutes with conjugation away from its branch cut.
    pub fn conjugated(&self) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Imag => Expr::Neg(Box::new(Expr::Imag)),
            Expr::Var(k) => Expr::Var(*k),
            Expr::Neg(e) => Expr::Neg(Box::new(e.conjugated())),
            Expr::Add(a, b) => {
                Expr::Add(Box::new(a.conjugated()), Box::new(b.conjugated()))
            }
            Expr::Sub(a, b) => {
                Expr::Sub(Box::new(a.conjugated()), Box::new(b.conjugated()))
            }
            Expr::Mul(a, b) => {
                Expr::Mul(Box::new(a.conjugated()), Box::new(b.conjugated()))
            }
            Expr::Div(a, b) => {
                Expr::Div(Box::new(a.conjugated()), Box::new(b.conjugated()))
            }
            Expr::Sin(e) => Expr::Sin(Box::new(e.conjugated())),
            Expr::Cos(e) => Expr::Cos(Box::new(e.conjugated())),
            Expr::Tan(e) => Expr::Tan(Box::new(e.conjugated())),
            Expr::Exp(e) => Expr::Exp(Box::new(e.conjugated())),
            Expr::Log(e) => Expr::Log(Box::new(e.conjugated())),
            Expr::Atan(e) => Expr::Atan(Box::new(e.conjugated())),
            Expr::Sqrt(e) => Expr::Sqrt(Box::new(e.conjugated())),
            Expr::Powi(e, n) => Expr::Powi(Box::new(e.conjugated()), *n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    Eq,
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    line: usize,
    col: usize,
}

fn err_at(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Lexes one line (comments already stripped); columns are 1-based.
fn lex_line(line_no: usize, text: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let ch = chars[k];
        let col = k + 1;
        if ch.is_whitespace() {
            k += 1;
            continue;
        }
        let kind = match ch {
            '+' => Some(TokKind::Plus),
            '-' => Some(TokKind::Minus),
            '*' => Some(TokKind::Star),
            '/' => Some(TokKind::Slash),
            '(' => Some(TokKind::LParen),
            ')' => Some(TokKind::RParen),
            ',' => Some(TokKind::Comma),
            '=' => Some(TokKind::Eq),
            _ => None,
        };
        if let Some(kind) = kind {
            toks.push(Tok { kind, line: line_no, col });
            k += 1;
            continue;
        }
        if ch.is_ascii_digit() || ch == '.' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                k += 1;
            }
            if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                let mut j = k + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    k = j;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                }
            }
            let text: String = chars[start..k].iter().collect();
            let v: f64 = text
                .parse()
                .map_err(|_| err_at(line_no, col, format!("invalid number `{text}`")))?;
            toks.push(Tok { kind: TokKind::Num(v), line: line_no, col });
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            let name: String = chars[start..k].iter().collect();
            toks.push(Tok { kind: TokKind::Ident(name), line: line_no, col });
            continue;
        }
        return Err(err_at(line_no, col, format!("unexpected character `{ch}`")));
    }
    Ok(toks)
}

/// Cursor over a token line.
struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Tok], line: usize, end_col: usize) -> Self {
        Cursor { toks, pos: 0, line, end_col }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.col),
            None => (self.line, self.end_col),
        }
    }

    fn expect_eq(&mut self) -> Result<()> {
        match self.next() {
            Some(Tok { kind: TokKind::Eq, .. }) => Ok(()),
            other => {
                let (l, col) = match other {
                    Some(t) => (t.line, t.col),
                    None => (self.line, self.end_col),
                };
                Err(err_at(l, col, "expected `=`"))
            }
        }
    }
}

/// Pratt expression parser over a cursor; `coord_index` resolves identifiers.
fn parse_expr(
    cur: &mut Cursor,
    coord_index: &HashMap<String, usize>,
    min_bp: u8,
) -> Result<Expr> {
    let (line, col) = cur.here();
    let first = cur
        .next()
        .ok_or_else(|| err_at(line, col, "expected an expression"))?
        .clone();
    let mut lhs = match &first.kind {
        TokKind::Num(v) => Expr::Num(*v),
        TokKind::Minus => {
            let operand = parse_expr(cur, coord_index, 5)?;
            Expr::Neg(Box::new(operand))
        }
        TokKind::LParen => {
            let inner = parse_expr(cur, coord_index, 0)?;
            match cur.next() {
                Some(Tok { kind: TokKind::RParen, .. }) => inner,
                _ => return Err(err_at(first.line, first.col, "unbalanced `(`")),
            }
        }
        TokKind::Ident(name) if name == "i" => Expr::Imag,
        TokKind::Ident(name) => {
            let is_call =
                matches!(cur.peek(), Some(Tok { kind: TokKind::LParen, .. }));
            if is_call {
                let fname = name.clone();
                cur.next(); // consume `(`
                let arg = parse_expr(cur, coord_index, 0)?;
                let expr = match fname.as_str() {
                    "sin" => Expr::Sin(Box::new(arg)),
                    "cos" => Expr::Cos(Box::new(arg)),
                    "tan" => Expr::Tan(Box::new(arg)),
                    "exp" => Expr::Exp(Box::new(arg)),
                    "log" => Expr::Log(Box::new(arg)),
                    "atan" => Expr::Atan(Box::new(arg)),
                    "sqrt" => Expr::Sqrt(Box::new(arg)),
                    "powi" => {
                        match cur.next() {
                            Some(Tok { kind: TokKind::Comma, .. }) => {}
                            _ => {
                                return Err(err_at(
                                    first.line,
                                    first.col,
                                    "powi takes two arguments: powi(expr, n)",
                                ))
                            }
                        }
                        let (nl, nc) = cur.here();
                        let mut sign = 1i32;
                        if matches!(cur.peek(), Some(Tok { kind: TokKind::Minus, .. })) {
                            cur.next();
                            sign = -1;
                        }
                        let n = match cur.next() {
                            Some(Tok { kind: TokKind::Num(v), .. }) => {
                                if v.fract() != 0.0 || v.abs() > i32::MAX as f64 {
                                    return Err(err_at(
                                        nl,
                                        nc,
                                        "powi exponent must be an integer literal",
                                    ));
                                }
                                sign * (*v as i32)
                            }
                            _ => {
                                return Err(err_at(
                                    nl,
                                    nc,
                                    "powi exponent must be an integer literal",
                                ))
                            }
                        };
                        Expr::Powi(Box::new(arg), n)
                    }
                    _ => {
                        return Err(err_at(
                            first.line,
                            first.col,
                            format!("unknown function `{fname}`"),
                        ))
                    }
                };
                match cur.next() {
                    Some(Tok { kind: TokKind::RParen, .. }) => expr,
                    _ => {
                        return Err(err_at(
                            first.line,
                            first.col,
                            format!("unbalanced `(` in call to `{fname}`"),
                        ))
                    }
                }
            } else if let Some(&k) = coord_index.get(name) {
                Expr::Var(k)
            } else {
                return Err(err_at(
                    first.line,
                    first.col,
                    format!("unknown coordinate or function `{name}`"),
                ));
            }
        }
        other => {
            return Err(err_at(
                first.line,
                first.col,
                format!("unexpected token `{other:?}` in expression"),
            ))
        }
    };
    loop {
        let (lbp, rbp, kind) = match cur.peek().map(|t| &t.kind) {
            Some(TokKind::Plus) => (1u8, 2u8, TokKind::Plus),
            Some(TokKind::Minus) => (1, 2, TokKind::Minus),
            Some(TokKind::Star) => (3, 4, TokKind::Star),
            Some(TokKind::Slash) => (3, 4, TokKind::Slash),
            _ => break,
        };
        if lbp < min_bp {
            break;
        }
        cur.next();
        let rhs = parse_expr(cur, coord_index, rbp)?;
        lhs = match kind {
            TokKind::Plus => Expr::Add(Box::new(lhs), Box::new(rhs)),
            TokKind::Minus => Expr::Sub(Box::new(lhs), Box::new(rhs)),
            TokKind::Star => Expr::Mul(Box::new(lhs), Box::new(rhs)),
            TokKind::Slash => Expr::Div(Box::new(lhs), Box::new(rhs)),
            _ => unreachable!(),
        };
    }
    Ok(lhs)
}

struct Line {
    no: usize,
    toks: Vec<Tok>,
    end_col: usize,
}

/// Parses a base manifest into a [`CRBase`].
pub fn parse_manifest(text: &str) -> Result<CRBase> {
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        let stripped = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let toks = lex_line(no, stripped)?;
        if !toks.is_empty() {
            lines.push(Line { no, toks, end_col: stripped.chars().count() + 1 });
        }
    }

    // Pass 1: rank and coordinates.
    let mut m: Option<usize> = None;
    let mut coords: Option<(Vec<String>, usize, usize)> = None;
    for line in &lines {
        if let TokKind::Ident(name) = &line.toks[0].kind {
            if name == "m" {
                let mut cur = Cursor::new(&line.toks[1..], line.no, line.end_col);
                cur.expect_eq()?;
                let (l, col) = cur.here();
                match cur.next().map(|t| t.kind.clone()) {
                    Some(TokKind::Num(v)) if v.fract() == 0.0 && v >= 1.0 => {
                        if m.replace(v as usize).is_some() {
                            return Err(err_at(line.no, line.toks[0].col, "duplicate `m`"));
                        }
                    }
                    _ => return Err(err_at(l, col, "`m` must be a positive integer")),
                }
                if cur.peek().is_some() {
                    let (l, col) = cur.here();
                    return Err(err_at(l, col, "trailing tokens after `m`"));
                }
            } else if name == "coords" {
                let mut cur = Cursor::new(&line.toks[1..], line.no, line.end_col);
                cur.expect_eq()?;
                let mut names = Vec::new();
                while let Some(t) = cur.next() {
                    match &t.kind {
                        TokKind::Ident(n) => {
                            if RESERVED.contains(&n.as_str()) {
                                return Err(err_at(
                                    t.line,
                                    t.col,
                                    format!("`{n}` is reserved and cannot name a coordinate"),
                                ));
                            }
                            if names.contains(n) {
                                return Err(err_at(
                                    t.line,
                                    t.col,
                                    format!("duplicate coordinate `{n}`"),
                                ));
                            }
                            names.push(n.clone());
                        }
                        _ => {
                            return Err(err_at(t.line, t.col, "expected a coordinate name"))
                        }
                    }
                }
                if coords
                    .replace((names, line.no, line.toks[0].col))
                    .is_some()
                {
                    return Err(err_at(line.no, line.toks[0].col, "duplicate `coords`"));
                }
            }
        }
    }
    let m = m.ok_or_else(|| err_at(1, 1, "missing `m = <rank>` declaration"))?;
    let (coord_names, cl, cc) =
        coords.ok_or_else(|| err_at(1, 1, "missing `coords = ...` declaration"))?;
    if coord_names.len() != 2 * m + 1 {
        return Err(err_at(
            cl,
            cc,
            format!("expected {} coordinates for rank {m}, got {}", 2 * m + 1, coord_names.len()),
        ));
    }
    let coord_index: HashMap<String, usize> =
        coord_names.iter().enumerate().map(|(k, n)| (n.clone(), k)).collect();
    let d = 2 * m + 1;

    // Pass 2: component lines.
    let mut theta0: Vec<Option<Expr>> = vec![None; d];
    let mut theta: Vec<Vec<Option<Expr>>> = vec![vec![None; d]; m];
    let mut levi: Vec<Vec<Option<Expr>>> = vec![vec![None; m]; m];
    for line in &lines {
        let head = match &line.toks[0].kind {
            TokKind::Ident(name) => name.clone(),
            _ => {
                return Err(err_at(
                    line.toks[0].line,
                    line.toks[0].col,
                    "expected a declaration (`m`, `coords`, `theta...`, `levi`)",
                ))
            }
        };
        if head == "m" || head == "coords" {
            continue;
        }
        let mut cur = Cursor::new(&line.toks[1..], line.no, line.end_col);
        if head == "levi" {
            let mut idx = [0usize; 2];
            for slot in &mut idx {
                let (l, col) = cur.here();
                match cur.next().map(|t| t.kind.clone()) {
                    Some(TokKind::Num(v))
                        if v.fract() == 0.0 && v >= 1.0 && v <= m as f64 =>
                    {
                        *slot = v as usize - 1;
                    }
                    _ => {
                        return Err(err_at(
                            l,
                            col,
                            format!("levi indices must be integers in 1..={m}"),
                        ))
                    }
                }
            }
            cur.expect_eq()?;
            let expr = parse_expr(&mut cur, &coord_index, 0)?;
            if cur.peek().is_some() {
                let (l, col) = cur.here();
                return Err(err_at(l, col, "trailing tokens after expression"));
            }
            if levi[idx[0]][idx[1]].replace(expr).is_some() {
                return Err(err_at(
                    line.toks[0].line,
                    line.toks[0].col,
                    format!("duplicate levi ({}, {})", idx[0] + 1, idx[1] + 1),
                ));
            }
            continue;
        }
        if let Some(rest) = head.strip_prefix("theta") {
            let target: Option<usize> = if rest == "0" {
                Some(0)
            } else {
                rest.parse::<usize>().ok().filter(|&k| k >= 1 && k <= m)
            };
            let target = target.ok_or_else(|| {
                err_at(
                    line.toks[0].line,
                    line.toks[0].col,
                    format!("`{head}` is not a coframe row (use theta0 or theta1..theta{m})"),
                )
            })?;
            let (l, col) = cur.here();
            let coord = match cur.next().map(|t| t.kind.clone()) {
                Some(TokKind::Ident(n)) => match coord_index.get(&n) {
                    Some(&k) => k,
                    None => {
                        return Err(err_at(l, col, format!("unknown coordinate `{n}`")))
                    }
                },
                _ => return Err(err_at(l, col, "expected a coordinate name")),
            };
            cur.expect_eq()?;
            let expr = parse_expr(&mut cur, &coord_index, 0)?;
            if cur.peek().is_some() {
                let (l, col) = cur.here();
                return Err(err_at(l, col, "trailing tokens after expression"));
            }
            let slot = if target == 0 {
                &mut theta0[coord]
            } else {
                &mut theta[target - 1][coord]
            };
            if slot.replace(expr).is_some() {
                return Err(err_at(
                    line.toks[0].line,
                    line.toks[0].col,
                    format!("duplicate component for {head}"),
                ));
            }
            continue;
        }
        return Err(err_at(
            line.toks[0].line,
            line.toks[0].col,
            format!("unknown declaration `{head}`"),
        ));
    }

    // Fill Levi defaults: identity pattern, conjugate mirroring.
    for a in 0..m {
        for b in (a + 1)..m {
            if levi[a][b].is_some() && levi[b][a].is_none() {
                let conj = levi[a][b].as_ref().unwrap().conjugated();
                levi[b][a] = Some(conj);
            } else if levi[b][a].is_some() && levi[a][b].is_none() {
                let conj = levi[b][a].as_ref().unwrap().conjugated();
                levi[a][b] = Some(conj);
            }
        }
    }
    for (a, row) in levi.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            if slot.is_none() {
                *slot = Some(Expr::Num(if a == b { 1.0 } else { 0.0 }));
            }
        }
    }

    let eval = move |pt: &[f64], order: u8| -> Result<RawCoframe> {
        let coords: Vec<CJet> =
            (0..d).map(|k| CJet::coordinate(pt, k, order)).collect::<Result<_>>()?;
        let zero = CJet::constant(d, order, c(0.0));
        let eval_opt = |e: &Option<Expr>| -> Result<CJet> {
            match e {
                Some(expr) => expr.eval(&coords),
                None => Ok(zero.clone()),
            }
        };
        let theta0_v: Vec<CJet> = theta0.iter().map(&eval_opt).collect::<Result<_>>()?;
        let theta_v: Vec<Vec<CJet>> = theta
            .iter()
            .map(|row| row.iter().map(&eval_opt).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let levi_v: Vec<Vec<CJet>> = levi
            .iter()
            .map(|row| row.iter().map(&eval_opt).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(RawCoframe { theta0: theta0_v, theta: theta_v, levi: levi_v })
    };
    CRBase::new(m, coord_names, Arc::new(eval))
}

/// A rank-2 base whose complex coframe mixes `dz` and `conj(dz)` with a
/// symmetric coordinate-dependent coefficient.  The contact form is the flat
/// one; the mixing keeps the coframe exactly adapted with Levi form
/// `(1 - b^2)^{-1} δ` while making the Nijenhuis tensor nonzero.
pub const DEFORMED_EXAMPLE: &str = "\
# Non-integrable deformation of the flat model (rank 2).
# theta^1 = dz1 + b conj(dz2), theta^2 = dz2 + b conj(dz1), b = 0.2 sin(x1).
m = 2
coords = t x1 y1 x2 y2

theta0 t  = 1
theta0 x1 = -y1
theta0 y1 = x1
theta0 x2 = -y2
theta0 y2 = x2

theta1 x1 = 1
theta1 y1 = i
theta1 x2 = 0.2*sin(x1)
theta1 y2 = -i*0.2*sin(x1)

theta2 x2 = 1
theta2 y2 = i
theta2 x1 = 0.2*sin(x1)
theta2 y1 = -i*0.2*sin(x1)

levi 1 1 = 1/(1 - powi(0.2*sin(x1), 2))
levi 2 2 = 1/(1 - powi(0.2*sin(x1), 2))
";

/// Same deformation with an additional dependence on the contact coordinate:
/// the Reeb flow is no longer a symmetry, so the pseudo-Hermitian torsion is
/// nonzero as well.
pub const DEFORMED_TORSION_EXAMPLE: &str = "\
# Non-integrable deformation with torsion (rank 2).
# b = 0.2 sin(x1) + 0.1 sin(t) makes both N and A nonzero.
m = 2
coords = t x1 y1 x2 y2

theta0 t  = 1
theta0 x1 = -y1
theta0 y1 = x1
theta0 x2 = -y2
theta0 y2 = x2

theta1 x1 = 1
theta1 y1 = i
theta1 x2 = 0.2*sin(x1) + 0.1*sin(t)
theta1 y2 = -i*(0.2*sin(x1) + 0.1*sin(t))

theta2 x2 = 1
theta2 y2 = i
theta2 x1 = 0.2*sin(x1) + 0.1*sin(t)
theta2 y1 = -i*(0.2*sin(x1) + 0.1*sin(t))

levi 1 1 = 1/(1 - powi(0.2*sin(x1) + 0.1*sin(t), 2))
levi 2 2 = 1/(1 - powi(0.2*sin(x1) + 0.1*sin(t), 2))
";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cr::{validate_adapted, webster_solve};

    const FLAT_RANK1: &str = "\
# flat model, rank 1
m = 1
coords = t x1 y1
theta0 t = 1
theta0 x1 = -y1
theta0 y1 = x1
theta1 x1 = 1
theta1 y1 = i
";

    #[test]
    fn flat_manifest_matches_builtin() {
        let base = parse_manifest(FLAT_RANK1).unwrap();
        let builtin = crate::cr::bases::heisenberg(1).unwrap();
        for pt in [[0.0, 0.0, 0.0], [0.3, -0.7, 0.4], [1.1, 0.25, -0.6]] {
            assert!(validate_adapted(&base, &pt).unwrap() < 1e-13);
            let a = base.eval_raw(&pt, 2).unwrap();
            let b = builtin.eval_raw(&pt, 2).unwrap();
            for i in 0..3 {
                assert!((a.theta0[i].value() - b.theta0[i].value()).norm() < 1e-14);
                assert!((a.theta[0][i].value() - b.theta[0][i].value()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn deformed_example_is_adapted_with_nonzero_nijenhuis() {
        let base = parse_manifest(DEFORMED_EXAMPLE).unwrap();
        let pt = [0.2, 0.5, -0.3, 0.1, 0.4];
        assert!(validate_adapted(&base, &pt).unwrap() < 1e-12);
        let wp = webster_solve(&base, &pt).unwrap();
        let mut nmax = 0.0f64;
        let mut amax = 0.0f64;
        for a in 0..2 {
            for b in 0..2 {
                amax = amax.max(wp.torsion[a][b].value().norm());
                for g in 0..2 {
                    nmax = nmax.max(wp.nijenhuis[a][b][g].value().norm());
                }
            }
        }
        assert!(nmax > 1e-3, "expected nonzero Nijenhuis tensor, got {nmax:.3e}");
        assert!(amax < 1e-10, "expected vanishing torsion, got {amax:.3e}");
    }

    #[test]
    fn torsion_example_has_nonzero_torsion() {
        let base = parse_manifest(DEFORMED_TORSION_EXAMPLE).unwrap();
        let pt = [0.4, 0.5, -0.3, 0.1, 0.4];
        assert!(validate_adapted(&base, &pt).unwrap() < 1e-12);
        let wp = webster_solve(&base, &pt).unwrap();
        let mut amax = 0.0f64;
        for a in 0..2 {
            for b in 0..2 {
                amax = amax.max(wp.torsion[a][b].value().norm());
            }
        }
        assert!(amax > 1e-3, "expected nonzero torsion, got {amax:.3e}");
    }

    #[test]
    fn hermitian_mirroring_fills_missing_entries() {
        let text = "\
m = 2
coords = t x1 y1 x2 y2
theta0 t = 1
theta1 x1 = 1
theta2 x2 = 1
levi 1 2 = 0.1*i*x1
";
        let base = parse_manifest(text).unwrap();
        let raw = base.eval_raw(&[0.0, 0.7, 0.0, 0.0, 0.0], 1).unwrap();
        let h01 = raw.levi[0][1].value();
        let h10 = raw.levi[1][0].value();
        assert!((h01 - Complex64::new(0.0, 0.07)).norm() < 1e-14);
        assert!((h10 - h01.conj()).norm() < 1e-14);
        assert!((raw.levi[0][0].value() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse_manifest(text) {
            Err(Error::Parse { line, col, msg }) => (line, col, msg),
            Err(other) => panic!("expected parse error, got {other:?}"),
            Ok(_) => panic!("expected parse error, got a parsed base"),
        }
    }

    #[test]
    fn parse_errors_carry_line_and_column() {
        // Missing `=` on line 3 of this manifest.
        let (line, _, msg) = parse_err("m = 1\ncoords = t x1 y1\ntheta0 t 1\n");
        assert_eq!(line, 3);
        assert!(msg.contains("expected `=`"), "{msg}");

        // Unknown coordinate in an expression, line 3, column 12.
        let (line, col, msg) = parse_err("m = 1\ncoords = t x1 y1\ntheta0 t = q + 1\n");
        assert_eq!((line, col), (3, 12));
        assert!(msg.contains("unknown coordinate"), "{msg}");

        // Fractional powi exponent.
        let (line, _, msg) =
            parse_err("m = 1\ncoords = t x1 y1\ntheta0 t = powi(x1, 2.5)\n");
        assert_eq!(line, 3);
        assert!(msg.contains("integer literal"), "{msg}");

        // Wrong number of coordinates.
        let (line, _, msg) = parse_err("m = 2\ncoords = t x1 y1\ntheta0 t = 1\n");
        assert_eq!(line, 2);
        assert!(msg.contains("expected 5 coordinates"), "{msg}");

        // Reserved name as a coordinate.
        let (line, _, msg) = parse_err("m = 1\ncoords = t i y1\ntheta0 t = 1\n");
        assert_eq!(line, 2);
        assert!(msg.contains("reserved"), "{msg}");

        // Unbalanced parenthesis.
        let (line, _, msg) = parse_err("m = 1\ncoords = t x1 y1\ntheta0 t = (x1 + 1\n");
        assert_eq!(line, 3);
        assert!(msg.contains("unbalanced"), "{msg}");

        // Unknown function.
        let (line, _, msg) = parse_err("m = 1\ncoords = t x1 y1\ntheta0 t = sinh(x1)\n");
        assert_eq!(line, 3);
        assert!(msg.contains("unknown function"), "{msg}");
    }

    #[test]
    fn expression_evaluation_matches_closed_form() {
        let text = "\
m = 1
coords = t x1 y1
theta0 t = exp(sin(x1))*powi(y1, 2) + atan(t)/sqrt(1 + powi(x1, 2)) - log(2 + y1)
theta1 x1 = 1
theta1 y1 = i
";
        let base = parse_manifest(text).unwrap();
        let (t, x, y) = (0.3f64, 0.7f64, -0.2f64);
        let raw = base.eval_raw(&[t, x, y], 0).unwrap();
        let expect = x.sin().exp() * y * y + t.atan() / (1.0 + x * x).sqrt() - (2.0 + y).ln();
        assert!((raw.theta0[0].value().re - expect).abs() < 1e-14);
        assert!(raw.theta0[0].value().im.abs() < 1e-15);
    }
}
