//! A small expression language for the class algebra.
//!
//! Grammar (standard precedence, `*` binds tighter than `+`):
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor ('*' factor)*
//! factor := '(' expr ')'
//!         | 'dual'  '(' expr ')'
//!         | 'twist' '(' expr ',' int ')'
//!         | 'shift' '(' expr ',' int ')'
//!         | 'push'  '(' expr ',' uint ')'
//!         | 'rat'   '(' '[' rationals ']' ',' '[' rationals ']' ',' uint ')'
//!         | 'point' | 'lefschetz' | identifier
//! ```
//!
//! `point` and `lefschetz` are the two basic atoms; `rat([num],[den],q)`
//! names a class by its Z-function; other identifiers resolve against a
//! caller-supplied environment. Every expression elaborates against a
//! context base size `q`: the operands of `+` and `*` share the context,
//! `rat` must declare the context base, and `push(e, m)` elaborates `e`
//! against `q^m` before pushing the class down to `q` — so the base under
//! a `push` is the extension, exactly as the substitution `t -> t^m`
//! demands.

use crate::error::{Error, Result};
use crate::motive::VirtualMotive;
use crate::poly::PolyQ;
use crate::ratfunc::RatFuncQ;
use num::BigRational;
use std::collections::BTreeMap;
use std::fmt;

/// Abstract syntax of a class expression.
#[derive(Clone, Debug, PartialEq)]
pub enum MotiveExpr {
    Point,
    Lefschetz,
    Var(String),
    Rat {
        num: Vec<BigRational>,
        den: Vec<BigRational>,
        q: u64,
    },
    Sum(Box<MotiveExpr>, Box<MotiveExpr>),
    Prod(Box<MotiveExpr>, Box<MotiveExpr>),
    Dual(Box<MotiveExpr>),
    Twist(Box<MotiveExpr>, i64),
    Shift(Box<MotiveExpr>, i64),
    Push(Box<MotiveExpr>, u32),
}

impl fmt::Display for MotiveExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Precedence levels: 0 = sum, 1 = product, 2 = atom/call.
        fn go(e: &MotiveExpr, f: &mut fmt::Formatter<'_>, level: u8) -> fmt::Result {
            let own = match e {
                MotiveExpr::Sum(..) => 0,
                MotiveExpr::Prod(..) => 1,
                _ => 2,
            };
            if own < level {
                write!(f, "(")?;
            }
            match e {
                MotiveExpr::Point => write!(f, "point")?,
                MotiveExpr::Lefschetz => write!(f, "lefschetz")?,
                MotiveExpr::Var(name) => write!(f, "{name}")?,
                MotiveExpr::Rat { num, den, q } => {
                    let list = |f: &mut fmt::Formatter<'_>, cs: &[BigRational]| -> fmt::Result {
                        write!(f, "[")?;
                        for (i, c) in cs.iter().enumerate() {
                            if i > 0 {
                                write!(f, ", ")?;
                            }
                            write!(f, "{c}")?;
                        }
                        write!(f, "]")
                    };
                    write!(f, "rat(")?;
                    list(f, num)?;
                    write!(f, ", ")?;
                    list(f, den)?;
                    write!(f, ", {q})")?;
                }
                MotiveExpr::Sum(a, b) => {
                    go(a, f, 0)?;
                    write!(f, " + ")?;
                    go(b, f, 1)?;
                }
                MotiveExpr::Prod(a, b) => {
                    go(a, f, 1)?;
                    write!(f, " * ")?;
                    go(b, f, 2)?;
                }
                MotiveExpr::Dual(a) => {
                    write!(f, "dual(")?;
                    go(a, f, 0)?;
                    write!(f, ")")?;
                }
                MotiveExpr::Twist(a, r) => {
                    write!(f, "twist(")?;
                    go(a, f, 0)?;
                    write!(f, ", {r})")?;
                }
                MotiveExpr::Shift(a, k) => {
                    write!(f, "shift(")?;
                    go(a, f, 0)?;
                    write!(f, ", {k})")?;
                }
                MotiveExpr::Push(a, m) => {
                    write!(f, "push(")?;
                    go(a, f, 0)?;
                    write!(f, ", {m})")?;
                }
            }
            if own < level {
                write!(f, ")")?;
            }
            Ok(())
        }
        go(self, f, 0)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Plus,
    Star,
    Slash,
    Minus,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match c {
            '+' => {
                bump(&mut chars);
                Tok::Plus
            }
            '*' => {
                bump(&mut chars);
                Tok::Star
            }
            '/' => {
                bump(&mut chars);
                Tok::Slash
            }
            '-' => {
                bump(&mut chars);
                Tok::Minus
            }
            ',' => {
                bump(&mut chars);
                Tok::Comma
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            '[' => {
                bump(&mut chars);
                Tok::LBracket
            }
            ']' => {
                bump(&mut chars);
                Tok::RBracket
            }
            '0'..='9' => {
                let mut n: i64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(v) = d.to_digit(10) {
                        n = n
                            .checked_mul(10)
                            .and_then(|n| n.checked_add(v as i64))
                            .ok_or(Error::SyntaxError {
                                line: tline,
                                col: tcol,
                                msg: "integer literal too large".into(),
                            })?;
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                Tok::Int(n)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            other => {
                return Err(Error::SyntaxError {
                    line: tline,
                    col: tcol,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push(Spanned {
            tok,
            line: tline,
            col: tcol,
        });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    bound: &'a dyn Fn(&str) -> bool,
    end_line: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek()
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.here();
        Err(Error::SyntaxError {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        match self.peek() {
            Some(s) if s.tok == want => {
                self.pos += 1;
                Ok(())
            }
            _ => self.syntax(format!("expected {what}")),
        }
    }

    fn expr(&mut self) -> Result<MotiveExpr> {
        let mut acc = self.term()?;
        while matches!(self.peek(), Some(s) if s.tok == Tok::Plus) {
            self.pos += 1;
            acc = MotiveExpr::Sum(Box::new(acc), Box::new(self.term()?));
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MotiveExpr> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(s) if s.tok == Tok::Star) {
            self.pos += 1;
            acc = MotiveExpr::Prod(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn int_arg(&mut self, what: &str) -> Result<i64> {
        let negative = if matches!(self.peek(), Some(s) if s.tok == Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.next() {
            Some(Spanned {
                tok: Tok::Int(n), ..
            }) => Ok(if negative { -n } else { n }),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.syntax(format!("expected {what}"))
            }
        }
    }

    fn rational_list(&mut self) -> Result<Vec<BigRational>> {
        self.expect(Tok::LBracket, "`[` opening a coefficient list")?;
        let mut out = Vec::new();
        if matches!(self.peek(), Some(s) if s.tok == Tok::RBracket) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            let numer = self.int_arg("a coefficient")?;
            let denom = if matches!(self.peek(), Some(s) if s.tok == Tok::Slash) {
                self.pos += 1;
                let d = self.int_arg("a denominator")?;
                if d == 0 {
                    return Err(Error::DivisionByZero);
                }
                d
            } else {
                1
            };
            out.push(BigRational::new(numer.into(), denom.into()));
            match self.peek() {
                Some(s) if s.tok == Tok::Comma => {
                    self.pos += 1;
                }
                Some(s) if s.tok == Tok::RBracket => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return self.syntax("expected `,` or `]` in a coefficient list"),
            }
        }
    }

    fn call_tail_unary(&mut self) -> Result<MotiveExpr> {
        self.expect(Tok::LParen, "`(`")?;
        let inner = self.expr()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(inner)
    }

    fn call_tail_with_int(&mut self) -> Result<(MotiveExpr, i64)> {
        self.expect(Tok::LParen, "`(`")?;
        let inner = self.expr()?;
        self.expect(Tok::Comma, "`,` before the integer argument")?;
        let n = self.int_arg("an integer argument")?;
        self.expect(Tok::RParen, "`)`")?;
        Ok((inner, n))
    }

    fn factor(&mut self) -> Result<MotiveExpr> {
        let Some(s) = self.peek().cloned() else {
            return self.syntax("expected an expression");
        };
        match s.tok {
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                match name.as_str() {
                    "point" => Ok(MotiveExpr::Point),
                    "lefschetz" => Ok(MotiveExpr::Lefschetz),
                    "dual" => Ok(MotiveExpr::Dual(Box::new(self.call_tail_unary()?))),
                    "twist" => {
                        let (inner, r) = self.call_tail_with_int()?;
                        Ok(MotiveExpr::Twist(Box::new(inner), r))
                    }
                    "shift" => {
                        let (inner, k) = self.call_tail_with_int()?;
                        Ok(MotiveExpr::Shift(Box::new(inner), k))
                    }
                    "push" => {
                        let (inner, m) = self.call_tail_with_int()?;
                        if m < 1 {
                            return Err(Error::SyntaxError {
                                line: s.line,
                                col: s.col,
                                msg: "push degree must be a positive integer".into(),
                            });
                        }
                        let m = u32::try_from(m).map_err(|_| Error::SyntaxError {
                            line: s.line,
                            col: s.col,
                            msg: "push degree too large".into(),
                        })?;
                        Ok(MotiveExpr::Push(Box::new(inner), m))
                    }
                    "rat" => {
                        self.expect(Tok::LParen, "`(`")?;
                        let num = self.rational_list()?;
                        self.expect(Tok::Comma, "`,` between numerator and denominator")?;
                        let den = self.rational_list()?;
                        self.expect(Tok::Comma, "`,` before the base size")?;
                        let q = self.int_arg("a base size")?;
                        self.expect(Tok::RParen, "`)`")?;
                        if q < 2 {
                            return Err(Error::SyntaxError {
                                line: s.line,
                                col: s.col,
                                msg: "base size must be at least 2".into(),
                            });
                        }
                        Ok(MotiveExpr::Rat {
                            num,
                            den,
                            q: q as u64,
                        })
                    }
                    _ => {
                        if (self.bound)(&name) {
                            Ok(MotiveExpr::Var(name))
                        } else {
                            Err(Error::UnboundIdentifier {
                                name,
                                line: s.line,
                                col: s.col,
                            })
                        }
                    }
                }
            }
            _ => self.syntax("expected an expression"),
        }
    }
}

/// Parse an expression; identifiers other than the built-ins must satisfy
/// the `bound` predicate (typically membership in a loaded environment).
pub fn parse_expr(text: &str, bound: &dyn Fn(&str) -> bool) -> Result<MotiveExpr> {
    let toks = lex(text)?;
    let lines: Vec<&str> = text.split('\n').collect();
    let end_line = lines.len().max(1);
    let end_col = lines.last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let mut p = Parser {
        toks,
        pos: 0,
        bound,
        end_line,
        end_col,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.syntax("unexpected trailing input");
    }
    Ok(e)
}

/// Elaborate an expression to a class over the context base `q`.
///
/// Sums and products require both sides over the context base; `rat`
/// literals must declare it; `push(e, m)` elaborates `e` over `q^m` and
/// pushes the result down.
pub fn elaborate(
    e: &MotiveExpr,
    q: u64,
    env: &BTreeMap<String, VirtualMotive>,
) -> Result<VirtualMotive> {
    match e {
        MotiveExpr::Point => Ok(VirtualMotive::point(q)),
        MotiveExpr::Lefschetz => Ok(VirtualMotive::lefschetz(q)),
        MotiveExpr::Var(name) => {
            let m = env.get(name).ok_or_else(|| Error::UnboundIdentifier {
                name: name.clone(),
                line: 0,
                col: 0,
            })?;
            if m.q() != q {
                return Err(Error::BaseMismatch(q, m.q()));
            }
            Ok(m.clone())
        }
        MotiveExpr::Rat { num, den, q: qr } => {
            if *qr != q {
                return Err(Error::BaseMismatch(q, *qr));
            }
            let r = RatFuncQ::new(PolyQ::new(num.clone()), PolyQ::new(den.clone()))?;
            VirtualMotive::from_rational(&r, q)
        }
        MotiveExpr::Sum(a, b) => elaborate(a, q, env)?.add(&elaborate(b, q, env)?),
        MotiveExpr::Prod(a, b) => elaborate(a, q, env)?.tensor(&elaborate(b, q, env)?),
        MotiveExpr::Dual(a) => Ok(elaborate(a, q, env)?.dual()),
        MotiveExpr::Twist(a, r) => elaborate(a, q, env)?.tate_twist(*r),
        MotiveExpr::Shift(a, k) => Ok(elaborate(a, q, env)?.shift(*k)),
        MotiveExpr::Push(a, m) => {
            let qm = crate::arith::checked_pow_u128(q as u128, *m)
                .and_then(|n| u64::try_from(n).ok())
                .ok_or_else(|| {
                    Error::BadInput(format!("base {q}^{m} overflows the supported range"))
                })?;
            elaborate(a, qm, env)?.pushforward_scalars(*m)
        }
    }
}
