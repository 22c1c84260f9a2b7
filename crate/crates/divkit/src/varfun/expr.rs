//! Arithmetic expressions for user-supplied variance functions.
//!
//! Grammar (loosest to tightest binding):
//!
//! ```text
//! expr   := term  (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          // right-associative
//! atom   := number | 'mu' | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tightest (so `-mu^2` is `-(mu^2)`), the only variable is `mu`,
//! and the recognized functions are `exp` and `log`.

use std::fmt;

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr<T> {
    Literal(T),
    Mu,
    Neg(Box<Expr<T>>),
    Binary(BinOp, Box<Expr<T>>, Box<Expr<T>>),
    Call(Func, Box<Expr<T>>),
}

/// A parsed variance-function expression in the variable `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct VfExpression<T> {
    root: Expr<T>,
}

impl<T: Real> VfExpression<T> {
    pub fn parse(text: &str) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            end_offset: text.len(),
        };
        let root = parser.expr()?;
        if let Some(tok) = parser.peek() {
            return Err(Error::Parse {
                offset: tok.offset,
                message: format!("unexpected `{}` after expression", tok.kind.describe()),
            });
        }
        Ok(Self { root })
    }

    pub fn from_ast(root: Expr<T>) -> Self {
        Self { root }
    }

    pub fn ast(&self) -> &Expr<T> {
        &self.root
    }

    /// Evaluates at `mu`. Total on the declared domain: division by zero,
    /// logarithms of non-positive values and non-finite powers all surface
    /// as domain errors rather than NaN.
    pub fn eval(&self, mu: T) -> Result<T> {
        eval_node(&self.root, mu)
    }
}

impl<T: Real> fmt::Display for VfExpression<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root)
    }
}

fn eval_node<T: Real>(node: &Expr<T>, mu: T) -> Result<T> {
    let bad = |what: String| Err(Error::Domain(what));
    match node {
        Expr::Literal(v) => Ok(*v),
        Expr::Mu => Ok(mu),
        Expr::Neg(inner) => Ok(-eval_node(inner, mu)?),
        Expr::Call(Func::Exp, inner) => {
            let v = eval_node(inner, mu)?.exp();
            if v.is_finite() {
                Ok(v)
            } else {
                bad(format!("exp overflow at mu = {mu}"))
            }
        }
        Expr::Call(Func::Log, inner) => {
            let v = eval_node(inner, mu)?;
            if v > T::zero() {
                Ok(v.ln())
            } else {
                bad(format!("log of non-positive value {v} at mu = {mu}"))
            }
        }
        Expr::Binary(op, lhs, rhs) => {
            let l = eval_node(lhs, mu)?;
            let r = eval_node(rhs, mu)?;
            let v = match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == T::zero() {
                        return bad(format!("division by zero at mu = {mu}"));
                    }
                    l / r
                }
                BinOp::Pow => l.powf(r),
            };
            if v.is_finite() {
                Ok(v)
            } else {
                bad(format!("expression not finite at mu = {mu}"))
            }
        }
    }
}

// Precedence levels used by both the parser and the printer.
fn precedence<T>(node: &Expr<T>) -> u8 {
    match node {
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Binary(BinOp::Pow, ..) => 4,
        Expr::Literal(_) | Expr::Mu | Expr::Call(..) => 5,
    }
}

fn write_node<T: Real>(f: &mut fmt::Formatter<'_>, node: &Expr<T>) -> fmt::Result {
    let child = |f: &mut fmt::Formatter<'_>, c: &Expr<T>, parens: bool| -> fmt::Result {
        if parens {
            write!(f, "(")?;
            write_node(f, c)?;
            write!(f, ")")
        } else {
            write_node(f, c)
        }
    };
    match node {
        Expr::Literal(v) => write!(f, "{v}"),
        Expr::Mu => write!(f, "mu"),
        Expr::Neg(inner) => {
            write!(f, "-")?;
            child(f, inner, precedence(inner.as_ref()) < 3)
        }
        Expr::Call(func, inner) => {
            let name = match func {
                Func::Exp => "exp",
                Func::Log => "log",
            };
            write!(f, "{name}(")?;
            write_node(f, inner)?;
            write!(f, ")")
        }
        Expr::Binary(op, lhs, rhs) => match op {
            BinOp::Pow => {
                child(f, lhs, precedence(lhs.as_ref()) <= 4)?;
                write!(f, "^")?;
                // The exponent slot admits unary minus and nested powers.
                child(f, rhs, precedence(rhs.as_ref()) < 3)
            }
            _ => {
                let (sym, prec) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => unreachable!(),
                };
                child(f, lhs, precedence(lhs.as_ref()) < prec)?;
                write!(f, " {sym} ")?;
                child(f, rhs, precedence(rhs.as_ref()) <= prec)
            }
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("{v}"),
            TokenKind::Ident(s) => s.clone(),
            TokenKind::Plus => "+".into(),
            TokenKind::Minus => "-".into(),
            TokenKind::Star => "*".into(),
            TokenKind::Slash => "/".into(),
            TokenKind::Caret => "^".into(),
            TokenKind::LParen => "(".into(),
            TokenKind::RParen => ")".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i];
        let offset = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' => {
                let kind = match c {
                    b'+' => TokenKind::Plus,
                    b'-' => TokenKind::Minus,
                    b'*' => TokenKind::Star,
                    b'/' => TokenKind::Slash,
                    b'^' => TokenKind::Caret,
                    b'(' => TokenKind::LParen,
                    _ => TokenKind::RParen,
                };
                tokens.push(Token { kind, offset });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                    j += 1;
                }
                // Exponent part, e.g. 1.5e-3.
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let lit = &text[i..j];
                let value: f64 = lit.parse().map_err(|_| Error::Parse {
                    offset,
                    message: format!("invalid number literal `{lit}`"),
                })?;
                tokens.push(Token {
                    kind: TokenKind::Number(value),
                    offset,
                });
                i = j;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(text[i..j].to_string()),
                    offset,
                });
                i = j;
            }
            _ => {
                return Err(Error::Parse {
                    offset,
                    message: format!("unexpected character `{}`", &text[i..i + 1]),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_offset: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error_here(&self, expected: &str) -> Error {
        match self.peek() {
            Some(tok) => Error::Parse {
                offset: tok.offset,
                message: format!("expected {expected}, found `{}`", tok.kind.describe()),
            },
            None => Error::Parse {
                offset: self.end_offset,
                message: format!("expected {expected}, found end of input"),
            },
        }
    }

    fn expr<T: Real>(&mut self) -> Result<Expr<T>> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&TokenKind::Plus) {
                let rhs = self.term()?;
                lhs = Expr::Binary(BinOp::Add, Box::new(lhs), Box::new(rhs));
            } else if self.eat(&TokenKind::Minus) {
                let rhs = self.term()?;
                lhs = Expr::Binary(BinOp::Sub, Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term<T: Real>(&mut self) -> Result<Expr<T>> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&TokenKind::Star) {
                let rhs = self.unary()?;
                lhs = Expr::Binary(BinOp::Mul, Box::new(lhs), Box::new(rhs));
            } else if self.eat(&TokenKind::Slash) {
                let rhs = self.unary()?;
                lhs = Expr::Binary(BinOp::Div, Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary<T: Real>(&mut self) -> Result<Expr<T>> {
        if self.eat(&TokenKind::Minus) {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power<T: Real>(&mut self) -> Result<Expr<T>> {
        let base = self.atom()?;
        if self.eat(&TokenKind::Caret) {
            let exponent = self.unary()?;
            Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)))
        } else {
            Ok(base)
        }
    }

    fn atom<T: Real>(&mut self) -> Result<Expr<T>> {
        let Some(tok) = self.advance() else {
            return Err(self.error_here("an operand"));
        };
        match tok.kind {
            TokenKind::Number(v) => Ok(Expr::Literal(T::cast(v))),
            TokenKind::Ident(name) => match name.as_str() {
                "mu" => Ok(Expr::Mu),
                "exp" | "log" => {
                    let func = if name == "exp" { Func::Exp } else { Func::Log };
                    if !self.eat(&TokenKind::LParen) {
                        return Err(self.error_here(&format!("`(` after `{name}`")));
                    }
                    let arg = self.expr()?;
                    if !self.eat(&TokenKind::RParen) {
                        return Err(self.error_here("`)`"));
                    }
                    Ok(Expr::Call(func, Box::new(arg)))
                }
                _ => Err(Error::Parse {
                    offset: tok.offset,
                    message: format!("unknown identifier `{name}`"),
                }),
            },
            TokenKind::LParen => {
                let inner = self.expr()?;
                if !self.eat(&TokenKind::RParen) {
                    return Err(self.error_here("`)`"));
                }
                Ok(inner)
            }
            other => Err(Error::Parse {
                offset: tok.offset,
                message: format!("expected an operand, found `{}`", other.describe()),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> VfExpression<f64> {
        VfExpression::parse(text).unwrap()
    }

    #[test]
    fn bernoulli_shape_matches_closure() {
        let e = parse("mu - mu^2");
        for i in 1..10 {
            let mu = f64::from(i) / 10.0;
            assert!((e.eval(mu).unwrap() - (mu - mu * mu)).abs() < 1e-15);
        }
    }

    #[test]
    fn sech_shape_matches_closure() {
        let e = parse("1 + mu^2");
        for mu in [-2.0, -0.5, 0.0, 0.3, 4.0] {
            assert!((e.eval(mu).unwrap() - (1.0 + mu * mu)).abs() < 1e-15);
        }
    }

    #[test]
    fn trailing_operator_reports_offset() {
        let err = VfExpression::<f64>::parse("mu +").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                offset: 4,
                message: "expected an operand, found end of input".into()
            }
        );
    }

    #[test]
    fn unknown_identifier_reports_offset() {
        match VfExpression::<f64>::parse("mu + sigma").unwrap_err() {
            Error::Parse { offset, message } => {
                assert_eq!(offset, 5);
                assert!(message.contains("sigma"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn caret_binds_tighter_than_unary_minus() {
        let e = parse("-mu^2");
        assert_eq!(e.eval(3.0).unwrap(), -9.0);
    }

    #[test]
    fn caret_is_right_associative() {
        let e = parse("2^3^2"); // 2^(3^2) = 512
        assert_eq!(e.eval(1.0).unwrap(), 512.0);
    }

    #[test]
    fn negative_exponent_without_parens() {
        let e = parse("mu^-2");
        assert!((e.eval(4.0).unwrap() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn functions_and_parens() {
        let e = parse("exp(2 * log(mu))");
        assert!((e.eval(5.0).unwrap() - 25.0).abs() < 1e-12);
    }

    #[test]
    fn division_by_zero_is_a_domain_error() {
        let e = parse("1 / (mu - 1)");
        assert!(matches!(e.eval(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn log_of_negative_is_a_domain_error() {
        let e = parse("log(mu)");
        assert!(matches!(e.eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn print_then_parse_is_identity_on_parsed_asts() {
        for text in [
            "mu - mu^2",
            "1 + mu^2",
            "mu^-2",
            "-(mu + 1) * exp(-mu)",
            "2^3^mu",
            "(mu - 1) / (mu + 1)",
            "mu / 2 / 3",
            "mu - (1 - mu)",
            "1.5e-3 * mu",
        ] {
            let once = parse(text);
            let twice = VfExpression::<f64>::parse(&once.to_string()).unwrap();
            assert_eq!(
                once, twice,
                "round-trip failed for `{text}` printed as `{once}`"
            );
        }
    }
}
