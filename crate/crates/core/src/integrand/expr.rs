//! A small arithmetic expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | variable | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `^` binds tightest and associates to the right, so `-x^2` is `-(x^2)`
//! and `2^3^2` is `2^9`. Functions: `min`, `max` (binary) and `exp`, `log`,
//! `abs`, `sqrt` (unary).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token {0}")]
    UnexpectedToken(String),
    #[error("invalid number literal {0:?}")]
    BadNumber(String),
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("variable {name} exceeds arity {arity}")]
    ArityViolation { name: String, arity: usize },
    #[error("function {name} takes {expected} argument(s), got {found}")]
    WrongArgCount {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("empty expression")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the source text.
    pub position: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("log of non-positive argument {0}")]
    LogDomain(f64),
    #[error("sqrt of negative argument {0}")]
    SqrtDomain(f64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite result from {0}")]
    NonFinite(&'static str),
    #[error("expected {expected} arguments, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("kernel is not radial")]
    NotRadial,
}

/// Which identifiers denote variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variables {
    /// `x1 .. x<count>`.
    Indexed(usize),
    /// The single radial variable `r`.
    Radius,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Abs,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based variable index (`x1` is 0; `r` is 0).
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

fn finite(value: f64, op: &'static str) -> Result<f64, EvalError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EvalError::NonFinite(op))
    }
}

impl Expr {
    pub fn eval(&self, vars: &[f64]) -> Result<f64, EvalError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(i) => vars.get(*i).copied().ok_or(EvalError::Arity {
                expected: i + 1,
                found: vars.len(),
            }),
            Expr::Neg(e) => Ok(-e.eval(vars)?),
            Expr::Binary(op, l, r) => {
                let a = l.eval(vars)?;
                let b = r.eval(vars)?;
                match op {
                    BinOp::Add => finite(a + b, "+"),
                    BinOp::Sub => finite(a - b, "-"),
                    BinOp::Mul => finite(a * b, "*"),
                    BinOp::Div => {
                        if b == 0.0 {
                            Err(EvalError::DivisionByZero)
                        } else {
                            finite(a / b, "/")
                        }
                    }
                    BinOp::Pow => finite(a.powf(b), "^"),
                    BinOp::Min => Ok(a.min(b)),
                    BinOp::Max => Ok(a.max(b)),
                }
            }
            Expr::Call(f, e) => {
                let a = e.eval(vars)?;
                match f {
                    Func::Exp => finite(a.exp(), "exp"),
                    Func::Log => {
                        if a <= 0.0 {
                            Err(EvalError::LogDomain(a))
                        } else {
                            Ok(a.ln())
                        }
                    }
                    Func::Abs => Ok(a.abs()),
                    Func::Sqrt => {
                        if a < 0.0 {
                            Err(EvalError::SqrtDomain(a))
                        } else {
                            Ok(a.sqrt())
                        }
                    }
                }
            }
        }
    }

    /// Largest variable index used plus one (0 for constant expressions).
    pub fn variable_count(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(e) | Expr::Call(_, e) => e.variable_count(),
            Expr::Binary(_, l, r) => l.variable_count().max(r.variable_count()),
        }
    }

    /// Pretty-printer that writes variables as `x1..` or `r`.
    pub fn display(&self, vars: Variables) -> ExprDisplay<'_> {
        ExprDisplay { expr: self, vars }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    vars: Variables,
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(i) => match self.vars {
                Variables::Indexed(_) => write!(f, "x{}", i + 1),
                Variables::Radius => write!(f, "r"),
            },
            Expr::Neg(e) => write!(f, "(-{})", self.child(e)),
            Expr::Binary(op, l, r) => match op {
                BinOp::Min => write!(f, "min({}, {})", self.child(l), self.child(r)),
                BinOp::Max => write!(f, "max({}, {})", self.child(l), self.child(r)),
                _ => {
                    let sym = match op {
                        BinOp::Add => "+",
                        BinOp::Sub => "-",
                        BinOp::Mul => "*",
                        BinOp::Div => "/",
                        _ => "^",
                    };
                    write!(f, "({} {sym} {})", self.child(l), self.child(r))
                }
            },
            Expr::Call(func, e) => write!(f, "{}({})", func.name(), self.child(e)),
        }
    }
}

impl ExprDisplay<'_> {
    fn child<'b>(&self, expr: &'b Expr) -> ExprDisplay<'b> {
        ExprDisplay {
            expr,
            vars: self.vars,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(v) => write!(f, "{v}"),
            Token::Ident(s) => write!(f, "{s:?}"),
            Token::Op(c) => write!(f, "{c:?}"),
            Token::LParen => write!(f, "'('"),
            Token::RParen => write!(f, "')'"),
            Token::Comma => write!(f, "','"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| ParseError {
                kind: ParseErrorKind::BadNumber(lit.to_string()),
                position: start,
            })?;
            out.push((Token::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Token::Ident(text[start..i].to_string()), start));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Token::Op(c),
                '(' => Token::LParen,
                ')' => Token::RParen,
                ',' => Token::Comma,
                _ => {
                    let ch = text[start..].chars().next().unwrap_or(c);
                    return Err(ParseError {
                        kind: ParseErrorKind::UnexpectedChar(ch),
                        position: start,
                    });
                }
            };
            i += 1;
            out.push((tok, start));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
    vars: Variables,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            position: self.offset(),
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Some(t) => self.error(ParseErrorKind::UnexpectedToken(t.to_string())),
            None => self.error(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn expect(&mut self, tok: Token) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Op('+')) => BinOp::Add,
                Some(Token::Op('-')) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Op('*')) => BinOp::Mul,
                Some(Token::Op('/')) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Op('-')) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Op('^')) {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.offset();
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Token::LParen) {
                    self.call(&name, start)
                } else {
                    self.variable(&name, start)
                }
            }
            _ => Err(self.unexpected()),
        }
    }

    fn call(&mut self, name: &str, start: usize) -> Result<Expr, ParseError> {
        self.expect(Token::LParen)?;
        let mut args = vec![self.expr()?];
        while self.peek() == Some(&Token::Comma) {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.expect(Token::RParen)?;
        let arity_err = |expected: usize, found: usize| ParseError {
            kind: ParseErrorKind::WrongArgCount {
                name: name.to_string(),
                expected,
                found,
            },
            position: start,
        };
        let binary = match name {
            "min" => Some(BinOp::Min),
            "max" => Some(BinOp::Max),
            _ => None,
        };
        if let Some(op) = binary {
            if args.len() != 2 {
                return Err(arity_err(2, args.len()));
            }
            let r = args.pop().unwrap();
            let l = args.pop().unwrap();
            return Ok(Expr::Binary(op, Box::new(l), Box::new(r)));
        }
        let func = match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
                    position: start,
                })
            }
        };
        if args.len() != 1 {
            return Err(arity_err(1, args.len()));
        }
        Ok(Expr::Call(func, Box::new(args.pop().unwrap())))
    }

    fn variable(&self, name: &str, start: usize) -> Result<Expr, ParseError> {
        let unknown = || ParseError {
            kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
            position: start,
        };
        match self.vars {
            Variables::Radius => {
                if name == "r" {
                    Ok(Expr::Var(0))
                } else {
                    Err(unknown())
                }
            }
            Variables::Indexed(arity) => {
                let index: usize = name
                    .strip_prefix('x')
                    .filter(|d| !d.is_empty() && !d.starts_with('0'))
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(unknown)?;
                if index > arity {
                    return Err(ParseError {
                        kind: ParseErrorKind::ArityViolation {
                            name: name.to_string(),
                            arity,
                        },
                        position: start,
                    });
                }
                Ok(Expr::Var(index - 1))
            }
        }
    }
}

pub fn parse(text: &str, vars: Variables) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::Empty,
            position: 0,
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        vars,
    };
    let e = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.unexpected());
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(text: &str, vars: &[f64]) -> f64 {
        parse(text, Variables::Indexed(vars.len()))
            .unwrap()
            .eval(vars)
            .unwrap()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(ev("x1*x2", &[2.0, 3.0]), 6.0);
        assert_eq!(ev("x1*x2 - x1^2*x2^2", &[2.0, 2.0]), -12.0);
        assert_eq!(ev("min(x1,x2)", &[1.0, 3.0]), 1.0);
        assert_eq!(ev("-x1^2", &[3.0]), -9.0);
        assert_eq!(ev("2^3^2", &[]), 512.0);
        assert_eq!(ev("2^-1", &[]), 0.5);
        assert_eq!(ev("1 - 2 - 3", &[]), -4.0);
        assert_eq!(ev("8 / 4 / 2", &[]), 1.0);
        assert_eq!(ev("max(x1, x2) + abs(-1.5) * sqrt(4)", &[1.0, 0.0]), 4.0);
        assert_eq!(ev("exp(0) + log(1)", &[]), 1.0);
        assert_eq!(ev("1.5e1", &[]), 15.0);
    }

    #[test]
    fn radial_variable() {
        let e = parse("exp(-r)", Variables::Radius).unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap(), 1.0);
        assert!(parse("x1", Variables::Radius).is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse("x1 + $", Variables::Indexed(2)).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('$'));
        assert_eq!(err.position, 5);

        let err = parse("x1 * y", Variables::Indexed(2)).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("y".into()));
        assert_eq!(err.position, 5);

        let err = parse("x3", Variables::Indexed(2)).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::ArityViolation { .. }));

        let err = parse("(x1 + x2", Variables::Indexed(2)).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(err.position, 8);

        assert!(parse("min(x1)", Variables::Indexed(1)).is_err());
        assert!(parse("sin(x1)", Variables::Indexed(1)).is_err());
        assert!(parse("x1 x2", Variables::Indexed(2)).is_err());
        assert_eq!(
            parse("  ", Variables::Indexed(1)).unwrap_err().kind,
            ParseErrorKind::Empty
        );
    }

    #[test]
    fn guarded_operations() {
        let log = parse("log(x1)", Variables::Indexed(1)).unwrap();
        assert_eq!(log.eval(&[0.0]), Err(EvalError::LogDomain(0.0)));
        let div = parse("1/x1", Variables::Indexed(1)).unwrap();
        assert_eq!(div.eval(&[0.0]), Err(EvalError::DivisionByZero));
        // The error poisons the enclosing expression.
        let nested = parse("x1 + 3 * log(x1 - 1)", Variables::Indexed(1)).unwrap();
        assert!(nested.eval(&[1.0]).is_err());
        let big = parse("exp(x1)", Variables::Indexed(1)).unwrap();
        assert_eq!(big.eval(&[1e4]), Err(EvalError::NonFinite("exp")));
    }

    #[test]
    fn pretty_print_reparses() {
        for text in ["x1*x2 - x1^2*x2^2", "-x1^2 + min(x1, 2)", "exp(-(x1+x2))/3"] {
            let e = parse(text, Variables::Indexed(2)).unwrap();
            let printed = e.display(Variables::Indexed(2)).to_string();
            let again = parse(&printed, Variables::Indexed(2)).unwrap();
            assert_eq!(e, again, "{text} -> {printed}");
        }
    }
}
