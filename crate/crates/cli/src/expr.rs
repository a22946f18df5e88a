//! A minimal arithmetic expression language for user-defined maps and
//! gauges: one variable, decimal literals, `+ - * / ^`, unary minus,
//! and the functions `exp`, `log`, `sqrt`, `abs`, `min`, `max`.
//!
//! Precedence, tightest first: `^` (right-associative), unary `-`,
//! `* /`, `+ -` (left-associative). Rendering emits the minimal
//! parenthesisation; `parse . render . parse` is a fixed point.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

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
    Sqrt,
    Abs,
    Min,
    Max,
}

impl Func {
    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    #[allow(dead_code)] // used by render
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }
}

/// Parse failure at a byte offset, with what was expected there.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntaxError {
    pub position: usize,
    pub expected: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: expected {}", self.position, self.expected)
    }
}

impl std::error::Error for SyntaxError {}

/// Evaluation left the guarded domain (log of a non-positive number,
/// square root of a negative, division by zero, non-finite power).
#[derive(Debug, Clone, PartialEq)]
pub struct DomainError {
    pub detail: String,
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "domain error: {}", self.detail)
    }
}

impl std::error::Error for DomainError {}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    var: &'a str,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, expected: &str) -> SyntaxError {
        SyntaxError {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn expect(&mut self, ch: u8) -> Result<(), SyntaxError> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("'{}'", ch as char)))
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.peek() {
            let op = match c {
                b'+' => BinOp::Add,
                b'-' => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.peek() {
            let op = match c {
                b'*' => BinOp::Mul,
                b'/' => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    // power := atom ('^' unary)?   (right-associative, binds tighter
    // than unary minus: -t^2 parses as -(t^2))
    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            _ => Err(self.err("a number, variable, function or '('")),
        }
    }

    fn number(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // Not an exponent after all ("2e" could start "2*exp..."
                // is not valid anyway, but don't swallow the 'e').
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| SyntaxError {
                position: start,
                expected: "a decimal literal".to_string(),
            })
    }

    fn identifier(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if name == self.var {
            return Ok(Expr::Var);
        }
        if let Some(f) = Func::from_name(name) {
            self.expect(b'(')?;
            let mut args = vec![self.expr()?];
            for _ in 1..f.arity() {
                self.expect(b',')?;
                args.push(self.expr()?);
            }
            self.expect(b')')?;
            return Ok(Expr::Call(f, args));
        }
        Err(SyntaxError {
            position: start,
            expected: format!("the variable '{}' or a known function", self.var),
        })
    }
}

/// Parse `src` with the single allowed variable `var` (`"t"` for
/// gauges, `"x"` for maps).
pub fn parse(src: &str, var: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        var,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("end of input"));
    }
    Ok(e)
}

impl Expr {
    /// Evaluate at `v`, guarding the domain of every partial operation.
    pub fn eval(&self, v: f64) -> Result<f64, DomainError> {
        let out = match self {
            Expr::Num(n) => *n,
            Expr::Var => v,
            Expr::Neg(e) => -e.eval(v)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(v)?, b.eval(v)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(DomainError {
                                detail: format!("division by zero ({a} / 0)"),
                            });
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        let r = a.powf(b);
                        if !r.is_finite() {
                            return Err(DomainError {
                                detail: format!("{a} ^ {b} is not a finite real"),
                            });
                        }
                        r
                    }
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(v)?;
                match f {
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(DomainError {
                                detail: format!("log of non-positive number {a}"),
                            });
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(DomainError {
                                detail: format!("square root of negative number {a}"),
                            });
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                    Func::Min => a.min(args[1].eval(v)?),
                    Func::Max => a.max(args[1].eval(v)?),
                }
            }
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(DomainError {
                detail: "overflow to a non-finite value".to_string(),
            })
        }
    }

    /// Render with minimal parentheses; re-parsing gives back the same
    /// tree.
    #[allow(dead_code)] // exercised by the round-trip tests
    pub fn render(&self, var: &str) -> String {
        self.render_prec(var, 0)
    }

    // Precedence levels: 0 add, 1 mul, 2 unary, 3 pow, 4 atom.
    #[allow(dead_code)]
    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 0,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 1,
            Expr::Neg(_) => 2,
            Expr::Bin(BinOp::Pow, ..) => 3,
            Expr::Num(_) | Expr::Var | Expr::Call(..) => 4,
        }
    }

    #[allow(dead_code)]
    fn render_prec(&self, var: &str, min: u8) -> String {
        let body = match self {
            Expr::Num(n) => {
                // The lexer has no negative literals; guard round-trip.
                if *n < 0.0 {
                    format!("(0-{})", -n)
                } else {
                    format!("{n}")
                }
            }
            Expr::Var => var.to_string(),
            Expr::Neg(e) => format!("-{}", e.render_prec(var, 2)),
            Expr::Bin(op, a, b) => {
                let (sym, lp, rp) = match op {
                    BinOp::Add => ("+", 0, 1),
                    BinOp::Sub => ("-", 0, 1),
                    BinOp::Mul => ("*", 1, 2),
                    BinOp::Div => ("/", 1, 2),
                    // Right-assoc: the left side must be an atom-level
                    // expression, the right side can be unary.
                    BinOp::Pow => ("^", 4, 2),
                };
                format!(
                    "{}{}{}",
                    a.render_prec(var, lp),
                    sym,
                    b.render_prec(var, rp)
                )
            }
            Expr::Call(f, args) => {
                let rendered: Vec<String> =
                    args.iter().map(|a| a.render_prec(var, 0)).collect();
                format!("{}({})", f.name(), rendered.join(","))
            }
        };
        if self.prec() < min {
            format!("({body})")
        } else {
            body
        }
    }
}
