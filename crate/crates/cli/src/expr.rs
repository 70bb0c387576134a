//! Minimal arithmetic grammar for gap, velocity and pressure expressions:
//! numeric literals, the variables `xi1`, `xi2`, `t`, the operators
//! `+ - * /`, unary minus, parentheses, and the functions `sin`, `cos`,
//! `exp`, `pow(a, b)`. Deliberately not a scripting language: every
//! construct evaluates to the same value on every run.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Xi1,
    Xi2,
    Time,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, xi1: f64, xi2: f64, t: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Xi1 => xi1,
            Expr::Xi2 => xi2,
            Expr::Time => t,
            Expr::Neg(e) => -e.eval(xi1, xi2, t),
            Expr::Add(a, b) => a.eval(xi1, xi2, t) + b.eval(xi1, xi2, t),
            Expr::Sub(a, b) => a.eval(xi1, xi2, t) - b.eval(xi1, xi2, t),
            Expr::Mul(a, b) => a.eval(xi1, xi2, t) * b.eval(xi1, xi2, t),
            Expr::Div(a, b) => a.eval(xi1, xi2, t) / b.eval(xi1, xi2, t),
            Expr::Pow(a, b) => a.eval(xi1, xi2, t).powf(b.eval(xi1, xi2, t)),
            Expr::Sin(e) => e.eval(xi1, xi2, t).sin(),
            Expr::Cos(e) => e.eval(xi1, xi2, t).cos(),
            Expr::Exp(e) => e.eval(xi1, xi2, t).exp(),
        }
    }

    /// Constant zero, handy as a default.
    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }
}

/// Parse failure with a zero-based column into the expression source.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column + 1, self.message)
    }
}

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
}

pub fn parse_expr(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expression()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl<'s> Parser<'s> {
    fn error(&self, message: &str) -> ExprError {
        ExprError {
            column: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expression(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expression()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(c) => Err(self.error(&format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E') && self.pos > start {
                self.pos += 1;
                if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>().map(Expr::Const).map_err(|_| ExprError {
            column: start,
            message: format!("invalid number literal '{text}'"),
        })
    }

    fn identifier(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "xi1" => Ok(Expr::Xi1),
            "xi2" => Ok(Expr::Xi2),
            "t" => Ok(Expr::Time),
            "sin" | "cos" | "exp" => {
                if !self.eat(b'(') {
                    return Err(self.error(&format!("expected '(' after '{name}'")));
                }
                let arg = self.expression()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(match name {
                    "sin" => Expr::Sin(Box::new(arg)),
                    "cos" => Expr::Cos(Box::new(arg)),
                    _ => Expr::Exp(Box::new(arg)),
                })
            }
            "pow" => {
                if !self.eat(b'(') {
                    return Err(self.error("expected '(' after 'pow'"));
                }
                let base = self.expression()?;
                if !self.eat(b',') {
                    return Err(self.error("expected ',' between pow arguments"));
                }
                let exponent = self.expression()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(Expr::Pow(Box::new(base), Box::new(exponent)))
            }
            _ => Err(ExprError {
                column: start,
                message: format!("unknown identifier '{name}' (variables: xi1, xi2, t)"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_functions() {
        let e = parse_expr("1 + 0.1*sin(2*xi1) - pow(xi2, 2) / 4").unwrap();
        let v = e.eval(0.3, 2.0, 0.0);
        let want = 1.0 + 0.1 * (0.6f64).sin() - 4.0 / 4.0;
        assert!((v - want).abs() < 1e-15);
    }

    #[test]
    fn unary_minus_and_nesting() {
        let e = parse_expr("-(xi1 - -xi2) * exp(-t)").unwrap();
        let v = e.eval(1.0, 2.0, 0.5);
        assert!((v - (-(3.0) * (-0.5f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn scientific_literals() {
        let e = parse_expr("1e-3 + 2.5E2").unwrap();
        assert!((e.eval(0.0, 0.0, 0.0) - 250.001).abs() < 1e-12);
    }

    #[test]
    fn errors_carry_columns() {
        let err = parse_expr("1 + foo").unwrap_err();
        assert_eq!(err.column, 4);
        assert!(err.message.contains("foo"));
        assert!(parse_expr("sin 3").is_err());
        assert!(parse_expr("1 +").is_err());
        assert!(parse_expr("(1").is_err());
    }
}
