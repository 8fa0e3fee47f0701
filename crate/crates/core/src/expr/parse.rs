//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ['^' integer]
//! atom   := number | 'x' integer | '(' expr ')' | '-' atom | func '(' expr ')'
//! func   := sin | cos | exp | log | sqrt
//! ```
//!
//! Whitespace is insignificant. Numbers are decimal literals; powers take
//! integer exponents only (write fractional powers with `sqrt`). Errors
//! carry the byte offset of the offending token.

use super::{Expr, Func};
use crate::error::{Error, Result};

/// Parse `text` as an expression over variables `x1..xn`.
pub fn parse(text: &str, n: usize) -> Result<Expr> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, n };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::add(acc, self.term()?);
            } else if self.eat(b'-') {
                acc = Expr::sub(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::mul(acc, self.factor()?);
            } else if self.eat(b'/') {
                acc = Expr::div(acc, self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let atom = self.atom()?;
        if self.eat(b'^') {
            let k = self.integer()?;
            return Ok(Expr::pow(atom, k));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::neg(self.atom()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            _ => Err(self.err("expected a number, variable, function, or '('")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.s.len() && self.s[self.pos] == b'.' {
            self.pos += 1;
            let frac_start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == frac_start {
                return Err(self.err("expected digits after decimal point"));
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| Error::Syntax { pos: start, msg: format!("bad number literal '{text}'") })
    }

    fn identifier(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        if name == "x" {
            let idx_start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == idx_start {
                return Err(Error::Syntax {
                    pos: idx_start,
                    msg: "expected a variable index after 'x'".into(),
                });
            }
            let idx: usize = std::str::from_utf8(&self.s[idx_start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| Error::Syntax { pos: idx_start, msg: "bad variable index".into() })?;
            if idx == 0 || idx > self.n {
                return Err(Error::VarOutOfRange { index: idx, n: self.n });
            }
            return Ok(Expr::Var(idx));
        }
        let func = match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unknown identifier '{name}'"),
                })
            }
        };
        if !self.eat(b'(') {
            return Err(self.err("expected '(' after function name"));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(self.err("expected ')'"));
        }
        Ok(Expr::apply(func, arg))
    }

    /// Signed integer exponent. A decimal point here is rejected outright:
    /// fractional powers must be written with sqrt.
    fn integer(&mut self) -> Result<i32> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.s.len() && self.s[self.pos] == b'-' {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(Error::Syntax { pos: start, msg: "expected an integer exponent".into() });
        }
        if self.pos < self.s.len() && self.s[self.pos] == b'.' {
            return Err(Error::Syntax {
                pos: self.pos,
                msg: "exponents must be integers; use sqrt for fractional powers".into(),
            });
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Syntax { pos: start, msg: "exponent out of range".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_acceptance_grammar_samples() {
        let e = parse("(x1-1)^2 + (x2-1)^2", 2).unwrap();
        assert_eq!(e.eval(&[0.0, 0.0]).unwrap(), 2.0);

        let e = parse("-x1 + 0.5*x1^2 - x2^2 + 0.5*x2^4", 2).unwrap();
        assert_eq!(e.eval(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn rejects_double_star_power() {
        let err = parse("x1 ** 2", 2).unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }), "got {err:?}");
    }

    #[test]
    fn rejects_fractional_exponent() {
        let err = parse("x1^2.5", 2).unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }));
    }

    #[test]
    fn rejects_unknown_identifier() {
        let err = parse("tan(x1)", 1).unwrap_err();
        assert!(matches!(err, Error::Syntax { pos: 0, .. }), "got {err:?}");
    }

    #[test]
    fn rejects_variable_out_of_range() {
        assert_eq!(parse("x3", 2).unwrap_err(), Error::VarOutOfRange { index: 3, n: 2 });
        assert_eq!(parse("x0", 2).unwrap_err(), Error::VarOutOfRange { index: 0, n: 2 });
    }

    #[test]
    fn reports_error_positions() {
        match parse("x1 + ", 2).unwrap_err() {
            Error::Syntax { pos, .. } => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse("(x1", 2).unwrap_err() {
            Error::Syntax { pos, .. } => assert_eq!(pos, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn precedence_and_negation() {
        // 2 + 3*4 = 14, not 20.
        assert_eq!(parse("2 + 3*4", 1).unwrap().eval(&[0.0]).unwrap(), 14.0);
        // Unary minus binds to the atom, so -x1^2 is (-x1)^2 per the grammar.
        assert_eq!(parse("-x1^2", 1).unwrap().eval(&[3.0]).unwrap(), 9.0);
        // Binary minus keeps the usual meaning.
        assert_eq!(parse("0 - x1^2", 1).unwrap().eval(&[3.0]).unwrap(), -9.0);
        // Negative exponents parse.
        assert_eq!(parse("x1^-2", 1).unwrap().eval(&[2.0]).unwrap(), 0.25);
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse("x1+x2*x1", 2).unwrap();
        let b = parse("  x1 + x2   * x1 ", 2).unwrap();
        assert_eq!(a.eval(&[2.0, 5.0]).unwrap(), b.eval(&[2.0, 5.0]).unwrap());
    }

    #[test]
    fn nested_functions() {
        let e = parse("exp(sin(x1) + cos(x2))", 2).unwrap();
        let v = e.eval(&[0.5, 0.25]).unwrap();
        assert!((v - (0.5f64.sin() + 0.25f64.cos()).exp()).abs() < 1e-15);
    }
}
