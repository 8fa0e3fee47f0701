//! Symbolic expressions with exact differentiation.
//!
//! Expressions are trees over constants, variables `x1..xn`, the four
//! arithmetic operations, integer powers, unary negation, and the unary
//! functions sin, cos, exp, log, sqrt. Differentiation is symbolic, so
//! derivatives of polynomials evaluate exactly at rational points — the
//! classifiers depend on multipliers like -2 or 0 coming out exact.
//!
//! Only constant folding is performed when trees are combined; no other
//! simplification happens, and correctness is defined by evaluation rather
//! than by any canonical form. Expressions are immutable once built.

mod parse;

pub use parse::parse;

use crate::error::{Error, Result};

/// Unary function tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression tree node. Variables are 1-based (`Var(1)` is `x1`); integer
/// power exponents are stored exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Neg(Box<Expr>),
    Apply(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn var(index: usize) -> Expr {
        Expr::Var(index)
    }

    // Folding constructors: collapse constant subtrees and drop arithmetic
    // identities so derivative trees stay small.
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
            (Expr::Const(z), e) | (e, Expr::Const(z)) if z == 0.0 => e,
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
            (e, Expr::Const(z)) if z == 0.0 => e,
            (Expr::Const(z), e) if z == 0.0 => Expr::neg(e),
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
            (Expr::Const(z), _) | (_, Expr::Const(z)) if z == 0.0 => Expr::Const(0.0),
            (Expr::Const(o), e) | (e, Expr::Const(o)) if o == 1.0 => e,
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) if y != 0.0 => Expr::Const(x / y),
            (e, Expr::Const(o)) if o == 1.0 => e,
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, k: i32) -> Expr {
        match (a, k) {
            (_, 0) => Expr::Const(1.0),
            (e, 1) => e,
            (Expr::Const(x), k) => Expr::Const(powi(x, k)),
            (a, k) => Expr::Pow(Box::new(a), k),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(x) => Expr::Const(-x),
            Expr::Neg(inner) => *inner,
            a => Expr::Neg(Box::new(a)),
        }
    }

    pub fn apply(f: Func, a: Expr) -> Expr {
        Expr::Apply(f, Box::new(a))
    }

    /// Largest variable index appearing in the tree (0 for constants).
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => *i,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Apply(_, a) => a.max_var(),
        }
    }

    /// Evaluate at `x` (`x[0]` is `x1`). Errors on log/sqrt outside their
    /// domain, division by zero, or a variable index beyond `x.len()`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            Expr::Const(v) => Ok(*v),
            Expr::Var(i) => {
                if *i == 0 || *i > x.len() {
                    return Err(Error::VarOutOfRange { index: *i, n: x.len() });
                }
                Ok(x[*i - 1])
            }
            Expr::Add(a, b) => Ok(a.eval(x)? + b.eval(x)?),
            Expr::Sub(a, b) => Ok(a.eval(x)? - b.eval(x)?),
            Expr::Mul(a, b) => Ok(a.eval(x)? * b.eval(x)?),
            Expr::Div(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return Err(Error::Domain("division by zero".into()));
                }
                Ok(a.eval(x)? / d)
            }
            Expr::Pow(a, k) => {
                let v = a.eval(x)?;
                if *k < 0 && v == 0.0 {
                    return Err(Error::Domain("zero raised to a negative power".into()));
                }
                Ok(powi(v, *k))
            }
            Expr::Neg(a) => Ok(-a.eval(x)?),
            Expr::Apply(f, a) => {
                let v = a.eval(x)?;
                match f {
                    Func::Sin => Ok(v.sin()),
                    Func::Cos => Ok(v.cos()),
                    Func::Exp => Ok(v.exp()),
                    Func::Log => {
                        if v <= 0.0 {
                            return Err(Error::Domain(format!("log of {v}")));
                        }
                        Ok(v.ln())
                    }
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(Error::Domain(format!("sqrt of {v}")));
                        }
                        Ok(v.sqrt())
                    }
                }
            }
        }
    }

    /// Exact partial derivative with respect to `xj` (1-based).
    pub fn diff(&self, j: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(i) => Expr::Const(if *i == j { 1.0 } else { 0.0 }),
            Expr::Add(a, b) => Expr::add(a.diff(j), b.diff(j)),
            Expr::Sub(a, b) => Expr::sub(a.diff(j), b.diff(j)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.diff(j), (**b).clone()),
                Expr::mul((**a).clone(), b.diff(j)),
            ),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.diff(j), (**b).clone()),
                    Expr::mul((**a).clone(), b.diff(j)),
                ),
                Expr::pow((**b).clone(), 2),
            ),
            Expr::Pow(a, k) => Expr::mul(
                Expr::mul(Expr::Const(f64::from(*k)), Expr::pow((**a).clone(), k - 1)),
                a.diff(j),
            ),
            Expr::Neg(a) => Expr::neg(a.diff(j)),
            Expr::Apply(f, a) => {
                let inner = a.diff(j);
                let outer = match f {
                    Func::Sin => Expr::apply(Func::Cos, (**a).clone()),
                    Func::Cos => Expr::neg(Expr::apply(Func::Sin, (**a).clone())),
                    Func::Exp => Expr::apply(Func::Exp, (**a).clone()),
                    Func::Log => Expr::div(Expr::Const(1.0), (**a).clone()),
                    Func::Sqrt => Expr::div(
                        Expr::Const(1.0),
                        Expr::mul(Expr::Const(2.0), Expr::apply(Func::Sqrt, (**a).clone())),
                    ),
                };
                Expr::mul(outer, inner)
            }
        }
    }

    /// All `n` partial derivatives.
    pub fn gradient(&self, n: usize) -> Vec<Expr> {
        (1..=n).map(|j| self.diff(j)).collect()
    }

    /// `n x n` matrix of exact second partials, stored row-major.
    pub fn hessian(&self, n: usize) -> Vec<Vec<Expr>> {
        let grad = self.gradient(n);
        grad.iter().map(|g| g.gradient(n)).collect()
    }

    /// Numeric gradient at `x`.
    pub fn gradient_at(&self, n: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.gradient(n).iter().map(|g| g.eval(x)).collect()
    }

    /// Numeric Hessian at `x`.
    pub fn hessian_at(&self, n: usize, x: &[f64]) -> Result<crate::linalg::Mat> {
        let h = self.hessian(n);
        let mut m = crate::linalg::Mat::zeros(n, n);
        for (i, row) in h.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[(i, j)] = e.eval(x)?;
            }
        }
        Ok(m)
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expr::Const(v) => write!(out, "{v}"),
            Expr::Var(i) => write!(out, "x{i}"),
            Expr::Add(a, b) => write!(out, "({a} + {b})"),
            Expr::Sub(a, b) => write!(out, "({a} - {b})"),
            Expr::Mul(a, b) => write!(out, "({a} * {b})"),
            Expr::Div(a, b) => write!(out, "({a} / {b})"),
            // A power base that is itself a power needs parentheses: the
            // grammar allows only one exponent per factor.
            Expr::Pow(a, k) if matches!(**a, Expr::Pow(..)) => write!(out, "({a})^{k}"),
            Expr::Pow(a, k) => write!(out, "{a}^{k}"),
            // Unary minus binds to the following atom, so a power inner
            // must be parenthesized or the sign would land on the base.
            Expr::Neg(a) if matches!(**a, Expr::Pow(..)) => write!(out, "(-({a}))"),
            Expr::Neg(a) => write!(out, "(-{a})"),
            Expr::Apply(f, a) => write!(out, "{}({a})", f.name()),
        }
    }
}

fn powi(base: f64, k: i32) -> f64 {
    base.powi(k)
}
