//! Single-variable expression trees.
//!
//! The vocabulary is closed: constants, the variable `x`, `+`, `*`, `/`,
//! powers, negation and the four elementary functions `exp`, `ln`, `sin`,
//! `cos`. Subtraction is represented as `Add(a, Neg(b))`.

mod diff;
mod format;
mod parse;
mod simplify;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use diff::{derivative_chain, derivative_chain_with_cap, differentiate, DEFAULT_NODE_CAP};
pub use parse::parse;
pub use simplify::simplify;

use crate::error::{DomainError, ParseError, Result};
use crate::numeric::{PrecisionContext, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }

    pub fn apply(self, v: &Scalar, ctx: &PrecisionContext) -> Result<Scalar> {
        match self {
            Func::Exp => v.exp(ctx),
            Func::Ln => v.ln(ctx),
            Func::Sin => v.sin(ctx),
            Func::Cos => v.cos(ctx),
        }
    }
}

/// Immutable expression tree; children are shared.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expr {
    Const(Scalar),
    Var,
    Add(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Apply(Func, Arc<Expr>),
}

impl Expr {
    pub fn constant(c: Scalar) -> Expr {
        Expr::Const(c)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Scalar::from_int(n))
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Arc::new(a), Arc::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Arc::new(a), Arc::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Arc::new(a), Arc::new(b))
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        Expr::Pow(Arc::new(a), Arc::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Arc::new(a))
    }

    pub fn apply(f: Func, a: Expr) -> Expr {
        Expr::Apply(f, Arc::new(a))
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::apply(Func::Exp, a)
    }

    pub fn ln(a: Expr) -> Expr {
        Expr::apply(Func::Ln, a)
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::apply(Func::Sin, a)
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::apply(Func::Cos, a)
    }

    /// Negation that folds constants: `-Const(c)` is `Const(-c)`.
    pub fn negate(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(c.neg()),
            other => Expr::neg(other),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn as_const(&self) -> Option<&Scalar> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                1 + a.node_count() + b.node_count()
            }
            Expr::Neg(a) | Expr::Apply(_, a) => 1 + a.node_count(),
        }
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var => true,
            Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.contains_var() || b.contains_var()
            }
            Expr::Neg(a) | Expr::Apply(_, a) => a.contains_var(),
        }
    }

    /// True when evaluation never leaves the rationals: no elementary
    /// functions and only integer constant exponents.
    pub fn is_rational_function(&self) -> bool {
        match self {
            Expr::Const(c) => c.is_rational(),
            Expr::Var => true,
            Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_rational_function() && b.is_rational_function()
            }
            Expr::Pow(a, b) => {
                a.is_rational_function()
                    && matches!(&**b, Expr::Const(c) if c.as_integer().is_some())
            }
            Expr::Neg(a) => a.is_rational_function(),
            Expr::Apply(..) => false,
        }
    }

    /// An upper bound on the degree when the expression is a polynomial in `x`
    /// (so its derivatives beyond that order vanish identically), else `None`.
    pub fn polynomial_degree(&self) -> Option<u32> {
        if !self.contains_var() {
            return Some(0);
        }
        match self {
            Expr::Const(_) => Some(0),
            Expr::Var => Some(1),
            Expr::Add(a, b) => Some(a.polynomial_degree()?.max(b.polynomial_degree()?)),
            Expr::Mul(a, b) => Some(a.polynomial_degree()? + b.polynomial_degree()?),
            Expr::Div(a, b) if !b.contains_var() => a.polynomial_degree(),
            Expr::Pow(a, b) if !b.contains_var() => {
                let k = b.as_const()?.as_integer()?;
                let k: u32 = k.try_into().ok()?;
                Some(a.polynomial_degree()? * k)
            }
            Expr::Neg(a) => a.polynomial_degree(),
            _ => None,
        }
    }

    /// Evaluates at `x = x0`. Exact when the expression is a rational
    /// function and `x0` is rational.
    pub fn eval(&self, x0: &Scalar, ctx: &PrecisionContext) -> Result<Scalar> {
        match self {
            Expr::Const(c) => Ok(c.clone()),
            Expr::Var => Ok(x0.clone()),
            Expr::Add(a, b) => Ok(a.eval(x0, ctx)?.add(&b.eval(x0, ctx)?)),
            Expr::Mul(a, b) => Ok(a.eval(x0, ctx)?.mul(&b.eval(x0, ctx)?)),
            Expr::Div(a, b) => {
                let num = a.eval(x0, ctx)?;
                let den = b.eval(x0, ctx)?;
                num.div(&den)
                    .map_err(|_| DomainError::DivisionByZero.into())
            }
            Expr::Pow(a, b) => {
                let base = a.eval(x0, ctx)?;
                let exponent = b.eval(x0, ctx)?;
                if b.contains_var() && base.signum() <= 0 {
                    return Err(DomainError::PowNegativeBase.into());
                }
                base.pow(&exponent, ctx)
            }
            Expr::Neg(a) => Ok(a.eval(x0, ctx)?.neg()),
            Expr::Apply(f, a) => f.apply(&a.eval(x0, ctx)?, ctx),
        }
    }
}

/// Evaluates `e` at `x0`; see [`Expr::eval`].
pub fn eval(e: &Expr, x0: &Scalar, ctx: &PrecisionContext) -> Result<Scalar> {
    e.eval(x0, ctx)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format::format(self))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "Const({c})"),
            Expr::Var => f.write_str("Var"),
            Expr::Add(a, b) => write!(f, "Add({a:?}, {b:?})"),
            Expr::Mul(a, b) => write!(f, "Mul({a:?}, {b:?})"),
            Expr::Div(a, b) => write!(f, "Div({a:?}, {b:?})"),
            Expr::Pow(a, b) => write!(f, "Pow({a:?}, {b:?})"),
            Expr::Neg(a) => write!(f, "Neg({a:?})"),
            Expr::Apply(func, a) => write!(f, "Apply({}, {a:?})", func.name()),
        }
    }
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        parse(s)
    }
}

pub use format::format;
