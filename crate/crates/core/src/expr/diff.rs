use super::{simplify, Expr, Func};
use crate::error::{Error, Result};
use crate::numeric::Scalar;

/// Node count above which a derivative chain is abandoned.
pub const DEFAULT_NODE_CAP: usize = 100_000;

fn raw(e: &Expr) -> Expr {
    if !e.contains_var() {
        return Expr::int(0);
    }
    match e {
        Expr::Const(_) => Expr::int(0),
        Expr::Var => Expr::int(1),
        Expr::Add(a, b) => Expr::add(raw(a), raw(b)),
        Expr::Neg(a) => Expr::neg(raw(a)),
        Expr::Mul(a, b) => Expr::add(
            Expr::mul(raw(a), (**b).clone()),
            Expr::mul((**a).clone(), raw(b)),
        ),
        Expr::Div(a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            Expr::div(
                Expr::add(
                    Expr::mul(raw(&a), b.clone()),
                    Expr::neg(Expr::mul(a, raw(&b))),
                ),
                Expr::pow(b, Expr::int(2)),
            )
        }
        Expr::Pow(a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            if !b.contains_var() {
                let lowered = match b.as_const() {
                    Some(c) => Expr::Const(c.sub(&Scalar::one())),
                    None => Expr::add(b.clone(), Expr::int(-1)),
                };
                return Expr::mul(Expr::mul(b, Expr::pow(a.clone(), lowered)), raw(&a));
            }
            let power = Expr::pow(a.clone(), b.clone());
            if !a.contains_var() {
                return Expr::mul(Expr::mul(power, Expr::ln(a)), raw(&b));
            }
            let inner = Expr::add(
                Expr::mul(raw(&b), Expr::ln(a.clone())),
                Expr::div(Expr::mul(b, raw(&a)), a),
            );
            Expr::mul(power, inner)
        }
        Expr::Apply(f, a) => {
            let a = (**a).clone();
            let outer = match f {
                Func::Exp => Expr::exp(a.clone()),
                Func::Ln => Expr::div(Expr::int(1), a.clone()),
                Func::Sin => Expr::cos(a.clone()),
                Func::Cos => Expr::neg(Expr::sin(a.clone())),
            };
            Expr::mul(outer, raw(&a))
        }
    }
}

/// Symbolic derivative with respect to `x`, simplified.
pub fn differentiate(e: &Expr) -> Expr {
    simplify(&raw(e))
}

/// `[f, f', ..., f^(n)]`, each entry simplified.
pub fn derivative_chain(e: &Expr, n: usize) -> Result<Vec<Expr>> {
    derivative_chain_with_cap(e, n, DEFAULT_NODE_CAP)
}

/// As [`derivative_chain`], failing once any entry exceeds `cap` nodes.
pub fn derivative_chain_with_cap(e: &Expr, n: usize, cap: usize) -> Result<Vec<Expr>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(e.clone());
    for _ in 0..n {
        let next = differentiate(out.last().expect("chain is nonempty"));
        let nodes = next.node_count();
        if nodes > cap {
            return Err(Error::ExpressionBlowup { nodes, cap });
        }
        out.push(next);
    }
    Ok(out)
}
