//! Printer producing text that the parser reads back to the same tree
//! (for simplified expressions).

use super::Expr;
use crate::numeric::Scalar;

const SUM: u8 = 1;
const TERM: u8 = 2;
const FACTOR: u8 = 3;
const UNARY: u8 = 4;
const ATOM: u8 = 5;

fn const_text(c: &Scalar) -> String {
    match c {
        Scalar::Rational(r) => r.to_string(),
        Scalar::Float(_) => c.to_string(),
    }
}

/// Binding level of a node. Non-integer rational constants print as `p/q`,
/// which only re-parses as one literal in the leftmost position of a term.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => TERM,
        Expr::Pow(..) => FACTOR,
        Expr::Neg(_) => UNARY,
        Expr::Const(c) => match c {
            Scalar::Rational(r) if !r.is_integer() => TERM,
            _ if c.signum() < 0 => UNARY,
            _ => ATOM,
        },
        Expr::Var | Expr::Apply(..) => ATOM,
    }
}

fn write_at(e: &Expr, min: u8, out: &mut String) {
    if level(e) < min {
        out.push('(');
        write(e, out);
        out.push(')');
    } else {
        write(e, out);
    }
}

fn write(e: &Expr, out: &mut String) {
    match e {
        Expr::Const(c) => out.push_str(&const_text(c)),
        Expr::Var => out.push('x'),
        Expr::Add(a, b) => {
            write_at(a, SUM, out);
            match &**b {
                Expr::Neg(inner) => {
                    out.push_str(" - ");
                    write_at(inner, TERM, out);
                }
                Expr::Const(c) if c.signum() < 0 => {
                    out.push_str(" - ");
                    write_at(&Expr::Const(c.neg()), TERM, out);
                }
                _ => {
                    out.push_str(" + ");
                    write_at(b, TERM, out);
                }
            }
        }
        Expr::Mul(a, b) => {
            write_at(a, TERM, out);
            out.push('*');
            write_at(b, FACTOR, out);
        }
        Expr::Div(a, b) => {
            write_at(a, TERM, out);
            out.push('/');
            write_at(b, FACTOR, out);
        }
        Expr::Pow(a, b) => {
            write_at(a, UNARY, out);
            out.push('^');
            write_at(b, FACTOR, out);
        }
        Expr::Neg(a) => {
            out.push('-');
            write_at(a, UNARY, out);
        }
        Expr::Apply(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write(a, out);
            out.push(')');
        }
    }
}

/// Renders an expression in the parser's grammar.
pub fn format(e: &Expr) -> String {
    let mut out = String::new();
    write(e, &mut out);
    out
}
