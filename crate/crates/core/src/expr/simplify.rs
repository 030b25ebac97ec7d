//! Rewrite pipeline: constant folding, identity elimination, like-term and
//! like-factor collection, and collapse of negation chains.
//!
//! Sums are flattened to `(coefficient, factors)` pairs and products to a
//! coefficient times a sorted list of `(base, exponent)` factors. Both are
//! rebuilt deterministically, and the pass is iterated to a fixpoint. The
//! result is semantically equal to the input wherever the input is defined;
//! no canonical form is claimed.

use super::{Expr, Func};
use crate::numeric::Scalar;

type Factors = Vec<(Expr, Expr)>;

#[derive(Clone)]
struct Product {
    coeff: Scalar,
    factors: Factors,
}

impl Product {
    fn constant(c: Scalar) -> Self {
        Product {
            coeff: c,
            factors: Vec::new(),
        }
    }

    fn opaque(e: Expr) -> Self {
        Product {
            coeff: Scalar::one(),
            factors: vec![(e, Expr::int(1))],
        }
    }

    fn times(mut self, other: Product) -> Product {
        self.coeff = self.coeff.mul(&other.coeff);
        for (base, exp) in other.factors {
            push_factor(&mut self, base, exp);
        }
        self.factors.sort();
        self
    }

    /// Raises to an integer power; `None` when that would divide by zero.
    fn powi(self, k: i64) -> Option<Product> {
        let coeff = self.coeff.pow_int(k).ok()?;
        let mut out = Product::constant(coeff);
        for (base, exp) in self.factors {
            let scaled = scale_exponent(&exp, k);
            push_factor(&mut out, base, scaled);
        }
        out.factors.sort();
        Some(out)
    }
}

fn scale_exponent(exp: &Expr, k: i64) -> Expr {
    match exp {
        Expr::Const(c) => Expr::Const(c.mul(&Scalar::from_int(k))),
        other => simplify_once(&Expr::mul(Expr::int(k), other.clone())),
    }
}

fn add_exponents(a: &Expr, b: &Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x.add(y)),
        _ => simplify_once(&Expr::add(a.clone(), b.clone())),
    }
}

fn push_factor(p: &mut Product, base: Expr, exp: Expr) {
    if let Some(slot) = p.factors.iter_mut().find(|(b, _)| *b == base) {
        slot.1 = add_exponents(&slot.1, &exp);
    } else {
        p.factors.push((base, exp));
    }
    // drop x^0 and fold rational bases that reached an integer exponent
    let mut i = 0;
    while i < p.factors.len() {
        let (base, exp) = &p.factors[i];
        if exp.is_zero() {
            p.factors.remove(i);
            continue;
        }
        if let (Expr::Const(b), Some(k)) = (base, exp.as_const().and_then(Scalar::as_integer)) {
            if b.is_rational() {
                if let Some(v) = i64::try_from(k).ok().and_then(|k| b.pow_int(k).ok()) {
                    p.coeff = p.coeff.mul(&v);
                    p.factors.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
}

fn integer_const(e: &Expr) -> Option<i64> {
    e.as_const()?.as_integer()?.try_into().ok()
}

/// Product view of an already simplified expression.
fn product_of(e: &Expr) -> Product {
    match e {
        Expr::Const(c) => Product::constant(c.clone()),
        Expr::Neg(a) => {
            let mut p = product_of(a);
            p.coeff = p.coeff.neg();
            p
        }
        Expr::Mul(a, b) => product_of(a).times(product_of(b)),
        Expr::Div(a, b) => match product_of(b).powi(-1) {
            Some(inv) => product_of(a).times(inv),
            None => Product::opaque(e.clone()),
        },
        Expr::Pow(base, exp) => match integer_const(exp) {
            Some(k) => product_of(base)
                .powi(k)
                .unwrap_or_else(|| Product::opaque(e.clone())),
            None => Product {
                coeff: Scalar::one(),
                factors: vec![((**base).clone(), (**exp).clone())],
            },
        },
        _ => Product::opaque(e.clone()),
    }
}

fn factor_expr(base: &Expr, exp: &Expr) -> Expr {
    match exp.as_const() {
        Some(c) if c.value_eq(&Scalar::one()) && c.is_rational() => base.clone(),
        _ => Expr::pow(base.clone(), exp.clone()),
    }
}

fn fold_mul(items: Vec<Expr>) -> Option<Expr> {
    items.into_iter().reduce(Expr::mul)
}

fn build_product(p: &Product) -> Expr {
    if p.coeff.is_zero() {
        return Expr::Const(Scalar::zero());
    }
    if p.factors.is_empty() {
        return Expr::Const(p.coeff.clone());
    }
    let mut num = Vec::new();
    let mut den = Vec::new();
    for (base, exp) in &p.factors {
        match exp.as_const() {
            Some(c) if c.signum() < 0 => den.push(factor_expr(base, &Expr::Const(c.neg()))),
            _ => num.push(factor_expr(base, exp)),
        }
    }
    let negative = p.coeff.signum() < 0;
    let magnitude = p.coeff.abs();
    let (top, bottom) = match &magnitude {
        Scalar::Rational(r) => (
            Scalar::from_bigint(r.numer().clone()),
            Scalar::from_bigint(r.denom().clone()),
        ),
        Scalar::Float(_) => (magnitude.clone(), Scalar::one()),
    };
    let top_is_one = top.is_rational() && top.value_eq(&Scalar::one());
    if !top_is_one || num.is_empty() {
        num.insert(0, Expr::Const(top));
    }
    if !bottom.value_eq(&Scalar::one()) {
        den.insert(0, Expr::Const(bottom));
    }
    let numerator = fold_mul(num).expect("numerator is nonempty");
    let core = match fold_mul(den) {
        Some(d) => Expr::div(numerator, d),
        None => numerator,
    };
    if !negative {
        return core;
    }
    match core {
        Expr::Const(c) => Expr::Const(c.neg()),
        Expr::Div(n, d) if matches!(&*n, Expr::Const(_)) => {
            Expr::div(Expr::negate((*n).clone()), (*d).clone())
        }
        other => Expr::neg(other),
    }
}

/// Sum view: `(coefficient, factors)` terms. A term that is a scalar multiple
/// of a single sum is distributed.
fn sum_terms(e: &Expr, scale: &Scalar, out: &mut Vec<(Scalar, Factors)>) {
    if let Expr::Add(a, b) = e {
        sum_terms(a, scale, out);
        sum_terms(b, scale, out);
        return;
    }
    let p = product_of(e);
    if let [(base @ Expr::Add(..), exp)] = p.factors.as_slice() {
        if integer_const(exp) == Some(1) {
            sum_terms(base, &scale.mul(&p.coeff), out);
            return;
        }
    }
    out.push((scale.mul(&p.coeff), p.factors));
}

fn build_sum(e: &Expr) -> Expr {
    let mut raw = Vec::new();
    sum_terms(e, &Scalar::one(), &mut raw);
    let mut terms: Vec<(Scalar, Factors)> = Vec::new();
    for (c, f) in raw {
        if let Some(slot) = terms.iter_mut().find(|(_, g)| *g == f) {
            slot.0 = slot.0.add(&c);
        } else {
            terms.push((c, f));
        }
    }
    terms.retain(|(c, _)| !c.is_zero());
    terms.sort_by(|a, b| b.1.cmp(&a.1));
    let mut acc: Option<Expr> = None;
    for (coeff, factors) in terms {
        acc = Some(match acc {
            None => build_product(&Product { coeff, factors }),
            Some(prev) if coeff.signum() < 0 => {
                let positive = build_product(&Product {
                    coeff: coeff.neg(),
                    factors,
                });
                Expr::add(prev, Expr::negate(positive))
            }
            Some(prev) => Expr::add(prev, build_product(&Product { coeff, factors })),
        });
    }
    acc.unwrap_or_else(|| Expr::int(0))
}

fn simplify_pow(base: Expr, exp: Expr) -> Expr {
    if exp.is_zero() {
        return Expr::int(1);
    }
    if let Expr::Apply(Func::Exp, inner) = &base {
        return Expr::exp(simplify_once(&Expr::mul((**inner).clone(), exp)));
    }
    if let Some(k) = integer_const(&exp) {
        if k == 1 {
            return base;
        }
        if let Some(p) = product_of(&base).powi(k) {
            return build_product(&p);
        }
        return Expr::pow(base, exp);
    }
    if let Expr::Const(b) = &base {
        if b.is_rational() && b.value_eq(&Scalar::one()) {
            return Expr::int(1);
        }
    }
    Expr::pow(base, exp)
}

fn simplify_apply(f: Func, arg: Expr) -> Expr {
    let exact_zero = matches!(&arg, Expr::Const(c) if c.is_rational() && c.is_zero());
    match f {
        Func::Exp if exact_zero => Expr::int(1),
        Func::Sin if exact_zero => Expr::int(0),
        Func::Cos if exact_zero => Expr::int(1),
        Func::Ln => match &arg {
            Expr::Const(c) if c.is_rational() && c.value_eq(&Scalar::one()) => Expr::int(0),
            Expr::Apply(Func::Exp, inner) => (**inner).clone(),
            _ => Expr::ln(arg),
        },
        _ => Expr::apply(f, arg),
    }
}

fn simplify_once(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var => e.clone(),
        Expr::Add(a, b) => build_sum(&Expr::add(simplify_once(a), simplify_once(b))),
        Expr::Neg(a) => build_sum(&Expr::neg(simplify_once(a))),
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            let (sa, sb) = (simplify_once(a), simplify_once(b));
            let rebuilt = if matches!(e, Expr::Mul(..)) {
                Expr::mul(sa, sb)
            } else {
                Expr::div(sa, sb)
            };
            build_sum(&rebuilt)
        }
        Expr::Pow(a, b) => {
            let p = simplify_pow(simplify_once(a), simplify_once(b));
            match p {
                Expr::Pow(..) => p,
                other => build_sum(&other),
            }
        }
        Expr::Apply(f, a) => simplify_apply(*f, simplify_once(a)),
    }
}

/// Simplifies to a fixpoint of the rewrite pipeline.
pub fn simplify(e: &Expr) -> Expr {
    let mut cur = simplify_once(e);
    for _ in 0..16 {
        let next = simplify_once(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn s(text: &str) -> String {
        simplify(&parse(text).unwrap()).to_string()
    }

    #[test]
    fn identities() {
        assert_eq!(simplify(&Expr::add(Expr::int(0), Expr::Var)), Expr::Var);
        assert_eq!(
            simplify(&Expr::mul(Expr::Var, Expr::Var)),
            Expr::pow(Expr::Var, Expr::int(2))
        );
        assert_eq!(
            simplify(&Expr::mul(Expr::int(2), Expr::mul(Expr::int(3), Expr::Var))),
            Expr::mul(Expr::int(6), Expr::Var)
        );
    }

    #[test]
    fn collects_like_terms() {
        assert_eq!(s("x*x - x^2/2"), "x^2/2");
        assert_eq!(s("x^2*x - 2*x*x^2/2 + 2*x^3/6"), "x^3/3");
        assert_eq!(s("sin(x)*exp(x) + exp(x)*sin(x)"), "2*exp(x)*sin(x)");
        assert_eq!(s("x - x"), "0");
        assert_eq!(s("-(x + 1) + x"), "-1");
    }

    #[test]
    fn powers_and_quotients() {
        assert_eq!(s("x*x^3"), "x^4");
        assert_eq!(s("x/x^3"), "1/x^2");
        assert_eq!(s("-1*x^-2"), "-1/x^2");
        assert_eq!(s("(2*x)^2"), "4*x^2");
        assert_eq!(s("x^(1/2)*x^(1/2)"), "x");
        assert_eq!(s("(x^2)^3"), "x^6");
        assert_eq!(s("3/6"), "1/2");
        assert_eq!(s("2^(1/2)*2^(1/2)"), "2");
    }

    #[test]
    fn negation_chains() {
        assert_eq!(s("--x"), "x");
        assert_eq!(s("---x"), "-x");
        assert_eq!(s("-(-(2*x))"), "2*x");
    }

    #[test]
    fn elementary_functions() {
        assert_eq!(s("exp(0)"), "1");
        assert_eq!(s("ln(1)"), "0");
        assert_eq!(s("sin(0) + cos(0)"), "1");
        assert_eq!(s("ln(exp(x))"), "x");
        assert_eq!(s("exp(x)^2"), "exp(2*x)");
    }

    #[test]
    fn leaves_zero_division_alone() {
        let e = simplify(&parse("1/(x - x)").unwrap());
        assert!(e.eval(&Scalar::one(), &Default::default()).is_err());
    }
}
