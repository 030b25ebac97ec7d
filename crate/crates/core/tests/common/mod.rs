#![allow(dead_code)]

use proptest::prelude::*;
use serint_core::expr::Expr;
use serint_core::numeric::Scalar;

pub fn lit(text: &str) -> Scalar {
    Scalar::from_literal(text).unwrap()
}

/// |a - b| <= rel * max(|a|, |b|, floor)
pub fn close(a: &Scalar, b: &Scalar, rel: &Scalar, floor: &Scalar) -> bool {
    let mut scale = a.abs();
    for s in [b.abs(), floor.clone()] {
        if s.cmp_value(&scale).is_gt() {
            scale = s;
        }
    }
    let diff = a.sub(b).abs();
    diff.cmp_value(&rel.mul(&scale)).is_le()
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        3 => Just(Expr::Var),
        1 => (-3i64..=3).prop_map(Expr::int),
        1 => (-3i64..=3, 1i64..=4).prop_map(|(n, d)| Expr::Const(Scalar::ratio(n, d).unwrap())),
    ]
}

/// Random expressions over the whole vocabulary.
pub fn any_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, Expr::negate(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            (inner.clone(), 0i64..=3).prop_map(|(a, k)| Expr::pow(a, Expr::int(k))),
            inner.clone().prop_map(Expr::neg),
            inner.clone().prop_map(Expr::exp),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
            inner
                .clone()
                .prop_map(|a| Expr::ln(Expr::add(Expr::int(2), Expr::sin(a)))),
            inner.prop_map(|a| Expr::pow(Expr::add(Expr::int(3), Expr::cos(a)), Expr::Var)),
        ]
    })
}

/// Random rational functions (no elementary functions, integer powers).
pub fn rational_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 20, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, Expr::negate(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            (inner.clone(), 0i64..=3).prop_map(|(a, k)| Expr::pow(a, Expr::int(k))),
            inner.prop_map(Expr::neg),
        ]
    })
}

/// Sample points k/16 in (0, 3].
pub fn sample_point() -> impl Strategy<Value = Scalar> {
    (1i64..=48).prop_map(|k| Scalar::ratio(k, 16).unwrap())
}

/// Polynomials, exp, sin, cos and products of them.
pub const CORPUS: [&str; 25] = [
    "x",
    "x^2",
    "3*x^3 - 2*x + 1",
    "x^5 - x^4/2",
    "(x + 1)^4",
    "exp(x)",
    "exp(2*x)",
    "exp(-x)",
    "sin(x)",
    "cos(x)",
    "sin(2*x)",
    "cos(3*x)",
    "x*exp(x)",
    "x^2*sin(x)",
    "exp(x)*cos(x)",
    "sin(x)*cos(x)",
    "x*cos(x)",
    "exp(x)*sin(x)",
    "x^3*exp(-x)",
    "sin(x)^2",
    "cos(x)^3",
    "exp(x/2)*x^2",
    "(1 + x^2)*cos(x)",
    "exp(-x)*sin(2*x)",
    "x^4 + exp(x)",
];

pub fn corpus() -> Vec<Expr> {
    CORPUS
        .iter()
        .map(|s| serint_core::expr::parse(s).unwrap())
        .collect()
}
