mod common;

use common::{close, corpus, lit};
use proptest::prelude::*;
use serint_core::definite::{adaptive_quadrature, QuadratureConfig};
use serint_core::expr::{derivative_chain, differentiate, parse, Expr};
use serint_core::numeric::{factorial, PrecisionContext, Scalar};
use serint_core::series::{
    lemma1_terms, partial_sum_derivative_residual, theorem1_series, theorem1_symbolic,
    AntiderivativeFamily, ConvergencePolicy, Status,
};

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn grid() -> Vec<Scalar> {
    ["-3/2", "-1/3", "1/4", "1", "7/5", "2", "5/2"]
        .iter()
        .map(|s| lit(s))
        .collect()
}

#[test]
fn telescoping_residual_matches_boundary_term() {
    let c = ctx();
    for f in corpus() {
        for x0 in grid() {
            for n in 0..=20 {
                let r = partial_sum_derivative_residual(&f, &x0, n, &c).unwrap();
                if f.is_rational_function() {
                    assert_eq!(r.residual, r.predicted, "{f} at {x0}, n = {n}");
                } else {
                    assert!(
                        close(&r.residual, &r.predicted, &lit("1e-20"), &Scalar::zero()),
                        "{f} at {x0}, n = {n}: {} vs {}",
                        r.residual,
                        r.predicted
                    );
                }
            }
        }
    }
}

#[test]
fn series_vanishes_at_origin() {
    let c = ctx();
    for f in corpus()
        .into_iter()
        .chain([parse("1/x").unwrap(), parse("ln(x)").unwrap()])
    {
        let out = theorem1_series(&f, &Scalar::zero(), &Default::default(), &c).unwrap();
        assert_eq!(out.status, Status::Terminated);
        assert_eq!(out.value, Scalar::zero());
    }
}

#[test]
fn lemma_with_identity_reproduces_theorem_terms() {
    let c = ctx();
    let extra = ["1/x", "e^x / x", "1/(1 - x)", "x^(1/2)"].map(|s| parse(s).unwrap());
    for f in corpus().into_iter().chain(extra) {
        for x0 in ["1/2", "2", "10"].map(lit) {
            let t = theorem1_series(&f, &x0, &Default::default(), &c).unwrap();
            let l = lemma1_terms(
                &f,
                &AntiderivativeFamily::Power(1),
                &x0,
                &Default::default(),
                &c,
            )
            .unwrap();
            assert_eq!(t.terms, l.terms, "{f} at {x0}");
            assert_eq!(t.status, l.status);
            assert_eq!(t.value, l.value);
        }
    }
}

#[test]
fn polynomials_terminate_at_their_degree() {
    let c = ctx();
    for (text, degree) in [
        ("x", 1),
        ("x^2", 2),
        ("3*x^3 - 2*x + 1", 3),
        ("x^5 - x^4/2", 5),
        ("(x + 1)^4", 4),
        ("7", 0),
    ] {
        let f = parse(text).unwrap();
        for k in 1..=20 {
            let x0 = Scalar::ratio(k * 3 - 31, 7).unwrap();
            let out = theorem1_series(&f, &x0, &Default::default(), &c).unwrap();
            assert_eq!(out.status, Status::Terminated);
            assert_eq!(out.stop_index, degree, "{text}");
            // oracle: exact integral from 0 by Simpson on a polynomial
            let exact =
                adaptive_quadrature(&f, &Scalar::zero(), &x0, &QuadratureConfig::default(), &c)
                    .unwrap();
            if degree <= 3 {
                assert_eq!(out.value, exact, "{text} at {x0}");
            } else {
                assert!(close(&out.value, &exact, &lit("1e-12"), &Scalar::one()));
            }
            // termination soundness
            let chain = derivative_chain(&f, degree + 1).unwrap();
            assert!(chain[degree + 1].is_zero());
            let back = differentiate(&theorem1_symbolic(&f, degree).unwrap());
            assert_eq!(back.eval(&x0, &c).unwrap(), f.eval(&x0, &c).unwrap());
        }
    }
}

#[test]
fn converged_values_match_quadrature() {
    let c = ctx();
    let cfg = QuadratureConfig::default();
    for f in corpus() {
        if f.polynomial_degree().is_some() {
            continue;
        }
        for x0 in ["1/2", "1", "2", "-1"].map(lit) {
            let out = theorem1_series(&f, &x0, &Default::default(), &c).unwrap();
            assert_eq!(out.status, Status::Converged, "{f} at {x0}");
            let oracle = adaptive_quadrature(&f, &Scalar::zero(), &x0, &cfg, &c).unwrap();
            let ten_err = out.error_estimate.mul(&Scalar::from_int(10));
            let tol = if ten_err.cmp_value(&lit("1e-12")).is_gt() {
                ten_err
            } else {
                lit("1e-12")
            };
            let diff = out.value.sub(&oracle).abs();
            assert!(diff.cmp_value(&tol).is_le(), "{f} at {x0}: {diff}");
        }
    }
}

fn reciprocal_power(n: i64) -> Expr {
    Expr::div(Expr::int(1), Expr::pow(Expr::Var, Expr::int(n)))
}

#[test]
fn divergent_examples_are_classified() {
    let c = ctx();
    let v = AntiderivativeFamily::ExpScaled(Scalar::one());
    for n in 1..=3 {
        for x0 in ["1/2", "1", "2", "3", "5", "10", "20"].map(lit) {
            let out = lemma1_terms(&reciprocal_power(n), &v, &x0, &Default::default(), &c).unwrap();
            assert_eq!(out.status, Status::Diverged, "n = {n} at {x0}");
            // closed form e^x (n-1+i)!/((n-1)! x^{i+n}) with e^x factored out
            for t in &out.terms {
                let i = t.index as u32;
                let want = Scalar::from(factorial(n as u32 - 1 + i))
                    .div(&Scalar::from(factorial(n as u32 - 1)))
                    .unwrap()
                    .div(&x0.pow_int(i as i64 + n).unwrap())
                    .unwrap();
                assert_eq!(t.cofactor.as_ref(), Some(&want));
            }
        }
    }
}

#[test]
fn exponential_converges_to_closed_form() {
    let c = ctx();
    for x0 in ["1/2", "1", "2", "5", "-3"].map(lit) {
        let out = theorem1_series(&parse("exp(x)").unwrap(), &x0, &Default::default(), &c).unwrap();
        assert_eq!(out.status, Status::Converged);
        assert!(out.terms.len() <= 60);
        let want = x0.exp(&c).unwrap().sub(&Scalar::one());
        assert!(out.value.sub(&want).cmp_abs(&lit("1e-12")).is_le(), "{x0}");
    }
}

#[test]
fn term_budget_is_honoured() {
    let c = ctx();
    let policy = ConvergencePolicy {
        max_terms: 12,
        ..Default::default()
    };
    let out = theorem1_series(&parse("exp(x)").unwrap(), &lit("3"), &policy, &c).unwrap();
    assert_eq!(out.status, Status::Inconclusive);
    assert_eq!(out.stop_index, 11);
    assert_eq!(out.terms.len(), 13);
    assert_eq!(out.error_estimate, out.terms[12].value.abs());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symbolic_terms_evaluate_to_term_values(k in 0usize..25, x in 1i64..=12, n in 1usize..6) {
        let c = ctx();
        let f = corpus()[k].clone();
        let x0 = Scalar::ratio(x, 4).unwrap();
        let mut out = theorem1_series(&f, &x0, &Default::default(), &c).unwrap();
        let sym = serint_core::series::lemma1_symbolic_terms(&f, &AntiderivativeFamily::Power(1), n).unwrap();
        out.attach_symbolic(sym);
        for t in out.terms.iter().filter(|t| t.symbolic.is_some()) {
            let s = t.symbolic.as_ref().unwrap().eval(&x0, &c).unwrap();
            prop_assert!(close(&s, &t.value, &lit("1e-30"), &lit("1e-30")), "{} vs {}", s, t.value);
        }
    }
}
