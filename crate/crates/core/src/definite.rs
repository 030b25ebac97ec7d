//! Definite integrals from the derivative series, checked against an
//! independent adaptive Simpson quadrature.
//!
//! The series value on `[a, b]` is the difference of the two endpoint
//! antiderivative series. That difference is only the integral when the
//! series is a valid antiderivative on the whole interval; for `1/x` on
//! `[1, 2]` every term cancels and the series reports 0. [`cross_validate`]
//! surfaces such cases as [`Verdict::Disagrees`].

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numeric::{PrecisionContext, Scalar};
use crate::series::{
    partial_expansion, run_series, theorem1_term, AntiderivativeFamily, ConvergencePolicy,
    DerivativeStream, SeriesOutcome, Status, TermRecord,
};

#[derive(Debug, Clone)]
pub struct DefiniteRequest {
    pub f: Expr,
    pub a: Scalar,
    pub b: Scalar,
    pub policy: ConvergencePolicy,
    pub oracle_tol: Scalar,
}

impl DefiniteRequest {
    pub fn new(f: Expr, a: Scalar, b: Scalar) -> Self {
        DefiniteRequest {
            f,
            a,
            b,
            policy: ConvergencePolicy::default(),
            oracle_tol: Scalar::from_literal("1e-12").expect("literal"),
        }
    }

    /// `(lo, hi, flipped)` with `lo <= hi`.
    fn normalized(&self) -> (Scalar, Scalar, bool) {
        if self.a.cmp_value(&self.b) == Ordering::Greater {
            (self.b.clone(), self.a.clone(), true)
        } else {
            (self.a.clone(), self.b.clone(), false)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Agrees,
    Disagrees,
    SeriesFailed,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Agrees => "Agrees",
            Verdict::Disagrees => "Disagrees",
            Verdict::SeriesFailed => "SeriesFailed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DefiniteOutcome {
    pub series: SeriesOutcome,
    pub oracle_value: Scalar,
    pub abs_diff: Scalar,
    pub verdict: Verdict,
}

impl DefiniteOutcome {
    pub fn series_value(&self) -> &Scalar {
        &self.series.value
    }

    pub fn series_status(&self) -> Status {
        self.series.status
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    pub tol: Scalar,
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            tol: Scalar::from_literal("1e-12").expect("literal"),
            max_depth: 60,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(tol: Scalar) -> Self {
        QuadratureConfig {
            tol,
            ..Default::default()
        }
    }
}

/// `(-1)^i (b^{i+1} f^(i)(b) - a^{i+1} f^(i)(a)) / (i+1)!`. A zero endpoint
/// contributes nothing and its derivative vector may be empty.
pub fn theorem2_term(
    i: usize,
    derivs_a: &[Scalar],
    derivs_b: &[Scalar],
    a: &Scalar,
    b: &Scalar,
) -> Scalar {
    let at = |d: &[Scalar], x: &Scalar| {
        if x.is_zero() {
            Scalar::zero()
        } else {
            theorem1_term(i, d, x)
        }
    };
    at(derivs_b, b).sub(&at(derivs_a, a))
}

/// The series for `∫_a^b f` under the request's policy. Reversed intervals
/// are evaluated forwards and negated.
pub fn theorem2_series(req: &DefiniteRequest, ctx: &PrecisionContext) -> Result<SeriesOutcome> {
    let (lo, hi, flipped) = req.normalized();
    let limit = req.policy.max_terms + 2;
    let mut da = DerivativeStream::new(&req.f, &lo, limit, ctx);
    let mut db = DerivativeStream::new(&req.f, &hi, limit, ctx);
    let next = |i: usize| -> Result<TermRecord> {
        let at = |s: &mut DerivativeStream, x: &Scalar| -> Result<Scalar> {
            if x.is_zero() {
                return Ok(Scalar::zero());
            }
            let mut d = vec![Scalar::zero(); i + 1];
            d[i] = s.get(i)?;
            Ok(theorem1_term(i, &d, x))
        };
        let value = at(&mut db, &hi)?.sub(&at(&mut da, &lo)?);
        Ok(TermRecord {
            index: i,
            value: if flipped { value.neg() } else { value },
            symbolic: None,
            cofactor: None,
        })
    };
    run_series(
        next,
        req.f.polynomial_degree().map(|d| d as usize),
        &req.policy,
    )
}

struct Simpson<'a> {
    f: &'a Expr,
    ctx: &'a PrecisionContext,
    max_depth: u32,
    min_depth: u32,
}

impl Simpson<'_> {
    fn eval(&self, x: &Scalar) -> Result<Scalar> {
        self.f.eval(x, self.ctx)
    }

    fn rule(a: &Scalar, b: &Scalar, fa: &Scalar, fm: &Scalar, fb: &Scalar) -> Scalar {
        let sum = fa.add(&fm.mul(&Scalar::from_int(4))).add(fb);
        b.sub(a)
            .mul(&sum)
            .mul(&Scalar::ratio(1, 6).expect("literal"))
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &self,
        a: &Scalar,
        b: &Scalar,
        fa: &Scalar,
        fm: &Scalar,
        fb: &Scalar,
        whole: &Scalar,
        tol: &Scalar,
        depth: u32,
    ) -> Result<Scalar> {
        let half = Scalar::ratio(1, 2).expect("literal");
        let m = a.add(b).mul(&half);
        let lm = a.add(&m).mul(&half);
        let rm = m.add(b).mul(&half);
        let flm = self.eval(&lm)?;
        let frm = self.eval(&rm)?;
        let left = Self::rule(a, &m, fa, &flm, fm);
        let right = Self::rule(&m, b, fm, &frm, fb);
        let delta = left.add(&right).sub(whole);
        let fifteen = Scalar::from_int(15);
        if depth >= self.min_depth && delta.cmp_abs(&tol.mul(&fifteen)) != Ordering::Greater {
            // Richardson: the two-panel estimate's leading error is delta/15
            return Ok(left.add(&right).add(&delta.div(&fifteen)?));
        }
        if depth >= self.max_depth {
            return Err(Error::MaxDepthExceeded(self.max_depth));
        }
        let sub_tol = tol.mul(&half);
        let l = self.recurse(a, &m, fa, &flm, fm, &left, &sub_tol, depth + 1)?;
        let r = self.recurse(&m, b, fm, &frm, fb, &right, &sub_tol, depth + 1)?;
        Ok(l.add(&r))
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`. Polynomials on rational
/// endpoints are integrated in exact arithmetic; everything else at the
/// context precision.
pub fn adaptive_quadrature(
    f: &Expr,
    a: &Scalar,
    b: &Scalar,
    cfg: &QuadratureConfig,
    ctx: &PrecisionContext,
) -> Result<Scalar> {
    if cfg.tol.signum() <= 0 {
        return Err(Error::InvalidArgument(
            "quadrature tolerance must be positive".into(),
        ));
    }
    if a.value_eq(b) {
        return Ok(Scalar::zero());
    }
    if a.cmp_value(b) == Ordering::Greater {
        return Ok(adaptive_quadrature(f, b, a, cfg, ctx)?.neg());
    }
    let exact = f.polynomial_degree().is_some() && a.is_rational() && b.is_rational();
    let (a, b) = if exact {
        (a.clone(), b.clone())
    } else {
        (a.to_float(ctx), b.to_float(ctx))
    };
    let s = Simpson {
        f,
        ctx,
        max_depth: cfg.max_depth,
        min_depth: 3.min(cfg.max_depth),
    };
    let m = a.add(&b).mul(&Scalar::ratio(1, 2).expect("literal"));
    let (fa, fm, fb) = (s.eval(&a)?, s.eval(&m)?, s.eval(&b)?);
    let whole = Simpson::rule(&a, &b, &fa, &fm, &fb);
    s.recurse(&a, &b, &fa, &fm, &fb, &whole, &cfg.tol, 0)
}

/// Runs the series and the quadrature oracle and classifies their agreement.
pub fn cross_validate(req: &DefiniteRequest, ctx: &PrecisionContext) -> Result<DefiniteOutcome> {
    let series = theorem2_series(req, ctx)?;
    let oracle_value = adaptive_quadrature(
        &req.f,
        &req.a,
        &req.b,
        &QuadratureConfig::with_tol(req.oracle_tol.clone()),
        ctx,
    )?;
    let abs_diff = series.value.sub(&oracle_value).abs();
    let ten = Scalar::from_int(10);
    let oracle_bound = req.oracle_tol.mul(&ten);
    let series_bound = series.error_estimate.mul(&ten);
    let bound = if oracle_bound.cmp_value(&series_bound) == Ordering::Less {
        series_bound
    } else {
        oracle_bound
    };
    let verdict = if !series.status.is_success() {
        Verdict::SeriesFailed
    } else if abs_diff.cmp_value(&bound) == Ordering::Greater {
        Verdict::Disagrees
    } else {
        Verdict::Agrees
    };
    Ok(DefiniteOutcome {
        series,
        oracle_value,
        abs_diff,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialExpansionCheck {
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub abs_diff: Scalar,
}

/// Numerically checks the finite-n integration-by-parts identity on `[a, b]`:
/// `∫ u v' = [Σ_{i<n} (-1)^i u^(i) V^(i)]_a^b + (-1)^n ∫ u^(n) V^(n-1)`.
pub fn verify_partial_expansion(
    u: &Expr,
    v: &AntiderivativeFamily,
    n: usize,
    a: &Scalar,
    b: &Scalar,
    cfg: &QuadratureConfig,
    ctx: &PrecisionContext,
) -> Result<PartialExpansionCheck> {
    let pe = partial_expansion(u, v, n)?;
    let integrand = crate::expr::simplify(&Expr::mul(u.clone(), v.dv_expr()));
    let lhs = adaptive_quadrature(&integrand, a, b, cfg, ctx)?;
    let mut boundary = Scalar::zero();
    for term in &pe.boundary {
        boundary = boundary.add(&term.eval(b, ctx)?.sub(&term.eval(a, ctx)?));
    }
    let rhs = boundary.add(&adaptive_quadrature(
        &pe.remainder_integrand,
        a,
        b,
        cfg,
        ctx,
    )?);
    let abs_diff = lhs.sub(&rhs).abs();
    Ok(PartialExpansionCheck { lhs, rhs, abs_diff })
}
