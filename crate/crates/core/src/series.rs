//! Derivative-series antiderivatives.
//!
//! Iterated integration by parts gives
//!
//! ```text
//! ∫ u dv = Σ_{i≥0} (-1)^i u^(i) V^(i)
//! ```
//!
//! where `V^(i)` is the i-fold antiderivative of `v` with every integration
//! constant zero. With `v = x` this becomes
//! `∫ f dx = Σ (-1)^i f^(i)(x) x^{i+1} / (i+1)!`, whose terms all vanish at
//! `x = 0`; a convergent sum is therefore the antiderivative `∫_0^x f`.
//!
//! Series are generated lazily and stopped by [`ConvergencePolicy`]:
//! exact termination for polynomials, two consecutive terms under tolerance,
//! sustained growth or a divergent one-signed tail, or the term budget.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::expr::{derivative_chain, simplify, Expr, Func};
use crate::jet::{derivatives_at_with_limit, lift, variable_jet, DEFAULT_MAX_ORDER};
use crate::numeric::{factorial, PrecisionContext, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Terminated,
    Converged,
    Diverged,
    Inconclusive,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Terminated => "Terminated",
            Status::Converged => "Converged",
            Status::Diverged => "Diverged",
            Status::Inconclusive => "Inconclusive",
        }
    }

    pub fn is_success(self) -> bool {
        matches!(self, Status::Terminated | Status::Converged)
    }
}

#[derive(Debug, Clone)]
pub struct ConvergencePolicy {
    pub tol_abs: Scalar,
    pub tol_rel: Scalar,
    pub max_terms: usize,
    /// Number of consecutive indices a divergence pattern must persist.
    pub divergence_window: usize,
    /// Report a diverged series at its smallest term instead of its last.
    pub allow_optimal_truncation: bool,
}

impl Default for ConvergencePolicy {
    fn default() -> Self {
        ConvergencePolicy {
            tol_abs: Scalar::from_literal("1e-12").expect("literal"),
            tol_rel: Scalar::zero(),
            max_terms: 200,
            divergence_window: 8,
            allow_optimal_truncation: true,
        }
    }
}

impl ConvergencePolicy {
    pub fn validate(&self) -> Result<()> {
        if self.tol_abs.signum() < 0 || self.tol_rel.signum() < 0 {
            return Err(Error::InvalidArgument(
                "tolerances must be nonnegative".into(),
            ));
        }
        if self.tol_abs.is_zero() && self.tol_rel.is_zero() {
            return Err(Error::InvalidArgument(
                "at least one of tol_abs, tol_rel must be positive".into(),
            ));
        }
        if self.max_terms == 0 || self.divergence_window == 0 {
            return Err(Error::InvalidArgument(
                "max_terms and the divergence window must be positive".into(),
            ));
        }
        if self.divergence_window >= self.max_terms {
            return Err(Error::InvalidArgument(
                "the divergence window must be smaller than max_terms".into(),
            ));
        }
        Ok(())
    }

    fn tolerance(&self, partial_sum: &Scalar) -> Scalar {
        let rel = self.tol_rel.mul(&partial_sum.abs());
        max_scalar(&self.tol_abs, &rel)
    }
}

fn max_scalar(a: &Scalar, b: &Scalar) -> Scalar {
    if a.cmp_value(b) == Ordering::Less {
        b.clone()
    } else {
        a.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermRecord {
    pub index: usize,
    pub value: Scalar,
    pub symbolic: Option<Expr>,
    /// For `v = e^{cx}`: the term divided by `e^{c x0}`, exact when `u` is a
    /// rational function and `x0` is rational.
    pub cofactor: Option<Scalar>,
}

#[derive(Debug, Clone)]
pub struct SeriesOutcome {
    pub status: Status,
    /// Partial sum through `stop_index`.
    pub value: Scalar,
    /// `|t_{stop_index+1}|`.
    pub error_estimate: Scalar,
    /// Every generated term, including the one past `stop_index`.
    pub terms: Vec<TermRecord>,
    pub stop_index: usize,
    pub optimal_truncation: Option<usize>,
}

impl SeriesOutcome {
    /// Attaches `symbolic[i]` to term `i` for the leading terms.
    pub fn attach_symbolic(&mut self, symbolic: Vec<Expr>) {
        for (t, e) in self.terms.iter_mut().zip(symbolic) {
            t.symbolic = Some(e);
        }
    }
}

/// `v` in `∫ u dv`, restricted to families with closed-form iterated
/// antiderivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum AntiderivativeFamily {
    /// `e^{cx}`, `c ≠ 0`
    ExpScaled(Scalar),
    Sin,
    Cos,
    /// `x^k`
    Power(u32),
}

pub const SUPPORTED_FAMILIES: &str = "exp(c*x), sin, cos, x^k";

impl AntiderivativeFamily {
    pub fn exp_scaled(c: Scalar) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::UnsupportedIntegrand("exp(c*x) needs c != 0".into()));
        }
        Ok(AntiderivativeFamily::ExpScaled(c))
    }

    /// Reads `exp(c*x)`, `e^x`, `sin`, `cos`, `sin(x)`, `cos(x)`, `x`, `x^k`.
    pub fn from_text(text: &str) -> Result<Self> {
        let unsupported = || {
            Error::UnsupportedIntegrand(format!(
                "v = {text:?} is not supported; use one of {SUPPORTED_FAMILIES}"
            ))
        };
        match text.trim() {
            "sin" => return Ok(AntiderivativeFamily::Sin),
            "cos" => return Ok(AntiderivativeFamily::Cos),
            _ => {}
        }
        let e = simplify(&crate::expr::parse(text).map_err(|_| unsupported())?);
        match &e {
            Expr::Var => Ok(AntiderivativeFamily::Power(1)),
            Expr::Const(c) if c.is_rational() && c.value_eq(&Scalar::one()) => {
                Ok(AntiderivativeFamily::Power(0))
            }
            Expr::Pow(b, k) if **b == Expr::Var => {
                let k = k
                    .as_const()
                    .and_then(Scalar::as_integer)
                    .ok_or_else(unsupported)?;
                Ok(AntiderivativeFamily::Power(
                    u32::try_from(k).map_err(|_| unsupported())?,
                ))
            }
            Expr::Apply(Func::Sin, a) if **a == Expr::Var => Ok(AntiderivativeFamily::Sin),
            Expr::Apply(Func::Cos, a) if **a == Expr::Var => Ok(AntiderivativeFamily::Cos),
            Expr::Apply(Func::Exp, a) => match &**a {
                Expr::Var => Ok(AntiderivativeFamily::ExpScaled(Scalar::one())),
                Expr::Mul(c, x) if **x == Expr::Var => match &**c {
                    Expr::Const(c) => AntiderivativeFamily::exp_scaled(c.clone()),
                    _ => Err(unsupported()),
                },
                Expr::Div(x, d) if **x == Expr::Var => match &**d {
                    Expr::Const(d) => AntiderivativeFamily::exp_scaled(d.recip()?),
                    _ => Err(unsupported()),
                },
                _ => Err(unsupported()),
            },
            _ => Err(unsupported()),
        }
    }

    /// `v` itself.
    pub fn v_expr(&self) -> Expr {
        antiderivative_iterate(self, 0)
    }

    /// `v'`, the integrand factor in `∫ u v' dx`.
    pub fn dv_expr(&self) -> Expr {
        let e = match self {
            AntiderivativeFamily::ExpScaled(c) => Expr::mul(Expr::Const(c.clone()), self.v_expr()),
            AntiderivativeFamily::Sin => Expr::cos(Expr::Var),
            AntiderivativeFamily::Cos => Expr::neg(Expr::sin(Expr::Var)),
            AntiderivativeFamily::Power(0) => Expr::int(0),
            AntiderivativeFamily::Power(k) => Expr::mul(
                Expr::int(i64::from(*k)),
                Expr::pow(Expr::Var, Expr::int(i64::from(*k) - 1)),
            ),
        };
        simplify(&e)
    }
}

impl std::fmt::Display for AntiderivativeFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.v_expr())
    }
}

/// Quarter-period phase of `sin`/`cos` antiderivatives:
/// `V^(i) = sign * (sin | cos)(x)`.
fn trig_phase(v: &AntiderivativeFamily, i: usize) -> (i64, Func) {
    match (v, i % 4) {
        (AntiderivativeFamily::Sin, 0) => (1, Func::Sin),
        (AntiderivativeFamily::Sin, 1) => (-1, Func::Cos),
        (AntiderivativeFamily::Sin, 2) => (-1, Func::Sin),
        (AntiderivativeFamily::Sin, _) => (1, Func::Cos),
        (_, 0) => (1, Func::Cos),
        (_, 1) => (1, Func::Sin),
        (_, 2) => (-1, Func::Cos),
        (_, _) => (-1, Func::Sin),
    }
}

/// `k! / (k+i)!`
fn falling_ratio(k: u32, i: usize) -> Scalar {
    let num = Scalar::from(factorial(k));
    let den = Scalar::from(factorial(k + i as u32));
    num.div(&den).expect("factorials are positive")
}

/// Closed form of `V^(i)`, all integration constants zero.
pub fn antiderivative_iterate(v: &AntiderivativeFamily, i: usize) -> Expr {
    let e = match v {
        AntiderivativeFamily::ExpScaled(c) => {
            let scale = c.pow_int(i as i64).expect("c != 0");
            Expr::div(
                Expr::exp(Expr::mul(Expr::Const(c.clone()), Expr::Var)),
                Expr::Const(scale),
            )
        }
        AntiderivativeFamily::Power(k) => Expr::mul(
            Expr::Const(falling_ratio(*k, i)),
            Expr::pow(Expr::Var, Expr::int(i64::from(*k) + i as i64)),
        ),
        _ => {
            let (sign, f) = trig_phase(v, i);
            Expr::mul(Expr::int(sign), Expr::apply(f, Expr::Var))
        }
    };
    simplify(&e)
}

/// Numeric `V^(i)(x0)`, split as `rational part * shared factor` so that
/// `e^{c x0}` can be factored out of every term.
struct VFactors {
    v: AntiderivativeFamily,
    x0: Scalar,
    exp_factor: Option<Scalar>,
    sin: Option<Scalar>,
    cos: Option<Scalar>,
}

impl VFactors {
    fn new(v: &AntiderivativeFamily, x0: &Scalar, ctx: &PrecisionContext) -> Result<Self> {
        let mut out = VFactors {
            v: v.clone(),
            x0: x0.clone(),
            exp_factor: None,
            sin: None,
            cos: None,
        };
        match v {
            AntiderivativeFamily::ExpScaled(c) => out.exp_factor = Some(c.mul(x0).exp(ctx)?),
            AntiderivativeFamily::Sin | AntiderivativeFamily::Cos => {
                out.sin = Some(x0.sin(ctx)?);
                out.cos = Some(x0.cos(ctx)?);
            }
            AntiderivativeFamily::Power(_) => {}
        }
        Ok(out)
    }

    /// `V^(i)(x0)`, or for `e^{cx}` the cofactor `1/c^i`.
    fn scale(&self, i: usize) -> Scalar {
        match &self.v {
            AntiderivativeFamily::ExpScaled(c) => c.pow_int(-(i as i64)).expect("c != 0"),
            AntiderivativeFamily::Power(k) => self
                .x0
                .pow_int(i64::from(*k) + i as i64)
                .expect("nonnegative power")
                .mul(&falling_ratio(*k, i)),
            v => {
                let (sign, f) = trig_phase(v, i);
                let base = if f == Func::Sin { &self.sin } else { &self.cos };
                base.as_ref()
                    .expect("computed")
                    .mul(&Scalar::from_int(sign))
            }
        }
    }
}

fn alternate(i: usize, s: Scalar) -> Scalar {
    if i % 2 == 0 {
        s
    } else {
        s.neg()
    }
}

/// `(-1)^i u^(i)(x0) V^(i)(x0)`; `u_i` is the raw derivative.
fn lemma1_term(i: usize, u_i: &Scalar, factors: &VFactors) -> TermRecord {
    let core = alternate(i, u_i.mul(&factors.scale(i)));
    match &factors.exp_factor {
        Some(e) => TermRecord {
            index: i,
            value: core.mul(e),
            symbolic: None,
            cofactor: Some(core),
        },
        None => TermRecord {
            index: i,
            value: core,
            symbolic: None,
            cofactor: None,
        },
    }
}

/// `(-1)^i f^(i)(x0) x0^{i+1} / (i+1)!`.
pub fn theorem1_term(i: usize, derivs: &[Scalar], x0: &Scalar) -> Scalar {
    let factors = VFactors {
        v: AntiderivativeFamily::Power(1),
        x0: x0.clone(),
        exp_factor: None,
        sin: None,
        cos: None,
    };
    lemma1_term(i, &derivs[i], &factors).value
}

/// Raw derivatives of an expression at a point, recomputed at doubled jet
/// order whenever a higher derivative is requested.
pub(crate) struct DerivativeStream<'a> {
    e: &'a Expr,
    x0: Scalar,
    ctx: &'a PrecisionContext,
    limit: usize,
    cache: Vec<Scalar>,
}

impl<'a> DerivativeStream<'a> {
    pub(crate) fn new(e: &'a Expr, x0: &Scalar, limit: usize, ctx: &'a PrecisionContext) -> Self {
        DerivativeStream {
            e,
            x0: x0.clone(),
            ctx,
            limit: limit.max(DEFAULT_MAX_ORDER),
            cache: Vec::new(),
        }
    }

    pub(crate) fn get(&mut self, i: usize) -> Result<Scalar> {
        if i >= self.cache.len() {
            let order = (2 * self.cache.len()).max(16).max(i).min(self.limit).max(i);
            self.cache = derivatives_at_with_limit(self.e, &self.x0, order, self.limit, self.ctx)?;
        }
        Ok(self.cache[i].clone())
    }
}

fn ratio(hi: &Scalar, lo: &Scalar) -> Scalar {
    hi.abs().div(&lo.abs()).expect("nonzero")
}

/// Incremental stopping rules over a stream of term values.
struct Detector<'p> {
    policy: &'p ConvergencePolicy,
    terms: Vec<Scalar>,
    sums: Vec<Scalar>,
    growth_run: usize,
    last_growth_ratio: Option<Scalar>,
    raabe_run: usize,
}

enum Verdict {
    Converged(usize),
    Diverged,
}

impl<'p> Detector<'p> {
    fn new(policy: &'p ConvergencePolicy) -> Self {
        Detector {
            policy,
            terms: Vec::new(),
            sums: Vec::new(),
            growth_run: 0,
            last_growth_ratio: None,
            raabe_run: 0,
        }
    }

    fn push(&mut self, t: Scalar) -> Option<Verdict> {
        let sum = match self.sums.last() {
            Some(s) => s.add(&t),
            None => t.clone(),
        };
        self.terms.push(t);
        self.sums.push(sum);
        let i = self.terms.len() - 1;
        if i == 0 {
            return None;
        }
        let (prev, cur) = (&self.terms[i - 1], &self.terms[i]);
        let tol = self.policy.tolerance(&self.sums[i]);
        if prev.cmp_abs(&tol) != Ordering::Greater && cur.cmp_abs(&tol) != Ordering::Greater {
            return Some(Verdict::Converged(i));
        }

        // sustained growth whose ratio is not shrinking back below one
        if !prev.is_zero() && cur.cmp_abs(prev) == Ordering::Greater {
            let r = ratio(cur, prev);
            let slack = Scalar::one().add(&Scalar::from_literal("1e-12").expect("literal"));
            let keeps_pace = match &self.last_growth_ratio {
                Some(last) if self.growth_run > 0 => {
                    r.mul(&slack).cmp_value(last) != Ordering::Less
                }
                _ => true,
            };
            self.growth_run = if keeps_pace { self.growth_run + 1 } else { 1 };
            self.last_growth_ratio = Some(r);
        } else {
            self.growth_run = 0;
            self.last_growth_ratio = None;
        }

        // one-signed non-increasing tail with Raabe statistic
        // (i-1) (|t_{i-1}| / |t_i| - 1) <= 1: harmonic-like or constant terms
        let one_signed = cur.signum() != 0 && cur.signum() == prev.signum();
        let raabe_divergent = one_signed
            && cur.cmp_abs(prev) != Ordering::Greater
            && Scalar::from_int(i as i64 - 1)
                .mul(&ratio(prev, cur).sub(&Scalar::one()))
                .cmp_value(&Scalar::one())
                != Ordering::Greater;
        self.raabe_run = if raabe_divergent {
            self.raabe_run + 1
        } else {
            0
        };

        let k = self.policy.divergence_window;
        if self.growth_run >= k || self.raabe_run >= k {
            return Some(Verdict::Diverged);
        }
        None
    }
}

/// Index of the smallest |t_i| (earliest on ties) before the final strictly
/// growing run of the sequence.
pub fn optimal_truncation(terms: &[TermRecord]) -> usize {
    let values: Vec<Scalar> = terms.iter().map(|t| t.value.clone()).collect();
    optimal_index(&values)
}

fn optimal_index(values: &[Scalar]) -> usize {
    assert!(!values.is_empty(), "no terms");
    let mut onset = values.len() - 1;
    while onset > 0 && values[onset].cmp_abs(&values[onset - 1]) == Ordering::Greater {
        onset -= 1;
    }
    let mut best = 0;
    for i in 1..=onset {
        if values[i].cmp_abs(&values[best]) == Ordering::Less {
            best = i;
        }
    }
    best
}

/// Applies the stopping rules to a finished list of terms; `Inconclusive`
/// when none fires.
pub fn classify(terms: &[TermRecord], policy: &ConvergencePolicy) -> Status {
    let mut d = Detector::new(policy);
    for t in terms {
        match d.push(t.value.clone()) {
            Some(Verdict::Converged(_)) => return Status::Converged,
            Some(Verdict::Diverged) => return Status::Diverged,
            None => {}
        }
    }
    Status::Inconclusive
}

fn sum_through(terms: &[TermRecord], k: usize) -> Scalar {
    terms[..=k]
        .iter()
        .fold(Scalar::zero(), |acc, t| acc.add(&t.value))
}

/// Drives a term generator through the stopping rules. `degree` bounds the
/// last nonzero term when it is known symbolically.
pub(crate) fn run_series<F>(
    mut next: F,
    degree: Option<usize>,
    policy: &ConvergencePolicy,
) -> Result<SeriesOutcome>
where
    F: FnMut(usize) -> Result<TermRecord>,
{
    policy.validate()?;
    let mut terms = Vec::new();
    if let Some(d) = degree {
        for i in 0..=d {
            terms.push(next(i)?);
        }
        return Ok(SeriesOutcome {
            status: Status::Terminated,
            value: sum_through(&terms, d),
            error_estimate: Scalar::zero(),
            terms,
            stop_index: d,
            optimal_truncation: None,
        });
    }

    let mut detector = Detector::new(policy);
    for i in 0..policy.max_terms {
        let t = next(i)?;
        let verdict = detector.push(t.value.clone());
        terms.push(t);
        match verdict {
            Some(Verdict::Converged(stop)) => {
                let look = next(stop + 1)?;
                let error_estimate = look.value.abs();
                terms.push(look);
                return Ok(SeriesOutcome {
                    status: Status::Converged,
                    value: detector.sums[stop].clone(),
                    error_estimate,
                    terms,
                    stop_index: stop,
                    optimal_truncation: None,
                });
            }
            Some(Verdict::Diverged) => {
                let best = optimal_truncation(&terms);
                let stop = if policy.allow_optimal_truncation {
                    best
                } else {
                    i - 1
                };
                if stop + 1 == terms.len() {
                    terms.push(next(stop + 1)?);
                }
                return Ok(SeriesOutcome {
                    status: Status::Diverged,
                    value: detector.sums[stop].clone(),
                    error_estimate: terms[stop + 1].value.abs(),
                    terms,
                    stop_index: stop,
                    optimal_truncation: Some(best),
                });
            }
            None => {}
        }
    }
    let stop = policy.max_terms - 1;
    let look = next(stop + 1)?;
    let error_estimate = look.value.abs();
    terms.push(look);
    Ok(SeriesOutcome {
        status: Status::Inconclusive,
        value: detector.sums[stop].clone(),
        error_estimate,
        terms,
        stop_index: stop,
        optimal_truncation: None,
    })
}

fn polynomial_stop(u: &Expr) -> Option<usize> {
    u.polynomial_degree().map(|d| d as usize)
}

fn zero_anchor() -> SeriesOutcome {
    SeriesOutcome {
        status: Status::Terminated,
        value: Scalar::zero(),
        error_estimate: Scalar::zero(),
        terms: vec![TermRecord {
            index: 0,
            value: Scalar::zero(),
            symbolic: None,
            cofactor: None,
        }],
        stop_index: 0,
        optimal_truncation: None,
    }
}

/// Terms `(-1)^i u^(i)(x0) V^(i)(x0)` of `∫ u dv` at `x0`.
pub fn lemma1_terms(
    u: &Expr,
    v: &AntiderivativeFamily,
    x0: &Scalar,
    policy: &ConvergencePolicy,
    ctx: &PrecisionContext,
) -> Result<SeriesOutcome> {
    policy.validate()?;
    if let AntiderivativeFamily::ExpScaled(c) = v {
        if c.is_zero() {
            return Err(Error::UnsupportedIntegrand("exp(c*x) needs c != 0".into()));
        }
    }
    // every V^(i) of x^k, k >= 1, vanishes at 0
    if x0.is_zero() && matches!(v, AntiderivativeFamily::Power(k) if *k >= 1) {
        return Ok(zero_anchor());
    }
    let factors = VFactors::new(v, x0, ctx)?;
    let mut derivs = DerivativeStream::new(u, x0, policy.max_terms + 2, ctx);
    run_series(
        |i| Ok(lemma1_term(i, &derivs.get(i)?, &factors)),
        polynomial_stop(u),
        policy,
    )
}

/// `∫ f dx` at `x0` as `Σ (-1)^i f^(i)(x0) x0^{i+1}/(i+1)!`.
pub fn theorem1_series(
    f: &Expr,
    x0: &Scalar,
    policy: &ConvergencePolicy,
    ctx: &PrecisionContext,
) -> Result<SeriesOutcome> {
    lemma1_terms(f, &AntiderivativeFamily::Power(1), x0, policy, ctx)
}

/// The first `n` terms of the u-dv series as simplified expressions.
pub fn lemma1_symbolic_terms(u: &Expr, v: &AntiderivativeFamily, n: usize) -> Result<Vec<Expr>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let chain = derivative_chain(u, n - 1)?;
    Ok(chain
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let term = Expr::mul(d.clone(), antiderivative_iterate(v, i));
            simplify(&if i % 2 == 0 { term } else { Expr::neg(term) })
        })
        .collect())
}

/// `Σ_{i≤n} (-1)^i f^(i) x^{i+1}/(i+1)!`, simplified.
pub fn theorem1_symbolic(f: &Expr, n: usize) -> Result<Expr> {
    let terms = lemma1_symbolic_terms(f, &AntiderivativeFamily::Power(1), n + 1)?;
    let sum = terms
        .into_iter()
        .reduce(Expr::add)
        .expect("at least one term");
    Ok(simplify(&sum))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialExpansion {
    /// `(-1)^i u^(i) V^(i)` for `i < n`.
    pub boundary: Vec<Expr>,
    /// `(-1)^n u^(n) V^(n-1)`, integrated over `dx` to close the identity.
    pub remainder_integrand: Expr,
}

/// `∫ u dv = Σ_{i<n} (-1)^i u^(i) V^(i) + (-1)^n ∫ u^(n) V^(n-1) dx`.
pub fn partial_expansion(u: &Expr, v: &AntiderivativeFamily, n: usize) -> Result<PartialExpansion> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "partial expansion needs n >= 1".into(),
        ));
    }
    let boundary = lemma1_symbolic_terms(u, v, n)?;
    let chain = derivative_chain(u, n)?;
    let rem = Expr::mul(chain[n].clone(), antiderivative_iterate(v, n - 1));
    let remainder_integrand = simplify(&if n % 2 == 0 { rem } else { Expr::neg(rem) });
    Ok(PartialExpansion {
        boundary,
        remainder_integrand,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub residual: Scalar,
    pub predicted: Scalar,
}

/// Extra working precision for [`partial_sum_derivative_residual`]; the
/// derivative of the partial sum cancels down to a single small term.
const RESIDUAL_GUARD_BITS: usize = 128;

/// Differentiates the partial sum `S_n` at `x0` with order-1 jets and
/// compares `S_n'(x0) - f(x0)` against the surviving boundary term
/// `(-1)^n f^(n+1)(x0) x0^{n+1}/(n+1)!`.
pub fn partial_sum_derivative_residual(
    f: &Expr,
    x0: &Scalar,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<Residual> {
    let wide = PrecisionContext::new(ctx.float_bits() + RESIDUAL_GUARD_BITS)?;
    let x0 = if x0.is_rational() {
        x0.clone()
    } else {
        x0.to_float(&wide)
    };
    let d = lift(f, &x0, n + 1, &wide)?.derivatives();
    let x = variable_jet(&x0, 1);
    let mut slope = Scalar::zero();
    for i in 0..=n {
        // jet of f^(i) at order 1 is [f^(i), f^(i+1)]
        let fi = crate::jet::Jet::new(x0.clone(), vec![d[i].clone(), d[i + 1].clone()]);
        let weight = x
            .pow_int(i as i64 + 1)?
            .scale(&Scalar::one().div(&Scalar::from(factorial(i as u32 + 1)))?);
        let piece = fi.mul(&weight).coeffs()[1].clone();
        slope = slope.add(&alternate(i, piece));
    }
    let residual = slope.sub(&d[0]);
    let predicted = alternate(
        n,
        d[n + 1]
            .mul(&x0.pow_int(n as i64 + 1)?)
            .div(&Scalar::from(factorial(n as u32 + 1)))?,
    );
    Ok(Residual {
        residual: residual.round_to(ctx),
        predicted: predicted.round_to(ctx),
    })
}
