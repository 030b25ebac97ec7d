//! Truncated Taylor series ("jets") at a point.
//!
//! A jet of order `n` at `x0` holds `c_0..c_n` with `c_i = f^(i)(x0) / i!`.
//! Lifting the expression evaluator to jets yields every derivative up to
//! order `n` in O(n^2) scalar operations. Elementary functions use the usual
//! first-order ODE recurrences, e.g. for `b = exp(a)`:
//! `b_k = (1/k) * sum_{j=1..k} j a_j b_{k-j}`.

use crate::error::{DomainError, Error, Result};
use crate::expr::{Expr, Func};
use crate::numeric::{factorial, PrecisionContext, Scalar};

/// Orders above this need [`derivatives_at_with_limit`].
pub const DEFAULT_MAX_ORDER: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    x0: Scalar,
    coeffs: Vec<Scalar>,
}

fn inv(k: usize) -> Scalar {
    Scalar::ratio(1, k as i64).expect("k > 0")
}

fn ix(k: usize) -> Scalar {
    Scalar::from_int(k as i64)
}

impl Jet {
    /// Builds a jet from Taylor coefficients; `coeffs` must be nonempty.
    pub fn new(x0: Scalar, coeffs: Vec<Scalar>) -> Jet {
        assert!(!coeffs.is_empty(), "a jet has at least one coefficient");
        Jet { x0, coeffs }
    }

    pub fn constant(x0: &Scalar, c: Scalar, order: usize) -> Jet {
        let mut coeffs = vec![Scalar::zero(); order + 1];
        coeffs[0] = c;
        Jet::new(x0.clone(), coeffs)
    }

    pub fn x0(&self) -> &Scalar {
        &self.x0
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn value(&self) -> &Scalar {
        &self.coeffs[0]
    }

    /// The same jet at a lower order.
    pub fn truncate(&self, order: usize) -> Jet {
        let n = order.min(self.order());
        Jet::new(self.x0.clone(), self.coeffs[..=n].to_vec())
    }

    /// Raw derivatives `i! * c_i`.
    pub fn derivatives(&self) -> Vec<Scalar> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.mul(&Scalar::from(factorial(i as u32))))
            .collect()
    }

    fn with(&self, coeffs: Vec<Scalar>) -> Jet {
        Jet::new(self.x0.clone(), coeffs)
    }

    fn check(&self, other: &Jet) {
        assert_eq!(self.order(), other.order(), "jet orders differ");
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.check(other);
        self.with(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.check(other);
        self.with(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    pub fn neg(&self) -> Jet {
        self.with(self.coeffs.iter().map(Scalar::neg).collect())
    }

    pub fn scale(&self, s: &Scalar) -> Jet {
        self.with(self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Jet) -> Jet {
        self.check(other);
        let n = self.order();
        let coeffs = (0..=n)
            .map(|k| {
                (0..=k).fold(Scalar::zero(), |acc, j| {
                    acc.add(&self.coeffs[j].mul(&other.coeffs[k - j]))
                })
            })
            .collect();
        self.with(coeffs)
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        self.check(other);
        let b0 = &other.coeffs[0];
        if b0.is_zero() {
            return Err(DomainError::DivisionByZero.into());
        }
        let mut q: Vec<Scalar> = Vec::with_capacity(self.coeffs.len());
        for k in 0..=self.order() {
            let mut acc = self.coeffs[k].clone();
            for j in 1..=k {
                acc = acc.sub(&other.coeffs[j].mul(&q[k - j]));
            }
            q.push(acc.div(b0)?);
        }
        Ok(self.with(q))
    }

    pub fn exp(&self, ctx: &PrecisionContext) -> Result<Jet> {
        let a = &self.coeffs;
        let mut b = vec![a[0].exp(ctx)?];
        for k in 1..=self.order() {
            let s = (1..=k).fold(Scalar::zero(), |acc, j| {
                acc.add(&ix(j).mul(&a[j]).mul(&b[k - j]))
            });
            b.push(s.mul(&inv(k)));
        }
        Ok(self.with(b))
    }

    pub fn ln(&self, ctx: &PrecisionContext) -> Result<Jet> {
        let a = &self.coeffs;
        if a[0].signum() <= 0 {
            return Err(DomainError::LnNonPositive.into());
        }
        let mut b = vec![a[0].ln(ctx)?];
        for k in 1..=self.order() {
            let s = (1..k).fold(Scalar::zero(), |acc, j| {
                acc.add(&ix(j).mul(&b[j]).mul(&a[k - j]))
            });
            b.push(a[k].sub(&s.mul(&inv(k))).div(&a[0])?);
        }
        Ok(self.with(b))
    }

    /// `(sin a, cos a)`, computed together since each recurrence needs the other.
    pub fn sin_cos(&self, ctx: &PrecisionContext) -> Result<(Jet, Jet)> {
        let a = &self.coeffs;
        let mut s = vec![a[0].sin(ctx)?];
        let mut c = vec![a[0].cos(ctx)?];
        for k in 1..=self.order() {
            let (mut ss, mut cc) = (Scalar::zero(), Scalar::zero());
            for j in 1..=k {
                let ja = ix(j).mul(&a[j]);
                ss = ss.add(&ja.mul(&c[k - j]));
                cc = cc.add(&ja.mul(&s[k - j]));
            }
            s.push(ss.mul(&inv(k)));
            c.push(cc.mul(&inv(k)).neg());
        }
        Ok((self.with(s), self.with(c)))
    }

    /// Integer power by repeated squaring; negative powers divide.
    pub fn pow_int(&self, k: i64) -> Result<Jet> {
        let one = Jet::constant(&self.x0, Scalar::one(), self.order());
        let mut result = one.clone();
        let mut base = self.clone();
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if k < 0 {
            one.div(&result)
        } else {
            Ok(result)
        }
    }

    /// `a^r` for a constant exponent `r`; needs `a_0 > 0` unless `r` is an integer.
    pub fn pow_real(&self, r: &Scalar, ctx: &PrecisionContext) -> Result<Jet> {
        if let Some(k) = r.as_integer().and_then(|k| i64::try_from(k).ok()) {
            return self.pow_int(k);
        }
        let a = &self.coeffs;
        if a[0].signum() <= 0 {
            if self.order() == 0 {
                return Ok(self.with(vec![a[0].pow(r, ctx)?]));
            }
            return Err(DomainError::PowNegativeBase.into());
        }
        let r1 = r.add(&Scalar::one());
        let mut b = vec![a[0].pow(r, ctx)?];
        for k in 1..=self.order() {
            let s = (1..=k).fold(Scalar::zero(), |acc, j| {
                let w = r1.mul(&ix(j)).sub(&ix(k));
                acc.add(&w.mul(&a[j]).mul(&b[k - j]))
            });
            b.push(s.div(&ix(k).mul(&a[0]))?);
        }
        Ok(self.with(b))
    }

    /// `a^g` for a jet exponent, as `exp(g ln a)`.
    pub fn pow(&self, g: &Jet, ctx: &PrecisionContext) -> Result<Jet> {
        if self.coeffs[0].signum() <= 0 {
            return Err(DomainError::PowNegativeBase.into());
        }
        g.mul(&self.ln(ctx)?).exp(ctx)
    }
}

/// The jet of `x` itself: `[x0, 1, 0, ...]`.
pub fn variable_jet(x0: &Scalar, order: usize) -> Jet {
    let mut coeffs = vec![Scalar::zero(); order + 1];
    coeffs[0] = x0.clone();
    if order >= 1 {
        coeffs[1] = Scalar::one();
    }
    Jet::new(x0.clone(), coeffs)
}

/// Lifts `e` to a jet of the given order at `x0`.
pub fn lift(e: &Expr, x0: &Scalar, order: usize, ctx: &PrecisionContext) -> Result<Jet> {
    let rec = |a: &Expr| lift(a, x0, order, ctx);
    Ok(match e {
        Expr::Const(c) => Jet::constant(x0, c.clone(), order),
        Expr::Var => variable_jet(x0, order),
        Expr::Add(a, b) => rec(a)?.add(&rec(b)?),
        Expr::Mul(a, b) => rec(a)?.mul(&rec(b)?),
        Expr::Div(a, b) => rec(a)?.div(&rec(b)?)?,
        Expr::Neg(a) => rec(a)?.neg(),
        Expr::Pow(a, b) => {
            let base = rec(a)?;
            if b.contains_var() {
                base.pow(&rec(b)?, ctx)?
            } else {
                base.pow_real(&b.eval(x0, ctx)?, ctx)?
            }
        }
        Expr::Apply(f, a) => {
            let inner = rec(a)?;
            match f {
                Func::Exp => inner.exp(ctx)?,
                Func::Ln => inner.ln(ctx)?,
                Func::Sin => inner.sin_cos(ctx)?.0,
                Func::Cos => inner.sin_cos(ctx)?.1,
            }
        }
    })
}

/// `[f(x0), f'(x0), ..., f^(n)(x0)]`, with `n` capped at [`DEFAULT_MAX_ORDER`].
pub fn derivatives_at(
    e: &Expr,
    x0: &Scalar,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<Scalar>> {
    derivatives_at_with_limit(e, x0, n, DEFAULT_MAX_ORDER, ctx)
}

pub fn derivatives_at_with_limit(
    e: &Expr,
    x0: &Scalar,
    n: usize,
    limit: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<Scalar>> {
    if n > limit {
        return Err(Error::InvalidArgument(format!(
            "jet order {n} exceeds the limit {limit}"
        )));
    }
    Ok(lift(e, x0, n, ctx)?.derivatives())
}
