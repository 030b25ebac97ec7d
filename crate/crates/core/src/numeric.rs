//! Two-tier numeric tower: exact rationals with a big-float fallback.
//!
//! Every value flowing through the engine is a [`Scalar`]. Rational
//! arithmetic is exact; as soon as a transcendental function or a float
//! operand is involved the result becomes a [`Scalar::Float`] rounded to
//! nearest-even at the precision carried by the operands (or supplied by a
//! [`PrecisionContext`] when a new float is created).

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{DomainError, Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Default significand width for float computations.
pub const DEFAULT_FLOAT_BITS: usize = 128;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Precision used whenever a new float value is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    float_bits: usize,
}

impl PrecisionContext {
    pub fn new(float_bits: usize) -> Result<Self> {
        if float_bits < 53 {
            return Err(Error::InvalidArgument(format!(
                "float precision must be at least 53 bits, got {float_bits}"
            )));
        }
        Ok(PrecisionContext { float_bits })
    }

    pub fn float_bits(&self) -> usize {
        self.float_bits
    }

    /// Significant decimal digits that the precision supports, `ceil(bits * log10(2))`.
    pub fn decimal_digits(&self) -> usize {
        (self.float_bits as f64 * std::f64::consts::LOG10_2).ceil() as usize
    }

    /// π rounded at this precision.
    pub fn pi(&self) -> Scalar {
        Scalar::Float(with_consts(|cc| cc.pi(self.float_bits, RM)))
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            float_bits: DEFAULT_FLOAT_BITS,
        }
    }
}

/// Exact rational or rounded big float.
#[derive(Clone)]
pub enum Scalar {
    Rational(BigRational),
    Float(BigFloat),
}

/// Exact product `1 * 2 * ... * n`.
pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

fn float_prec(f: &BigFloat) -> usize {
    f.mantissa_max_bit_len().unwrap_or(DEFAULT_FLOAT_BITS)
}

fn check_finite(f: BigFloat) -> Result<Scalar> {
    if f.is_nan() || f.is_inf() {
        Err(Error::NonFinite)
    } else {
        Ok(Scalar::Float(f))
    }
}

/// Exact conversion of an integer into a float whose mantissa holds all of its bits.
fn bigint_to_float(n: &BigInt) -> BigFloat {
    if n.is_zero() {
        return BigFloat::from_word(0, 64);
    }
    let mag = n.magnitude();
    let bits = mag.bits();
    let words_len = bits.div_ceil(64);
    let shifted: BigUint = mag << (words_len * 64 - bits);
    let words = shifted.to_u64_digits();
    let sign = if n.is_negative() {
        Sign::Neg
    } else {
        Sign::Pos
    };
    BigFloat::from_words(&words, sign, bits as astro_float::Exponent)
}

fn rational_to_float(r: &BigRational, p: usize) -> BigFloat {
    let num = bigint_to_float(r.numer());
    if r.denom().is_one() {
        let mut out = num;
        // exact integers wider than p are rounded once here
        let _ = out.set_precision(p.max(64), RM);
        return out;
    }
    let den = bigint_to_float(r.denom());
    num.div(&den, p, RM)
}

fn float_to_rational(f: &BigFloat) -> BigRational {
    let Some((words, _, sign, exp, _)) = f.as_raw_parts() else {
        return BigRational::zero();
    };
    if f.is_zero() {
        return BigRational::zero();
    }
    let mut m = BigUint::zero();
    for w in words.iter().rev() {
        m = (m << 64u32) + BigUint::from(*w);
    }
    let shift = exp as i64 - (words.len() as i64 * 64);
    let mut r = BigRational::from_integer(BigInt::from(m));
    if shift >= 0 {
        r *= BigRational::from_integer(BigInt::one() << shift as u64);
    } else {
        r /= BigRational::from_integer(BigInt::one() << (-shift) as u64);
    }
    if sign == Sign::Neg {
        -r
    } else {
        r
    }
}

fn pow10(e: i64) -> BigRational {
    let p = BigInt::from(10u32).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

fn round_half_even(r: &BigRational) -> BigInt {
    let floor = r.floor().to_integer();
    let frac = r - BigRational::from_integer(floor.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    match frac.cmp(&half) {
        Ordering::Less => floor,
        Ordering::Greater => floor + 1,
        Ordering::Equal => {
            if floor.is_even() {
                floor
            } else {
                floor + 1
            }
        }
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::Rational(BigRational::from_integer(n))
    }

    /// `numer / denom` exactly.
    pub fn ratio(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::Rational(BigRational::new(
            numer.into(),
            denom.into(),
        )))
    }

    /// Float value rounded from an `f64` at the given precision.
    pub fn from_f64(v: f64, ctx: &PrecisionContext) -> Self {
        Scalar::Float(BigFloat::from_f64(v, ctx.float_bits()))
    }

    /// Parses a numeric literal exactly: `-3`, `3/2`, `0.125`, `1.5e-3`.
    pub fn from_literal(text: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a numeric literal: {text:?}"));
        let s = text.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest.trim_start()),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        if body.is_empty() {
            return Err(bad());
        }
        let value = if let Some((n, d)) = body.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            BigRational::new(n, d)
        } else {
            let (mantissa, exponent) = match body.find(['e', 'E']) {
                Some(i) => {
                    let e: i64 = body[i + 1..].parse().map_err(|_| bad())?;
                    (&body[..i], e)
                }
                None => (body, 0),
            };
            let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
            if int_part.is_empty() && frac_part.is_empty() {
                return Err(bad());
            }
            if !int_part
                .chars()
                .chain(frac_part.chars())
                .all(|c| c.is_ascii_digit())
            {
                return Err(bad());
            }
            let digits = format!("{int_part}{frac_part}");
            let n: BigInt = digits.parse().map_err(|_| bad())?;
            BigRational::from_integer(n) * pow10(exponent - frac_part.len() as i64)
        };
        Ok(Scalar::Rational(if neg { -value } else { value }))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Float(f) => f.is_zero(),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    /// The integer value, when this is an exact integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Scalar::Rational(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    /// Float precision, `None` for exact values.
    pub fn precision(&self) -> Option<usize> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::Float(f) => Some(float_prec(f)),
        }
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Rational(r) => {
                if r.is_zero() {
                    0
                } else if r.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Scalar::Float(f) => {
                if f.is_zero() {
                    0
                } else if f.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// Value as a float at `p` bits (rounded once for rationals).
    pub fn to_big_float(&self, p: usize) -> BigFloat {
        match self {
            Scalar::Rational(r) => rational_to_float(r, p),
            Scalar::Float(f) => {
                let mut g = f.clone();
                if float_prec(f) < p {
                    let _ = g.set_precision(p, RM);
                }
                g
            }
        }
    }

    /// Promotes to float at the context precision (no-op for floats at least that wide).
    pub fn to_float(&self, ctx: &PrecisionContext) -> Scalar {
        Scalar::Float(self.to_big_float(ctx.float_bits()))
    }

    /// Rounds floats wider than the context down to it; rationals are unchanged.
    pub fn round_to(&self, ctx: &PrecisionContext) -> Scalar {
        match self {
            Scalar::Float(f) if float_prec(f) > ctx.float_bits() => {
                let mut g = f.clone();
                let _ = g.set_precision(ctx.float_bits(), RM);
                Scalar::Float(g)
            }
            other => other.clone(),
        }
    }

    /// The exact rational value (floats are dyadic rationals).
    pub fn to_rational(&self) -> BigRational {
        match self {
            Scalar::Rational(r) => r.clone(),
            Scalar::Float(f) => float_to_rational(f),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(f) => {
                let r = float_to_rational(f);
                r.to_f64().unwrap_or(f64::NAN)
            }
        }
    }

    fn binary(
        &self,
        other: &Scalar,
        exact: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        float: impl FnOnce(&BigFloat, &BigFloat, usize) -> BigFloat,
    ) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(exact(a, b)),
            (Scalar::Float(a), Scalar::Float(b)) => {
                let p = float_prec(a).max(float_prec(b));
                Scalar::Float(float(a, b, p))
            }
            (Scalar::Float(a), Scalar::Rational(b)) => {
                let p = float_prec(a);
                Scalar::Float(float(a, &rational_to_float(b, p), p))
            }
            (Scalar::Rational(a), Scalar::Float(b)) => {
                let p = float_prec(b);
                Scalar::Float(float(&rational_to_float(a, p), b, p))
            }
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.binary(other, |a, b| a + b, |a, b, p| a.add(b, p, RM))
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.binary(other, |a, b| a - b, |a, b, p| a.sub(b, p, RM))
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.binary(other, |a, b| a * b, |a, b, p| a.mul(b, p, RM))
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.binary(other, |a, b| a / b, |a, b, p| a.div(b, p, RM)))
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Float(f) => Scalar::Float(f.neg()),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.abs()),
            Scalar::Float(f) => Scalar::Float(f.abs()),
        }
    }

    pub fn recip(&self) -> Result<Scalar> {
        Scalar::one().div(self)
    }

    /// Integer power; exact for rationals. Zero to a negative power is a division by zero.
    pub fn pow_int(&self, exponent: i64) -> Result<Scalar> {
        if exponent < 0 {
            return self.pow_int(-exponent)?.recip();
        }
        match self {
            Scalar::Rational(r) => Ok(Scalar::Rational(num_traits::pow::Pow::pow(
                r,
                exponent as u64,
            ))),
            Scalar::Float(f) => {
                let p = float_prec(f);
                let mut acc = BigFloat::from_word(1, p);
                let mut base = f.clone();
                let mut e = exponent as u64;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc.mul(&base, p, RM);
                    }
                    e >>= 1;
                    if e > 0 {
                        base = base.mul(&base, p, RM);
                    }
                }
                check_finite(acc)
            }
        }
    }

    /// Exact value comparison for rationals; float comparisons are exact on the
    /// stored values after rounding the rational side to the float's precision.
    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            _ => {
                let (a, b) = self.promote_pair(other);
                a.cmp(&b).map(|c| c.cmp(&0)).unwrap_or(Ordering::Equal)
            }
        }
    }

    /// Total order on magnitudes.
    pub fn cmp_abs(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.abs().cmp(&b.abs()),
            _ => {
                let (a, b) = self.promote_pair(other);
                a.abs()
                    .cmp(&b.abs())
                    .map(|c| c.cmp(&0))
                    .unwrap_or(Ordering::Equal)
            }
        }
    }

    fn promote_pair(&self, other: &Scalar) -> (BigFloat, BigFloat) {
        let p = self
            .precision()
            .unwrap_or(0)
            .max(other.precision().unwrap_or(0))
            .max(64);
        (self.to_big_float(p), other.to_big_float(p))
    }

    /// Numeric equality across variants (a float equals a rational when the
    /// rational rounds to it).
    pub fn value_eq(&self, other: &Scalar) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }

    fn float_arg(&self, ctx: &PrecisionContext) -> (BigFloat, usize) {
        let p = ctx.float_bits().max(self.precision().unwrap_or(0));
        (self.to_big_float(p), p)
    }

    pub fn exp(&self, ctx: &PrecisionContext) -> Result<Scalar> {
        if self.is_zero() && self.is_rational() {
            return Ok(Scalar::one());
        }
        let (x, p) = self.float_arg(ctx);
        check_finite(with_consts(|cc| x.exp(p, RM, cc)))
    }

    pub fn ln(&self, ctx: &PrecisionContext) -> Result<Scalar> {
        if self.signum() <= 0 {
            return Err(DomainError::LnNonPositive.into());
        }
        if let Scalar::Rational(r) = self {
            if r.is_one() {
                return Ok(Scalar::zero());
            }
        }
        let (x, p) = self.float_arg(ctx);
        check_finite(with_consts(|cc| x.ln(p, RM, cc)))
    }

    pub fn sin(&self, ctx: &PrecisionContext) -> Result<Scalar> {
        if self.is_zero() && self.is_rational() {
            return Ok(Scalar::zero());
        }
        let (x, p) = self.float_arg(ctx);
        check_finite(with_consts(|cc| x.sin(p, RM, cc)))
    }

    pub fn cos(&self, ctx: &PrecisionContext) -> Result<Scalar> {
        if self.is_zero() && self.is_rational() {
            return Ok(Scalar::one());
        }
        let (x, p) = self.float_arg(ctx);
        check_finite(with_consts(|cc| x.cos(p, RM, cc)))
    }

    /// `self ^ exponent` for arbitrary exponents. Integer exponents stay exact;
    /// otherwise the base must be positive (zero is allowed for positive exponents).
    pub fn pow(&self, exponent: &Scalar, ctx: &PrecisionContext) -> Result<Scalar> {
        if let Some(k) = exponent.as_integer() {
            let k = k.to_i64().ok_or(Error::NonFinite)?;
            return self.pow_int(k).map_err(|e| match e {
                Error::DivisionByZero => DomainError::DivisionByZero.into(),
                other => other,
            });
        }
        match self.signum() {
            1 => {}
            0 if exponent.signum() > 0 => return Ok(Scalar::zero()),
            0 => return Err(DomainError::DivisionByZero.into()),
            _ => return Err(DomainError::PowNegativeBase.into()),
        }
        // exp(y ln x) with guard bits; astro-float's own pow does not terminate
        // when the result is exactly representable (4^(1/2)).
        let (_, p) = self.float_arg(ctx);
        let wide = p + 64;
        let x = self.to_big_float(wide);
        let y = exponent.to_big_float(wide);
        let mut r = with_consts(|cc| x.ln(wide, RM, cc).mul(&y, wide, RM).exp(wide, RM, cc));
        let _ = r.set_precision(p, RM);
        check_finite(r)
    }

    /// Decimal rendering with `digits` significant digits, rounded half-even from
    /// the exact value, trailing zeros trimmed. Uses plain notation for moderate
    /// exponents and `d.ddde±N` otherwise.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        let r = self.to_rational();
        if r.is_zero() {
            return "0".to_string();
        }
        let neg = r.is_negative();
        let mag = r.abs();
        let ten = BigRational::from_integer(BigInt::from(10));
        let mut e = mag.numer().to_string().len() as i64 - mag.denom().to_string().len() as i64;
        while mag >= pow10(e + 1) {
            e += 1;
        }
        while mag < pow10(e) {
            e -= 1;
        }
        let mut n = round_half_even(&(&mag * pow10(digits as i64 - 1 - e)));
        if BigRational::from_integer(n.clone()) >= pow10(digits as i64) {
            n = round_half_even(&(BigRational::from_integer(n) / ten));
            e += 1;
        }
        let ds = n.to_string();
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        if (-7..40).contains(&e) {
            if e < 0 {
                out.push_str("0.");
                out.extend(std::iter::repeat('0').take((-e - 1) as usize));
                out.push_str(ds.trim_end_matches('0'));
            } else {
                let int_len = e as usize + 1;
                if ds.len() <= int_len {
                    out.push_str(&ds);
                    out.extend(std::iter::repeat('0').take(int_len - ds.len()));
                } else {
                    out.push_str(&ds[..int_len]);
                    let frac = ds[int_len..].trim_end_matches('0');
                    if !frac.is_empty() {
                        out.push('.');
                        out.push_str(frac);
                    }
                }
            }
        } else {
            out.push_str(&ds[..1]);
            let frac = ds[1..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
            out.push_str(&format!("e{e}"));
        }
        out
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural order: all rationals before all floats, then by value.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            (Scalar::Rational(_), Scalar::Float(_)) => Ordering::Less,
            (Scalar::Float(_), Scalar::Rational(_)) => Ordering::Greater,
            (Scalar::Float(a), Scalar::Float(b)) => {
                a.cmp(b).map(|c| c.cmp(&0)).unwrap_or(Ordering::Equal)
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "Rational({r})"),
            Scalar::Float(x) => write!(f, "Float({}, p={})", self.to_decimal(40), float_prec(x)),
        }
    }
}

/// Rationals print as `n` or `n/d`; floats as decimals at their precision.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Float(x) => {
                let digits = (float_prec(x) as f64 * std::f64::consts::LOG10_2).ceil() as usize;
                f.write_str(&self.to_decimal(digits))
            }
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Rational(r)
    }
}

impl From<BigUint> for Scalar {
    fn from(n: BigUint) -> Self {
        Scalar::from_bigint(BigInt::from(n))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar::$method(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}
