//! Exact arithmetic in a real number field Q(θ).
//!
//! A [`FieldContext`] pins θ as the unique root of an irreducible monic
//! polynomial inside a rational isolating interval. A [`Scalar`] is a
//! coefficient vector `(c_0, …, c_{D-1})` standing for `Σ c_k θ^k`.
//! Equality and zero tests are symbolic; signs come from evaluating the
//! coefficient polynomial over a refined isolating interval with exact
//! rational interval arithmetic until the enclosure excludes zero.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::heuristic;
use crate::poly::{self, FactorSearch};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("minimal polynomial must be nonconstant")]
    ConstantPolynomial,
    #[error("polynomial is not irreducible over Q (factor {factor})")]
    NotIrreducible { factor: String },
    #[error("irreducibility could not be established within the factor-search budget")]
    IrreducibilityUndetermined,
    #[error("isolating interval must satisfy lo < hi")]
    EmptyInterval,
    #[error("no root of the polynomial lies in the interval")]
    NoRootInInterval,
    #[error("the interval contains {count} roots of the polynomial")]
    MultipleRootsInInterval { count: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalars belong to different field contexts")]
    ContextMismatch,
    #[error("coefficient vector has length {got}, field degree is {expected}")]
    DegreeMismatch { expected: usize, got: usize },
}

/// Sign of a real number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}

struct Isolation {
    lo: BigRational,
    hi: BigRational,
}

pub struct FieldContext {
    min_poly: Vec<BigRational>,
    lo: BigRational,
    hi: BigRational,
    /// sign of p at the lower end of every refined interval
    lo_sign: i8,
    refined: RwLock<Isolation>,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("min_poly", &self.min_poly.iter().map(|c| c.to_string()).collect::<Vec<_>>())
            .field("interval", &(self.lo.to_string(), self.hi.to_string()))
            .finish()
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly && self.lo == other.lo && self.hi == other.hi
    }
}

impl Eq for FieldContext {}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl FieldContext {
    /// Validates `min_poly` (ascending coefficients) and the isolating interval.
    pub fn new(
        min_poly: Vec<BigRational>,
        lo: BigRational,
        hi: BigRational,
    ) -> Result<Arc<Self>, FieldError> {
        let trimmed = poly::trimmed(min_poly);
        let degree = match poly::degree(&trimmed) {
            Some(d) if d >= 1 => d,
            _ => return Err(FieldError::ConstantPolynomial),
        };
        if lo >= hi {
            return Err(FieldError::EmptyInterval);
        }
        let p = poly::monic_of(&trimmed);
        match poly::find_factor(&p) {
            FactorSearch::Irreducible => {}
            FactorSearch::Reducible(f) => {
                return Err(FieldError::NotIrreducible {
                    factor: render_poly(&f),
                })
            }
            FactorSearch::TooExpensive => return Err(FieldError::IrreducibilityUndetermined),
        }
        let lo_sign = if degree == 1 {
            let root = -p[0].clone();
            if root < lo || root > hi {
                return Err(FieldError::NoRootInInterval);
            }
            0
        } else {
            // p has no rational roots, so p(lo) and p(hi) are nonzero
            let count = poly::count_roots(&p, &lo, &hi);
            match count {
                0 => return Err(FieldError::NoRootInInterval),
                1 => {}
                n => return Err(FieldError::MultipleRootsInInterval { count: n }),
            }
            poly::eval(&p, &lo).signum().to_integer().to_i8().unwrap_or(0)
        };
        let ctx = FieldContext {
            min_poly: p,
            lo: lo.clone(),
            hi: hi.clone(),
            lo_sign,
            refined: RwLock::new(Isolation { lo, hi }),
        };
        if degree > 1 {
            ctx.refine_until(&BigRational::new(BigInt::one(), BigInt::one() << 48));
        }
        Ok(Arc::new(ctx))
    }

    /// The field Q itself (θ = 0).
    pub fn rationals() -> Arc<Self> {
        static Q: OnceLock<Arc<FieldContext>> = OnceLock::new();
        Q.get_or_init(|| {
            FieldContext::new(vec![rat(0), rat(1)], rat(-1), rat(1))
                .expect("t is irreducible")
        })
        .clone()
    }

    /// Q(√d) embedded with the positive square root; `d` must not be a square.
    pub fn quadratic(d: i64) -> Result<Arc<Self>, FieldError> {
        let hi = rat(d.max(1) + 1);
        FieldContext::new(vec![rat(-d), rat(0), rat(1)], rat(0), hi)
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[BigRational] {
        &self.min_poly
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    fn current(&self) -> (BigRational, BigRational) {
        let iso = self.refined.read().expect("isolation lock poisoned");
        (iso.lo.clone(), iso.hi.clone())
    }

    /// Bisects the shared isolating interval until its width is below `width`.
    fn refine_until(&self, width: &BigRational) {
        let (mut lo, mut hi) = self.current();
        if &(&hi - &lo) < width {
            return;
        }
        let two = rat(2);
        while &(&hi - &lo) >= width {
            let mid = (&lo + &hi) / &two;
            let s = poly::eval(&self.min_poly, &mid).signum().to_integer();
            if s.to_i8() == Some(self.lo_sign) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut iso = self.refined.write().expect("isolation lock poisoned");
        if hi.clone() - lo.clone() < iso.hi.clone() - iso.lo.clone() {
            iso.lo = lo;
            iso.hi = hi;
        }
    }

    fn width(&self) -> BigRational {
        let (lo, hi) = self.current();
        hi - lo
    }
}

fn render_poly(p: &[BigRational]) -> String {
    let mut terms = Vec::new();
    for (k, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        terms.push(match k {
            0 => format!("{c}"),
            1 => format!("({c})t"),
            _ => format!("({c})t^{k}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Enclosure of `Σ c_k t^k` for `t ∈ [lo, hi]`.
fn interval_eval(
    coeffs: &[BigRational],
    lo: &BigRational,
    hi: &BigRational,
) -> (BigRational, BigRational) {
    let mut acc_lo = BigRational::zero();
    let mut acc_hi = BigRational::zero();
    for c in coeffs.iter().rev() {
        let products = [&acc_lo * lo, &acc_lo * hi, &acc_hi * lo, &acc_hi * hi];
        let mut min = products[0].clone();
        let mut max = products[0].clone();
        for p in &products[1..] {
            if p < &min {
                min = p.clone();
            }
            if p > &max {
                max = p.clone();
            }
        }
        acc_lo = min + c;
        acc_hi = max + c;
    }
    (acc_lo, acc_hi)
}

/// An element of Q(θ).
#[derive(Clone)]
pub struct Scalar {
    coeffs: Vec<BigRational>,
    ctx: Arc<FieldContext>,
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})θ")?,
                _ => write!(f, "({c})θ^{k}")?,
            }
        }
        Ok(())
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        same_context(&self.ctx, &other.ctx) && self.coeffs == other.coeffs
    }
}

impl Eq for Scalar {}

fn same_context(a: &Arc<FieldContext>, b: &Arc<FieldContext>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Scalar {
    pub fn new(ctx: &Arc<FieldContext>, coeffs: Vec<BigRational>) -> Result<Self, FieldError> {
        let d = ctx.degree();
        if coeffs.len() > d {
            // accept trailing zeros, reject genuine higher-degree input
            if coeffs[d..].iter().any(|c| !c.is_zero()) {
                return Err(FieldError::DegreeMismatch {
                    expected: d,
                    got: coeffs.len(),
                });
            }
        }
        let mut coeffs = coeffs;
        coeffs.resize(d, BigRational::zero());
        Ok(Scalar {
            coeffs,
            ctx: ctx.clone(),
        })
    }

    /// Builds `p(θ)` for an arbitrary-degree polynomial `p`, reducing mod the minimal polynomial.
    pub fn from_poly(ctx: &Arc<FieldContext>, p: &[BigRational]) -> Self {
        let r = poly::rem(p, &ctx.min_poly);
        let mut coeffs = r;
        coeffs.resize(ctx.degree(), BigRational::zero());
        Scalar {
            coeffs,
            ctx: ctx.clone(),
        }
    }

    pub fn from_rational(ctx: &Arc<FieldContext>, q: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); ctx.degree()];
        coeffs[0] = q;
        Scalar {
            coeffs,
            ctx: ctx.clone(),
        }
    }

    pub fn from_int(ctx: &Arc<FieldContext>, n: i64) -> Self {
        Self::from_rational(ctx, rat(n))
    }

    pub fn from_bigint(ctx: &Arc<FieldContext>, n: &BigInt) -> Self {
        Self::from_rational(ctx, BigRational::from_integer(n.clone()))
    }

    pub fn zero(ctx: &Arc<FieldContext>) -> Self {
        Self::from_rational(ctx, BigRational::zero())
    }

    pub fn one(ctx: &Arc<FieldContext>) -> Self {
        Self::from_rational(ctx, BigRational::one())
    }

    /// The generator θ.
    pub fn generator(ctx: &Arc<FieldContext>) -> Self {
        Self::from_poly(ctx, &[BigRational::zero(), BigRational::one()])
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn zero_like(&self) -> Self {
        Self::zero(&self.ctx)
    }

    pub fn one_like(&self) -> Self {
        Self::one(&self.ctx)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `Some(q)` when the element lies in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check(&self, other: &Scalar) -> Result<(), FieldError> {
        if same_context(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(FieldError::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.check(other)?;
        Ok(Scalar {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            ctx: self.ctx.clone(),
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.check(other)?;
        Ok(Scalar {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
            ctx: self.ctx.clone(),
        })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.check(other)?;
        if let Some(q) = self.as_rational() {
            return Ok(other.scale(q));
        }
        if let Some(q) = other.as_rational() {
            return Ok(self.scale(q));
        }
        Ok(Scalar::from_poly(&self.ctx, &poly::mul(&self.coeffs, &other.coeffs)))
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.check(other)?;
        let inv = other.try_inv()?;
        self.try_mul(&inv)
    }

    pub fn try_inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Scalar::from_rational(&self.ctx, q.recip()));
        }
        // gcd(x, p) = 1 because p is irreducible and deg x < deg p
        let (g, s) = poly::half_gcdext(&self.coeffs, &self.ctx.min_poly);
        debug_assert_eq!(g, vec![BigRational::one()]);
        Ok(Scalar::from_poly(&self.ctx, &s))
    }

    pub fn inv(&self) -> Scalar {
        self.try_inv().expect("inverse of zero")
    }

    pub fn scale(&self, q: &BigRational) -> Scalar {
        Scalar {
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
            ctx: self.ctx.clone(),
        }
    }

    pub fn scale_int(&self, n: &BigInt) -> Scalar {
        self.scale(&BigRational::from_integer(n.clone()))
    }

    /// Exact sign. Terminates because a nonzero element has a nonzero real value.
    pub fn sign(&self) -> Sign {
        if self.is_zero() {
            return Sign::Zero;
        }
        if let Some(q) = self.as_rational() {
            return if q.is_positive() {
                Sign::Positive
            } else {
                Sign::Negative
            };
        }
        loop {
            let (lo, hi) = self.ctx.current();
            let (elo, ehi) = interval_eval(&self.coeffs, &lo, &hi);
            if elo.is_positive() {
                return Sign::Positive;
            }
            if ehi.is_negative() {
                return Sign::Negative;
            }
            let w = (hi - lo) / rat(1 << 16);
            self.ctx.refine_until(&w);
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Sign::Positive
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Sign::Negative
    }

    pub fn is_nonnegative(&self) -> bool {
        self.sign() != Sign::Negative
    }

    pub fn try_cmp(&self, other: &Scalar) -> Result<Ordering, FieldError> {
        Ok(match self.try_sub(other)?.sign() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        })
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Rational enclosure `[lo, hi]` of the value with `hi - lo < width`.
    pub fn enclosure(&self, width: &BigRational) -> (BigRational, BigRational) {
        if let Some(q) = self.as_rational() {
            return (q.clone(), q.clone());
        }
        loop {
            let (lo, hi) = self.ctx.current();
            let (elo, ehi) = interval_eval(&self.coeffs, &lo, &hi);
            if &(&ehi - &elo) < width {
                return (elo, ehi);
            }
            let w = self.ctx.width() / rat(1 << 16);
            self.ctx.refine_until(&w);
        }
    }

    /// A rational within `tol` of the value.
    pub fn approx_rational(&self, tol: &BigRational) -> BigRational {
        let (lo, hi) = self.enclosure(tol);
        (lo + hi) / rat(2)
    }

    pub fn floor(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        let mut width = BigRational::one();
        loop {
            let (lo, hi) = self.enclosure(&width);
            let (flo, fhi) = (lo.floor(), hi.floor());
            if flo == fhi {
                return flo.to_integer();
            }
            width /= rat(1 << 20);
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Decimal rendering with `digits` fractional digits (value rounded half away from zero).
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let tol = BigRational::new(BigInt::one(), &scale * BigInt::from(100));
        let q = self.approx_rational(&tol);
        let scaled = q * BigRational::from_integer(scale.clone());
        let n = scaled.round().to_integer();
        let negative = n.is_negative();
        let (int_part, frac_part) = n.abs().div_rem(&scale);
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&int_part.to_string());
        if digits > 0 {
            out.push('.');
            let frac = frac_part.to_string();
            out.push_str(&"0".repeat(digits - frac.len()));
            out.push_str(&frac);
        }
        out
    }

    /// Floating approximation for search heuristics only. Never used to accept
    /// or reject anything.
    pub fn approx_f64(&self) -> f64 {
        if heuristic::is_poisoned() {
            return heuristic::junk(self.coeffs.iter().map(|c| c.to_string()));
        }
        let tol = BigRational::new(BigInt::one(), BigInt::one() << 60);
        self.approx_rational(&tol).to_f64().unwrap_or(f64::NAN)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    /// Panics when the scalars live in different fields.
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).expect("comparing scalars from different fields")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            ctx: self.ctx.clone(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Σ aᵢ·bᵢ over equal-length slices.
pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut it = a.iter().zip(b);
    let (x, y) = it.next().expect("dot product of empty vectors");
    it.fold(x * y, |acc, (x, y)| acc + x * y)
}

/// Σ kᵢ·vᵢ with integer weights.
pub fn int_combination(weights: &[BigInt], rows: &[Vec<Scalar>], ctx: &Arc<FieldContext>, dim: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(ctx); dim];
    for (w, row) in weights.iter().zip(rows) {
        if w.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o = &*o + &x.scale_int(w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sqrt2_plus_sqrt3() -> Arc<FieldContext> {
        FieldContext::new(vec![rat(1), rat(0), rat(-10), rat(0), rat(1)], rat(3), rat(4)).unwrap()
    }

    #[test]
    fn rational_context_from_linear_polynomial() {
        let ctx = FieldContext::new(vec![rat(0), rat(1)], rat(-1), rat(1)).unwrap();
        assert_eq!(ctx.degree(), 1);
        assert!(Scalar::generator(&ctx).is_zero());
    }

    #[test]
    fn sqrt2_context() {
        let ctx = FieldContext::new(vec![rat(-2), rat(0), rat(1)], rat(1), rat(2)).unwrap();
        assert_eq!(ctx.degree(), 2);
        let t = Scalar::generator(&ctx);
        assert_eq!(&t * &t, Scalar::from_int(&ctx, 2));
    }

    #[test]
    fn sqrt2_plus_sqrt3_context_contains_sqrt2() {
        let ctx = sqrt2_plus_sqrt3();
        let t = Scalar::generator(&ctx);
        let sqrt2 = (&(&(&t * &t) * &t) - &t.scale(&rat(9))).scale(&q(1, 2));
        assert_eq!(&sqrt2 * &sqrt2, Scalar::from_int(&ctx, 2));
        assert!(sqrt2.is_positive());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            FieldContext::new(vec![rat(3)], rat(0), rat(1)).unwrap_err(),
            FieldError::ConstantPolynomial
        );
        assert!(matches!(
            FieldContext::new(vec![rat(-4), rat(0), rat(1)], rat(1), rat(3)).unwrap_err(),
            FieldError::NotIrreducible { .. }
        ));
        assert_eq!(
            FieldContext::new(vec![rat(-2), rat(0), rat(1)], rat(2), rat(3)).unwrap_err(),
            FieldError::NoRootInInterval
        );
        assert_eq!(
            FieldContext::new(vec![rat(-2), rat(0), rat(1)], rat(-2), rat(2)).unwrap_err(),
            FieldError::MultipleRootsInInterval { count: 2 }
        );
        assert_eq!(
            FieldContext::new(vec![rat(-2), rat(0), rat(1)], rat(2), rat(1)).unwrap_err(),
            FieldError::EmptyInterval
        );
    }

    #[test]
    fn non_monic_input_is_normalized() {
        let ctx = FieldContext::new(vec![rat(-4), rat(0), rat(2)], rat(1), rat(2)).unwrap();
        assert_eq!(ctx.min_poly(), &[rat(-2), rat(0), rat(1)]);
    }

    #[test]
    fn signs() {
        let ctx = FieldContext::quadratic(2).unwrap();
        assert_eq!(Scalar::zero(&ctx).sign(), Sign::Zero);
        let x = Scalar::new(&ctx, vec![rat(-1), rat(1)]).unwrap();
        assert_eq!(x.sign(), Sign::Positive);

        let ctx = sqrt2_plus_sqrt3();
        // (θ³ − 9θ)/2 − 3/2 = √2 − 3/2
        let x = Scalar::new(&ctx, vec![q(-3, 2), q(-9, 2), rat(0), q(1, 2)]).unwrap();
        assert_eq!(x.sign(), Sign::Negative);
        assert_eq!(x.to_decimal(30), "-0.085786437626904951198311275790");
    }

    #[test]
    fn near_cancellation_sign() {
        // 99/70 − √2 ≈ 7.2e-5 > 0, 41/29 − √2 ≈ -4.2e-4 < 0
        let ctx = FieldContext::quadratic(2).unwrap();
        let s2 = Scalar::generator(&ctx);
        assert!((Scalar::from_rational(&ctx, q(99, 70)) - &s2).is_positive());
        assert!((Scalar::from_rational(&ctx, q(41, 29)) - &s2).is_negative());
    }

    #[test]
    fn field_ops() {
        let ctx = FieldContext::quadratic(2).unwrap();
        let t = Scalar::generator(&ctx);
        let one = Scalar::one(&ctx);
        assert_eq!(&t * &t, Scalar::from_int(&ctx, 2));
        assert_eq!(&one / &(&one + &t), &t - &one);
        assert!((&t - &t).is_zero());
        assert_eq!(Scalar::zero(&ctx).try_inv().unwrap_err(), FieldError::DivisionByZero);
        let other = FieldContext::quadratic(3).unwrap();
        assert_eq!(
            t.try_add(&Scalar::generator(&other)).unwrap_err(),
            FieldError::ContextMismatch
        );
    }

    #[test]
    fn floor_and_ceil() {
        let ctx = FieldContext::quadratic(2).unwrap();
        let t = Scalar::generator(&ctx);
        assert_eq!(t.floor(), BigInt::from(1));
        assert_eq!(t.ceil(), BigInt::from(2));
        assert_eq!((-&t).floor(), BigInt::from(-2));
        assert_eq!(Scalar::from_rational(&ctx, q(-7, 3)).ceil(), BigInt::from(-2));
    }
}
