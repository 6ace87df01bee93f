//! Dense univariate polynomials over Q, coefficients in ascending degree order.
//!
//! Only what the field layer needs: reduction, extended gcd, Sturm counts,
//! interpolation and a Kronecker-style factor search.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) type Poly = Vec<BigRational>;

pub(crate) fn trim(p: &mut Poly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub(crate) fn trimmed(mut p: Poly) -> Poly {
    trim(&mut p);
    p
}

/// Degree of a trimmed polynomial; `None` for the zero polynomial.
pub(crate) fn degree(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub(crate) fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub(crate) fn sub(a: &[BigRational], b: &[BigRational]) -> Poly {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    let out = (0..n)
        .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
        .collect();
    trimmed(out)
}

pub(crate) fn mul(a: &[BigRational], b: &[BigRational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trimmed(out)
}

fn scale(a: &[BigRational], k: &BigRational) -> Poly {
    trimmed(a.iter().map(|c| c * k).collect())
}

/// Quotient and remainder. Panics on a zero divisor.
pub(crate) fn divrem(a: &[BigRational], b: &[BigRational]) -> (Poly, Poly) {
    let db = degree(b).expect("polynomial division by zero");
    let lead = b[db].clone();
    let mut rem = trimmed(a.to_vec());
    let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let k = &rem[dr] / &lead;
        let shift = dr - db;
        for (i, c) in b.iter().enumerate().take(db + 1) {
            rem[i + shift] -= &k * c;
        }
        quot[shift] = k;
        trim(&mut rem);
    }
    (trimmed(quot), rem)
}

pub(crate) fn rem(a: &[BigRational], b: &[BigRational]) -> Poly {
    divrem(a, b).1
}

fn monic(p: &[BigRational]) -> Poly {
    match degree(p) {
        Some(d) => scale(p, &p[d].recip()),
        None => Vec::new(),
    }
}

/// Returns `(g, s)` with `s·a ≡ g (mod b)` and `g` the monic gcd of `a` and `b`.
pub(crate) fn half_gcdext(a: &[BigRational], b: &[BigRational]) -> (Poly, Poly) {
    let (mut r0, mut r1) = (trimmed(a.to_vec()), trimmed(b.to_vec()));
    let (mut s0, mut s1): (Poly, Poly) = (vec![BigRational::one()], Vec::new());
    while degree(&r1).is_some() {
        let (q, r) = divrem(&r0, &r1);
        let s = sub(&s0, &mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    match degree(&r0) {
        Some(d) => {
            let inv = r0[d].recip();
            (scale(&r0, &inv), scale(&s0, &inv))
        }
        None => (Vec::new(), Vec::new()),
    }
}

pub(crate) fn derivative(p: &[BigRational]) -> Poly {
    trimmed(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect(),
    )
}

fn sign_of(x: &BigRational) -> i8 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub(crate) fn sturm_sequence(p: &[BigRational]) -> Vec<Poly> {
    let mut seq = vec![trimmed(p.to_vec()), derivative(p)];
    loop {
        let n = seq.len();
        if degree(&seq[n - 1]).is_none() {
            seq.pop();
            break;
        }
        let r = rem(&seq[n - 2], &seq[n - 1]);
        if degree(&r).is_none() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn sign_changes(seq: &[Poly], x: &BigRational) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|p| sign_of(&eval(p, x)))
        .filter(|s| *s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in the half-open interval `(lo, hi]`.
pub(crate) fn count_roots(p: &[BigRational], lo: &BigRational, hi: &BigRational) -> usize {
    let seq = sturm_sequence(p);
    sign_changes(&seq, lo).saturating_sub(sign_changes(&seq, hi))
}

/// Primitive integer polynomial with positive leading coefficient, proportional to `p`.
pub(crate) fn primitive_integer(p: &[BigRational]) -> Vec<BigInt> {
    let lcm = p
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut out: Vec<BigInt> = ints.into_iter().map(|c| c / &content).collect();
    if out.last().is_some_and(|c| c.is_negative()) {
        out.iter_mut().for_each(|c| *c = -&*c);
    }
    out
}

fn to_rational_poly(p: &[BigInt]) -> Poly {
    trimmed(p.iter().cloned().map(BigRational::from_integer).collect())
}

/// Lagrange interpolation through `(xs[i], ys[i])`.
pub(crate) fn interpolate(xs: &[BigInt], ys: &[BigInt]) -> Poly {
    let mut out: Poly = Vec::new();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis: Poly = vec![BigRational::one()];
        let mut denom = BigInt::one();
        for (j, xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = mul(&basis, &[BigRational::from_integer(-xj), BigRational::one()]);
            denom *= xi - xj;
        }
        let k = BigRational::new(yi.clone(), denom);
        let term = scale(&basis, &k);
        let n = out.len().max(term.len());
        out.resize(n, BigRational::zero());
        for (o, t) in out.iter_mut().zip(term) {
            *o += t;
        }
        trim(&mut out);
    }
    out
}

/// Positive divisors of a nonzero integer, by trial division.
fn positive_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let mut n = n.abs();
    let small = n.to_u64()?;
    if small > 1 << 46 {
        return None;
    }
    let mut primes: Vec<(u64, u32)> = Vec::new();
    let mut m = small;
    let mut d = 2u64;
    while d * d <= m {
        let mut e = 0;
        while m % d == 0 {
            m /= d;
            e += 1;
        }
        if e > 0 {
            primes.push((d, e));
        }
        d += 1;
    }
    if m > 1 {
        primes.push((m, 1));
    }
    let mut divs = vec![1u64];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = 1u64;
            for _ in 0..=e {
                next.push(d * pk);
                pk *= p;
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    n.set_zero();
    Some(divs.into_iter().map(BigInt::from).collect())
}

/// Outcome of the factor search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum FactorSearch {
    Irreducible,
    Reducible(Poly),
    TooExpensive,
}

const COMBINATION_LIMIT: u128 = 5_000_000;

/// Kronecker's method: for each candidate factor degree `d ≤ D/2`, a factor's
/// values at `d + 1` integer points divide the polynomial's values there, so
/// enumerating divisor tuples and interpolating finds every factor over Z.
pub(crate) fn find_factor(p: &[BigRational]) -> FactorSearch {
    let big = primitive_integer(p);
    let deg = big.len() - 1;
    if deg <= 1 {
        return FactorSearch::Irreducible;
    }
    if big[0].is_zero() {
        return FactorSearch::Reducible(vec![BigRational::zero(), BigRational::one()]);
    }
    let rp = to_rational_poly(&big);
    let range = 3 * deg as i64 + 10;
    let mut points: Vec<(BigInt, BigInt)> = Vec::new();
    for x in -range..=range {
        let x = BigInt::from(x);
        let v = eval(&rp, &BigRational::from_integer(x.clone())).to_integer();
        if v.is_zero() {
            return FactorSearch::Reducible(vec![
                BigRational::from_integer(-x),
                BigRational::one(),
            ]);
        }
        points.push((x, v));
    }
    points.sort_by(|a, b| a.1.abs().cmp(&b.1.abs()).then(a.0.abs().cmp(&b.0.abs())));
    let lead = big[deg].clone();
    for d in 1..=deg / 2 {
        let chosen = &points[..=d];
        let mut divisor_lists = Vec::with_capacity(d + 1);
        let mut combos: u128 = 1;
        for (_, v) in chosen {
            let Some(divs) = positive_divisors(v) else {
                return FactorSearch::TooExpensive;
            };
            combos = combos.saturating_mul(divs.len() as u128 * 2);
            divisor_lists.push(divs);
        }
        if combos / 2 > COMBINATION_LIMIT {
            return FactorSearch::TooExpensive;
        }
        let xs: Vec<BigInt> = chosen.iter().map(|(x, _)| x.clone()).collect();
        let mut idx = vec![0usize; d + 1];
        let mut signs = vec![1i8; d + 1];
        loop {
            let ys: Vec<BigInt> = (0..=d)
                .map(|k| {
                    let v = divisor_lists[k][idx[k]].clone();
                    if signs[k] < 0 {
                        -v
                    } else {
                        v
                    }
                })
                .collect();
            let f = interpolate(&xs, &ys);
            if degree(&f) == Some(d)
                && f.iter().all(|c| c.is_integer())
                && lead.is_multiple_of(&f[d].to_integer())
                && degree(&rem(&rp, &f)).is_none()
            {
                return FactorSearch::Reducible(f);
            }
            // odometer over (divisor, sign) pairs; the first value keeps a positive sign
            let mut k = 0;
            loop {
                if k > d {
                    break;
                }
                if k > 0 && signs[k] > 0 {
                    signs[k] = -1;
                    break;
                }
                signs[k] = 1;
                idx[k] += 1;
                if idx[k] < divisor_lists[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k > d {
                break;
            }
        }
    }
    FactorSearch::Irreducible
}

pub(crate) fn monic_of(p: &[BigRational]) -> Poly {
    monic(p)
}
