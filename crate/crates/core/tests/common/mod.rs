//! Instance generators and independent oracles shared by the integration tests.
//! The oracles use plain `BigRational` arithmetic and brute force; they do not
//! call into the engine's linear algebra or simplex code.
#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use onesided::{FieldContext, OrderUnit, Scalar, SubgroupSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn q() -> Arc<FieldContext> {
    FieldContext::rationals()
}

pub fn sqrt2_field() -> Arc<FieldContext> {
    FieldContext::quadratic(2).unwrap()
}

/// ℚ(θ) with θ = √2 + √3, root of t⁴ − 10t² + 1 in (3, 4).
pub fn theta_field() -> Arc<FieldContext> {
    FieldContext::new(vec![r(1, 1), r(0, 1), r(-10, 1), r(0, 1), r(1, 1)], r(3, 1), r(4, 1)).unwrap()
}

/// √2 = (θ³ − 9θ)/2 and √3 = (11θ − θ³)/2 in ℚ(√2 + √3).
pub fn theta_roots(ctx: &Arc<FieldContext>) -> (Scalar, Scalar) {
    let s2 = Scalar::new(ctx, vec![r(0, 1), r(-9, 2), r(0, 1), r(1, 2)]).unwrap();
    let s3 = Scalar::new(ctx, vec![r(0, 1), r(11, 2), r(0, 1), r(-1, 2)]).unwrap();
    (s2, s3)
}

pub fn ints(ctx: &Arc<FieldContext>, v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&x| Scalar::from_int(ctx, x)).collect()
}

pub fn ones(ctx: &Arc<FieldContext>, n: usize) -> OrderUnit {
    OrderUnit::ones(ctx, n)
}

/// G = ℤ² + ℤ(√2, √3) over ℚ(√2 + √3).
pub fn holey_group() -> SubgroupSpec {
    let ctx = theta_field();
    let (s2, s3) = theta_roots(&ctx);
    let one = Scalar::one(&ctx);
    let zero = Scalar::zero(&ctx);
    SubgroupSpec::new(&ctx, 2, vec![vec![one.clone(), zero.clone()], vec![zero, one], vec![s2, s3]]).unwrap()
}

/// Small rational: numerator in [−3, 3], denominator in {1, 2, 3}, mostly integers.
pub fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num = rng.gen_range(-3..=3);
    let den = if rng.gen_bool(0.7) { 1 } else { rng.gen_range(1..=3) };
    r(num, den)
}

pub fn rational_instance(rng: &mut ChaCha8Rng, max_s: usize, max_n: usize) -> SubgroupSpec {
    let ctx = q();
    let s = rng.gen_range(1..=max_s);
    let n = rng.gen_range(1..=max_n);
    let gens = (0..s)
        .map(|_| (0..n).map(|_| Scalar::from_rational(&ctx, small_rational(rng))).collect())
        .collect();
    SubgroupSpec::new(&ctx, n, gens).unwrap()
}

/// Entries `a + b√2` with small integer `a`, and `b` often zero.
pub fn sqrt2_instance(rng: &mut ChaCha8Rng, max_s: usize, max_n: usize) -> SubgroupSpec {
    let ctx = sqrt2_field();
    let s = rng.gen_range(1..=max_s);
    let n = rng.gen_range(1..=max_n);
    let gens = (0..s)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let a = rng.gen_range(-2..=2);
                    let b = if rng.gen_bool(0.5) { 0 } else { rng.gen_range(-1..=1) };
                    Scalar::new(&ctx, vec![r(a, 1), r(b, 1)]).unwrap()
                })
                .collect()
        })
        .collect();
    SubgroupSpec::new(&ctx, n, gens).unwrap()
}

pub fn random_rational_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<BigRational>> {
    (0..m).map(|_| (0..n).map(|_| small_rational(rng)).collect()).collect()
}

pub fn to_scalars(ctx: &Arc<FieldContext>, v: &[BigRational]) -> Vec<Scalar> {
    v.iter().map(|x| Scalar::from_rational(ctx, x.clone())).collect()
}

/// Rational value of a scalar from the rational field.
pub fn rat(x: &Scalar) -> BigRational {
    x.coeffs()[0].clone()
}

// ---------------------------------------------------------------------------
// Rational linear algebra oracles

/// Rank by fraction-exact elimination.
pub fn rank_oracle(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[rank][c];
                let pivot = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= y * &f;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Unique solution of a square system, if nonsingular.
fn solve_square(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let piv = m[c][c].clone();
        for x in &mut m[c][c..] {
            *x = &*x / &piv;
        }
        let pivot = m[c].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot).skip(c) {
                    *x -= y * &f;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All basic feasible solutions of `{x ≥ 0 : A x = b}` by enumerating bases.
pub fn vertices(a: &[Vec<BigRational>], b: &[BigRational], nvars: usize) -> Vec<Vec<BigRational>> {
    // drop redundant rows first so that bases have size rank(A)
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs: Vec<BigRational> = Vec::new();
    for (row, bi) in a.iter().zip(b) {
        let mut aug = rows.iter().zip(&rhs).map(|(r, x)| {
            let mut v = r.clone();
            v.push(x.clone());
            v
        }).collect::<Vec<_>>();
        let mut cand = row.clone();
        cand.push(bi.clone());
        let before = rank_oracle(&aug);
        aug.push(cand);
        let rank_aug = rank_oracle(&aug);
        let mut plain: Vec<Vec<BigRational>> = rows.clone();
        plain.push(row.clone());
        let rank_plain = rank_oracle(&plain);
        if rank_plain > rows.len() {
            rows.push(row.clone());
            rhs.push(bi.clone());
        } else if rank_aug > before {
            return Vec::new(); // inconsistent equalities
        }
    }
    let k = rows.len();
    if k == 0 {
        return vec![vec![BigRational::zero(); nvars]];
    }
    let mut out: Vec<Vec<BigRational>> = Vec::new();
    for basis in subsets(nvars, k) {
        let sub: Vec<Vec<BigRational>> = rows.iter().map(|row| basis.iter().map(|&j| row[j].clone()).collect()).collect();
        if let Some(xb) = solve_square(&sub, &rhs) {
            if xb.iter().all(|v| !v.is_negative()) {
                let mut x = vec![BigRational::zero(); nvars];
                for (&j, v) in basis.iter().zip(xb) {
                    x[j] = v;
                }
                if !out.contains(&x) {
                    out.push(x);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOracle {
    Infeasible,
    Unbounded,
    Optimal(BigRational),
}

fn dot_q(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `max c·x` over `{x ≥ 0 : A x = b}` by vertex and extreme-ray enumeration.
pub fn lp_oracle(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational]) -> LpOracle {
    let n = c.len();
    let verts = vertices(a, b, n);
    if verts.is_empty() {
        return LpOracle::Infeasible;
    }
    // extreme rays of the recession cone, normalized by Σ r = 1
    let mut ray_rows: Vec<Vec<BigRational>> = a.to_vec();
    ray_rows.push(vec![BigRational::one(); n]);
    let mut ray_rhs = vec![BigRational::zero(); a.len()];
    ray_rhs.push(BigRational::one());
    if vertices(&ray_rows, &ray_rhs, n).iter().any(|r| dot_q(c, r).is_positive()) {
        return LpOracle::Unbounded;
    }
    LpOracle::Optimal(verts.iter().map(|x| dot_q(c, x)).max().unwrap())
}

/// Whether `{y ≥ 0 : A y = 0, Σ y = 1}` is nonempty.
pub fn nonneg_kernel_point(a: &[Vec<BigRational>], n: usize) -> bool {
    let mut rows = a.to_vec();
    rows.push(vec![BigRational::one(); n]);
    let mut rhs = vec![BigRational::zero(); a.len()];
    rhs.push(BigRational::one());
    !vertices(&rows, &rhs, n).is_empty()
}

// ---------------------------------------------------------------------------
// Sign oracles

/// Sign of `p + q√2` for rationals, by comparing squares.
pub fn sign_sqrt2(p: &BigRational, q: &BigRational) -> i8 {
    let sp = p.signum();
    let sq = q.signum();
    let two = BigRational::from_integer(2.into());
    if sq.is_zero() {
        return sgn(&sp);
    }
    if sp.is_zero() || sp == sq {
        return sgn(&sq);
    }
    // opposite signs: compare p² with 2q²
    let lhs = p * p;
    let rhs = &two * q * q;
    if lhs > rhs {
        sgn(&sp)
    } else {
        sgn(&sq)
    }
}

fn sgn(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of a scalar given in coordinates over 1, θ, …, θ^{D−1} where θ is
/// enclosed by bisection of the minimal polynomial to `bits` bits.
pub fn sign_by_bisection(min_poly: &[BigRational], lo: &BigRational, hi: &BigRational, coeffs: &[BigRational], bits: u32) -> i8 {
    let eval = |p: &[BigRational], x: &BigRational| p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c);
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let s_lo = sgn(&eval(min_poly, &lo));
    let two = BigRational::from_integer(2.into());
    let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
    while &hi - &lo > eps {
        let mid = (&lo + &hi) / &two;
        let s = sgn(&eval(min_poly, &mid));
        if s == 0 {
            lo = mid.clone();
            hi = mid;
            break;
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // |p(x) − p(lo)| ≤ Σ k|c_k| M^{k−1} · width with M = max(|lo|, |hi|)
    let m = lo.abs().max(hi.abs());
    let mut bound = BigRational::zero();
    let mut pow = BigRational::one();
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        bound += BigRational::from_integer(BigInt::from(k)) * c.abs() * &pow;
        pow *= &m;
    }
    let width = &hi - &lo;
    let v = eval(coeffs, &lo);
    if v.abs() > &bound * &width || coeffs.iter().skip(1).all(Zero::is_zero) {
        sgn(&v)
    } else {
        0 // undecided at this precision
    }
}

/// Sign of a scalar from ℚ, ℚ(√2) or any context, decided without the
/// engine's sign routine. Panics if bisection to 512 bits cannot decide.
pub fn sign_oracle(x: &Scalar) -> i8 {
    let ctx = x.context();
    let c = x.coeffs();
    if ctx.degree() == 1 {
        return sgn(&c[0]);
    }
    if ctx.min_poly() == [r(-2, 1), r(0, 1), r(1, 1)] {
        return sign_sqrt2(&c[0], &c[1]);
    }
    let (lo, hi) = ctx.interval();
    let s = sign_by_bisection(ctx.min_poly(), lo, hi, c, 512);
    assert!(s != 0 || c.iter().all(Zero::is_zero), "sign undecided at 512 bits");
    s
}

/// `h − m·h′ ≥ −ε·u` coordinatewise, checked with [`sign_oracle`].
pub fn witness_oracle(h: &SubgroupSpec, unit: &OrderUnit, h_coeffs: &[BigInt], m: &BigInt, eps: &BigRational, coeffs: &[BigInt]) -> bool {
    let ctx = h.context();
    let target = h.element(h_coeffs);
    let hp = h.element(coeffs);
    let m_s = Scalar::from_bigint(ctx, m);
    target
        .iter()
        .zip(&hp)
        .zip(unit.coords())
        .all(|((a, b), u)| sign_oracle(&(&(a - &(&m_s * b)) + &u.scale(eps))) >= 0)
}
