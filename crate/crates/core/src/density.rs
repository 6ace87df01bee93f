//! Density of finitely generated subgroups: the zero/discrete/dense trichotomy
//! on the line and the two-sided approximation property in ℝⁿ.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::field::{FieldContext, Scalar};
use crate::linalg::{self, Matrix};
use crate::subgroup::SubgroupSpec;

/// Classification of a finitely generated subgroup of ℝ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineGroupClass {
    Zero,
    /// The group is `δZ`. `values[i] = multiples[i]·δ` and `Σ bezout[i]·values[i] = δ`.
    Discrete {
        delta: Scalar,
        multiples: Vec<BigInt>,
        bezout: Vec<BigInt>,
    },
    Dense,
}

impl LineGroupClass {
    pub fn is_dense(&self) -> bool {
        matches!(self, LineGroupClass::Dense)
    }
}

/// `(g, x)` with `g = gcd(a) ≥ 0` and `Σ xᵢaᵢ = g`.
pub fn gcd_with_bezout(a: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let mut g = BigInt::zero();
    let mut coeffs: Vec<BigInt> = Vec::with_capacity(a.len());
    for ai in a {
        // extended Euclid on (g, ai)
        let (mut r0, mut r1) = (g.clone(), ai.clone());
        let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
        let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
        while !r1.is_zero() {
            let q = r0.div_floor(&r1);
            let r2 = &r0 - &q * &r1;
            r0 = std::mem::replace(&mut r1, r2);
            let s2 = &s0 - &q * &s1;
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = &t0 - &q * &t1;
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_negative() {
            r0 = -r0;
            s0 = -s0;
            t0 = -t0;
        }
        for c in coeffs.iter_mut() {
            *c *= &s0;
        }
        coeffs.push(t0);
        g = r0;
    }
    (g, coeffs)
}

/// Decides whether `Σ Z·valuesᵢ` is zero, cyclic, or dense in ℝ by the
/// Q-rank of the values.
pub fn classify_line_group(ctx: &Arc<FieldContext>, values: &[Scalar]) -> LineGroupClass {
    let slices = linalg::rational_components(values, ctx.degree());
    match linalg::rank_q(&slices) {
        0 => LineGroupClass::Zero,
        1 => {
            let v = values.iter().find(|x| !x.is_zero()).expect("rank one");
            let k = v.coeffs().iter().position(|c| !c.is_zero()).expect("nonzero");
            let ratios: Vec<BigRational> = values
                .iter()
                .map(|x| &x.coeffs()[k] / &v.coeffs()[k])
                .collect();
            let lcm = ratios.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            let ints: Vec<BigInt> = ratios
                .iter()
                .map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer())
                .collect();
            let (g, mut bezout) = gcd_with_bezout(&ints);
            let mut delta = v.scale(&BigRational::new(g.clone(), lcm));
            let mut multiples: Vec<BigInt> = ints.iter().map(|x| x / &g).collect();
            if delta.is_negative() {
                delta = -delta;
                multiples.iter_mut().for_each(|x| *x = -&*x);
                bezout.iter_mut().for_each(|x| *x = -&*x);
            }
            LineGroupClass::Discrete {
                delta,
                multiples,
                bezout,
            }
        }
        _ => LineGroupClass::Dense,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyA {
    Holds,
    /// Some functional φ has `φ(hᵢ) = mᵢ` for all `i`, with `m ≠ 0` primitive.
    Fails { m: Vec<BigInt> },
}

impl PropertyA {
    pub fn holds(&self) -> bool {
        matches!(self, PropertyA::Holds)
    }
}

/// Is `H` dense in its real span?
///
/// Works on the dual side: `m ∈ Zˢ` is a value vector `(φ(hᵢ))` exactly when
/// it is orthogonal to the left kernel of the generator matrix. Splitting that
/// kernel into θ-slices turns this into a rational kernel computation.
pub fn property_a(h: &SubgroupSpec) -> PropertyA {
    let s = h.num_generators();
    if s == 0 {
        return PropertyA::Holds;
    }
    let degree = h.context().degree();
    let left_kernel = h.matrix().transpose().kernel();
    let mut stacked: Vec<Vec<BigRational>> = Vec::new();
    for u in &left_kernel {
        stacked.extend(linalg::rational_components(u, degree));
    }
    let rational_kernel = linalg::kernel_q(&stacked, s);
    match rational_kernel.first() {
        None => PropertyA::Holds,
        Some(v) => PropertyA::Fails {
            m: linalg::primitive_integer_vector(v),
        },
    }
}

/// Primal density test for a group whose `s × k` generator matrix has rank `k`:
/// `H` is dense in ℝᵏ iff the only `φ ∈ Q(θ)ᵏ` with `Gφ ∈ Qˢ` is zero.
///
/// Writing `φ = Σ_l θˡ φ_l` with rational `φ_l`, the conditions are the
/// vanishing of the θ¹, …, θ^{D−1} coefficients of every `(Gφ)_i`, a rational
/// system in `k·D` unknowns.
pub fn dense_full_rank_primal(g: &Matrix) -> bool {
    let ctx = g.context();
    let d = ctx.degree();
    let k = g.ncols();
    if k == 0 {
        return true;
    }
    if d == 1 {
        return false;
    }
    let powers: Vec<Scalar> = (0..d)
        .map(|l| {
            let mut p = vec![BigRational::zero(); l + 1];
            p[l] = BigRational::one();
            Scalar::from_poly(ctx, &p)
        })
        .collect();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for i in 0..g.nrows() {
        // products[l][j] = G_ij θ^l
        let products: Vec<Vec<Scalar>> = powers
            .iter()
            .map(|p| (0..k).map(|j| g.get(i, j) * p).collect())
            .collect();
        for c in 1..d {
            let mut row = Vec::with_capacity(k * d);
            for prod in &products {
                for x in prod {
                    row.push(x.coeffs()[c].clone());
                }
            }
            rows.push(row);
        }
    }
    linalg::rank_q(&rows) == k * d
}
