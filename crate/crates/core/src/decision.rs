//! Deciding one-sided approximability, with two independent routes and a
//! checkable certificate when it fails.

use std::fmt;

use log::debug;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::density::{self, classify_line_group, LineGroupClass, PropertyA};
use crate::error::{Error, Result};
use crate::face::{self, FaceDescriptor, ZSet};
use crate::field::Scalar;
use crate::linalg::SolveResult;
use crate::par;
use crate::subgroup::{OrderUnit, SubgroupSpec, TracePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    HoldsB,
    FailsB,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::HoldsB => "HoldsB",
            Verdict::FailsB => "FailsB",
        })
    }
}

/// `δ·min{1, 1/θ}/2`. On H the pair `(τ₁, τ₂)` takes values `kδ(1, −1/θ)`,
/// so any nonzero value has a coordinate at most `−δ·min{1, 1/θ}`.
fn threshold(delta: &Scalar, theta: &Scalar) -> Scalar {
    let one = theta.one_like();
    let min = if *theta > one { theta.inv() } else { one };
    (delta * &min).scale(&BigRational::new(1.into(), 2.into()))
}

/// Obstruction tuple: every `h′ ∈ H` and modulus `m ≥ 2` leave
/// `min(τ₁(h − mh′), τ₂(h − mh′)) < −ε₀`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureCertificate {
    pub h_coeffs: Vec<BigInt>,
    pub h: Vec<Scalar>,
    pub tau1: TracePoint,
    pub tau2: TracePoint,
    pub lambda: Scalar,
    pub delta: Scalar,
    pub epsilon0: Scalar,
}

impl FailureCertificate {
    /// `λτ₁ + (1−λ)τ₂`, a trace vanishing on H.
    pub fn zeta(&self) -> Vec<Scalar> {
        let one_minus = &self.lambda.one_like() - &self.lambda;
        self.tau1
            .coords()
            .iter()
            .zip(self.tau2.coords())
            .map(|(a, b)| &(&self.lambda * a) + &(&one_minus * b))
            .collect()
    }

    /// `(1 − λ)/λ`. On H, `τ₂ = −τ₁/θ`.
    pub fn theta(&self) -> Scalar {
        &(&self.lambda.one_like() - &self.lambda) / &self.lambda
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionOutcome {
    pub verdict: Verdict,
    /// Two-sided approximation for the projection onto the face support.
    pub route_ii: PropertyA,
    /// Density of the projection onto `route_iii_coords` in ℝᵏ.
    pub route_iii_dense: bool,
    pub route_iii_coords: Vec<usize>,
    pub z_set: ZSet,
    pub face: Option<FaceDescriptor>,
    pub certificate: Option<FailureCertificate>,
    pub notes: Vec<String>,
}

/// The face-support coordinates used by both routes, plus a maximal subset of
/// them on which the restrictions of ℝH stay independent.
fn route_coordinates(h: &SubgroupSpec, support: &[usize]) -> Vec<usize> {
    let g = h.matrix();
    let mut chosen: Vec<usize> = Vec::new();
    let mut rank = 0;
    for &i in support {
        let mut trial = chosen.clone();
        trial.push(i);
        let r = g.select_columns(&trial).rank();
        if r > rank {
            chosen = trial;
            rank = r;
        }
    }
    chosen
}

pub fn decide(h: &SubgroupSpec, unit: &OrderUnit) -> Result<DecisionOutcome> {
    let z_set = face::z_set_empty(h, unit)?;
    let mut notes = Vec::new();
    if !unit.is_ones() {
        notes.push(
            "weighted order unit: both routes depend only on the face support, which the \
             coordinate rescaling x ↦ (xⱼ/uⱼ) preserves"
                .to_string(),
        );
    }
    if let ZSet::Empty(_) = z_set {
        debug!("no trace vanishes on H; property (B) holds");
        return Ok(DecisionOutcome {
            verdict: Verdict::HoldsB,
            route_ii: PropertyA::Holds,
            route_iii_dense: true,
            route_iii_coords: Vec::new(),
            z_set,
            face: None,
            certificate: None,
            notes,
        });
    }
    let face = face::smallest_face(h, unit)?;
    let projected = h.project(&face.support);
    let (route_ii, (route_iii_coords, route_iii_dense)) = par::join(
        || density::property_a(&projected),
        || {
            let coords = route_coordinates(h, &face.support);
            let dense = density::dense_full_rank_primal(&h.matrix().select_columns(&coords));
            (coords, dense)
        },
    );
    if route_ii.holds() != route_iii_dense {
        return Err(Error::RouteDisagreement {
            route_ii: route_ii.holds(),
            route_iii: route_iii_dense,
        });
    }
    debug!(
        "face support {:?}, route coordinates {:?}, dense: {}",
        face.support, route_iii_coords, route_iii_dense
    );
    let (verdict, certificate) = match &route_ii {
        PropertyA::Holds => (Verdict::HoldsB, None),
        PropertyA::Fails { m } => (
            Verdict::FailsB,
            Some(build_failure_certificate(h, unit, &face, m)?),
        ),
    };
    Ok(DecisionOutcome {
        verdict,
        route_ii,
        route_iii_dense,
        route_iii_coords,
        z_set,
        face: Some(face),
        certificate,
        notes,
    })
}

fn power_of_two_shift(phi: &[Scalar], nu: &[Scalar]) -> Scalar {
    let ctx = phi[0].context();
    if phi.iter().all(Scalar::is_nonnegative) && phi.iter().any(|x| !x.is_zero()) {
        return Scalar::zero(ctx);
    }
    let mut a = Scalar::one(ctx);
    loop {
        if phi.iter().zip(nu).all(|(p, v)| (p + &(&a * v)).is_positive()) {
            return a;
        }
        a = a.scale_int(&BigInt::from(2));
    }
}

/// Builds the obstruction from a functional with integer values `m` on the
/// face-support projection.
pub fn build_failure_certificate(
    h: &SubgroupSpec,
    unit: &OrderUnit,
    face: &FaceDescriptor,
    m: &[BigInt],
) -> Result<FailureCertificate> {
    let fail = |msg: &str| Error::CertificateConstructionFailed(msg.to_string());
    let ctx = h.context();
    let n = h.ambient_dim();
    let support = &face.support;
    let nu = face
        .relative_interior
        .as_ref()
        .ok_or_else(|| fail("Z(H) is empty"))?;

    // φ on the support coordinates with φ(h′ᵢ) = mᵢ
    let g_i = h.matrix().select_columns(support);
    let rhs: Vec<Scalar> = m.iter().map(|v| Scalar::from_bigint(ctx, v)).collect();
    let phi = match g_i.solve(&rhs)? {
        SolveResult::Solution(x) => x,
        SolveResult::Infeasible(_) => return Err(fail("integer values are not attained")),
    };
    let nu_i: Vec<Scalar> = support.iter().map(|&j| nu.coords()[j].clone()).collect();
    let a = power_of_two_shift(&phi, &nu_i);
    let psi: Vec<Scalar> = phi.iter().zip(&nu_i).map(|(p, v)| p + &(&a * v)).collect();
    let c = psi
        .iter()
        .zip(support)
        .fold(Scalar::zero(ctx), |acc, (p, &j)| acc + p * &unit.coords()[j]);
    if !c.is_positive() {
        return Err(fail("shifted functional is not positive"));
    }
    let c_inv = c.inv();
    let mut tau1 = vec![Scalar::zero(ctx); n];
    for (p, &j) in psi.iter().zip(support) {
        tau1[j] = p * &c_inv;
    }
    let tau1 = TracePoint::new(tau1, unit)?;

    let values: Vec<Scalar> = h.generators().iter().map(|g| tau1.eval(g)).collect();
    let (delta, bezout) = match classify_line_group(ctx, &values) {
        LineGroupClass::Discrete { delta, bezout, .. } => (delta, bezout),
        other => return Err(fail(&format!("τ₁(H) is not cyclic: {other:?}"))),
    };
    let h_elem = h.element(&bezout);

    // λ = min(1/2, min over τ₁ⱼ > 0 of ζⱼ/τ₁ⱼ), with ζ = ν
    let zeta = nu.coords();
    let mut lambda = Scalar::from_rational(ctx, BigRational::new(1.into(), 2.into()));
    for (z, t) in zeta.iter().zip(tau1.coords()) {
        if t.is_positive() {
            let ratio = z / t;
            if ratio < lambda {
                lambda = ratio;
            }
        }
    }
    if !lambda.is_positive() {
        return Err(fail("relative-interior point misses the support of τ₁"));
    }
    let one_minus = &Scalar::one(ctx) - &lambda;
    let inv = one_minus.inv();
    let tau2: Vec<Scalar> = zeta
        .iter()
        .zip(tau1.coords())
        .map(|(z, t)| &(z - &(&lambda * t)) * &inv)
        .collect();
    let tau2 = TracePoint::new(tau2, unit)?;
    let epsilon0 = threshold(&delta, &(&one_minus / &lambda));
    Ok(FailureCertificate {
        h_coeffs: bezout,
        h: h_elem,
        tau1,
        tau2,
        lambda,
        delta,
        epsilon0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateDefect {
    #[error("certificate dimensions do not match the instance")]
    Shape,
    #[error("h is not the stated combination of generators")]
    ElementMismatch,
    #[error("τ{which} is not a normalized positive trace")]
    InvalidTrace { which: u8 },
    #[error("λ ∉ (0, 1)")]
    LambdaOutOfRange,
    #[error("λτ₁ + (1−λ)τ₂ does not vanish on H")]
    MixtureNotInZ,
    #[error("δ ≤ 0")]
    DeltaNotPositive,
    #[error("τ₁(H) ≠ ℤδ")]
    DeltaMismatch,
    #[error("τ₁(h) ≠ δ")]
    ValueAtH,
    #[error("ε₀ ≠ δ·min{{1, 1/θ}}/2")]
    EpsilonMismatch,
    #[error("modulus must be at least 2")]
    BadModulus,
    #[error("candidate {index} meets the bound −ε₀ at both traces")]
    CandidateBeatsBound { index: usize },
}

/// Exact check of every certificate invariant, then of the bound for each
/// candidate `h′` (integer coefficients) at modulus `m`.
pub fn verify_failure_certificate(
    h: &SubgroupSpec,
    unit: &OrderUnit,
    cert: &FailureCertificate,
    candidates: &[Vec<BigInt>],
    m: &BigInt,
) -> std::result::Result<(), CertificateDefect> {
    use CertificateDefect::*;
    let ctx = h.context();
    let n = h.ambient_dim();
    if cert.h_coeffs.len() != h.num_generators()
        || cert.h.len() != n
        || cert.tau1.coords().len() != n
        || cert.tau2.coords().len() != n
        || unit.dim() != n
        || candidates.iter().any(|c| c.len() != h.num_generators())
    {
        return Err(Shape);
    }
    if h.element(&cert.h_coeffs) != cert.h {
        return Err(ElementMismatch);
    }
    if cert.tau1.check(unit).is_err() {
        return Err(InvalidTrace { which: 1 });
    }
    if cert.tau2.check(unit).is_err() {
        return Err(InvalidTrace { which: 2 });
    }
    if !cert.lambda.is_positive() || cert.lambda >= Scalar::one(ctx) {
        return Err(LambdaOutOfRange);
    }
    let zeta = cert.zeta();
    if h
        .generators()
        .iter()
        .any(|g| !crate::field::dot(&zeta, g).is_zero())
    {
        return Err(MixtureNotInZ);
    }
    if !cert.delta.is_positive() {
        return Err(DeltaNotPositive);
    }
    // τ₁(H) = Zδ: each τ₁(hᵢ)/δ is an integer and together they have gcd 1
    let mut quotients = Vec::with_capacity(h.num_generators());
    for g in h.generators() {
        let q = &cert.tau1.eval(g) / &cert.delta;
        match q.as_rational() {
            Some(r) if r.is_integer() => quotients.push(r.to_integer()),
            _ => return Err(DeltaMismatch),
        }
    }
    if !density::gcd_with_bezout(&quotients).0.is_one() {
        return Err(DeltaMismatch);
    }
    if cert.tau1.eval(&cert.h) != cert.delta {
        return Err(ValueAtH);
    }
    if threshold(&cert.delta, &cert.theta()) != cert.epsilon0 {
        return Err(EpsilonMismatch);
    }
    if *m < BigInt::from(2) {
        return Err(BadModulus);
    }
    let bound = -&cert.epsilon0;
    let m_s = Scalar::from_bigint(ctx, m);
    for (index, c) in candidates.iter().enumerate() {
        let hp = h.element(c);
        let diff: Vec<Scalar> = cert.h.iter().zip(&hp).map(|(a, b)| a - &(&m_s * b)).collect();
        let v1 = cert.tau1.eval(&diff);
        let v2 = cert.tau2.eval(&diff);
        if v1 >= bound && v2 >= bound {
            return Err(CandidateBeatsBound { index });
        }
    }
    Ok(())
}

/// The two-point shortcut: when Z(H) is the single trace `(τ₁ + τ₂)/2`,
/// property (B) holds iff `τ₁(H)` is dense.
pub fn decide_two_point(h: &SubgroupSpec) -> Result<Verdict> {
    let ctx = h.context();
    let n = h.ambient_dim();
    if n < 2 {
        return Err(Error::PreconditionNotMet("ambient dimension must be at least 2".into()));
    }
    let unit = OrderUnit::ones(ctx, n);
    let face = face::smallest_face(h, &unit)?;
    let half = Scalar::from_rational(ctx, BigRational::new(1.into(), 2.into()));
    let singleton = face.support == [0, 1]
        && face
            .maximizers
            .iter()
            .all(|(_, tp)| tp.coords()[0] == half && tp.coords()[1] == half);
    if !singleton {
        return Err(Error::PreconditionNotMet(
            "Z(H) is not the single trace (τ₁ + τ₂)/2".into(),
        ));
    }
    let values: Vec<Scalar> = h.generators().iter().map(|g| g[0].clone()).collect();
    Ok(if classify_line_group(ctx, &values).is_dense() {
        Verdict::HoldsB
    } else {
        Verdict::FailsB
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn standard_lattices_hold() {
        let q = FieldContext::rationals();
        for n in 1..=4 {
            let h = SubgroupSpec::standard_lattice(&q, n);
            let out = decide(&h, &OrderUnit::ones(&q, n)).unwrap();
            assert_eq!(out.verdict, Verdict::HoldsB);
        }
    }

    #[test]
    fn antidiagonal_fails_with_expected_certificate() {
        let q = FieldContext::rationals();
        let u = OrderUnit::ones(&q, 2);
        let h = SubgroupSpec::from_ints(&q, 2, &[vec![1, -1]]).unwrap();
        let out = decide(&h, &u).unwrap();
        assert_eq!(out.verdict, Verdict::FailsB);
        let c = out.certificate.unwrap();
        let s = |n, d| Scalar::from_rational(&q, r(n, d));
        assert_eq!(c.tau1.coords(), &[s(1, 1), s(0, 1)]);
        assert_eq!(c.tau2.coords(), &[s(0, 1), s(1, 1)]);
        assert_eq!(c.lambda, s(1, 2));
        assert_eq!(c.delta, s(1, 1));
        assert_eq!(c.epsilon0, s(1, 2));
        let cands: Vec<Vec<BigInt>> = (-50..=50).map(|a| vec![BigInt::from(a)]).collect();
        assert_eq!(verify_failure_certificate(&h, &u, &c, &cands, &BigInt::from(2)), Ok(()));

        let mut bad = c.clone();
        bad.delta = s(2, 1);
        assert_eq!(
            verify_failure_certificate(&h, &u, &bad, &[], &BigInt::from(2)).unwrap_err().to_string(),
            "τ₁(H) ≠ ℤδ"
        );
    }

    #[test]
    fn scaled_and_padded_examples() {
        let q = FieldContext::rationals();
        let h = SubgroupSpec::from_ints(&q, 2, &[vec![2, -2]]).unwrap();
        let c = decide(&h, &OrderUnit::ones(&q, 2)).unwrap().certificate.unwrap();
        assert_eq!(c.delta, Scalar::from_int(&q, 2));
        assert_eq!(c.epsilon0, Scalar::one(&q));

        let h = SubgroupSpec::from_ints(&q, 3, &[vec![1, -1, 0]]).unwrap();
        let u = OrderUnit::ones(&q, 3);
        let c = decide(&h, &u).unwrap().certificate.unwrap();
        assert_eq!(c.tau1.support(), vec![0]);
        let third = Scalar::from_rational(&q, r(1, 3));
        assert_eq!(c.zeta(), vec![third.clone(), third.clone(), third.clone()]);
        // λ = 1/3, so θ = 2 and the threshold is δ/(2θ); h′ = 0 sits at τ₂(h) = −1/2
        assert_eq!(c.lambda, third);
        assert_eq!(c.epsilon0, Scalar::from_rational(&q, r(1, 4)));
        let zero = vec![BigInt::from(0)];
        assert_eq!(verify_failure_certificate(&h, &u, &c, &[zero], &BigInt::from(2)), Ok(()));
    }

    #[test]
    fn irrational_pair_holds() {
        let ctx = FieldContext::quadratic(2).unwrap();
        let s2 = Scalar::generator(&ctx);
        let one = Scalar::one(&ctx);
        let h = SubgroupSpec::new(&ctx, 2, vec![vec![one.clone(), -&one], vec![s2.clone(), -&s2]]).unwrap();
        let out = decide(&h, &OrderUnit::ones(&ctx, 2)).unwrap();
        assert_eq!(out.verdict, Verdict::HoldsB);
        assert_eq!(decide_two_point(&h).unwrap(), Verdict::HoldsB);
    }

    #[test]
    fn two_point_precondition() {
        let q = FieldContext::rationals();
        let h = SubgroupSpec::from_ints(&q, 2, &[vec![1, -1]]).unwrap();
        assert_eq!(decide_two_point(&h).unwrap(), Verdict::FailsB);
        let h = SubgroupSpec::from_ints(&q, 3, &[vec![1, -1, 0]]).unwrap();
        assert!(matches!(decide_two_point(&h), Err(Error::PreconditionNotMet(_))));
    }
}
