//! Ordered groups G ⊂ ℝⁿ with a subgroup H: purity, a sufficient convexity
//! test, unperforation of G/H, and refinability of traces on critical groups.

use log::debug;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::decision::{self, FailureCertificate, Verdict};
use crate::density;
use crate::error::{Error, Result};
use crate::face::{self, ZSet};
use crate::field::Scalar;
use crate::linalg::{self, IntMatrix};
use crate::subgroup::{OrderUnit, SubgroupSpec, TracePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupOrdering {
    /// Positive cone `{0} ∪ (ℝⁿ)⁺⁺`.
    Strict,
    /// Positive cone `(ℝⁿ)⁺`.
    Coordinatewise,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedGroupSpec {
    pub g: SubgroupSpec,
    pub ordering: GroupOrdering,
    pub unit: OrderUnit,
    /// Coefficients of the order unit over G's generators.
    pub unit_coeffs: Vec<BigInt>,
}

/// Integer coefficients `c` with `Σ cᵢ gᵢ = x`, if any.
pub fn coefficients_in(g: &SubgroupSpec, x: &[Scalar]) -> Option<Vec<BigInt>> {
    let d = g.context().degree();
    let n = g.ambient_dim();
    let t = g.num_generators();
    let mut rows = Vec::with_capacity(n * d);
    let mut rhs = Vec::with_capacity(n * d);
    for j in 0..n {
        for k in 0..d {
            let mut row: Vec<BigRational> = g.generators().iter().map(|gi| gi[j].coeffs()[k].clone()).collect();
            row.push(x[j].coeffs()[k].clone());
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, q| num_integer::Integer::lcm(&acc, q.denom()));
            let scaled: Vec<BigInt> = row
                .iter()
                .map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer())
                .collect();
            rhs.push(scaled[t].clone());
            rows.push(scaled[..t].to_vec());
        }
    }
    if t == 0 {
        return x.iter().all(Scalar::is_zero).then(Vec::new);
    }
    IntMatrix::new(rows, t).ok()?.integer_solve(&rhs)
}

/// Rank over Z of the generators, via their θ-slices.
fn z_rank(g: &SubgroupSpec) -> usize {
    let d = g.context().degree();
    let rows: Vec<Vec<BigRational>> = g
        .generators()
        .iter()
        .map(|gi| {
            linalg::rational_components(gi, d)
                .into_iter()
                .flatten()
                .collect()
        })
        .collect();
    linalg::rank_q(&rows)
}

fn dense_in_ambient(g: &SubgroupSpec) -> bool {
    g.matrix().rank() == g.ambient_dim() && density::property_a(g).holds()
}

impl OrderedGroupSpec {
    /// Validates the unit (strictly positive, in G) and, for the strict
    /// ordering, density of G in ℝⁿ.
    pub fn new(g: SubgroupSpec, ordering: GroupOrdering, unit: OrderUnit) -> Result<Self> {
        if unit.dim() != g.ambient_dim() {
            return Err(Error::InvalidInput("order unit dimension differs from G".into()));
        }
        let unit_coeffs = coefficients_in(&g, unit.coords())
            .ok_or_else(|| Error::InvalidInput("order unit is not an element of G".into()))?;
        if ordering == GroupOrdering::Strict && !dense_in_ambient(&g) {
            return Err(Error::NotDense);
        }
        Ok(OrderedGroupSpec {
            g,
            ordering,
            unit,
            unit_coeffs,
        })
    }

    /// The subgroup of ℝⁿ generated by the rows of `h_in_g` read as G-coefficients.
    pub fn subgroup(&self, h_in_g: &IntMatrix) -> Result<SubgroupSpec> {
        if h_in_g.ncols != self.g.num_generators() {
            return Err(Error::InvalidInput(format!(
                "inclusion matrix has {} columns, G has {} generators",
                h_in_g.ncols,
                self.g.num_generators()
            )));
        }
        let gens = h_in_g.data.iter().map(|row| self.g.element(row)).collect();
        SubgroupSpec::new(self.g.context(), self.g.ambient_dim(), gens)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Purity {
    TorsionFree,
    /// `k·g ∈ H` with `g ∉ H`; `g_coeffs` are over G's generators.
    Torsion {
        k: BigInt,
        g_coeffs: Vec<BigInt>,
        g: Vec<Scalar>,
    },
}

pub fn check_pure(spec: &OrderedGroupSpec, h_in_g: &IntMatrix) -> Result<Purity> {
    let t = spec.g.num_generators();
    if z_rank(&spec.g) != t {
        return Err(Error::DependentGenerators);
    }
    if h_in_g.ncols != t {
        return Err(Error::InvalidInput("inclusion matrix width differs from G's generator count".into()));
    }
    if h_in_g.nrows == 0 {
        return Ok(Purity::TorsionFree);
    }
    let smith = h_in_g.smith();
    for (i, d) in smith.diagonal().iter().enumerate() {
        if !d.is_zero() && !d.is_one() {
            let g_coeffs = smith.v_inv.data[i].clone();
            let g = spec.g.element(&g_coeffs);
            return Ok(Purity::Torsion {
                k: d.clone(),
                g_coeffs,
                g,
            });
        }
    }
    Ok(Purity::TorsionFree)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Convexity {
    ConvexByTrivialIntersection,
    Unknown,
}

/// `H ∩ G⁺ = {0}` implies convexity. Under the strict ordering this holds
/// iff some trace vanishes on H; under the coordinatewise ordering a trace
/// vanishing on H with full support suffices.
pub fn check_convex_sufficient(spec: &OrderedGroupSpec, h: &SubgroupSpec) -> Result<Convexity> {
    let trivial = match spec.ordering {
        GroupOrdering::Strict => !face::z_set_empty(h, &spec.unit)?.is_empty(),
        GroupOrdering::Coordinatewise => {
            face::smallest_face(h, &spec.unit)?.support.len() == h.ambient_dim()
        }
    };
    Ok(if trivial {
        Convexity::ConvexByTrivialIntersection
    } else {
        Convexity::Unknown
    })
}

/// `g ∈ G` and `m ≥ 2` with `m·g + h ≫ 0` for the recorded `h ∈ H`, while no
/// translate `g + h` is positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerforationInstance {
    pub g_coeffs: Vec<BigInt>,
    pub g: Vec<Scalar>,
    pub m: u32,
    /// Coefficients over H's generators of the `h` making `m·g + h ≫ 0`.
    pub h_coeffs: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unperforation {
    Unperforated,
    Perforated {
        certificate: Box<FailureCertificate>,
        instance: Option<PerforationInstance>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnperforationReport {
    pub verdict: Unperforation,
    pub convexity_assumed: bool,
}

/// Exact check of a perforation instance against a certificate for H.
pub fn verify_perforation(
    spec: &OrderedGroupSpec,
    h: &SubgroupSpec,
    cert: &FailureCertificate,
    inst: &PerforationInstance,
) -> bool {
    if inst.m < 2 || spec.g.element(&inst.g_coeffs) != inst.g {
        return false;
    }
    if inst.h_coeffs.len() != h.num_generators() {
        return false;
    }
    let hv = h.element(&inst.h_coeffs);
    let m = BigInt::from(inst.m);
    let positive = inst
        .g
        .iter()
        .zip(&hv)
        .all(|(g, hh)| (&g.scale_int(&m) + hh).is_positive());
    positive && !in_subgroup(h, &inst.g) && translates_avoid_cone(cert, &inst.g)
}

fn in_subgroup(h: &SubgroupSpec, x: &[Scalar]) -> bool {
    coefficients_in(h, x).is_some()
}

/// Whether some integer `k` gives `τ₁(x) + kδ > 0` and `τ₂(x) − kδ/θ > 0`.
/// Since `τ₁(H) = Zδ` and `τ₂ = −τ₁/θ` on H, this is necessary for some
/// `x + h` to be strictly positive.
fn trace_window_has_integer(cert: &FailureCertificate, x: &[Scalar]) -> bool {
    let lo = &(-cert.tau1.eval(x)) / &cert.delta;
    let hi = &(&cert.theta() * &cert.tau2.eval(x)) / &cert.delta;
    let first = Scalar::from_bigint(lo.context(), &(lo.floor() + BigInt::one()));
    first < hi
}

/// No translate `g + h` is strictly positive.
fn translates_avoid_cone(cert: &FailureCertificate, g: &[Scalar]) -> bool {
    !trace_window_has_integer(cert, g)
}

const PERFORATION_RADIUS: i64 = 32;
const PERFORATION_MAX_M: u32 = 5;

fn box_shell(t: usize, inner: i64, outer: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut a = vec![-outer; t];
    if t == 0 {
        return out;
    }
    loop {
        if a.iter().any(|x| x.abs() > inner) {
            out.push(a.clone());
        }
        let mut k = t;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if a[k] < outer {
                a[k] += 1;
                break;
            }
            a[k] = -outer;
        }
    }
}

fn find_perforation(
    spec: &OrderedGroupSpec,
    h: &SubgroupSpec,
    cert: &FailureCertificate,
) -> Option<PerforationInstance> {
    let t = spec.g.num_generators();
    let s = h.num_generators();
    let h_boxes: Vec<Vec<i64>> = (0..=PERFORATION_RADIUS)
        .flat_map(|r| if r == 0 { vec![vec![0; s]] } else { box_shell(s, r - 1, r) })
        .collect();
    for r in 1..=PERFORATION_RADIUS {
        for c in box_shell(t, r - 1, r) {
            let g_coeffs: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
            let g = spec.g.element(&g_coeffs);
            if !translates_avoid_cone(cert, &g) || in_subgroup(h, &g) {
                continue;
            }
            for m in 2..=PERFORATION_MAX_M {
                let mg: Vec<Scalar> = g.iter().map(|x| x.scale_int(&BigInt::from(m))).collect();
                if !trace_window_has_integer(cert, &mg) {
                    continue;
                }
                for b in &h_boxes {
                    let h_coeffs: Vec<BigInt> = b.iter().map(|&x| BigInt::from(x)).collect();
                    let hv = h.element(&h_coeffs);
                    if mg.iter().zip(&hv).all(|(x, y)| (x + y).is_positive()) {
                        debug!("perforation instance at radius {r}, m = {m}");
                        return Some(PerforationInstance {
                            g_coeffs,
                            g,
                            m,
                            h_coeffs,
                        });
                    }
                }
            }
        }
    }
    None
}

/// G/H is unperforated iff H has property (B) inside G.
pub fn unperforation_verdict(
    spec: &OrderedGroupSpec,
    h_in_g: &IntMatrix,
    assume_convex: bool,
) -> Result<UnperforationReport> {
    if spec.ordering != GroupOrdering::Strict {
        return Err(Error::RequiresStrictOrdering);
    }
    if let Purity::Torsion { k, .. } = check_pure(spec, h_in_g)? {
        return Err(Error::NotPure { k: k.to_string() });
    }
    let h = spec.subgroup(h_in_g)?;
    if !assume_convex && check_convex_sufficient(spec, &h)? == Convexity::Unknown {
        return Err(Error::ConvexityNotEstablished);
    }
    let outcome = decision::decide(&h, &spec.unit)?;
    let verdict = match outcome.verdict {
        Verdict::HoldsB => Unperforation::Unperforated,
        Verdict::FailsB => {
            let cert = outcome.certificate.expect("failing verdicts carry a certificate");
            let instance = find_perforation(spec, &h, &cert);
            Unperforation::Perforated {
                certificate: Box::new(cert),
                instance,
            }
        }
    };
    Ok(UnperforationReport {
        verdict,
        convexity_assumed: assume_convex,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refinability {
    Refinable,
    NotRefinable {
        kernel_coeffs: Vec<BigInt>,
        kernel_element: Vec<Scalar>,
    },
}

/// On a critical group (free of rank n+1, dense in ℝⁿ, strict ordering), a
/// trace is refinable iff its kernel on G is trivial. `functional` holds the
/// coefficients of τ and is rescaled so that τ(u) = 1.
pub fn critical_refinable(spec: &OrderedGroupSpec, functional: &[Scalar]) -> Result<(Refinability, TracePoint)> {
    let n = spec.g.ambient_dim();
    let t = spec.g.num_generators();
    if spec.ordering != GroupOrdering::Strict {
        return Err(Error::RequiresStrictOrdering);
    }
    if t != n + 1 {
        return Err(Error::NotCritical(format!("G has {t} generators, expected {}", n + 1)));
    }
    if z_rank(&spec.g) != t {
        return Err(Error::NotCritical("generators are not independent over Z".into()));
    }
    if !dense_in_ambient(&spec.g) {
        return Err(Error::NotCritical("G is not dense in its ambient space".into()));
    }
    if functional.len() != n {
        return Err(Error::InvalidTrace(format!("{} coefficients for dimension {n}", functional.len())));
    }
    let at_unit = crate::field::dot(functional, spec.unit.coords());
    if !at_unit.is_positive() {
        return Err(Error::InvalidTrace("functional is not positive at the order unit".into()));
    }
    let inv = at_unit.inv();
    let tau = TracePoint::new(functional.iter().map(|a| a * &inv).collect(), &spec.unit)?;
    let values: Vec<Scalar> = spec.g.generators().iter().map(|g| tau.eval(g)).collect();
    let kernel = face::integer_relations(&spec.g, &values);
    let verdict = match kernel.into_iter().next() {
        None => Refinability::Refinable,
        Some(mut c) => {
            if c.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
                c.iter_mut().for_each(|x| *x = -&*x);
            }
            let e = spec.g.element(&c);
            Refinability::NotRefinable {
                kernel_coeffs: c,
                kernel_element: e,
            }
        }
    };
    Ok((verdict, tau))
}

/// Whether Z(H) is empty for the order unit of `spec`; exposed for reports.
pub fn z_set(spec: &OrderedGroupSpec, h: &SubgroupSpec) -> Result<ZSet> {
    face::z_set_empty(h, &spec.unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;
    use std::sync::Arc;

    fn theta_ctx() -> Arc<FieldContext> {
        let r = |n: i64| BigRational::from_integer(n.into());
        FieldContext::new(vec![r(1), r(0), r(-10), r(0), r(1)], r(3), r(4)).unwrap()
    }

    /// Z² + Z(√2, √3) over Q(√2 + √3).
    fn holey_group() -> OrderedGroupSpec {
        let ctx = theta_ctx();
        let t = Scalar::generator(&ctx);
        let t3 = &(&t * &t) * &t;
        let half = BigRational::new(1.into(), 2.into());
        let sqrt2 = (&t3 - &t.scale(&BigRational::from_integer(9.into()))).scale(&half);
        let sqrt3 = (&t.scale(&BigRational::from_integer(11.into())) - &t3).scale(&half);
        let one = Scalar::one(&ctx);
        let zero = Scalar::zero(&ctx);
        let g = SubgroupSpec::new(
            &ctx,
            2,
            vec![vec![one.clone(), zero.clone()], vec![zero, one.clone()], vec![sqrt2, sqrt3]],
        )
        .unwrap();
        OrderedGroupSpec::new(g, GroupOrdering::Strict, OrderUnit::ones(&ctx, 2)).unwrap()
    }

    #[test]
    fn purity_examples() {
        let q = FieldContext::rationals();
        let z2 = SubgroupSpec::standard_lattice(&q, 2);
        let spec = OrderedGroupSpec::new(z2, GroupOrdering::Coordinatewise, OrderUnit::ones(&q, 2)).unwrap();
        assert_eq!(check_pure(&spec, &IntMatrix::from_i64(&[vec![1, -1]])).unwrap(), Purity::TorsionFree);
        match check_pure(&spec, &IntMatrix::from_i64(&[vec![2, 0]])).unwrap() {
            Purity::Torsion { k, g_coeffs, .. } => {
                assert_eq!(k, BigInt::from(2));
                assert_eq!(g_coeffs[1], BigInt::from(0));
                assert!(g_coeffs[0].abs().is_one());
            }
            other => panic!("{other:?}"),
        }
        let spec = holey_group();
        assert_eq!(check_pure(&spec, &IntMatrix::from_i64(&[vec![-1, 1, 0]])).unwrap(), Purity::TorsionFree);
    }

    #[test]
    fn strict_ordering_requires_density() {
        let q = FieldContext::rationals();
        let z2 = SubgroupSpec::standard_lattice(&q, 2);
        assert_eq!(
            OrderedGroupSpec::new(z2, GroupOrdering::Strict, OrderUnit::ones(&q, 2)).unwrap_err(),
            Error::NotDense
        );
    }

    #[test]
    fn holey_quotient() {
        let spec = holey_group();
        let h_in_g = IntMatrix::from_i64(&[vec![-1, 1, 0]]);
        let h = spec.subgroup(&h_in_g).unwrap();
        assert_eq!(check_convex_sufficient(&spec, &h).unwrap(), Convexity::ConvexByTrivialIntersection);
        let report = unperforation_verdict(&spec, &h_in_g, false).unwrap();
        match report.verdict {
            Unperforation::Perforated { certificate, instance } => {
                let inst = instance.expect("instance within the search box");
                assert!(verify_perforation(&spec, &h, &certificate, &inst));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn convexity_examples() {
        let q = FieldContext::rationals();
        let z2 = SubgroupSpec::standard_lattice(&q, 2);
        let spec = OrderedGroupSpec::new(z2, GroupOrdering::Coordinatewise, OrderUnit::ones(&q, 2)).unwrap();
        let h = spec.subgroup(&IntMatrix::from_i64(&[vec![1, 1]])).unwrap();
        assert_eq!(check_convex_sufficient(&spec, &h).unwrap(), Convexity::Unknown);
        let h = spec.subgroup(&IntMatrix { nrows: 0, ncols: 2, data: vec![] }).unwrap();
        assert_eq!(check_convex_sufficient(&spec, &h).unwrap(), Convexity::ConvexByTrivialIntersection);
    }

    #[test]
    fn refinability_examples() {
        let spec = holey_group();
        let ctx = spec.g.context().clone();
        let one = Scalar::one(&ctx);
        let zero = Scalar::zero(&ctx);
        match critical_refinable(&spec, &[one.clone(), zero.clone()]).unwrap().0 {
            Refinability::NotRefinable { kernel_coeffs, .. } => {
                assert_eq!(kernel_coeffs, vec![BigInt::from(0), BigInt::from(1), BigInt::from(0)]);
            }
            other => panic!("{other:?}"),
        }
        let sqrt2 = spec.g.generators()[2][0].clone();
        assert_eq!(critical_refinable(&spec, &[one, sqrt2]).unwrap().0, Refinability::Refinable);

        let q2 = FieldContext::quadratic(2).unwrap();
        let g = SubgroupSpec::new(&q2, 1, vec![vec![Scalar::one(&q2)], vec![Scalar::generator(&q2)]]).unwrap();
        let spec = OrderedGroupSpec::new(g, GroupOrdering::Strict, OrderUnit::ones(&q2, 1)).unwrap();
        assert_eq!(critical_refinable(&spec, &[Scalar::one(&q2)]).unwrap().0, Refinability::Refinable);
    }

    #[test]
    fn line_group_with_trivial_subgroup_is_unperforated() {
        let q2 = FieldContext::quadratic(2).unwrap();
        let g = SubgroupSpec::new(&q2, 1, vec![vec![Scalar::one(&q2)], vec![Scalar::generator(&q2)]]).unwrap();
        let spec = OrderedGroupSpec::new(g, GroupOrdering::Strict, OrderUnit::ones(&q2, 1)).unwrap();
        let h_in_g = IntMatrix { nrows: 0, ncols: 2, data: vec![] };
        let report = unperforation_verdict(&spec, &h_in_g, false).unwrap();
        assert_eq!(report.verdict, Unperforation::Unperforated);
    }
}
