//! The set Z(H) of normalized traces vanishing on H, its support, and the
//! smallest face of the trace simplex containing it.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::{self, IntMatrix, Matrix};
use crate::par;
use crate::simplex::{gordan, GordanResult, LpOutcome, LpProblem};
use crate::subgroup::{OrderUnit, SubgroupSpec, TracePoint};

/// An element `v = Σ xᵢhᵢ` of H with every coordinate at least `margin > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositivityCertificate {
    pub x: Vec<BigInt>,
    pub v: Vec<Scalar>,
    pub margin: Scalar,
}

impl PositivityCertificate {
    pub fn verify(&self, h: &SubgroupSpec) -> bool {
        self.x.len() == h.num_generators()
            && h.element(&self.x) == self.v
            && self.margin.is_positive()
            && self.v.iter().all(|c| c >= &self.margin)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZSet {
    Empty(PositivityCertificate),
    Nonempty(TracePoint),
}

impl ZSet {
    pub fn is_empty(&self) -> bool {
        matches!(self, ZSet::Empty(_))
    }
}

/// Support data for the smallest face containing Z(H).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceDescriptor {
    pub n: usize,
    /// Coordinates `i` with `max{aᵢ : a ∈ Z(H)} > 0`, increasing.
    pub support: Vec<usize>,
    /// Average of the per-coordinate maximizers; positive exactly on `support`.
    pub relative_interior: Option<TracePoint>,
    /// `(i, maximizer of aᵢ)` for each support coordinate.
    pub maximizers: Vec<(usize, TracePoint)>,
}

fn check_unit(h: &SubgroupSpec, unit: &OrderUnit) -> Result<()> {
    if unit.dim() != h.ambient_dim() {
        return Err(Error::InvalidInput(format!(
            "order unit has {} coordinates, ambient dimension is {}",
            unit.dim(),
            h.ambient_dim()
        )));
    }
    OrderUnit::new(unit.coords().to_vec()).map(|_| ())
}

/// `H a = 0`, `Σ uᵢaᵢ = 1`, `a ≥ 0` with objective `c`.
fn z_program(h: &SubgroupSpec, unit: &OrderUnit, c: Vec<Scalar>) -> LpProblem {
    let ctx = h.context();
    let mut rows: Vec<Vec<Scalar>> = h.generators().to_vec();
    rows.push(unit.coords().to_vec());
    let mut b = vec![Scalar::zero(ctx); h.num_generators()];
    b.push(Scalar::one(ctx));
    let a = Matrix::new(ctx, rows, h.ambient_dim()).expect("validated shape");
    LpProblem::new(a, b, c).expect("validated shape")
}

/// Decides whether some normalized trace vanishes on H. When none does, H
/// contains a strictly positive element, returned with integer coefficients.
pub fn z_set_empty(h: &SubgroupSpec, unit: &OrderUnit) -> Result<ZSet> {
    check_unit(h, unit)?;
    let ctx = h.context();
    let lp = z_program(h, unit, vec![Scalar::zero(ctx); h.ambient_dim()]);
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => Ok(ZSet::Nonempty(TracePoint::unchecked(x))),
        LpOutcome::Infeasible { .. } => match gordan(&h.matrix()) {
            GordanResult::AltII { x, values } => {
                let margin = values.iter().min().cloned().expect("n ≥ 1");
                Ok(ZSet::Empty(PositivityCertificate { x, v: values, margin }))
            }
            GordanResult::AltI { .. } => Err(Error::CertificateConstructionFailed(
                "trace program infeasible but a nonnegative kernel vector exists".into(),
            )),
        },
        LpOutcome::Unbounded { .. } => unreachable!("zero objective"),
    }
}

/// Runs one support program per coordinate, in parallel when enabled.
pub fn smallest_face(h: &SubgroupSpec, unit: &OrderUnit) -> Result<FaceDescriptor> {
    check_unit(h, unit)?;
    let ctx = h.context();
    let n = h.ambient_dim();
    let coords: Vec<usize> = (0..n).collect();
    let results: Vec<Option<Vec<Scalar>>> = par::map(&coords, |&i| {
        let mut c = vec![Scalar::zero(ctx); n];
        c[i] = Scalar::one(ctx);
        match z_program(h, unit, c).solve() {
            LpOutcome::Optimal { x, value, .. } if value.is_positive() => Some(x),
            _ => None,
        }
    });
    let maximizers: Vec<(usize, TracePoint)> = results
        .into_iter()
        .enumerate()
        .filter_map(|(i, x)| x.map(|x| (i, TracePoint::unchecked(x))))
        .collect();
    let support: Vec<usize> = maximizers.iter().map(|(i, _)| *i).collect();
    let relative_interior = if maximizers.is_empty() {
        None
    } else {
        let k = BigRational::new(BigInt::from(1), BigInt::from(maximizers.len()));
        let mut avg = vec![Scalar::zero(ctx); n];
        for (_, tp) in &maximizers {
            for (a, x) in avg.iter_mut().zip(tp.coords()) {
                *a = &*a + x;
            }
        }
        Some(TracePoint::unchecked(avg.iter().map(|a| a.scale(&k)).collect()))
    };
    Ok(FaceDescriptor {
        n,
        support,
        relative_interior,
        maximizers,
    })
}

/// Z-set data for the kernel of a trace on G.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelFace {
    /// Integer coefficient vectors over G's generators spanning `ker τ ∩ G`.
    pub kernel_coeffs: Vec<Vec<BigInt>>,
    pub kernel: SubgroupSpec,
    pub z_set: ZSet,
    pub face: FaceDescriptor,
}

/// Integer relations `Σ cᵢ·valuesᵢ = 0`, via θ-slices and Smith normal form.
pub(crate) fn integer_relations(h: &SubgroupSpec, values: &[Scalar]) -> Vec<Vec<BigInt>> {
    let slices = linalg::rational_components(values, h.context().degree());
    let rows: Vec<Vec<BigInt>> = slices
        .iter()
        .map(|s| linalg::primitive_integer_vector(s))
        .collect();
    IntMatrix::new(rows, values.len())
        .expect("rectangular")
        .integer_kernel()
}

pub fn z_set_of_kernel(g: &SubgroupSpec, unit: &OrderUnit, tau: &TracePoint) -> Result<KernelFace> {
    check_unit(g, unit)?;
    tau.check(unit)?;
    let values: Vec<Scalar> = g.generators().iter().map(|x| tau.eval(x)).collect();
    let kernel_coeffs = integer_relations(g, &values);
    let gens = kernel_coeffs.iter().map(|c| g.element(c)).collect();
    let kernel = SubgroupSpec::new(g.context(), g.ambient_dim(), gens)?;
    Ok(KernelFace {
        z_set: z_set_empty(&kernel, unit)?,
        face: smallest_face(&kernel, unit)?,
        kernel_coeffs,
        kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;

    fn half(ctx: &std::sync::Arc<FieldContext>) -> Scalar {
        Scalar::from_rational(ctx, BigRational::new(1.into(), 2.into()))
    }

    #[test]
    fn z_set_examples() {
        let q = FieldContext::rationals();
        let u = OrderUnit::ones(&q, 2);
        let h = SubgroupSpec::from_ints(&q, 2, &[vec![1, -1]]).unwrap();
        match z_set_empty(&h, &u).unwrap() {
            ZSet::Nonempty(tp) => assert_eq!(tp.coords(), &[half(&q), half(&q)]),
            other => panic!("{other:?}"),
        }
        let h = SubgroupSpec::from_ints(&q, 2, &[vec![1, 1]]).unwrap();
        match z_set_empty(&h, &u).unwrap() {
            ZSet::Empty(cert) => {
                assert_eq!(cert.x, vec![BigInt::from(1)]);
                assert!(cert.verify(&h));
            }
            other => panic!("{other:?}"),
        }
        let h = SubgroupSpec::from_ints(&q, 2, &[vec![2, -1], vec![-1, 2]]).unwrap();
        match z_set_empty(&h, &u).unwrap() {
            ZSet::Empty(cert) => {
                assert!(cert.verify(&h));
                assert_eq!(cert.x, vec![BigInt::from(1), BigInt::from(1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn face_examples() {
        let q = FieldContext::rationals();
        let h = SubgroupSpec::from_ints(&q, 2, &[vec![1, -1]]).unwrap();
        assert_eq!(smallest_face(&h, &OrderUnit::ones(&q, 2)).unwrap().support, vec![0, 1]);
        let u3 = OrderUnit::ones(&q, 3);
        let h = SubgroupSpec::from_ints(&q, 3, &[vec![1, 1, 0]]).unwrap();
        assert_eq!(smallest_face(&h, &u3).unwrap().support, vec![2]);
        let h = SubgroupSpec::from_ints(&q, 3, &[vec![1, -1, 0]]).unwrap();
        let f = smallest_face(&h, &u3).unwrap();
        assert_eq!(f.support, vec![0, 1, 2]);
        let third = Scalar::from_rational(&q, BigRational::new(1.into(), 3.into()));
        assert_eq!(f.relative_interior.unwrap().coords(), &[third.clone(), third.clone(), third]);
    }

    #[test]
    fn kernel_of_trace() {
        let q = FieldContext::rationals();
        let g = SubgroupSpec::standard_lattice(&q, 2);
        let u = OrderUnit::ones(&q, 2);
        let tau = TracePoint::new(vec![half(&q), half(&q)], &u).unwrap();
        let kf = z_set_of_kernel(&g, &u, &tau).unwrap();
        assert_eq!(kf.kernel_coeffs.len(), 1);
        let k = &kf.kernel_coeffs[0];
        assert_eq!(&k[0] + &k[1], BigInt::from(0));
        assert!(matches!(kf.z_set, ZSet::Nonempty(_)));

        let g = SubgroupSpec::standard_lattice(&q, 1);
        let u = OrderUnit::ones(&q, 1);
        let tau = TracePoint::new(vec![Scalar::one(&q)], &u).unwrap();
        let kf = z_set_of_kernel(&g, &u, &tau).unwrap();
        assert!(kf.kernel_coeffs.is_empty());
        assert_eq!(kf.face.support, vec![0]);
    }
}
