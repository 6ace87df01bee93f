//! Finding and checking explicit approximants: `h′ ∈ H` with
//! `h − m·h′ ≥ −ε·u` coordinatewise.

use log::{debug, trace};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::decision::{self, FailureCertificate, Verdict};
use crate::error::Error;
use crate::face::ZSet;
use crate::field::Scalar;
use crate::lattice;
use crate::linalg::Matrix;
use crate::par;
use crate::simplex::{LpOutcome, LpProblem};
use crate::subgroup::{OrderUnit, SubgroupSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchTier {
    Positivity,
    Structured,
    Enumeration,
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// `h′ = Σ coeffsᵢ hᵢ`.
    pub coeffs: Vec<BigInt>,
    pub m: BigInt,
    pub epsilon: BigRational,
    pub h_coeffs: Vec<BigInt>,
    /// Coordinates of `h − m·h′`.
    pub slack: Vec<Scalar>,
    pub found_by: SearchTier,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("coordinate {coordinate} has slack {slack}, below the allowed bound")]
pub struct Rejection {
    pub coordinate: usize,
    pub slack: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("property (B) fails, so no witness exists for some (h, ε)")]
    NoWitnessExists(Box<FailureCertificate>),
    #[error("no witness found within box radius {radius}")]
    BudgetExhausted { radius: u64 },
    #[error("modulus must be at least 2 and ε positive")]
    BadParameters,
    #[error(transparent)]
    Engine(#[from] Error),
}

fn check_params(m: &BigInt, eps: &BigRational) -> Result<(), WitnessError> {
    if *m < BigInt::from(2) || !eps.is_positive() {
        return Err(WitnessError::BadParameters);
    }
    Ok(())
}

/// Exact check of `h − m·Σ aᵢhᵢ ≥ −ε·u`. With the all-ones unit this is the
/// plain coordinatewise bound.
pub fn verify_witness(
    h: &SubgroupSpec,
    unit: &OrderUnit,
    h_coeffs: &[BigInt],
    m: &BigInt,
    eps: &BigRational,
    coeffs: &[BigInt],
) -> Result<Witness, Rejection> {
    let ctx = h.context();
    let target = h.element(h_coeffs);
    let hp = h.element(coeffs);
    let m_s = Scalar::from_bigint(ctx, m);
    let slack: Vec<Scalar> = target.iter().zip(&hp).map(|(a, b)| a - &(&m_s * b)).collect();
    for (j, (s, u)) in slack.iter().zip(unit.coords()).enumerate() {
        if s + &u.scale(eps) < Scalar::zero(ctx) {
            return Err(Rejection {
                coordinate: j,
                slack: s.clone(),
            });
        }
    }
    Ok(Witness {
        coeffs: coeffs.to_vec(),
        m: m.clone(),
        epsilon: eps.clone(),
        h_coeffs: h_coeffs.to_vec(),
        slack,
        found_by: SearchTier::Supplied,
    })
}

/// Sound integer prefilter: every value is enclosed in `[lo, hi]·2⁻ᴷ` and the
/// slack bound is evaluated in interval arithmetic. Undecided candidates fall
/// through to the exact check.
struct Prefilter {
    gens: Vec<Vec<(i128, i128)>>,
    target: Vec<(i128, i128)>,
    /// enclosure of `−ε·uⱼ`
    bound: Vec<(i128, i128)>,
    m: i128,
}

enum Filtered {
    Reject,
    Accept,
    Undecided,
}

const FILTER_BITS: u32 = 40;

fn enclose(x: &Scalar) -> Option<(i128, i128)> {
    let scale = BigRational::from_integer(BigInt::one() << FILTER_BITS);
    let width = BigRational::new(BigInt::one(), BigInt::one() << FILTER_BITS);
    let (lo, hi) = x.enclosure(&width);
    let lo = (lo * &scale).floor().to_integer().to_i128()?;
    let hi = (hi * &scale).ceil().to_integer().to_i128()?;
    // keep headroom for sums of products with coefficients up to 2^20
    const LIMIT: i128 = 1 << 80;
    (lo.abs() < LIMIT && hi.abs() < LIMIT).then_some((lo, hi))
}

impl Prefilter {
    fn new(h: &SubgroupSpec, unit: &OrderUnit, target: &[Scalar], m: &BigInt, eps: &BigRational) -> Option<Self> {
        let gens = h
            .generators()
            .iter()
            .map(|g| g.iter().map(enclose).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        let target = target.iter().map(enclose).collect::<Option<Vec<_>>>()?;
        let bound = unit
            .coords()
            .iter()
            .map(|u| enclose(&-u.scale(eps)))
            .collect::<Option<Vec<_>>>()?;
        let m = m.to_i128().filter(|m| *m < 1 << 20)?;
        Some(Prefilter { gens, target, bound, m })
    }

    fn check(&self, a: &[i64]) -> Filtered {
        let mut undecided = false;
        for j in 0..self.target.len() {
            // Σ aᵢ gᵢⱼ
            let (mut lo, mut hi) = (0i128, 0i128);
            for (ai, g) in a.iter().zip(&self.gens) {
                let ai = i128::from(*ai);
                let (gl, gh) = g[j];
                let (p, q) = (ai * gl, ai * gh);
                lo += p.min(q);
                hi += p.max(q);
            }
            let slack_lo = self.target[j].0 - self.m * hi;
            let slack_hi = self.target[j].1 - self.m * lo;
            if slack_hi < self.bound[j].0 {
                return Filtered::Reject;
            }
            if slack_lo < self.bound[j].1 {
                undecided = true;
            }
        }
        if undecided {
            Filtered::Undecided
        } else {
            Filtered::Accept
        }
    }
}

struct Checker<'a> {
    h: &'a SubgroupSpec,
    unit: &'a OrderUnit,
    h_coeffs: &'a [BigInt],
    m: &'a BigInt,
    eps: &'a BigRational,
    filter: Option<Prefilter>,
}

impl Checker<'_> {
    fn exact(&self, a: &[BigInt], tier: SearchTier) -> Option<Witness> {
        verify_witness(self.h, self.unit, self.h_coeffs, self.m, self.eps, a)
            .ok()
            .map(|mut w| {
                w.found_by = tier;
                w
            })
    }

    fn small(&self, a: &[i64], tier: SearchTier) -> Option<Witness> {
        if let Some(f) = &self.filter {
            if a.iter().all(|x| x.abs() < 1 << 20) {
                if let Filtered::Reject = f.check(a) {
                    return None;
                }
            }
        }
        let big: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        self.exact(&big, tier)
    }
}

/// Search limits for [`construct_witness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessSearch {
    /// Largest box radius for the enumeration tier.
    pub budget: u64,
    /// Run the lattice-guided tier before enumerating.
    pub structured: bool,
}

impl Default for WitnessSearch {
    fn default() -> Self {
        WitnessSearch {
            budget: 64,
            structured: true,
        }
    }
}

/// A real `w ∈ ℝH` vanishing on `support` and at least 1 elsewhere.
fn escape_direction(h: &SubgroupSpec, support: &[usize]) -> Option<Vec<Scalar>> {
    let ctx = h.context();
    let (s, n) = (h.num_generators(), h.ambient_dim());
    let outside: Vec<usize> = (0..n).filter(|j| !support.contains(j)).collect();
    if outside.is_empty() || s == 0 {
        return None;
    }
    // variables (p, q, slack) with ω = p − q
    let cols = 2 * s + outside.len();
    let mut rows = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for j in 0..n {
        let mut r = vec![Scalar::zero(ctx); cols];
        for i in 0..s {
            r[i] = h.generators()[i][j].clone();
            r[s + i] = -&h.generators()[i][j];
        }
        if let Some(k) = outside.iter().position(|&o| o == j) {
            r[2 * s + k] = Scalar::from_int(ctx, -1);
            b.push(Scalar::one(ctx));
        } else {
            b.push(Scalar::zero(ctx));
        }
        rows.push(r);
    }
    let lp = LpProblem::feasibility(Matrix::new(ctx, rows, cols).ok()?, b).ok()?;
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => {
            let omega: Vec<Scalar> = (0..s).map(|i| &x[i] - &x[s + i]).collect();
            Some(
                (0..n)
                    .map(|j| {
                        (0..s).fold(Scalar::zero(ctx), |acc, i| acc + &omega[i] * &h.generators()[i][j])
                    })
                    .collect(),
            )
        }
        _ => None,
    }
}

const T_SCHEDULE: [f64; 7] = [0.0, 0.25, 1.0, 4.0, 16.0, 64.0, 256.0];
const KAPPA_SCHEDULE: [f64; 2] = [1e-4, 1e-2];

/// Lattice-guided candidates: aim `Σ aᵢhᵢ` at `(h − t·w)/m − εu/(4m)` in a
/// weighted norm that is tight on the face support and loose along `w`.
fn structured_search(checker: &Checker<'_>, support: &[usize], w: Option<&[Scalar]>) -> Option<Witness> {
    let h = checker.h;
    let (s, n) = (h.num_generators(), h.ambient_dim());
    if s == 0 {
        return None;
    }
    let m = checker.m.to_f64()?;
    let eps = checker.eps.to_f64()?;
    let gf: Vec<Vec<f64>> = h
        .generators()
        .iter()
        .map(|g| g.iter().map(Scalar::approx_f64).collect())
        .collect();
    let target = h.element(checker.h_coeffs);
    let hf: Vec<f64> = target.iter().map(Scalar::approx_f64).collect();
    let uf: Vec<f64> = checker.unit.coords().iter().map(Scalar::approx_f64).collect();
    let wf: Vec<f64> = match w {
        Some(w) => w.iter().map(Scalar::approx_f64).collect(),
        None => vec![0.0; n],
    };
    let schedule: &[f64] = if w.is_some() { &T_SCHEDULE } else { &T_SCHEDULE[..1] };
    for &t in schedule {
        let sigma: Vec<f64> = (0..n)
            .map(|j| {
                if support.contains(&j) {
                    eps * uf[j] / (2.0 * m)
                } else {
                    (t * wf[j] + eps * uf[j] / 2.0) / m
                }
            })
            .collect();
        let y: Vec<f64> = (0..n)
            .map(|j| (hf[j] - t * wf[j]) / m - eps * uf[j] / (4.0 * m))
            .collect();
        for &kappa in &KAPPA_SCHEDULE {
            let basis: Vec<Vec<f64>> = (0..s)
                .map(|i| {
                    let mut row: Vec<f64> = (0..n).map(|j| gf[i][j] / sigma[j]).collect();
                    row.extend((0..s).map(|k| if k == i { kappa } else { 0.0 }));
                    row
                })
                .collect();
            let mut tv: Vec<f64> = (0..n).map(|j| y[j] / sigma[j]).collect();
            tv.extend(std::iter::repeat_n(0.0, s));
            let mut candidates: Vec<Vec<i64>> = Vec::new();
            if let Some(red) = lattice::lll(basis.clone()) {
                if let Some(a) = lattice::babai(&red, &tv) {
                    candidates.push(a.clone());
                    for row in &red.transform {
                        for sign in [1i64, -1] {
                            let shifted: Option<Vec<i64>> = a
                                .iter()
                                .zip(row)
                                .map(|(x, r)| x.checked_add(sign * r))
                                .collect();
                            candidates.extend(shifted);
                        }
                    }
                }
            }
            if let Some(real) = lattice::least_squares(&basis, &tv) {
                if real.iter().all(|x| x.abs() < 1e15) {
                    let combos = if s <= 4 { 1usize << s } else { 1 };
                    for mask in 0..combos {
                        candidates.push(
                            real.iter()
                                .enumerate()
                                .map(|(i, x)| {
                                    if s > 4 {
                                        x.round() as i64
                                    } else if mask >> i & 1 == 1 {
                                        x.ceil() as i64
                                    } else {
                                        x.floor() as i64
                                    }
                                })
                                .collect(),
                        );
                    }
                }
            }
            for a in &candidates {
                if let Some(wit) = checker.small(a, SearchTier::Structured) {
                    trace!("structured tier hit at t = {t}, κ = {kappa}");
                    return Some(wit);
                }
            }
        }
    }
    None
}

/// Points with `‖a‖∞` in `(inner, outer]` whose first coordinate is `first`,
/// in lexicographic order; returns the first accepted one.
fn scan_slice(checker: &Checker<'_>, s: usize, first: i64, inner: i64, outer: i64) -> Option<Witness> {
    let mut a = vec![-outer; s];
    a[0] = first;
    if s == 1 {
        return if first.abs() > inner {
            checker.small(&a, SearchTier::Enumeration)
        } else {
            None
        };
    }
    loop {
        if a.iter().any(|x| x.abs() > inner) {
            if let Some(w) = checker.small(&a, SearchTier::Enumeration) {
                return Some(w);
            }
        }
        let mut k = s - 1;
        loop {
            if k == 0 {
                return None;
            }
            if a[k] < outer {
                a[k] += 1;
                break;
            }
            a[k] = -outer;
            k -= 1;
        }
    }
}

fn enumerate(checker: &Checker<'_>, budget: u64) -> Option<Witness> {
    let s = checker.h.num_generators();
    if s == 0 {
        return None;
    }
    if let Some(w) = checker.small(&vec![0; s], SearchTier::Enumeration) {
        return Some(w);
    }
    let budget = i64::try_from(budget.min(1 << 20)).unwrap_or(1 << 20);
    let mut inner = 0i64;
    let mut outer = 1i64;
    while inner < budget {
        outer = outer.min(budget);
        trace!("enumerating shell ({inner}, {outer}]");
        let firsts: Vec<i64> = (-outer..=outer).collect();
        let found = par::find_map_first(&firsts, |&f| scan_slice(checker, s, f, inner, outer));
        if found.is_some() {
            return found;
        }
        inner = outer;
        outer *= 2;
    }
    None
}

/// Finds `h′` with `h − m·h′ ≥ −ε·u`, where `h = Σ h_coeffsᵢ hᵢ`.
///
/// Fails with [`WitnessError::NoWitnessExists`] when property (B) fails, and
/// with [`WitnessError::BudgetExhausted`] when the search bound is reached.
pub fn construct_witness(
    h: &SubgroupSpec,
    unit: &OrderUnit,
    h_coeffs: &[BigInt],
    m: &BigInt,
    eps: &BigRational,
    search: WitnessSearch,
) -> Result<Witness, WitnessError> {
    check_params(m, eps)?;
    if h_coeffs.len() != h.num_generators() {
        return Err(Error::InvalidInput("coefficient count does not match the generators".into()).into());
    }
    let outcome = decision::decide(h, unit)?;
    if outcome.verdict == Verdict::FailsB {
        let cert = outcome.certificate.expect("failing verdicts carry a certificate");
        return Err(WitnessError::NoWitnessExists(Box::new(cert)));
    }
    let target = h.element(h_coeffs);
    let checker = Checker {
        h,
        unit,
        h_coeffs,
        m,
        eps,
        filter: Prefilter::new(h, unit, &target, m, eps),
    };
    let support: Vec<usize> = outcome.face.as_ref().map(|f| f.support.clone()).unwrap_or_default();

    if search.structured {
        let w = escape_direction(h, &support);
        if let Some(wit) = structured_search(&checker, &support, w.as_deref()) {
            return Ok(wit);
        }
    }
    if let ZSet::Empty(cert) = &outcome.z_set {
        // h − m·(−ℓv) = h + mℓv ≥ 0 once ℓ ≥ −hⱼ/(m vⱼ) for every j
        let ctx = h.context();
        let m_s = Scalar::from_bigint(ctx, m);
        let mut ell = BigInt::zero();
        for (hj, vj) in target.iter().zip(&cert.v) {
            let need = (-hj / &(&m_s * vj)).ceil();
            if need > ell {
                ell = need;
            }
        }
        let coeffs: Vec<BigInt> = cert.x.iter().map(|x| -(x * &ell)).collect();
        if let Some(wit) = checker.exact(&coeffs, SearchTier::Positivity) {
            return Ok(wit);
        }
        debug!("positivity construction unexpectedly rejected");
    }
    enumerate(&checker, search.budget).ok_or(WitnessError::BudgetExhausted {
        radius: search.budget,
    })
}

/// `⌈max hⱼ/uⱼ⌉` clamped at zero, so that `h ≤ ℓ·u`.
pub fn upper_bound_multiple(h: &[Scalar], unit: &OrderUnit) -> BigInt {
    h.iter()
        .zip(unit.coords())
        .map(|(x, u)| (x / u).ceil())
        .fold(BigInt::zero(), |acc, v| acc.max(v))
}

/// Witness for modulus `n` assembled from a witness for a power of `m`.
///
/// With `ℓ` as in [`upper_bound_multiple`], pick `j` with
/// `mʲ ≥ (2ℓ + ε)n/ε`, obtain an `(mʲ, ε/2)` witness `h′` from `produce`,
/// and return `q·h′` for `q = ⌈mʲ/n⌉`.
#[allow(clippy::too_many_arguments)]
pub fn transport_witness<F>(
    h: &SubgroupSpec,
    unit: &OrderUnit,
    h_coeffs: &[BigInt],
    m: &BigInt,
    n: &BigInt,
    eps: &BigRational,
    produce: F,
) -> Result<Witness, WitnessError>
where
    F: Fn(&BigInt, &BigRational) -> Result<Witness, WitnessError>,
{
    check_params(m, eps)?;
    check_params(n, eps)?;
    let target = h.element(h_coeffs);
    let ell = upper_bound_multiple(&target, unit);
    let need = (BigRational::from_integer(BigInt::from(2) * &ell) + eps)
        * BigRational::from_integer(n.clone())
        / eps;
    let mut power = m.clone();
    while BigRational::from_integer(power.clone()) < need {
        power *= m;
    }
    let half = eps / BigRational::from_integer(BigInt::from(2));
    let inner = produce(&power, &half)?;
    let q = Integer::div_ceil(&power, n);
    let coeffs: Vec<BigInt> = inner.coeffs.iter().map(|a| a * &q).collect();
    let mut out = verify_witness(h, unit, h_coeffs, n, eps, &coeffs).map_err(|r| {
        WitnessError::Engine(Error::CertificateConstructionFailed(format!(
            "transported witness rejected: {r}"
        )))
    })?;
    out.found_by = inner.found_by;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;

    fn ints(ctx: &std::sync::Arc<FieldContext>, v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_int(ctx, x)).collect()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn irrational_pair() -> (SubgroupSpec, OrderUnit) {
        let ctx = FieldContext::quadratic(2).unwrap();
        let s2 = Scalar::generator(&ctx);
        let one = Scalar::one(&ctx);
        let h = SubgroupSpec::new(&ctx, 2, vec![vec![one.clone(), -&one], vec![s2.clone(), -&s2]]).unwrap();
        (h, OrderUnit::ones(&ctx, 2))
    }

    #[test]
    fn verify_examples() {
        let q = FieldContext::rationals();
        let u = OrderUnit::ones(&q, 2);
        let z2 = SubgroupSpec::standard_lattice(&q, 2);
        let w = verify_witness(&z2, &u, &big(&[3, 5]), &BigInt::from(2), &r(1, 2), &big(&[1, 2])).unwrap();
        assert_eq!(w.slack, ints(&q, &[1, 1]));

        let h = SubgroupSpec::from_ints(&q, 2, &[vec![1, -1]]).unwrap();
        let rej = verify_witness(&h, &u, &big(&[1]), &BigInt::from(2), &r(1, 2), &big(&[0])).unwrap_err();
        assert_eq!(rej.coordinate, 1);
        assert_eq!(rej.slack, Scalar::from_int(&q, -1));
    }

    #[test]
    fn standard_lattice_rounds_down() {
        let q = FieldContext::rationals();
        let z2 = SubgroupSpec::standard_lattice(&q, 2);
        let w = construct_witness(
            &z2,
            &OrderUnit::ones(&q, 2),
            &big(&[3, 5]),
            &BigInt::from(2),
            &r(1, 2),
            WitnessSearch::default(),
        )
        .unwrap();
        assert_eq!(w.coeffs, big(&[1, 2]));
    }

    #[test]
    fn positive_direction_example() {
        let q = FieldContext::rationals();
        let h = SubgroupSpec::from_ints(&q, 2, &[vec![1, 1]]).unwrap();
        let w = construct_witness(
            &h,
            &OrderUnit::ones(&q, 2),
            &big(&[-7]),
            &BigInt::from(3),
            &r(1, 10),
            WitnessSearch::default(),
        )
        .unwrap();
        assert_eq!(w.coeffs, big(&[-3]));
        assert_eq!(w.slack, ints(&q, &[2, 2]));
    }

    #[test]
    fn irrational_pair_witnesses() {
        let (h, u) = irrational_pair();
        for search in [WitnessSearch::default(), WitnessSearch { budget: 20, structured: false }] {
            let w = construct_witness(&h, &u, &big(&[1, 0]), &BigInt::from(2), &r(1, 10), search).unwrap();
            assert!(verify_witness(&h, &u, &w.h_coeffs, &w.m, &w.epsilon, &w.coeffs).is_ok());
        }
    }

    #[test]
    fn failing_group_has_no_witness() {
        let q = FieldContext::rationals();
        let h = SubgroupSpec::from_ints(&q, 2, &[vec![1, -1]]).unwrap();
        let err = construct_witness(
            &h,
            &OrderUnit::ones(&q, 2),
            &big(&[1]),
            &BigInt::from(2),
            &r(1, 10),
            WitnessSearch::default(),
        )
        .unwrap_err();
        assert!(matches!(err, WitnessError::NoWitnessExists(_)));
    }

    #[test]
    fn transport_examples() {
        let q = FieldContext::rationals();
        let z2 = SubgroupSpec::standard_lattice(&q, 2);
        let u = OrderUnit::ones(&q, 2);
        for n in [3, 4] {
            let produce = |modulus: &BigInt, e: &BigRational| {
                construct_witness(&z2, &u, &big(&[3, 5]), modulus, e, WitnessSearch::default())
            };
            let w = transport_witness(&z2, &u, &big(&[3, 5]), &BigInt::from(2), &BigInt::from(n), &r(1, 2), produce)
                .unwrap();
            assert_eq!(w.m, BigInt::from(n));
        }
        let (h, u) = irrational_pair();
        let produce = |modulus: &BigInt, e: &BigRational| {
            construct_witness(&h, &u, &big(&[1, 0]), modulus, e, WitnessSearch::default())
        };
        let w = transport_witness(&h, &u, &big(&[1, 0]), &BigInt::from(2), &BigInt::from(5), &r(1, 5), produce)
            .unwrap();
        assert!(verify_witness(&h, &u, &w.h_coeffs, &BigInt::from(5), &r(1, 5), &w.coeffs).is_ok());
    }
}
