//! Exact two-phase simplex over Q(θ) with Bland's rule, plus the Gordan and
//! Farkas alternatives built on it.

use std::sync::Arc;

use log::trace;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::field::{FieldContext, Scalar};
use crate::linalg::{LinalgError, Matrix};

/// `maximize c·x` subject to `A x = b`, `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub a: Matrix,
    pub b: Vec<Scalar>,
    pub c: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// `dual` satisfies `dualᵀA ≥ c` and `dual·b = value`.
    Optimal {
        x: Vec<Scalar>,
        value: Scalar,
        dual: Vec<Scalar>,
    },
    /// `y` with `yᵀA ≥ 0` and `y·b < 0`.
    Infeasible { certificate: Vec<Scalar> },
    /// A feasible point and a ray `r ≥ 0` with `A r = 0`, `c·r > 0`.
    Unbounded { x: Vec<Scalar>, ray: Vec<Scalar> },
}

impl LpOutcome {
    pub fn optimal_point(&self) -> Option<&[Scalar]> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }

    pub fn optimal_value(&self) -> Option<&Scalar> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

fn dot(a: &[Scalar], b: &[Scalar], ctx: &Arc<FieldContext>) -> Scalar {
    a.iter()
        .zip(b)
        .fold(Scalar::zero(ctx), |acc, (x, y)| acc + x * y)
}

impl LpProblem {
    pub fn new(a: Matrix, b: Vec<Scalar>, c: Vec<Scalar>) -> Result<Self, LinalgError> {
        if b.len() != a.nrows() {
            return Err(LinalgError::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        if c.len() != a.ncols() {
            return Err(LinalgError::DimensionMismatch {
                expected: a.ncols(),
                got: c.len(),
            });
        }
        let ctx = a.context();
        if b.iter().chain(&c).any(|x| **x.context() != **ctx) {
            return Err(LinalgError::ContextMismatch);
        }
        Ok(LpProblem { a, b, c })
    }

    /// Feasibility problem with a zero objective.
    pub fn feasibility(a: Matrix, b: Vec<Scalar>) -> Result<Self, LinalgError> {
        let c = vec![Scalar::zero(a.context()); a.ncols()];
        Self::new(a, b, c)
    }

    fn ctx(&self) -> &Arc<FieldContext> {
        self.a.context()
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::run(self)
    }

    /// Exact check of whichever certificate `outcome` carries.
    pub fn verify(&self, outcome: &LpOutcome) -> bool {
        let ctx = self.ctx();
        let feasible = |x: &[Scalar]| {
            x.len() == self.a.ncols()
                && x.iter().all(Scalar::is_nonnegative)
                && self.a.mul_vec(x) == self.b
        };
        match outcome {
            LpOutcome::Optimal { x, value, dual } => {
                feasible(x)
                    && dot(&self.c, x, ctx) == *value
                    && dual.len() == self.a.nrows()
                    && self
                        .a
                        .left_mul_vec(dual)
                        .iter()
                        .zip(&self.c)
                        .all(|(ya, c)| ya >= c)
                    && dot(dual, &self.b, ctx) == *value
            }
            LpOutcome::Infeasible { certificate: y } => {
                y.len() == self.a.nrows()
                    && self.a.left_mul_vec(y).iter().all(Scalar::is_nonnegative)
                    && dot(y, &self.b, ctx).is_negative()
            }
            LpOutcome::Unbounded { x, ray } => {
                feasible(x)
                    && ray.len() == self.a.ncols()
                    && ray.iter().all(Scalar::is_nonnegative)
                    && self.a.mul_vec(ray).iter().all(Scalar::is_zero)
                    && dot(&self.c, ray, ctx).is_positive()
            }
        }
    }
}

/// Tableau over columns `[x (n) | artificials (m) | rhs]`.
struct Tableau {
    ctx: Arc<FieldContext>,
    n: usize,
    m: usize,
    rows: Vec<Vec<Scalar>>,
    basis: Vec<usize>,
    flips: Vec<bool>,
}

enum PhaseEnd {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn run(p: &LpProblem) -> LpOutcome {
        let ctx = p.ctx().clone();
        let (m, n) = (p.a.nrows(), p.a.ncols());
        let mut flips = vec![false; m];
        let rows = (0..m)
            .map(|i| {
                let flip = p.b[i].is_negative();
                flips[i] = flip;
                let mut r: Vec<Scalar> = p
                    .a
                    .row(i)
                    .iter()
                    .map(|x| if flip { -x } else { x.clone() })
                    .collect();
                for k in 0..m {
                    r.push(if k == i {
                        Scalar::one(&ctx)
                    } else {
                        Scalar::zero(&ctx)
                    });
                }
                r.push(if flip { -&p.b[i] } else { p.b[i].clone() });
                r
            })
            .collect();
        let mut t = Tableau {
            ctx: ctx.clone(),
            n,
            m,
            rows,
            basis: (n..n + m).collect(),
            flips,
        };

        // phase 1: maximize −Σ artificials
        let cost1: Vec<Scalar> = (0..n + m)
            .map(|j| {
                if j < n {
                    Scalar::zero(&ctx)
                } else {
                    Scalar::from_int(&ctx, -1)
                }
            })
            .collect();
        match t.optimize(&cost1, n + m) {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded(_) => unreachable!("phase-1 objective is bounded by zero"),
        }
        let infeasibility = t.objective(&cost1);
        if infeasibility.is_negative() {
            return LpOutcome::Infeasible {
                certificate: t.duals(&cost1),
            };
        }
        t.drive_out_artificials();

        let mut cost2 = p.c.clone();
        cost2.extend((0..m).map(|_| Scalar::zero(&ctx)));
        match t.optimize(&cost2, n) {
            PhaseEnd::Optimal => {
                let x = t.point();
                let value = dot(&p.c, &x, &ctx);
                LpOutcome::Optimal {
                    x,
                    value,
                    dual: t.duals(&cost2),
                }
            }
            PhaseEnd::Unbounded(j) => {
                let x = t.point();
                let mut ray = vec![Scalar::zero(&ctx); n];
                ray[j] = Scalar::one(&ctx);
                for (r, &b) in t.basis.iter().enumerate() {
                    if b < n {
                        ray[b] = -&t.rows[r][j];
                    }
                }
                LpOutcome::Unbounded { x, ray }
            }
        }
    }

    fn rhs(&self, r: usize) -> &Scalar {
        &self.rows[r][self.n + self.m]
    }

    fn reduced_cost(&self, cost: &[Scalar], j: usize) -> Scalar {
        let mut d = cost[j].clone();
        for (r, &b) in self.basis.iter().enumerate() {
            let a = &self.rows[r][j];
            if !a.is_zero() && !cost[b].is_zero() {
                d = d - &cost[b] * a;
            }
        }
        d
    }

    fn objective(&self, cost: &[Scalar]) -> Scalar {
        self.basis
            .iter()
            .enumerate()
            .fold(Scalar::zero(&self.ctx), |acc, (r, &b)| acc + &cost[b] * self.rhs(r))
    }

    /// Simplex iterations with Bland's rule; columns `≥ allowed` never enter.
    fn optimize(&mut self, cost: &[Scalar], allowed: usize) -> PhaseEnd {
        loop {
            let entering = (0..allowed)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.reduced_cost(cost, j).is_positive());
            let Some(j) = entering else {
                return PhaseEnd::Optimal;
            };
            let mut leave: Option<(usize, Scalar)> = None;
            for r in 0..self.m {
                let a = &self.rows[r][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => match ratio.cmp(best) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Equal => self.basis[r] < self.basis[*lr],
                        std::cmp::Ordering::Greater => false,
                    },
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, j),
                None => return PhaseEnd::Unbounded(j),
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        trace!("pivot: row {r} column {j} (leaving {})", self.basis[r]);
        let inv = self.rows[r][j].inv();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = &*x - &(&f * p);
                }
            }
        }
        self.basis[r] = j;
    }

    /// Pivots zero-level artificials out of the basis where a structural
    /// column allows it; rows where none does are redundant and stay at zero.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.n {
                continue;
            }
            if let Some(j) = (0..self.n).find(|&j| !self.rows[r][j].is_zero() && !self.basis.contains(&j)) {
                self.pivot(r, j);
            }
        }
    }

    fn point(&self) -> Vec<Scalar> {
        let mut x = vec![Scalar::zero(&self.ctx); self.n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rhs(r).clone();
            }
        }
        x
    }

    /// `c_Bᵀ B⁻¹`, read off the artificial columns, in the original row signs.
    fn duals(&self, cost: &[Scalar]) -> Vec<Scalar> {
        (0..self.m)
            .map(|i| {
                let mut y = Scalar::zero(&self.ctx);
                for (r, &b) in self.basis.iter().enumerate() {
                    let a = &self.rows[r][self.n + i];
                    if !a.is_zero() && !cost[b].is_zero() {
                        y = y + &cost[b] * a;
                    }
                }
                if self.flips[i] {
                    -y
                } else {
                    y
                }
            })
            .collect()
    }
}

/// Result of the Gordan alternative for an `m × n` matrix `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GordanResult {
    /// `y ≥ 0`, `y ≠ 0`, `A y = 0`, normalized so that `Σ y = 1`.
    AltI { y: Vec<Scalar> },
    /// Integer `x` with every entry of `x A` strictly positive.
    AltII { x: Vec<BigInt>, values: Vec<Scalar> },
}

impl GordanResult {
    pub fn verify(&self, a: &Matrix) -> bool {
        match self {
            GordanResult::AltI { y } => {
                y.len() == a.ncols()
                    && y.iter().all(Scalar::is_nonnegative)
                    && y.iter().any(|v| !v.is_zero())
                    && a.mul_vec(y).iter().all(Scalar::is_zero)
            }
            GordanResult::AltII { x, values } => {
                let xs: Vec<Scalar> = x.iter().map(|v| Scalar::from_bigint(a.context(), v)).collect();
                x.len() == a.nrows()
                    && a.left_mul_vec(&xs) == *values
                    && values.iter().all(Scalar::is_positive)
            }
        }
    }
}

fn scalar_row(ctx: &Arc<FieldContext>, n: usize, f: impl Fn(usize) -> Scalar) -> Vec<Scalar> {
    let _ = ctx;
    (0..n).map(f).collect()
}

/// Gordan's alternative: either `A y = 0` for some nonzero `y ≥ 0`, or
/// `x A ≫ 0` for some integer `x`.
pub fn gordan(a: &Matrix) -> GordanResult {
    let ctx = a.context().clone();
    let (m, n) = (a.nrows(), a.ncols());
    let zero = || Scalar::zero(&ctx);
    let one = || Scalar::one(&ctx);
    if n == 0 {
        return GordanResult::AltII {
            x: vec![BigInt::zero(); m],
            values: Vec::new(),
        };
    }

    // alternative (i): A y = 0, Σ y = 1, y ≥ 0
    let mut rows: Vec<Vec<Scalar>> = a.rows().to_vec();
    rows.push(scalar_row(&ctx, n, |_| one()));
    let mut b = vec![zero(); m];
    b.push(one());
    let lp = LpProblem::feasibility(Matrix::new(&ctx, rows, n).expect("shape"), b)
        .expect("consistent dimensions");
    if let LpOutcome::Optimal { x, .. } = lp.solve() {
        return GordanResult::AltI { y: x };
    }

    // alternative (ii): maximize t s.t. (p − q)A − t·1 − s = 0, Σ(p + q) + w = 1
    let cols = 2 * m + 1 + n + 1;
    let t_col = 2 * m;
    let mut rows = Vec::with_capacity(n + 1);
    for j in 0..n {
        let mut r = vec![zero(); cols];
        for i in 0..m {
            r[i] = a.get(i, j).clone();
            r[m + i] = -a.get(i, j);
        }
        r[t_col] = Scalar::from_int(&ctx, -1);
        r[t_col + 1 + j] = Scalar::from_int(&ctx, -1);
        rows.push(r);
    }
    let mut r = vec![zero(); cols];
    for v in r.iter_mut().take(2 * m) {
        *v = one();
    }
    r[cols - 1] = one();
    rows.push(r);
    let mut b = vec![zero(); n];
    b.push(one());
    let mut c = vec![zero(); cols];
    c[t_col] = one();
    let lp = LpProblem::new(Matrix::new(&ctx, rows, cols).expect("shape"), b, c)
        .expect("consistent dimensions");
    let LpOutcome::Optimal { x: sol, value: t, .. } = lp.solve() else {
        unreachable!("margin LP is feasible and bounded");
    };
    assert!(t.is_positive(), "Gordan alternatives both failed");
    let real_x: Vec<Scalar> = (0..m).map(|i| &sol[i] - &sol[m + i]).collect();
    let x = integerize(a, &real_x, &t);
    let xs: Vec<Scalar> = x.iter().map(|v| Scalar::from_bigint(&ctx, v)).collect();
    let values = a.left_mul_vec(&xs);
    GordanResult::AltII { x, values }
}

/// Turns a real `x` with `x A ≥ t·1`, `t > 0`, into a primitive integer vector
/// with `x A ≫ 0`, rounding each entry to within `t / (2 m max|A|)`.
fn integerize(a: &Matrix, x: &[Scalar], t: &Scalar) -> Vec<BigInt> {
    let ctx = a.context();
    let m = x.len().max(1);
    let rational: Vec<BigRational> = if x.iter().all(|v| v.as_rational().is_some()) {
        x.iter().map(|v| v.as_rational().unwrap().clone()).collect()
    } else {
        let max_abs = a
            .rows()
            .iter()
            .flatten()
            .map(Scalar::abs)
            .max()
            .unwrap_or_else(|| Scalar::one(ctx));
        let max_abs = if max_abs.is_zero() { Scalar::one(ctx) } else { max_abs };
        let bound = t / &max_abs.scale(&BigRational::from_integer(BigInt::from(2 * m)));
        // a positive rational not exceeding the bound
        let mut width = BigRational::one();
        let tol = loop {
            let (lo, _) = bound.enclosure(&width);
            if lo.is_positive() {
                break lo;
            }
            width /= BigRational::from_integer(BigInt::from(1 << 16));
        };
        x.iter().map(|v| v.approx_rational(&tol)).collect()
    };
    let lcm = rational.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = rational
        .iter()
        .map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|v| v / &g).collect()
    }
}

/// Result of the Farkas alternative for `A` (`m × n`) and `b ∈ ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FarkasResult {
    /// `y ≥ 0` with `A y = 0` and `b·y < 0`, normalized so that `Σ y = 1`.
    AltI { y: Vec<Scalar> },
    /// `x` with `x A ≤ b`.
    AltII { x: Vec<Scalar> },
}

impl FarkasResult {
    pub fn verify(&self, a: &Matrix, b: &[Scalar]) -> bool {
        let ctx = a.context();
        match self {
            FarkasResult::AltI { y } => {
                y.len() == a.ncols()
                    && y.iter().all(Scalar::is_nonnegative)
                    && a.mul_vec(y).iter().all(Scalar::is_zero)
                    && dot(b, y, ctx).is_negative()
            }
            FarkasResult::AltII { x } => {
                x.len() == a.nrows()
                    && a.left_mul_vec(x).iter().zip(b).all(|(v, bj)| v <= bj)
            }
        }
    }
}

/// Farkas' alternative: either `x A ≤ b` for some `x`, or `A y = 0`, `b·y < 0`
/// for some `y ≥ 0`.
pub fn farkas(a: &Matrix, b: &[Scalar]) -> Result<FarkasResult, LinalgError> {
    let ctx = a.context().clone();
    let (m, n) = (a.nrows(), a.ncols());
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    // [Aᵀ | −Aᵀ | I] (p, q, s) = b
    let cols = 2 * m + n;
    let rows: Vec<Vec<Scalar>> = (0..n)
        .map(|j| {
            let mut r = vec![Scalar::zero(&ctx); cols];
            for i in 0..m {
                r[i] = a.get(i, j).clone();
                r[m + i] = -a.get(i, j);
            }
            r[2 * m + j] = Scalar::one(&ctx);
            r
        })
        .collect();
    let lp = LpProblem::feasibility(Matrix::new(&ctx, rows, cols)?, b.to_vec())?;
    match lp.solve() {
        LpOutcome::Optimal { x: z, .. } => Ok(FarkasResult::AltII {
            x: (0..m).map(|i| &z[i] - &z[m + i]).collect(),
        }),
        LpOutcome::Infeasible { certificate } => {
            let total = certificate
                .iter()
                .fold(Scalar::zero(&ctx), |acc, v| acc + v);
            let inv = total.inv();
            Ok(FarkasResult::AltI {
                y: certificate.iter().map(|v| v * &inv).collect(),
            })
        }
        LpOutcome::Unbounded { .. } => unreachable!("zero objective is bounded"),
    }
}
