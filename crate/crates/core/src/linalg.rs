//! Exact linear algebra over Q(θ) and over Z.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::field::{FieldContext, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("entries belong to different field contexts")]
    ContextMismatch,
    #[error("row {row} has {got} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Dense matrix over a single field context.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ctx: Arc<FieldContext>,
    ncols: usize,
    rows: Vec<Vec<Scalar>>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows.iter()).finish()
    }
}

/// Outcome of [`Matrix::solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Solution(Vec<Scalar>),
    /// `u` with `uᵀM = 0` and `uᵀb ≠ 0`.
    Infeasible(Vec<Scalar>),
}

impl SolveResult {
    pub fn solution(self) -> Option<Vec<Scalar>> {
        match self {
            SolveResult::Solution(x) => Some(x),
            SolveResult::Infeasible(_) => None,
        }
    }
}

fn normalize_first_nonzero(v: &mut [Scalar]) {
    if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
        let inv = lead.inv();
        for x in v.iter_mut() {
            *x = &*x * &inv;
        }
    }
}

impl Matrix {
    pub fn new(ctx: &Arc<FieldContext>, rows: Vec<Vec<Scalar>>, ncols: usize) -> Result<Self, LinalgError> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(LinalgError::Ragged {
                    row: i,
                    expected: ncols,
                    got: row.len(),
                });
            }
            if row.iter().any(|x| **x.context() != **ctx) {
                return Err(LinalgError::ContextMismatch);
            }
        }
        Ok(Matrix {
            ctx: ctx.clone(),
            ncols,
            rows,
        })
    }

    /// Builds a matrix from non-empty rows, taking the context from the entries.
    pub fn from_rows(ctx: &Arc<FieldContext>, rows: Vec<Vec<Scalar>>) -> Result<Self, LinalgError> {
        let ncols = rows.first().map_or(0, Vec::len);
        Self::new(ctx, rows, ncols)
    }

    pub fn from_rationals(ctx: &Arc<FieldContext>, rows: &[Vec<BigRational>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|q| Scalar::from_rational(ctx, q.clone())).collect())
            .collect();
        Matrix {
            ctx: ctx.clone(),
            ncols,
            rows,
        }
    }

    pub fn from_ints(ctx: &Arc<FieldContext>, rows: &[Vec<i64>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&q| Scalar::from_int(ctx, q)).collect())
            .collect();
        Matrix {
            ctx: ctx.clone(),
            ncols,
            rows,
        }
    }

    pub fn zeros(ctx: &Arc<FieldContext>, nrows: usize, ncols: usize) -> Self {
        Matrix {
            ctx: ctx.clone(),
            ncols,
            rows: vec![vec![Scalar::zero(ctx); ncols]; nrows],
        }
    }

    pub fn identity(ctx: &Arc<FieldContext>, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.rows[i][i] = Scalar::one(ctx);
        }
        m
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i][j]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let rows = (0..self.ncols).map(|j| self.column(j)).collect();
        Matrix {
            ctx: self.ctx.clone(),
            ncols: self.rows.len(),
            rows,
        }
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let rows = self
            .rows
            .iter()
            .map(|r| cols.iter().map(|&j| r[j].clone()).collect())
            .collect();
        Matrix {
            ctx: self.ctx.clone(),
            ncols: cols.len(),
            rows,
        }
    }

    /// `M·x`.
    pub fn mul_vec(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.ncols, "mul_vec dimension mismatch");
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(x)
                    .fold(Scalar::zero(&self.ctx), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// `yᵀ·M`.
    pub fn left_mul_vec(&self, y: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(y.len(), self.rows.len(), "left_mul_vec dimension mismatch");
        let mut out = vec![Scalar::zero(&self.ctx); self.ncols];
        for (yi, row) in y.iter().zip(&self.rows) {
            if yi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                *o = &*o + &(yi * a);
            }
        }
        out
    }

    /// Reduced row echelon form. The pivot in each column is the first nonzero
    /// entry at or below the current row. Returns the reduced rows and the
    /// pivot columns.
    pub fn rref(&self) -> (Vec<Vec<Scalar>>, Vec<usize>) {
        let mut a = self.rows.clone();
        let pivots = eliminate(&mut a, self.ncols);
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space; each vector's first nonzero entry is 1.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![None; self.ncols];
        for (i, &p) in pivots.iter().enumerate() {
            is_pivot[p] = Some(i);
        }
        let mut basis = Vec::new();
        for f in 0..self.ncols {
            if is_pivot[f].is_some() {
                continue;
            }
            let mut v = vec![Scalar::zero(&self.ctx); self.ncols];
            v[f] = Scalar::one(&self.ctx);
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -&r[i][f];
            }
            normalize_first_nonzero(&mut v);
            basis.push(v);
        }
        basis
    }

    /// One solution of `M x = b`, or a left certificate of infeasibility.
    pub fn solve(&self, b: &[Scalar]) -> Result<SolveResult, LinalgError> {
        let m = self.rows.len();
        if b.len() != m {
            return Err(LinalgError::DimensionMismatch {
                expected: m,
                got: b.len(),
            });
        }
        if b.iter().any(|x| **x.context() != *self.ctx) {
            return Err(LinalgError::ContextMismatch);
        }
        // augmented [M | b | I]
        let n = self.ncols;
        let mut a: Vec<Vec<Scalar>> = self
            .rows
            .iter()
            .zip(b)
            .enumerate()
            .map(|(i, (row, bi))| {
                let mut r = row.clone();
                r.push(bi.clone());
                for k in 0..m {
                    r.push(if k == i {
                        Scalar::one(&self.ctx)
                    } else {
                        Scalar::zero(&self.ctx)
                    });
                }
                r
            })
            .collect();
        let pivots = eliminate(&mut a, n);
        for row in a.iter().skip(pivots.len()) {
            if !row[n].is_zero() {
                let mut u: Vec<Scalar> = row[n + 1..].to_vec();
                normalize_first_nonzero(&mut u);
                return Ok(SolveResult::Infeasible(u));
            }
        }
        let mut x = vec![Scalar::zero(&self.ctx); n];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = a[i][n].clone();
        }
        Ok(SolveResult::Solution(x))
    }
}

/// Gauss–Jordan elimination on the first `ncols` columns of `a`, applying the
/// same row operations to any trailing columns.
fn eliminate(a: &mut [Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv();
        for x in &mut a[r][c..] {
            *x = &*x * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Splits each entry into its θ-power coefficients: slice `k` holds `c_k` of every entry.
pub fn rational_components(v: &[Scalar], degree: usize) -> Vec<Vec<BigRational>> {
    (0..degree)
        .map(|k| v.iter().map(|x| x.coeffs()[k].clone()).collect())
        .collect()
}

fn q_matrix(rows: &[Vec<BigRational>]) -> Matrix {
    Matrix::from_rationals(&FieldContext::rationals(), rows)
}

/// Rank over Q.
pub fn rank_q(rows: &[Vec<BigRational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    q_matrix(rows).rank()
}

/// Right null space over Q, normalized like [`Matrix::kernel`].
pub fn kernel_q(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let m = if rows.is_empty() {
        Matrix::zeros(&FieldContext::rationals(), 0, ncols)
    } else {
        q_matrix(rows)
    };
    m.kernel()
        .into_iter()
        .map(|v| v.into_iter().map(|x| x.coeffs()[0].clone()).collect())
        .collect()
}

/// Scales a rational vector to a primitive integer vector with the same direction.
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

/// Dense integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<Vec<BigInt>>,
}

/// `S = U·M·V` with `U`, `V` unimodular and `S` diagonal, `d₁ | d₂ | …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.nrows.min(self.s.ncols))
            .map(|i| self.s.data[i][i].clone())
            .collect()
    }
}

/// Unimodular 2×2 step `[x y; −e/g p/g]` sending `(p, e)` to `(g, 0)`.
struct Bezout {
    x: BigInt,
    y: BigInt,
    /// `−e/g`
    c: BigInt,
    /// `p/g`
    d: BigInt,
}

impl Bezout {
    fn new(p: &BigInt, e: &BigInt) -> Bezout {
        if (e % p).is_zero() {
            return Bezout {
                x: BigInt::one(),
                y: BigInt::zero(),
                c: -(e / p),
                d: BigInt::one(),
            };
        }
        let eg = p.extended_gcd(e);
        Bezout {
            c: -(e / &eg.gcd),
            d: p / &eg.gcd,
            x: eg.x,
            y: eg.y,
        }
    }

    fn rows(&self, a: &mut [Vec<BigInt>], t: usize, i: usize) {
        for k in 0..a[t].len() {
            let (p, e) = (a[t][k].clone(), a[i][k].clone());
            a[t][k] = &self.x * &p + &self.y * &e;
            a[i][k] = &self.c * &p + &self.d * &e;
        }
    }

    /// Right multiplication by the transpose on columns `t`, `j`.
    fn cols(&self, a: &mut [Vec<BigInt>], t: usize, j: usize) {
        for row in a.iter_mut() {
            let (p, e) = (row[t].clone(), row[j].clone());
            row[t] = &self.x * &p + &self.y * &e;
            row[j] = &self.c * &p + &self.d * &e;
        }
    }

    /// Left multiplication of rows `t`, `j` by the inverse of [`Self::cols`].
    fn inverse_rows(&self, a: &mut [Vec<BigInt>], t: usize, j: usize) {
        for k in 0..a[t].len() {
            let (p, e) = (a[t][k].clone(), a[j][k].clone());
            a[t][k] = &self.d * &p - &self.c * &e;
            a[j][k] = -&self.y * &p + &self.x * &e;
        }
    }
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

impl IntMatrix {
    pub fn new(data: Vec<Vec<BigInt>>, ncols: usize) -> Result<Self, LinalgError> {
        for (i, row) in data.iter().enumerate() {
            if row.len() != ncols {
                return Err(LinalgError::Ragged {
                    row: i,
                    expected: ncols,
                    got: row.len(),
                });
            }
        }
        Ok(IntMatrix {
            nrows: data.len(),
            ncols,
            data,
        })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        IntMatrix {
            nrows: rows.len(),
            ncols,
            data: rows
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![vec![BigInt::zero(); n]; n];
        for (i, row) in data.iter_mut().enumerate() {
            row[i] = BigInt::one();
        }
        IntMatrix {
            nrows: n,
            ncols: n,
            data,
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.nrows, "IntMatrix::mul dimension mismatch");
        let data = self
            .data
            .iter()
            .map(|r| {
                (0..other.ncols)
                    .map(|j| {
                        r.iter()
                            .zip(&other.data)
                            .fold(BigInt::zero(), |acc, (a, row)| acc + a * &row[j])
                    })
                    .collect()
            })
            .collect();
        IntMatrix {
            nrows: self.nrows,
            ncols: other.ncols,
            data,
        }
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.data
            .iter()
            .map(|r| r.iter().zip(x).fold(BigInt::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let data = (0..self.ncols)
            .map(|j| self.data.iter().map(|r| r[j].clone()).collect())
            .collect();
        IntMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            data,
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination. Square matrices only.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.nrows, self.ncols, "determinant of a non-square matrix");
        let n = self.nrows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(p) => {
                        a.swap(k, p);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn smith(&self) -> Smith {
        let (m, n) = (self.nrows, self.ncols);
        let mut a = self.data.clone();
        let mut u = IntMatrix::identity(m);
        let mut v = IntMatrix::identity(n);
        let mut v_inv = IntMatrix::identity(n);

        let mut rank = 0;
        for t in 0..m.min(n) {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            u.data.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v.data, t, pj);
            v_inv.data.swap(t, pj);

            loop {
                for i in t + 1..m {
                    if !a[i][t].is_zero() {
                        let b = Bezout::new(&a[t][t], &a[i][t]);
                        b.rows(&mut a, t, i);
                        b.rows(&mut u.data, t, i);
                    }
                }
                for j in t + 1..n {
                    if !a[t][j].is_zero() {
                        let b = Bezout::new(&a[t][t], &a[t][j]);
                        b.cols(&mut a, t, j);
                        b.cols(&mut v.data, t, j);
                        b.inverse_rows(&mut v_inv.data, t, j);
                    }
                }
                if (t + 1..m).any(|i| !a[i][t].is_zero()) {
                    continue;
                }
                // divisibility: fold an offending row into the pivot row
                let offending = (t + 1..m).find(|&i| {
                    (t + 1..n).any(|j| !(&a[i][j] % &a[t][t]).is_zero())
                });
                match offending {
                    Some(i) => {
                        let row = a[i].clone();
                        for (x, y) in a[t].iter_mut().zip(&row) {
                            *x += y;
                        }
                        for k in 0..m {
                            let x = u.data[i][k].clone();
                            u.data[t][k] += x;
                        }
                    }
                    None => break,
                }
            }
            if a[t][t].is_negative() {
                for x in a[t].iter_mut() {
                    *x = -&*x;
                }
                for x in u.data[t].iter_mut() {
                    *x = -&*x;
                }
            }
            rank += 1;
        }
        Smith {
            u,
            s: IntMatrix {
                nrows: m,
                ncols: n,
                data: a,
            },
            v,
            v_inv,
            rank,
        }
    }

    /// Basis of `{x ∈ Zⁿ : M x = 0}`.
    pub fn integer_kernel(&self) -> Vec<Vec<BigInt>> {
        let smith = self.smith();
        (smith.rank..self.ncols)
            .map(|j| smith.v.data.iter().map(|r| r[j].clone()).collect())
            .collect()
    }

    /// An integer solution of `M x = b`, if one exists.
    pub fn integer_solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(b.len(), self.nrows, "integer_solve dimension mismatch");
        let smith = self.smith();
        let c = smith.u.mul_vec(b);
        let diag = smith.diagonal();
        let mut y = vec![BigInt::zero(); self.ncols];
        for (i, ci) in c.iter().enumerate() {
            if i < smith.rank {
                let (q, r) = ci.div_rem(&diag[i]);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            } else if !ci.is_zero() {
                return None;
            }
        }
        Some(smith.v.mul_vec(&y))
    }
}
