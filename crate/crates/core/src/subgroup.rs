//! Finitely generated subgroups of ℝⁿ, order units and normalized traces.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::{FieldContext, Scalar};
use crate::linalg::Matrix;

/// The group generated by the rows `h₁, …, h_s` in ℝⁿ. Generators may be dependent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupSpec {
    ctx: Arc<FieldContext>,
    n: usize,
    generators: Vec<Vec<Scalar>>,
}

impl SubgroupSpec {
    pub fn new(ctx: &Arc<FieldContext>, n: usize, generators: Vec<Vec<Scalar>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("ambient dimension must be at least 1".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != n {
                return Err(Error::InvalidInput(format!(
                    "generator {i} has {} coordinates, expected {n}",
                    g.len()
                )));
            }
            if g.iter().any(|x| **x.context() != **ctx) {
                return Err(crate::field::FieldError::ContextMismatch.into());
            }
        }
        Ok(SubgroupSpec {
            ctx: ctx.clone(),
            n,
            generators,
        })
    }

    pub fn from_ints(ctx: &Arc<FieldContext>, n: usize, generators: &[Vec<i64>]) -> Result<Self> {
        let gens = generators
            .iter()
            .map(|g| g.iter().map(|&x| Scalar::from_int(ctx, x)).collect())
            .collect();
        Self::new(ctx, n, gens)
    }

    /// The standard lattice Zⁿ.
    pub fn standard_lattice(ctx: &Arc<FieldContext>, n: usize) -> Self {
        let gens = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Scalar::from_int(ctx, i64::from(i == j)))
                    .collect()
            })
            .collect();
        SubgroupSpec {
            ctx: ctx.clone(),
            n,
            generators: gens,
        }
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Vec<Scalar>] {
        &self.generators
    }

    /// The `s × n` matrix whose rows are the generators.
    pub fn matrix(&self) -> Matrix {
        Matrix::new(&self.ctx, self.generators.clone(), self.n).expect("validated shape")
    }

    /// Restriction of every generator to the listed coordinates.
    pub fn project(&self, coords: &[usize]) -> SubgroupSpec {
        SubgroupSpec {
            ctx: self.ctx.clone(),
            n: coords.len(),
            generators: self
                .generators
                .iter()
                .map(|g| coords.iter().map(|&j| g[j].clone()).collect())
                .collect(),
        }
    }

    /// `Σ kᵢ hᵢ`.
    pub fn element(&self, coeffs: &[BigInt]) -> Vec<Scalar> {
        assert_eq!(coeffs.len(), self.generators.len(), "coefficient count mismatch");
        crate::field::int_combination(coeffs, &self.generators, &self.ctx, self.n)
    }

    pub fn with_generator(&self, g: Vec<Scalar>) -> Result<SubgroupSpec> {
        let mut gens = self.generators.clone();
        gens.push(g);
        SubgroupSpec::new(&self.ctx, self.n, gens)
    }
}

/// An order unit: a vector with strictly positive coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderUnit(Vec<Scalar>);

impl OrderUnit {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("order unit must have at least one coordinate".into()));
        }
        if let Some(index) = coords.iter().position(|x| !x.is_positive()) {
            return Err(Error::InvalidUnit { index });
        }
        Ok(OrderUnit(coords))
    }

    pub fn ones(ctx: &Arc<FieldContext>, n: usize) -> Self {
        OrderUnit(vec![Scalar::one(ctx); n])
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_ones(&self) -> bool {
        self.0.iter().all(|x| x.as_rational().is_some_and(num_traits::One::is_one))
    }
}

/// A positive functional `x ↦ Σ aᵢxᵢ`, normalized so that `Σ aᵢuᵢ = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracePoint {
    coords: Vec<Scalar>,
}

impl TracePoint {
    /// Checks nonnegativity and normalization against `unit`.
    pub fn new(coords: Vec<Scalar>, unit: &OrderUnit) -> Result<Self> {
        let tp = TracePoint { coords };
        tp.check(unit)?;
        Ok(tp)
    }

    /// No validation; verifiers call [`TracePoint::check`] themselves.
    pub fn unchecked(coords: Vec<Scalar>) -> Self {
        TracePoint { coords }
    }

    pub fn check(&self, unit: &OrderUnit) -> Result<()> {
        if self.coords.len() != unit.dim() {
            return Err(Error::InvalidTrace(format!(
                "{} coordinates for a unit of dimension {}",
                self.coords.len(),
                unit.dim()
            )));
        }
        if let Some(i) = self.coords.iter().position(Scalar::is_negative) {
            return Err(Error::InvalidTrace(format!("coordinate {i} is negative")));
        }
        if !self.eval(unit.coords()).as_rational().is_some_and(num_traits::One::is_one) {
            return Err(Error::InvalidTrace("value at the order unit is not 1".into()));
        }
        Ok(())
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        crate::field::dot(&self.coords, x)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.coords.len())
            .filter(|&i| !self.coords[i].is_zero())
            .collect()
    }
}
