//! Problem files: JSON documents describing a field, an ambient dimension,
//! generator matrices and command parameters.
//!
//! Scalars may be written as an integer, a rational string such as `"-3/2"`,
//! an array of rational coefficients in the power basis of the field
//! generator, or an object `{"coeffs": [...]}` as emitted in reports.

use std::fmt::Debug;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use onesided::decision::FailureCertificate;
use onesided::linalg::{IntMatrix, Matrix};
use onesided::ordered::GroupOrdering;
use onesided::{Error, FieldContext, OrderUnit, Scalar, SubgroupSpec, TracePoint};
use serde_json::Value;

/// Validation failure located by a JSON pointer into the input document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub path: String,
    pub kind: String,
    pub message: String,
}

impl InputError {
    pub fn new(path: &str, message: impl Into<String>) -> Self {
        InputError {
            path: path.to_string(),
            kind: "InvalidInput".into(),
            message: message.into(),
        }
    }

    /// Uses the error's variant name as the kind.
    pub fn from_error<E: Debug + std::fmt::Display>(path: &str, err: &E) -> Self {
        InputError {
            path: path.to_string(),
            kind: variant_name(err),
            message: err.to_string(),
        }
    }
}

fn variant_name<E: Debug>(err: &E) -> String {
    let dbg = format!("{err:?}");
    // unwrap transparent wrappers such as `Field(NotIrreducible { .. })`
    let inner = match dbg.split_once('(') {
        Some((outer, rest)) if outer == "Field" || outer == "Linalg" || outer == "Engine" => rest,
        _ => &dbg,
    };
    inner
        .chars()
        .take_while(|c| c.is_alphanumeric() || *c == '_')
        .collect()
}

pub type Parsed<T> = Result<T, InputError>;

fn child(path: &str, seg: impl ToString) -> String {
    let seg = seg.to_string().replace('~', "~0").replace('/', "~1");
    format!("{path}/{seg}")
}

pub fn parse_rational(v: &Value, path: &str) -> Parsed<BigRational> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => {
            Ok(BigRational::from_integer(BigInt::from_str(&n.to_string()).expect("integer literal")))
        }
        Value::String(s) => BigRational::from_str(s.trim())
            .map_err(|_| InputError::new(path, format!("`{s}` is not a rational number"))),
        _ => Err(InputError::new(path, "expected an integer or a rational string")),
    }
}

pub fn parse_integer(v: &Value, path: &str) -> Parsed<BigInt> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(BigInt::from_str(&n.to_string()).expect("integer literal")),
        Value::String(s) => {
            BigInt::from_str(s.trim()).map_err(|_| InputError::new(path, format!("`{s}` is not an integer")))
        }
        _ => Err(InputError::new(path, "expected an integer")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Parsed<&'a [Value]> {
    v.as_array()
        .map(Vec::as_slice)
        .ok_or_else(|| InputError::new(path, "expected an array"))
}

pub fn parse_scalar(ctx: &Arc<FieldContext>, v: &Value, path: &str) -> Parsed<Scalar> {
    let (coeffs, cpath) = match v {
        Value::Array(items) => (items.as_slice(), path.to_string()),
        Value::Object(map) => {
            let cpath = child(path, "coeffs");
            let items = map
                .get("coeffs")
                .ok_or_else(|| InputError::new(path, "scalar object needs a `coeffs` array"))?;
            (array(items, &cpath)?, cpath)
        }
        _ => return Ok(Scalar::from_rational(ctx, parse_rational(v, path)?)),
    };
    let d = ctx.degree();
    if coeffs.len() > d {
        return Err(InputError::new(
            &cpath,
            format!("{} coefficients for a field of degree {d}", coeffs.len()),
        ));
    }
    let mut out = Vec::with_capacity(d);
    for (i, c) in coeffs.iter().enumerate() {
        out.push(parse_rational(c, &child(&cpath, i))?);
    }
    out.resize(d, BigRational::from_integer(BigInt::from(0)));
    Scalar::new(ctx, out).map_err(|e| InputError::from_error(&cpath, &e))
}

/// A parsed document together with its field context.
pub struct Problem {
    raw: Value,
    pub ctx: Arc<FieldContext>,
}

impl Problem {
    pub fn parse(text: &str) -> Parsed<Problem> {
        let raw: Value = serde_json::from_str(text).map_err(|e| InputError {
            path: String::new(),
            kind: "MalformedJson".into(),
            message: e.to_string(),
        })?;
        if !raw.is_object() {
            return Err(InputError::new("", "problem file must be a JSON object"));
        }
        let ctx = match raw.get("field") {
            None | Some(Value::Null) => FieldContext::rationals(),
            Some(f) => parse_field(f)?,
        };
        Ok(Problem { raw, ctx })
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.raw.get(key).filter(|v| !v.is_null())
    }

    fn require(&self, key: &str) -> Parsed<&Value> {
        self.get(key)
            .ok_or_else(|| InputError::new(&child("", key), format!("missing field `{key}`")))
    }

    pub fn ambient_n(&self) -> Parsed<usize> {
        let v = self.require("ambient_n")?;
        v.as_u64()
            .filter(|&n| n >= 1)
            .map(|n| n as usize)
            .ok_or_else(|| InputError::new("/ambient_n", "expected a positive integer"))
    }

    pub fn scalar_vec(&self, v: &Value, path: &str, len: Option<usize>) -> Parsed<Vec<Scalar>> {
        let items = array(v, path)?;
        if let Some(n) = len {
            if items.len() != n {
                return Err(InputError::new(path, format!("expected {n} entries, found {}", items.len())));
            }
        }
        items
            .iter()
            .enumerate()
            .map(|(i, x)| parse_scalar(&self.ctx, x, &child(path, i)))
            .collect()
    }

    pub fn scalar_rows(&self, key: &str, ncols: Option<usize>) -> Parsed<(Vec<Vec<Scalar>>, usize)> {
        let path = child("", key);
        let rows = array(self.require(key)?, &path)?;
        let width = match (ncols, rows.first()) {
            (Some(n), _) => n,
            (None, Some(first)) => array(first, &child(&path, 0))?.len(),
            (None, None) => return Err(InputError::new(&path, "matrix has no rows")),
        };
        let parsed = rows
            .iter()
            .enumerate()
            .map(|(i, r)| self.scalar_vec(r, &child(&path, i), Some(width)))
            .collect::<Parsed<Vec<_>>>()?;
        Ok((parsed, width))
    }

    pub fn int_vec(&self, v: &Value, path: &str, len: Option<usize>) -> Parsed<Vec<BigInt>> {
        let items = array(v, path)?;
        if let Some(n) = len {
            if items.len() != n {
                return Err(InputError::new(path, format!("expected {n} entries, found {}", items.len())));
            }
        }
        items
            .iter()
            .enumerate()
            .map(|(i, x)| parse_integer(x, &child(path, i)))
            .collect()
    }

    fn group(&self, key: &str) -> Parsed<SubgroupSpec> {
        let n = self.ambient_n()?;
        let (rows, _) = self.scalar_rows(key, Some(n))?;
        SubgroupSpec::new(&self.ctx, n, rows).map_err(|e| InputError::from_error(&child("", key), &e))
    }

    pub fn h(&self) -> Parsed<SubgroupSpec> {
        self.group("generators_H")
    }

    pub fn g(&self) -> Parsed<SubgroupSpec> {
        self.group("generators_G")
    }

    pub fn unit(&self) -> Parsed<OrderUnit> {
        let n = self.ambient_n()?;
        let Some(v) = self.get("unit") else {
            return Ok(OrderUnit::ones(&self.ctx, n));
        };
        let coords = self.scalar_vec(v, "/unit", Some(n))?;
        OrderUnit::new(coords).map_err(|e| match e {
            Error::InvalidUnit { index } => InputError::from_error(&child("/unit", index), &e),
            other => InputError::from_error("/unit", &other),
        })
    }

    pub fn ordering(&self) -> Parsed<GroupOrdering> {
        match self.get("ordering").map(|v| v.as_str()) {
            None | Some(Some("strict")) => Ok(GroupOrdering::Strict),
            Some(Some("coordinatewise")) => Ok(GroupOrdering::Coordinatewise),
            _ => Err(InputError::new("/ordering", "expected \"strict\" or \"coordinatewise\"")),
        }
    }

    pub fn h_in_g(&self, t: usize) -> Parsed<IntMatrix> {
        let rows = array(self.require("H_in_G")?, "/H_in_G")?;
        let data = rows
            .iter()
            .enumerate()
            .map(|(i, r)| self.int_vec(r, &child("/H_in_G", i), Some(t)))
            .collect::<Parsed<Vec<_>>>()?;
        IntMatrix::new(data, t).map_err(|e| InputError::from_error("/H_in_G", &e))
    }

    pub fn trace(&self, n: usize) -> Parsed<Vec<Scalar>> {
        self.scalar_vec(self.require("trace")?, "/trace", Some(n))
    }

    pub fn matrix(&self) -> Parsed<Matrix> {
        let (rows, ncols) = self.scalar_rows("matrix", None)?;
        Matrix::new(&self.ctx, rows, ncols).map_err(|e| InputError::from_error("/matrix", &e))
    }

    pub fn vector(&self, n: usize) -> Parsed<Vec<Scalar>> {
        self.scalar_vec(self.require("vector")?, "/vector", Some(n))
    }

    /// Integer parameter from a flag, else from the file, else a default.
    pub fn integer_param(&self, flag: Option<&BigInt>, key: &str, default: Option<i64>) -> Parsed<BigInt> {
        if let Some(x) = flag {
            return Ok(x.clone());
        }
        match (self.get(key), default) {
            (Some(v), _) => parse_integer(v, &child("", key)),
            (None, Some(d)) => Ok(BigInt::from(d)),
            (None, None) => Err(InputError::new(&child("", key), format!("missing parameter `{key}`"))),
        }
    }

    pub fn rational_param(&self, flag: Option<&BigRational>, key: &str, default: Option<(i64, i64)>) -> Parsed<BigRational> {
        if let Some(x) = flag {
            return Ok(x.clone());
        }
        match (self.get(key), default) {
            (Some(v), _) => parse_rational(v, &child("", key)),
            (None, Some((n, d))) => Ok(BigRational::new(n.into(), d.into())),
            (None, None) => Err(InputError::new(&child("", key), format!("missing parameter `{key}`"))),
        }
    }

    /// Certificate either embedded under `certificate` or given as `doc`
    /// (a bare certificate or a report containing one).
    pub fn certificate(&self, doc: Option<&Value>) -> Parsed<FailureCertificate> {
        let (v, path) = match doc {
            Some(d) => match d.get("certificate") {
                Some(c) => (c, "/certificate".to_string()),
                None => (d, String::new()),
            },
            None => (self.require("certificate")?, "/certificate".to_string()),
        };
        if v.is_null() {
            return Err(InputError::new(&path, "no certificate present"));
        }
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| InputError::new(&child(&path, k), format!("certificate lacks `{k}`")))
        };
        let n = self.ambient_n()?;
        let scalar = |k: &str| parse_scalar(&self.ctx, field(k)?, &child(&path, k));
        Ok(FailureCertificate {
            h_coeffs: self.int_vec(field("h_coeffs")?, &child(&path, "h_coeffs"), None)?,
            h: self.scalar_vec(field("h")?, &child(&path, "h"), Some(n))?,
            tau1: TracePoint::unchecked(self.scalar_vec(field("tau1")?, &child(&path, "tau1"), Some(n))?),
            tau2: TracePoint::unchecked(self.scalar_vec(field("tau2")?, &child(&path, "tau2"), Some(n))?),
            lambda: scalar("lambda")?,
            delta: scalar("delta")?,
            epsilon0: scalar("epsilon0")?,
        })
    }
}

fn parse_field(f: &Value) -> Parsed<Arc<FieldContext>> {
    let poly = f
        .get("min_poly")
        .ok_or_else(|| InputError::new("/field/min_poly", "missing field `min_poly`"))?;
    let poly = array(poly, "/field/min_poly")?
        .iter()
        .enumerate()
        .map(|(i, c)| parse_rational(c, &child("/field/min_poly", i)))
        .collect::<Parsed<Vec<_>>>()?;
    let interval = f
        .get("interval")
        .ok_or_else(|| InputError::new("/field/interval", "missing field `interval`"))?;
    let bounds = array(interval, "/field/interval")?;
    if bounds.len() != 2 {
        return Err(InputError::new("/field/interval", "expected [lo, hi]"));
    }
    let lo = parse_rational(&bounds[0], "/field/interval/0")?;
    let hi = parse_rational(&bounds[1], "/field/interval/1")?;
    FieldContext::new(poly, lo, hi).map_err(|e| {
        let path = match e {
            onesided::FieldError::EmptyInterval
            | onesided::FieldError::NoRootInInterval
            | onesided::FieldError::MultipleRootsInInterval { .. } => "/field/interval",
            _ => "/field/min_poly",
        };
        InputError::from_error(path, &e)
    })
}
