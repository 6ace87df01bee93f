//! JSON rendering of engine results. Exact values are written as coefficient
//! strings plus a 30-digit decimal; integers and rationals as strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use onesided::decision::{DecisionOutcome, FailureCertificate};
use onesided::density::{LineGroupClass, PropertyA};
use onesided::face::{FaceDescriptor, ZSet};
use onesided::ordered::{Purity, Refinability, Unperforation};
use onesided::simplex::{FarkasResult, GordanResult};
use onesided::witness::{SearchTier, Witness};
use onesided::{Scalar, TracePoint};
use serde_json::{json, Value};

pub const DECIMAL_DIGITS: usize = 30;

pub fn scalar(x: &Scalar) -> Value {
    json!({
        "coeffs": x.coeffs().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "decimal": x.to_decimal(DECIMAL_DIGITS),
    })
}

pub fn scalars(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

pub fn int(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

pub fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn rational(q: &BigRational) -> Value {
    Value::String(q.to_string())
}

pub fn trace(t: &TracePoint) -> Value {
    scalars(t.coords())
}

pub fn certificate(c: &FailureCertificate) -> Value {
    json!({
        "h_coeffs": ints(&c.h_coeffs),
        "h": scalars(&c.h),
        "tau1": trace(&c.tau1),
        "tau2": trace(&c.tau2),
        "lambda": scalar(&c.lambda),
        "delta": scalar(&c.delta),
        "epsilon0": scalar(&c.epsilon0),
    })
}

pub fn z_set(z: &ZSet) -> Value {
    match z {
        ZSet::Empty(cert) => json!({
            "empty": true,
            "positivity_certificate": {
                "x": ints(&cert.x),
                "v": scalars(&cert.v),
                "margin": scalar(&cert.margin),
            },
        }),
        ZSet::Nonempty(point) => json!({ "empty": false, "point": trace(point) }),
    }
}

pub fn face(f: &FaceDescriptor) -> Value {
    json!({
        "support": f.support,
        "relative_interior": f.relative_interior.as_ref().map(trace),
        "maximizers": f.maximizers.iter().map(|(i, t)| json!({ "coordinate": i, "trace": trace(t) })).collect::<Vec<_>>(),
    })
}

pub fn property_a(p: &PropertyA) -> Value {
    match p {
        PropertyA::Holds => json!({ "holds": true }),
        PropertyA::Fails { m } => json!({ "holds": false, "m": ints(m) }),
    }
}

pub fn decision(out: &DecisionOutcome) -> Value {
    json!({
        "verdict": out.verdict.to_string(),
        "route_ii": property_a(&out.route_ii),
        "route_iii": { "dense": out.route_iii_dense, "coordinates": out.route_iii_coords },
        "z_set": z_set(&out.z_set),
        "face": out.face.as_ref().map(face),
        "certificate": out.certificate.as_ref().map(certificate),
        "notes": out.notes,
    })
}

fn tier(t: SearchTier) -> &'static str {
    match t {
        SearchTier::Positivity => "positivity",
        SearchTier::Structured => "structured",
        SearchTier::Enumeration => "enumeration",
        SearchTier::Supplied => "supplied",
    }
}

pub fn witness(w: &Witness) -> Value {
    json!({
        "coeffs": ints(&w.coeffs),
        "m": int(&w.m),
        "epsilon": rational(&w.epsilon),
        "h_coeffs": ints(&w.h_coeffs),
        "slack": scalars(&w.slack),
        "found_by": tier(w.found_by),
    })
}

pub fn line_group(c: &LineGroupClass) -> Value {
    match c {
        LineGroupClass::Zero => json!({ "class": "Zero" }),
        LineGroupClass::Discrete { delta, multiples, bezout } => json!({
            "class": "Discrete",
            "delta": scalar(delta),
            "multiples": ints(multiples),
            "bezout": ints(bezout),
        }),
        LineGroupClass::Dense => json!({ "class": "Dense" }),
    }
}

pub fn gordan(g: &GordanResult) -> Value {
    match g {
        GordanResult::AltI { y } => json!({ "alternative": "i", "y": scalars(y) }),
        GordanResult::AltII { x, values } => json!({ "alternative": "ii", "x": ints(x), "values": scalars(values) }),
    }
}

pub fn farkas(f: &FarkasResult) -> Value {
    match f {
        FarkasResult::AltI { y } => json!({ "alternative": "i", "y": scalars(y) }),
        FarkasResult::AltII { x } => json!({ "alternative": "ii", "x": scalars(x) }),
    }
}

pub fn purity(p: &Purity) -> Value {
    match p {
        Purity::TorsionFree => json!({ "status": "TorsionFree" }),
        Purity::Torsion { k, g_coeffs, g } => json!({
            "status": "Torsion",
            "k": int(k),
            "g_coeffs": ints(g_coeffs),
            "g": scalars(g),
        }),
    }
}

pub fn unperforation(u: &Unperforation) -> Value {
    match u {
        Unperforation::Unperforated => json!({ "status": "Unperforated" }),
        Unperforation::Perforated { certificate: cert, instance } => json!({
            "status": "Perforated",
            "certificate": certificate(cert),
            "instance": instance.as_ref().map(|i| json!({
                "g_coeffs": ints(&i.g_coeffs),
                "g": scalars(&i.g),
                "m": i.m,
                "h_coeffs": ints(&i.h_coeffs),
            })),
        }),
    }
}

pub fn refinability(r: &Refinability) -> Value {
    match r {
        Refinability::Refinable => json!({ "status": "Refinable" }),
        Refinability::NotRefinable { kernel_coeffs, kernel_element } => json!({
            "status": "NotRefinable",
            "kernel_coeffs": ints(kernel_coeffs),
            "kernel_element": scalars(kernel_element),
        }),
    }
}
