//! Deterministic JSON: sorted keys, compact, floats with 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};

use qkul_core::classify::ElementClass;
use qkul_core::dynamics::{EllipticCheck, PseudoLimit, VerificationReport};
use qkul_core::limitset::{LimitKind, LimitSet};
use qkul_core::projective::{Flavor, ProjPoint, ProjSubspace};
use qkul_core::qmat::{JordanData, QMatrix};
use qkul_core::quat::format_literal;

struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Serialize with sorted keys (the default map is ordered) and fixed float formatting.
pub fn to_bytes(v: &Value) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats);
    v.serialize(&mut ser).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    out
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn point(p: &ProjPoint) -> Value {
    Value::Array(p.coords().iter().map(|&q| Value::String(format_literal(q))).collect())
}

pub fn matrix(m: &QMatrix) -> Value {
    Value::Array(m.rows().map(|r| Value::Array(r.iter().map(|&q| Value::String(format_literal(q))).collect())).collect())
}

fn flavor(f: Flavor) -> &'static str {
    match f {
        Flavor::QuaternionicSpan => "QuaternionicSpan",
        Flavor::ComplexSlice => "ComplexSlice",
        Flavor::PointSet => "PointSet",
    }
}

pub fn subspace(w: &ProjSubspace) -> Value {
    let mut m = Map::new();
    m.insert("flavor".into(), flavor(w.flavor()).into());
    m.insert("dimension".into(), w.dimension().into());
    m.insert("generators".into(), Value::Array(w.generators().iter().map(point).collect()));
    if let Some(s) = w.coordinate_support() {
        m.insert("support".into(), s.into());
    }
    Value::Object(m)
}

pub fn limit_set(ls: &LimitSet) -> Value {
    let kind = match ls.kind {
        LimitKind::Empty => "Empty",
        LimitKind::Whole => "Whole",
        LimitKind::Union => "Union",
    };
    if ls.kind == LimitKind::Whole && ls.components.is_empty() {
        return json!({ "kind": kind });
    }
    let mut m = Map::new();
    m.insert("kind".into(), kind.into());
    m.insert("components".into(), Value::Array(ls.components.iter().map(subspace).collect()));
    if !ls.levels.is_empty() {
        let levels: Map<String, Value> = ls.levels.iter().map(|(l, idx)| (l.name().into(), idx.clone().into())).collect();
        m.insert("levels".into(), Value::Object(levels));
    }
    if ls.as_printed {
        m.insert("asPrinted".into(), true.into());
    }
    Value::Object(m)
}

pub fn classification(cls: &ElementClass, jd: &JordanData) -> Value {
    let blocks: Vec<Value> = jd
        .blocks
        .iter()
        .zip(&cls.params.angles)
        .map(|(b, a)| {
            let mut m = Map::new();
            m.insert("eigenvalue".into(), format_literal(b.eigenvalue.to_quaternion()).into());
            m.insert("size".into(), b.size.into());
            m.insert("angle".into(), num(a.angle));
            m.insert(
                "rational".into(),
                a.rational.map_or(Value::Null, |(p, q)| Value::String(format!("{p}/{q}"))),
            );
            m.insert("declared".into(), a.declared.into());
            Value::Object(m)
        })
        .collect();
    let mut m = Map::new();
    m.insert("class".into(), cls.tag.name().into());
    m.insert("coarse".into(), format!("{:?}", cls.coarse).into());
    m.insert("blocks".into(), Value::Array(blocks));
    m.insert("normalization".into(), num(cls.normalization));
    m.insert("rationalityInferred".into(), cls.rationality_inferred.into());
    m.insert("conjugator".into(), matrix(&jd.conjugator));
    m.insert("residual".into(), num(jd.residual));
    if let Some(note) = &cls.note {
        m.insert("note".into(), note.clone().into());
    }
    Value::Object(m)
}

pub fn report(r: &VerificationReport) -> Value {
    let elliptic = match &r.elliptic {
        None => Value::Null,
        Some(EllipticCheck::FiniteOrder { order, max_orbit_size, returned }) => json!({
            "kind": "FiniteOrder",
            "order": order,
            "maxOrbitSize": max_orbit_size,
            "returned": returned,
        }),
        Some(EllipticCheck::Recurrence { power, displacement }) => json!({
            "kind": "Recurrence",
            "power": power,
            "displacement": num(*displacement),
        }),
    };
    json!({
        "seed": r.seed,
        "class": r.tag.name(),
        "epsContain": num(r.eps_contain),
        "containment": num(r.containment),
        "cloudSize": r.cloud_size,
        "maxDistance": num(r.max_distance),
        "coverage": r.coverage.iter().map(|&c| num(c)).collect::<Vec<_>>(),
        "elliptic": elliptic,
        "seeds": r.seeds,
        "samples": r.samples,
        "iters": r.iters,
        "passed": r.passed,
    })
}

pub fn pseudo_limit(p: &PseudoLimit) -> Value {
    json!({
        "limitMatrix": matrix(&p.limit_matrix),
        "kernel": p.kernel.as_ref().map_or(Value::Null, subspace),
        "image": subspace(&p.image),
        "converged": p.converged,
        "defect": num(p.defect),
        "power": p.power,
    })
}
