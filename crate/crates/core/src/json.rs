//! JSON encodings. Elements carry exact coefficient vectors; integers of any
//! size are written as JSON numbers.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Number, Value};

use crate::bqf::{QForm, ReducedCycle, ReductionStep, ReductionTrace, SimpleOrbit};
use crate::cf::PeriodicCf;
use crate::error::{Error, Result};
use crate::group::{word_to_matrix, GroupElem};
use crate::ring::{FieldContext, RingElem};
use crate::surd::{ExtendedPoint, Surd};
use crate::text;

fn big(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integer literal"))
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| bad(format!("missing field '{key}'")))
}

fn to_big(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            BigInt::from_str(&n.to_string()).map_err(|_| bad(format!("not an integer: {n}")))
        }
        _ => Err(bad(format!("expected an integer, got {v}"))),
    }
}

fn to_i64s(v: &Value) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| bad("expected an array"))?
        .iter()
        .map(|x| {
            x.as_i64()
                .ok_or_else(|| bad(format!("expected a small integer, got {x}")))
        })
        .collect()
}

fn to_array(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| bad("expected an array"))
}

pub fn elem_to_json(x: &RingElem) -> Value {
    json!({
        "coeffs": x.coeffs().iter().map(big).collect::<Vec<_>>(),
        "denom": big(x.denom()),
    })
}

pub fn elem_from_json(ctx: &FieldContext, v: &Value) -> Result<RingElem> {
    let coeffs = to_array(field(v, "coeffs")?)?
        .iter()
        .map(to_big)
        .collect::<Result<Vec<_>>>()?;
    let denom = to_big(field(v, "denom")?)?;
    if !denom.is_positive() {
        return Err(bad("denominator must be positive"));
    }
    Ok(RingElem::from_parts(ctx, coeffs, denom))
}

/// `{"P", "Q", "R", "D"}` for `(P + Q*sqrt(D))/R`; `Q` and `D` are zero for
/// values in `Q(lambda)`.
pub fn surd_to_json(s: &Surd) -> Value {
    let (p, q, r, d) = s.components();
    json!({
        "P": elem_to_json(&p),
        "Q": elem_to_json(&q),
        "R": big(&r),
        "D": elem_to_json(&d),
    })
}

pub fn surd_from_json(ctx: &FieldContext, v: &Value) -> Result<Surd> {
    let p = elem_from_json(ctx, field(v, "P")?)?;
    let q = elem_from_json(ctx, field(v, "Q")?)?;
    let r = to_big(field(v, "R")?)?;
    if r.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let d = elem_from_json(ctx, field(v, "D")?)?;
    Surd::new(&p, &q, &RingElem::from_int(ctx, r), &d)
}

/// A surd object, or the string `"inf"`.
pub fn point_to_json(x: &ExtendedPoint) -> Value {
    match x {
        ExtendedPoint::Infinity => Value::String("inf".into()),
        ExtendedPoint::Finite(s) => surd_to_json(s),
    }
}

pub fn point_from_json(ctx: &FieldContext, v: &Value) -> Result<ExtendedPoint> {
    match v {
        Value::String(s) if s == "inf" => Ok(ExtendedPoint::Infinity),
        _ => surd_from_json(ctx, v).map(ExtendedPoint::Finite),
    }
}

/// Entries as element-grammar strings.
pub fn matrix_to_json(m: &GroupElem) -> Value {
    json!({
        "a": text::render_elem(m.a()),
        "b": text::render_elem(m.b()),
        "c": text::render_elem(m.c()),
        "d": text::render_elem(m.d()),
    })
}

pub fn matrix_from_json(ctx: &FieldContext, v: &Value) -> Result<GroupElem> {
    let entry = |k: &str| -> Result<RingElem> {
        let s = field(v, k)?
            .as_str()
            .ok_or_else(|| bad(format!("matrix entry '{k}' must be a string")))?;
        text::parse_elem(ctx, s)
    };
    GroupElem::new(entry("a")?, entry("b")?, entry("c")?, entry("d")?)
}

pub fn form_to_json(q: &QForm) -> Value {
    json!({
        "A": elem_to_json(q.a()),
        "B": elem_to_json(q.b()),
        "C": elem_to_json(q.c()),
    })
}

pub fn form_from_json(ctx: &FieldContext, v: &Value) -> Result<QForm> {
    QForm::new(
        elem_from_json(ctx, field(v, "A")?)?,
        elem_from_json(ctx, field(v, "B")?)?,
        elem_from_json(ctx, field(v, "C")?)?,
    )
}

pub fn cf_to_json(cf: &PeriodicCf) -> Value {
    json!({ "preperiod": cf.preperiod, "period": cf.period })
}

pub fn cf_from_json(v: &Value) -> Result<PeriodicCf> {
    Ok(PeriodicCf::new(
        to_i64s(field(v, "preperiod")?)?,
        to_i64s(field(v, "period")?)?,
    ))
}

pub fn trace_to_json(t: &ReductionTrace) -> Value {
    let steps: Vec<Value> = t
        .steps
        .iter()
        .map(|s| json!({ "form": form_to_json(&s.form), "r": s.r }))
        .collect();
    json!({
        "steps": steps,
        "terminal": form_to_json(&t.terminal),
        "transform": matrix_to_json(&t.transform),
    })
}

/// Rebuilds a trace; the numbers are recomputed from the forms.
pub fn trace_from_json(ctx: &FieldContext, v: &Value) -> Result<ReductionTrace> {
    let steps = to_array(field(v, "steps")?)?
        .iter()
        .map(|s| {
            Ok(ReductionStep {
                form: form_from_json(ctx, field(s, "form")?)?,
                r: field(s, "r")?
                    .as_i64()
                    .ok_or_else(|| bad("'r' must be an integer"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let terminal = form_from_json(ctx, field(v, "terminal")?)?;
    let transform = matrix_from_json(ctx, field(v, "transform")?)?;
    let numbers = steps
        .iter()
        .map(|s| &s.form)
        .chain(std::iter::once(&terminal))
        .map(QForm::alpha)
        .collect::<Result<Vec<_>>>()?;
    Ok(ReductionTrace {
        steps,
        terminal,
        transform,
        numbers,
    })
}

pub fn cycle_to_json(c: &ReducedCycle) -> Value {
    json!({
        "forms": c.forms.iter().map(form_to_json).collect::<Vec<_>>(),
        "exponents": c.exponents,
        "recurrence_length": c.forms.len(),
        "period_length": c.period_length,
    })
}

pub fn cycle_from_json(ctx: &FieldContext, v: &Value) -> Result<ReducedCycle> {
    let forms = to_array(field(v, "forms")?)?
        .iter()
        .map(|f| form_from_json(ctx, f))
        .collect::<Result<Vec<_>>>()?;
    let exponents = to_i64s(field(v, "exponents")?)?;
    let period_length = field(v, "period_length")?
        .as_u64()
        .ok_or_else(|| bad("'period_length' must be a non-negative integer"))?
        as usize;
    let numbers = forms.iter().map(QForm::alpha).collect::<Result<Vec<_>>>()?;
    Ok(ReducedCycle {
        forms,
        exponents,
        numbers,
        period_length,
    })
}

pub fn orbit_to_json(o: &SimpleOrbit) -> Value {
    json!({
        "members": o.members.iter().map(surd_to_json).collect::<Vec<_>>(),
        "branches": o.branches,
    })
}

pub fn orbit_from_json(ctx: &FieldContext, v: &Value) -> Result<SimpleOrbit> {
    let members = to_array(field(v, "members")?)?
        .iter()
        .map(|m| surd_from_json(ctx, m))
        .collect::<Result<Vec<_>>>()?;
    let branches = to_i64s(field(v, "branches")?)?
        .into_iter()
        .map(|b| usize::try_from(b).map_err(|_| bad("negative branch")))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimpleOrbit { members, branches })
}

/// A word together with its matrix, as emitted by the CLI.
pub fn word_to_json(ctx: &FieldContext, w: &[i64]) -> Value {
    let mut m = Map::new();
    m.insert("word".into(), json!(w));
    m.insert("matrix".into(), matrix_to_json(&word_to_matrix(ctx, w)));
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqf::{cycle_of, phi_orbit};
    use crate::text::{parse_form, parse_surd};

    #[test]
    fn element_round_trip() {
        let ctx = FieldContext::new(7).unwrap();
        let x = text::parse_elem(&ctx, "(1/2)L^2-1").unwrap();
        let v = elem_to_json(&x);
        assert_eq!(v.to_string(), r#"{"coeffs":[-2,0,1],"denom":2}"#);
        assert_eq!(elem_from_json(&ctx, &v).unwrap(), x);
        let huge = RingElem::from_int(&ctx, BigInt::from(10).pow(40));
        assert_eq!(elem_from_json(&ctx, &elem_to_json(&huge)).unwrap(), huge);
        assert!(elem_from_json(&ctx, &json!({"coeffs": [1], "denom": 0})).is_err());
        assert!(elem_from_json(&ctx, &json!({"coeffs": "x", "denom": 1})).is_err());
    }

    #[test]
    fn composite_round_trips() {
        let ctx = FieldContext::new(5).unwrap();
        let s = parse_surd(&ctx, "(-3L-3 + sqrt(135L+86))/(6L+8)").unwrap();
        assert_eq!(surd_from_json(&ctx, &surd_to_json(&s)).unwrap(), s);
        let inf = ExtendedPoint::Infinity;
        assert_eq!(point_from_json(&ctx, &point_to_json(&inf)).unwrap(), inf);

        let q = parse_form(&ctx, "[-3L-2, 27L+15, -51L-32]").unwrap();
        assert_eq!(form_from_json(&ctx, &form_to_json(&q)).unwrap(), q);
        let (t, c) = cycle_of(&q, 1000).unwrap();
        let t2 = trace_from_json(&ctx, &trace_to_json(&t)).unwrap();
        assert_eq!(trace_to_json(&t2), trace_to_json(&t));
        let c2 = cycle_from_json(&ctx, &cycle_to_json(&c)).unwrap();
        assert_eq!(c2.forms, c.forms);
        let o = phi_orbit(&s, 100).unwrap();
        let o2 = orbit_from_json(&ctx, &orbit_to_json(&o)).unwrap();
        assert_eq!(o2.members, o.members);
        assert_eq!(o2.branches, o.branches);

        let cf = PeriodicCf::new(vec![2, 3], vec![2, 1, 1, 4]);
        assert_eq!(cf_from_json(&cf_to_json(&cf)).unwrap(), cf);
        let m = word_to_matrix(&ctx, &[2, 3]);
        assert_eq!(matrix_from_json(&ctx, &matrix_to_json(&m)).unwrap(), m);
    }
}
