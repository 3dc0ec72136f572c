//! One handler per subcommand. Each returns both renderings of its result.

use std::cmp::Ordering;

use hecke_core::bqf::{
    cycle_of, equivalence_witness, form_of, hecke_conjugate, phi_apply, phi_orbit, reduce,
    simple_set, stabilizer,
};
use hecke_core::cf::{evaluate_finite, evaluate_periodic, expand};
use hecke_core::group::{u_zero, word_to_matrix};
use hecke_core::json::{
    cf_to_json, cycle_to_json, form_to_json, matrix_to_json, orbit_to_json, point_to_json,
    surd_to_json, trace_to_json, word_to_json,
};
use hecke_core::text::{
    parse_cf, parse_form, parse_matrix, parse_surd, parse_word, render_cf, render_form,
    render_matrix, render_point, render_surd, render_word,
};
use hecke_core::{Error, ExtendedPoint, FieldContext, GroupElem, Result};
use serde_json::{json, Value};

pub struct Output {
    pub text: String,
    pub json: Value,
    /// Set by checks that ran but did not pass.
    pub failed: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            failed: false,
        }
    }
}

fn usage(msg: &str) -> Error {
    Error::Parse {
        pos: 0,
        msg: msg.into(),
    }
}

/// Splits a two-input batch line at `|`.
pub fn split_pair(line: &str) -> Result<(&str, &str)> {
    line.split_once('|')
        .ok_or_else(|| usage("expected two inputs separated by '|'"))
}

/// Left-aligned columns separated by two spaces.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let n = cells.len();
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i + 1 == n {
                    c.to_string()
                } else {
                    format!("{c:<w$}", w = width[i])
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut out = vec![line(header.to_vec())];
    out.extend(
        rows.iter()
            .map(|r| line(r.iter().map(String::as_str).collect())),
    );
    out.join("\n")
}

pub fn group_check(ctx: &FieldContext) -> Result<Output> {
    let p = ctx.p() as i64;
    let id = GroupElem::identity(ctx);
    let t = GroupElem::gen_t(ctx);
    let t2 = t.mul(&t).proj_eq(&id);
    let up = GroupElem::gen_u(ctx).pow(p).proj_eq(&id);
    let zeros: Vec<ExtendedPoint> = (1..=p).map(|k| u_zero(ctx, k)).collect::<Result<_>>()?;
    let mut chain = true;
    for k in 1..zeros.len() {
        chain &= zeros[k].cmp_value(&zeros[k - 1])? == Ordering::Less;
    }
    let mut recip = true;
    for k in 2..p {
        let x = &zeros[k as usize - 1];
        let inv: ExtendedPoint = match x.finite().and_then(|s| s.recip()) {
            Some(s) => s.into(),
            None => ExtendedPoint::Infinity,
        };
        recip &= inv.value_eq(&zeros[(p - k) as usize]);
    }
    let checks = [
        ("T^2 = I", t2),
        ("U^p = I", up),
        ("U^p(0) < ... < U^1(0)", chain),
        ("1/U^k(0) = U^(p-k+1)(0)", recip),
    ];
    let rendered: Vec<String> = zeros.iter().rev().map(render_point).collect();
    let mut text = format!("p = {p}\n");
    for (name, ok) in &checks {
        text += &format!("{name}: {}\n", if *ok { "pass" } else { "FAIL" });
    }
    text += &format!("U^k(0), k = {p}..1: {}", rendered.join(" < "));
    let json = json!({
        "p": p,
        "checks": checks.iter().map(|(n, ok)| json!({ "name": n, "pass": ok })).collect::<Vec<_>>(),
        "chain": zeros.iter().rev().map(point_to_json).collect::<Vec<_>>(),
    });
    Ok(Output {
        text,
        json,
        failed: !checks.iter().all(|c| c.1),
    })
}

pub fn cf_expand(ctx: &FieldContext, input: &str, max: usize) -> Result<Output> {
    let x = parse_surd(ctx, input)?;
    let (cf, _) = expand(&x, max)?;
    Ok(Output::new(render_cf(&cf), cf_to_json(&cf)))
}

pub fn cf_eval(ctx: &FieldContext, input: &str, max: usize) -> Result<Output> {
    let cf = parse_cf(input)?;
    let x: ExtendedPoint = if cf.is_finite() {
        evaluate_finite(ctx, &cf.preperiod)
    } else {
        evaluate_periodic(ctx, &cf, max)?.into()
    };
    Ok(Output::new(render_point(&x), point_to_json(&x)))
}

pub fn form_reduce(ctx: &FieldContext, input: &str, max: usize) -> Result<Output> {
    let q = parse_form(ctx, input)?;
    let t = reduce(&q, max)?;
    let rows: Vec<Vec<String>> = t
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| vec![i.to_string(), s.r.to_string(), render_form(&s.form)])
        .collect();
    let text = format!(
        "{}\nterminal: {}\nexponents: {}\ntransform: {}",
        table(&["step", "r", "form"], &rows),
        render_form(&t.terminal),
        render_word(&t.exponents()),
        render_matrix(&t.transform),
    );
    Ok(Output::new(text, trace_to_json(&t)))
}

pub fn form_cycle(ctx: &FieldContext, input: &str, max: usize) -> Result<Output> {
    let q = parse_form(ctx, input)?;
    let (_, c) = cycle_of(&q, max)?;
    let rows: Vec<Vec<String>> = c
        .forms
        .iter()
        .zip(&c.exponents)
        .zip(&c.numbers)
        .enumerate()
        .map(|(j, ((f, r), x))| vec![j.to_string(), r.to_string(), render_form(f), render_surd(x)])
        .collect();
    let text = format!(
        "{}\nrecurrence length: {}\nperiod length: {}",
        table(&["j", "r", "form", "alpha"], &rows),
        c.forms.len(),
        c.period_length
    );
    Ok(Output::new(text, cycle_to_json(&c)))
}

pub fn form_equiv(ctx: &FieldContext, a: &str, b: &str, max: usize) -> Result<Output> {
    let q1 = parse_form(ctx, a)?;
    let q2 = parse_form(ctx, b)?;
    let w = equivalence_witness(&q1, &q2, max)?;
    let mut text = format!("equivalent: {}", w.is_some());
    if let Some(m) = &w {
        text += &format!("\nwitness: {}", render_matrix(m));
    }
    let json = json!({
        "equivalent": w.is_some(),
        "witness": w.as_ref().map(matrix_to_json),
    });
    Ok(Output::new(text, json))
}

/// `by` is a matrix `(a, b; c, d)` or a word `[r0, ..., rn]`.
pub fn form_act(ctx: &FieldContext, form: &str, by: &str) -> Result<Output> {
    let q = parse_form(ctx, form)?;
    let m = if by.trim_start().starts_with('[') {
        word_to_matrix(ctx, &parse_word(by)?)
    } else {
        parse_matrix(ctx, by)?
    };
    let r = q.act(&m);
    Ok(Output::new(render_form(&r), form_to_json(&r)))
}

pub fn number_of_form(ctx: &FieldContext, input: &str) -> Result<Output> {
    let x = parse_form(ctx, input)?.alpha()?;
    Ok(Output::new(render_surd(&x), surd_to_json(&x)))
}

pub fn form_of_number(ctx: &FieldContext, input: &str, max: usize) -> Result<Output> {
    let q = form_of(&parse_surd(ctx, input)?, max)?;
    Ok(Output::new(render_form(&q), form_to_json(&q)))
}

pub fn simple(ctx: &FieldContext, input: &str, max: usize) -> Result<Output> {
    let q = parse_form(ctx, input)?;
    let (_, c) = cycle_of(&q, max)?;
    let set = simple_set(&c, max)?;
    let rows: Vec<Vec<String>> = set
        .iter()
        .map(|m| {
            vec![
                m.source.to_string(),
                m.shift.to_string(),
                render_form(&m.form),
                render_surd(&m.number),
            ]
        })
        .collect();
    let text = format!(
        "{}\ncount: {}",
        table(&["source", "i", "form", "number"], &rows),
        set.len()
    );
    let json = json!({
        "members": set
            .iter()
            .map(|m| json!({
                "source": m.source,
                "shift": m.shift,
                "form": form_to_json(&m.form),
                "number": surd_to_json(&m.number),
            }))
            .collect::<Vec<_>>(),
    });
    Ok(Output::new(text, json))
}

pub fn phi_apply_cmd(ctx: &FieldContext, input: &str) -> Result<Output> {
    let (y, i) = phi_apply(&parse_surd(ctx, input)?)?;
    Ok(Output::new(
        format!("{}\nbranch: {i}", render_surd(&y)),
        json!({ "value": surd_to_json(&y), "branch": i }),
    ))
}

pub fn phi_orbit_cmd(ctx: &FieldContext, input: &str, max: usize) -> Result<Output> {
    let o = phi_orbit(&parse_surd(ctx, input)?, max)?;
    let rows: Vec<Vec<String>> = o
        .members
        .iter()
        .zip(&o.branches)
        .enumerate()
        .map(|(j, (x, i))| vec![j.to_string(), i.to_string(), render_surd(x)])
        .collect();
    let text = format!(
        "{}\nlength: {}",
        table(&["j", "branch", "member"], &rows),
        o.len()
    );
    Ok(Output::new(text, orbit_to_json(&o)))
}

pub fn stabilizer_cmd(ctx: &FieldContext, input: &str, max: usize) -> Result<Output> {
    let x = parse_surd(ctx, input)?;
    let s = stabilizer(&x, max)?;
    let conj = hecke_conjugate(&x, max)?;
    let text = format!(
        "cf: {}\nV: {}\nW: {}\nM: {}\nconjugate: {}",
        render_cf(&s.cf),
        render_matrix(&s.v),
        render_matrix(&s.w),
        render_matrix(&s.m),
        render_point(&conj),
    );
    let json = json!({
        "cf": cf_to_json(&s.cf),
        "v": word_to_json(ctx, &s.cf.preperiod),
        "w": word_to_json(ctx, &s.cf.period),
        "m": matrix_to_json(&s.m),
        "conjugate": point_to_json(&conj),
    });
    Ok(Output::new(text, json))
}
