//! Batch invariant checks over group words.
//!
//! Each case is a word `(r_0, ..., r_n)` whose matrix `S^{r_0}T...S^{r_n}T`
//! supplies a hyperbolic point, plus an auxiliary word used to move points
//! and forms around. All comparisons are exact.

use crate::bqf::{cycle_of, form_of, hecke_conjugate, is_reduced_number, phi_orbit, simple_set};
use crate::cf::{cyclic_equal, evaluate_periodic, expand, is_admissible, reverse_period};
use crate::error::Result;
use crate::group::{word_to_matrix, Classification, FixedPoints};
use crate::parallel::{par_map, seq_map};
use crate::ring::FieldContext;
use crate::surd::{ExtendedPoint, Surd};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case {
    pub word: Vec<i64>,
    pub aux: Vec<i64>,
}

/// Outcome of one case. `skipped` is set when the word matrix is not
/// hyperbolic, in which case no invariant applies.
#[derive(Debug, Clone, Default)]
pub struct CaseReport {
    pub skipped: bool,
    pub failures: Vec<String>,
    pub cycle_len: usize,
    pub simple_count: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SweepSummary {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<(Case, String)>,
}

impl SweepSummary {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn same_point(x: &ExtendedPoint, y: &ExtendedPoint) -> bool {
    match (x, y) {
        (ExtendedPoint::Finite(a), ExtendedPoint::Finite(b)) => {
            let formal = a.radicand_handle().is_some_and(|r| r.root().is_none());
            if formal {
                a == b
            } else {
                a.value_eq(b)
            }
        }
        _ => x.value_eq(y),
    }
}

/// Runs every invariant for one case.
pub fn check_case(ctx: &FieldContext, case: &Case, max_steps: usize) -> CaseReport {
    let mut rep = CaseReport::default();
    if let Err(e) = run_checks(ctx, case, max_steps, &mut rep) {
        rep.failures.push(format!("error: {e}"));
    }
    rep
}

fn run_checks(
    ctx: &FieldContext,
    case: &Case,
    max_steps: usize,
    rep: &mut CaseReport,
) -> Result<()> {
    let m = word_to_matrix(ctx, &case.word);
    if m.classify() != Classification::Hyperbolic {
        rep.skipped = true;
        return Ok(());
    }
    let FixedPoints::Hyperbolic { plus, .. } = m.fixed_points()? else {
        unreachable!("hyperbolic");
    };
    let Some(alpha) = plus.into_finite() else {
        rep.skipped = true;
        return Ok(());
    };

    // Expansion is periodic and admissible; evaluation inverts it.
    let (cf, _) = expand(&alpha, max_steps)?;
    if cf.period.is_empty() {
        rep.failures.push(format!("finite expansion {cf}"));
        return Ok(());
    }
    let adm = is_admissible(&cf, ctx.p());
    if !adm.ok() {
        rep.failures
            .push(format!("{cf} not admissible: {:?}", adm.violations));
    }
    let back = evaluate_periodic(ctx, &cf, max_steps)?;
    if !back.value_eq(&alpha) {
        rep.failures
            .push(format!("evaluate(expand(alpha)) = {back}, alpha = {alpha}"));
    }

    // Form side.
    let q = form_of(&alpha, max_steps)?;
    let v = word_to_matrix(ctx, &case.aux);
    let qv = q.act(&v);
    if qv.discriminant() != q.discriminant() {
        rep.failures.push(format!("discriminant changed under {v}"));
    }
    let vinv_alpha = v.inv().apply_surd(&alpha);
    if let Ok(beta) = qv.alpha() {
        if !vinv_alpha.value_eq(&beta.into()) {
            rep.failures.push(format!(
                "alpha of Q o V differs from V^-1 alpha for V = {v}"
            ));
        }
    }
    let w = word_to_matrix(ctx, &case.word);
    if !q.act(&v).act(&w).eq(&q.act(&v.mul(&w))) {
        rep.failures.push("action is not a right action".into());
    }

    // Conjugation commutes with the action.
    let va = v.apply_surd(&alpha);
    let lhs = match &va {
        ExtendedPoint::Finite(s) => ExtendedPoint::Finite(s.conjugate()),
        ExtendedPoint::Infinity => ExtendedPoint::Infinity,
    };
    let rhs = v.apply_surd(&alpha.conjugate());
    if !same_point(&lhs, &rhs) {
        rep.failures
            .push(format!("(V alpha)' = {lhs} but V alpha' = {rhs}"));
    }

    // Reduction, cycle, reducedness characterizations.
    let (trace, cycle) = cycle_of(&q, max_steps)?;
    rep.cycle_len = cycle.len();
    for x in trace.numbers.iter().take(trace.steps.len()) {
        if is_reduced_number(x, max_steps)?.is_some() {
            rep.failures
                .push(format!("pre-cycle number {x} is reduced"));
        }
    }
    if let ExtendedPoint::Finite(s) = &va {
        is_reduced_number(s, max_steps)?;
    }
    if !cyclic_equal(&cycle.exponents, &cf.period) {
        rep.failures.push(format!(
            "cycle exponents {:?} vs period {:?}",
            cycle.exponents, cf.period
        ));
    }
    for beta in &cycle.numbers {
        let Some(k) = is_reduced_number(beta, max_steps)? else {
            rep.failures
                .push(format!("cycle member {beta} is not reduced"));
            continue;
        };
        let (bcf, _) = expand(beta, max_steps)?;
        if bcf.period.iter().take_while(|&&r| r == 1).count() != k {
            rep.failures
                .push(format!("leading ones of {bcf} differ from k = {k}"));
        }
        // 1/beta' has the reversed period.
        let conj = hecke_conjugate(beta, max_steps)?;
        let Some(inv) = conj.finite().and_then(Surd::recip) else {
            rep.failures.push(format!(
                "conjugate of reduced {beta} is not a positive real"
            ));
            continue;
        };
        let (rcf, _) = expand(&inv, max_steps)?;
        if !cyclic_equal(&rcf.period, &reverse_period(&bcf.period)) {
            rep.failures.push(format!(
                "1/beta' has period {:?}, expected reverse of {:?}",
                rcf.period, bcf.period
            ));
        }
    }

    // Simple numbers and the orbit of Phi_p.
    let set = simple_set(&cycle, max_steps)?;
    rep.simple_count = set.len();
    let expected: i64 = cycle
        .numbers
        .iter()
        .map(|b| i64::try_from(b.floor_div_lambda()).unwrap_or(i64::MAX))
        .sum();
    if expected != set.len() as i64 {
        rep.failures.push(format!(
            "simple set has {} members, expected {expected}",
            set.len()
        ));
    }
    if set.is_empty() {
        rep.failures.push("empty simple set".into());
        return Ok(());
    }
    let orbit = phi_orbit(&set[0].number, max_steps)?;
    let same = orbit.members.len() == set.len()
        && orbit
            .members
            .iter()
            .zip(&set)
            .all(|(o, s)| o.value_key() == s.number.value_key());
    if !same {
        rep.failures.push(format!(
            "Phi orbit ({} members) differs from simple set ({})",
            orbit.members.len(),
            set.len()
        ));
    }
    Ok(())
}

fn summarize(cases: &[Case], reports: Vec<CaseReport>) -> SweepSummary {
    let mut s = SweepSummary::default();
    for (c, r) in cases.iter().zip(reports) {
        if r.skipped {
            s.skipped += 1;
            continue;
        }
        s.checked += 1;
        s.failures
            .extend(r.failures.into_iter().map(|f| (c.clone(), f)));
    }
    s
}

/// Checks all cases, in parallel when the feature is enabled.
pub fn sweep(ctx: &FieldContext, cases: &[Case], max_steps: usize) -> SweepSummary {
    summarize(cases, par_map(cases, |c| check_case(ctx, c, max_steps)))
}

/// Checks all cases on the current thread.
pub fn sweep_sequential(ctx: &FieldContext, cases: &[Case], max_steps: usize) -> SweepSummary {
    summarize(cases, seq_map(cases, |c| check_case(ctx, c, max_steps)))
}
