//! lambda-binary quadratic forms `[A, B, C] = Ax^2 + Bxy + Cy^2` over
//! `Z[lambda]`: the action of `G_p`, the point/form dictionary, reduction,
//! cycles, equivalence, simple forms and the map `Phi_p`.

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::cf::{cyclic_equal, expand, is_parabolic_period, PeriodicCf};
use crate::error::{Error, Result};
use crate::group::{u_power, u_zero, word_to_matrix, FixedPoints, GroupElem};
use crate::ring::{FieldContext, RingElem};
use crate::surd::{ExtendedPoint, Radicand, Surd};

type RadicandCache = Arc<OnceLock<Option<(Arc<Radicand>, RingElem)>>>;

/// `[A, B, C]` with entries in `Z[lambda]`.
#[derive(Clone)]
pub struct QForm {
    a: RingElem,
    b: RingElem,
    c: RingElem,
    // Canonical sqrt(D) = factor * sqrt(radicand); shared by all forms
    // obtained through `act`, which preserves D.
    rad: RadicandCache,
}

impl PartialEq for QForm {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b && self.c == o.c
    }
}

impl Eq for QForm {}

impl Hash for QForm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        self.c.hash(state);
    }
}

impl fmt::Debug for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::render_form(self))
    }
}

impl fmt::Display for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::render_form(self))
    }
}

impl QForm {
    pub fn new(a: RingElem, b: RingElem, c: RingElem) -> Result<QForm> {
        if !(a.is_integral() && b.is_integral() && c.is_integral()) {
            return Err(Error::NotIntegral);
        }
        Ok(QForm {
            a,
            b,
            c,
            rad: Arc::default(),
        })
    }

    fn with_cache(&self, a: RingElem, b: RingElem, c: RingElem) -> QForm {
        QForm {
            a,
            b,
            c,
            rad: self.rad.clone(),
        }
    }

    pub fn ctx(&self) -> &FieldContext {
        self.a.ctx()
    }

    pub fn a(&self) -> &RingElem {
        &self.a
    }
    pub fn b(&self) -> &RingElem {
        &self.b
    }
    pub fn c(&self) -> &RingElem {
        &self.c
    }

    /// `D = B^2 - 4AC`.
    pub fn discriminant(&self) -> RingElem {
        &(&self.b * &self.b) - &(&(&self.a * &self.c) * &self.ctx().int(4))
    }

    pub fn is_indefinite(&self) -> bool {
        self.discriminant().is_positive()
    }

    pub fn negate(&self) -> QForm {
        self.with_cache(self.a.neg(), self.b.neg(), self.c.neg())
    }

    pub fn scale(&self, k: &RingElem) -> Result<QForm> {
        QForm::new(&self.a * k, &self.b * k, &self.c * k)
    }

    /// `Q o M (x, y) = Q(ax + by, cx + dy)`.
    pub fn act(&self, m: &GroupElem) -> QForm {
        let (a, b, c, d) = (m.a(), m.b(), m.c(), m.d());
        let two = self.ctx().int(2);
        let na = &(&(&self.a * &(a * a)) + &(&self.b * &(a * c))) + &(&self.c * &(c * c));
        let nb = &(&(&(&two * &self.a) * &(a * b)) + &(&self.b * &(&(a * d) + &(b * c))))
            + &(&(&two * &self.c) * &(c * d));
        let nc = &(&(&self.a * &(b * b)) + &(&self.b * &(b * d))) + &(&self.c * &(d * d));
        self.with_cache(na, nb, nc)
    }

    /// `(-B + sqrt(D)) / 2A`.
    pub fn alpha(&self) -> Result<Surd> {
        if self.a.is_zero() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let cached = self.rad.get_or_init(|| {
            let d = self.discriminant();
            if d.is_positive() {
                Radicand::canonical(&d).ok()
            } else {
                None
            }
        });
        let Some((rad, factor)) = cached else {
            return Err(Error::NotIndefinite);
        };
        let inv = (&self.a * &self.ctx().int(2)).inv()?;
        Ok(Surd::from_radicand(
            (&self.b * &inv).neg(),
            factor * &inv,
            rad.clone(),
        ))
    }

    /// `A > 0 > C`, checked against the root criterion `alpha' < 0 < alpha`
    /// with the conjugate root of this form.
    pub fn is_simple(&self) -> Result<bool> {
        let by_form = self.a.is_positive() && self.c.is_negative();
        if let Ok(alpha) = self.alpha() {
            let by_root = alpha.conjugate().is_negative() && alpha.is_positive();
            if by_root != by_form {
                return Err(Error::Consistency(format!(
                    "simple-form test disagrees with its roots for {self}"
                )));
            }
        }
        Ok(by_form)
    }
}

/// `alpha_Q = (-B + sqrt(D)) / 2A`.
pub fn alpha_of(q: &QForm) -> Result<Surd> {
    q.alpha()
}

pub fn is_simple_form(q: &QForm) -> Result<bool> {
    q.is_simple()
}

/// Stabilizer data of a hyperbolic point: `M = V W V^{-1}` with `V`, `W`
/// the preperiod and period matrices of its CF.
#[derive(Debug, Clone)]
pub struct Stabilizer {
    pub cf: PeriodicCf,
    pub v: GroupElem,
    pub w: GroupElem,
    pub m: GroupElem,
}

pub fn stabilizer(alpha: &Surd, max_steps: usize) -> Result<Stabilizer> {
    let ctx = alpha.ctx();
    let (cf, _) = expand(alpha, max_steps)?;
    if cf.period.is_empty() {
        return Err(Error::NonPeriodic(max_steps));
    }
    if is_parabolic_period(&cf.period, ctx.p()) {
        return Err(Error::Parabolic);
    }
    let v = word_to_matrix(ctx, &cf.preperiod);
    let w = word_to_matrix(ctx, &cf.period);
    let m = v.mul(&w).mul(&v.inv());
    let pt = ExtendedPoint::Finite(alpha.clone());
    if !m.apply(&pt).value_eq(&pt) {
        return Err(Error::Consistency(format!(
            "stabilizer {m} does not fix {alpha}"
        )));
    }
    Ok(Stabilizer { cf, v, w, m })
}

/// Generators `M`, `M^{-1}` of the stabilizer of a hyperbolic point.
pub fn stabilizer_generators(alpha: &Surd, max_steps: usize) -> Result<(GroupElem, GroupElem)> {
    let s = stabilizer(alpha, max_steps)?;
    let inv = s.m.inv();
    Ok((s.m, inv))
}

/// The other fixed point of the stabilizer of `alpha`. For a surd with a
/// non-square radicand this is the algebraic conjugate; otherwise it is
/// read off the stabilizer. A parabolic point is its own conjugate.
pub fn hecke_conjugate(alpha: &Surd, max_steps: usize) -> Result<ExtendedPoint> {
    if let Some(rad) = alpha.radicand_handle() {
        if rad.root().is_none() {
            return Ok(alpha.conjugate().into());
        }
    }
    match stabilizer(alpha, max_steps) {
        Ok(s) => {
            let Ok(FixedPoints::Hyperbolic { plus, minus }) = s.m.fixed_points() else {
                return Err(Error::NonHyperbolicPeriod);
            };
            let pt = ExtendedPoint::Finite(alpha.clone());
            Ok(if plus.value_eq(&pt) { minus } else { plus })
        }
        Err(Error::Parabolic) => Ok(alpha.clone().into()),
        Err(e) => Err(e),
    }
}

/// The form `[c, d - a, -b]` of the stabilizer generator, signed so that its
/// root is `alpha`.
pub fn form_of(alpha: &Surd, max_steps: usize) -> Result<QForm> {
    let s = stabilizer(alpha, max_steps)?;
    let m = &s.m;
    let q = QForm::new(m.c().clone(), m.d() - m.a(), m.b().neg())?;
    for cand in [q.clone(), q.negate()] {
        if cand.alpha()?.value_eq(alpha) {
            return Ok(cand);
        }
    }
    Err(Error::Consistency(format!(
        "neither sign of {q} has root {alpha}"
    )))
}

/// Indefinite, root is a hyperbolic point, and the form is exactly the one
/// derived from that point's stabilizer.
pub fn is_hyperbolic_form(q: &QForm, max_steps: usize) -> bool {
    let Ok(alpha) = q.alpha() else {
        return false;
    };
    matches!(form_of(&alpha, max_steps), Ok(f) if &f == q)
}

fn ensure_hyperbolic(q: &QForm, max_steps: usize) -> Result<()> {
    if is_hyperbolic_form(q, max_steps) {
        Ok(())
    } else {
        Err(Error::NonHyperbolicForm)
    }
}

fn leading_ones(period: &[i64]) -> usize {
    period.iter().take_while(|&&r| r == 1).count()
}

/// Reducedness by the interval chain
/// `0 < alpha' < U^{k+2}(0) <= alpha < U^{k+1}(0)`; returns the `k`.
pub fn reduced_by_inequalities(alpha: &Surd, conj: &ExtendedPoint) -> Result<Option<usize>> {
    let ctx = alpha.ctx();
    let p = ctx.p() as i64;
    let zero = ExtendedPoint::Finite(Surd::zero(ctx));
    let a = ExtendedPoint::Finite(alpha.clone());
    if !zero.cmp_value(conj)?.is_lt() {
        return Ok(None);
    }
    for k in 0..=(p - 2) {
        let lo = u_zero(ctx, k + 2)?;
        let hi = u_zero(ctx, k + 1)?;
        if conj.cmp_value(&lo)?.is_lt() && lo.cmp_value(&a)?.is_lt() && a.cmp_value(&hi)?.is_lt() {
            return Ok(Some(k as usize));
        }
    }
    Ok(None)
}

/// `Some(k)` when `alpha` is reduced, `k` its number of leading ones. The
/// CF definition and the inequality chain are both evaluated and must agree.
pub fn is_reduced_number(alpha: &Surd, max_steps: usize) -> Result<Option<usize>> {
    let p = alpha.ctx().p();
    let (cf, _) = expand(alpha, max_steps)?;
    let by_cf = (cf.is_purely_periodic() && !is_parabolic_period(&cf.period, p))
        .then(|| leading_ones(&cf.period));
    let conj = hecke_conjugate(alpha, max_steps)?;
    let by_ineq = reduced_by_inequalities(alpha, &conj)?;
    if by_cf != by_ineq {
        return Err(Error::Consistency(format!(
            "reducedness of {alpha}: CF {cf} gives {by_cf:?}, inequalities give {by_ineq:?}"
        )));
    }
    Ok(by_cf)
}

pub fn is_reduced_form(q: &QForm, max_steps: usize) -> Result<bool> {
    Ok(is_reduced_number(&q.alpha()?, max_steps)?.is_some())
}

/// One step `Q -> Q o S^r T`, `r = [alpha_Q / lambda] + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub form: QForm,
    pub r: i64,
}

#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub terminal: QForm,
    /// `V` with `terminal = start o V`.
    pub transform: GroupElem,
    /// `alpha` of each visited form, the terminal one last.
    pub numbers: Vec<Surd>,
}

impl ReductionTrace {
    pub fn exponents(&self) -> Vec<i64> {
        self.steps.iter().map(|s| s.r).collect()
    }
}

fn step_exponent(alpha: &Surd) -> Result<i64> {
    (alpha.floor_div_lambda() + 1u32)
        .to_i64()
        .ok_or(Error::DigitOverflow)
}

/// Applies `S^r T` once and checks the point-side mirror `TS^{-r}`.
fn reduction_step(q: &QForm, alpha: &Surd) -> Result<(QForm, Surd, i64)> {
    let ctx = q.ctx();
    let r = step_exponent(alpha)?;
    let next = q.act(&GroupElem::s_pow_t(ctx, r));
    let mirror = GroupElem::gen_t(ctx)
        .mul(&GroupElem::s_pow(ctx, -r))
        .apply_surd(alpha);
    let beta = next.alpha()?;
    if !mirror.value_eq(&beta.clone().into()) {
        return Err(Error::Consistency(format!(
            "form step gives {beta}, point step gives {mirror}"
        )));
    }
    Ok((next, beta, r))
}

/// Reduces a hyperbolic form; the exponents are the CF preperiod of
/// `alpha_Q`.
pub fn reduce(q: &QForm, max_steps: usize) -> Result<ReductionTrace> {
    ensure_hyperbolic(q, max_steps)?;
    let ctx = q.ctx();
    let mut cur = q.clone();
    let mut alpha = q.alpha()?;
    let (cf, _) = expand(&alpha, max_steps)?;
    let mut steps = Vec::new();
    let mut numbers = vec![alpha.clone()];
    let mut transform = GroupElem::identity(ctx);
    while is_reduced_number(&alpha, max_steps)?.is_none() {
        if steps.len() >= max_steps {
            return Err(Error::NonPeriodic(max_steps));
        }
        let (next, beta, r) = reduction_step(&cur, &alpha)?;
        transform = transform.mul(&GroupElem::s_pow_t(ctx, r));
        steps.push(ReductionStep { form: cur, r });
        numbers.push(beta.clone());
        cur = next;
        alpha = beta;
    }
    let trace = ReductionTrace {
        steps,
        terminal: cur,
        transform,
        numbers,
    };
    if trace.exponents() != cf.preperiod {
        return Err(Error::Consistency(format!(
            "reduction exponents {:?} differ from the preperiod of {cf}",
            trace.exponents()
        )));
    }
    Ok(trace)
}

/// The cycle of reduced forms through a reduced form.
#[derive(Debug, Clone)]
pub struct ReducedCycle {
    pub forms: Vec<QForm>,
    /// `exponents[j]` maps `forms[j]` to `forms[j + 1]` (cyclically).
    pub exponents: Vec<i64>,
    pub numbers: Vec<Surd>,
    /// Length of the minimal CF period of the first member.
    pub period_length: usize,
}

impl ReducedCycle {
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

// Hashing reads only the coefficients, never the cached radicand.
#[allow(clippy::mutable_key_type)]
pub fn reduced_cycle(q: &QForm, max_steps: usize) -> Result<ReducedCycle> {
    let alpha0 = q.alpha()?;
    if is_reduced_number(&alpha0, max_steps)?.is_none() {
        return Err(Error::NotReduced);
    }
    let (cf, _) = expand(&alpha0, max_steps)?;
    let mut forms = vec![q.clone()];
    let mut numbers = vec![alpha0.clone()];
    let mut exponents = Vec::new();
    let mut seen: HashSet<QForm> = HashSet::from([q.clone()]);
    let (mut cur, mut alpha) = (q.clone(), alpha0);
    loop {
        if exponents.len() >= max_steps {
            return Err(Error::NonClosingCycle(max_steps));
        }
        let (next, beta, r) = reduction_step(&cur, &alpha)?;
        exponents.push(r);
        if &next == q {
            break;
        }
        if !seen.insert(next.clone()) {
            return Err(Error::Consistency(format!(
                "cycle through {q} revisits {next} before closing"
            )));
        }
        forms.push(next.clone());
        numbers.push(beta.clone());
        cur = next;
        alpha = beta;
    }
    Ok(ReducedCycle {
        forms,
        exponents,
        numbers,
        period_length: cf.period.len(),
    })
}

/// Reduces then walks the cycle.
pub fn cycle_of(q: &QForm, max_steps: usize) -> Result<(ReductionTrace, ReducedCycle)> {
    let trace = reduce(q, max_steps)?;
    let cycle = reduced_cycle(&trace.terminal, max_steps)?;
    Ok((trace, cycle))
}

/// Equivalence of hyperbolic forms under `G_p`.
pub fn equivalent(q1: &QForm, q2: &QForm, max_steps: usize) -> Result<bool> {
    Ok(equivalence_witness(q1, q2, max_steps)?.is_some())
}

/// `Some(V)` with `q2 = q1 o V` when the forms are equivalent.
#[allow(clippy::mutable_key_type)]
pub fn equivalence_witness(q1: &QForm, q2: &QForm, max_steps: usize) -> Result<Option<GroupElem>> {
    let ctx = q1.ctx();
    let (t1, c1) = cycle_of(q1, max_steps)?;
    let (t2, c2) = cycle_of(q2, max_steps)?;
    let (cf1, _) = expand(&q1.alpha()?, max_steps)?;
    let (cf2, _) = expand(&q2.alpha()?, max_steps)?;
    let same_period = cyclic_equal(&cf1.period, &cf2.period);
    let same_disc = q1.discriminant() == q2.discriminant();
    let s1: HashSet<&QForm> = c1.forms.iter().collect();
    let s2: HashSet<&QForm> = c2.forms.iter().collect();
    if !(same_period && same_disc && s1 == s2) {
        return Ok(None);
    }
    let idx = c1
        .forms
        .iter()
        .position(|f| f == &t2.terminal)
        .expect("equal form sets");
    let rot = word_to_matrix(ctx, &c1.exponents[..idx]);
    let v = t1.transform.mul(&rot).mul(&t2.transform.inv());
    if &q1.act(&v) != q2 {
        return Err(Error::Consistency(
            "equivalence witness does not map".into(),
        ));
    }
    Ok(Some(v))
}

/// `alpha' < 0 < alpha` with the stabilizer conjugate.
pub fn is_simple_number(alpha: &Surd, max_steps: usize) -> Result<bool> {
    if !alpha.is_positive() {
        return Ok(false);
    }
    let conj = hecke_conjugate(alpha, max_steps)?;
    Ok(conj.finite().is_some_and(Surd::is_negative))
}

/// `S^n alpha` with `n = -[alpha'/lambda]`, which is reduced.
pub fn simple_to_reduced(alpha: &Surd, max_steps: usize) -> Result<(Surd, i64)> {
    if !is_simple_number(alpha, max_steps)? {
        return Err(Error::NotSimple);
    }
    let conj = hecke_conjugate(alpha, max_steps)?
        .into_finite()
        .ok_or(Error::NotSimple)?;
    let n = (-conj.floor_div_lambda())
        .to_i64()
        .ok_or(Error::DigitOverflow)?;
    let beta = alpha.add_elem(&alpha.ctx().lambda().scale_int(&BigInt::from(n)));
    if is_reduced_number(&beta, max_steps)?.is_none() {
        return Err(Error::Consistency(format!("S^{n} {alpha} is not reduced")));
    }
    Ok((beta, n))
}

/// `S^{-i} beta` for a reduced `beta` of a cycle.
#[derive(Debug, Clone)]
pub struct SimpleMember {
    pub number: Surd,
    /// `Q_beta o S^i`, the form whose root is `number`.
    pub form: QForm,
    /// Index of `beta` in the cycle.
    pub source: usize,
    pub shift: i64,
}

/// All `S^{-i} beta`, `1 <= i <= [beta/lambda]`, in cycle order.
pub fn simple_set(cycle: &ReducedCycle, max_steps: usize) -> Result<Vec<SimpleMember>> {
    let mut out = Vec::new();
    for (j, (form, beta)) in cycle.forms.iter().zip(&cycle.numbers).enumerate() {
        let ctx = beta.ctx();
        let n = beta
            .floor_div_lambda()
            .to_i64()
            .ok_or(Error::DigitOverflow)?;
        for i in 1..=n {
            let number = beta.add_elem(&ctx.lambda().scale_int(&BigInt::from(-i)));
            let f = form.act(&GroupElem::s_pow(ctx, i));
            if !f.alpha()?.value_eq(&number) {
                return Err(Error::Consistency(format!("root of {f} is not {number}")));
            }
            if !f.is_simple()? || !is_simple_number(&number, max_steps)? {
                return Err(Error::Consistency(format!("S^-{i} {beta} is not simple")));
            }
            out.push(SimpleMember {
                number,
                form: f,
                source: j,
                shift: i,
            });
        }
    }
    Ok(out)
}

/// `Phi_p` on `[0, inf)`: `x -> TU^i x` on `[U^{p-i+1}(0), U^{p-i}(0))`.
#[derive(Debug, Clone)]
pub struct PhiMap {
    ctx: FieldContext,
    /// `ends[k] = U^k(0)` for `1 <= k <= p`.
    ends: Vec<ExtendedPoint>,
    /// `branch[i] = T U^i`.
    branch: Vec<GroupElem>,
}

impl PhiMap {
    pub fn new(ctx: &FieldContext) -> PhiMap {
        let p = ctx.p() as i64;
        let mut ends = vec![ExtendedPoint::Infinity];
        ends.extend((1..=p).map(|k| u_zero(ctx, k).expect("in range")));
        let t = GroupElem::gen_t(ctx);
        let branch = (0..p).map(|i| t.mul(&u_power(ctx, i))).collect();
        PhiMap {
            ctx: ctx.clone(),
            ends,
            branch,
        }
    }

    /// Branch index `i` of `x >= 0`.
    pub fn branch_of(&self, x: &Surd) -> Result<usize> {
        if x.is_negative() {
            return Err(Error::NegativeInput);
        }
        let p = self.ctx.p() as usize;
        let pt = ExtendedPoint::Finite(x.clone());
        for i in 1..p {
            let lo = &self.ends[p - i + 1];
            let hi = &self.ends[p - i];
            if !pt.cmp_value(lo)?.is_lt() && pt.cmp_value(hi)?.is_lt() {
                return Ok(i);
            }
        }
        Err(Error::Consistency(format!(
            "{x} lies in no branch interval"
        )))
    }

    pub fn apply(&self, x: &Surd) -> Result<(Surd, usize)> {
        let i = self.branch_of(x)?;
        let y = self.branch[i]
            .apply_surd(x)
            .into_finite()
            .ok_or_else(|| Error::Consistency(format!("Phi({x}) is infinite")))?;
        if y.is_negative() {
            return Err(Error::Consistency(format!("Phi({x}) = {y} < 0")));
        }
        let lambda = self.ctx.lambda();
        let p = self.ctx.p() as usize;
        let check = if i == 1 {
            // x / (1 - lambda x)
            let den = x.mul_elem(&lambda).neg().add_elem(&self.ctx.one());
            den.recip().and_then(|r| mul_surds(x, &r))
        } else if i == p - 1 {
            Some(x.add_elem(&lambda.neg()))
        } else {
            None
        };
        if let Some(c) = check {
            if !c.value_eq(&y) {
                return Err(Error::Consistency(format!(
                    "branch {i} formula disagrees at {x}"
                )));
            }
        }
        Ok((y, i))
    }
}

/// Product of two surds over one radicand, used only for a cross-check.
fn mul_surds(x: &Surd, y: &Surd) -> Option<Surd> {
    match (x.radicand_handle(), y.radicand_handle()) {
        (None, _) => Some(y.mul_elem(x.rational_part())),
        (_, None) => Some(x.mul_elem(y.rational_part())),
        (Some(r1), Some(r2)) if r1.value() == r2.value() => {
            let d = r1.value();
            let a = &(x.rational_part() * y.rational_part())
                + &(&(x.irrational_part() * y.irrational_part()) * d);
            let b = &(x.rational_part() * y.irrational_part())
                + &(x.irrational_part() * y.rational_part());
            Some(Surd::from_radicand(a, b, r1.clone()))
        }
        _ => None,
    }
}

pub fn phi_apply(x: &Surd) -> Result<(Surd, usize)> {
    PhiMap::new(x.ctx()).apply(x)
}

/// A closed orbit of `Phi_p`; `branches[j]` is used on `members[j]`.
#[derive(Debug, Clone)]
pub struct SimpleOrbit {
    pub members: Vec<Surd>,
    pub branches: Vec<usize>,
}

impl SimpleOrbit {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Iterates `Phi_p` until `x` recurs. A repeat of any other value proves
/// the orbit never returns and stops early.
pub fn phi_orbit(x: &Surd, max_steps: usize) -> Result<SimpleOrbit> {
    let phi = PhiMap::new(x.ctx());
    let start = x.value_key();
    let mut seen = HashSet::new();
    let mut members = vec![x.clone()];
    let mut branches = Vec::new();
    let mut cur = x.clone();
    loop {
        if branches.len() >= max_steps {
            return Err(Error::NonClosingOrbit(max_steps));
        }
        let (y, i) = phi.apply(&cur)?;
        branches.push(i);
        let key = y.value_key();
        if key == start {
            return Ok(SimpleOrbit { members, branches });
        }
        if !seen.insert(key) {
            return Err(Error::NonClosingOrbit(branches.len()));
        }
        members.push(y.clone());
        cur = y;
    }
}
