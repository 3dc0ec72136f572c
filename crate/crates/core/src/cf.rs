//! Negative lambda-continued fractions
//! `r0*L - 1/(r1*L - 1/(r2*L - ...))` from the next-multiple algorithm:
//! `r_j = [alpha_j / lambda] + 1`, `alpha_{j+1} = 1 / (r_j*lambda - alpha_j)`.

use std::collections::HashMap;
use std::fmt;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::group::{word_to_matrix, Classification, FixedPoints, GroupElem};
use crate::ring::FieldContext;
use crate::surd::{ExtendedPoint, Surd};

/// `[r0; ..., r_{n-1}, (r_n, ..., r_{n+m-1})]`. An empty period means a
/// finite CF.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PeriodicCf {
    pub preperiod: Vec<i64>,
    pub period: Vec<i64>,
}

impl fmt::Display for PeriodicCf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::render_cf(self))
    }
}

impl PeriodicCf {
    pub fn new(preperiod: Vec<i64>, period: Vec<i64>) -> Self {
        PeriodicCf { preperiod, period }
    }

    pub fn purely_periodic(period: Vec<i64>) -> Self {
        PeriodicCf::new(Vec::new(), period)
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.preperiod.is_empty() && !self.period.is_empty()
    }

    /// The `i`-th partial quotient, if the CF has one.
    pub fn digit(&self, i: usize) -> Option<i64> {
        let n = self.preperiod.len();
        if i < n {
            Some(self.preperiod[i])
        } else if self.period.is_empty() {
            None
        } else {
            Some(self.period[(i - n) % self.period.len()])
        }
    }

    /// The same infinite sequence with minimal preperiod and period.
    pub fn minimal(&self) -> PeriodicCf {
        let mut period = self.period.clone();
        let m = period.len();
        if let Some(d) =
            (1..=m).find(|&d| m.is_multiple_of(d) && (0..m).all(|i| period[i] == period[i % d]))
        {
            period.truncate(d);
        }
        let mut pre = self.preperiod.clone();
        while !period.is_empty() && pre.last() == period.last() {
            pre.pop();
            period.rotate_right(1);
        }
        PeriodicCf::new(pre, period)
    }
}

/// Complete quotients `alpha_j` with their partial quotients `r_j`.
#[derive(Debug, Clone, Default)]
pub struct ExpansionTrace {
    pub steps: Vec<(Surd, i64)>,
}

/// Expands `alpha` until a complete quotient repeats.
pub fn expand(alpha: &Surd, max_steps: usize) -> Result<(PeriodicCf, ExpansionTrace)> {
    let ctx = alpha.ctx().clone();
    let lambda = ctx.lambda();
    let mut seen = HashMap::new();
    let mut steps: Vec<(Surd, i64)> = Vec::new();
    let mut cur = alpha.clone();
    loop {
        if let Some(&i) = seen.get(&cur.value_key()) {
            let digits: Vec<i64> = steps.iter().map(|s| s.1).collect();
            let cf = PeriodicCf::new(digits[..i].to_vec(), digits[i..].to_vec());
            return Ok((cf, ExpansionTrace { steps }));
        }
        if steps.len() >= max_steps {
            return Err(Error::NonPeriodic(max_steps));
        }
        seen.insert(cur.value_key(), steps.len());
        let r = (cur.floor_div_lambda() + 1u32)
            .to_i64()
            .ok_or(Error::DigitOverflow)?;
        let gap = cur.neg().add_elem(&lambda.scale_int(&r.into()));
        steps.push((cur, r));
        match gap.recip() {
            Some(next) => cur = next,
            None => {
                // r*lambda - alpha > 0 always; kept so the function is total.
                let digits = steps.iter().map(|s| s.1).collect();
                return Ok((
                    PeriodicCf::new(digits, Vec::new()),
                    ExpansionTrace { steps },
                ));
            }
        }
    }
}

/// `(S^{r_0} T ... S^{r_n} T)(inf)`.
pub fn evaluate_finite(ctx: &FieldContext, word: &[i64]) -> ExtendedPoint {
    word_to_matrix(ctx, word).apply(&ExtendedPoint::Infinity)
}

/// Value of a periodic CF: the plus fixed point of the period matrix `W`,
/// moved by the preperiod matrix `V`. The result is re-expanded and must
/// reproduce the (minimal form of the) input.
pub fn evaluate_periodic(ctx: &FieldContext, cf: &PeriodicCf, max_steps: usize) -> Result<Surd> {
    if cf.period.is_empty() {
        return Err(Error::NonHyperbolicPeriod);
    }
    let w = word_to_matrix(ctx, &cf.period);
    if w.classify() != Classification::Hyperbolic {
        return Err(Error::NonHyperbolicPeriod);
    }
    let Ok(FixedPoints::Hyperbolic { plus, .. }) = w.fixed_points() else {
        return Err(Error::NonHyperbolicPeriod);
    };
    let v = word_to_matrix(ctx, &cf.preperiod);
    let value = v
        .apply(&plus)
        .into_finite()
        .ok_or(Error::NonHyperbolicPeriod)?;
    let want = cf.minimal();
    let (got, _) = expand(&value, max_steps)?;
    if got != want {
        return Err(Error::RoundTripMismatch {
            expected: want.to_string(),
            got: got.to_string(),
        });
    }
    Ok(value)
}

/// Result of [`is_admissible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Admissibility {
    pub violations: Vec<String>,
}

impl Admissibility {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the constraints satisfied by every CF the algorithm produces:
/// `r_j >= 1` for `j >= 1`, a leading run of ones of length at most `p - 2`
/// and every later run at most `p - 3`, read along the infinite sequence.
pub fn is_admissible(cf: &PeriodicCf, p: u32) -> Admissibility {
    let mut violations = Vec::new();
    let n = cf.preperiod.len();
    let m = cf.period.len();
    if m > 0 && cf.period.iter().all(|&r| r == 1) {
        violations.push("period consists entirely of ones".to_string());
    }
    let len = n + 3 * m;
    let seq: Vec<i64> = (0..len).map(|i| cf.digit(i).unwrap()).collect();
    for (j, &r) in seq.iter().enumerate().skip(1) {
        if r < 1 && j < n + m {
            violations.push(format!("r_{j} = {r} < 1"));
        }
    }
    if violations.is_empty() {
        let mut j = 0;
        while j < len {
            if seq[j] != 1 {
                j += 1;
                continue;
            }
            let start = j;
            while j < len && seq[j] == 1 {
                j += 1;
            }
            let run = j - start;
            let bound = if start == 0 {
                p as usize - 2
            } else {
                p as usize - 3
            };
            // Runs cut off by the window end reappear complete earlier.
            if run > bound && (j < len || m == 0) {
                violations.push(format!(
                    "run of {run} ones at position {start} exceeds {bound}"
                ));
            }
        }
    }
    violations.dedup();
    Admissibility { violations }
}

/// True iff the period is a rotation of `(2, 1, ..., 1)` with `p - 3` ones.
pub fn is_parabolic_period(period: &[i64], p: u32) -> bool {
    cyclic_equal(period, &parabolic_period(p))
}

/// `(2, 1, ..., 1)` with `p - 3` ones.
pub fn parabolic_period(p: u32) -> Vec<i64> {
    let mut v = vec![2];
    v.extend(std::iter::repeat_n(1, p as usize - 3));
    v
}

pub fn cyclic_equal(a: &[i64], b: &[i64]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|s| (0..a.len()).all(|i| a[(s + i) % a.len()] == b[i]))
}

pub fn reverse_period(period: &[i64]) -> Vec<i64> {
    period.iter().rev().copied().collect()
}

/// Convergents `C_n = [r_0; r_1, ..., r_n]` for `n < count` (fewer when the
/// expansion is finite).
pub fn convergents(alpha: &Surd, count: usize, max_steps: usize) -> Result<Vec<ExtendedPoint>> {
    let (cf, _) = expand(alpha, max_steps)?;
    let ctx = alpha.ctx();
    let mut m = GroupElem::identity(ctx);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let Some(r) = cf.digit(i) else { break };
        m = m.mul(&GroupElem::s_pow_t(ctx, r));
        out.push(m.apply(&ExtendedPoint::Infinity));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_elem, parse_surd};
    use crate::DEFAULT_MAX_STEPS;

    fn k(p: u32) -> FieldContext {
        FieldContext::new(p).unwrap()
    }

    fn cf(pre: &[i64], per: &[i64]) -> PeriodicCf {
        PeriodicCf::new(pre.to_vec(), per.to_vec())
    }

    fn alpha0(ctx: &FieldContext) -> Surd {
        // Plus root of V W V^{-1} with V = word(2,3), W = word(2,1,1,4).
        let v = word_to_matrix(ctx, &[2, 3]);
        let w = word_to_matrix(ctx, &[2, 1, 1, 4]);
        let Ok(FixedPoints::Hyperbolic { plus, .. }) = w.fixed_points() else {
            panic!()
        };
        v.apply(&plus).into_finite().unwrap()
    }

    #[test]
    fn expand_example_point() {
        let ctx = k(5);
        let a0 = alpha0(&ctx);
        let (c, trace) = expand(&a0, DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(c, cf(&[2, 3], &[2, 1, 1, 4]));
        assert_eq!(trace.steps.len(), 6);
        let lambda = ctx.lambda();
        for w in trace.steps.windows(2) {
            let (aj, r) = &w[0];
            let (next, _) = &w[1];
            let back = next
                .recip()
                .unwrap()
                .neg()
                .add_elem(&lambda.scale_int(&(*r).into()));
            assert!(back.value_eq(aj));
        }
    }

    #[test]
    fn expand_sqrt2_plus_one() {
        let ctx = k(4);
        let s = parse_surd(&ctx, "L + sqrt(L^2 - 1)").unwrap();
        let (c, _) = expand(&s, 100).unwrap();
        assert_eq!(c, cf(&[], &[2]));
    }

    #[test]
    fn best_possible_p5() {
        let ctx = k(5);
        let s = parse_surd(&ctx, "(3/2)L + (1/2)sqrt(L^2+4)").unwrap();
        let (c, _) = expand(&s, 100).unwrap();
        assert_eq!(c, cf(&[], &[3, 1, 1]));
        assert!(is_admissible(&c, 5).ok());
    }

    #[test]
    fn rationals_are_parabolic() {
        for p in 3..=9 {
            let ctx = k(p);
            let (c, _) = expand(&Surd::zero(&ctx), 1000).unwrap();
            assert!(is_parabolic_period(&c.period, p), "p = {p}: {c}");
        }
    }

    #[test]
    fn finite_evaluation() {
        let ctx = k(5);
        assert!(evaluate_finite(&ctx, &[1]).value_eq(&ctx.lambda().into()));
        assert!(evaluate_finite(&ctx, &[0]).value_eq(&ctx.zero().into()));
        let want = &parse_elem(&ctx, "6L+5").unwrap() / &parse_elem(&ctx, "3L").unwrap();
        assert!(evaluate_finite(&ctx, &[2, 3]).value_eq(&want.into()));
        assert!(evaluate_finite(&ctx, &[]).is_infinite());
    }

    #[test]
    fn periodic_evaluation() {
        let ctx4 = k(4);
        let s = evaluate_periodic(&ctx4, &cf(&[], &[2]), 100).unwrap();
        assert!((s.to_f64() - (2f64.sqrt() + 1.0)).abs() < 1e-12);

        let ctx = k(5);
        let a2 = evaluate_periodic(&ctx, &cf(&[], &[2, 1, 1, 4]), 100).unwrap();
        assert!((a2.to_f64() - 2.160).abs() < 1e-3);
        let x = evaluate_periodic(&ctx, &cf(&[1], &[2, 1, 1, 4]), 100).unwrap();
        let want = parse_surd(&ctx, "(-5L-1 + sqrt(135L+86))/(2L+4)").unwrap();
        assert_eq!(x, want);
        // Non-minimal input is accepted.
        let y = evaluate_periodic(&ctx, &cf(&[1, 2], &[1, 1, 4, 2, 1, 1, 4, 2]), 100).unwrap();
        assert!(y.value_eq(&x));
        assert_eq!(
            evaluate_periodic(&ctx, &cf(&[], &[2, 1, 1]), 100),
            Err(Error::NonHyperbolicPeriod)
        );
    }

    #[test]
    fn admissibility() {
        assert!(!is_admissible(&cf(&[2], &[1]), 5).ok());
        assert!(!is_admissible(&cf(&[2, 1, 1, 1], &[3]), 5).ok());
        assert!(is_admissible(&cf(&[1, 1], &[2, 1, 1, 4]), 5).ok());
        assert!(!is_admissible(&cf(&[1, 1, 1, 1], &[2]), 5).ok());
        assert!(!is_admissible(&cf(&[2, 1], &[3]), 3).ok());
        assert!(is_admissible(&cf(&[1], &[3]), 3).ok());
        // wrap-around run: 1,1 | 1 is a run of three at position >= 1
        assert!(!is_admissible(&cf(&[], &[1, 4, 1, 1]), 5).ok());
        assert!(is_admissible(&cf(&[], &[1, 1, 4, 2]), 5).ok());
        assert!(!is_admissible(&cf(&[3], &[0, 2]), 5).ok());
    }

    #[test]
    fn parabolic_periods() {
        assert!(is_parabolic_period(&[2], 3));
        assert!(is_parabolic_period(&[1, 2, 1], 5));
        assert!(!is_parabolic_period(&[2, 1, 1, 4], 5));
    }

    #[test]
    fn cyclic_and_reverse() {
        assert!(cyclic_equal(&[2, 1, 1, 4], &[1, 1, 4, 2]));
        assert!(!cyclic_equal(&[2, 1, 1, 4], &[2, 1, 4, 1]));
        assert!(cyclic_equal(&[], &[]));
        assert_eq!(reverse_period(&[2, 1, 1, 4]), vec![4, 1, 1, 2]);
        assert_eq!(reverse_period(&[2]), vec![2]);
    }

    #[test]
    fn reversed_period_of_conjugate() {
        let ctx = k(5);
        let a2 = evaluate_periodic(&ctx, &cf(&[], &[2, 1, 1, 4]), 100).unwrap();
        let x = a2.conjugate().recip().unwrap();
        let (c, _) = expand(&x, 100).unwrap();
        assert!(cyclic_equal(&c.period, &[4, 1, 1, 2]));
    }

    #[test]
    fn convergents_decrease() {
        let ctx = k(4);
        let s = parse_surd(&ctx, "L + sqrt(L^2 - 1)").unwrap();
        let cs = convergents(&s, 10, 100).unwrap();
        assert!(cs[0].value_eq(&ctx.lambda().scale_int(&2.into()).into()));
        let alpha = ExtendedPoint::Finite(s.clone());
        for w in cs.windows(2) {
            assert!(w[0].cmp_value(&w[1]).unwrap().is_gt());
        }
        for c in &cs {
            // Comparing a value in Q(lambda) with the surd is always possible.
            assert!(c.cmp_value(&alpha).unwrap().is_gt());
        }
    }

    #[test]
    fn minimal_form() {
        assert_eq!(cf(&[1, 4], &[2, 1, 1, 4]).minimal(), cf(&[], &[1, 4, 2, 1]));
        assert_eq!(
            cf(&[3, 4], &[2, 1, 1, 4]).minimal(),
            cf(&[3], &[4, 2, 1, 1])
        );
        assert_eq!(cf(&[], &[2, 2]).minimal(), cf(&[], &[2]));
        assert_eq!(cf(&[2, 2], &[2]).minimal(), cf(&[], &[2]));
        assert_eq!(cf(&[1, 2], &[]).minimal(), cf(&[1, 2], &[]));
    }
}
