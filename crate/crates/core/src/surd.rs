//! Real quadratic irrationalities `a + b*sqrt(D)` over `Q(lambda_p)`.
//!
//! A surd is stored as its rational part `a`, irrational coefficient `b` and
//! a shared, canonicalized radicand `D`. The square root is kept formal, so
//! the Hecke conjugate `a - b*sqrt(D)` is always available, even in the
//! (rare) case where `D` happens to be a square in `Q(lambda_p)`; such
//! radicands carry their exact root so that values can still be compared.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::{FieldContext, RingElem};

/// A canonical radicand: integral, positive, free of square integer content.
#[derive(Debug)]
pub struct Radicand {
    value: RingElem,
    root: Option<RingElem>,
}

impl Radicand {
    /// Canonicalizes `d > 0`, returning the radicand and the factor `f`
    /// with `sqrt(d) = f * sqrt(radicand)`.
    pub fn canonical(d: &RingElem) -> Result<(Arc<Radicand>, RingElem)> {
        if d.sign() <= 0 {
            return Err(Error::NonPositiveRadicand);
        }
        let ctx = d.ctx();
        let den = d.denom().clone();
        let integral: Vec<BigInt> = d.coeffs().iter().map(|c| c * &den).collect();
        let content = integral.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let s = square_part(&content);
        let s2 = &s * &s;
        let reduced: Vec<BigInt> = integral.iter().map(|c| c / &s2).collect();
        let value = RingElem::from_parts(ctx, reduced, BigInt::one());
        let root = value.sqrt_exact();
        let factor = RingElem::from_parts(ctx, vec![s], den);
        Ok((Arc::new(Radicand { value, root }), factor))
    }

    pub fn value(&self) -> &RingElem {
        &self.value
    }

    /// The exact square root, when the radicand is a square in the field.
    pub fn root(&self) -> Option<&RingElem> {
        self.root.as_ref()
    }
}

/// Largest `s` with `s^2 | n`, by trial division plus a final
/// perfect-square check on the cofactor.
fn square_part(n: &BigInt) -> BigInt {
    let mut n = n.abs();
    let mut s = BigInt::one();
    if n.is_zero() {
        return s;
    }
    let mut q = 2u64;
    while q < 100_000 {
        let qb = BigInt::from(q);
        if &qb * &qb > n {
            break;
        }
        let q2 = &qb * &qb;
        while (&n % &q2).is_zero() {
            n /= &q2;
            s *= &qb;
        }
        while (&n % &qb).is_zero() {
            n /= &qb;
        }
        q += if q == 2 { 1 } else { 2 };
    }
    let r = n.sqrt();
    if &r * &r == n {
        s *= r;
    }
    s
}

/// A real number `a + b*sqrt(D)`.
#[derive(Clone)]
pub struct Surd {
    a: RingElem,
    b: RingElem,
    rad: Option<Arc<Radicand>>,
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
            && self.b == other.b
            && self.rad.as_ref().map(|r| &r.value) == other.rad.as_ref().map(|r| &r.value)
    }
}

impl Eq for Surd {}

impl Hash for Surd {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Surd({})", crate::text::render_surd(self))
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::render_surd(self))
    }
}

/// Hashable canonical component tuple `(a, b, D)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurdKey {
    pub a: RingElem,
    pub b: RingElem,
    pub radicand: Option<RingElem>,
}

impl Surd {
    /// A value in `Q(lambda)`.
    pub fn rational(a: RingElem) -> Surd {
        let b = a.ctx().zero();
        Surd { a, b, rad: None }
    }

    pub fn zero(ctx: &FieldContext) -> Surd {
        Surd::rational(ctx.zero())
    }

    /// `(p + q*sqrt(d)) / r`.
    pub fn new(p: &RingElem, q: &RingElem, r: &RingElem, d: &RingElem) -> Result<Surd> {
        if r.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let rinv = r.inv()?;
        let a = p * &rinv;
        if q.is_zero() || d.is_zero() {
            return Ok(Surd::rational(a));
        }
        let (rad, factor) = Radicand::canonical(d)?;
        let b = &(q * &factor) * &rinv;
        Ok(Surd::from_radicand(a, b, rad))
    }

    /// `a + b*sqrt(rad)` with an already canonical radicand.
    pub fn from_radicand(a: RingElem, b: RingElem, rad: Arc<Radicand>) -> Surd {
        if b.is_zero() {
            Surd::rational(a)
        } else {
            Surd {
                a,
                b,
                rad: Some(rad),
            }
        }
    }

    pub fn ctx(&self) -> &FieldContext {
        self.a.ctx()
    }

    pub fn rational_part(&self) -> &RingElem {
        &self.a
    }

    pub fn irrational_part(&self) -> &RingElem {
        &self.b
    }

    pub fn radicand(&self) -> Option<&RingElem> {
        self.rad.as_ref().map(|r| &r.value)
    }

    pub fn radicand_handle(&self) -> Option<&Arc<Radicand>> {
        self.rad.as_ref()
    }

    /// True when the value lies in `Q(lambda)` as written (no `sqrt` part).
    pub fn is_rational(&self) -> bool {
        self.rad.is_none()
    }

    /// Canonical integral components `(P, Q, R, D)` with value
    /// `(P + Q*sqrt(D)) / R`, `R` a positive integer and joint content 1.
    /// `D` is zero for values in `Q(lambda)`.
    pub fn components(&self) -> (RingElem, RingElem, BigInt, RingElem) {
        let ctx = self.ctx();
        let r = self.a.denom().lcm(self.b.denom());
        let scale = |x: &RingElem| -> Vec<BigInt> {
            let f = &r / x.denom();
            x.coeffs().iter().map(|c| c * &f).collect()
        };
        let mut pc = scale(&self.a);
        let mut qc = scale(&self.b);
        let g = pc.iter().chain(qc.iter()).fold(r.clone(), |g, c| g.gcd(c));
        let r = &r / &g;
        for c in pc.iter_mut().chain(qc.iter_mut()) {
            *c /= &g;
        }
        let d = self.radicand().cloned().unwrap_or_else(|| ctx.zero());
        (
            RingElem::from_parts(ctx, pc, BigInt::one()),
            RingElem::from_parts(ctx, qc, BigInt::one()),
            r,
            d,
        )
    }

    /// Canonical key of the written representation.
    pub fn key(&self) -> SurdKey {
        SurdKey {
            a: self.a.clone(),
            b: self.b.clone(),
            radicand: self.radicand().cloned(),
        }
    }

    /// Key of the real value: equal values give equal keys within one
    /// radicand, including radicands that are exact squares.
    pub fn value_key(&self) -> SurdKey {
        match self.rad.as_ref().and_then(|r| r.root.as_ref()) {
            Some(root) => SurdKey {
                a: &self.a + &(&self.b * root),
                b: self.ctx().zero(),
                radicand: None,
            },
            None => self.key(),
        }
    }

    /// The value collapsed into `Q(lambda)`, if it lies there.
    pub fn as_field_elem(&self) -> Option<RingElem> {
        match &self.rad {
            None => Some(self.a.clone()),
            Some(r) => r.root.as_ref().map(|root| &self.a + &(&self.b * root)),
        }
    }

    /// Hecke conjugate: `sqrt(D) -> -sqrt(D)`.
    pub fn conjugate(&self) -> Surd {
        Surd {
            a: self.a.clone(),
            b: self.b.neg(),
            rad: self.rad.clone(),
        }
    }

    pub fn neg(&self) -> Surd {
        Surd {
            a: self.a.neg(),
            b: self.b.neg(),
            rad: self.rad.clone(),
        }
    }

    /// Exact sign under the distinguished embedding.
    pub fn sign(&self) -> i32 {
        let Some(rad) = &self.rad else {
            return self.a.sign();
        };
        let sa = self.a.sign();
        let sb = self.b.sign();
        if sa == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        let t = &(&self.a * &self.a) - &(&(&self.b * &self.b) * &rad.value);
        match t.sign() {
            1 => sa,
            -1 => sb,
            _ => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    /// Brings two surds onto one radicand.
    fn align(&self, other: &Surd) -> Result<(Surd, Surd)> {
        match (&self.rad, &other.rad) {
            (None, _) | (_, None) => Ok((self.clone(), other.clone())),
            (Some(r1), Some(r2)) if r1.value == r2.value => Ok((self.clone(), other.clone())),
            _ => match (self.as_field_elem(), other.as_field_elem()) {
                (Some(x), Some(y)) => Ok((Surd::rational(x), Surd::rational(y))),
                _ => Err(Error::IncompatibleRadicand),
            },
        }
    }

    pub fn add(&self, other: &Surd) -> Result<Surd> {
        let (x, y) = self.align(other)?;
        let rad = x.rad.clone().or_else(|| y.rad.clone());
        let a = &x.a + &y.a;
        let b = &x.b + &y.b;
        Ok(match rad {
            Some(r) => Surd::from_radicand(a, b, r),
            None => Surd::rational(a),
        })
    }

    pub fn sub(&self, other: &Surd) -> Result<Surd> {
        self.add(&other.neg())
    }

    pub fn add_elem(&self, x: &RingElem) -> Surd {
        Surd {
            a: &self.a + x,
            b: self.b.clone(),
            rad: self.rad.clone(),
        }
    }

    pub fn mul_elem(&self, x: &RingElem) -> Surd {
        match &self.rad {
            Some(r) => Surd::from_radicand(&self.a * x, &self.b * x, r.clone()),
            None => Surd::rational(&self.a * x),
        }
    }

    /// Order under the distinguished embedding. Both surds must share a
    /// radicand, or one of them must be rational.
    pub fn cmp_value(&self, other: &Surd) -> Result<Ordering> {
        Ok(self.sub(other)?.sign().cmp(&0))
    }

    pub fn cmp_elem(&self, x: &RingElem) -> Ordering {
        self.add_elem(&x.neg()).sign().cmp(&0)
    }

    /// Value equality, valid across different radicands.
    pub fn value_eq(&self, other: &Surd) -> bool {
        if let Ok(ord) = self.cmp_value(other) {
            return ord == Ordering::Equal;
        }
        // Irrational values on distinct radicands: a1 = a2 and
        // b1^2 D1 = b2^2 D2 with matching signs of b.
        let (r1, r2) = (self.rad.as_ref().unwrap(), other.rad.as_ref().unwrap());
        self.a == other.a
            && self.b.sign() == other.b.sign()
            && &(&self.b * &self.b) * &r1.value == &(&other.b * &other.b) * &r2.value
    }

    /// Reciprocal; `None` when the value is zero.
    pub fn recip(&self) -> Option<Surd> {
        let Some(rad) = &self.rad else {
            return self.a.inv().ok().map(Surd::rational);
        };
        let norm = &(&self.a * &self.a) - &(&(&self.b * &self.b) * &rad.value);
        if norm.is_zero() {
            // Only possible for a square radicand: the conjugate is zero.
            let v = self
                .as_field_elem()
                .expect("square radicand carries its root");
            return v.inv().ok().map(Surd::rational);
        }
        let ninv = norm.inv().ok()?;
        Some(Surd::from_radicand(
            &self.a * &ninv,
            (&self.b * &ninv).neg(),
            rad.clone(),
        ))
    }

    pub fn to_f64(&self) -> f64 {
        match &self.rad {
            None => self.a.to_f64(),
            Some(r) => self.a.to_f64() + self.b.to_f64() * r.value.to_f64().sqrt(),
        }
    }

    /// `[self / lambda]`: the unique `n` with `n*lambda <= self < (n+1)*lambda`.
    pub fn floor_div_lambda(&self) -> BigInt {
        let ctx = self.ctx();
        let lambda = ctx.lambda();
        let cmp = |n: &BigInt| -> Ordering {
            let lo = lambda.scale_int(n);
            if self.cmp_elem(&lo) == Ordering::Less {
                return Ordering::Less;
            }
            let hi = &lo + &lambda;
            if self.cmp_elem(&hi) != Ordering::Less {
                return Ordering::Greater;
            }
            Ordering::Equal
        };
        let est = (self.to_f64() / ctx.lambda_f64()).floor();
        let start = if est.is_finite() && est.abs() < 1e15 {
            BigInt::from(est as i64)
        } else if self.is_rational() {
            (&self.a / &lambda).floor()
        } else {
            BigInt::zero()
        };
        search_floor(start, cmp)
    }

    /// Rough magnitude of the coefficients, for diagnostics.
    pub fn height_bits(&self) -> u64 {
        let (p, q, r, _) = self.components();
        p.coeffs()
            .iter()
            .chain(q.coeffs())
            .map(|c| c.bits())
            .chain(std::iter::once(r.bits()))
            .max()
            .unwrap_or(0)
    }
}

/// Locates the integer `n` with `cmp(n) == Equal`, where `cmp` reports
/// whether the target lies below (`Less`) or above (`Greater`) `n`.
pub(crate) fn search_floor(start: BigInt, cmp: impl Fn(&BigInt) -> Ordering) -> BigInt {
    let first = cmp(&start);
    if first == Ordering::Equal {
        return start;
    }
    // Gallop outward to bracket the answer strictly.
    let mut step = BigInt::one();
    let mut near = start.clone();
    let (mut lo, mut hi);
    loop {
        let probe = if first == Ordering::Less {
            &near - &step
        } else {
            &near + &step
        };
        match cmp(&probe) {
            Ordering::Equal => return probe,
            o if o == first => {
                near = probe;
                step *= 2;
            }
            _ => {
                if first == Ordering::Less {
                    lo = probe;
                    hi = near;
                } else {
                    lo = near;
                    hi = probe;
                }
                break;
            }
        }
    }
    // Now cmp(lo) == Greater and cmp(hi) == Less.
    loop {
        let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
        match cmp(&mid) {
            Ordering::Equal => return mid,
            Ordering::Greater => lo = mid,
            Ordering::Less => hi = mid,
        }
    }
}

/// A point of the extended real line `R ∪ {∞}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtendedPoint {
    Finite(Surd),
    Infinity,
}

impl fmt::Debug for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::Finite(s) => write!(f, "{s:?}"),
            ExtendedPoint::Infinity => f.write_str("inf"),
        }
    }
}

impl fmt::Display for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::Finite(s) => write!(f, "{s}"),
            ExtendedPoint::Infinity => f.write_str("inf"),
        }
    }
}

impl From<Surd> for ExtendedPoint {
    fn from(s: Surd) -> Self {
        ExtendedPoint::Finite(s)
    }
}

impl From<RingElem> for ExtendedPoint {
    fn from(x: RingElem) -> Self {
        ExtendedPoint::Finite(Surd::rational(x))
    }
}

impl ExtendedPoint {
    pub fn finite(&self) -> Option<&Surd> {
        match self {
            ExtendedPoint::Finite(s) => Some(s),
            ExtendedPoint::Infinity => None,
        }
    }

    pub fn into_finite(self) -> Option<Surd> {
        match self {
            ExtendedPoint::Finite(s) => Some(s),
            ExtendedPoint::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }

    /// Value equality (infinity equals only itself).
    pub fn value_eq(&self, other: &ExtendedPoint) -> bool {
        match (self, other) {
            (ExtendedPoint::Infinity, ExtendedPoint::Infinity) => true,
            (ExtendedPoint::Finite(x), ExtendedPoint::Finite(y)) => x.value_eq(y),
            _ => false,
        }
    }

    /// Order with infinity as the largest point.
    pub fn cmp_value(&self, other: &ExtendedPoint) -> Result<Ordering> {
        match (self, other) {
            (ExtendedPoint::Infinity, ExtendedPoint::Infinity) => Ok(Ordering::Equal),
            (ExtendedPoint::Infinity, _) => Ok(Ordering::Greater),
            (_, ExtendedPoint::Infinity) => Ok(Ordering::Less),
            (ExtendedPoint::Finite(x), ExtendedPoint::Finite(y)) => x.cmp_value(y),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtendedPoint::Finite(s) => s.to_f64(),
            ExtendedPoint::Infinity => f64::INFINITY,
        }
    }
}

/// Image of `x` under `z -> (a z + b) / (c z + d)`; the radicand of `x` is
/// preserved.
pub fn mobius_entries(
    x: &ExtendedPoint,
    a: &RingElem,
    b: &RingElem,
    c: &RingElem,
    d: &RingElem,
) -> ExtendedPoint {
    let s = match x {
        ExtendedPoint::Infinity => {
            return if c.is_zero() {
                ExtendedPoint::Infinity
            } else {
                Surd::rational(a / c).into()
            };
        }
        ExtendedPoint::Finite(s) => s,
    };
    let n1 = &(a * &s.a) + b;
    let e1 = &(c * &s.a) + d;
    let Some(rad) = &s.rad else {
        return if e1.is_zero() {
            ExtendedPoint::Infinity
        } else {
            Surd::rational(&n1 / &e1).into()
        };
    };
    let n2 = a * &s.b;
    let e2 = c * &s.b;
    let e2d = &e2 * &rad.value;
    let norm = &(&e1 * &e1) - &(&e2 * &e2d);
    if norm.is_zero() {
        // Square radicand with the conjugate point sent to infinity:
        // collapse to the field value.
        let root = rad.root.as_ref().expect("square radicand carries its root");
        let den = &e1 + &(&e2 * root);
        if den.is_zero() {
            return ExtendedPoint::Infinity;
        }
        let num = &n1 + &(&n2 * root);
        return Surd::rational(&num / &den).into();
    }
    let ninv = norm.inv().expect("nonzero norm");
    let ra = &(&(&n1 * &e1) - &(&n2 * &e2d)) * &ninv;
    let rb = &(&(&n2 * &e1) - &(&n1 * &e2)) * &ninv;
    Surd::from_radicand(ra, rb, rad.clone()).into()
}

impl ToPrimitive for Surd {
    fn to_i64(&self) -> Option<i64> {
        None
    }
    fn to_u64(&self) -> Option<u64> {
        None
    }
    fn to_f64(&self) -> Option<f64> {
        Some(Surd::to_f64(self))
    }
}
