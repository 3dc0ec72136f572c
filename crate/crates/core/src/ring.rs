//! Exact arithmetic in `Q(lambda_p)`, `lambda_p = 2cos(pi/p)`.
//!
//! Elements are polynomials in `lambda` of degree below `d = phi(2p)/2` with a
//! single shared positive denominator. Order relations use the real embedding
//! `lambda -> 2cos(pi/p)` only: the sign of a nonzero element is decided by
//! fixed-point interval evaluation against a certified enclosure of `lambda`,
//! doubling the working precision until zero is excluded.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclotomic::{lambda_min_poly, IntPoly};
use crate::error::{Error, Result};

/// Default upper bound on the Hecke index.
pub const DEFAULT_MAX_P: u32 = 40;
/// Default starting precision (bits) for sign determination.
pub const DEFAULT_PRECISION_START: u32 = 64;

const SEED_PRECISION: u32 = 48;
const CACHED_PRECISIONS: [u32; 4] = [64, 128, 256, 512];

/// Construction options for [`FieldContext`].
#[derive(Debug, Clone, Copy)]
pub struct FieldOptions {
    pub max_p: u32,
    pub precision_start: u32,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions {
            max_p: DEFAULT_MAX_P,
            precision_start: DEFAULT_PRECISION_START,
        }
    }
}

/// `lo/2^prec <= lambda <= hi/2^prec`.
#[derive(Debug, Clone)]
struct Enclosure {
    prec: u32,
    lo: BigInt,
    hi: BigInt,
}

struct Inner {
    p: u32,
    min_poly: IntPoly,
    degree: usize,
    precision_start: u32,
    cache: Vec<Enclosure>,
    /// All real conjugates of lambda; index 0 is the distinguished one.
    conjugates: Vec<f64>,
    /// Inverse of the Vandermonde matrix of `conjugates`.
    vandermonde_inv: Vec<Vec<f64>>,
}

/// The field `Q(lambda_p)` with its distinguished real embedding.
///
/// Cheap to clone; immutable and shareable across threads.
#[derive(Clone)]
pub struct FieldContext(Arc<Inner>);

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("p", &self.p())
            .field("degree", &self.degree())
            .finish()
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.p() == other.p()
    }
}

impl Eq for FieldContext {}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Exact sign of `psi(m / 2^prec)`.
fn poly_sign_at_dyadic(psi: &[BigInt], m: &BigInt, prec: u32) -> Sign {
    let d = psi.len() - 1;
    let mut acc = psi[d].clone();
    for k in (0..d).rev() {
        acc = acc * m + (&psi[k] << (prec as usize * (d - k)));
    }
    acc.sign()
}

/// Outward-rounded interval evaluation of an integer polynomial at an
/// interval `[lo, hi]`, all values scaled by `2^prec`.
fn eval_interval(coeffs: &[BigInt], lo: &BigInt, hi: &BigInt, prec: u32) -> (BigInt, BigInt) {
    let scale = pow2(prec);
    let top = coeffs.len() - 1;
    let mut acc_lo = &coeffs[top] << prec as usize;
    let mut acc_hi = acc_lo.clone();
    for k in (0..top).rev() {
        let prods = [&acc_lo * lo, &acc_lo * hi, &acc_hi * lo, &acc_hi * hi];
        let min = prods.iter().min().unwrap();
        let max = prods.iter().max().unwrap();
        let c = &coeffs[k] << prec as usize;
        acc_lo = floor_div(min, &scale) + &c;
        acc_hi = ceil_div(max, &scale) + c;
    }
    (acc_lo, acc_hi)
}

fn bisect(psi: &[BigInt], from: &Enclosure, prec: u32) -> Enclosure {
    debug_assert!(prec >= from.prec);
    let shift = (prec - from.prec) as usize;
    let mut lo = &from.lo << shift;
    let mut hi = &from.hi << shift;
    let s_lo = poly_sign_at_dyadic(psi, &lo, prec);
    if s_lo == Sign::NoSign {
        return Enclosure {
            prec,
            hi: lo.clone(),
            lo,
        };
    }
    if poly_sign_at_dyadic(psi, &hi, prec) == Sign::NoSign {
        return Enclosure {
            prec,
            lo: hi.clone(),
            hi,
        };
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1usize;
        match poly_sign_at_dyadic(psi, &mid, prec) {
            Sign::NoSign => {
                lo = mid.clone();
                hi = mid;
                break;
            }
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    Enclosure { prec, lo, hi }
}

/// Nearest-ish f64 of `num / den` without overflowing on huge operands.
pub(crate) fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    // Keep ~60 significant bits in each operand.
    let ns = (nb - 60).max(0);
    let ds = (db - 60).max(0);
    let n = (num >> ns as usize).to_f64().unwrap_or(f64::NAN);
    let d = (den >> ds as usize).to_f64().unwrap_or(f64::NAN);
    n / d * 2f64.powi((ns - ds) as i32)
}

fn invert_matrix(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, piv);
        inv.swap(col, piv);
        let pv = m[col][col];
        for j in 0..n {
            m[col][j] /= pv;
            inv[col][j] /= pv;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col];
                if f != 0.0 {
                    for j in 0..n {
                        m[row][j] -= f * m[col][j];
                        inv[row][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    inv
}

/// Determinant of an integer matrix by fraction-free elimination.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

impl FieldContext {
    /// Builds `Q(lambda_p)` with default options.
    pub fn new(p: u32) -> Result<Self> {
        Self::with_options(p, FieldOptions::default())
    }

    pub fn with_options(p: u32, opts: FieldOptions) -> Result<Self> {
        if p < 3 || p > opts.max_p {
            return Err(Error::UnsupportedIndex {
                p: p as u64,
                max: opts.max_p as u64,
            });
        }
        let min_poly = lambda_min_poly(p as u64);
        let degree = min_poly.len() - 1;

        let approx = 2.0 * (std::f64::consts::PI / p as f64).cos();
        let seed = certify_seed(&min_poly, approx)
            .ok_or_else(|| Error::Consistency(format!("could not isolate 2cos(pi/{p})")))?;

        let mut cache = Vec::new();
        let mut prev = seed;
        let mut precisions: Vec<u32> = CACHED_PRECISIONS.to_vec();
        if !precisions.contains(&opts.precision_start) && opts.precision_start > SEED_PRECISION {
            precisions.push(opts.precision_start);
            precisions.sort_unstable();
        }
        for prec in precisions {
            let e = bisect(&min_poly, &prev, prec);
            cache.push(e.clone());
            prev = e;
        }

        let conjugates: Vec<f64> = (1..p)
            .filter(|k| k.gcd(&(2 * p)) == 1)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / p as f64).cos())
            .collect();
        debug_assert_eq!(conjugates.len(), degree);
        let vandermonde: Vec<Vec<f64>> = conjugates
            .iter()
            .map(|x| (0..degree).map(|k| x.powi(k as i32)).collect())
            .collect();
        let vandermonde_inv = invert_matrix(vandermonde);

        Ok(FieldContext(Arc::new(Inner {
            p,
            min_poly,
            degree,
            precision_start: opts.precision_start.max(SEED_PRECISION + 1),
            cache,
            conjugates,
            vandermonde_inv,
        })))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    /// Degree `d` of the minimal polynomial.
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    /// Monic minimal polynomial of lambda, constant term first.
    pub fn min_poly(&self) -> &[BigInt] {
        &self.0.min_poly
    }

    pub fn precision_start(&self) -> u32 {
        self.0.precision_start
    }

    /// Certified enclosure `[lo, hi] / 2^prec` of lambda at the requested
    /// precision; refinement beyond the cached levels uses local state only.
    pub fn lambda_enclosure(&self, prec: u32) -> (BigInt, BigInt) {
        let cache = &self.0.cache;
        if let Some(e) = cache.iter().find(|e| e.prec == prec) {
            return (e.lo.clone(), e.hi.clone());
        }
        match cache.iter().rev().find(|e| e.prec <= prec) {
            Some(base) => {
                let e = bisect(&self.0.min_poly, base, prec);
                (e.lo, e.hi)
            }
            None => {
                // Coarser than anything cached: round the finest outward.
                let e = &cache[0];
                let shift = (e.prec - prec) as usize;
                (e.lo.clone() >> shift, ceil_div(&e.hi, &pow2(shift as u32)))
            }
        }
    }

    pub fn lambda_f64(&self) -> f64 {
        self.0.conjugates[0]
    }

    pub fn zero(&self) -> RingElem {
        RingElem::from_int(self, 0)
    }

    pub fn one(&self) -> RingElem {
        RingElem::from_int(self, 1)
    }

    pub fn int(&self, n: i64) -> RingElem {
        RingElem::from_int(self, n)
    }

    /// The generator lambda itself.
    pub fn lambda(&self) -> RingElem {
        let mut coeffs = vec![BigInt::zero(); self.degree()];
        if self.degree() == 1 {
            // p = 3: lambda = 1.
            coeffs[0] = -self.0.min_poly[0].clone();
        } else {
            coeffs[1] = BigInt::one();
        }
        RingElem::from_parts(self, coeffs, BigInt::one())
    }
}

fn certify_seed(psi: &[BigInt], approx: f64) -> Option<Enclosure> {
    let prec = SEED_PRECISION;
    let m = BigInt::from((approx * (1u64 << prec) as f64).floor() as i128);
    let lo = &m - 16;
    let hi = &m + 16;
    let s_lo = poly_sign_at_dyadic(psi, &lo, prec);
    let s_hi = poly_sign_at_dyadic(psi, &hi, prec);
    if s_lo == s_hi {
        return None;
    }
    // psi' bounded away from zero on [lo, hi] => exactly one root inside.
    let deriv: Vec<BigInt> = psi
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigInt::from(k))
        .collect();
    let (dlo, dhi) = eval_interval(&deriv, &lo, &hi, prec);
    if dlo.sign() != dhi.sign() || dlo.is_zero() {
        return None;
    }
    Some(Enclosure { prec, lo, hi })
}

/// An element of `Q(lambda_p)` in canonical form: coefficient vector of
/// length `d` (constant first) over a positive denominator, with joint
/// content 1.
#[derive(Clone)]
pub struct RingElem {
    ctx: FieldContext,
    coeffs: Vec<BigInt>,
    denom: BigInt,
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.p() == other.ctx.p() && self.denom == other.denom && self.coeffs == other.coeffs
    }
}

impl Eq for RingElem {}

impl Hash for RingElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
        self.denom.hash(state);
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElem({})", crate::text::render_elem(self))
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::render_elem(self))
    }
}

impl RingElem {
    /// Canonicalizing constructor. `coeffs` may be longer than `d`; higher
    /// powers are reduced modulo the minimal polynomial.
    pub fn from_parts(ctx: &FieldContext, mut coeffs: Vec<BigInt>, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        reduce_mod(&mut coeffs, ctx.min_poly());
        coeffs.resize(ctx.degree(), BigInt::zero());
        let mut denom = denom;
        if denom.is_negative() {
            denom = -denom;
            for c in coeffs.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        if coeffs.iter().all(Zero::is_zero) {
            denom = BigInt::one();
        } else {
            let g = coeffs.iter().fold(denom.clone(), |g, c| g.gcd(c));
            if !g.is_one() {
                for c in coeffs.iter_mut() {
                    *c /= &g;
                }
                denom /= &g;
            }
        }
        RingElem {
            ctx: ctx.clone(),
            coeffs,
            denom,
        }
    }

    pub fn from_int(ctx: &FieldContext, n: impl Into<BigInt>) -> Self {
        Self::from_parts(ctx, vec![n.into()], BigInt::one())
    }

    pub fn from_ratio(ctx: &FieldContext, num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self::from_parts(ctx, vec![num.into()], den.into())
    }

    pub fn from_rational(ctx: &FieldContext, q: &BigRational) -> Self {
        Self::from_parts(ctx, vec![q.numer().clone()], q.denom().clone())
    }

    /// Convenience for small integer coefficient vectors, constant first.
    pub fn from_i64s(ctx: &FieldContext, coeffs: &[i64], denom: i64) -> Self {
        Self::from_parts(
            ctx,
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            BigInt::from(denom),
        )
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.denom.is_one() && self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// True iff the element lies in `Z[lambda]`.
    pub fn is_integral(&self) -> bool {
        self.denom.is_one()
    }

    /// True iff the element lies in `Q`.
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The value as an exact rational, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.coeffs[0].clone(), self.denom.clone()))
    }

    pub fn neg(&self) -> RingElem {
        RingElem {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            denom: self.denom.clone(),
        }
    }

    fn check_ctx(&self, other: &RingElem) {
        assert_eq!(self.ctx.p(), other.ctx.p(), "mixed field contexts");
    }

    fn add_impl(&self, other: &RingElem, negate: bool) -> RingElem {
        self.check_ctx(other);
        let (da, db) = (&self.denom, &other.denom);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| {
                let rhs = b * da;
                if negate {
                    a * db - rhs
                } else {
                    a * db + rhs
                }
            })
            .collect();
        RingElem::from_parts(&self.ctx, coeffs, da * db)
    }

    fn mul_impl(&self, other: &RingElem) -> RingElem {
        self.check_ctx(other);
        let d = self.ctx.degree();
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        RingElem::from_parts(&self.ctx, prod, &self.denom * &other.denom)
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<RingElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.ctx.degree();
        if d == 1 {
            return Ok(RingElem::from_parts(
                &self.ctx,
                vec![self.denom.clone()],
                self.coeffs[0].clone(),
            ));
        }
        // Extended Euclid in Q[x]: s * a = g (mod psi) with g constant.
        let to_rat = |v: &[BigInt]| -> Vec<BigRational> {
            v.iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect()
        };
        let mut r0 = to_rat(self.ctx.min_poly());
        let mut r1 = to_rat(&self.coeffs);
        rtrim(&mut r1);
        let mut s0: Vec<BigRational> = vec![BigRational::zero()];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while !(r1.len() == 1 && r1[0].is_zero()) {
            let (q, r) = rdivmod(&r0, &r1);
            let s2 = rsub(&s0, &rmul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        debug_assert_eq!(r0.len(), 1, "minimal polynomial must be irreducible");
        let g = r0[0].clone();
        // a^-1 = denom * s0 / g
        let scale = BigRational::from_integer(self.denom.clone()) / g;
        let vals: Vec<BigRational> = s0.into_iter().map(|c| c * &scale).collect();
        let common = vals.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let coeffs = vals
            .iter()
            .map(|c| c.numer() * (&common / c.denom()))
            .collect();
        Ok(RingElem::from_parts(&self.ctx, coeffs, common))
    }

    pub fn checked_div(&self, other: &RingElem) -> Result<RingElem> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> RingElem {
        let mut base = self.clone();
        let mut acc = self.ctx.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale_int(&self, n: &BigInt) -> RingElem {
        RingElem::from_parts(
            &self.ctx,
            self.coeffs.iter().map(|c| c * n).collect(),
            self.denom.clone(),
        )
    }

    /// Outward-rounded enclosure of `denom * self` at `prec` bits.
    fn numerator_enclosure(&self, prec: u32) -> (BigInt, BigInt) {
        let (lo, hi) = self.ctx.lambda_enclosure(prec);
        eval_interval(&self.coeffs, &lo, &hi, prec)
    }

    /// Sign under the distinguished embedding: -1, 0 or +1.
    pub fn sign(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if self.is_rational() {
            return if self.coeffs[0].is_positive() { 1 } else { -1 };
        }
        let mut prec = self.ctx.precision_start();
        loop {
            let (lo, hi) = self.numerator_enclosure(prec);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            prec = prec.saturating_mul(2);
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    /// Order under the distinguished embedding.
    pub fn cmp_value(&self, other: &RingElem) -> Ordering {
        (self - other).sign().cmp(&0)
    }

    pub fn abs(&self) -> RingElem {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Largest integer `n` with `n <= self`.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.coeffs[0].div_floor(&self.denom);
        }
        let mut prec = self.ctx.precision_start();
        loop {
            let (lo, hi) = self.numerator_enclosure(prec);
            let scale = &self.denom << prec as usize;
            let flo = lo.div_floor(&scale);
            let fhi = hi.div_floor(&scale);
            if flo == fhi {
                return flo;
            }
            if &fhi - &flo == BigInt::one() {
                // Straddles an integer: decide exactly.
                let diff = self - &RingElem::from_int(&self.ctx, fhi.clone());
                return if diff.sign() >= 0 { fhi } else { flo };
            }
            prec = prec.saturating_mul(2);
        }
    }

    /// Approximate value under the distinguished embedding.
    pub fn to_f64(&self) -> f64 {
        let prec = 64;
        let (lo, hi) = self.numerator_enclosure(prec);
        let mid: BigInt = (lo + hi) >> 1usize;
        ratio_to_f64(&mid, &(&self.denom << prec as usize))
    }

    /// Value of `self` under every real embedding, distinguished first.
    pub fn conjugate_values(&self) -> Vec<f64> {
        let den = ratio_to_f64(&BigInt::one(), &self.denom);
        self.ctx
            .0
            .conjugates
            .iter()
            .map(|&x| {
                let mut v = 0.0;
                for c in self.coeffs.iter().rev() {
                    v = v * x + c.to_f64().unwrap_or(f64::NAN);
                }
                v * den
            })
            .collect()
    }

    /// Norm down to `Q`: the determinant of multiplication by `self`.
    pub fn norm(&self) -> BigRational {
        let d = self.ctx.degree();
        let mut rows = Vec::with_capacity(d);
        let mut basis = RingElem::from_parts(&self.ctx, self.coeffs.clone(), BigInt::one());
        let lambda = self.ctx.lambda();
        for _ in 0..d {
            rows.push(basis.coeffs.clone());
            basis = &basis * &lambda;
        }
        let det = bareiss_det(rows);
        BigRational::new(det, Pow::pow(&self.denom, d as u32))
    }

    /// Exact square root in `Q(lambda)` when one exists and is found.
    ///
    /// A candidate is reconstructed from the real embeddings (the field is
    /// totally real) and verified exactly, so a `Some` result is always a
    /// genuine root; a `None` means no root was found.
    pub fn sqrt_exact(&self) -> Option<RingElem> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.sign() < 0 {
            return None;
        }
        // sqrt(N / den) = sqrt(N * den) / den
        let integral = RingElem::from_parts(
            &self.ctx,
            self.coeffs.iter().map(|c| c * &self.denom).collect(),
            BigInt::one(),
        );
        let root = integral.sqrt_integral()?;
        let out = RingElem::from_parts(&self.ctx, root.coeffs.clone(), self.denom.clone());
        debug_assert!(&out * &out == *self);
        Some(out)
    }

    fn sqrt_integral(&self) -> Option<RingElem> {
        let ctx = &self.ctx;
        if ctx.degree() == 1 {
            let n = &self.coeffs[0];
            let r = n.sqrt();
            return (&r * &r == *n).then(|| RingElem::from_int(ctx, r));
        }
        let norm = self.norm();
        if norm.is_negative() || !norm.is_integer() {
            return None;
        }
        let n = norm.to_integer();
        let r = n.sqrt();
        if &r * &r != n {
            return None;
        }
        let vals = self.conjugate_values();
        let scale: f64 = self
            .coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY).abs())
            .sum::<f64>()
            * 2f64.powi(ctx.degree() as i32);
        if vals.iter().any(|v| *v < -1e-9 * scale) {
            return None;
        }
        let roots: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
        let d = ctx.degree();
        let inv = &ctx.0.vandermonde_inv;
        let patterns = 1u64 << (d - 1);
        for mask in 0..patterns {
            let x: Vec<f64> = (0..d)
                .map(|i| {
                    if i > 0 && (mask >> (i - 1)) & 1 == 1 {
                        -roots[i]
                    } else {
                        roots[i]
                    }
                })
                .collect();
            let mut coeffs = Vec::with_capacity(d);
            let mut plausible = true;
            for row in inv.iter() {
                let c: f64 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
                let rc = c.round();
                if (c - rc).abs() > 1e-3 * (1.0 + c.abs() * 1e-9) || !rc.is_finite() {
                    plausible = false;
                    break;
                }
                coeffs.push(BigInt::from(rc as i128));
            }
            if !plausible {
                continue;
            }
            let cand = RingElem::from_parts(ctx, coeffs, BigInt::one());
            if &cand * &cand == *self {
                return Some(if cand.is_negative() { cand.neg() } else { cand });
            }
        }
        None
    }

    /// Evaluates an integer polynomial (constant first) at this element.
    pub fn eval_poly(&self, poly: &[BigInt]) -> RingElem {
        let mut acc = self.ctx.zero();
        for c in poly.iter().rev() {
            acc = &(&acc * self) + &RingElem::from_int(&self.ctx, c.clone());
        }
        acc
    }
}

use num_traits::Pow;

fn reduce_mod(coeffs: &mut Vec<BigInt>, psi: &[BigInt]) {
    let d = psi.len() - 1;
    while coeffs.len() > d {
        let c = coeffs.pop().unwrap();
        if c.is_zero() {
            continue;
        }
        let k = coeffs.len(); // index of the popped term
        for (j, pj) in psi.iter().take(d).enumerate() {
            coeffs[k - d + j] -= &c * pj;
        }
    }
}

fn rtrim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn rsub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigRational> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect();
    rtrim(&mut out);
    out
}

fn rmul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    rtrim(&mut out);
    out
}

fn rdivmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    if rem.len() <= dd {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - dd];
    for k in (dd..rem.len()).rev() {
        if rem[k].is_zero() {
            continue;
        }
        let c = &rem[k] / &lead;
        for (j, dj) in den.iter().enumerate() {
            rem[k - dd + j] -= &c * dj;
        }
        quot[k - dd] = c;
    }
    rem.truncate(dd.max(1));
    rtrim(&mut rem);
    rtrim(&mut quot);
    (quot, rem)
}

impl PartialOrd for RingElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RingElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a RingElem> for &'a RingElem {
            type Output = RingElem;
            fn $method(self, rhs: &'a RingElem) -> RingElem {
                $body(self, rhs)
            }
        }
        impl $tr<RingElem> for RingElem {
            type Output = RingElem;
            fn $method(self, rhs: RingElem) -> RingElem {
                $body(&self, &rhs)
            }
        }
        impl<'a> $tr<&'a RingElem> for RingElem {
            type Output = RingElem;
            fn $method(self, rhs: &'a RingElem) -> RingElem {
                $body(&self, rhs)
            }
        }
        impl<'a> $tr<RingElem> for &'a RingElem {
            type Output = RingElem;
            fn $method(self, rhs: RingElem) -> RingElem {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &RingElem, b: &RingElem| a.add_impl(b, false));
forward_binop!(Sub, sub, |a: &RingElem, b: &RingElem| a.add_impl(b, true));
forward_binop!(Mul, mul, |a: &RingElem, b: &RingElem| a.mul_impl(b));
forward_binop!(Div, div, |a: &RingElem, b: &RingElem| a
    .checked_div(b)
    .expect("division by zero"));

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem::neg(&self)
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u32) -> FieldContext {
        FieldContext::new(p).unwrap()
    }

    #[test]
    fn rejects_small_and_large_p() {
        assert!(matches!(
            FieldContext::new(2),
            Err(Error::UnsupportedIndex { .. })
        ));
        assert!(FieldContext::new(41).is_err());
        let opts = FieldOptions {
            max_p: 50,
            ..Default::default()
        };
        assert!(FieldContext::with_options(41, opts).is_ok());
    }

    #[test]
    fn lambda_three_is_one() {
        let k = field(3);
        assert_eq!(k.degree(), 1);
        assert!(k.lambda().is_one());
    }

    #[test]
    fn products_reduce() {
        let k5 = field(5);
        let l = k5.lambda();
        assert_eq!(&l * &l, RingElem::from_i64s(&k5, &[1, 1], 1));
        assert_eq!(&l * &k5.one(), l);
        let k4 = field(4);
        let l4 = k4.lambda();
        assert_eq!(&l4 * &l4, k4.int(2));
    }

    #[test]
    fn sums_from_forms() {
        let k = field(5);
        let a = RingElem::from_i64s(&k, &[4, 3], 1);
        let b = RingElem::from_i64s(&k, &[-3, -11], 1);
        assert_eq!(&a + &b, RingElem::from_i64s(&k, &[1, -8], 1));
        assert!((&k.lambda() - &k.lambda()).is_zero());
        assert_eq!(&k.lambda() + &k.zero(), k.lambda());
    }

    #[test]
    fn inverses() {
        let k5 = field(5);
        assert_eq!(
            k5.lambda().inv().unwrap(),
            RingElem::from_i64s(&k5, &[-1, 1], 1)
        );
        let k4 = field(4);
        assert_eq!(
            k4.lambda().inv().unwrap(),
            RingElem::from_i64s(&k4, &[0, 1], 2)
        );
        assert_eq!(k4.one().inv().unwrap(), k4.one());
        assert_eq!(k4.zero().inv(), Err(Error::DivisionByZero));
        let k11 = field(11);
        let x = RingElem::from_i64s(&k11, &[3, -1, 4, 1, -5], 7);
        assert!((&x * &x.inv().unwrap()).is_one());
    }

    #[test]
    fn signs_and_floors() {
        let k = field(5);
        let l = k.lambda();
        assert_eq!(k.zero().sign(), 0);
        assert_eq!((&l - &k.one()).sign(), 1);
        let psi_at = &(&(&l * &l) - &l) - &k.one();
        assert_eq!(psi_at.sign(), 0);
        assert_eq!(k.one().cmp_value(&l), Ordering::Less);
        assert_eq!(k.int(2).cmp_value(&l), Ordering::Greater);
        assert_eq!(l.cmp_value(&l), Ordering::Equal);
        assert_eq!(k.zero().floor(), BigInt::zero());
        assert_eq!(l.floor(), BigInt::one());
        assert_eq!(l.neg().floor(), BigInt::from(-2));
    }

    #[test]
    fn floor_of_exact_integers() {
        let k = field(7);
        let l = k.lambda();
        // (lambda^2 - 2) - (lambda^2 - 2) + 3 built through a detour
        let three = &(&(&l * &l) - &(&l * &l)) + &k.int(3);
        assert_eq!(three.floor(), BigInt::from(3));
        let x = &(&l.inv().unwrap() * &l) * &k.int(-4);
        assert_eq!(x.floor(), BigInt::from(-4));
    }

    #[test]
    fn sign_needs_refinement() {
        // Tiny positive value: (lambda - 1)^40 for p = 5 (about 7e-9)
        // minus a rational just below it.
        let k = field(5);
        let t = (&k.lambda() - &k.one()).pow(40);
        let f = t.to_f64();
        assert!(f > 0.0 && f < 1e-8);
        assert_eq!(t.sign(), 1);
        let near = &t - &RingElem::from_ratio(&k, 1, BigInt::from(10).pow(30u32));
        assert_eq!(near.sign(), 1);
    }

    #[test]
    fn min_poly_kills_lambda() {
        for p in 3..=40 {
            let k = field(p);
            assert!(k.lambda().eval_poly(k.min_poly()).is_zero(), "p = {p}");
        }
    }

    #[test]
    fn enclosure_contains_lambda() {
        for p in 3..=40 {
            let k = field(p);
            for prec in [64, 100, 1024] {
                let (lo, hi) = k.lambda_enclosure(prec);
                let x = 2.0 * (std::f64::consts::PI / p as f64).cos();
                let lo_f = ratio_to_f64(&lo, &pow2(prec));
                let hi_f = ratio_to_f64(&hi, &pow2(prec));
                assert!(lo_f <= x + 1e-15 && x - 1e-15 <= hi_f, "p = {p}");
                assert!(&hi - &lo <= BigInt::one());
            }
        }
    }

    #[test]
    fn square_roots() {
        let k4 = field(4);
        let l = k4.lambda();
        // (1 + lambda)^2 = 3 + 2 lambda
        let sq = RingElem::from_i64s(&k4, &[3, 2], 1);
        assert_eq!(sq.sqrt_exact(), Some(&k4.one() + &l));
        assert_eq!(k4.int(4).sqrt_exact(), Some(k4.int(2)));
        assert_eq!(k4.int(3).sqrt_exact(), None);
        let k5 = field(5);
        let d = RingElem::from_i64s(&k5, &[86, 135], 1);
        assert_eq!(d.sqrt_exact(), None);
        let k7 = field(7);
        let x = RingElem::from_i64s(&k7, &[2, -3, 1], 5);
        assert_eq!((&x * &x).sqrt_exact(), Some(x.abs()));
    }

    #[test]
    fn norms() {
        let k5 = field(5);
        // N(lambda) = -1 for x^2 - x - 1
        assert_eq!(k5.lambda().norm(), BigRational::from_integer((-1).into()));
        let k4 = field(4);
        assert_eq!(k4.lambda().norm(), BigRational::from_integer((-2).into()));
    }
}
