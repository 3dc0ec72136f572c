//! Matrices of the Hecke group `G_p`: generators, words, classification,
//! fixed points and the powers of `U = ST`.
//!
//! A [`GroupElem`] keeps its literal entries. Which fixed point counts as
//! the "plus" root `(a - d + sqrt(D)) / 2c` depends on the sign of the
//! matrix, so the sign is not normalized away; projective comparisons go
//! through [`GroupElem::canonical`] and [`GroupElem::proj_eq`].

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ring::{FieldContext, RingElem};
use crate::surd::{mobius_entries, ExtendedPoint, Surd};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElem {
    a: RingElem,
    b: RingElem,
    c: RingElem,
    d: RingElem,
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::render_matrix(self))
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::render_matrix(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Hyperbolic,
    Parabolic,
    Elliptic,
    Identity,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Hyperbolic => "hyperbolic",
            Classification::Parabolic => "parabolic",
            Classification::Elliptic => "elliptic",
            Classification::Identity => "identity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedPoints {
    /// `plus = (a - d + sqrt(D)) / 2c`, `minus` its Hecke conjugate.
    Hyperbolic {
        plus: ExtendedPoint,
        minus: ExtendedPoint,
    },
    Parabolic(ExtendedPoint),
}

impl GroupElem {
    /// Checks `ad - bc = 1`.
    pub fn new(a: RingElem, b: RingElem, c: RingElem, d: RingElem) -> Result<Self> {
        let m = GroupElem { a, b, c, d };
        if !m.det().is_one() {
            return Err(Error::DeterminantNotOne);
        }
        Ok(m)
    }

    fn raw(a: RingElem, b: RingElem, c: RingElem, d: RingElem) -> Self {
        GroupElem { a, b, c, d }
    }

    pub fn identity(ctx: &FieldContext) -> Self {
        Self::raw(ctx.one(), ctx.zero(), ctx.zero(), ctx.one())
    }

    /// `S = (1 lambda; 0 1)`.
    pub fn gen_s(ctx: &FieldContext) -> Self {
        Self::s_pow(ctx, 1)
    }

    /// `S^r = (1 r*lambda; 0 1)`.
    pub fn s_pow(ctx: &FieldContext, r: i64) -> Self {
        Self::raw(
            ctx.one(),
            ctx.lambda().scale_int(&BigInt::from(r)),
            ctx.zero(),
            ctx.one(),
        )
    }

    /// `T = (0 -1; 1 0)`.
    pub fn gen_t(ctx: &FieldContext) -> Self {
        Self::raw(ctx.zero(), ctx.int(-1), ctx.one(), ctx.zero())
    }

    /// `U = ST = (lambda -1; 1 0)`.
    pub fn gen_u(ctx: &FieldContext) -> Self {
        Self::s_pow_t(ctx, 1)
    }

    /// `S^r T = (r*lambda -1; 1 0)`.
    pub fn s_pow_t(ctx: &FieldContext, r: i64) -> Self {
        Self::raw(
            ctx.lambda().scale_int(&BigInt::from(r)),
            ctx.int(-1),
            ctx.one(),
            ctx.zero(),
        )
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
    pub fn d(&self) -> &RingElem {
        &self.d
    }

    pub fn det(&self) -> RingElem {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn trace(&self) -> RingElem {
        &self.a + &self.d
    }

    pub fn mul(&self, o: &GroupElem) -> GroupElem {
        Self::raw(
            &(&self.a * &o.a) + &(&self.b * &o.c),
            &(&self.a * &o.b) + &(&self.b * &o.d),
            &(&self.c * &o.a) + &(&self.d * &o.c),
            &(&self.c * &o.b) + &(&self.d * &o.d),
        )
    }

    pub fn inv(&self) -> GroupElem {
        Self::raw(self.d.clone(), self.b.neg(), self.c.neg(), self.a.clone())
    }

    pub fn neg(&self) -> GroupElem {
        Self::raw(self.a.neg(), self.b.neg(), self.c.neg(), self.d.neg())
    }

    pub fn pow(&self, k: i64) -> GroupElem {
        let mut base = if k < 0 { self.inv() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = GroupElem::identity(self.ctx());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Representative of `{M, -M}` whose first nonzero entry is positive.
    pub fn canonical(&self) -> GroupElem {
        let first = [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .find(|x| !x.is_zero())
            .expect("determinant one");
        if first.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Equality modulo `±I`.
    pub fn proj_eq(&self, o: &GroupElem) -> bool {
        self == o || *self == o.neg()
    }

    pub fn is_identity(&self) -> bool {
        self.proj_eq(&GroupElem::identity(self.ctx()))
    }

    pub fn classify(&self) -> Classification {
        let t = self.trace();
        let s = (&(&t * &t) - &self.ctx().int(4)).sign();
        match s {
            1 => Classification::Hyperbolic,
            -1 => Classification::Elliptic,
            _ if self.b.is_zero() && self.c.is_zero() => Classification::Identity,
            _ => Classification::Parabolic,
        }
    }

    /// `z -> (az + b) / (cz + d)`.
    pub fn apply(&self, x: &ExtendedPoint) -> ExtendedPoint {
        mobius_entries(x, &self.a, &self.b, &self.c, &self.d)
    }

    pub fn apply_surd(&self, x: &Surd) -> ExtendedPoint {
        self.apply(&ExtendedPoint::Finite(x.clone()))
    }

    pub fn fixed_points(&self) -> Result<FixedPoints> {
        let ctx = self.ctx();
        let amd = &self.a - &self.d;
        match self.classify() {
            Classification::Elliptic => Err(Error::Elliptic),
            Classification::Identity => Err(Error::Identity),
            Classification::Parabolic => Ok(FixedPoints::Parabolic(if self.c.is_zero() {
                ExtendedPoint::Infinity
            } else {
                Surd::rational(&amd / &(&self.c * &ctx.int(2))).into()
            })),
            Classification::Hyperbolic => {
                if self.c.is_zero() {
                    // z -> a^2 z + ab fixes infinity and b/(d - a).
                    let finite: ExtendedPoint = Surd::rational(&self.b / &amd.neg()).into();
                    let (plus, minus) = if amd.is_positive() {
                        (ExtendedPoint::Infinity, finite)
                    } else {
                        (finite, ExtendedPoint::Infinity)
                    };
                    return Ok(FixedPoints::Hyperbolic { plus, minus });
                }
                let t = self.trace();
                let disc = &(&t * &t) - &ctx.int(4);
                let plus = Surd::new(&amd, &ctx.one(), &(&self.c * &ctx.int(2)), &disc)?;
                let minus = plus.conjugate();
                Ok(FixedPoints::Hyperbolic {
                    plus: plus.into(),
                    minus: minus.into(),
                })
            }
        }
    }
}

/// `c_k = sin(k pi/p) / sin(pi/p)`, via `c_{k+1} = lambda c_k - c_{k-1}`.
pub fn c_seq(ctx: &FieldContext, k: i64) -> RingElem {
    if k < 0 {
        return c_seq(ctx, -k).neg();
    }
    let lambda = ctx.lambda();
    // The sequence is periodic with period 2p.
    let k = k % (2 * ctx.p() as i64);
    let (mut prev, mut cur) = (ctx.zero(), ctx.one());
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = &(&lambda * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `U^k = (c_{k+1} -c_k; c_k -c_{k-1})`.
pub fn u_power(ctx: &FieldContext, k: i64) -> GroupElem {
    GroupElem::raw(
        c_seq(ctx, k + 1),
        c_seq(ctx, k).neg(),
        c_seq(ctx, k),
        c_seq(ctx, k - 1).neg(),
    )
}

/// `U^k(0) = c_k / c_{k-1}` for `1 <= k <= p`.
pub fn u_zero(ctx: &FieldContext, k: i64) -> Result<ExtendedPoint> {
    let p = ctx.p();
    if k < 1 || k > p as i64 {
        return Err(Error::OutOfRange { k, p });
    }
    let den = c_seq(ctx, k - 1);
    if den.is_zero() {
        return Ok(ExtendedPoint::Infinity);
    }
    Ok(Surd::rational(&c_seq(ctx, k) / &den).into())
}

/// `S^{r_0} T S^{r_1} T ... S^{r_n} T`.
pub fn word_to_matrix(ctx: &FieldContext, word: &[i64]) -> GroupElem {
    word.iter().fold(GroupElem::identity(ctx), |m, &r| {
        m.mul(&GroupElem::s_pow_t(ctx, r))
    })
}

/// Shorthand for [`GroupElem::apply`].
pub fn mobius_apply(m: &GroupElem, x: &ExtendedPoint) -> ExtendedPoint {
    m.apply(x)
}
