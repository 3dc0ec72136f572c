//! Text grammars for elements, surds, forms, continued fractions, words and
//! matrices.
//!
//! Elements are sums of terms in `L` (or `l`) for lambda, e.g. `3L+4`,
//! `(1/2)L^2-1`, `-L`. Surds extend this with `sqrt(...)`:
//! `(P + Q*sqrt(D))/R`. The same small expression parser handles both; it
//! tracks values of the shape `a + b*sqrt(d)` and rejects anything
//! non-linear in the square root.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bqf::QForm;
use crate::cf::PeriodicCf;
use crate::error::{Error, Result};
use crate::group::GroupElem;
use crate::ring::{FieldContext, RingElem};
use crate::surd::{ExtendedPoint, Surd};

// ---------------------------------------------------------------- rendering

fn render_coeff(num: &BigInt, den: &BigInt) -> String {
    if den.is_one() {
        num.to_string()
    } else {
        format!("({num}/{den})")
    }
}

/// Canonical text of an element, highest power of `L` first.
pub fn render_elem(x: &RingElem) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let den = x.denom();
    let mut out = String::new();
    for (k, c) in x.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let g = c.gcd(den);
        let (n, d) = (c.abs() / &g, den / &g);
        if c.is_negative() {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        let unit = n.is_one() && d.is_one();
        if k == 0 || !unit {
            out.push_str(&render_coeff(&n, &d));
        }
        match k {
            0 => {}
            1 => out.push('L'),
            _ => out.push_str(&format!("L^{k}")),
        }
    }
    out
}

fn is_single_term(x: &RingElem) -> bool {
    x.coeffs().iter().filter(|c| !c.is_zero()).count() <= 1
}

/// `(P + Q*sqrt(D))/R`, or the plain element for values in `Q(lambda)`.
pub fn render_surd(s: &Surd) -> String {
    if s.is_rational() {
        return render_elem(s.rational_part());
    }
    let (p, q, r, d) = s.components();
    let qpart = if is_single_term(&q) {
        if q.is_negative() {
            format!(" - {}", render_elem(&q.neg()))
        } else {
            format!(" + {}", render_elem(&q))
        }
    } else {
        format!(" + ({})", render_elem(&q))
    };
    format!(
        "({}{}*sqrt({}))/{}",
        render_elem(&p),
        qpart,
        render_elem(&d),
        r
    )
}

pub fn render_point(x: &ExtendedPoint) -> String {
    match x {
        ExtendedPoint::Infinity => "inf".into(),
        ExtendedPoint::Finite(s) => render_surd(s),
    }
}

pub fn render_form(q: &QForm) -> String {
    format!(
        "[{}, {}, {}]",
        render_elem(q.a()),
        render_elem(q.b()),
        render_elem(q.c())
    )
}

fn join(xs: &[i64]) -> String {
    xs.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")
}

/// `[r0; r1, ..., (s0, ..., sm)]`; purely periodic CFs print as `[(s0, ...)]`.
pub fn render_cf(cf: &PeriodicCf) -> String {
    let pre = &cf.preperiod;
    let per = &cf.period;
    let period = if per.is_empty() {
        None
    } else {
        Some(format!("({})", join(per)))
    };
    match (pre.split_first(), period) {
        (None, None) => "[]".into(),
        (None, Some(p)) => format!("[{p}]"),
        (Some((r0, [])), None) => format!("[{r0}]"),
        (Some((r0, rest)), None) => format!("[{r0}; {}]", join(rest)),
        (Some((r0, [])), Some(p)) => format!("[{r0}; {p}]"),
        (Some((r0, rest)), Some(p)) => format!("[{r0}; {}, {p}]", join(rest)),
    }
}

pub fn render_word(w: &[i64]) -> String {
    format!("[{}]", join(w))
}

pub fn render_matrix(m: &GroupElem) -> String {
    format!(
        "({}, {}; {}, {})",
        render_elem(m.a()),
        render_elem(m.b()),
        render_elem(m.c()),
        render_elem(m.d())
    )
}

// ------------------------------------------------------------------ parsing

/// `a + b*sqrt(d)` during parsing.
#[derive(Clone)]
struct Lin {
    a: RingElem,
    b: RingElem,
    d: Option<RingElem>,
}

impl Lin {
    fn elem(a: RingElem) -> Lin {
        let b = a.ctx().zero();
        Lin { a, b, d: None }
    }

    fn has_sqrt(&self) -> bool {
        self.d.is_some() && !self.b.is_zero()
    }
}

struct Parser<'a> {
    ctx: &'a FieldContext,
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(ctx: &'a FieldContext, s: &'a str) -> Self {
        Parser {
            ctx,
            src: s.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.pos, msg)
    }

    fn at_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let end = self.pos + kw.len();
        end <= self.src.len() && self.src[self.pos..end].eq_ignore_ascii_case(kw.as_bytes())
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.err(format!("unexpected '{}'", c as char))),
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn int(&mut self) -> Result<BigInt> {
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let v = self.uint()?;
        Ok(if neg { -v } else { v })
    }

    fn starts_factor(&mut self) -> bool {
        match self.peek() {
            Some(c) => {
                c.is_ascii_digit() || c == b'(' || c == b'L' || c == b'l' || self.at_keyword("sqrt")
            }
            None => false,
        }
    }

    fn expr(&mut self) -> Result<Lin> {
        let mut acc = if self.eat(b'-') {
            let t = self.term()?;
            neg(&t)
        } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            let at = self.pos;
            if self.eat(b'+') {
                let t = self.term()?;
                acc = self.add(acc, t, at)?;
            } else if self.eat(b'-') {
                let t = self.term()?;
                acc = self.add(acc, neg(&t), at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn add(&self, x: Lin, y: Lin, at: usize) -> Result<Lin> {
        let d = match (&x.d, &y.d) {
            (Some(d1), Some(d2)) if d1 != d2 => {
                return Err(Error::parse(at, "terms with different radicands"));
            }
            (Some(d), _) | (_, Some(d)) => Some(d.clone()),
            (None, None) => None,
        };
        Ok(Lin {
            a: &x.a + &y.a,
            b: &x.b + &y.b,
            d,
        })
    }

    fn term(&mut self) -> Result<Lin> {
        let mut acc = self.power()?;
        loop {
            let at = self.pos;
            if self.eat(b'*') {
                let f = self.power()?;
                acc = mul(acc, f, at)?;
            } else if self.eat(b'/') {
                let f = self.power()?;
                if f.has_sqrt() {
                    return Err(Error::parse(at, "cannot divide by a square root"));
                }
                if f.a.is_zero() {
                    return Err(Error::parse(at, "division by zero"));
                }
                let inv = f.a.inv().expect("nonzero");
                acc = Lin {
                    a: &acc.a * &inv,
                    b: &acc.b * &inv,
                    d: acc.d,
                };
            } else if self.starts_factor() {
                let f = self.power()?;
                acc = mul(acc, f, at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Lin> {
        let base = self.atom()?;
        let at = self.pos;
        if self.eat(b'^') {
            let e = self.uint()?;
            let e = e
                .to_u32()
                .filter(|&e| e <= 4096)
                .ok_or_else(|| Error::parse(at, "exponent too large"))?;
            if base.has_sqrt() {
                return Err(Error::parse(at, "cannot raise a square root to a power"));
            }
            return Ok(Lin::elem(base.a.pow(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Lin> {
        let ctx = self.ctx;
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Lin::elem(RingElem::from_int(ctx, self.uint()?))),
            Some(b'L') | Some(b'l') => {
                self.pos += 1;
                Ok(Lin::elem(ctx.lambda()))
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(_) if self.at_keyword("sqrt") => {
                self.pos += 4;
                self.expect(b'(')?;
                let at = self.pos;
                let r = self.expr()?;
                self.expect(b')')?;
                if r.has_sqrt() {
                    return Err(Error::parse(at, "nested square root"));
                }
                if r.a.is_zero() {
                    return Ok(Lin::elem(ctx.zero()));
                }
                if !r.a.is_positive() {
                    return Err(Error::parse(at, "radicand must be positive"));
                }
                Ok(Lin {
                    a: ctx.zero(),
                    b: ctx.one(),
                    d: Some(r.a),
                })
            }
            Some(c) => Err(self.err(format!("unexpected '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn elem(&mut self) -> Result<RingElem> {
        let at = self.pos;
        let v = self.expr()?;
        if v.has_sqrt() {
            return Err(Error::parse(at, "square root not allowed here"));
        }
        Ok(v.a)
    }

    fn surd(&mut self) -> Result<Surd> {
        let at = self.pos;
        let v = self.expr()?;
        match v.d {
            Some(d) if !v.b.is_zero() => {
                let one = self.ctx.one();
                Surd::new(&v.a, &v.b, &one, &d).map_err(|e| Error::parse(at, e.to_string()))
            }
            _ => Ok(Surd::rational(v.a)),
        }
    }

    fn int_list(&mut self, close: u8) -> Result<Vec<i64>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.small_int()?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(b',')?;
        }
    }

    fn small_int(&mut self) -> Result<i64> {
        self.skip_ws();
        let at = self.pos;
        self.int()?
            .to_i64()
            .ok_or_else(|| Error::parse(at, "integer out of range"))
    }
}

fn neg(x: &Lin) -> Lin {
    Lin {
        a: x.a.neg(),
        b: x.b.neg(),
        d: x.d.clone(),
    }
}

fn mul(x: Lin, y: Lin, at: usize) -> Result<Lin> {
    match (x.has_sqrt(), y.has_sqrt()) {
        (true, true) => Err(Error::parse(at, "product of two square roots")),
        (false, true) => mul(y, x, at),
        (_, false) => Ok(Lin {
            a: &x.a * &y.a,
            b: &x.b * &y.a,
            d: x.d,
        }),
    }
}

pub fn parse_elem(ctx: &FieldContext, s: &str) -> Result<RingElem> {
    let mut p = Parser::new(ctx, s);
    let v = p.elem()?;
    p.finish()?;
    Ok(v)
}

/// A finite surd; see [`parse_point`] for `inf`.
pub fn parse_surd(ctx: &FieldContext, s: &str) -> Result<Surd> {
    let mut p = Parser::new(ctx, s);
    let v = p.surd()?;
    p.finish()?;
    Ok(v)
}

pub fn parse_point(ctx: &FieldContext, s: &str) -> Result<ExtendedPoint> {
    let mut p = Parser::new(ctx, s);
    if p.at_keyword("inf") {
        p.pos += 3;
        p.finish()?;
        return Ok(ExtendedPoint::Infinity);
    }
    let v = p.surd()?;
    p.finish()?;
    Ok(ExtendedPoint::Finite(v))
}

pub fn parse_form(ctx: &FieldContext, s: &str) -> Result<QForm> {
    let mut p = Parser::new(ctx, s);
    p.expect(b'[')?;
    let a = p.elem()?;
    p.expect(b',')?;
    let b = p.elem()?;
    p.expect(b',')?;
    let c = p.elem()?;
    p.expect(b']')?;
    p.finish()?;
    QForm::new(a, b, c).map_err(|e| Error::parse(0, e.to_string()))
}

/// `[r0; r1, ..., (s0, ...)]`, `[(s0, ...)]` or a finite `[r0; r1, ...]`.
pub fn parse_cf(s: &str) -> Result<PeriodicCf> {
    // The parser needs a context only for elements; CFs are plain integers.
    let ctx = FieldContext::new(3)?;
    let mut p = Parser::new(&ctx, s);
    p.expect(b'[')?;
    let mut pre = Vec::new();
    let mut period = Vec::new();
    if p.eat(b']') {
        p.finish()?;
        return Ok(PeriodicCf::new(pre, period));
    }
    let mut first = true;
    loop {
        if p.eat(b'(') {
            period = p.int_list(b')')?;
            if period.is_empty() {
                return Err(p.err("empty period"));
            }
            p.expect(b']')?;
            break;
        }
        pre.push(p.small_int()?);
        if p.eat(b']') {
            break;
        }
        if first {
            if !p.eat(b';') {
                p.expect(b',')?;
            }
            first = false;
        } else {
            p.expect(b',')?;
        }
    }
    p.finish()?;
    Ok(PeriodicCf::new(pre, period))
}

/// `[2,3,2,1,1,4]`; negative exponents are allowed.
pub fn parse_word(s: &str) -> Result<Vec<i64>> {
    let ctx = FieldContext::new(3)?;
    let mut p = Parser::new(&ctx, s);
    p.expect(b'[')?;
    let w = p.int_list(b']')?;
    p.finish()?;
    Ok(w)
}

/// `(a, b; c, d)`.
pub fn parse_matrix(ctx: &FieldContext, s: &str) -> Result<GroupElem> {
    let mut p = Parser::new(ctx, s);
    p.expect(b'(')?;
    let a = p.elem()?;
    p.expect(b',')?;
    let b = p.elem()?;
    p.expect(b';')?;
    let c = p.elem()?;
    p.expect(b',')?;
    let d = p.elem()?;
    p.expect(b')')?;
    p.finish()?;
    GroupElem::new(a, b, c, d).map_err(|e| Error::parse(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(p: u32) -> FieldContext {
        FieldContext::new(p).unwrap()
    }

    #[test]
    fn element_examples() {
        let ctx = k(5);
        assert!(parse_elem(&ctx, "0").unwrap().is_zero());
        let x = parse_elem(&ctx, "3L+4").unwrap();
        assert_eq!(x, RingElem::from_i64s(&ctx, &[4, 3], 1));
        let ctx7 = k(7);
        let y = parse_elem(&ctx7, "(1/2)L^2-1").unwrap();
        assert_eq!(y.coeffs(), &[BigInt::from(-2), 0.into(), 1.into()]);
        assert_eq!(y.denom(), &BigInt::from(2));
        assert_eq!(render_elem(&y), "(1/2)L^2-1");
    }

    #[test]
    fn element_rendering() {
        let ctx = k(5);
        for (s, want) in [
            ("-11l - 3", "-11L-3"),
            ("L*L", "L+1"),
            ("-L", "-L"),
            ("2 * (L + 1) / 4", "(1/2)L+(1/2)"),
            ("0*L", "0"),
            ("+7", "7"),
        ] {
            assert_eq!(render_elem(&parse_elem(&ctx, s).unwrap()), want, "{s}");
        }
    }

    #[test]
    fn element_errors_have_positions() {
        let ctx = k(5);
        match parse_elem(&ctx, "3L+") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("{other:?}"),
        }
        match parse_elem(&ctx, "3L $") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_elem(&ctx, "1/0").is_err());
        assert!(parse_elem(&ctx, "sqrt(2)").is_err());
    }

    #[test]
    fn surd_round_trip() {
        let ctx = k(5);
        let s = parse_surd(&ctx, "(L + 1 + sqrt(135L+86))/(2L+4)").unwrap();
        let text = render_surd(&s);
        assert_eq!(parse_surd(&ctx, &text).unwrap(), s);
        let t = parse_surd(&ctx, "(7L+3 - 1*sqrt(135L+86))/(2L+4)").unwrap();
        assert_eq!(parse_surd(&ctx, &render_surd(&t)).unwrap(), t);
        assert!((t.to_f64() + 0.4314).abs() < 1e-3);
    }

    #[test]
    fn surd_square_radicand_example() {
        let ctx = k(4);
        let s = parse_surd(&ctx, "(L + 1*sqrt(L^2-2+1))/1").unwrap();
        assert!((s.to_f64() - (2f64.sqrt() + 1.0)).abs() < 1e-12);
        assert!(parse_surd(&ctx, "sqrt(-1)").is_err());
        assert!(parse_point(&ctx, "inf").unwrap().is_infinite());
    }

    #[test]
    fn cf_grammar() {
        let cf = parse_cf("[2; 3, (2, 1, 1, 4)]").unwrap();
        assert_eq!(cf.preperiod, vec![2, 3]);
        assert_eq!(cf.period, vec![2, 1, 1, 4]);
        assert_eq!(render_cf(&cf), "[2; 3, (2, 1, 1, 4)]");
        let pure = parse_cf("[(2)]").unwrap();
        assert!(pure.preperiod.is_empty());
        assert_eq!(render_cf(&pure), "[(2)]");
        let fin = parse_cf("[1; 2]").unwrap();
        assert_eq!(render_cf(&fin), "[1; 2]");
        assert_eq!(
            render_cf(&parse_cf("[1; (2, 1, 1, 4)]").unwrap()),
            "[1; (2, 1, 1, 4)]"
        );
        assert!(parse_cf("[1; ()]").is_err());
        assert!(parse_cf("[1; 2").is_err());
    }

    #[test]
    fn word_grammar() {
        assert_eq!(parse_word("[2,3,2,1,1,4]").unwrap(), vec![2, 3, 2, 1, 1, 4]);
        assert_eq!(parse_word("[ -1 , 0 ]").unwrap(), vec![-1, 0]);
        assert!(parse_word("[]").unwrap().is_empty());
        assert_eq!(render_word(&[2, 3]), "[2, 3]");
    }

    #[test]
    fn form_grammar() {
        let ctx = k(5);
        let q = parse_form(&ctx, "[3L+4, -11L-3, L+2]").unwrap();
        assert_eq!(render_form(&q), "[3L+4, -11L-3, L+2]");
        assert!(parse_form(&ctx, "[1, 2]").is_err());
    }
}
