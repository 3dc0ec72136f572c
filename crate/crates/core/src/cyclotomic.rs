//! Minimal polynomial of `2cos(pi/p)` built from the `2p`-th cyclotomic
//! polynomial with integer arithmetic only.
//!
//! `Phi_n(z)` comes from exact division of `z^n - 1` by `Phi_e(z)` for every
//! proper divisor `e` of `n`. For `n > 2` it is palindromic of even degree
//! `2d`, so `z^-d Phi_n(z)` is a polynomial in `x = z + 1/z`, obtained through
//! the Dickson basis `z^j + z^-j = D_j(x)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Integer polynomial, constant term first.
pub type IntPoly = Vec<BigInt>;

fn trim(p: &mut IntPoly) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Exact division by a monic divisor. Panics if the divisor is not monic
/// or the remainder is nonzero.
fn div_exact_monic(num: &IntPoly, den: &IntPoly) -> IntPoly {
    assert!(den.last().is_some_and(One::is_one), "divisor must be monic");
    let mut rem = num.clone();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        assert!(rem.iter().all(Zero::is_zero));
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (dd..rem.len()).rev() {
        let c = rem[k].clone();
        if c.is_zero() {
            continue;
        }
        quot[k - dd] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            rem[k - dd + j] -= &c * dj;
        }
    }
    assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    trim(&mut quot);
    quot
}

fn poly_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// The `n`-th cyclotomic polynomial.
pub fn cyclotomic(n: u64) -> IntPoly {
    assert!(n >= 1);
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    let mut den: IntPoly = vec![BigInt::one()];
    for e in 1..n {
        if n.is_multiple_of(e) {
            den = poly_mul(&den, &cyclotomic(e));
        }
    }
    div_exact_monic(&num, &den)
}

/// Euler's totient, by trial division.
pub fn totient(mut n: u64) -> u64 {
    let mut out = n;
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            while n.is_multiple_of(q) {
                n /= q;
            }
            out -= out / q;
        }
        q += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// Monic integer minimal polynomial of `2cos(pi/p)`, degree `phi(2p)/2`.
pub fn lambda_min_poly(p: u64) -> IntPoly {
    assert!(p >= 3);
    let phi = cyclotomic(2 * p);
    let deg = phi.len() - 1;
    debug_assert!(deg.is_multiple_of(2));
    let d = deg / 2;

    // Dickson polynomials D_j(x) = x D_{j-1} - D_{j-2}, D_0 = 2, D_1 = x.
    let mut dickson: Vec<IntPoly> = Vec::with_capacity(d + 1);
    dickson.push(vec![BigInt::from(2)]);
    dickson.push(vec![BigInt::zero(), BigInt::one()]);
    for j in 2..=d {
        let mut next = vec![BigInt::zero(); j + 1];
        for (k, c) in dickson[j - 1].iter().enumerate() {
            next[k + 1] += c;
        }
        for (k, c) in dickson[j - 2].iter().enumerate() {
            next[k] -= c;
        }
        dickson.push(next);
    }

    let mut psi = vec![BigInt::zero(); d + 1];
    psi[0] = phi[d].clone();
    for j in 1..=d {
        let f = &phi[d + j];
        for (k, c) in dickson[j].iter().enumerate() {
            psi[k] += f * c;
        }
    }
    psi
}
