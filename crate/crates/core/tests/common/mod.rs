//! Seeded generators shared by the integration tests and the bench.

#![allow(dead_code)]

use hecke_core::group::{word_to_matrix, FixedPoints};
use hecke_core::sweep::Case;
use hecke_core::{Classification, FieldContext, Surd};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x48_4543_4b45;

pub fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// A word of length 1..=8 with exponents 1..=5 whose matrix is hyperbolic.
pub fn hyperbolic_word(ctx: &FieldContext, rng: &mut impl Rng) -> Vec<i64> {
    loop {
        let len = rng.random_range(1..=8);
        let w: Vec<i64> = (0..len).map(|_| rng.random_range(1..=5)).collect();
        if word_to_matrix(ctx, &w).classify() == Classification::Hyperbolic {
            return w;
        }
    }
}

/// A word of length 0..=4 with exponents in -3..=3.
pub fn aux_word(rng: &mut impl Rng) -> Vec<i64> {
    let len = rng.random_range(0..=4);
    (0..len).map(|_| rng.random_range(-3..=3)).collect()
}

pub fn cases(ctx: &FieldContext, n: usize, salt: u64) -> Vec<Case> {
    let mut r = rng(salt ^ u64::from(ctx.p()));
    (0..n)
        .map(|_| Case {
            word: hyperbolic_word(ctx, &mut r),
            aux: aux_word(&mut r),
        })
        .collect()
}

/// The attracting fixed point of a random hyperbolic word.
pub fn hyperbolic_point(ctx: &FieldContext, rng: &mut impl Rng) -> Surd {
    loop {
        let w = hyperbolic_word(ctx, rng);
        if let Ok(FixedPoints::Hyperbolic { plus, .. }) = word_to_matrix(ctx, &w).fixed_points() {
            if let Some(x) = plus.into_finite() {
                return x;
            }
        }
    }
}

pub fn points(ctx: &FieldContext, n: usize, salt: u64) -> Vec<Surd> {
    let mut r = rng(salt ^ u64::from(ctx.p()));
    (0..n).map(|_| hyperbolic_point(ctx, &mut r)).collect()
}
