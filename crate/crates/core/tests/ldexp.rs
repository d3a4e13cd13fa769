//! `ldexp32` against the C library on random arguments.

use pimfunc::fixedpoint::ldexp32;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

extern "C" {
    fn ldexpf(x: f32, exp: i32) -> f32;
}

fn libc_ldexp(x: f32, e: i32) -> f32 {
    // SAFETY: pure function on plain values.
    unsafe { ldexpf(x, e) }
}

fn same(a: f32, b: f32) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

#[test]
fn million_random_pairs_match_libc() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0x1d3);
    let mut mismatches = Vec::new();
    for _ in 0..1_000_000 {
        let w = rng.next_u64();
        let x = f32::from_bits(w as u32);
        // Mostly small exponents, sometimes far enough to overflow or underflow.
        let e = if w >> 63 == 0 {
            ((w >> 32) % 61) as i32 - 30
        } else {
            ((w >> 32) % 601) as i32 - 300
        };
        let (ours, theirs) = (ldexp32(x, e), libc_ldexp(x, e));
        if !same(ours, theirs) && mismatches.len() < 10 {
            mismatches.push((x, e, ours, theirs));
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:?}");
}

#[test]
fn edge_values_match_libc() {
    let xs = [
        0.0f32,
        -0.0,
        1.0,
        -1.5,
        f32::MIN_POSITIVE,
        f32::from_bits(1),
        f32::from_bits(0x007f_ffff),
        f32::MAX,
        f32::INFINITY,
        f32::NEG_INFINITY,
        f32::NAN,
        1.999_999_9,
    ];
    for &x in &xs {
        for e in [
            -300,
            -150,
            -149,
            -127,
            -126,
            -24,
            -1,
            0,
            1,
            24,
            127,
            128,
            254,
            300,
            i32::MIN,
            i32::MAX,
        ] {
            assert!(same(ldexp32(x, e), libc_ldexp(x, e)), "{x:e} {e}");
        }
    }
}
