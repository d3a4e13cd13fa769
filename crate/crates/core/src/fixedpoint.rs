//! Q3.28 fixed point and float bit manipulation.
//!
//! A [`FixedQ3_28`] is one sign bit, 3 integer bits and 28 fraction bits in
//! an `i32`, so it spans [-8, 8 - 2^-28]. Arithmetic never wraps: the
//! `checked`-style functions return [`Error::Overflow`] and the operator
//! impls panic, in every build profile.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::costmodel::{tally, Op};
use crate::error::{Error, Result};

pub const FRAC_BITS: u32 = 28;
const SCALE: f64 = (1u64 << FRAC_BITS) as f64;

const F32_EXP_MASK: u32 = 0x7f80_0000;
const F32_MANT_MASK: u32 = 0x007f_ffff;
const F32_SIGN_MASK: u32 = 0x8000_0000;

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedQ3_28(i32);

impl FixedQ3_28 {
    pub const ZERO: FixedQ3_28 = FixedQ3_28(0);
    pub const ONE: FixedQ3_28 = FixedQ3_28(1 << FRAC_BITS);
    pub const MAX: FixedQ3_28 = FixedQ3_28(i32::MAX);
    pub const MIN: FixedQ3_28 = FixedQ3_28(i32::MIN);
    /// Smallest positive step, 2^-28.
    pub const EPSILON: FixedQ3_28 = FixedQ3_28(1);

    pub const fn from_raw(raw: i32) -> Self {
        FixedQ3_28(raw)
    }

    pub const fn raw(self) -> i32 {
        self.0
    }

    /// Exact value as a double.
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE
    }
}

impl fmt::Debug for FixedQ3_28 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q3.28({} = {:#010x})", self.to_f64(), self.0)
    }
}

impl fmt::Display for FixedQ3_28 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl Add for FixedQ3_28 {
    type Output = FixedQ3_28;

    fn add(self, rhs: FixedQ3_28) -> FixedQ3_28 {
        fixed_add(self, rhs).expect("Q3.28 addition overflowed")
    }
}

impl Sub for FixedQ3_28 {
    type Output = FixedQ3_28;

    fn sub(self, rhs: FixedQ3_28) -> FixedQ3_28 {
        fixed_sub(self, rhs).expect("Q3.28 subtraction overflowed")
    }
}

impl Neg for FixedQ3_28 {
    type Output = FixedQ3_28;

    fn neg(self) -> FixedQ3_28 {
        fixed_sub(FixedQ3_28::ZERO, self).expect("Q3.28 negation overflowed")
    }
}

fn from_scaled(scaled: f64, value: f64) -> Result<FixedQ3_28> {
    let rounded = scaled.round_ties_even();
    if !(rounded >= i32::MIN as f64 && rounded <= i32::MAX as f64) {
        return Err(Error::range(value, -8.0, 8.0));
    }
    Ok(FixedQ3_28(rounded as i32))
}

/// Converts a float, rounding x·2^28 to nearest, ties to even.
pub fn to_fixed(x: f32) -> Result<FixedQ3_28> {
    tally(Op::Ldexp, 1);
    if x.is_nan() || x.abs() >= 8.0 {
        return Err(Error::range(x as f64, -8.0, 8.0));
    }
    // x·2^28 is exact in f64; only the final rounding loses bits.
    from_scaled(x as f64 * SCALE, x as f64)
}

/// Double-precision variant of [`to_fixed`], used for values produced by
/// host-side range reduction and table generation.
pub fn to_fixed_f64(x: f64) -> Result<FixedQ3_28> {
    tally(Op::Ldexp, 1);
    if x.is_nan() || x.abs() >= 8.0 {
        return Err(Error::range(x, -8.0, 8.0));
    }
    from_scaled(x * SCALE, x)
}

/// raw / 2^28, rounded to the nearest float.
pub fn to_float(f: FixedQ3_28) -> f32 {
    tally(Op::Ldexp, 1);
    // raw/2^28 is exact in f64, so the cast is the only rounding.
    f.to_f64() as f32
}

pub fn fixed_add(a: FixedQ3_28, b: FixedQ3_28) -> Result<FixedQ3_28> {
    tally(Op::IntAdd, 1);
    a.0.checked_add(b.0)
        .map(FixedQ3_28)
        .ok_or(Error::Overflow("fixed_add"))
}

pub fn fixed_sub(a: FixedQ3_28, b: FixedQ3_28) -> Result<FixedQ3_28> {
    tally(Op::IntAdd, 1);
    a.0.checked_sub(b.0)
        .map(FixedQ3_28)
        .ok_or(Error::Overflow("fixed_sub"))
}

/// Arithmetic right shift by `i` (0..=31): a·2^-i rounded toward -inf.
pub fn fixed_shift(a: FixedQ3_28, i: u32) -> FixedQ3_28 {
    assert!(i <= 31, "shift amount {i} out of range");
    tally(Op::IntShift, 1);
    FixedQ3_28(a.0 >> i)
}

/// (a·b) / 2^28 through a 64-bit product, truncated toward -inf.
pub fn fixed_mul(a: FixedQ3_28, b: FixedQ3_28) -> Result<FixedQ3_28> {
    tally(Op::IntMul, 1);
    let wide = (a.0 as i64 * b.0 as i64) >> FRAC_BITS;
    i32::try_from(wide)
        .map(FixedQ3_28)
        .map_err(|_| Error::Overflow("fixed_mul"))
}

/// arg·2^exp by editing the exponent field, with C99 `ldexpf` semantics:
/// overflow goes to ±infinity, underflow to a correctly rounded (ties to
/// even) subnormal or signed zero, and NaN, infinities and zeros pass
/// through unchanged.
pub fn ldexp32(arg: f32, exp: i32) -> f32 {
    tally(Op::Ldexp, 1);
    let bits = arg.to_bits();
    let sign = bits & F32_SIGN_MASK;
    let mut biased = ((bits & F32_EXP_MASK) >> 23) as i64;
    let mut mant = bits & F32_MANT_MASK;

    if biased == 0xff || (biased == 0 && mant == 0) {
        return arg;
    }
    if biased == 0 {
        // Normalize a subnormal so that bit 23 is set.
        let shift = mant.leading_zeros() - 8;
        mant <<= shift;
        biased = 1 - shift as i64;
    } else {
        mant |= 1 << 23;
    }

    let target = biased + exp as i64;
    if target >= 0xff {
        return f32::from_bits(sign | F32_EXP_MASK);
    }
    if target >= 1 {
        return f32::from_bits(sign | ((target as u32) << 23) | (mant & F32_MANT_MASK));
    }

    // Subnormal or zero result: shift the 24-bit significand right and
    // round to nearest even. A carry into bit 23 correctly yields the
    // smallest normal.
    let shift = 1 - target;
    if shift > 25 {
        return f32::from_bits(sign);
    }
    let shift = shift as u32;
    let kept = mant >> shift;
    let rem = mant & ((1 << shift) - 1);
    let half = 1 << (shift - 1);
    let rounded = if rem > half || (rem == half && kept & 1 == 1) {
        kept + 1
    } else {
        kept
    };
    f32::from_bits(sign | rounded)
}

/// Sign, unbiased exponent and mantissa in [1, 2) of a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatParts {
    pub sign: i8,
    pub exponent: i32,
    pub mantissa: f32,
    /// The input was subnormal; `exponent` is then below -126.
    pub subnormal: bool,
}

impl FloatParts {
    /// sign·mantissa·2^exponent.
    pub fn reconstruct(&self) -> f32 {
        let m = if self.sign < 0 {
            -self.mantissa
        } else {
            self.mantissa
        };
        ldexp32(m, self.exponent)
    }
}

/// Splits a positive finite float into exponent and mantissa.
pub fn split_float(x: f32) -> Result<FloatParts> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain {
            function: "split_float",
            value: x as f64,
        });
    }
    tally(Op::IntShift, 1);
    tally(Op::IntAdd, 2);
    let bits = x.to_bits();
    let biased = ((bits & F32_EXP_MASK) >> 23) as i32;
    let (exponent, mant_bits, subnormal) = if biased == 0 {
        let m = bits & F32_MANT_MASK;
        let shift = m.leading_zeros() - 8;
        (-126 - shift as i32, (m << shift) & F32_MANT_MASK, true)
    } else {
        (biased - 127, bits & F32_MANT_MASK, false)
    };
    Ok(FloatParts {
        sign: 1,
        exponent,
        mantissa: f32::from_bits((127 << 23) | mant_bits),
        subnormal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::with_counting;
    use proptest::prelude::*;

    fn fx(x: f64) -> FixedQ3_28 {
        to_fixed_f64(x).unwrap()
    }

    #[test]
    fn to_fixed_examples() {
        assert_eq!(to_fixed(1.0).unwrap().raw(), 268_435_456);
        assert_eq!(to_fixed(0.0).unwrap().raw(), 0);
        // round(pi·2^28) from a 50-digit reference: 843314856.53 -> 843314857.
        assert_eq!(
            to_fixed_f64(std::f64::consts::PI).unwrap().raw(),
            843_314_857
        );
        // The f32 nearest pi is a multiple of 2^-22, so its conversion is exact.
        let pi32 = std::f32::consts::PI;
        assert_eq!(to_fixed(pi32).unwrap().raw() as f64, pi32 as f64 * SCALE);
    }

    #[test]
    fn to_fixed_rejects_out_of_range() {
        assert!(to_fixed(8.0).is_err());
        assert!(to_fixed(-8.0).is_err());
        assert!(to_fixed(f32::NAN).is_err());
        assert!(to_fixed(f32::INFINITY).is_err());
        // Below 8 but rounds up to 2^31.
        assert!(to_fixed_f64(8.0 - 2f64.powi(-30)).is_err());
        assert_eq!(
            to_fixed(7.999_999_5).unwrap().raw(),
            (7.999_999_5f32 as f64 * SCALE) as i32
        );
    }

    #[test]
    fn to_fixed_rounds_half_to_even() {
        let half_step = 2f64.powi(-29);
        assert_eq!(to_fixed_f64(half_step).unwrap().raw(), 0);
        assert_eq!(to_fixed_f64(3.0 * half_step).unwrap().raw(), 2);
        assert_eq!(to_fixed_f64(-3.0 * half_step).unwrap().raw(), -2);
    }

    #[test]
    fn to_float_examples() {
        assert_eq!(to_float(FixedQ3_28::from_raw(1 << 28)), 1.0);
        assert_eq!(to_float(FixedQ3_28::from_raw(1 << 26)), 0.25);
        let pi = to_fixed_f64(std::f64::consts::PI).unwrap();
        assert!(
            (to_float(pi) as f64 - std::f64::consts::PI).abs() <= 2f64.powi(-28) + 2f64.powi(-23)
        );
        assert!((pi.to_f64() - std::f64::consts::PI).abs() <= 2f64.powi(-28));
    }

    #[test]
    fn add_sub_examples() {
        assert_eq!(fixed_add(fx(1.0), fx(2.0)).unwrap(), fx(3.0));
        let x = fx(1.234);
        assert_eq!(fixed_add(x, FixedQ3_28::ZERO).unwrap(), x);
        assert!(matches!(
            fixed_add(fx(7.9), fx(0.2)),
            Err(Error::Overflow(_))
        ));
        assert!(fixed_sub(fx(-7.9), fx(0.2)).is_err());
        assert_eq!(fixed_sub(fx(1.0), fx(0.25)).unwrap(), fx(0.75));
    }

    #[test]
    #[should_panic(expected = "overflowed")]
    fn operator_overflow_panics() {
        let _ = fx(7.9) + fx(0.2);
    }

    #[test]
    fn shift_examples() {
        assert_eq!(fixed_shift(fx(1.0), 2), fx(0.25));
        let x = fx(-3.3);
        assert_eq!(fixed_shift(x, 0), x);
        assert_eq!(fixed_shift(fx(-1.0), 1), fx(-0.5));
        // Two's complement: -1 raw >> anything stays -1 (floor, not truncation).
        assert_eq!(fixed_shift(FixedQ3_28::from_raw(-1), 5).raw(), -1);
        assert_eq!(fixed_shift(FixedQ3_28::from_raw(-3), 1).raw(), -2);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(fixed_mul(fx(2.0), fx(1.5)).unwrap(), fx(3.0));
        assert_eq!(fixed_mul(fx(0.5), fx(0.5)).unwrap(), fx(0.25));
        let x = fx(-2.75);
        assert_eq!(fixed_mul(x, FixedQ3_28::ONE).unwrap(), x);
        assert!(fixed_mul(fx(3.0), fx(3.0)).is_err());
        // Truncation toward -inf on negative products.
        assert_eq!(
            fixed_mul(FixedQ3_28::from_raw(-1), fx(0.5)).unwrap().raw(),
            -1
        );
    }

    #[test]
    fn ldexp_examples() {
        assert_eq!(ldexp32(1.5, 3), 12.0);
        assert_eq!(ldexp32(0.1, 0), 0.1);
        assert_eq!(ldexp32(1.0, 200), f32::INFINITY);
        assert_eq!(ldexp32(-1.0, 200), f32::NEG_INFINITY);
        assert_eq!(ldexp32(1.0, -149), f32::from_bits(1));
        assert_eq!(ldexp32(1.0, -150), 0.0); // tie rounds to even (zero)
        assert_eq!(ldexp32(1.5, -150), f32::from_bits(1));
        assert_eq!(ldexp32(-1.0, -200).to_bits(), (-0.0f32).to_bits());
        assert_eq!(ldexp32(f32::from_bits(1), 149), 1.0);
        assert!(ldexp32(f32::NAN, 3).is_nan());
        assert_eq!(ldexp32(f32::INFINITY, -1000), f32::INFINITY);
        assert_eq!(ldexp32(f32::MAX, i32::MIN), 0.0);
        assert_eq!(ldexp32(f32::MIN_POSITIVE, i32::MAX), f32::INFINITY);
    }

    #[test]
    fn split_examples() {
        let p = split_float(8.0).unwrap();
        assert_eq!((p.sign, p.exponent, p.mantissa), (1, 3, 1.0));
        let p = split_float(1.0).unwrap();
        assert_eq!((p.sign, p.exponent, p.mantissa), (1, 0, 1.0));
        let p = split_float(6.0).unwrap();
        assert_eq!((p.sign, p.exponent, p.mantissa), (1, 2, 1.5));
        let p = split_float(f32::from_bits(3)).unwrap();
        assert!(p.subnormal);
        assert_eq!((p.exponent, p.mantissa), (-148, 1.5));
        for bad in [0.0, -1.0, f32::NAN, f32::INFINITY] {
            assert!(split_float(bad).is_err());
        }
    }

    #[test]
    fn conversions_are_not_multiplications() {
        let (_, counts) = with_counting(|| to_fixed(1.25).unwrap());
        assert_eq!(counts.multiplications(), 0);
        assert_eq!(counts.ldexp_op, 1);
    }

    proptest! {
        #[test]
        fn round_trip_within_half_step(x in -7.99f32..7.99f32) {
            let back = to_float(to_fixed(x).unwrap());
            prop_assert!((back as f64 - x as f64).abs() <= 2f64.powi(-28));
        }

        #[test]
        fn shift_matches_scaled_conversion(raw in any::<i32>(), i in 0u32..=20) {
            let a = FixedQ3_28::from_raw(raw);
            let shifted = fixed_shift(a, i);
            let via_float = (a.to_f64() * 2f64.powi(-(i as i32)) * SCALE).round_ties_even() as i64;
            prop_assert!((shifted.raw() as i64 - via_float).abs() <= 1);
        }

        #[test]
        fn split_reconstructs_exactly(bits in 0x0080_0000u32..0x7f80_0000u32) {
            let x = f32::from_bits(bits);
            let p = split_float(x).unwrap();
            prop_assert!((1.0..2.0).contains(&p.mantissa));
            prop_assert_eq!(p.reconstruct().to_bits(), bits);
        }
    }
}
