//! Range reduction before a kernel and range extension after it.
//!
//! Reductions run in double precision on the host side of each call, but
//! their ops are still tallied (under the range phase) at single-precision
//! weight so reports can separate them from kernel cost.

use std::f64::consts::{LN_2, LOG2_E, TAU};

use crate::costmodel::{range_phase, tally, Op};
use crate::fixedpoint::{fixed_sub, ldexp32, to_fixed_f64, FixedQ3_28, FloatParts};

const INV_TAU: f64 = 1.0 / TAU;

/// Which trig function a quadrant adjustment is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Sin,
    Cos,
}

/// An angle folded into [0, π/2] plus what is needed to undo the fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedAngle {
    pub angle: FixedQ3_28,
    /// 0..=3, the quadrant of the original angle in [0, 2π).
    pub quadrant: u8,
    /// Sine changes sign (quadrants 2 and 3).
    pub sign_flip: bool,
}

/// x mod 2π in [0, 2π), computed in double precision.
///
/// Accurate to about 1e-10 for |x| up to 1e6; the error grows linearly with
/// |x| and exceeds float resolution past roughly 2^40.
pub fn reduce_2pi(x: f32) -> f64 {
    range_phase(|| {
        tally(Op::FloatMul, 2);
        tally(Op::FloatAdd, 2);
        let x = x as f64;
        let turns = (x * INV_TAU).floor();
        let r = turns.mul_add(-TAU, x);
        if r < 0.0 {
            0.0
        } else if r >= TAU {
            r - TAU
        } else {
            r
        }
    })
}

// round(v·2^28) for π/2, π, 3π/2 and 2π.
const HALF_PI_Q: FixedQ3_28 = FixedQ3_28::from_raw(421_657_428);
const PI_Q: FixedQ3_28 = FixedQ3_28::from_raw(843_314_857);
const THREE_HALF_PI_Q: FixedQ3_28 = FixedQ3_28::from_raw(1_264_972_285);
const TWO_PI_Q: FixedQ3_28 = FixedQ3_28::from_raw(1_686_629_713);

/// Folds θ ∈ [0, 2π) into [0, π/2] using the supplementary and
/// complementary identities (no sine/cosine swap).
pub fn quadrant_reduce(theta: FixedQ3_28) -> ReducedAngle {
    range_phase(|| {
        let (quadrant, angle) = if theta < HALF_PI_Q {
            (0, Ok(theta))
        } else if theta < PI_Q {
            (1, fixed_sub(PI_Q, theta))
        } else if theta < THREE_HALF_PI_Q {
            (2, fixed_sub(theta, PI_Q))
        } else {
            (3, fixed_sub(TWO_PI_Q, theta))
        };
        let angle = match angle {
            Ok(a) => a,
            Err(_) => unreachable!("quadrant fold of an in-range angle"),
        };
        // Clamp the at most one-step overshoot from rounding at 2π.
        let angle = angle.max(FixedQ3_28::ZERO);
        ReducedAngle {
            angle,
            quadrant,
            sign_flip: quadrant >= 2,
        }
    })
}

/// Maps sin or cos of the folded angle back to the original quadrant.
pub fn quadrant_adjust(value: FixedQ3_28, reduced: &ReducedAngle, which: Trig) -> FixedQ3_28 {
    let negate = match which {
        Trig::Sin => reduced.sign_flip,
        Trig::Cos => matches!(reduced.quadrant, 1 | 2),
    };
    if negate {
        range_phase(|| -value)
    } else {
        value
    }
}

/// log(x) = log(2)·exponent + log(mantissa), fused in double precision.
pub fn log_extend(parts: &FloatParts, log_mantissa: f32) -> f32 {
    range_phase(|| {
        tally(Op::FloatMul, 1);
        tally(Op::FloatAdd, 1);
        (parts.exponent as f64).mul_add(LN_2, log_mantissa as f64) as f32
    })
}

/// x·log2(e) = int_pow2 + frac, with frac ∈ [0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpSplit {
    pub int_pow2: i32,
    pub frac: f64,
}

impl ExpSplit {
    /// frac·ln 2 ∈ [0, ln 2): the argument for an e^t kernel.
    pub fn natural_frac(&self) -> f64 {
        range_phase(|| {
            tally(Op::FloatMul, 1);
            self.frac * LN_2
        })
    }
}

pub fn exp_split(x: f32) -> ExpSplit {
    range_phase(|| {
        tally(Op::FloatMul, 1);
        tally(Op::FloatAdd, 2);
        let y = x as f64 * LOG2_E;
        let i = y.floor();
        let mut frac = y - i;
        let mut int_pow2 = i.clamp(-1000.0, 1000.0) as i32;
        if frac >= 1.0 {
            frac = 0.0;
            int_pow2 += 1;
        }
        ExpSplit { int_pow2, frac }
    })
}

/// exp(x) = kernel(frac)·2^int_pow2; overflow gives +inf, underflow 0.
pub fn exp_extend(frac_result: f32, int_pow2: i32) -> f32 {
    range_phase(|| ldexp32(frac_result, int_pow2))
}

/// Mantissa folded so the exponent is even: x = mantissa·4^half_exponent,
/// mantissa ∈ [0.5, 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtSplit {
    pub mantissa: f32,
    pub half_exponent: i32,
}

pub fn sqrt_split(parts: &FloatParts) -> SqrtSplit {
    range_phase(|| {
        tally(Op::IntAdd, 1);
        if parts.exponent.rem_euclid(2) == 0 {
            SqrtSplit {
                mantissa: parts.mantissa,
                half_exponent: parts.exponent / 2,
            }
        } else {
            SqrtSplit {
                mantissa: ldexp32(parts.mantissa, -1),
                half_exponent: (parts.exponent + 1) / 2,
            }
        }
    })
}

/// sqrt(x) = sqrt(mantissa)·2^half_exponent, with an odd exponent folded
/// into the mantissa first (see [`sqrt_split`]).
pub fn sqrt_extend(parts: &FloatParts, sqrt_mantissa: f32) -> f32 {
    let half = sqrt_split(parts).half_exponent;
    range_phase(|| ldexp32(sqrt_mantissa, half))
}

/// Evaluates an odd function from a kernel defined on x ≥ 0.
///
/// Keys on the sign bit so that f(-0.0) = -f(0.0).
pub fn reflect_odd(x: f32, kernel: impl FnOnce(f32) -> f32) -> f32 {
    if x.is_sign_negative() {
        let y = kernel(-x);
        range_phase(|| tally(Op::IntAdd, 1));
        -y
    } else {
        kernel(x)
    }
}

/// GELU for negative inputs through gelu(x) = x + gelu(-x).
pub fn reflect_gelu(x: f32, kernel: impl FnOnce(f32) -> f32) -> f32 {
    if x < 0.0 {
        let y = kernel(-x);
        range_phase(|| {
            tally(Op::FloatAdd, 1);
            x + y
        })
    } else {
        kernel(x)
    }
}

/// Reference GELU, x·Φ(x) with the exact normal CDF.
pub fn gelu_reference(x: f64) -> f64 {
    0.5 * x * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Converts a reduced angle for fixed-point kernels.
pub(crate) fn angle_to_fixed(r: f64) -> FixedQ3_28 {
    match to_fixed_f64(r) {
        Ok(f) => f,
        Err(_) => unreachable!("reduced angle {r} in [0, 2π) fits Q3.28"),
    }
}
