//! Tables addressed by the bits of the float input.
//!
//! A positive normal float with unbiased exponent `e` and mantissa bits
//! `m` maps to address `((e − base) << mant_bits) | top mant_bits of m`.
//! The remaining mantissa bits, read as a fraction, are the interpolation
//! weight. Node density halves with each exponent step, and nothing below
//! `2^base` is covered.

use super::{llut_query_interp, FuzzyLut, LutEntries, LutKind, SpacingSpec};
use crate::costmodel::{tally, Op};
use crate::error::{Error, Result};

const MANT_BITS: u32 = 23;
const MANT_MASK: u32 = (1 << MANT_BITS) - 1;
const ONE_BITS: u32 = 0x3f80_0000;
const BIAS: i32 = 127;

pub(super) fn node(spec: &SpacingSpec, addr: usize) -> f64 {
    let mb = spec.mant_bits;
    let e = spec.base_exponent + (addr >> mb) as i32;
    let frac = (addr & ((1 << mb) - 1)) as f64 / (1u64 << mb) as f64;
    2f64.powi(e) * (1.0 + frac)
}

/// Address and fraction for `x` in the covered range, untallied.
pub(super) fn locate(spec: &SpacingSpec, len: usize, x: f32) -> (usize, f32) {
    let mb = spec.mant_bits;
    let bits = x.to_bits();
    let offset = ((spec.base_exponent + BIAS) as i64) << mb;
    let a = (bits >> (MANT_BITS - mb)) as i64 - offset;
    let cells = len as i64 - 1;
    if a >= cells {
        return (cells as usize - 1, 1.0);
    }
    let frac = f32::from_bits(ONE_BITS | ((bits << mb) & MANT_MASK)) - 1.0;
    (a.max(0) as usize, frac)
}

/// Interpolated D-LUT over `[2^base_exponent, 2^hi_exponent]`.
///
/// Each exponent contributes `2^mant_bits` cells and `exp_bits` must be
/// wide enough to index every covered exponent. A guard entry holds
/// f(2^hi_exponent).
pub fn build_dlut(
    f: impl Fn(f64) -> f64,
    exp_bits: u32,
    mant_bits: u32,
    base_exponent: i32,
    hi_exponent: i32,
) -> Result<FuzzyLut> {
    if exp_bits == 0 || exp_bits > 8 {
        return Err(Error::config(format!("exp_bits {exp_bits} outside 1..=8")));
    }
    if mant_bits == 0 || mant_bits > 20 {
        return Err(Error::config(format!(
            "mant_bits {mant_bits} outside 1..=20"
        )));
    }
    if base_exponent < 1 - BIAS || hi_exponent > BIAS || hi_exponent <= base_exponent {
        return Err(Error::config(format!(
            "exponent range [{base_exponent}, {hi_exponent}) outside normal floats"
        )));
    }
    let exponents = (hi_exponent - base_exponent) as u64;
    if exponents > 1 << exp_bits {
        return Err(Error::config(format!(
            "{exponents} exponents do not fit in {exp_bits} exponent bits"
        )));
    }
    let spec = SpacingSpec {
        kind: LutKind::D,
        p: 0.0,
        k: 0.0,
        n: 0,
        exp_bits,
        mant_bits,
        base_exponent,
    };
    let len = ((exponents as usize) << mant_bits) + 1;
    let mut values = Vec::with_capacity(len);
    for a in 0..len {
        let x = node(&spec, a);
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::Domain {
                function: "table function",
                value: x,
            });
        }
        values.push(y as f32);
    }
    tally(Op::SetupEntry, len as u64);
    FuzzyLut::from_parts(spec, LutEntries::Float(values), true, 0)
}

/// Bit-field addressing, bit-extracted fraction and a one-multiply blend.
pub fn dlut_query_interp(lut: &FuzzyLut, x: f32) -> Result<f32> {
    lut.expect(LutKind::D, true, false)?;
    lut.check(x as f64)?;
    tally(Op::IntShift, 2);
    tally(Op::IntAdd, 3);
    tally(Op::FloatAdd, 1);
    let (a, frac) = locate(&lut.spec, lut.len(), x);
    Ok(lut.blend(a, frac))
}

/// An interpolated L-LUT on `[0, 2^base)` joined to a D-LUT above.
///
/// The L part uses the density of the first D exponent, so node spacing is
/// continuous across the boundary. `x == 2^base` belongs to the D part.
#[derive(Debug, Clone, PartialEq)]
pub struct DlLut {
    low: FuzzyLut,
    high: FuzzyLut,
    boundary: f32,
}

pub fn build_dllut(
    f: impl Fn(f64) -> f64,
    exp_bits: u32,
    mant_bits: u32,
    base_exponent: i32,
    hi_exponent: i32,
) -> Result<DlLut> {
    let high = build_dlut(&f, exp_bits, mant_bits, base_exponent, hi_exponent)?;
    let boundary = 2f64.powi(base_exponent);
    let low = super::build_llut(&f, 0.0, boundary, 1 << mant_bits, true)?;
    DlLut::from_parts(low, high)
}

impl DlLut {
    pub(crate) fn from_parts(low: FuzzyLut, high: FuzzyLut) -> Result<Self> {
        if low.kind() != LutKind::L || !low.interpolated() || low.is_fixed() {
            return Err(Error::Format(
                "DL-LUT low part must be a float interpolated L-LUT".into(),
            ));
        }
        if high.kind() != LutKind::D {
            return Err(Error::Format("DL-LUT high part must be a D-LUT".into()));
        }
        let boundary = 2f64.powi(high.spec().base_exponent);
        if low.domain() != (0.0, boundary) {
            return Err(Error::Format(format!(
                "DL-LUT low part does not end at {boundary}"
            )));
        }
        let function_tag = high.function_tag();
        Ok(DlLut {
            low: low.with_function_tag(function_tag),
            high,
            boundary: boundary as f32,
        })
    }

    pub fn low(&self) -> &FuzzyLut {
        &self.low
    }

    pub fn high(&self) -> &FuzzyLut {
        &self.high
    }

    pub fn len(&self) -> usize {
        self.low.len() + self.high.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn domain(&self) -> (f64, f64) {
        (0.0, self.high.domain().1)
    }

    pub fn function_tag(&self) -> u8 {
        self.high.function_tag()
    }

    pub fn with_function_tag(self, tag: u8) -> Self {
        DlLut {
            low: self.low.with_function_tag(tag),
            high: self.high.with_function_tag(tag),
            boundary: self.boundary,
        }
    }

    /// Both parts, each with its own parameter block.
    pub fn memory_bytes(&self) -> usize {
        self.low.memory_bytes() + self.high.memory_bytes()
    }

    pub fn query(&self, x: f32) -> Result<f32> {
        dllut_query_interp(self, x)
    }
}

pub fn dllut_query_interp(lut: &DlLut, x: f32) -> Result<f32> {
    tally(Op::IntAdd, 1);
    if x < lut.boundary {
        llut_query_interp(&lut.low, x)
    } else {
        dlut_query_interp(&lut.high, x)
    }
}
