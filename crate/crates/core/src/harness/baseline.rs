//! Polynomial evaluators used as the comparison baseline.
//!
//! All arithmetic is single precision and every operation is tallied,
//! so the cost model sees the same kind of work as the table methods.

use std::f32::consts::{LN_2, LOG2_E};
use std::fmt;
use std::str::FromStr;

use crate::costmodel::{tally, Op};
use crate::error::{Error, Result};
use crate::fixedpoint::{ldexp32, split_float};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineFunction {
    Exp,
    Log,
    Sqrt,
    Cndf,
}

impl BaselineFunction {
    pub fn name(self) -> &'static str {
        match self {
            BaselineFunction::Exp => "exp",
            BaselineFunction::Log => "log",
            BaselineFunction::Sqrt => "sqrt",
            BaselineFunction::Cndf => "cndf",
        }
    }
}

impl fmt::Display for BaselineFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            BaselineFunction::Exp,
            BaselineFunction::Log,
            BaselineFunction::Sqrt,
            BaselineFunction::Cndf,
        ]
        .into_iter()
        .find(|f| f.name().eq_ignore_ascii_case(s))
        .ok_or_else(|| Error::config(format!("no polynomial baseline for {s:?}")))
    }
}

pub fn polynomial_baseline(function: BaselineFunction, x: f32) -> f32 {
    match function {
        BaselineFunction::Exp => poly_exp(x),
        BaselineFunction::Log => poly_log(x),
        BaselineFunction::Sqrt => poly_sqrt(x),
        BaselineFunction::Cndf => poly_cndf(x),
    }
}

fn mul(a: f32, b: f32) -> f32 {
    tally(Op::FloatMul, 1);
    a * b
}

fn add(a: f32, b: f32) -> f32 {
    tally(Op::FloatAdd, 1);
    a + b
}

fn div(a: f32, b: f32) -> f32 {
    tally(Op::FloatDiv, 1);
    a / b
}

/// Horner evaluation, highest coefficient first.
fn horner(coeffs: &[f32], t: f32) -> f32 {
    coeffs[1..]
        .iter()
        .fold(coeffs[0], |acc, &c| add(mul(acc, t), c))
}

const LN2_HI: f32 = 0.693_145_75;
const LN2_LO: f32 = 1.428_606_8e-6;

/// Degree-6 Taylor series on |r| ≤ ln2/2 after a two-constant reduction.
/// Truncation is below 1.3e-7 relative.
const EXP_TAYLOR: [f32; 7] = [
    1.0 / 720.0,
    1.0 / 120.0,
    1.0 / 24.0,
    1.0 / 6.0,
    0.5,
    1.0,
    1.0,
];

pub fn poly_exp(x: f32) -> f32 {
    if x.is_nan() {
        return x;
    }
    if x > 128.0 {
        return f32::INFINITY;
    }
    if x < -150.0 {
        return 0.0;
    }
    tally(Op::FloatAdd, 1);
    let k = mul(x, LOG2_E).round();
    let r = add(add(x, -mul(k, LN2_HI)), -mul(k, LN2_LO));
    ldexp32(horner(&EXP_TAYLOR, r), k as i32)
}

/// 2·atanh(s) series with s = (m-1)/(m+1), m ∈ [√½, √2).
pub fn poly_log(x: f32) -> f32 {
    if x.is_nan() || x < 0.0 {
        return f32::NAN;
    }
    if x == 0.0 {
        return f32::NEG_INFINITY;
    }
    if x.is_infinite() {
        return x;
    }
    let parts = split_float(x).expect("positive finite");
    let (mut m, mut e) = (parts.mantissa, parts.exponent);
    tally(Op::FloatAdd, 1);
    if m > std::f32::consts::SQRT_2 {
        m = ldexp32(m, -1);
        tally(Op::IntAdd, 1);
        e += 1;
    }
    let s = div(add(m, -1.0), add(m, 1.0));
    let s2 = mul(s, s);
    let p = horner(&[1.0 / 9.0, 1.0 / 7.0, 1.0 / 5.0, 1.0 / 3.0, 1.0], s2);
    let ln_m = mul(mul(2.0, s), p);
    tally(Op::FloatAdd, 1); // integer to float
    add(ln_m, mul(e as f32, LN_2))
}

/// Bit-trick reciprocal square root, three Newton steps, times x.
pub fn poly_sqrt(x: f32) -> f32 {
    if x.is_nan() || x < 0.0 {
        return f32::NAN;
    }
    if x == 0.0 || x.is_infinite() {
        return x;
    }
    tally(Op::IntShift, 1);
    tally(Op::IntAdd, 1);
    let mut y = f32::from_bits(0x5f37_59df - (x.to_bits() >> 1));
    let half = mul(0.5, x);
    for _ in 0..3 {
        y = mul(y, add(1.5, -mul(half, mul(y, y))));
    }
    mul(x, y)
}

/// Standard normal CDF coefficients, absolute error below 7.5e-8.
const AS_P: f32 = 0.231_641_9;
const AS_B: [f32; 5] = [
    1.330_274_4,
    -1.821_256,
    1.781_477_9,
    -0.356_563_78,
    0.319_381_53,
];
const INV_SQRT_2PI: f32 = 0.398_942_3;

pub fn poly_cndf(x: f32) -> f32 {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    let t = div(1.0, add(1.0, mul(AS_P, ax)));
    let pdf = mul(INV_SQRT_2PI, poly_exp(-mul(0.5, mul(ax, ax))));
    let tail = mul(pdf, mul(t, horner(&AS_B, t)));
    tally(Op::FloatAdd, 1);
    if x >= 0.0 {
        add(1.0, -tail)
    } else {
        tail
    }
}

/// Φ(x) from the complementary error function.
pub fn cndf_reference(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::with_counting;

    fn rel(a: f32, b: f64) -> f64 {
        (a as f64 - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn cndf_examples() {
        assert!((poly_cndf(0.0) - 0.5).abs() < 1e-7);
        assert!((poly_cndf(1.96) as f64 - cndf_reference(1.96)).abs() < 1e-7);
        assert!((poly_cndf(1.96) - 0.975).abs() < 1e-4);
        for i in -800..=800 {
            let x = i as f32 / 100.0;
            assert!(
                (poly_cndf(x) as f64 - cndf_reference(x as f64)).abs() < 2e-7,
                "{x}"
            );
        }
    }

    #[test]
    fn exp_within_one_micro() {
        for i in -2000..=2000 {
            let x = i as f32 / 100.0;
            assert!(rel(poly_exp(x), (x as f64).exp()) < 1e-6, "{x}");
        }
        assert_eq!(poly_exp(0.0), 1.0);
        assert_eq!(poly_exp(-1000.0), 0.0);
        assert_eq!(poly_exp(1000.0), f32::INFINITY);
    }

    #[test]
    fn log_and_sqrt() {
        for i in 1..4000 {
            let x = i as f32 / 97.0;
            assert!((poly_log(x) as f64 - (x as f64).ln()).abs() < 1e-6, "{x}");
            assert!(rel(poly_sqrt(x), (x as f64).sqrt()) < 1e-6, "{x}");
        }
        assert_eq!(poly_log(1.0), 0.0);
        assert!(poly_log(-1.0).is_nan());
        assert_eq!(poly_sqrt(0.0), 0.0);
    }

    #[test]
    fn every_multiply_is_counted() {
        let (_, c) = with_counting(|| poly_exp(1.3));
        assert_eq!(c.float_mul, 3 + 6);
        assert_eq!(c.float_add, 1 + 2 + 6);
        assert_eq!(c.ldexp_op, 1);
        let (_, c) = with_counting(|| poly_cndf(0.7));
        assert_eq!(c.float_mul, 1 + 2 + 9 + 1 + 4 + 1 + 1);
        assert_eq!(c.float_div, 1);
    }

    #[test]
    fn names() {
        assert_eq!(
            "CNDF".parse::<BaselineFunction>().unwrap(),
            BaselineFunction::Cndf
        );
        assert!("sin".parse::<BaselineFunction>().is_err());
    }
}
