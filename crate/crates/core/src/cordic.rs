//! CORDIC rotation and vectoring in Q3.28, and the function pipelines built
//! on top of them.
//!
//! The iteration loops use shifts, adds and angle-table reads only. Gain is
//! compensated by starting rotation from `(inv_gain, 0)`.

use crate::costmodel::{range_phase, tally, Op};
use crate::error::{Error, Result};
use crate::fixedpoint::{
    fixed_add, fixed_sub, ldexp32, split_float, to_fixed, to_fixed_f64, to_float, FixedQ3_28,
    FRAC_BITS,
};
use crate::rangeext::{
    angle_to_fixed, exp_extend, exp_split, log_extend, quadrant_adjust, quadrant_reduce,
    reduce_2pi, sqrt_extend, sqrt_split, Trig,
};

/// Shift indices executed twice in hyperbolic mode.
pub const HYPERBOLIC_REPEATS: [u32; 2] = [4, 13];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CordicMode {
    Circular,
    Hyperbolic,
    Linear,
}

impl CordicMode {
    /// Largest `n_iter` for which the rounded angle table is still strictly
    /// decreasing.
    pub fn max_iterations(self) -> u32 {
        match self {
            CordicMode::Circular => 30,
            CordicMode::Hyperbolic | CordicMode::Linear => 29,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CordicMode::Circular => "circular",
            CordicMode::Hyperbolic => "hyperbolic",
            CordicMode::Linear => "linear",
        }
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            CordicMode::Circular => 0,
            CordicMode::Hyperbolic => 1,
            CordicMode::Linear => 2,
        }
    }

    pub(crate) fn from_tag(tag: i64) -> Option<Self> {
        match tag {
            0 => Some(CordicMode::Circular),
            1 => Some(CordicMode::Hyperbolic),
            2 => Some(CordicMode::Linear),
            _ => None,
        }
    }

    fn angle(self, i: u32) -> f64 {
        let t = 2f64.powi(-(i as i32));
        match self {
            CordicMode::Circular => t.atan(),
            CordicMode::Hyperbolic => t.atanh(),
            CordicMode::Linear => t,
        }
    }

    /// Per-iteration factor that undoes the vector stretch.
    fn compensation(self, i: u32) -> f64 {
        let t = 4f64.powi(-(i as i32));
        match self {
            CordicMode::Circular => 1.0 / (1.0 + t).sqrt(),
            CordicMode::Hyperbolic => 1.0 / (1.0 - t).sqrt(),
            CordicMode::Linear => 1.0,
        }
    }
}

/// Precomputed angles and gain for one mode and iteration range.
#[derive(Debug, Clone, PartialEq)]
pub struct CordicTables {
    mode: CordicMode,
    n_iter: u32,
    skip: u32,
    angles: Vec<FixedQ3_28>,
    inv_gain: FixedQ3_28,
    inv_gain_exact: f64,
    repeat_schedule: Vec<u32>,
    /// (shift, raw angle) in execution order, repeats included.
    steps: Vec<(u32, i32)>,
    /// Sum of executed angles, raw.
    reach: i64,
}

/// Vector and residual angle between iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CordicState {
    pub x: FixedQ3_28,
    pub y: FixedQ3_28,
    pub theta: FixedQ3_28,
}

pub fn generate_cordic_tables(mode: CordicMode, n_iter: u32) -> Result<CordicTables> {
    CordicTables::with_skip(mode, 0, n_iter)
}

impl CordicTables {
    /// Tables for the iterations left after the first `skip` are replaced
    /// by a lookup: shifts `skip..n_iter` (circular, linear) or
    /// `skip+1..=n_iter` (hyperbolic).
    pub fn with_skip(mode: CordicMode, skip: u32, n_iter: u32) -> Result<Self> {
        let max = mode.max_iterations();
        if n_iter == 0 || n_iter > max {
            return Err(Error::config(format!(
                "{} CORDIC needs 1..={max} iterations, got {n_iter}",
                mode.name()
            )));
        }
        if skip >= n_iter {
            return Err(Error::config(format!(
                "skip {skip} must be below n_iter {n_iter}"
            )));
        }
        let indices: Vec<u32> = match mode {
            CordicMode::Hyperbolic => (skip + 1..=n_iter).collect(),
            _ => (skip..n_iter).collect(),
        };
        let repeat_schedule: Vec<u32> = match mode {
            CordicMode::Hyperbolic => HYPERBOLIC_REPEATS
                .iter()
                .copied()
                .filter(|r| indices.contains(r))
                .collect(),
            _ => Vec::new(),
        };

        let mut angles = Vec::with_capacity(indices.len());
        let mut steps = Vec::with_capacity(indices.len() + repeat_schedule.len());
        let mut inv_gain_exact = 1.0;
        for &i in &indices {
            let a = to_fixed_f64(mode.angle(i))?;
            angles.push(a);
            let times = if repeat_schedule.contains(&i) { 2 } else { 1 };
            for _ in 0..times {
                steps.push((i, a.raw()));
                inv_gain_exact *= mode.compensation(i);
            }
        }
        let reach = steps.iter().map(|&(_, a)| a as i64).sum();
        Ok(CordicTables {
            mode,
            n_iter,
            skip,
            angles,
            inv_gain: to_fixed_f64(inv_gain_exact)?,
            inv_gain_exact,
            repeat_schedule,
            steps,
            reach,
        })
    }

    pub fn mode(&self) -> CordicMode {
        self.mode
    }

    pub fn n_iter(&self) -> u32 {
        self.n_iter
    }

    pub fn skip(&self) -> u32 {
        self.skip
    }

    /// One rounded angle per distinct shift index.
    pub fn angles(&self) -> &[FixedQ3_28] {
        &self.angles
    }

    pub fn inv_gain(&self) -> FixedQ3_28 {
        self.inv_gain
    }

    /// The unrounded gain compensation product.
    pub fn inv_gain_exact(&self) -> f64 {
        self.inv_gain_exact
    }

    pub fn repeat_schedule(&self) -> &[u32] {
        &self.repeat_schedule
    }

    /// Executed iterations, repeats included.
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    /// Largest |θ| rotation mode can drive to zero.
    pub fn convergence_range(&self) -> f64 {
        self.reach as f64 / (1u64 << FRAC_BITS) as f64
    }

    pub fn angle_table_bytes(&self) -> usize {
        self.angles.len() * 4
    }

    /// Angle table plus the stored gain.
    pub fn memory_bytes(&self) -> usize {
        self.angle_table_bytes() + 4
    }

    /// Offset c with √((m+c)² − (m−c)²) · gain = √m for hyperbolic vectoring.
    fn sqrt_offset(&self) -> FixedQ3_28 {
        let c = self.inv_gain_exact * self.inv_gain_exact / 4.0;
        match to_fixed_f64(c) {
            Ok(c) => c,
            Err(_) => unreachable!("sqrt offset {c} fits Q3.28"),
        }
    }

    fn tally_steps(&self, n: usize) {
        let n = n as u64;
        match self.mode {
            CordicMode::Linear => {
                tally(Op::IntShift, n);
                tally(Op::IntAdd, 2 * n);
            }
            _ => {
                tally(Op::IntShift, 2 * n);
                tally(Op::IntAdd, 3 * n);
            }
        }
        tally(Op::Lookup, n);
    }

    /// Rotation iterations without a convergence check.
    pub(crate) fn rotate_unchecked(&self, s: CordicState) -> CordicState {
        let (mut x, mut y, mut z) = (s.x.raw(), s.y.raw(), s.theta.raw());
        for &(i, a) in &self.steps {
            let up = z >= 0;
            let (dx, dy) = (y >> i, x >> i);
            match self.mode {
                CordicMode::Circular => {
                    x = if up { sub(x, dx) } else { add(x, dx) };
                    y = if up { add(y, dy) } else { sub(y, dy) };
                }
                CordicMode::Hyperbolic => {
                    x = if up { add(x, dx) } else { sub(x, dx) };
                    y = if up { add(y, dy) } else { sub(y, dy) };
                }
                CordicMode::Linear => {
                    y = if up { add(y, dy) } else { sub(y, dy) };
                }
            }
            z = if up { sub(z, a) } else { add(z, a) };
        }
        self.tally_steps(self.steps.len());
        CordicState {
            x: FixedQ3_28::from_raw(x),
            y: FixedQ3_28::from_raw(y),
            theta: FixedQ3_28::from_raw(z),
        }
    }

    fn vector_unchecked(&self, x0: FixedQ3_28, y0: FixedQ3_28) -> CordicState {
        let (mut x, mut y, mut z) = (x0.raw(), y0.raw(), 0i32);
        for &(i, a) in &self.steps {
            let down = y >= 0;
            let (dx, dy) = (y >> i, x >> i);
            match self.mode {
                CordicMode::Circular => {
                    x = if down { add(x, dx) } else { sub(x, dx) };
                    y = if down { sub(y, dy) } else { add(y, dy) };
                }
                CordicMode::Hyperbolic => {
                    x = if down { sub(x, dx) } else { add(x, dx) };
                    y = if down { sub(y, dy) } else { add(y, dy) };
                }
                CordicMode::Linear => {
                    y = if down { sub(y, dy) } else { add(y, dy) };
                }
            }
            z = if down { add(z, a) } else { sub(z, a) };
        }
        self.tally_steps(self.steps.len());
        CordicState {
            x: FixedQ3_28::from_raw(x),
            y: FixedQ3_28::from_raw(y),
            theta: FixedQ3_28::from_raw(z),
        }
    }

    fn check_reach(&self, theta: FixedQ3_28) -> Result<()> {
        if (theta.raw() as i64).abs() > self.reach {
            let r = self.convergence_range();
            return Err(Error::range(theta.to_f64(), -r, r));
        }
        Ok(())
    }
}

fn add(a: i32, b: i32) -> i32 {
    a.checked_add(b).expect("CORDIC state left Q3.28")
}

fn sub(a: i32, b: i32) -> i32 {
    a.checked_sub(b).expect("CORDIC state left Q3.28")
}

/// Rotates `(inv_gain, 0)` by θ. Circular mode gives (cos θ, sin θ),
/// hyperbolic (cosh θ, sinh θ), linear (1, θ).
pub fn cordic_rotate(tables: &CordicTables, theta: FixedQ3_28) -> Result<(FixedQ3_28, FixedQ3_28)> {
    let start = CordicState {
        x: tables.inv_gain,
        y: FixedQ3_28::ZERO,
        theta,
    };
    let s = cordic_rotate_from(tables, start)?;
    Ok((s.x, s.y))
}

/// Runs rotation mode from an arbitrary state. No gain is applied.
pub fn cordic_rotate_from(tables: &CordicTables, state: CordicState) -> Result<CordicState> {
    tables.check_reach(state.theta)?;
    Ok(tables.rotate_unchecked(state))
}

/// Drives y to zero and returns (x_n, θ_n).
///
/// θ_n is atan(y0/x0), atanh(y0/x0) or y0/x0 by mode. x_n carries the
/// uncompensated gain: √(x0² ± y0²) / inv_gain_exact for the circular and
/// hyperbolic modes, x0 for linear.
pub fn cordic_vector(
    tables: &CordicTables,
    x0: FixedQ3_28,
    y0: FixedQ3_28,
) -> Result<(FixedQ3_28, FixedQ3_28)> {
    let (x, y) = (x0.to_f64(), y0.to_f64());
    let reach = tables.convergence_range();
    let angle = if x > 0.0 {
        match tables.mode {
            CordicMode::Circular => Some((y / x).atan()),
            CordicMode::Hyperbolic if y.abs() < x => Some((y / x).atanh()),
            CordicMode::Hyperbolic => None,
            CordicMode::Linear => Some(y / x),
        }
    } else {
        None
    };
    match angle {
        Some(a) if a.abs() <= reach => {}
        _ => return Err(Error::range(y, -x * reach, x * reach)),
    }
    let s = tables.vector_unchecked(x0, y0);
    Ok((s.x, s.theta))
}

/// Something that rotates a gain-compensated unit vector: pure CORDIC or
/// a table-seeded variant.
pub trait Rotator {
    fn mode(&self) -> CordicMode;

    /// (x, y) after rotating by θ ≥ 0.
    fn rotate(&self, theta: FixedQ3_28) -> Result<(FixedQ3_28, FixedQ3_28)>;
}

impl Rotator for CordicTables {
    fn mode(&self) -> CordicMode {
        self.mode
    }

    fn rotate(&self, theta: FixedQ3_28) -> Result<(FixedQ3_28, FixedQ3_28)> {
        cordic_rotate(self, theta)
    }
}

fn expect_mode<R: Rotator + ?Sized>(r: &R, mode: CordicMode, function: &str) -> Result<()> {
    if r.mode() == mode {
        Ok(())
    } else {
        Err(Error::config(format!(
            "{function} needs {} tables, got {}",
            mode.name(),
            r.mode().name()
        )))
    }
}

/// Steps 1 to 5 of the trig pipeline for x ≥ 0: (cos x, sin x) in Q3.28.
fn trig_pair<R: Rotator + ?Sized>(r: &R, x: f32) -> Result<(FixedQ3_28, FixedQ3_28)> {
    let theta = angle_to_fixed(reduce_2pi(x));
    let reduced = quadrant_reduce(theta);
    let (c, s) = r.rotate(reduced.angle)?;
    Ok((
        quadrant_adjust(c, &reduced, Trig::Cos),
        quadrant_adjust(s, &reduced, Trig::Sin),
    ))
}

fn negate(y: f32) -> f32 {
    range_phase(|| tally(Op::IntAdd, 1));
    -y
}

pub fn sin_with<R: Rotator + ?Sized>(r: &R, x: f32) -> Result<f32> {
    expect_mode(r, CordicMode::Circular, "sin")?;
    if !x.is_finite() {
        return Ok(f32::NAN);
    }
    if x.is_sign_negative() {
        return sin_with(r, -x).map(negate);
    }
    let (_, s) = trig_pair(r, x)?;
    Ok(to_float(s))
}

pub fn cos_with<R: Rotator + ?Sized>(r: &R, x: f32) -> Result<f32> {
    expect_mode(r, CordicMode::Circular, "cos")?;
    if !x.is_finite() {
        return Ok(f32::NAN);
    }
    let (c, _) = trig_pair(r, x.abs())?;
    Ok(to_float(c))
}

/// sin/cos with one division. A cosine that rounds to zero in Q3.28 gives
/// a signed infinity.
pub fn tan_with<R: Rotator + ?Sized>(r: &R, x: f32) -> Result<f32> {
    expect_mode(r, CordicMode::Circular, "tan")?;
    if !x.is_finite() {
        return Ok(f32::NAN);
    }
    if x.is_sign_negative() {
        return tan_with(r, -x).map(negate);
    }
    let (c, s) = trig_pair(r, x)?;
    if c.raw() == 0 {
        return Ok(if s.raw() >= 0 {
            f32::INFINITY
        } else {
            f32::NEG_INFINITY
        });
    }
    tally(Op::FloatAdd, 2);
    tally(Op::FloatDiv, 1);
    Ok((s.raw() as f64 / c.raw() as f64) as f32)
}

/// (cosh x, sinh x) for finite x ≥ 0.
///
/// Up to 1 the rotation is direct. Beyond that e^±x is built from an
/// exponent split and the two are averaged.
fn hyperbolic_pair<R: Rotator + ?Sized>(r: &R, x: f32) -> Result<(f32, f32)> {
    if x <= 1.0 {
        let (c, s) = r.rotate(to_fixed(x)?)?;
        return Ok((to_float(c), to_float(s)));
    }
    let split = exp_split(x);
    let (c, s) = r.rotate(angle_to_fixed(split.natural_frac()))?;
    let up = exp_extend(to_float(fixed_add(c, s)?), split.int_pow2);
    let down = exp_extend(to_float(fixed_sub(c, s)?), -split.int_pow2);
    Ok(range_phase(|| {
        tally(Op::FloatAdd, 2);
        (ldexp32(up + down, -1), ldexp32(up - down, -1))
    }))
}

pub fn sinh_with<R: Rotator + ?Sized>(r: &R, x: f32) -> Result<f32> {
    expect_mode(r, CordicMode::Hyperbolic, "sinh")?;
    if !x.is_finite() {
        return Ok(x);
    }
    if x.is_sign_negative() {
        return sinh_with(r, -x).map(negate);
    }
    hyperbolic_pair(r, x).map(|(_, s)| s)
}

pub fn cosh_with<R: Rotator + ?Sized>(r: &R, x: f32) -> Result<f32> {
    expect_mode(r, CordicMode::Hyperbolic, "cosh")?;
    if !x.is_finite() {
        return Ok(x.abs());
    }
    hyperbolic_pair(r, x.abs()).map(|(c, _)| c)
}

/// Inputs beyond this saturate to ±1; tanh(10) is 1 in single precision.
const TANH_SATURATION: f32 = 10.0;

pub fn tanh_with<R: Rotator + ?Sized>(r: &R, x: f32) -> Result<f32> {
    expect_mode(r, CordicMode::Hyperbolic, "tanh")?;
    if x.is_nan() {
        return Ok(x);
    }
    if x.is_sign_negative() {
        return tanh_with(r, -x).map(negate);
    }
    if x > TANH_SATURATION {
        return Ok(1.0);
    }
    let (c, s) = hyperbolic_pair(r, x)?;
    tally(Op::FloatDiv, 1);
    Ok(s / c)
}

/// e^x = (cosh t + sinh t)·2^i with x·log2(e) = i + t/ln 2.
pub fn exp_with<R: Rotator + ?Sized>(r: &R, x: f32) -> Result<f32> {
    expect_mode(r, CordicMode::Hyperbolic, "exp")?;
    if x.is_nan() {
        return Ok(x);
    }
    if x.is_infinite() {
        return Ok(if x > 0.0 { x } else { 0.0 });
    }
    let split = exp_split(x);
    let (c, s) = r.rotate(angle_to_fixed(split.natural_frac()))?;
    Ok(exp_extend(to_float(fixed_add(c, s)?), split.int_pow2))
}

pub fn cordic_sin(tables: &CordicTables, x: f32) -> Result<f32> {
    sin_with(tables, x)
}

pub fn cordic_cos(tables: &CordicTables, x: f32) -> Result<f32> {
    cos_with(tables, x)
}

pub fn cordic_tan(tables: &CordicTables, x: f32) -> Result<f32> {
    tan_with(tables, x)
}

pub fn cordic_sinh(tables: &CordicTables, x: f32) -> Result<f32> {
    sinh_with(tables, x)
}

pub fn cordic_cosh(tables: &CordicTables, x: f32) -> Result<f32> {
    cosh_with(tables, x)
}

pub fn cordic_tanh(tables: &CordicTables, x: f32) -> Result<f32> {
    tanh_with(tables, x)
}

pub fn cordic_exp(tables: &CordicTables, x: f32) -> Result<f32> {
    exp_with(tables, x)
}

/// ln x = e·ln 2 + 2·atanh((m−1)/(m+1)) for x = m·2^e, m ∈ [1, 2).
pub fn cordic_log(tables: &CordicTables, x: f32) -> Result<f32> {
    expect_mode(tables, CordicMode::Hyperbolic, "log")?;
    let parts = split_float(x).map_err(|_| Error::Domain {
        function: "log",
        value: x as f64,
    })?;
    let m = to_fixed(parts.mantissa)?;
    let (_, theta) = cordic_vector(
        tables,
        fixed_add(m, FixedQ3_28::ONE)?,
        fixed_sub(m, FixedQ3_28::ONE)?,
    )?;
    let ln_m = fixed_add(theta, theta)?;
    Ok(log_extend(&parts, to_float(ln_m)))
}

/// √x from hyperbolic vectoring on (m + c, m − c), where c cancels the
/// vectoring gain, followed by the exponent extension.
pub fn cordic_sqrt(tables: &CordicTables, x: f32) -> Result<f32> {
    expect_mode(tables, CordicMode::Hyperbolic, "sqrt")?;
    let parts = split_float(x).map_err(|_| Error::Domain {
        function: "sqrt",
        value: x as f64,
    })?;
    let m = to_fixed(sqrt_split(&parts).mantissa)?;
    let c = tables.sqrt_offset();
    let (root, _) = cordic_vector(tables, fixed_add(m, c)?, fixed_sub(m, c)?)?;
    Ok(sqrt_extend(&parts, to_float(root)))
}

/// y0 + x0·θ by linear rotation: a shift-add multiply.
pub fn linear_multiply(
    tables: &CordicTables,
    x0: FixedQ3_28,
    theta: FixedQ3_28,
) -> Result<FixedQ3_28> {
    expect_mode(tables, CordicMode::Linear, "linear_multiply")?;
    let s = cordic_rotate_from(
        tables,
        CordicState {
            x: x0,
            y: FixedQ3_28::ZERO,
            theta,
        },
    )?;
    Ok(s.y)
}

/// y0/x0 by linear vectoring.
pub fn linear_divide(tables: &CordicTables, y0: FixedQ3_28, x0: FixedQ3_28) -> Result<FixedQ3_28> {
    expect_mode(tables, CordicMode::Linear, "linear_divide")?;
    cordic_vector(tables, x0, y0).map(|(_, q)| q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::with_counting;
    use rand_core::{RngCore, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn fx(x: f64) -> FixedQ3_28 {
        to_fixed_f64(x).unwrap()
    }

    fn circ(n: u32) -> CordicTables {
        generate_cordic_tables(CordicMode::Circular, n).unwrap()
    }

    fn hyp(n: u32) -> CordicTables {
        generate_cordic_tables(CordicMode::Hyperbolic, n).unwrap()
    }

    fn uniform(rng: &mut Xoshiro256PlusPlus, lo: f64, hi: f64) -> f64 {
        let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    #[test]
    fn table_examples() {
        let t = circ(1);
        assert_eq!(t.angles(), &[fx(FRAC_PI_4)]);
        assert_eq!(t.angles()[0].raw(), 210_828_714);

        // ∏ 1/√(1+2^-2i), i = 0..23, to 18 digits.
        let t = circ(24);
        assert!((t.inv_gain().to_f64() - 0.607_252_935_008_882_7).abs() < 2f64.powi(-26));

        let t = hyp(5);
        assert_eq!(t.angles()[0].raw(), 147_453_245);
        assert_eq!(t.repeat_schedule(), &[4]);
        assert_eq!(t.iterations(), 6);
        assert_eq!(hyp(20).repeat_schedule(), &[4, 13]);
    }

    #[test]
    fn table_limits() {
        for mode in [
            CordicMode::Circular,
            CordicMode::Hyperbolic,
            CordicMode::Linear,
        ] {
            assert!(generate_cordic_tables(mode, 0).is_err());
            assert!(generate_cordic_tables(mode, mode.max_iterations() + 1).is_err());
            let t = generate_cordic_tables(mode, mode.max_iterations()).unwrap();
            assert!(t.angles().windows(2).all(|w| w[0] > w[1]), "{mode:?}");
        }
    }

    #[test]
    fn rotate_examples() {
        let t = circ(28);
        let (c, s) = cordic_rotate(&t, FixedQ3_28::ZERO).unwrap();
        assert!((c.to_f64() - 1.0).abs() < 2f64.powi(-20));
        assert!(s.to_f64().abs() < 2f64.powi(-20));

        let (_, s) = cordic_rotate(&t, fx(FRAC_PI_2)).unwrap();
        assert!((s.to_f64() - 1.0).abs() < 1e-7);

        let (c, s) = cordic_rotate(&t, fx(1.0)).unwrap();
        assert!((c.to_f64() - 1f64.cos()).abs() < 1e-7);
        assert!((s.to_f64() - 1f64.sin()).abs() < 1e-7);

        assert!(cordic_rotate(&t, fx(1.75)).is_err());
        assert!(cordic_rotate(&circ(2), fx(1.3)).is_err());
    }

    #[test]
    fn vector_examples() {
        let t = hyp(28);
        let (_, theta) = cordic_vector(&t, fx(1.5), FixedQ3_28::ZERO).unwrap();
        assert!(theta.to_f64().abs() < 2f64.powi(-20));

        // √((w+¼)² − (w−¼)²) = √w
        let w = 0.5;
        let (x, _) = cordic_vector(&t, fx(w + 0.25), fx(w - 0.25)).unwrap();
        assert!((x.to_f64() * t.inv_gain_exact() - w.sqrt()).abs() < 1e-7);

        let (_, theta) = cordic_vector(&t, fx(1.25), fx(0.75)).unwrap();
        assert!((theta.to_f64() - 0.6f64.atanh()).abs() < 1e-7);

        assert!(cordic_vector(&t, fx(1.0), fx(1.0)).is_err());
        assert!(cordic_vector(&t, fx(-1.0), fx(0.0)).is_err());
    }

    #[test]
    fn linear_mode() {
        let t = generate_cordic_tables(CordicMode::Linear, 29).unwrap();
        let p = linear_multiply(&t, fx(1.5), fx(0.75)).unwrap();
        assert!((p.to_f64() - 1.125).abs() < 1e-7);
        let q = linear_divide(&t, fx(0.75), fx(1.5)).unwrap();
        assert!((q.to_f64() - 0.5).abs() < 1e-7);
    }

    #[test]
    fn loops_do_not_multiply() {
        let t = circ(28);
        let (_, counts) = with_counting(|| cordic_rotate(&t, fx(0.7)).unwrap());
        assert_eq!(counts.int_mul + counts.float_mul + counts.float_div, 0);
        assert_eq!(counts.int_shift, 56);
        assert_eq!(counts.int_add, 84);
        assert_eq!(counts.lut_lookup, 28);

        let h = hyp(28);
        let (_, counts) = with_counting(|| cordic_vector(&h, fx(1.25), fx(0.75)).unwrap());
        assert_eq!(counts.int_mul + counts.float_mul, 0);
        assert_eq!(counts.lut_lookup, 30);
    }

    #[test]
    fn pipeline_examples() {
        let t = circ(28);
        assert_eq!(cordic_sin(&t, 0.0).unwrap().abs(), 0.0);
        assert!(cordic_sin(&t, PI as f32).unwrap().abs() <= 1e-6);
        assert!((cordic_sin(&t, 2.5).unwrap() as f64 - 2.5f64.sin()).abs() < 1e-7);
        assert!((cordic_cos(&t, 4.0).unwrap() as f64 - 4f64.cos()).abs() < 1e-7);
        assert!((cordic_tan(&t, 1.0).unwrap() as f64 - 1f64.tan()).abs() < 1e-6);
        assert!(cordic_sin(&t, f32::NAN).unwrap().is_nan());

        let h = hyp(28);
        assert!((cordic_cosh(&h, 0.0).unwrap() - 1.0).abs() < 1e-7);
        assert!(cordic_sinh(&h, 0.0).unwrap().abs() < 1e-7);
        assert!((cordic_exp(&h, 0.0).unwrap() - 1.0).abs() < 1e-7);
        assert!((cordic_tanh(&h, 0.5).unwrap() as f64 - 0.5f64.tanh()).abs() < 1e-7);
        assert_eq!(cordic_exp(&h, 200.0).unwrap(), f32::INFINITY);
        assert_eq!(cordic_exp(&h, -200.0).unwrap(), 0.0);
        let e = cordic_exp(&h, 3.3).unwrap() as f64;
        assert!((e / 3.3f32.exp() as f64 - 1.0).abs() < 1e-6);
        let s = cordic_sinh(&h, 3.0).unwrap() as f64;
        assert!((s / 3f64.sinh() - 1.0).abs() < 1e-6);

        assert!(cordic_log(&h, 1.0).unwrap().abs() < 1e-7);
        assert!((cordic_log(&h, 8.0).unwrap() as f64 - 3.0 * 2f64.ln()).abs() < 1e-7);
        assert!((cordic_sqrt(&h, 2.25).unwrap() - 1.5).abs() < 1e-7);
        assert!((cordic_sqrt(&h, 8.0).unwrap() as f64 - 8f64.sqrt()).abs() < 1e-6);
        for bad in [0.0, -1.0, f32::NAN, f32::INFINITY] {
            assert!(matches!(cordic_log(&h, bad), Err(Error::Domain { .. })));
            assert!(matches!(cordic_sqrt(&h, bad), Err(Error::Domain { .. })));
        }
        assert!(cordic_sin(&h, 1.0).is_err());
        assert!(cordic_exp(&t, 1.0).is_err());
    }

    #[test]
    fn tan_pole_is_signed_infinity() {
        let t = circ(28);
        // π/2 rounds to a Q3.28 angle whose cosine falls below one step.
        let x = (FRAC_PI_2 as f32).next_up();
        let v = cordic_tan(&t, x).unwrap();
        assert!(v.is_infinite() || v.abs() > 1e4, "tan({x}) = {v}");
    }

    #[test]
    fn error_shrinks_per_iteration() {
        // Worst case after n steps: the residual angle, at most φ_{n-1},
        // plus one rounding step per iteration.
        let bound = |n: u32| (2f64.powi(1 - n as i32)).atan() + (n as f64 + 2.0) * 2f64.powi(-28);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
        let xs: Vec<f64> = (0..4096)
            .map(|_| uniform(&mut rng, 0.0, FRAC_PI_2))
            .collect();
        for n in 8..=24 {
            let t = circ(n);
            let err = xs
                .iter()
                .map(|&x| {
                    let (_, s) = cordic_rotate(&t, fx(x)).unwrap();
                    (s.to_f64() - x.sin()).abs()
                })
                .fold(0.0, f64::max);
            assert!(err <= 2.0 * bound(n + 1), "n={n}: {err:e}");
        }
    }

    #[test]
    fn pythagorean_and_hyperbolic_identities() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
        let t = circ(24);
        for _ in 0..1024 {
            let x = uniform(&mut rng, -1.7, 1.7);
            let (c, s) = cordic_rotate(&t, fx(x)).unwrap();
            let n = c.to_f64().powi(2) + s.to_f64().powi(2);
            assert!((n - 1.0).abs() <= 1e-5, "{x}: {n}");
        }
        let h = hyp(20);
        for _ in 0..1024 {
            let x = uniform(&mut rng, -1.1, 1.1);
            let (c, s) = cordic_rotate(&h, fx(x)).unwrap();
            let n = c.to_f64().powi(2) - s.to_f64().powi(2);
            assert!((n - 1.0).abs() <= 1e-4, "{x}: {n}");
        }
    }

    #[test]
    fn rotation_preserves_norm_up_to_gain() {
        // Float shadow of the circular loop: each step scales |v| by √(1+2^-2i).
        let t = circ(24);
        let theta = 0.9f64;
        let (mut x, mut y, mut z) = (t.inv_gain_exact(), 0.0f64, theta);
        let mut gain = 1.0;
        let r0 = x.hypot(y);
        for i in 0..24 {
            let p = 2f64.powi(-i);
            let d = if z >= 0.0 { 1.0 } else { -1.0 };
            (x, y) = (x - d * y * p, y + d * x * p);
            z -= d * p.atan();
            gain *= (1.0 + p * p).sqrt();
            assert!((x.hypot(y) - r0 * gain).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetry_is_bit_exact() {
        let t = circ(28);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        for _ in 0..2000 {
            let x = uniform(&mut rng, -100.0, 100.0) as f32;
            assert_eq!(
                cordic_sin(&t, -x).unwrap().to_bits(),
                (-cordic_sin(&t, x).unwrap()).to_bits()
            );
            assert_eq!(
                cordic_cos(&t, -x).unwrap().to_bits(),
                cordic_cos(&t, x).unwrap().to_bits()
            );
        }
        assert_eq!(cordic_sin(&t, -0.0).unwrap().to_bits(), (-0.0f32).to_bits());
    }
}
