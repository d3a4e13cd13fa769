//! Fuzzy lookup tables: the table returns f at the node nearest (or, with
//! interpolation, between the two nodes around) the queried input.
//!
//! Four addressing schemes are implemented:
//!
//! * M-LUT: `a = round((x − p)·k)`, one multiplication.
//! * L-LUT: density `2^n`, the multiplication becomes [`ldexp32`].
//! * D-LUT: the address is a bit field of the float itself (see [`direct`]).
//! * DL-LUT: an L-LUT below the smallest D-LUT exponent, a D-LUT above.
//!
//! Tables are built on the host in double precision and queried in single
//! precision (or Q3.28 for fixed L-LUTs).

mod direct;
pub mod format;

pub use direct::{build_dllut, build_dlut, dllut_query_interp, dlut_query_interp, DlLut};

use crate::costmodel::{tally, Op};
use crate::error::{Error, Result};
use crate::fixedpoint::{
    fixed_add, fixed_mul, fixed_sub, ldexp32, to_fixed_f64, FixedQ3_28, FRAC_BITS,
};

/// Bytes of the serialized parameter block that accompanies each table.
pub const PARAM_BLOCK_BYTES: usize = 4 + 1 + 1 + 5 * 8 + 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LutKind {
    M,
    L,
    D,
    DL,
}

impl LutKind {
    pub fn name(self) -> &'static str {
        match self {
            LutKind::M => "M-LUT",
            LutKind::L => "L-LUT",
            LutKind::D => "D-LUT",
            LutKind::DL => "DL-LUT",
        }
    }
}

/// Address-generation parameters.
///
/// `k` is the density for M tables and `2^n` for L tables. The bit-field
/// widths and `base_exponent` are used by D tables only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacingSpec {
    pub kind: LutKind,
    pub p: f64,
    pub k: f64,
    pub n: i32,
    pub exp_bits: u32,
    pub mant_bits: u32,
    pub base_exponent: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LutEntries {
    Float(Vec<f32>),
    Fixed(Vec<FixedQ3_28>),
}

impl LutEntries {
    pub fn len(&self) -> usize {
        match self {
            LutEntries::Float(v) => v.len(),
            LutEntries::Fixed(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, LutEntries::Fixed(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyLut {
    spec: SpacingSpec,
    entries: LutEntries,
    interpolated: bool,
    function_tag: u8,
    lo: f64,
    hi: f64,
    p32: f32,
    k32: f32,
    p_fixed: i32,
}

fn evaluate_entries(f: &dyn Fn(f64) -> f64, nodes: impl Iterator<Item = f64>) -> Result<Vec<f64>> {
    nodes
        .map(|x| {
            let y = f(x);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::Domain {
                    function: "table function",
                    value: x,
                })
            }
        })
        .collect()
}

fn check_interval(lo: f64, hi: f64, size: usize) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::config(format!("empty table interval [{lo}, {hi}]")));
    }
    if size < 2 {
        return Err(Error::config(format!("table size {size} below 2")));
    }
    Ok(())
}

/// Table with regular spacing `1/k`, `k = size/(hi − lo)`.
///
/// Without interpolation nodes sit at cell centres, `p = lo + (hi−lo)/(2·size)`.
/// With interpolation `p = lo` and one guard entry is appended.
pub fn build_mlut(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    size: usize,
    interpolated: bool,
) -> Result<FuzzyLut> {
    check_interval(lo, hi, size)?;
    let k = size as f64 / (hi - lo);
    let p = if interpolated {
        lo
    } else {
        lo + (hi - lo) / (2.0 * size as f64)
    };
    let spec = SpacingSpec {
        kind: LutKind::M,
        p,
        k,
        n: 0,
        exp_bits: 0,
        mant_bits: 0,
        base_exponent: 0,
    };
    FuzzyLut::build_float(&f, spec, size, interpolated)
}

fn llut_spec(lo: f64, hi: f64, size: usize, interpolated: bool) -> Result<SpacingSpec> {
    check_interval(lo, hi, size)?;
    let n = (size as f64 / (hi - lo)).log2().floor() as i32;
    let k = 2f64.powi(n);
    let p = if interpolated { lo } else { lo + 0.5 / k };
    Ok(SpacingSpec {
        kind: LutKind::L,
        p,
        k,
        n,
        exp_bits: 0,
        mant_bits: 0,
        base_exponent: 0,
    })
}

/// Table with density `2^n`, the largest power of two not above
/// `size/(hi − lo)`. The covered range grows to `[lo, lo + size/2^n]`.
pub fn build_llut(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    size: usize,
    interpolated: bool,
) -> Result<FuzzyLut> {
    let spec = llut_spec(lo, hi, size, interpolated)?;
    FuzzyLut::build_float(&f, spec, size, interpolated)
}

/// L-LUT with Q3.28 entries, addressed by shifting the raw input.
pub fn build_fixed_llut(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    size: usize,
    interpolated: bool,
) -> Result<FuzzyLut> {
    let spec = llut_spec(lo, hi, size, interpolated)?;
    FuzzyLut::build_fixed(&f, spec, size, interpolated)
}

impl FuzzyLut {
    fn cells(len: usize, interpolated: bool) -> usize {
        if interpolated {
            len - 1
        } else {
            len
        }
    }

    /// Covered input range implied by the parameters.
    fn domain_of(spec: &SpacingSpec, len: usize, interpolated: bool) -> (f64, f64) {
        let cells = Self::cells(len, interpolated) as f64;
        match spec.kind {
            LutKind::M | LutKind::L => {
                let lo = if interpolated {
                    spec.p
                } else {
                    spec.p - 0.5 / spec.k
                };
                (lo, lo + cells / spec.k)
            }
            LutKind::D | LutKind::DL => {
                let lo = 2f64.powi(spec.base_exponent);
                let exps = cells / 2f64.powi(spec.mant_bits as i32);
                (lo, lo * 2f64.powf(exps))
            }
        }
    }

    pub(crate) fn from_parts(
        spec: SpacingSpec,
        entries: LutEntries,
        interpolated: bool,
        function_tag: u8,
    ) -> Result<Self> {
        let min_len = if interpolated { 2 } else { 1 };
        if entries.len() < min_len {
            return Err(Error::Format(format!(
                "{} entries is too few",
                entries.len()
            )));
        }
        match spec.kind {
            LutKind::DL => return Err(Error::Format("a DL-LUT is two tables".into())),
            LutKind::D if !interpolated => {
                return Err(Error::Format("D-LUTs are always interpolated".into()))
            }
            _ => {}
        }
        if entries.is_fixed() && spec.kind != LutKind::L {
            return Err(Error::Format(format!(
                "fixed entries need an L-LUT, got {}",
                spec.kind.name()
            )));
        }
        let (lo, hi) = Self::domain_of(&spec, entries.len(), interpolated);
        let p_fixed = if entries.is_fixed() {
            if !(-3..=FRAC_BITS as i32).contains(&spec.n) {
                return Err(Error::config(format!(
                    "fixed L-LUT density 2^{} not addressable",
                    spec.n
                )));
            }
            if !(hi <= 8.0 && lo >= -8.0) {
                return Err(Error::range(hi, -8.0, 8.0));
            }
            to_fixed_f64(spec.p)?.raw()
        } else {
            0
        };
        Ok(FuzzyLut {
            spec,
            entries,
            interpolated,
            function_tag,
            lo,
            hi,
            p32: spec.p as f32,
            k32: spec.k as f32,
            p_fixed,
        })
    }

    fn node_count(size: usize, interpolated: bool) -> usize {
        if interpolated {
            size + 1
        } else {
            size
        }
    }

    fn build_float(
        f: &dyn Fn(f64) -> f64,
        spec: SpacingSpec,
        size: usize,
        interpolated: bool,
    ) -> Result<Self> {
        let len = Self::node_count(size, interpolated);
        let mut lut = Self::from_parts(spec, LutEntries::Float(vec![0.0; len]), interpolated, 0)?;
        let values = evaluate_entries(f, (0..len).map(|a| lut.node(a)))?;
        lut.entries = LutEntries::Float(values.into_iter().map(|v| v as f32).collect());
        tally(Op::SetupEntry, len as u64);
        Ok(lut)
    }

    fn build_fixed(
        f: &dyn Fn(f64) -> f64,
        spec: SpacingSpec,
        size: usize,
        interpolated: bool,
    ) -> Result<Self> {
        let len = Self::node_count(size, interpolated);
        let mut lut = Self::from_parts(
            spec,
            LutEntries::Fixed(vec![FixedQ3_28::ZERO; len]),
            interpolated,
            0,
        )?;
        let values = evaluate_entries(f, (0..len).map(|a| lut.node(a)))?;
        let fixed = values
            .into_iter()
            .map(to_fixed_f64)
            .collect::<Result<Vec<_>>>()?;
        lut.entries = LutEntries::Fixed(fixed);
        tally(Op::SetupEntry, len as u64);
        Ok(lut)
    }

    pub fn spec(&self) -> &SpacingSpec {
        &self.spec
    }

    pub fn kind(&self) -> LutKind {
        self.spec.kind
    }

    pub fn entries(&self) -> &LutEntries {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn interpolated(&self) -> bool {
        self.interpolated
    }

    pub fn is_fixed(&self) -> bool {
        self.entries.is_fixed()
    }

    /// Tag of the approximated function, 0 when unset.
    pub fn function_tag(&self) -> u8 {
        self.function_tag
    }

    pub fn with_function_tag(mut self, tag: u8) -> Self {
        self.function_tag = tag;
        self
    }

    /// Covered inputs, both ends included.
    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Entry bytes plus the parameter block.
    pub fn memory_bytes(&self) -> usize {
        self.len() * 4 + PARAM_BLOCK_BYTES
    }

    fn fixed_shift(&self) -> u32 {
        (FRAC_BITS as i32 - self.spec.n) as u32
    }

    /// Input position of node `addr` as seen by the single-precision
    /// (or raw fixed) addressing.
    pub fn node(&self, addr: usize) -> f64 {
        let a = addr as f64;
        if self.is_fixed() {
            let raw = self.p_fixed as i64 + ((addr as i64) << self.fixed_shift());
            return raw as f64 / (1u64 << FRAC_BITS) as f64;
        }
        match self.spec.kind {
            LutKind::M => self.p32 as f64 + a / self.k32 as f64,
            LutKind::L => self.p32 as f64 + a * 2f64.powi(-self.spec.n),
            LutKind::D | LutKind::DL => direct::node(&self.spec, addr),
        }
    }

    fn check(&self, x: f64) -> Result<()> {
        if x >= self.lo && x <= self.hi {
            Ok(())
        } else {
            Err(Error::range(x, self.lo, self.hi))
        }
    }

    fn last_cell(&self) -> i64 {
        if self.interpolated {
            self.len() as i64 - 2
        } else {
            self.len() as i64 - 1
        }
    }

    /// Address and interpolation fraction for a float query, untallied.
    fn locate(&self, x: f32) -> (usize, f32) {
        if let LutKind::D | LutKind::DL = self.spec.kind {
            return direct::locate(&self.spec, self.len(), x);
        }
        let d = x - self.p32;
        let t = match self.spec.kind {
            LutKind::M => d * self.k32,
            _ => ldexp32_untallied(d, self.spec.n),
        };
        let cell = if self.interpolated {
            t.floor()
        } else {
            t.round()
        };
        let a = (cell as i64).clamp(0, self.last_cell());
        (a as usize, t - a as f32)
    }

    /// Address and raw fraction for a fixed query, untallied.
    fn locate_fixed(&self, x: FixedQ3_28) -> (usize, i32) {
        let s = self.fixed_shift();
        let d = x.raw() as i64 - self.p_fixed as i64;
        let a = if self.interpolated {
            d >> s
        } else {
            (d + (1i64 << s >> 1)) >> s
        };
        let a = a.clamp(0, self.last_cell());
        let rest = d - (a << s);
        let frac = if self.spec.n >= 0 {
            rest << self.spec.n
        } else {
            rest >> -self.spec.n
        };
        (
            a as usize,
            frac.clamp(i32::MIN as i64, i32::MAX as i64) as i32,
        )
    }

    /// Table address for `x`.
    pub fn address(&self, x: f32) -> Result<usize> {
        self.check(x as f64)?;
        if self.is_fixed() {
            let fx = to_fixed_f64(x as f64)?;
            return Ok(self.locate_fixed(fx).0);
        }
        Ok(self.locate(x).0)
    }

    /// A float input that maps onto node `addr`, exactly on the node when
    /// the single-precision addressing allows it.
    pub fn preimage(&self, addr: usize) -> f32 {
        let target = self.node(addr);
        let start = target as f32;
        let probe = |x: f32| -> Option<bool> {
            if !x.is_finite() || self.check(x as f64).is_err() {
                return None;
            }
            let (a, frac) = if self.is_fixed() {
                let fx = to_fixed_f64(x as f64).ok()?;
                let (a, r) = self.locate_fixed(fx);
                (a, r as f32)
            } else {
                self.locate(x)
            };
            (a == addr).then_some(frac == 0.0 || !self.interpolated)
        };
        let mut fallback = None;
        let mut below = start;
        let mut above = start;
        for step in 0..16 {
            for x in if step == 0 {
                [start, start]
            } else {
                [below, above]
            } {
                match probe(x) {
                    Some(true) => return x,
                    Some(false) if fallback.is_none() => fallback = Some(x),
                    _ => {}
                }
            }
            below = below.next_down();
            above = above.next_up();
        }
        fallback.unwrap_or(start)
    }

    /// Q3.28 input exactly on node `addr` of a fixed table, if representable.
    pub fn preimage_fixed(&self, addr: usize) -> Option<FixedQ3_28> {
        let raw = self.p_fixed as i64 + ((addr as i64) << self.fixed_shift());
        i32::try_from(raw).ok().map(FixedQ3_28::from_raw)
    }

    fn float_entries(&self) -> &[f32] {
        match &self.entries {
            LutEntries::Float(v) => v,
            LutEntries::Fixed(_) => unreachable!("float query on a fixed table"),
        }
    }

    fn expect(&self, kind: LutKind, interpolated: bool, fixed: bool) -> Result<()> {
        if self.spec.kind == kind && self.interpolated == interpolated && self.is_fixed() == fixed {
            Ok(())
        } else {
            Err(Error::config(format!(
                "query for {}{}{} on a {}{}{} table",
                kind.name(),
                if interpolated { "+interp" } else { "" },
                if fixed { " fixed" } else { "" },
                self.spec.kind.name(),
                if self.interpolated { "+interp" } else { "" },
                if self.is_fixed() { " fixed" } else { "" },
            )))
        }
    }

    /// l[a] + (l[a+1] − l[a])·Δ with one multiplication.
    fn blend(&self, a: usize, frac: f32) -> f32 {
        let e = self.float_entries();
        tally(Op::Lookup, 2);
        tally(Op::FloatAdd, 2);
        tally(Op::FloatMul, 1);
        let (l0, l1) = (e[a], e[a + 1]);
        (l1 - l0) * frac + l0
    }

    /// Query with whichever scheme the table was built for.
    pub fn query(&self, x: f32) -> Result<f32> {
        match (self.spec.kind, self.interpolated) {
            _ if self.is_fixed() => {
                self.check(x as f64)?;
                let fx = crate::fixedpoint::to_fixed(x)?;
                Ok(crate::fixedpoint::to_float(self.query_fixed(fx)?))
            }
            (LutKind::M, false) => mlut_query(self, x),
            (LutKind::M, true) => mlut_query_interp(self, x),
            (LutKind::L, false) => llut_query(self, x),
            (LutKind::L, true) => llut_query_interp(self, x),
            (LutKind::D | LutKind::DL, _) => dlut_query_interp(self, x),
        }
    }

    /// Query of a fixed L-LUT: shift addressing, a single `fixed_mul` when
    /// interpolating.
    pub fn query_fixed(&self, x: FixedQ3_28) -> Result<FixedQ3_28> {
        self.expect(LutKind::L, self.interpolated, true)?;
        self.check(x.to_f64())?;
        let LutEntries::Fixed(e) = &self.entries else {
            unreachable!()
        };
        let (a, frac) = self.locate_fixed(x);
        tally(Op::IntAdd, 3);
        tally(Op::IntShift, 1);
        tally(Op::Lookup, 1);
        if !self.interpolated {
            return Ok(e[a]);
        }
        tally(Op::IntShift, 1);
        tally(Op::Lookup, 1);
        let step = fixed_sub(e[a + 1], e[a])?;
        fixed_add(e[a], fixed_mul(step, FixedQ3_28::from_raw(frac))?)
    }
}

/// `ldexp32` without touching the cost model, for address inspection.
fn ldexp32_untallied(x: f32, n: i32) -> f32 {
    crate::costmodel::untallied(|| ldexp32(x, n))
}

fn address_cost(kind: LutKind) {
    tally(Op::FloatAdd, 2);
    tally(Op::IntAdd, 2);
    match kind {
        LutKind::M => tally(Op::FloatMul, 1),
        _ => tally(Op::Ldexp, 1),
    }
}

/// `l[round((x − p)·k)]`: one multiplication.
pub fn mlut_query(lut: &FuzzyLut, x: f32) -> Result<f32> {
    lut.expect(LutKind::M, false, false)?;
    lut.check(x as f64)?;
    address_cost(LutKind::M);
    tally(Op::Lookup, 1);
    let (a, _) = lut.locate(x);
    Ok(lut.float_entries()[a])
}

/// Linear blend between the nodes around `x`: two multiplications.
pub fn mlut_query_interp(lut: &FuzzyLut, x: f32) -> Result<f32> {
    lut.expect(LutKind::M, true, false)?;
    lut.check(x as f64)?;
    address_cost(LutKind::M);
    tally(Op::FloatAdd, 1);
    let (a, frac) = lut.locate(x);
    Ok(lut.blend(a, frac))
}

/// `l[round(ldexp(x − p, n))]`: no multiplication.
pub fn llut_query(lut: &FuzzyLut, x: f32) -> Result<f32> {
    lut.expect(LutKind::L, false, false)?;
    lut.check(x as f64)?;
    address_cost(LutKind::L);
    tally(Op::Lookup, 1);
    let (a, _) = lut.locate(x);
    Ok(lut.float_entries()[a])
}

/// Interpolated L-LUT: one multiplication, for the blend.
pub fn llut_query_interp(lut: &FuzzyLut, x: f32) -> Result<f32> {
    lut.expect(LutKind::L, true, false)?;
    lut.check(x as f64)?;
    address_cost(LutKind::L);
    tally(Op::FloatAdd, 1);
    let (a, frac) = lut.locate(x);
    Ok(lut.blend(a, frac))
}

pub fn lut_memory_bytes(lut: &FuzzyLut) -> usize {
    lut.memory_bytes()
}
