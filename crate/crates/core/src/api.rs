//! Function × method evaluators.
//!
//! [`build_evaluator`] does all host-side setup for one (function, method,
//! size) point and returns an immutable [`Evaluator`]. Inputs are range
//! reduced into the kernel's domain, the kernel runs, and the result is
//! extended back.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use crate::combined::{build_cordic_lut, CordicLutTables};
use crate::cordic::{self, generate_cordic_tables, CordicMode, CordicTables};
use crate::costmodel::{
    range_phase, tally, with_counting, with_phase_counting, Op, OpCounts, PhaseCounts, SetupReport,
};
use crate::error::{Error, Result};
use crate::fixedpoint::split_float;
use crate::lut::format::TableRecord;
use crate::lut::{
    build_dllut, build_dlut, build_fixed_llut, build_llut, build_mlut, DlLut, FuzzyLut,
};
use crate::rangeext::{
    exp_extend, exp_split, gelu_reference, log_extend, reduce_2pi, sqrt_extend, sqrt_split,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctionId {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Gelu,
}

impl FunctionId {
    pub const ALL: [FunctionId; 10] = [
        FunctionId::Sin,
        FunctionId::Cos,
        FunctionId::Tan,
        FunctionId::Sinh,
        FunctionId::Cosh,
        FunctionId::Tanh,
        FunctionId::Exp,
        FunctionId::Log,
        FunctionId::Sqrt,
        FunctionId::Gelu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionId::Sin => "sin",
            FunctionId::Cos => "cos",
            FunctionId::Tan => "tan",
            FunctionId::Sinh => "sinh",
            FunctionId::Cosh => "cosh",
            FunctionId::Tanh => "tanh",
            FunctionId::Exp => "exp",
            FunctionId::Log => "log",
            FunctionId::Sqrt => "sqrt",
            FunctionId::Gelu => "gelu",
        }
    }

    /// Tag stored with serialized tables, 1..=10.
    pub fn tag(self) -> u8 {
        Self::ALL.iter().position(|&f| f == self).unwrap() as u8 + 1
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.get((tag as usize).checked_sub(1)?).copied()
    }

    /// Double-precision reference.
    pub fn reference(self, x: f64) -> f64 {
        match self {
            FunctionId::Sin => x.sin(),
            FunctionId::Cos => x.cos(),
            FunctionId::Tan => x.tan(),
            FunctionId::Sinh => x.sinh(),
            FunctionId::Cosh => x.cosh(),
            FunctionId::Tanh => x.tanh(),
            FunctionId::Exp => x.exp(),
            FunctionId::Log => x.ln(),
            FunctionId::Sqrt => x.sqrt(),
            FunctionId::Gelu => gelu_reference(x),
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config(format!("unknown function {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodKind {
    Cordic,
    MLut,
    MLutInterp,
    LLut,
    LLutInterp,
    DLutInterp,
    DLLutInterp,
    CordicLut,
}

impl MethodKind {
    pub const ALL: [MethodKind; 8] = [
        MethodKind::Cordic,
        MethodKind::MLut,
        MethodKind::MLutInterp,
        MethodKind::LLut,
        MethodKind::LLutInterp,
        MethodKind::DLutInterp,
        MethodKind::DLLutInterp,
        MethodKind::CordicLut,
    ];

    /// Command-line spelling.
    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Cordic => "cordic",
            MethodKind::MLut => "mlut",
            MethodKind::MLutInterp => "mlut-interp",
            MethodKind::LLut => "llut",
            MethodKind::LLutInterp => "llut-interp",
            MethodKind::DLutInterp => "dlut-interp",
            MethodKind::DLLutInterp => "dllut-interp",
            MethodKind::CordicLut => "cordic-lut",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MethodKind::Cordic => "CORDIC",
            MethodKind::MLut => "M-LUT",
            MethodKind::MLutInterp => "M-LUT+Interpolation",
            MethodKind::LLut => "L-LUT",
            MethodKind::LLutInterp => "L-LUT+Interpolation",
            MethodKind::DLutInterp => "D-LUT+Interpolation",
            MethodKind::DLLutInterp => "DL-LUT+Interpolation",
            MethodKind::CordicLut => "CORDIC+LUT",
        }
    }

    /// Whether `size_or_iters` counts iterations rather than entries.
    pub fn is_iterative(self) -> bool {
        matches!(self, MethodKind::Cordic | MethodKind::CordicLut)
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum NumberFormat {
    #[default]
    Float,
    Fixed,
}

impl NumberFormat {
    pub fn name(self) -> &'static str {
        match self {
            NumberFormat::Float => "float",
            NumberFormat::Fixed => "fixed",
        }
    }
}

impl FromStr for NumberFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "float" => Ok(NumberFormat::Float),
            "fixed" => Ok(NumberFormat::Fixed),
            _ => Err(Error::config(format!("unknown number format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MethodId {
    pub kind: MethodKind,
    pub format: NumberFormat,
}

impl MethodId {
    pub fn float(kind: MethodKind) -> Self {
        MethodId {
            kind,
            format: NumberFormat::Float,
        }
    }

    /// Q3.28 entries; only L-LUTs have such a variant.
    pub fn fixed(kind: MethodKind) -> Result<Self> {
        let m = MethodId {
            kind,
            format: NumberFormat::Fixed,
        };
        m.validate().map(|_| m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format == NumberFormat::Fixed
            && !matches!(self.kind, MethodKind::LLut | MethodKind::LLutInterp)
        {
            return Err(Error::config(format!(
                "{} has no fixed-point variant",
                self.kind.label()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.format {
            NumberFormat::Float => f.write_str(self.kind.name()),
            NumberFormat::Fixed => write!(f, "{}-fixed", self.kind.name()),
        }
    }
}

/// The implementation-method × function support matrix.
pub fn supported(function: FunctionId, method: MethodKind) -> bool {
    use FunctionId::*;
    match method {
        MethodKind::Cordic => function != Gelu,
        MethodKind::MLut | MethodKind::MLutInterp | MethodKind::LLut | MethodKind::LLutInterp => {
            matches!(function, Sin | Cos | Tan | Exp | Log | Sqrt)
        }
        MethodKind::DLutInterp | MethodKind::DLLutInterp => matches!(function, Sin | Tanh | Gelu),
        MethodKind::CordicLut => matches!(function, Sin | Cos | Tan | Sinh | Cosh | Tanh | Exp),
    }
}

/// Address bits of the CORDIC+LUT start table unless configured otherwise.
pub const DEFAULT_START_BITS: u32 = 6;

/// Fewest CORDIC iterations whose angle sum covers [0, π/2] and [0, 1].
pub const MIN_CORDIC_ITERATIONS: u32 = 4;

/// D-LUT exponent range. Eight exponents below 2^3 cover [2^-5, 8].
pub const DLUT_BASE_EXPONENT: i32 = -5;
pub const DLUT_HI_EXPONENT: i32 = 3;
const DLUT_EXP_BITS: u32 = 3;

/// tanh and GELU tables cover [0, 8]; beyond that tanh is 1 and GELU is x.
pub const SATURATION: f32 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluatorConfig {
    pub function: FunctionId,
    pub method: MethodId,
    /// LUT entries (before any guard entry) or CORDIC iterations.
    pub size_or_iters: u32,
    /// Kernel table interval, overriding [`default_kernel_domain`].
    pub domain: Option<(f64, f64)>,
    /// CORDIC+LUT address bits.
    pub start_bits: u32,
}

impl EvaluatorConfig {
    pub fn new(function: FunctionId, method: MethodId, size_or_iters: u32) -> Self {
        EvaluatorConfig {
            function,
            method,
            size_or_iters,
            domain: None,
            start_bits: DEFAULT_START_BITS,
        }
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Some((lo, hi));
        self
    }

    pub fn with_start_bits(mut self, bits: u32) -> Self {
        self.start_bits = bits;
        self
    }
}

/// Interval a kernel table is built over, after range reduction.
pub fn default_kernel_domain(function: FunctionId) -> (f64, f64) {
    match function {
        FunctionId::Sin | FunctionId::Cos | FunctionId::Tan => (0.0, std::f64::consts::TAU),
        FunctionId::Exp => (0.0, 1.0),
        FunctionId::Log => (1.0, 2.0),
        FunctionId::Sqrt => (0.5, 2.0),
        FunctionId::Sinh | FunctionId::Cosh => (0.0, 1.0),
        FunctionId::Tanh | FunctionId::Gelu => (0.0, SATURATION as f64),
    }
}

/// Input interval for accuracy sweeps.
///
/// D-LUTs have no entries below 2^-5, so their sweeps start there.
pub fn default_sample_domain(function: FunctionId, method: MethodKind) -> (f64, f64) {
    let dlut_lo = 2f64.powi(DLUT_BASE_EXPONENT);
    match (function, method) {
        (FunctionId::Sin | FunctionId::Cos, MethodKind::DLutInterp) => {
            (dlut_lo, std::f64::consts::TAU)
        }
        (FunctionId::Sin | FunctionId::Cos, _) => (0.0, std::f64::consts::TAU),
        // Away from the poles, so RMSE is not dominated by a handful of inputs.
        (FunctionId::Tan, _) => (-1.3, 1.3),
        (FunctionId::Sinh | FunctionId::Cosh, _) => (-4.0, 4.0),
        (FunctionId::Tanh | FunctionId::Gelu, MethodKind::DLutInterp) => (dlut_lo, 8.0),
        (FunctionId::Tanh | FunctionId::Gelu | FunctionId::Exp, _) => (-8.0, 8.0),
        (FunctionId::Log | FunctionId::Sqrt, _) => (1.0 / 16.0, 16.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Table {
    Plain(FuzzyLut),
    Composite(DlLut),
}

impl Table {
    fn query(&self, x: f32) -> Result<f32> {
        match self {
            Table::Plain(t) => t.query(x),
            Table::Composite(t) => t.query(x),
        }
    }

    fn domain(&self) -> (f64, f64) {
        match self {
            Table::Plain(t) => t.domain(),
            Table::Composite(t) => t.domain(),
        }
    }

    fn memory_bytes(&self) -> usize {
        match self {
            Table::Plain(t) => t.memory_bytes(),
            Table::Composite(t) => t.memory_bytes(),
        }
    }

    fn record(&self, tag: u8) -> TableRecord {
        match self {
            Table::Plain(t) => TableRecord::Lut(t.clone().with_function_tag(tag)),
            Table::Composite(t) => TableRecord::DlLut(t.clone().with_function_tag(tag)),
        }
    }

    /// Single-precision kernel input for a reduced argument.
    ///
    /// Rounding a reduced value that is inside the table to single
    /// precision can step just past an end; such values are pulled back.
    fn kernel_input(&self, r: f64) -> f32 {
        let (lo, hi) = self.domain();
        let v = r as f32;
        if (v as f64) > hi && r <= hi {
            v.next_down()
        } else if (v as f64) < lo && r >= lo {
            v.next_up()
        } else {
            v
        }
    }
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
enum Kernel {
    Cordic(CordicTables),
    Hybrid(CordicLutTables),
    Table(Table),
    /// tan from a sine and a cosine table.
    TanTables(Table, Table),
}

/// A ready-to-run (function, method) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluator {
    config: EvaluatorConfig,
    kernel: Kernel,
    setup: SetupReport,
}

pub(crate) fn unsupported(function: FunctionId, method: MethodId) -> Error {
    Error::UnsupportedCombination {
        function: function.name().into(),
        method: method.to_string(),
    }
}

fn cordic_mode(function: FunctionId) -> CordicMode {
    match function {
        FunctionId::Sin | FunctionId::Cos | FunctionId::Tan => CordicMode::Circular,
        _ => CordicMode::Hyperbolic,
    }
}

fn build_table(config: &EvaluatorConfig, f: fn(f64) -> f64) -> Result<Table> {
    let (lo, hi) = config
        .domain
        .unwrap_or_else(|| default_kernel_domain(config.function));
    let size = config.size_or_iters as usize;
    let fixed = config.method.format == NumberFormat::Fixed;
    Ok(match config.method.kind {
        MethodKind::MLut => Table::Plain(build_mlut(f, lo, hi, size, false)?),
        MethodKind::MLutInterp => Table::Plain(build_mlut(f, lo, hi, size, true)?),
        MethodKind::LLut if fixed => Table::Plain(build_fixed_llut(f, lo, hi, size, false)?),
        MethodKind::LLutInterp if fixed => Table::Plain(build_fixed_llut(f, lo, hi, size, true)?),
        MethodKind::LLut => Table::Plain(build_llut(f, lo, hi, size, false)?),
        MethodKind::LLutInterp => Table::Plain(build_llut(f, lo, hi, size, true)?),
        MethodKind::DLutInterp => {
            let exps = (DLUT_HI_EXPONENT - DLUT_BASE_EXPONENT) as usize;
            let mant_bits = (size / exps).max(2).ilog2();
            Table::Plain(build_dlut(
                f,
                DLUT_EXP_BITS,
                mant_bits,
                DLUT_BASE_EXPONENT,
                DLUT_HI_EXPONENT,
            )?)
        }
        MethodKind::DLLutInterp => {
            // 2^mb L entries below the boundary plus 8·2^mb D entries above.
            let exps = (DLUT_HI_EXPONENT - DLUT_BASE_EXPONENT) as usize + 1;
            let mant_bits = (size / exps).max(2).ilog2();
            Table::Composite(build_dllut(
                f,
                DLUT_EXP_BITS,
                mant_bits,
                DLUT_BASE_EXPONENT,
                DLUT_HI_EXPONENT,
            )?)
        }
        MethodKind::Cordic | MethodKind::CordicLut => unreachable!("not a table method"),
    })
}

fn exp2_frac(r: f64) -> f64 {
    r.exp2()
}

fn kernel_function(function: FunctionId) -> fn(f64) -> f64 {
    match function {
        FunctionId::Sin => f64::sin,
        FunctionId::Cos => f64::cos,
        FunctionId::Tan => f64::tan,
        FunctionId::Sinh => f64::sinh,
        FunctionId::Cosh => f64::cosh,
        FunctionId::Tanh => f64::tanh,
        FunctionId::Exp => exp2_frac,
        FunctionId::Log => f64::ln,
        FunctionId::Sqrt => f64::sqrt,
        FunctionId::Gelu => gelu_reference,
    }
}

fn build_kernel(config: &EvaluatorConfig) -> Result<Kernel> {
    let function = config.function;
    let n = config.size_or_iters;
    match config.method.kind {
        MethodKind::Cordic => {
            if n < MIN_CORDIC_ITERATIONS {
                return Err(Error::config(format!(
                    "CORDIC needs at least {MIN_CORDIC_ITERATIONS} iterations"
                )));
            }
            Ok(Kernel::Cordic(generate_cordic_tables(
                cordic_mode(function),
                n,
            )?))
        }
        MethodKind::CordicLut => Ok(Kernel::Hybrid(build_cordic_lut(
            cordic_mode(function),
            config.start_bits,
            n,
        )?)),
        _ if function == FunctionId::Tan => {
            let sin = build_table(
                &EvaluatorConfig {
                    function: FunctionId::Sin,
                    ..*config
                },
                f64::sin,
            )?;
            let cos = build_table(
                &EvaluatorConfig {
                    function: FunctionId::Cos,
                    ..*config
                },
                f64::cos,
            )?;
            Ok(Kernel::TanTables(sin, cos))
        }
        _ => Ok(Kernel::Table(build_table(
            config,
            kernel_function(function),
        )?)),
    }
}

/// Builds the tables for `config` and measures the setup.
pub fn build_evaluator(config: &EvaluatorConfig) -> Result<Evaluator> {
    config.method.validate()?;
    if !supported(config.function, config.method.kind) {
        return Err(unsupported(config.function, config.method));
    }
    if config.size_or_iters == 0 {
        return Err(Error::config("size_or_iters must be positive"));
    }
    let start = Instant::now();
    let (kernel, counts) = with_counting(|| build_kernel(config));
    let wall_seconds = start.elapsed().as_secs_f64();
    let kernel = kernel?;
    let mut ev = Evaluator {
        config: *config,
        kernel,
        setup: SetupReport {
            wall_seconds,
            bytes: 0,
            entries: counts.table_setup_entries,
        },
    };
    ev.setup.bytes = ev.memory_bytes() as u64;
    Ok(ev)
}

fn negate(y: f32) -> f32 {
    range_phase(|| tally(Op::IntAdd, 1));
    -y
}

fn saturates(ax: f32) -> bool {
    range_phase(|| tally(Op::IntAdd, 1));
    ax >= SATURATION
}

impl Evaluator {
    pub fn config(&self) -> &EvaluatorConfig {
        &self.config
    }

    pub fn function(&self) -> FunctionId {
        self.config.function
    }

    pub fn method(&self) -> MethodId {
        self.config.method
    }

    pub fn setup(&self) -> &SetupReport {
        &self.setup
    }

    /// Bytes of every table the evaluator reads.
    pub fn memory_bytes(&self) -> usize {
        match &self.kernel {
            Kernel::Cordic(t) => t.memory_bytes(),
            Kernel::Hybrid(t) => t.memory_bytes(),
            Kernel::Table(t) => t.memory_bytes(),
            Kernel::TanTables(s, c) => s.memory_bytes() + c.memory_bytes(),
        }
    }

    /// Serializable tables; pure CORDIC has none.
    pub fn tables(&self) -> Vec<TableRecord> {
        let tag = self.config.function.tag();
        match &self.kernel {
            Kernel::Cordic(_) => Vec::new(),
            Kernel::Hybrid(t) => vec![TableRecord::CordicLut(t.clone(), tag)],
            Kernel::Table(t) => vec![t.record(tag)],
            Kernel::TanTables(s, c) => vec![
                s.record(FunctionId::Sin.tag()),
                c.record(FunctionId::Cos.tag()),
            ],
        }
    }

    pub fn sample_domain(&self) -> (f64, f64) {
        default_sample_domain(self.config.function, self.config.method.kind)
    }

    pub fn evaluate(&self, x: f32) -> Result<f32> {
        match &self.kernel {
            Kernel::Cordic(t) => self
                .eval_rotator(t, x)
                .or_else(|e| self.eval_vectoring(t, x, e)),
            Kernel::Hybrid(t) => self.eval_rotator(t, x),
            Kernel::Table(t) => self.eval_table(t, x),
            Kernel::TanTables(s, c) => eval_tan_tables(s, c, x),
        }
    }

    /// Evaluates every input in order and returns the summed op counts.
    pub fn evaluate_batch(&self, xs: &[f32]) -> Result<(Vec<f32>, OpCounts)> {
        let (ys, counts) = self.evaluate_batch_phases(xs)?;
        Ok((ys, counts.total()))
    }

    /// As [`Evaluator::evaluate_batch`], with kernel and range ops apart.
    pub fn evaluate_batch_phases(&self, xs: &[f32]) -> Result<(Vec<f32>, PhaseCounts)> {
        let (ys, counts) = with_phase_counting(|| {
            xs.iter()
                .map(|&x| self.evaluate(x))
                .collect::<Result<Vec<_>>>()
        });
        Ok((ys?, counts))
    }

    fn eval_rotator<R: cordic::Rotator>(&self, r: &R, x: f32) -> Result<f32> {
        match self.config.function {
            FunctionId::Sin => cordic::sin_with(r, x),
            FunctionId::Cos => cordic::cos_with(r, x),
            FunctionId::Tan => cordic::tan_with(r, x),
            FunctionId::Sinh => cordic::sinh_with(r, x),
            FunctionId::Cosh => cordic::cosh_with(r, x),
            FunctionId::Tanh => cordic::tanh_with(r, x),
            FunctionId::Exp => cordic::exp_with(r, x),
            FunctionId::Log | FunctionId::Sqrt | FunctionId::Gelu => {
                Err(unsupported(self.config.function, self.config.method))
            }
        }
    }

    /// log and sqrt need vectoring, which only plain CORDIC tables provide.
    fn eval_vectoring(&self, t: &CordicTables, x: f32, rotation_error: Error) -> Result<f32> {
        match self.config.function {
            FunctionId::Log => cordic::cordic_log(t, x),
            FunctionId::Sqrt => cordic::cordic_sqrt(t, x),
            _ => Err(rotation_error),
        }
    }

    fn eval_table(&self, t: &Table, x: f32) -> Result<f32> {
        match self.config.function {
            FunctionId::Sin | FunctionId::Cos => {
                if !x.is_finite() {
                    return Ok(f32::NAN);
                }
                t.query(t.kernel_input(reduce_2pi(x)))
            }
            FunctionId::Exp => {
                if x.is_nan() {
                    return Ok(x);
                }
                if x.is_infinite() {
                    return Ok(if x > 0.0 { x } else { 0.0 });
                }
                let split = exp_split(x);
                let v = t.query(t.kernel_input(split.frac))?;
                Ok(exp_extend(v, split.int_pow2))
            }
            FunctionId::Log => {
                let parts = split_float(x).map_err(|_| Error::Domain {
                    function: "log",
                    value: x as f64,
                })?;
                Ok(log_extend(&parts, t.query(parts.mantissa)?))
            }
            FunctionId::Sqrt => {
                let parts = split_float(x).map_err(|_| Error::Domain {
                    function: "sqrt",
                    value: x as f64,
                })?;
                let m = sqrt_split(&parts).mantissa;
                Ok(sqrt_extend(&parts, t.query(m)?))
            }
            FunctionId::Tanh => {
                if x.is_nan() {
                    return Ok(x);
                }
                if x.is_sign_negative() {
                    return self.eval_table(t, -x).map(negate);
                }
                if saturates(x) {
                    return Ok(1.0);
                }
                t.query(x)
            }
            FunctionId::Gelu => {
                if x.is_nan() {
                    return Ok(x);
                }
                if saturates(x.abs()) {
                    return Ok(if x > 0.0 { x } else { 0.0 });
                }
                if x.is_sign_negative() {
                    // gelu(x) = x + gelu(-x)
                    let y = t.query(-x)?;
                    return Ok(range_phase(|| {
                        tally(Op::FloatAdd, 1);
                        x + y
                    }));
                }
                t.query(x)
            }
            FunctionId::Tan | FunctionId::Sinh | FunctionId::Cosh => {
                Err(unsupported(self.config.function, self.config.method))
            }
        }
    }
}

fn eval_tan_tables(sin: &Table, cos: &Table, x: f32) -> Result<f32> {
    if !x.is_finite() {
        return Ok(f32::NAN);
    }
    let r = sin.kernel_input(reduce_2pi(x));
    let s = sin.query(r)?;
    let c = cos.query(r)?;
    if c == 0.0 {
        return Ok(if s >= 0.0 {
            f32::INFINITY
        } else {
            f32::NEG_INFINITY
        });
    }
    tally(Op::FloatDiv, 1);
    Ok(s / c)
}

macro_rules! default_entry_points {
    ($($(#[$doc:meta])* $name:ident => $function:ident, $kind:ident, $size:expr;)*) => {
        $(
            $(#[$doc])*
            pub fn $name(x: f32) -> f32 {
                static EVALUATOR: OnceLock<Evaluator> = OnceLock::new();
                EVALUATOR
                    .get_or_init(|| {
                        let config = EvaluatorConfig::new(FunctionId::$function, MethodId::float(MethodKind::$kind), $size);
                        build_evaluator(&config).expect("default configuration is valid")
                    })
                    .evaluate(x)
                    .unwrap_or(f32::NAN)
            }
        )*
    };
}

default_entry_points! {
    /// Sine by interpolated L-LUT with 2^16 entries.
    sinf => Sin, LLutInterp, 1 << 16;
    cosf => Cos, LLutInterp, 1 << 16;
    tanf => Tan, LLutInterp, 1 << 16;
    /// Hyperbolic sine by 28-iteration CORDIC.
    sinhf => Sinh, Cordic, 28;
    coshf => Cosh, Cordic, 28;
    /// tanh by DL-LUT with about 2^14 entries.
    tanhf => Tanh, DLLutInterp, 1 << 14;
    expf => Exp, LLutInterp, 1 << 14;
    /// Natural log; NaN outside (0, ∞).
    logf => Log, LLutInterp, 1 << 14;
    /// Square root; NaN outside (0, ∞).
    sqrtf => Sqrt, LLutInterp, 1 << 14;
    geluf => Gelu, DLLutInterp, 1 << 14;
}
