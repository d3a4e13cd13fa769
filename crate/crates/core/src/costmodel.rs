//! Operation accounting.
//!
//! Kernels call [`tally`] for every primitive they execute. Counting is off
//! unless a caller is inside [`with_counting`] (or [`with_phase_counting`]),
//! in which case the tallies go to a per-thread accumulator. Hooks never
//! touch the values being computed, so instrumented and plain runs produce
//! bit-identical results.
//!
//! Ops executed inside [`range_phase`] are attributed to range
//! reduction/extension rather than to the kernel proper.

use std::cell::{Cell, RefCell};
use std::fmt;
use std::ops::{Add, AddAssign};
use std::path::Path;

use crate::error::{Error, Result};

/// One kind of primitive operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    /// Integer add, subtract, negate, and bitwise logic.
    IntAdd,
    IntShift,
    IntMul,
    /// Float add/subtract, and float to integer conversions (round, floor).
    FloatAdd,
    FloatMul,
    FloatDiv,
    /// Exponent-field scaling by a power of two, including float/fixed conversion.
    Ldexp,
    /// One table read (a LUT entry or a CORDIC angle).
    Lookup,
    /// One table entry generated on the host.
    SetupEntry,
}

/// Tallies of executed primitives.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OpCounts {
    pub int_add: u64,
    pub int_shift: u64,
    pub int_mul: u64,
    pub float_add: u64,
    pub float_mul: u64,
    pub float_div: u64,
    pub ldexp_op: u64,
    pub lut_lookup: u64,
    pub table_setup_entries: u64,
}

impl OpCounts {
    pub fn record(&mut self, op: Op, n: u64) {
        let slot = match op {
            Op::IntAdd => &mut self.int_add,
            Op::IntShift => &mut self.int_shift,
            Op::IntMul => &mut self.int_mul,
            Op::FloatAdd => &mut self.float_add,
            Op::FloatMul => &mut self.float_mul,
            Op::FloatDiv => &mut self.float_div,
            Op::Ldexp => &mut self.ldexp_op,
            Op::Lookup => &mut self.lut_lookup,
            Op::SetupEntry => &mut self.table_setup_entries,
        };
        *slot += n;
    }

    /// Per-call operations, excluding table generation.
    pub fn total_ops(&self) -> u64 {
        self.int_add
            + self.int_shift
            + self.int_mul
            + self.float_add
            + self.float_mul
            + self.float_div
            + self.ldexp_op
            + self.lut_lookup
    }

    /// All multiplications, integer and float.
    pub fn multiplications(&self) -> u64 {
        self.int_mul + self.float_mul
    }

    /// Merges two accumulators. Associative and commutative.
    pub fn merge(self, other: OpCounts) -> OpCounts {
        self + other
    }
}

impl Add for OpCounts {
    type Output = OpCounts;

    fn add(self, o: OpCounts) -> OpCounts {
        OpCounts {
            int_add: self.int_add + o.int_add,
            int_shift: self.int_shift + o.int_shift,
            int_mul: self.int_mul + o.int_mul,
            float_add: self.float_add + o.float_add,
            float_mul: self.float_mul + o.float_mul,
            float_div: self.float_div + o.float_div,
            ldexp_op: self.ldexp_op + o.ldexp_op,
            lut_lookup: self.lut_lookup + o.lut_lookup,
            table_setup_entries: self.table_setup_entries + o.table_setup_entries,
        }
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, o: OpCounts) {
        *self = *self + o;
    }
}

impl std::iter::Sum for OpCounts {
    fn sum<I: Iterator<Item = OpCounts>>(iter: I) -> OpCounts {
        iter.fold(OpCounts::default(), Add::add)
    }
}

/// Counts split between the kernel and range reduction/extension.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseCounts {
    pub kernel: OpCounts,
    pub range: OpCounts,
}

impl PhaseCounts {
    pub fn total(&self) -> OpCounts {
        self.kernel + self.range
    }
}

impl Add for PhaseCounts {
    type Output = PhaseCounts;

    fn add(self, o: PhaseCounts) -> PhaseCounts {
        PhaseCounts {
            kernel: self.kernel + o.kernel,
            range: self.range + o.range,
        }
    }
}

/// Host-side setup cost of an evaluator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SetupReport {
    pub wall_seconds: f64,
    /// Bytes of every table and constant block the evaluator allocates.
    pub bytes: u64,
    /// Table entries (LUT cells, CORDIC angles) generated.
    pub entries: u64,
}

thread_local! {
    static ACTIVE: RefCell<Option<PhaseCounts>> = const { RefCell::new(None) };
    static IN_RANGE: Cell<bool> = const { Cell::new(false) };
}

/// Records `n` executions of `op` in the current counting context, if any.
#[inline]
pub fn tally(op: Op, n: u64) {
    #[cfg(feature = "op-count")]
    ACTIVE.with(|active| {
        if let Some(counts) = active.borrow_mut().as_mut() {
            if IN_RANGE.with(Cell::get) {
                counts.range.record(op, n);
            } else {
                counts.kernel.record(op, n);
            }
        }
    });
    #[cfg(not(feature = "op-count"))]
    let _ = (op, n);
}

struct CountingGuard {
    outer: Option<PhaseCounts>,
}

impl Drop for CountingGuard {
    fn drop(&mut self) {
        let outer = self.outer.take();
        ACTIVE.with(|active| {
            let mut slot = active.borrow_mut();
            let inner = slot.take().unwrap_or_default();
            *slot = outer.map(|o| o + inner);
        });
    }
}

/// Runs `f` with counting enabled and returns the counts split by phase.
///
/// Nested calls see only their own ops; on exit those ops are added to the
/// enclosing context as well, so tallies compose additively.
pub fn with_phase_counting<R>(f: impl FnOnce() -> R) -> (R, PhaseCounts) {
    let outer = ACTIVE.with(|active| active.borrow_mut().replace(PhaseCounts::default()));
    let guard = CountingGuard { outer };
    let result = f();
    let counts = ACTIVE.with(|active| active.borrow().unwrap_or_default());
    drop(guard);
    (result, counts)
}

/// Runs `f` with counting enabled and returns the total counts.
pub fn with_counting<R>(f: impl FnOnce() -> R) -> (R, OpCounts) {
    let (r, counts) = with_phase_counting(f);
    (r, counts.total())
}

struct PhaseGuard(bool);

impl Drop for PhaseGuard {
    fn drop(&mut self) {
        IN_RANGE.with(|c| c.set(self.0));
    }
}

/// Attributes every op executed by `f` to range reduction/extension.
pub fn range_phase<R>(f: impl FnOnce() -> R) -> R {
    let _guard = PhaseGuard(IN_RANGE.with(|c| c.replace(true)));
    f()
}

/// Runs `f` without recording its ops anywhere.
pub fn untallied<R>(f: impl FnOnce() -> R) -> R {
    let outer = ACTIVE.with(|active| active.borrow_mut().take());
    let result = f();
    ACTIVE.with(|active| *active.borrow_mut() = outer);
    result
}

/// Per-op cost weights.
///
/// The default profile approximates a core without a hardware multiplier,
/// where a float multiply is much dearer than an add. It is an assumption,
/// not a measured cycle table; load a different profile with
/// [`Weights::from_file`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub int_add: f64,
    pub int_shift: f64,
    pub int_mul: f64,
    pub float_add: f64,
    pub float_mul: f64,
    pub float_div: f64,
    pub ldexp_op: f64,
    pub lut_lookup: f64,
    pub table_setup_entry: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            int_add: 1.0,
            int_shift: 1.0,
            int_mul: 8.0,
            float_add: 4.0,
            float_mul: 16.0,
            float_div: 48.0,
            ldexp_op: 3.0,
            lut_lookup: 2.0,
            table_setup_entry: 0.0,
        }
    }
}

impl Weights {
    /// Every op weighs 1; table generation weighs 0.
    pub fn unit() -> Self {
        Weights {
            int_add: 1.0,
            int_shift: 1.0,
            int_mul: 1.0,
            float_add: 1.0,
            float_mul: 1.0,
            float_div: 1.0,
            ldexp_op: 1.0,
            lut_lookup: 1.0,
            table_setup_entry: 0.0,
        }
    }

    /// Parses `key = value` lines on top of the default profile.
    ///
    /// Blank lines and `#` comments are ignored. Unknown keys and negative
    /// weights are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut w = Weights::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("weights line {}: expected key=value", lineno + 1))
            })?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::config(format!("weights line {}: bad number", lineno + 1)))?;
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::config(format!(
                    "weights line {}: weight must be nonnegative",
                    lineno + 1
                )));
            }
            let slot = match key.trim() {
                "int_add" => &mut w.int_add,
                "int_shift" | "shift" => &mut w.int_shift,
                "int_mul" => &mut w.int_mul,
                "float_add" => &mut w.float_add,
                "float_mul" => &mut w.float_mul,
                "float_div" => &mut w.float_div,
                "ldexp" | "ldexp_op" => &mut w.ldexp_op,
                "lookup" | "lut_lookup" => &mut w.lut_lookup,
                "table_setup_entry" | "setup_entry" => &mut w.table_setup_entry,
                other => return Err(Error::config(format!("unknown weight key `{other}`"))),
            };
            *slot = value;
        }
        Ok(w)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Weights::parse(&std::fs::read_to_string(path)?)
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "int_add = {}", self.int_add)?;
        writeln!(f, "int_shift = {}", self.int_shift)?;
        writeln!(f, "int_mul = {}", self.int_mul)?;
        writeln!(f, "float_add = {}", self.float_add)?;
        writeln!(f, "float_mul = {}", self.float_mul)?;
        writeln!(f, "float_div = {}", self.float_div)?;
        writeln!(f, "ldexp = {}", self.ldexp_op)?;
        writeln!(f, "lut_lookup = {}", self.lut_lookup)?;
        writeln!(f, "table_setup_entry = {}", self.table_setup_entry)
    }
}

/// Dot product of tallies and weights.
pub fn weighted_cost(counts: &OpCounts, weights: &Weights) -> f64 {
    counts.int_add as f64 * weights.int_add
        + counts.int_shift as f64 * weights.int_shift
        + counts.int_mul as f64 * weights.int_mul
        + counts.float_add as f64 * weights.float_add
        + counts.float_mul as f64 * weights.float_mul
        + counts.float_div as f64 * weights.float_div
        + counts.ldexp_op as f64 * weights.ldexp_op
        + counts.lut_lookup as f64 * weights.lut_lookup
        + counts.table_setup_entries as f64 * weights.table_setup_entry
}
