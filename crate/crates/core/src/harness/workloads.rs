//! Black-Scholes, sigmoid and softmax built on a selectable math kit.
//!
//! Sizes are desk scale: 10^5 elements by default instead of tens of
//! millions. Every result carries the variant, seed and RNG name.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::api::{build_evaluator, Evaluator, EvaluatorConfig, FunctionId, MethodId, MethodKind};
use crate::costmodel::{tally, weighted_cost, with_counting, Op, OpCounts};
use crate::error::{Error, Result};
use crate::lut::{build_fixed_llut, build_llut, build_mlut, FuzzyLut};

use super::baseline::{cndf_reference, poly_cndf, poly_exp, poly_log, poly_sqrt};
use super::{op_fields, sci, weights_field, CsvOptions, ErrorStats, UniformSampler, RNG_NAME};

/// Entries in every workload table.
pub const WORKLOAD_TABLE_SIZE: u32 = 1 << 14;

/// CORDIC+LUT exp: 28 iterations, 6 of them replaced by the start table.
const CORDIC_LUT_ITERS: u32 = 28;

pub const SOFTMAX_VECTOR_LEN: usize = 1024;

/// Sigmoid and softmax inputs.
const ACTIVATION_RANGE: (f64, f64) = (-8.0, 8.0);

/// Option parameter ranges.
pub const SPOT_RANGE: (f64, f64) = (10.0, 100.0);
pub const STRIKE_RANGE: (f64, f64) = (10.0, 100.0);
pub const RATE_RANGE: (f64, f64) = (0.01, 0.1);
pub const VOLATILITY_RANGE: (f64, f64) = (0.05, 0.65);
pub const EXPIRY_RANGE: (f64, f64) = (0.05, 1.0);

/// The CNDF table covers [0, 8); Φ is 1 to single precision beyond.
const CNDF_TABLE_HI: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WorkloadKind {
    Blackscholes,
    Sigmoid,
    Softmax,
}

impl WorkloadKind {
    pub fn name(self) -> &'static str {
        match self {
            WorkloadKind::Blackscholes => "blackscholes",
            WorkloadKind::Sigmoid => "sigmoid",
            WorkloadKind::Softmax => "softmax",
        }
    }

    pub fn variants(self) -> &'static [WorkloadVariant] {
        use WorkloadVariant::*;
        match self {
            WorkloadKind::Blackscholes => {
                &[PolynomialBaseline, MLutInterp, LLutInterp, FixedLLutInterp]
            }
            WorkloadKind::Sigmoid | WorkloadKind::Softmax => {
                &[PolynomialBaseline, MLutInterp, LLutInterp, CordicLut]
            }
        }
    }
}

impl fmt::Display for WorkloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WorkloadKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            WorkloadKind::Blackscholes,
            WorkloadKind::Sigmoid,
            WorkloadKind::Softmax,
        ]
        .into_iter()
        .find(|w| w.name().eq_ignore_ascii_case(s))
        .ok_or_else(|| Error::config(format!("unknown workload {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WorkloadVariant {
    PolynomialBaseline,
    MLutInterp,
    LLutInterp,
    FixedLLutInterp,
    CordicLut,
}

impl WorkloadVariant {
    pub const ALL: [WorkloadVariant; 5] = [
        WorkloadVariant::PolynomialBaseline,
        WorkloadVariant::MLutInterp,
        WorkloadVariant::LLutInterp,
        WorkloadVariant::FixedLLutInterp,
        WorkloadVariant::CordicLut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WorkloadVariant::PolynomialBaseline => "polynomial",
            WorkloadVariant::MLutInterp => "mlut-interp",
            WorkloadVariant::LLutInterp => "llut-interp",
            WorkloadVariant::FixedLLutInterp => "llut-interp-fixed",
            WorkloadVariant::CordicLut => "cordic-lut",
        }
    }

    fn method(self) -> Option<MethodId> {
        match self {
            WorkloadVariant::PolynomialBaseline => None,
            WorkloadVariant::MLutInterp => Some(MethodId::float(MethodKind::MLutInterp)),
            WorkloadVariant::LLutInterp => Some(MethodId::float(MethodKind::LLutInterp)),
            WorkloadVariant::FixedLLutInterp => MethodId::fixed(MethodKind::LLutInterp).ok(),
            WorkloadVariant::CordicLut => Some(MethodId::float(MethodKind::CordicLut)),
        }
    }
}

impl fmt::Display for WorkloadVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WorkloadVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config(format!("unknown workload variant {s:?}")))
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

fn neg(a: f32) -> f32 {
    tally(Op::IntAdd, 1);
    -a
}

/// Φ from a table on [0, 8) and Φ(-x) = 1 - Φ(x).
#[derive(Debug, Clone, PartialEq)]
pub struct Cndf {
    table: FuzzyLut,
}

impl Cndf {
    pub fn build(method: MethodId, size: u32) -> Result<Self> {
        let size = size as usize;
        let (lo, hi) = (0.0, CNDF_TABLE_HI);
        let table = match (method.kind, method.format) {
            (MethodKind::MLutInterp, crate::api::NumberFormat::Float) => {
                build_mlut(cndf_reference, lo, hi, size, true)?
            }
            (MethodKind::LLutInterp, crate::api::NumberFormat::Float) => {
                build_llut(cndf_reference, lo, hi, size, true)?
            }
            (MethodKind::LLutInterp, crate::api::NumberFormat::Fixed) => {
                build_fixed_llut(cndf_reference, lo, hi, size, true)?
            }
            _ => {
                return Err(Error::UnsupportedCombination {
                    function: "cndf".into(),
                    method: method.to_string(),
                });
            }
        };
        Ok(Cndf { table })
    }

    pub fn memory_bytes(&self) -> usize {
        self.table.memory_bytes()
    }

    pub fn eval(&self, x: f32) -> Result<f32> {
        if x.is_nan() {
            return Ok(x);
        }
        let ax = x.abs();
        tally(Op::IntAdd, 1);
        let upper = if ax as f64 >= CNDF_TABLE_HI {
            1.0
        } else {
            self.table.query(ax)?
        };
        Ok(if x < 0.0 { add(1.0, -upper) } else { upper })
    }
}

/// The exp, log, sqrt and Φ implementations a workload runs on.
#[derive(Debug, Clone)]
pub struct WorkloadKit {
    variant: WorkloadVariant,
    tables: Option<KitTables>,
    setup_seconds: f64,
}

#[derive(Debug, Clone)]
struct KitTables {
    exp: Evaluator,
    log: Option<Evaluator>,
    sqrt: Option<Evaluator>,
    cndf: Option<Cndf>,
}

impl WorkloadKit {
    pub fn new(workload: WorkloadKind, variant: WorkloadVariant) -> Result<Self> {
        if !workload.variants().contains(&variant) {
            return Err(Error::UnsupportedCombination {
                function: workload.name().into(),
                method: variant.name().into(),
            });
        }
        let start = Instant::now();
        let tables = match variant.method() {
            None => None,
            Some(method) => {
                let size = if method.kind == MethodKind::CordicLut {
                    CORDIC_LUT_ITERS
                } else {
                    WORKLOAD_TABLE_SIZE
                };
                let build = |f| build_evaluator(&EvaluatorConfig::new(f, method, size));
                let exp = build(FunctionId::Exp)?;
                let (log, sqrt, cndf) = if workload == WorkloadKind::Blackscholes {
                    (
                        Some(build(FunctionId::Log)?),
                        Some(build(FunctionId::Sqrt)?),
                        Some(Cndf::build(method, size)?),
                    )
                } else {
                    (None, None, None)
                };
                Some(KitTables {
                    exp,
                    log,
                    sqrt,
                    cndf,
                })
            }
        };
        Ok(WorkloadKit {
            variant,
            tables,
            setup_seconds: start.elapsed().as_secs_f64(),
        })
    }

    pub fn variant(&self) -> WorkloadVariant {
        self.variant
    }

    pub fn setup_seconds(&self) -> f64 {
        self.setup_seconds
    }

    pub fn memory_bytes(&self) -> u64 {
        let Some(t) = &self.tables else { return 0 };
        let evs = [Some(&t.exp), t.log.as_ref(), t.sqrt.as_ref()];
        let bytes: usize = evs.iter().flatten().map(|e| e.memory_bytes()).sum();
        (bytes + t.cndf.as_ref().map_or(0, Cndf::memory_bytes)) as u64
    }

    fn missing(&self, what: &str) -> Error {
        Error::config(format!("{} kit has no {what}", self.variant))
    }

    pub fn exp(&self, x: f32) -> Result<f32> {
        match &self.tables {
            None => Ok(poly_exp(x)),
            Some(t) => t.exp.evaluate(x),
        }
    }

    pub fn log(&self, x: f32) -> Result<f32> {
        match &self.tables {
            None => Ok(poly_log(x)),
            Some(t) => t
                .log
                .as_ref()
                .ok_or_else(|| self.missing("log"))?
                .evaluate(x),
        }
    }

    pub fn sqrt(&self, x: f32) -> Result<f32> {
        match &self.tables {
            None => Ok(poly_sqrt(x)),
            Some(t) => t
                .sqrt
                .as_ref()
                .ok_or_else(|| self.missing("sqrt"))?
                .evaluate(x),
        }
    }

    pub fn cndf(&self, x: f32) -> Result<f32> {
        match &self.tables {
            None => Ok(poly_cndf(x)),
            Some(t) => t.cndf.as_ref().ok_or_else(|| self.missing("cndf"))?.eval(x),
        }
    }

    /// (call, put) by the closed form.
    pub fn price(&self, o: &OptionParams) -> Result<(f32, f32)> {
        let sqrt_t = self.sqrt(o.expiry)?;
        let vol_sqrt_t = mul(o.volatility, sqrt_t);
        let log_moneyness = self.log(div(o.spot, o.strike))?;
        let drift = mul(
            add(o.rate, mul(0.5, mul(o.volatility, o.volatility))),
            o.expiry,
        );
        let d1 = div(add(log_moneyness, drift), vol_sqrt_t);
        let d2 = add(d1, neg(vol_sqrt_t));
        let discounted_strike = mul(o.strike, self.exp(neg(mul(o.rate, o.expiry)))?);
        let (n1, n2) = (self.cndf(d1)?, self.cndf(d2)?);
        let call = add(mul(o.spot, n1), neg(mul(discounted_strike, n2)));
        let put = add(
            mul(discounted_strike, add(1.0, neg(n2))),
            neg(mul(o.spot, add(1.0, neg(n1)))),
        );
        Ok((call, put))
    }

    pub fn sigmoid(&self, x: f32) -> Result<f32> {
        Ok(div(1.0, add(1.0, self.exp(neg(x))?)))
    }

    /// Max-subtracted softmax of one vector.
    pub fn softmax(&self, xs: &[f32]) -> Result<Vec<f32>> {
        if xs.is_empty() {
            return Ok(Vec::new());
        }
        tally(Op::FloatAdd, xs.len() as u64 - 1);
        let max = xs.iter().copied().fold(f32::NEG_INFINITY, f32::max);
        let e = xs
            .iter()
            .map(|&x| self.exp(add(x, neg(max))))
            .collect::<Result<Vec<_>>>()?;
        let inv = div(1.0, pairwise_sum(&e));
        Ok(e.iter().map(|&v| mul(v, inv)).collect())
    }
}

/// Pairwise summation, error growing with log n.
pub fn pairwise_sum(xs: &[f32]) -> f32 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let (a, b) = xs.split_at(n / 2);
            add(pairwise_sum(a), pairwise_sum(b))
        }
    }
}

/// One European option.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionParams {
    pub spot: f32,
    pub strike: f32,
    pub rate: f32,
    pub volatility: f32,
    pub expiry: f32,
}

impl OptionParams {
    pub fn sample(s: &mut UniformSampler) -> Self {
        OptionParams {
            spot: s.sample(SPOT_RANGE.0, SPOT_RANGE.1),
            strike: s.sample(STRIKE_RANGE.0, STRIKE_RANGE.1),
            rate: s.sample(RATE_RANGE.0, RATE_RANGE.1),
            volatility: s.sample(VOLATILITY_RANGE.0, VOLATILITY_RANGE.1),
            expiry: s.sample(EXPIRY_RANGE.0, EXPIRY_RANGE.1),
        }
    }

    /// Double-precision (call, put).
    pub fn reference_price(&self) -> (f64, f64) {
        let (s, k, r, v, t) = (
            self.spot as f64,
            self.strike as f64,
            self.rate as f64,
            self.volatility as f64,
            self.expiry as f64,
        );
        let vst = v * t.sqrt();
        let d1 = ((s / k).ln() + (r + 0.5 * v * v) * t) / vst;
        let d2 = d1 - vst;
        let dk = k * (-r * t).exp();
        (
            s * cndf_reference(d1) - dk * cndf_reference(d2),
            dk * cndf_reference(-d2) - s * cndf_reference(-d1),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadResult {
    pub workload: WorkloadKind,
    pub variant: WorkloadVariant,
    pub n_elements: usize,
    pub seed: u64,
    pub rmse: f64,
    pub max_abs_err: f64,
    /// Softmax only: largest |Σ outputs - 1| over all vectors.
    pub max_sum_error: Option<f64>,
    /// Totals over the whole run, setup excluded.
    pub op_counts: OpCounts,
    pub memory_bytes: u64,
    pub setup_seconds: f64,
    pub wall_seconds: f64,
}

impl WorkloadResult {
    pub fn weighted_cost_per_element(&self, weights: &crate::costmodel::Weights) -> f64 {
        weighted_cost(&self.op_counts, weights) / self.n_elements.max(1) as f64
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::config("workloads need at least one element"));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn finish(
    kit: &WorkloadKit,
    workload: WorkloadKind,
    n: usize,
    seed: u64,
    stats: ErrorStats,
    max_sum_error: Option<f64>,
    op_counts: OpCounts,
    wall_seconds: f64,
) -> WorkloadResult {
    WorkloadResult {
        workload,
        variant: kit.variant,
        n_elements: n,
        seed,
        rmse: stats.rmse,
        max_abs_err: stats.max_abs_err,
        max_sum_error,
        op_counts,
        memory_bytes: kit.memory_bytes(),
        setup_seconds: kit.setup_seconds,
        wall_seconds,
    }
}

/// Prices `n` seeded options; RMSE is over both call and put prices.
pub fn run_blackscholes(n: usize, variant: WorkloadVariant, seed: u64) -> Result<WorkloadResult> {
    check_n(n)?;
    let kit = WorkloadKit::new(WorkloadKind::Blackscholes, variant)?;
    let mut sampler = UniformSampler::new(seed);
    let options: Vec<OptionParams> = (0..n).map(|_| OptionParams::sample(&mut sampler)).collect();
    let start = Instant::now();
    let (prices, counts) = with_counting(|| {
        options
            .iter()
            .map(|o| kit.price(o))
            .collect::<Result<Vec<_>>>()
    });
    let wall = start.elapsed().as_secs_f64();
    let prices = prices?;
    let stats = ErrorStats::from_pairs(options.iter().zip(&prices).flat_map(|(o, &(c, p))| {
        let (rc, rp) = o.reference_price();
        [(c as f64, rc), (p as f64, rp)]
    }));
    Ok(finish(
        &kit,
        WorkloadKind::Blackscholes,
        n,
        seed,
        stats,
        None,
        counts,
        wall,
    ))
}

pub fn run_sigmoid(n: usize, variant: WorkloadVariant, seed: u64) -> Result<WorkloadResult> {
    check_n(n)?;
    let kit = WorkloadKit::new(WorkloadKind::Sigmoid, variant)?;
    let xs = UniformSampler::new(seed).samples(ACTIVATION_RANGE.0, ACTIVATION_RANGE.1, n);
    let start = Instant::now();
    let (ys, counts) = with_counting(|| {
        xs.iter()
            .map(|&x| kit.sigmoid(x))
            .collect::<Result<Vec<_>>>()
    });
    let wall = start.elapsed().as_secs_f64();
    let ys = ys?;
    let stats = ErrorStats::from_pairs(
        xs.iter()
            .zip(&ys)
            .map(|(&x, &y)| (y as f64, 1.0 / (1.0 + (-(x as f64)).exp()))),
    );
    Ok(finish(
        &kit,
        WorkloadKind::Sigmoid,
        n,
        seed,
        stats,
        None,
        counts,
        wall,
    ))
}

fn softmax_reference(xs: &[f32]) -> Vec<f64> {
    let max = xs
        .iter()
        .map(|&x| x as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = xs.iter().map(|&x| (x as f64 - max).exp()).collect();
    let sum: f64 = e.iter().sum();
    e.iter().map(|v| v / sum).collect()
}

/// `n` inputs cut into vectors of [`SOFTMAX_VECTOR_LEN`]; the last may be shorter.
pub fn run_softmax(n: usize, variant: WorkloadVariant, seed: u64) -> Result<WorkloadResult> {
    check_n(n)?;
    let kit = WorkloadKit::new(WorkloadKind::Softmax, variant)?;
    let xs = UniformSampler::new(seed).samples(ACTIVATION_RANGE.0, ACTIVATION_RANGE.1, n);
    let start = Instant::now();
    let (ys, counts) = with_counting(|| {
        xs.chunks(SOFTMAX_VECTOR_LEN)
            .map(|v| kit.softmax(v))
            .collect::<Result<Vec<_>>>()
    });
    let wall = start.elapsed().as_secs_f64();
    let ys = ys?;
    let mut pairs = Vec::with_capacity(n);
    let mut max_sum_error = 0.0f64;
    for (v, y) in xs.chunks(SOFTMAX_VECTOR_LEN).zip(&ys) {
        let sum: f64 = y.iter().map(|&p| p as f64).sum();
        max_sum_error = max_sum_error.max((sum - 1.0).abs());
        pairs.extend(y.iter().map(|&p| p as f64).zip(softmax_reference(v)));
    }
    let stats = ErrorStats::from_pairs(pairs);
    Ok(finish(
        &kit,
        WorkloadKind::Softmax,
        n,
        seed,
        stats,
        Some(max_sum_error),
        counts,
        wall,
    ))
}

pub fn run_workload(
    kind: WorkloadKind,
    n: usize,
    variant: WorkloadVariant,
    seed: u64,
) -> Result<WorkloadResult> {
    match kind {
        WorkloadKind::Blackscholes => run_blackscholes(n, variant, seed),
        WorkloadKind::Sigmoid => run_sigmoid(n, variant, seed),
        WorkloadKind::Softmax => run_softmax(n, variant, seed),
    }
}

pub const WORKLOAD_COLUMNS: [&str; 25] = [
    "workload",
    "variant",
    "n_elements",
    "scale",
    "rmse",
    "max_abs_err",
    "max_sum_error",
    "int_add",
    "int_shift",
    "int_mul",
    "float_add",
    "float_mul",
    "float_div",
    "ldexp",
    "lut_lookup",
    "multiplications",
    "total_ops",
    "weighted_cost",
    "memory_bytes",
    "table_size",
    "setup_seconds",
    "wall_seconds",
    "rng",
    "seed",
    "weights",
];

pub fn write_workload_csv<W: Write>(
    out: W,
    results: &[WorkloadResult],
    options: &CsvOptions,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(WORKLOAD_COLUMNS)?;
    for r in results {
        let mut row = vec![
            r.workload.name().to_string(),
            r.variant.name().to_string(),
            r.n_elements.to_string(),
            "desk".to_string(),
            sci(r.rmse),
            sci(r.max_abs_err),
            r.max_sum_error.map(sci).unwrap_or_default(),
        ];
        row.extend(op_fields(&r.op_counts, r.n_elements));
        row.push(format!(
            "{}",
            r.op_counts.total_ops() as f64 / r.n_elements as f64
        ));
        row.push(format!("{}", r.weighted_cost_per_element(&options.weights)));
        row.push(r.memory_bytes.to_string());
        row.push(match r.variant {
            WorkloadVariant::PolynomialBaseline => String::new(),
            WorkloadVariant::CordicLut => format!("{CORDIC_LUT_ITERS} iterations"),
            _ => WORKLOAD_TABLE_SIZE.to_string(),
        });
        let timing = |t: f64| {
            if options.timing {
                sci(t)
            } else {
                String::new()
            }
        };
        row.push(timing(r.setup_seconds));
        row.push(timing(r.wall_seconds));
        row.push(RNG_NAME.to_string());
        row.push(r.seed.to_string());
        row.push(weights_field(&options.weights));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_workload_csv(
    results: &[WorkloadResult],
    path: impl AsRef<Path>,
    options: &CsvOptions,
) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_workload_csv(std::io::BufWriter::new(file), results, options)
}
