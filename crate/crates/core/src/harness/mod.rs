//! Accuracy sweeps, workloads and CSV reports.
//!
//! Inputs come from [`UniformSampler`], a seeded xoshiro256++ stream, so a
//! report depends only on its configuration and seed. Errors are measured
//! in double precision against the platform math library.

mod baseline;
mod crossover;
mod workloads;

use std::io::Write;
use std::path::Path;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::api::{
    build_evaluator, supported, unsupported, Evaluator, EvaluatorConfig, FunctionId, MethodId,
};
use crate::costmodel::{weighted_cost, OpCounts, PhaseCounts, Weights};
use crate::error::{Error, Result};

pub use baseline::{
    cndf_reference, poly_cndf, poly_exp, poly_log, poly_sqrt, polynomial_baseline, BaselineFunction,
};
pub use crossover::{crossover_point, CostPoint, DEFAULT_CLOCK_HZ};
pub use workloads::{
    emit_workload_csv, pairwise_sum, run_blackscholes, run_sigmoid, run_softmax, run_workload,
    write_workload_csv, Cndf, OptionParams, WorkloadKind, WorkloadKit, WorkloadResult,
    WorkloadVariant, SOFTMAX_VECTOR_LEN, WORKLOAD_COLUMNS, WORKLOAD_TABLE_SIZE,
};

/// Algorithm identifier written next to every seed.
pub const RNG_NAME: &str = "xoshiro256++";

/// Inputs per sweep configuration.
pub const DEFAULT_SAMPLES: usize = 1 << 16;

/// Seeded uniform inputs.
#[derive(Debug, Clone)]
pub struct UniformSampler {
    rng: Xoshiro256PlusPlus,
}

impl UniformSampler {
    pub fn new(seed: u64) -> Self {
        UniformSampler {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * 2f64.powi(-53)
    }

    /// Uniform single-precision value in [lo, hi).
    pub fn sample(&mut self, lo: f64, hi: f64) -> f32 {
        let x = (lo + (hi - lo) * self.unit()) as f32;
        if x as f64 >= hi {
            x.next_down()
        } else if (x as f64) < lo {
            x.next_up()
        } else {
            x
        }
    }

    pub fn samples(&mut self, lo: f64, hi: f64, n: usize) -> Vec<f32> {
        (0..n).map(|_| self.sample(lo, hi)).collect()
    }
}

/// Distance from a double to its nearest neighbour among single floats
/// of the same magnitude.
pub fn f32_ulp(r: f64) -> f64 {
    let a = r.abs();
    if !a.is_finite() {
        return f64::NAN;
    }
    let min_exp = -126;
    let e = if a == 0.0 {
        min_exp
    } else {
        (a.log2().floor() as i32).max(min_exp)
    };
    2f64.powi(e - 23)
}

/// Error statistics of one set of outputs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorStats {
    pub rmse: f64,
    pub max_abs_err: f64,
    /// Largest error in units of the single-precision spacing at the reference.
    pub ulp_err: f64,
}

impl ErrorStats {
    pub fn from_pairs<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> Self {
        let (mut sq, mut n, mut max, mut ulp) = (0.0f64, 0usize, 0.0f64, 0.0f64);
        for (y, r) in pairs {
            let e = (y - r).abs();
            sq += e * e;
            n += 1;
            max = max.max(e);
            ulp = ulp.max(e / f32_ulp(r));
        }
        if n == 0 {
            return ErrorStats::default();
        }
        ErrorStats {
            rmse: (sq / n as f64).sqrt(),
            max_abs_err: max,
            ulp_err: ulp,
        }
    }
}

/// Errors of any single-precision evaluator over seeded uniform inputs.
pub fn measure(
    f: impl Fn(f32) -> Result<f32>,
    reference: impl Fn(f64) -> f64,
    domain: (f64, f64),
    samples: usize,
    seed: u64,
) -> Result<ErrorStats> {
    let xs = UniformSampler::new(seed).samples(domain.0, domain.1, samples);
    let ys = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    Ok(ErrorStats::from_pairs(
        xs.iter()
            .zip(&ys)
            .map(|(&x, &y)| (y as f64, reference(x as f64))),
    ))
}

/// One configuration of an accuracy sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    pub function: FunctionId,
    pub method: MethodId,
    pub size_or_iters: u32,
    pub samples: usize,
    pub seed: u64,
    pub rmse: f64,
    pub max_abs_err: f64,
    pub ulp_err: f64,
    /// Totals over all samples.
    pub op_counts: PhaseCounts,
    pub memory_bytes: u64,
    pub setup_entries: u64,
    pub setup_seconds: f64,
}

impl AccuracyReport {
    /// Ops summed over both phases and all samples.
    pub fn total_counts(&self) -> OpCounts {
        self.op_counts.total()
    }

    pub fn weighted_cost_per_call(&self, weights: &Weights) -> f64 {
        weighted_cost(&self.op_counts.total(), weights) / self.samples.max(1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub samples: usize,
    /// Sample interval; the function's default when `None`.
    pub domain: Option<(f64, f64)>,
    pub start_bits: u32,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            samples: DEFAULT_SAMPLES,
            domain: None,
            start_bits: crate::api::DEFAULT_START_BITS,
        }
    }
}

/// Measures one built evaluator over `samples` seeded inputs.
pub fn evaluate_report(
    ev: &Evaluator,
    samples: usize,
    seed: u64,
    domain: Option<(f64, f64)>,
) -> Result<AccuracyReport> {
    let (lo, hi) = domain.unwrap_or_else(|| ev.sample_domain());
    let xs = UniformSampler::new(seed).samples(lo, hi, samples);
    let (ys, counts) = ev.evaluate_batch_phases(&xs)?;
    let f = ev.function();
    let stats = ErrorStats::from_pairs(
        xs.iter()
            .zip(&ys)
            .map(|(&x, &y)| (y as f64, f.reference(x as f64))),
    );
    Ok(AccuracyReport {
        function: f,
        method: ev.method(),
        size_or_iters: ev.config().size_or_iters,
        samples,
        seed,
        rmse: stats.rmse,
        max_abs_err: stats.max_abs_err,
        ulp_err: stats.ulp_err,
        op_counts: counts,
        memory_bytes: ev.setup().bytes,
        setup_entries: ev.setup().entries,
        setup_seconds: ev.setup().wall_seconds,
    })
}

/// One report per size (or iteration count), in the order given.
pub fn rmse_sweep(
    function: FunctionId,
    method: MethodId,
    sizes: &[u32],
    seed: u64,
) -> Result<Vec<AccuracyReport>> {
    rmse_sweep_with(function, method, sizes, seed, &SweepOptions::default())
}

/// [`rmse_sweep`] with explicit sample count, domain and CORDIC+LUT width.
///
/// Configurations run on separate threads. Each one is deterministic on
/// its own and results are returned in input order.
pub fn rmse_sweep_with(
    function: FunctionId,
    method: MethodId,
    sizes: &[u32],
    seed: u64,
    options: &SweepOptions,
) -> Result<Vec<AccuracyReport>> {
    let run = |size: u32| -> Result<AccuracyReport> {
        let config =
            EvaluatorConfig::new(function, method, size).with_start_bits(options.start_bits);
        let ev = build_evaluator(&config)?;
        evaluate_report(&ev, options.samples, seed, options.domain)
    };
    method.validate()?;
    if !supported(function, method.kind) {
        return Err(unsupported(function, method));
    }
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut reports = Vec::with_capacity(sizes.len());
    for chunk in sizes.chunks(workers) {
        let results: Vec<Result<AccuracyReport>> = std::thread::scope(|s| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|&size| s.spawn(move || run(size)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        });
        for r in results {
            reports.push(r?);
        }
    }
    Ok(reports)
}

/// Output switches for CSV reports.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CsvOptions {
    pub weights: Weights,
    /// Fill wall-clock columns. Off by default so reruns are byte-identical.
    pub timing: bool,
}

pub const SWEEP_COLUMNS: [&str; 27] = [
    "function",
    "method",
    "format",
    "size_or_iters",
    "samples",
    "rmse",
    "max_abs_err",
    "ulp_err",
    "int_add",
    "int_shift",
    "int_mul",
    "float_add",
    "float_mul",
    "float_div",
    "ldexp",
    "lut_lookup",
    "multiplications",
    "kernel_ops",
    "range_ops",
    "total_ops",
    "weighted_cost",
    "memory_bytes",
    "setup_entries",
    "setup_seconds",
    "rng",
    "seed",
    "weights",
];

pub(crate) fn per(n: u64, count: usize) -> String {
    format!("{}", n as f64 / count.max(1) as f64)
}

pub(crate) fn sci(x: f64) -> String {
    format!("{x:e}")
}

pub(crate) fn op_fields(counts: &OpCounts, count: usize) -> Vec<String> {
    [
        counts.int_add,
        counts.int_shift,
        counts.int_mul,
        counts.float_add,
        counts.float_mul,
        counts.float_div,
        counts.ldexp_op,
        counts.lut_lookup,
        counts.multiplications(),
    ]
    .iter()
    .map(|&n| per(n, count))
    .collect()
}

/// Weight profile in one cell, `key=value` pairs joined by `;`.
pub(crate) fn weights_field(w: &Weights) -> String {
    w.to_string()
        .lines()
        .map(|l| l.replace(' ', ""))
        .collect::<Vec<_>>()
        .join(";")
}

/// Writes a header and one row per report.
pub fn write_csv<W: Write>(out: W, reports: &[AccuracyReport], options: &CsvOptions) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for r in reports {
        let total = r.op_counts.total();
        let mut row = vec![
            r.function.name().to_string(),
            r.method.kind.name().to_string(),
            r.method.format.name().to_string(),
            r.size_or_iters.to_string(),
            r.samples.to_string(),
            sci(r.rmse),
            sci(r.max_abs_err),
            format!("{}", r.ulp_err),
        ];
        row.extend(op_fields(&total, r.samples));
        row.push(per(r.op_counts.kernel.total_ops(), r.samples));
        row.push(per(r.op_counts.range.total_ops(), r.samples));
        row.push(per(total.total_ops(), r.samples));
        row.push(format!("{}", r.weighted_cost_per_call(&options.weights)));
        row.push(r.memory_bytes.to_string());
        row.push(r.setup_entries.to_string());
        row.push(if options.timing {
            sci(r.setup_seconds)
        } else {
            String::new()
        });
        row.push(RNG_NAME.to_string());
        row.push(r.seed.to_string());
        row.push(weights_field(&options.weights));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(reports: &[AccuracyReport], path: impl AsRef<Path>) -> Result<()> {
    emit_csv_with(reports, path, &CsvOptions::default())
}

pub fn emit_csv_with(
    reports: &[AccuracyReport],
    path: impl AsRef<Path>,
    options: &CsvOptions,
) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), reports, options)
}

/// `a,b,c` or `lo..hi` (inclusive) or `2^lo..2^hi`, as used on the command line.
pub fn parse_sizes(text: &str) -> Result<Vec<u32>> {
    let bad = || Error::config(format!("cannot parse size list {text:?}"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let pow = |s: &str| s.trim().strip_prefix("2^").map(str::to_string);
            let (a, b, power) = match (pow(a), pow(b)) {
                (Some(a), Some(b)) => (a, b, true),
                (None, None) => (a.trim().to_string(), b.trim().to_string(), false),
                _ => return Err(bad()),
            };
            let (a, b): (u32, u32) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            if a > b || (power && b > 31) {
                return Err(bad());
            }
            out.extend((a..=b).map(|v| if power { 1u32 << v } else { v }));
        } else if let Some(e) = part.strip_prefix("2^") {
            let e: u32 = e.parse().map_err(|_| bad())?;
            if e > 31 {
                return Err(bad());
            }
            out.push(1 << e);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::api::MethodKind;
    use crate::lut::build_mlut;

    #[test]
    fn sampler_is_seeded_and_bounded() {
        let a = UniformSampler::new(7).samples(-1.0, 1.0, 1000);
        let b = UniformSampler::new(7).samples(-1.0, 1.0, 1000);
        assert_eq!(a, b);
        assert!(a.iter().all(|&x| (-1.0..1.0).contains(&x)));
        assert_ne!(a, UniformSampler::new(8).samples(-1.0, 1.0, 1000));
        let mean: f64 = a.iter().map(|&x| x as f64).sum::<f64>() / 1000.0;
        assert!(mean.abs() < 0.1);
    }

    #[test]
    fn constant_table_has_zero_error() {
        let t = build_mlut(|_| 0.75, 0.0, 1.0, 64, true).unwrap();
        let s = measure(|x| t.query(x), |_| 0.75, (0.0, 1.0), 4096, 1).unwrap();
        assert_eq!(s, ErrorStats::default());
    }

    #[test]
    fn ulp_spacing() {
        assert_eq!(f32_ulp(1.0), f32::EPSILON as f64);
        assert_eq!(f32_ulp(1.5), f32::EPSILON as f64);
        assert_eq!(f32_ulp(0.25), f32::EPSILON as f64 / 4.0);
        assert_eq!(f32_ulp(0.0), 2f64.powi(-149));
    }

    #[test]
    fn llut_sine_sweep_is_monotone() {
        let sizes: Vec<u32> = (8..=18).map(|e| 1 << e).collect();
        let reports = rmse_sweep(
            FunctionId::Sin,
            MethodId::float(MethodKind::LLutInterp),
            &sizes,
            11,
        )
        .unwrap();
        for w in reports.windows(2) {
            assert!(w[1].rmse <= w[0].rmse, "{} then {}", w[0].rmse, w[1].rmse);
            assert_eq!(w[0].op_counts, w[1].op_counts);
        }
        for r in &reports {
            assert!(r.rmse <= r.max_abs_err && r.rmse >= 0.0);
        }
    }

    #[test]
    fn cordic_sine_sweep_decreases_to_floor() {
        let iters: Vec<u32> = (8..=30).collect();
        let reports = rmse_sweep_with(
            FunctionId::Sin,
            MethodId::float(MethodKind::Cordic),
            &iters,
            3,
            &SweepOptions {
                samples: 1 << 12,
                ..Default::default()
            },
        )
        .unwrap();
        for w in reports.windows(2) {
            assert!(w[1].total_counts().total_ops() > w[0].total_counts().total_ops());
        }
        // Halving per iteration until single precision takes over.
        for w in reports.windows(2).take(12) {
            assert!(w[1].rmse < w[0].rmse);
        }
        assert!(reports.last().unwrap().rmse < 1e-7);
    }

    #[test]
    fn unsupported_is_propagated() {
        let e = rmse_sweep(
            FunctionId::Gelu,
            MethodId::float(MethodKind::Cordic),
            &[20],
            0,
        );
        assert!(matches!(e, Err(Error::UnsupportedCombination { .. })));
    }

    #[test]
    fn csv_shape_and_determinism() {
        let mut empty = Vec::new();
        write_csv(&mut empty, &[], &CsvOptions::default()).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().lines().count(), 1);

        let once = || {
            let r = rmse_sweep_with(
                FunctionId::Exp,
                MethodId::float(MethodKind::MLutInterp),
                &[256],
                5,
                &SweepOptions {
                    samples: 512,
                    ..Default::default()
                },
            )
            .unwrap();
            let mut buf = Vec::new();
            write_csv(&mut buf, &r, &CsvOptions::default()).unwrap();
            buf
        };
        let a = once();
        assert_eq!(a, once());
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().count(), 2);
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        assert_eq!(header, SWEEP_COLUMNS);
        assert!(text.contains(RNG_NAME));
    }

    #[test]
    fn size_lists() {
        assert_eq!(parse_sizes("8,16, 32").unwrap(), vec![8, 16, 32]);
        assert_eq!(parse_sizes("8..10").unwrap(), vec![8, 9, 10]);
        assert_eq!(parse_sizes("2^8..2^10").unwrap(), vec![256, 512, 1024]);
        assert_eq!(parse_sizes("2^4,3").unwrap(), vec![16, 3]);
        assert!(parse_sizes("").is_err());
        assert!(parse_sizes("4..2").is_err());
        assert!(parse_sizes("2^40").is_err());
    }
}
