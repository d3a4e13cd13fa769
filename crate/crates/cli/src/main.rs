//! Command-line driver for accuracy sweeps, workloads and table files.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use pimfunc::api::{
    default_sample_domain, supported, FunctionId, MethodId, MethodKind, NumberFormat,
};
use pimfunc::harness::{self, CsvOptions, SweepOptions, WorkloadKind, WorkloadVariant};
use pimfunc::lut::format::{load_tables, save_tables, TableRecord};
use pimfunc::{build_evaluator, EvaluatorConfig, Weights};

#[derive(Parser)]
#[command(
    name = "pimfunc",
    version,
    about = "Transcendental function accuracy and cost study"
)]
struct Cli {
    /// Cost weight profile (`key = value` lines).
    #[arg(long, global = true, value_name = "FILE")]
    weights: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Accuracy, op counts and memory for one method over several sizes.
    Sweep(SweepArgs),
    /// Run Black-Scholes, sigmoid or softmax.
    Workload(WorkloadArgs),
    /// Write or read serialized tables.
    #[command(subcommand)]
    Table(TableCommand),
    /// Print the function × method support matrix.
    Support,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    function: FunctionId,
    #[arg(long)]
    method: MethodKind,
    #[arg(long, default_value = "float")]
    format: NumberFormat,
    /// Sizes or iteration counts: `a,b,c`, `lo..hi` or `2^lo..2^hi`.
    #[arg(long)]
    sizes: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = harness::DEFAULT_SAMPLES)]
    samples: usize,
    /// CORDIC+LUT address bits.
    #[arg(long, default_value_t = pimfunc::api::DEFAULT_START_BITS)]
    start_bits: u32,
    /// Fill the setup time column (makes output run-dependent).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WorkloadArgs {
    #[arg(long)]
    name: WorkloadKind,
    #[arg(long)]
    variant: WorkloadVariant,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum TableCommand {
    /// Build the tables for a configuration and write them.
    Dump {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        function: FunctionId,
        #[arg(long)]
        method: MethodKind,
        #[arg(long, default_value = "float")]
        format: NumberFormat,
        #[arg(long, default_value_t = 1 << 12)]
        size: u32,
    },
    /// Read a table file and list its records.
    Load {
        #[arg(long)]
        path: PathBuf,
    },
}

fn weights(cli: &Cli) -> Result<Weights> {
    match &cli.weights {
        Some(p) => {
            Weights::from_file(p).with_context(|| format!("reading weights from {}", p.display()))
        }
        None => Ok(Weights::default()),
    }
}

fn sweep(args: &SweepArgs, weights: Weights) -> Result<()> {
    let method = MethodId {
        kind: args.method,
        format: args.format,
    };
    let sizes = harness::parse_sizes(&args.sizes)?;
    let options = SweepOptions {
        samples: args.samples,
        domain: None,
        start_bits: args.start_bits,
    };
    let reports = harness::rmse_sweep_with(args.function, method, &sizes, args.seed, &options)?;
    let csv = CsvOptions {
        weights,
        timing: args.timing,
    };
    harness::emit_csv_with(&reports, &args.out, &csv)
        .with_context(|| format!("writing {}", args.out.display()))?;
    let (lo, hi) = default_sample_domain(args.function, args.method);
    eprintln!(
        "{} {} on [{lo}, {hi}): {} configurations written to {}",
        args.function,
        method,
        reports.len(),
        args.out.display()
    );
    Ok(())
}

fn workload(args: &WorkloadArgs, weights: Weights) -> Result<()> {
    let result = harness::run_workload(args.name, args.n, args.variant, args.seed)?;
    let csv = CsvOptions {
        weights,
        timing: args.timing,
    };
    harness::emit_workload_csv(std::slice::from_ref(&result), &args.out, &csv)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!(
        "{} {} n={}: rmse={:e}, {:.1} weighted ops per element",
        args.name,
        args.variant,
        args.n,
        result.rmse,
        result.weighted_cost_per_element(&weights)
    );
    Ok(())
}

fn describe(record: &TableRecord) -> String {
    let function = FunctionId::from_tag(record.function_tag()).map_or("untagged", FunctionId::name);
    format!(
        "{:<10} {:<8} {:>9} entries {:>10} bytes",
        record.kind_name(),
        function,
        record.entry_count(),
        record.memory_bytes()
    )
}

fn table(cmd: &TableCommand) -> Result<()> {
    match cmd {
        TableCommand::Dump {
            path,
            function,
            method,
            format,
            size,
        } => {
            let config = EvaluatorConfig::new(
                *function,
                MethodId {
                    kind: *method,
                    format: *format,
                },
                *size,
            );
            let ev = build_evaluator(&config)?;
            let records = ev.tables();
            if records.is_empty() {
                anyhow::bail!("{method} keeps no serializable tables");
            }
            save_tables(path, &records).with_context(|| format!("writing {}", path.display()))?;
            for r in &records {
                println!("{}", describe(r));
            }
        }
        TableCommand::Load { path } => {
            let records =
                load_tables(path).with_context(|| format!("reading {}", path.display()))?;
            for r in &records {
                println!("{}", describe(r));
            }
        }
    }
    Ok(())
}

fn support() {
    print!("{:<22}", "");
    for f in FunctionId::ALL {
        print!("{:>6}", f.name());
    }
    println!();
    for m in MethodKind::ALL {
        print!("{:<22}", m.label());
        for f in FunctionId::ALL {
            print!("{:>6}", if supported(f, m) { "x" } else { "." });
        }
        println!();
    }
}

fn run(cli: &Cli) -> Result<()> {
    let weights = weights(cli)?;
    match &cli.command {
        Command::Sweep(args) => sweep(args, weights),
        Command::Workload(args) => workload(args, weights),
        Command::Table(cmd) => table(cmd),
        Command::Support => {
            support();
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let unsupported = e.chain().any(|c| {
                matches!(
                    c.downcast_ref::<pimfunc::Error>(),
                    Some(pimfunc::Error::UnsupportedCombination { .. })
                )
            });
            ExitCode::from(if unsupported { 2 } else { 1 })
        }
    }
}
