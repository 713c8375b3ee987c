use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use schoolchoice_core::geninst::{build_instance, GenConfig};
use schoolchoice_core::oracle::{exhaustive_best_response, witness_instance};
use schoolchoice_core::trial::{default_soph_counts, stream, SweepConfig};
use schoolchoice_core::{Instance, Matching, Mechanism, StrategyKind};
use schoolchoice_sim::dump::dump_instance;
use schoolchoice_sim::output::{write_csv, write_records_csv, write_rows};
use schoolchoice_sim::run_sweep;

#[derive(Parser)]
#[command(
    name = "schoolchoice",
    version,
    about = "School choice manipulation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep sophisticated-student counts and write per-cell means as CSV.
    Sweep(SweepArgs),
    /// Show a student gaining from misreporting under Boston but not under DA.
    Demo,
    /// Generate one instance and print its plain-text dump.
    Instance {
        #[arg(long, default_value_t = 2000)]
        students: usize,
        #[arg(long, default_value_t = 20)]
        schools: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 2000)]
    students: usize,
    #[arg(long, default_value_t = 20)]
    schools: usize,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, value_delimiter = ',', default_value = "A,B,C")]
    strategies: Vec<StrategyKind>,
    #[arg(long, value_delimiter = ',', default_value = "boston,da")]
    mechanisms: Vec<Mechanism>,
    /// Comma-separated counts; defaults to 100, 200, ... up to the student count.
    #[arg(long, value_delimiter = ',')]
    soph_counts: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write every per-trial record to this CSV.
    #[arg(long)]
    per_trial: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn dedup<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v.dedup();
    v
}

fn sweep(args: SweepArgs) -> Result<()> {
    let cfg = SweepConfig {
        gen: GenConfig::with_size(args.students, args.schools),
        trials: args.trials,
        strategies: dedup(args.strategies),
        mechanisms: dedup(args.mechanisms),
        soph_counts: args
            .soph_counts
            .unwrap_or_else(|| default_soph_counts(args.students)),
        master_seed: args.seed,
    };
    cfg.validate().context("invalid sweep configuration")?;
    let output = run_sweep(&cfg, args.jobs)?;
    match &args.out {
        Some(path) => write_csv(&output.rows, path)?,
        None => write_rows(&output.rows, io::stdout().lock())?,
    }
    if let Some(path) = &args.per_trial {
        write_records_csv(&output.records, path)?;
    }
    Ok(())
}

fn describe(inst: &Instance, m: &Matching) -> String {
    inst.students()
        .map(|s| {
            let school = m.school_of(s);
            let rank = inst.true_prefs()[s.0].rank_of(school).unwrap_or(0);
            format!("{s}->{school} (true rank {rank})")
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn demo() -> Result<()> {
    let w = witness_instance();
    let inst = &w.instance;
    let mut out = io::stdout().lock();
    writeln!(out, "instance:")?;
    for line in dump_instance(inst).lines() {
        writeln!(out, "  {line}")?;
    }
    writeln!(
        out,
        "{} misreports {:?}",
        w.student,
        w.misreport
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
    )?;
    for mech in Mechanism::ALL {
        let truthful = mech.run(inst, inst.true_prefs())?;
        let manipulated = mech.run(inst, &w.manipulated_profile())?;
        let best = exhaustive_best_response(inst, |i, p| mech.run(i, p), w.student)?;
        writeln!(out, "{mech}:")?;
        writeln!(out, "  truthful:    {}", describe(inst, &truthful))?;
        writeln!(out, "  manipulated: {}", describe(inst, &manipulated))?;
        writeln!(
            out,
            "  best response for {}: {} (true rank {}, truthful rank {}){}",
            w.student,
            best.best_school,
            best.best_rank,
            best.truthful_rank,
            if best.is_profitable() {
                ", manipulable"
            } else {
                ""
            }
        )?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Demo => demo(),
        Command::Instance {
            students,
            schools,
            seed,
        } => {
            let inst = build_instance(&GenConfig::with_size(students, schools), &mut stream(seed))?;
            io::stdout()
                .lock()
                .write_all(dump_instance(&inst).as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
