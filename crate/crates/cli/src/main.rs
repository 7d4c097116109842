//! `dmaxwell` command line.

mod config;
mod error;
mod figures;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dmaxwell::analysis::{
    detect_maxima, growth_factor, significant_digit_agreement, Series,
};
use dmaxwell::engine::{self, CouplingTable, EngineState};
use dmaxwell::io::csv::{read_series_csv, write_run_record};
use dmaxwell::io::{lattice_file, table_file};
use dmaxwell::maxwell::{self, build_maxwell_table, CouplingFactor, Field, FieldState, StepBackend};
use dmaxwell::{Lattice, Probe, PrunePolicy, RunRecord, Site};

use config::{parse_scale, FactorSource, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "dmaxwell", version, about = "Discrete Maxwell equations on integer lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct FactorArgs {
    /// Coupling factor p.
    #[arg(long = "p", conflicts_with = "scale", allow_negative_numbers = true)]
    p: Option<f64>,
    /// Physical scale `c,dt,ds`; p = c*dt/ds.
    #[arg(long, value_parser = parse_scale)]
    scale: Option<FactorSource>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iterate and record probes.
    Run {
        #[command(flatten)]
        factor: FactorArgs,
        #[arg(long, default_value_t = 30)]
        steps: u64,
        /// `direct` (fused Maxwell kernel) or `table` (generic engine).
        #[arg(long, default_value = "direct")]
        backend: StepBackend,
        /// Keep at most this many sites per lattice after each step.
        #[arg(long)]
        prune_budget: Option<usize>,
        /// `LAT:x,y,z`; repeatable. Defaults to `Ex:0,0,0`.
        #[arg(long = "probe")]
        probes: Vec<Probe>,
        #[arg(long, default_value = "dmaxwell-out")]
        out: PathBuf,
        /// Custom coupling table instead of the Maxwell one.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Initial lattice files; repeatable. Defaults to the canonical state.
        #[arg(long)]
        init: Vec<PathBuf>,
        /// Also write every final lattice to `OUT/NAME.lat`.
        #[arg(long)]
        save_final: bool,
    },
    /// Print one probe series from a recorded run.
    Probe {
        /// Run directory or a probes CSV file.
        #[arg(long)]
        record: PathBuf,
        #[arg(long)]
        probe: Probe,
        /// Write the series here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the maxima of a recorded series and optionally its growth.
    Maxima {
        #[arg(long)]
        record: PathBuf,
        #[arg(long, default_value = "Ex:0,0,0")]
        probe: Probe,
        /// Growth window `lo,hi` in iterations.
        #[arg(long, value_parser = parse_window)]
        window: Option<(u64, u64)>,
    },
    /// Reproduce figure N (1 to 9) as SVG and CSV.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=9))]
        n: u8,
        #[arg(long, default_value = "figures")]
        out: PathBuf,
    },
    /// Compare a pruned against an unpruned run at one probe.
    ComparePrune {
        #[command(flatten)]
        factor: FactorArgs,
        #[arg(long, default_value_t = 150)]
        steps: u64,
        #[arg(long, default_value_t = 2_000_000)]
        prune_budget: usize,
        #[arg(long, default_value = "Ex:0,0,0")]
        probe: Probe,
    },
    /// Write the Maxwell coupling table for a given factor.
    Table {
        #[command(flatten)]
        factor: FactorArgs,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_window(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let lo = a.trim().parse().map_err(|_| format!("bad window start `{a}`"))?;
    let hi = b.trim().parse().map_err(|_| format!("bad window end `{b}`"))?;
    if lo > hi {
        return Err(format!("window start {lo} exceeds end {hi}"));
    }
    Ok((lo, hi))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dmaxwell: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run {
            factor,
            steps,
            backend,
            prune_budget,
            probes,
            out,
            table,
            init,
            save_final,
        } => {
            let probes = if probes.is_empty() {
                vec![Probe::new(Field::Ex.name(), Site::ORIGIN)]
            } else {
                probes
            };
            let cfg = RunConfig::new(
                factor.p,
                factor.scale,
                steps,
                backend,
                prune_budget,
                probes,
                out,
                table,
                init,
                save_final,
            )?;
            cmd_run(&cfg)
        }
        Command::Probe { record, probe, out } => cmd_probe(&record, &probe, out.as_deref()),
        Command::Maxima {
            record,
            probe,
            window,
        } => cmd_maxima(&record, &probe, window),
        Command::Figure { n, out } => {
            for path in figures::reproduce(n, &out)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::ComparePrune {
            factor,
            steps,
            prune_budget,
            probe,
        } => cmd_compare_prune(resolve_factor(&factor)?, steps, prune_budget, &probe),
        Command::Table { factor, out } => {
            let table = build_maxwell_table(resolve_factor(&factor)?);
            match out {
                Some(path) => table_file::save_table(&table, path)?,
                None => print!("{}", table_file::to_string(&table)),
            }
            Ok(())
        }
    }
}

fn resolve_factor(args: &FactorArgs) -> Result<CouplingFactor, CliError> {
    match (args.p, &args.scale) {
        (Some(p), None) => FactorSource::Direct(p).resolve(),
        (None, Some(s)) => s.resolve(),
        _ => Err(CliError::validation("exactly one of --p or --scale is required")),
    }
}

fn load_initial(paths: &[PathBuf]) -> Result<Vec<Lattice>, CliError> {
    paths
        .iter()
        .map(|p| lattice_file::load_lattice(p).map_err(CliError::from))
        .collect()
}

fn cmd_run(cfg: &RunConfig) -> Result<(), CliError> {
    let (record, finals) = match &cfg.table {
        Some(path) => {
            let table = table_file::load_table(path)?;
            let mut state = custom_state(&table, load_initial(&cfg.init)?)?;
            let rec = engine::run(&mut state, &table, cfg.steps, &cfg.probes, cfg.prune)?;
            (rec, state.into_lattices())
        }
        None => {
            let p = cfg.factor.expect("validated");
            let mut state = if cfg.init.is_empty() {
                FieldState::canonical()
            } else {
                FieldState::from_engine(EngineState::new(load_initial(&cfg.init)?)?)?
            };
            let rec = maxwell::run(&mut state, p, cfg.backend, cfg.steps, &cfg.probes, cfg.prune)?;
            (rec, state.into_engine().into_lattices())
        }
    };
    write_run_record(&record, &cfg.out)?;
    if cfg.save_final {
        for lat in &finals {
            lattice_file::save_lattice(lat, cfg.out.join(format!("{}.lat", lat.name())))?;
        }
    }
    print_summary(&record);
    Ok(())
}

/// The initial lattices plus an empty one for every table name they lack.
fn custom_state(table: &CouplingTable, mut lattices: Vec<Lattice>) -> Result<EngineState, CliError> {
    let iteration = lattices.first().map_or(0, Lattice::iteration);
    let mut names: BTreeSet<&str> = BTreeSet::new();
    for e in table.entries() {
        names.insert(&e.source);
        names.insert(&e.destination);
    }
    for name in names {
        if !lattices.iter().any(|l| l.name() == name) {
            let mut l = Lattice::new(name);
            l.set_iteration(iteration);
            lattices.push(l);
        }
    }
    Ok(EngineState::new(lattices)?)
}

fn print_summary(rec: &RunRecord) {
    let end = rec.start_iteration + rec.steps;
    for p in &rec.probes {
        if let Some(v) = p.values.last() {
            if v.im == 0.0 {
                println!("{} t={} {:.15e}", p.probe, end, v.re);
            } else {
                println!("{} t={} {:.15e}{:+.15e}i", p.probe, end, v.re, v.im);
            }
        }
    }
    if !rec.prune_reports.is_empty() {
        println!("prune events: {}", rec.prune_reports.len());
    }
}

fn find_series(record: &Path, probe: &Probe) -> Result<Series, CliError> {
    let file = if record.is_dir() {
        record.join("probes.csv")
    } else {
        record.to_path_buf()
    };
    let label = probe.to_string();
    read_series_csv(&file)?
        .into_iter()
        .find(|s| s.label == label)
        .ok_or_else(|| CliError::validation(format!("probe {label} not in {}", file.display())))
}

fn cmd_probe(record: &Path, probe: &Probe, out: Option<&Path>) -> Result<(), CliError> {
    let s = find_series(record, probe)?;
    match out {
        Some(path) => dmaxwell::io::csv::export_series_csv(&[s], path)?,
        None => {
            for (t, v) in s.points() {
                println!("{t} {v:.17e}");
            }
        }
    }
    Ok(())
}

fn cmd_maxima(record: &Path, probe: &Probe, window: Option<(u64, u64)>) -> Result<(), CliError> {
    let s = find_series(record, probe)?;
    let report = detect_maxima(&s)?;
    for (t, h) in &report.maxima {
        println!("{t} {h:.15e}");
    }
    if let Some(w) = window {
        let g = growth_factor(&s, w)?;
        println!(
            "growth {:.12} per step over {}..={} from {} maxima",
            g.per_step_factor, w.0, w.1, g.maxima
        );
    }
    Ok(())
}

fn cmd_compare_prune(p: CouplingFactor, steps: u64, budget: usize, probe: &Probe) -> Result<(), CliError> {
    let run_one = |policy: PrunePolicy| -> Result<RunRecord, CliError> {
        let mut state = FieldState::canonical();
        Ok(maxwell::run(
            &mut state,
            p,
            StepBackend::Direct,
            steps,
            std::slice::from_ref(probe),
            policy,
        )?)
    };
    let full = run_one(PrunePolicy::disabled())?;
    let pruned = run_one(PrunePolicy::budget(budget)?)?;
    let last = |r: &RunRecord| r.probes[0].values.last().map_or(0.0, |q| q.re);
    let (a, b) = (last(&full), last(&pruned));
    println!("{probe} t={steps}");
    println!("unpruned {a:.17e}");
    println!("pruned   {b:.17e}");
    println!("agreeing digits {}", significant_digit_agreement(a, b));
    println!("prune events {}", pruned.prune_reports.len());
    Ok(())
}
