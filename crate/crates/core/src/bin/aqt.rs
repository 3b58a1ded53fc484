use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use aqt_core::cli::{self, BoundsArgs, CliError, Formula, RunOverrides};
use aqt_core::static_routing::sweep::{Shape, SweepConfig};
use aqt_core::strategies::Discipline;

#[derive(Parser)]
#[command(name = "aqt", version, about = "Adversarial queueing simulator")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario file and write trace.csv, packets.csv, phases.csv
    Run {
        file: PathBuf,
        #[arg(long)]
        max_steps: Option<u64>,
        /// Queueing discipline (plain) or inner discipline (interval)
        #[arg(long, value_name = "NAME")]
        strategy: Option<Discipline>,
        #[arg(long, value_enum)]
        improvement: Option<OnOff>,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Tabulate a bound series: line, tree, nonforward, theorem-time, theorem-packets
    Bounds {
        formula: String,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
        #[arg(long)]
        c3: Option<f64>,
        #[arg(long)]
        i_max: Option<u32>,
        #[arg(long)]
        log_base: Option<f64>,
        /// Extra `key=value` parameters, e.g. `r=0.5 b=4`
        params: Vec<String>,
    },
    /// Compare optimal and greedy makespans over all small static instances
    Sweep {
        #[arg(long, default_value_t = 4)]
        max_packets: usize,
        #[arg(long, default_value_t = 4)]
        max_edges: usize,
        #[arg(long, value_delimiter = ',', default_value = "line,tree")]
        shapes: Vec<Shape>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            file,
            max_steps,
            strategy,
            improvement,
            out,
        } => {
            let overrides = RunOverrides {
                max_steps,
                discipline: strategy,
                improvement: improvement.map(|v| matches!(v, OnOff::On)),
                out_dir: out,
            };
            let summary = cli::cmd_run(&file, &overrides)?;
            print!("{summary}");
        }
        Command::Bounds {
            formula,
            r,
            b,
            d,
            c1,
            c2,
            c3,
            i_max,
            log_base,
            params,
        } => {
            let formula: Formula = formula.parse()?;
            let mut args = BoundsArgs::default();
            for kv in &params {
                args.assign(kv)?;
            }
            let flags = [
                (r, &mut args.r),
                (b, &mut args.b),
                (d, &mut args.d),
                (c1, &mut args.c1),
                (c2, &mut args.c2),
                (c3, &mut args.c3),
                (log_base, &mut args.log_base),
            ];
            for (flag, slot) in flags {
                if let Some(v) = flag {
                    *slot = v;
                }
            }
            if let Some(n) = i_max {
                args.i_max = n;
            }
            let stdout = io::stdout();
            cli::cmd_bounds(formula, &args, stdout.lock())?;
        }
        Command::Sweep {
            max_packets,
            max_edges,
            shapes,
            out,
        } => {
            let config = SweepConfig {
                max_packets,
                max_edges,
                shapes,
            };
            let report = match out {
                Some(path) => {
                    let file = io::BufWriter::new(fs::File::create(&path)?);
                    let report = cli::cmd_sweep(&config, file)?;
                    println!("wrote {}", path.display());
                    report
                }
                None => cli::cmd_sweep(&config, io::stdout().lock())?,
            };
            eprintln!("{}", report.summary());
        }
    }
    io::stdout().flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
