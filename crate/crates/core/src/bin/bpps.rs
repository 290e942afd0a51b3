use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use bpps::approx::build_theorem3_instance;
use bpps::bench::{
    cmd_bench, cmd_gen, generate_suite, load_suite, benchmark_classes, solve, Algo, BenchRow, RowOutcome,
    SolveOptions, CSV_HEADER,
};
use bpps::bounds::root_bounds;
use bpps::generator::{generate_instance, GeneratorParams};
use bpps::io::{parse_instance, serialize_instance, serialize_solution};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bpps", version, about = "Bin packing with scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one instance, or the full benchmark suite with --suite.
    Gen {
        #[arg(long, required_unless_present = "suite")]
        n: Option<usize>,
        #[arg(long, required_unless_present = "suite")]
        d: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write all 120 class instances into --out (a directory).
        #[arg(long)]
        suite: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one instance file.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "vns")]
        algo: String,
        /// With `--algo bp`, `--warm vns` runs vns+bp.
        #[arg(long)]
        warm: Option<String>,
        #[command(flatten)]
        limits: Limits,
        /// Write the solution record here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run algorithms over a suite and print per-instance CSV.
    Bench {
        /// Directory of generated instances; defaults to regenerating classes.
        #[arg(long)]
        suite: Option<PathBuf>,
        /// Item counts of the classes to regenerate.
        #[arg(long, value_delimiter = ',', default_value = "10")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        replicates: usize,
        #[arg(long, value_delimiter = ',', default_value = "vns,bp")]
        algo: Vec<String>,
        #[command(flatten)]
        limits: Limits,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Per-instance CSV path; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Class summary CSV path.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Leave time columns empty so runs can be diffed.
        #[arg(long)]
        no_time: bool,
    },
    /// Print the continuous and DFF lower bounds.
    Bounds { instance: PathBuf },
    /// Write the worst-case family instance for a scenario count.
    #[command(name = "gen-theorem3")]
    GenTheorem3 {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        capacity: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Limits {
    /// Seed for the VNS generator (and base seed for regenerated suites).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// VNS time limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    tmax: f64,
    /// VNS non-improving iteration limit.
    #[arg(long, default_value_t = 500)]
    cmax: u64,
    /// Branch-and-price time limit in seconds.
    #[arg(long, default_value_t = 120.0)]
    tlimit: f64,
    /// Do not add warm-start bins to the initial column pool.
    #[arg(long)]
    no_warm_columns: bool,
}

impl Limits {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            seed: self.seed,
            t_max: self.tmax,
            c_max: self.cmax,
            t_limit: self.tlimit,
            warm_columns: !self.no_warm_columns,
        }
    }
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_instance(path: &PathBuf) -> Result<bpps::Instance, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Gen { n, d, seed, suite, out } => {
            if suite {
                let dir = out.ok_or("--suite needs --out DIR")?;
                let paths = cmd_gen(&benchmark_classes(seed), &dir).map_err(|e| e.to_string())?;
                eprintln!("wrote {} instances to {}", paths.len(), dir.display());
                return Ok(());
            }
            let params = GeneratorParams::new(n.unwrap_or(0), d.unwrap_or(0), seed);
            let inst = generate_instance(&params).map_err(|e| e.to_string())?;
            write_or_print(out.as_ref(), &serialize_instance(&inst))
        }
        Command::Solve {
            instance,
            algo,
            warm,
            limits,
            out,
        } => {
            let inst = read_instance(&instance)?;
            let mut algo: Algo = algo.parse().map_err(|e: bpps::bench::BenchError| e.to_string())?;
            match warm.as_deref() {
                None => {}
                Some("vns") if algo == Algo::Bp => algo = Algo::VnsBp,
                Some(other) => return Err(format!("--warm {other} is only supported as `--algo bp --warm vns`")),
            }
            let opts = limits.options();
            let outcome = solve(&inst, algo, &opts).map_err(|e| e.to_string())?;
            let row = BenchRow {
                class: instance
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("instance")
                    .to_string(),
                n: inst.num_items(),
                d: inst.num_scenarios(),
                seed: opts.seed,
                replicate: 0,
                algo,
                outcome: Some(RowOutcome {
                    ub: outcome.ub,
                    lb: outcome.lb,
                    time_s: outcome.time_s,
                    nodes: outcome.nodes,
                    cols: outcome.cols,
                    status: outcome.status,
                }),
            };
            println!("{CSV_HEADER}\n{}", row.to_csv(true));
            let record =
                serialize_solution(&inst, &outcome.solution, &outcome.metadata()).map_err(|e| e.to_string())?;
            write_or_print(out.as_ref(), &format!("{record}\n"))
        }
        Command::Bench {
            suite,
            n,
            replicates,
            algo,
            limits,
            workers,
            out,
            summary,
            no_time,
        } => {
            let algos: Vec<Algo> = algo
                .iter()
                .map(|a| a.parse())
                .collect::<Result<_, _>>()
                .map_err(|e: bpps::bench::BenchError| e.to_string())?;
            let instances = match suite {
                Some(dir) => load_suite(&dir).map_err(|e| e.to_string())?,
                None => {
                    let classes: Vec<_> = benchmark_classes(limits.seed)
                        .into_iter()
                        .filter(|c| n.contains(&c.n))
                        .map(|mut c| {
                            c.replicates = replicates;
                            c
                        })
                        .collect();
                    generate_suite(&classes).map_err(|e| e.to_string())?
                }
            };
            let report = cmd_bench(&instances, &algos, &limits.options(), workers).map_err(|e| e.to_string())?;
            write_or_print(out.as_ref(), &report.rows_csv(!no_time))?;
            match summary {
                Some(p) => write_or_print(Some(&p), &report.summary_csv(!no_time)),
                None => {
                    eprint!("{}", report.summary_csv(!no_time));
                    Ok(())
                }
            }
        }
        Command::Bounds { instance } => {
            let inst = read_instance(&instance)?;
            let rb = root_bounds(&inst);
            println!("lb_continuous {}", rb.continuous);
            match rb.dff_lambda {
                Some(l) => println!("lb_dff {} lambda {}", rb.dff, l.get()),
                None => println!("lb_dff {}", rb.dff),
            }
            println!("lb_root {}", rb.best());
            Ok(())
        }
        Command::GenTheorem3 { d, capacity, out } => {
            if d == 0 {
                return Err("--d must be positive".into());
            }
            let (inst, _) = build_theorem3_instance(d, capacity);
            write_or_print(out.as_ref(), &serialize_instance(&inst))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
