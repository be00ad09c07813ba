use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sequd_core::augud::{construct_ud, run_augud, AugudConfig};
use sequd_core::bench;
use sequd_core::design::{cd2_squared, LevelDesign};
use sequd_core::harness::{compare_methods, run_experiment, ExperimentConfig, Method};
use sequd_core::Error;

/// Uniform designs and sequential uniform-design optimization.
///
/// Log verbosity is read from SEQUD_LOG (error, warn, info, debug, trace).
#[derive(Parser)]
#[command(name = "sequd-opt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config.
    Optimize(OptimizeArgs),
    /// Build, augment or score level designs.
    #[command(subcommand)]
    Design(DesignCommand),
    /// Inspect the benchmark functions.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Rank several experiments that share objective, budget and seeds.
    Compare(CompareArgs),
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    parallelism: Option<usize>,
    /// Concurrent repetitions.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent searches; the best one is kept.
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write the design here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SearchArgs {
    fn augud(&self) -> AugudConfig {
        AugudConfig {
            restarts: self.restarts,
            ..AugudConfig::default().with_seed(self.seed)
        }
    }
}

#[derive(Subcommand)]
enum DesignCommand {
    /// Construct a uniform design U_n(q^s).
    Generate {
        #[arg(long)]
        runs: usize,
        #[arg(long)]
        factors: usize,
        #[arg(long)]
        levels: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Add runs to an existing design.
    Augment {
        /// Existing design, CSV of levels or JSON.
        #[arg(long)]
        fixed: PathBuf,
        #[arg(long)]
        runs: usize,
        /// Level count; required for CSV input.
        #[arg(long)]
        levels: Option<usize>,
        /// Emit existing and new runs together.
        #[arg(long)]
        combined: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Print the centered L2 discrepancy of a design.
    Evaluate {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        levels: Option<usize>,
    },
}

#[derive(Subcommand)]
enum BenchCommand {
    /// List functions with dimension, domain and known optimum.
    List,
    /// Evaluate a function at a point given in its own coordinates.
    Eval {
        #[arg(long)]
        name: String,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, num_args = 2.., required = true)]
    configs: Vec<PathBuf>,
    /// Directory for ranks.csv and pairs.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Objective(_) => 3,
        Error::Io { .. } => 1,
        _ => 2,
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(design: &LevelDesign, format: Format) -> String {
    match format {
        Format::Csv => design.to_csv(),
        Format::Json => design.to_json() + "\n",
    }
}

fn optimize(args: OptimizeArgs) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::read_file(&args.config)?;
    if let Some(m) = args.method {
        cfg.method = m;
    }
    if let Some(b) = args.budget {
        cfg.budget = b;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.reps {
        cfg.repetitions = r;
    }
    if let Some(p) = args.parallelism {
        cfg.parallelism = p;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(o) = args.out {
        cfg.output = Some(o);
    }
    let out = run_experiment(&cfg)?;
    let s = &out.summary;
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| x.to_string());
    println!(
        "{} on {}: {} repetitions, {} trials, best {}, mean best {}, std {}",
        s.name,
        s.objective,
        s.repetitions,
        s.total_trials,
        fmt(s.best),
        fmt(s.mean_best),
        fmt(s.std_best)
    );
    if let Some(inc) = &s.incumbent {
        println!("incumbent {inc}");
    }
    if let Some(dir) = &cfg.output {
        println!("wrote {}", dir.join("summary.json").display());
    }
    Ok(())
}

fn design(cmd: DesignCommand) -> Result<(), Error> {
    match cmd {
        DesignCommand::Generate {
            runs,
            factors,
            levels,
            search,
        } => {
            let res = construct_ud(runs, factors, levels, &search.augud())?;
            eprintln!(
                "CD2 {} (squared {})",
                res.combined_cd2, res.combined_cd2_squared
            );
            write_output(search.out.as_deref(), &render(&res.design, search.format))
        }
        DesignCommand::Augment {
            fixed,
            runs,
            levels,
            combined,
            search,
        } => {
            let fixed = LevelDesign::read_file(&fixed, levels)?;
            let q = fixed.level_count();
            let res = run_augud(&fixed, runs, fixed.factors(), q, &search.augud())?;
            eprintln!(
                "combined CD2 {} (squared {})",
                res.combined_cd2, res.combined_cd2_squared
            );
            let design = if combined {
                fixed.stack(&res.design)?
            } else {
                res.design
            };
            write_output(search.out.as_deref(), &render(&design, search.format))
        }
        DesignCommand::Evaluate { design, levels } => {
            let d = LevelDesign::read_file(&design, levels)?;
            let sq = cd2_squared(&d.to_unit())?;
            println!("{}", sq.sqrt());
            eprintln!(
                "runs {} factors {} levels {} balanced {} CD2 squared {sq}",
                d.runs(),
                d.factors(),
                d.level_count(),
                d.is_balanced()
            );
            Ok(())
        }
    }
}

fn bench_cmd(cmd: BenchCommand) -> Result<(), Error> {
    match cmd {
        BenchCommand::List => {
            println!("name\tdim\tdirection\tdomain\toptimum");
            for f in bench::registry() {
                let domain: Vec<String> = f.domain.iter().map(|(lo, hi)| format!("[{lo}, {hi}]")).collect();
                let optimum = f.optimum.as_ref().map_or("-".to_string(), |o| o.value.to_string());
                let dir = serde_json::to_value(f.direction).expect("direction serializes");
                println!(
                    "{}\t{}\t{}\t{}\t{}",
                    f.name,
                    f.dimension(),
                    dir.as_str().unwrap_or_default(),
                    domain.join(" x "),
                    optimum
                );
            }
            Ok(())
        }
        BenchCommand::Eval { name, point } => {
            let f = bench::lookup(&name)?;
            let x = point
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad coordinate {:?}", t.trim())))
                })
                .collect::<Result<Vec<f64>, Error>>()?;
            if x.len() != f.dimension() {
                return Err(Error::DimensionMismatch {
                    expected: f.dimension(),
                    found: x.len(),
                });
            }
            println!("{:.16e}", f.evaluate(&x));
            Ok(())
        }
    }
}

fn compare(args: CompareArgs) -> Result<(), Error> {
    let cfgs = args
        .configs
        .iter()
        .map(|p| ExperimentConfig::read_file(p))
        .collect::<Result<Vec<_>, Error>>()?;
    let cmp = compare_methods(&cfgs)?;
    print!("{}", cmp.rank_csv());
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
        write_output(Some(&dir.join("ranks.csv")), &cmp.rank_csv())?;
        write_output(Some(&dir.join("pairs.csv")), &cmp.pairs_csv())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SEQUD_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Optimize(args) => optimize(args),
        Command::Design(cmd) => design(cmd),
        Command::Bench(cmd) => bench_cmd(cmd),
        Command::Compare(args) => compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
