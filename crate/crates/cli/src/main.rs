use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use sweeper_core::board::{parse_instance, Boundary};
use sweeper_core::cnf::{parse_cnf, Lit};
use sweeper_core::gmus::extract_gmus;
use sweeper_core::harness::{parse_densities, run_sweep, GameRow, SweepConfig};
use sweeper_core::percolation::{percolation_sweep, Connectivity, OccupancyMode, PercolationConfig};
use sweeper_core::player::{
    consistency_check, infer_step, kset_step, play_game_traced, run_game, PlayConfig, Policy, Schedule, Verdict,
};
use sweeper_core::sat::{solve, SolveResult};

#[derive(Parser)]
#[command(name = "sweeper", version, about = "Minesweeper inference, hardness and percolation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game and print its record as a CSV row.
    Play {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "sat")]
        policy: Policy,
        #[arg(long, default_value = "torus")]
        boundary: Boundary,
        #[arg(long, default_value = "sequential")]
        schedule: Schedule,
        /// Also write one JSON line per turn to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Play seeds `0..seeds` with k-set search and print one CSV row per game.
    Kset {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[arg(long, default_value = "torus")]
        boundary: Boundary,
    },
    /// Print the consistency verdict and every forced site of an instance file.
    Infer {
        file: PathBuf,
        #[arg(long, default_value = "sat")]
        policy: Policy,
    },
    /// Solve a DIMACS or GCNF file with every group active.
    Solve { file: PathBuf },
    /// Extract a grouped minimal unsatisfiable core for a pivot literal.
    Core {
        file: PathBuf,
        /// Pivot as a signed DIMACS literal.
        #[arg(long, allow_hyphen_values = true)]
        pivot: i64,
    },
    /// Average cluster size over a parameter grid.
    Percolation {
        #[arg(long)]
        mode: OccupancyMode,
        /// Comma list or inclusive `start:stop:step`.
        #[arg(long)]
        param_grid: String,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "4")]
        connectivity: Connectivity,
        #[arg(long, default_value = "open")]
        boundary: Boundary,
    },
    /// Run a density sweep described by a key = value config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
}

fn csv_out() -> csv::Writer<io::Stdout> {
    csv::Writer::from_writer(io::stdout())
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Safe => "safe",
        Verdict::Mine => "mine",
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Play { n, rho, seed, policy, boundary, schedule, trace } => {
            let config = PlayConfig { schedule, ..PlayConfig::default() };
            let record = if trace {
                let board = sweeper_core::board::generate_board(n, rho, seed, boundary, true)?;
                let mut err = io::stderr().lock();
                let mut r = play_game_traced(&board, policy, &config, |t| {
                    let _ = writeln!(err, "{}", serde_json::to_string(t).expect("trace serializes"));
                })?;
                r.rho = rho;
                r.seed = seed;
                r
            } else {
                run_game(n, rho, seed, boundary, policy, &config)?
            };
            let mut w = csv_out();
            w.serialize(GameRow::from_record(&record, policy, true))?;
            w.flush()?;
        }
        Command::Kset { k, n, rho, seeds, boundary } => {
            if k == 0 {
                bail!("k must be at least 1");
            }
            let policy = Policy::KSet(k);
            let config = PlayConfig::default();
            let mut w = csv_out();
            for seed in 0..seeds {
                let record = run_game(n, rho, seed, boundary, policy, &config)?;
                w.serialize(GameRow::from_record(&record, policy, true))?;
            }
            w.flush()?;
        }
        Command::Infer { file, policy } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let instance = parse_instance(&text)?;
            let consistent = consistency_check(&instance);
            println!("consistent {consistent}");
            if consistent {
                let inferences = match policy {
                    Policy::SatInference => infer_step(&instance, &PlayConfig::default())?,
                    Policy::KSet(k) => kset_step(&instance, k),
                };
                for inf in inferences {
                    let core = inf.core.map(|c| c.size.to_string()).unwrap_or_default();
                    println!("{} {} {}", inf.site, verdict_str(inf.verdict), core);
                }
            }
        }
        Command::Solve { file } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let formula = parse_cnf(&text)?;
            let all: Vec<_> = formula.group_ids().collect();
            match solve(&formula, &all, &[])? {
                SolveResult::Sat(model) => {
                    println!("s SATISFIABLE");
                    println!("{}", model.to_dimacs_line());
                }
                SolveResult::Unsat => println!("s UNSATISFIABLE"),
            }
        }
        Command::Core { file, pivot } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let formula = parse_cnf(&text)?;
            let Some(lit) = Lit::from_dimacs(pivot) else { bail!("pivot must be a non-zero literal") };
            if lit.var().index() >= formula.num_vars() as usize {
                bail!("pivot {pivot} is outside the formula's {} variables", formula.num_vars());
            }
            let result = extract_gmus(&formula, lit)?;
            // Group numbering as in the file, which starts at 1.
            let groups: Vec<String> = result.core.iter().map(|g| (g.0 + 1).to_string()).collect();
            println!("core {}", groups.join(" "));
            println!("C {}", result.size);
        }
        Command::Percolation { mode, param_grid, n, samples, seed, connectivity, boundary } => {
            let Some(params) = parse_densities(&param_grid) else { bail!("invalid parameter grid {param_grid:?}") };
            let cfg = PercolationConfig { connectivity, boundary, ..PercolationConfig::new(mode, params, n, samples, seed) };
            let mut w = csv_out();
            for r in percolation_sweep(&cfg)? {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Command::Sweep { config } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = SweepConfig::parse(&text)?;
            let points = cfg.sizes.len() * cfg.densities.len() * cfg.policies.len();
            match run_sweep(&cfg) {
                Ok(result) => {
                    let mut w = csv_out();
                    for r in &result.records {
                        w.serialize(r)?;
                    }
                    w.flush()?;
                    eprintln!("{} of {points} points complete ({} resumed)", result.records.len(), result.resumed_points);
                    if result.records.len() != points {
                        return Ok(ExitCode::FAILURE);
                    }
                }
                Err(e) => {
                    eprintln!("sweep stopped: {e}");
                    return Ok(ExitCode::FAILURE);
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
