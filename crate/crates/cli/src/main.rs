use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use adaptenc::encoding::EncodingSet;
use adaptenc::experiments::{run_experiment, write_results, ExperimentConfig, ExperimentId, Overrides};
use adaptenc::model::to_qubo;
use adaptenc::rod::{
    analytic_selfweight_force, compliance, h1_relative_error, optimal_design, potential_energy_polynomial,
    FieldKind, FieldSolution,
};
use adaptenc::solvers::{solve_exact, SolverKind, EXACT_LIMIT};
use adaptenc::Error;

#[derive(Parser)]
#[command(name = "adaptenc", version, about = "Adaptive binary encoding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration (TOML).
    config: PathBuf,
    /// Directory for CSV output (default: out/<experiment id>).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Master seed; run r uses seed + r.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Solver backend.
    #[arg(long, value_parser = parse_solver)]
    solver: Option<SolverKind>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment and write its CSV files.
    Run(Common),
    /// Print exact best-approximation and classical reference values.
    Oracle(Common),
    /// Parse and check the configuration without running anything.
    Validate(Common),
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load(c: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::load(&c.config)?;
    cfg.apply(&Overrides {
        seed: c.seed,
        runs: c.runs,
        solver: c.solver,
    });
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(c: &Common, id: ExperimentId) -> PathBuf {
    c.out_dir
        .clone()
        .unwrap_or_else(|| Path::new("out").join(id.as_str().to_lowercase()))
}

fn run(c: &Common) -> Result<(), Error> {
    let cfg = load(c)?;
    let results = run_experiment(&cfg)?;
    for path in write_results(&results, &out_dir(c, cfg.experiment.id))? {
        println!("{}", path.display());
    }
    Ok(())
}

fn validate(c: &Common) -> Result<(), Error> {
    let cfg = load(c)?;
    println!(
        "{}: ok ({} runs, seed {}, solver {})",
        cfg.experiment.id.as_str(),
        cfg.experiment.runs,
        cfg.experiment.seed,
        cfg.solver.kind
    );
    Ok(())
}

fn oracle(c: &Common) -> Result<(), Error> {
    let cfg = load(c)?;
    if cfg.experiment.id.uses_piston() {
        let piston = cfg.piston;
        let p0 = piston.initial_pressure;
        let step = piston.analytic(p0)?;
        println!("single step at p = {p0}: u = {:?}", step.coeffs);
        let (p_star, u_star) = piston.fixed_point(1e-12, 10_000)?;
        println!("coupled fixed point: p = {p_star:.12}, u = {:?}", u_star.coeffs);
        let range = cfg.initial_range()?;
        let bits: Vec<usize> = if cfg.experiment.id == ExperimentId::E1 {
            cfg.sweep.bits.clone()
        } else {
            vec![cfg.encoding.bits]
        };
        let rod = piston.rod(p0);
        println!("best approximation of the single step over [{}, {}]:", range.lo, range.hi);
        for n in bits {
            if n * piston.num_elements > EXACT_LIMIT {
                println!("  N = {n}: skipped (too many variables)");
                continue;
            }
            let enc = EncodingSet::binary(&vec![range; piston.num_elements], n)?;
            let best = solve_exact(&to_qubo(&potential_energy_polynomial(&rod, &enc)?)?)?;
            let u = FieldSolution::from_free(&rod, FieldKind::Displacement, &enc.decode_all(&best.best_bits)?)?;
            println!("  N = {n}: error = {:.6e}", h1_relative_error(&u, &step)?);
        }
    } else {
        let rod = cfg.rod.rod();
        for d in rod.all_designs()? {
            println!("design {:?} areas {:?}: compliance = {:.12}", d.bits(), d.areas, compliance(&rod, &d)?);
        }
        let (best, c) = optimal_design(&rod)?;
        let f = analytic_selfweight_force(&rod, &best)?;
        println!("optimal design areas {:?} (compliance {c:.12})", best.areas);
        println!("static force: {:?}", f.coeffs);
        let free = rod.free_nodes().len();
        println!(
            "encoded force bits: {}, design bits: {}",
            free * cfg.encoding.bits,
            rod.design_elements().len()
        );
    }
    Ok(())
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
    let result = match &cli.command {
        Command::Run(c) => run(c),
        Command::Oracle(c) => oracle(c),
        Command::Validate(c) => validate(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
