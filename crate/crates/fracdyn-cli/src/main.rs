//! Command-line front end: grid/problem construction from config files,
//! power-function tabulation, solving, Gronwall bounding, dependence
//! certification, and the seeded verification suite.
//!
//! Exit status: 0 success, 1 numerical failure (non-convergence, truncation,
//! bound violation), 2 configuration or I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use fracdyn::config::Config;
use fracdyn::gronwall::{gronwall_series, hypothesis_fixed_point, verify_dominance, GronwallInput};
use fracdyn::solver::{picard_solve_partial, CauchyProblem, DependenceInput, Representation};
use fracdyn::verify::{run_suite, VerifyOptions};
use fracdyn::{
    dependence_certify, max_semigroup_residual, Error, GridFunction, PowerFunctionTable,
    TimeScaleGrid,
};

#[derive(Parser)]
#[command(
    name = "fracdyn",
    version,
    about = "fractional dynamic equations on time scales"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate generalized power functions h_alpha to CSV
    Powfun(RunArgs),
    /// Solve a Caputo-type Cauchy problem by Picard iteration
    Solve(RunArgs),
    /// Evaluate the Gronwall series bound and verify dominance
    Gronwall(RunArgs),
    /// Certify continuous dependence for a perturbed problem pair
    Depend(RunArgs),
    /// Run the seeded invariant suite
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// plain-text `key = value` configuration file
    #[arg(long)]
    config: PathBuf,
    /// output directory for CSV artifacts and summary.txt
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// print per-order max semigroup residuals (powfun)
    #[arg(long)]
    check: bool,
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// optional config file overriding defaults
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// seed for the randomized instances
    #[arg(long)]
    seed: Option<u64>,
    /// Gronwall instance count; solver instances scale as a quarter of it
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Powfun(args) => run_powfun(&args),
        Command::Solve(args) => run_solve(&args),
        Command::Gronwall(args) => run_gronwall(&args),
        Command::Depend(args) => run_depend(&args),
        Command::Verify(args) => run_verify(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify(&e))
        }
    }
}

fn classify(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Parse(_) | Error::Config(_) | Error::UnsupportedScale { .. } => 2,
        _ => 1,
    }
}

const EXIT_OK: ExitCode = ExitCode::SUCCESS;
const EXIT_NUMERICAL: u8 = 1;

fn ensure_out(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn run_powfun(args: &RunArgs) -> Result<ExitCode, Error> {
    let cfg = Config::load(&args.config)?;
    ensure_out(&args.out)?;
    let grid = cfg.grid("grid")?;
    let orders_raw = cfg.require("orders")?;
    let mut summary = String::new();
    for token in orders_raw.split(',') {
        let token = token.trim();
        let alpha: f64 = token
            .parse()
            .map_err(|_| Error::Config(format!("bad order {token:?}")))?;
        let table = PowerFunctionTable::new(grid.clone(), alpha)?;
        let path = args.out.join(format!("power_{token}.csv"));
        let file = std::fs::File::create(&path)?;
        table.write_csv(std::io::BufWriter::new(file))?;
        summary.push_str(&format!("order {token}: wrote {}\n", path.display()));
        if args.check {
            // alpha <= 0 has no semigroup family (k alpha - 1 <= -1)
            if alpha > 0.0 {
                let cap = if grid.len() > 160 { 16 } else { usize::MAX };
                let resid = max_semigroup_residual(&grid, alpha, 1, cap)?;
                let line = format!("order {token}: max semigroup residual (k=1) = {resid}");
                println!("{line}");
                summary.push_str(&line);
                summary.push('\n');
            } else {
                let line = format!("order {token}: semigroup check skipped (order not positive)");
                println!("{line}");
                summary.push_str(&line);
                summary.push('\n');
            }
        }
        if args.verbose {
            println!(
                "order {token}: {} shifted entries",
                grid.len() * (grid.len() - 1) / 2
            );
        }
    }
    std::fs::write(args.out.join("summary.txt"), summary)?;
    Ok(EXIT_OK)
}

fn load_problem(
    cfg: &Config,
    suffix: &str,
    grid: &Arc<TimeScaleGrid<f64>>,
) -> Result<CauchyProblem<f64>, Error> {
    let key = |base: &str| format!("{base}{suffix}");
    let rhs = cfg.rhs(&key("rhs"), grid)?;
    let representation = match cfg.get("representation") {
        Some(r) => Representation::parse(r)?,
        None => Representation::RlType,
    };
    Ok(CauchyProblem {
        alpha: cfg.require_f64("alpha")?,
        rhs,
        lipschitz: cfg.require_f64("L")?,
        w: cfg.require_f64(&key("w"))?,
        grid: grid.clone(),
        t0_index: 0,
        eta: cfg.require_f64("eta")?,
        representation,
    })
}

fn run_solve(args: &RunArgs) -> Result<ExitCode, Error> {
    let cfg = Config::load(&args.config)?;
    ensure_out(&args.out)?;
    let grid = cfg.grid("grid")?;
    let problem = load_problem(&cfg, "", &grid)?;
    problem.validate().map_err(reclassify_setup)?;
    let tol = cfg.f64_or("tol", 1e-9)?;
    let max_iter = cfg.usize_or("max_iter", 4 * grid.len() + 400)?;

    let observed_l = problem.observed_lipschitz(128);
    let result = picard_solve_partial(&problem, tol, max_iter)?;
    result
        .solution
        .write_csv_file(&args.out.join("solution.csv"))?;
    let mut summary = Vec::new();
    result.write_summary(&mut summary)?;
    if observed_l > problem.lipschitz * (1.0 + 1e-6) {
        let warn = format!(
            "lipschitz_warning = sampled ratio {observed_l} exceeds declared L = {}\n",
            problem.lipschitz
        );
        summary.extend_from_slice(warn.as_bytes());
    }
    std::fs::write(args.out.join("summary.txt"), &summary)?;
    if args.verbose {
        print!("{}", String::from_utf8_lossy(&summary));
    }
    if result.converged {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "non-convergence: final metric {} after {} iterations",
            result.final_metric, result.iterations
        );
        Ok(ExitCode::from(EXIT_NUMERICAL))
    }
}

fn reclassify_setup(e: Error) -> Error {
    // invalid problem parameters discovered before any numerics are a
    // configuration problem for exit-status purposes
    match e {
        Error::Domain(msg) => Error::Config(msg),
        other => other,
    }
}

fn scalar_or_file(
    cfg: &Config,
    key: &str,
    grid: &Arc<TimeScaleGrid<f64>>,
) -> Result<GridFunction<f64>, Error> {
    let desc = cfg.require(key)?.trim().to_string();
    if let Some(path) = desc.strip_prefix("file:") {
        return GridFunction::read_csv_file(&cfg.resolve_path(path.trim()), grid.clone());
    }
    if let Some(inner) = desc
        .strip_prefix("const(")
        .and_then(|s| s.strip_suffix(')'))
    {
        let c: f64 = inner
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("key {key:?}: bad const {inner:?}")))?;
        return GridFunction::constant(grid.clone(), c);
    }
    Err(Error::Config(format!(
        "key {key:?}: expected const(<x>) or file:<path>, got {desc:?}"
    )))
}

fn run_gronwall(args: &RunArgs) -> Result<ExitCode, Error> {
    let cfg = Config::load(&args.config)?;
    ensure_out(&args.out)?;
    let grid = cfg.grid("grid")?;
    let alpha = cfg.require_f64("alpha")?;
    let u = scalar_or_file(&cfg, "u", &grid)?;
    let v = scalar_or_file(&cfg, "v", &grid)?;
    let b = match cfg.get("B") {
        Some(x) => x
            .parse()
            .map_err(|_| Error::Config(format!("bad B {x:?}")))?,
        None => v.values().iter().copied().fold(0.0f64, f64::max),
    };
    let series_tol = cfg.f64_or("series_tol", 1e-10)?;
    let max_terms = cfg.usize_or("max_terms", 400)?;
    let tolerance = cfg.f64_or("tolerance", 1e-8)?;
    let input = GronwallInput::new(u, v, alpha, b, 0).map_err(reclassify_setup)?;

    if args.verbose {
        println!(
            "hypothesis read as y <= u + v * I^alpha[y]: the integrand includes y, \
             following the proof's operator Q"
        );
    }

    let (report, series_converged) = gronwall_series(&input, series_tol, max_terms)?;
    let y = match cfg.get("y") {
        None | Some("fixed-point") => hypothesis_fixed_point(&input, 1e-12, 4 * grid.len() + 50)?,
        Some(desc) => {
            let desc = desc.to_string();
            let path = desc
                .strip_prefix("file:")
                .ok_or_else(|| Error::Config(format!("bad y descriptor {desc:?}")))?;
            GridFunction::read_csv_file(&cfg.resolve_path(path.trim()), grid.clone())?
        }
    };

    if !series_converged {
        let file = std::fs::File::create(args.out.join("report.csv"))?;
        report.write_csv(std::io::BufWriter::new(file))?;
        let mut summary = Vec::new();
        report.write_summary(&mut summary)?;
        summary.extend_from_slice(b"truncation = failed\n");
        std::fs::write(args.out.join("summary.txt"), &summary)?;
        eprintln!(
            "truncation failure: {} terms, last term max {}",
            report.terms_used, report.tail_estimate
        );
        return Ok(ExitCode::from(EXIT_NUMERICAL));
    }

    let checked = verify_dominance(&input, &y, &report, tolerance)?;
    let file = std::fs::File::create(args.out.join("report.csv"))?;
    checked.write_csv(std::io::BufWriter::new(file))?;
    let mut summary = Vec::new();
    checked.write_summary(&mut summary)?;
    std::fs::write(args.out.join("summary.txt"), &summary)?;
    if args.verbose {
        print!("{}", String::from_utf8_lossy(&summary));
    }
    if checked.verdict == Some(true) {
        Ok(EXIT_OK)
    } else {
        eprintln!("bound violated at indices {:?}", checked.violations);
        Ok(ExitCode::from(EXIT_NUMERICAL))
    }
}

fn run_depend(args: &RunArgs) -> Result<ExitCode, Error> {
    let cfg = Config::load(&args.config)?;
    ensure_out(&args.out)?;
    let grid = cfg.grid("grid")?;
    let problem_a = load_problem(&cfg, "", &grid)?;
    let mut problem_b = load_problem(&cfg, "", &grid)?;
    if let Some(wb) = cfg.get("w_b") {
        problem_b.w = wb
            .parse()
            .map_err(|_| Error::Config(format!("bad w_b {wb:?}")))?;
    }
    if cfg.get("rhs_b").is_some() {
        problem_b.rhs = cfg.rhs("rhs_b", &grid)?;
    }
    problem_a.validate().map_err(reclassify_setup)?;
    problem_b.validate().map_err(reclassify_setup)?;
    let input = DependenceInput {
        lipschitz: problem_a.lipschitz,
        problem_a,
        problem_b,
    };
    let tol_solve = cfg.f64_or("tol", 1e-11)?;
    let series_tol = cfg.f64_or("series_tol", 1e-10)?;
    let report = dependence_certify(&input, tol_solve, series_tol)?;

    let file = std::fs::File::create(args.out.join("report.csv"))?;
    report.write_csv(std::io::BufWriter::new(file))?;
    let mut summary = Vec::new();
    report.write_summary(&mut summary)?;
    std::fs::write(args.out.join("summary.txt"), &summary)?;
    if args.verbose {
        print!("{}", String::from_utf8_lossy(&summary));
    }
    if report.verdict == Some(true) {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "dependence bound violated at indices {:?}",
            report.violations
        );
        Ok(ExitCode::from(EXIT_NUMERICAL))
    }
}

fn run_verify(args: &VerifyArgs) -> Result<ExitCode, Error> {
    ensure_out(&args.out)?;
    let mut opts = VerifyOptions::default();
    if let Some(path) = &args.config {
        let cfg = Config::load(path)?;
        opts.seed = cfg.usize_or("seed", opts.seed as usize)? as u64;
        opts.gronwall_instances = cfg.usize_or("instances", opts.gronwall_instances)?;
        opts.solver_instances = (opts.gronwall_instances / 4).max(1);
        opts.max_grid_points = cfg.usize_or("max_grid_points", opts.max_grid_points)?;
    }
    if let Some(seed) = args.seed {
        opts.seed = seed;
    }
    if let Some(instances) = args.instances {
        opts.gronwall_instances = instances;
        opts.solver_instances = (instances / 4).max(1);
    }
    let report = run_suite(&opts);
    let mut table = Vec::new();
    report.write_table(&mut table)?;
    std::fs::write(args.out.join("summary.txt"), &table)?;
    print!("{}", String::from_utf8_lossy(&table));
    if report.all_pass() {
        Ok(EXIT_OK)
    } else {
        Ok(ExitCode::from(EXIT_NUMERICAL))
    }
}
