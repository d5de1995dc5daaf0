//! `dbc`: batch driver for the Dirichlet boundary control solver.
//!
//! ```text
//! dbc solve       --config C --level L --out DIR
//! dbc convergence --config C --out FILE.csv
//! dbc verify      --config C
//! ```
//!
//! `C` is a built-in problem name (`example1`, `example2`) or a JSON file.
//! Exit codes: 0 success, 1 I/O, 2 configuration, 3 solver, 4 verification.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dirichlet_control::analysis::{
    error_h1_semi, error_l2, error_l2_boundary, format_sig, norm_l2, norm_l2_boundary, seminorm_h1, ConvergenceReport,
};
use dirichlet_control::mesh::write_vtk;
use dirichlet_control::problem::{
    cache_dir, convergence_study, run_verification, solve_level, LevelRange, LevelSummary, ProblemSpec, RunRecord,
    VerificationReport, VerifyOptions, MAX_LEVEL,
};
use dirichlet_control::Error;

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "dbc", version, about = "Dirichlet boundary control of the Poisson equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Built-in problem name or path to a JSON configuration.
    #[arg(long)]
    config: String,
    /// Override the regularisation parameter.
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one level and write the fields as legacy VTK plus a JSON summary.
    Solve {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a convergence study and write the error table as CSV.
    Convergence {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
        /// Restrict to levels MIN..=MAX, e.g. `0..4`.
        #[arg(long, value_parser = parse_levels)]
        levels: Option<LevelRange>,
    },
    /// Run the property-verification suite.
    Verify {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_parser = parse_levels)]
        levels: Option<LevelRange>,
        /// Random boundary bubbles per level.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn parse_levels(s: &str) -> Result<LevelRange, String> {
    let (a, b) = s.split_once("..").ok_or("expected MIN..MAX")?;
    let min = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let max = b.trim().trim_start_matches('=').parse::<usize>().map_err(|e| e.to_string())?;
    if min > max || max > MAX_LEVEL {
        return Err(format!("need MIN <= MAX <= {MAX_LEVEL}"));
    }
    Ok(LevelRange { min, max })
}

enum Failure {
    Lib(Error),
    Verification(VerificationReport),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Config(_) | Error::InvalidGeometry(_) | Error::Expr(_) | Error::Json(_) => EXIT_CONFIG,
        Error::Solver(_) | Error::IterationLimit { .. } | Error::Dimension(_) => EXIT_SOLVER,
    }
}

fn load(cfg: &ConfigArgs) -> Result<ProblemSpec, Error> {
    let mut spec = ProblemSpec::load(&cfg.config)?;
    if let Some(g) = cfg.gamma {
        spec.gamma = g;
        spec.validate()?;
    }
    Ok(spec)
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

#[derive(Serialize)]
struct SolveSummary {
    problem: String,
    config_hash: String,
    gamma: f64,
    #[serde(flatten)]
    level: LevelSummary,
    norms: Norms,
    #[serde(skip_serializing_if = "Option::is_none")]
    errors: Option<Errors>,
    vtk: String,
}

#[derive(Serialize)]
struct Norms {
    y_l2: f64,
    y_h1_semi: f64,
    z_l2: f64,
    z_h1_semi: f64,
    u_l2_boundary: f64,
}

#[derive(Serialize)]
struct Errors {
    grad_y: f64,
    grad_z: f64,
    u: f64,
    y: f64,
    z: f64,
}

fn cmd_solve(cfg: &ConfigArgs, level: usize, out: &Path) -> Result<(), Failure> {
    let spec = load(cfg)?;
    if level > MAX_LEVEL {
        return Err(Error::Config(format!("level {level} exceeds the maximum {MAX_LEVEL}")).into());
    }
    let problem = spec.compile()?;
    let sol = solve_level(&problem, level)?;
    let u = sol.y.boundary_part();
    fs::create_dir_all(out)?;
    let vtk_name = format!("{}_level{level}.vtk", spec.name);
    let file = fs::File::create(out.join(&vtk_name))?;
    write_vtk(sol.dofmap.mesh(), &[("y", &sol.y), ("z", &sol.z), ("u", &u)], std::io::BufWriter::new(file))?;

    let errors = match &problem.exact {
        Some(ex) => Some(Errors {
            grad_y: error_h1_semi(&sol.y, &ex.grad_y)?,
            grad_z: error_h1_semi(&sol.z, &ex.grad_z)?,
            u: error_l2_boundary(&sol.y, &ex.u)?,
            y: error_l2(&sol.y, &ex.y)?,
            z: error_l2(&sol.z, &ex.z)?,
        }),
        None => None,
    };
    let summary = SolveSummary {
        problem: spec.name.clone(),
        config_hash: spec.config_hash(),
        gamma: spec.gamma,
        level: sol.summary(),
        norms: Norms {
            y_l2: norm_l2(&sol.y),
            y_h1_semi: seminorm_h1(&sol.y),
            z_l2: norm_l2(&sol.z),
            z_h1_semi: seminorm_h1(&sol.z),
            u_l2_boundary: norm_l2_boundary(&sol.y),
        },
        errors,
        vtk: vtk_name,
    };
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary).map_err(Error::from)? + "\n")?;
    let s = &summary.level;
    println!(
        "{} level {level}: {} elements, {} unknowns, residual {}",
        spec.name,
        s.elements,
        s.unknowns,
        format_sig(s.residual)
    );
    println!(
        "  |y|_L2 {}  |z|_L2 {}  |u|_L2(bdry) {}",
        format_sig(summary.norms.y_l2),
        format_sig(summary.norms.z_l2),
        format_sig(summary.norms.u_l2_boundary)
    );
    println!("  wrote {}", out.display());
    Ok(())
}

fn print_table(report: &ConvergenceReport) {
    let mut header = format!("{:>5} {:>10}", "level", "h");
    for n in &report.norms {
        header.push_str(&format!(" {:>12} {:>7}", n.key(), "order"));
    }
    println!("{header}");
    for row in &report.rows {
        let mut line = format!("{:>5} {:>10}", row.level, format_sig(row.h));
        for (e, o) in row.errors.iter().zip(&row.eoc) {
            let o = o.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
            line.push_str(&format!(" {:>12} {:>7}", format_sig(*e), o));
        }
        println!("{line}");
    }
}

fn cmd_convergence(cfg: &ConfigArgs, out: &Path, levels: Option<LevelRange>) -> Result<(), Failure> {
    let mut spec = load(cfg)?;
    if let Some(l) = levels {
        spec.levels = l;
        spec.validate()?;
    }
    let problem = spec.compile()?;
    let outcome = convergence_study(&problem, &cache_dir())?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(out, outcome.report.to_csv())?;

    let mut record = RunRecord::new(&spec, timestamp());
    record.levels = outcome.levels;
    record.report = Some(outcome.report.clone());
    let record_path = out.with_extension("run.json");
    fs::write(&record_path, record.to_json() + "\n")?;

    println!("{} (gamma = {}, P{})", spec.name, spec.gamma, spec.degree.order());
    if let Some(hit) = outcome.reference_cached {
        println!("reference level {}: {}", spec.reference_level.unwrap_or_default(), if hit { "cached" } else { "computed" });
    }
    print_table(&outcome.report);
    println!("wrote {} and {}", out.display(), record_path.display());
    Ok(())
}

fn cmd_verify(
    cfg: &ConfigArgs,
    levels: Option<LevelRange>,
    trials: usize,
    seed: Option<u64>,
    json: Option<&Path>,
) -> Result<(), Failure> {
    let spec = load(cfg)?;
    let problem = spec.compile()?;
    let mut opts = VerifyOptions { levels, bubble_trials: trials, ..Default::default() };
    if let Some(s) = seed {
        opts.seed = s;
    }
    let report = run_verification(&problem, &opts)?;
    println!("{} (gamma = {}, seed {})", report.problem, report.gamma, report.seed);
    for c in &report.checks {
        println!("{} {:<34} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if let Some(path) = json {
        let mut record = RunRecord::new(&spec, timestamp());
        record.verification = Some(report.clone());
        fs::write(path, record.to_json() + "\n")?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification(report))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { cfg, level, out } => cmd_solve(cfg, *level, out),
        Command::Convergence { cfg, out, levels } => cmd_convergence(cfg, out, *levels),
        Command::Verify { cfg, levels, trials, seed, json } => cmd_verify(cfg, *levels, *trials, *seed, json.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Verification(r)) => {
            let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            eprintln!("verification failed: {}", failed.join(", "));
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
