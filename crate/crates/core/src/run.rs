//! The command-line front end: argument parsing, subcommand dispatch and the
//! exit-code contract (0 pass, 1 config error, 2 non-convergence,
//! 3 condition or verification failure).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{Config, PotentialConfig};
use crate::error::{Error, Result};
use crate::grid::RadialFunction;
use crate::manifold::{fiber_profile, lambda_membership, project_to_m};
use crate::model::{
    check_f, check_h, check_potential_bounds, check_v1_v2, check_v3, default_radii,
    estimate_theta_v4, log_space, tail_radii, theta_min_v4, ConditionReport, Lattice, H2_CAP,
};
use crate::output::{write_atomic, write_csv, write_json};
use crate::solver::{
    initial_guess, shoot_oracle, solve_fiber_descent, solve_limit_bl, sweep_lambda, SolveReport,
};
use crate::verify::{run_suite, GridMeta};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "pohozaev",
    version,
    about = "Ground states of -Δu + V(x)u = f(u) on radial grids"
)]
pub struct Cli {
    /// TOML configuration file; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed of the verification sampler (overrides `seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// `section.key=value` override, applied in order.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the hypotheses on V and f.
    CheckConditions,
    /// Ground state by fiber-projected descent.
    Solve,
    /// Autonomous ground state by constrained minimisation.
    SolveLimit,
    /// Autonomous ground state by radial shooting.
    OracleShoot,
    /// Project the configured Gaussian bump, amplitude doubled into Λ, onto
    /// the Pohožaev manifold.
    Project,
    /// Run the verification suite, optionally on a saved solution.
    Verify {
        /// A `solve.json`, `solve_limit.json` or `oracle.json` file.
        #[arg(long, value_name = "PATH")]
        solution: Option<PathBuf>,
    },
    /// λ-continuation of the autonomous levels against the path bound.
    SweepLambda,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckConditions => "check-conditions",
            Command::Solve => "solve",
            Command::SolveLimit => "solve-limit",
            Command::OracleShoot => "oracle-shoot",
            Command::Project => "project",
            Command::Verify { .. } => "verify",
            Command::SweepLambda => "sweep-lambda",
        }
    }
}

/// What a finished command reports back to the shell.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub summary: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. }
        | Error::LeftLambda
        | Error::ConstraintInfeasible(_)
        | Error::BracketNotFound(_)
        | Error::StiffFailure(_)
        | Error::NoSignChange { .. }
        | Error::MultipleSignChanges { .. } => EXIT_NONCONVERGENCE,
        Error::PreconditionFailed(_) | Error::NotInLambda { .. } | Error::NoPositivityBall => {
            EXIT_FAILURE
        }
        _ => EXIT_CONFIG,
    }
}

/// Resolves the configuration from the file, `--set` overrides, `--out` and `--seed`.
pub fn resolve_config(cli: &Cli) -> Result<Config> {
    let mut cfg = Config::load(cli.config.as_deref(), &cli.set)?;
    if let Some(dir) = &cli.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Parses `args` (program name first), runs, prints, and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let cfg = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if cli.dump_config {
        return match cfg.to_toml() {
            Ok(s) => {
                print!("{s}");
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        };
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return EXIT_CONFIG;
    };
    match execute(&command, &cfg) {
        Ok(out) => {
            println!("{}", out.summary);
            out.code
        }
        Err(e) => {
            eprintln!("error: {}: {e}", command.name());
            exit_code(&e)
        }
    }
}

/// Runs one subcommand, writing its reports into `cfg.output.dir`.
pub fn execute(command: &Command, cfg: &Config) -> Result<Outcome> {
    let dir = cfg.output.dir.as_path();
    std::fs::create_dir_all(dir)?;
    write_atomic(&dir.join("config.toml"), cfg.to_toml()?.as_bytes())?;
    match command {
        Command::CheckConditions => check_conditions(cfg, dir),
        Command::Solve => solve_to(cfg, dir, "solve.json", |c| {
            solve_fiber_descent(&c.context()?, &c.solver)
        }),
        Command::SolveLimit => solve_to(cfg, dir, "solve_limit.json", |c| {
            solve_limit_bl(&c.context()?, &c.solver)
        }),
        Command::OracleShoot => solve_to(cfg, dir, "oracle.json", |c| {
            let ctx = c.context()?;
            shoot_oracle(ctx.grid(), ctx.v_inf(), ctx.nonlinearity(), ctx.lambda())
        }),
        Command::Project => project(cfg, dir),
        Command::Verify { solution } => verify(cfg, dir, solution.as_deref()),
        Command::SweepLambda => sweep(cfg, dir),
    }
}

fn write_profile(path: &Path, u: &RadialFunction) -> Result<()> {
    let rows = u
        .grid()
        .nodes()
        .iter()
        .zip(u.values())
        .map(|(&r, &v)| vec![r, v]);
    write_csv(path, &["r", "u"], rows)
}

#[derive(Serialize)]
struct ConditionsFile {
    pass: bool,
    grid: GridMeta,
    /// θ used for the (V3) and two-sided potential checks
    theta: f64,
    theta_min_v4: f64,
    reports: Vec<ConditionReport>,
}

fn check_conditions(cfg: &Config, dir: &Path) -> Result<Outcome> {
    let ctx = cfg.context()?;
    let v = ctx.potential();
    let (dim, r_max) = (ctx.dim(), ctx.grid().r_max());
    let radii = default_radii(r_max);
    let theta = ctx.theta();
    let mut reports = vec![
        check_v1_v2(v, &radii),
        estimate_theta_v4(v, dim, &radii),
        check_v3(v, dim, theta, &Lattice::standard(r_max)),
        check_potential_bounds(v, dim, theta, &radii),
    ];
    reports.extend(check_f(ctx.nonlinearity(), dim, ctx.v_inf()));
    if let PotentialConfig::Perturbed { profile, .. } = cfg.potential {
        let mut h = check_h(
            &|r| profile.value(r),
            &|r| profile.deriv(r),
            &tail_radii(),
            H2_CAP,
        );
        h.condition = format!("H ({})", profile.name());
        reports.push(h);
    }
    let (theta_min, _) = theta_min_v4(v, dim, &radii);
    let pass = reports.iter().all(|r| r.pass);
    write_json(
        &dir.join("conditions.json"),
        &ConditionsFile {
            pass,
            grid: GridMeta::of(ctx.grid()),
            theta,
            theta_min_v4: theta_min,
            reports: reports.clone(),
        },
    )?;
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.condition.as_str())
        .collect();
    let summary = if pass {
        format!("check-conditions: pass (theta_min_v4 = {theta_min:.6}, theta = {theta:.6})")
    } else {
        format!("check-conditions: FAIL ({})", failed.join(", "))
    };
    Ok(Outcome {
        code: if pass { EXIT_OK } else { EXIT_FAILURE },
        summary,
    })
}

/// Runs a solver and writes its report and profile, also on non-convergence.
fn solve_to(
    cfg: &Config,
    dir: &Path,
    file: &str,
    solver: impl FnOnce(&Config) -> Result<SolveReport>,
) -> Result<Outcome> {
    let (report, code) = match solver(cfg) {
        Ok(r) => (r, EXIT_OK),
        Err(Error::NonConvergence { report, .. }) => (*report, EXIT_NONCONVERGENCE),
        Err(e) => return Err(e),
    };
    write_json(&dir.join(file), &report)?;
    write_profile(&dir.join("profile.csv"), &report.u_star)?;
    let status = if report.converged {
        "converged"
    } else {
        "NOT converged"
    };
    Ok(Outcome {
        code,
        summary: format!(
            "{}: {status}, energy = {:.10}, |P|/|u|^2 = {:.3e}, iterations = {}",
            report.route.name(),
            report.energy,
            report.pohozaev_residual,
            report.iterations
        ),
    })
}

#[derive(Serialize)]
struct ProjectionFile {
    grid: GridMeta,
    amplitude: f64,
    width: f64,
    q: f64,
    t_u: f64,
    energy: f64,
    residual: f64,
    grid_residual: f64,
    bracket: (f64, f64),
    sign_changes: usize,
}

fn project(cfg: &Config, dir: &Path) -> Result<Outcome> {
    let ctx = cfg.context()?;
    let u = initial_guess(&ctx, &cfg.solver)?;
    let (amp, width) = (u.values()[0], cfg.solver.width);
    let (_, q) = lambda_membership(&ctx, &u)?;
    let p = project_to_m(&ctx, &u)?;
    write_csv(
        &dir.join("fiber.csv"),
        &["t", "zeta", "P"],
        fiber_profile(&ctx, &u, &log_space(1e-2, 1e2, 401))?
            .into_iter()
            .map(|f| vec![f.t, f.zeta, f.pohozaev]),
    )?;
    write_profile(&dir.join("profile.csv"), &p.projected)?;
    write_json(
        &dir.join("projection.json"),
        &ProjectionFile {
            grid: GridMeta::of(ctx.grid()),
            amplitude: amp,
            width,
            q,
            t_u: p.t_u,
            energy: p.energy,
            residual: p.residual,
            grid_residual: p.grid_residual,
            bracket: p.bracket,
            sign_changes: p.sign_changes,
        },
    )?;
    Ok(Outcome {
        code: EXIT_OK,
        summary: format!("project: t_u = {:.10}, I(u_t) = {:.10}", p.t_u, p.energy),
    })
}

fn verify(cfg: &Config, dir: &Path, solution: Option<&Path>) -> Result<Outcome> {
    let ctx = cfg.context()?;
    let sol: Option<SolveReport> = match solution {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            Some(
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let report = match run_suite(&ctx, sol.as_ref(), cfg.seed) {
        Err(Error::PreconditionFailed(pre)) => {
            write_json(&dir.join("verification.json"), &pre)?;
            return Err(Error::PreconditionFailed(pre));
        }
        other => other?,
    };
    write_json(&dir.join("verification.json"), &report)?;
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    let summary = if report.pass {
        format!(
            "verify: pass ({} checks, seed {})",
            report.checks.len(),
            report.seed
        )
    } else {
        format!("verify: FAIL ({})", failed.join(", "))
    };
    Ok(Outcome {
        code: if report.pass { EXIT_OK } else { EXIT_FAILURE },
        summary,
    })
}

fn sweep(cfg: &Config, dir: &Path) -> Result<Outcome> {
    let ctx = cfg.context()?;
    let report = sweep_lambda(&ctx, &cfg.sweep.lambda_grid, cfg.sweep.t_cap)?;
    write_json(&dir.join("sweep.json"), &report)?;
    write_csv(
        &dir.join("sweep.csv"),
        &["lambda", "m_inf", "c_bar", "margin"],
        report
            .rows
            .iter()
            .map(|r| vec![r.lambda, r.m_inf, r.c_bar, r.margin]),
    )?;
    let pass = report.rows.iter().all(|r| r.margin > 0.0);
    Ok(Outcome {
        code: if pass { EXIT_OK } else { EXIT_FAILURE },
        summary: format!(
            "sweep-lambda: {} (lambda_bar = {:.6}, T = {}, {} rows above lambda_bar)",
            if pass { "pass" } else { "FAIL" },
            report.lambda_bar,
            report.t,
            report.rows.len()
        ),
    })
}
