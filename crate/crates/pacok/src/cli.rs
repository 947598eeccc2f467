//! Command-line driver.
//!
//! Exit codes: 0 success, 1 config or I/O failure, 2 when a run with
//! `enforce_stability` on still saw the monitored energy increase, 64 for
//! usage errors (unknown subcommand or flags).

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use crate::analysis::{self, SweepOutcome};
use crate::config::{parse_config, InitialCondition, RunConfig};
use crate::csv_io::{self, EnergyLog, ForcesRow};
use crate::error::Result;
use crate::grid::Field;
use crate::model::{self, ModelParams};
use crate::snapshot;
use crate::solver::{self, SolverParams};

const USAGE: &str = "\
pacok - energy-stable pseudospectral solver for the penalized
Allen-Cahn-Ohta-Kawasaki equation on a periodic rectangle

USAGE:
    pacok <SUBCOMMAND> [FLAGS]

SUBCOMMANDS:
    run          --config FILE
                 time-step to equilibrium; writes energy.csv and periodic
                 field snapshots into output_dir
    converge     --eps-over-h {5|10|20} [--nx N] [--gamma G] [--tau-bench T]
                 [--t-final T] [--out DIR]
                 temporal-convergence table against a fine-step benchmark;
                 writes convergence.csv
    sweep-gamma  [--gammas LIST] [--seeds K] [--nx N] [--eps-over-h R]
                 [--tau T] [--ratio R] [--max-steps N] [--tol T] [--out DIR]
                 bubble-count sweep over repulsion strengths; writes
                 bubbles.csv and prints the fitted power-law exponent
    forces       --config FILE
                 relax to equilibrium and write the y = 0 cross-sections of
                 the state and the three forces to forces.csv
    stability    --config FILE
                 print the stabilizer lower bounds and whether the configured
                 kappa_h and beta_h satisfy them

CONFIG KEYS (key = value, `#` comments):
    nx ny x y eps eps_over_h gamma omega m tau kappa beta tol max_steps
    enforce_stability indicator ic ic_file ic_ratio seed snapshot_stride
    output_dir

ENVIRONMENT:
    PACOK_THREADS  caps sweep-gamma worker parallelism
";

/// Entry point used by the binary; also callable from tests.
pub fn cli_main(args: &[String]) -> i32 {
    let Some(sub) = args.first() else {
        eprint!("{USAGE}");
        return 64;
    };
    let rest = &args[1..];
    let outcome = match sub.as_str() {
        "run" => cmd_run(rest),
        "converge" => cmd_converge(rest),
        "sweep-gamma" => cmd_sweep_gamma(rest),
        "forces" => cmd_forces(rest),
        "stability" => cmd_stability(rest),
        "help" | "--help" | "-h" => {
            print!("{USAGE}");
            return 0;
        }
        other => {
            eprintln!("unknown subcommand `{other}`\n");
            eprint!("{USAGE}");
            return 64;
        }
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("{msg}\n");
            eprint!("{USAGE}");
            64
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

enum CliError {
    Usage(String),
    Run(crate::error::Error),
}

impl From<crate::error::Error> for CliError {
    fn from(e: crate::error::Error) -> Self {
        CliError::Run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(e.into())
    }
}

type CliResult = std::result::Result<i32, CliError>;

fn parse_flags(
    args: &[String],
    allowed: &[&str],
) -> std::result::Result<HashMap<String, String>, CliError> {
    let mut flags = HashMap::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(name) = arg.strip_prefix("--") else {
            return Err(CliError::Usage(format!("unexpected argument `{arg}`")));
        };
        if !allowed.contains(&name) {
            return Err(CliError::Usage(format!("unknown flag `--{name}`")));
        }
        let Some(value) = it.next() else {
            return Err(CliError::Usage(format!("flag `--{name}` needs a value")));
        };
        flags.insert(name.to_string(), value.clone());
    }
    Ok(flags)
}

fn flag_f64(flags: &HashMap<String, String>, name: &str, default: f64) -> CliResult2<f64> {
    match flags.get(name) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|e| CliError::Usage(format!("bad value for --{name}: {e}"))),
    }
}

fn flag_usize(flags: &HashMap<String, String>, name: &str, default: usize) -> CliResult2<usize> {
    match flags.get(name) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|e| CliError::Usage(format!("bad value for --{name}: {e}"))),
    }
}

type CliResult2<T> = std::result::Result<T, CliError>;

fn load_config(flags: &HashMap<String, String>) -> CliResult2<RunConfig> {
    let Some(path) = flags.get("config") else {
        return Err(CliError::Usage("--config FILE is required".into()));
    };
    let text = fs::read_to_string(path).map_err(crate::error::Error::from)?;
    let cfg = parse_config(&text)?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn build_ic(cfg: &RunConfig) -> Result<Field> {
    match &cfg.ic {
        InitialCondition::Disc => analysis::ic_disc_indicator(&cfg.grid, cfg.model.omega),
        InitialCondition::TanhDisc => Ok(analysis::ic_tanh_disc(
            &cfg.grid,
            cfg.model.omega,
            cfg.model.eps,
            0.1,
        )),
        InitialCondition::BlockRandom => {
            analysis::ic_block_random(&cfg.grid, cfg.ic_ratio, cfg.seed)
        }
        InitialCondition::File(path) => snapshot::read_snapshot_expecting(path, &cfg.grid),
    }
}

fn worker_threads() -> usize {
    let hw = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var("PACOK_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n > 0).unwrap_or(hw).min(hw.max(1)),
        Err(_) => hw,
    }
}

fn cmd_run(args: &[String]) -> CliResult {
    let flags = parse_flags(args, &["config"])?;
    let cfg = load_config(&flags)?;
    let phi0 = build_ic(&cfg)?;
    fs::create_dir_all(&cfg.output_dir).map_err(crate::error::Error::from)?;

    let energy_path = cfg.output_dir.join("energy.csv");
    let mut log = EnergyLog::new(BufWriter::new(
        File::create(&energy_path).map_err(crate::error::Error::from)?,
    ));
    snapshot::write_snapshot(&phi0, &cfg.output_dir.join("snapshot_00000000.bin"))?;

    let stride = cfg.snapshot_stride;
    let out_dir = cfg.output_dir.clone();
    let mut io_error: Option<std::io::Error> = None;
    let result = solver::run(&phi0, &cfg.model, &cfg.solver, 1, |report, phi| {
        if io_error.is_some() {
            return;
        }
        if let Err(e) = log.append(report) {
            io_error = Some(e);
            return;
        }
        if report.step % stride == 0 {
            let path = out_dir.join(format!("snapshot_{:08}.bin", report.step));
            if let Err(e) = snapshot::write_snapshot(phi, &path) {
                io_error = Some(std::io::Error::other(e.to_string()));
            }
        }
    });
    if let Some(e) = io_error {
        return Err(CliError::Run(e.into()));
    }
    log.flush().map_err(crate::error::Error::from)?;
    snapshot::write_snapshot(&result.phi, &cfg.output_dir.join("final.bin"))?;

    let last = result.reports.last().expect("at least one step ran");
    println!(
        "{} after {} steps (t = {:.6}); E = {:.12e}, step change = {:.3e}, volume residual = {:.3e}",
        if result.converged { "converged" } else { "stopped" },
        result.steps,
        last.time,
        last.energy.total,
        last.step_change,
        last.energy.volume_residual,
    );
    println!("energy history: {}", energy_path.display());

    if cfg.solver.enforce_stability && result.energy_increases > 0 {
        eprintln!(
            "error: energy increased {} time(s) despite enforce_stability",
            result.energy_increases
        );
        return Ok(2);
    }
    Ok(0)
}

fn cmd_converge(args: &[String]) -> CliResult {
    let flags = parse_flags(
        args,
        &["eps-over-h", "nx", "gamma", "tau-bench", "t-final", "out"],
    )?;
    if !flags.contains_key("eps-over-h") {
        return Err(CliError::Usage("--eps-over-h is required".into()));
    }
    let eps_over_h = flag_f64(&flags, "eps-over-h", 20.0)?;
    let nx = flag_usize(&flags, "nx", 512)?;
    let gamma = flag_f64(&flags, "gamma", 100.0)?;
    let tau_bench = flag_f64(&flags, "tau-bench", 1e-5)?;
    let t_final = flag_f64(&flags, "t-final", 0.1)?;
    let out: PathBuf = flags.get("out").map(Into::into).unwrap_or_else(|| "out".into());

    let grid = crate::grid::GridSpec::square(nx)?;
    let model = ModelParams::new(eps_over_h * grid.hx(), gamma, 0.15, 1000.0)?;
    // literal reference constants; the study only compares trajectories
    let solver = SolverParams {
        enforce_stability: false,
        ..SolverParams::new(1.0)
    };
    let taus: Vec<f64> = (0..7).map(|k| 0.1 / (1u32 << k) as f64).collect();

    let rows = analysis::convergence_study(&grid, &model, &solver, &taus, tau_bench, t_final)?;
    fs::create_dir_all(&out).map_err(crate::error::Error::from)?;
    let path = out.join("convergence.csv");
    csv_io::write_convergence_csv(&rows, BufWriter::new(File::create(&path)?))
        .map_err(crate::error::Error::from)?;

    println!("tau        error        rate");
    for r in &rows {
        match r.rate {
            Some(rate) => println!("{:<10.4e} {:<12.6e} {:.3}", r.tau, r.error, rate),
            None => println!("{:<10.4e} {:<12.6e} --", r.tau, r.error),
        }
    }
    println!("table: {}", path.display());
    Ok(0)
}

fn cmd_sweep_gamma(args: &[String]) -> CliResult {
    let flags = parse_flags(
        args,
        &[
            "gammas", "seeds", "nx", "eps-over-h", "tau", "ratio", "max-steps", "tol", "out",
        ],
    )?;
    let gammas: Vec<f64> = match flags.get("gammas") {
        None => vec![200.0, 500.0, 2000.0, 5000.0, 20000.0],
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("bad --gammas entry `{s}`: {e}")))
            })
            .collect::<std::result::Result<_, _>>()?,
    };
    let n_seeds = flag_usize(&flags, "seeds", 5)?;
    let nx = flag_usize(&flags, "nx", 512)?;
    let eps_over_h = flag_f64(&flags, "eps-over-h", 10.0)?;
    let tau = flag_f64(&flags, "tau", 5e-3)?;
    let ratio = flag_usize(&flags, "ratio", 16)?;
    let max_steps = flag_usize(&flags, "max-steps", 100_000)?;
    let tol = flag_f64(&flags, "tol", 1e-3)?;
    let out: PathBuf = flags.get("out").map(Into::into).unwrap_or_else(|| "out".into());

    let grid = crate::grid::GridSpec::square(nx)?;
    let model = ModelParams::new(eps_over_h * grid.hx(), 1.0, 0.15, 1000.0)?;
    // literal reference constants: clamping kappa_h for the largest gamma
    // would slow the dynamics far beyond the published setup
    let solver = SolverParams {
        tol,
        max_steps,
        enforce_stability: false,
        ..SolverParams::new(tau)
    };
    let seeds: Vec<u64> = (0..n_seeds as u64).collect();

    let outcomes: Vec<SweepOutcome> = analysis::sweep_gamma(
        &grid,
        &model,
        &solver,
        &gammas,
        &seeds,
        ratio,
        0.5,
        worker_threads(),
    )?;

    fs::create_dir_all(&out).map_err(crate::error::Error::from)?;
    let path = out.join("bubbles.csv");
    csv_io::write_bubbles_csv(&outcomes, BufWriter::new(File::create(&path)?))
        .map_err(crate::error::Error::from)?;

    let modes = analysis::modal_counts(&outcomes);
    println!("gamma      bubbles  replicates  unanimous");
    for m in &modes {
        println!(
            "{:<10} {:<8} {:<11} {}",
            m.gamma, m.count, m.runs, m.unanimous
        );
    }
    let points: Vec<(f64, f64)> = modes
        .iter()
        .filter(|m| m.count > 0)
        .map(|m| (m.gamma, m.count as f64))
        .collect();
    match analysis::fit_power_law(&points) {
        Ok(fit) => println!(
            "power-law fit: count ~ {:.4} * gamma^{:.4}",
            fit.prefactor, fit.exponent
        ),
        Err(e) => println!("power-law fit unavailable: {e}"),
    }
    println!("replicates: {}", path.display());
    Ok(0)
}

fn cmd_forces(args: &[String]) -> CliResult {
    let flags = parse_flags(args, &["config"])?;
    let cfg = load_config(&flags)?;
    let phi0 = build_ic(&cfg)?;
    fs::create_dir_all(&cfg.output_dir).map_err(crate::error::Error::from)?;

    let result = solver::run(&phi0, &cfg.model, &cfg.solver, usize::MAX, |_, _| {});
    let forces = model::forces(&result.phi, &cfg.model);
    let sum = forces.sum();

    let section = analysis::cross_section(&result.phi, 0.0);
    let tension = analysis::cross_section(&forces.tension, 0.0);
    let nonlocal = analysis::cross_section(&forces.nonlocal, 0.0);
    let volume = analysis::cross_section(&forces.volume, 0.0);
    let total = analysis::cross_section(&sum, 0.0);
    let rows: Vec<ForcesRow> = (0..section.len())
        .map(|i| ForcesRow {
            x: section[i].0,
            phi: section[i].1,
            tension: tension[i].1,
            nonlocal: nonlocal[i].1,
            volume: volume[i].1,
            sum: total[i].1,
        })
        .collect();
    let path = cfg.output_dir.join("forces.csv");
    csv_io::write_forces_csv(&rows, BufWriter::new(File::create(&path)?))
        .map_err(crate::error::Error::from)?;
    snapshot::write_snapshot(&result.phi, &cfg.output_dir.join("final.bin"))?;

    let profile = analysis::tanh_profile_deviation(&result.phi, cfg.model.eps, cfg.model.omega);
    println!(
        "{} after {} steps; |force sum|_inf = {:.3e}",
        if result.converged { "converged" } else { "stopped" },
        result.steps,
        sum.norm_linf(),
    );
    println!(
        "interface radius = {:.6}, tanh fit error = {:.3e}, far-field deviation = {:.3e}{}",
        profile.interface_radius,
        profile.fit_err,
        profile.far_field_dev,
        if profile.radial { "" } else { " (state is not radial)" },
    );
    println!("cross-sections: {}", path.display());

    if cfg.solver.enforce_stability && result.energy_increases > 0 {
        return Ok(2);
    }
    Ok(0)
}

/// Human-readable stability report; factored out so tests can assert on it.
pub fn stability_report(cfg: &RunConfig) -> String {
    let bounds = solver::stability_constants(&cfg.model, &cfg.grid);
    let pot = model::potential_bounds(cfg.model.indicator);
    let verdict = |value: f64, min: f64| if value >= min { "satisfied" } else { "NOT satisfied" };
    let mut s = String::new();
    s.push_str(&format!(
        "potential bounds: L_W = {}, L_f = {}, L_p = {}\n",
        pot.l_w, pot.l_f, pot.l_p
    ));
    s.push_str(&format!(
        "inverse-Laplacian sup-norm bound = {}\n",
        bounds.inv_lap_norm_bound
    ));
    s.push_str(&format!(
        "kappa_min = {}, beta_min = {}\n",
        bounds.kappa_min, bounds.beta_min
    ));
    s.push_str(&format!(
        "kappa_h = {} {}\n",
        cfg.solver.kappa_h,
        verdict(cfg.solver.kappa_h, bounds.kappa_min)
    ));
    s.push_str(&format!(
        "beta_h = {} {}\n",
        cfg.solver.beta_h,
        verdict(cfg.solver.beta_h, bounds.beta_min)
    ));
    s
}

fn cmd_stability(args: &[String]) -> CliResult {
    let flags = parse_flags(args, &["config"])?;
    let cfg = load_config(&flags)?;
    print!("{}", stability_report(&cfg));
    Ok(0)
}
