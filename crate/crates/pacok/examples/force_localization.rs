//! Force localization at a disc equilibrium.
//!
//! Relaxes the characteristic function of a disc to equilibrium twice: once
//! with the quintic indicator (forces localized at the interface, tanh
//! profile) and once with the classical linear indicator `f(phi) = phi`
//! (forces spread over the whole domain, far field off by O(1e-2)). Writes
//! the `y = 0` cross-sections of the state and the three forces for both
//! runs and prints the profile diagnostics.
//!
//!     cargo run --release --example force_localization [N]
//!
//! `N` is the grid size per direction (default 128).

use std::fs::File;
use std::io::BufWriter;

use pacok::analysis::{cross_section, ic_disc_indicator, tanh_profile_deviation};
use pacok::csv_io::{write_forces_csv, ForcesRow};
use pacok::model::{forces, Indicator, ModelParams};
use pacok::solver::{run, SolverParams};
use pacok::{Field, GridSpec};

fn relax_and_report(
    name: &str,
    phi0: &Field,
    p: &ModelParams,
    s: &SolverParams,
) -> std::io::Result<()> {
    println!("[{name}] relaxing (tol = {:.0e}) ...", s.tol);
    let result = run(phi0, p, s, 1000, |rep, _| {
        println!(
            "[{name}] step {:>6}  E = {:.8e}  step change = {:.3e}",
            rep.step, rep.energy.total, rep.step_change
        );
    });
    let f = forces(&result.phi, p);
    let sum = f.sum();

    let phi_row = cross_section(&result.phi, 0.0);
    let t_row = cross_section(&f.tension, 0.0);
    let n_row = cross_section(&f.nonlocal, 0.0);
    let v_row = cross_section(&f.volume, 0.0);
    let s_row = cross_section(&sum, 0.0);
    let rows: Vec<ForcesRow> = (0..phi_row.len())
        .map(|i| ForcesRow {
            x: phi_row[i].0,
            phi: phi_row[i].1,
            tension: t_row[i].1,
            nonlocal: n_row[i].1,
            volume: v_row[i].1,
            sum: s_row[i].1,
        })
        .collect();
    let path = format!("out-force-localization/forces_{name}.csv");
    write_forces_csv(&rows, BufWriter::new(File::create(&path)?))?;

    let profile = tanh_profile_deviation(&result.phi, p.eps, p.omega);
    println!(
        "[{name}] {} after {} steps",
        if result.converged { "converged" } else { "stopped" },
        result.steps
    );
    println!("[{name}] |tension + nonlocal + volume|_inf = {:.3e}", sum.norm_linf());
    println!(
        "[{name}] interface radius = {:.4}, tanh fit error = {:.3e}, far-field deviation = {:.3e}",
        profile.interface_radius, profile.fit_err, profile.far_field_dev
    );
    println!("[{name}] cross-sections -> {path}");
    Ok(())
}

fn main() -> std::io::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse().expect("N must be an integer"))
        .unwrap_or(128);
    let grid = GridSpec::square(n).expect("valid grid");
    std::fs::create_dir_all("out-force-localization")?;

    // interface width fixed in physical units; gamma = 100, omega = 0.15
    let eps = 20.0 / 256.0;
    let phi0 = ic_disc_indicator(&grid, 0.15).expect("disc fits");

    let new_model = ModelParams::new(eps, 100.0, 0.15, 1000.0).unwrap();
    let solver = SolverParams {
        tol: 1e-4,
        enforce_stability: false,
        ..SolverParams::new(1e-3)
    };
    relax_and_report("new", &phi0, &new_model, &solver)?;

    // classical indicator: f(phi) = phi with the matching stabilizer beta = 1
    let old_model = new_model.with_indicator(Indicator::Linear);
    let old_solver = SolverParams {
        beta_h: 1.0,
        ..solver
    };
    relax_and_report("old", &phi0, &old_model, &old_solver)?;

    println!("\nthe quintic indicator keeps the far field flat at 0/1 and");
    println!("confines all three forces to the interface; the linear one");
    println!("leaks O(1e-2) deviations and global forces.");
    Ok(())
}
