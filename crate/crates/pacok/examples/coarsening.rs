//! Coarsening from a random state into a hexagonal bubble assembly.
//!
//! Starts from blockwise-constant uniform noise and integrates the flow with
//! a strong long-range repulsion. Small domains merge or vanish, the
//! surviving bubbles equalize in size, and the final assembly is hexagonal.
//! Field snapshots and the energy history land in `out-coarsening/` for
//! external plotting; bubble counts are printed as the run proceeds.
//!
//!     cargo run --release --example coarsening [N] [GAMMA]
//!
//! Defaults: `N = 256`, `GAMMA = 2000`. The reference scale is `N = 512`.

use std::fs::File;
use std::io::BufWriter;

use pacok::analysis::{count_bubbles, ic_block_random};
use pacok::csv_io::EnergyLog;
use pacok::model::ModelParams;
use pacok::snapshot::write_snapshot;
use pacok::solver::{run, SolverParams};
use pacok::GridSpec;

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args
        .next()
        .map(|a| a.parse().expect("N must be an integer"))
        .unwrap_or(256);
    let gamma: f64 = args
        .next()
        .map(|a| a.parse().expect("GAMMA must be a float"))
        .unwrap_or(2000.0);

    let grid = GridSpec::square(n).expect("valid grid");
    // block size fixed at 1/16 of the domain width; interface 10 cells at
    // the reference resolution
    let ratio = n / 32;
    let eps = 10.0 * 2.0 / 512.0;
    let model = ModelParams::new(eps, gamma, 0.15, 1000.0).unwrap();
    let solver = SolverParams {
        max_steps: 20_000,
        enforce_stability: false,
        ..SolverParams::new(5e-3)
    };

    std::fs::create_dir_all("out-coarsening")?;
    let phi0 = ic_block_random(&grid, ratio, 0).expect("ratio divides N");
    write_snapshot(&phi0, "out-coarsening/snapshot_00000000.bin".as_ref())
        .expect("snapshot written");
    let mut log = EnergyLog::new(BufWriter::new(File::create("out-coarsening/energy.csv")?));

    println!("gamma = {gamma}, N = {n}, tau = {}, stopping at 1e-3", solver.tau);
    let result = run(&phi0, &model, &solver, 50, |rep, phi| {
        log.append(rep).expect("energy row written");
        if rep.step % 500 == 0 || rep.converged {
            let bubbles = count_bubbles(phi, 0.5);
            println!(
                "step {:>6}  t = {:>7.2}  E = {:.6e}  bubbles = {:>3}  step change = {:.2e}",
                rep.step, rep.time, rep.energy.total, bubbles, rep.step_change
            );
            let path = format!("out-coarsening/snapshot_{:08}.bin", rep.step);
            write_snapshot(phi, path.as_ref()).expect("snapshot written");
        }
    });
    log.flush()?;
    write_snapshot(&result.phi, "out-coarsening/final.bin".as_ref()).expect("snapshot written");

    println!(
        "{} after {} steps; {} bubbles; energy history and snapshots in out-coarsening/",
        if result.converged { "converged" } else { "stopped" },
        result.steps,
        count_bubbles(&result.phi, 0.5),
    );
    Ok(())
}
