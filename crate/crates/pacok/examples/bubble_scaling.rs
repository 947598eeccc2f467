//! The 2/3 power law between bubble count and repulsion strength.
//!
//! Relaxes block-random states for several repulsion strengths (a few seeds
//! each), counts the bubbles in every final assembly, and fits
//! `count ~ gamma^p` in log-log coordinates. The fitted exponent sits near
//! 2/3.
//!
//!     cargo run --release --example bubble_scaling [N] [SEEDS]
//!
//! Defaults: `N = 256`, `SEEDS = 3`, gammas 200/2000/20000. The reference
//! sweep uses `N = 512`, five seeds, and gammas 200/500/2000/5000/20000
//! (hours of compute). Set PACOK_THREADS to cap worker parallelism.

use std::fs::File;
use std::io::BufWriter;

use pacok::analysis::{fit_power_law, modal_counts, sweep_gamma};
use pacok::csv_io::write_bubbles_csv;
use pacok::model::ModelParams;
use pacok::solver::SolverParams;
use pacok::GridSpec;

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args
        .next()
        .map(|a| a.parse().expect("N must be an integer"))
        .unwrap_or(256);
    let n_seeds: u64 = args
        .next()
        .map(|a| a.parse().expect("SEEDS must be an integer"))
        .unwrap_or(3);

    let grid = GridSpec::square(n).expect("valid grid");
    let eps = 10.0 * 2.0 / 512.0;
    let model = ModelParams::new(eps, 1.0, 0.15, 1000.0).unwrap();
    let solver = SolverParams {
        max_steps: 8_000,
        enforce_stability: false,
        ..SolverParams::new(5e-3)
    };
    let gammas = [200.0, 2000.0, 20000.0];
    let seeds: Vec<u64> = (0..n_seeds).collect();
    let threads = std::env::var("PACOK_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));

    println!(
        "sweeping gamma over {gammas:?} with {} seed(s) on {threads} thread(s) ...",
        seeds.len()
    );
    let outcomes = sweep_gamma(
        &grid, &model, &solver, &gammas, &seeds, n / 32, 0.5, threads,
    )
    .expect("sweep setup is valid");

    std::fs::create_dir_all("out-bubble-scaling")?;
    write_bubbles_csv(
        &outcomes,
        BufWriter::new(File::create("out-bubble-scaling/bubbles.csv")?),
    )?;

    println!("gamma      seed  count  converged");
    for o in &outcomes {
        println!("{:<10} {:<5} {:<6} {}", o.gamma, o.seed, o.count, o.converged);
    }

    let modes = modal_counts(&outcomes);
    let points: Vec<(f64, f64)> = modes.iter().map(|m| (m.gamma, m.count as f64)).collect();
    println!("\nmodal counts: {:?}", modes.iter().map(|m| (m.gamma, m.count)).collect::<Vec<_>>());
    match fit_power_law(&points) {
        Ok(fit) => println!("count ~ {:.3} * gamma^{:.3}  (2/3 law)", fit.prefactor, fit.exponent),
        Err(e) => println!("fit unavailable: {e}"),
    }
    println!("replicates -> out-bubble-scaling/bubbles.csv");
    Ok(())
}
