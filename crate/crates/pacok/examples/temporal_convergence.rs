//! First-order temporal convergence of the semi-implicit scheme.
//!
//! Runs the smooth tanh-disc initial state to `T = 0.1` with step sizes
//! halved from `1e-1` down to `1.5625e-3`, measures the discrete L2 error
//! against a fine-step benchmark, and prints the observed `log2` rates,
//! which approach 1.
//!
//!     cargo run --release --example temporal_convergence [N] [TAU_BENCH]
//!
//! Defaults: `N = 256`, `TAU_BENCH = 1e-4`. The full-resolution table uses
//! `N = 512` and `TAU_BENCH = 1e-5` (slow: the benchmark alone is 10^4
//! steps on a 512^2 grid).

use std::fs::File;
use std::io::BufWriter;

use pacok::analysis::convergence_study;
use pacok::csv_io::write_convergence_csv;
use pacok::model::ModelParams;
use pacok::solver::SolverParams;
use pacok::GridSpec;

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args
        .next()
        .map(|a| a.parse().expect("N must be an integer"))
        .unwrap_or(256);
    let tau_bench: f64 = args
        .next()
        .map(|a| a.parse().expect("TAU_BENCH must be a float"))
        .unwrap_or(1e-4);

    let grid = GridSpec::square(n).expect("valid grid");
    let taus: Vec<f64> = (0..7).map(|k| 0.1 / (1u32 << k) as f64).collect();
    let solver = SolverParams {
        enforce_stability: false,
        ..SolverParams::new(1.0)
    };
    std::fs::create_dir_all("out-temporal-convergence")?;

    for eps_over_h in [5.0, 10.0, 20.0] {
        let model = ModelParams::new(eps_over_h * grid.hx(), 100.0, 0.15, 1000.0).unwrap();
        println!("eps = {eps_over_h} h = {:.6}", model.eps);
        let rows = convergence_study(&grid, &model, &solver, &taus, tau_bench, 0.1)
            .expect("valid study setup");
        println!("  {:<12} {:<14} rate", "tau", "L2 error");
        for r in &rows {
            match r.rate {
                Some(rate) => println!("  {:<12.4e} {:<14.6e} {:.3}", r.tau, r.error, rate),
                None => println!("  {:<12.4e} {:<14.6e} --", r.tau, r.error),
            }
        }
        let path = format!("out-temporal-convergence/convergence_eps{eps_over_h}h.csv");
        write_convergence_csv(&rows, BufWriter::new(File::create(&path)?))?;
        println!("  table -> {path}\n");
    }
    Ok(())
}
