// Temporary probe: coarser time step for bubble-count settling.
//   cargo test --test perf_probe4 -- --ignored --nocapture
use std::time::Instant;

use pacok::analysis;
use pacok::grid::GridSpec;
use pacok::model::ModelParams;
use pacok::solver::{self, SolverParams};

#[test]
#[ignore]
fn coarse_tau_bubble_runs() {
    let g = GridSpec::square(128).unwrap();
    for (gamma, seed) in [
        (200.0, 0u64),
        (200.0, 1),
        (200.0, 2),
        (2000.0, 0),
        (20000.0, 0),
    ] {
        let p = ModelParams::new(0.078125, gamma, 0.15, 1000.0).unwrap();
        let s = SolverParams {
            enforce_stability: false,
            max_steps: 25_000,
            tol: 1e-3,
            ..SolverParams::new(2e-2)
        };
        let phi0 = analysis::ic_block_random(&g, 4, seed).unwrap();
        let t0 = Instant::now();
        let mut counts = Vec::new();
        let mut increases = 0usize;
        let mut prev = f64::INFINITY;
        let r = solver::run(&phi0, &p, &s, 2500, |rep, phi| {
            if rep.energy.total > prev {
                increases += 1;
            }
            prev = rep.energy.total;
            counts.push(format!(
                "{}:{}({:.0e})",
                rep.step,
                analysis::count_bubbles(phi, 0.5),
                rep.step_change
            ));
        });
        println!(
            "gamma={gamma} seed={seed}: {} steps {:.0}s conv={} final={} e_incr={} counts={counts:?}",
            r.steps,
            t0.elapsed().as_secs_f64(),
            r.converged,
            analysis::count_bubbles(&r.phi, 0.5),
            increases,
        );
    }
}
