// Temporary probe for bubble-sweep sizing; run with:
//   cargo test --test perf_probe2 -- --ignored --nocapture
use std::time::Instant;

use pacok::analysis;
use pacok::grid::GridSpec;
use pacok::model::ModelParams;
use pacok::solver::{self, SolverParams};

#[test]
#[ignore]
fn bubble_run_timings() {
    let g = GridSpec::square(256).unwrap();
    for (gamma, eps) in [
        (200.0, 0.0390625),
        (2000.0, 0.0390625),
        (20000.0, 0.0390625),
        (20000.0, 0.078125),
        (200.0, 0.078125),
        (2000.0, 0.078125),
    ] {
        let p = ModelParams::new(eps, gamma, 0.15, 1000.0).unwrap();
        let s = SolverParams {
            enforce_stability: false,
            max_steps: 6000,
            tol: 1e-3,
            ..SolverParams::new(5e-3)
        };
        let phi0 = analysis::ic_block_random(&g, 8, 0).unwrap();
        let t0 = Instant::now();
        let mut counts = Vec::new();
        let r = solver::run(&phi0, &p, &s, 500, |rep, phi| {
            counts.push((rep.step, analysis::count_bubbles(phi, 0.5), rep.step_change));
        });
        println!(
            "gamma={gamma} eps={eps}: {} steps in {:.0}s converged={} counts={:?}",
            r.steps,
            t0.elapsed().as_secs_f64(),
            r.converged,
            counts
                .iter()
                .map(|(s, c, sc)| format!("{s}:{c}({sc:.1e})"))
                .collect::<Vec<_>>()
        );
    }
}
