//! Experiment harnesses: initial conditions, the temporal-convergence study,
//! interface-profile diagnostics, bubble counting, and the power-law fit for
//! bubble counts against the repulsion strength.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::model::ModelParams;
use crate::solver::{self, SolverParams};

/// Characteristic function of the centered disc of area `omega |Omega|`
/// (radius `r0 = sqrt(omega |Omega| / pi)`).
pub fn ic_disc_indicator(g: &GridSpec, omega: f64) -> Result<Field> {
    let requested_area = omega * g.area();
    let max_area = std::f64::consts::PI * g.x.min(g.y).powi(2);
    if requested_area >= max_area {
        return Err(Error::DiscTooLarge {
            requested_area,
            max_area,
        });
    }
    let r0_sq = requested_area / std::f64::consts::PI;
    Ok(Field::from_fn(*g, |x, y| {
        if x * x + y * y <= r0_sq {
            1.0
        } else {
            0.0
        }
    }))
}

/// Smooth radially symmetric profile `0.5 + 0.5 tanh((r0 - r) / (eps/3))`
/// with `r0 = sqrt(omega |Omega| / pi) + r_shift`.
pub fn ic_tanh_disc(g: &GridSpec, omega: f64, eps: f64, r_shift: f64) -> Field {
    let r0 = (omega * g.area() / std::f64::consts::PI).sqrt() + r_shift;
    let w = eps / 3.0;
    Field::from_fn(*g, |x, y| {
        let r = (x * x + y * y).sqrt();
        0.5 + 0.5 * ((r0 - r) / w).tanh()
    })
}

/// Piecewise-constant random state: uniform `[0, 1)` values on a coarse
/// `(Nx/ratio) x (Ny/ratio)` mesh, each replicated over a `ratio x ratio`
/// block of fine cells. Reproducible from the seed.
pub fn ic_block_random(g: &GridSpec, ratio: usize, seed: u64) -> Result<Field> {
    if ratio == 0 || g.nx % ratio != 0 || g.ny % ratio != 0 {
        return Err(Error::RatioMismatch {
            ratio,
            nx: g.nx,
            ny: g.ny,
        });
    }
    let (cx, cy) = (g.nx / ratio, g.ny / ratio);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coarse: Vec<f64> = (0..cx * cy).map(|_| rng.random_range(0.0..1.0)).collect();
    let mut values = Vec::with_capacity(g.len());
    for j in 0..g.ny {
        for i in 0..g.nx {
            values.push(coarse[(j / ratio) * cx + i / ratio]);
        }
    }
    Field::from_values(*g, values)
}

/// One row of the temporal-convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub tau: f64,
    /// Discrete L2 distance to the benchmark solution at the final time.
    pub error: f64,
    /// `log2(error_prev / error)`; absent on the first row.
    pub rate: Option<f64>,
}

/// Attach successive `log2` rates to a list of errors (in input order).
pub fn convergence_rows(taus: &[f64], errors: &[f64]) -> Vec<ConvergenceRow> {
    assert_eq!(taus.len(), errors.len());
    let mut rows = Vec::with_capacity(taus.len());
    for (i, (&tau, &error)) in taus.iter().zip(errors).enumerate() {
        let rate = if i == 0 {
            None
        } else {
            Some((errors[i - 1] / error).log2())
        };
        rows.push(ConvergenceRow { tau, error, rate });
    }
    rows
}

/// Temporal-convergence study: run from the shifted tanh disc to time
/// `t_final` with each step size in `taus` (fixed step counts, no stopping
/// rule) and measure the discrete L2 distance to the `tau_bench` solution.
pub fn convergence_study(
    g: &GridSpec,
    p: &ModelParams,
    s: &SolverParams,
    taus: &[f64],
    tau_bench: f64,
    t_final: f64,
) -> Result<Vec<ConvergenceRow>> {
    let steps_for = |tau: f64| -> Result<usize> {
        let n = (t_final / tau).round();
        if n < 1.0 || (n * tau - t_final).abs() > 1e-9 * t_final {
            return Err(Error::InvalidParam(format!(
                "t_final = {t_final} is not an integer multiple of tau = {tau}"
            )));
        }
        Ok(n as usize)
    };
    if let Some(&min_tau) = taus.iter().min_by(|a, b| a.total_cmp(b)) {
        if tau_bench >= min_tau {
            return Err(Error::InvalidParam(format!(
                "benchmark step {tau_bench} must be smaller than every tested step (min {min_tau})"
            )));
        }
    }

    let phi0 = ic_tanh_disc(g, p.omega, p.eps, 0.1);
    let bench = solver::run_fixed(
        &phi0,
        p,
        &SolverParams { tau: tau_bench, ..*s },
        steps_for(tau_bench)?,
    );

    let mut errors = Vec::with_capacity(taus.len());
    for &tau in taus {
        let n = steps_for(tau)?;
        let phi = solver::run_fixed(&phi0, p, &SolverParams { tau, ..*s }, n);
        let diff = phi.zip_map(&bench, |a, b| a - b);
        errors.push(diff.norm_l2());
    }
    Ok(convergence_rows(taus, &errors))
}

/// Row of values along the grid line nearest to `y = axis_value`, as
/// `(x_i, phi_i)` pairs.
pub fn cross_section(phi: &Field, axis_value: f64) -> Vec<(f64, f64)> {
    let g = phi.grid();
    let j = ((axis_value + g.y) / g.hy()).round() as isize;
    let j = j.rem_euclid(g.ny as isize) as usize;
    (0..g.nx).map(|i| (g.node_x(i), phi.get(i, j))).collect()
}

/// Interface-profile diagnostics for a (nominally) radial state.
#[derive(Debug, Clone, Copy)]
pub struct TanhProfile {
    /// Max deviation of `phi` from `{0, 1}` at points farther than `3 eps`
    /// from the fitted interface radius.
    pub far_field_dev: f64,
    /// L-infinity distance between the `y = 0` cross-section and the best
    /// fit `0.5 + 0.5 tanh((r* - r) / (eps/3))` over the radius `r*`.
    pub fit_err: f64,
    /// The fitted radius `r*`.
    pub interface_radius: f64,
    /// False when the half-axis interface radii disagree (profile is not
    /// radially symmetric; the other fields are then unreliable).
    pub radial: bool,
}

fn golden_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > 1e-13 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Radius where the profile crosses 0.5 along one half-axis, by linear
/// interpolation outward from the center. `None` when there is no crossing.
fn crossing_radius(samples: &[(f64, f64)]) -> Option<f64> {
    for w in samples.windows(2) {
        let (r0, v0) = w[0];
        let (r1, v1) = w[1];
        if (v0 - 0.5) * (v1 - 0.5) <= 0.0 && v0 != v1 {
            return Some(r0 + (0.5 - v0) / (v1 - v0) * (r1 - r0));
        }
    }
    None
}

/// Fit the hyperbolic-tangent interface profile and measure deviations.
pub fn tanh_profile_deviation(phi: &Field, eps: f64, omega: f64) -> TanhProfile {
    let g = *phi.grid();
    let _ = omega; // the scan brackets the whole domain; omega kept for signature parity
    let section = cross_section(phi, 0.0);
    let width = eps / 3.0;
    let misfit = |rstar: f64| -> f64 {
        section.iter().fold(0.0f64, |m, &(x, v)| {
            let q = 0.5 + 0.5 * ((rstar - x.abs()) / width).tanh();
            m.max((v - q).abs())
        })
    };

    // coarse scan to bracket, then golden-section refinement
    let rmax = g.x.min(g.y);
    let npts = 512;
    let mut best = (0usize, f64::INFINITY);
    for m in 0..=npts {
        let r = rmax * m as f64 / npts as f64;
        let v = misfit(r);
        if v < best.1 {
            best = (m, v);
        }
    }
    let lo = rmax * best.0.saturating_sub(1) as f64 / npts as f64;
    let hi = rmax * (best.0 + 1).min(npts) as f64 / npts as f64;
    let interface_radius = golden_min(lo, hi, misfit);
    let fit_err = misfit(interface_radius);

    let mut far_field_dev = 0.0f64;
    for j in 0..g.ny {
        let y = g.node_y(j);
        for i in 0..g.nx {
            let x = g.node_x(i);
            let r = (x * x + y * y).sqrt();
            if (r - interface_radius).abs() > 3.0 * eps {
                let v = phi.get(i, j);
                far_field_dev = far_field_dev.max(v.abs().min((v - 1.0).abs()));
            }
        }
    }

    // symmetry check: interface radii along the four half-axes must agree
    let (ic, jc) = (g.nx / 2, g.ny / 2); // node at the origin
    let mut radii = Vec::new();
    let mut all_cross = true;
    let half_axes: [Box<dyn Fn(usize) -> (f64, f64)>; 4] = [
        Box::new(|m| (g.node_x(ic + m).abs(), phi.get(ic + m, jc))),
        Box::new(|m| (g.node_x(ic - m).abs(), phi.get(ic - m, jc))),
        Box::new(|m| (g.node_y(jc + m).abs(), phi.get(ic, jc + m))),
        Box::new(|m| (g.node_y(jc - m).abs(), phi.get(ic, jc - m))),
    ];
    for (axis, sample) in half_axes.iter().enumerate() {
        let n = if axis < 2 { g.nx / 2 } else { g.ny / 2 };
        let line: Vec<(f64, f64)> = (0..n).map(sample).collect();
        match crossing_radius(&line) {
            Some(r) => radii.push(r),
            None => all_cross = false,
        }
    }
    let spread = radii
        .iter()
        .fold(0.0f64, |m, &r| m.max(r - radii.iter().cloned().fold(f64::INFINITY, f64::min)));
    let radial = all_cross && spread <= (0.25 * eps).max(3.0 * g.hx().max(g.hy()));
    if !radial {
        log::warn!(
            "profile is not radially symmetric (axis radii {:?}); tanh fit is unreliable",
            radii
        );
    }

    TanhProfile {
        far_field_dev,
        fit_err,
        interface_radius,
        radial,
    }
}

/// Number of connected components of `{phi > threshold}` under
/// 4-connectivity with periodic wraparound.
pub fn count_bubbles(phi: &Field, threshold: f64) -> usize {
    let g = phi.grid();
    let (nx, ny) = (g.nx, g.ny);
    let above: Vec<bool> = phi.values().iter().map(|&v| v > threshold).collect();
    let mut seen = vec![false; above.len()];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let mut components = 0usize;

    for start in 0..above.len() {
        if !above[start] || seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push((start % nx, start / nx));
        while let Some((i, j)) = stack.pop() {
            let neighbors = [
                ((i + 1) % nx, j),
                ((i + nx - 1) % nx, j),
                (i, (j + 1) % ny),
                (i, (j + ny - 1) % ny),
            ];
            for (ni, nj) in neighbors {
                let idx = nj * nx + ni;
                if above[idx] && !seen[idx] {
                    seen[idx] = true;
                    stack.push((ni, nj));
                }
            }
        }
    }
    components
}

/// Least-squares power law `count ~ prefactor * gamma^exponent` in log-log
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(g, c)| g <= 0.0 || c <= 0.0) {
        return Err(Error::DegenerateFit(
            "log-log fit needs strictly positive data".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(g, c)| (g.ln(), c.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx < 1e-24 {
        return Err(Error::DegenerateFit("all abscissae are equal".into()));
    }
    let exponent = sxy / sxx;
    Ok(PowerLawFit {
        exponent,
        prefactor: (my - exponent * mx).exp(),
    })
}

/// One bubble-count replicate from the gamma sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOutcome {
    pub gamma: f64,
    pub seed: u64,
    pub count: usize,
    pub converged: bool,
}

/// Modal bubble count for one repulsion strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleCount {
    pub gamma: f64,
    /// Mode of the replicate counts.
    pub count: usize,
    /// Number of replicates.
    pub runs: usize,
    /// Whether every replicate agreed with the mode.
    pub unanimous: bool,
}

/// Run `gammas x seeds` independent relaxations from block-random states and
/// count bubbles at the final state of each. Jobs execute on up to
/// `threads` worker threads; results are ordered by `(gamma, seed)`.
pub fn sweep_gamma(
    g: &GridSpec,
    p: &ModelParams,
    s: &SolverParams,
    gammas: &[f64],
    seeds: &[u64],
    ratio: usize,
    threshold: f64,
    threads: usize,
) -> Result<Vec<SweepOutcome>> {
    let mut jobs: Vec<(f64, u64)> = Vec::new();
    for &gamma in gammas {
        for &seed in seeds {
            jobs.push((gamma, seed));
        }
    }
    // fail fast on a bad ratio before spawning workers
    ic_block_random(g, ratio, 0)?;

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<SweepOutcome>> = Mutex::new(Vec::with_capacity(jobs.len()));
    let workers = threads.max(1).min(jobs.len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= jobs.len() {
                    break;
                }
                let (gamma, seed) = jobs[idx];
                let model = ModelParams { gamma, ..*p };
                let phi0 = ic_block_random(g, ratio, seed).expect("ratio validated above");
                let result = solver::run(&phi0, &model, s, usize::MAX, |_, _| {});
                let count = count_bubbles(&result.phi, threshold);
                results.lock().unwrap().push(SweepOutcome {
                    gamma,
                    seed,
                    count,
                    converged: result.converged,
                });
            });
        }
    });

    let mut out = results.into_inner().unwrap();
    out.sort_by(|a, b| a.gamma.total_cmp(&b.gamma).then(a.seed.cmp(&b.seed)));
    Ok(out)
}

/// Collapse sweep replicates to the modal count per gamma (ties resolve to
/// the smaller count).
pub fn modal_counts(outcomes: &[SweepOutcome]) -> Vec<BubbleCount> {
    let mut gammas: Vec<f64> = outcomes.iter().map(|o| o.gamma).collect();
    gammas.sort_by(f64::total_cmp);
    gammas.dedup();
    gammas
        .iter()
        .map(|&gamma| {
            let counts: Vec<usize> = outcomes
                .iter()
                .filter(|o| o.gamma == gamma)
                .map(|o| o.count)
                .collect();
            let mut best = (0usize, 0usize); // (count value, multiplicity)
            let mut distinct: Vec<usize> = counts.clone();
            distinct.sort_unstable();
            distinct.dedup();
            for value in distinct {
                let mult = counts.iter().filter(|&&c| c == value).count();
                if mult > best.1 {
                    best = (value, mult);
                }
            }
            let unanimous = counts.iter().all(|&c| c == best.0);
            if !unanimous {
                log::warn!("bubble counts disagree at gamma = {gamma}: {counts:?}");
            }
            BubbleCount {
                gamma,
                count: best.0,
                runs: counts.len(),
                unanimous,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{precompute_symbol, solve_implicit};
    use std::f64::consts::PI;

    #[test]
    fn disc_indicator_radius_and_mass() {
        let g = GridSpec::square(256).unwrap();
        let phi = ic_disc_indicator(&g, 0.15).unwrap();
        // r0 = sqrt(0.6/pi) ~ 0.4370
        let r0 = (0.15 * 4.0 / PI).sqrt();
        assert!((r0 - 0.4370).abs() < 1e-4);
        assert_eq!(phi.get(g.nx / 2, g.ny / 2), 1.0); // origin
        assert_eq!(phi.get(0, 0), 0.0); // corner (-1, -1)
        // pixelized mass matches omega up to a perimeter-sized error
        assert!((phi.mean() - 0.15).abs() < 1.5 * g.hx());
    }

    #[test]
    fn disc_that_does_not_fit_is_rejected() {
        let g = GridSpec::square(64).unwrap();
        assert!(matches!(
            ic_disc_indicator(&g, 0.9),
            Err(Error::DiscTooLarge { .. })
        ));
    }

    #[test]
    fn tanh_disc_profile_values() {
        let g = GridSpec::square(128).unwrap();
        let eps = 0.15;
        let phi = ic_tanh_disc(&g, 0.15, eps, 0.1);
        let r0 = (0.15 * 4.0 / PI).sqrt() + 0.1;
        // every node matches the defining formula, evaluated independently
        for j in (0..g.ny).step_by(17) {
            for i in (0..g.nx).step_by(13) {
                let (x, y) = (g.node_x(i), g.node_y(j));
                let r = (x * x + y * y).sqrt();
                let q = 0.5 + 0.5 * ((r0 - r) / (eps / 3.0)).tanh();
                assert!((phi.get(i, j) - q).abs() < 1e-14);
            }
        }
        // value at r = r0 is exactly one half; at r = r0 - eps it is ~0.9975
        assert_eq!(0.5 + 0.5 * ((r0 - r0) / (eps / 3.0)).tanh(), 0.5);
        let near = 0.5 + 0.5 * (eps / (eps / 3.0)).tanh();
        assert!((near - 0.99752737684).abs() < 1e-9);
        assert!(phi.values().iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn block_random_structure_and_determinism() {
        let g = GridSpec::square(64).unwrap();
        let phi = ic_block_random(&g, 8, 42).unwrap();
        // constant inside each 8x8 block
        for bj in 0..8 {
            for bi in 0..8 {
                let v = phi.get(bi * 8, bj * 8);
                for dj in 0..8 {
                    for di in 0..8 {
                        assert_eq!(phi.get(bi * 8 + di, bj * 8 + dj), v);
                    }
                }
            }
        }
        assert!(phi.values().iter().all(|&v| (0.0..1.0).contains(&v)));

        let same = ic_block_random(&g, 8, 42).unwrap();
        assert_eq!(phi, same);
        let other = ic_block_random(&g, 8, 43).unwrap();
        assert_ne!(phi, other);

        // single block: constant field
        let flat = ic_block_random(&g, 64, 1).unwrap();
        let v0 = flat.values()[0];
        assert!(flat.values().iter().all(|&v| v == v0));

        assert!(matches!(
            ic_block_random(&g, 7, 0),
            Err(Error::RatioMismatch { .. })
        ));
    }

    #[test]
    fn block_random_paper_scale_block_structure() {
        let g = GridSpec::square(512).unwrap();
        let phi = ic_block_random(&g, 16, 0).unwrap();
        // 32 x 32 distinct blocks, zero variance inside each
        let mut distinct = std::collections::BTreeSet::new();
        for bj in 0..32 {
            for bi in 0..32 {
                let v = phi.get(bi * 16, bj * 16);
                distinct.insert(v.to_bits());
                assert_eq!(phi.get(bi * 16 + 7, bj * 16 + 9), v);
            }
        }
        assert!(distinct.len() > 1000); // 1024 draws, collisions essentially impossible
    }

    #[test]
    fn convergence_rows_rates() {
        let rows = convergence_rows(&[0.1], &[1.0]);
        assert_eq!(rows.len(), 1);
        assert!(rows[0].rate.is_none());

        let rows = convergence_rows(&[0.2, 0.1, 0.05], &[4.0, 2.0, 1.0]);
        assert!(rows[0].rate.is_none());
        assert!((rows[1].rate.unwrap() - 1.0).abs() < 1e-14);
        assert!((rows[2].rate.unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn harness_recovers_first_order_rate_on_the_heat_equation() {
        // pure implicit Euler for phi_t = eps * Lap phi, driven through the
        // same symbol/solve machinery with the nonlinear branches off
        let g = GridSpec::square(32).unwrap();
        let eps = 0.1;
        let p = ModelParams::new(eps, 0.0, 0.5, 1e-30).unwrap();
        let phi0 = Field::from_fn(g, |x, _| (PI * x).cos());
        let decay = eps * PI * PI;
        let t_final = 0.5;

        let taus = [0.05, 0.025, 0.0125];
        let mut errors = Vec::new();
        for &tau in &taus {
            let s = SolverParams {
                kappa_h: 0.0,
                beta_h: 0.0,
                enforce_stability: false,
                ..SolverParams::new(tau)
            };
            let sym = precompute_symbol(&p, &s, &g);
            let mut phi = phi0.clone();
            for _ in 0..(t_final / tau).round() as usize {
                let mut rhs = phi.clone();
                rhs.scale(1.0 / tau);
                phi = solve_implicit(&rhs, &sym);
            }
            let exact = phi0.map(|v| v * (-decay * t_final).exp());
            errors.push(phi.zip_map(&exact, |a, b| a - b).norm_l2());
        }
        let rows = convergence_rows(&taus, &errors);
        for row in &rows[1..] {
            let rate = row.rate.unwrap();
            assert!((0.9..1.1).contains(&rate), "rate {rate}");
        }
    }

    #[test]
    fn small_scale_pacok_study_is_first_order_ish() {
        let g = GridSpec::square(64).unwrap();
        let p = ModelParams::new(0.15, 100.0, 0.15, 1000.0).unwrap();
        let s = SolverParams {
            enforce_stability: false,
            ..SolverParams::new(1.0)
        };
        let rows =
            convergence_study(&g, &p, &s, &[4e-3, 2e-3, 1e-3], 5e-5, 0.1).unwrap();
        let last = rows.last().unwrap().rate.unwrap();
        assert!((0.5..1.3).contains(&last), "rate {last}");
        // errors shrink monotonically with tau
        assert!(rows[0].error > rows[1].error && rows[1].error > rows[2].error);
    }

    #[test]
    fn convergence_study_rejects_bad_benchmark_and_grid() {
        let g = GridSpec::square(16).unwrap();
        let p = ModelParams::new(0.4, 1.0, 0.15, 1.0).unwrap();
        let s = SolverParams::new(1.0);
        assert!(convergence_study(&g, &p, &s, &[0.01], 0.02, 0.1).is_err());
        assert!(convergence_study(&g, &p, &s, &[0.03], 1e-3, 0.1).is_err());
    }

    #[test]
    fn cross_section_reads_the_nearest_row() {
        let g = GridSpec::square(32).unwrap();
        let flat = Field::constant(g, 0.7);
        let row = cross_section(&flat, 0.0);
        assert_eq!(row.len(), 32);
        assert!(row.iter().all(|&(_, v)| v == 0.7));

        let phi = Field::from_fn(g, |x, y| x + 100.0 * y);
        let row = cross_section(&phi, g.node_y(5));
        for (i, &(x, v)) in row.iter().enumerate() {
            assert_eq!(x, g.node_x(i));
            assert_eq!(v, phi.get(i, 5));
        }

        // radial bump: symmetric with max at the center
        let eps = 0.2;
        let bump = ic_tanh_disc(&g, 0.15, eps, 0.0);
        let row = cross_section(&bump, 0.0);
        let max = row.iter().cloned().fold((0.0, 0.0), |m, p| if p.1 > m.1 { p } else { m });
        assert!(max.0.abs() < 1.5 * g.hx());
    }

    #[test]
    fn tanh_fit_recovers_an_exact_profile() {
        let g = GridSpec::square(256).unwrap();
        let eps = 0.15;
        let phi = ic_tanh_disc(&g, 0.15, eps, 0.1);
        let fit = tanh_profile_deviation(&phi, eps, 0.15);
        let r0 = (0.15 * 4.0 / PI).sqrt() + 0.1;
        assert!(fit.radial);
        assert!((fit.interface_radius - r0).abs() < 1e-10);
        assert!(fit.fit_err < 1e-10, "fit_err {}", fit.fit_err);
        // far field deviation is the tanh tail at 3 eps (width eps/3)
        let tail = 0.5 * (1.0 - (9.0f64).tanh());
        assert!(fit.far_field_dev >= tail * 0.5);
        assert!(fit.far_field_dev < 1e-6);
    }

    #[test]
    fn asymmetric_state_is_flagged_not_radial() {
        let g = GridSpec::square(128).unwrap();
        let two_bumps = Field::from_fn(g, |x, y| {
            let d1 = ((x - 0.5) * (x - 0.5) + y * y).sqrt();
            let d2 = ((x + 0.3) * (x + 0.3) + (y - 0.4) * (y - 0.4)).sqrt();
            let b = |d: f64| 0.5 + 0.5 * ((0.15 - d) / 0.03).tanh();
            b(d1).max(0.7 * b(d2))
        });
        let fit = tanh_profile_deviation(&two_bumps, 0.09, 0.15);
        assert!(!fit.radial);
    }

    #[test]
    fn bubble_counting_fixtures() {
        let g = GridSpec::square(64).unwrap();
        assert_eq!(count_bubbles(&Field::zeros(g), 0.5), 0);
        assert_eq!(count_bubbles(&Field::constant(g, 1.0), 0.5), 1);

        let two = Field::from_fn(g, |x, y| {
            let d1 = ((x + 0.5) * (x + 0.5) + y * y).sqrt();
            let d2 = ((x - 0.5) * (x - 0.5) + y * y).sqrt();
            if d1 < 0.2 || d2 < 0.2 {
                1.0
            } else {
                0.0
            }
        });
        assert_eq!(count_bubbles(&two, 0.5), 2);

        // disc crossing the periodic boundary is one component
        let wrapped = Field::from_fn(g, |x, y| {
            let d = ((x.abs() - 1.0) * (x.abs() - 1.0) + y * y).sqrt();
            if d < 0.25 {
                1.0
            } else {
                0.0
            }
        });
        assert_eq!(count_bubbles(&wrapped, 0.5), 1);
    }

    #[test]
    fn bubble_count_invariant_under_threshold_and_shift() {
        let g = GridSpec::square(64).unwrap();
        let field = Field::from_fn(g, |x, y| {
            let d1 = ((x + 0.4) * (x + 0.4) + (y + 0.3) * (y + 0.3)).sqrt();
            let d2 = ((x - 0.45) * (x - 0.45) + (y - 0.35) * (y - 0.35)).sqrt();
            let b = |d: f64| 0.5 + 0.5 * ((0.18 - d) / 0.02).tanh();
            b(d1) + b(d2)
        });
        let n = count_bubbles(&field, 0.5);
        assert_eq!(n, 2);
        assert_eq!(count_bubbles(&field, 0.4), n);
        assert_eq!(count_bubbles(&field, 0.6), n);

        // cyclic shift respects periodicity
        let shifted = Field::from_fn(g, |x, y| {
            let wrap = |t: f64| {
                let mut t = t + 0.7; // shift by an arbitrary offset
                while t >= 1.0 {
                    t -= 2.0;
                }
                t
            };
            let (x, y) = (wrap(x), wrap(y));
            let d1 = ((x + 0.4) * (x + 0.4) + (y + 0.3) * (y + 0.3)).sqrt();
            let d2 = ((x - 0.45) * (x - 0.45) + (y - 0.35) * (y - 0.35)).sqrt();
            let b = |d: f64| 0.5 + 0.5 * ((0.18 - d) / 0.02).tanh();
            b(d1) + b(d2)
        });
        assert_eq!(count_bubbles(&shifted, 0.5), n);
    }

    #[test]
    fn power_law_fit_recovers_exact_exponents() {
        let pts: Vec<(f64, f64)> = [200.0, 2000.0, 20000.0]
            .iter()
            .map(|&g: &f64| (g, g.powf(2.0 / 3.0)))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.exponent - 2.0 / 3.0).abs() < 1e-12);
        assert!((fit.prefactor - 1.0).abs() < 1e-10);
    }

    #[test]
    fn power_law_fit_on_reference_counts() {
        // least-squares slope of the log-log counts (2, 5, 13, 23, 60)
        // at gamma = (200, 500, 2000, 5000, 20000) is ~0.7215
        let pts = [
            (200.0, 2.0),
            (500.0, 5.0),
            (2000.0, 13.0),
            (5000.0, 23.0),
            (20000.0, 60.0),
        ];
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.exponent - 0.7215).abs() < 1e-3, "{}", fit.exponent);
    }

    #[test]
    fn degenerate_power_law_inputs() {
        assert!(matches!(
            fit_power_law(&[(5.0, 2.0)]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(matches!(
            fit_power_law(&[(5.0, 2.0), (5.0, 2.0)]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(matches!(
            fit_power_law(&[(5.0, -2.0), (7.0, 2.0)]),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn modal_count_aggregation() {
        let outcomes = vec![
            SweepOutcome { gamma: 200.0, seed: 0, count: 2, converged: true },
            SweepOutcome { gamma: 200.0, seed: 1, count: 2, converged: true },
            SweepOutcome { gamma: 200.0, seed: 2, count: 3, converged: true },
            SweepOutcome { gamma: 500.0, seed: 0, count: 5, converged: true },
        ];
        let modes = modal_counts(&outcomes);
        assert_eq!(modes.len(), 2);
        assert_eq!(modes[0].count, 2);
        assert_eq!(modes[0].runs, 3);
        assert!(!modes[0].unanimous);
        assert_eq!(modes[1].count, 5);
        assert!(modes[1].unanimous);
    }
}
