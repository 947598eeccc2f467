//! The penalized Ohta-Kawasaki free energy and its gradient-flow forces.
//!
//! The energy couples a local interfacial part (gradient term plus the
//! double-well `W`), a long-range repulsion acting on the indicator `f(phi)`
//! through the zero-mode-removed inverse Laplacian, and a quadratic penalty
//! of strength `M` on the volume of `f(phi)`.
//!
//! Both nonlinearities are extended outside `[0, 1]` so that their second
//! derivatives stay bounded, which the stability analysis needs: `W` gets a
//! C2 quadratic extension (`18 s^2` below 0, `18 (s-1)^2` above 1) and the
//! quintic indicator is held constant at 0 and 1.

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::spectral;

/// Choice of the indicator nonlinearity `f`.
///
/// `Quintic` is `6 phi^5 - 15 phi^4 + 10 phi^3` clamped to `[0, 1]`; its
/// derivative vanishes at both wells, which localizes the nonlocal and
/// volume forces at the interface. `Linear` is the classical `f(phi) = phi`
/// (kept for comparison runs; pair it with `beta_h = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Indicator {
    #[default]
    Quintic,
    Linear,
}

impl Indicator {
    /// Indicator value, total on the real line.
    pub fn val(self, s: f64) -> f64 {
        match self {
            Indicator::Quintic => {
                if s <= 0.0 {
                    0.0
                } else if s >= 1.0 {
                    1.0
                } else {
                    ((6.0 * s - 15.0) * s + 10.0) * s * s * s
                }
            }
            Indicator::Linear => s,
        }
    }

    /// Derivative of the indicator.
    pub fn deriv(self, s: f64) -> f64 {
        match self {
            Indicator::Quintic => {
                if s <= 0.0 || s >= 1.0 {
                    0.0
                } else {
                    30.0 * s * s * (s - 1.0) * (s - 1.0)
                }
            }
            Indicator::Linear => 1.0,
        }
    }
}

/// Double-well potential `18 (s^2 - s)^2` with the quadratic extension.
pub fn w_val(s: f64) -> f64 {
    if s < 0.0 {
        18.0 * s * s
    } else if s > 1.0 {
        18.0 * (s - 1.0) * (s - 1.0)
    } else {
        let q = s * s - s;
        18.0 * q * q
    }
}

/// Derivative of the extended double well.
pub fn w_prime(s: f64) -> f64 {
    if s < 0.0 {
        36.0 * s
    } else if s > 1.0 {
        36.0 * (s - 1.0)
    } else {
        36.0 * (s * s - s) * (2.0 * s - 1.0)
    }
}

/// Bounds entering the stability conditions: `L_W >= sup |W''|`,
/// `L_f >= sup |f''|`, and the Lipschitz constant `L_p` of `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialBounds {
    pub l_w: f64,
    pub l_f: f64,
    pub l_p: f64,
}

/// Closed-form bounds for the chosen indicator.
///
/// For the quintic: `L_p = f'(1/2) = 15/8`, `L_f = |f''|` at `(3±sqrt 3)/6`
/// which is `10 sqrt(3) / 3`, and `L_W = 36` (attained at 0 and 1 and kept
/// by the extension).
pub fn potential_bounds(indicator: Indicator) -> PotentialBounds {
    match indicator {
        Indicator::Quintic => PotentialBounds {
            l_w: 36.0,
            l_f: 10.0 * 3.0_f64.sqrt() / 3.0,
            l_p: 15.0 / 8.0,
        },
        Indicator::Linear => PotentialBounds {
            l_w: 36.0,
            l_f: 0.0,
            l_p: 1.0,
        },
    }
}

/// Physical parameters of the energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Interface width `epsilon > 0`.
    pub eps: f64,
    /// Long-range repulsion strength `gamma >= 0`.
    pub gamma: f64,
    /// Target volume fraction `omega` in `(0, 1)`.
    pub omega: f64,
    /// Penalty constant `M > 0` on the volume constraint.
    pub penalty: f64,
    /// Indicator nonlinearity.
    pub indicator: Indicator,
}

impl ModelParams {
    pub fn new(eps: f64, gamma: f64, omega: f64, penalty: f64) -> Result<Self> {
        let p = Self {
            eps,
            gamma,
            omega,
            penalty,
            indicator: Indicator::Quintic,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_indicator(mut self, indicator: Indicator) -> Self {
        self.indicator = indicator;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParam(format!("eps must be > 0, got {}", self.eps)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return Err(Error::InvalidParam(format!(
                "omega must lie in (0, 1), got {}",
                self.omega
            )));
        }
        if !(self.penalty > 0.0 && self.penalty.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "penalty constant M must be > 0, got {}",
                self.penalty
            )));
        }
        Ok(())
    }

    /// `<f(phi), 1>_h - omega |Omega|`, the quantity the penalty squares.
    pub fn volume_residual(&self, phi: &Field) -> f64 {
        let g = phi.grid();
        let quad = g.hx() * g.hy();
        let sum: f64 = phi.values().iter().map(|&v| self.indicator.val(v)).sum();
        quad * sum - self.omega * g.area()
    }
}

/// Per-term values of the discrete energy plus diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// `eps/2 ||grad_h phi||^2`
    pub interface: f64,
    /// `(1/eps) <W(phi), 1>_h`
    pub doublewell: f64,
    /// `(gamma/2) ||(-Lap_h)^(-1/2) (f(phi) - omega)||^2`
    pub nonlocal: f64,
    /// `(M/2) (<f(phi), 1>_h - omega |Omega|)^2`
    pub penalty: f64,
    /// Sum of the four terms above.
    pub total: f64,
    /// `<f(phi), 1>_h - omega |Omega|`
    pub volume_residual: f64,
}

/// Discrete energy of a state, term by term.
pub fn energy(phi: &Field, p: &ModelParams) -> EnergyBreakdown {
    let g = phi.grid();
    let quad = g.hx() * g.hy();

    let interface = 0.5 * p.eps * spectral::grad_norm_sq(phi);

    let well_sum: f64 = phi.values().iter().map(|&v| w_val(v)).sum();
    let doublewell = quad * well_sum / p.eps;

    let fshift = phi.map(|v| p.indicator.val(v) - p.omega);
    let nonlocal = 0.5 * p.gamma * spectral::inv_sqrt_laplacian_norm_sq(&fshift);

    let volume_residual = p.volume_residual(phi);
    let penalty = 0.5 * p.penalty * volume_residual * volume_residual;

    EnergyBreakdown {
        interface,
        doublewell,
        nonlocal,
        penalty,
        total: interface + doublewell + nonlocal + penalty,
        volume_residual,
    }
}

/// The three forces driving the flow; their sum is the full right-hand side
/// `-dE/dphi`.
#[derive(Debug, Clone)]
pub struct Forces {
    /// `eps Lap_h phi - W'(phi)/eps`
    pub tension: Field,
    /// `-gamma (-Lap_h)^(-1)(f(phi) - omega) f'(phi)`
    pub nonlocal: Field,
    /// `-M (<f(phi), 1>_h - omega |Omega|) f'(phi)`
    pub volume: Field,
}

impl Forces {
    pub fn sum(&self) -> Field {
        let mut s = self.tension.clone();
        s.add_scaled(1.0, &self.nonlocal);
        s.add_scaled(1.0, &self.volume);
        s
    }
}

/// Decompose the right-hand side of the flow at a state `phi`.
pub fn forces(phi: &Field, p: &ModelParams) -> Forces {
    let mut tension = spectral::laplacian(phi);
    tension.scale(p.eps);
    for (t, &v) in tension.values_mut().iter_mut().zip(phi.values()) {
        *t -= w_prime(v) / p.eps;
    }

    let fprime = phi.map(|v| p.indicator.deriv(v));
    let fshift = phi.map(|v| p.indicator.val(v) - p.omega);
    let potential = spectral::inv_laplacian(&fshift);
    let nonlocal = potential.zip_map(&fprime, |u, fp| -p.gamma * u * fp);

    let residual = p.volume_residual(phi);
    let volume = fprime.map(|fp| -p.penalty * residual * fp);

    Forces {
        tension,
        nonlocal,
        volume,
    }
}

/// Convenience wrapper used by tests and diagnostics: the assembled
/// right-hand side `-dE/dphi`.
pub fn rhs(phi: &Field, p: &ModelParams) -> Field {
    forces(phi, p).sum()
}
