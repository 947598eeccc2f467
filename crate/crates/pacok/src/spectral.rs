//! Discrete Fourier transforms and spectral operators on periodic grids.
//!
//! Conventions: the forward transform carries the `1/(Nx*Ny)` factor, so a
//! [`Spectrum`] holds the coefficients of the interpolating trigonometric
//! polynomial `f_ij = sum f_kl exp(i k pi x_i / X) exp(i l pi y_j / Y)`.
//! Coefficients are stored in FFT-natural frequency order; [`GridSpec::freq_x`]
//! maps a storage index to its signed frequency in `-Nx/2+1 ..= Nx/2`.
//!
//! Because the nodes start at `-X` rather than `0`, the raw FFT picks up a
//! `(-1)^(k+l)` phase relative to this basis; it is applied on both
//! transforms and cancels inside symbol-diagonal operators.
//!
//! The first-derivative symbol is zeroed at the Nyquist frequency so that
//! derivatives of real fields stay real; the second-derivative symbol keeps
//! the full `-(k pi / X)^2` there. Only the Laplacian and its inverse enter
//! the time stepping, so the zeroing affects diagnostics only.

use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

/// Complex Fourier coefficients of a [`Field`], FFT-natural order,
/// laid out like the field values: y-frequency outer, x-frequency inner.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient for signed frequencies `(k, l)` with
    /// `-Nx/2+1 <= k <= Nx/2`, `-Ny/2+1 <= l <= Ny/2`.
    pub fn get(&self, k: i64, l: i64) -> Complex64 {
        let nx = self.grid.nx as i64;
        let ny = self.grid.ny as i64;
        assert!(k > -nx / 2 && k <= nx / 2, "x frequency {k} out of range");
        assert!(l > -ny / 2 && l <= ny / 2, "y frequency {l} out of range");
        let i = k.rem_euclid(nx) as usize;
        let j = l.rem_euclid(ny) as usize;
        self.coeffs[j * self.grid.nx + i]
    }

    /// Largest violation of the conjugate symmetry `c(k,l) = conj(c(-k,-l))`.
    /// Near zero whenever the spectrum came from a real field.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut worst = 0.0f64;
        for j in 0..ny {
            for i in 0..nx {
                let a = self.coeffs[j * nx + i];
                let b = self.coeffs[((ny - j) % ny) * nx + (nx - i) % nx];
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst
    }
}

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER.lock().unwrap();
    if forward {
        planner.plan_fft_forward(len)
    } else {
        planner.plan_fft_inverse(len)
    }
}

/// Unnormalized 2D FFT over all rows then all columns, in place.
fn fft2(buf: &mut Vec<Complex64>, grid: &GridSpec, forward: bool) {
    let (nx, ny) = (grid.nx, grid.ny);
    let fft_x = plan(nx, forward);
    let mut scratch = vec![Complex64::ZERO; fft_x.get_inplace_scratch_len()];
    fft_x.process_with_scratch(buf, &mut scratch);

    let mut tmp = vec![Complex64::ZERO; buf.len()];
    transpose::transpose(buf, &mut tmp, nx, ny);
    let fft_y = plan(ny, forward);
    scratch.resize(fft_y.get_inplace_scratch_len(), Complex64::ZERO);
    fft_y.process_with_scratch(&mut tmp, &mut scratch);
    transpose::transpose(&tmp, buf, ny, nx);
}

fn phase(grid: &GridSpec, i: usize, j: usize) -> f64 {
    // (-1)^(k+l); frequency parity equals FFT-index parity for even N.
    if (grid.freq_x(i) + grid.freq_y(j)) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// 2D discrete Fourier transform with the `1/(Nx*Ny)` normalization.
pub fn dft(f: &Field) -> Spectrum {
    let grid = *f.grid();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut buf, &grid, true);
    let scale = 1.0 / grid.len() as f64;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            buf[j * grid.nx + i] *= phase(&grid, i, j) * scale;
        }
    }
    Spectrum { grid, coeffs: buf }
}

/// Inverse transform back to a real field.
///
/// Fails with [`Error::SymmetryViolation`] when the imaginary residue of the
/// reconstruction exceeds `1e-10`, which signals a non-real spectrum.
pub fn idft(s: &Spectrum) -> Result<Field> {
    let grid = s.grid;
    let mut buf = s.coeffs.clone();
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            buf[j * grid.nx + i] *= phase(&grid, i, j);
        }
    }
    fft2(&mut buf, &grid, false);
    let max_imag = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    if max_imag > 1e-10 {
        return Err(Error::SymmetryViolation { max_imag });
    }
    Ok(Field::from_values(grid, buf.iter().map(|c| c.re).collect())
        .expect("inverse transform of finite spectrum is finite"))
}

/// Apply a Fourier-diagonal operator `sym(k, l)` with signed frequencies.
/// The imaginary residue is discarded; symbols used here map real fields to
/// real fields up to round-off.
fn apply_symbol(f: &Field, sym: impl Fn(i64, i64) -> Complex64) -> Field {
    let grid = *f.grid();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut buf, &grid, true);
    let scale = 1.0 / grid.len() as f64;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            buf[j * grid.nx + i] *= sym(grid.freq_x(i), grid.freq_y(j)) * scale;
        }
    }
    fft2(&mut buf, &grid, false);
    Field::from_values(grid, buf.iter().map(|c| c.re).collect())
        .expect("diagonal operator output is finite")
}

fn deriv_symbol(freq: i64, half_width: f64, n: usize) -> f64 {
    // First-derivative multiplier with the Nyquist mode zeroed.
    if freq == (n / 2) as i64 {
        0.0
    } else {
        freq as f64 * std::f64::consts::PI / half_width
    }
}

/// Spectral gradient `(D_x f, D_y f)`.
pub fn gradient(f: &Field) -> (Field, Field) {
    let g = *f.grid();
    let dx = apply_symbol(f, |k, _| Complex64::new(0.0, deriv_symbol(k, g.x, g.nx)));
    let dy = apply_symbol(f, |_, l| Complex64::new(0.0, deriv_symbol(l, g.y, g.ny)));
    (dx, dy)
}

/// Spectral Laplacian `D_x^2 f + D_y^2 f` (full symbol, Nyquist included).
pub fn laplacian(f: &Field) -> Field {
    let g = *f.grid();
    apply_symbol(f, |k, l| Complex64::new(-g.wavenumber_sq(k, l), 0.0))
}

/// Zero-mode-removed inverse Laplacian: solves `-Lap u = f - mean(f)` with
/// `mean(u) = 0`. Total on any field; the `(0,0)` mode is simply dropped.
pub fn inv_laplacian(f: &Field) -> Field {
    let g = *f.grid();
    apply_symbol(f, |k, l| {
        if k == 0 && l == 0 {
            Complex64::ZERO
        } else {
            Complex64::new(1.0 / g.wavenumber_sq(k, l), 0.0)
        }
    })
}

/// Inverse Laplacian of two fields with a single pair of transforms: the
/// pair rides one complex FFT as `a + i b`, and because the symbol is real
/// and even the real/imaginary parts stay separated.
pub fn inv_laplacian_pair(a: &Field, b: &Field) -> (Field, Field) {
    let grid = *a.grid();
    assert_eq!(&grid, b.grid(), "inv_laplacian_pair requires matching grids");
    let mut buf: Vec<Complex64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| Complex64::new(x, y))
        .collect();
    fft2(&mut buf, &grid, true);
    let scale = 1.0 / grid.len() as f64;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (k, l) = (grid.freq_x(i), grid.freq_y(j));
            buf[j * grid.nx + i] *= if k == 0 && l == 0 {
                0.0
            } else {
                scale / grid.wavenumber_sq(k, l)
            };
        }
    }
    fft2(&mut buf, &grid, false);
    let ua = Field::from_values(grid, buf.iter().map(|c| c.re).collect())
        .expect("diagonal operator output is finite");
    let ub = Field::from_values(grid, buf.iter().map(|c| c.im).collect())
        .expect("diagonal operator output is finite");
    (ua, ub)
}

/// `||(-Lap)^(-1/2) f||^2 = <(-Lap)^(-1) f, f>_h`, evaluated in Fourier space.
pub fn inv_sqrt_laplacian_norm_sq(f: &Field) -> f64 {
    let grid = *f.grid();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut buf, &grid, true);
    let scale = 1.0 / grid.len() as f64;
    let mut sum = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (k, l) = (grid.freq_x(i), grid.freq_y(j));
            if k == 0 && l == 0 {
                continue;
            }
            sum += (buf[j * grid.nx + i] * scale).norm_sqr() / grid.wavenumber_sq(k, l);
        }
    }
    grid.area() * sum
}

/// `||grad_h f||^2` via Parseval; equals `|D_x f|^2 + |D_y f|^2` summed with
/// the grid quadrature weights (same Nyquist convention as [`gradient`]).
pub fn grad_norm_sq(f: &Field) -> f64 {
    let grid = *f.grid();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut buf, &grid, true);
    let scale = 1.0 / grid.len() as f64;
    let mut sum = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let sx = deriv_symbol(grid.freq_x(i), grid.x, grid.nx);
            let sy = deriv_symbol(grid.freq_y(j), grid.y, grid.ny);
            sum += (sx * sx + sy * sy) * (buf[j * grid.nx + i] * scale).norm_sqr();
        }
    }
    grid.area() * sum
}

/// Discrete `H^s` norm: `||f||^2 = sum (1 + (k^2 + l^2)^s) |f_kl|^2` over the
/// raw integer frequencies.
pub fn hs_norm(f: &Field, s: f64) -> f64 {
    let spec = dft(f);
    let grid = *spec.grid();
    let mut sum = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (k, l) = (grid.freq_x(i), grid.freq_y(j));
            let ksq = (k * k + l * l) as f64;
            sum += (1.0 + ksq.powf(s)) * spec.coeffs[j * grid.nx + i].norm_sqr();
        }
    }
    sum.sqrt()
}
