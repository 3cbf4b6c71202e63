//! Normal modes of the coupling matrix and fractional matrix powers.
//!
//! Periodic 1D lattices use an analytic circulant basis (dispersion relation
//! plus cosine/sine modes, profile transforms via FFT); everything else goes
//! through a dense symmetric eigendecomposition. Both paths agree to 1e-10
//! and that agreement is asserted in tests.

use nalgebra::{DMatrix, DVector};
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::{CouplingMatrix, LatticeSpec};

/// Normal-mode frequencies and orthonormal mode vectors of a coupling matrix.
///
/// `frequencies` are physical (inverse-length); `wavenumbers` are the lattice
/// momenta k = 2πn/(N·l) when the analytic periodic-1D path was taken, in the
/// same order as `frequencies`.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    pub frequencies: DVector<f64>,
    pub modes: DMatrix<f64>,
    pub wavenumbers: Option<DVector<f64>>,
    spec: LatticeSpec,
}

impl ModeBasis {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    /// Frequencies in lattice units, ω̃ = ω · l.
    pub fn frequencies_lattice(&self) -> DVector<f64> {
        &self.frequencies * self.spec.spacing
    }

    /// Reconstruct the (physical-units) coupling matrix, modes·diag(ω²)·modesᵀ.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let n = self.modes.nrows();
        let mut out = DMatrix::zeros(n, n);
        for k in 0..n {
            let w2 = self.frequencies[k] * self.frequencies[k];
            let v = self.modes.column(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += w2 * v[i] * v[j];
                }
            }
        }
        out
    }
}

/// Dispersion relation of the periodic lattice in lattice units:
/// ω̃_n² = m̃² + Σ_axes 4 sin²(π n_a / N).
pub fn dispersion_lattice(spec: &LatticeSpec, mode: &[usize]) -> f64 {
    let n = spec.sites_per_axis as f64;
    let mt = spec.mass_lattice();
    let mut w2 = mt * mt;
    for &na in mode {
        let s = (std::f64::consts::PI * na as f64 / n).sin();
        w2 += 4.0 * s * s;
    }
    w2.sqrt()
}

/// Decompose K into normal modes. Periodic 1D lattices take the analytic
/// circulant path; otherwise a dense symmetric eigendecomposition is used.
pub fn mode_decomposition(k: &CouplingMatrix) -> Result<ModeBasis> {
    let spec = k.spec().clone();
    if spec.is_periodic() && spec.dimension == 1 {
        return Ok(circulant_modes(&spec));
    }
    dense_modes(k)
}

/// Dense spectral path: works for any symmetric positive-definite K.
pub fn dense_modes(k: &CouplingMatrix) -> Result<ModeBasis> {
    let spec = k.spec().clone();
    let eig = k.entries_lattice().symmetric_eigen();
    let n = eig.eigenvalues.len();
    // sort ascending by eigenvalue
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let mut freqs = DVector::zeros(n);
    let mut modes = DMatrix::zeros(n, n);
    for (col, &idx) in order.iter().enumerate() {
        let lam = eig.eigenvalues[idx];
        if lam <= 0.0 {
            return Err(Error::NotPositiveDefinite { eigenvalue: lam });
        }
        freqs[col] = lam.sqrt() / spec.spacing; // physical
        modes.set_column(col, &eig.eigenvectors.column(idx));
    }
    Ok(ModeBasis {
        frequencies: freqs,
        modes,
        wavenumbers: None,
        spec,
    })
}

/// Analytic circulant basis for periodic 1D lattices, ordered by mode
/// number n = 0..N−1 (so wavenumber k_n = 2πn/(N·l) pairs with ω_n).
pub fn circulant_modes(spec: &LatticeSpec) -> ModeBasis {
    let n = spec.sites_per_axis;
    let nf = n as f64;
    let mut freqs = DVector::zeros(n);
    let mut waves = DVector::zeros(n);
    let mut modes = DMatrix::zeros(n, n);
    for mode in 0..n {
        freqs[mode] = dispersion_lattice(spec, &[mode]) / spec.spacing;
        waves[mode] = 2.0 * std::f64::consts::PI * mode as f64 / (nf * spec.spacing);
    }
    let norm1 = (1.0 / nf).sqrt();
    let norm2 = (2.0 / nf).sqrt();
    for x in 0..n {
        modes[(x, 0)] = norm1;
    }
    let half = n / 2;
    for mode in 1..n {
        if 2 * mode < n {
            for x in 0..n {
                let arg = 2.0 * std::f64::consts::PI * (mode * x) as f64 / nf;
                modes[(x, mode)] = norm2 * arg.cos();
                modes[(x, n - mode)] = norm2 * arg.sin();
            }
        } else if 2 * mode == n {
            for x in 0..n {
                modes[(x, half)] = if x % 2 == 0 { norm1 } else { -norm1 };
            }
        }
    }
    ModeBasis {
        frequencies: freqs,
        modes,
        wavenumbers: Some(waves),
        spec: spec.clone(),
    }
}

/// Sign of a half-integer matrix power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPower {
    PlusHalf,
    MinusHalf,
}

/// K^(±1/2) in physical units. Periodic 1D lattices use the circulant
/// profile (one FFT); other lattices the dense basis.
pub fn matrix_power_half(k: &CouplingMatrix, sign: HalfPower) -> Result<DMatrix<f64>> {
    let spec = k.spec();
    let p = match sign {
        HalfPower::PlusHalf => 1.0,
        HalfPower::MinusHalf => -1.0,
    };
    if spec.is_periodic() && spec.dimension == 1 {
        let n = spec.sites_per_axis;
        // lattice-units profile row of K̃^(±1/2), then rescale to physical
        let prof = circulant_power_profile(spec, p / 2.0);
        let scale = spec.spacing.powf(-p); // K^(p/2) = K̃^(p/2) · l^(-p)
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = prof[(i + n - j) % n] * scale;
            }
        }
        return Ok(out);
    }
    let basis = dense_modes(k)?;
    let wl = basis.frequencies_lattice();
    let n = wl.len();
    let mut out = DMatrix::zeros(n, n);
    let scale = spec.spacing.powf(-p);
    for m in 0..n {
        let f = wl[m].powf(p) * scale;
        let v = basis.modes.column(m);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += f * v[i] * v[j];
            }
        }
    }
    Ok(out)
}

/// Profile row of K̃^p (lattice units) for a periodic 1D lattice:
/// row(d) = (1/N) Σ_n ω̃_n^{2p} cos(2πnd/N), evaluated with one FFT.
pub fn circulant_power_profile(spec: &LatticeSpec, p: f64) -> Vec<f64> {
    let n = spec.sites_per_axis;
    let spectrum: Vec<f64> = (0..n)
        .map(|mode| dispersion_lattice(spec, &[mode]).powf(2.0 * p))
        .collect();
    circulant_profile_from_spectrum(&spectrum)
}

/// Inverse transform of a real, even mode spectrum: out[d] = (1/N) Σ_n s_n cos(2πnd/N).
pub fn circulant_profile_from_spectrum(spectrum: &[f64]) -> Vec<f64> {
    let n = spectrum.len();
    if n <= 64 {
        // direct sum, avoids planner overhead for tiny lattices
        return (0..n)
            .map(|d| {
                spectrum
                    .iter()
                    .enumerate()
                    .map(|(m, s)| s * (2.0 * std::f64::consts::PI * (m * d) as f64 / n as f64).cos())
                    .sum::<f64>()
                    / n as f64
            })
            .collect();
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex<f64>> = spectrum
        .iter()
        .map(|&s| Complex::new(s / n as f64, 0.0))
        .collect();
    fft.process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Symmetric matrix function f(A) via eigendecomposition, for matrices that
/// are not coupling matrices (covariance blocks and the like).
pub fn symmetric_apply<F: Fn(f64) -> f64>(a: &DMatrix<f64>, f: F) -> DMatrix<f64> {
    let eig = a.clone().symmetric_eigen();
    let n = a.nrows();
    let mut out = DMatrix::zeros(n, n);
    for m in 0..n {
        let fv = f(eig.eigenvalues[m]);
        let v = eig.eigenvectors.column(m);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += fv * v[i] * v[j];
            }
        }
    }
    out
}
