//! Brute-force truncated-Fock oracle for tiny lattices: the independent
//! ground truth for every closed-form Gaussian and one-particle computation.
//!
//! Each site carries a harmonic ladder basis at its local frequency
//! μ_i = √(K̃_ii), truncated at n_max quanta, so the Hamiltonian is
//! H̃ = Σ_i μ_i (n̂_i + ½) + Σ_{i<j} K̃_ij (a_i+a_i†)(a_j+a_j†)/(2√(μ_iμ_j))
//! in lattice units. Operators are applied matrix-free on occupation-number
//! strides; the ground state comes from Lanczos with full
//! reorthogonalization, Heisenberg evolution from a stepped Krylov
//! propagator. A dense-matrix route exists for small spaces.

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::vacuum_state;
use crate::lattice::{CouplingMatrix, LatticeSpec};
use crate::localisation::OneParticleState;
use crate::spectral::mode_decomposition;

type C64 = Complex<f64>;

/// Default cap on the truncated-space dimension (n_max+1)^N.
pub const DEFAULT_DIMENSION_CAP: usize = 20_000;

/// Occupation-number truncation of the wavefunctional space: per-site Fock
/// ladders capped at n_max quanta.
#[derive(Debug, Clone)]
pub struct TruncatedSpace {
    spec: LatticeSpec,
    n_max: usize,
    dim: usize,
    n_sites: usize,
    strides: Vec<usize>,
    /// Local ladder frequencies μ_i = √(K̃_ii).
    mus: Vec<f64>,
    /// (i, j, K̃_ij/(2√(μ_i μ_j))) for the nonzero couplings, i < j.
    couplings: Vec<(usize, usize, f64)>,
}

impl TruncatedSpace {
    pub fn new(spec: &LatticeSpec, n_max: usize) -> Result<Self> {
        Self::with_cap(spec, n_max, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(spec: &LatticeSpec, n_max: usize, cap: usize) -> Result<Self> {
        let n_sites = spec.sites();
        let per_site = n_max + 1;
        let mut dim: usize = 1;
        for _ in 0..n_sites {
            dim = dim
                .checked_mul(per_site)
                .ok_or(Error::CapExceeded { dim: usize::MAX, cap })?;
        }
        if dim > cap {
            return Err(Error::CapExceeded { dim, cap });
        }
        let k = CouplingMatrix::from_spec(spec).entries_lattice();
        let mus: Vec<f64> = (0..n_sites).map(|i| k[(i, i)].sqrt()).collect();
        let mut couplings = Vec::new();
        for i in 0..n_sites {
            for j in i + 1..n_sites {
                if k[(i, j)] != 0.0 {
                    couplings.push((i, j, k[(i, j)] / (2.0 * (mus[i] * mus[j]).sqrt())));
                }
            }
        }
        let mut strides = vec![0usize; n_sites];
        let mut s = 1;
        for i in (0..n_sites).rev() {
            strides[i] = s;
            s *= per_site;
        }
        Ok(Self {
            spec: spec.clone(),
            n_max,
            dim,
            n_sites,
            strides,
            mus,
            couplings,
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Occupation of `site` in basis state `index`.
    pub fn occupation(&self, index: usize, site: usize) -> usize {
        (index / self.strides[site]) % (self.n_max + 1)
    }

    /// Diagonal of H̃: Σ μ_i (n_i + ½).
    fn diagonal(&self, index: usize) -> f64 {
        (0..self.n_sites)
            .map(|i| self.mus[i] * (self.occupation(index, i) as f64 + 0.5))
            .sum()
    }

    /// y += H̃ x, matrix-free.
    pub fn h_matvec(&self, x: &[f64], y: &mut [f64]) {
        for (index, &v) in x.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            y[index] += self.diagonal(index) * v;
        }
        for &(i, j, c) in &self.couplings {
            let (si, sj) = (self.strides[i], self.strides[j]);
            for (index, &v) in x.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let ni = self.occupation(index, i);
                let nj = self.occupation(index, j);
                // (a_i + a_i†)(a_j + a_j†): four shift combinations
                let down_i = if ni > 0 { (ni as f64).sqrt() } else { 0.0 };
                let up_i = if ni < self.n_max {
                    (ni as f64 + 1.0).sqrt()
                } else {
                    0.0
                };
                let down_j = if nj > 0 { (nj as f64).sqrt() } else { 0.0 };
                let up_j = if nj < self.n_max {
                    (nj as f64 + 1.0).sqrt()
                } else {
                    0.0
                };
                if down_i > 0.0 && down_j > 0.0 {
                    y[index - si - sj] += c * down_i * down_j * v;
                }
                if down_i > 0.0 && up_j > 0.0 {
                    y[index - si + sj] += c * down_i * up_j * v;
                }
                if up_i > 0.0 && down_j > 0.0 {
                    y[index + si - sj] += c * up_i * down_j * v;
                }
                if up_i > 0.0 && up_j > 0.0 {
                    y[index + si + sj] += c * up_i * up_j * v;
                }
            }
        }
    }

    fn ladder_apply(&self, site: usize, x: &DVector<C64>, weight_down: C64, weight_up: C64) -> DVector<C64> {
        let s = self.strides[site];
        let mut y = DVector::from_element(self.dim, C64::new(0.0, 0.0));
        for index in 0..self.dim {
            let v = x[index];
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let n = self.occupation(index, site);
            if n > 0 {
                y[index - s] += weight_down * (n as f64).sqrt() * v; // a
            }
            if n < self.n_max {
                y[index + s] += weight_up * (n as f64 + 1.0).sqrt() * v; // a†
            }
        }
        y
    }

    /// φ_i |x⟩ with φ_i = (a_i + a_i†)/√(2μ_i).
    pub fn apply_phi(&self, site: usize, x: &DVector<C64>) -> DVector<C64> {
        let w = C64::new(1.0 / (2.0 * self.mus[site]).sqrt(), 0.0);
        self.ladder_apply(site, x, w, w)
    }

    /// π_i |x⟩ with π_i = i√(μ_i/2)(a_i† − a_i).
    pub fn apply_pi(&self, site: usize, x: &DVector<C64>) -> DVector<C64> {
        let w = (self.mus[site] / 2.0).sqrt();
        self.ladder_apply(site, x, C64::new(0.0, -w), C64::new(0.0, w))
    }

    /// Gershgorin upper bound on ‖H̃‖, used to size propagator steps.
    fn spectral_bound(&self) -> f64 {
        let diag_max: f64 = self
            .mus
            .iter()
            .map(|mu| mu * (self.n_max as f64 + 0.5))
            .sum();
        let coupling: f64 = self
            .couplings
            .iter()
            .map(|&(_, _, c)| 4.0 * c.abs() * (self.n_max as f64 + 1.0))
            .sum();
        diag_max + coupling
    }
}

/// Materialise H̃ as a dense Hermitian (real symmetric) matrix.
pub fn truncated_hamiltonian(space: &TruncatedSpace) -> DMatrix<f64> {
    let d = space.dimension();
    let mut h = DMatrix::zeros(d, d);
    let mut unit = vec![0.0; d];
    let mut col = vec![0.0; d];
    for j in 0..d {
        unit[j] = 1.0;
        col.iter_mut().for_each(|v| *v = 0.0);
        space.h_matvec(&unit, &mut col);
        for i in 0..d {
            h[(i, j)] = col[i];
        }
        unit[j] = 0.0;
    }
    h
}

/// Lowest eigenpair of a dense symmetric matrix: full eigendecomposition for
/// small matrices, Lanczos on the dense matvec above that. The returned
/// vector is normalised with its largest-magnitude component real positive.
pub fn ground_state_dense(h: &DMatrix<f64>) -> Result<(DVector<f64>, f64)> {
    let d = h.nrows();
    if d <= 256 {
        let eig = h.clone().symmetric_eigen();
        let mut idx = 0;
        for i in 1..d {
            if eig.eigenvalues[i] < eig.eigenvalues[idx] {
                idx = i;
            }
        }
        let mut v: DVector<f64> = eig.eigenvectors.column(idx).into();
        fix_phase(&mut v);
        return Ok((v, eig.eigenvalues[idx]));
    }
    let matvec = |x: &[f64], y: &mut [f64]| {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..d {
                acc += h[(i, j)] * x[j];
            }
            *yi += acc;
        }
    };
    lanczos_ground(d, matvec, 0)
}

/// Lowest eigenpair of the truncated Hamiltonian, matrix-free.
pub fn ground_state(space: &TruncatedSpace) -> Result<(DVector<f64>, f64)> {
    let d = space.dimension();
    lanczos_ground(d, |x, y| space.h_matvec(x, y), 0)
}

fn fix_phase(v: &mut DVector<f64>) {
    let mut imax = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[imax].abs() {
            imax = i;
        }
    }
    if v[imax] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Lanczos with full reorthogonalization for the lowest eigenpair of a
/// symmetric operator. `start` picks the seed basis vector (the all-zeros
/// occupation state has large ground-state overlap).
fn lanczos_ground<F: Fn(&[f64], &mut [f64])>(
    dim: usize,
    matvec: F,
    start: usize,
) -> Result<(DVector<f64>, f64)> {
    let max_iter = dim.min(400);
    let tol = 1e-13;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_iter);
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut q = vec![0.0; dim];
    q[start] = 1.0;
    basis.push(q.clone());
    let mut theta_prev = f64::INFINITY;
    let mut converged_at = None;
    for k in 0..max_iter {
        let mut w = vec![0.0; dim];
        matvec(&basis[k], &mut w);
        if k > 0 {
            let beta = betas[k - 1];
            for (wi, qi) in w.iter_mut().zip(&basis[k - 1]) {
                *wi -= beta * qi;
            }
        }
        let alpha: f64 = w.iter().zip(&basis[k]).map(|(a, b)| a * b).sum();
        for (wi, qi) in w.iter_mut().zip(&basis[k]) {
            *wi -= alpha * qi;
        }
        // full reorthogonalization, twice
        for _ in 0..2 {
            for qv in &basis {
                let c: f64 = w.iter().zip(qv).map(|(a, b)| a * b).sum();
                for (wi, qi) in w.iter_mut().zip(qv) {
                    *wi -= c * qi;
                }
            }
        }
        alphas.push(alpha);
        let beta: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        // convergence check on the tridiagonal ground value
        if k >= 4 || beta < 1e-14 {
            let theta = tridiag_ground_value(&alphas, &betas);
            if (theta_prev - theta).abs() <= tol * theta.abs().max(1.0) || beta < 1e-14 {
                converged_at = Some(k);
                break;
            }
            theta_prev = theta;
        }
        if k + 1 == max_iter {
            break;
        }
        betas.push(beta);
        for wi in w.iter_mut() {
            *wi /= beta;
        }
        basis.push(w);
    }
    let k_used = converged_at.unwrap_or(alphas.len() - 1) + 1;
    let (theta, s) = tridiag_ground_pair(&alphas[..k_used], &betas[..k_used.saturating_sub(1)]);
    let mut v = DVector::zeros(dim);
    for (j, qv) in basis.iter().take(k_used).enumerate() {
        let c = s[j];
        for i in 0..dim {
            v[i] += c * qv[i];
        }
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::NoConvergence { residual: 1.0 });
    }
    v /= norm;
    fix_phase(&mut v);
    Ok((v, theta))
}

fn tridiag_dense(alphas: &[f64], betas: &[f64]) -> DMatrix<f64> {
    let k = alphas.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    t
}

fn tridiag_ground_value(alphas: &[f64], betas: &[f64]) -> f64 {
    let t = tridiag_dense(alphas, &betas[..alphas.len() - 1]);
    let eig = t.symmetric_eigen();
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn tridiag_ground_pair(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let t = tridiag_dense(alphas, betas);
    let eig = t.symmetric_eigen();
    let mut idx = 0;
    for i in 1..alphas.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[idx] {
            idx = i;
        }
    }
    (
        eig.eigenvalues[idx],
        eig.eigenvectors.column(idx).iter().copied().collect(),
    )
}

/// e^(−i H̃ t) |x⟩ by stepped Krylov subspaces (step sized so ‖H̃‖·τ ≤ 8,
/// Krylov dimension 40 per step).
pub fn propagate(space: &TruncatedSpace, x: &DVector<C64>, t: f64) -> DVector<C64> {
    let bound = space.spectral_bound();
    let steps = ((bound * t.abs()) / 8.0).ceil().max(1.0) as usize;
    let tau = t / steps as f64;
    let mut v = x.clone();
    for _ in 0..steps {
        v = krylov_exp_step(space, &v, tau);
    }
    v
}

fn krylov_exp_step(space: &TruncatedSpace, x: &DVector<C64>, tau: f64) -> DVector<C64> {
    let dim = space.dimension();
    let kmax = 40.min(dim);
    let norm0 = x.norm();
    if norm0 == 0.0 {
        return x.clone();
    }
    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(kmax);
    basis.push(x / C64::new(norm0, 0.0));
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    for k in 0..kmax {
        // w = H q_k (complex vector through the real matvec, component-wise)
        let mut wr = vec![0.0; dim];
        let mut wi = vec![0.0; dim];
        let (mut xr, mut xi) = (vec![0.0; dim], vec![0.0; dim]);
        for i in 0..dim {
            xr[i] = basis[k][i].re;
            xi[i] = basis[k][i].im;
        }
        space.h_matvec(&xr, &mut wr);
        space.h_matvec(&xi, &mut wi);
        let mut w = DVector::from_fn(dim, |i, _| C64::new(wr[i], wi[i]));
        if k > 0 {
            let beta = betas[k - 1];
            w -= &basis[k - 1] * C64::new(beta, 0.0);
        }
        let alpha = basis[k].dotc(&w).re;
        w -= &basis[k] * C64::new(alpha, 0.0);
        for qv in &basis {
            let c = qv.dotc(&w);
            w -= qv * c;
        }
        alphas.push(alpha);
        let beta = w.norm();
        if beta < 1e-14 || k + 1 == kmax {
            break;
        }
        betas.push(beta);
        basis.push(w / C64::new(beta, 0.0));
    }
    // exp(−i T τ) e₁ via the small symmetric eigenproblem
    let kk = alphas.len();
    let t = tridiag_dense(&alphas, &betas[..kk - 1]);
    let eig = t.symmetric_eigen();
    let mut coeffs = vec![C64::new(0.0, 0.0); kk];
    for m in 0..kk {
        let phase = C64::from_polar(1.0, -eig.eigenvalues[m] * tau);
        let sm0 = eig.eigenvectors[(0, m)];
        for j in 0..kk {
            coeffs[j] += phase * sm0 * eig.eigenvectors[(j, m)];
        }
    }
    let mut out = DVector::from_element(dim, C64::new(0.0, 0.0));
    for (j, qv) in basis.iter().enumerate() {
        out += qv * (coeffs[j] * norm0);
    }
    out
}

/// Oracle value of the commutator coefficient Δ(x−y, t̃):
/// 2·Im(e^{iE₀t̃} ⟨φ_x Ω| e^{−iH̃t̃} |φ_y Ω⟩), t̃ in lattice time units.
pub fn oracle_commutator(
    space: &TruncatedSpace,
    ground: &DVector<f64>,
    energy: f64,
    x: usize,
    y: usize,
    t_lat: f64,
) -> f64 {
    let g: DVector<C64> = ground.map(|v| C64::new(v, 0.0));
    let u = space.apply_phi(y, &g);
    let v = space.apply_phi(x, &g);
    let ut = propagate(space, &u, t_lat);
    let amp = v.dotc(&ut) * C64::from_polar(1.0, energy * t_lat);
    2.0 * amp.im
}

/// Build the oracle one-particle state b†(f̃)|Ω⟩/‖·‖ from mode amplitudes.
pub fn oracle_one_particle(
    space: &TruncatedSpace,
    ground: &DVector<f64>,
    state: &OneParticleState,
) -> Result<DVector<C64>> {
    let spec = space.spec();
    let k = CouplingMatrix::from_spec(spec);
    let basis = mode_decomposition(&k)?;
    let wl = basis.frequencies_lattice();
    let n = spec.sites();
    // b†(f) = Σ_x α_x φ_x + β_x π_x
    let mut alpha = vec![C64::new(0.0, 0.0); n];
    let mut beta = vec![C64::new(0.0, 0.0); n];
    for m in 0..n {
        let f = state.amplitudes()[m];
        let wa = (wl[m] / 2.0).sqrt();
        let wb = C64::new(0.0, -1.0) / C64::new((2.0 * wl[m]).sqrt(), 0.0);
        for x in 0..n {
            let v = basis.modes[(x, m)];
            alpha[x] += f * wa * v;
            beta[x] += f * wb * v;
        }
    }
    let g: DVector<C64> = ground.map(|v| C64::new(v, 0.0));
    let mut out = DVector::from_element(space.dimension(), C64::new(0.0, 0.0));
    for x in 0..n {
        if alpha[x].norm_sqr() > 0.0 {
            out += space.apply_phi(x, &g) * alpha[x];
        }
        if beta[x].norm_sqr() > 0.0 {
            out += space.apply_pi(x, &g) * beta[x];
        }
    }
    let norm = out.norm();
    if norm == 0.0 {
        return Err(Error::ZeroProfile);
    }
    Ok(out / C64::new(norm, 0.0))
}

/// One comparison family of the crosscheck report.
#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckEntry {
    pub quantity: String,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CrosscheckEntry {
    pub fn new(quantity: &str, max_abs_error: f64, tolerance: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            max_abs_error,
            tolerance,
            pass: max_abs_error <= tolerance,
        }
    }
}

/// Crosscheck of closed-form quantities against the truncated-Fock oracle.
#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub n_max: usize,
    pub dimension: usize,
    pub ground_energy: f64,
    /// Exact lattice-units ground energy ½Σω̃ (the truncated value converges
    /// to it from above).
    pub exact_ground_energy: f64,
    pub entries: Vec<CrosscheckEntry>,
    pub all_pass: bool,
}

/// Compare vacuum correlators, one-particle expectations and commutator
/// values against the oracle on a lattice of ≤ 4 sites.
pub fn oracle_crosscheck(
    spec: &LatticeSpec,
    n_max: usize,
    tolerance: f64,
    cap: usize,
) -> Result<CrosscheckReport> {
    if spec.sites() > 4 {
        return Err(Error::Validation(format!(
            "oracle crosscheck is for lattices of at most 4 sites, got {}",
            spec.sites()
        )));
    }
    let space = TruncatedSpace::with_cap(spec, n_max, cap)?;
    let (ground, energy) = ground_state(&space)?;
    let n = spec.sites();

    let mut entries = Vec::new();

    // vacuum covariances
    let vac = vacuum_state(spec)?;
    let g: DVector<C64> = ground.map(|v| C64::new(v, 0.0));
    let mut err_phi: f64 = 0.0;
    let mut err_pi: f64 = 0.0;
    for x in 0..n {
        let phx = space.apply_phi(x, &g);
        let pix = space.apply_pi(x, &g);
        for y in 0..n {
            let phy = space.apply_phi(y, &g);
            let piy = space.apply_pi(y, &g);
            let phph = phx.dotc(&phy).re;
            let pipi = pix.dotc(&piy).re;
            err_phi = err_phi.max((phph - vac.cov_phiphi[(x, y)]).abs());
            err_pi = err_pi.max((pipi - vac.cov_pipi[(x, y)]).abs());
        }
    }
    entries.push(CrosscheckEntry::new("vacuum_cov_phiphi", err_phi, tolerance));
    entries.push(CrosscheckEntry::new("vacuum_cov_pipi", err_pi, tolerance));

    // one-particle expectations for a deterministic packet
    let packet = if n == 1 {
        let amps = DVector::from_element(1, C64::new(1.0, 0.0));
        OneParticleState::from_mode_amplitudes(spec, amps)?
    } else {
        crate::localisation::gaussian_packet(spec, n / 2, 1.0)?
    };
    let table = packet.deviation_table()?;
    let one = oracle_one_particle(&space, &ground, &packet)?;
    let mut err_one_phi: f64 = 0.0;
    let mut err_one_pi: f64 = 0.0;
    for x in 0..n {
        let phx = space.apply_phi(x, &one);
        let pix = space.apply_pi(x, &one);
        for y in 0..n {
            let phy = space.apply_phi(y, &one);
            let piy = space.apply_pi(y, &one);
            let phph = phx.dotc(&phy).re;
            let pipi = pix.dotc(&piy).re;
            let expect_phi = vac.cov_phiphi[(x, y)] + table.phiphi[(x, y)];
            let expect_pi = vac.cov_pipi[(x, y)] + table.pipi[(x, y)];
            err_one_phi = err_one_phi.max((phph - expect_phi).abs());
            err_one_pi = err_one_pi.max((pipi - expect_pi).abs());
        }
    }
    entries.push(CrosscheckEntry::new(
        "one_particle_phiphi",
        err_one_phi,
        tolerance,
    ));
    entries.push(CrosscheckEntry::new(
        "one_particle_pipi",
        err_one_pi,
        tolerance,
    ));

    // commutator function on a (d, t) grid; oracle evolves in lattice time
    if spec.is_periodic() {
        let mut err_comm: f64 = 0.0;
        for &t in &[0.5, 1.0, 2.0] {
            for d in 0..=(n - 1).min(2) {
                let closed = crate::dynamics::commutator_function(spec, d as i64, t)?;
                let t_lat = t / spec.spacing;
                let oracle = oracle_commutator(&space, &ground, energy, 0, d, t_lat);
                err_comm = err_comm.max((oracle - closed).abs());
            }
        }
        entries.push(CrosscheckEntry::new("commutator", err_comm, tolerance));
    }

    let k = CouplingMatrix::from_spec(spec);
    let basis = mode_decomposition(&k)?;
    let exact_ground_energy = 0.5 * basis.frequencies_lattice().sum();

    let all_pass = entries.iter().all(|e| e.pass);
    Ok(CrosscheckReport {
        n_max,
        dimension: space.dimension(),
        ground_energy: energy,
        exact_ground_energy,
        entries,
        all_pass,
    })
}
