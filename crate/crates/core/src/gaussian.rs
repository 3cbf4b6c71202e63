//! Exact Gaussian vacuum of a discretised free theory and its correlation
//! structure: two-point functions, smeared correlators, symplectic spectra,
//! entropies, mutual information and uncertainty floors.
//!
//! Covariances are stored in lattice units for the canonical pair
//! [φ_x, π_y] = iδ_xy, so the vacuum is cov_φφ = ½K̃^(−1/2),
//! cov_ππ = ½K̃^(1/2) with K̃ the lattice-units coupling matrix. The
//! physical-field correlator is cov_φφ / l^(d−1).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lattice::{CouplingMatrix, LatticeSpec};
use crate::spectral::{circulant_power_profile, dense_modes};

/// Mean vector plus covariance blocks of a bosonic Gaussian state in the
/// site basis (lattice units, canonical normalisation).
#[derive(Debug, Clone)]
pub struct GaussianState {
    pub mean_phi: DVector<f64>,
    pub mean_pi: DVector<f64>,
    pub cov_phiphi: DMatrix<f64>,
    pub cov_pipi: DMatrix<f64>,
    /// Symmetrised cross block ½⟨{φ_x, π_y}⟩ − ⟨φ_x⟩⟨π_y⟩.
    pub cov_phipi: DMatrix<f64>,
    spec: LatticeSpec,
}

impl GaussianState {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn sites(&self) -> usize {
        self.mean_phi.len()
    }

    /// Symplectic eigenvalues of the full 2N×2N covariance matrix
    /// σ = [[cov_φφ, cov_φπ], [cov_φπᵀ, cov_ππ]], ascending.
    ///
    /// Every valid state has all of them ≥ 1/2; pure states have exactly 1/2.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let n = self.sites();
        let mut sigma = DMatrix::zeros(2 * n, 2 * n);
        sigma.view_mut((0, 0), (n, n)).copy_from(&self.cov_phiphi);
        sigma.view_mut((0, n), (n, n)).copy_from(&self.cov_phipi);
        sigma
            .view_mut((n, 0), (n, n))
            .copy_from(&self.cov_phipi.transpose());
        sigma.view_mut((n, n), (n, n)).copy_from(&self.cov_pipi);
        symplectic_eigenvalues(&sigma)
    }

    /// Restrict the covariance to a set of sites, producing the 2r×2r block
    /// covariance of the reduced Gaussian state.
    pub fn restricted_covariance(&self, sites: &[usize]) -> Result<DMatrix<f64>> {
        let n = self.sites();
        for &s in sites {
            if s >= n {
                return Err(Error::SiteOutOfRange { site: s, sites: n });
            }
        }
        let r = sites.len();
        let mut sigma = DMatrix::zeros(2 * r, 2 * r);
        for (a, &i) in sites.iter().enumerate() {
            for (b, &j) in sites.iter().enumerate() {
                sigma[(a, b)] = self.cov_phiphi[(i, j)];
                sigma[(a, r + b)] = self.cov_phipi[(i, j)];
                sigma[(r + a, b)] = self.cov_phipi[(j, i)];
                sigma[(r + a, r + b)] = self.cov_pipi[(i, j)];
            }
        }
        Ok(sigma)
    }
}

/// Symplectic eigenvalues of a 2n×2n covariance in (φ..., π...) block order.
///
/// The spectrum of Ωσ is ±iν_j (Ωσ is similar to the normal matrix
/// σ^(1/2)Ωσ^(1/2), so its eigenvalues are well conditioned); the ν_j are
/// read off the imaginary parts, sorted and de-duplicated pairwise.
pub fn symplectic_eigenvalues(sigma: &DMatrix<f64>) -> Vec<f64> {
    let two_n = sigma.nrows();
    let n = two_n / 2;
    // Ωσ: rows 0..n pick up +π-rows of σ, rows n..2n pick up −φ-rows.
    let mut m = DMatrix::zeros(two_n, two_n);
    for j in 0..two_n {
        for i in 0..n {
            m[(i, j)] = sigma[(n + i, j)];
            m[(n + i, j)] = -sigma[(i, j)];
        }
    }
    let ev = m.complex_eigenvalues();
    let mut nu: Vec<f64> = ev.iter().map(|c| c.im.abs()).collect();
    nu.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nu.into_iter().step_by(2).collect()
}

/// Von Neumann entropy of a Gaussian state from its symplectic eigenvalues
/// (nats): Σ h(ν), h(ν) = (ν+½)ln(ν+½) − (ν−½)ln(ν−½).
pub fn gaussian_entropy(nu: &[f64]) -> f64 {
    nu.iter()
        .map(|&v| {
            let a = v + 0.5;
            let b = v - 0.5;
            let hb = if b > 1e-300 { b * b.ln() } else { 0.0 };
            a * a.ln() - hb
        })
        .sum()
}

/// Exact vacuum of the discretised theory: cov_φφ = ½K̃^(−1/2),
/// cov_ππ = ½K̃^(1/2), zero means, zero cross block.
pub fn vacuum_state(spec: &LatticeSpec) -> Result<GaussianState> {
    let n = spec.sites();
    let (cphi, cpi) = if spec.is_periodic() && spec.dimension == 1 {
        // circulant profiles: ½K̃^(∓1/2) rows
        let pm = circulant_power_profile(spec, -0.5);
        let pp = circulant_power_profile(spec, 0.5);
        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let d = (i + n - j) % n;
                a[(i, j)] = 0.5 * pm[d];
                b[(i, j)] = 0.5 * pp[d];
            }
        }
        (a, b)
    } else {
        let k = CouplingMatrix::from_spec(spec);
        let basis = dense_modes(&k)?;
        let wl = basis.frequencies_lattice();
        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, n);
        for m in 0..n {
            let fa = 0.5 / wl[m];
            let fb = 0.5 * wl[m];
            let v = basis.modes.column(m);
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] += fa * v[i] * v[j];
                    b[(i, j)] += fb * v[i] * v[j];
                }
            }
        }
        (a, b)
    };
    Ok(GaussianState {
        mean_phi: DVector::zeros(n),
        mean_pi: DVector::zeros(n),
        cov_phiphi: cphi,
        cov_pipi: cpi,
        cov_phipi: DMatrix::zeros(n, n),
        spec: spec.clone(),
    })
}

/// Vacuum of an explicit coupling matrix (dense path). Lets tests build
/// decoupled or otherwise modified theories.
pub fn vacuum_from_coupling(k: &CouplingMatrix) -> Result<GaussianState> {
    let spec = k.spec().clone();
    let n = spec.sites();
    let basis = dense_modes(k)?;
    let wl = basis.frequencies_lattice();
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    for m in 0..n {
        let fa = 0.5 / wl[m];
        let fb = 0.5 * wl[m];
        let v = basis.modes.column(m);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] += fa * v[i] * v[j];
                b[(i, j)] += fb * v[i] * v[j];
            }
        }
    }
    Ok(GaussianState {
        mean_phi: DVector::zeros(n),
        mean_pi: DVector::zeros(n),
        cov_phiphi: a,
        cov_pipi: b,
        cov_phipi: DMatrix::zeros(n, n),
        spec,
    })
}

/// Vacuum ⟨φφ⟩ profile (lattice units) of a periodic 1D lattice without
/// materialising the full state: G(d) = (1/2N) Σ_n cos(2πnd/N)/ω̃_n.
pub fn vacuum_correlator_profile(spec: &LatticeSpec) -> Result<Vec<f64>> {
    if !(spec.is_periodic() && spec.dimension == 1) {
        return Err(Error::NotTranslationInvariant);
    }
    Ok(circulant_power_profile(spec, -0.5)
        .into_iter()
        .map(|x| 0.5 * x)
        .collect())
}

/// Connected equal-time correlator ⟨φ_x φ_y⟩ − ⟨φ_x⟩⟨φ_y⟩ for given site pairs.
pub fn connected_correlator(state: &GaussianState, pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    let n = state.sites();
    pairs
        .iter()
        .map(|&(x, y)| {
            if x >= n {
                return Err(Error::SiteOutOfRange { site: x, sites: n });
            }
            if y >= n {
                return Err(Error::SiteOutOfRange { site: y, sites: n });
            }
            Ok(state.cov_phiphi[(x, y)])
        })
        .collect()
}

/// Smeared two-point function fᵀ · cov_φφ · g for real site functions f, g.
pub fn smeared_correlator(state: &GaussianState, f: &[f64], g: &[f64]) -> Result<f64> {
    let n = state.sites();
    if f.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: f.len(),
        });
    }
    if g.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: g.len(),
        });
    }
    let fv = DVector::from_row_slice(f);
    let gv = DVector::from_row_slice(g);
    Ok((fv.transpose() * &state.cov_phiphi * gv)[(0, 0)])
}

/// Product of connected variances ⟨φ_x²⟩_c · ⟨π_x²⟩_c at one site.
/// Every valid Gaussian state satisfies ≥ 1/4.
pub fn uncertainty_floor(state: &GaussianState, site: usize) -> Result<f64> {
    let n = state.sites();
    if site >= n {
        return Err(Error::SiteOutOfRange { site, sites: n });
    }
    Ok(state.cov_phiphi[(site, site)] * state.cov_pipi[(site, site)])
}

/// Gaussian mutual information I(A:B) = S_A + S_B − S_{A∪B} in nats.
/// Tiny negative results (−1e-9, 0) are clamped to zero.
pub fn mutual_information(
    state: &GaussianState,
    region_a: &[usize],
    region_b: &[usize],
) -> Result<f64> {
    if region_a.is_empty() || region_b.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let set_a: std::collections::BTreeSet<usize> = region_a.iter().copied().collect();
    if region_b.iter().any(|s| set_a.contains(s)) {
        return Err(Error::OverlappingRegions);
    }
    let entropy_of = |sites: &[usize]| -> Result<f64> {
        let sigma = state.restricted_covariance(sites)?;
        Ok(gaussian_entropy(&symplectic_eigenvalues(&sigma)))
    };
    let s_a = entropy_of(region_a)?;
    let s_b = entropy_of(region_b)?;
    let mut joint: Vec<usize> = region_a.to_vec();
    joint.extend_from_slice(region_b);
    let s_ab = entropy_of(&joint)?;
    let mi = s_a + s_b - s_ab;
    if mi < 0.0 && mi > -1e-9 {
        Ok(0.0)
    } else {
        Ok(mi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Boundary, Stencil};
    use nalgebra::dmatrix;

    #[test]
    fn single_oscillator_vacuum() {
        let spec = LatticeSpec::periodic_1d(1, 1.0, 1.0).unwrap();
        let v = vacuum_state(&spec).unwrap();
        assert!((v.cov_phiphi[(0, 0)] - 0.5).abs() < 1e-14);
        assert!((v.cov_pipi[(0, 0)] - 0.5).abs() < 1e-14);
        assert!((uncertainty_floor(&v, 0).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn n3_vacuum_values() {
        let spec = LatticeSpec::periodic_1d(3, 1.0, 1.0).unwrap();
        let v = vacuum_state(&spec).unwrap();
        for i in 0..3 {
            assert!((v.cov_phiphi[(i, i)] - 1.0 / 3.0).abs() < 1e-12);
            assert!((v.cov_pipi[(i, i)] - 5.0 / 6.0).abs() < 1e-12);
            // floor (1/3)·(5/6) = 5/18 > 1/4
            assert!((uncertainty_floor(&v, i).unwrap() - 5.0 / 18.0).abs() < 1e-12);
        }
        let c01 = connected_correlator(&v, &[(0, 1)]).unwrap()[0];
        assert!((c01 - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_is_pure() {
        for spec in [
            LatticeSpec::periodic_1d(12, 1.0, 0.6).unwrap(),
            LatticeSpec::new(1, 9, 0.5, 1.4, Boundary::Dirichlet, Stencil::Forward).unwrap(),
            LatticeSpec::new(2, 3, 1.0, 0.9, Boundary::Periodic, Stencil::Forward).unwrap(),
        ] {
            let v = vacuum_state(&spec).unwrap();
            for nu in v.symplectic_eigenvalues() {
                assert!((nu - 0.5).abs() < 1e-9, "nu = {nu}");
            }
        }
    }

    #[test]
    fn translation_and_reflection_invariance() {
        let spec = LatticeSpec::periodic_1d(17, 1.0, 0.8).unwrap();
        let v = vacuum_state(&spec).unwrap();
        let n = 17;
        for i in 0..n {
            for j in 0..n {
                let d = (i + n - j) % n;
                assert!((v.cov_phiphi[(i, j)] - v.cov_phiphi[(0, d)]).abs() < 1e-10);
                assert!((v.cov_phiphi[(0, d)] - v.cov_phiphi[(0, (n - d) % n)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn profile_matches_state() {
        let spec = LatticeSpec::periodic_1d(32, 1.0, 0.5).unwrap();
        let v = vacuum_state(&spec).unwrap();
        let prof = vacuum_correlator_profile(&spec).unwrap();
        for d in 0..32 {
            assert!((prof[d] - v.cov_phiphi[(0, d)]).abs() < 1e-12);
        }
    }

    #[test]
    fn smeared_one_hot_equals_connected() {
        let spec = LatticeSpec::periodic_1d(16, 1.0, 1.0).unwrap();
        let v = vacuum_state(&spec).unwrap();
        let mut f = vec![0.0; 16];
        let mut g = vec![0.0; 16];
        f[2] = 1.0;
        g[9] = 1.0;
        let s = smeared_correlator(&v, &f, &g).unwrap();
        let c = connected_correlator(&v, &[(2, 9)]).unwrap()[0];
        assert!((s - c).abs() < 1e-14);
    }

    #[test]
    fn smeared_nonoverlapping_bumps_positive() {
        // N = 512, m = 1: unit bumps 10 sites apart stay strictly positive,
        // at the e^(−κ·10) scale set by the lattice decay rate.
        let spec = LatticeSpec::periodic_1d(512, 1.0, 1.0).unwrap();
        let v = vacuum_state(&spec).unwrap();
        let mut f = vec![0.0; 512];
        let mut g = vec![0.0; 512];
        f[100] = 1.0;
        g[110] = 1.0;
        let s = smeared_correlator(&v, &f, &g).unwrap();
        assert!(s > 0.0);
        assert!(s > 1e-7 && s < 1e-3, "magnitude {s}");
    }

    #[test]
    fn smeared_diagonal_nonnegative() {
        let spec = LatticeSpec::periodic_1d(24, 1.0, 0.7).unwrap();
        let v = vacuum_state(&spec).unwrap();
        let f: Vec<f64> = (0..24).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        assert!(smeared_correlator(&v, &f, &f).unwrap() >= 0.0);
    }

    #[test]
    fn smeared_length_mismatch() {
        let spec = LatticeSpec::periodic_1d(8, 1.0, 1.0).unwrap();
        let v = vacuum_state(&spec).unwrap();
        let res = smeared_correlator(&v, &[1.0; 8], &[1.0; 7]);
        assert!(matches!(res, Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn decoupled_sites_have_zero_mutual_information() {
        let spec = LatticeSpec::periodic_1d(2, 1.0, 1.0).unwrap();
        let k = CouplingMatrix::from_entries(dmatrix![2.0, 0.0; 0.0, 2.0], spec).unwrap();
        let v = vacuum_from_coupling(&k).unwrap();
        let mi = mutual_information(&v, &[0], &[1]).unwrap();
        assert!(mi.abs() < 1e-12, "mi = {mi}");
    }

    #[test]
    fn mutual_information_nonnegative_and_decreasing() {
        let spec = LatticeSpec::periodic_1d(64, 1.0, 0.5).unwrap();
        let v = vacuum_state(&spec).unwrap();
        let m2 = mutual_information(&v, &[0], &[2]).unwrap();
        let m4 = mutual_information(&v, &[0], &[4]).unwrap();
        let m8 = mutual_information(&v, &[0], &[8]).unwrap();
        assert!(m2 >= 0.0 && m4 >= 0.0 && m8 >= 0.0);
        assert!(m2 > m4 && m4 > m8, "{m2} {m4} {m8}");
    }

    #[test]
    fn mutual_information_rejects_overlap() {
        let spec = LatticeSpec::periodic_1d(8, 1.0, 1.0).unwrap();
        let v = vacuum_state(&spec).unwrap();
        assert!(matches!(
            mutual_information(&v, &[0, 1], &[1, 2]),
            Err(Error::OverlappingRegions)
        ));
    }
}
