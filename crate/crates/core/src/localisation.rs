//! The localisation hierarchy of the lattice theory: Knight-exact states
//! (local unitaries on the vacuum), effectively localised one-particle
//! packets, and the effective-localisation-principle check for
//! superpositions.
//!
//! All checks compare tracked expectation values against the vacuum:
//! means, plus every covariance entry whose support lies outside the region
//! (for Gaussian and one-excitation states these generate all outside
//! expectations). A state is Knight-exact when every outside deviation is
//! ≤ 1e-12; otherwise the deviation envelope over distance is fitted to
//! exp(−d/L).

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::falloff::{fit_falloff, MIN_FIT_POINTS};
use crate::gaussian::GaussianState;
use crate::lattice::LatticeSpec;
use crate::spectral::mode_decomposition;

type C64 = Complex<f64>;

/// Deviations below 1e-12 count as exactly vacuum (Knight threshold).
pub const KNIGHT_TOL: f64 = 1e-12;
/// Envelope points below this fraction of the peak are double-precision
/// cancellation noise from the spectral sums and are excluded from fits.
pub const ENVELOPE_FLOOR_REL: f64 = 1e-10;
/// Minimum R² of the envelope fit for an effectively-localised verdict.
pub const ENVELOPE_R2_MIN: f64 = 0.9;

/// A set of lattice sites (contiguous interval or box in practice).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Region {
    sites: Vec<usize>,
}

impl Region {
    pub fn from_sites(spec: &LatticeSpec, mut sites: Vec<usize>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let n = spec.sites();
        for &s in &sites {
            if s >= n {
                return Err(Error::SiteOutOfRange { site: s, sites: n });
            }
        }
        sites.sort_unstable();
        sites.dedup();
        Ok(Self { sites })
    }

    /// Contiguous 1D interval [lo, hi] (inclusive).
    pub fn interval(spec: &LatticeSpec, lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(Error::Validation(format!("interval {lo} > {hi}")));
        }
        Self::from_sites(spec, (lo..=hi).collect())
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.sites.binary_search(&site).is_ok()
    }

    /// Graph distance from every lattice site to this region.
    pub fn distances(&self, spec: &LatticeSpec) -> Vec<usize> {
        spec.distances_from(&self.sites)
    }
}

/// Localisation verdict of a state relative to a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    KnightExact,
    EffectivelyLocalised,
    NotLocalised,
}

/// Outcome of a Knight or effective-localisation check.
#[derive(Debug, Clone, Serialize)]
pub struct LocalisationReport {
    pub region: Region,
    /// distance → max |deviation| over tracked observables at that distance.
    pub profile: Vec<(usize, f64)>,
    /// Fitted decay length L; `None` is the "exact" sentinel (all outside
    /// deviations ≤ 1e-12, so no scale exists).
    pub scale: Option<f64>,
    /// R² of the plain exponential envelope fit, when fitted.
    pub r2: Option<f64>,
    pub verdict: Verdict,
    pub max_outside_deviation: f64,
    /// Names of the observable families entering the deviations.
    pub tracked: Vec<String>,
}

fn tracked_names() -> Vec<String> {
    ["mean_phi", "mean_pi", "cov_phiphi", "cov_pipi", "cov_phipi"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// Signed deviations of tracked expectations from the vacuum values.
#[derive(Debug, Clone)]
pub struct DeviationTable {
    pub mean_phi: DVector<f64>,
    pub mean_pi: DVector<f64>,
    pub phiphi: DMatrix<f64>,
    pub pipi: DMatrix<f64>,
    pub phipi: DMatrix<f64>,
    spec: LatticeSpec,
}

impl DeviationTable {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    /// Deviation table of a Gaussian state against a reference (vacuum).
    pub fn between(state: &GaussianState, reference: &GaussianState) -> Result<Self> {
        if state.spec() != reference.spec() {
            return Err(Error::SpecMismatch(
                "state and vacuum built from different lattice specs".into(),
            ));
        }
        Ok(Self {
            mean_phi: &state.mean_phi - &reference.mean_phi,
            mean_pi: &state.mean_pi - &reference.mean_pi,
            phiphi: &state.cov_phiphi - &reference.cov_phiphi,
            pipi: &state.cov_pipi - &reference.cov_pipi,
            phipi: &state.cov_phipi - &reference.cov_phipi,
            spec: state.spec().clone(),
        })
    }

    /// Deviation envelope over graph distance from the region: the maximum
    /// |deviation| over every tracked observable whose farthest support site
    /// sits at that distance (both supports outside the region).
    pub fn envelope(&self, region: &Region) -> Vec<(usize, f64)> {
        let dist = region.distances(&self.spec);
        let n = self.spec.sites();
        let dmax = dist.iter().copied().max().unwrap_or(0);
        if dmax == 0 {
            return Vec::new();
        }
        let mut env = vec![0.0f64; dmax + 1];
        for x in 0..n {
            if dist[x] == 0 {
                continue;
            }
            let single = self.mean_phi[x].abs().max(self.mean_pi[x].abs());
            if single > env[dist[x]] {
                env[dist[x]] = single;
            }
            for y in 0..n {
                if dist[y] == 0 {
                    continue;
                }
                let d = dist[x].max(dist[y]);
                let v = self.phiphi[(x, y)]
                    .abs()
                    .max(self.pipi[(x, y)].abs())
                    .max(self.phipi[(x, y)].abs());
                if v > env[d] {
                    env[d] = v;
                }
            }
        }
        (1..=dmax).map(|d| (d, env[d])).collect()
    }
}

/// Local displacement: shift ⟨φ⟩ by α on the region's sites. Covariance is
/// untouched, so every connected correlator is unchanged.
pub fn displace(state: &GaussianState, region: &Region, alpha: f64) -> GaussianState {
    let mut out = state.clone();
    for &s in region.sites() {
        out.mean_phi[s] += alpha;
    }
    out
}

/// Local single-site squeezing on every region site: the symplectic map
/// φ → e^(−s)φ, π → e^(s)π applied site-locally (identity elsewhere).
pub fn squeeze(state: &GaussianState, region: &Region, s: f64) -> GaussianState {
    let mut out = state.clone();
    let (ephi, epi) = ((-s).exp(), s.exp());
    let n = state.sites();
    for &r in region.sites() {
        out.mean_phi[r] *= ephi;
        out.mean_pi[r] *= epi;
        for j in 0..n {
            out.cov_phiphi[(r, j)] *= ephi;
            out.cov_phiphi[(j, r)] *= ephi;
            out.cov_pipi[(r, j)] *= epi;
            out.cov_pipi[(j, r)] *= epi;
            out.cov_phipi[(r, j)] *= ephi; // φ index
            out.cov_phipi[(j, r)] *= epi; // π index
        }
    }
    out
}

/// A normalised one-particle excitation, stored as mode-space amplitudes.
#[derive(Debug, Clone)]
pub struct OneParticleState {
    amplitudes: DVector<C64>,
    spec: LatticeSpec,
}

impl OneParticleState {
    /// Wrap and normalise mode amplitudes.
    pub fn from_mode_amplitudes(spec: &LatticeSpec, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != spec.sites() {
            return Err(Error::LengthMismatch {
                expected: spec.sites(),
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroProfile);
        }
        Ok(Self {
            amplitudes: amplitudes / C64::new(norm, 0.0),
            spec: spec.clone(),
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Free evolution: mode phases e^(−i ω_k t), t in physical time.
    pub fn evolved(&self, t: f64) -> Self {
        let spec = self.spec.clone();
        let k = crate::lattice::CouplingMatrix::from_spec(&spec);
        let basis = mode_decomposition(&k).expect("valid spec has positive modes");
        let mut amps = self.amplitudes.clone();
        for m in 0..amps.len() {
            let phase = C64::from_polar(1.0, -basis.frequencies[m] * t);
            amps[m] *= phase;
        }
        Self {
            amplitudes: amps,
            spec,
        }
    }

    /// Position-space amplitude functions of the excitation:
    /// ψ(x) = Σ_k f̃_k v_k(x)/√(2ω̃_k) (φ-sector) and
    /// χ(x) = Σ_k f̃_k v_k(x)·√(ω̃_k/2) (π-sector), lattice units.
    pub fn position_amplitudes(&self) -> Result<(DVector<C64>, DVector<C64>)> {
        let k = crate::lattice::CouplingMatrix::from_spec(&self.spec);
        let basis = mode_decomposition(&k)?;
        let wl = basis.frequencies_lattice();
        let n = self.spec.sites();
        let mut psi = DVector::from_element(n, C64::new(0.0, 0.0));
        let mut chi = DVector::from_element(n, C64::new(0.0, 0.0));
        for m in 0..n {
            let fpsi = 1.0 / (2.0 * wl[m]).sqrt();
            let fchi = (wl[m] / 2.0).sqrt();
            let amp = self.amplitudes[m];
            for x in 0..n {
                let v = basis.modes[(x, m)];
                psi[x] += amp * v * fpsi;
                chi[x] += amp * v * fchi;
            }
        }
        Ok((psi, chi))
    }

    /// Closed-form deviations of the tracked expectations from vacuum:
    /// Δ⟨φ_xφ_y⟩ = 2Re[ψ(x)ψ*(y)], Δ⟨π_xπ_y⟩ = 2Re[χ(x)χ*(y)],
    /// Δ(½⟨{φ_x,π_y}⟩) = 2Im[ψ*(x)χ(y)]; means vanish by parity.
    pub fn deviation_table(&self) -> Result<DeviationTable> {
        let (psi, chi) = self.position_amplitudes()?;
        let n = self.spec.sites();
        let mut phiphi = DMatrix::zeros(n, n);
        let mut pipi = DMatrix::zeros(n, n);
        let mut phipi = DMatrix::zeros(n, n);
        for x in 0..n {
            for y in 0..n {
                phiphi[(x, y)] = 2.0 * (psi[x] * psi[y].conj()).re;
                pipi[(x, y)] = 2.0 * (chi[x] * chi[y].conj()).re;
                phipi[(x, y)] = 2.0 * (psi[x].conj() * chi[y]).im;
            }
        }
        Ok(DeviationTable {
            mean_phi: DVector::zeros(n),
            mean_pi: DVector::zeros(n),
            phiphi,
            pipi,
            phipi,
            spec: self.spec.clone(),
        })
    }
}

/// Build a one-particle state from a position-space complex profile:
/// mode amplitudes f̃ = Vᵀ·g, normalised.
pub fn one_particle_state(profile: &[C64], spec: &LatticeSpec) -> Result<OneParticleState> {
    if profile.len() != spec.sites() {
        return Err(Error::LengthMismatch {
            expected: spec.sites(),
            got: profile.len(),
        });
    }
    if profile.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(Error::ZeroProfile);
    }
    let k = crate::lattice::CouplingMatrix::from_spec(spec);
    let basis = mode_decomposition(&k)?;
    let n = spec.sites();
    let mut amps = DVector::from_element(n, C64::new(0.0, 0.0));
    for m in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for x in 0..n {
            acc += profile[x] * basis.modes[(x, m)];
        }
        amps[m] = acc;
    }
    OneParticleState::from_mode_amplitudes(spec, amps)
}

/// Gaussian position profile exp(−d(x,x₀)²/2σ²) turned into a one-particle
/// state (d is the periodic lattice distance).
pub fn gaussian_packet(spec: &LatticeSpec, center: usize, sigma: f64) -> Result<OneParticleState> {
    let n = spec.sites();
    if center >= n {
        return Err(Error::SiteOutOfRange {
            site: center,
            sites: n,
        });
    }
    let profile: Vec<C64> = (0..n)
        .map(|x| {
            let raw = (x as i64 - center as i64).unsigned_abs() as usize;
            let d = if spec.is_periodic() {
                raw.min(n - raw)
            } else {
                raw
            } as f64;
            C64::new((-d * d / (2.0 * sigma * sigma)).exp(), 0.0)
        })
        .collect();
    one_particle_state(&profile, spec)
}

/// Exact closed-form deviations of a one-particle state's quadratic
/// expectations from the vacuum.
pub fn one_particle_expectations(state: &OneParticleState) -> Result<DeviationTable> {
    state.deviation_table()
}

fn report_from_table(table: &DeviationTable, region: &Region) -> Result<LocalisationReport> {
    let profile = table.envelope(region);
    let max_outside = profile.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    if max_outside <= KNIGHT_TOL {
        return Ok(LocalisationReport {
            region: region.clone(),
            profile,
            scale: None,
            r2: None,
            verdict: Verdict::KnightExact,
            max_outside_deviation: max_outside,
            tracked: tracked_names(),
        });
    }
    // trim the double-precision noise floor, then fit exp(−d/L)
    let floor = max_outside * ENVELOPE_FLOOR_REL;
    let l = table.spec.spacing;
    let samples: Vec<(f64, f64)> = profile
        .iter()
        .filter(|&&(_, v)| v > floor)
        .map(|&(d, v)| (d as f64 * l, v))
        .collect();
    if samples.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints {
            needed: MIN_FIT_POINTS,
            got: samples.len(),
        });
    }
    let lo = samples.first().unwrap().0;
    let hi = samples.last().unwrap().0;
    let fit = fit_falloff(&samples, (lo, hi))?;
    let verdict = if fit.r2_exponential >= ENVELOPE_R2_MIN && fit.scale_plain > 0.0 {
        Verdict::EffectivelyLocalised
    } else {
        Verdict::NotLocalised
    };
    Ok(LocalisationReport {
        region: region.clone(),
        profile,
        scale: Some(fit.scale_plain),
        r2: Some(fit.r2_exponential),
        verdict,
        max_outside_deviation: max_outside,
        tracked: tracked_names(),
    })
}

/// Knight's localisation check for Gaussian states: every tracked
/// expectation with support outside the region must equal the vacuum value
/// to 1e-12.
pub fn knight_check(
    state: &GaussianState,
    vacuum: &GaussianState,
    region: &Region,
) -> Result<LocalisationReport> {
    let table = DeviationTable::between(state, vacuum)?;
    let mut report = report_from_table(&table, region)?;
    if report.verdict != Verdict::KnightExact {
        // knight_check gives a binary verdict; the envelope fit is still
        // reported for diagnostics.
        if report.verdict == Verdict::EffectivelyLocalised {
            report.verdict = Verdict::NotLocalised;
        }
    }
    Ok(report)
}

/// Knight check against a precomputed deviation table (one-particle states).
pub fn knight_check_table(table: &DeviationTable, region: &Region) -> Result<LocalisationReport> {
    let mut report = report_from_table(table, region)?;
    if report.verdict == Verdict::EffectivelyLocalised {
        report.verdict = Verdict::NotLocalised;
    }
    Ok(report)
}

/// Fit the outside-deviation envelope to exp(−d/L) and classify the state.
/// All outside deviations ≤ 1e-12 yields the "exact" sentinel
/// (`scale = None`, Knight-exact verdict).
pub fn l_localisation_fit(table: &DeviationTable, region: &Region) -> Result<LocalisationReport> {
    report_from_table(table, region)
}

/// A localisation report judged against a target scale L: exact, or fitted
/// with R² ≥ 0.9 and L_fit ≤ 2L (the same multiplicative operationalization
/// the ELP verdict uses).
pub fn is_l_localised(report: &LocalisationReport, scale_l: f64) -> bool {
    match report.verdict {
        Verdict::KnightExact => true,
        Verdict::EffectivelyLocalised => report
            .scale
            .map(|s| s > 0.0 && s <= 2.0 * scale_l)
            .unwrap_or(false),
        Verdict::NotLocalised => false,
    }
}

/// Result of the effective-localisation-principle check.
#[derive(Debug, Clone, Serialize)]
pub struct ElpResult {
    pub pass: bool,
    /// Fitted scale L′ of the superposition (None = exact).
    pub superposition_scale: Option<f64>,
    pub superposition_r2: Option<f64>,
    /// Fitted scales of the individual input states.
    pub input_scales: Vec<Option<f64>>,
    pub scale_target: f64,
    pub report: LocalisationReport,
}

/// ELP check: every input must individually be L-localised in the region
/// (precondition, reported as an error otherwise); the normalised
/// superposition passes iff its fitted L′ ≤ 2L with R² ≥ 0.9.
pub fn elp_check(
    states: &[OneParticleState],
    coefficients: &[C64],
    region: &Region,
    scale_l: f64,
) -> Result<ElpResult> {
    if states.is_empty() || states.len() != coefficients.len() {
        return Err(Error::LengthMismatch {
            expected: states.len(),
            got: coefficients.len(),
        });
    }
    let spec = states[0].spec().clone();
    let mut input_scales = Vec::with_capacity(states.len());
    for (i, s) in states.iter().enumerate() {
        if s.spec() != &spec {
            return Err(Error::SpecMismatch(format!(
                "state {i} built from a different lattice spec"
            )));
        }
        let rep = l_localisation_fit(&s.deviation_table()?, region)?;
        if !is_l_localised(&rep, scale_l) {
            return Err(Error::NotLLocalised {
                index: i,
                detail: format!(
                    "fitted scale {:?}, r2 {:?}, verdict {:?}",
                    rep.scale, rep.r2, rep.verdict
                ),
            });
        }
        input_scales.push(rep.scale);
    }
    // normalised superposition in the one-particle sector
    let n = spec.sites();
    let mut amps = DVector::from_element(n, C64::new(0.0, 0.0));
    for (s, &c) in states.iter().zip(coefficients) {
        amps += s.amplitudes() * c;
    }
    let superposition = OneParticleState::from_mode_amplitudes(&spec, amps)?;
    let report = l_localisation_fit(&superposition.deviation_table()?, region)?;
    let pass = is_l_localised(&report, scale_l);
    Ok(ElpResult {
        pass,
        superposition_scale: report.scale,
        superposition_r2: report.r2,
        input_scales,
        scale_target: scale_l,
        report,
    })
}

#[cfg(test)]
mod tests {
    use crate::gaussian::vacuum_state;
    use super::*;

    fn spec_n(n: usize, m: f64) -> LatticeSpec {
        LatticeSpec::periodic_1d(n, 1.0, m).unwrap()
    }

    #[test]
    fn displacement_group_law_and_correlators() {
        let spec = spec_n(16, 1.0);
        let vac = vacuum_state(&spec).unwrap();
        let region = Region::from_sites(&spec, vec![4]).unwrap();
        let once = displace(&displace(&vac, &region, 0.7), &region, 0.5);
        let joint = displace(&vac, &region, 1.2);
        assert!((once.mean_phi[4] - joint.mean_phi[4]).abs() < 1e-15);
        let c0 = crate::gaussian::connected_correlator(&vac, &[(3, 9)]).unwrap()[0];
        let c1 = crate::gaussian::connected_correlator(&joint, &[(3, 9)]).unwrap()[0];
        assert_eq!(c0, c1);
    }

    #[test]
    fn squeeze_scales_local_variance_and_preserves_purity() {
        let spec = spec_n(10, 0.8);
        let vac = vacuum_state(&spec).unwrap();
        let region = Region::from_sites(&spec, vec![0]).unwrap();
        let s = 0.4;
        let sq = squeeze(&vac, &region, s);
        let expect = vac.cov_phiphi[(0, 0)] * (-2.0 * s).exp();
        assert!((sq.cov_phiphi[(0, 0)] - expect).abs() < 1e-14);
        for nu in sq.symplectic_eigenvalues() {
            assert!((nu - 0.5).abs() < 1e-9);
        }
        // uncertainty floor invariant under the local symplectic map
        let floor = crate::gaussian::uncertainty_floor(&sq, 0).unwrap();
        assert!(floor >= 0.25 - 1e-10);
    }

    #[test]
    fn displaced_vacuum_is_knight_exact() {
        let spec = spec_n(64, 0.5);
        let vac = vacuum_state(&spec).unwrap();
        let region = Region::interval(&spec, 20, 28).unwrap();
        let disp = displace(&vac, &region, 2.5);
        let rep = knight_check(&disp, &vac, &region).unwrap();
        assert_eq!(rep.verdict, Verdict::KnightExact);
        assert!(rep.max_outside_deviation <= KNIGHT_TOL);
        assert!(rep.scale.is_none());
    }

    #[test]
    fn squeezed_vacuum_is_knight_exact() {
        let spec = spec_n(48, 1.0);
        let vac = vacuum_state(&spec).unwrap();
        let region = Region::from_sites(&spec, vec![10, 11, 12]).unwrap();
        let sq = squeeze(&vac, &region, -0.8);
        let rep = knight_check(&sq, &vac, &region).unwrap();
        assert_eq!(rep.verdict, Verdict::KnightExact);
    }

    #[test]
    fn one_particle_packet_is_not_knight_exact() {
        let spec = spec_n(128, 0.5);
        let packet = gaussian_packet(&spec, 64, 4.0).unwrap();
        let region = Region::interval(&spec, 56, 72).unwrap();
        let table = packet.deviation_table().unwrap();
        let rep = knight_check_table(&table, &region).unwrap();
        assert_eq!(rep.verdict, Verdict::NotLocalised);
        assert!(rep.max_outside_deviation > 1e-8);
        // deviations nonzero at every tracked distance out to the noise floor
        for &(d, v) in rep.profile.iter().take(20) {
            assert!(v > 0.0, "distance {d}");
        }
    }

    #[test]
    fn one_particle_normalization_idempotent() {
        let spec = spec_n(32, 1.0);
        let s1 = gaussian_packet(&spec, 16, 3.0).unwrap();
        let s2 = OneParticleState::from_mode_amplitudes(&spec, s1.amplitudes().clone()).unwrap();
        assert!((s1.amplitudes() - s2.amplitudes()).norm() < 1e-15);
        assert!((s1.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_mode_excitation_has_flat_profile() {
        let spec = spec_n(24, 0.7);
        let mut amps = DVector::from_element(24, C64::new(0.0, 0.0));
        amps[0] = C64::new(1.0, 0.0); // k = 0 mode
        let state = OneParticleState::from_mode_amplitudes(&spec, amps).unwrap();
        let table = state.deviation_table().unwrap();
        let first = table.phiphi[(0, 0)];
        for x in 0..24 {
            assert!((table.phiphi[(x, x)] - first).abs() < 1e-12);
        }
        assert!(first > 0.0);
    }

    #[test]
    fn first_excited_state_phi_squared() {
        // N = 1, m = 1: ⟨φ²⟩ = 3/2 in the first excited state
        let spec = spec_n(1, 1.0);
        let mut amps = DVector::from_element(1, C64::new(1.0, 0.0));
        amps[0] = C64::new(1.0, 0.0);
        let state = OneParticleState::from_mode_amplitudes(&spec, amps).unwrap();
        let table = state.deviation_table().unwrap();
        let vac = vacuum_state(&spec).unwrap();
        let total = vac.cov_phiphi[(0, 0)] + table.phiphi[(0, 0)];
        assert!((total - 1.5).abs() < 1e-12);
    }

    #[test]
    fn zero_profile_rejected() {
        let spec = spec_n(8, 1.0);
        let profile = vec![C64::new(0.0, 0.0); 8];
        assert!(matches!(
            one_particle_state(&profile, &spec),
            Err(Error::ZeroProfile)
        ));
    }

    #[test]
    fn evolution_preserves_norm_and_profiles() {
        let spec = spec_n(64, 0.9);
        let s = gaussian_packet(&spec, 30, 5.0).unwrap();
        let evolved = s.evolved(1000.0);
        assert!((evolved.norm() - 1.0).abs() <= 1e-12);
        // t = 0 is the identity
        let same = s.evolved(0.0);
        assert!((same.amplitudes() - s.amplitudes()).norm() < 1e-15);
        // single-mode packet: position probability profile unchanged
        let mut amps = DVector::from_element(64, C64::new(0.0, 0.0));
        amps[3] = C64::new(1.0, 0.0);
        let single = OneParticleState::from_mode_amplitudes(&spec, amps).unwrap();
        let before = single.deviation_table().unwrap();
        let after = single.evolved(7.3).deviation_table().unwrap();
        assert!((&before.phiphi - &after.phiphi).amax() < 1e-12);
    }

    #[test]
    fn vacuum_vs_vacuum_is_exact_sentinel() {
        let spec = spec_n(32, 1.0);
        let vac = vacuum_state(&spec).unwrap();
        let region = Region::interval(&spec, 10, 14).unwrap();
        let table = DeviationTable::between(&vac, &vac).unwrap();
        let rep = l_localisation_fit(&table, &region).unwrap();
        assert_eq!(rep.verdict, Verdict::KnightExact);
        assert!(rep.scale.is_none());
    }

    #[test]
    fn packet_fits_compton_scale() {
        // σ = 5 packet centered in the region, m = 0.5, N = 400:
        // fitted tail scale within factor 2 of 1/m = 2.
        let spec = spec_n(400, 0.5);
        let packet = gaussian_packet(&spec, 200, 5.0).unwrap();
        let region = Region::interval(&spec, 180, 220).unwrap();
        let rep = l_localisation_fit(&packet.deviation_table().unwrap(), &region).unwrap();
        assert_eq!(rep.verdict, Verdict::EffectivelyLocalised);
        let scale = rep.scale.unwrap();
        let ratio = (scale / 2.0).max(2.0 / scale);
        assert!(ratio <= 2.0, "scale {scale}");
        assert!(rep.r2.unwrap() >= 0.9);
    }

    #[test]
    fn elp_two_packets_pass() {
        let spec = spec_n(400, 0.5);
        let a = gaussian_packet(&spec, 80, 5.0).unwrap();
        let b = gaussian_packet(&spec, 120, 5.0).unwrap();
        let region = Region::interval(&spec, 60, 140).unwrap();
        let res = elp_check(
            &[a, b],
            &[C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            &region,
            2.0,
        )
        .unwrap();
        assert!(res.pass);
        let lp = res.superposition_scale.unwrap();
        assert!(lp <= 4.0, "L' = {lp}");
    }

    #[test]
    fn elp_degenerate_coefficients_reduce_to_single_state() {
        let spec = spec_n(256, 0.5);
        let a = gaussian_packet(&spec, 128, 5.0).unwrap();
        let b = gaussian_packet(&spec, 90, 5.0).unwrap();
        let region = Region::interval(&spec, 80, 138).unwrap();
        let res = elp_check(
            &[a.clone(), b],
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            &region,
            2.0,
        )
        .unwrap();
        let solo = l_localisation_fit(&a.deviation_table().unwrap(), &region).unwrap();
        assert!((res.superposition_scale.unwrap() - solo.scale.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn elp_uncovered_packet_is_precondition_error() {
        let spec = spec_n(400, 0.5);
        let a = gaussian_packet(&spec, 100, 5.0).unwrap();
        let b = gaussian_packet(&spec, 280, 5.0).unwrap(); // outside the region
        let region = Region::interval(&spec, 60, 140).unwrap();
        let err = elp_check(
            &[a, b],
            &[C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            &region,
            2.0,
        )
        .unwrap_err();
        match err {
            Error::NotLLocalised { index, .. } => assert_eq!(index, 1),
            other => panic!("expected NotLLocalised, got {other:?}"),
        }
    }

    #[test]
    fn region_validation() {
        let spec = spec_n(8, 1.0);
        assert!(Region::from_sites(&spec, vec![]).is_err());
        assert!(Region::from_sites(&spec, vec![9]).is_err());
        let r = Region::interval(&spec, 2, 4).unwrap();
        assert_eq!(r.sites(), &[2, 3, 4]);
        assert!(r.contains(3));
        assert!(!r.contains(5));
    }
}
