//! Heisenberg-picture evolution of the linear field operators: the c-number
//! commutator function Δ(d, t) = [φ_x(t), φ_y(0)]/i and the lightcone-leakage
//! profile of the discretised theory, plus free one-particle evolution.
//!
//! For a translation-invariant lattice the mode expansion gives
//! Δ(d, t) = −(1/N^d) Σ_k sin(ω_k t)·cos(k·d)/ω̃_k in lattice units, which
//! vanishes identically at spacelike lattice separations only in the
//! continuum limit: on the grid the equal-time commutators are exact zeros
//! but influences leak outside the cone at cutoff-scale magnitude.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::localisation::OneParticleState;
use crate::spectral::dispersion_lattice;

/// The commutator coefficient Δ(d, t) (lattice units, canonical pair):
/// [φ_x(t), φ_{x+d}(0)] = i·Δ(d, t). Separation is in lattice sites along
/// the first axis; `t` is physical time (natural units, c = 1).
///
/// Requires a periodic lattice; the profile is a function of separation
/// only by translation invariance. Cross-spacing comparisons should divide
/// by l^dimension (the physical-field normalisation).
pub fn commutator_function(spec: &LatticeSpec, d: i64, t: f64) -> Result<f64> {
    if !spec.is_periodic() {
        return Err(Error::NotTranslationInvariant);
    }
    let n = spec.sites_per_axis as i64;
    if d.abs() >= n {
        return Err(Error::SiteOutOfRange {
            site: d.unsigned_abs() as usize,
            sites: spec.sites_per_axis,
        });
    }
    let nf = spec.sites_per_axis as f64;
    let t_lat = t / spec.spacing; // ω̃·t̃ = ω·t
    let mut sum = 0.0;
    let total_modes = spec.sites_per_axis.pow(spec.dimension as u32);
    let mut mode = vec![0usize; spec.dimension];
    for flat in 0..total_modes {
        // unpack flat mode index
        let mut s = flat;
        for a in (0..spec.dimension).rev() {
            mode[a] = s % spec.sites_per_axis;
            s /= spec.sites_per_axis;
        }
        let w = dispersion_lattice(spec, &mode);
        let phase = 2.0 * std::f64::consts::PI * mode[0] as f64 * d as f64 / nf;
        sum += (w * t_lat).sin() * phase.cos() / w;
    }
    Ok(-sum / total_modes as f64)
}

/// |Δ(d, t)| over all separations of a periodic 1D lattice, with the
/// outside-cone leakage summary.
#[derive(Debug, Clone, Serialize)]
pub struct CommutatorProfile {
    /// Physical time (natural units).
    pub time: f64,
    /// (separation in lattice sites, Δ value in lattice units).
    pub values: Vec<(usize, f64)>,
    /// First separation counted as outside the cone: d > t/l + 3.
    pub cone_edge: usize,
    /// max |Δ| over the outside region.
    pub max_outside: f64,
    /// Lattice spacing, for the physical normalisation Δ/l^dim when
    /// comparing across spacings.
    pub spacing: f64,
}

/// Commutator profile at time t over separations 0..=N/2 with the leakage
/// summary. "Outside the lightcone" is d > t/l + 3 lattice units; the 3-site
/// margin keeps the known O(l) smearing of the cone edge out of the summary.
pub fn lightcone_leakage(spec: &LatticeSpec, t: f64) -> Result<CommutatorProfile> {
    if t < 0.0 {
        return Err(Error::Validation(format!("time must be >= 0, got {t}")));
    }
    let half = spec.sites_per_axis / 2;
    let mut values = Vec::with_capacity(half + 1);
    for d in 0..=half {
        values.push((d, commutator_function(spec, d as i64, t)?));
    }
    let cone_edge = (t / spec.spacing + 3.0).floor() as usize + 1;
    let max_outside = values
        .iter()
        .filter(|&&(d, _)| d >= cone_edge)
        .map(|&(_, v)| v.abs())
        .fold(0.0, f64::max);
    Ok(CommutatorProfile {
        time: t,
        values,
        cone_edge,
        max_outside,
        spacing: spec.spacing,
    })
}

/// Free Heisenberg evolution of a one-particle state: each mode amplitude
/// picks up e^(−i ω_k t). Norm is preserved exactly up to rounding.
pub fn evolve_wavepacket(state: &OneParticleState, t: f64) -> OneParticleState {
    state.evolved(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Boundary, Stencil};

    #[test]
    fn equal_time_commutators_vanish_exactly() {
        let spec = LatticeSpec::periodic_1d(32, 1.0, 0.9).unwrap();
        for d in 1..16 {
            let v = commutator_function(&spec, d, 0.0).unwrap();
            assert_eq!(v, 0.0, "d = {d}");
        }
    }

    #[test]
    fn single_oscillator_matches_heisenberg_solution() {
        // [φ(t), φ(0)] = −i sin(mt)/m for one mode (l = 1)
        let spec = LatticeSpec::periodic_1d(1, 1.0, 1.7).unwrap();
        for t in [0.3, 1.0, 2.5, 10.0] {
            let v = commutator_function(&spec, 0, t).unwrap();
            assert!((v + (1.7 * t).sin() / 1.7).abs() < 1e-13);
        }
    }

    #[test]
    fn time_antisymmetry() {
        let spec = LatticeSpec::periodic_1d(48, 1.0, 0.6).unwrap();
        for d in [0i64, 3, 11] {
            for t in [0.5, 2.0, 7.5] {
                let plus = commutator_function(&spec, d, t).unwrap();
                let minus = commutator_function(&spec, d, -t).unwrap();
                assert!((plus + minus).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rapid_decay_beyond_cone() {
        // envelope |Δ(d, t)| ≤ e^(−(d−t)) |Δ(t, t)| at separations where f64
        // resolves the true value; far outside, values sit below 1e-13.
        let spec = LatticeSpec::periodic_1d(256, 1.0, 1.0).unwrap();
        let t = 5.0;
        let at_cone = commutator_function(&spec, 5, t).unwrap().abs();
        for extra in [5i64, 10, 15] {
            let d = 5 + extra;
            let v = commutator_function(&spec, d, t).unwrap().abs();
            let bound = (-(extra as f64)).exp() * at_cone;
            assert!(v <= bound, "d={d}: {v} > {bound}");
        }
        let far = commutator_function(&spec, 50, t).unwrap().abs();
        assert!(far <= 1e-13, "far value {far}");
    }

    #[test]
    fn leakage_profile_summary() {
        let spec = LatticeSpec::periodic_1d(128, 1.0, 1.0).unwrap();
        let prof = lightcone_leakage(&spec, 0.0).unwrap();
        assert_eq!(prof.max_outside, 0.0);
        let prof = lightcone_leakage(&spec, 10.0).unwrap();
        assert_eq!(prof.cone_edge, 14);
        assert!(prof.max_outside > 0.0);
    }

    #[test]
    fn coarse_lattice_leaks_more_than_fine() {
        // fixed physical distance 30 and time 20; physical normalisation Δ/l
        let coarse = LatticeSpec::periodic_1d(256, 1.0, 1.0).unwrap();
        let fine = LatticeSpec::periodic_1d(512, 0.5, 1.0).unwrap();
        let vc = commutator_function(&coarse, 30, 20.0).unwrap().abs() / 1.0;
        let vf = commutator_function(&fine, 60, 20.0).unwrap().abs() / 0.5;
        assert!(vc >= vf, "coarse {vc} fine {vf}");
        assert!(vc > 0.0);
    }

    #[test]
    fn dirichlet_rejected() {
        let spec =
            LatticeSpec::new(1, 16, 1.0, 1.0, Boundary::Dirichlet, Stencil::Forward).unwrap();
        assert!(matches!(
            commutator_function(&spec, 1, 1.0),
            Err(Error::NotTranslationInvariant)
        ));
    }
}
