//! Closed-form nonrelativistic Gaussian wavepacket spreading: the
//! half-width growth law D_t² = (L⁴ + (t/2m)²)/L², its constancy horizon
//! t* = 2mL², and the tail probability ratio exp(−r²/L²), with SI-unit
//! conversion.

use serde::Serialize;

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (2018 CODATA exact-adjacent value).
pub const HBAR_SI: f64 = 1.054571817e-34;
/// Seconds per Julian year.
pub const SECONDS_PER_YEAR: f64 = 31_557_600.0;

/// Unit system of a wavepacket spec: natural units set ħ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    Natural,
    Si,
}

/// A freely evolving Gaussian centre-of-mass wavepacket
/// ψ ∝ exp(−r²/2L²) of mass m observed at time t.
#[derive(Debug, Clone, Serialize)]
pub struct WavepacketSpec {
    /// Initial half-width L (length units).
    pub halfwidth: f64,
    /// Mass m.
    pub mass: f64,
    /// Elapsed time t.
    pub time: f64,
    pub units: UnitSystem,
}

impl WavepacketSpec {
    pub fn new(halfwidth: f64, mass: f64, time: f64, units: UnitSystem) -> Result<Self> {
        if !(halfwidth > 0.0) || !halfwidth.is_finite() {
            return Err(Error::Validation(format!(
                "halfwidth must be positive, got {halfwidth}"
            )));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Validation(format!("mass must be positive, got {mass}")));
        }
        if !time.is_finite() {
            return Err(Error::Validation("time must be finite".into()));
        }
        Ok(Self {
            halfwidth,
            mass,
            time,
            units,
        })
    }

    fn hbar(&self) -> f64 {
        match self.units {
            UnitSystem::Natural => 1.0,
            UnitSystem::Si => HBAR_SI,
        }
    }
}

/// Probability-density half-width at time t:
/// D_t = sqrt((L⁴ + (ħt/2m)²)/L²), in the spec's units.
pub fn spread_halfwidth(spec: &WavepacketSpec) -> f64 {
    let l = spec.halfwidth;
    let s = spec.hbar() * spec.time / (2.0 * spec.mass);
    ((l.powi(4) + s * s) / (l * l)).sqrt()
}

/// Constancy horizon t* = 2mL²/ħ: the timescale below which the half-width
/// stays approximately constant.
pub fn constancy_horizon(spec: &WavepacketSpec) -> f64 {
    2.0 * spec.mass * spec.halfwidth * spec.halfwidth / spec.hbar()
}

/// Tail probability ratio |ψ(r,0)|²/|ψ(0,0)|² = exp(−r²/L²), reported in
/// log10 (underflow-safe) together with the raw ratio when representable
/// (≥ 1e-300).
#[derive(Debug, Clone, Serialize)]
pub struct TailRatio {
    pub log10_ratio: f64,
    pub ratio: Option<f64>,
}

/// Evaluate the tail ratio at distance r for initial half-width L
/// (same length units for both).
pub fn tail_ratio(halfwidth: f64, r: f64) -> Result<TailRatio> {
    if !(halfwidth > 0.0) {
        return Err(Error::Validation(format!(
            "halfwidth must be positive, got {halfwidth}"
        )));
    }
    if r < 0.0 {
        return Err(Error::Validation(format!("r must be >= 0, got {r}")));
    }
    let exponent = -(r * r) / (halfwidth * halfwidth); // ln ratio
    let log10_ratio = exponent / std::f64::consts::LN_10;
    let ratio = if log10_ratio >= -300.0 {
        Some(exponent.exp())
    } else {
        None
    };
    Ok(TailRatio { log10_ratio, ratio })
}
