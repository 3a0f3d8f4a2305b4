//! Analytical electromigration reliability models.
//!
//! Covers Black's median-time-to-failure law, peak current density, the
//! RMS-current relaxation rule used at sign-off, the RMS-EM MTF model and
//! the toggle-rate based MTF improvement metric.
//!
//! Absolute MTF values carry the units of the caller-supplied scale constant
//! `A`, which foundries do not publish in a form usable here. Only ratios
//! between two evaluations with the same technology inputs are meaningful;
//! [`mtf_improvement`] and [`lifetime_extension_from_current_ratio`] are the
//! ratio-form entry points.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV_PER_K: f64 = 8.617333262e-5;

/// Offset between the Celsius and Kelvin scales.
pub const CELSIUS_OFFSET: f64 = 273.15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmError {
    #[error("invalid parameter `{name}` = {value}: {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("improvement is unbounded: the aware hotspot is zero while the original is {original}")]
    UnboundedImprovement { original: f64 },
}

fn require(name: &'static str, value: f64, ok: bool, requirement: &'static str) -> Result<(), EmError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(EmError::InvalidParameter {
            name,
            value,
            requirement,
        })
    }
}

pub fn celsius_to_kelvin(celsius: f64) -> f64 {
    celsius + CELSIUS_OFFSET
}

/// Technology constants of Black's law: `A`, `n`, `Ea` and the junction temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TechParams {
    pub scale: f64,
    pub exponent: f64,
    /// Activation energy in eV.
    pub activation_energy: f64,
    /// Absolute temperature in kelvin.
    pub temperature: f64,
}

impl TechParams {
    pub fn new(scale: f64, exponent: f64, activation_energy: f64, temperature: f64) -> Result<Self, EmError> {
        let params = Self {
            scale,
            exponent,
            activation_energy,
            temperature,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), EmError> {
        require("scale", self.scale, self.scale > 0.0, "must be > 0")?;
        require("exponent", self.exponent, self.exponent > 0.0, "must be > 0")?;
        require(
            "activation_energy",
            self.activation_energy,
            self.activation_energy >= 0.0,
            "must be >= 0 eV",
        )?;
        require("temperature", self.temperature, self.temperature > 0.0, "must be > 0 K")
    }

    /// `exp(Ea / (kB * T))`.
    pub fn arrhenius_factor(&self) -> f64 {
        (self.activation_energy / (BOLTZMANN_EV_PER_K * self.temperature)).exp()
    }
}

impl Default for TechParams {
    /// `A = 1`, `n = 2`, `Ea = 0.9 eV`, `T = 125 °C`.
    fn default() -> Self {
        Self {
            scale: 1.0,
            exponent: 2.0,
            activation_energy: 0.9,
            temperature: celsius_to_kelvin(125.0),
        }
    }
}

/// Metal cross-section, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WireGeometry {
    pub width: f64,
    pub height: f64,
}

impl WireGeometry {
    pub fn new(width: f64, height: f64) -> Result<Self, EmError> {
        let geom = Self { width, height };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<(), EmError> {
        require("width", self.width, self.width > 0.0, "must be > 0 m")?;
        require("height", self.height, self.height > 0.0, "must be > 0 m")
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

/// Electrical operating point of one net.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalElectricals {
    /// Load capacitance in farads.
    pub capacitance: f64,
    pub supply_voltage: f64,
    /// Clock frequency in hertz; the RMS model uses it as `Fmax`.
    pub frequency: f64,
    /// Switching probability (toggle rate) in `[0, 1]`.
    pub toggle_rate: f64,
    pub rise_time: f64,
    pub fall_time: f64,
}

impl SignalElectricals {
    pub fn validate(&self) -> Result<(), EmError> {
        require("capacitance", self.capacitance, self.capacitance >= 0.0, "must be >= 0 F")?;
        require(
            "supply_voltage",
            self.supply_voltage,
            self.supply_voltage > 0.0,
            "must be > 0 V",
        )?;
        require("frequency", self.frequency, self.frequency > 0.0, "must be > 0 Hz")?;
        require(
            "toggle_rate",
            self.toggle_rate,
            (0.0..=1.0).contains(&self.toggle_rate),
            "must lie in [0, 1]",
        )?;
        require("rise_time", self.rise_time, self.rise_time > 0.0, "must be > 0 s")?;
        require("fall_time", self.fall_time, self.fall_time > 0.0, "must be > 0 s")
    }
}

/// Foundry RMS sign-off limit: the maximum RMS current allowed for the
/// nominal technology lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmsLimit {
    pub i_rms_max: f64,
    /// Nominal technology lifetime, in years.
    pub mtf_technology: f64,
}

impl RmsLimit {
    pub fn new(i_rms_max: f64, mtf_technology: f64) -> Result<Self, EmError> {
        let limit = Self {
            i_rms_max,
            mtf_technology,
        };
        limit.validate()?;
        Ok(limit)
    }

    pub fn validate(&self) -> Result<(), EmError> {
        require("i_rms_max", self.i_rms_max, self.i_rms_max > 0.0, "must be > 0 A")?;
        require(
            "mtf_technology",
            self.mtf_technology,
            self.mtf_technology > 0.0,
            "must be > 0 years",
        )
    }
}

/// Result of the RMS-EM MTF model. A net that never switches carries no
/// alternating current and never fails by this mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mtf {
    Finite(f64),
    Unbounded,
}

impl Mtf {
    pub fn finite(self) -> Option<f64> {
        match self {
            Mtf::Finite(v) => Some(v),
            Mtf::Unbounded => None,
        }
    }
}

/// Black's equation: `A / J^n * exp(Ea / (kB T))`.
pub fn black_mtf(tech: &TechParams, current_density: f64) -> Result<f64, EmError> {
    tech.validate()?;
    require(
        "current_density",
        current_density,
        current_density > 0.0,
        "must be > 0 A/m^2",
    )?;
    Ok(tech.scale / current_density.powf(tech.exponent) * tech.arrhenius_factor())
}

/// Peak-model current density `C * VDD / (W * H) * p * f`, in A/m².
pub fn current_density(sig: &SignalElectricals, geom: &WireGeometry) -> f64 {
    sig.capacitance * sig.supply_voltage / geom.area() * sig.toggle_rate * sig.frequency
}

/// RMS current allowed when the target lifetime is relaxed to `mtf_reduced` years.
pub fn reduced_rms_current(limit: &RmsLimit, mtf_reduced: f64) -> Result<f64, EmError> {
    limit.validate()?;
    require("mtf_reduced", mtf_reduced, mtf_reduced > 0.0, "must be > 0 years")?;
    Ok(limit.i_rms_max * (limit.mtf_technology / mtf_reduced).sqrt())
}

/// Lifetime multiplier obtained when a net's RMS current drops to
/// `current_ratio = I_reduced / I_max` of its sign-off value.
pub fn lifetime_extension_from_current_ratio(current_ratio: f64) -> Result<f64, EmError> {
    require(
        "current_ratio",
        current_ratio,
        current_ratio > 0.0 && current_ratio <= 1.0,
        "must lie in (0, 1]",
    )?;
    Ok((1.0 / current_ratio).powi(2))
}

/// `K1 = A * (W H)^n * exp(Ea / (kB T))`.
pub fn k1(tech: &TechParams, geom: &WireGeometry) -> f64 {
    tech.scale * geom.area().powf(tech.exponent) * tech.arrhenius_factor()
}

/// `K2 = sqrt(1/t_r + 1/t_f)`.
pub fn k2(sig: &SignalElectricals) -> f64 {
    (1.0 / sig.rise_time + 1.0 / sig.fall_time).sqrt()
}

/// [`k2`] from bare edge times, with the inputs checked.
pub fn k2_from_edges(rise_time: f64, fall_time: f64) -> Result<f64, EmError> {
    require("rise_time", rise_time, rise_time > 0.0, "must be > 0 s")?;
    require("fall_time", fall_time, fall_time > 0.0, "must be > 0 s")?;
    Ok((1.0 / rise_time + 1.0 / fall_time).sqrt())
}

/// RMS-EM median time to failure:
/// `((K1/K2)^2 / (C^2 VDD^2) / (Fmax p))^(n/2)`.
///
/// The `n/2` exponent applies to the whole bracket. Zero toggle rate or zero
/// load capacitance yields [`Mtf::Unbounded`].
pub fn rms_em_mtf(tech: &TechParams, geom: &WireGeometry, sig: &SignalElectricals) -> Result<Mtf, EmError> {
    tech.validate()?;
    geom.validate()?;
    sig.validate()?;
    if sig.toggle_rate == 0.0 || sig.capacitance == 0.0 {
        return Ok(Mtf::Unbounded);
    }
    let ratio = k1(tech, geom) / k2(sig);
    let cv = sig.capacitance * sig.supply_voltage;
    let bracket = ratio * ratio / (cv * cv) / (sig.frequency * sig.toggle_rate);
    Ok(Mtf::Finite(bracket.powf(tech.exponent / 2.0)))
}

/// Relative MTF gain of an aware design over the original one, from the
/// maximum toggle rates of the two: `p_max_original / p_max_aware - 1`.
///
/// Maximum write counts from equal-length runs may be passed directly since
/// the ratio does not depend on the run length.
pub fn mtf_improvement(p_max_original: f64, p_max_aware: f64) -> Result<f64, EmError> {
    require(
        "p_max_original",
        p_max_original,
        p_max_original > 0.0,
        "must be > 0",
    )?;
    if p_max_aware == 0.0 {
        return Err(EmError::UnboundedImprovement {
            original: p_max_original,
        });
    }
    require("p_max_aware", p_max_aware, p_max_aware > 0.0, "must be > 0")?;
    Ok(p_max_original / p_max_aware - 1.0)
}
