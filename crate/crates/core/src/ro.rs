//! Ring-oscillator period model: process variation, environment drift,
//! and square-wave evaluation.
//!
//! Time is carried as double-precision seconds. Comparisons against
//! wave edges use the pinned [`TIME_EPS`] tolerance, widened to a few
//! ulps of the accumulated phase so that exact rational coincidences
//! (for example sample 5 of a 1.1 period ratio landing on a cycle
//! boundary) survive the floating-point division.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::draw_normal;

/// Comparison tolerance for time instants, in seconds.
pub const TIME_EPS: f64 = 1e-15;

/// Stage count at which `nominal_period` is specified. A ring of m
/// inverting stages has period proportional to m, so drawn periods
/// scale by `stage_count / REFERENCE_STAGE_COUNT`.
pub const REFERENCE_STAGE_COUNT: u32 = 3;

/// Statistical model of one ring-oscillator design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ROModelSpec {
    /// Period at the reference stage count and environment, in seconds.
    pub nominal_period: f64,
    /// Number of inverting stages; odd, at least 3.
    pub stage_count: u32,
    /// Std-dev of the per-instance period draw, as a fraction.
    pub inter_chip_sigma: f64,
    /// Std-dev of the per-measurement period perturbation, as a fraction.
    pub meas_noise_sigma: f64,
    /// Mean temperature coefficient of the period, per degree C.
    pub temp_coeff_mean: f64,
    /// Std-dev of the per-instance temperature coefficient, per degree C.
    pub temp_coeff_sigma: f64,
    /// Voltage coefficient of the period, per volt.
    pub volt_coeff: f64,
    /// High fraction of each cycle's duty, in (0, 1).
    pub duty: f64,
}

impl Default for ROModelSpec {
    fn default() -> Self {
        ROModelSpec {
            nominal_period: 1e-9,
            stage_count: 3,
            inter_chip_sigma: 0.05,
            meas_noise_sigma: 1e-4,
            temp_coeff_mean: 2e-3,
            temp_coeff_sigma: 1e-4,
            volt_coeff: 0.05,
            duty: 0.5,
        }
    }
}

impl ROModelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.nominal_period > 0.0 && self.nominal_period.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "nominal_period must be positive, got {}",
                self.nominal_period
            )));
        }
        if self.stage_count < 3 || self.stage_count % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "stage_count must be odd and >= 3, got {}",
                self.stage_count
            )));
        }
        for (name, v) in [
            ("inter_chip_sigma", self.inter_chip_sigma),
            ("meas_noise_sigma", self.meas_noise_sigma),
            ("temp_coeff_sigma", self.temp_coeff_sigma),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if !(self.temp_coeff_mean.is_finite() && self.volt_coeff.is_finite()) {
            return Err(Error::InvalidParameter(
                "temp_coeff_mean and volt_coeff must be finite".into(),
            ));
        }
        if !(self.duty > 0.0 && self.duty < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "duty must be in (0, 1), got {}",
                self.duty
            )));
        }
        Ok(())
    }
}

/// One ring oscillator's drawn physical parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ROInstance {
    /// Period at the reference environment, in seconds.
    pub ref_period: f64,
    /// Temperature coefficient of the period, per degree C.
    pub temp_coeff: f64,
    /// Voltage coefficient of the period, per volt.
    pub volt_coeff: f64,
}

/// Operating conditions plus the reference they are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Environment {
    /// Degrees C.
    pub temperature: f64,
    /// Volts.
    pub voltage: f64,
    /// Degrees C; drawn periods are defined at this temperature.
    pub ref_temperature: f64,
    /// Volts; drawn periods are defined at this voltage.
    pub ref_voltage: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            temperature: 20.0,
            voltage: 1.2,
            ref_temperature: 20.0,
            ref_voltage: 1.2,
        }
    }
}

impl Environment {
    /// Same reference point, different operating temperature.
    pub fn at_temperature(&self, temperature: f64) -> Environment {
        Environment { temperature, ..*self }
    }
}

/// Draw one RO instance from the model. Degenerate period factors
/// (1 + g <= 0.1) are rejected and redrawn.
pub fn draw_instance<R: Rng>(spec: &ROModelSpec, rng: &mut R) -> ROInstance {
    let scale = spec.stage_count as f64 / REFERENCE_STAGE_COUNT as f64;
    let mut g = draw_normal(rng, 0.0, spec.inter_chip_sigma);
    while 1.0 + g <= 0.1 {
        g = draw_normal(rng, 0.0, spec.inter_chip_sigma);
    }
    ROInstance {
        ref_period: spec.nominal_period * scale * (1.0 + g),
        temp_coeff: draw_normal(rng, spec.temp_coeff_mean, spec.temp_coeff_sigma),
        volt_coeff: spec.volt_coeff,
    }
}

/// Period of `inst` under `env` and a per-measurement perturbation
/// `noise` (a fraction). The period rises linearly with temperature and
/// falls with supply voltage.
pub fn effective_period(inst: &ROInstance, env: &Environment, noise: f64) -> Result<f64> {
    let m_env = 1.0 + inst.temp_coeff * (env.temperature - env.ref_temperature)
        - inst.volt_coeff * (env.voltage - env.ref_voltage);
    let m = m_env * (1.0 + noise);
    if !(m > 0.0) {
        return Err(Error::EnvironmentOutOfRange { multiplier: m });
    }
    Ok(inst.ref_period * m_env * (1.0 + noise))
}

/// Value of a square wave of the given period and duty at time `t >= 0`.
///
/// The wave starts low: within each cycle the value is 0 while the
/// phase is in [0, duty] and 1 in (duty, 1), so the first rising edge
/// is at `duty * period` and an instant landing exactly on an edge
/// reads the pre-transition value, the way a flip-flop samples its D
/// input at the clock edge. Instants within the snap tolerance of an
/// edge are treated as exactly on it.
pub fn wave_value(period: f64, duty: f64, t: f64) -> u8 {
    debug_assert!(period > 0.0 && t >= 0.0);
    let cycles = t / period;
    let mut phase = cycles.fract();
    let tol = (TIME_EPS / period).max(cycles * 8.0 * f64::EPSILON);
    if phase <= tol || phase >= 1.0 - tol {
        phase = 0.0;
    } else if (phase - duty).abs() <= tol {
        phase = duty;
    }
    if phase <= duty {
        0
    } else {
        1
    }
}
