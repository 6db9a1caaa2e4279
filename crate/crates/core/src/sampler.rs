//! The RO-pair sampling circuit: RO1's waveform captured at RO2's
//! rising edges through a chain of flip-flops with per-stage skew and a
//! metastability window. One run produces one `bits_per_pair`-bit
//! response.

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::rng::draw_normal;
use crate::ro::{draw_instance, effective_period, wave_value, Environment, ROInstance, ROModelSpec};

/// One RO pair's response bits.
pub type Response = Bits;

/// Sampling-chain parameters shared by every RO pair of a design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PufUnitSpec {
    /// Response length per RO pair (the paper's l_RO).
    pub bits_per_pair: usize,
    /// Std-dev of the fixed per-FF sampling-time offset, in seconds.
    pub ff_skew_sigma: f64,
    /// Half-width of the window around an RO1 transition inside which
    /// the captured bit is random, in seconds.
    pub metastability_window: f64,
}

impl Default for PufUnitSpec {
    fn default() -> Self {
        PufUnitSpec {
            bits_per_pair: 32,
            ff_skew_sigma: 2e-11,
            metastability_window: 1e-12,
        }
    }
}

impl PufUnitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.bits_per_pair == 0 {
            return Err(Error::InvalidParameter("bits_per_pair must be >= 1".into()));
        }
        if !(self.ff_skew_sigma >= 0.0 && self.ff_skew_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ff_skew_sigma must be non-negative, got {}",
                self.ff_skew_sigma
            )));
        }
        if !(self.metastability_window >= 0.0 && self.metastability_window.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "metastability_window must be non-negative, got {}",
                self.metastability_window
            )));
        }
        Ok(())
    }
}

/// An RO pair plus its frozen FF-chain skews. The skews are drawn once
/// per chip; they model chip-fixed wiring-delay variance, so they feed
/// inter-chip uniqueness rather than intra-chip noise.
#[derive(Debug, Clone, PartialEq)]
pub struct PufUnit {
    pub ro1: ROInstance,
    pub ro2: ROInstance,
    /// Per-FF sampling-time offsets, one per response bit, in seconds.
    pub ff_skews: Vec<f64>,
    pub spec: PufUnitSpec,
    /// Duty fraction shared by both ROs (from the RO model).
    pub duty: f64,
    /// Per-measurement period noise sigma (from the RO model).
    pub meas_noise_sigma: f64,
}

impl PufUnit {
    pub fn new(
        ro1: ROInstance,
        ro2: ROInstance,
        ff_skews: Vec<f64>,
        spec: PufUnitSpec,
        duty: f64,
        meas_noise_sigma: f64,
    ) -> Result<Self> {
        if ff_skews.len() != spec.bits_per_pair {
            return Err(Error::InvalidParameter(format!(
                "ff_skews has {} entries for bits_per_pair = {}",
                ff_skews.len(),
                spec.bits_per_pair
            )));
        }
        Ok(PufUnit {
            ro1,
            ro2,
            ff_skews,
            spec,
            duty,
            meas_noise_sigma,
        })
    }

    /// Draw a fresh unit: two RO instances and the frozen FF skews.
    pub fn draw<R: Rng>(spec: &PufUnitSpec, ro_model: &ROModelSpec, rng: &mut R) -> PufUnit {
        let ro1 = draw_instance(ro_model, rng);
        let ro2 = draw_instance(ro_model, rng);
        let ff_skews = (0..spec.bits_per_pair)
            .map(|_| draw_normal(rng, 0.0, spec.ff_skew_sigma))
            .collect();
        PufUnit {
            ro1,
            ro2,
            ff_skews,
            spec: *spec,
            duty: ro_model.duty,
            meas_noise_sigma: ro_model.meas_noise_sigma,
        }
    }

    /// A unit with no skew, used by tests and the beat oracle.
    pub fn noiseless(ro1: ROInstance, ro2: ROInstance, bits_per_pair: usize, duty: f64) -> PufUnit {
        PufUnit {
            ro1,
            ro2,
            ff_skews: vec![0.0; bits_per_pair],
            spec: PufUnitSpec {
                bits_per_pair,
                ff_skew_sigma: 0.0,
                metastability_window: 0.0,
            },
            duty,
            meas_noise_sigma: 0.0,
        }
    }
}

/// One EN cycle: the environment plus the per-measurement period
/// perturbations, drawn once when the run starts. Time 0 is the EN 0->1
/// transition and both waveforms restart from value 0 there.
#[derive(Debug, Clone, Copy)]
pub struct SamplingRun {
    pub environment: Environment,
    pub noise1: f64,
    pub noise2: f64,
    p1: f64,
    p2: f64,
}

impl SamplingRun {
    pub fn new(unit: &PufUnit, environment: Environment, noise1: f64, noise2: f64) -> Result<Self> {
        let p1 = effective_period(&unit.ro1, &environment, noise1)?;
        let p2 = effective_period(&unit.ro2, &environment, noise2)?;
        Ok(SamplingRun {
            environment,
            noise1,
            noise2,
            p1,
            p2,
        })
    }

    /// Start a run with fresh noise draws.
    pub fn draw<R: Rng>(unit: &PufUnit, environment: Environment, rng: &mut R) -> Result<Self> {
        let noise1 = draw_normal(rng, 0.0, unit.meas_noise_sigma);
        let noise2 = draw_normal(rng, 0.0, unit.meas_noise_sigma);
        SamplingRun::new(unit, environment, noise1, noise2)
    }

    /// Effective RO1 period for this run, seconds.
    pub fn ro1_period(&self) -> f64 {
        self.p1
    }

    /// Effective RO2 period for this run, seconds.
    pub fn ro2_period(&self) -> f64 {
        self.p2
    }
}

/// Instant at which FF `k` samples RO1: the k-th rising edge of RO2
/// shifted by that FF's skew.
pub fn sampling_instant(unit: &PufUnit, run: &SamplingRun, k: usize) -> f64 {
    (k as f64 + unit.duty) * run.p2 + unit.ff_skews[k]
}

/// Distance from `t` to the nearest RO1 output transition. The start
/// instant t = 0 is not a transition: the output is held low before EN.
fn transition_distance(period: f64, duty: f64, t: f64) -> f64 {
    let cycles = t / period;
    let c = cycles.floor();
    let f = cycles - c;
    let d_rise = (f - duty).abs();
    let d_fall = if c == 0.0 { 1.0 - f } else { f.min(1.0 - f) };
    d_rise.min(d_fall) * period
}

/// Bit captured by FF `k`. Within the metastability window of an RO1
/// transition the captured value is an unbiased coin flip; elsewhere it
/// is the deterministic wave value.
pub fn capture_bit<R: Rng>(unit: &PufUnit, run: &SamplingRun, k: usize, rng: &mut R) -> u8 {
    let s = sampling_instant(unit, run, k);
    let window = unit.spec.metastability_window;
    if window > 0.0 && transition_distance(run.p1, unit.duty, s) < window {
        return u8::from(rng.random_bool(0.5));
    }
    wave_value(run.p1, unit.duty, s)
}

/// One full response: draw the run noise once, then capture every bit.
pub fn sample_response<R: Rng>(unit: &PufUnit, environment: Environment, rng: &mut R) -> Result<Response> {
    let run = SamplingRun::draw(unit, environment, rng)?;
    let mut bits = Bits::with_capacity(unit.spec.bits_per_pair);
    for k in 0..unit.spec.bits_per_pair {
        bits.push(capture_bit(unit, &run, k, rng) == 1);
    }
    Ok(bits)
}

/// Closed-form noiseless reference: bit k is RO1's wave sampled at the
/// k-th rising edge of an ideal RO2. `sample_response` with all noise
/// disabled must match this bit for bit.
pub fn ideal_beat(t1: f64, t2: f64, duty: f64, n: usize) -> Response {
    (0..n)
        .map(|k| wave_value(t1, duty, (k as f64 + duty) * t2) == 1)
        .collect()
}
