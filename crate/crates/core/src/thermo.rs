//! The RO3 thermometer counter and temperature collation: count RO3
//! rising edges in a fixed system-clock window, pair environment
//! readings with enrolled IDs, and verify observations against the
//! enrollment table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::hamming_distance;
use crate::population::{golden_id, measure_device, Chip, DeviceId, MeasurementPlan};
use crate::ro::{effective_period, Environment, ROInstance};

/// Default accept threshold as a fraction of the ID length, chosen so
/// worst-case in-band temperature drift stays below inter-chip HD
/// peaks.
pub const DEFAULT_HD_THRESHOLD_FRACTION: f64 = 0.15;

/// Counter configuration for the RO3 thermometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermometerSpec {
    /// Counter width in bits; the count saturates at 2^bits - 1.
    pub counter_bits: u32,
    /// Length of the counting window in system-clock cycles.
    pub window_cycles: u64,
    /// System clock frequency, Hz.
    pub sysclk_hz: f64,
}

impl Default for ThermometerSpec {
    fn default() -> Self {
        ThermometerSpec {
            counter_bits: 16,
            window_cycles: 1 << 16,
            sysclk_hz: 50e6,
        }
    }
}

impl ThermometerSpec {
    pub fn validate(&self) -> Result<()> {
        if self.counter_bits == 0 || self.counter_bits > 63 {
            return Err(Error::InvalidParameter(format!(
                "counter_bits must be in 1..=63, got {}",
                self.counter_bits
            )));
        }
        if self.window_cycles == 0 {
            return Err(Error::InvalidParameter("window_cycles must be >= 1".into()));
        }
        if !(self.sysclk_hz > 0.0 && self.sysclk_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sysclk_hz must be positive, got {}",
                self.sysclk_hz
            )));
        }
        Ok(())
    }

    /// Counting window length, seconds.
    pub fn window_seconds(&self) -> f64 {
        self.window_cycles as f64 / self.sysclk_hz
    }

    /// Saturation value 2^counter_bits - 1.
    pub fn max_count(&self) -> u64 {
        (1u64 << self.counter_bits) - 1
    }
}

/// One enrolled (temperature, thermometer count, golden ID) triple.
#[derive(Debug, Clone, PartialEq)]
pub struct EnrollmentRecord {
    pub temperature: f64,
    pub count: u64,
    pub golden: DeviceId,
}

/// One row of a temperature sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub temperature: f64,
    /// Mean HD between the samples at this temperature and the
    /// reference-temperature golden ID.
    pub avg_hd: f64,
    /// HD between this temperature's golden and the reference golden.
    pub golden_hd: usize,
    /// Thermometer reading at this temperature (noiseless).
    pub count: u64,
}

/// RO3 rising edges counted during the clock window, saturating at the
/// counter width.
pub fn thermometer_count(
    ro3: &ROInstance,
    spec: &ThermometerSpec,
    env: &Environment,
    noise: f64,
) -> Result<u64> {
    spec.validate()?;
    let period = effective_period(ro3, env, noise)?;
    let raw = (spec.window_seconds() / period).floor();
    let cap = spec.max_count();
    Ok(if raw >= cap as f64 { cap } else { raw as u64 })
}

/// Measure the chip at every temperature and compare against the
/// reference-temperature golden. When `reference` is None the golden is
/// measured at `plan.environment.ref_temperature`, which must then be
/// one of the sweep temperatures.
pub fn temp_sweep(
    chip: &Chip,
    temps: &[f64],
    plan: &MeasurementPlan,
    reference: Option<&DeviceId>,
) -> Result<Vec<SweepRow>> {
    if temps.is_empty() {
        return Err(Error::EmptyInput("temperature sweep needs temperatures"));
    }
    plan.validate()?;
    let ref_t = plan.environment.ref_temperature;
    let reference = match reference {
        Some(g) => g.clone(),
        None => {
            if !temps.iter().any(|&t| (t - ref_t).abs() < 1e-9) {
                return Err(Error::InvalidParameter(format!(
                    "sweep must include the reference temperature {ref_t} C or supply a golden ID"
                )));
            }
            golden_at(chip, plan, ref_t)?
        }
    };

    let mut rows = Vec::with_capacity(temps.len());
    for &t in temps {
        let env = plan.environment.at_temperature(t);
        let samples = measure_device(chip, &MeasurementPlan { environment: env, ..*plan })?;
        let golden = golden_id(&samples)?;
        let mut total = 0usize;
        for s in &samples {
            total += hamming_distance(reference.bits(), s.bits())?;
        }
        rows.push(SweepRow {
            temperature: t,
            avg_hd: total as f64 / samples.len() as f64,
            golden_hd: hamming_distance(reference.bits(), golden.bits())?,
            count: thermometer_count(&chip.thermometer, &chip.thermo_spec, &env, 0.0)?,
        });
    }
    Ok(rows)
}

fn golden_at(chip: &Chip, plan: &MeasurementPlan, temperature: f64) -> Result<DeviceId> {
    let env = plan.environment.at_temperature(temperature);
    let samples = measure_device(chip, &MeasurementPlan { environment: env, ..*plan })?;
    golden_id(&samples)
}

/// Enroll the chip: one (temperature, count, golden) record per listed
/// temperature.
pub fn enroll(chip: &Chip, temps: &[f64], plan: &MeasurementPlan) -> Result<Vec<EnrollmentRecord>> {
    if temps.is_empty() {
        return Err(Error::EmptyInput("enrollment needs temperatures"));
    }
    plan.validate()?;
    temps
        .iter()
        .map(|&t| {
            let env = plan.environment.at_temperature(t);
            Ok(EnrollmentRecord {
                temperature: t,
                count: thermometer_count(&chip.thermometer, &chip.thermo_spec, &env, 0.0)?,
                golden: golden_at(chip, plan, t)?,
            })
        })
        .collect()
}

/// Verification outcome: the selected record and whether the observed
/// ID was within the HD threshold of its golden.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome<'a> {
    pub accepted: bool,
    pub record: &'a EnrollmentRecord,
    pub hd: usize,
}

/// Collate the observed thermometer count against the enrollment table
/// and accept iff the observed ID is within `hd_threshold` of the
/// selected golden. The record with the nearest count wins; ties go to
/// the lower temperature.
pub fn verify<'a>(
    observed_count: u64,
    observed_id: &DeviceId,
    records: &'a [EnrollmentRecord],
    hd_threshold: usize,
) -> Result<VerifyOutcome<'a>> {
    if records.is_empty() {
        return Err(Error::EmptyInput("verification needs enrollment records"));
    }
    let record = records
        .iter()
        .min_by(|a, b| {
            let da = a.count.abs_diff(observed_count);
            let db = b.count.abs_diff(observed_count);
            da.cmp(&db)
                .then(a.temperature.total_cmp(&b.temperature))
                .then(a.count.cmp(&b.count))
                .then(a.golden.cmp(&b.golden))
        })
        .expect("records is non-empty");
    let hd = hamming_distance(observed_id.bits(), record.golden.bits())?;
    Ok(VerifyOutcome {
        accepted: hd <= hd_threshold,
        record,
        hd,
    })
}

/// Default verification threshold for an ID of length `id_len`.
pub fn default_hd_threshold(id_len: usize) -> usize {
    (DEFAULT_HD_THRESHOLD_FRACTION * id_len as f64).floor() as usize
}

/// Coefficient of determination of the least-squares line through
/// (xs, ys). Returns 1.0 for degenerate all-equal ys.
pub fn linear_r2(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if syy == 0.0 {
        return 1.0;
    }
    if sxx == 0.0 {
        return 0.0;
    }
    (sxy * sxy) / (sxx * syy)
}
