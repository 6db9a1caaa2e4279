//! Virtual chip populations and measurement campaigns: generate chips
//! with independently drawn process variation, repeat EN cycles to
//! collect T device IDs per chip, and extract golden IDs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::rng::{substream, DOMAIN_MEASUREMENT, DOMAIN_POPULATION};
use crate::ro::{draw_instance, Environment, ROInstance, ROModelSpec};
use crate::sampler::{sample_response, PufUnit, PufUnitSpec, Response};
use crate::thermo::ThermometerSpec;

/// Everything needed to instantiate one chip design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChipSpec {
    /// Number of RO pairs (the paper's K).
    pub num_pairs: usize,
    pub unit_spec: PufUnitSpec,
    pub ro_model: ROModelSpec,
    pub thermo_spec: ThermometerSpec,
}

impl ChipSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_pairs == 0 {
            return Err(Error::InvalidParameter("num_pairs must be >= 1".into()));
        }
        self.unit_spec.validate()?;
        self.ro_model.validate()?;
        self.thermo_spec.validate()
    }

    /// Total ID length L = K * l_RO.
    pub fn id_length(&self) -> usize {
        self.num_pairs * self.unit_spec.bits_per_pair
    }
}

/// One virtual chip: K RO pairs plus a thermometer RO.
#[derive(Debug, Clone, PartialEq)]
pub struct Chip {
    pub chip_index: usize,
    pub units: Vec<PufUnit>,
    pub thermometer: ROInstance,
    pub thermo_spec: ThermometerSpec,
}

/// A device ID: the concatenation of K per-pair responses. The bits
/// field always equals the concatenation; construction enforces it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeviceId {
    bits: Bits,
    per_pair: Vec<Response>,
}

impl DeviceId {
    pub fn from_responses(per_pair: Vec<Response>) -> DeviceId {
        let bits = Bits::concat(per_pair.iter());
        DeviceId { bits, per_pair }
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn per_pair(&self) -> &[Response] {
        &self.per_pair
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Hex encoding of the full ID, pair 1 first, MSB first.
    pub fn to_hex(&self) -> String {
        self.bits.to_hex()
    }
}

/// One measurement campaign: T repeated EN cycles under a fixed
/// environment, with all randomness derived from `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementPlan {
    /// Number of repeated measurements (the paper's T).
    pub num_samples: usize,
    pub environment: Environment,
    pub seed: u64,
}

impl MeasurementPlan {
    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 {
            return Err(Error::InvalidParameter("num_samples must be >= 1".into()));
        }
        Ok(())
    }
}

/// How the golden (enrolled) ID is derived from T samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoldenRule {
    /// The full pattern that appears most frequently; ties broken by
    /// the lexicographically smallest pattern.
    #[default]
    ModalPattern,
    /// Per-position majority vote; exact ties resolve to 0.
    BitwiseMajority,
}

/// Generate `num_chips` chips with independently drawn RO instances and
/// FF skews. Each chip draws from its own substream, so the population
/// is deterministic per seed and chips can be generated in any order.
pub fn generate_population(num_chips: usize, spec: &ChipSpec, seed: u64) -> Result<Vec<Chip>> {
    if num_chips == 0 {
        return Err(Error::InvalidParameter("num_chips must be >= 1".into()));
    }
    spec.validate()?;
    Ok((0..num_chips).map(|n| build_chip(n, spec, seed)).collect())
}

fn build_chip(chip_index: usize, spec: &ChipSpec, seed: u64) -> Chip {
    let mut rng = substream(seed, &[DOMAIN_POPULATION, chip_index as u64]);
    let units = (0..spec.num_pairs)
        .map(|_| PufUnit::draw(&spec.unit_spec, &spec.ro_model, &mut rng))
        .collect();
    let thermometer = draw_instance(&spec.ro_model, &mut rng);
    Chip {
        chip_index,
        units,
        thermometer,
        thermo_spec: spec.thermo_spec,
    }
}

/// One EN cycle across all K pairs of a chip: sample each pair once and
/// concatenate. Reproducible in isolation from (plan.seed, chip index,
/// sample index).
pub fn measure_device_once(chip: &Chip, plan: &MeasurementPlan, sample_index: usize) -> Result<DeviceId> {
    measure_once_in(chip, plan.environment, plan.seed, sample_index)
}

fn measure_once_in(
    chip: &Chip,
    environment: Environment,
    seed: u64,
    sample_index: usize,
) -> Result<DeviceId> {
    let mut rng = substream(
        seed,
        &[DOMAIN_MEASUREMENT, chip.chip_index as u64, sample_index as u64],
    );
    let per_pair = chip
        .units
        .iter()
        .map(|unit| sample_response(unit, environment, &mut rng))
        .collect::<Result<Vec<Response>>>()?;
    Ok(DeviceId::from_responses(per_pair))
}

/// Run the full campaign: T device IDs, one per EN cycle.
pub fn measure_device(chip: &Chip, plan: &MeasurementPlan) -> Result<Vec<DeviceId>> {
    plan.validate()?;
    (0..plan.num_samples)
        .map(|t| measure_device_once(chip, plan, t))
        .collect()
}

/// The golden ID under the default modal-pattern rule.
pub fn golden_id(samples: &[DeviceId]) -> Result<DeviceId> {
    golden_id_with(samples, GoldenRule::ModalPattern)
}

/// The golden ID under an explicit rule.
pub fn golden_id_with(samples: &[DeviceId], rule: GoldenRule) -> Result<DeviceId> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("golden_id needs at least one sample"));
    }
    match rule {
        GoldenRule::ModalPattern => Ok(modal_pattern(samples).clone()),
        GoldenRule::BitwiseMajority => Ok(bitwise_majority(samples)),
    }
}

fn modal_pattern(samples: &[DeviceId]) -> &DeviceId {
    let mut counts: HashMap<&DeviceId, usize> = HashMap::new();
    for id in samples {
        *counts.entry(id).or_insert(0) += 1;
    }
    let mut best: Option<(&DeviceId, usize)> = None;
    for (id, count) in counts {
        best = match best {
            None => Some((id, count)),
            Some((bid, bc)) if count > bc || (count == bc && id < bid) => Some((id, count)),
            keep => keep,
        };
    }
    best.expect("samples is non-empty").0
}

fn bitwise_majority(samples: &[DeviceId]) -> DeviceId {
    let lens: Vec<usize> = samples[0].per_pair().iter().map(Bits::len).collect();
    let total = samples.len();
    let per_pair = lens
        .iter()
        .enumerate()
        .map(|(i, &len)| {
            (0..len)
                .map(|l| {
                    let ones = samples.iter().filter(|s| s.per_pair()[i].get(l)).count();
                    2 * ones > total
                })
                .collect::<Response>()
        })
        .collect();
    DeviceId::from_responses(per_pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{hamming_distance, reliability};

    fn small_spec() -> ChipSpec {
        ChipSpec {
            num_pairs: 3,
            unit_spec: PufUnitSpec {
                bits_per_pair: 8,
                ..PufUnitSpec::default()
            },
            ro_model: ROModelSpec::default(),
            thermo_spec: ThermometerSpec::default(),
        }
    }

    fn noiseless_spec() -> ChipSpec {
        let mut spec = small_spec();
        spec.ro_model.meas_noise_sigma = 0.0;
        spec.unit_spec.metastability_window = 0.0;
        spec
    }

    fn id(parts: &[&str]) -> DeviceId {
        DeviceId::from_responses(parts.iter().map(|s| s.parse().unwrap()).collect())
    }

    #[test]
    fn id_length_is_k_times_l() {
        let chips = generate_population(2, &small_spec(), 1).unwrap();
        let plan = MeasurementPlan {
            num_samples: 1,
            environment: Environment::default(),
            seed: 9,
        };
        let ids = measure_device(&chips[0], &plan).unwrap();
        assert_eq!(ids[0].len(), 24);
        assert_eq!(ids[0].per_pair().len(), 3);
        assert_eq!(
            ids[0].bits().to_string(),
            ids[0].per_pair().iter().map(|r| r.to_string()).collect::<String>()
        );
    }

    #[test]
    fn population_is_deterministic_per_seed() {
        let spec = small_spec();
        let a = generate_population(4, &spec, 42).unwrap();
        let b = generate_population(4, &spec, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let spec = small_spec();
        let mut distinct = 0;
        for s in 0..100u64 {
            let a = generate_population(1, &spec, 2 * s).unwrap();
            let b = generate_population(1, &spec, 2 * s + 1).unwrap();
            if a[0].units[0].ro1.ref_period != b[0].units[0].ro1.ref_period {
                distinct += 1;
            }
        }
        assert_eq!(distinct, 100);
    }

    #[test]
    fn noiseless_campaign_is_constant() {
        let spec = noiseless_spec();
        let chip = &generate_population(1, &spec, 5).unwrap()[0];
        let plan = MeasurementPlan {
            num_samples: 50,
            environment: Environment::default(),
            seed: 123,
        };
        let ids = measure_device(chip, &plan).unwrap();
        assert!(ids.iter().all(|i| i == &ids[0]));
        let golden = golden_id(&ids).unwrap();
        assert_eq!(reliability(&golden, &ids).unwrap(), 100.0);
    }

    #[test]
    fn default_noise_flips_something() {
        // calibrated-scale chip: K = 12 pairs of 32 bits
        let spec = ChipSpec {
            num_pairs: 12,
            unit_spec: PufUnitSpec::default(),
            ro_model: ROModelSpec::default(),
            thermo_spec: ThermometerSpec::default(),
        };
        let chip = &generate_population(1, &spec, 5).unwrap()[0];
        let plan = MeasurementPlan {
            num_samples: 1000,
            environment: Environment::default(),
            seed: 123,
        };
        let ids = measure_device(chip, &plan).unwrap();
        let golden = golden_id(&ids).unwrap();
        let flips: usize = ids
            .iter()
            .map(|i| hamming_distance(golden.bits(), i.bits()).unwrap())
            .sum();
        assert!(flips > 0);
    }

    #[test]
    fn measurements_reproducible_in_isolation() {
        let spec = small_spec();
        let chip = &generate_population(1, &spec, 5).unwrap()[0];
        let plan = MeasurementPlan {
            num_samples: 10,
            environment: Environment::default(),
            seed: 77,
        };
        let all = measure_device(chip, &plan).unwrap();
        let sixth = measure_device_once(chip, &plan, 6).unwrap();
        assert_eq!(all[6], sixth);
    }

    #[test]
    fn golden_is_clear_mode() {
        let a = id(&["0101"]);
        let b = id(&["1111"]);
        let samples = vec![a.clone(), a.clone(), b];
        assert_eq!(golden_id(&samples).unwrap(), a);
    }

    #[test]
    fn golden_tie_breaks_lexicographically() {
        let a = id(&["0011"]);
        let b = id(&["0100"]);
        assert_eq!(golden_id(&[b.clone(), a.clone()]).unwrap(), a);
        assert_eq!(golden_id(&[a.clone(), b]).unwrap(), a);
    }

    #[test]
    fn golden_is_permutation_invariant_and_a_sample() {
        let ids: Vec<DeviceId> = ["0110", "0110", "1001", "0011", "0011"]
            .iter()
            .map(|s| id(&[s]))
            .collect();
        let g = golden_id(&ids).unwrap();
        assert!(ids.contains(&g));
        let mut rev = ids.clone();
        rev.reverse();
        assert_eq!(golden_id(&rev).unwrap(), g);
    }

    #[test]
    fn golden_empty_errors() {
        assert!(matches!(golden_id(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn bitwise_majority_votes_per_position() {
        let samples = vec![id(&["1100"]), id(&["1010"]), id(&["1001"])];
        let g = golden_id_with(&samples, GoldenRule::BitwiseMajority).unwrap();
        assert_eq!(g.bits().to_string(), "1000");
    }
}
