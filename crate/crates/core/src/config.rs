//! Scenario configuration: a TOML file with one section per model
//! component. Only `name` and the `[population]` section are required;
//! every other section falls back to the shipped defaults. The exact
//! grammar is documented in the repository README.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::population::{ChipSpec, GoldenRule, MeasurementPlan};
use crate::ro::{Environment, ROModelSpec};
use crate::sampler::PufUnitSpec;
use crate::thermo::ThermometerSpec;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    population: PopulationSection,
    #[serde(default)]
    ro: ROModelSpec,
    #[serde(default)]
    sampling: PufUnitSpec,
    #[serde(default)]
    thermometer: ThermometerSpec,
    #[serde(default)]
    environment: Environment,
    #[serde(default)]
    sweep: Option<SweepSection>,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PopulationSection {
    num_chips: usize,
    num_pairs: usize,
    bits_per_pair: usize,
    num_samples: usize,
    /// Mandatory: every scenario pins its seed for reproducibility.
    seed: u64,
}

/// Temperature-sweep settings for `sweep` scenarios.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub temperatures: Vec<f64>,
    /// Accept threshold for verification examples; defaults to 15% of
    /// the ID length.
    #[serde(default)]
    pub hd_threshold: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    #[serde(default)]
    golden_rule: GoldenRule,
}

/// A fully resolved scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub num_chips: usize,
    pub num_samples: usize,
    pub seed: u64,
    pub chip_spec: ChipSpec,
    pub environment: Environment,
    pub sweep: Option<SweepSection>,
    pub golden_rule: GoldenRule,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut sampling = file.sampling;
        sampling.bits_per_pair = file.population.bits_per_pair;
        Ok(Scenario {
            name: file.name,
            num_chips: file.population.num_chips,
            num_samples: file.population.num_samples,
            seed: file.population.seed,
            chip_spec: ChipSpec {
                num_pairs: file.population.num_pairs,
                unit_spec: sampling,
                ro_model: file.ro,
                thermo_spec: file.thermometer,
            },
            environment: file.environment,
            sweep: file.sweep,
            golden_rule: file.output.golden_rule,
        })
    }

    pub fn from_path(path: &Path) -> Result<Scenario> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Scenario::from_toml(&text)
    }

    /// Check every model invariant. Violations map to exit status 3,
    /// unlike parse errors which map to 2.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::InvalidParameter("scenario name must not be empty".into()));
        }
        if self.num_chips == 0 {
            return Err(Error::InvalidParameter("num_chips must be >= 1".into()));
        }
        if self.num_samples == 0 {
            return Err(Error::InvalidParameter("num_samples must be >= 1".into()));
        }
        self.chip_spec.validate()?;
        if let Some(sweep) = &self.sweep {
            if sweep.temperatures.is_empty() {
                return Err(Error::InvalidParameter(
                    "sweep.temperatures must not be empty".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn plan(&self) -> MeasurementPlan {
        MeasurementPlan {
            num_samples: self.num_samples,
            environment: self.environment,
            seed: self.seed,
        }
    }

    /// Total ID length L = K * l_RO.
    pub fn id_length(&self) -> usize {
        self.chip_spec.id_length()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "tiny"

[population]
num_chips = 2
num_pairs = 3
bits_per_pair = 8
num_samples = 4
seed = 99
"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let s = Scenario::from_toml(MINIMAL).unwrap();
        s.validate().unwrap();
        assert_eq!(s.name, "tiny");
        assert_eq!(s.chip_spec.num_pairs, 3);
        assert_eq!(s.chip_spec.unit_spec.bits_per_pair, 8);
        assert_eq!(s.chip_spec.ro_model, ROModelSpec::default());
        assert_eq!(s.environment, Environment::default());
        assert_eq!(s.golden_rule, GoldenRule::ModalPattern);
        assert_eq!(s.id_length(), 24);
        assert!(s.sweep.is_none());
    }

    #[test]
    fn sections_override_defaults() {
        let text = format!(
            "{MINIMAL}
[ro]
inter_chip_sigma = 0.02
duty = 0.4

[sweep]
temperatures = [20.0, 40.0]

[output]
golden_rule = \"bitwise-majority\"
"
        );
        let s = Scenario::from_toml(&text).unwrap();
        assert_eq!(s.chip_spec.ro_model.inter_chip_sigma, 0.02);
        assert_eq!(s.chip_spec.ro_model.duty, 0.4);
        assert_eq!(s.golden_rule, GoldenRule::BitwiseMajority);
        assert_eq!(s.sweep.unwrap().temperatures, vec![20.0, 40.0]);
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        let text = format!("{MINIMAL}\nnot_a_key = 1\n");
        assert!(matches!(Scenario::from_toml(&text), Err(Error::Config(_))));
        let text = format!("{MINIMAL}\n[ro]\nbogus = 2\n");
        assert!(matches!(Scenario::from_toml(&text), Err(Error::Config(_))));
    }

    #[test]
    fn missing_seed_is_a_parse_error() {
        let text = MINIMAL.replace("seed = 99\n", "");
        assert!(matches!(Scenario::from_toml(&text), Err(Error::Config(_))));
    }

    #[test]
    fn invariant_violations_are_not_parse_errors() {
        let text = format!("{MINIMAL}\n[ro]\nduty = 1.5\n");
        let s = Scenario::from_toml(&text).unwrap();
        assert!(matches!(s.validate(), Err(Error::InvalidParameter(_))));
    }
}
