//! Python bindings for the wRO-PUF simulator.
//!
//! Bitstrings cross the boundary as '0'/'1' strings, reports as plain
//! dicts. The heavy lifting stays in the core crate.

use std::collections::BTreeMap;
use std::str::FromStr;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wropuf::population::GoldenRule;
use wropuf::scenario::{run_scenario, simulate, SimulationOutput};
use wropuf::thermo::temp_sweep;
use wropuf::{
    Bits, ChipSpec, DeviceId, Environment, MetricsReport, PufUnitSpec, ROModelSpec, Scenario,
    ThermometerSpec,
};

fn err(e: wropuf::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_bits(s: &str) -> PyResult<Bits> {
    Bits::from_str(s).map_err(err)
}

fn parse_id(s: &str) -> PyResult<DeviceId> {
    Ok(DeviceId::from_responses(vec![parse_bits(s)?]))
}

/// Ideal noiseless beat pattern for RO periods t1, t2.
#[pyfunction]
#[pyo3(signature = (t1, t2, n, duty = 0.5))]
fn ideal_beat(t1: f64, t2: f64, n: usize, duty: f64) -> String {
    wropuf::ideal_beat(t1, t2, duty, n).to_string()
}

/// Number of differing bits between two equal-length bitstrings.
#[pyfunction]
fn hamming_distance(a: &str, b: &str) -> PyResult<usize> {
    wropuf::hamming_distance(&parse_bits(a)?, &parse_bits(b)?).map_err(err)
}

/// Percentage of 1-bits.
#[pyfunction]
fn uniformity(bits: &str) -> PyResult<f64> {
    wropuf::uniformity(&parse_bits(bits)?).map_err(err)
}

/// Average normalized pairwise HD between device IDs, as a percentage.
#[pyfunction]
fn uniqueness(ids: Vec<String>) -> PyResult<f64> {
    let ids = ids.iter().map(|s| parse_id(s)).collect::<PyResult<Vec<_>>>()?;
    wropuf::uniqueness(&ids).map_err(err)
}

/// 100% minus the average normalized HD between golden and samples.
#[pyfunction]
fn reliability(golden: &str, samples: Vec<String>) -> PyResult<f64> {
    let golden = parse_id(golden)?;
    let samples = samples.iter().map(|s| parse_id(s)).collect::<PyResult<Vec<_>>>()?;
    wropuf::reliability(&golden, &samples).map_err(err)
}

/// Diffusiveness of K per-pair responses from one chip.
#[pyfunction]
fn diffusiveness(rows: Vec<String>) -> PyResult<f64> {
    let rows = rows.iter().map(|s| parse_bits(s)).collect::<PyResult<Vec<_>>>()?;
    let matrix = wropuf::BitMatrix::new(rows).map_err(err)?;
    wropuf::diffusiveness(&matrix).map_err(err)
}

fn hist_to_dict<'py>(py: Python<'py>, hist: &BTreeMap<usize, u64>) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (k, v) in hist {
        d.set_item(k, v)?;
    }
    Ok(d)
}

fn report_to_dict<'py>(py: Python<'py>, report: &MetricsReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("num_chips", report.num_chips)?;
    d.set_item("num_pairs", report.num_pairs)?;
    d.set_item("bits_per_pair", report.bits_per_pair)?;
    d.set_item("num_samples", report.num_samples)?;
    d.set_item("id_length", report.id_length())?;
    d.set_item("uniformity", report.avg_uniformity())?;
    d.set_item("reliability", report.avg_reliability())?;
    d.set_item("uniqueness", report.uniqueness)?;
    d.set_item("diffusiveness", report.avg_diffusiveness())?;
    d.set_item("uniformity_per_chip", report.uniformity_per_chip.clone())?;
    d.set_item("reliability_per_chip", report.reliability_per_chip.clone())?;
    d.set_item("diffusiveness_per_chip", report.diffusiveness_per_chip.clone())?;
    d.set_item("intra_hd_hist", hist_to_dict(py, &report.intra_hd_hist)?)?;
    d.set_item("inter_hd_hist", hist_to_dict(py, &report.inter_hd_hist)?)?;
    Ok(d)
}

/// One simulated population plus its measurement campaign.
#[pyclass]
struct Simulation {
    scenario: Scenario,
    output: SimulationOutput,
}

#[pymethods]
impl Simulation {
    /// Simulate `num_chips` devices of K RO pairs, sampling each device
    /// `num_samples` times. All noise parameters have the calibrated
    /// defaults; pass 0.0 to disable a noise source.
    #[new]
    #[pyo3(signature = (
        num_chips, num_pairs, bits_per_pair, num_samples, seed,
        inter_chip_sigma = 0.05,
        meas_noise_sigma = 1e-4,
        ff_skew_sigma = 2e-11,
        metastability_window = 1e-12,
        golden_rule = "mode",
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        num_chips: usize,
        num_pairs: usize,
        bits_per_pair: usize,
        num_samples: usize,
        seed: u64,
        inter_chip_sigma: f64,
        meas_noise_sigma: f64,
        ff_skew_sigma: f64,
        metastability_window: f64,
        golden_rule: &str,
    ) -> PyResult<Self> {
        let golden_rule = match golden_rule {
            "mode" => GoldenRule::ModalPattern,
            "bitwise-majority" => GoldenRule::BitwiseMajority,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown golden rule {other:?}, expected \"mode\" or \"bitwise-majority\""
                )))
            }
        };
        let scenario = Scenario {
            name: "python".into(),
            num_chips,
            num_samples,
            seed,
            chip_spec: ChipSpec {
                num_pairs,
                unit_spec: PufUnitSpec {
                    bits_per_pair,
                    ff_skew_sigma,
                    metastability_window,
                },
                ro_model: ROModelSpec {
                    inter_chip_sigma,
                    meas_noise_sigma,
                    ..ROModelSpec::default()
                },
                thermo_spec: ThermometerSpec {
                    window_cycles: 2048,
                    ..ThermometerSpec::default()
                },
            },
            environment: Environment::default(),
            sweep: None,
            golden_rule,
        };
        let output = simulate(&scenario).map_err(err)?;
        Ok(Simulation { scenario, output })
    }

    /// Golden ID bitstrings, one per chip.
    fn golden_ids(&self) -> Vec<String> {
        self.output.goldens.iter().map(|g| g.bits().to_string()).collect()
    }

    /// Golden IDs as MSB-first hex.
    fn golden_hex(&self) -> Vec<String> {
        self.output.goldens.iter().map(DeviceId::to_hex).collect()
    }

    /// The full metric report as a dict.
    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        report_to_dict(py, &self.output.report)
    }

    /// The measurement campaign in the response-corpus text format.
    fn corpus(&self) -> PyResult<String> {
        wropuf::corpus::write_corpus(&self.output.samples_per_chip).map_err(err)
    }

    /// Sweep one chip over the given temperatures. Returns rows of
    /// (temperature, avg_hd_from_reference, thermometer_count).
    fn temp_sweep(&self, chip: usize, temperatures: Vec<f64>) -> PyResult<Vec<(f64, f64, u64)>> {
        let chips = wropuf::generate_population(
            self.scenario.num_chips,
            &self.scenario.chip_spec,
            self.scenario.seed,
        )
        .map_err(err)?;
        let chip = chips
            .get(chip)
            .ok_or_else(|| PyValueError::new_err(format!("chip {chip} out of range")))?;
        let rows = temp_sweep(chip, &temperatures, &self.scenario.plan(), None).map_err(err)?;
        Ok(rows.into_iter().map(|r| (r.temperature, r.avg_hd, r.count)).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Simulation(num_chips={}, num_pairs={}, bits_per_pair={}, num_samples={}, seed={})",
            self.scenario.num_chips,
            self.scenario.chip_spec.num_pairs,
            self.scenario.chip_spec.unit_spec.bits_per_pair,
            self.scenario.num_samples,
            self.scenario.seed,
        )
    }
}

/// Run a scenario config end to end, writing artifacts into `out_dir`.
/// Returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (config_path, out_dir, seed = None))]
fn run_scenario_file<'py>(
    py: Python<'py>,
    config_path: &str,
    out_dir: &str,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut scenario = Scenario::from_path(config_path.as_ref()).map_err(err)?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    let (output, _) = run_scenario(&scenario, out_dir.as_ref(), Default::default()).map_err(err)?;
    report_to_dict(py, &output.report)
}

/// Compute metrics from a response corpus file.
#[pyfunction]
fn ingest_corpus<'py>(py: Python<'py>, path: &str) -> PyResult<Bound<'py, PyDict>> {
    let (report, warnings) = wropuf::scenario::ingest_corpus(path.as_ref()).map_err(err)?;
    let d = report_to_dict(py, &report)?;
    d.set_item("warnings", warnings)?;
    Ok(d)
}

#[pymodule]
fn wropuf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Simulation>()?;
    m.add_function(wrap_pyfunction!(ideal_beat, m)?)?;
    m.add_function(wrap_pyfunction!(hamming_distance, m)?)?;
    m.add_function(wrap_pyfunction!(uniformity, m)?)?;
    m.add_function(wrap_pyfunction!(uniqueness, m)?)?;
    m.add_function(wrap_pyfunction!(reliability, m)?)?;
    m.add_function(wrap_pyfunction!(diffusiveness, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario_file, m)?)?;
    m.add_function(wrap_pyfunction!(ingest_corpus, m)?)?;
    Ok(())
}
