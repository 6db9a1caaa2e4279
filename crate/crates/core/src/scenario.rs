//! Scenario execution: run a configured simulation, dump artifacts,
//! ingest measured corpora, and emit the ideal beat-pattern tables.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::Scenario;
use crate::corpus::{read_corpus, write_corpus, ResponseCorpus};
use crate::error::{Error, Result};
use crate::metrics::{
    compute_report, diffusiveness_vs_pairs, hamming_distance, MetricsReport,
};
use crate::population::{generate_population, golden_id_with, measure_device, DeviceId};
use crate::report::{
    render_diffusiveness_csv, render_enrollment_csv, render_histogram_csv, render_report,
    render_sweep_csv, ReportFormat,
};
use crate::sampler::ideal_beat;
use crate::thermo::{enroll, temp_sweep};

/// Results of a simulation run, before or after artifact dumping.
#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub goldens: Vec<DeviceId>,
    pub samples_per_chip: Vec<Vec<DeviceId>>,
    pub report: MetricsReport,
}

/// Simulate the scenario's population and measurement campaign.
pub fn simulate(scenario: &Scenario) -> Result<SimulationOutput> {
    scenario.validate()?;
    let chips = generate_population(scenario.num_chips, &scenario.chip_spec, scenario.seed)?;
    let plan = scenario.plan();
    let mut samples_per_chip = Vec::with_capacity(chips.len());
    let mut goldens = Vec::with_capacity(chips.len());
    for chip in &chips {
        let samples = measure_device(chip, &plan)?;
        goldens.push(golden_id_with(&samples, scenario.golden_rule)?);
        samples_per_chip.push(samples);
    }
    let report = compute_report(&goldens, &samples_per_chip)?;
    Ok(SimulationOutput {
        goldens,
        samples_per_chip,
        report,
    })
}

/// Write a file atomically: content goes to a temp name first, then a
/// rename publishes it.
fn write_atomic(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    let tmp = dir.join(format!(".{name}.tmp"));
    let target = dir.join(name);
    fs::write(&tmp, content)?;
    fs::rename(&tmp, &target)?;
    Ok(target)
}

/// Run a scenario end to end and write every artifact into `out_dir`:
/// the report, both HD histogram CSVs, the diffusiveness-vs-k table,
/// and the full response corpus. Returns the written paths.
pub fn run_scenario(
    scenario: &Scenario,
    out_dir: &Path,
    format: ReportFormat,
) -> Result<(SimulationOutput, Vec<PathBuf>)> {
    let output = simulate(scenario)?;
    fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    files.push(write_atomic(
        out_dir,
        format.file_name(),
        &render_report(&scenario.name, &output.report, format),
    )?);
    files.push(write_atomic(
        out_dir,
        "intra_hd_hist.csv",
        &render_histogram_csv(&output.report.intra_hd_hist),
    )?);
    files.push(write_atomic(
        out_dir,
        "inter_hd_hist.csv",
        &render_histogram_csv(&output.report.inter_hd_hist),
    )?);
    if output.report.num_pairs >= 2 {
        files.push(write_atomic(
            out_dir,
            "diffusiveness_vs_k.csv",
            &render_diffusiveness_csv(&diffusiveness_vs_pairs(&output.goldens)?),
        )?);
    }
    files.push(write_atomic(
        out_dir,
        "corpus.tsv",
        &write_corpus(&output.samples_per_chip)?,
    )?);
    Ok((output, files))
}

/// Run the temperature sweep of a sweep scenario: per chip, the sweep
/// table plus an enrollment CSV.IDs at each temperature are compared
/// against the golden enrolled at the reference temperature.
pub fn run_sweep(scenario: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    scenario.validate()?;
    let sweep = scenario.sweep.as_ref().ok_or_else(|| {
        Error::InvalidParameter(format!(
            "scenario {} has no [sweep] section",
            scenario.name
        ))
    })?;
    let chips = generate_population(scenario.num_chips, &scenario.chip_spec, scenario.seed)?;
    let plan = scenario.plan();
    let mut rows_per_chip = Vec::new();
    let mut files = Vec::new();
    fs::create_dir_all(out_dir)?;
    for chip in &chips {
        let rows = temp_sweep(chip, &sweep.temperatures, &plan, None)?;
        rows_per_chip.push((chip.chip_index, rows));
        let records = enroll(chip, &sweep.temperatures, &plan)?;
        files.push(write_atomic(
            out_dir,
            &format!("enrollment_chip{}.csv", chip.chip_index),
            &render_enrollment_csv(&records),
        )?);
    }
    files.insert(
        0,
        write_atomic(out_dir, "temp_sweep.csv", &render_sweep_csv(&rows_per_chip))?,
    );
    Ok(files)
}

/// Ingest a measured corpus and compute every metric computable from
/// it. Goldens are re-derived with the modal-pattern rule. Returns the
/// report plus any warnings (for example reliability skipped at T = 1).
pub fn ingest_corpus(path: &Path) -> Result<(MetricsReport, Vec<String>)> {
    let corpus = read_corpus(path)?;
    ingest(&corpus)
}

pub fn ingest(corpus: &ResponseCorpus) -> Result<(MetricsReport, Vec<String>)> {
    let mut goldens = Vec::with_capacity(corpus.samples_per_chip.len());
    for samples in &corpus.samples_per_chip {
        goldens.push(golden_id_with(samples, Default::default())?);
    }
    let report = compute_report(&goldens, &corpus.samples_per_chip)?;
    let mut warnings = Vec::new();
    if report.reliability_per_chip.is_none() {
        warnings.push("reliability skipped: corpus has a single sample per chip".into());
    }
    if report.uniqueness.is_none() {
        warnings.push("uniqueness undefined: corpus has a single chip".into());
    }
    Ok((report, warnings))
}

/// CSV of ideal beat patterns, one column per period ratio, plus a
/// pairwise HD footer when there is more than one ratio.
pub fn emit_fig4(ratios: &[f64], len: usize) -> Result<String> {
    if ratios.is_empty() {
        return Err(Error::EmptyInput("fig4 needs at least one ratio"));
    }
    if len == 0 {
        return Err(Error::InvalidParameter("fig4 length must be >= 1".into()));
    }
    for &r in ratios {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "period ratio must be positive, got {r}"
            )));
        }
    }
    let patterns: Vec<_> = ratios.iter().map(|&r| ideal_beat(r, 1.0, 0.5, len)).collect();
    let mut out = String::from("k");
    for r in ratios {
        out.push_str(&format!(",ratio_{r}"));
    }
    out.push('\n');
    for k in 0..len {
        out.push_str(&k.to_string());
        for p in &patterns {
            out.push_str(if p.get(k) { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    for i in 0..ratios.len() {
        for j in (i + 1)..ratios.len() {
            let hd = hamming_distance(&patterns[i], &patterns[j])?;
            out.push_str(&format!(
                "# HD ratio_{} vs ratio_{} = {hd}\n",
                ratios[i], ratios[j]
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scenario;
    use crate::report::ReportFormat;

    const TINY: &str = r#"
name = "tiny"

[population]
num_chips = 3
num_pairs = 2
bits_per_pair = 8
num_samples = 6
seed = 41
"#;

    #[test]
    fn simulate_produces_consistent_shapes() {
        let scenario = Scenario::from_toml(TINY).unwrap();
        let out = simulate(&scenario).unwrap();
        assert_eq!(out.goldens.len(), 3);
        assert_eq!(out.samples_per_chip[0].len(), 6);
        assert_eq!(out.report.id_length(), 16);
        let intra_total: u64 = out.report.intra_hd_hist.values().sum();
        assert_eq!(intra_total, 18);
        let inter_total: u64 = out.report.inter_hd_hist.values().sum();
        assert_eq!(inter_total, 3);
    }

    #[test]
    fn artifacts_roundtrip_through_corpus() {
        let scenario = Scenario::from_toml(TINY).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (output, files) = run_scenario(&scenario, dir.path(), ReportFormat::KeyValue).unwrap();
        assert!(files.iter().any(|f| f.ends_with("report.kv")));
        let (ingested, warnings) = ingest_corpus(&dir.path().join("corpus.tsv")).unwrap();
        assert_eq!(ingested, output.report);
        assert!(warnings.is_empty());
    }

    #[test]
    fn rerun_is_byte_identical() {
        let scenario = Scenario::from_toml(TINY).unwrap();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        run_scenario(&scenario, d1.path(), ReportFormat::KeyValue).unwrap();
        run_scenario(&scenario, d2.path(), ReportFormat::KeyValue).unwrap();
        for name in ["report.kv", "intra_hd_hist.csv", "inter_hd_hist.csv", "corpus.tsv"] {
            let a = fs::read(d1.path().join(name)).unwrap();
            let b = fs::read(d2.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical runs");
        }
    }

    #[test]
    fn fig4_layout() {
        let csv = emit_fig4(&[1.2, 1.1], 32).unwrap();
        assert!(csv.starts_with("k,ratio_1.2,ratio_1.1\n"));
        assert!(csv.contains("# HD ratio_1.2 vs ratio_1.1 = 17"));
        let single = emit_fig4(&[1.5], 8).unwrap();
        assert!(!single.contains("# HD"));
        let same = emit_fig4(&[1.0, 1.0], 16).unwrap();
        assert!(same.contains("= 0\n"));
        assert!(emit_fig4(&[], 8).is_err());
        assert!(emit_fig4(&[-1.0], 8).is_err());
    }
}
