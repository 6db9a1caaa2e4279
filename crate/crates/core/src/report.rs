//! Rendering of metric reports and histogram tables. All output is
//! locale-independent: '.' decimal separator, '\n' line endings, fixed
//! column order, percentages to two decimal places.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::metrics::MetricsReport;
use crate::thermo::{EnrollmentRecord, SweepRow};

/// Report serialization format selected by the CLI `--format` flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    /// `key = value` lines.
    #[default]
    KeyValue,
    /// `metric,value` CSV rows.
    Csv,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<ReportFormat> {
        match s {
            "kv" => Some(ReportFormat::KeyValue),
            "csv" => Some(ReportFormat::Csv),
            _ => None,
        }
    }

    pub fn file_name(&self) -> &'static str {
        match self {
            ReportFormat::KeyValue => "report.kv",
            ReportFormat::Csv => "report.csv",
        }
    }
}

fn pct(v: f64) -> String {
    format!("{v:.2}")
}

fn opt_pct(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), pct)
}

fn opt_mode(v: Option<usize>) -> String {
    v.map_or_else(|| "undefined".into(), |m| m.to_string())
}

/// Render the metric report. The summary block carries the Table-II
/// style averages; per-chip and per-pair values follow.
pub fn render_report(name: &str, report: &MetricsReport, format: ReportFormat) -> String {
    let sep = match format {
        ReportFormat::KeyValue => " = ",
        ReportFormat::Csv => ",",
    };
    let mut out = String::new();
    let mut line = |key: &str, value: String| {
        let _ = writeln!(out, "{key}{sep}{value}");
    };

    line("scenario", name.into());
    line("num_chips", report.num_chips.to_string());
    line("num_pairs", report.num_pairs.to_string());
    line("bits_per_pair", report.bits_per_pair.to_string());
    line("num_samples", report.num_samples.to_string());
    line("id_length", report.id_length().to_string());
    line("uniformity", pct(report.avg_uniformity()));
    line("reliability", opt_pct(report.avg_reliability()));
    line("uniqueness", opt_pct(report.uniqueness));
    line("diffusiveness", pct(report.avg_diffusiveness()));
    line("intra_hd_mode", opt_mode(report.intra_mode()));
    line("inter_hd_mode", opt_mode(report.inter_mode()));
    for (n, u) in report.uniformity_per_chip.iter().enumerate() {
        line(&format!("chip{n}.uniformity"), pct(*u));
    }
    if let Some(rel) = &report.reliability_per_chip {
        for (n, r) in rel.iter().enumerate() {
            line(&format!("chip{n}.reliability"), pct(*r));
        }
    }
    for (n, d) in report.diffusiveness_per_chip.iter().enumerate() {
        line(&format!("chip{n}.diffusiveness"), pct(*d));
    }
    for (n, pairs) in report.uniformity_per_pair.iter().enumerate() {
        for (i, u) in pairs.iter().enumerate() {
            line(&format!("chip{n}.pair{i}.uniformity"), pct(*u));
        }
    }
    out
}

/// `hd,count` rows in ascending HD order.
pub fn render_histogram_csv(hist: &BTreeMap<usize, u64>) -> String {
    let mut out = String::from("hd,count\n");
    for (hd, count) in hist {
        let _ = writeln!(out, "{hd},{count}");
    }
    out
}

/// Diffusiveness over the first k pairs: one row per k, one column per
/// chip plus the population average.
pub fn render_diffusiveness_csv(table: &[(usize, Vec<f64>, f64)]) -> String {
    let mut out = String::from("k");
    if let Some((_, per_chip, _)) = table.first() {
        for n in 0..per_chip.len() {
            let _ = write!(out, ",chip{n}");
        }
    }
    out.push_str(",average\n");
    for (k, per_chip, avg) in table {
        let _ = write!(out, "{k}");
        for d in per_chip {
            let _ = write!(out, ",{}", pct(*d));
        }
        let _ = writeln!(out, ",{}", pct(*avg));
    }
    out
}

/// Sweep table rows for one or more chips.
pub fn render_sweep_csv(rows_per_chip: &[(usize, Vec<SweepRow>)]) -> String {
    let mut out = String::from("chip,temperature_C,avg_hd,golden_hd,count\n");
    for (chip, rows) in rows_per_chip {
        for row in rows {
            let _ = writeln!(
                out,
                "{chip},{},{:.4},{},{}",
                row.temperature, row.avg_hd, row.golden_hd, row.count
            );
        }
    }
    out
}

/// Enrollment table with the pinned column set.
pub fn render_enrollment_csv(records: &[EnrollmentRecord]) -> String {
    let mut out = String::from("temperature_C,count,golden_hex\n");
    for r in records {
        let _ = writeln!(out, "{},{},{}", r.temperature, r.count, r.golden.to_hex());
    }
    out
}
