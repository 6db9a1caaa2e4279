//! Deterministic simulator and evaluation toolkit for waveform
//! ring-oscillator PUFs.
//!
//! A wRO-PUF derives ID bits from the initial waveform of one ring
//! oscillator sampled at the rising edges of another. This crate
//! generates virtual chip populations with process variation, simulates
//! the RO-pair sampling circuit (flip-flop chain skews, metastability
//! window, per-measurement period noise), extracts golden IDs over
//! repeated measurements, computes the standard PUF metric suite
//! (uniformity, reliability, uniqueness, diffusiveness, HD histograms),
//! and models temperature drift together with an RO thermometer counter
//! for ID/temperature collation.
//!
//! All randomness flows through counter-split seeded streams, so every
//! run is reproducible bit for bit from its scenario seed.

pub mod bits;
pub mod config;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod population;
pub mod report;
pub mod rng;
pub mod ro;
pub mod sampler;
pub mod scenario;
pub mod thermo;

pub use bits::Bits;
pub use config::Scenario;
pub use error::{Error, Result};
pub use metrics::{
    diffusiveness, hamming_distance, reliability, uniformity, uniqueness, BitMatrix,
    MetricsReport,
};
pub use population::{
    generate_population, golden_id, golden_id_with, measure_device, Chip, ChipSpec, DeviceId,
    GoldenRule, MeasurementPlan,
};
pub use ro::{draw_instance, effective_period, wave_value, Environment, ROInstance, ROModelSpec};
pub use sampler::{
    capture_bit, ideal_beat, sample_response, sampling_instant, PufUnit, PufUnitSpec, Response,
    SamplingRun,
};
pub use thermo::{
    enroll, temp_sweep, thermometer_count, verify, EnrollmentRecord, SweepRow, ThermometerSpec,
};
