//! Experiment configuration documents (`"schema": 1`).

use serde::{Deserialize, Serialize};

use bunchlab_core::{InputConfiguration, WavePacket};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Enhance,
    Scan,
    Table,
    Verify,
    Amplifier,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Enhance => "enhance",
            Mode::Scan => "scan",
            Mode::Table => "table",
            Mode::Verify => "verify",
            Mode::Amplifier => "amplifier",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketRecord {
    pub center_time_s: f64,
    pub width_s: f64,
    #[serde(default)]
    pub detuning_rad_s: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRange {
    pub start_s: f64,
    pub stop_s: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSize {
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplifierSettings {
    /// Coupling `g` (real, small-gain regime).
    pub gain: f64,
    /// Emission probabilities are reported for matched counts 0..=matched.
    pub matched: usize,
    #[serde(default)]
    pub unmatched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packets_a: Option<Vec<PacketRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packets_b: Option<Vec<PacketRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transmissivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableSize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplifier: Option<AmplifierSettings>,
}

impl ExperimentConfig {
    pub fn empty(mode: Mode) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            mode,
            packets_a: None,
            packets_b: None,
            transmissivity: None,
            scan: None,
            scenario_label: None,
            table: None,
            seed: None,
            amplifier: None,
        }
    }

    /// Parses JSON, reporting the path of the offending value on failure.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| CliError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    /// Checks that exactly the fields `mode` needs are present and that all
    /// physical values are in range. Every problem is collected.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut problems = Vec::new();
        if self.schema != SCHEMA_VERSION {
            problems.push(format!("schema: expected {SCHEMA_VERSION}, got {}", self.schema));
        }

        let has_packets = self.packets_a.is_some() || self.packets_b.is_some();
        let present = [
            ("packets_a", self.packets_a.is_some()),
            ("packets_b", self.packets_b.is_some()),
            ("transmissivity", self.transmissivity.is_some()),
            ("scan", self.scan.is_some()),
            ("scenario_label", self.scenario_label.is_some()),
            ("table", self.table.is_some()),
            ("seed", self.seed.is_some()),
            ("amplifier", self.amplifier.is_some()),
        ];
        let allowed: &[&str] = match self.mode {
            Mode::Enhance if self.scenario_label.is_some() => &["scenario_label"],
            Mode::Enhance => &["packets_a", "packets_b", "transmissivity"],
            Mode::Scan => &["packets_a", "packets_b", "transmissivity", "scan"],
            Mode::Table => &["table"],
            Mode::Verify => &["seed"],
            Mode::Amplifier => &["amplifier"],
        };
        for (field, is_present) in present {
            if is_present && !allowed.contains(&field) {
                problems.push(format!("{field}: not used by mode '{}'", self.mode.name()));
            }
        }

        let needs_packets =
            matches!(self.mode, Mode::Scan) || (self.mode == Mode::Enhance && self.scenario_label.is_none());
        if needs_packets {
            if !has_packets {
                problems.push("packets_a/packets_b: at least one photon is required".into());
            }
            if self.transmissivity.is_none() {
                problems.push("transmissivity: required".into());
            }
        }
        if self.mode == Mode::Scan {
            match &self.scan {
                None => problems.push("scan: required".into()),
                Some(s) => {
                    if s.steps < 2 {
                        problems.push(format!("scan.steps: must be at least 2, got {}", s.steps));
                    }
                    if !s.start_s.is_finite() || !s.stop_s.is_finite() {
                        problems.push("scan.start_s/stop_s: must be finite".into());
                    }
                }
            }
            if self.packets_b.as_ref().is_none_or(|b| b.is_empty()) {
                problems.push("packets_b: scan needs at least one photon in port b".into());
            }
        }
        if self.mode == Mode::Table && self.table.is_none() {
            problems.push("table: required (or pass n and m on the command line)".into());
        }
        if self.mode == Mode::Amplifier {
            match &self.amplifier {
                None => problems.push("amplifier: required".into()),
                Some(a) if !(a.gain.abs() <= bunchlab_core::amplifier::MAX_SMALL_GAIN) => {
                    problems.push(format!(
                        "amplifier.gain: |g| must be at most {}, got {}",
                        bunchlab_core::amplifier::MAX_SMALL_GAIN,
                        a.gain
                    ))
                }
                Some(_) => {}
            }
        }

        if let Some(t) = self.transmissivity {
            if !(0.0..=1.0).contains(&t) {
                problems.push(format!("transmissivity: must lie in [0, 1], got {t}"));
            }
        }
        for (port, packets) in [("packets_a", &self.packets_a), ("packets_b", &self.packets_b)] {
            for (i, p) in packets.iter().flatten().enumerate() {
                if !(p.width_s > 0.0) || !p.width_s.is_finite() {
                    problems.push(format!(
                        "{port}[{i}].width_s: must be positive, got {}",
                        p.width_s
                    ));
                }
                for (name, v) in [
                    ("center_time_s", p.center_time_s),
                    ("detuning_rad_s", p.detuning_rad_s),
                    ("phase_rad", p.phase_rad),
                ] {
                    if !v.is_finite() {
                        problems.push(format!("{port}[{i}].{name}: must be finite"));
                    }
                }
            }
        }

        if problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(problems))
        }
    }

    /// Packets in seconds; `unit` is the number of seconds per config time unit.
    pub fn input_configuration(&self, unit: f64) -> Result<InputConfiguration, CliError> {
        let convert = |records: &Option<Vec<PacketRecord>>| -> Result<Vec<WavePacket>, CliError> {
            records
                .iter()
                .flatten()
                .map(|r| {
                    WavePacket::new(
                        r.center_time_s * unit,
                        r.width_s * unit,
                        r.detuning_rad_s / unit,
                        r.phase_rad,
                    )
                    .map_err(CliError::from)
                })
                .collect()
        };
        Ok(InputConfiguration::new(
            convert(&self.packets_a)?,
            convert(&self.packets_b)?,
            self.transmissivity.unwrap_or(0.5),
        )?)
    }
}
