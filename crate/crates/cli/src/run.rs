use std::path::PathBuf;

use clap::Parser;
use num_complex::Complex64;
use serde::Serialize;

use bunchlab_core::amplifier::{emission_probability, output_amplitudes, AmplifierGain};
use bunchlab_core::verify::{run_suite, SuiteSize};
use bunchlab_core::{
    closed_form_enhancement, coincidence_probability, delay_scan, parse_label, scenario_table,
    scenario_to_packets, CoincidenceResult, InputConfiguration,
};

use crate::config::{ExperimentConfig, Mode, TableSize, SCHEMA_VERSION};
use crate::error::CliError;

const CONVENTION: &str = "p_quantum and p_classical include the (N+M)! time-ordered detection factor; \
     the probability that all photons exit output 1 is p_quantum / (N+M)!";

/// Separation, in packet widths, used when a scenario label is realized as packets.
const SCENARIO_SEPARATION_WIDTHS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "bunchlab",
    version,
    about = "Multi-photon bunching enhancement at a beam splitter"
)]
pub struct Args {
    /// What to compute.
    #[arg(value_enum)]
    pub mode: Mode,

    /// `table` only: a-photon and b-photon counts.
    #[arg(value_name = "N M")]
    pub counts: Vec<usize>,

    /// JSON experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format; `scan` defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Seed for `verify`.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Seconds per configuration time unit (detunings are per unit).
    #[arg(long, default_value_t = 1.0)]
    pub unit: f64,
}

/// Rendered result document and process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub document: String,
    pub exit_code: u8,
}

/// Loads and validates the configuration named by `args`, applies
/// command-line overrides and executes it.
pub fn run(args: &Args) -> Result<Report, CliError> {
    if !(args.unit > 0.0) || !args.unit.is_finite() {
        return Err(CliError::Usage(format!(
            "--unit must be positive, got {}",
            args.unit
        )));
    }
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let cfg = ExperimentConfig::from_json(&text)?;
            if cfg.mode != args.mode {
                return Err(CliError::Validation(vec![format!(
                    "mode: configuration says '{}' but '{}' was requested",
                    cfg.mode.name(),
                    args.mode.name()
                )]));
            }
            cfg
        }
        None if matches!(args.mode, Mode::Table | Mode::Verify) => ExperimentConfig::empty(args.mode),
        None => {
            return Err(CliError::Usage(format!(
                "mode '{}' needs --config FILE",
                args.mode.name()
            )));
        }
    };

    match (args.mode, args.counts.as_slice()) {
        (_, []) => {}
        (Mode::Table, &[n, m]) => config.table = Some(TableSize { n, m }),
        (Mode::Table, _) => return Err(CliError::Usage("table takes exactly two counts: N M".into())),
        (mode, _) => {
            return Err(CliError::Usage(format!(
                "mode '{}' takes no positional arguments",
                mode.name()
            )))
        }
    }
    if let Some(seed) = args.seed {
        if args.mode != Mode::Verify {
            return Err(CliError::Usage("--seed only applies to verify".into()));
        }
        config.seed = Some(seed);
    }

    config.validate()?;
    let format = args.format.unwrap_or(match args.mode {
        Mode::Scan => Format::Csv,
        _ => Format::Json,
    });
    execute(&config, format, args.unit)
}

/// Runs an already validated configuration.
pub fn execute(config: &ExperimentConfig, format: Format, unit: f64) -> Result<Report, CliError> {
    match config.mode {
        Mode::Enhance => enhance(config, format, unit),
        Mode::Scan => scan(config, format, unit),
        Mode::Table => table(config, format),
        Mode::Verify => verify(config, format),
        Mode::Amplifier => amplifier(config, format),
    }
}

fn ok(document: String) -> Result<Report, CliError> {
    Ok(Report {
        document,
        exit_code: 0,
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Output(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

// csv only emits a header once a row has been serialized.
fn csv_or_header<T: Serialize>(rows: Vec<T>, header: &str) -> Result<String, CliError> {
    if rows.is_empty() {
        return Ok(format!("{header}\n"));
    }
    to_csv(rows)
}

#[derive(Serialize)]
struct EnhanceDocument<'a> {
    schema: u32,
    mode: &'static str,
    convention: &'static str,
    photons_a: usize,
    photons_b: usize,
    transmissivity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario_label: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form_enhancement: Option<u64>,
    result: CoincidenceResult,
}

fn enhance(config: &ExperimentConfig, format: Format, unit: f64) -> Result<Report, CliError> {
    let (input, closed) = match &config.scenario_label {
        Some(label) => {
            let scenario = parse_label(label)?;
            let cfg = scenario_to_packets(&scenario, unit, SCENARIO_SEPARATION_WIDTHS * unit)?;
            (cfg, Some(closed_form_enhancement(&scenario)))
        }
        None => (config.input_configuration(unit)?, None),
    };
    let result = coincidence_probability(&input)?;
    match format {
        Format::Json => ok(to_json(&EnhanceDocument {
            schema: SCHEMA_VERSION,
            mode: "enhance",
            convention: CONVENTION,
            photons_a: input.port_a().len(),
            photons_b: input.port_b().len(),
            transmissivity: input.transmissivity(),
            scenario_label: config.scenario_label.as_deref(),
            closed_form_enhancement: closed,
            result,
        })?),
        Format::Csv => ok(to_csv([result])?),
    }
}

#[derive(Serialize)]
struct ScanRow {
    delay_s: f64,
    p_quantum: f64,
    p_classical: f64,
    enhancement: f64,
    normalized: f64,
}

#[derive(Serialize)]
struct ScanDocument {
    schema: u32,
    mode: &'static str,
    convention: &'static str,
    baseline: f64,
    extended_protocol: bool,
    points: Vec<ScanRow>,
}

fn delays(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    let span = stop - start;
    (0..steps)
        .map(|k| start + span * k as f64 / (steps - 1) as f64)
        .collect()
}

fn scan(config: &ExperimentConfig, format: Format, unit: f64) -> Result<Report, CliError> {
    let range = config.scan.as_ref().expect("validated");
    let input: InputConfiguration = config.input_configuration(unit)?;
    let delays: Vec<f64> = delays(range.start_s, range.stop_s, range.steps)
        .into_iter()
        .map(|d| d * unit)
        .collect();
    let result = delay_scan(&input, &delays)?;
    let rows: Vec<ScanRow> = result
        .points
        .iter()
        .map(|p| ScanRow {
            delay_s: p.delay,
            p_quantum: p.result.p_quantum,
            p_classical: p.result.p_classical,
            enhancement: p.result.enhancement,
            normalized: p.normalized,
        })
        .collect();
    match format {
        Format::Csv => ok(csv_or_header(
            rows,
            "delay_s,p_quantum,p_classical,enhancement,normalized",
        )?),
        Format::Json => ok(to_json(&ScanDocument {
            schema: SCHEMA_VERSION,
            mode: "scan",
            convention: CONVENTION,
            baseline: result.baseline,
            extended_protocol: result.extended_protocol,
            points: rows,
        })?),
    }
}

#[derive(Serialize)]
struct TableCsvRow<'a> {
    label: &'a str,
    factor: u64,
    published_label: &'a str,
    published_factor: Option<u64>,
}

#[derive(Serialize)]
struct TableDocument {
    schema: u32,
    mode: &'static str,
    n: usize,
    m: usize,
    rows: Vec<bunchlab_core::TableRow>,
}

fn table(config: &ExperimentConfig, format: Format) -> Result<Report, CliError> {
    let TableSize { n, m } = config.table.expect("validated");
    let rows = scenario_table(n, m)?;
    match format {
        Format::Json => ok(to_json(&TableDocument {
            schema: SCHEMA_VERSION,
            mode: "table",
            n,
            m,
            rows,
        })?),
        Format::Csv => ok(to_csv(rows.iter().map(|r| TableCsvRow {
            label: &r.label,
            factor: r.factor,
            published_label: r.published_label.unwrap_or(""),
            published_factor: r.published_factor,
        }))?),
    }
}

#[derive(Serialize)]
struct VerifyDocument {
    schema: u32,
    mode: &'static str,
    #[serde(flatten)]
    report: bunchlab_core::verify::VerificationReport,
}

fn verify(config: &ExperimentConfig, format: Format) -> Result<Report, CliError> {
    let report = run_suite(config.seed.unwrap_or(0), SuiteSize::default())?;
    let exit_code = if report.all_passed { 0 } else { 1 };
    let document = match format {
        Format::Json => to_json(&VerifyDocument {
            schema: SCHEMA_VERSION,
            mode: "verify",
            report,
        })?,
        Format::Csv => to_csv(&report.checks)?,
    };
    Ok(Report { document, exit_code })
}

#[derive(Serialize)]
struct AmplitudeRecord {
    state: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct EmissionRow {
    matched: usize,
    unmatched: usize,
    emission_probability: f64,
    enhancement: f64,
}

#[derive(Serialize)]
struct EmissionRecord {
    #[serde(flatten)]
    row: EmissionRow,
    amplitudes: Vec<AmplitudeRecord>,
}

#[derive(Serialize)]
struct AmplifierDocument {
    schema: u32,
    mode: &'static str,
    gain: f64,
    spontaneous_probability: f64,
    emission: Vec<EmissionRecord>,
}

fn amplifier(config: &ExperimentConfig, format: Format) -> Result<Report, CliError> {
    let settings = config.amplifier.as_ref().expect("validated");
    let gain = AmplifierGain::from_coupling(Complex64::new(settings.gain, 0.0))?;
    let spontaneous = emission_probability(&gain, 0, settings.unmatched);
    let rows: Vec<EmissionRow> = (0..=settings.matched)
        .map(|m| {
            let p = emission_probability(&gain, m, settings.unmatched);
            EmissionRow {
                matched: m,
                unmatched: settings.unmatched,
                emission_probability: p,
                enhancement: p / spontaneous,
            }
        })
        .collect();
    match format {
        Format::Csv => ok(to_csv(rows)?),
        Format::Json => {
            let emission = rows
                .into_iter()
                .map(|row| {
                    let amplitudes = output_amplitudes(&gain, row.matched, row.unmatched)
                        .into_iter()
                        .map(|(label, a)| AmplitudeRecord {
                            state: label.to_string(),
                            re: a.re,
                            im: a.im,
                        })
                        .collect();
                    EmissionRecord { row, amplitudes }
                })
                .collect();
            ok(to_json(&AmplifierDocument {
                schema: SCHEMA_VERSION,
                mode: "amplifier",
                gain: settings.gain,
                spontaneous_probability: spontaneous,
                emission,
            })?)
        }
    }
}
