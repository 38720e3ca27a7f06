//! End-to-end runs of the remotely controlled experiment: Alice triggers
//! the apparatus for N atoms, picks a setting per atom, records local
//! outcomes or null detections, and the remote state is steered
//! accordingly.
//!
//! The classical channels of the setup (control to the apparatus, results
//! between the parties) are modeled as logical sequence numbers on each
//! record; the control message for an atom always precedes its result.
//! Runs are deterministic: atom i draws from stream (seed, i), a
//! randomized schedule from stream (seed, u64::MAX).

use std::collections::BTreeMap;

use crate::boxes::{assemblage, make_psi2};
use crate::error::{Error, Result};
use crate::fmt::fmt_f64;
use crate::measurement::{
    measure, outcome_probabilities, remote_collapse, Location, OutcomeLabel, Setting, SpinLabel,
    StateForm,
};
use crate::numerics::RngStream;
use crate::wavefunction::PhysParams;

/// Which model executes the per-atom measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Continuous,
    Boxes,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Continuous => "continuous",
            Model::Boxes => "boxes",
        }
    }

    pub fn parse(s: &str) -> Result<Model> {
        match s {
            "continuous" => Ok(Model::Continuous),
            "boxes" => Ok(Model::Boxes),
            _ => Err(Error::Parse(format!(
                "unknown model `{s}` (expected continuous or boxes)"
            ))),
        }
    }
}

/// Per-atom setting assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    Fixed(Setting),
    /// Cycle through the list in atom order.
    Alternating(Vec<Setting>),
    /// Uniform seeded draw from the list for every atom.
    Random(Vec<Setting>),
}

impl Schedule {
    pub fn settings(&self) -> Vec<Setting> {
        match self {
            Schedule::Fixed(s) => vec![*s],
            Schedule::Alternating(list) | Schedule::Random(list) => list.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Schedule::Fixed(_) => Ok(()),
            Schedule::Alternating(list) | Schedule::Random(list) => {
                if list.is_empty() {
                    Err(Error::InvalidArgument("schedule list must not be empty".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    fn setting_for(&self, atom: u64, rng: &mut RngStream) -> Setting {
        match self {
            Schedule::Fixed(s) => *s,
            Schedule::Alternating(list) => list[(atom % list.len() as u64) as usize],
            Schedule::Random(list) => {
                let idx = (rng.uniform() * list.len() as f64) as usize;
                list[idx.min(list.len() - 1)]
            }
        }
    }
}

/// Full description of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_atoms: u64,
    pub schedule: Schedule,
    pub evolution_time: f64,
    pub params: PhysParams,
    pub seed: u64,
    pub model: Model,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(Error::InvalidArgument("n_atoms must be at least 1".into()));
        }
        if !(self.evolution_time.is_finite() && self.evolution_time >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "evolution_time must be finite and non-negative, got {}",
                self.evolution_time
            )));
        }
        self.params.validate()?;
        self.schedule.validate()?;
        if self.model == Model::Boxes && self.schedule.settings().contains(&Setting::MomentumZ) {
            return Err(Error::InvalidArgument(
                "the boxes model has no momentum observable; remove momentum_z from the schedule"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// One atom's protocol trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub atom_index: u64,
    pub setting: Setting,
    pub alice_detected: bool,
    /// Eigenvalue registered by Alice's device; None on a null detection.
    pub alice_value: Option<f64>,
    pub bob_form: StateForm,
    pub bob_spin: SpinLabel,
    pub bob_location: Location,
    pub seq_control: u64,
    pub seq_result: u64,
}

fn continuous_atom(
    index: u64,
    setting: Setting,
    config: &RunConfig,
    rng: &mut RngStream,
) -> Result<RunRecord> {
    let t = config.evolution_time;
    let (outcome, collapsed) = measure(setting, t, &config.params, rng);
    let bob = if outcome.detected_locally {
        collapsed
    } else {
        remote_collapse(setting, true, t, &config.params)?
    };
    Ok(RunRecord {
        atom_index: index,
        setting,
        alice_detected: outcome.detected_locally,
        alice_value: outcome.detected_locally.then_some(outcome.value),
        bob_form: bob.form(),
        bob_spin: bob.spin_label(),
        bob_location: bob.location(),
        seq_control: 2 * index,
        seq_result: 2 * index + 1,
    })
}

fn boxes_atom(
    index: u64,
    setting: Setting,
    config: &RunConfig,
    rng: &mut RngStream,
) -> Result<RunRecord> {
    let psi2 = make_psi2();
    let asm = assemblage(&psi2, setting)?;
    let u = rng.uniform();
    let member = if asm.members.len() == 1 || u < asm.members[0].probability {
        &asm.members[0]
    } else {
        &asm.members[1]
    };

    let hbar = config.params.hbar;
    let tokyo_z = config.params.center_magnitude(config.evolution_time);
    let (detected, value, form, spin, location) = match (setting, member.label) {
        (Setting::PositionZ, OutcomeLabel::Tokyo) => (
            true,
            Some(tokyo_z),
            StateForm::PositionEigenstate,
            SpinLabel::DownZ,
            Location::Tokyo,
        ),
        (Setting::PositionZ, OutcomeLabel::Paris) => (
            false,
            None,
            StateForm::PositionEigenstate,
            SpinLabel::UpZ,
            Location::Paris,
        ),
        (Setting::SpinZ, OutcomeLabel::SpinMinus) => (
            true,
            Some(-0.5 * hbar),
            StateForm::SingleBranchGaussian,
            SpinLabel::DownZ,
            Location::Tokyo,
        ),
        (Setting::SpinZ, OutcomeLabel::SpinPlus) => (
            false,
            None,
            StateForm::SingleBranchGaussian,
            SpinLabel::UpZ,
            Location::Paris,
        ),
        (Setting::SpinX, OutcomeLabel::SpinPlus) => (
            true,
            Some(0.5 * hbar),
            StateForm::BranchSuperposition,
            SpinLabel::UpX,
            Location::Delocalized,
        ),
        (Setting::SpinX, OutcomeLabel::SpinMinus) => (
            true,
            Some(-0.5 * hbar),
            StateForm::BranchSuperposition,
            SpinLabel::DownX,
            Location::Delocalized,
        ),
        (s, l) => {
            return Err(Error::InvalidArgument(format!(
                "unexpected outcome {l:?} for setting {s} in the boxes model"
            )))
        }
    };
    Ok(RunRecord {
        atom_index: index,
        setting,
        alice_detected: detected,
        alice_value: value,
        bob_form: form,
        bob_spin: spin,
        bob_location: location,
        seq_control: 2 * index,
        seq_result: 2 * index + 1,
    })
}

/// Execute a run: every atom is evolved to the configured time, measured
/// under its scheduled setting, and a null detection at Alice's side is
/// translated into the remote (Paris) collapse. Deterministic per seed.
pub fn run_experiment(config: &RunConfig) -> Result<(Vec<RunRecord>, Tally)> {
    config.validate()?;
    let mut schedule_rng = RngStream::new(config.seed, u64::MAX);
    let mut records = Vec::with_capacity(config.n_atoms.min(1 << 24) as usize);
    for index in 0..config.n_atoms {
        let setting = config.schedule.setting_for(index, &mut schedule_rng);
        let mut rng = RngStream::new(config.seed, index);
        let record = match config.model {
            Model::Continuous => continuous_atom(index, setting, config, &mut rng)?,
            Model::Boxes => boxes_atom(index, setting, config, &mut rng)?,
        };
        records.push(record);
    }
    let tally = tally_statistics(&records)?;
    Ok((records, tally))
}

/// Empirical frequency of one outcome key within a setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeStat {
    pub count: u64,
    pub frequency: f64,
    /// Binomial standard error sqrt(f (1-f) / n).
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SettingTally {
    pub n: u64,
    pub outcomes: BTreeMap<String, OutcomeStat>,
}

/// Aggregated counts of a run. Outcome keys are "+hbar/2" / "-hbar/2" for
/// the spin settings and "tokyo" / "paris" for position and momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct Tally {
    pub n_atoms: u64,
    pub per_setting: BTreeMap<Setting, SettingTally>,
    pub side_counts: BTreeMap<String, u64>,
}

/// Outcome key a record contributes to within its setting.
pub fn outcome_key(record: &RunRecord) -> &'static str {
    match record.setting {
        Setting::SpinZ | Setting::SpinX => match record.bob_spin {
            SpinLabel::UpZ | SpinLabel::UpX => "+hbar/2",
            SpinLabel::DownZ | SpinLabel::DownX => "-hbar/2",
        },
        Setting::PositionZ | Setting::MomentumZ => record.bob_location.as_str(),
    }
}

pub fn tally_statistics(records: &[RunRecord]) -> Result<Tally> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("cannot tally an empty record list".into()));
    }
    let mut per_setting: BTreeMap<Setting, SettingTally> = BTreeMap::new();
    let mut side_counts: BTreeMap<String, u64> = BTreeMap::new();
    for record in records {
        let entry = per_setting.entry(record.setting).or_default();
        entry.n += 1;
        entry
            .outcomes
            .entry(outcome_key(record).to_string())
            .or_insert(OutcomeStat {
                count: 0,
                frequency: 0.0,
                std_error: 0.0,
            })
            .count += 1;
        *side_counts
            .entry(record.bob_location.as_str().to_string())
            .or_insert(0) += 1;
    }
    for tally in per_setting.values_mut() {
        let n = tally.n as f64;
        for stat in tally.outcomes.values_mut() {
            let f = stat.count as f64 / n;
            stat.frequency = f;
            stat.std_error = (f * (1.0 - f) / n).sqrt();
        }
    }
    Ok(Tally {
        n_atoms: records.len() as u64,
        per_setting,
        side_counts,
    })
}

/// One analytic-versus-empirical comparison line.
#[derive(Debug, Clone, PartialEq)]
pub struct Conformance {
    pub setting: Setting,
    pub outcome: String,
    pub analytic: f64,
    pub empirical: f64,
    /// Deviation in analytic-standard-error units (infinite if se = 0 and
    /// the frequencies differ).
    pub sigma_deviation: f64,
    pub ok: bool,
}

/// Compare a tally against the per-model analytic outcome probabilities
/// at 5 binomial standard errors.
pub fn conformance_report(tally: &Tally, config: &RunConfig) -> Result<Vec<Conformance>> {
    let mut lines = Vec::new();
    for (&setting, st) in &tally.per_setting {
        let analytic: Vec<(OutcomeLabel, f64)> = match config.model {
            Model::Continuous => {
                outcome_probabilities(setting, config.evolution_time, &config.params)
            }
            Model::Boxes => {
                let asm = assemblage(&make_psi2(), setting)?;
                asm.members.iter().map(|m| (m.label, m.probability)).collect()
            }
        };
        let n = st.n as f64;
        for (label, p) in analytic {
            let count = st
                .outcomes
                .get(label.as_str())
                .map(|s| s.count)
                .unwrap_or(0);
            let freq = count as f64 / n;
            let se = (p * (1.0 - p) / n).sqrt();
            let (sigma_deviation, ok) = if se == 0.0 {
                if freq == p {
                    (0.0, true)
                } else {
                    (f64::INFINITY, false)
                }
            } else {
                let dev = (freq - p).abs() / se;
                (dev, dev <= 5.0)
            };
            lines.push(Conformance {
                setting,
                outcome: label.as_str().to_string(),
                analytic: p,
                empirical: freq,
                sigma_deviation,
                ok,
            });
        }
    }
    Ok(lines)
}

/// Serialization formats for record streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" | "jsonl" => Ok(Format::JsonLines),
            _ => Err(Error::Parse(format!(
                "unknown format `{s}` (expected csv or json)"
            ))),
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::JsonLines => "jsonl",
        }
    }
}

/// Stable record CSV header.
pub const CSV_HEADER: &str =
    "atom_index,setting,alice_detected,alice_value,bob_form,bob_spin,bob_location,seq_control,seq_result";

/// Lossless, deterministic serialization of a record stream.
pub fn serialize_records(records: &[RunRecord], format: Format) -> Vec<u8> {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in records {
                let value = r.alice_value.map(fmt_f64).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    r.atom_index,
                    r.setting.as_str(),
                    u8::from(r.alice_detected),
                    value,
                    r.bob_form.as_str(),
                    r.bob_spin.as_str(),
                    r.bob_location.as_str(),
                    r.seq_control,
                    r.seq_result
                ));
            }
        }
        Format::JsonLines => {
            for r in records {
                let value = r
                    .alice_value
                    .map(fmt_f64)
                    .unwrap_or_else(|| "null".to_string());
                out.push_str(&format!(
                    "{{\"atom_index\":{},\"setting\":\"{}\",\"alice_detected\":{},\"alice_value\":{},\"bob_form\":\"{}\",\"bob_spin\":\"{}\",\"bob_location\":\"{}\",\"seq_control\":{},\"seq_result\":{}}}\n",
                    r.atom_index,
                    r.setting.as_str(),
                    r.alice_detected,
                    value,
                    r.bob_form.as_str(),
                    r.bob_spin.as_str(),
                    r.bob_location.as_str(),
                    r.seq_control,
                    r.seq_result
                ));
            }
        }
    }
    out.into_bytes()
}

fn parse_bool_flag(s: &str) -> Result<bool> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(Error::Parse(format!("expected 0 or 1, got `{s}`"))),
    }
}

/// Inverse of `serialize_records`.
pub fn parse_records(bytes: &[u8], format: Format) -> Result<Vec<RunRecord>> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::Parse(format!("record stream is not UTF-8: {e}")))?;
    let mut records = Vec::new();
    match format {
        Format::Csv => {
            let mut lines = text.lines();
            match lines.next() {
                Some(header) if header == CSV_HEADER => {}
                other => {
                    return Err(Error::Parse(format!(
                        "bad CSV header: {other:?} (expected `{CSV_HEADER}`)"
                    )))
                }
            }
            for (lineno, line) in lines.enumerate() {
                if line.is_empty() {
                    continue;
                }
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != 9 {
                    return Err(Error::Parse(format!(
                        "line {}: expected 9 fields, found {}",
                        lineno + 2,
                        fields.len()
                    )));
                }
                let parse_u64 = |s: &str| {
                    s.parse::<u64>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))
                };
                let alice_value = if fields[3].is_empty() {
                    None
                } else {
                    Some(fields[3].parse::<f64>().map_err(|e| {
                        Error::Parse(format!("line {}: bad alice_value: {e}", lineno + 2))
                    })?)
                };
                records.push(RunRecord {
                    atom_index: parse_u64(fields[0])?,
                    setting: Setting::parse(fields[1])?,
                    alice_detected: parse_bool_flag(fields[2])?,
                    alice_value,
                    bob_form: StateForm::parse(fields[4])?,
                    bob_spin: SpinLabel::parse(fields[5])?,
                    bob_location: Location::parse(fields[6])?,
                    seq_control: parse_u64(fields[7])?,
                    seq_result: parse_u64(fields[8])?,
                });
            }
        }
        Format::JsonLines => {
            for (lineno, line) in text.lines().enumerate() {
                if line.is_empty() {
                    continue;
                }
                let v: serde_json::Value = serde_json::from_str(line)
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
                let get = |key: &str| {
                    v.get(key)
                        .ok_or_else(|| Error::Parse(format!("line {}: missing {key}", lineno + 1)))
                };
                let get_u64 = |key: &str| -> Result<u64> {
                    get(key)?
                        .as_u64()
                        .ok_or_else(|| Error::Parse(format!("line {}: bad {key}", lineno + 1)))
                };
                let get_str = |key: &str| -> Result<String> {
                    Ok(get(key)?
                        .as_str()
                        .ok_or_else(|| Error::Parse(format!("line {}: bad {key}", lineno + 1)))?
                        .to_string())
                };
                let alice_value = match get("alice_value")? {
                    serde_json::Value::Null => None,
                    other => Some(other.as_f64().ok_or_else(|| {
                        Error::Parse(format!("line {}: bad alice_value", lineno + 1))
                    })?),
                };
                records.push(RunRecord {
                    atom_index: get_u64("atom_index")?,
                    setting: Setting::parse(&get_str("setting")?)?,
                    alice_detected: get("alice_detected")?.as_bool().ok_or_else(|| {
                        Error::Parse(format!("line {}: bad alice_detected", lineno + 1))
                    })?,
                    alice_value,
                    bob_form: StateForm::parse(&get_str("bob_form")?)?,
                    bob_spin: SpinLabel::parse(&get_str("bob_spin")?)?,
                    bob_location: Location::parse(&get_str("bob_location")?)?,
                    seq_control: get_u64("seq_control")?,
                    seq_result: get_u64("seq_result")?,
                });
            }
        }
    }
    Ok(records)
}
