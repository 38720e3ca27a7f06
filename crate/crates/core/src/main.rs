//! Command-line surface of the simulator: density grids, Monte Carlo
//! measurement runs, boxes-model reports, protocol execution and the
//! invariant battery.
//!
//! Exit codes: 0 success, 1 statistical/invariant failure, 2 usage or
//! config error. SGSIM_OUT_DIR, when set, is the directory that relative
//! output paths are resolved against.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use sgsim::boxes::{
    assemblage, full_average_deviation, make_psi2, nonsignaling_check,
    steering_distinguishability, Assemblage,
};
use sgsim::fmt::{fmt_f64, jval};
use sgsim::measurement::{measure, outcome_probabilities, Setting};
use sgsim::numerics::RngStream;
use sgsim::protocol::{
    conformance_report, run_experiment, serialize_records, Format, Model, RunConfig, Schedule,
};
use sgsim::validation::run_suite;
use sgsim::wavefunction::{position_pdf_z, z_bounds, PhysParams};

#[derive(Parser)]
#[command(
    name = "sgsim",
    version,
    about = "Stern-Gerlach single-particle entanglement and steering simulator"
)]
struct Cli {
    /// RNG seed shared by all sampling subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Flat key=value file overriding the dimensionless default parameters.
    #[arg(long, global = true, value_name = "FILE")]
    params: Option<PathBuf>,

    /// Output path; stdout when omitted (protocol records default to
    /// records.<ext>).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Record file format.
    #[arg(long, global = true, default_value = "csv")]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spatial density grid: columns z, pdf_total, pdf_up, pdf_down.
    Pdf {
        #[arg(long)]
        time: f64,
        /// Lower grid bound (default: both branches minus 8 widths).
        #[arg(long)]
        z_min: Option<f64>,
        /// Upper grid bound (default: both branches plus 8 widths).
        #[arg(long)]
        z_max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        grid_points: usize,
    },
    /// Seeded Monte Carlo outcome frequencies next to the analytic
    /// probabilities.
    Measure {
        #[arg(long)]
        setting: String,
        #[arg(long)]
        time: f64,
        #[arg(long, short = 'n', default_value_t = 10_000)]
        samples: u64,
    },
    /// Boxes-model report: assemblages, non-signaling deviations and
    /// trace-distance matrices.
    Boxes,
    /// Full protocol run: records file plus tally/conformance report.
    Protocol {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        time: f64,
        /// Comma-separated settings list.
        #[arg(long, default_value = "spin_z")]
        settings: String,
        /// fixed | alternating | random.
        #[arg(long, default_value = "fixed")]
        schedule: String,
        /// continuous | boxes.
        #[arg(long, default_value = "continuous")]
        model: String,
    },
    /// Run the invariant battery and report machine-readable results.
    Validate,
}

fn load_params(path: Option<&Path>) -> Result<PhysParams, String> {
    let mut params = PhysParams::default();
    if let Some(path) = path {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read params file {}: {e}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), lineno + 1))?;
            let value: f64 = value.trim().parse().map_err(|e| {
                format!("{}:{}: bad number: {e}", path.display(), lineno + 1)
            })?;
            params
                .set_field(key.trim(), value)
                .map_err(|e| format!("{}:{}: {e}", path.display(), lineno + 1))?;
        }
    }
    params.validate().map_err(|e| e.to_string())?;
    Ok(params)
}

/// Resolve an output path against SGSIM_OUT_DIR for relative paths.
fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var("SGSIM_OUT_DIR") {
            if !dir.is_empty() {
                return PathBuf::from(dir).join(path);
            }
        }
    }
    path.to_path_buf()
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            let path = resolve_out(path);
            fs::write(&path, content)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_pdf(
    params: &PhysParams,
    out: Option<&Path>,
    time: f64,
    z_min: Option<f64>,
    z_max: Option<f64>,
    grid_points: usize,
) -> Result<ExitCode, String> {
    if grid_points < 2 {
        return Err(format!("grid-points must be at least 2, got {grid_points}"));
    }
    if !(time >= 0.0 && time.is_finite()) {
        return Err(format!("time must be finite and non-negative, got {time}"));
    }
    let (default_lo, default_hi) = z_bounds(time, params, 8.0);
    let lo = z_min.unwrap_or(default_lo);
    let hi = z_max.unwrap_or(default_hi);
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(format!("z-min must be below z-max, got [{lo}, {hi}]"));
    }
    let step = (hi - lo) / (grid_points - 1) as f64;
    let mut content = String::from("z,pdf_total,pdf_up,pdf_down\n");
    for i in 0..grid_points {
        let z = lo + step * i as f64;
        let pdf = position_pdf_z(z, time, params);
        content.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(z),
            fmt_f64(pdf.total),
            fmt_f64(pdf.up_part),
            fmt_f64(pdf.down_part)
        ));
    }
    emit(out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_measure(
    params: &PhysParams,
    out: Option<&Path>,
    seed: u64,
    setting: &str,
    time: f64,
    samples: u64,
) -> Result<ExitCode, String> {
    let setting = Setting::parse(setting).map_err(|e| e.to_string())?;
    if samples == 0 {
        return Err("samples must be at least 1".into());
    }
    if !(time >= 0.0 && time.is_finite()) {
        return Err(format!("time must be finite and non-negative, got {time}"));
    }

    let probs = outcome_probabilities(setting, time, params);
    let mut rng = RngStream::new(seed, 0);
    let mut first_count = 0u64;
    for _ in 0..samples {
        let (outcome, _) = measure(setting, time, params, &mut rng);
        let first = match setting {
            Setting::PositionZ | Setting::MomentumZ => outcome.detected_locally,
            Setting::SpinZ | Setting::SpinX => outcome.value > 0.0,
        };
        if first {
            first_count += 1;
        }
    }

    let n = samples as f64;
    let mut all_ok = true;
    let outcomes: Vec<Value> = probs
        .iter()
        .enumerate()
        .map(|(i, (label, p))| {
            let count = if i == 0 {
                first_count
            } else {
                samples - first_count
            };
            let freq = count as f64 / n;
            let se = (p * (1.0 - p) / n).sqrt();
            let (sigma, ok) = if se == 0.0 {
                (if freq == *p { 0.0 } else { f64::INFINITY }, freq == *p)
            } else {
                let dev = (freq - p).abs() / se;
                (dev, dev <= 5.0)
            };
            all_ok &= ok;
            json!({
                "label": label.as_str(),
                "analytic_probability": jval(*p),
                "count": count,
                "empirical_frequency": jval(freq),
                "std_error": jval(se),
                "sigma_deviation": jval(sigma),
                "ok": ok,
            })
        })
        .collect();

    let report = json!({
        "setting": setting.as_str(),
        "time": jval(time),
        "samples": samples,
        "seed": seed,
        "outcomes": outcomes,
        "all_within_5_sigma": all_ok,
    });
    emit(out, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn assemblage_json(asm: &Assemblage) -> Value {
    let members: Vec<Value> = asm
        .members
        .iter()
        .map(|m| {
            let rows: Vec<Value> = (0..4)
                .map(|i| {
                    let row: Vec<Value> = (0..4)
                        .map(|j| {
                            let e = m.state.entry(i, j);
                            json!([jval(e.re), jval(e.im)])
                        })
                        .collect();
                    Value::Array(row)
                })
                .collect();
            json!({
                "label": m.label.as_str(),
                "probability": jval(m.probability),
                "state": rows,
            })
        })
        .collect();
    json!({
        "setting": asm.setting.as_str(),
        "members": members,
    })
}

fn cmd_boxes(out: Option<&Path>) -> Result<ExitCode, String> {
    let psi2 = make_psi2();
    let settings = [Setting::PositionZ, Setting::SpinZ, Setting::SpinX];
    let assemblages: Vec<Assemblage> = settings
        .iter()
        .map(|&s| assemblage(&psi2, s).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;

    let nonsignaling = nonsignaling_check(&psi2, &settings).map_err(|e| e.to_string())?;
    let full_dev = full_average_deviation(&psi2, &settings).map_err(|e| e.to_string())?;

    let mut distinguishability = Vec::new();
    for i in 0..assemblages.len() {
        for j in (i + 1)..assemblages.len() {
            let report = steering_distinguishability(&assemblages[i], &assemblages[j]);
            let matrix: Vec<Value> = report
                .matrix
                .iter()
                .map(|row| Value::Array(row.iter().map(|d| jval(*d)).collect()))
                .collect();
            distinguishability.push(json!({
                "settings": [settings[i].as_str(), settings[j].as_str()],
                "row_labels": report.row_labels.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
                "col_labels": report.col_labels.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
                "matrix": matrix,
                "max_min_trace_distance": jval(report.max_min_distance),
            }));
        }
    }

    let report = json!({
        "state": "psi2",
        "basis": ["paris_up", "paris_down", "tokyo_up", "tokyo_down"],
        "assemblages": assemblages.iter().map(assemblage_json).collect::<Vec<_>>(),
        "nonsignaling": {
            "path_marginal_deviation": jval(nonsignaling),
            "full_state_deviation": jval(full_dev),
        },
        "distinguishability": distinguishability,
    });
    emit(out, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
    Ok(ExitCode::SUCCESS)
}

fn parse_schedule(schedule: &str, settings: &str) -> Result<Schedule, String> {
    let list: Vec<Setting> = settings
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| Setting::parse(s.trim()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err("settings list must not be empty".into());
    }
    match schedule {
        "fixed" => {
            if list.len() != 1 {
                Err(format!(
                    "fixed schedule takes exactly one setting, got {}",
                    list.len()
                ))
            } else {
                Ok(Schedule::Fixed(list[0]))
            }
        }
        "alternating" => Ok(Schedule::Alternating(list)),
        "random" => Ok(Schedule::Random(list)),
        other => Err(format!(
            "unknown schedule `{other}` (expected fixed, alternating or random)"
        )),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_protocol(
    params: &PhysParams,
    out: Option<&Path>,
    seed: u64,
    format: Format,
    n: u64,
    time: f64,
    settings: &str,
    schedule: &str,
    model: &str,
) -> Result<ExitCode, String> {
    let config = RunConfig {
        n_atoms: n,
        schedule: parse_schedule(schedule, settings)?,
        evolution_time: time,
        params: *params,
        seed,
        model: Model::parse(model).map_err(|e| e.to_string())?,
    };
    config.validate().map_err(|e| e.to_string())?;

    let (records, tally) = run_experiment(&config).map_err(|e| e.to_string())?;
    let bytes = serialize_records(&records, format);
    let records_path = resolve_out(
        out.map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(format!("records.{}", format.extension())))
            .as_path(),
    );
    fs::write(&records_path, &bytes)
        .map_err(|e| format!("cannot write {}: {e}", records_path.display()))?;

    let conformance = conformance_report(&tally, &config).map_err(|e| e.to_string())?;
    let all_ok = conformance.iter().all(|c| c.ok);

    let per_setting: Vec<Value> = tally
        .per_setting
        .iter()
        .map(|(setting, st)| {
            let outcomes: Vec<Value> = st
                .outcomes
                .iter()
                .map(|(key, stat)| {
                    json!({
                        "outcome": key,
                        "count": stat.count,
                        "frequency": jval(stat.frequency),
                        "std_error": jval(stat.std_error),
                    })
                })
                .collect();
            json!({
                "setting": setting.as_str(),
                "n": st.n,
                "outcomes": outcomes,
            })
        })
        .collect();
    let sides: Vec<Value> = tally
        .side_counts
        .iter()
        .map(|(side, count)| json!({"side": side, "count": count}))
        .collect();
    let conformance_json: Vec<Value> = conformance
        .iter()
        .map(|c| {
            json!({
                "setting": c.setting.as_str(),
                "outcome": c.outcome,
                "analytic": jval(c.analytic),
                "empirical": jval(c.empirical),
                "sigma_deviation": jval(c.sigma_deviation),
                "ok": c.ok,
            })
        })
        .collect();

    let report = json!({
        "n_atoms": tally.n_atoms,
        "seed": seed,
        "time": jval(time),
        "model": config.model.as_str(),
        "records_file": records_path.display().to_string(),
        "tally": {
            "per_setting": per_setting,
            "side_counts": sides,
        },
        "conformance": conformance_json,
        "all_within_5_sigma": all_ok,
    });
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_validate(params: &PhysParams, out: Option<&Path>, seed: u64) -> Result<ExitCode, String> {
    let report = run_suite(params, seed);
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "kind": c.kind.as_str(),
                "passed": c.passed,
                "value": jval(c.value),
                "threshold": c.threshold.map(jval),
                "detail": c.detail,
            })
        })
        .collect();
    let doc = json!({
        "seed": seed,
        "checks": checks,
        "hard_failures": report.hard_failures(),
        "passed": report.passed(),
    });
    emit(out, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let params = load_params(cli.params.as_deref())?;
    let format = Format::parse(&cli.format).map_err(|e| e.to_string())?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Pdf {
            time,
            z_min,
            z_max,
            grid_points,
        } => cmd_pdf(&params, out, time, z_min, z_max, grid_points),
        Command::Measure {
            setting,
            time,
            samples,
        } => cmd_measure(&params, out, cli.seed, &setting, time, samples),
        Command::Boxes => cmd_boxes(out),
        Command::Protocol {
            n,
            time,
            settings,
            schedule,
            model,
        } => cmd_protocol(
            &params, out, cli.seed, format, n, time, &settings, &schedule, &model,
        ),
        Command::Validate => cmd_validate(&params, out, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
