//! Command line front end: run scenarios, analyze taps, sweep parameter
//! grids, and audit bound traces.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 invariant
//! violation (a guarantee the toolkit promises was observed broken).

use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use ptpsim_core::adversary::write_attack_trace;
use ptpsim_core::detector::{
    classify_detected, detect_profile, DetectedProfile, DetectorConfig, DirectionMode,
};
use ptpsim_core::guard::{read_bound_trace, write_bound_trace};
use ptpsim_core::harness::{run_scenario, run_sweep, verify_bound_trace, Scenario, SweepGrid};
use ptpsim_core::net::{read_obs_trace, write_obs_trace, Observation};
use ptpsim_core::ptp::{read_sync_trace, write_sync_trace};

#[derive(Parser)]
#[command(name = "ptpsim", version, about = "Delay-attack simulator and analysis toolkit for two-step clock synchronization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file and write its traces and summary.
    Simulate {
        /// Scenario file (key=value format).
        scenario: PathBuf,
        /// Output directory for sync.trace, bound.trace, obs.trace,
        /// attack.trace, and summary.txt.
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover a synchronization profile from an observation trace.
    Detect {
        /// Observation trace as written by `simulate` (obs.trace).
        obs_trace: PathBuf,
        /// Profile output path; packet labels land next to it in
        /// `<out>.classified`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every combination of a parameter grid over a base scenario.
    Sweep {
        /// Base scenario file.
        scenario: PathBuf,
        /// Grid file: one `key=value1,value2,...` axis per line.
        #[arg(long)]
        grid: PathBuf,
        /// Output directory for sweep.tsv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Audit the bound trace of a finished run against its sync trace.
    VerifyBounds {
        /// Directory holding bound.trace and sync.trace.
        dir: PathBuf,
    },
}

/// Failures split by exit code.
enum Failure {
    /// Bad input: unreadable files, invalid scenarios, malformed traces.
    Config(anyhow::Error),
    /// A promised guarantee did not hold on real output.
    Invariant(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Invariant(_) => 2,
        }
    }

    fn message(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Invariant(e) => e,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate { scenario, out } => simulate(&scenario, &out),
        Command::Detect { obs_trace, out } => detect(&obs_trace, &out),
        Command::Sweep { scenario, grid, out } => sweep(&scenario, &grid, &out),
        Command::VerifyBounds { dir } => verify_bounds(&dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Config)?;
    Scenario::parse(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::Config)
}

fn simulate(scenario_path: &Path, out: &Path) -> Result<(), Failure> {
    let scenario = load_scenario(scenario_path)?;
    let art = run_scenario(&scenario).map_err(|e| {
        if e.is_config() {
            Failure::Config(anyhow!(e))
        } else {
            Failure::Invariant(anyhow!(e))
        }
    })?;

    fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(Failure::Config)?;
    let write = |name: &str, go: &dyn Fn(&mut Vec<u8>) -> anyhow::Result<()>| -> Result<(), Failure> {
        let mut buf = Vec::new();
        go(&mut buf).map_err(Failure::Config)?;
        fs::write(out.join(name), buf)
            .with_context(|| format!("writing {name}"))
            .map_err(Failure::Config)
    };
    write("sync.trace", &|w| Ok(write_sync_trace(w, &art.sync_records)?))?;
    write("bound.trace", &|w| Ok(write_bound_trace(w, &art.bound_records)?))?;
    write("obs.trace", &|w| Ok(write_obs_trace(w, &art.observations)?))?;
    write("attack.trace", &|w| Ok(write_attack_trace(w, &art.attack_records)?))?;
    fs::write(out.join("summary.txt"), art.summary.to_text())
        .context("writing summary.txt")
        .map_err(Failure::Config)?;

    print!("{}", art.summary.to_text());
    if art.summary.bound_violations > 0 {
        return Err(Failure::Invariant(anyhow!(
            "{} bound violations recorded; traces written to {}",
            art.summary.bound_violations,
            out.display()
        )));
    }
    Ok(())
}

fn detect(obs_path: &Path, out: &Path) -> Result<(), Failure> {
    let file = fs::File::open(obs_path)
        .with_context(|| format!("opening {}", obs_path.display()))
        .map_err(Failure::Config)?;
    let observations = read_obs_trace(BufReader::new(file))
        .with_context(|| format!("reading {}", obs_path.display()))
        .map_err(Failure::Config)?;

    let config = DetectorConfig::default();
    let profile = detect_profile(&observations, DirectionMode::Observed, &config)
        .map_err(|e| Failure::Config(anyhow!("no profile recovered: {e}")))?;

    fs::write(out, profile_text(&profile))
        .with_context(|| format!("writing {}", out.display()))
        .map_err(Failure::Config)?;

    let mut classified_path = out.as_os_str().to_owned();
    classified_path.push(".classified");
    fs::write(&classified_path, classified_text(&observations, &profile))
        .context("writing classified observations")
        .map_err(Failure::Config)?;

    println!(
        "recovered {} profile, confidence {:.3}; labels in {}",
        match profile {
            DetectedProfile::Periodic(_) => "periodic",
            DetectedProfile::Sparse(_) => "sparse",
        },
        profile.confidence(),
        PathBuf::from(classified_path).display()
    );
    Ok(())
}

fn profile_text(profile: &DetectedProfile) -> String {
    let mut out = String::from("# profile v1\n");
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k}={v}");
    };
    match profile {
        DetectedProfile::Periodic(p) => {
            kv("kind", "periodic".into());
            kv("confidence", p.confidence.to_string());
            kv("cycle_period_ns", p.cycle_period.as_ns().to_string());
            kv("sync_phase_ns", p.sync_phase.as_ns().to_string());
            kv("sync_to_followup_ns", p.sync_to_followup.as_ns().to_string());
            kv("followup_to_delayreq_ns", p.followup_to_delayreq.as_ns().to_string());
            kv("delayreq_to_delayresp_ns", p.delayreq_to_delayresp.as_ns().to_string());
            kv("cycle_msg_len", p.cycle_msg_len.to_string());
            kv("delayreq_len", p.delayreq_len.to_string());
            if let Some(len) = p.announce_len {
                kv("announce_len", len.to_string());
            }
            if let Some(period) = p.announce_period {
                kv("announce_period_ns", period.as_ns().to_string());
            }
            if let Some(phase) = p.announce_phase {
                kv("announce_phase_ns", phase.as_ns().to_string());
            }
        }
        DetectedProfile::Sparse(s) => {
            kv("kind", "sparse".into());
            kv("confidence", s.confidence.to_string());
            kv("delayreq_len", s.delayreq_len.to_string());
            let classes = s
                .classes
                .iter()
                .map(|(k, n)| {
                    let dir = k.direction.map(|d| d.to_string()).unwrap_or_else(|| "?".into());
                    format!("{}:{}:{}", k.wire_len, dir, n)
                })
                .collect::<Vec<_>>()
                .join(";");
            kv("classes", classes);
        }
    }
    out
}

fn classified_text(observations: &[Observation], profile: &DetectedProfile) -> String {
    let mut out = String::from("# classified v1\n");
    out.push_str("seen_at_ns,length_bytes,direction,label\n");
    for obs in observations {
        let label = classify_detected(obs, profile)
            .label
            .map(|k| k.to_string())
            .unwrap_or_else(|| "unrelated".into());
        let _ = writeln!(out, "{},{},{},{label}", obs.seen_at.as_ns(), obs.wire_len, obs.direction);
    }
    out
}

fn sweep(scenario_path: &Path, grid_path: &Path, out: &Path) -> Result<(), Failure> {
    let base = load_scenario(scenario_path)?;
    let grid_text = fs::read_to_string(grid_path)
        .with_context(|| format!("reading {}", grid_path.display()))
        .map_err(Failure::Config)?;
    let grid = SweepGrid::parse(&grid_text)
        .with_context(|| format!("parsing {}", grid_path.display()))
        .map_err(Failure::Config)?;

    let outcomes = run_sweep(&base, &grid);
    fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(Failure::Config)?;

    let mut table = String::from("# sweep-table v1\n");
    table.push_str(
        "index\toverrides\tstatus\tcycles_completed\tcycles_rejected\treplay_rejected\t\
         bound_violations\tconverged_offset_ns\tfinal_true_offset_ns\tmax_abs_measured_ns\t\
         detector_confidence\tattack_packets_delayed\tattack_total_injected_ns\n",
    );
    let mut failures = 0usize;
    for o in &outcomes {
        let overrides = if o.overrides.is_empty() {
            "-".to_string()
        } else {
            o.overrides
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";")
        };
        match &o.result {
            Ok(s) => {
                let _ = writeln!(
                    table,
                    "{}\t{}\tok\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    o.index,
                    overrides,
                    s.cycles_completed,
                    s.cycles_rejected,
                    s.replay_rejected,
                    s.bound_violations,
                    s.converged_offset.as_ns(),
                    s.final_true_offset.as_ns(),
                    s.max_abs_measured.as_ns(),
                    s.detector_confidence.map(|c| c.to_string()).unwrap_or_else(|| "-".into()),
                    s.attack.packets_delayed,
                    s.attack.total_injected.as_ns(),
                );
            }
            Err(e) => {
                failures += 1;
                let _ = writeln!(table, "{}\t{}\terror: {}", o.index, overrides, e);
            }
        }
    }
    let table_path = out.join("sweep.tsv");
    fs::write(&table_path, table)
        .with_context(|| format!("writing {}", table_path.display()))
        .map_err(Failure::Config)?;

    println!(
        "{} of {} points succeeded; table in {}",
        outcomes.len() - failures,
        outcomes.len(),
        table_path.display()
    );
    if failures == outcomes.len() {
        return Err(Failure::Config(anyhow!("every grid point failed; see {}", table_path.display())));
    }
    Ok(())
}

fn verify_bounds(dir: &Path) -> Result<(), Failure> {
    let open = |name: &str| -> Result<fs::File, Failure> {
        fs::File::open(dir.join(name))
            .with_context(|| format!("opening {}", dir.join(name).display()))
            .map_err(Failure::Config)
    };
    let bounds = read_bound_trace(BufReader::new(open("bound.trace")?))
        .context("reading bound.trace")
        .map_err(Failure::Config)?;
    let syncs = read_sync_trace(BufReader::new(open("sync.trace")?))
        .context("reading sync.trace")
        .map_err(Failure::Config)?;

    let check = verify_bound_trace(&bounds, &syncs);
    println!("{}", check.report());
    if check.is_clean() {
        Ok(())
    } else {
        Err(Failure::Invariant(anyhow!("bound trace failed verification")))
    }
}
