//! Scenario definition: one self-contained simulation configuration.
//!
//! A scenario fixes everything a run needs: both clocks, the link, the
//! protocol engine, the tunnel, the attack plan, the classifier feeding the
//! attacker, the slave-side guards, and any background traffic. Scenarios
//! serialize to flat `key=value` text (one pair per line, `#` comments,
//! dotted section prefixes) so files stay diffable and sweep tooling can
//! override individual keys without a structured-format dependency. All
//! durations are integer nanoseconds; drift and ramp rates are integer
//! parts per billion.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::adversary::{ActiveWindow, AttackKind, AttackPlan, KindSet};
use crate::detector::DetectorConfig;
use crate::guard::{
    OwdConstraints, PaddingPolicy, ReplayPolicy, SystemBoundParams, TimingRandomization,
};
use crate::net::{Direction, EncryptionScheme, Jitter, LinkProfile, NoiseParams};
use crate::ptp::{EngineConfig, MessageKind};
use crate::sim::{Duration, Ppm, SimTime};

/// Initial state of one endpoint's clock relative to true time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockSpec {
    pub offset: Duration,
    /// Frequency error in whole parts per billion (keeps files exact).
    pub drift_ppb: i64,
}

impl ClockSpec {
    pub fn ideal() -> ClockSpec {
        ClockSpec { offset: Duration::ZERO, drift_ppb: 0 }
    }

    pub fn drift(&self) -> Ppm {
        Ppm::from_ppb(self.drift_ppb)
    }
}

/// How the attacker labels packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierSpec {
    /// Ground-truth labels (upper-bounds what traffic analysis can do).
    Oracle,
    /// Profile fitted from tap observations collected during `warmup`;
    /// the plan stays inert if the fit fails or is not confident enough.
    Estimated { warmup: SimTime },
}

/// Slave- and master-side defenses active during the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardSpec {
    /// Compute and record per-cycle offset bounds.
    pub bounds_enabled: bool,
    /// One-way delay floors the bounds are built from.
    pub floors: OwdConstraints,
    /// Round-trip gate plus system-level guarantee parameters. When set,
    /// cycles whose round trip exceeds `rtd_max` are rejected before the
    /// servo sees them.
    pub system: Option<SystemBoundParams>,
    /// Tunnel anti-replay window, enforced per direction at the receiver.
    pub replay: Option<ReplayPolicy>,
    pub padding: PaddingPolicy,
    /// Emission-time randomization. `None` keeps the engine's fixed lags.
    pub timing: Option<TimingRandomization>,
}

impl GuardSpec {
    pub fn disabled() -> GuardSpec {
        GuardSpec {
            bounds_enabled: false,
            floors: OwdConstraints::new(Duration::ZERO, Duration::ZERO)
                .expect("zero floors are valid"),
            system: None,
            replay: None,
            padding: PaddingPolicy::None,
            timing: None,
        }
    }
}

/// Decoy traffic sent through the tunnel in both directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverSpec {
    /// Mean packets per second per direction (Poisson arrivals).
    pub rate_hz: f64,
    pub min_len: u32,
    pub max_len: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub duration: SimTime,
    pub master_clock: ClockSpec,
    pub slave_clock: ClockSpec,
    pub link: LinkProfile,
    pub engine: EngineConfig,
    pub encryption: EncryptionScheme,
    pub attack: AttackPlan,
    pub classifier: ClassifierSpec,
    pub guard: GuardSpec,
    /// Unrelated background packets visible only to the tap.
    pub noise: Option<NoiseParams>,
    pub cover: Option<CoverSpec>,
    /// Tuning for the attacker's profile fit (not serialized; file-loaded
    /// scenarios always use the defaults).
    pub detector: DetectorConfig,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: expected key=value, got {got:?}")]
    Syntax { line: usize, got: String },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("key {key}: {msg}")]
    BadValue { key: String, msg: String },
    #[error("missing required key {key:?}")]
    MissingKey { key: &'static str },
    #[error("keys {group:?} must be given together")]
    PartialGroup { group: &'static str },
    #[error("{0}")]
    Config(String),
}

fn config<T: std::fmt::Display>(msg: T) -> ScenarioError {
    ScenarioError::Config(msg.to_string())
}

impl Scenario {
    /// Benign starting point: ideal master, slave 10 ms ahead, symmetric
    /// 2 ms link, default engine, tunnel encryption, no attack, no guards.
    pub fn base(name: &str) -> Scenario {
        Scenario {
            name: name.to_string(),
            seed: 1,
            duration: SimTime::from_secs(60),
            master_clock: ClockSpec::ideal(),
            slave_clock: ClockSpec { offset: Duration::from_millis(10), drift_ppb: 0 },
            link: LinkProfile {
                base_delay: Duration::from_millis(2),
                ..LinkProfile::default()
            },
            engine: EngineConfig::default(),
            encryption: EncryptionScheme::ipsec_tunnel(),
            attack: AttackPlan::none(),
            classifier: ClassifierSpec::Oracle,
            guard: GuardSpec::disabled(),
            noise: None,
            cover: None,
            detector: DetectorConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(config(format!(
                "name {:?} must be non-empty [A-Za-z0-9_-] (it names output files)",
                self.name
            )));
        }
        if self.duration == SimTime::ZERO {
            return Err(config("duration must be positive"));
        }
        self.link.validate().map_err(config)?;
        self.engine.validate().map_err(config)?;
        self.attack.validate().map_err(config)?;
        self.detector.validate().map_err(config)?;
        if let ClassifierSpec::Estimated { warmup } = self.classifier {
            if warmup == SimTime::ZERO || warmup > self.duration {
                return Err(config("classifier warmup must be in (0, duration]"));
            }
        }
        if self.guard.bounds_enabled {
            for (dir, floor) in [
                (Direction::MasterToSlave, self.guard.floors.to_slave),
                (Direction::SlaveToMaster, self.guard.floors.to_master),
            ] {
                if floor > self.link.deterministic_floor(dir) {
                    return Err(config(format!(
                        "{dir} floor exceeds the link's deterministic floor; \
                         the bound guarantee would not hold"
                    )));
                }
            }
        }
        if let Some(system) = &self.guard.system {
            system.validate(&self.guard.floors).map_err(config)?;
        }
        if let Some(timing) = &self.guard.timing {
            timing.validate().map_err(config)?;
        }
        for kind in MessageKind::ALL {
            crate::guard::apply_padding(kind.plain_len(), self.guard.padding, &self.encryption)
                .map_err(|e| config(format!("{kind}: {e}")))?;
        }
        if let Some(noise) = &self.noise {
            noise.validate().map_err(config)?;
        }
        if let Some(cover) = &self.cover {
            if !(cover.rate_hz > 0.0) || !cover.rate_hz.is_finite() {
                return Err(config("cover rate must be positive and finite"));
            }
            if cover.min_len == 0 || cover.min_len > cover.max_len {
                return Err(config("cover lengths need 0 < min <= max"));
            }
            for len in [cover.min_len, cover.max_len] {
                crate::guard::apply_padding(len, self.guard.padding, &self.encryption)
                    .map_err(|e| config(format!("cover length {len}: {e}")))?;
            }
        }
        Ok(())
    }

    /// Serializes to the `key=value` text form. `parse` inverts this
    /// exactly (defaulted detector tuning aside, which never serializes).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "name={}", self.name);
        let _ = writeln!(w, "seed={}", self.seed);
        let _ = writeln!(w, "duration_ns={}", self.duration.as_ns());
        for (side, clock) in [("master", self.master_clock), ("slave", self.slave_clock)] {
            let _ = writeln!(w, "clock.{side}.offset_ns={}", clock.offset.as_ns());
            let _ = writeln!(w, "clock.{side}.drift_ppb={}", clock.drift_ppb);
        }
        let _ = writeln!(w, "link.base_delay_ns={}", self.link.base_delay.as_ns());
        let _ = writeln!(w, "link.extra_to_slave_ns={}", self.link.extra_to_slave.as_ns());
        let _ = writeln!(w, "link.extra_to_master_ns={}", self.link.extra_to_master.as_ns());
        let _ = writeln!(w, "link.jitter={}", jitter_text(&self.link.jitter));
        if let Some(rate) = self.link.rate {
            let _ = writeln!(w, "link.rate_bytes_per_s={rate}");
        }
        if let Some(tap) = self.link.tap_offset_to_slave {
            let _ = writeln!(w, "link.tap_to_slave_ns={}", tap.as_ns());
        }
        if let Some(tap) = self.link.tap_offset_to_master {
            let _ = writeln!(w, "link.tap_to_master_ns={}", tap.as_ns());
        }
        let _ = writeln!(w, "engine.sync_interval_ns={}", self.engine.sync_interval.as_ns());
        let _ = writeln!(
            w,
            "engine.announce_interval_ns={}",
            self.engine.announce_interval.as_ns()
        );
        let _ = writeln!(w, "engine.followup_lag_ns={}", self.engine.followup_lag.as_ns());
        let _ = writeln!(w, "engine.delayreq_lag_ns={}", self.engine.delayreq_lag.as_ns());
        let _ = writeln!(w, "servo.alpha={}", self.engine.servo.alpha);
        let _ = writeln!(
            w,
            "servo.step_threshold_ns={}",
            self.engine.servo.step_threshold.as_ns()
        );
        let _ = writeln!(w, "servo.enabled={}", self.engine.servo.enabled);
        let _ = writeln!(w, "encryption={}", encryption_text(&self.encryption));
        match &self.attack.kind {
            AttackKind::None => {
                let _ = writeln!(w, "attack.kind=none");
            }
            AttackKind::Selective { targets, delay } => {
                let _ = writeln!(w, "attack.kind=selective");
                let _ = writeln!(w, "attack.targets={targets}");
                let _ = writeln!(w, "attack.delay_ns={}", delay.as_ns());
            }
            AttackKind::Incremental { targets, ramp } => {
                let _ = writeln!(w, "attack.kind=incremental");
                let _ = writeln!(w, "attack.targets={targets}");
                let _ = writeln!(w, "attack.ramp_ppb={}", ppb_of(*ramp));
            }
            AttackKind::AsymmetricLink { direction, delay } => {
                let _ = writeln!(w, "attack.kind=asymmetric");
                let _ = writeln!(w, "attack.direction={direction}");
                let _ = writeln!(w, "attack.delay_ns={}", delay.as_ns());
            }
        }
        if self.attack.kind != AttackKind::None {
            let _ = writeln!(w, "attack.window_start_ns={}", self.attack.window.start.as_ns());
            let _ = writeln!(w, "attack.window_end_ns={}", self.attack.window.end.as_ns());
        }
        match self.classifier {
            ClassifierSpec::Oracle => {
                let _ = writeln!(w, "classifier=oracle");
            }
            ClassifierSpec::Estimated { warmup } => {
                let _ = writeln!(w, "classifier=estimated:{}", warmup.as_ns());
            }
        }
        let _ = writeln!(w, "guard.bounds={}", self.guard.bounds_enabled);
        let _ = writeln!(w, "guard.floor_to_slave_ns={}", self.guard.floors.to_slave.as_ns());
        let _ = writeln!(
            w,
            "guard.floor_to_master_ns={}",
            self.guard.floors.to_master.as_ns()
        );
        if let Some(system) = &self.guard.system {
            let _ = writeln!(w, "guard.rtd_max_ns={}", system.rtd_max.as_ns());
            let _ = writeln!(
                w,
                "guard.correction_interval_ns={}",
                system.correction_interval.as_ns()
            );
            let _ = writeln!(w, "guard.max_drift_ppb={}", ppb_of(system.max_drift));
        }
        if let Some(replay) = &self.guard.replay {
            let _ = writeln!(w, "guard.replay_window={}", replay.window);
        }
        let _ = writeln!(w, "guard.padding={}", padding_text(&self.guard.padding));
        if let Some(t) = &self.guard.timing {
            let _ = writeln!(w, "guard.sync_dither_ns={}", range_text(t.sync_dither));
            let _ = writeln!(w, "guard.followup_lag_ns={}", range_text(t.followup_lag));
            let _ = writeln!(w, "guard.delayreq_lag_ns={}", range_text(t.delayreq_lag));
        }
        if let Some(noise) = &self.noise {
            let _ = writeln!(w, "noise.per_ms={}", noise.per_bin_probability);
            let _ = writeln!(w, "noise.min_len={}", noise.min_len);
            let _ = writeln!(w, "noise.max_len={}", noise.max_len);
        }
        if let Some(cover) = &self.cover {
            let _ = writeln!(w, "cover.rate_hz={}", cover.rate_hz);
            let _ = writeln!(w, "cover.min_len={}", cover.min_len);
            let _ = writeln!(w, "cover.max_len={}", cover.max_len);
        }
        out
    }

    /// Parses the `key=value` text form. Unknown keys are rejected so a
    /// typo cannot silently fall back to a default.
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let mut kv = KvReader::scan(text)?;
        let name = kv.require("name")?;
        let mut scenario = Scenario::base(&name);
        scenario.seed = kv.int("seed")?.unwrap_or(scenario.seed);
        if let Some(ns) = kv.int::<u64>("duration_ns")? {
            scenario.duration = SimTime::from_ns(ns);
        }

        for (side, clock) in [
            ("master", &mut scenario.master_clock),
            ("slave", &mut scenario.slave_clock),
        ] {
            if let Some(ns) = kv.int::<i64>(&format!("clock.{side}.offset_ns"))? {
                clock.offset = Duration::from_ns(ns);
            }
            if let Some(ppb) = kv.int::<i64>(&format!("clock.{side}.drift_ppb"))? {
                clock.drift_ppb = ppb;
            }
        }

        if let Some(ns) = kv.int::<i64>("link.base_delay_ns")? {
            scenario.link.base_delay = Duration::from_ns(ns);
        }
        if let Some(ns) = kv.int::<i64>("link.extra_to_slave_ns")? {
            scenario.link.extra_to_slave = Duration::from_ns(ns);
        }
        if let Some(ns) = kv.int::<i64>("link.extra_to_master_ns")? {
            scenario.link.extra_to_master = Duration::from_ns(ns);
        }
        if let Some(text) = kv.take("link.jitter") {
            scenario.link.jitter = parse_jitter(&text.1)
                .map_err(|msg| ScenarioError::BadValue { key: "link.jitter".into(), msg })?;
        }
        if let Some(rate) = kv.int::<u64>("link.rate_bytes_per_s")? {
            if rate == 0 {
                return Err(ScenarioError::BadValue {
                    key: "link.rate_bytes_per_s".into(),
                    msg: "rate must be positive (omit the key to disable)".into(),
                });
            }
            scenario.link.rate = Some(rate);
        }
        if let Some(ns) = kv.int::<i64>("link.tap_to_slave_ns")? {
            scenario.link.tap_offset_to_slave = Some(Duration::from_ns(ns));
        }
        if let Some(ns) = kv.int::<i64>("link.tap_to_master_ns")? {
            scenario.link.tap_offset_to_master = Some(Duration::from_ns(ns));
        }

        if let Some(ns) = kv.int::<i64>("engine.sync_interval_ns")? {
            scenario.engine.sync_interval = Duration::from_ns(ns);
        }
        if let Some(ns) = kv.int::<i64>("engine.announce_interval_ns")? {
            scenario.engine.announce_interval = Duration::from_ns(ns);
        }
        if let Some(ns) = kv.int::<i64>("engine.followup_lag_ns")? {
            scenario.engine.followup_lag = Duration::from_ns(ns);
        }
        if let Some(ns) = kv.int::<i64>("engine.delayreq_lag_ns")? {
            scenario.engine.delayreq_lag = Duration::from_ns(ns);
        }
        if let Some(alpha) = kv.float("servo.alpha")? {
            scenario.engine.servo.alpha = alpha;
        }
        if let Some(ns) = kv.int::<i64>("servo.step_threshold_ns")? {
            scenario.engine.servo.step_threshold = Duration::from_ns(ns);
        }
        if let Some(enabled) = kv.bool("servo.enabled")? {
            scenario.engine.servo.enabled = enabled;
        }

        if let Some((_, text)) = kv.take("encryption") {
            scenario.encryption = parse_encryption(&text)
                .map_err(|msg| ScenarioError::BadValue { key: "encryption".into(), msg })?;
        }

        scenario.attack = parse_attack(&mut kv, scenario.duration)?;

        if let Some((_, text)) = kv.take("classifier") {
            scenario.classifier = parse_classifier(&text)
                .map_err(|msg| ScenarioError::BadValue { key: "classifier".into(), msg })?;
        }

        scenario.guard = parse_guard(&mut kv)?;
        scenario.noise = parse_noise(&mut kv)?;
        scenario.cover = parse_cover(&mut kv)?;

        kv.finish()?;
        scenario.validate()?;
        Ok(scenario)
    }
}

/// Integral parts-per-billion of a rational rate; scenario files only ever
/// carry whole-ppb rates, which this asserts.
fn ppb_of(rate: Ppm) -> i64 {
    let scaled = rate.numerator() * 1000;
    assert!(
        scaled % rate.denominator() == 0,
        "rate {}/{} is not a whole number of ppb",
        rate.numerator(),
        rate.denominator()
    );
    scaled / rate.denominator()
}

fn jitter_text(jitter: &Jitter) -> String {
    match jitter {
        Jitter::None => "none".to_string(),
        Jitter::Uniform { lo, hi } => format!("uniform:{}:{}", lo.as_ns(), hi.as_ns()),
        Jitter::TruncNormal { mean, sigma } => {
            format!("normal:{}:{}", mean.as_ns(), sigma.as_ns())
        }
    }
}

fn parse_jitter(text: &str) -> Result<Jitter, String> {
    if text == "none" {
        return Ok(Jitter::None);
    }
    let parts: Vec<&str> = text.split(':').collect();
    let two = |a: &str, b: &str| -> Result<(Duration, Duration), String> {
        let lo: i64 = a.parse().map_err(|e| format!("{e}"))?;
        let hi: i64 = b.parse().map_err(|e| format!("{e}"))?;
        Ok((Duration::from_ns(lo), Duration::from_ns(hi)))
    };
    match parts.as_slice() {
        ["uniform", a, b] => {
            let (lo, hi) = two(a, b)?;
            Ok(Jitter::Uniform { lo, hi })
        }
        ["normal", a, b] => {
            let (mean, sigma) = two(a, b)?;
            Ok(Jitter::TruncNormal { mean, sigma })
        }
        _ => Err(format!(
            "expected none, uniform:<lo_ns>:<hi_ns>, or normal:<mean_ns>:<sigma_ns>, got {text:?}"
        )),
    }
}

fn encryption_text(scheme: &EncryptionScheme) -> String {
    if *scheme == EncryptionScheme::ipsec_tunnel() {
        return "ipsec".to_string();
    }
    match scheme {
        EncryptionScheme::Identity => "identity".to_string(),
        EncryptionScheme::BlockAligned { header, block, trailer } => {
            format!("block:{header}:{block}:{trailer}")
        }
        EncryptionScheme::Table(map) => {
            let pairs: Vec<String> =
                map.iter().map(|(plain, wire)| format!("{plain}>{wire}")).collect();
            format!("table:{}", pairs.join(","))
        }
    }
}

fn parse_encryption(text: &str) -> Result<EncryptionScheme, String> {
    match text {
        "ipsec" => return Ok(EncryptionScheme::ipsec_tunnel()),
        "identity" => return Ok(EncryptionScheme::Identity),
        _ => {}
    }
    if let Some(rest) = text.strip_prefix("block:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [h, b, t] = parts.as_slice() else {
            return Err(format!("expected block:<header>:<block>:<trailer>, got {text:?}"));
        };
        let parse = |s: &str| s.parse::<u32>().map_err(|e| format!("{e}"));
        let scheme = EncryptionScheme::BlockAligned {
            header: parse(h)?,
            block: parse(b)?,
            trailer: parse(t)?,
        };
        if let EncryptionScheme::BlockAligned { block: 0, .. } = scheme {
            return Err("block size must be positive".to_string());
        }
        return Ok(scheme);
    }
    if let Some(rest) = text.strip_prefix("table:") {
        let mut pairs = Vec::new();
        for part in rest.split(',') {
            let (plain, wire) = part
                .split_once('>')
                .ok_or_else(|| format!("expected <plain>><wire> pair, got {part:?}"))?;
            pairs.push((
                plain.parse::<u32>().map_err(|e| format!("{e}"))?,
                wire.parse::<u32>().map_err(|e| format!("{e}"))?,
            ));
        }
        return EncryptionScheme::table(pairs).map_err(|e| format!("{e}"));
    }
    Err(format!("unknown encryption scheme {text:?}"))
}

fn padding_text(policy: &PaddingPolicy) -> String {
    match policy {
        PaddingPolicy::None => "none".to_string(),
        PaddingPolicy::SchemeMax => "max".to_string(),
        PaddingPolicy::Fixed(target) => format!("fixed:{target}"),
    }
}

fn parse_padding(text: &str) -> Result<PaddingPolicy, String> {
    match text {
        "none" => Ok(PaddingPolicy::None),
        "max" => Ok(PaddingPolicy::SchemeMax),
        _ => {
            let rest = text
                .strip_prefix("fixed:")
                .ok_or_else(|| format!("expected none, max, or fixed:<bytes>, got {text:?}"))?;
            Ok(PaddingPolicy::Fixed(rest.parse().map_err(|e| format!("{e}"))?))
        }
    }
}

fn range_text(range: (Duration, Duration)) -> String {
    format!("{}:{}", range.0.as_ns(), range.1.as_ns())
}

fn parse_range(text: &str) -> Result<(Duration, Duration), String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("expected <lo_ns>:<hi_ns>, got {text:?}"))?;
    Ok((
        Duration::from_ns(lo.parse().map_err(|e| format!("{e}"))?),
        Duration::from_ns(hi.parse().map_err(|e| format!("{e}"))?),
    ))
}

fn parse_classifier(text: &str) -> Result<ClassifierSpec, String> {
    if text == "oracle" {
        return Ok(ClassifierSpec::Oracle);
    }
    let rest = text
        .strip_prefix("estimated:")
        .ok_or_else(|| format!("expected oracle or estimated:<warmup_ns>, got {text:?}"))?;
    Ok(ClassifierSpec::Estimated {
        warmup: SimTime::from_ns(rest.parse().map_err(|e| format!("{e}"))?),
    })
}

fn parse_attack(kv: &mut KvReader, duration: SimTime) -> Result<AttackPlan, ScenarioError> {
    let kind_text = match kv.take("attack.kind") {
        None => return Ok(AttackPlan::none()),
        Some((_, text)) => text,
    };
    let bad = |key: &str, msg: String| ScenarioError::BadValue { key: key.into(), msg };
    let kind = match kind_text.as_str() {
        "none" => return Ok(AttackPlan::none()),
        "selective" => AttackKind::Selective {
            targets: KindSet::from_str(&kv.require("attack.targets")?)
                .map_err(|e| bad("attack.targets", e))?,
            delay: Duration::from_ns(
                kv.int::<i64>("attack.delay_ns")?
                    .ok_or(ScenarioError::MissingKey { key: "attack.delay_ns" })?,
            ),
        },
        "incremental" => AttackKind::Incremental {
            targets: KindSet::from_str(&kv.require("attack.targets")?)
                .map_err(|e| bad("attack.targets", e))?,
            ramp: Ppm::from_ppb(
                kv.int::<i64>("attack.ramp_ppb")?
                    .ok_or(ScenarioError::MissingKey { key: "attack.ramp_ppb" })?,
            ),
        },
        "asymmetric" => AttackKind::AsymmetricLink {
            direction: Direction::from_str(&kv.require("attack.direction")?)
                .map_err(|e| bad("attack.direction", e))?,
            delay: Duration::from_ns(
                kv.int::<i64>("attack.delay_ns")?
                    .ok_or(ScenarioError::MissingKey { key: "attack.delay_ns" })?,
            ),
        },
        other => {
            return Err(bad(
                "attack.kind",
                format!("expected none, selective, incremental, or asymmetric, got {other:?}"),
            ))
        }
    };
    let start = kv.int::<u64>("attack.window_start_ns")?.map(SimTime::from_ns);
    let end = kv.int::<u64>("attack.window_end_ns")?.map(SimTime::from_ns);
    let window = ActiveWindow {
        start: start.unwrap_or(SimTime::ZERO),
        end: end.unwrap_or(duration),
    };
    Ok(AttackPlan { kind, window })
}

fn parse_guard(kv: &mut KvReader) -> Result<GuardSpec, ScenarioError> {
    let mut guard = GuardSpec::disabled();
    if let Some(enabled) = kv.bool("guard.bounds")? {
        guard.bounds_enabled = enabled;
    }
    let to_slave = kv.int::<i64>("guard.floor_to_slave_ns")?.map(Duration::from_ns);
    let to_master = kv.int::<i64>("guard.floor_to_master_ns")?.map(Duration::from_ns);
    guard.floors = OwdConstraints::new(
        to_slave.unwrap_or(Duration::ZERO),
        to_master.unwrap_or(Duration::ZERO),
    )
    .map_err(config)?;

    let rtd_max = kv.int::<i64>("guard.rtd_max_ns")?;
    let interval = kv.int::<i64>("guard.correction_interval_ns")?;
    let max_drift = kv.int::<i64>("guard.max_drift_ppb")?;
    guard.system = match (rtd_max, interval, max_drift) {
        (None, None, None) => None,
        (Some(rtd), Some(ival), Some(drift)) => Some(SystemBoundParams {
            rtd_max: Duration::from_ns(rtd),
            correction_interval: Duration::from_ns(ival),
            max_drift: Ppm::from_ppb(drift),
        }),
        _ => {
            return Err(ScenarioError::PartialGroup {
                group: "guard.rtd_max_ns, guard.correction_interval_ns, guard.max_drift_ppb",
            })
        }
    };

    if let Some(window) = kv.int::<u64>("guard.replay_window")? {
        guard.replay = Some(ReplayPolicy::new(window).map_err(config)?);
    }
    if let Some((_, text)) = kv.take("guard.padding") {
        guard.padding = parse_padding(&text)
            .map_err(|msg| ScenarioError::BadValue { key: "guard.padding".into(), msg })?;
    }

    let ranges = [
        kv.take("guard.sync_dither_ns"),
        kv.take("guard.followup_lag_ns"),
        kv.take("guard.delayreq_lag_ns"),
    ];
    guard.timing = if ranges.iter().all(|r| r.is_none()) {
        None
    } else if let [Some(sync), Some(fu), Some(dr)] = &ranges {
        let range = |key: &str, text: &str| {
            parse_range(text).map_err(|msg| ScenarioError::BadValue { key: key.into(), msg })
        };
        Some(TimingRandomization {
            sync_dither: range("guard.sync_dither_ns", &sync.1)?,
            followup_lag: range("guard.followup_lag_ns", &fu.1)?,
            delayreq_lag: range("guard.delayreq_lag_ns", &dr.1)?,
        })
    } else {
        return Err(ScenarioError::PartialGroup {
            group: "guard.sync_dither_ns, guard.followup_lag_ns, guard.delayreq_lag_ns",
        });
    };
    Ok(guard)
}

fn parse_noise(kv: &mut KvReader) -> Result<Option<NoiseParams>, ScenarioError> {
    let per_ms = kv.float("noise.per_ms")?;
    let min_len = kv.int::<u32>("noise.min_len")?;
    let max_len = kv.int::<u32>("noise.max_len")?;
    match (per_ms, min_len, max_len) {
        (None, None, None) => Ok(None),
        (Some(p), Some(lo), Some(hi)) => Ok(Some(NoiseParams {
            per_bin_probability: p,
            min_len: lo,
            max_len: hi,
        })),
        _ => Err(ScenarioError::PartialGroup {
            group: "noise.per_ms, noise.min_len, noise.max_len",
        }),
    }
}

fn parse_cover(kv: &mut KvReader) -> Result<Option<CoverSpec>, ScenarioError> {
    let rate = kv.float("cover.rate_hz")?;
    let min_len = kv.int::<u32>("cover.min_len")?;
    let max_len = kv.int::<u32>("cover.max_len")?;
    match (rate, min_len, max_len) {
        (None, None, None) => Ok(None),
        (Some(r), Some(lo), Some(hi)) => {
            Ok(Some(CoverSpec { rate_hz: r, min_len: lo, max_len: hi }))
        }
        _ => Err(ScenarioError::PartialGroup {
            group: "cover.rate_hz, cover.min_len, cover.max_len",
        }),
    }
}

/// Key=value lines with consumed-key tracking; leftover keys are errors.
struct KvReader {
    entries: BTreeMap<String, (usize, String)>,
}

impl KvReader {
    fn scan(text: &str) -> Result<KvReader, ScenarioError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(ScenarioError::Syntax { line, got: trimmed.to_string() });
            };
            let key = key.trim().to_string();
            if entries.insert(key.clone(), (line, value.trim().to_string())).is_some() {
                return Err(ScenarioError::DuplicateKey { line, key });
            }
        }
        Ok(KvReader { entries })
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &'static str) -> Result<String, ScenarioError> {
        self.take(key)
            .map(|(_, v)| v)
            .ok_or(ScenarioError::MissingKey { key })
    }

    fn int<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ScenarioError>
    where
        T::Err: std::fmt::Display,
    {
        self.take(key)
            .map(|(_, v)| {
                v.parse::<T>().map_err(|e| ScenarioError::BadValue {
                    key: key.to_string(),
                    msg: format!("{e}"),
                })
            })
            .transpose()
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>, ScenarioError> {
        self.int::<f64>(key)
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>, ScenarioError> {
        self.int::<bool>(key)
    }

    fn finish(self) -> Result<(), ScenarioError> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => Err(ScenarioError::UnknownKey { line, key }),
        }
    }
}

/// Names of the scenarios shipped with the simulator, in presentation order.
pub fn bundled_scenario_names() -> &'static [&'static str] {
    &[
        "fig1_baseline",
        "fig2_asym_delayreq",
        "fig3_asym_sync",
        "exp1_sync50ms",
        "exp2_delayreq50ms",
        "exp3_incremental",
        "exp3_incremental_alt",
        "fig9_nobounds",
        "fig10_owdbounds",
    ]
}

/// Builds a bundled scenario by name; `None` for unknown names.
pub fn bundled_scenario(name: &str) -> Option<Scenario> {
    let sec = SimTime::from_secs;
    let scenario = match name {
        // Benign run: slave starts 10 ms ahead on a symmetric 2 ms link,
        // converges to zero; per-cycle bounds recorded for illustration.
        "fig1_baseline" => {
            let mut s = Scenario::base(name);
            s.guard.bounds_enabled = true;
            s
        }
        // Constant extra delay on the slave-to-master leg with the servo
        // held off: the measurement settles at true + (floor - delayed)/2,
        // 7 ms against a true offset of 10 ms.
        "fig2_asym_delayreq" => {
            let mut s = Scenario::base(name);
            s.engine.servo.enabled = false;
            s.attack = AttackPlan {
                kind: AttackKind::AsymmetricLink {
                    direction: Direction::SlaveToMaster,
                    delay: Duration::from_millis(6),
                },
                window: ActiveWindow::always(),
            };
            s
        }
        // Mirror image on the master-to-slave leg: measurement reads 13 ms.
        "fig3_asym_sync" => {
            let mut s = Scenario::base(name);
            s.engine.servo.enabled = false;
            s.attack = AttackPlan {
                kind: AttackKind::AsymmetricLink {
                    direction: Direction::MasterToSlave,
                    delay: Duration::from_millis(6),
                },
                window: ActiveWindow::always(),
            };
            s
        }
        // 50 ms held on Sync and FollowUp for five minutes; the attacker
        // classifies traffic from a profile fitted during the first 150 s.
        // The servo is dragged to -25 ms.
        "exp1_sync50ms" => {
            let mut s = Scenario::base(name);
            s.duration = sec(600);
            s.slave_clock = ClockSpec { offset: Duration::from_millis(5), drift_ppb: 2000 };
            s.attack = AttackPlan {
                kind: AttackKind::Selective {
                    targets: KindSet::sync_and_followup(),
                    delay: Duration::from_millis(50),
                },
                window: ActiveWindow { start: sec(150), end: sec(450) },
            };
            s.classifier = ClassifierSpec::Estimated { warmup: sec(150) };
            s
        }
        // Same hold applied to DelayReq instead: the sign flips, +25 ms.
        "exp2_delayreq50ms" => {
            let mut s = bundled_scenario("exp1_sync50ms")?;
            s.name = name.to_string();
            s.attack.kind = AttackKind::Selective {
                targets: KindSet::of(&[MessageKind::DelayReq]),
                delay: Duration::from_millis(50),
            };
            s
        }
        // Delay ramping at 1 us/s on Sync and FollowUp for two hours:
        // ends at 7.2 ms of injected delay, -3.6 ms of induced offset,
        // with no step for a threshold detector to catch.
        "exp3_incremental" => {
            let mut s = Scenario::base(name);
            s.duration = sec(7800);
            s.slave_clock = ClockSpec { offset: Duration::from_millis(5), drift_ppb: 2000 };
            s.attack = AttackPlan {
                kind: AttackKind::Incremental {
                    targets: KindSet::sync_and_followup(),
                    ramp: Ppm::from_ppb(1000),
                },
                window: ActiveWindow { start: sec(600), end: sec(7800) },
            };
            s.classifier = ClassifierSpec::Estimated { warmup: sec(600) };
            s
        }
        // Steeper 2 us/s reading of the same schedule: past 7 ms of induced
        // offset within the same two hours.
        "exp3_incremental_alt" => {
            let mut s = bundled_scenario("exp3_incremental")?;
            s.name = name.to_string();
            s.attack.kind = AttackKind::Incremental {
                targets: KindSet::sync_and_followup(),
                ramp: Ppm::from_ppb(2000),
            };
            s
        }
        // Undefended reference: 50 ms Sync/FollowUp hold mid-run walks the
        // slave to -25 ms and nothing pushes back.
        "fig9_nobounds" => {
            let mut s = Scenario::base(name);
            s.duration = sec(300);
            s.slave_clock = ClockSpec { offset: Duration::from_millis(5), drift_ppb: 0 };
            s.attack = AttackPlan {
                kind: AttackKind::Selective {
                    targets: KindSet::sync_and_followup(),
                    delay: Duration::from_millis(50),
                },
                window: ActiveWindow { start: sec(100), end: sec(250) },
            };
            s
        }
        // Same attack with delay floors and the round-trip gate armed:
        // poisoned cycles are rejected, the servo never consumes them, and
        // the recorded bounds stay sound throughout.
        "fig10_owdbounds" => {
            let mut s = bundled_scenario("fig9_nobounds")?;
            s.name = name.to_string();
            s.guard.bounds_enabled = true;
            s.guard.floors = OwdConstraints::new(
                Duration::from_millis(2),
                Duration::from_millis(2),
            )
            .expect("positive floors");
            s.guard.system = Some(SystemBoundParams {
                rtd_max: Duration::from_millis(5),
                correction_interval: Duration::from_millis(250),
                max_drift: Ppm::from_ppb(0),
            });
            s
        }
        _ => return None,
    };
    Some(scenario)
}
