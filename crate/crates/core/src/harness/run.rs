//! Scenario execution: one deterministic event loop wiring the master, the
//! link with its in-path attacker, the passive tap, and the slave together.
//!
//! Everything runs on true time. Clock readings are taken live at the event
//! that produces them, and the oracle samples both clocks at those same
//! instants, so a correction landing later in the same run never leaks into
//! an earlier reading. Servo output is applied as an instantaneous step at
//! cycle completion (slews included; the action kind is still recorded).
//!
//! Randomness is split into fixed substreams of one seeded generator (link
//! jitter, background noise, cover traffic, emission timing), so enabling
//! one stochastic feature never shifts another's draws and identical
//! scenarios replay byte-identically.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::adversary::{decide_labeled, AttackKind, AttackRecord, AttackStats, ClassifierHandle};
use crate::detector::{detect_profile, DirectionMode};
use crate::guard::{
    apply_padding, bound_offset, rtd_gate, BoundError, BoundRecord, PaddingError, ReplayState,
};
use crate::net::{
    generate_noise, sort_observations, Direction, Envelope, InjectedDelay, Link, LinkError,
    NoiseError, Observation,
};
use crate::ptp::{
    CycleStamps, Master, MessageKind, PtpPayload, ServoError, ServoState, SlaveEngine,
    SlaveOutcome, SyncRecord,
};
use crate::sim::{ClockError, ClockModel, Duration, Scheduler, SimTime};

use super::oracle::{CycleTruth, OracleView};
use super::scenario::{ClassifierSpec, Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("servo: {0}")]
    Servo(#[from] ServoError),
    #[error("link: {0}")]
    Link(#[from] LinkError),
    #[error("clock: {0}")]
    Clock(#[from] ClockError),
    #[error("bound: {0}")]
    Bound(#[from] BoundError),
    #[error("padding: {0}")]
    Padding(#[from] PaddingError),
    #[error("noise: {0}")]
    Noise(#[from] NoiseError),
}

impl RunError {
    /// Configuration mistakes (bad scenario) versus invariant violations
    /// surfacing mid-run; callers map these to different exit codes.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            RunError::Scenario(_) | RunError::Servo(_) | RunError::Link(_) | RunError::Noise(_)
        )
    }
}

/// Aggregate results of one run, serializable as `key=value` text.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub name: String,
    pub seed: u64,
    pub duration: SimTime,
    pub cycles_completed: u64,
    pub cycles_abandoned: u64,
    /// Completed cycles the round-trip gate kept away from the servo.
    pub cycles_rejected: u64,
    pub replay_rejected: u64,
    /// Recorded bounds that failed against the oracle (must stay 0).
    pub bound_violations: u64,
    pub odd_round_trips: u64,
    /// Mean true offset over the last 5% of the evaluation span (the
    /// attack window when one is active, the whole run otherwise).
    pub converged_offset: Duration,
    pub final_true_offset: Duration,
    pub max_abs_true_offset: Duration,
    pub max_abs_measured: Duration,
    pub attack: AttackStats,
    pub detector_armed: bool,
    pub detector_confidence: Option<f64>,
    pub detector_error: Option<String>,
    pub cover_sent: u64,
    pub noise_observations: u64,
}

pub const SUMMARY_HEADER: &str = "# summary v1";

impl RunSummary {
    pub fn to_text(&self) -> String {
        let mut out = format!("{SUMMARY_HEADER}\n");
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        kv("name", self.name.clone());
        kv("seed", self.seed.to_string());
        kv("duration_ns", self.duration.as_ns().to_string());
        kv("cycles_completed", self.cycles_completed.to_string());
        kv("cycles_abandoned", self.cycles_abandoned.to_string());
        kv("cycles_rejected", self.cycles_rejected.to_string());
        kv("replay_rejected", self.replay_rejected.to_string());
        kv("bound_violations", self.bound_violations.to_string());
        kv("odd_round_trips", self.odd_round_trips.to_string());
        kv("converged_offset_ns", self.converged_offset.as_ns().to_string());
        kv("final_true_offset_ns", self.final_true_offset.as_ns().to_string());
        kv("max_abs_true_offset_ns", self.max_abs_true_offset.as_ns().to_string());
        kv("max_abs_measured_ns", self.max_abs_measured.as_ns().to_string());
        kv("attack_packets_seen", self.attack.packets_seen.to_string());
        kv("attack_packets_delayed", self.attack.packets_delayed.to_string());
        kv("attack_total_injected_ns", self.attack.total_injected.as_ns().to_string());
        kv("attack_max_injected_ns", self.attack.max_injected.as_ns().to_string());
        kv("detector_armed", self.detector_armed.to_string());
        if let Some(c) = self.detector_confidence {
            kv("detector_confidence", c.to_string());
        }
        if let Some(e) = &self.detector_error {
            kv("detector_error", e.clone());
        }
        kv("cover_sent", self.cover_sent.to_string());
        kv("noise_observations", self.noise_observations.to_string());
        out
    }
}

/// Everything a run produces, in memory. The traces are ready to serialize
/// with their module writers; tests consume them directly.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub scenario: Scenario,
    pub summary: RunSummary,
    pub sync_records: Vec<SyncRecord>,
    pub bound_records: Vec<BoundRecord>,
    /// Full tap view: protocol, cover, and background noise, time-sorted.
    pub observations: Vec<Observation>,
    pub attack_records: Vec<AttackRecord>,
    pub oracle: OracleView,
    /// Delivery instants of cover packets, per direction.
    pub cover_arrivals: Vec<(SimTime, Direction)>,
}

#[derive(Debug, Clone, Copy)]
enum Payload {
    Ptp(PtpPayload),
    Cover,
}

#[derive(Debug, Clone, Copy)]
enum Event {
    /// Draws this cycle's emission timing and schedules the Sync departure.
    StartCycle,
    SendSync { followup_lag: Duration, delayreq_lag: Duration },
    SendFollowUp { payload: PtpPayload },
    SendAnnounce,
    SlaveSendDelayReq { cycle: u64 },
    Deliver { payload: Payload, seq: u64, direction: Direction },
    /// Fits the attacker's traffic profile from everything tapped so far.
    FitProfile,
    CoverSend { direction: Direction },
}

/// In-flight oracle bookkeeping for one cycle.
#[derive(Debug, Default, Clone, Copy)]
struct TruthParts {
    sync_sent_true: Option<SimTime>,
    master_err_at_sync_sent: Option<Duration>,
    sync_transit: Option<Duration>,
    sync_injected: Duration,
    slave_err_at_sync_arrival: Option<Duration>,
    offset_at_sync_arrival: Option<Duration>,
    req_sent_true: Option<SimTime>,
    slave_err_at_req_sent: Option<Duration>,
    offset_at_req_departure: Option<Duration>,
    req_transit: Option<Duration>,
    req_injected: Duration,
    master_err_at_req_arrival: Option<Duration>,
}

struct World {
    scenario: Scenario,
    master_clock: ClockModel,
    slave_clock: ClockModel,
    master: Master,
    slave: SlaveEngine,
    servo: ServoState,
    link: Link,
    classifier: Option<ClassifierHandle>,
    replay_states: [ReplayState; 2],
    rng_link: ChaCha8Rng,
    rng_cover: ChaCha8Rng,
    rng_timing: ChaCha8Rng,
    noise: Vec<Observation>,
    /// Per-cycle DelayReq lag drawn at Sync departure, consumed when the
    /// FollowUp arrives.
    dr_lags: BTreeMap<u64, Duration>,
    truth_parts: BTreeMap<u64, TruthParts>,
    sync_records: Vec<SyncRecord>,
    bound_records: Vec<BoundRecord>,
    observations: Vec<Observation>,
    attack_records: Vec<AttackRecord>,
    cycles: Vec<CycleTruth>,
    cover_arrivals: Vec<(SimTime, Direction)>,
    stats: AttackStats,
    cycles_rejected: u64,
    replay_rejected: u64,
    bound_violations: u64,
    cover_sent: u64,
    detector_armed: bool,
    detector_confidence: Option<f64>,
    detector_error: Option<String>,
    fatal: Option<RunError>,
}

impl World {
    fn relative_offset(&self, t: SimTime) -> Result<Duration, RunError> {
        Ok(crate::sim::offset_between(&self.slave_clock, &self.master_clock, t)?)
    }

    /// Emission timing for the cycle starting now.
    fn draw_timing(&mut self) -> (Duration, Duration, Duration) {
        match &self.scenario.guard.timing {
            Some(randomized) => {
                let t = randomized.draw(&mut self.rng_timing);
                (t.sync_dither, t.followup_lag, t.delayreq_lag)
            }
            None => (
                Duration::ZERO,
                self.scenario.engine.followup_lag,
                self.scenario.engine.delayreq_lag,
            ),
        }
    }

    /// Sends one packet through the tunnel: padding, sequence assignment,
    /// tap observation, attacker decision at the tap instant, transit.
    /// Returns the arrival instant and the injected share of the transit.
    fn send(
        &mut self,
        sched: &mut Scheduler<Event>,
        now: SimTime,
        payload: Payload,
        plain_len: u32,
        direction: Direction,
    ) -> Result<(SimTime, Duration), RunError> {
        let wire_len = apply_padding(plain_len, self.scenario.guard.padding, &self.scenario.encryption)?;
        let seq = self.link.assign_seq(direction);
        let env = Envelope { payload, plain_len, wire_len, sent_at: now, direction, seq };
        let obs = self.link.observe(&env);
        self.observations.push(obs);

        let truth = match payload {
            Payload::Ptp(p) => Some(p.kind),
            Payload::Cover => None,
        };
        let attack_active = self.scenario.attack.kind != AttackKind::None;
        let injected = match (&self.classifier, attack_active) {
            (Some(handle), true) => {
                let (delay, label) =
                    decide_labeled(&obs, truth, &self.scenario.attack, handle, obs.seen_at);
                self.stats.record(delay);
                self.attack_records.push(AttackRecord {
                    at: obs.seen_at,
                    label,
                    action: InjectedDelay::Hold(delay),
                });
                delay
            }
            _ => Duration::ZERO,
        };

        let arrival = self
            .link
            .transmit(&env, InjectedDelay::Hold(injected), &mut self.rng_link)
            .expect("held packets always arrive");
        sched.schedule(arrival, Event::Deliver { payload, seq, direction });
        Ok((arrival, injected))
    }

    fn send_ptp(
        &mut self,
        sched: &mut Scheduler<Event>,
        now: SimTime,
        payload: PtpPayload,
    ) -> Result<(), RunError> {
        let kind = payload.kind;
        let (arrival, injected) =
            self.send(sched, now, Payload::Ptp(payload), kind.plain_len(), kind.direction())?;
        let parts = self.truth_parts.entry(payload.cycle).or_default();
        match kind {
            MessageKind::Sync => {
                parts.sync_transit = Some(arrival.since(now));
                parts.sync_injected = injected;
            }
            MessageKind::DelayReq => {
                parts.req_transit = Some(arrival.since(now));
                parts.req_injected = injected;
            }
            _ => {}
        }
        Ok(())
    }

    fn handle(
        &mut self,
        sched: &mut Scheduler<Event>,
        now: SimTime,
        ev: Event,
    ) -> Result<(), RunError> {
        match ev {
            Event::StartCycle => {
                let (dither, followup_lag, delayreq_lag) = self.draw_timing();
                sched.schedule(now + dither, Event::SendSync { followup_lag, delayreq_lag });
                sched.schedule(now + self.scenario.engine.sync_interval, Event::StartCycle);
            }
            Event::SendSync { followup_lag, delayreq_lag } => {
                let reading = self.master_clock.local_time(now)?;
                let (sync, followup) = self.master.start_cycle(reading);
                self.dr_lags.insert(sync.cycle, delayreq_lag);
                let parts = self.truth_parts.entry(sync.cycle).or_default();
                parts.sync_sent_true = Some(now);
                parts.master_err_at_sync_sent = Some(reading - now);
                self.send_ptp(sched, now, sync)?;
                sched.schedule(now + followup_lag, Event::SendFollowUp { payload: followup });
            }
            Event::SendFollowUp { payload } => {
                self.send_ptp(sched, now, payload)?;
            }
            Event::SendAnnounce => {
                let payload = self.master.announce();
                self.send_ptp(sched, now, payload)?;
                sched.schedule(
                    now + self.scenario.engine.announce_interval,
                    Event::SendAnnounce,
                );
            }
            Event::SlaveSendDelayReq { cycle } => {
                let reading = self.slave_clock.local_time(now)?;
                let relative = self.relative_offset(now)?;
                let parts = self.truth_parts.entry(cycle).or_default();
                parts.req_sent_true = Some(now);
                parts.slave_err_at_req_sent = Some(reading - now);
                parts.offset_at_req_departure = Some(relative);
                self.slave.on_delay_req_sent(cycle, reading);
                let payload =
                    PtpPayload { kind: MessageKind::DelayReq, cycle, carried: None };
                self.send_ptp(sched, now, payload)?;
            }
            Event::Deliver { payload, seq, direction } => {
                if let Some(policy) = self.scenario.guard.replay {
                    if !self.replay_states[direction.index()].check(seq, policy) {
                        self.replay_rejected += 1;
                        return Ok(());
                    }
                }
                match payload {
                    Payload::Cover => self.cover_arrivals.push((now, direction)),
                    Payload::Ptp(p) => self.deliver_ptp(sched, now, p)?,
                }
            }
            Event::FitProfile => {
                self.fit_profile(now);
            }
            Event::CoverSend { direction } => {
                let cover = self.scenario.cover.expect("cover events only when configured");
                let plain = self.rng_cover.gen_range(cover.min_len..=cover.max_len);
                self.send(sched, now, Payload::Cover, plain, direction)?;
                self.cover_sent += 1;
                sched.schedule(now + self.cover_gap(cover.rate_hz), Event::CoverSend { direction });
            }
        }
        Ok(())
    }

    fn deliver_ptp(
        &mut self,
        sched: &mut Scheduler<Event>,
        now: SimTime,
        payload: PtpPayload,
    ) -> Result<(), RunError> {
        match payload.kind {
            MessageKind::Sync => {
                let reading = self.slave_clock.local_time(now)?;
                let relative = self.relative_offset(now)?;
                let parts = self.truth_parts.entry(payload.cycle).or_default();
                parts.slave_err_at_sync_arrival = Some(reading - now);
                parts.offset_at_sync_arrival = Some(relative);
                self.slave.on_sync(&payload, reading);
            }
            MessageKind::FollowUp => {
                if let SlaveOutcome::SendDelayReq { cycle } = self.slave.on_follow_up(&payload) {
                    self.dr_lags = self.dr_lags.split_off(&cycle);
                    let lag = self
                        .dr_lags
                        .remove(&cycle)
                        .unwrap_or(self.scenario.engine.delayreq_lag);
                    sched.schedule(now + lag, Event::SlaveSendDelayReq { cycle });
                }
            }
            MessageKind::DelayReq => {
                let reading = self.master_clock.local_time(now)?;
                let parts = self.truth_parts.entry(payload.cycle).or_default();
                parts.master_err_at_req_arrival = Some(reading - now);
                let resp = self.master.on_delay_req(&payload, reading);
                self.send_ptp(sched, now, resp)?;
            }
            MessageKind::DelayResp => {
                if let SlaveOutcome::Completed { cycle, stamps } =
                    self.slave.on_delay_resp(&payload)
                {
                    self.complete_cycle(cycle, stamps, now)?;
                }
            }
            MessageKind::Announce => {}
        }
        Ok(())
    }

    fn complete_cycle(
        &mut self,
        cycle: u64,
        stamps: CycleStamps,
        now: SimTime,
    ) -> Result<(), RunError> {
        let parts = self
            .truth_parts
            .remove(&cycle)
            .expect("completed cycle has oracle bookkeeping");
        // Abandoned cycles never complete; drop their leftover bookkeeping
        // so long runs stay lean.
        while let Some((&stale, _)) = self.truth_parts.iter().next() {
            if stale < cycle {
                self.truth_parts.remove(&stale);
            } else {
                break;
            }
        }

        let (measured, remainder) = stamps.offset_and_remainder();
        let round_trip = stamps.round_trip();
        let offset_at_completion = self.relative_offset(now)?;
        let missing = "completed cycle misses a leg reading";
        let truth = CycleTruth {
            cycle,
            completed_at: now,
            stamps,
            measured,
            remainder,
            round_trip,
            sync_transit: parts.sync_transit.expect(missing),
            req_transit: parts.req_transit.expect(missing),
            sync_injected: parts.sync_injected,
            req_injected: parts.req_injected,
            slave_err_at_sync_arrival: parts.slave_err_at_sync_arrival.expect(missing),
            master_err_at_sync_sent: parts.master_err_at_sync_sent.expect(missing),
            slave_err_at_req_sent: parts.slave_err_at_req_sent.expect(missing),
            master_err_at_req_arrival: parts.master_err_at_req_arrival.expect(missing),
            offset_at_sync_arrival: parts.offset_at_sync_arrival.expect(missing),
            offset_at_req_departure: parts.offset_at_req_departure.expect(missing),
            offset_at_completion,
        };

        let accepted = match &self.scenario.guard.system {
            Some(system) => rtd_gate(round_trip, system.rtd_max),
            None => true,
        };
        if !accepted {
            self.cycles_rejected += 1;
        }

        if self.scenario.guard.bounds_enabled {
            let bound = bound_offset(&stamps, &self.scenario.guard.floors)?;
            if !truth.bound_respects_truth(&bound) {
                self.bound_violations += 1;
            }
            self.bound_records.push(BoundRecord {
                completed_at: now,
                cycle,
                low: bound.low,
                high: bound.high,
                midpoint: bound.midpoint(),
                true_offset: offset_at_completion,
                accepted,
            });
        }

        let applied = if accepted {
            let correction = self.servo.apply(measured).amount();
            if correction != Duration::ZERO {
                self.slave_clock.apply_correction(now, correction)?;
            }
            correction
        } else {
            Duration::ZERO
        };

        self.sync_records.push(SyncRecord {
            completed_at: now,
            cycle,
            round_trip,
            measured_offset: measured,
            true_offset: offset_at_completion,
            applied_correction: applied,
        });
        self.cycles.push(truth);
        Ok(())
    }

    /// Interval to the next cover packet: exponential with the configured
    /// mean rate, never zero so arrivals stay strictly ordered per draw.
    fn cover_gap(&mut self, rate_hz: f64) -> Duration {
        let exp = Exp::new(rate_hz).expect("validated positive rate");
        let secs: f64 = exp.sample(&mut self.rng_cover);
        Duration::from_ns(((secs * 1e9).round() as i64).max(1))
    }

    fn fit_profile(&mut self, now: SimTime) {
        let mut tapped = self.observations.clone();
        tapped.extend(self.noise.iter().copied().filter(|o| o.seen_at < now));
        match detect_profile(&tapped, DirectionMode::Observed, &self.scenario.detector) {
            Ok(profile) => {
                self.detector_confidence = Some(profile.confidence());
                if profile.is_armed(&self.scenario.detector) {
                    self.detector_armed = true;
                    self.classifier = Some(ClassifierHandle::Estimated(profile));
                }
            }
            Err(e) => {
                self.detector_error = Some(e.to_string());
            }
        }
    }
}

/// Mean true offset over the last 5% of `[start, end)`, judged by cycle
/// completion instants; the final record's value when none land there.
fn converged_offset(records: &[SyncRecord], start: SimTime, end: SimTime) -> Duration {
    let span = end.since(start).as_ns();
    let from = start + Duration::from_ns(span - span / 20);
    let tail: Vec<i64> = records
        .iter()
        .filter(|r| r.completed_at >= from && r.completed_at < end)
        .map(|r| r.true_offset.as_ns())
        .collect();
    if tail.is_empty() {
        return records.last().map(|r| r.true_offset).unwrap_or(Duration::ZERO);
    }
    Duration::from_ns(tail.iter().sum::<i64>() / tail.len() as i64)
}

/// Runs one scenario to completion and returns everything it produced.
pub fn run_scenario(scenario: &Scenario) -> Result<RunArtifacts, RunError> {
    scenario.validate()?;

    let seed = scenario.seed;
    let stream = |n: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(n);
        rng
    };
    let mut rng_noise = stream(1);

    let noise = match &scenario.noise {
        Some(params) => {
            generate_noise(params, SimTime::ZERO, scenario.duration, &mut rng_noise)?
        }
        None => Vec::new(),
    };

    let mut world = World {
        scenario: scenario.clone(),
        master_clock: ClockModel::new(scenario.master_clock.offset, scenario.master_clock.drift()),
        slave_clock: ClockModel::new(scenario.slave_clock.offset, scenario.slave_clock.drift()),
        master: Master::default(),
        slave: SlaveEngine::new(),
        servo: ServoState::new(scenario.engine.servo)?,
        link: Link::new(scenario.link.clone())?,
        classifier: match scenario.classifier {
            ClassifierSpec::Oracle => Some(ClassifierHandle::Oracle),
            ClassifierSpec::Estimated { .. } => None,
        },
        replay_states: [ReplayState::new(), ReplayState::new()],
        rng_link: stream(0),
        rng_cover: stream(2),
        rng_timing: stream(3),
        noise,
        dr_lags: BTreeMap::new(),
        truth_parts: BTreeMap::new(),
        sync_records: Vec::new(),
        bound_records: Vec::new(),
        observations: Vec::new(),
        attack_records: Vec::new(),
        cycles: Vec::new(),
        cover_arrivals: Vec::new(),
        stats: AttackStats::default(),
        cycles_rejected: 0,
        replay_rejected: 0,
        bound_violations: 0,
        cover_sent: 0,
        detector_armed: matches!(scenario.classifier, ClassifierSpec::Oracle),
        detector_confidence: None,
        detector_error: None,
        fatal: None,
    };

    let mut sched: Scheduler<Event> = Scheduler::new();
    sched.schedule(SimTime::ZERO, Event::StartCycle);
    // Announces sit mid-cycle so they never share a departure instant with
    // a Sync (the deployed stacks interleave them the same way).
    let announce_phase = scenario.engine.sync_interval.halve().0;
    sched.schedule(SimTime::ZERO + announce_phase, Event::SendAnnounce);
    if let ClassifierSpec::Estimated { warmup } = scenario.classifier {
        sched.schedule(warmup, Event::FitProfile);
    }
    if let Some(cover) = scenario.cover {
        for direction in Direction::BOTH {
            let first = world.cover_gap(cover.rate_hz);
            sched.schedule(SimTime::ZERO + first, Event::CoverSend { direction });
        }
    }

    sched.run_until(&mut world, scenario.duration, |w, s, now, ev| {
        if w.fatal.is_some() {
            return;
        }
        if let Err(e) = w.handle(s, now, ev) {
            w.fatal = Some(e);
        }
    });
    if let Some(fatal) = world.fatal {
        return Err(fatal);
    }

    let (eval_start, eval_end) = match scenario.attack.kind {
        AttackKind::None => (SimTime::ZERO, scenario.duration),
        _ => (
            scenario.attack.window.start.min(scenario.duration),
            scenario.attack.window.end.min(scenario.duration),
        ),
    };
    let summary = RunSummary {
        name: scenario.name.clone(),
        seed: scenario.seed,
        duration: scenario.duration,
        cycles_completed: world.slave.stats.cycles_completed,
        cycles_abandoned: world.slave.stats.cycles_abandoned,
        cycles_rejected: world.cycles_rejected,
        replay_rejected: world.replay_rejected,
        bound_violations: world.bound_violations,
        odd_round_trips: world.slave.stats.odd_round_trips,
        converged_offset: converged_offset(&world.sync_records, eval_start, eval_end),
        final_true_offset: world
            .sync_records
            .last()
            .map(|r| r.true_offset)
            .unwrap_or(Duration::ZERO),
        max_abs_true_offset: world
            .sync_records
            .iter()
            .map(|r| r.true_offset.abs())
            .max()
            .unwrap_or(Duration::ZERO),
        max_abs_measured: world
            .sync_records
            .iter()
            .map(|r| r.measured_offset.abs())
            .max()
            .unwrap_or(Duration::ZERO),
        attack: world.stats,
        detector_armed: world.detector_armed,
        detector_confidence: world.detector_confidence,
        detector_error: world.detector_error,
        cover_sent: world.cover_sent,
        noise_observations: world.noise.len() as u64,
    };

    let mut observations = world.observations;
    observations.extend(world.noise);
    sort_observations(&mut observations);

    Ok(RunArtifacts {
        scenario: scenario.clone(),
        summary,
        sync_records: world.sync_records,
        bound_records: world.bound_records,
        observations,
        attack_records: world.attack_records,
        oracle: OracleView { cycles: world.cycles },
        cover_arrivals: world.cover_arrivals,
    })
}

#[cfg(test)]
mod tests {
    use crate::harness::scenario::bundled_scenario;

    use super::*;

    #[test]
    fn baseline_converges_to_zero_and_bounds_hold() {
        let scenario = bundled_scenario("fig1_baseline").unwrap();
        let run = run_scenario(&scenario).unwrap();
        assert!(run.summary.cycles_completed > 200);
        assert_eq!(run.summary.bound_violations, 0);
        // Slave starts 10 ms ahead and the servo pulls it under a
        // microsecond well before the end.
        assert!(run.summary.converged_offset.abs() <= Duration::from_micros(1));
        assert_eq!(run.oracle.max_identity_residual(), 0);
        // Every recorded bound contains the true offset on this jitter-free
        // drift-free run, and the midpoint equals the measurement's target.
        for b in &run.bound_records {
            assert!(b.low <= b.true_offset && b.true_offset <= b.high);
        }
    }

    #[test]
    fn worked_asymmetry_examples_read_seven_and_thirteen() {
        let req = run_scenario(&bundled_scenario("fig2_asym_delayreq").unwrap()).unwrap();
        // Servo disabled: every cycle measures true 10 ms minus 3 ms.
        for r in req.sync_records.iter().skip(1) {
            assert_eq!(r.measured_offset, Duration::from_millis(7));
            assert_eq!(r.true_offset, Duration::from_millis(10));
        }
        assert_eq!(req.oracle.max_identity_residual(), 0);

        let sync = run_scenario(&bundled_scenario("fig3_asym_sync").unwrap()).unwrap();
        for r in sync.sync_records.iter().skip(1) {
            assert_eq!(r.measured_offset, Duration::from_millis(13));
        }
    }

    #[test]
    fn identical_seeds_replay_identically() {
        let scenario = bundled_scenario("fig1_baseline").unwrap();
        let a = run_scenario(&scenario).unwrap();
        let b = run_scenario(&scenario).unwrap();
        assert_eq!(a.sync_records, b.sync_records);
        assert_eq!(a.observations, b.observations);
        assert_eq!(a.summary, b.summary);
    }

    #[test]
    fn cover_and_noise_populate_the_tap_view() {
        let mut scenario = bundled_scenario("fig1_baseline").unwrap();
        scenario.duration = SimTime::from_secs(10);
        scenario.cover = Some(crate::harness::scenario::CoverSpec {
            rate_hz: 50.0,
            min_len: 64,
            max_len: 256,
        });
        scenario.noise = Some(crate::net::NoiseParams {
            per_bin_probability: 0.1,
            min_len: 64,
            max_len: 1500,
        });
        let run = run_scenario(&scenario).unwrap();
        assert!(run.summary.cover_sent > 400, "got {}", run.summary.cover_sent);
        assert!(run.summary.noise_observations > 500);
        assert!(!run.cover_arrivals.is_empty());
        assert!(run
            .observations
            .windows(2)
            .all(|w| w[0].seen_at <= w[1].seen_at));
        // Cover flows both ways through the tunnel.
        assert!(run.cover_arrivals.iter().any(|(_, d)| *d == Direction::MasterToSlave));
        assert!(run.cover_arrivals.iter().any(|(_, d)| *d == Direction::SlaveToMaster));
    }
}
