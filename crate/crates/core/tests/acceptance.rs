//! Release gate. Every externally promised behavior is checked here and
//! reported as one verdict line; the test fails if any line fails.
//!
//! Budgets are enforced in wall time per criterion, so a regression that
//! only slows things down also fails the gate.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use ptpsim_core::adversary::{ActiveWindow, AttackKind, AttackPlan, KindSet};
use ptpsim_core::detector::synth::{generate, random_profile, strip_labels, SynthProfile};
use ptpsim_core::detector::{
    detect_profile, DetectedProfile, DetectorConfig, DetectorError, DirectionMode,
    PtpProfileEstimate,
};
use ptpsim_core::guard::{
    bound_offset, residual_uncertainty, rtd_gate, system_bound, OwdConstraints, PaddingPolicy,
    ReplayPolicy, SystemBoundParams, TimingRandomization,
};
use ptpsim_core::harness::{
    bundled_scenario, bundled_scenario_names, run_scenario, ClassifierSpec, CoverSpec, Scenario,
};
use ptpsim_core::net::{generate_noise, Direction, Jitter, NoiseParams};
use ptpsim_core::ptp::CycleStamps;
use ptpsim_core::sim::{Duration, Ppm, SimTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    name: &'static str,
    wall_s: f64,
    outcome: Result<String, String>,
}

fn check(
    name: &'static str,
    budget_s: Option<f64>,
    f: impl FnOnce() -> Result<String, String>,
) -> Verdict {
    let start = Instant::now();
    let outcome = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_string());
            Err(msg)
        }
    };
    let wall_s = start.elapsed().as_secs_f64();
    let outcome = match (outcome, budget_s) {
        (Ok(d), Some(b)) if wall_s > b => Err(format!("passed but took {wall_s:.1} s > {b} s budget ({d})")),
        (o, _) => o,
    };
    Verdict { name, wall_s, outcome }
}

fn ms(v: i64) -> Duration {
    Duration::from_millis(v)
}

fn stamps(a: u64, b: u64, c: u64, d: u64) -> CycleStamps {
    CycleStamps::new(
        SimTime::from_ns(a),
        SimTime::from_ns(b),
        SimTime::from_ns(c),
        SimTime::from_ns(d),
    )
    .unwrap()
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

// ---------------------------------------------------------------- goldens

fn golden_worked_examples() -> Result<String, String> {
    // Baseline cycle: round trip 4, apparent offset 10.
    let s = stamps(0, 12, 12, 4);
    expect("baseline rtd", s.round_trip(), Duration::from_ns(4))?;
    expect("baseline offset", s.offset(), Duration::from_ns(10))?;

    // Slowed returning path reads 7; slowed forward path reads 13.
    expect("slow return offset", stamps(0, 12, 12, 10).offset(), Duration::from_ns(7))?;
    expect("slow forward offset", stamps(0, 18, 18, 10).offset(), Duration::from_ns(13))?;

    // One-way extra of 6 against a true offset of zero biases by +-3.
    expect("asym forward", stamps(0, 16, 26, 36).offset(), Duration::from_ns(3))?;
    expect("asym return", stamps(0, 10, 20, 36).offset(), Duration::from_ns(-3))?;

    // No path knowledge: symmetric worst case [-7, 7].
    let wide = bound_offset(&stamps(0, 7, 7, 14), &OwdConstraints::NONE).map_err(|e| e.to_string())?;
    expect("wide low", wide.low, Duration::from_ns(-7))?;
    expect("wide high", wide.high, Duration::from_ns(7))?;

    // Floors (2, 6): early exchange [-6, 0] mid -3, late [0, 6] mid +3,
    // residual uncertainty 3 in both.
    let floors = OwdConstraints::new(Duration::from_ns(2), Duration::from_ns(6)).unwrap();
    let early = bound_offset(&stamps(0, 2, 2, 14), &floors).map_err(|e| e.to_string())?;
    expect("early low", early.low, Duration::from_ns(-6))?;
    expect("early high", early.high, Duration::from_ns(0))?;
    expect("early mid", early.midpoint(), Duration::from_ns(-3))?;
    expect(
        "early residual",
        residual_uncertainty(&stamps(0, 2, 2, 14), &floors).unwrap(),
        Duration::from_ns(3),
    )?;
    let late = bound_offset(&stamps(0, 8, 8, 14), &floors).map_err(|e| e.to_string())?;
    expect("late low", late.low, Duration::from_ns(0))?;
    expect("late high", late.high, Duration::from_ns(6))?;
    expect("late mid", late.midpoint(), Duration::from_ns(3))?;

    Ok("rtd=4 offset=10; asym shifts 7/13 and +-3; bounds [-7,7], [-6,0], [0,6], residual 3".into())
}

// ------------------------------------------------------------ experiments

fn run_bundled(name: &str) -> Result<ptpsim_core::harness::RunArtifacts, String> {
    run_scenario(&bundled_scenario(name).ok_or_else(|| format!("missing scenario {name}"))?)
        .map_err(|e| format!("{name}: {e}"))
}

fn within_pct(actual: Duration, target: Duration, pct: i64) -> Result<(), String> {
    let tol = Duration::from_ns(target.as_ns().abs() * pct / 100);
    if actual >= target - tol && actual <= target + tol {
        Ok(())
    } else {
        Err(format!("{actual} outside {target} +- {pct}%"))
    }
}

fn spike(art: &ptpsim_core::harness::RunArtifacts, from: u64, to: u64, positive: bool) -> Result<Duration, String> {
    let vals = art
        .sync_records
        .iter()
        .filter(|r| r.completed_at >= SimTime::from_secs(from) && r.completed_at < SimTime::from_secs(to))
        .map(|r| r.measured_offset);
    let extreme = if positive { vals.max() } else { vals.min() };
    let extreme = extreme.ok_or("no records in spike window")?;
    let ok = if positive { extreme >= ms(20) } else { extreme <= ms(-20) };
    if ok {
        Ok(extreme)
    } else {
        Err(format!("spike in [{from},{to}) s only reached {extreme}"))
    }
}

fn experiment_sync_delay() -> Result<String, String> {
    let art = run_bundled("exp1_sync50ms")?;
    within_pct(art.summary.converged_offset, ms(-25), 10)
        .map_err(|e| format!("converged offset {e}"))?;
    let onset = spike(&art, 150, 160, true)?;
    let release = spike(&art, 450, 460, false)?;
    Ok(format!(
        "converged {} (target -25 ms +- 10%), onset spike {onset}, release spike {release}",
        art.summary.converged_offset
    ))
}

fn experiment_delayreq_delay() -> Result<String, String> {
    let art = run_bundled("exp2_delayreq50ms")?;
    within_pct(art.summary.converged_offset, ms(25), 10)
        .map_err(|e| format!("converged offset {e}"))?;
    let onset = spike(&art, 150, 160, false)?;
    let release = spike(&art, 450, 460, true)?;
    Ok(format!(
        "converged {} (target +25 ms +- 10%), onset spike {onset}, release spike {release}",
        art.summary.converged_offset
    ))
}

fn experiment_incremental_ramp() -> Result<String, String> {
    let art = run_bundled("exp3_incremental")?;
    within_pct(art.summary.final_true_offset, Duration::from_micros(-3_600), 20)
        .map_err(|e| format!("final offset {e}"))?;

    // Invisible: no measurement inside the window leaves servo noise.
    let worst = art
        .sync_records
        .iter()
        .filter(|r| r.completed_at >= SimTime::from_secs(600))
        .map(|r| r.measured_offset.abs())
        .max()
        .unwrap();
    if worst > Duration::from_micros(200) {
        return Err(format!("onset/progress spike of {worst} observed"));
    }

    // Monotone walk within servo granularity.
    let mut prev: Option<Duration> = None;
    for r in art.sync_records.iter().filter(|r| r.completed_at >= SimTime::from_secs(600)) {
        if let Some(p) = prev {
            if r.true_offset > p + Duration::from_micros(5) {
                return Err(format!("true offset rose at cycle {}", r.cycle));
            }
        }
        prev = Some(r.true_offset);
    }

    // Alternate ramp interpretation ships alongside: twice the rate over
    // the same window lands at twice the stolen offset.
    let alt = run_bundled("exp3_incremental_alt")?;
    within_pct(alt.summary.final_true_offset, Duration::from_micros(-7_200), 20)
        .map_err(|e| format!("alternate-ramp final offset {e}"))?;

    Ok(format!(
        "final {} (target -3.6 ms +- 20%), worst in-window measurement {worst}, alternate ramp {}",
        art.summary.final_true_offset, alt.summary.final_true_offset
    ))
}

// --------------------------------------------------------------- detector

fn timings_of(p: &PtpProfileEstimate) -> [Duration; 4] {
    [p.sync_to_followup, p.followup_to_delayreq, p.delayreq_to_delayresp, p.cycle_period]
}

fn truth_timings(p: &SynthProfile) -> [Duration; 4] {
    [p.sync_to_followup, p.followup_to_delayreq, p.delayreq_to_delayresp, p.cycle_period]
}

fn recovered(est: &DetectedProfile) -> Result<&PtpProfileEstimate, String> {
    match est {
        DetectedProfile::Periodic(p) => Ok(p),
        DetectedProfile::Sparse(_) => Err("sparse fallback fired on a periodic stream".into()),
    }
}

fn detector_zero_noise() -> Result<String, String> {
    let cfg = DetectorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0);
    for case in 0..100 {
        let truth = random_profile(&mut rng);
        let obs = strip_labels(&generate(&truth, Duration::from_secs(120)));
        let est = detect_profile(&obs, DirectionMode::Observed, &cfg)
            .map_err(|e| format!("case {case}: {e}"))?;
        let est = recovered(&est).map_err(|e| format!("case {case}: {e}"))?;
        if timings_of(est) != truth_timings(&truth) {
            return Err(format!(
                "case {case}: timings {:?} != truth {:?}",
                timings_of(est),
                truth_timings(&truth)
            ));
        }
        expect("cycle length", est.cycle_msg_len, truth.cycle_msg_len)
            .map_err(|e| format!("case {case}: {e}"))?;
        expect("request length", est.delayreq_len, truth.delayreq_len)
            .map_err(|e| format!("case {case}: {e}"))?;
        if est.confidence < 1.0 {
            return Err(format!("case {case}: confidence {}", est.confidence));
        }
    }
    Ok("100/100 random schedules recovered exactly (timings and lengths)".into())
}

fn detector_under_noise() -> Result<String, String> {
    let cfg = DetectorConfig::default();
    let window = Duration::from_secs(1_000);
    let noise = NoiseParams { per_bin_probability: 0.999, min_len: 64, max_len: 1_400 };
    let tolerance = Duration::from_millis(1);

    let mut ok = 0;
    let mut first_miss = String::new();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA0 + seed);
        let truth = random_profile(&mut rng);
        let mut obs = strip_labels(&generate(&truth, window));
        obs.extend(
            generate_noise(&noise, SimTime::ZERO, SimTime::ZERO + window, &mut rng)
                .map_err(|e| e.to_string())?,
        );
        obs.sort_by_key(|o| o.seen_at);

        let hit = (|| -> Result<(), String> {
            let est = detect_profile(&obs, DirectionMode::Observed, &cfg)
                .map_err(|e| e.to_string())?;
            let est = recovered(&est)?;
            for (got, want) in timings_of(est).iter().zip(truth_timings(&truth)) {
                let err = (*got - want).abs();
                if err > tolerance {
                    return Err(format!("timing off by {err}"));
                }
            }
            expect("cycle length", est.cycle_msg_len, truth.cycle_msg_len)?;
            expect("request length", est.delayreq_len, truth.delayreq_len)?;
            Ok(())
        })();
        match hit {
            Ok(()) => ok += 1,
            Err(e) if first_miss.is_empty() => first_miss = format!("seed {seed}: {e}"),
            Err(_) => {}
        }
    }
    if ok >= 19 {
        Ok(format!("{ok}/20 seeds recovered under 99.9% noise over 1000 s (need >= 19)"))
    } else {
        Err(format!("{ok}/20 seeds recovered; first miss: {first_miss}"))
    }
}

fn detector_direction_ablation() -> Result<String, String> {
    // All four slots at one wire length and direction withheld: the
    // request is not identifiable and the fit must say so.
    let truth = SynthProfile {
        cycle_period: Duration::from_millis(250),
        sync_phase: Duration::from_millis(1),
        sync_to_followup: Duration::from_millis(2),
        followup_to_delayreq: Duration::from_millis(12),
        delayreq_to_delayresp: Duration::from_millis(2),
        cycle_msg_len: 154,
        delayreq_len: 154,
        announce_len: 154,
        announce_period: Duration::from_millis(2_000),
        announce_phase: Duration::from_millis(126),
    };
    let obs = strip_labels(&generate(&truth, Duration::from_secs(120)));
    match detect_profile(&obs, DirectionMode::Withheld, &DetectorConfig::default()) {
        Err(DetectorError::DirectionAmbiguous { candidates }) => {
            Ok(format!("ambiguity reported with {candidates} candidate slots"))
        }
        Err(e) => Err(format!("wrong failure mode: {e}")),
        Ok(_) => Err("profile claimed despite withheld directions and uniform lengths".into()),
    }
}

// ---------------------------------------------------------- bound soundness

struct SoundnessTally {
    scenarios: u64,
    cycles: u64,
    drops: u64,
    containment_violations: u64,
    residual_violations: u64,
    carry_violations: u64,
    law_violations: u64,
}

/// One randomized mini-scenario at the timestamp level: a short sequence
/// of exchange attempts under a delay attacker, with the offset drifting
/// (within the declared rate bound) between attempts.
fn soundness_scenario(seed: u64, tally: &mut SoundnessTally) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    tally.scenarios += 1;

    let floors = OwdConstraints::new(
        Duration::from_ns(rng.gen_range(0..=8_000_000)),
        Duration::from_ns(rng.gen_range(0..=8_000_000)),
    )
    .unwrap();
    // True per-direction minimum transit: at or above the declared floor.
    let slack_ms = Duration::from_ns(rng.gen_range(0..=4_000_000));
    let slack_sm = Duration::from_ns(rng.gen_range(0..=4_000_000));

    let params = SystemBoundParams {
        rtd_max: floors.sum() + Duration::from_ns(rng.gen_range(100_000..=20_000_000)),
        // Six attempts fit inside the interval even when every gap draws
        // its maximum, so drops can never outrun the declared T_I.
        correction_interval: Duration::from_millis(rng.gen_range(400..=2_000)),
        max_drift: Ppm::from_ppb(rng.gen_range(0..=50_000)),
    };
    let sys = system_bound(&params, &floors).unwrap();

    let mut offset = Duration::from_ns(rng.gen_range(-50_000_000..=50_000_000));
    let mut now = SimTime::from_secs(1);
    // Last accepted interval and when it was accepted.
    let mut carried: Option<(ptpsim_core::guard::OffsetBound, SimTime)> = None;

    for _ in 0..rng.gen_range(1..=6) {
        // Attempts stay dense enough that even a run of drops keeps the
        // elapsed time under the declared correction interval.
        let gap = Duration::from_ns(
            rng.gen_range(50_000_000..=params.correction_interval.as_ns() / 6),
        );
        now = now + gap;
        let drift_cap = params.max_drift.scale_ns(gap.as_ns());
        offset = offset + Duration::from_ns(rng.gen_range(-drift_cap..=drift_cap));

        // Attack: extra one-way holds, or an infinite hold (drop).
        let (hold_ms, hold_sm, dropped) = match rng.gen_range(0..10) {
            0 => (Duration::ZERO, Duration::ZERO, true),
            1..=2 => (Duration::from_ns(rng.gen_range(0..=30_000_000)), Duration::ZERO, false),
            3..=4 => (Duration::ZERO, Duration::from_ns(rng.gen_range(0..=30_000_000)), false),
            5 => (
                Duration::from_ns(rng.gen_range(0..=30_000_000)),
                Duration::from_ns(rng.gen_range(0..=30_000_000)),
                false,
            ),
            _ => (Duration::ZERO, Duration::ZERO, false),
        };

        // Whatever happened to this attempt, the carried system interval
        // (last accepted bound widened by the drift allowance) must still
        // hold the current offset.
        if let Some((bound, at)) = carried {
            let allow = Duration::from_ns(params.max_drift.scale_ns(now.since(at).as_ns()));
            if !(bound.low - allow <= offset && offset <= bound.high + allow) {
                tally.carry_violations += 1;
            }
        }

        if dropped {
            tally.drops += 1;
            continue;
        }

        let jitter_ms = Duration::from_ns(rng.gen_range(0..=3_000_000));
        let jitter_sm = Duration::from_ns(rng.gen_range(0..=3_000_000));
        let d_ms = floors.to_slave + slack_ms + jitter_ms + hold_ms;
        let d_sm = floors.to_master + slack_sm + jitter_sm + hold_sm;
        let lag = Duration::from_ns(rng.gen_range(1_000_000..=50_000_000));

        // Master ideal; slave reads true time plus the current offset.
        let sync_sent = now;
        let sync_arr = now + d_ms;
        let req_sent = sync_arr + lag;
        let req_arr = req_sent + d_sm;
        let s = CycleStamps::new(sync_sent, sync_arr + offset, req_sent + offset, req_arr)
            .expect("valid by construction");

        tally.cycles += 1;
        let bound = bound_offset(&s, &floors).expect("floors below realized path");
        if !bound.contains(offset) {
            tally.containment_violations += 1;
        }
        let resid = residual_uncertainty(&s, &floors).unwrap();
        if (offset - bound.midpoint()).abs() > resid {
            tally.residual_violations += 1;
        }

        if rtd_gate(s.round_trip(), params.rtd_max) {
            // Accepted: its half-width obeys the gate law, including the
            // drift allowance for a full correction interval.
            if bound.half_width() > sys.half_width() {
                tally.law_violations += 1;
            }
            carried = Some((bound, now));
        }
    }
}

fn bound_soundness_randomized() -> Result<String, String> {
    let mut tally = SoundnessTally {
        scenarios: 0,
        cycles: 0,
        drops: 0,
        containment_violations: 0,
        residual_violations: 0,
        carry_violations: 0,
        law_violations: 0,
    };
    for seed in 0..10_000 {
        soundness_scenario(seed, &mut tally);
    }

    // A slice of full simulator runs on top: random drift, jitter and
    // attack plans with the guard enabled, instant-matched at completion.
    let mut sim_cycles = 0u64;
    for seed in 0..400u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xF00D + seed);
        let mut s = Scenario::base(&format!("soundness_{seed}"));
        s.seed = seed + 1;
        s.duration = SimTime::from_secs(rng.gen_range(3..=6));
        s.slave_clock.offset = Duration::from_micros(rng.gen_range(-20_000..=20_000) + 100_000);
        s.master_clock.offset = Duration::from_millis(100);
        s.slave_clock.drift_ppb = rng.gen_range(-20_000..=20_000);
        s.link.extra_to_slave = Duration::from_micros(rng.gen_range(0..=3_000));
        s.link.extra_to_master = Duration::from_micros(rng.gen_range(0..=3_000));
        s.link.jitter = match rng.gen_range(0..3) {
            0 => Jitter::None,
            1 => Jitter::Uniform { lo: Duration::ZERO, hi: Duration::from_micros(2_000) },
            _ => Jitter::TruncNormal {
                mean: Duration::from_micros(500),
                sigma: Duration::from_micros(200),
            },
        };
        s.guard.bounds_enabled = true;
        s.guard.floors = OwdConstraints::new(
            Duration::from_micros(rng.gen_range(0..=2_000)),
            Duration::from_micros(rng.gen_range(0..=2_000)),
        )
        .unwrap();
        if rng.gen_bool(0.5) {
            s.guard.system = Some(SystemBoundParams {
                rtd_max: Duration::from_millis(rng.gen_range(11..=40)),
                correction_interval: Duration::from_millis(500),
                max_drift: Ppm::from_ppb(50_000),
            });
        }
        s.attack = match rng.gen_range(0..3) {
            0 => AttackPlan::none(),
            1 => AttackPlan {
                kind: AttackKind::Selective {
                    targets: KindSet::sync_and_followup(),
                    delay: Duration::from_micros(rng.gen_range(0..=20_000)),
                },
                window: ActiveWindow::always(),
            },
            _ => AttackPlan {
                kind: AttackKind::AsymmetricLink {
                    direction: if rng.gen_bool(0.5) {
                        Direction::MasterToSlave
                    } else {
                        Direction::SlaveToMaster
                    },
                    delay: Duration::from_micros(rng.gen_range(0..=10_000)),
                },
                window: ActiveWindow::always(),
            },
        };
        let art = run_scenario(&s).map_err(|e| format!("sim seed {seed}: {e}"))?;
        sim_cycles += art.summary.cycles_completed;
        if art.summary.bound_violations != 0 {
            return Err(format!(
                "sim seed {seed}: {} instant-matched bound violations",
                art.summary.bound_violations
            ));
        }
    }

    if tally.containment_violations + tally.residual_violations + tally.carry_violations > 0 {
        return Err(format!(
            "{} containment, {} residual, {} carried-interval violations over {} cycles",
            tally.containment_violations,
            tally.residual_violations,
            tally.carry_violations,
            tally.cycles
        ));
    }
    if tally.law_violations > 0 {
        return Err(format!("{} accepted cycles broke the half-width law", tally.law_violations));
    }
    Ok(format!(
        "{} randomized scenarios ({} cycles, {} drops) + {} simulated runs ({} cycles): 0 violations",
        tally.scenarios, tally.cycles, tally.drops, 400, sim_cycles
    ))
}

fn bound_halfwidth_law_exact() -> Result<String, String> {
    // Sweep round trips right up to the gate: accepted cycles saturate the
    // law exactly at the boundary, above it the gate rejects.
    let floors = OwdConstraints::new(Duration::from_ns(1_000), Duration::from_ns(3_000)).unwrap();
    let params = SystemBoundParams {
        rtd_max: Duration::from_ns(19_001),
        correction_interval: Duration::from_secs(1),
        max_drift: Ppm::from_int(2),
    };
    let sys = system_bound(&params, &floors).map_err(|e| e.to_string())?;
    let static_half = Duration::from_ns(((params.rtd_max - floors.sum()).as_ns() + 1) / 2);
    let drift_term = Duration::from_ns(params.max_drift.scale_ns(params.correction_interval.as_ns()));
    expect("system half-width", sys.half_width(), static_half + drift_term)?;

    let mut accepted = 0u64;
    let mut boundary_hit = false;
    for extra in 0..=20_000u64 {
        let rtd_tail = 4_000 + extra; // floors sum + slack
        let s = stamps(0, 2_000 + extra / 2, 2_000 + extra / 2, rtd_tail);
        let rtd = s.round_trip();
        let b = bound_offset(&s, &floors).map_err(|e| e.to_string())?;
        if !rtd_gate(rtd, params.rtd_max) {
            if rtd <= params.rtd_max {
                return Err("gate rejected a round trip at or under the threshold".into());
            }
            continue;
        }
        accepted += 1;
        if b.half_width() > static_half {
            return Err(format!(
                "accepted rtd {rtd} has half-width {} over the static law {static_half}",
                b.half_width()
            ));
        }
        if rtd == params.rtd_max {
            boundary_hit = true;
            expect("boundary half-width", b.half_width(), static_half)?;
        }
    }
    if !boundary_hit {
        return Err("sweep never reached the gate boundary".into());
    }
    Ok(format!(
        "{accepted} accepted round trips under the law; equality holds exactly at RTD_max (odd slack)"
    ))
}

// ---------------------------------------------------------- oracle identity

fn oracle_identity() -> Result<String, String> {
    let mut cycles = 0u64;
    for name in bundled_scenario_names() {
        let art = run_bundled(name)?;
        cycles += art.oracle.cycles.len() as u64;
        let worst = art.oracle.max_identity_residual();
        if worst != 0 {
            return Err(format!("{name}: residual {worst} ns"));
        }
    }
    Ok(format!(
        "decomposition residual 0 ns across all {} bundled scenarios ({cycles} cycles), jittered included",
        bundled_scenario_names().len()
    ))
}

// ---------------------------------------------------------- countermeasures

fn countermeasure_disarm() -> Result<String, String> {
    let mut s = Scenario::base("acceptance_full_defense");
    s.duration = SimTime::from_secs(400);
    s.slave_clock.offset = Duration::from_millis(5);
    s.attack = AttackPlan {
        kind: AttackKind::Selective {
            targets: KindSet::sync_and_followup(),
            delay: Duration::from_millis(50),
        },
        window: ActiveWindow { start: SimTime::from_secs(150), end: SimTime::from_secs(400) },
    };
    s.classifier = ClassifierSpec::Estimated { warmup: SimTime::from_secs(150) };
    s.guard.padding = PaddingPolicy::SchemeMax;
    s.guard.timing = Some(TimingRandomization {
        sync_dither: (Duration::ZERO, Duration::from_millis(40)),
        followup_lag: (Duration::from_millis(1), Duration::from_millis(8)),
        delayreq_lag: (Duration::from_millis(5), Duration::from_millis(60)),
    });
    s.cover = Some(CoverSpec { rate_hz: 120.0, min_len: 64, max_len: 106 });
    let art = run_scenario(&s).map_err(|e| e.to_string())?;
    let sum = &art.summary;

    if sum.detector_armed {
        return Err(format!("detector armed at confidence {:?}", sum.detector_confidence));
    }
    if let Some(conf) = sum.detector_confidence {
        if conf >= 0.9 {
            return Err(format!("confidence {conf} at or above arming threshold"));
        }
    }
    if sum.attack.total_injected != Duration::ZERO || sum.attack.packets_delayed != 0 {
        return Err(format!(
            "disarmed attacker still injected {} over {} packets",
            sum.attack.total_injected, sum.attack.packets_delayed
        ));
    }
    Ok(format!(
        "padding + timing randomization + cover: detector unarmed ({}), injected delay 0 over {} cycles",
        sum.detector_error.as_deref().unwrap_or("below threshold"),
        sum.cycles_completed
    ))
}

fn countermeasure_replay_cap() -> Result<String, String> {
    let mut s = Scenario::base("acceptance_replay_cap");
    s.duration = SimTime::from_secs(300);
    s.slave_clock.offset = Duration::ZERO;
    s.attack = AttackPlan {
        kind: AttackKind::Selective {
            targets: KindSet::sync_and_followup(),
            delay: Duration::from_millis(30),
        },
        window: ActiveWindow { start: SimTime::from_secs(60), end: SimTime::from_secs(240) },
    };
    s.cover = Some(CoverSpec { rate_hz: 200.0, min_len: 64, max_len: 106 });
    s.guard.replay = Some(ReplayPolicy::STRICT);
    let art = run_scenario(&s).map_err(|e| e.to_string())?;

    let mut max_gap = Duration::ZERO;
    let mut last: Option<SimTime> = None;
    for &(at, dir) in &art.cover_arrivals {
        if dir != Direction::MasterToSlave {
            continue;
        }
        if let Some(prev) = last {
            max_gap = max_gap.max(at.since(prev));
        }
        last = Some(at);
    }

    let mut max_delivered_hold = Duration::ZERO;
    for c in &art.oracle.cycles {
        if c.sync_injected > max_gap {
            return Err(format!(
                "cycle {}: {} hold survived a replay window fed by {} max cover gap",
                c.cycle, c.sync_injected, max_gap
            ));
        }
        max_delivered_hold = max_delivered_hold.max(c.sync_injected);
    }
    if art.summary.replay_rejected < 900 {
        return Err(format!("only {} replay rejections", art.summary.replay_rejected));
    }
    Ok(format!(
        "strict replay: {} holds rejected, worst delivered hold {} <= max cover gap {}",
        art.summary.replay_rejected, max_delivered_hold, max_gap
    ))
}

// ------------------------------------------------------------------- gate

#[test]
fn acceptance() {
    let verdicts = vec![
        check("golden-worked-examples", Some(1.0), golden_worked_examples),
        check("experiment-sync-delay", Some(60.0), experiment_sync_delay),
        check("experiment-delayreq-delay", Some(60.0), experiment_delayreq_delay),
        check("experiment-incremental-ramp", Some(60.0), experiment_incremental_ramp),
        check("detector-zero-noise", None, detector_zero_noise),
        check("detector-under-noise", None, detector_under_noise),
        check("detector-direction-ablation", None, detector_direction_ablation),
        check("bound-soundness-randomized", Some(300.0), bound_soundness_randomized),
        check("bound-halfwidth-law", None, bound_halfwidth_law_exact),
        check("oracle-identity", None, oracle_identity),
        check("countermeasure-disarm", None, countermeasure_disarm),
        check("countermeasure-replay-cap", None, countermeasure_replay_cap),
    ];

    let mut failed = 0;
    for v in &verdicts {
        match &v.outcome {
            Ok(detail) => println!("[PASS] {} ({:.2} s): {detail}", v.name, v.wall_s),
            Err(reason) => {
                failed += 1;
                println!("[FAIL] {} ({:.2} s): {reason}", v.name, v.wall_s);
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed (see lines above)");
}
