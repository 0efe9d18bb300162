//! Recovers the four-message synchronization motif from binned traffic.
//!
//! Folding each traffic class modulo the cycle period concentrates the
//! protocol messages into narrow phase clusters while unrelated traffic
//! spreads uniformly. The single slave-to-master cluster anchors the cyclic
//! rotation: the response follows the request, then the next cycle's sync
//! and its follow-up. Gap arithmetic between anchored phases yields the
//! intra-cycle timings.

use std::collections::HashMap;

use crate::net::Direction;
use crate::sim::Duration;

use super::bins::{BinEntry, BinnedStream};
use super::period::{pick_period, rank_periods};
use super::{DetectorConfig, DetectorError, DirectionMode};

/// One phase cluster of a traffic class after folding modulo the period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cluster {
    pub phase: u64,
    /// Occurrences within one bin of the peak.
    pub count: usize,
    pub wire_len: u32,
    pub direction: Option<Direction>,
}

/// Fitted picture of the synchronization traffic. All timings are bin
/// centers, so they carry the one-bin quantization of the analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct PtpProfileEstimate {
    pub cycle_period: Duration,
    /// Sync departure phase within the cycle, as observed at the tap.
    pub sync_phase: Duration,
    pub sync_to_followup: Duration,
    pub followup_to_delayreq: Duration,
    pub delayreq_to_delayresp: Duration,
    /// Wire length shared by sync, follow-up, and response.
    pub cycle_msg_len: u32,
    /// Wire length of the delay request (equal to `cycle_msg_len` when the
    /// tunnel maps all of them to one block size).
    pub delayreq_len: u32,
    pub announce_len: Option<u32>,
    pub announce_period: Option<Duration>,
    pub announce_phase: Option<Duration>,
    /// Fraction of predicted motif slots occupied by a matching packet.
    pub confidence: f64,
}

impl PtpProfileEstimate {
    pub fn cycle_period_bins(&self) -> u64 {
        (self.cycle_period.as_ns() / 1_000_000) as u64
    }
}

fn bins_to_duration(bins: u64) -> Duration {
    Duration::from_ns(bins as i64 * 1_000_000)
}

/// Finds phase clusters for one class folded modulo `period_bins`: phases
/// hit by at least `threshold` occurrences, i.e. by a majority of cycles.
/// Emission phases are assumed stable within one bin, which holds whenever
/// the underlying timings are fixed per cycle; dithered timings spread the
/// fold flat and produce no clusters at all, by design.
fn find_clusters(bins: &[u64], period_bins: u64, threshold: usize) -> Vec<(u64, usize)> {
    let p = period_bins as usize;
    let mut counts = vec![0usize; p];
    for &b in bins {
        counts[(b % period_bins) as usize] += 1;
    }
    (0..p)
        .filter(|&i| counts[i] >= threshold)
        .map(|i| (i as u64, counts[i]))
        .collect()
}

fn cyclic_gap(from: u64, to: u64, period: u64) -> u64 {
    (to + period - from) % period
}

struct Slot {
    phase: u64,
    wire_len: u32,
    direction: Option<Direction>,
}

/// Fits the motif at a given cycle period. `mode` controls whether packet
/// direction is available to the fit; with direction withheld the request
/// can only be identified when its wire length is unique within the motif.
pub fn fit_motif(
    stream: &BinnedStream,
    period_bins: u64,
    mode: DirectionMode,
    cfg: &DetectorConfig,
) -> Result<PtpProfileEstimate, DetectorError> {
    if period_bins < 8 {
        return Err(DetectorError::PeriodTooShort { period_bins });
    }
    let reps = stream.window_bins() / period_bins;
    if reps < cfg.min_cluster_reps as u64 {
        return Err(DetectorError::InsufficientWindow {
            have_cycles: reps,
            need_cycles: cfg.min_cluster_reps as u64,
        });
    }
    let threshold =
        ((cfg.cluster_frac * reps as f64).ceil() as usize).max(cfg.min_occurrences);

    let with_direction = mode == DirectionMode::Observed;
    let mut clusters: Vec<Cluster> = Vec::new();
    for (class, count) in stream.classes(with_direction) {
        if count < threshold {
            continue;
        }
        let class_bins = stream.class_bins(class);
        for (phase, count) in find_clusters(&class_bins, period_bins, threshold) {
            clusters.push(Cluster {
                phase,
                count,
                wire_len: class.wire_len,
                direction: class.direction,
            });
        }
    }

    let slots = select_motif(&clusters, mode)?;
    let anchored = anchor_rotation(slots, period_bins);

    let (announce_len, announce_period, announce_phase) =
        fit_announce(stream, &anchored, period_bins, mode, cfg);

    let confidence = slot_confidence(stream, &anchored, period_bins, with_direction);

    let [sync, follow_up, delay_req, delay_resp] = anchored;
    Ok(PtpProfileEstimate {
        cycle_period: bins_to_duration(period_bins),
        sync_phase: bins_to_duration(sync.phase),
        sync_to_followup: bins_to_duration(cyclic_gap(sync.phase, follow_up.phase, period_bins)),
        followup_to_delayreq: bins_to_duration(cyclic_gap(
            follow_up.phase,
            delay_req.phase,
            period_bins,
        )),
        delayreq_to_delayresp: bins_to_duration(cyclic_gap(
            delay_req.phase,
            delay_resp.phase,
            period_bins,
        )),
        cycle_msg_len: sync.wire_len,
        delayreq_len: delay_req.wire_len,
        announce_len,
        announce_period: announce_period.map(bins_to_duration),
        announce_phase: announce_phase.map(bins_to_duration),
        confidence,
    })
}

/// Picks the four motif clusters and identifies which one is the request.
fn select_motif(
    clusters: &[Cluster],
    mode: DirectionMode,
) -> Result<[Slot; 4], DetectorError> {
    match mode {
        DirectionMode::Observed => {
            // Candidate cycle lengths, strongest first.
            let mut by_len: HashMap<u32, usize> = HashMap::new();
            for c in clusters {
                *by_len.entry(c.wire_len).or_insert(0) += c.count;
            }
            let mut lens: Vec<(u32, usize)> = by_len.into_iter().collect();
            lens.sort_by_key(|&(len, n)| (usize::MAX - n, len));

            for (len, _) in lens {
                let ms: Vec<&Cluster> = clusters
                    .iter()
                    .filter(|c| {
                        c.wire_len == len && c.direction == Some(Direction::MasterToSlave)
                    })
                    .collect();
                if ms.len() != 3 {
                    continue;
                }
                let sm_same: Vec<&Cluster> = clusters
                    .iter()
                    .filter(|c| {
                        c.wire_len == len && c.direction == Some(Direction::SlaveToMaster)
                    })
                    .collect();
                let request = match sm_same.len() {
                    1 => sm_same[0],
                    0 => {
                        let sm_all: Vec<&Cluster> = clusters
                            .iter()
                            .filter(|c| c.direction == Some(Direction::SlaveToMaster))
                            .collect();
                        if sm_all.len() != 1 {
                            continue;
                        }
                        sm_all[0]
                    }
                    _ => continue,
                };
                let mut slots: Vec<Slot> = ms
                    .iter()
                    .chain(std::iter::once(&request))
                    .map(|c| Slot {
                        phase: c.phase,
                        wire_len: c.wire_len,
                        direction: c.direction,
                    })
                    .collect();
                slots.sort_by_key(|s| s.phase);
                return Ok(slots.try_into().map_err(|_| DetectorError::MotifNotFound {
                    clusters: clusters.len(),
                })?);
            }
            Err(DetectorError::MotifNotFound { clusters: clusters.len() })
        }
        DirectionMode::Withheld => {
            if clusters.len() != 4 {
                return Err(DetectorError::MotifNotFound { clusters: clusters.len() });
            }
            let unique: Vec<&Cluster> = clusters
                .iter()
                .filter(|c| {
                    clusters.iter().filter(|d| d.wire_len == c.wire_len).count() == 1
                })
                .collect();
            if unique.len() != 1 {
                return Err(DetectorError::DirectionAmbiguous {
                    candidates: if unique.is_empty() { 4 } else { unique.len() },
                });
            }
            let request_phase = unique[0].phase;
            let mut slots: Vec<Slot> = clusters
                .iter()
                .map(|c| Slot {
                    phase: c.phase,
                    wire_len: c.wire_len,
                    direction: if c.phase == request_phase {
                        Some(Direction::SlaveToMaster)
                    } else {
                        Some(Direction::MasterToSlave)
                    },
                })
                .collect();
            slots.sort_by_key(|s| s.phase);
            Ok(slots
                .try_into()
                .map_err(|_| DetectorError::MotifNotFound { clusters: 4 })?)
        }
    }
}

/// Orders phase-sorted slots as [sync, follow_up, delay_req, delay_resp].
/// Going forward cyclically from the request: response, next sync, its
/// follow-up.
fn anchor_rotation(slots: [Slot; 4], _period_bins: u64) -> [Slot; 4] {
    let req_idx = slots
        .iter()
        .position(|s| s.direction == Some(Direction::SlaveToMaster))
        .expect("motif selection guarantees one request slot");
    let at = |k: usize| &slots[(req_idx + k) % 4];
    [
        Slot { phase: at(2).phase, wire_len: at(2).wire_len, direction: at(2).direction },
        Slot { phase: at(3).phase, wire_len: at(3).wire_len, direction: at(3).direction },
        Slot { phase: at(0).phase, wire_len: at(0).wire_len, direction: at(0).direction },
        Slot { phase: at(1).phase, wire_len: at(1).wire_len, direction: at(1).direction },
    ]
}

/// Looks for a slower periodic master-to-slave stream once the motif slots
/// are excluded. Returns (length, period bins, phase bins) when found.
fn fit_announce(
    stream: &BinnedStream,
    motif: &[Slot; 4],
    period_bins: u64,
    mode: DirectionMode,
    cfg: &DetectorConfig,
) -> (Option<u32>, Option<u64>, Option<u64>) {
    let with_direction = mode == DirectionMode::Observed;
    for (class, count) in stream.classes(with_direction) {
        if count < cfg.min_occurrences {
            break;
        }
        if with_direction && class.direction != Some(Direction::MasterToSlave) {
            continue;
        }
        let residual: Vec<u64> = stream
            .class_bins(class)
            .into_iter()
            .filter(|&b| {
                let phase = b % period_bins;
                !motif.iter().any(|s| {
                    let d = cyclic_gap(s.phase, phase, period_bins);
                    d <= 1 || d >= period_bins - 1
                })
            })
            .collect();
        if residual.len() < cfg.min_occurrences {
            continue;
        }
        let Ok(ranked) = rank_periods(&residual, stream.last_bin(), cfg) else {
            continue;
        };
        let Some(best) = pick_period(&ranked, cfg) else {
            continue;
        };
        let p = best.period_bins as usize;
        let mut phase_counts = vec![0usize; p];
        for &b in &residual {
            phase_counts[(b % best.period_bins) as usize] += 1;
        }
        let phase = phase_counts
            .iter()
            .enumerate()
            .max_by_key(|&(i, &c)| (c, usize::MAX - i))
            .map(|(i, _)| i as u64)
            .unwrap_or(0);
        return (Some(class.wire_len), Some(best.period_bins), Some(phase));
    }
    (None, None, None)
}

/// Fraction of predicted motif slots that contain a matching packet within
/// one bin.
fn slot_confidence(
    stream: &BinnedStream,
    motif: &[Slot; 4],
    period_bins: u64,
    with_direction: bool,
) -> f64 {
    let occupied: HashMap<u64, &BinEntry> =
        stream.entries().iter().map(|e| (e.bin, e)).collect();
    let matches = |bin: u64, slot: &Slot| -> bool {
        occupied.get(&bin).is_some_and(|e| {
            e.wire_len == slot.wire_len
                && (!with_direction
                    || slot.direction.map_or(true, |d| d == e.direction))
        })
    };
    let mut predicted = 0usize;
    let mut filled = 0usize;
    for slot in motif {
        let mut b = stream.first_bin() + cyclic_gap(stream.first_bin() % period_bins, slot.phase, period_bins);
        while b <= stream.last_bin() {
            predicted += 1;
            if matches(b, slot)
                || matches(b + 1, slot)
                || (b > 0 && matches(b - 1, slot))
            {
                filled += 1;
            }
            b += period_bins;
        }
    }
    if predicted == 0 {
        0.0
    } else {
        filled as f64 / predicted as f64
    }
}
