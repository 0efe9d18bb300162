//! Deterministic discrete-event scheduler.
//!
//! Events fire in `(fire_at, insertion seq)` order, so simultaneous events
//! execute in the order they were scheduled and identical runs replay
//! identically.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::time::SimTime;

struct Slot<E> {
    at: SimTime,
    seq: u64,
    ev: E,
}

impl<E> PartialEq for Slot<E> {
    fn eq(&self, other: &Self) -> bool {
        self.at == other.at && self.seq == other.seq
    }
}
impl<E> Eq for Slot<E> {}

impl<E> PartialOrd for Slot<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed so the BinaryHeap max-heap pops the earliest (at, seq) first.
impl<E> Ord for Slot<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        (other.at, other.seq).cmp(&(self.at, self.seq))
    }
}

pub struct Scheduler<E> {
    heap: BinaryHeap<Slot<E>>,
    next_seq: u64,
    now: SimTime,
}

impl<E> Default for Scheduler<E> {
    fn default() -> Self {
        Scheduler::new()
    }
}

impl<E> Scheduler<E> {
    pub fn new() -> Scheduler<E> {
        Scheduler { heap: BinaryHeap::new(), next_seq: 0, now: SimTime::ZERO }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn pending(&self) -> usize {
        self.heap.len()
    }

    /// Queues `ev` to fire at `at`. Scheduling into the past is a simulation
    /// bug, not a recoverable condition.
    pub fn schedule(&mut self, at: SimTime, ev: E) {
        assert!(at >= self.now, "event scheduled at {at} before current time {}", self.now);
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Slot { at, seq, ev });
    }

    /// Runs every event with `fire_at <= horizon`, advancing `now` as it
    /// goes, and leaves `now` at the horizon. Returns the number executed.
    pub fn run_until<S>(
        &mut self,
        state: &mut S,
        horizon: SimTime,
        mut handle: impl FnMut(&mut S, &mut Scheduler<E>, SimTime, E),
    ) -> u64 {
        let mut executed = 0;
        while let Some(slot) = self.heap.peek() {
            if slot.at > horizon {
                break;
            }
            let slot = self.heap.pop().expect("peeked slot vanished");
            self.now = slot.at;
            handle(state, self, slot.at, slot.ev);
            executed += 1;
        }
        if horizon > self.now {
            self.now = horizon;
        }
        executed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::time::Duration;

    #[test]
    fn empty_queue_runs_nothing() {
        let mut s: Scheduler<u32> = Scheduler::new();
        let mut sink = Vec::new();
        assert_eq!(s.run_until(&mut sink, SimTime::from_secs(1), |v, _, _, e| v.push(e)), 0);
        assert_eq!(s.now(), SimTime::from_secs(1));
    }

    #[test]
    fn simultaneous_events_fire_in_insertion_order() {
        let mut s: Scheduler<u32> = Scheduler::new();
        let t = SimTime::from_millis(5);
        s.schedule(t, 1);
        s.schedule(t, 2);
        s.schedule(SimTime::from_millis(1), 0);
        let mut seen = Vec::new();
        s.run_until(&mut seen, SimTime::from_secs(1), |v, _, _, e| v.push(e));
        assert_eq!(seen, vec![0, 1, 2]);
    }

    #[test]
    fn handlers_can_chain_events() {
        let mut s: Scheduler<u64> = Scheduler::new();
        s.schedule(SimTime::from_ns(0), 0);
        let mut fired = Vec::new();
        let n = s.run_until(&mut fired, SimTime::from_ns(100), |v, sched, at, e| {
            v.push((at.as_ns(), e));
            if e < 3 {
                sched.schedule(at + Duration::from_ns(10), e + 1);
            }
        });
        assert_eq!(n, 4);
        assert_eq!(fired, vec![(0, 0), (10, 1), (20, 2), (30, 3)]);
    }

    #[test]
    fn horizon_is_inclusive_and_respected() {
        let mut s: Scheduler<u8> = Scheduler::new();
        s.schedule(SimTime::from_ns(10), 1);
        s.schedule(SimTime::from_ns(11), 2);
        let mut seen = Vec::new();
        assert_eq!(s.run_until(&mut seen, SimTime::from_ns(10), |v, _, _, e| v.push(e)), 1);
        assert_eq!(seen, vec![1]);
        assert_eq!(s.pending(), 1);
        assert_eq!(s.run_until(&mut seen, SimTime::from_ns(20), |v, _, _, e| v.push(e)), 1);
        assert_eq!(seen, vec![1, 2]);
    }

    #[test]
    #[should_panic(expected = "before current time")]
    fn scheduling_into_the_past_panics() {
        let mut s: Scheduler<u8> = Scheduler::new();
        s.schedule(SimTime::from_ns(5), 1);
        let mut sink = ();
        s.run_until(&mut sink, SimTime::from_ns(50), |_, _, _, _| {});
        s.schedule(SimTime::from_ns(20), 2);
    }
}
