//! Event-driven M_t/M/n sample paths with an optional tagged customer.
//!
//! Arrivals come from thinning a homogeneous Poisson stream at the rate
//! function's upper bound. Departures are redrawn at every event as
//! `Exp(mu * busy)`; the tagged customer's own service completion is the only
//! per-customer timer. Customers present when the tagged customer arrives form
//! the *cohort* (the Z-process); under FCFS they are always served first.

use rand::Rng;
use rand_distr::Exp1;

use crate::model::{QueueModel, RateFunction, Servers};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TaggedState {
    Absent,
    Waiting {
        arrived: f64,
    },
    InService {
        arrived: f64,
        started: f64,
        end: f64,
    },
    Departed {
        arrived: f64,
        started: f64,
        end: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Arrival,
    /// Departure of an untagged customer; `cohort` is set when it belonged to the cohort.
    Departure {
        cohort: bool,
    },
    TaggedDeparture,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
}

pub struct Simulator<R> {
    service_rate: f64,
    servers: Option<u64>,
    arrival: RateFunction,
    bound: f64,
    rng: R,
    time: f64,
    others: u64,
    next_candidate: f64,
    cohort: Option<u64>,
    tagged: TaggedState,
}

impl<R: Rng> Simulator<R> {
    /// Starts at `t = 0` with `round(initial_count)` customers, all untagged.
    pub fn new(model: &QueueModel, mut rng: R) -> Self {
        let bound = model.arrival.upper_bound();
        let next_candidate = if bound > 0.0 {
            rng.sample::<f64, _>(Exp1) / bound
        } else {
            f64::INFINITY
        };
        Self {
            service_rate: model.service_rate,
            servers: match model.servers {
                Servers::Finite(n) => Some(n),
                Servers::Infinite => None,
            },
            arrival: model.arrival.clone(),
            bound,
            rng,
            time: 0.0,
            others: model.initial_count.round() as u64,
            next_candidate,
            cohort: None,
            tagged: TaggedState::Absent,
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Untagged customers in the system.
    pub fn others(&self) -> u64 {
        self.others
    }

    /// Everyone in the system, including the tagged customer while present.
    pub fn population(&self) -> u64 {
        self.others + u64::from(self.tagged_present())
    }

    pub fn cohort(&self) -> Option<u64> {
        self.cohort
    }

    pub fn tagged(&self) -> TaggedState {
        self.tagged
    }

    pub fn tagged_present(&self) -> bool {
        matches!(
            self.tagged,
            TaggedState::Waiting { .. } | TaggedState::InService { .. }
        )
    }

    /// Busy servers attending untagged customers.
    pub fn busy_others(&self) -> u64 {
        match self.servers {
            None => self.others,
            Some(n) => {
                let free_for_others = match self.tagged {
                    TaggedState::InService { .. } => n - 1,
                    _ => n,
                };
                self.others.min(free_for_others)
            }
        }
    }

    /// Starts tracking the customers present now as the cohort.
    pub fn mark_cohort(&mut self) {
        self.cohort = Some(self.others);
    }

    /// Adds the tagged customer at the current time, behind everyone present.
    pub fn inject_tagged(&mut self) {
        assert!(
            matches!(self.tagged, TaggedState::Absent),
            "tagged customer injected twice"
        );
        self.mark_cohort();
        let arrived = self.time;
        self.tagged = TaggedState::Waiting { arrived };
        self.maybe_start_tagged();
    }

    fn maybe_start_tagged(&mut self) {
        if let TaggedState::Waiting { arrived } = self.tagged {
            let cohort = self.cohort.unwrap_or(0);
            if self.servers.is_none_or(|n| cohort < n) {
                let service = self.rng.sample::<f64, _>(Exp1) / self.service_rate;
                self.tagged = TaggedState::InService {
                    arrived,
                    started: self.time,
                    end: self.time + service,
                };
            }
        }
    }

    /// Advances to the next state change at or before `limit`. Returns `None`
    /// and parks the clock at `limit` when nothing happens before then.
    pub fn next_event(&mut self, limit: f64) -> Option<Event> {
        loop {
            let busy = self.busy_others();
            let departure = if busy > 0 {
                self.time + self.rng.sample::<f64, _>(Exp1) / (self.service_rate * busy as f64)
            } else {
                f64::INFINITY
            };
            let tagged_end = match self.tagged {
                TaggedState::InService { end, .. } => end,
                _ => f64::INFINITY,
            };
            let next = self.next_candidate.min(departure).min(tagged_end);
            if next > limit || next.is_infinite() {
                self.time = limit.max(self.time);
                return None;
            }
            self.time = next;

            if next == self.next_candidate {
                self.next_candidate = next + self.rng.sample::<f64, _>(Exp1) / self.bound;
                let accept = self.arrival.rate(next) / self.bound;
                if self.rng.random::<f64>() < accept {
                    self.others += 1;
                    return Some(Event {
                        time: next,
                        kind: EventKind::Arrival,
                    });
                }
                continue;
            }

            if next == tagged_end {
                if let TaggedState::InService {
                    arrived,
                    started,
                    end,
                } = self.tagged
                {
                    self.tagged = TaggedState::Departed {
                        arrived,
                        started,
                        end,
                    };
                }
                return Some(Event {
                    time: next,
                    kind: EventKind::TaggedDeparture,
                });
            }

            let from_cohort = match self.cohort {
                Some(c) if c > 0 => {
                    let in_service = c.min(busy);
                    in_service == busy
                        || self.rng.random::<f64>() * (busy as f64) < in_service as f64
                }
                _ => false,
            };
            self.others -= 1;
            if from_cohort {
                self.cohort = self.cohort.map(|c| c - 1);
                self.maybe_start_tagged();
            }
            return Some(Event {
                time: next,
                kind: EventKind::Departure {
                    cohort: from_cohort,
                },
            });
        }
    }

    /// Runs until `t` (events exactly at `t` included).
    pub fn advance_to(&mut self, t: f64) {
        while self.next_event(t).is_some() {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model(n: Servers, rate: f64, x0: f64) -> QueueModel {
        QueueModel::new(n, 1.0, RateFunction::constant(rate).unwrap(), x0).unwrap()
    }

    #[test]
    fn never_negative_and_service_bounded() {
        let m = model(Servers::Finite(3), 5.0, 2.0);
        let mut sim = Simulator::new(&m, ChaCha8Rng::seed_from_u64(1));
        let mut last = 0.0;
        while let Some(ev) = sim.next_event(200.0) {
            assert!(ev.time >= last);
            last = ev.time;
            assert!(sim.busy_others() <= 3);
            assert_eq!(sim.busy_others(), sim.others().min(3));
        }
        assert_eq!(sim.time(), 200.0);
    }

    #[test]
    fn tagged_waits_for_cohort_to_drop_below_servers() {
        let m = model(Servers::Finite(2), 0.0, 4.0);
        let mut sim = Simulator::new(&m, ChaCha8Rng::seed_from_u64(3));
        sim.inject_tagged();
        assert_eq!(sim.cohort(), Some(4));
        assert!(matches!(sim.tagged(), TaggedState::Waiting { .. }));
        let mut cohort_departures = 0;
        loop {
            let ev = sim.next_event(f64::INFINITY).unwrap();
            match ev.kind {
                EventKind::Departure { cohort } => {
                    assert!(cohort);
                    cohort_departures += 1;
                    if cohort_departures < 3 {
                        assert!(matches!(sim.tagged(), TaggedState::Waiting { .. }));
                    } else if cohort_departures == 3 {
                        assert!(matches!(sim.tagged(), TaggedState::InService { .. }));
                        // one server left for the remaining cohort member
                        assert_eq!(sim.busy_others(), 1);
                    }
                }
                EventKind::TaggedDeparture => break,
                EventKind::Arrival => unreachable!("no arrivals at rate zero"),
            }
        }
        assert!(cohort_departures >= 3);
    }

    #[test]
    fn infinite_servers_start_immediately() {
        let m = model(Servers::Infinite, 10.0, 50.0);
        let mut sim = Simulator::new(&m, ChaCha8Rng::seed_from_u64(9));
        sim.advance_to(1.0);
        sim.inject_tagged();
        assert!(matches!(sim.tagged(), TaggedState::InService { .. }));
        assert_eq!(sim.busy_others(), sim.others());
    }

    #[test]
    fn deterministic_given_seed() {
        let m = model(Servers::Finite(5), 4.0, 0.0);
        let run = |seed| {
            let mut sim = Simulator::new(&m, ChaCha8Rng::seed_from_u64(seed));
            let mut v = Vec::new();
            while let Some(ev) = sim.next_event(20.0) {
                v.push((ev.time, sim.others()));
            }
            v
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }
}
