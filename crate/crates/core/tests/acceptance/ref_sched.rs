//! Independent event-list scheduler used as the oracle for the scheduling
//! property suite. It shares no code with the library: channels keep flat
//! event lists and every placement rule is recomputed by scanning them.

use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq)]
pub enum EvKind {
    Pulse { duration: u64 },
    Retarget,
    Idle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ev {
    pub kind: EvKind,
    pub start: u64,
    pub end: u64,
    pub targets: BTreeSet<usize>,
}

#[derive(Debug, Clone)]
struct Chan {
    retarget: u64,
    targets: BTreeSet<usize>,
    events: Vec<Ev>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Proto {
    MinDelay,
    WaitForAll,
    NoDelay,
}

/// Flat-list reimplementation of the channel timelines.
#[derive(Debug, Clone, Default)]
pub struct EventList {
    channels: Vec<Chan>,
}

impl EventList {
    pub fn declare(&mut self, retarget: u64, initial_targets: &[usize]) {
        let targets: BTreeSet<usize> = initial_targets.iter().copied().collect();
        let events = vec![Ev { kind: EvKind::Retarget, start: 0, end: 0, targets: targets.clone() }];
        self.channels.push(Chan { retarget, targets, events });
    }

    fn end_of(&self, ch: usize) -> u64 {
        self.channels[ch].events.last().map_or(0, |e| e.end)
    }

    pub fn retarget(&mut self, ch: usize, qubits: &[usize]) {
        let start = self.end_of(ch);
        let end = start + self.channels[ch].retarget;
        let targets: BTreeSet<usize> = qubits.iter().copied().collect();
        self.channels[ch].events.push(Ev {
            kind: EvKind::Retarget,
            start,
            end,
            targets: targets.clone(),
        });
        self.channels[ch].targets = targets;
    }

    pub fn idle(&mut self, ch: usize, duration: u64) {
        if duration == 0 {
            return;
        }
        let start = self.end_of(ch);
        let targets = self.channels[ch].targets.clone();
        self.channels[ch].events.push(Ev {
            kind: EvKind::Idle,
            start,
            end: start + duration,
            targets,
        });
    }

    pub fn play(&mut self, ch: usize, duration: u64, proto: Proto) {
        let own = self.end_of(ch);
        let start = match proto {
            Proto::NoDelay => own,
            Proto::WaitForAll => (0..self.channels.len()).map(|c| self.end_of(c)).max().unwrap(),
            Proto::MinDelay => {
                let mine = &self.channels[ch].targets;
                let mut start = own;
                for (other, chan) in self.channels.iter().enumerate() {
                    if other == ch {
                        continue;
                    }
                    for e in &chan.events {
                        let busy = matches!(e.kind, EvKind::Pulse { .. })
                            && e.targets.intersection(mine).next().is_some();
                        if busy && e.end > start {
                            start = e.end;
                        }
                    }
                }
                start
            }
        };
        if start > own {
            self.idle(ch, start - own);
        }
        let targets = self.channels[ch].targets.clone();
        self.channels[ch].events.push(Ev {
            kind: EvKind::Pulse { duration },
            start,
            end: start + duration,
            targets,
        });
    }

    pub fn align(&mut self, chans: &[usize]) {
        let latest = chans.iter().map(|&c| self.end_of(c)).max().unwrap_or(0);
        for &c in chans {
            let behind = latest - self.end_of(c);
            self.idle(c, behind);
        }
    }

    pub fn events(&self, ch: usize) -> &[Ev] {
        &self.channels[ch].events
    }
}
