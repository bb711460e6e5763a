//! Flattening of a concrete sequence into per-qubit, per-basis drive
//! samples — the bridge from schedule to Hamiltonian.

use crate::device::Basis;
use crate::sequence::{Sequence, SequenceError, SlotKind};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("channels `{a}` and `{b}` both drive qubit `{qubit}` ({basis}) at t = {tick} ns")]
    Overlap { a: String, b: String, qubit: String, basis: Basis, tick: u64 },
}

/// Drive seen by one (qubit, basis) pair, one entry per ns tick.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Track {
    pub amp: Vec<f64>,
    pub det: Vec<f64>,
    /// Effective pulse phase; meaningful only where `amp` is nonzero.
    pub phase: Vec<f64>,
}

impl Track {
    fn zeros(len: usize) -> Track {
        Track { amp: vec![0.0; len], det: vec![0.0; len], phase: vec![0.0; len] }
    }
}

/// Fully rendered drives of a sequence. Tracks exist only for (qubit, basis)
/// pairs that receive at least one pulse; absent pairs are all-zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSamples {
    pub duration_ns: u64,
    /// Atom names in register order (fixes bitstring order downstream).
    pub qubits: Vec<String>,
    /// Bases of all declared channels, driven or not.
    pub bases: BTreeSet<Basis>,
    pub tracks: BTreeMap<(usize, Basis), Track>,
}

impl DriveSamples {
    pub fn track(&self, qubit: usize, basis: Basis) -> Option<&Track> {
        self.tracks.get(&(qubit, basis))
    }

    /// CSV dump (tick, qubit, basis, amp, det, phase) of every stored track.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "tick,qubit,basis,amp,det,phase")?;
        for ((qubit, basis), track) in &self.tracks {
            let name = &self.qubits[*qubit];
            for tick in 0..self.duration_ns as usize {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    tick, name, basis, track.amp[tick], track.det[tick], track.phase[tick]
                )?;
            }
        }
        Ok(())
    }
}

/// Render every pulse slot of a concrete sequence into per-qubit arrays.
/// Two channels driving the same (qubit, basis, tick) with any nonzero
/// sample is undefined physics and errors out.
pub fn sample_sequence(seq: &Sequence) -> Result<DriveSamples, SamplerError> {
    let duration = seq.total_duration()?;
    let qubits: Vec<String> = seq.register().names().map(String::from).collect();
    let bases: BTreeSet<Basis> = seq.declared_channels().map(|c| c.basis()).collect();
    let mut tracks: BTreeMap<(usize, Basis), Track> = BTreeMap::new();
    // which channel wrote each (qubit, basis, tick), for error reporting
    let mut writers: BTreeMap<(usize, Basis), Vec<Option<u16>>> = BTreeMap::new();
    let channel_names: Vec<&str> = seq.declared_channels().map(|c| c.name()).collect();

    for (ch_idx, ch) in seq.declared_channels().enumerate() {
        let basis = ch.basis();
        for slot in ch.slots() {
            let SlotKind::Pulse(pulse) = &slot.kind else { continue };
            let amp = pulse.amplitude().samples();
            let det = pulse.detuning().samples();
            let phase = pulse.phase();
            for qubit_name in &slot.targets {
                let qubit = seq
                    .register()
                    .index_of(qubit_name)
                    .expect("slot targets name a register atom");
                let track = tracks
                    .entry((qubit, basis))
                    .or_insert_with(|| Track::zeros(duration as usize));
                let written = writers
                    .entry((qubit, basis))
                    .or_insert_with(|| vec![None; duration as usize]);
                for k in 0..amp.len() {
                    if amp[k] == 0.0 && det[k] == 0.0 {
                        continue;
                    }
                    let tick = slot.start as usize + k;
                    if let Some(prev) = written[tick] {
                        return Err(SamplerError::Overlap {
                            a: channel_names[prev as usize].to_string(),
                            b: ch.name().to_string(),
                            qubit: qubit_name.clone(),
                            basis,
                            tick: tick as u64,
                        });
                    }
                    written[tick] = Some(ch_idx as u16);
                    track.amp[tick] = amp[k];
                    track.det[tick] = det[k];
                    if amp[k] != 0.0 {
                        track.phase[tick] = phase;
                    }
                }
            }
        }
    }
    Ok(DriveSamples { duration_ns: duration, qubits, bases, tracks })
}
